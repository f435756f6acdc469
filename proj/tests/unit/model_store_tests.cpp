#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "refscout/model_store.hpp"
#include "support/synthetic.hpp"

using namespace refscout;
using testsupport::make_separable;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("refscout-bundle-" + name)).string();
}

ModelBundle trained_bundle(AlgorithmKind kind, std::uint64_t seed) {
    Dataset ds = make_separable(40, Rng(seed));
    Scaler scaler = fit_minmax(ds);
    Dataset scaled = apply_scaler(scaler, ds);
    FeatureMask mask = kind == AlgorithmKind::lr ? select_features(scaled, 30) : FeatureMask::all();
    AlgorithmSpec spec = kind == AlgorithmKind::rf ? AlgorithmSpec(kind, {{"ntrees", "8"}})
                                                   : AlgorithmSpec(kind);
    ModelBundle bundle;
    bundle.model = train(spec, scaled, mask, seed);
    bundle.model.tag = "test";
    bundle.scaler = scaler;
    bundle.dataset_hash = fnv1a_hex("fixture");
    return bundle;
}

}  // namespace

TEST_CASE("round trip preserves predictions for every algorithm kind") {
    int file_id = 0;
    for (AlgorithmKind kind : {AlgorithmKind::rf, AlgorithmKind::dt, AlgorithmKind::lr,
                               AlgorithmKind::svm, AlgorithmKind::nb}) {
        ModelBundle bundle = trained_bundle(kind, 100 + static_cast<std::uint64_t>(file_id));
        std::string path = temp_path("rt-" + std::to_string(file_id++) + ".bundle");
        save_bundle(bundle, path);
        ModelBundle loaded = load_bundle(path);
        std::remove(path.c_str());

        CHECK(loaded.model.spec.kind == kind);
        CHECK(loaded.model.seed == bundle.model.seed);
        CHECK(loaded.model.tag == "test");
        CHECK(loaded.dataset_hash == bundle.dataset_hash);
        CHECK(loaded.feature_names == bundle.feature_names);

        Rng rng(500 + static_cast<std::uint64_t>(file_id));
        for (int trial = 0; trial < 100; ++trial) {
            std::array<double, 61> x{};
            for (auto& v : x) v = rng.next_double(-2, 2);
            Prediction a = predict(bundle.model, x);
            Prediction b = predict(loaded.model, x);
            REQUIRE(a.label == b.label);
            REQUIRE(std::abs(a.score - b.score) <= 1e-12);
        }
    }
}

TEST_CASE("saving the same test-tagged bundle twice is byte-identical") {
    ModelBundle bundle = trained_bundle(AlgorithmKind::dt, 7);
    bundle.timestamp = "2026-01-01T00:00:00Z";  // ignored: tag == "test"
    std::string p1 = temp_path("dup-1.bundle");
    std::string p2 = temp_path("dup-2.bundle");
    save_bundle(bundle, p1);
    save_bundle(bundle, p2);
    std::string a = read_file(p1);
    std::string b = read_file(p2);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    CHECK(a == b);
    CHECK(a.find("created:") == std::string::npos);
}

TEST_CASE("production bundles may carry a timestamp") {
    ModelBundle bundle = trained_bundle(AlgorithmKind::dt, 8);
    bundle.model.tag = "production";
    bundle.timestamp = "2026-01-02T03:04:05Z";
    std::string text = bundle_to_text(bundle);
    CHECK(text.find("created: 2026-01-02T03:04:05Z") != std::string::npos);
    ModelBundle loaded = bundle_from_text(text, "<mem>");
    CHECK(loaded.timestamp == bundle.timestamp);
    CHECK(loaded.model.tag == "production");
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(load_bundle("/nonexistent/dir/model.bundle"), IoError);
}

TEST_CASE("unsupported version raises VersionError") {
    ModelBundle bundle = trained_bundle(AlgorithmKind::dt, 9);
    std::string text = bundle_to_text(bundle);
    std::string versioned = text;
    versioned.replace(versioned.find(" 1\n"), 3, " 999\n");
    CHECK_THROWS_AS(bundle_from_text(versioned, "<mem>"), VersionError);
}

TEST_CASE("corrupt and truncated bundles raise FormatError") {
    CHECK_THROWS_AS(bundle_from_text("garbage\n", "<mem>"), FormatError);
    ModelBundle bundle = trained_bundle(AlgorithmKind::rf, 10);
    std::string text = bundle_to_text(bundle);
    std::string truncated = text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(bundle_from_text(truncated, "<mem>"), FormatError);
}

TEST_CASE("unwritable path raises IoError") {
    ModelBundle bundle = trained_bundle(AlgorithmKind::dt, 11);
    CHECK_THROWS_AS(save_bundle(bundle, "/nonexistent-dir/sub/model.bundle"), IoError);
}

TEST_CASE("mask survives the round trip and drives prediction") {
    ModelBundle bundle = trained_bundle(AlgorithmKind::lr, 12);
    REQUIRE(bundle.model.mask.count() == 30);
    std::string text = bundle_to_text(bundle);
    ModelBundle loaded = bundle_from_text(text, "<mem>");
    CHECK(loaded.model.mask.count() == 30);
    for (std::size_t f = 0; f < 61; ++f)
        CHECK(loaded.model.mask.selected[f] == bundle.model.mask.selected[f]);
}
