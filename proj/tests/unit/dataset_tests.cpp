#include <catch2/catch_amalgamated.hpp>

#include "refscout/dataset.hpp"

using namespace refscout;

namespace {

MinedInstance make_instance(double tag, bool label, const std::string& project = "p") {
    MinedInstance mi;
    mi.project_id = project;
    mi.commit = "c";
    mi.class_path = "A.java:A";
    mi.method_signature = "f(int," + std::to_string(static_cast<int>(tag)) + ")";
    mi.label = label;
    mi.features.fill(0.0);
    mi.features[0] = tag;
    return mi;
}

Dataset balanced(int pos, int neg) {
    Dataset ds;
    for (int i = 0; i < pos; ++i) ds.instances.push_back(make_instance(i, true));
    for (int i = 0; i < neg; ++i) ds.instances.push_back(make_instance(1000 + i, false));
    return ds;
}

}  // namespace

TEST_CASE("deduplicate collapses exact duplicates to the first occurrence") {
    Dataset ds;
    ds.instances.push_back(make_instance(1, true));
    ds.instances.push_back(make_instance(1, true));
    ds.instances.push_back(make_instance(2, false));
    Dataset out = deduplicate(ds);
    REQUIRE(out.instances.size() == 2);
    CHECK(out.instances[0].features[0] == 1.0);
    CHECK(out.instances[1].features[0] == 2.0);
}

TEST_CASE("deduplicate removes vectors that appear with both labels") {
    Dataset ds;
    ds.instances.push_back(make_instance(7, true));
    ds.instances.push_back(make_instance(7, false));
    ds.instances.push_back(make_instance(8, true));
    Dataset out = deduplicate(ds);
    REQUIRE(out.instances.size() == 1);
    CHECK(out.instances[0].features[0] == 8.0);
}

TEST_CASE("deduplicate is idempotent") {
    Dataset ds;
    ds.instances.push_back(make_instance(1, true));
    ds.instances.push_back(make_instance(1, true));
    ds.instances.push_back(make_instance(2, false));
    ds.instances.push_back(make_instance(2, true));
    Dataset once = deduplicate(ds);
    Dataset twice = deduplicate(once);
    REQUIRE(once.instances.size() == twice.instances.size());
    for (std::size_t i = 0; i < once.instances.size(); ++i)
        CHECK(once.instances[i].features == twice.instances[i].features);
}

TEST_CASE("stratified split rounding: 10+10 at 0.2 gives 2+2") {
    auto [train, test] = stratified_split(balanced(10, 10), 0.2, 42);
    CHECK(test.count_label(true) == 2);
    CHECK(test.count_label(false) == 2);
    CHECK(train.instances.size() == 16);
}

TEST_CASE("stratified split rounding: 9+11 at 0.2 gives 2+2") {
    auto [train, test] = stratified_split(balanced(9, 11), 0.2, 42);
    CHECK(test.count_label(true) == 2);   // round(1.8)
    CHECK(test.count_label(false) == 2);  // round(2.2)
}

TEST_CASE("stratified split: same seed gives identical member lists") {
    Dataset ds = balanced(20, 15);
    auto [tr1, te1] = stratified_split(ds, 0.2, 7);
    auto [tr2, te2] = stratified_split(ds, 0.2, 7);
    REQUIRE(te1.instances.size() == te2.instances.size());
    for (std::size_t i = 0; i < te1.instances.size(); ++i)
        CHECK(te1.instances[i].features == te2.instances[i].features);
    auto [tr3, te3] = stratified_split(ds, 0.2, 8);
    bool same = te1.instances.size() == te3.instances.size();
    if (same) {
        same = true;
        for (std::size_t i = 0; i < te1.instances.size(); ++i)
            same = same && te1.instances[i].features == te3.instances[i].features;
    }
    CHECK_FALSE(same);  // different seed picks different members
}

TEST_CASE("split partitions the dataset") {
    Dataset ds = balanced(13, 9);
    auto [train, test] = stratified_split(ds, 0.2, 3);
    CHECK(train.instances.size() + test.instances.size() == ds.instances.size());
    std::set<double> train_tags, test_tags;
    for (const auto& i : train.instances) train_tags.insert(i.features[0]);
    for (const auto& i : test.instances) test_tags.insert(i.features[0]);
    for (double t : test_tags) CHECK(train_tags.count(t) == 0);
}

TEST_CASE("split preserves class proportions within one instance per class") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Dataset ds = balanced(37, 23);
        auto [train, test] = stratified_split(ds, 0.2, seed);
        CHECK(std::abs(test.count_label(true) - std::llround(37 * 0.2)) <= 1);
        CHECK(std::abs(test.count_label(false) - std::llround(23 * 0.2)) <= 1);
    }
}

TEST_CASE("split requires both classes") {
    Dataset ds;
    ds.instances.push_back(make_instance(1, true));
    CHECK_THROWS_AS(stratified_split(ds, 0.2, 1), EmptyClass);
}

TEST_CASE("min-max scaling formula and degenerate rules") {
    Dataset train;
    for (double v : {2.0, 10.0}) {
        MinedInstance mi = make_instance(v, v > 5);
        mi.features[1] = 4.0;  // constant feature
        train.instances.push_back(mi);
    }
    Scaler s = fit_minmax(train);
    std::array<double, 61> x{};
    x[0] = 6.0;
    x[1] = 99.0;
    auto scaled = scale_features(s, x);
    CHECK(scaled[0] == 0.5);
    CHECK(scaled[1] == 0.0);  // constant feature maps to 0
    x[0] = 12.0;
    CHECK(scale_features(s, x)[0] == 1.25);  // no clamping
}

TEST_CASE("scaled training features lie in [0,1]") {
    Dataset ds = balanced(25, 25);
    Rng rng(5);
    for (auto& i : ds.instances)
        for (auto& f : i.features) f = rng.next_double(-50, 50);
    Scaler s = fit_minmax(ds);
    Dataset scaled = apply_scaler(s, ds);
    for (const auto& i : scaled.instances)
        for (double f : i.features) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
}

TEST_CASE("select_features picks the label-copy feature at k=1") {
    Dataset ds;
    Rng rng(11);
    for (int i = 0; i < 40; ++i) {
        bool label = i % 2 == 0;
        MinedInstance mi = make_instance(i, label);
        for (std::size_t f = 0; f < 61; ++f) mi.features[f] = rng.next_double(0, 1);
        mi.features[17] = label ? 1.0 : 0.0;  // exact label copy
        ds.instances.push_back(mi);
    }
    FeatureMask mask = select_features(ds, 1);
    CHECK(mask.count() == 1);
    CHECK(mask.selected[17]);
}

TEST_CASE("select_features keeps everything when k >= 61") {
    Dataset ds = balanced(10, 10);
    CHECK(select_features(ds, 61).count() == 61);
    CHECK(select_features(ds, 100).count() == 61);
}

TEST_CASE("select_features breaks ties by lower index") {
    Dataset ds;
    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
        bool label = i % 2 == 0;
        MinedInstance mi = make_instance(i, label);
        for (std::size_t f = 0; f < 61; ++f) mi.features[f] = rng.next_double(0, 1);
        // Identical informative twins at indices 5 and 9.
        double informative = (label ? 2.0 : 0.0) + 0.1 * (i % 3);
        mi.features[5] = informative;
        mi.features[9] = informative;
        ds.instances.push_back(mi);
    }
    FeatureMask mask = select_features(ds, 1);
    CHECK(mask.selected[5]);
    CHECK_FALSE(mask.selected[9]);
}

TEST_CASE("dataset csv round-trips including quoted signatures") {
    Dataset ds;
    MinedInstance a = make_instance(1.5, true);
    a.method_signature = "f(int,Map<String,Integer>)";  // commas need quoting
    a.class_path = "dir/My File.java:Outer.Inner";
    a.features[3] = 1.0 / 3.0;
    a.features[60] = -7.25;
    ds.instances.push_back(a);
    ds.instances.push_back(make_instance(2, false));

    std::string text = dataset_to_csv(ds, {"s-threshold: 20"});
    CHECK(text.substr(0, std::string(kDatasetFormatLine).size()) == kDatasetFormatLine);
    CHECK(text.find("# s-threshold: 20\n") != std::string::npos);

    Dataset back = dataset_from_csv(text, "<mem>");
    REQUIRE(back.instances.size() == 2);
    CHECK(back.instances[0].method_signature == a.method_signature);
    CHECK(back.instances[0].class_path == a.class_path);
    CHECK(back.instances[0].features == a.features);
    CHECK(back.instances[0].label);
    CHECK_FALSE(back.instances[1].label);

    // Serialization is stable byte for byte.
    CHECK(dataset_to_csv(back, {"s-threshold: 20"}) == text);
}

TEST_CASE("dataset csv rejects corrupt input") {
    CHECK_THROWS_AS(dataset_from_csv("not a dataset", "<mem>"), FormatError);
    std::string no_header = std::string(kDatasetFormatLine) + "\nwrong,header\n";
    CHECK_THROWS_AS(dataset_from_csv(no_header, "<mem>"), FormatError);
    std::string short_row = std::string(kDatasetFormatLine) + "\n" + dataset_header() + "\np,c,k,m,1,1,2\n";
    CHECK_THROWS_AS(dataset_from_csv(short_row, "<mem>"), FormatError);
    CHECK_THROWS_AS(read_dataset_csv("/nonexistent/file.csv"), IoError);
}
