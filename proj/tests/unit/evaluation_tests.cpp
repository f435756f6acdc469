#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "refscout/evaluation.hpp"
#include "support/synthetic.hpp"

using namespace refscout;
using testsupport::blank_instance;
using testsupport::make_separable;

namespace {

// Independent metric formulas for the cross-check property.
struct OracleMetrics {
    double accuracy, precision, recall, f1;
};

OracleMetrics oracle_metrics(long long tp, long long fp, long long fn, long long tn) {
    auto safe_div = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
    OracleMetrics m{};
    m.accuracy = safe_div(double(tp + tn), double(tp + fp + fn + tn));
    m.precision = safe_div(double(tp), double(tp + fp));
    m.recall = safe_div(double(tp), double(tp + fn));
    m.f1 = (m.precision + m.recall) == 0 ? 0.0
                                         : 2 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

// A model stub that predicts a fixed label sequence is awkward through the
// TrainedModel interface, so evaluation arithmetic is exercised directly via
// report_from_confusion plus an end-to-end evaluate() on a real model.

Dataset multi_project_separable(int per_project, const std::vector<std::string>& names,
                                std::uint64_t seed) {
    Dataset ds;
    int tag = 0;
    for (const auto& name : names) {
        Dataset part = testsupport::make_separable(per_project, Rng(seed + tag));
        for (auto& inst : part.instances) {
            inst.project_id = name;
            inst.method_signature = "m" + std::to_string(tag++) + "()";
            ds.instances.push_back(inst);
        }
    }
    return ds;
}

}  // namespace

TEST_CASE("evaluation arithmetic on the documented confusion matrix") {
    EvaluationReport r = report_from_confusion({9, 1, 3, 7});
    CHECK(r.accuracy == Catch::Approx(0.8));
    CHECK(r.precision == Catch::Approx(0.9));
    CHECK(r.recall == Catch::Approx(0.75));
    CHECK(r.f1 == Catch::Approx(0.8182).margin(1e-4));
    CHECK(r.confusion.total() == 20);
}

TEST_CASE("perfect predictor yields all ones") {
    Dataset ds = make_separable(60, Rng(1));
    Scaler s = fit_minmax(ds);
    Dataset scaled = apply_scaler(s, ds);
    TrainedModel model = train(AlgorithmSpec(AlgorithmKind::dt), scaled, FeatureMask::all(), 1);
    EvaluationReport r = evaluate(model, scaled);
    CHECK(r.confusion.fp == 0);
    CHECK(r.confusion.fn == 0);
    CHECK(r.accuracy == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
}

TEST_CASE("all-negative predictor hits the zero-division rule") {
    // An untrained LR (zero epochs) scores 0.5 everywhere; force all-negative
    // with a tiny negative bias.
    TrainedModel model;
    model.spec = AlgorithmSpec(AlgorithmKind::lr);
    LinearParams p;
    p.weights.assign(61, 0.0);
    p.bias = -1.0;
    model.params = p;
    model.mask = FeatureMask::all();

    Dataset ds = make_separable(30, Rng(2));
    EvaluationReport r = evaluate(model, ds);
    CHECK(r.confusion.tp == 0);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
    CHECK(r.accuracy == Catch::Approx(0.5));
}

TEST_CASE("property: report matches independent formulas on random confusions") {
    Rng rng(55);
    for (int trial = 0; trial < 300; ++trial) {
        long long tp = static_cast<long long>(rng.next_below(20));
        long long fp = static_cast<long long>(rng.next_below(20));
        long long fn = static_cast<long long>(rng.next_below(20));
        long long tn = static_cast<long long>(rng.next_below(20));
        if (tp + fp + fn + tn == 0) continue;
        EvaluationReport r = report_from_confusion({tp, fp, fn, tn});
        OracleMetrics o = oracle_metrics(tp, fp, fn, tn);
        CHECK(std::abs(r.accuracy - o.accuracy) <= 1e-12);
        CHECK(std::abs(r.precision - o.precision) <= 1e-12);
        CHECK(std::abs(r.recall - o.recall) <= 1e-12);
        CHECK(std::abs(r.f1 - o.f1) <= 1e-12);
    }
}

TEST_CASE("permutation importance: constant feature drops exactly zero") {
    Dataset ds = make_separable(50, Rng(3));
    for (auto& inst : ds.instances) inst.features[7] = 3.5;  // constant column
    TrainedModel model = train(AlgorithmSpec(AlgorithmKind::dt), ds, FeatureMask::all(), 1);
    ImportanceReport report = permutation_importance(model, ds, 10, 42);
    for (const auto& e : report.entries)
        if (e.feature == 7) {
            CHECK(e.mean_drop == 0.0);
            CHECK(e.std_dev == 0.0);
        }
}

TEST_CASE("permutation importance: label-copy feature ranks first") {
    Dataset ds;
    Rng rng(4);
    for (int i = 0; i < 60; ++i) {
        bool label = i % 2 == 0;
        MinedInstance mi = blank_instance(label, i);
        for (std::size_t f = 0; f < 61; ++f) mi.features[f] = rng.next_unit();
        mi.features[23] = label ? 1.0 : 0.0;
        ds.instances.push_back(mi);
    }
    TrainedModel model = train(AlgorithmSpec(AlgorithmKind::dt), ds, FeatureMask::all(), 1);
    REQUIRE(evaluate(model, ds).f1 == 1.0);
    ImportanceReport report = permutation_importance(model, ds, 50, 42);
    CHECK(report.entries[0].feature == 23);
    CHECK(report.entries[0].mean_drop > 0.0);
    // Strictly the largest drop.
    CHECK(report.entries[0].mean_drop > report.entries[1].mean_drop);
}

TEST_CASE("permutation importance is deterministic per seed") {
    Dataset ds = make_separable(40, Rng(5));
    TrainedModel model = train(AlgorithmSpec(AlgorithmKind::dt), ds, FeatureMask::all(), 1);
    ImportanceReport a = permutation_importance(model, ds, 1, 7);
    ImportanceReport b = permutation_importance(model, ds, 1, 7);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].feature == b.entries[i].feature);
        CHECK(a.entries[i].mean_drop == b.entries[i].mean_drop);
    }
    ImportanceReport par = permutation_importance(model, ds, 1, 7, 4);
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        CHECK(a.entries[i].mean_drop == par.entries[i].mean_drop);
}

TEST_CASE("doubling repeats keeps the sign of clear drops") {
    Dataset ds;
    Rng rng(6);
    for (int i = 0; i < 60; ++i) {
        bool label = i % 2 == 0;
        MinedInstance mi = blank_instance(label, i);
        for (std::size_t f = 0; f < 61; ++f) mi.features[f] = rng.next_unit();
        mi.features[11] = label ? 1.0 : 0.0;
        ds.instances.push_back(mi);
    }
    TrainedModel model = train(AlgorithmSpec(AlgorithmKind::dt), ds, FeatureMask::all(), 1);
    ImportanceReport r50 = permutation_importance(model, ds, 50, 42);
    ImportanceReport r100 = permutation_importance(model, ds, 100, 42);
    for (const auto& e : r50.entries) {
        if (e.std_dev == 0.0) continue;
        double stderr_ = e.std_dev / std::sqrt(50.0);
        if (std::abs(e.mean_drop) > 3.0 * stderr_) {
            for (const auto& e2 : r100.entries)
                if (e2.feature == e.feature) {
                    INFO("feature " << e.feature);
                    CHECK(e.mean_drop * e2.mean_drop > 0.0);
                }
        }
    }
}

TEST_CASE("leave-one-project-out produces one row per project plus a mean") {
    Dataset ds = multi_project_separable(40, {"alpha", "beta", "gamma"}, 100);
    LooResult result = leave_one_project_out(ds, AlgorithmKind::dt, {{"max_depth", {"3"}}}, 3, 42);
    REQUIRE(result.projects.size() == 3);
    CHECK(result.projects[0].project_id == "alpha");
    CHECK(result.projects[1].project_id == "beta");
    CHECK(result.projects[2].project_id == "gamma");
    double acc = 0;
    for (const auto& p : result.projects) acc += p.report.accuracy / 3.0;
    CHECK(result.mean_accuracy == Catch::Approx(acc));
}

TEST_CASE("loo mean of accuracy 1.0 and 0.5 is 0.75") {
    LooResult r;
    ProjectEvaluation a, b;
    a.report.accuracy = 1.0;
    b.report.accuracy = 0.5;
    r.projects.push_back(std::move(a));
    r.projects.push_back(std::move(b));
    double mean = 0;
    for (const auto& p : r.projects) mean += p.report.accuracy / 2.0;
    CHECK(mean == 0.75);
}

TEST_CASE("loo requires at least two projects") {
    Dataset ds = multi_project_separable(30, {"only"}, 5);
    CHECK_THROWS_AS(leave_one_project_out(ds, AlgorithmKind::dt, {{"max_depth", {"3"}}}, 3, 1),
                    TooFewProjects);
}

TEST_CASE("loo never lets the held-out project influence scaler or model") {
    Dataset ds = multi_project_separable(40, {"alpha", "beta"}, 7);
    LooResult base = leave_one_project_out(ds, AlgorithmKind::dt, {{"max_depth", {"3"}}}, 3, 9);

    // Rescale the held-out project's features wildly; the model trained for
    // it must not move.
    Dataset mutated = ds;
    for (auto& inst : mutated.instances)
        if (inst.project_id == "alpha")
            for (auto& f : inst.features) f *= 1000.0;
    LooResult changed = leave_one_project_out(mutated, AlgorithmKind::dt, {{"max_depth", {"3"}}}, 3, 9);

    const DtParams& t0 = std::get<DtParams>(base.projects[0].model.params);
    const DtParams& t1 = std::get<DtParams>(changed.projects[0].model.params);
    REQUIRE(base.projects[0].project_id == "alpha");
    REQUIRE(t0.nodes.size() == t1.nodes.size());
    for (std::size_t i = 0; i < t0.nodes.size(); ++i) {
        CHECK(t0.nodes[i].feature == t1.nodes[i].feature);
        CHECK(t0.nodes[i].threshold == t1.nodes[i].threshold);
        CHECK(t0.nodes[i].prob == t1.nodes[i].prob);
    }
}

TEST_CASE("cross-corpus evaluation is deterministic and fits on train only") {
    Dataset train_corpus = multi_project_separable(60, {"src"}, 11);
    Dataset test_corpus = multi_project_separable(30, {"dst"}, 13);
    AlgorithmSpec spec(AlgorithmKind::rf, {{"ntrees", "20"}});
    EvaluationReport a = cross_corpus_evaluate(train_corpus, test_corpus, spec, 42);
    EvaluationReport b = cross_corpus_evaluate(train_corpus, test_corpus, spec, 42);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.f1 == b.f1);
    CHECK(a.confusion.total() == 30);
}

TEST_CASE("cross-corpus with a single test instance sums to one") {
    Dataset train_corpus = multi_project_separable(40, {"src"}, 17);
    Dataset test_corpus;
    test_corpus.instances.push_back(train_corpus.instances[0]);
    EvaluationReport r =
        cross_corpus_evaluate(train_corpus, test_corpus, AlgorithmSpec(AlgorithmKind::dt), 1);
    CHECK(r.confusion.total() == 1);
}

TEST_CASE("memorizer on identical corpora produces a clean report") {
    Dataset corpus = multi_project_separable(40, {"src"}, 19);
    EvaluationReport r =
        cross_corpus_evaluate(corpus, corpus, AlgorithmSpec(AlgorithmKind::dt), 1);
    CHECK(r.accuracy == 1.0);
}

TEST_CASE("distribution summary quantiles") {
    Dataset ds;
    int tag = 0;
    for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        MinedInstance mi = blank_instance(true, tag++);
        mi.features[6] = v;  // class Loc column
        ds.instances.push_back(mi);
    }
    DistributionSummary s = distribution_summary(ds, 6, true);
    CHECK(s.n == 5);
    CHECK(s.median == 3.0);
    CHECK(s.q1 == 2.0);
    CHECK(s.q3 == 4.0);
    CHECK(s.metric == "Loc");
    CHECK(s.group == "refactored");
}

TEST_CASE("distribution summary: singleton and interpolated cases") {
    Dataset ds;
    MinedInstance one = blank_instance(false, 0);
    one.features[0] = 5.0;
    ds.instances.push_back(one);
    DistributionSummary s = distribution_summary(ds, 0, false);
    CHECK(s.median == 5.0);
    CHECK(s.q1 == 5.0);
    CHECK(s.q3 == 5.0);

    Dataset four;
    int tag = 0;
    for (double v : {1.0, 2.0, 3.0, 4.0}) {
        MinedInstance mi = blank_instance(true, tag++);
        mi.features[0] = v;
        four.instances.push_back(mi);
    }
    DistributionSummary s4 = distribution_summary(four, 0, true);
    CHECK(s4.median == 2.5);
    CHECK(s4.q1 == 1.75);
    CHECK(s4.q3 == 3.25);

    CHECK_THROWS_AS(distribution_summary(four, 0, false), EmptyGroup);
}
