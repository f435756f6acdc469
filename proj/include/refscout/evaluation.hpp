#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "refscout/dataset.hpp"
#include "refscout/errors.hpp"
#include "refscout/learners.hpp"
#include "refscout/parallel.hpp"
#include "refscout/rng.hpp"

namespace refscout {

struct ConfusionMatrix {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    long long total() const { return tp + fp + fn + tn; }
};

struct EvaluationReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Accuracy, precision, recall, and F1 from raw cells; divisions by zero
/// yield 0.
inline EvaluationReport report_from_confusion(const ConfusionMatrix& cm) {
    EvaluationReport r;
    r.confusion = cm;
    const double n = static_cast<double>(cm.total());
    r.accuracy = n == 0 ? 0.0 : static_cast<double>(cm.tp + cm.tn) / n;
    r.precision = cm.tp + cm.fp == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    r.recall = cm.tp + cm.fn == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    r.f1 = r.precision + r.recall == 0.0 ? 0.0
                                         : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

inline EvaluationReport evaluate(const TrainedModel& model, const Dataset& test) {
    if (test.instances.empty()) throw Error("evaluate: empty test set");
    ConfusionMatrix cm;
    for (const auto& inst : test.instances) {
        bool predicted = predict(model, inst.features).label;
        if (predicted && inst.label) cm.tp++;
        else if (predicted && !inst.label) cm.fp++;
        else if (!predicted && inst.label) cm.fn++;
        else cm.tn++;
    }
    return report_from_confusion(cm);
}

// ---- permutation importance -----------------------------------------------------

struct FeatureImportance {
    int feature = 0;
    std::string name;
    double mean_drop = 0.0;
    double std_dev = 0.0;
};

struct ImportanceReport {
    double baseline_f1 = 0.0;
    int repeats = 0;
    std::vector<FeatureImportance> entries;  // ranked by mean drop, descending
};

/// Mean F1 drop over `repeats` random within-column permutations, per
/// feature. Deterministic per seed; identity behavior on constant columns
/// falls out (their permutations change nothing).
inline ImportanceReport permutation_importance(const TrainedModel& model, const Dataset& validation,
                                               int repeats, std::uint64_t seed, int jobs = 1) {
    if (validation.instances.empty()) throw Error("permutation_importance: empty validation set");
    std::vector<char> truth = labels_of(validation);

    std::vector<char> base_pred;
    base_pred.reserve(validation.instances.size());
    for (const auto& inst : validation.instances)
        base_pred.push_back(predict(model, inst.features).label ? 1 : 0);
    const double baseline = f1_score(truth, base_pred);

    ImportanceReport report;
    report.baseline_f1 = baseline;
    report.repeats = repeats;
    report.entries.resize(kFeatureCount);

    Rng base(seed);
    parallel_for(jobs, kFeatureCount, [&](std::size_t f) {
        std::vector<double> drops;
        drops.reserve(static_cast<std::size_t>(repeats));
        for (int rep = 0; rep < repeats; ++rep) {
            Rng rng = base.derive(f).derive(static_cast<std::uint64_t>(rep));
            std::vector<std::size_t> perm(validation.instances.size());
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
            rng.shuffle(perm);
            std::vector<char> pred;
            pred.reserve(validation.instances.size());
            for (std::size_t i = 0; i < validation.instances.size(); ++i) {
                std::array<double, 61> x = validation.instances[i].features;
                x[f] = validation.instances[perm[i]].features[f];
                pred.push_back(predict(model, x).label ? 1 : 0);
            }
            drops.push_back(baseline - f1_score(truth, pred));
        }
        double mean = 0.0;
        for (double d : drops) mean += d;
        mean /= static_cast<double>(repeats);
        double var = 0.0;
        for (double d : drops) var += (d - mean) * (d - mean);
        double sd = repeats > 1 ? std::sqrt(var / static_cast<double>(repeats - 1)) : 0.0;
        report.entries[f] = {static_cast<int>(f), Dataset::feature_names()[f], mean, sd};
    });

    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const FeatureImportance& a, const FeatureImportance& b) {
                         if (a.mean_drop != b.mean_drop) return a.mean_drop > b.mean_drop;
                         return a.feature < b.feature;
                     });
    return report;
}

// ---- leave-one-project-out -----------------------------------------------------

struct ProjectEvaluation {
    std::string project_id;
    Hyperparams best_params;
    EvaluationReport report;
    TrainedModel model;  // kept so leakage checks can inspect parameters
};

struct LooResult {
    std::vector<ProjectEvaluation> projects;
    double mean_accuracy = 0.0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
};

/// For each project: grid search and fit on everything else (the scaler and
/// the LR feature mask are fit on the training side only), evaluate on the
/// held-out project, then average the metrics over projects.
inline LooResult leave_one_project_out(const Dataset& ds, AlgorithmKind kind, const Grid& space,
                                       int k, std::uint64_t seed, int jobs = 1) {
    std::vector<std::string> projects;
    for (const auto& inst : ds.instances)
        if (std::find(projects.begin(), projects.end(), inst.project_id) == projects.end())
            projects.push_back(inst.project_id);
    std::sort(projects.begin(), projects.end());
    if (projects.size() < 2) throw TooFewProjects("leave-one-project-out needs >= 2 projects");

    LooResult result;
    for (std::size_t pi = 0; pi < projects.size(); ++pi) {
        const std::string& held_out = projects[pi];
        Dataset train_side, test_side;
        for (const auto& inst : ds.instances)
            (inst.project_id == held_out ? test_side : train_side).instances.push_back(inst);

        Scaler scaler = fit_minmax(train_side);
        Dataset strain = apply_scaler(scaler, train_side);
        Dataset stest = apply_scaler(scaler, test_side);
        FeatureMask mask =
            kind == AlgorithmKind::lr ? select_features(strain) : FeatureMask::all();

        std::uint64_t project_seed = Rng(seed).derive("loo", pi).seed();
        GridSearchResult gs = grid_search(kind, space, strain, mask, k, project_seed, jobs);
        TrainedModel model =
            train(AlgorithmSpec(kind, gs.best), strain, mask, project_seed, jobs);
        EvaluationReport report = evaluate(model, stest);

        result.projects.push_back({held_out, gs.best, report, std::move(model)});
    }

    const double n = static_cast<double>(result.projects.size());
    for (const auto& p : result.projects) {
        result.mean_accuracy += p.report.accuracy / n;
        result.mean_precision += p.report.precision / n;
        result.mean_recall += p.report.recall / n;
        result.mean_f1 += p.report.f1 / n;
    }
    return result;
}

// ---- cross-corpus evaluation -----------------------------------------------------

/// Scaler, mask, and model fit only on the training corpus; the whole test
/// corpus is scored.
inline EvaluationReport cross_corpus_evaluate(const Dataset& train_corpus,
                                              const Dataset& test_corpus,
                                              const AlgorithmSpec& spec, std::uint64_t seed,
                                              int jobs = 1) {
    if (test_corpus.instances.empty()) throw Error("cross_corpus_evaluate: empty test corpus");
    Scaler scaler = fit_minmax(train_corpus);
    Dataset strain = apply_scaler(scaler, train_corpus);
    Dataset stest = apply_scaler(scaler, test_corpus);
    FeatureMask mask =
        spec.kind == AlgorithmKind::lr ? select_features(strain) : FeatureMask::all();
    TrainedModel model = train(spec, strain, mask, seed, jobs);
    return evaluate(model, stest);
}

// ---- distribution summaries -----------------------------------------------------

struct DistributionSummary {
    std::string metric;
    std::string group;  // "refactored" or "not-refactored"
    long long n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation (type-7) quantile of sorted values.
inline double quantile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

inline DistributionSummary distribution_summary(const Dataset& ds, int feature_index,
                                                bool refactored_group) {
    std::vector<double> values;
    for (const auto& inst : ds.instances)
        if (inst.label == refactored_group)
            values.push_back(inst.features[static_cast<std::size_t>(feature_index)]);
    if (values.empty())
        throw EmptyGroup(std::string("no instances in group ") +
                         (refactored_group ? "refactored" : "not-refactored"));
    std::sort(values.begin(), values.end());
    DistributionSummary s;
    s.metric = Dataset::feature_names()[static_cast<std::size_t>(feature_index)];
    s.group = refactored_group ? "refactored" : "not-refactored";
    s.n = static_cast<long long>(values.size());
    s.median = quantile_type7(values, 0.5);
    s.q1 = quantile_type7(values, 0.25);
    s.q3 = quantile_type7(values, 0.75);
    return s;
}

}  // namespace refscout
