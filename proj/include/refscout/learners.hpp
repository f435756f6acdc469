#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "refscout/dataset.hpp"
#include "refscout/errors.hpp"
#include "refscout/learners/linear.hpp"
#include "refscout/learners/naive_bayes.hpp"
#include "refscout/learners/spec.hpp"
#include "refscout/learners/trees.hpp"
#include "refscout/log.hpp"
#include "refscout/parallel.hpp"
#include "refscout/rng.hpp"

namespace refscout {

/// A fitted model: immutable after training, safe to share across threads.
struct TrainedModel {
    AlgorithmSpec spec;
    std::variant<DtParams, RfParams, LinearParams, NbParams> params;
    std::uint64_t seed = 0;
    FeatureMask mask = FeatureMask::all();
    std::string tag;  // "", "production", or "test"

    TrainedModel() : spec(AlgorithmKind::dt) {}
};

struct Prediction {
    bool label = false;
    double score = 0.5;  // in [0, 1]
};

inline std::vector<double> masked_row(const FeatureMask& mask, const std::array<double, 61>& x) {
    std::vector<double> out;
    out.reserve(61);
    for (std::size_t f = 0; f < x.size(); ++f)
        if (mask.selected[f]) out.push_back(x[f]);
    return out;
}

inline std::vector<std::vector<double>> masked_matrix(const Dataset& ds, const FeatureMask& mask) {
    std::vector<std::vector<double>> X;
    X.reserve(ds.instances.size());
    for (const auto& i : ds.instances) X.push_back(masked_row(mask, i.features));
    return X;
}

inline std::vector<char> labels_of(const Dataset& ds) {
    std::vector<char> y;
    y.reserve(ds.instances.size());
    for (const auto& i : ds.instances) y.push_back(i.label ? 1 : 0);
    return y;
}

/// Fits one model on an already-scaled training set. Deterministic for a
/// given (spec, data, seed).
inline TrainedModel train(const AlgorithmSpec& spec, const Dataset& data, const FeatureMask& mask,
                          std::uint64_t seed, int jobs = 1) {
    if (data.count_label(true) == 0 || data.count_label(false) == 0)
        throw SingleClassData("training data must contain both classes");

    std::vector<std::vector<double>> X = masked_matrix(data, mask);
    std::vector<char> y = labels_of(data);

    TrainedModel model;
    model.spec = spec;
    model.seed = seed;
    model.mask = mask;
    switch (spec.kind) {
        case AlgorithmKind::dt: model.params = train_decision_tree(X, y, spec); break;
        case AlgorithmKind::rf: model.params = train_random_forest(X, y, spec, seed, jobs); break;
        case AlgorithmKind::lr: model.params = train_logistic_regression(X, y, spec); break;
        case AlgorithmKind::svm: model.params = train_linear_svm(X, y, spec); break;
        case AlgorithmKind::nb: model.params = train_naive_bayes(X, y); break;
    }
    return model;
}

/// Pure prediction: label = (score >= 0.5).
inline Prediction predict(const TrainedModel& model, const std::array<double, 61>& features) {
    std::vector<double> x = masked_row(model.mask, features);
    double score = 0.5;
    switch (model.spec.kind) {
        case AlgorithmKind::dt: score = std::get<DtParams>(model.params).predict_prob(x); break;
        case AlgorithmKind::rf: score = std::get<RfParams>(model.params).vote_fraction(x); break;
        case AlgorithmKind::lr:
        case AlgorithmKind::svm:
            score = sigmoid(std::get<LinearParams>(model.params).margin(x));
            break;
        case AlgorithmKind::nb: score = std::get<NbParams>(model.params).posterior_pos(x); break;
    }
    return {score >= 0.5, score};
}

inline Prediction predict(const TrainedModel& model, const std::vector<double>& features) {
    if (features.size() != 61)
        throw DimensionMismatch("expected 61 features, got " + std::to_string(features.size()));
    std::array<double, 61> x{};
    for (std::size_t i = 0; i < 61; ++i) x[i] = features[i];
    return predict(model, x);
}

// ---- stratified k-fold ----------------------------------------------------------

/// Partitions indices into k folds with per-class counts differing by at most
/// one across folds.
inline std::vector<std::vector<std::size_t>> stratified_kfold(const Dataset& data, int k,
                                                              std::uint64_t seed) {
    if (k < 2) throw Error("stratified_kfold: k must be >= 2");
    for (bool label : {false, true}) {
        if (data.count_label(label) < k)
            throw TooFewInstances("class " + std::string(label ? "1" : "0") + " has fewer than " +
                                  std::to_string(k) + " instances");
    }
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    Rng base = Rng(seed).derive("kfold");
    for (bool label : {false, true}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.instances.size(); ++i)
            if (data.instances[i].label == label) idx.push_back(i);
        Rng rng = base.derive(label ? 1 : 0);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.instances.reserve(indices.size());
    for (std::size_t i : indices) out.instances.push_back(ds.instances[i]);
    return out;
}

/// F1 with the zero-division-gives-zero convention; used to score CV folds.
inline double f1_score(const std::vector<char>& truth, const std::vector<char>& predicted) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) ++tp;
        else if (predicted[i] && !truth[i]) ++fp;
        else if (!predicted[i] && truth[i]) ++fn;
    }
    double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

// ---- grid search ------------------------------------------------------------

struct GridSearchResult {
    Hyperparams best;
    /// Mean CV F1 per combination, in enumeration order.
    std::vector<std::pair<Hyperparams, double>> scores;
};

/// Exhaustive search over the grid, scored by mean F1 over stratified k-fold
/// CV. Ties break toward the earliest enumerated combination; a combination
/// that fails to train scores 0.
inline GridSearchResult grid_search(AlgorithmKind kind, const Grid& space, const Dataset& train_set,
                                    const FeatureMask& mask, int k, std::uint64_t seed,
                                    int jobs = 1) {
    std::vector<Hyperparams> combos = enumerate_grid(space);
    if (combos.empty()) throw Error("grid_search: empty search space");

    auto folds = stratified_kfold(train_set, k, seed);
    std::vector<Dataset> fold_train, fold_valid;
    std::vector<std::vector<char>> fold_truth;
    for (std::size_t fi = 0; fi < folds.size(); ++fi) {
        std::vector<std::size_t> train_idx;
        for (std::size_t fj = 0; fj < folds.size(); ++fj)
            if (fj != fi) train_idx.insert(train_idx.end(), folds[fj].begin(), folds[fj].end());
        std::sort(train_idx.begin(), train_idx.end());
        fold_train.push_back(subset(train_set, train_idx));
        fold_valid.push_back(subset(train_set, folds[fi]));
        fold_truth.push_back(labels_of(fold_valid.back()));
    }

    std::vector<double> mean_f1(combos.size(), 0.0);
    Rng base(seed);
    parallel_for(jobs, combos.size(), [&](std::size_t ci) {
        double total = 0.0;
        try {
            AlgorithmSpec spec(kind, combos[ci]);
            for (std::size_t fi = 0; fi < folds.size(); ++fi) {
                std::uint64_t fold_seed = base.derive("combo", ci).derive("fold", fi).seed();
                TrainedModel model = train(spec, fold_train[fi], mask, fold_seed);
                std::vector<char> pred;
                pred.reserve(fold_valid[fi].instances.size());
                for (const auto& inst : fold_valid[fi].instances)
                    pred.push_back(predict(model, inst.features).label ? 1 : 0);
                total += f1_score(fold_truth[fi], pred);
            }
            mean_f1[ci] = total / static_cast<double>(folds.size());
        } catch (const std::exception& e) {
            log_warn("grid_search: combination '" + hyperparams_to_string(combos[ci]) +
                     "' failed: " + e.what());
            mean_f1[ci] = 0.0;
        }
    });

    GridSearchResult result;
    std::size_t best = 0;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        result.scores.emplace_back(combos[ci], mean_f1[ci]);
        if (mean_f1[ci] > mean_f1[best]) best = ci;
    }
    result.best = combos[best];
    return result;
}

/// Refit on train + test with the chosen hyperparameters; tagged so the
/// persisted bundle records that test data flowed into it.
inline TrainedModel train_production(AlgorithmKind kind, const Hyperparams& best_params,
                                     const Dataset& all_data, const FeatureMask& mask,
                                     std::uint64_t seed, int jobs = 1) {
    TrainedModel model = train(AlgorithmSpec(kind, best_params), all_data, mask, seed, jobs);
    model.tag = "production";
    return model;
}

}  // namespace refscout
