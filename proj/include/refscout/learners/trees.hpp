#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "refscout/learners/spec.hpp"
#include "refscout/parallel.hpp"
#include "refscout/rng.hpp"

namespace refscout {

struct DtNode {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double prob = 0.0;  // positive-class probability at this node
};

struct DtParams {
    std::vector<DtNode> nodes;  // node 0 is the root

    double predict_prob(const std::vector<double>& x) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const DtNode& n = nodes[static_cast<std::size_t>(i)];
            i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].prob;
    }
};

struct RfParams {
    std::vector<DtParams> trees;

    double vote_fraction(const std::vector<double>& x) const {
        int votes = 0;
        for (const auto& t : trees)
            if (t.predict_prob(x) >= 0.5) ++votes;
        return trees.empty() ? 0.5 : static_cast<double>(votes) / static_cast<double>(trees.size());
    }
};

namespace tree_detail {

struct BuildConfig {
    int max_depth = 0;  // 0: unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    int features_per_split = 0;  // 0: all features, no rng draws
};

inline double gini(double pos, double total) {
    if (total == 0) return 0.0;
    double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

struct Builder {
    const std::vector<std::vector<double>>& X;
    const std::vector<char>& y;
    const BuildConfig& cfg;
    Rng* rng;  // nullptr when all features are eligible at every split
    std::vector<DtNode> nodes;

    int build(std::vector<std::size_t> idx, int depth) {
        double pos = 0;
        for (std::size_t i : idx) pos += y[i];
        const double total = static_cast<double>(idx.size());
        DtNode node;
        node.prob = total == 0 ? 0.0 : pos / total;

        bool pure = pos == 0 || pos == total;
        bool depth_capped = cfg.max_depth > 0 && depth >= cfg.max_depth;
        if (pure || depth_capped || static_cast<int>(idx.size()) < cfg.min_samples_split) {
            nodes.push_back(node);
            return static_cast<int>(nodes.size()) - 1;
        }

        const std::size_t n_features = X.empty() ? 0 : X[0].size();
        std::vector<int> features;
        if (cfg.features_per_split > 0 &&
            cfg.features_per_split < static_cast<int>(n_features)) {
            // Partial Fisher-Yates draw without replacement, then sorted so the
            // split search scans features in ascending order.
            std::vector<int> all(n_features);
            for (std::size_t f = 0; f < n_features; ++f) all[f] = static_cast<int>(f);
            for (int k = 0; k < cfg.features_per_split; ++k) {
                std::size_t j = static_cast<std::size_t>(k) +
                                static_cast<std::size_t>(rng->next_below(n_features - static_cast<std::size_t>(k)));
                std::swap(all[static_cast<std::size_t>(k)], all[j]);
            }
            features.assign(all.begin(), all.begin() + cfg.features_per_split);
            std::sort(features.begin(), features.end());
        } else {
            features.resize(n_features);
            for (std::size_t f = 0; f < n_features; ++f) features[f] = static_cast<int>(f);
        }

        const double parent_gini = gini(pos, total);
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_weighted = parent_gini;

        std::vector<std::pair<double, char>> column(idx.size());
        for (int f : features) {
            for (std::size_t i = 0; i < idx.size(); ++i)
                column[i] = {X[idx[i]][static_cast<std::size_t>(f)], y[idx[i]]};
            std::sort(column.begin(), column.end());

            double left_pos = 0, left_n = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                left_pos += column[i].second;
                left_n += 1;
                if (column[i].first == column[i + 1].first) continue;
                double right_n = total - left_n;
                if (left_n < cfg.min_samples_leaf || right_n < cfg.min_samples_leaf) continue;
                double weighted = (left_n / total) * gini(left_pos, left_n) +
                                  (right_n / total) * gini(pos - left_pos, right_n);
                if (weighted < best_weighted - 1e-12) {
                    best_weighted = weighted;
                    best_feature = f;
                    best_threshold = (column[i].first + column[i + 1].first) / 2.0;
                }
            }
        }

        if (best_feature < 0) {
            nodes.push_back(node);
            return static_cast<int>(nodes.size()) - 1;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (X[i][static_cast<std::size_t>(best_feature)] <= best_threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }

        node.feature = best_feature;
        node.threshold = best_threshold;
        nodes.push_back(node);
        int me = static_cast<int>(nodes.size()) - 1;
        int left = build(std::move(left_idx), depth + 1);
        int right = build(std::move(right_idx), depth + 1);
        nodes[static_cast<std::size_t>(me)].left = left;
        nodes[static_cast<std::size_t>(me)].right = right;
        return me;
    }
};

inline DtParams build_tree(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                           const std::vector<std::size_t>& idx, const BuildConfig& cfg, Rng* rng) {
    Builder b{X, y, cfg, rng, {}};
    b.build(idx, 0);
    return DtParams{std::move(b.nodes)};
}

}  // namespace tree_detail

inline DtParams train_decision_tree(const std::vector<std::vector<double>>& X,
                                    const std::vector<char>& y, const AlgorithmSpec& spec) {
    tree_detail::BuildConfig cfg;
    cfg.max_depth = spec.max_depth_or_zero();
    cfg.min_samples_split = spec.get_int("min_samples_split", 2);
    cfg.min_samples_leaf = spec.get_int("min_samples_leaf", 1);
    cfg.features_per_split = 0;
    std::vector<std::size_t> idx(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) idx[i] = i;
    return tree_detail::build_tree(X, y, idx, cfg, nullptr);
}

inline RfParams train_random_forest(const std::vector<std::vector<double>>& X,
                                    const std::vector<char>& y, const AlgorithmSpec& spec,
                                    std::uint64_t seed, int jobs = 1) {
    const int ntrees = spec.get_int("ntrees", 100);
    const bool bootstrap = spec.get("bootstrap", "true") == "true";
    const std::string features_mode = spec.get("features_per_split", "sqrt");
    const std::size_t n_features = X.empty() ? 0 : X[0].size();

    tree_detail::BuildConfig cfg;
    cfg.max_depth = spec.max_depth_or_zero();
    cfg.min_samples_split = spec.get_int("min_samples_split", 2);
    cfg.min_samples_leaf = spec.get_int("min_samples_leaf", 1);
    cfg.features_per_split =
        features_mode == "all"
            ? 0
            : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));

    RfParams rf;
    rf.trees.resize(static_cast<std::size_t>(ntrees));
    Rng base(seed);
    // Each tree derives its own stream from (seed, tree index), so parallel
    // and serial builds produce identical forests.
    parallel_for(jobs, static_cast<std::size_t>(ntrees), [&](std::size_t t) {
        Rng tree_rng = base.derive("tree", static_cast<std::uint64_t>(t));
        std::vector<std::size_t> idx(X.size());
        if (bootstrap) {
            for (std::size_t i = 0; i < X.size(); ++i)
                idx[i] = static_cast<std::size_t>(tree_rng.next_below(X.size()));
        } else {
            for (std::size_t i = 0; i < X.size(); ++i) idx[i] = i;
        }
        Rng* rng_ptr = cfg.features_per_split > 0 ? &tree_rng : nullptr;
        rf.trees[t] = tree_detail::build_tree(X, y, idx, cfg, rng_ptr);
    });
    return rf;
}

}  // namespace refscout
