#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "refscout/errors.hpp"
#include "refscout/util.hpp"

namespace refscout {

enum class AlgorithmKind { rf, dt, lr, svm, nb };

inline const char* to_string(AlgorithmKind k) {
    switch (k) {
        case AlgorithmKind::rf: return "rf";
        case AlgorithmKind::dt: return "dt";
        case AlgorithmKind::lr: return "lr";
        case AlgorithmKind::svm: return "svm";
        case AlgorithmKind::nb: return "nb";
    }
    return "?";
}

inline AlgorithmKind algorithm_kind_from_string(const std::string& s) {
    if (s == "rf") return AlgorithmKind::rf;
    if (s == "dt") return AlgorithmKind::dt;
    if (s == "lr") return AlgorithmKind::lr;
    if (s == "svm") return AlgorithmKind::svm;
    if (s == "nb") return AlgorithmKind::nb;
    throw Error("unknown algorithm '" + s + "' (expected rf, dt, lr, svm, or nb)");
}

/// String-valued hyperparameters; values are parsed where used. "none" is the
/// unlimited depth sentinel.
using Hyperparams = std::map<std::string, std::string>;

inline const std::set<std::string>& allowed_hyperparams(AlgorithmKind kind) {
    static const std::set<std::string> dt = {"max_depth", "min_samples_split", "min_samples_leaf"};
    static const std::set<std::string> rf = {"ntrees", "max_depth", "features_per_split",
                                             "bootstrap"};
    static const std::set<std::string> lr = {"lambda", "learning_rate", "epochs", "tolerance"};
    static const std::set<std::string> svm = {"lambda", "epochs"};
    static const std::set<std::string> nb = {};
    switch (kind) {
        case AlgorithmKind::dt: return dt;
        case AlgorithmKind::rf: return rf;
        case AlgorithmKind::lr: return lr;
        case AlgorithmKind::svm: return svm;
        case AlgorithmKind::nb: return nb;
    }
    return nb;
}

/// Algorithm choice plus validated hyperparameters: unknown keys are rejected
/// at construction.
struct AlgorithmSpec {
    AlgorithmKind kind;
    Hyperparams params;

    AlgorithmSpec(AlgorithmKind kind_, Hyperparams params_ = {})
        : kind(kind_), params(std::move(params_)) {
        const auto& allowed = allowed_hyperparams(kind);
        for (const auto& [key, value] : params) {
            if (!allowed.count(key))
                throw Error(std::string("unknown hyperparameter '") + key + "' for " +
                            to_string(kind));
            (void)value;
        }
    }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    double get_double(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : parse_double(it->second);
    }
    int get_int(const std::string& key, int fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : static_cast<int>(parse_int(it->second));
    }
    /// Depth limit; 0 means unlimited.
    int max_depth_or_zero() const {
        std::string v = get("max_depth", "none");
        return v == "none" ? 0 : static_cast<int>(parse_int(v));
    }
};

/// A hyperparameter search space; combinations enumerate with keys in map
/// (lexicographic) order, the last key varying fastest.
using Grid = std::map<std::string, std::vector<std::string>>;

inline Grid default_grid(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::dt:
            return {{"max_depth", {"3", "6", "12", "none"}},
                    {"min_samples_split", {"2", "10"}},
                    {"min_samples_leaf", {"1", "5"}}};
        case AlgorithmKind::rf:
            return {{"ntrees", {"50", "100"}},
                    {"max_depth", {"6", "12", "none"}},
                    {"features_per_split", {"sqrt", "all"}}};
        case AlgorithmKind::lr:
            return {{"lambda", {"0.001", "0.01", "0.1", "1"}}};
        case AlgorithmKind::svm:
            return {{"lambda", {"0.0001", "0.001", "0.01"}}};
        case AlgorithmKind::nb:
            return {};
    }
    return {};
}

inline std::vector<Hyperparams> enumerate_grid(const Grid& grid) {
    std::vector<Hyperparams> out;
    if (grid.empty()) {
        out.push_back({});
        return out;
    }
    std::vector<std::pair<std::string, std::vector<std::string>>> axes(grid.begin(), grid.end());
    std::vector<std::size_t> odo(axes.size(), 0);
    while (true) {
        Hyperparams combo;
        for (std::size_t a = 0; a < axes.size(); ++a) combo[axes[a].first] = axes[a].second[odo[a]];
        out.push_back(std::move(combo));
        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++odo[a] < axes[a].second.size()) break;
            odo[a] = 0;
            if (a == 0) return out;
        }
    }
}

inline std::string hyperparams_to_string(const Hyperparams& p) {
    std::string out;
    for (const auto& [k, v] : p) {
        if (!out.empty()) out += ";";
        out += k + "=" + v;
    }
    return out;
}

inline Hyperparams hyperparams_from_string(const std::string& s) {
    Hyperparams p;
    if (s.empty()) return p;
    for (const auto& part : split(s, ';')) {
        auto eq = part.find('=');
        if (eq == std::string::npos) throw FormatError("bad hyperparameter entry: " + part);
        p[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return p;
}

}  // namespace refscout
