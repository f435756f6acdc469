#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "refscout/learners/spec.hpp"

namespace refscout {

struct NbParams {
    double prior_pos = 0.5;
    double prior_neg = 0.5;
    std::vector<double> mean_pos, mean_neg;
    std::vector<double> var_pos, var_neg;  // smoothed

    /// (positive, negative) class posteriors, normalized in log space.
    std::pair<double, double> posteriors(const std::vector<double>& x) const {
        double log_pos = std::log(prior_pos);
        double log_neg = std::log(prior_neg);
        for (std::size_t j = 0; j < mean_pos.size(); ++j) {
            log_pos += log_gaussian(x[j], mean_pos[j], var_pos[j]);
            log_neg += log_gaussian(x[j], mean_neg[j], var_neg[j]);
        }
        double m = std::max(log_pos, log_neg);
        double p = std::exp(log_pos - m);
        double q = std::exp(log_neg - m);
        return {p / (p + q), q / (p + q)};
    }

    double posterior_pos(const std::vector<double>& x) const { return posteriors(x).first; }

    static double log_gaussian(double x, double mean, double var) {
        double d = x - mean;
        return -0.5 * std::log(2.0 * 3.14159265358979323846 * var) - d * d / (2.0 * var);
    }
};

/// Gaussian NB with population variances and variance smoothing
/// eps = 1e-9 * (largest per-feature variance over the whole train set).
inline NbParams train_naive_bayes(const std::vector<std::vector<double>>& X,
                                  const std::vector<char>& y) {
    const std::size_t n = X.size();
    const std::size_t d = X.empty() ? 0 : X[0].size();

    double n_pos = 0;
    for (char yi : y) n_pos += yi;
    const double n_neg = static_cast<double>(n) - n_pos;

    NbParams p;
    p.prior_pos = n_pos / static_cast<double>(n);
    p.prior_neg = n_neg / static_cast<double>(n);
    p.mean_pos.assign(d, 0.0);
    p.mean_neg.assign(d, 0.0);
    p.var_pos.assign(d, 0.0);
    p.var_neg.assign(d, 0.0);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) (y[i] ? p.mean_pos[j] : p.mean_neg[j]) += X[i][j];
    for (std::size_t j = 0; j < d; ++j) {
        p.mean_pos[j] /= n_pos;
        p.mean_neg[j] /= n_neg;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double dlt = X[i][j] - (y[i] ? p.mean_pos[j] : p.mean_neg[j]);
            (y[i] ? p.var_pos[j] : p.var_neg[j]) += dlt * dlt;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        p.var_pos[j] /= n_pos;
        p.var_neg[j] /= n_neg;
    }

    // Smoothing scale: population variance of each feature over all rows.
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += X[i][j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dlt = X[i][j] - mean;
            var += dlt * dlt;
        }
        var /= static_cast<double>(n);
        max_var = std::max(max_var, var);
    }
    const double eps = 1e-9 * max_var;
    for (std::size_t j = 0; j < d; ++j) {
        p.var_pos[j] = std::max(p.var_pos[j] + eps, 1e-300);
        p.var_neg[j] = std::max(p.var_neg[j] + eps, 1e-300);
    }
    return p;
}

}  // namespace refscout
