#pragma once

#include <cmath>
#include <vector>

#include "refscout/learners/spec.hpp"

namespace refscout {

struct LinearParams {
    std::vector<double> weights;  // over the masked feature subset
    double bias = 0.0;

    double margin(const std::vector<double>& x) const {
        double z = bias;
        for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * x[i];
        return z;
    }
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// ---- logistic regression ------------------------------------------------------

/// Mean cross-entropy plus (lambda/2)||w||^2; the bias is unregularized.
inline double lr_loss(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                      const std::vector<double>& w, double b, double lambda) {
    const double n = static_cast<double>(X.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * X[i][j];
        double p = sigmoid(z);
        p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
        loss += y[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    loss /= n;
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    return loss + 0.5 * lambda * reg;
}

/// Analytic gradient of lr_loss.
inline std::pair<std::vector<double>, double> lr_gradient(
    const std::vector<std::vector<double>>& X, const std::vector<char>& y,
    const std::vector<double>& w, double b, double lambda) {
    const double n = static_cast<double>(X.size());
    std::vector<double> gw(w.size(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * X[i][j];
        double err = sigmoid(z) - (y[i] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < w.size(); ++j) gw[j] += err * X[i][j];
        gb += err;
    }
    for (std::size_t j = 0; j < w.size(); ++j) gw[j] = gw[j] / n + lambda * w[j];
    gb /= n;
    return {std::move(gw), gb};
}

/// Full-batch gradient descent with early stopping on the loss delta.
inline LinearParams train_logistic_regression(const std::vector<std::vector<double>>& X,
                                              const std::vector<char>& y,
                                              const AlgorithmSpec& spec) {
    const double lambda = spec.get_double("lambda", 0.01);
    const double lr = spec.get_double("learning_rate", 0.1);
    const int epochs = spec.get_int("epochs", 500);
    const double tol = spec.get_double("tolerance", 1e-7);

    LinearParams p;
    p.weights.assign(X.empty() ? 0 : X[0].size(), 0.0);
    double prev_loss = lr_loss(X, y, p.weights, p.bias, lambda);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        auto [gw, gb] = lr_gradient(X, y, p.weights, p.bias, lambda);
        for (std::size_t j = 0; j < p.weights.size(); ++j) p.weights[j] -= lr * gw[j];
        p.bias -= lr * gb;
        double loss = lr_loss(X, y, p.weights, p.bias, lambda);
        if (std::abs(prev_loss - loss) < tol) break;
        prev_loss = loss;
    }
    return p;
}

// ---- linear SVM ------------------------------------------------------------

/// Mean hinge loss plus (lambda/2)||w||^2; labels in {-1, +1}.
inline double svm_objective(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                            const std::vector<double>& w, double b, double lambda) {
    const double n = static_cast<double>(X.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * X[i][j];
        double yi = y[i] ? 1.0 : -1.0;
        loss += std::max(0.0, 1.0 - yi * z);
    }
    loss /= n;
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    return loss + 0.5 * lambda * reg;
}

/// Full-batch subgradient descent with the 1/(lambda*t) epoch-decayed step.
/// When given, `objective_trace` receives the post-epoch objective values.
inline LinearParams train_linear_svm(const std::vector<std::vector<double>>& X,
                                     const std::vector<char>& y, const AlgorithmSpec& spec,
                                     std::vector<double>* objective_trace = nullptr) {
    const double lambda = spec.get_double("lambda", 0.001);
    const int epochs = spec.get_int("epochs", 200);
    const double n = static_cast<double>(X.size());

    LinearParams p;
    p.weights.assign(X.empty() ? 0 : X[0].size(), 0.0);
    for (int t = 1; t <= epochs; ++t) {
        std::vector<double> gw(p.weights.size(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            double z = p.bias;
            for (std::size_t j = 0; j < p.weights.size(); ++j) z += p.weights[j] * X[i][j];
            double yi = y[i] ? 1.0 : -1.0;
            if (yi * z < 1.0) {
                for (std::size_t j = 0; j < p.weights.size(); ++j) gw[j] -= yi * X[i][j];
                gb -= yi;
            }
        }
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        for (std::size_t j = 0; j < p.weights.size(); ++j)
            p.weights[j] -= eta * (lambda * p.weights[j] + gw[j] / n);
        p.bias -= eta * (gb / n);
        if (objective_trace)
            objective_trace->push_back(svm_objective(X, y, p.weights, p.bias, lambda));
    }
    return p;
}

}  // namespace refscout
