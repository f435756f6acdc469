#pragma once

// Synthetic dataset builders for the learner and evaluation suites.

#include <string>

#include "refscout/dataset.hpp"
#include "refscout/rng.hpp"

namespace testsupport {

inline refscout::MinedInstance blank_instance(bool label, int tag, const std::string& project = "p") {
    refscout::MinedInstance mi;
    mi.project_id = project;
    mi.commit = "c" + std::to_string(tag);
    mi.class_path = "S.java:S";
    mi.method_signature = "m" + std::to_string(tag) + "()";
    mi.label = label;
    mi.features.fill(0.0);
    return mi;
}

/// Linearly separable binary set: features 0 and 1 carry the signal with a
/// margin of 1.0 around the separating plane, the rest are uniform noise.
inline refscout::Dataset make_separable(int n, refscout::Rng rng) {
    refscout::Dataset ds;
    for (int i = 0; i < n; ++i) {
        bool label = i % 2 == 0;
        refscout::MinedInstance mi = blank_instance(label, i);
        double sign = label ? 1.0 : -1.0;
        mi.features[0] = sign * (0.5 + rng.next_unit());
        mi.features[1] = sign * (0.5 + rng.next_unit());
        for (std::size_t f = 2; f < 61; ++f) mi.features[f] = rng.next_unit();
        ds.instances.push_back(mi);
    }
    return ds;
}

/// XOR over two features with jitter: no single axis-aligned split separates
/// it, a depth-3 tree does.
inline refscout::Dataset make_xor(int n, refscout::Rng rng) {
    refscout::Dataset ds;
    for (int i = 0; i < n; ++i) {
        int cell = i % 4;
        bool ax = cell == 1 || cell == 3;
        bool bx = cell == 2 || cell == 3;
        bool label = ax != bx;
        refscout::MinedInstance mi = blank_instance(label, i);
        mi.features[0] = (ax ? 1.0 : 0.0) + 0.1 * (rng.next_unit() - 0.5);
        mi.features[1] = (bx ? 1.0 : 0.0) + 0.1 * (rng.next_unit() - 0.5);
        for (std::size_t f = 2; f < 61; ++f) mi.features[f] = 0.0;
        ds.instances.push_back(mi);
    }
    return ds;
}

/// Fully random labels and features; used for equivalence sweeps.
inline refscout::Dataset make_random(int n, refscout::Rng rng) {
    refscout::Dataset ds;
    for (int i = 0; i < n; ++i) {
        bool label = rng.next_bool();
        refscout::MinedInstance mi = blank_instance(label, i);
        for (std::size_t f = 0; f < 61; ++f) mi.features[f] = rng.next_double(-2, 2);
        ds.instances.push_back(mi);
    }
    // Both classes must be present for training.
    if (ds.count_label(true) == 0) ds.instances[0].label = true;
    if (ds.count_label(false) == 0) ds.instances[0].label = false;
    return ds;
}

}  // namespace testsupport
