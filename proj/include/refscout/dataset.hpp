#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "refscout/errors.hpp"
#include "refscout/log.hpp"
#include "refscout/metrics.hpp"
#include "refscout/mining.hpp"
#include "refscout/rng.hpp"
#include "refscout/util.hpp"

namespace refscout {

constexpr int kFeatureCount = 61;
constexpr const char* kDatasetFormatLine = "# dataset-format: 1";

struct Dataset {
    std::vector<MinedInstance> instances;

    static const std::vector<std::string>& feature_names() { return all_feature_names(); }

    int count_label(bool label) const {
        int n = 0;
        for (const auto& i : instances)
            if (i.label == label) ++n;
        return n;
    }
};

// ---- CSV ------------------------------------------------------------------

namespace csv_detail {

inline bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

inline std::string quote(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::vector<std::string> parse_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace csv_detail

inline std::string dataset_header() {
    std::string h = "project,commit,class,method,label";
    for (const auto& n : Dataset::feature_names()) h += "," + n;
    return h;
}

/// Serializes a dataset in the versioned CSV format: UTF-8, LF endings, '.'
/// decimals, shortest round-trip numbers. Extra metadata lines (without the
/// leading '#') appear as comments after the format line.
inline std::string dataset_to_csv(const Dataset& ds,
                                  const std::vector<std::string>& metadata = {}) {
    std::string out = kDatasetFormatLine;
    out += "\n";
    for (const auto& m : metadata) out += "# " + m + "\n";
    out += dataset_header();
    out += "\n";
    for (const auto& i : ds.instances) {
        out += csv_detail::quote(i.project_id);
        out += ",";
        out += csv_detail::quote(i.commit);
        out += ",";
        out += csv_detail::quote(i.class_path);
        out += ",";
        out += csv_detail::quote(i.method_signature);
        out += ",";
        out += i.label ? "1" : "0";
        for (double v : i.features) {
            out += ",";
            out += format_double(v);
        }
        out += "\n";
    }
    return out;
}

inline void write_dataset_csv(const Dataset& ds, const std::string& path,
                              const std::vector<std::string>& metadata = {}) {
    write_file(path, dataset_to_csv(ds, metadata));
}

inline Dataset dataset_from_csv(const std::string& text, const std::string& origin) {
    auto lines = split(text, '\n');
    std::size_t li = 0;
    if (lines.empty() || std::string(trim(lines[0])) != kDatasetFormatLine)
        throw FormatError("missing '" + std::string(kDatasetFormatLine) + "' line in " + origin);
    ++li;
    while (li < lines.size() && starts_with(lines[li], "#")) ++li;
    if (li >= lines.size() || std::string(trim(lines[li])) != dataset_header())
        throw FormatError("bad or missing header in " + origin);
    ++li;

    Dataset ds;
    for (; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        auto fields = csv_detail::parse_line(lines[li]);
        if (fields.size() != 5 + kFeatureCount)
            throw FormatError("row " + std::to_string(li + 1) + " has " +
                              std::to_string(fields.size()) + " fields in " + origin);
        MinedInstance mi;
        mi.project_id = fields[0];
        mi.commit = fields[1];
        mi.class_path = fields[2];
        mi.method_signature = fields[3];
        if (fields[4] == "1") mi.label = true;
        else if (fields[4] == "0") mi.label = false;
        else throw FormatError("bad label '" + fields[4] + "' in " + origin);
        for (int f = 0; f < kFeatureCount; ++f)
            mi.features[static_cast<std::size_t>(f)] = parse_double(fields[static_cast<std::size_t>(5 + f)]);
        ds.instances.push_back(std::move(mi));
    }
    return ds;
}

inline Dataset read_dataset_csv(const std::string& path) {
    return dataset_from_csv(read_file(path), path);
}

// ---- dedup ------------------------------------------------------------------

/// Collapses exact (feature vector, label) duplicates to their first
/// occurrence; vectors appearing with both labels are removed entirely.
inline Dataset deduplicate(const Dataset& ds) {
    std::map<std::array<double, 61>, std::pair<bool, bool>> presence;
    for (const auto& i : ds.instances) {
        auto& p = presence[i.features];
        (i.label ? p.first : p.second) = true;
    }
    Dataset out;
    std::map<std::array<double, 61>, std::pair<bool, bool>> seen;
    int conflicts = 0;
    for (const auto& i : ds.instances) {
        const auto& p = presence[i.features];
        if (p.first && p.second) {
            ++conflicts;
            continue;
        }
        auto& s = seen[i.features];
        bool& flag = i.label ? s.first : s.second;
        if (flag) continue;
        flag = true;
        out.instances.push_back(i);
    }
    if (conflicts > 0)
        log_warn("deduplicate: removed " + std::to_string(conflicts) +
                 " rows whose feature vectors carry both labels");
    return out;
}

// ---- stratified split ---------------------------------------------------------

/// Seeded stratified split; per class the test side receives
/// round(n * test_fraction), at least 1. Instances keep dataset order.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                                    std::uint64_t seed) {
    for (bool label : {false, true}) {
        if (ds.count_label(label) == 0)
            throw EmptyClass(std::string("no instances with label ") + (label ? "1" : "0"));
    }
    std::vector<char> in_test(ds.instances.size(), 0);
    Rng base = Rng(seed).derive("stratified-split");
    for (bool label : {false, true}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.instances.size(); ++i)
            if (ds.instances[i].label == label) idx.push_back(i);
        auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(idx.size()) * test_fraction));
        n_test = std::max<std::size_t>(n_test, 1);
        n_test = std::min(n_test, idx.size());
        Rng rng = base.derive(label ? 1 : 0);
        rng.shuffle(idx);
        for (std::size_t k = 0; k < n_test; ++k) in_test[idx[k]] = 1;
    }
    Dataset train, test;
    for (std::size_t i = 0; i < ds.instances.size(); ++i)
        (in_test[i] ? test : train).instances.push_back(ds.instances[i]);
    return {std::move(train), std::move(test)};
}

// ---- min-max scaling ---------------------------------------------------------

struct Scaler {
    std::array<double, 61> min{};
    std::array<double, 61> max{};
};

inline Scaler fit_minmax(const Dataset& train) {
    if (train.instances.empty()) throw Error("fit_minmax: empty training set");
    Scaler s;
    for (int f = 0; f < kFeatureCount; ++f) {
        auto fi = static_cast<std::size_t>(f);
        s.min[fi] = s.max[fi] = train.instances[0].features[fi];
        for (const auto& i : train.instances) {
            s.min[fi] = std::min(s.min[fi], i.features[fi]);
            s.max[fi] = std::max(s.max[fi], i.features[fi]);
        }
    }
    return s;
}

/// (x - min) / (max - min); constant features map to 0; out-of-range values
/// extrapolate rather than clamp.
inline std::array<double, 61> scale_features(const Scaler& s, const std::array<double, 61>& x) {
    std::array<double, 61> out{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        double range = s.max[f] - s.min[f];
        out[f] = range == 0.0 ? 0.0 : (x[f] - s.min[f]) / range;
    }
    return out;
}

inline Dataset apply_scaler(const Scaler& s, const Dataset& ds) {
    Dataset out = ds;
    for (auto& i : out.instances) i.features = scale_features(s, i.features);
    return out;
}

// ---- feature selection ---------------------------------------------------------

struct FeatureMask {
    std::array<bool, 61> selected{};

    int count() const {
        int n = 0;
        for (bool b : selected)
            if (b) ++n;
        return n;
    }

    static FeatureMask all() {
        FeatureMask m;
        m.selected.fill(true);
        return m;
    }
};

/// Filter selection by between-class separation: (mean difference)^2 over the
/// pooled variance, zero when the pooled variance is zero. Keeps the top k,
/// ties broken by lower feature index.
inline FeatureMask select_features(const Dataset& train, int k = 30) {
    if (train.instances.empty()) throw Error("select_features: empty training set");
    if (k < 1) throw Error("select_features: k must be >= 1");

    std::array<double, 61> score{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        double n1 = 0, n0 = 0, sum1 = 0, sum0 = 0;
        for (const auto& i : train.instances) {
            if (i.label) {
                n1 += 1;
                sum1 += i.features[f];
            } else {
                n0 += 1;
                sum0 += i.features[f];
            }
        }
        if (n1 == 0 || n0 == 0 || n1 + n0 < 3) {
            score[f] = 0;
            continue;
        }
        double m1 = sum1 / n1, m0 = sum0 / n0;
        double ss1 = 0, ss0 = 0;
        for (const auto& i : train.instances) {
            double d = i.features[f] - (i.label ? m1 : m0);
            (i.label ? ss1 : ss0) += d * d;
        }
        double pooled = (ss1 + ss0) / (n1 + n0 - 2);
        if (pooled == 0.0) {
            // Zero within-class variance: a constant feature separates
            // nothing, while distinct class means separate perfectly.
            score[f] = m1 == m0 ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            score[f] = (m1 - m0) * (m1 - m0) / pooled;
        }
    }

    std::vector<int> order(kFeatureCount);
    for (int f = 0; f < kFeatureCount; ++f) order[static_cast<std::size_t>(f)] = f;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        auto sa = score[static_cast<std::size_t>(a)], sb = score[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    FeatureMask mask;
    int keep = std::min(k, kFeatureCount);
    for (int r = 0; r < keep; ++r) mask.selected[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = true;
    return mask;
}

}  // namespace refscout
