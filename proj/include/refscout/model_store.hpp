#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "refscout/dataset.hpp"
#include "refscout/errors.hpp"
#include "refscout/learners.hpp"
#include "refscout/util.hpp"

namespace refscout {

constexpr int kBundleFormatVersion = 1;
constexpr const char* kBundleMagic = "refscout-model-bundle";

/// Everything needed to reload and run a trained model: parameters, scaler,
/// feature mask, and provenance. Serialized as a line-oriented key-value
/// document (see docs/model-bundle.md).
struct ModelBundle {
    int format_version = kBundleFormatVersion;
    TrainedModel model;
    Scaler scaler;
    std::vector<std::string> feature_names = all_feature_names();
    std::string dataset_hash;
    std::string timestamp;  // empty: omitted from the serialization
};

inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace store_detail {

inline void write_doubles(std::string& out, const char* key, const double* values,
                          std::size_t count) {
    out += key;
    out += ":";
    for (std::size_t i = 0; i < count; ++i) {
        out += " ";
        out += format_double_17(values[i]);
    }
    out += "\n";
}

inline std::vector<double> parse_doubles(const std::string& value) {
    std::vector<double> out;
    for (const auto& part : split(std::string(trim(value)), ' '))
        if (!part.empty()) out.push_back(parse_double(part));
    return out;
}

inline void write_tree(std::string& out, const DtParams& tree) {
    out += "tree: " + std::to_string(tree.nodes.size()) + "\n";
    for (const auto& n : tree.nodes) {
        out += "node: " + std::to_string(n.feature) + " " + format_double_17(n.threshold) + " " +
               std::to_string(n.left) + " " + std::to_string(n.right) + " " +
               format_double_17(n.prob) + "\n";
    }
}

class LineReader {
public:
    explicit LineReader(const std::string& text) : lines_(split(text, '\n')) {}

    bool done() const { return pos_ >= lines_.size(); }

    std::string next() {
        while (pos_ < lines_.size() && lines_[pos_].empty()) ++pos_;
        if (pos_ >= lines_.size()) throw FormatError("model bundle truncated");
        return lines_[pos_++];
    }

    /// Expects "key: value" and returns the value.
    std::string expect(const std::string& key) {
        std::string line = next();
        std::string prefix = key + ":";
        if (!starts_with(line, prefix))
            throw FormatError("model bundle: expected '" + key + "', got '" + line + "'");
        return std::string(trim(std::string_view(line).substr(prefix.size())));
    }

private:
    std::vector<std::string> lines_;
    std::size_t pos_ = 0;
};

inline DtParams read_tree(LineReader& reader) {
    long long count = parse_int(reader.expect("tree"));
    DtParams tree;
    tree.nodes.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        auto parts = split(reader.expect("node"), ' ');
        if (parts.size() != 5) throw FormatError("model bundle: bad node line");
        DtNode n;
        n.feature = static_cast<int>(parse_int(parts[0]));
        n.threshold = parse_double(parts[1]);
        n.left = static_cast<int>(parse_int(parts[2]));
        n.right = static_cast<int>(parse_int(parts[3]));
        n.prob = parse_double(parts[4]);
        tree.nodes.push_back(n);
    }
    return tree;
}

}  // namespace store_detail

inline std::string bundle_to_text(const ModelBundle& bundle) {
    using namespace store_detail;
    if (bundle.feature_names.size() != 61)
        throw Error("model bundle must carry exactly 61 feature names");

    std::string out;
    out += std::string(kBundleMagic) + " " + std::to_string(bundle.format_version) + "\n";
    out += "algorithm: " + std::string(to_string(bundle.model.spec.kind)) + "\n";
    out += "tag: " + (bundle.model.tag.empty() ? "none" : bundle.model.tag) + "\n";
    out += "seed: " + std::to_string(bundle.model.seed) + "\n";
    out += "dataset-hash: " + (bundle.dataset_hash.empty() ? "none" : bundle.dataset_hash) + "\n";
    if (!bundle.timestamp.empty() && bundle.model.tag != "test")
        out += "created: " + bundle.timestamp + "\n";
    out += "hyperparameters: " + hyperparams_to_string(bundle.model.spec.params) + "\n";

    out += "feature-names:";
    for (const auto& n : bundle.feature_names) out += " " + n;
    out += "\n";

    write_doubles(out, "scaler-min", bundle.scaler.min.data(), bundle.scaler.min.size());
    write_doubles(out, "scaler-max", bundle.scaler.max.data(), bundle.scaler.max.size());

    out += "feature-mask: ";
    for (bool b : bundle.model.mask.selected) out += b ? '1' : '0';
    out += "\n";

    switch (bundle.model.spec.kind) {
        case AlgorithmKind::dt:
            write_tree(out, std::get<DtParams>(bundle.model.params));
            break;
        case AlgorithmKind::rf: {
            const RfParams& rf = std::get<RfParams>(bundle.model.params);
            out += "trees: " + std::to_string(rf.trees.size()) + "\n";
            for (const auto& t : rf.trees) write_tree(out, t);
            break;
        }
        case AlgorithmKind::lr:
        case AlgorithmKind::svm: {
            const LinearParams& lin = std::get<LinearParams>(bundle.model.params);
            write_doubles(out, "weights", lin.weights.data(), lin.weights.size());
            out += "bias: " + format_double_17(lin.bias) + "\n";
            break;
        }
        case AlgorithmKind::nb: {
            const NbParams& nb = std::get<NbParams>(bundle.model.params);
            out += "prior-pos: " + format_double_17(nb.prior_pos) + "\n";
            out += "prior-neg: " + format_double_17(nb.prior_neg) + "\n";
            write_doubles(out, "mean-pos", nb.mean_pos.data(), nb.mean_pos.size());
            write_doubles(out, "mean-neg", nb.mean_neg.data(), nb.mean_neg.size());
            write_doubles(out, "var-pos", nb.var_pos.data(), nb.var_pos.size());
            write_doubles(out, "var-neg", nb.var_neg.data(), nb.var_neg.size());
            break;
        }
    }
    out += "end\n";
    return out;
}

/// Writes atomically: temp file in the same directory, then rename.
inline void save_bundle(const ModelBundle& bundle, const std::string& path) {
    std::string text = bundle_to_text(bundle);
    std::string tmp = path + ".tmp";
    write_file(tmp, text);
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move bundle into place at " + path);
    }
}

inline ModelBundle bundle_from_text(const std::string& text, const std::string& origin) {
    using namespace store_detail;
    LineReader reader(text);

    std::string header = reader.next();
    auto header_parts = split(header, ' ');
    if (header_parts.size() != 2 || header_parts[0] != kBundleMagic)
        throw FormatError("not a model bundle: " + origin);
    long long version = 0;
    try {
        version = parse_int(header_parts[1]);
    } catch (const FormatError&) {
        throw FormatError("bad version in bundle header: " + origin);
    }
    if (version != kBundleFormatVersion)
        throw VersionError("unsupported bundle format version " + std::to_string(version) +
                           " in " + origin);

    ModelBundle bundle;
    bundle.format_version = static_cast<int>(version);

    AlgorithmKind kind = algorithm_kind_from_string(reader.expect("algorithm"));
    std::string tag = reader.expect("tag");
    std::uint64_t seed = static_cast<std::uint64_t>(parse_int(reader.expect("seed")));
    std::string dataset_hash = reader.expect("dataset-hash");

    // Optional created line.
    std::string hp_line = reader.next();
    std::string timestamp;
    if (starts_with(hp_line, "created:")) {
        timestamp = std::string(trim(std::string_view(hp_line).substr(8)));
        hp_line = reader.next();
    }
    if (!starts_with(hp_line, "hyperparameters:"))
        throw FormatError("model bundle: expected 'hyperparameters', got '" + hp_line + "'");
    Hyperparams hp =
        hyperparams_from_string(std::string(trim(std::string_view(hp_line).substr(16))));

    std::string names_line = reader.expect("feature-names");
    std::vector<std::string> names;
    for (const auto& n : split(names_line, ' '))
        if (!n.empty()) names.push_back(n);
    if (names.size() != 61)
        throw FormatError("model bundle: expected 61 feature names, got " +
                          std::to_string(names.size()));

    std::vector<double> smin = parse_doubles(reader.expect("scaler-min"));
    std::vector<double> smax = parse_doubles(reader.expect("scaler-max"));
    if (smin.size() != 61 || smax.size() != 61)
        throw FormatError("model bundle: scaler must carry 61 values per side");

    std::string mask_str = reader.expect("feature-mask");
    if (mask_str.size() != 61) throw FormatError("model bundle: feature mask must be 61 bits");

    bundle.model.spec = AlgorithmSpec(kind, hp);
    bundle.model.tag = tag == "none" ? "" : tag;
    bundle.model.seed = seed;
    bundle.dataset_hash = dataset_hash == "none" ? "" : dataset_hash;
    bundle.timestamp = timestamp;
    bundle.feature_names = names;
    for (std::size_t i = 0; i < 61; ++i) {
        bundle.scaler.min[i] = smin[i];
        bundle.scaler.max[i] = smax[i];
        bundle.model.mask.selected[i] = mask_str[i] == '1';
    }

    switch (kind) {
        case AlgorithmKind::dt:
            bundle.model.params = read_tree(reader);
            break;
        case AlgorithmKind::rf: {
            long long count = parse_int(reader.expect("trees"));
            RfParams rf;
            for (long long t = 0; t < count; ++t) rf.trees.push_back(read_tree(reader));
            bundle.model.params = std::move(rf);
            break;
        }
        case AlgorithmKind::lr:
        case AlgorithmKind::svm: {
            LinearParams lin;
            lin.weights = parse_doubles(reader.expect("weights"));
            lin.bias = parse_double(reader.expect("bias"));
            bundle.model.params = std::move(lin);
            break;
        }
        case AlgorithmKind::nb: {
            NbParams nb;
            nb.prior_pos = parse_double(reader.expect("prior-pos"));
            nb.prior_neg = parse_double(reader.expect("prior-neg"));
            nb.mean_pos = parse_doubles(reader.expect("mean-pos"));
            nb.mean_neg = parse_doubles(reader.expect("mean-neg"));
            nb.var_pos = parse_doubles(reader.expect("var-pos"));
            nb.var_neg = parse_doubles(reader.expect("var-neg"));
            bundle.model.params = std::move(nb);
            break;
        }
    }

    if (reader.next() != "end") throw FormatError("model bundle: missing end marker in " + origin);
    return bundle;
}

inline ModelBundle load_bundle(const std::string& path) {
    return bundle_from_text(read_file(path), path);
}

}  // namespace refscout
