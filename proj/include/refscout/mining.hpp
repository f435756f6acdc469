#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "refscout/errors.hpp"
#include "refscout/git.hpp"
#include "refscout/java/parser.hpp"
#include "refscout/log.hpp"
#include "refscout/metrics.hpp"
#include "refscout/refactoring.hpp"

namespace refscout {

struct MiningConfig {
    int s_threshold = 20;
    std::string branch;  // empty: use HEAD's branch
    std::string project_id;
};

/// One labeled data point: a method with its 61 features and provenance.
struct MinedInstance {
    std::string project_id;
    std::string commit;
    std::string class_path;  // "<file>:<qualified class name>"
    std::string method_signature;
    bool label = false;  // true: underwent Extract Method
    std::array<double, 61> features{};
};

/// Consecutive non-refactoring change count per class, keyed by
/// (file path, qualified class name).
using StabilityCounter = std::map<std::pair<std::string, std::string>, int>;

/// Advances the per-class counters for one commit: refactored classes reset,
/// changed classes increment, classes reaching `s` are returned due and reset.
/// Unchanged classes keep their count.
inline std::set<std::pair<std::string, std::string>> advance_stability(
    StabilityCounter& counter, const std::set<std::pair<std::string, std::string>>& changed,
    const std::set<std::pair<std::string, std::string>>& refactored, int s) {
    std::set<std::pair<std::string, std::string>> due;
    for (const auto& key : changed) {
        if (refactored.count(key)) {
            counter[key] = 0;
            continue;
        }
        int& count = counter[key];
        ++count;
        if (count >= s) {
            due.insert(key);
            count = 0;
        }
    }
    for (const auto& key : refactored) counter[key] = 0;
    return due;
}

inline std::array<double, 61> assemble_features(const ClassMetrics& cm, const MethodMetrics& mm) {
    std::array<double, 61> out{};
    auto ca = cm.to_array();
    auto ma = mm.to_array();
    std::size_t i = 0;
    for (double v : ca) out[i++] = v;
    for (double v : ma) out[i++] = v;
    return out;
}

namespace mining_detail {

inline bool is_java_file(const std::string& path) {
    return path.size() > 5 && path.substr(path.size() - 5) == ".java";
}

inline std::optional<java::CodeModel> parse_or_skip(const std::string& source,
                                                    const std::string& path,
                                                    const std::string& commit) {
    try {
        return java::parse_compilation_unit(source, path);
    } catch (const SyntaxError& e) {
        log_warn("skipping unparseable file " + path + " at " + commit + ": " + e.what());
    } catch (const EncodingError& e) {
        log_warn("skipping non-UTF-8 file " + path + " at " + commit + ": " + e.what());
    }
    return std::nullopt;
}

}  // namespace mining_detail

/// Walks first-parent history and emits positive instances (methods about to
/// undergo Extract Method, measured at the parent commit) and negative
/// instances via the s-consecutive-commits stability heuristic.
inline std::vector<MinedInstance> mine_repository(const std::string& repo_path,
                                                  const MiningConfig& config) {
    using mining_detail::is_java_file;
    using mining_detail::parse_or_skip;

    GitRepo repo = GitRepo::open(repo_path);
    std::string branch = config.branch.empty() ? repo.head_branch() : config.branch;
    std::vector<std::string> commits = repo.rev_list_first_parent(branch);

    std::vector<MinedInstance> out;
    StabilityCounter counter;

    for (std::size_t ci = 1; ci < commits.size(); ++ci) {
        const std::string& parent = commits[ci - 1];
        const std::string& child = commits[ci];

        auto entries = repo.diff_tree(parent, child);
        std::sort(entries.begin(), entries.end(),
                  [](const GitRepo::DiffEntry& a, const GitRepo::DiffEntry& b) {
                      return a.new_path < b.new_path;
                  });

        std::set<std::pair<std::string, std::string>> changed;
        std::set<std::pair<std::string, std::string>> refactored;
        // Parsed after-versions, kept for negative emission at this commit.
        std::map<std::string, java::CodeModel> after_models;
        // (class_path, method_signature, instance) collected this commit.
        std::vector<MinedInstance> commit_instances;

        for (const auto& e : entries) {
            if (!is_java_file(e.new_path) && !is_java_file(e.old_path)) continue;

            if (e.status == 'D') {
                for (auto it = counter.begin(); it != counter.end();) {
                    if (it->first.first == e.old_path) it = counter.erase(it);
                    else ++it;
                }
                continue;
            }
            if (e.status == 'A') continue;  // creation is not a change

            if (e.status == 'R') {
                // Move counters to the new path; a pure rename is not a change.
                std::vector<std::pair<std::string, int>> moved;
                for (auto it = counter.begin(); it != counter.end();) {
                    if (it->first.first == e.old_path) {
                        moved.emplace_back(it->first.second, it->second);
                        it = counter.erase(it);
                    } else {
                        ++it;
                    }
                }
                for (auto& [cls, count] : moved) counter[{e.new_path, cls}] = count;
                if (e.similarity == 100) continue;
            } else if (e.status != 'M') {
                continue;
            }

            std::string before_src, after_src;
            try {
                before_src = repo.show_file(parent, e.old_path);
                after_src = repo.show_file(child, e.new_path);
            } catch (const IoError& err) {
                log_warn(std::string("skipping file pair: ") + err.what());
                continue;
            }
            auto before = parse_or_skip(before_src, e.old_path, parent);
            auto after = parse_or_skip(after_src, e.new_path, child);
            if (!before || !after) continue;

            // Classes present before but gone after lose their counters.
            std::set<std::string> after_names;
            for (const auto& c : after->classes) after_names.insert(c.qualified_name);
            for (const auto& c : before->classes) {
                if (!after_names.count(c.qualified_name))
                    counter.erase({e.new_path, c.qualified_name});
            }

            for (const auto& name : after_names) changed.insert({e.new_path, name});
            for (const auto& name : refactored_classes(*before, *after))
                refactored.insert({e.new_path, name});

            // Positive instances, measured on the parent version.
            std::map<std::string, const java::ClassModel*> before_classes;
            for (const auto& c : before->classes) before_classes[c.qualified_name] = &c;
            for (const auto& inst : detect_extract_method(*before, *after, child)) {
                const java::ClassModel* cls = before_classes.at(inst.class_name);
                const java::MethodModel* parent_method = nullptr;
                for (const auto& m : cls->methods)
                    if (m.signature == inst.parent_signature) parent_method = &m;
                if (!parent_method) continue;
                MinedInstance mi;
                mi.project_id = config.project_id;
                mi.commit = child;
                mi.class_path = e.new_path + ":" + inst.class_name;
                mi.method_signature = inst.parent_signature;
                mi.label = true;
                mi.features =
                    assemble_features(compute_class_metrics(*cls),
                                      compute_method_metrics(*parent_method, *cls));
                commit_instances.push_back(std::move(mi));
            }

            after_models.emplace(e.new_path, std::move(*after));
        }

        auto due = advance_stability(counter, changed, refactored, config.s_threshold);

        for (const auto& [file_path, class_name] : due) {
            auto mit = after_models.find(file_path);
            if (mit == after_models.end()) continue;
            for (const auto& cls : mit->second.classes) {
                if (cls.qualified_name != class_name) continue;
                ClassMetrics cm = compute_class_metrics(cls);
                for (const auto& m : cls.methods) {
                    MinedInstance mi;
                    mi.project_id = config.project_id;
                    mi.commit = child;
                    mi.class_path = file_path + ":" + class_name;
                    mi.method_signature = m.signature;
                    mi.label = false;
                    mi.features = assemble_features(cm, compute_method_metrics(m, cls));
                    commit_instances.push_back(std::move(mi));
                }
            }
        }

        std::stable_sort(commit_instances.begin(), commit_instances.end(),
                         [](const MinedInstance& a, const MinedInstance& b) {
                             if (a.class_path != b.class_path) return a.class_path < b.class_path;
                             return a.method_signature < b.method_signature;
                         });
        for (auto& mi : commit_instances) out.push_back(std::move(mi));
    }
    return out;
}

}  // namespace refscout
