#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "refscout/java/model.hpp"

namespace refscout {

/// One detected Extract Method: `extracted` is new in the after version and
/// its statements moved out of `parent`.
struct ExtractMethodInstance {
    std::string class_name;  // qualified name, same class for parent and extracted
    std::string parent_signature;
    std::string extracted_signature;
    double overlap_ratio = 0.0;
    std::string commit;
};

namespace detect_detail {

using java::ClassModel;
using java::CodeModel;
using java::MethodModel;
using java::Statement;
using java::StatementKind;

inline bool content_bearing(StatementKind k) {
    switch (k) {
        case StatementKind::if_stmt:
        case StatementKind::for_loop:
        case StatementKind::while_loop:
        case StatementKind::do_loop:
        case StatementKind::switch_case:
        case StatementKind::try_stmt:
        case StatementKind::catch_clause:
        case StatementKind::return_stmt:
        case StatementKind::assignment:
        case StatementKind::declaration:
        case StatementKind::expression:
            return true;
        default:
            return false;
    }
}

inline void collect_fingerprints(const Statement& s, std::set<std::string>& out) {
    for (const Statement& c : s.children) {
        if (content_bearing(c.kind)) out.insert(c.canonical_text);
        collect_fingerprints(c, out);
    }
}

}  // namespace detect_detail

/// Canonical texts of a method's content-bearing statements. Structural nodes
/// with constant text (blocks, else, finally, lambda bodies) are excluded so
/// they never produce spurious matches.
inline std::set<std::string> statement_fingerprints(const java::MethodModel& m) {
    std::set<std::string> out;
    detect_detail::collect_fingerprints(m.body, out);
    return out;
}

/// Detects Extract Method refactorings between two parses of the same file.
/// A pair (parent, extracted) is reported when the extracted signature is new,
/// the parent exists in both versions, at least half of the extracted body's
/// statements moved out of the parent, and the new parent calls the extracted
/// method.
inline std::vector<ExtractMethodInstance> detect_extract_method(const java::CodeModel& before,
                                                                const java::CodeModel& after,
                                                                const std::string& commit) {
    using namespace detect_detail;
    std::vector<ExtractMethodInstance> out;

    std::map<std::string, const ClassModel*> before_classes;
    for (const auto& c : before.classes) before_classes[c.qualified_name] = &c;

    for (const auto& after_cls : after.classes) {
        auto bit = before_classes.find(after_cls.qualified_name);
        if (bit == before_classes.end()) continue;
        const ClassModel& before_cls = *bit->second;

        std::map<std::string, const MethodModel*> before_methods;
        for (const auto& m : before_cls.methods) before_methods[m.signature] = &m;

        std::vector<const MethodModel*> new_methods;
        std::vector<const MethodModel*> common_after;
        for (const auto& m : after_cls.methods) {
            if (before_methods.count(m.signature)) common_after.push_back(&m);
            else new_methods.push_back(&m);
        }

        for (const MethodModel* extracted : new_methods) {
            std::set<std::string> extracted_fp = statement_fingerprints(*extracted);
            if (extracted_fp.empty()) continue;

            const MethodModel* best_parent = nullptr;
            double best_ratio = 0.0;
            for (const MethodModel* after_parent : common_after) {
                const MethodModel* before_parent = before_methods.at(after_parent->signature);
                std::set<std::string> before_fp = statement_fingerprints(*before_parent);
                std::set<std::string> after_fp = statement_fingerprints(*after_parent);

                int moved = 0;
                for (const auto& s : extracted_fp)
                    if (before_fp.count(s) && !after_fp.count(s)) moved++;
                double ratio = static_cast<double>(moved) / static_cast<double>(extracted_fp.size());
                if (moved < 1 || ratio < 0.5) continue;

                bool calls_extracted = false;
                for (const auto& inv : after_parent->invocations)
                    if (inv.callee == extracted->name) calls_extracted = true;
                if (!calls_extracted) continue;

                if (best_parent == nullptr || ratio > best_ratio ||
                    (ratio == best_ratio && after_parent->signature < best_parent->signature)) {
                    best_parent = after_parent;
                    best_ratio = ratio;
                }
            }
            if (best_parent) {
                out.push_back({after_cls.qualified_name, best_parent->signature,
                               extracted->signature, best_ratio, commit});
            }
        }
    }
    return out;
}

/// Qualified names of classes that underwent some refactoring between the two
/// versions: an Extract Method, or a removed method whose statements reappear
/// elsewhere in the after version (coarse move/rename guard). Deliberately
/// over-approximates; its only consumer is the stability-counter reset.
inline std::set<std::string> refactored_classes(const java::CodeModel& before,
                                                const java::CodeModel& after) {
    using namespace detect_detail;
    std::set<std::string> out;
    for (const auto& inst : detect_extract_method(before, after, ""))
        out.insert(inst.class_name);

    // Union of fingerprints over the whole after version.
    std::set<std::string> after_union;
    for (const auto& c : after.classes)
        for (const auto& m : c.methods)
            for (const auto& s : statement_fingerprints(m)) after_union.insert(s);

    std::map<std::string, const ClassModel*> after_classes;
    for (const auto& c : after.classes) after_classes[c.qualified_name] = &c;

    for (const auto& before_cls : before.classes) {
        if (out.count(before_cls.qualified_name)) continue;
        auto ait = after_classes.find(before_cls.qualified_name);
        if (ait == after_classes.end()) continue;
        std::set<std::string> after_sigs;
        for (const auto& m : ait->second->methods) after_sigs.insert(m.signature);

        for (const auto& m : before_cls.methods) {
            if (after_sigs.count(m.signature)) continue;
            std::set<std::string> fp = statement_fingerprints(m);
            if (fp.empty()) continue;
            int reappear = 0;
            for (const auto& s : fp)
                if (after_union.count(s)) reappear++;
            if (2 * reappear >= static_cast<int>(fp.size())) {
                out.insert(before_cls.qualified_name);
                break;
            }
        }
    }
    return out;
}

/// True when any refactoring is detected between the two versions.
inline bool detect_any_refactoring(const java::CodeModel& before, const java::CodeModel& after) {
    return !refactored_classes(before, after).empty();
}

}  // namespace refscout
