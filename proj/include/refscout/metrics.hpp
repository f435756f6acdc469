#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "refscout/java/model.hpp"

namespace refscout {

/// The 20 method-level features, in the documented column order.
struct MethodMetrics {
    int anonymous_classes = 0;
    int assignments = 0;
    int cbo = 0;
    int comparisons = 0;
    int lambdas = 0;
    int loc = 0;
    int loops = 0;
    int math_operations = 0;
    int max_nested_blocks = 0;
    int numbers = 0;
    int parameters = 0;
    int parenthesized_exps = 0;
    int returns = 0;
    int rfc = 0;
    int string_literals = 0;
    int subclasses = 0;
    int try_catches = 0;
    int unique_words = 0;
    int variables = 0;
    int wmc = 0;

    std::array<double, 20> to_array() const {
        return {double(anonymous_classes), double(assignments), double(cbo), double(comparisons),
                double(lambdas),           double(loc),         double(loops),
                double(math_operations),   double(max_nested_blocks), double(numbers),
                double(parameters),        double(parenthesized_exps), double(returns),
                double(rfc),               double(string_literals), double(subclasses),
                double(try_catches),       double(unique_words), double(variables), double(wmc)};
    }
};

/// The 41 class-level features, in the documented column order.
struct ClassMetrics {
    int anonymous_classes = 0;
    int assignments = 0;
    int cbo = 0;
    int comparisons = 0;
    int lambdas = 0;
    int lcom = 0;
    int loc = 0;
    double lcc = 0.0;
    int loops = 0;
    int math_operations = 0;
    int max_nested_blocks = 0;
    int nosi = 0;
    int abstract_methods = 0;
    int default_fields = 0;
    int default_methods = 0;
    int fields = 0;
    int final_fields = 0;
    int final_methods = 0;
    int methods = 0;
    int private_fields = 0;
    int private_methods = 0;
    int protected_fields = 0;
    int protected_methods = 0;
    int public_fields = 0;
    int public_methods = 0;
    int static_fields = 0;
    int static_methods = 0;
    int synchronized_fields = 0;
    int synchronized_methods = 0;
    int numbers = 0;
    int parenthesized_exps = 0;
    int returns = 0;
    int rfc = 0;
    int string_literals = 0;
    int subclasses = 0;
    int try_catches = 0;
    int unique_words = 0;
    int variables = 0;
    int wmc = 0;
    double tcc = 0.0;
    int is_inner_class = 0;

    std::array<double, 41> to_array() const {
        return {double(anonymous_classes),
                double(assignments),
                double(cbo),
                double(comparisons),
                double(lambdas),
                double(lcom),
                double(loc),
                lcc,
                double(loops),
                double(math_operations),
                double(max_nested_blocks),
                double(nosi),
                double(abstract_methods),
                double(default_fields),
                double(default_methods),
                double(fields),
                double(final_fields),
                double(final_methods),
                double(methods),
                double(private_fields),
                double(private_methods),
                double(protected_fields),
                double(protected_methods),
                double(public_fields),
                double(public_methods),
                double(static_fields),
                double(static_methods),
                double(synchronized_fields),
                double(synchronized_methods),
                double(numbers),
                double(parenthesized_exps),
                double(returns),
                double(rfc),
                double(string_literals),
                double(subclasses),
                double(try_catches),
                double(unique_words),
                double(variables),
                double(wmc),
                tcc,
                double(is_inner_class)};
    }
};

inline const std::vector<std::string>& class_feature_names() {
    static const std::vector<std::string> names = {
        "AnonymousClassesQty", "AssignmentsQty", "Cbo", "ComparisonsQty", "LambdasQty", "Lcom",
        "Loc", "LCC", "LoopQty", "MathOperationsQty", "MaxNestedBlocks", "Nosi",
        "NumberOfAbstractMethods", "NumberOfDefaultFields", "NumberOfDefaultMethods",
        "NumberOfFields", "NumberOfFinalFields", "NumberOfFinalMethods", "NumberOfMethods",
        "NumberOfPrivateFields", "NumberOfPrivateMethods", "NumberOfProtectedFields",
        "NumberOfProtectedMethods", "NumberOfPublicFields", "NumberOfPublicMethods",
        "NumberOfStaticFields", "NumberOfStaticMethods", "NumberOfSynchronizedFields",
        "NumberOfSynchronizedMethods", "NumbersQty", "ParenthesizedExpsQty", "ReturnQty", "Rfc",
        "StringLiteralsQty", "SubClassesQty", "TryCatchQty", "UniqueWordsQty", "VariablesQty",
        "Wmc", "TCC", "isInnerClass"};
    return names;
}

inline const std::vector<std::string>& method_feature_names() {
    static const std::vector<std::string> names = {
        "AnonymousClassesQty", "AssignmentsQty", "Cbo", "ComparisonsQty", "LambdasQty", "Loc",
        "LoopQty", "MathOperationsQty", "MaxNestedBlocks", "NumbersQty", "ParametersQty",
        "ParenthesizedExpsQty", "ReturnQty", "Rfc", "StringLiteralsQty", "SubClassesQty",
        "TryCatchQty", "UniqueWordsQty", "VariablesQty", "Wmc"};
    return names;
}

/// All 61 dataset feature names: class features first, then method features
/// prefixed with "method_".
inline const std::vector<std::string>& all_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out = class_feature_names();
        for (const auto& n : method_feature_names()) out.push_back("method_" + n);
        return out;
    }();
    return names;
}

namespace metrics_detail {

using java::InitializerInfo;
using java::MethodModel;
using java::Statement;
using java::StatementKind;
using java::Token;
using java::TokenKind;

struct TokenCounts {
    int assignments = 0;
    int comparisons = 0;
    int math_operations = 0;
    int numbers = 0;
    int string_literals = 0;
    int cc_operators = 0;  // ternary '?', '&&', '||'
};

inline bool is_assignment_op_text(const std::string& s) {
    static const std::set<std::string> ops = {"=",  "+=", "-=",  "*=",  "/=",  "%=",
                                              "&=", "|=", "^=", "<<=", ">>=", ">>>="};
    return ops.count(s) != 0;
}

inline bool is_math_op_text(const std::string& s) {
    static const std::set<std::string> ops = {"+", "-", "*", "/", "%", "<<", ">>"};
    return ops.count(s) != 0;
}

template <typename It>
TokenCounts count_tokens(It begin, It end) {
    TokenCounts tc;
    for (It it = begin; it != end; ++it) {
        const Token& t = *it;
        if (t.annotation) continue;
        if (t.kind == TokenKind::number) {
            tc.numbers++;
            continue;
        }
        if (t.kind == TokenKind::string_lit) {
            tc.string_literals++;
            continue;
        }
        if (t.kind != TokenKind::punct || t.type_ctx) continue;
        if (is_assignment_op_text(t.text)) tc.assignments++;
        else if (t.text == "==" || t.text == "!=") tc.comparisons++;
        else if (is_math_op_text(t.text)) tc.math_operations++;
        else if (t.text == "?" || t.text == "&&" || t.text == "||") tc.cc_operators++;
    }
    return tc;
}

template <typename It>
void collect_words(It begin, It end, std::set<std::string>& words) {
    for (It it = begin; it != end; ++it) {
        const Token& t = *it;
        if (t.annotation) continue;
        if (t.kind == TokenKind::identifier || t.kind == TokenKind::keyword ||
            t.kind == TokenKind::number)
            words.insert(t.text);
    }
}

template <typename It>
int count_code_lines(It begin, It end) {
    std::set<int> lines;
    for (It it = begin; it != end; ++it) {
        if (!it->annotation && it->kind != TokenKind::end) lines.insert(it->line);
    }
    return static_cast<int>(lines.size());
}

struct TreeCounts {
    int ifs = 0;
    int loops = 0;
    int tries = 0;
    int catches = 0;
    int case_labels = 0;
    int returns = 0;
    int max_depth = 0;
};

inline void walk_tree(const Statement& s, TreeCounts& tc) {
    for (const Statement& c : s.children) {
        tc.max_depth = std::max(tc.max_depth, c.nesting_depth);
        switch (c.kind) {
            case StatementKind::if_stmt: tc.ifs++; break;
            case StatementKind::for_loop:
            case StatementKind::while_loop:
            case StatementKind::do_loop: tc.loops++; break;
            case StatementKind::try_stmt: tc.tries++; break;
            case StatementKind::catch_clause: tc.catches++; break;
            case StatementKind::switch_case:
                if (c.is_case_label) tc.case_labels++;
                break;
            case StatementKind::return_stmt: tc.returns++; break;
            default: break;
        }
        walk_tree(c, tc);
    }
}

inline std::string receiver_first_segment(const std::string& receiver) {
    auto dot = receiver.find('.');
    return dot == std::string::npos ? receiver : receiver.substr(0, dot);
}

inline bool counts_as_static_invocation(const java::InvocationRecord& inv,
                                        const std::set<std::string>& shadowing_names) {
    if (inv.receiver.empty()) return false;
    std::string head = receiver_first_segment(inv.receiver);
    if (head.empty() || !std::isupper(static_cast<unsigned char>(head[0]))) return false;
    return shadowing_names.count(head) == 0;
}

}  // namespace metrics_detail

/// Cyclomatic complexity: 1 + branching constructs + short-circuit and
/// ternary operators.
inline int cyclomatic_complexity(const java::MethodModel& m) {
    metrics_detail::TreeCounts tree;
    metrics_detail::walk_tree(m.body, tree);
    metrics_detail::TokenCounts toks = metrics_detail::count_tokens(
        m.tokens.begin() + static_cast<std::ptrdiff_t>(
                               std::min(m.body_token_offset, m.tokens.size())),
        m.tokens.end());
    return 1 + tree.ifs + tree.loops + tree.case_labels + tree.catches + toks.cc_operators;
}

/// TCC and LCC over non-constructor methods: directly connected pairs share a
/// field; LCC adds transitively connected pairs. Classes with fewer than two
/// such methods yield (0, 0).
inline std::pair<double, double> tight_and_loose_cohesion(const java::ClassModel& cls) {
    std::vector<const java::MethodModel*> ms;
    for (const auto& m : cls.methods)
        if (!m.is_constructor) ms.push_back(&m);
    const std::size_t n = ms.size();
    if (n < 2) return {0.0, 0.0};

    auto connected = [&](std::size_t i, std::size_t j) {
        for (const auto& f : ms[i]->accessed_field_names)
            if (ms[j]->accessed_field_names.count(f)) return true;
        return false;
    };

    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    int direct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (connected(i, j)) {
                direct++;
                parent[find(i)] = find(j);
            }
        }
    }
    int closure = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (find(i) == find(j)) closure++;

    const double possible = static_cast<double>(n * (n - 1) / 2);
    return {direct / possible, closure / possible};
}

/// LCOM1 floored at zero, over non-constructor methods.
inline int lack_of_cohesion(const java::ClassModel& cls) {
    std::vector<const java::MethodModel*> ms;
    for (const auto& m : cls.methods)
        if (!m.is_constructor) ms.push_back(&m);
    int sharing = 0, non_sharing = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = i + 1; j < ms.size(); ++j) {
            bool share = false;
            for (const auto& f : ms[i]->accessed_field_names)
                if (ms[j]->accessed_field_names.count(f)) {
                    share = true;
                    break;
                }
            if (share) sharing++;
            else non_sharing++;
        }
    }
    return std::max(0, non_sharing - sharing);
}

inline MethodMetrics compute_method_metrics(const java::MethodModel& m,
                                            const java::ClassModel& enclosing) {
    using namespace metrics_detail;
    MethodMetrics mm;

    TreeCounts tree;
    walk_tree(m.body, tree);

    const std::size_t off = std::min(m.body_token_offset, m.tokens.size());
    TokenCounts toks = count_tokens(m.tokens.begin() + static_cast<std::ptrdiff_t>(off),
                                    m.tokens.end());
    std::set<std::string> words;
    collect_words(m.tokens.begin() + static_cast<std::ptrdiff_t>(off), m.tokens.end(), words);

    std::set<std::string> shadowing = m.declared_local_names;
    for (const auto& p : m.parameter_names) shadowing.insert(p);
    for (const auto& f : enclosing.fields) shadowing.insert(f.name);

    std::set<std::string> types = m.referenced_type_names;
    for (const auto& inv : m.invocations) {
        if (counts_as_static_invocation(inv, shadowing))
            types.insert(receiver_first_segment(inv.receiver));
    }
    types.erase(enclosing.simple_name);

    std::set<std::string> callees;
    for (const auto& inv : m.invocations) callees.insert(inv.callee);

    mm.anonymous_classes = m.extras.anon_class_count;
    mm.assignments = toks.assignments;
    mm.cbo = static_cast<int>(types.size());
    mm.comparisons = toks.comparisons;
    mm.lambdas = m.extras.lambda_count;
    mm.loc = count_code_lines(m.tokens.begin(), m.tokens.end());
    mm.loops = tree.loops;
    mm.math_operations = toks.math_operations;
    mm.max_nested_blocks = tree.max_depth;
    mm.numbers = toks.numbers;
    mm.parameters = static_cast<int>(m.parameter_types.size());
    mm.parenthesized_exps = m.extras.parenthesized_expr_count;
    mm.returns = tree.returns;
    mm.rfc = static_cast<int>(callees.size());
    mm.string_literals = toks.string_literals;
    mm.subclasses = m.extras.local_class_count;
    mm.try_catches = tree.tries;
    mm.unique_words = static_cast<int>(words.size());
    mm.variables = m.extras.declared_variable_count;
    mm.wmc = 1 + tree.ifs + tree.loops + tree.case_labels + tree.catches + toks.cc_operators;
    return mm;
}

inline ClassMetrics compute_class_metrics(const java::ClassModel& cls) {
    using namespace metrics_detail;
    ClassMetrics cm;

    std::set<std::string> class_field_names;
    for (const auto& f : cls.fields) class_field_names.insert(f.name);

    std::set<std::string> types = cls.referenced_type_names;
    std::set<std::string> callees;

    for (const auto& m : cls.methods) {
        MethodMetrics mm = compute_method_metrics(m, cls);
        cm.anonymous_classes += mm.anonymous_classes;
        cm.assignments += mm.assignments;
        cm.comparisons += mm.comparisons;
        cm.lambdas += mm.lambdas;
        cm.loops += mm.loops;
        cm.math_operations += mm.math_operations;
        cm.max_nested_blocks = std::max(cm.max_nested_blocks, mm.max_nested_blocks);
        cm.numbers += mm.numbers;
        cm.parenthesized_exps += mm.parenthesized_exps;
        cm.returns += mm.returns;
        cm.string_literals += mm.string_literals;
        cm.try_catches += mm.try_catches;
        cm.variables += mm.variables;
        cm.wmc += mm.wmc;

        std::set<std::string> shadowing = m.declared_local_names;
        for (const auto& p : m.parameter_names) shadowing.insert(p);
        for (const auto& n : class_field_names) shadowing.insert(n);
        for (const auto& inv : m.invocations) {
            callees.insert(inv.callee);
            if (counts_as_static_invocation(inv, shadowing)) {
                cm.nosi++;
                types.insert(receiver_first_segment(inv.receiver));
            }
        }

        bool implicit_abstract = cls.is_interface && !m.has_body && !m.modifiers.is_static;
        if (m.modifiers.is_abstract || implicit_abstract) cm.abstract_methods++;
        // Constructors count as methods in the declaration tallies; cohesion
        // metrics exclude them separately.
        cm.methods++;
        switch (m.visibility) {
            case java::Visibility::public_v: cm.public_methods++; break;
            case java::Visibility::private_v: cm.private_methods++; break;
            case java::Visibility::protected_v: cm.protected_methods++; break;
            default: cm.default_methods++; break;
        }
        if (m.modifiers.is_static) cm.static_methods++;
        if (m.modifiers.is_final) cm.final_methods++;
        if (m.modifiers.is_synchronized) cm.synchronized_methods++;
    }

    for (const auto& init : cls.initializers) {
        TreeCounts tree;
        walk_tree(init.body, tree);
        TokenCounts toks = count_tokens(init.tokens.begin(), init.tokens.end());
        cm.anonymous_classes += init.extras.anon_class_count;
        cm.assignments += toks.assignments;
        cm.comparisons += toks.comparisons;
        cm.lambdas += init.extras.lambda_count;
        cm.loops += tree.loops;
        cm.math_operations += toks.math_operations;
        cm.max_nested_blocks = std::max(cm.max_nested_blocks, tree.max_depth);
        cm.numbers += toks.numbers;
        cm.parenthesized_exps += init.extras.parenthesized_expr_count;
        cm.returns += tree.returns;
        cm.string_literals += toks.string_literals;
        cm.try_catches += tree.tries;
        cm.variables += init.extras.declared_variable_count;
        for (const auto& inv : init.invocations) {
            callees.insert(inv.callee);
            if (counts_as_static_invocation(inv, class_field_names)) {
                cm.nosi++;
                types.insert(receiver_first_segment(inv.receiver));
            }
        }
    }

    for (const auto& f : cls.fields) {
        cm.fields++;
        switch (f.visibility) {
            case java::Visibility::public_v: cm.public_fields++; break;
            case java::Visibility::private_v: cm.private_fields++; break;
            case java::Visibility::protected_v: cm.protected_fields++; break;
            default: cm.default_fields++; break;
        }
        if (f.modifiers.is_static) cm.static_fields++;
        if (f.modifiers.is_final) cm.final_fields++;
        if (f.modifiers.is_synchronized) cm.synchronized_fields++;
    }

    types.erase(cls.simple_name);
    cm.cbo = static_cast<int>(types.size());

    // Class LOC and word counts run over the body interior: tokens strictly
    // between the class braces ("class A {}" has zero code lines).
    const std::size_t off = std::min(cls.body_token_offset + 1, cls.tokens.size());
    const std::size_t interior_end = cls.tokens.empty() ? 0 : cls.tokens.size() - 1;
    std::set<std::string> words;
    collect_words(cls.tokens.begin() + static_cast<std::ptrdiff_t>(off),
                  cls.tokens.begin() + static_cast<std::ptrdiff_t>(interior_end), words);
    cm.unique_words = static_cast<int>(words.size());
    cm.loc = count_code_lines(cls.tokens.begin() + static_cast<std::ptrdiff_t>(off),
                              cls.tokens.begin() + static_cast<std::ptrdiff_t>(interior_end));
    cm.lcom = lack_of_cohesion(cls);
    auto [tcc, lcc] = tight_and_loose_cohesion(cls);
    cm.tcc = tcc;
    cm.lcc = lcc;
    cm.rfc = cm.methods + static_cast<int>(callees.size());
    cm.subclasses = cls.subclass_count;
    cm.is_inner_class = cls.is_inner ? 1 : 0;
    return cm;
}

}  // namespace refscout
