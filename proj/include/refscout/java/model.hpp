#pragma once

#include <set>
#include <string>
#include <vector>

#include "refscout/java/lexer.hpp"

namespace refscout::java {

enum class Visibility { public_v, private_v, protected_v, package_v };

inline const char* to_string(Visibility v) {
    switch (v) {
        case Visibility::public_v: return "public";
        case Visibility::private_v: return "private";
        case Visibility::protected_v: return "protected";
        default: return "default";
    }
}

struct Modifiers {
    bool is_static = false;
    bool is_final = false;
    bool is_synchronized = false;
    bool is_abstract = false;
};

enum class StatementKind {
    if_stmt,
    else_branch,
    for_loop,
    while_loop,
    do_loop,
    switch_case,
    try_stmt,
    catch_clause,
    finally_clause,
    return_stmt,
    assignment,
    declaration,
    expression,
    block,
    lambda_body,
    anon_class_body,
};

inline const char* to_string(StatementKind k) {
    switch (k) {
        case StatementKind::if_stmt: return "if";
        case StatementKind::else_branch: return "else-branch";
        case StatementKind::for_loop: return "for";
        case StatementKind::while_loop: return "while";
        case StatementKind::do_loop: return "do";
        case StatementKind::switch_case: return "switch-case";
        case StatementKind::try_stmt: return "try";
        case StatementKind::catch_clause: return "catch";
        case StatementKind::finally_clause: return "finally";
        case StatementKind::return_stmt: return "return";
        case StatementKind::assignment: return "assignment";
        case StatementKind::declaration: return "declaration";
        case StatementKind::expression: return "expression";
        case StatementKind::block: return "block";
        case StatementKind::lambda_body: return "lambda-body";
        case StatementKind::anon_class_body: return "anonymous-class-body";
    }
    return "?";
}

struct Statement {
    StatementKind kind = StatementKind::expression;
    int nesting_depth = 0;  // direct children of a method body sit at depth 0
    std::string canonical_text;
    bool is_case_label = false;  // switch-case node introduced by `case` (not `default`)
    std::vector<Statement> children;
};

struct InvocationRecord {
    std::string receiver;  // dotted receiver chain, "" when unknown/implicit
    std::string callee;
    int arg_count = 0;
};

/// Counts that require parse context and cannot be recovered from the token
/// stream alone.
struct BodyExtras {
    int lambda_count = 0;
    int anon_class_count = 0;
    int local_class_count = 0;
    int declared_variable_count = 0;
    int parenthesized_expr_count = 0;
};

struct FieldModel {
    std::string name;
    std::string type_text;
    Visibility visibility = Visibility::package_v;
    Modifiers modifiers;
};

struct MethodModel {
    std::string name;
    std::string signature;  // name(paramType,paramType,...)
    Visibility visibility = Visibility::package_v;
    Modifiers modifiers;
    bool is_constructor = false;
    bool has_body = false;
    std::string return_type_text;  // "" for constructors
    std::vector<std::string> parameter_types;
    std::vector<std::string> parameter_names;

    Statement body;  // container node of kind block; children are the top-level statements
    std::vector<InvocationRecord> invocations;
    BodyExtras extras;
    std::set<std::string> accessed_field_names;
    std::set<std::string> declared_local_names;
    std::set<std::string> referenced_type_names;

    int span_begin_line = 0;
    int span_end_line = 0;
    std::string raw_body_text;

    // Tokens from the first declaration token through the closing brace (or
    // ';' for abstract methods); body_token_offset indexes the opening '{'.
    std::vector<Token> tokens;
    std::size_t body_token_offset = 0;
};

/// A field initializer or an instance/static initializer block. Its counts
/// contribute to class-level metrics but belong to no method.
struct InitializerInfo {
    Statement body;
    std::vector<InvocationRecord> invocations;
    BodyExtras extras;
    std::vector<Token> tokens;
};

struct ClassModel {
    std::string qualified_name;  // Outer.Inner, dotted
    std::string simple_name;
    bool is_inner = false;
    bool is_interface = false;
    std::string extends_name;  // simple name of the first extended type, "" if none
    std::vector<FieldModel> fields;
    std::vector<MethodModel> methods;
    std::vector<InitializerInfo> initializers;
    int subclass_count = 0;  // classes in the same unit whose extends clause names this class
    std::set<std::string> referenced_type_names;

    int span_begin_line = 0;
    int span_end_line = 0;

    // Tokens from the first declaration token through the closing brace;
    // body_token_offset indexes the opening '{'.
    std::vector<Token> tokens;
    std::size_t body_token_offset = 0;
};

struct CodeModel {
    std::string path;
    std::vector<ClassModel> classes;  // flat list: top-level and named nested classes
};

/// Renders tokens as one whitespace-normalized, comment-free line. The same
/// token sequence always renders to the same string, so layout and comments
/// never affect comparisons.
inline std::string render_tokens(const std::vector<std::string>& texts) {
    std::string out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::string& t = texts[i];
        if (!out.empty()) {
            bool suppress = t == ";" || t == "," || t == ")" || t == "]" || t == ".";
            const std::string& prev = texts[i - 1];
            if (t == "(" && !(java_keywords().count(prev))) suppress = true;
            if (t == "[" && prev != "," && prev != "(" && prev != "=") suppress = true;
            if (prev == "(" || prev == "[" || prev == ".") suppress = true;
            if (!suppress) out += ' ';
        }
        out += t;
    }
    return out;
}

}  // namespace refscout::java
