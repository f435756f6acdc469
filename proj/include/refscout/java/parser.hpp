#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "refscout/errors.hpp"
#include "refscout/java/lexer.hpp"
#include "refscout/java/model.hpp"
#include "refscout/util.hpp"

namespace refscout::java {

namespace detail {

inline bool is_upper_ident(const Token& t) {
    return t.kind == TokenKind::identifier && !t.text.empty() &&
           std::isupper(static_cast<unsigned char>(t.text[0]));
}

inline bool is_primitive_or_var(const Token& t) {
    if (t.kind != TokenKind::keyword) return false;
    static const std::set<std::string> prim = {"boolean", "byte", "short", "int",  "long",
                                               "char",    "float", "double", "void", "var"};
    return prim.count(t.text) != 0;
}

/// Joins type tokens compactly: `List<String>`, `Map<? extends K,V>[]`.
inline std::string join_type_tokens(const std::vector<Token>& toks, std::size_t begin,
                                    std::size_t end) {
    std::string out;
    auto wordish = [](const Token& t) {
        return t.kind == TokenKind::identifier || t.kind == TokenKind::keyword ||
               t.kind == TokenKind::number;
    };
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin && wordish(toks[i]) && wordish(toks[i - 1])) out += ' ';
        out += toks[i].text;
    }
    return out;
}

struct TypeScan {
    bool ok = false;
    std::size_t end = 0;            // one past the last type token
    std::string text;               // compact text
    std::string last_simple;        // simple name of the outermost segment
    std::vector<std::string> uppercase_names;
};

}  // namespace detail

/// Recursive-descent parser for the supported Java subset. Produces the
/// structural model the metric and detection passes run on; symbols are never
/// resolved across files.
class Parser {
public:
    Parser(std::string_view source, std::string path)
        : source_(source), path_(std::move(path)), toks_(lex(source)) {}

    CodeModel run() {
        CodeModel model;
        model.path = path_;
        skip_header();
        while (!at(TokenKind::end)) {
            parse_type_decl("", false, model.classes);
        }
        finish(model);
        return model;
    }

private:
    std::string_view source_;
    std::string path_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    // Active collection targets; initializers and methods swap these in.
    std::set<std::string>* class_types_ = nullptr;
    std::set<std::string>* member_types_ = nullptr;
    std::vector<InvocationRecord>* invocations_ = nullptr;
    BodyExtras* extras_ = nullptr;
    std::set<std::string>* locals_ = nullptr;

    // ---- token helpers -----------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& la(std::size_t n) const {
        std::size_t i = std::min(pos_ + n, toks_.size() - 1);
        return toks_[i];
    }
    bool at(TokenKind k) const { return cur().kind == k; }
    bool at_punct(std::string_view s) const {
        return cur().kind == TokenKind::punct && cur().text == s;
    }
    bool at_keyword(std::string_view s) const {
        return cur().kind == TokenKind::keyword && cur().text == s;
    }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg + " near '" + cur().text + "' in " + path_, cur().line, cur().col);
    }
    void expect_punct(std::string_view s) {
        if (!at_punct(s)) fail("expected '" + std::string(s) + "'");
        advance();
    }
    std::string expect_ident() {
        if (cur().kind != TokenKind::identifier) fail("expected identifier");
        std::string name = cur().text;
        advance();
        return name;
    }

    // ---- leading trivia ----------------------------------------------------

    void skip_header() {
        if (at_keyword("package")) {
            while (!at_punct(";") && !at(TokenKind::end)) advance();
            if (at_punct(";")) advance();
        }
        while (at_keyword("import")) {
            while (!at_punct(";") && !at(TokenKind::end)) advance();
            if (at_punct(";")) advance();
        }
    }

    /// Marks and skips one annotation use: @Name, @a.b.Name, @Name(...).
    void skip_annotation() {
        toks_[pos_].annotation = true;
        advance();  // '@'
        while (cur().kind == TokenKind::identifier) {
            toks_[pos_].annotation = true;
            advance();
            if (at_punct(".")) {
                toks_[pos_].annotation = true;
                advance();
                continue;
            }
            break;
        }
        if (at_punct("(")) {
            int depth = 0;
            do {
                if (at_punct("(")) ++depth;
                if (at_punct(")")) --depth;
                toks_[pos_].annotation = true;
                advance();
            } while (depth > 0 && !at(TokenKind::end));
        }
    }

    void skip_annotations() {
        while (at_punct("@") && !la(1).text.empty() && la(1).kind == TokenKind::identifier)
            skip_annotation();
    }

    // ---- types -------------------------------------------------------------

    /// Balanced scan of generic arguments starting just after '<'. Returns one
    /// past the closing token, or 0 when the tokens cannot be type arguments.
    std::size_t scan_generic_args(std::size_t i, std::vector<std::string>* uppercase) const {
        int depth = 1;
        while (depth > 0) {
            const Token& t = toks_[i];
            if (t.kind == TokenKind::end) return 0;
            if (t.kind == TokenKind::punct) {
                if (t.text == "<") {
                    ++depth;
                } else if (t.text == ">") {
                    --depth;
                } else if (t.text == ">>") {
                    if (depth < 2) return 0;
                    depth -= 2;
                } else if (t.text == ">>>") {
                    if (depth < 3) return 0;
                    depth -= 3;
                } else if (t.text == "," || t.text == "." || t.text == "?" || t.text == "[" ||
                           t.text == "]" || t.text == "&" || t.text == "@") {
                    // fine
                } else {
                    return 0;
                }
            } else if (t.kind == TokenKind::identifier) {
                if (uppercase && detail::is_upper_ident(t)) uppercase->push_back(t.text);
            } else if (t.kind == TokenKind::keyword) {
                if (t.text != "extends" && t.text != "super" && !detail::is_primitive_or_var(t))
                    return 0;
            } else {
                return 0;
            }
            ++i;
        }
        return i;
    }

    /// Speculative type scan from `from`; does not move the cursor or tag
    /// tokens.
    detail::TypeScan try_parse_type(std::size_t from) const {
        detail::TypeScan ts;
        std::size_t i = from;
        if (toks_[i].kind == TokenKind::punct && toks_[i].text == "@") return ts;
        if (detail::is_primitive_or_var(toks_[i])) {
            ts.last_simple = toks_[i].text;
            ++i;
        } else {
            while (true) {
                if (toks_[i].kind != TokenKind::identifier) return ts;
                if (detail::is_upper_ident(toks_[i])) ts.uppercase_names.push_back(toks_[i].text);
                ts.last_simple = toks_[i].text;
                ++i;
                if (toks_[i].kind == TokenKind::punct && toks_[i].text == "<") {
                    std::size_t g = scan_generic_args(i + 1, &ts.uppercase_names);
                    if (g == 0) return ts;
                    i = g;
                }
                if (toks_[i].kind == TokenKind::punct && toks_[i].text == "." &&
                    toks_[i + 1].kind == TokenKind::identifier) {
                    ++i;
                    continue;
                }
                break;
            }
        }
        while (toks_[i].kind == TokenKind::punct && toks_[i].text == "[" &&
               toks_[i + 1].kind == TokenKind::punct && toks_[i + 1].text == "]") {
            i += 2;
        }
        ts.ok = true;
        ts.end = i;
        ts.text = detail::join_type_tokens(toks_, from, i);
        return ts;
    }

    /// Advances over a successfully scanned type, tagging its tokens and
    /// recording referenced type names.
    void commit_type(const detail::TypeScan& ts) {
        for (std::size_t i = pos_; i < ts.end; ++i) toks_[i].type_ctx = true;
        record_type_names(ts);
        pos_ = ts.end;
    }

    void record_type_names(const detail::TypeScan& ts) {
        for (const auto& n : ts.uppercase_names) {
            if (class_types_) class_types_->insert(n);
            if (member_types_) member_types_->insert(n);
        }
    }

    detail::TypeScan parse_type_or_fail(const char* what) {
        detail::TypeScan ts = try_parse_type(pos_);
        if (!ts.ok) fail(std::string("expected ") + what);
        commit_type(ts);
        return ts;
    }

    // ---- type declarations ---------------------------------------------------

    struct DeclMods {
        Visibility visibility = Visibility::package_v;
        Modifiers mods;
    };

    DeclMods parse_modifiers() {
        DeclMods dm;
        while (true) {
            skip_annotations();
            if (at_keyword("public")) dm.visibility = Visibility::public_v;
            else if (at_keyword("private")) dm.visibility = Visibility::private_v;
            else if (at_keyword("protected")) dm.visibility = Visibility::protected_v;
            else if (at_keyword("static")) dm.mods.is_static = true;
            else if (at_keyword("final")) dm.mods.is_final = true;
            else if (at_keyword("synchronized")) dm.mods.is_synchronized = true;
            else if (at_keyword("abstract")) dm.mods.is_abstract = true;
            else if (at_keyword("native") || at_keyword("transient") || at_keyword("volatile") ||
                     at_keyword("strictfp") || at_keyword("default") || at_keyword("sealed"))
                ;  // accepted, not modeled
            else
                break;
            advance();
        }
        return dm;
    }

    bool at_type_decl_keyword() const {
        return at_keyword("class") || at_keyword("interface") || at_keyword("enum") ||
               at_keyword("record") ||
               (at_punct("@") && la(1).kind == TokenKind::keyword && la(1).text == "interface");
    }

    void parse_type_decl(const std::string& enclosing, bool is_inner,
                         std::vector<ClassModel>& sink) {
        parse_modifiers();
        if (!at_type_decl_keyword()) fail("expected type declaration");

        ClassModel cls;
        cls.is_inner = is_inner;
        cls.span_begin_line = cur().line;

        bool is_enum = at_keyword("enum");
        bool is_record = at_keyword("record");
        if (at_punct("@")) {  // @interface
            advance();
            cls.is_interface = true;
        } else {
            cls.is_interface = at_keyword("interface");
        }
        advance();  // class/interface/enum/record keyword

        cls.simple_name = expect_ident();
        cls.qualified_name = enclosing.empty() ? cls.simple_name : enclosing + "." + cls.simple_name;

        std::set<std::string>* saved_class_types = class_types_;
        class_types_ = &cls.referenced_type_names;

        if (at_punct("<")) {
            std::size_t g = scan_generic_args(pos_ + 1, nullptr);
            if (g == 0) fail("malformed type parameters");
            for (std::size_t i = pos_; i < g; ++i) toks_[i].type_ctx = true;
            pos_ = g;
        }

        std::vector<ClassModel> nested;

        if (is_record && at_punct("(")) {
            advance();
            while (!at_punct(")") && !at(TokenKind::end)) {
                skip_annotations();
                detail::TypeScan ts = try_parse_type(pos_);
                if (!ts.ok) fail("expected record component type");
                commit_type(ts);
                FieldModel f;
                f.type_text = ts.text;
                f.name = expect_ident();
                f.visibility = Visibility::private_v;
                f.modifiers.is_final = true;
                cls.fields.push_back(std::move(f));
                if (at_punct(",")) advance();
            }
            expect_punct(")");
        }

        if (at_keyword("extends")) {
            advance();
            detail::TypeScan ts = parse_type_or_fail("supertype");
            cls.extends_name = ts.last_simple;
            while (at_punct(",")) {  // interfaces may extend a list
                advance();
                parse_type_or_fail("supertype");
            }
        }
        if (at_keyword("implements")) {
            do {
                advance();
                parse_type_or_fail("interface type");
            } while (at_punct(","));
        }
        if (at_keyword("permits")) {
            do {
                advance();
                parse_type_or_fail("permitted type");
            } while (at_punct(","));
        }

        expect_punct("{");
        std::size_t open_brace = pos_ - 1;

        if (is_enum) parse_enum_constants(cls);

        while (!at_punct("}") && !at(TokenKind::end)) {
            parse_member(cls, nested);
        }
        if (!at_punct("}")) fail("unterminated class body");
        std::size_t close_brace = pos_;
        advance();

        cls.span_end_line = toks_[close_brace].line;
        // Token slice covers the declaration (walking back to the first token
        // on the declaration line picks up same-line modifiers).
        std::size_t first = open_brace;
        while (first > 0 && toks_[first - 1].line >= cls.span_begin_line) --first;
        cls.tokens.assign(toks_.begin() + static_cast<std::ptrdiff_t>(first),
                          toks_.begin() + static_cast<std::ptrdiff_t>(close_brace) + 1);
        cls.body_token_offset = open_brace - first;

        class_types_ = saved_class_types;
        sink.push_back(std::move(cls));
        for (auto& n : nested) sink.push_back(std::move(n));
    }

    void parse_enum_constants(ClassModel& cls) {
        InitializerInfo bucket;
        bucket.body.kind = StatementKind::block;
        bucket.body.nesting_depth = 0;
        std::size_t start = pos_;
        bool any = false;
        {
            PushCtx ctx(*this, bucket, nullptr);
            while (cur().kind == TokenKind::identifier || at_punct("@")) {
                skip_annotations();
                if (cur().kind != TokenKind::identifier) break;
                any = true;
                advance();  // constant name
                if (at_punct("(")) {
                    advance();
                    scan_arguments(bucket.body, 1);
                }
                if (at_punct("{")) {
                    Statement anon;
                    anon.kind = StatementKind::anon_class_body;
                    anon.nesting_depth = 1;
                    anon.canonical_text = "enum-constant-body";
                    extras_->anon_class_count += 1;
                    parse_anon_class_body(anon);
                    bucket.body.children.push_back(std::move(anon));
                }
                if (at_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
            if (at_punct(";")) advance();
        }
        if (any) {
            bucket.tokens.assign(toks_.begin() + static_cast<std::ptrdiff_t>(start),
                                 toks_.begin() + static_cast<std::ptrdiff_t>(pos_));
            cls.initializers.push_back(std::move(bucket));
        }
    }

    /// RAII: points the collection targets at a method body or initializer.
    struct PushCtx {
        Parser& p;
        std::set<std::string>* saved_member_types;
        std::vector<InvocationRecord>* saved_invocations;
        BodyExtras* saved_extras;
        std::set<std::string>* saved_locals;
        std::set<std::string> scratch_locals;

        PushCtx(Parser& parser, InitializerInfo& init, std::set<std::string>* /*unused*/)
            : p(parser),
              saved_member_types(parser.member_types_),
              saved_invocations(parser.invocations_),
              saved_extras(parser.extras_),
              saved_locals(parser.locals_) {
            p.member_types_ = nullptr;
            p.invocations_ = &init.invocations;
            p.extras_ = &init.extras;
            p.locals_ = &scratch_locals;
        }
        PushCtx(Parser& parser, MethodModel& m)
            : p(parser),
              saved_member_types(parser.member_types_),
              saved_invocations(parser.invocations_),
              saved_extras(parser.extras_),
              saved_locals(parser.locals_) {
            p.member_types_ = &m.referenced_type_names;
            p.invocations_ = &m.invocations;
            p.extras_ = &m.extras;
            p.locals_ = &m.declared_local_names;
        }
        ~PushCtx() {
            p.member_types_ = saved_member_types;
            p.invocations_ = saved_invocations;
            p.extras_ = saved_extras;
            p.locals_ = saved_locals;
        }
    };

    void parse_member(ClassModel& cls, std::vector<ClassModel>& nested) {
        if (at_punct(";")) {
            advance();
            return;
        }
        skip_annotations();
        std::size_t member_start = pos_;
        int member_line = cur().line;

        // Initializer blocks.
        if (at_punct("{") || (at_keyword("static") && la(1).kind == TokenKind::punct && la(1).text == "{")) {
            if (at_keyword("static")) advance();
            InitializerInfo init;
            init.body.kind = StatementKind::block;
            init.body.nesting_depth = 0;
            std::size_t open = pos_;
            {
                PushCtx ctx(*this, init, nullptr);
                advance();  // '{'
                parse_block_children(init.body, 1);
                expect_punct("}");
            }
            init.tokens.assign(toks_.begin() + static_cast<std::ptrdiff_t>(open),
                               toks_.begin() + static_cast<std::ptrdiff_t>(pos_));
            cls.initializers.push_back(std::move(init));
            return;
        }

        DeclMods dm = parse_modifiers();

        if (at_type_decl_keyword()) {
            parse_type_decl(cls.qualified_name, true, nested);
            return;
        }

        if (at_punct("<")) {  // generic method type parameters
            std::size_t g = scan_generic_args(pos_ + 1, nullptr);
            if (g == 0) fail("malformed method type parameters");
            for (std::size_t i = pos_; i < g; ++i) toks_[i].type_ctx = true;
            pos_ = g;
        }

        // Constructor (incl. record compact form).
        if (cur().kind == TokenKind::identifier && cur().text == cls.simple_name &&
            la(1).kind == TokenKind::punct && (la(1).text == "(" || la(1).text == "{")) {
            MethodModel m;
            m.is_constructor = true;
            m.name = cls.simple_name;
            m.visibility = dm.visibility;
            m.modifiers = dm.mods;
            m.span_begin_line = member_line;
            advance();  // name
            parse_method_rest(cls, m, member_start, member_line);
            return;
        }

        detail::TypeScan ts = try_parse_type(pos_);
        if (!ts.ok) fail("expected member declaration");
        commit_type(ts);

        if (cur().kind != TokenKind::identifier) fail("expected member name");
        std::string name = cur().text;

        if (la(1).kind == TokenKind::punct && la(1).text == "(") {
            MethodModel m;
            m.name = name;
            m.return_type_text = ts.text;
            m.visibility = dm.visibility;
            m.modifiers = dm.mods;
            m.span_begin_line = member_line;
            for (const auto& n : ts.uppercase_names) m.referenced_type_names.insert(n);
            advance();  // name
            parse_method_rest(cls, m, member_start, member_line);
            return;
        }

        // Field declarators. Initializer expressions are collected into one
        // bucket so their counts reach the class-level metrics.
        InitializerInfo bucket;
        bucket.body.kind = StatementKind::block;
        bucket.body.nesting_depth = 0;
        bool has_initializer = false;
        {
            PushCtx ctx(*this, bucket, nullptr);
            while (true) {
                FieldModel f;
                f.name = expect_ident();
                f.type_text = ts.text;
                f.visibility = dm.visibility;
                f.modifiers = dm.mods;
                while (at_punct("[") && la(1).kind == TokenKind::punct && la(1).text == "]") {
                    toks_[pos_].type_ctx = true;
                    toks_[pos_ + 1].type_ctx = true;
                    advance();
                    advance();
                }
                cls.fields.push_back(std::move(f));
                if (at_punct("=")) {
                    advance();
                    has_initializer = true;
                    std::size_t expr_start = pos_;
                    scan_expression(bucket.body, 1, true);
                    bucket.tokens.insert(bucket.tokens.end(),
                                         toks_.begin() + static_cast<std::ptrdiff_t>(expr_start),
                                         toks_.begin() + static_cast<std::ptrdiff_t>(pos_));
                }
                if (at_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
            expect_punct(";");
        }
        if (has_initializer) cls.initializers.push_back(std::move(bucket));
    }

    void parse_method_rest(ClassModel& cls, MethodModel m, std::size_t member_start,
                           int member_line) {
        PushCtx ctx(*this, m);

        if (at_punct("(")) {
            advance();
            while (!at_punct(")") && !at(TokenKind::end)) {
                skip_annotations();
                if (at_keyword("final")) advance();
                skip_annotations();
                detail::TypeScan pts = try_parse_type(pos_);
                if (!pts.ok) fail("expected parameter type");
                commit_type(pts);
                std::string ptype = pts.text;
                if (at_punct("...")) {
                    toks_[pos_].type_ctx = true;
                    ptype += "...";
                    advance();
                }
                std::string pname = expect_ident();
                while (at_punct("[") && la(1).kind == TokenKind::punct && la(1).text == "]") {
                    ptype += "[]";
                    toks_[pos_].type_ctx = true;
                    toks_[pos_ + 1].type_ctx = true;
                    advance();
                    advance();
                }
                m.parameter_types.push_back(ptype);
                m.parameter_names.push_back(pname);
                if (at_punct(",")) advance();
            }
            expect_punct(")");
        }

        if (at_keyword("throws")) {
            do {
                advance();
                parse_type_or_fail("exception type");
            } while (at_punct(","));
        }

        // Annotation-member default value: `int value() default 3;`
        if (at_keyword("default")) {
            toks_[pos_].annotation = true;
            advance();
            while (!at_punct(";") && !at(TokenKind::end)) {
                toks_[pos_].annotation = true;
                advance();
            }
        }

        m.signature = m.name + "(";
        for (std::size_t i = 0; i < m.parameter_types.size(); ++i) {
            if (i) m.signature += ",";
            m.signature += m.parameter_types[i];
        }
        m.signature += ")";

        m.body.kind = StatementKind::block;
        m.body.nesting_depth = 0;

        if (at_punct("{")) {
            m.has_body = true;
            std::size_t open = pos_;
            advance();
            parse_block_children(m.body, 1);
            if (!at_punct("}")) fail("unterminated method body");
            std::size_t close = pos_;
            advance();
            m.raw_body_text = std::string(
                source_.substr(toks_[open].offset,
                               toks_[close].offset + toks_[close].text.size() - toks_[open].offset));
            m.span_end_line = toks_[close].line;
            m.tokens.assign(toks_.begin() + static_cast<std::ptrdiff_t>(member_start),
                            toks_.begin() + static_cast<std::ptrdiff_t>(close) + 1);
            m.body_token_offset = open - member_start;
        } else {
            expect_punct(";");
            m.span_end_line = toks_[pos_ - 1].line;
            m.tokens.assign(toks_.begin() + static_cast<std::ptrdiff_t>(member_start),
                            toks_.begin() + static_cast<std::ptrdiff_t>(pos_));
            m.body_token_offset = m.tokens.size();
        }
        m.span_begin_line = member_line;
        cls.methods.push_back(std::move(m));
    }

    // ---- statements ----------------------------------------------------------

    void parse_block_children(Statement& parent, int depth) {
        while (!at_punct("}") && !at(TokenKind::end)) {
            parse_statement(parent.children, depth);
        }
    }

    /// Parses the body of a control structure; braces are absorbed so depth is
    /// insensitive to brace style.
    void parse_controlled_body(Statement& owner, int depth) {
        if (at_punct("{")) {
            advance();
            parse_block_children(owner, depth);
            expect_punct("}");
        } else if (at_punct(";")) {
            advance();
        } else {
            parse_statement(owner.children, depth);
        }
    }

    struct Scanned {
        std::vector<std::string> texts;
        bool top_level_assignment = false;
    };

    static bool is_assignment_op(const std::string& s) {
        static const std::set<std::string> ops = {"=",  "+=", "-=",  "*=",  "/=",  "%=",
                                                  "&=", "|=", "^=", "<<=", ">>=", ">>>="};
        return ops.count(s) != 0;
    }

    void parse_statement(std::vector<Statement>& out, int depth) {
        skip_annotations();

        if (at_punct(";")) {  // empty statement
            advance();
            return;
        }

        if (at_punct("{")) {
            Statement blk;
            blk.kind = StatementKind::block;
            blk.nesting_depth = depth;
            blk.canonical_text = "{}";
            advance();
            parse_block_children(blk, depth + 1);
            expect_punct("}");
            out.push_back(std::move(blk));
            return;
        }

        if (at_keyword("if")) {
            Statement node;
            node.kind = StatementKind::if_stmt;
            node.nesting_depth = depth;
            advance();
            expect_punct("(");
            Scanned cond = scan_paren_contents(node, depth + 1);
            node.canonical_text = "if (" + render_tokens(cond.texts) + ")";
            parse_controlled_body(node, depth + 1);
            out.push_back(std::move(node));
            if (at_keyword("else")) {
                Statement els;
                els.kind = StatementKind::else_branch;
                els.nesting_depth = depth;
                els.canonical_text = "else";
                advance();
                parse_controlled_body(els, depth + 1);
                out.push_back(std::move(els));
            }
            return;
        }

        if (at_keyword("while")) {
            Statement node;
            node.kind = StatementKind::while_loop;
            node.nesting_depth = depth;
            advance();
            expect_punct("(");
            Scanned cond = scan_paren_contents(node, depth + 1);
            node.canonical_text = "while (" + render_tokens(cond.texts) + ")";
            parse_controlled_body(node, depth + 1);
            out.push_back(std::move(node));
            return;
        }

        if (at_keyword("do")) {
            Statement node;
            node.kind = StatementKind::do_loop;
            node.nesting_depth = depth;
            advance();
            parse_controlled_body(node, depth + 1);
            if (!at_keyword("while")) fail("expected 'while' after do body");
            advance();
            expect_punct("(");
            Scanned cond = scan_paren_contents(node, depth + 1);
            if (at_punct(";")) advance();
            node.canonical_text = "do while (" + render_tokens(cond.texts) + ")";
            out.push_back(std::move(node));
            return;
        }

        if (at_keyword("for")) {
            Statement node;
            node.kind = StatementKind::for_loop;
            node.nesting_depth = depth;
            advance();
            expect_punct("(");
            std::vector<std::string> header = scan_for_header(node, depth + 1);
            node.canonical_text = "for (" + render_tokens(header) + ")";
            parse_controlled_body(node, depth + 1);
            out.push_back(std::move(node));
            return;
        }

        if (at_keyword("switch")) {
            Statement node;
            node.kind = StatementKind::block;
            node.nesting_depth = depth;
            advance();
            expect_punct("(");
            Scanned sel = scan_paren_contents(node, depth + 1);
            node.canonical_text = "switch (" + render_tokens(sel.texts) + ")";
            expect_punct("{");
            parse_switch_body(node, depth + 1);
            expect_punct("}");
            out.push_back(std::move(node));
            return;
        }

        if (at_keyword("try")) {
            Statement node;
            node.kind = StatementKind::try_stmt;
            node.nesting_depth = depth;
            advance();
            std::vector<std::string> res_texts;
            if (at_punct("(")) {  // resources
                advance();
                while (!at_punct(")") && !at(TokenKind::end)) {
                    if (!res_texts.empty()) res_texts.push_back(";");
                    scan_resource(node, depth + 1, res_texts);
                    if (at_punct(";")) advance();
                }
                expect_punct(")");
            }
            node.canonical_text =
                res_texts.empty() ? "try" : "try (" + render_tokens(res_texts) + ")";
            expect_punct("{");
            parse_block_children(node, depth + 1);
            expect_punct("}");
            out.push_back(std::move(node));
            while (at_keyword("catch")) {
                Statement cat;
                cat.kind = StatementKind::catch_clause;
                cat.nesting_depth = depth;
                advance();
                expect_punct("(");
                std::vector<std::string> texts;
                skip_annotations();
                if (at_keyword("final")) advance();
                while (true) {
                    detail::TypeScan cts = try_parse_type(pos_);
                    if (!cts.ok) fail("expected exception type in catch");
                    texts.push_back(cts.text);
                    commit_type(cts);
                    if (at_punct("|")) {
                        texts.push_back("|");
                        advance();
                        continue;
                    }
                    break;
                }
                std::string ename = expect_ident();
                texts.push_back(ename);
                if (locals_) locals_->insert(ename);
                expect_punct(")");
                cat.canonical_text = "catch (" + render_tokens(texts) + ")";
                expect_punct("{");
                parse_block_children(cat, depth + 1);
                expect_punct("}");
                out.push_back(std::move(cat));
            }
            if (at_keyword("finally")) {
                Statement fin;
                fin.kind = StatementKind::finally_clause;
                fin.nesting_depth = depth;
                fin.canonical_text = "finally";
                advance();
                expect_punct("{");
                parse_block_children(fin, depth + 1);
                expect_punct("}");
                out.push_back(std::move(fin));
            }
            return;
        }

        if (at_keyword("return")) {
            Statement node;
            node.kind = StatementKind::return_stmt;
            node.nesting_depth = depth;
            advance();
            Scanned sc = scan_expression(node, depth + 1, false);
            std::vector<std::string> texts;
            texts.push_back("return");
            for (auto& t : sc.texts) texts.push_back(std::move(t));
            texts.push_back(";");
            node.canonical_text = render_tokens(texts);
            expect_punct(";");
            out.push_back(std::move(node));
            return;
        }

        if (at_keyword("synchronized") && la(1).kind == TokenKind::punct && la(1).text == "(") {
            Statement node;
            node.kind = StatementKind::block;
            node.nesting_depth = depth;
            advance();
            expect_punct("(");
            Scanned lock = scan_paren_contents(node, depth + 1);
            node.canonical_text = "synchronized (" + render_tokens(lock.texts) + ")";
            expect_punct("{");
            parse_block_children(node, depth + 1);
            expect_punct("}");
            out.push_back(std::move(node));
            return;
        }

        if (at_keyword("throw") || at_keyword("break") || at_keyword("continue") ||
            at_keyword("assert") || at_keyword("yield")) {
            Statement node;
            node.kind = StatementKind::expression;
            node.nesting_depth = depth;
            std::vector<std::string> texts;
            texts.push_back(cur().text);
            advance();
            Scanned sc = scan_expression(node, depth + 1, false);
            for (auto& t : sc.texts) texts.push_back(std::move(t));
            texts.push_back(";");
            node.canonical_text = render_tokens(texts);
            if (at_punct(";")) advance();
            out.push_back(std::move(node));
            return;
        }

        // Local class declaration.
        if (at_keyword("class") || at_keyword("interface") || at_keyword("enum") ||
            ((at_keyword("final") || at_keyword("abstract") || at_keyword("static")) &&
             la(1).kind == TokenKind::keyword &&
             (la(1).text == "class" || la(1).text == "interface" || la(1).text == "enum"))) {
            parse_local_class(out, depth);
            return;
        }

        // Label.
        if (cur().kind == TokenKind::identifier && la(1).kind == TokenKind::punct &&
            la(1).text == ":") {
            advance();
            advance();
            parse_statement(out, depth);
            return;
        }

        // Local variable declaration?
        detail::TypeScan ts = try_parse_type(pos_);
        if (ts.ok && toks_[ts.end].kind == TokenKind::identifier) {
            const Token& after = toks_[std::min(ts.end + 1, toks_.size() - 1)];
            bool decl_shape = after.kind == TokenKind::punct &&
                              (after.text == "=" || after.text == ";" || after.text == "," ||
                               after.text == "[" || after.text == ":");
            if (decl_shape && after.text != ":") {
                Statement node;
                node.kind = StatementKind::declaration;
                node.nesting_depth = depth;
                commit_type(ts);
                std::vector<std::string> texts;
                texts.push_back(ts.text);
                while (true) {
                    std::string name = expect_ident();
                    texts.push_back(name);
                    if (locals_) locals_->insert(name);
                    if (extras_) extras_->declared_variable_count += 1;
                    while (at_punct("[") && la(1).kind == TokenKind::punct && la(1).text == "]") {
                        texts.push_back("[");
                        texts.push_back("]");
                        toks_[pos_].type_ctx = true;
                        toks_[pos_ + 1].type_ctx = true;
                        advance();
                        advance();
                    }
                    if (at_punct("=")) {
                        texts.push_back("=");
                        advance();
                        Scanned init = scan_expression(node, depth + 1, true);
                        for (auto& t : init.texts) texts.push_back(std::move(t));
                    }
                    if (at_punct(",")) {
                        texts.push_back(",");
                        advance();
                        continue;
                    }
                    break;
                }
                texts.push_back(";");
                expect_punct(";");
                node.canonical_text = render_tokens(texts);
                out.push_back(std::move(node));
                return;
            }
        }

        // Expression statement.
        Statement node;
        node.nesting_depth = depth;
        Scanned sc = scan_expression(node, depth + 1, false);
        if (sc.texts.empty()) fail("expected statement");
        node.kind = sc.top_level_assignment ? StatementKind::assignment : StatementKind::expression;
        sc.texts.push_back(";");
        node.canonical_text = render_tokens(sc.texts);
        expect_punct(";");
        out.push_back(std::move(node));
    }

    void parse_local_class(std::vector<Statement>& out, int depth) {
        if (extras_) extras_->local_class_count += 1;
        while (at_keyword("final") || at_keyword("abstract") || at_keyword("static")) advance();
        advance();  // class/interface/enum
        std::string name = expect_ident();
        Statement node;
        node.kind = StatementKind::declaration;
        node.nesting_depth = depth;
        node.canonical_text = "class " + name;
        if (at_punct("<")) {
            std::size_t g = scan_generic_args(pos_ + 1, nullptr);
            if (g == 0) fail("malformed type parameters");
            for (std::size_t i = pos_; i < g; ++i) toks_[i].type_ctx = true;
            pos_ = g;
        }
        if (at_keyword("extends")) {
            advance();
            parse_type_or_fail("supertype");
        }
        if (at_keyword("implements")) {
            do {
                advance();
                parse_type_or_fail("interface type");
            } while (at_punct(","));
        }
        expect_punct("{");
        parse_anon_body_members(node, depth + 1);
        expect_punct("}");
        out.push_back(std::move(node));
    }

    void parse_switch_body(Statement& switch_node, int depth) {
        while (!at_punct("}") && !at(TokenKind::end)) {
            if (at_keyword("case") || at_keyword("default")) {
                Statement case_node;
                case_node.kind = StatementKind::switch_case;
                case_node.nesting_depth = depth;
                case_node.is_case_label = at_keyword("case");
                std::vector<std::string> texts;
                texts.push_back(cur().text);
                advance();
                if (case_node.is_case_label) {
                    // Labels up to ':' or '->'.
                    while (!at_punct(":") && !at_punct("->") && !at(TokenKind::end)) {
                        texts.push_back(cur().text);
                        advance();
                    }
                }
                texts.push_back(":");
                bool arrow = at_punct("->");
                if (at_punct(":") || at_punct("->")) advance();
                case_node.canonical_text = render_tokens(texts);
                if (arrow) {
                    parse_controlled_body(case_node, depth + 1);
                } else {
                    while (!at_keyword("case") && !at_keyword("default") && !at_punct("}") &&
                           !at(TokenKind::end)) {
                        parse_statement(case_node.children, depth + 1);
                    }
                }
                switch_node.children.push_back(std::move(case_node));
            } else {
                parse_statement(switch_node.children, depth);
            }
        }
    }

    std::vector<std::string> scan_for_header(Statement& owner, int child_depth) {
        std::vector<std::string> texts;
        // init part: declaration | expression-list | empty
        detail::TypeScan ts = try_parse_type(pos_);
        bool enhanced = false;
        if (ts.ok && toks_[ts.end].kind == TokenKind::identifier) {
            const Token& after = toks_[std::min(ts.end + 1, toks_.size() - 1)];
            if (after.kind == TokenKind::punct &&
                (after.text == ":" || after.text == "=" || after.text == "," ||
                 after.text == ";")) {
                commit_type(ts);
                texts.push_back(ts.text);
                std::string name = expect_ident();
                texts.push_back(name);
                if (locals_) locals_->insert(name);
                if (extras_) extras_->declared_variable_count += 1;
                if (at_punct(":")) {
                    enhanced = true;
                    texts.push_back(":");
                    advance();
                    Scanned iter = scan_paren_tail(owner, child_depth, texts);
                    (void)iter;
                    return texts;
                }
                while (!at_punct(";") && !at(TokenKind::end)) {
                    if (at_punct("=")) {
                        texts.push_back("=");
                        advance();
                        Scanned init = scan_expression(owner, child_depth, true);
                        for (auto& t : init.texts) texts.push_back(std::move(t));
                    } else if (at_punct(",")) {
                        texts.push_back(",");
                        advance();
                        std::string n2 = expect_ident();
                        texts.push_back(n2);
                        if (locals_) locals_->insert(n2);
                        if (extras_) extras_->declared_variable_count += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        if (!enhanced) {
            // Remaining: [init-exprs] ';' cond ';' update, then ')'.
            while (!at_punct(";") && !at_punct(")") && !at(TokenKind::end)) {
                Scanned sc = scan_expression(owner, child_depth, true);
                for (auto& t : sc.texts) texts.push_back(std::move(t));
                if (at_punct(",")) {
                    texts.push_back(",");
                    advance();
                }
            }
            if (at_punct(")")) {  // degenerate
                advance();
                return texts;
            }
            texts.push_back(";");
            expect_punct(";");
            Scanned cond = scan_expression(owner, child_depth, false);
            for (auto& t : cond.texts) texts.push_back(std::move(t));
            texts.push_back(";");
            expect_punct(";");
            while (!at_punct(")") && !at(TokenKind::end)) {
                Scanned upd = scan_expression(owner, child_depth, true);
                for (auto& t : upd.texts) texts.push_back(std::move(t));
                if (at_punct(",")) {
                    texts.push_back(",");
                    advance();
                }
            }
            expect_punct(")");
        }
        return texts;
    }

    /// Scans the remainder of a parenthesized region (after the opening '('
    /// was consumed by the caller), appending to `texts`; consumes ')'.
    Scanned scan_paren_tail(Statement& owner, int child_depth, std::vector<std::string>& texts) {
        Scanned sc = scan_expression(owner, child_depth, false);
        for (auto& t : sc.texts) texts.push_back(std::move(t));
        expect_punct(")");
        return sc;
    }

    Scanned scan_paren_contents(Statement& owner, int child_depth) {
        Scanned sc = scan_expression(owner, child_depth, false);
        expect_punct(")");
        return sc;
    }

    void scan_resource(Statement& owner, int child_depth, std::vector<std::string>& texts) {
        detail::TypeScan ts = try_parse_type(pos_);
        if (ts.ok && toks_[ts.end].kind == TokenKind::identifier &&
            toks_[ts.end + 1].kind == TokenKind::punct && toks_[ts.end + 1].text == "=") {
            commit_type(ts);
            texts.push_back(ts.text);
            std::string name = expect_ident();
            texts.push_back(name);
            if (locals_) locals_->insert(name);
            if (extras_) extras_->declared_variable_count += 1;
            texts.push_back("=");
            expect_punct("=");
        }
        Scanned sc = scan_expression(owner, child_depth, false);
        for (auto& t : sc.texts) texts.push_back(std::move(t));
    }

    /// Counts arguments of a call whose '(' has been consumed; consumes ')'.
    int scan_arguments(Statement& owner, int child_depth) {
        if (at_punct(")")) {
            advance();
            return 0;
        }
        int count = 0;
        while (!at(TokenKind::end)) {
            Scanned sc = scan_expression(owner, child_depth, true);
            (void)sc;
            ++count;
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(")");
        return count;
    }

    /// Same as scan_arguments but records the rendered texts.
    int scan_arguments_texts(Statement& owner, int child_depth, std::vector<std::string>& texts) {
        texts.push_back("(");
        if (at_punct(")")) {
            texts.push_back(")");
            advance();
            return 0;
        }
        int count = 0;
        while (!at(TokenKind::end)) {
            Scanned sc = scan_expression(owner, child_depth, true);
            for (auto& t : sc.texts) texts.push_back(std::move(t));
            ++count;
            if (at_punct(",")) {
                texts.push_back(",");
                advance();
                continue;
            }
            break;
        }
        texts.push_back(")");
        expect_punct(")");
        return count;
    }

    static std::string receiver_from_texts(const std::vector<std::string>& texts,
                                           std::size_t callee_index) {
        // texts[callee_index] is the callee; walk back over `ident . ident ...`.
        if (callee_index == 0) return "";
        std::size_t i = callee_index;
        std::vector<std::string> parts;
        while (i >= 2 && texts[i - 1] == ".") {
            const std::string& prev = texts[i - 2];
            bool wordish = !prev.empty() && (std::isalnum(static_cast<unsigned char>(prev[0])) ||
                                             prev[0] == '_' || prev[0] == '$');
            if (!wordish) return "";  // receiver is a computed expression
            parts.push_back(prev);
            i -= 2;
        }
        if (parts.empty()) return "";
        std::string out;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
            if (!out.empty()) out += ".";
            out += *it;
        }
        return out;
    }

    /// The expression scanner. Stops (without consuming) at ';', at a
    /// closing ')' ']' '}' belonging to the caller, and optionally at ','.
    /// Nested groups are consumed by recursion, so any closer seen here ends
    /// the scan.
    Scanned scan_expression(Statement& owner, int child_depth, bool stop_at_comma) {
        Scanned sc;
        while (!at(TokenKind::end)) {
            const Token& t = cur();
            if (t.kind == TokenKind::punct) {
                const std::string& s = t.text;
                if (s == ";") break;
                if (s == ")" || s == "]" || s == "}") break;
                if (stop_at_comma && s == ",") break;

                if (s == "(") {
                    // Lambda parameter list?
                    std::size_t close = find_matching_paren(pos_);
                    if (close != 0 && toks_[close + 1].kind == TokenKind::punct &&
                        toks_[close + 1].text == "->") {
                        scan_lambda_params(sc.texts);
                        continue;
                    }
                    bool prev_is_callable = !sc.texts.empty() && is_wordish(sc.texts.back()) &&
                                            !java_keywords().count(sc.texts.back());
                    if (prev_is_callable) {
                        // Method invocation.
                        std::size_t callee_index = sc.texts.size() - 1;
                        std::string callee = sc.texts.back();
                        std::string receiver = receiver_from_texts(sc.texts, callee_index);
                        advance();  // '('
                        int argc = scan_arguments_texts(owner, child_depth, sc.texts);
                        if (invocations_) invocations_->push_back({receiver, callee, argc});
                        continue;
                    }
                    // Cast?
                    detail::TypeScan cts = try_parse_type(pos_ + 1);
                    if (cts.ok && toks_[cts.end].kind == TokenKind::punct &&
                        toks_[cts.end].text == ")" && starts_operand(toks_[cts.end + 1])) {
                        advance();  // '('
                        commit_type(cts);
                        advance();  // ')'
                        sc.texts.push_back("(");
                        sc.texts.push_back(cts.text);
                        sc.texts.push_back(")");
                        continue;
                    }
                    // Parenthesized expression.
                    if (extras_) extras_->parenthesized_expr_count += 1;
                    sc.texts.push_back("(");
                    advance();
                    Scanned inner = scan_expression(owner, child_depth, false);
                    for (auto& x : inner.texts) sc.texts.push_back(std::move(x));
                    sc.texts.push_back(")");
                    expect_punct(")");
                    continue;
                }
                if (s == "[") {
                    sc.texts.push_back("[");
                    advance();
                    Scanned inner = scan_expression(owner, child_depth, false);
                    for (auto& x : inner.texts) sc.texts.push_back(std::move(x));
                    sc.texts.push_back("]");
                    expect_punct("]");
                    continue;
                }
                if (s == "{") {
                    // Array initializer.
                    sc.texts.push_back("{");
                    advance();
                    while (!at_punct("}") && !at(TokenKind::end)) {
                        Scanned inner = scan_expression(owner, child_depth, true);
                        for (auto& x : inner.texts) sc.texts.push_back(std::move(x));
                        if (at_punct(",")) {
                            sc.texts.push_back(",");
                            advance();
                        }
                    }
                    sc.texts.push_back("}");
                    expect_punct("}");
                    continue;
                }
                if (s == "->") {
                    if (extras_) extras_->lambda_count += 1;
                    // Single-identifier parameter becomes a local.
                    if (!sc.texts.empty() && is_wordish(sc.texts.back()) && locals_)
                        locals_->insert(sc.texts.back());
                    sc.texts.push_back("->");
                    advance();
                    if (at_punct("{")) {
                        Statement lam;
                        lam.kind = StatementKind::lambda_body;
                        lam.nesting_depth = child_depth;
                        lam.canonical_text = "->";
                        advance();
                        parse_block_children(lam, child_depth + 1);
                        expect_punct("}");
                        owner.children.push_back(std::move(lam));
                        sc.texts.push_back("{}");
                    }
                    continue;
                }
                if (is_assignment_op(s)) sc.top_level_assignment = true;
                sc.texts.push_back(s);
                advance();
                continue;
            }

            if (t.kind == TokenKind::keyword) {
                if (t.text == "new") {
                    sc.texts.push_back("new");
                    advance();
                    detail::TypeScan nts = try_parse_type(pos_);
                    if (!nts.ok) fail("expected type after 'new'");
                    commit_type(nts);
                    sc.texts.push_back(nts.text);
                    if (at_punct("(")) {
                        advance();
                        scan_arguments_texts(owner, child_depth, sc.texts);
                        if (at_punct("{")) {
                            if (extras_) extras_->anon_class_count += 1;
                            Statement anon;
                            anon.kind = StatementKind::anon_class_body;
                            anon.nesting_depth = child_depth;
                            anon.canonical_text = "new " + nts.text + "() {}";
                            advance();
                            parse_anon_body_members(anon, child_depth + 1);
                            expect_punct("}");
                            owner.children.push_back(std::move(anon));
                            sc.texts.push_back("{}");
                        }
                    } else {
                        // Array creation: dims and optional initializer follow
                        // and are handled by the '[', '{' branches above.
                    }
                    continue;
                }
                if (t.text == "instanceof") {
                    sc.texts.push_back("instanceof");
                    advance();
                    detail::TypeScan its = try_parse_type(pos_);
                    if (its.ok) {
                        commit_type(its);
                        sc.texts.push_back(its.text);
                        if (cur().kind == TokenKind::identifier) {  // pattern variable
                            if (locals_) locals_->insert(cur().text);
                            if (extras_) extras_->declared_variable_count += 1;
                            sc.texts.push_back(cur().text);
                            advance();
                        }
                    }
                    continue;
                }
                sc.texts.push_back(t.text);
                advance();
                continue;
            }

            // identifier / literal
            sc.texts.push_back(t.text);
            advance();
        }
        return sc;
    }

    static bool is_wordish(const std::string& s) {
        return !s.empty() && (std::isalnum(static_cast<unsigned char>(s[0])) || s[0] == '_' ||
                              s[0] == '$' || static_cast<unsigned char>(s[0]) >= 0x80);
    }

    bool starts_operand(const Token& t) const {
        switch (t.kind) {
            case TokenKind::identifier:
            case TokenKind::number:
            case TokenKind::string_lit:
            case TokenKind::char_lit:
                return true;
            case TokenKind::keyword:
                return t.text == "new" || t.text == "this" || t.text == "super" ||
                       t.text == "true" || t.text == "false" || t.text == "null";
            case TokenKind::punct:
                return t.text == "(" || t.text == "!" || t.text == "~" || t.text == "-" ||
                       t.text == "+";
            default:
                return false;
        }
    }

    /// Index of the ')' matching the '(' at `open`, or 0 when unbalanced.
    std::size_t find_matching_paren(std::size_t open) const {
        int depth = 0;
        for (std::size_t i = open; i < toks_.size(); ++i) {
            const Token& t = toks_[i];
            if (t.kind == TokenKind::end) return 0;
            if (t.kind != TokenKind::punct) continue;
            if (t.text == "(") ++depth;
            else if (t.text == ")") {
                --depth;
                if (depth == 0) return i;
            } else if (t.text == ";" || t.text == "{" || t.text == "}") {
                return 0;  // lambda parameter lists never contain these
            }
        }
        return 0;
    }

    void scan_lambda_params(std::vector<std::string>& texts) {
        texts.push_back("(");
        advance();  // '('
        while (!at_punct(")") && !at(TokenKind::end)) {
            std::size_t before = pos_;
            skip_annotations();
            if (at_keyword("final")) advance();
            detail::TypeScan ts = try_parse_type(pos_);
            if (ts.ok && toks_[ts.end].kind == TokenKind::identifier) {
                commit_type(ts);
                texts.push_back(ts.text);
            }
            if (cur().kind == TokenKind::identifier) {
                if (locals_) locals_->insert(cur().text);
                texts.push_back(cur().text);
                advance();
            }
            if (at_punct(",")) {
                texts.push_back(",");
                advance();
            }
            if (pos_ == before) {  // unrecognized token, keep moving
                texts.push_back(cur().text);
                advance();
            }
        }
        texts.push_back(")");
        expect_punct(")");
    }

    /// Members of an anonymous class or a local class: method bodies flatten
    /// into `node`'s children, fields become declaration nodes.
    void parse_anon_body_members(Statement& node, int depth) {
        while (!at_punct("}") && !at(TokenKind::end)) {
            if (at_punct(";")) {
                advance();
                continue;
            }
            skip_annotations();
            if (at_punct("{") ||
                (at_keyword("static") && la(1).kind == TokenKind::punct && la(1).text == "{")) {
                if (at_keyword("static")) advance();
                Statement blk;
                blk.kind = StatementKind::block;
                blk.nesting_depth = depth;
                blk.canonical_text = "{}";
                advance();
                parse_block_children(blk, depth + 1);
                expect_punct("}");
                node.children.push_back(std::move(blk));
                continue;
            }
            parse_modifiers();
            if (at_keyword("class") || at_keyword("interface") || at_keyword("enum")) {
                std::vector<Statement> tmp;
                parse_local_class(tmp, depth);
                for (auto& s : tmp) node.children.push_back(std::move(s));
                continue;
            }
            if (at_punct("<")) {
                std::size_t g = scan_generic_args(pos_ + 1, nullptr);
                if (g == 0) fail("malformed type parameters");
                for (std::size_t i = pos_; i < g; ++i) toks_[i].type_ctx = true;
                pos_ = g;
            }
            detail::TypeScan ts = try_parse_type(pos_);
            if (!ts.ok) fail("expected anonymous class member");
            // Constructor-like shapes cannot appear in anonymous classes, so a
            // '(' right after the first identifier means the scan consumed the
            // method name: re-scan conservatively.
            if (toks_[ts.end].kind == TokenKind::identifier &&
                toks_[ts.end + 1].kind == TokenKind::punct && toks_[ts.end + 1].text == "(") {
                commit_type(ts);
                std::string mname = expect_ident();
                advance();  // '('
                // Parameters.
                while (!at_punct(")") && !at(TokenKind::end)) {
                    skip_annotations();
                    if (at_keyword("final")) advance();
                    detail::TypeScan pts = try_parse_type(pos_);
                    if (!pts.ok) fail("expected parameter type");
                    commit_type(pts);
                    if (at_punct("...")) {
                        toks_[pos_].type_ctx = true;
                        advance();
                    }
                    std::string pname = expect_ident();
                    if (locals_) locals_->insert(pname);
                    if (at_punct(",")) advance();
                }
                expect_punct(")");
                if (at_keyword("throws")) {
                    do {
                        advance();
                        parse_type_or_fail("exception type");
                    } while (at_punct(","));
                }
                if (at_punct("{")) {
                    advance();
                    parse_block_children(node, depth);
                    expect_punct("}");
                } else {
                    expect_punct(";");
                }
                (void)mname;
                continue;
            }
            // Field declaration inside the anonymous class.
            commit_type(ts);
            Statement decl;
            decl.kind = StatementKind::declaration;
            decl.nesting_depth = depth;
            std::vector<std::string> texts;
            texts.push_back(ts.text);
            while (true) {
                std::string name = expect_ident();
                texts.push_back(name);
                if (locals_) locals_->insert(name);
                if (at_punct("=")) {
                    texts.push_back("=");
                    advance();
                    Scanned init = scan_expression(decl, depth + 1, true);
                    for (auto& x : init.texts) texts.push_back(std::move(x));
                }
                if (at_punct(",")) {
                    texts.push_back(",");
                    advance();
                    continue;
                }
                break;
            }
            texts.push_back(";");
            expect_punct(";");
            decl.canonical_text = render_tokens(texts);
            node.children.push_back(std::move(decl));
        }
    }

    void parse_anon_class_body(Statement& anon) {
        expect_punct("{");
        parse_anon_body_members(anon, anon.nesting_depth + 1);
        expect_punct("}");
    }

    // ---- post-processing -----------------------------------------------------

    void finish(CodeModel& model) {
        // Unique qualified names within the unit.
        std::set<std::string> names;
        for (const auto& c : model.classes) {
            if (!names.insert(c.qualified_name).second)
                throw SyntaxError("duplicate class name '" + c.qualified_name + "' in " + path_, 1,
                                  1);
        }
        // Declared subclasses.
        for (auto& c : model.classes) {
            c.subclass_count = 0;
            for (const auto& d : model.classes) {
                if (!d.extends_name.empty() && d.extends_name == c.simple_name) c.subclass_count++;
            }
        }
        // Field access sets.
        for (auto& c : model.classes) {
            std::set<std::string> field_names;
            for (const auto& f : c.fields) field_names.insert(f.name);
            for (auto& m : c.methods) {
                std::set<std::string> shadowed = m.declared_local_names;
                for (const auto& p : m.parameter_names) shadowed.insert(p);
                const auto& tk = m.tokens;
                for (std::size_t i = m.body_token_offset; i < tk.size(); ++i) {
                    const Token& t = tk[i];
                    if (t.kind != TokenKind::identifier || t.annotation || t.type_ctx) continue;
                    if (!field_names.count(t.text)) continue;
                    bool next_is_call = i + 1 < tk.size() && tk[i + 1].kind == TokenKind::punct &&
                                        tk[i + 1].text == "(";
                    if (next_is_call) continue;
                    bool prev_dot = i > 0 && tk[i - 1].kind == TokenKind::punct &&
                                    (tk[i - 1].text == "." || tk[i - 1].text == "::");
                    if (prev_dot) {
                        bool via_this = tk[i - 1].text == "." && i >= 2 &&
                                        tk[i - 2].kind == TokenKind::keyword &&
                                        tk[i - 2].text == "this";
                        if (via_this) m.accessed_field_names.insert(t.text);
                        continue;
                    }
                    if (!shadowed.count(t.text)) m.accessed_field_names.insert(t.text);
                }
            }
        }
    }
};

/// Parses one Java compilation unit into its structural model.
inline CodeModel parse_compilation_unit(std::string_view source, std::string path) {
    if (!is_valid_utf8(source))
        throw EncodingError("invalid UTF-8 in " + (path.empty() ? std::string("<input>") : path));
    return Parser(source, std::move(path)).run();
}

/// Canonical one-line form of a code snippet: comments stripped, layout
/// normalized. Identical code differing only in whitespace or comments maps
/// to the same string; the mapping is idempotent.
inline std::string canonicalize_snippet(std::string_view code) {
    std::vector<Token> toks = lex(code);
    std::vector<std::string> texts;
    texts.reserve(toks.size());
    for (const auto& t : toks) {
        if (t.kind == TokenKind::end) break;
        texts.push_back(t.text);
    }
    return render_tokens(texts);
}

/// Spec-level accessor: the canonical text of a parsed statement node.
inline const std::string& canonicalize_statement(const Statement& s) { return s.canonical_text; }

}  // namespace refscout::java
