#include <catch2/catch_amalgamated.hpp>

#include "refscout/java/parser.hpp"
#include "refscout/util.hpp"
#include "support/model_dump.hpp"

using namespace refscout;
using namespace refscout::java;
using testsupport::count_statements;
using testsupport::depths_consistent;
using testsupport::dump_model;

static std::string fixture_path(const std::string& name) {
    return std::string(REFSCOUT_FIXTURE_DIR) + "/java/" + name;
}

TEST_CASE("empty class") {
    CodeModel m = parse_compilation_unit("class A {}", "A.java");
    REQUIRE(m.classes.size() == 1);
    CHECK(m.classes[0].qualified_name == "A");
    CHECK(m.classes[0].methods.empty());
    CHECK(m.classes[0].fields.empty());
    CHECK_FALSE(m.classes[0].is_inner);
}

TEST_CASE("Calculator fixture: classes, methods, fields") {
    std::string src = read_file(fixture_path("Calculator.java"));
    CodeModel m = parse_compilation_unit(src, "Calculator.java");
    REQUIRE(m.classes.size() == 1);
    const ClassModel& c = m.classes[0];
    CHECK(c.qualified_name == "Calculator");
    REQUIRE(c.methods.size() == 2);
    CHECK(c.methods[0].signature == "add(int,int)");
    CHECK(c.methods[1].signature == "currentTotal()");
    REQUIRE(c.fields.size() == 1);
    CHECK(c.fields[0].name == "total");
    CHECK(c.fields[0].visibility == Visibility::private_v);
    CHECK(c.fields[0].type_text == "int");
}

TEST_CASE("malformed input raises SyntaxError") {
    CHECK_THROWS_AS(parse_compilation_unit("class A { void f( }", "A.java"), SyntaxError);
}

TEST_CASE("invalid UTF-8 raises EncodingError") {
    std::string bad = "class A {}";
    bad += static_cast<char>(0xFF);
    CHECK_THROWS_AS(parse_compilation_unit(bad, "A.java"), EncodingError);
}

TEST_CASE("parsing is deterministic") {
    std::string src = read_file(fixture_path("Calculator.java"));
    CodeModel a = parse_compilation_unit(src, "Calculator.java");
    CodeModel b = parse_compilation_unit(src, "Calculator.java");
    CHECK(dump_model(a) == dump_model(b));
}

TEST_CASE("statement kinds and counts") {
    const char* src = R"(
class A {
    int f(int n) {
        int acc = 0;
        for (int i = 0; i < n; i++) {
            if (i % 2 == 0) {
                acc += i;
            } else {
                acc -= i;
            }
        }
        while (acc > 100) { acc /= 2; }
        do { acc++; } while (acc < 0);
        switch (n) {
            case 0:
                return 0;
            case 1:
            case 2:
                acc = 1;
                break;
            default:
                break;
        }
        try {
            acc = risky(acc);
        } catch (RuntimeException e) {
            acc = 0;
        } finally {
            log(acc);
        }
        return acc;
    }
    int risky(int x) { return x; }
    void log(int x) {}
}
)";
    CodeModel m = parse_compilation_unit(src, "A.java");
    REQUIRE(m.classes.size() == 1);
    const MethodModel& f = m.classes[0].methods[0];
    CHECK(depths_consistent(f.body));
    CHECK(count_statements(f.body, StatementKind::for_loop) == 1);
    CHECK(count_statements(f.body, StatementKind::while_loop) == 1);
    CHECK(count_statements(f.body, StatementKind::do_loop) == 1);
    CHECK(count_statements(f.body, StatementKind::if_stmt) == 1);
    CHECK(count_statements(f.body, StatementKind::else_branch) == 1);
    CHECK(count_statements(f.body, StatementKind::switch_case) == 4);
    CHECK(count_statements(f.body, StatementKind::try_stmt) == 1);
    CHECK(count_statements(f.body, StatementKind::catch_clause) == 1);
    CHECK(count_statements(f.body, StatementKind::finally_clause) == 1);
    CHECK(count_statements(f.body, StatementKind::return_stmt) == 2);
    // declarations: acc, plus the for-init i lives in the for header (no node)
    CHECK(count_statements(f.body, StatementKind::declaration) == 1);
}

TEST_CASE("return statement counts match hand counts") {
    std::string src = read_file(fixture_path("Calculator.java"));
    CodeModel m = parse_compilation_unit(src, "Calculator.java");
    CHECK(count_statements(m.classes[0].methods[0].body, StatementKind::return_stmt) == 1);
    CHECK(count_statements(m.classes[0].methods[1].body, StatementKind::return_stmt) == 1);
}

TEST_CASE("invocations carry receiver, callee, and arity") {
    const char* src = R"(
class A {
    void f() {
        g();
        this.g();
        Math.max(1, 2);
        helper.run(a, b, c);
        chained().g();
    }
    void g() {}
    A chained() { return this; }
}
)";
    CodeModel m = parse_compilation_unit(src, "A.java");
    const auto& inv = m.classes[0].methods[0].invocations;
    REQUIRE(inv.size() == 6);
    CHECK(inv[0].callee == "g");
    CHECK(inv[0].receiver.empty());
    CHECK(inv[0].arg_count == 0);
    CHECK(inv[1].receiver == "this");
    CHECK(inv[2].receiver == "Math");
    CHECK(inv[2].callee == "max");
    CHECK(inv[2].arg_count == 2);
    CHECK(inv[3].receiver == "helper");
    CHECK(inv[3].arg_count == 3);
    CHECK(inv[4].callee == "chained");
    CHECK(inv[5].callee == "g");
    CHECK(inv[5].receiver.empty());  // receiver is a call result
}

TEST_CASE("nested, anonymous, and lambda structures") {
    const char* src = R"(
class Outer {
    class Inner {
        void m() {}
    }
    void run() {
        Runnable r = new Runnable() {
            public void run() {
                ping();
            }
        };
        Runnable s = () -> {
            pong();
        };
        int[] xs = {1, 2, 3};
    }
    void ping() {}
    void pong() {}
}
)";
    CodeModel m = parse_compilation_unit(src, "Outer.java");
    REQUIRE(m.classes.size() == 2);
    CHECK(m.classes[0].qualified_name == "Outer");
    CHECK(m.classes[1].qualified_name == "Outer.Inner");
    CHECK(m.classes[1].is_inner);
    const MethodModel& run = m.classes[0].methods[0];
    CHECK(run.extras.anon_class_count == 1);
    CHECK(run.extras.lambda_count == 1);
    CHECK(count_statements(run.body, StatementKind::anon_class_body) == 1);
    CHECK(count_statements(run.body, StatementKind::lambda_body) == 1);
    // ping() inside the anonymous body belongs to the enclosing method.
    bool saw_ping = false;
    for (const auto& i : run.invocations) saw_ping |= i.callee == "ping";
    CHECK(saw_ping);
}

TEST_CASE("field access with shadowing") {
    const char* src = R"(
class A {
    int x;
    int y;
    int useX() { return x + 1; }
    int shadowed(int x) { return x; }
    int viaThis(int x) { return this.x; }
    int useNothing() { return 0; }
}
)";
    CodeModel m = parse_compilation_unit(src, "A.java");
    const auto& ms = m.classes[0].methods;
    CHECK(ms[0].accessed_field_names == std::set<std::string>{"x"});
    CHECK(ms[1].accessed_field_names.empty());
    CHECK(ms[2].accessed_field_names == std::set<std::string>{"x"});
    CHECK(ms[3].accessed_field_names.empty());
}

TEST_CASE("generics, casts, and annotations") {
    const char* src = R"(
class A {
    @Deprecated
    Map<String, List<Integer>> index = new HashMap<>();

    @SuppressWarnings("unchecked")
    List<String> f(Object o) {
        List<String> xs = (List<String>) o;
        return xs;
    }
}
)";
    CodeModel m = parse_compilation_unit(src, "A.java");
    const ClassModel& c = m.classes[0];
    REQUIRE(c.fields.size() == 1);
    CHECK(c.fields[0].type_text == "Map<String,List<Integer>>");
    REQUIRE(c.methods.size() == 1);
    CHECK(c.methods[0].signature == "f(Object)");
    CHECK(c.referenced_type_names.count("Map") == 1);
    CHECK(c.referenced_type_names.count("HashMap") == 1);
    CHECK(c.referenced_type_names.count("List") == 1);
    CHECK(c.referenced_type_names.count("String") == 1);
}

TEST_CASE("enums and interfaces are modeled as classes") {
    const char* src = R"(
enum Color {
    RED, GREEN, BLUE;
    int luminance() { return 1; }
}
interface Shape {
    double area();
    default String describe() { return "shape"; }
}
)";
    CodeModel m = parse_compilation_unit(src, "Shapes.java");
    REQUIRE(m.classes.size() == 2);
    CHECK(m.classes[0].simple_name == "Color");
    REQUIRE(m.classes[0].methods.size() == 1);
    CHECK(m.classes[1].is_interface);
    REQUIRE(m.classes[1].methods.size() == 2);
    CHECK_FALSE(m.classes[1].methods[0].has_body);
    CHECK(m.classes[1].methods[1].has_body);
}

TEST_CASE("subclass counting within the unit") {
    const char* src = R"(
class Base {}
class A extends Base {}
class B extends Base {}
class C extends A {}
)";
    CodeModel m = parse_compilation_unit(src, "Base.java");
    CHECK(m.classes[0].subclass_count == 2);
    CHECK(m.classes[1].subclass_count == 1);
    CHECK(m.classes[2].subclass_count == 0);
}

TEST_CASE("source spans and raw body text") {
    std::string src = read_file(fixture_path("Calculator.java"));
    CodeModel m = parse_compilation_unit(src, "Calculator.java");
    const MethodModel& add = m.classes[0].methods[0];
    CHECK(add.span_begin_line <= add.span_end_line);
    CHECK(add.raw_body_text.front() == '{');
    CHECK(add.raw_body_text.back() == '}');
    CHECK(add.raw_body_text.find("a + b") != std::string::npos);
}
