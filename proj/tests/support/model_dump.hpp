#pragma once

// Test-only textual dump of a CodeModel, used for structural-equality checks.

#include <sstream>
#include <string>

#include "refscout/java/model.hpp"

namespace testsupport {

inline void dump_statement(std::ostringstream& os, const refscout::java::Statement& s,
                           int indent) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << to_string(s.kind) << " d"
       << s.nesting_depth << " `" << s.canonical_text << "`\n";
    for (const auto& c : s.children) dump_statement(os, c, indent + 1);
}

inline std::string dump_model(const refscout::java::CodeModel& model) {
    std::ostringstream os;
    for (const auto& c : model.classes) {
        os << "class " << c.qualified_name << (c.is_inner ? " inner" : "")
           << (c.is_interface ? " interface" : "") << " extends=" << c.extends_name
           << " span=" << c.span_begin_line << ".." << c.span_end_line << "\n";
        for (const auto& f : c.fields)
            os << "  field " << f.type_text << " " << f.name << " " << to_string(f.visibility)
               << (f.modifiers.is_static ? " static" : "") << (f.modifiers.is_final ? " final" : "")
               << "\n";
        for (const auto& m : c.methods) {
            os << "  method " << m.signature << " " << to_string(m.visibility)
               << (m.is_constructor ? " ctor" : "") << (m.modifiers.is_static ? " static" : "")
               << " span=" << m.span_begin_line << ".." << m.span_end_line << "\n";
            dump_statement(os, m.body, 2);
            for (const auto& inv : m.invocations)
                os << "    call " << (inv.receiver.empty() ? "-" : inv.receiver) << "."
                   << inv.callee << "/" << inv.arg_count << "\n";
            os << "    fields-accessed:";
            for (const auto& f : m.accessed_field_names) os << " " << f;
            os << "\n";
        }
    }
    return os.str();
}

inline int count_statements(const refscout::java::Statement& s,
                            refscout::java::StatementKind kind) {
    int n = s.kind == kind ? 1 : 0;
    for (const auto& c : s.children) n += count_statements(c, kind);
    return n;
}

inline bool depths_consistent(const refscout::java::Statement& s) {
    for (const auto& c : s.children) {
        if (c.nesting_depth != s.nesting_depth + 1) return false;
        if (!depths_consistent(c)) return false;
    }
    return true;
}

}  // namespace testsupport
