#include "ifcaudit/spf.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

namespace ifcaudit::spf {

namespace {

void write_quoted(std::string& out, std::string_view logical) {
    out += '\'';
    out += encode_text(logical);
    out += '\'';
}

void write_quoted_list(std::string& out, const std::vector<std::string>& items) {
    out += '(';
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        write_quoted(out, items[i]);
    }
    out += ')';
}

void write_value(std::string& out, ValueRef v) {
    switch (v.kind()) {
        case ValueKind::Unset: out += '$'; break;
        case ValueKind::Derived: out += '*'; break;
        case ValueKind::Integer: {
            char buf[24];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.as_integer());
            out.append(buf, end);
            break;
        }
        case ValueKind::Real: out += v.lexeme(); break;
        case ValueKind::Text:
            out += '\'';
            out += v.raw_text();
            out += '\'';
            break;
        case ValueKind::Enum:
            out += '.';
            out += v.as_enum();
            out += '.';
            break;
        case ValueKind::Binary:
            out += '"';
            out += v.as_binary();
            out += '"';
            break;
        case ValueKind::Reference: {
            char buf[24];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.as_reference());
            out += '#';
            out.append(buf, end);
            break;
        }
        case ValueKind::List: {
            out += '(';
            bool first = true;
            for (ValueRef item : v) {
                if (!first) out += ',';
                first = false;
                write_value(out, item);
            }
            out += ')';
            break;
        }
        case ValueKind::Typed:
            out += v.type_name();
            out += '(';
            write_value(out, v.inner());
            out += ')';
            break;
    }
}

void write_header(std::string& out, const SpfHeader& h) {
    out += "ISO-10303-21;\nHEADER;\nFILE_DESCRIPTION(";
    write_quoted_list(out, h.description);
    out += ',';
    write_quoted(out, h.implementation_level);
    out += ");\nFILE_NAME(";
    const auto& f = h.file_name;
    write_quoted(out, f.name);
    out += ',';
    write_quoted(out, f.timestamp);
    out += ',';
    write_quoted_list(out, f.authors);
    out += ',';
    write_quoted_list(out, f.organizations);
    out += ',';
    write_quoted(out, f.preprocessor_version);
    out += ',';
    write_quoted(out, f.originating_system);
    out += ',';
    write_quoted(out, f.authorization);
    out += ");\nFILE_SCHEMA(";
    write_quoted_list(out, h.file_schema);
    out += ");\nENDSEC;\nDATA;\n";
}

void write_instance(std::string& out, InstanceRef inst) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, inst.id());
    out += '#';
    out.append(buf, end);
    out += '=';
    out += inst.type_name();
    out += '(';
    for (std::size_t i = 0; i < inst.attribute_count(); ++i) {
        if (i) out += ',';
        write_value(out, inst.attribute(i));
    }
    out += ");\n";
}

constexpr std::string_view kTrailer = "ENDSEC;\nEND-ISO-10303-21;\n";

}  // namespace

std::string write_spf(const InstanceGraph& graph) {
    std::string out;
    write_header(out, graph.header());
    for (InstanceRef inst : graph) write_instance(out, inst);
    out += kTrailer;
    return out;
}

void write_spf(const InstanceGraph& graph, std::ostream& os) {
    std::string chunk;
    write_header(chunk, graph.header());
    for (InstanceRef inst : graph) {
        write_instance(chunk, inst);
        if (chunk.size() > (1u << 16)) {
            os << chunk;
            chunk.clear();
        }
    }
    chunk += kTrailer;
    os << chunk;
}

}  // namespace ifcaudit::spf
