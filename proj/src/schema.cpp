#include "ifcaudit/schema.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ifcaudit::schema {

namespace detail {
extern const std::string_view kBuiltinRegistry;
}

namespace {

constexpr std::array<std::string_view, kReportGroupCount> kGroupNames = {
    "Metadata",         "SpatialStructure", "Units",
    "Quantities",       "BuildingElements", "Geometry",
    "Relationships",    "PropertiesAndMaterials", "Other",
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            return parts;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

}  // namespace

std::string_view to_string(SchemaVersion v) {
    return v == SchemaVersion::IFC2X3 ? "IFC2X3" : "IFC4";
}

std::optional<SchemaVersion> parse_schema_version(std::string_view text) {
    auto u = upper(trim(text));
    if (u == "IFC2X3") return SchemaVersion::IFC2X3;
    if (u.starts_with("IFC4")) return SchemaVersion::IFC4;
    return std::nullopt;
}

std::optional<SchemaVersion> schema_of(const spf::SpfHeader& header) {
    if (header.file_schema.empty()) return std::nullopt;
    return parse_schema_version(header.file_schema.front());
}

std::string_view to_string(ReportGroup g) {
    return kGroupNames[static_cast<std::size_t>(g)];
}

std::optional<ReportGroup> parse_report_group(std::string_view text) {
    for (std::size_t i = 0; i < kGroupNames.size(); ++i)
        if (kGroupNames[i] == text) return static_cast<ReportGroup>(i);
    return std::nullopt;
}

UnknownType::UnknownType(const std::string& name)
    : std::invalid_argument("unknown IFC type: " + name) {}

RegistryError::RegistryError(const std::string& message, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

TypeRegistry TypeRegistry::parse(std::string_view text) {
    TypeRegistry reg;
    std::vector<std::size_t> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto f = split(line, ';');
        if (f.size() != 4) throw RegistryError("expected 4 fields, got " + std::to_string(f.size()), line_no);

        TypeEntry e;
        e.name = upper(f[0]);
        e.supertype = upper(f[1]);
        if (!spf::is_valid_type_name(e.name)) throw RegistryError("bad type name '" + std::string(f[0]) + "'", line_no);
        if (!e.supertype.empty() && !spf::is_valid_type_name(e.supertype))
            throw RegistryError("bad supertype name '" + std::string(f[1]) + "'", line_no);
        auto g = parse_report_group(f[2]);
        if (!g) throw RegistryError("unknown group '" + std::string(f[2]) + "'", line_no);
        e.group = *g;
        if (f[3] == "BOTH") {
            e.in_ifc2x3 = e.in_ifc4 = true;
        } else if (f[3] == "IFC2X3") {
            e.in_ifc2x3 = true;
        } else if (f[3] == "IFC4") {
            e.in_ifc4 = true;
        } else {
            throw RegistryError("unknown availability '" + std::string(f[3]) + "'", line_no);
        }
        if (reg.index_.contains(e.name)) throw RegistryError("duplicate type " + e.name, line_no);
        reg.index_.emplace(e.name, reg.entries_.size());
        reg.entries_.push_back(std::move(e));
        lines.push_back(line_no);
    }

    reg.parent_.assign(reg.entries_.size(), -1);
    for (std::size_t i = 0; i < reg.entries_.size(); ++i) {
        const auto& sup = reg.entries_[i].supertype;
        if (sup.empty()) continue;
        auto it = reg.index_.find(sup);
        if (it == reg.index_.end()) throw RegistryError("unknown supertype " + sup, lines[i]);
        reg.parent_[i] = static_cast<std::ptrdiff_t>(it->second);
    }

    // Walking up from each entry must reach a root within size() steps.
    for (std::size_t i = 0; i < reg.entries_.size(); ++i) {
        std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(i);
        for (std::size_t steps = 0; cur >= 0; ++steps) {
            if (steps > reg.entries_.size())
                throw RegistryError("supertype cycle through " + reg.entries_[i].name, lines[i]);
            cur = reg.parent_[static_cast<std::size_t>(cur)];
        }
    }
    return reg;
}

TypeRegistry TypeRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RegistryError("cannot open " + path.string(), 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const TypeRegistry& TypeRegistry::builtin() {
    static const TypeRegistry reg = parse(detail::kBuiltinRegistry);
    return reg;
}

const TypeEntry* TypeRegistry::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        bool has_lower = std::any_of(name.begin(), name.end(),
                                     [](char c) { return std::islower(static_cast<unsigned char>(c)); });
        if (!has_lower) return nullptr;
        it = index_.find(upper(name));
        if (it == index_.end()) return nullptr;
    }
    return &entries_[it->second];
}

const TypeEntry& TypeRegistry::at(std::string_view name) const {
    if (auto* e = find(name)) return *e;
    throw UnknownType(std::string(name));
}

bool TypeRegistry::is_subtype_of(std::string_view a, std::string_view b) const {
    const TypeEntry& ea = at(a);
    const TypeEntry& eb = at(b);
    auto target = static_cast<std::ptrdiff_t>(&eb - entries_.data());
    for (auto cur = static_cast<std::ptrdiff_t>(&ea - entries_.data()); cur >= 0;
         cur = parent_[static_cast<std::size_t>(cur)]) {
        if (cur == target) return true;
    }
    return false;
}

ReportGroup TypeRegistry::group_of(std::string_view name, std::vector<std::string>* diagnostics) const {
    if (auto* e = find(name)) return e->group;
    if (diagnostics) diagnostics->push_back("type " + std::string(name) + " not in registry, grouped as Other");
    return ReportGroup::Other;
}

bool TypeRegistry::available_in(std::string_view name, SchemaVersion v) const {
    auto* e = find(name);
    return e && e->available_in(v);
}

std::vector<std::string> TypeRegistry::ancestry(std::string_view name) const {
    const TypeEntry& e = at(name);
    std::vector<std::string> out;
    for (auto cur = static_cast<std::ptrdiff_t>(&e - entries_.data()); cur >= 0;
         cur = parent_[static_cast<std::size_t>(cur)]) {
        out.push_back(entries_[static_cast<std::size_t>(cur)].name);
    }
    return out;
}

std::vector<std::string> TypeRegistry::topological_order() const {
    std::vector<std::size_t> depth(entries_.size(), 0);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (auto cur = parent_[i]; cur >= 0; cur = parent_[static_cast<std::size_t>(cur)]) ++depth[i];
    std::vector<std::size_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return depth[x] < depth[y]; });
    std::vector<std::string> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(entries_[i].name);
    return out;
}

}  // namespace ifcaudit::schema
