// Registry of IFC entity names: supertype edges, reporting groups and which
// schema releases carry each type.

#pragma once

#include "ifcaudit/spf.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ifcaudit::schema {

enum class SchemaVersion { IFC2X3, IFC4 };

std::string_view to_string(SchemaVersion v);
/// Accepts "IFC2X3" and "IFC4" (case-insensitive). IFC4 addenda such as
/// "IFC4X1" or "IFC4_ADD2" map to IFC4.
std::optional<SchemaVersion> parse_schema_version(std::string_view text);
/// Schema named by the first FILE_SCHEMA entry, if recognised.
std::optional<SchemaVersion> schema_of(const spf::SpfHeader& header);

enum class ReportGroup {
    Metadata,
    SpatialStructure,
    Units,
    Quantities,
    BuildingElements,
    Geometry,
    Relationships,
    PropertiesAndMaterials,
    Other,
};

inline constexpr std::size_t kReportGroupCount = 9;

std::string_view to_string(ReportGroup g);
std::optional<ReportGroup> parse_report_group(std::string_view text);

class UnknownType : public std::invalid_argument {
public:
    explicit UnknownType(const std::string& name);
};

/// Malformed registry data. `line` is 1-based, 0 when not tied to a line.
class RegistryError : public std::runtime_error {
public:
    RegistryError(const std::string& message, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct TypeEntry {
    std::string name;
    std::string supertype;  // empty for roots
    ReportGroup group = ReportGroup::Other;
    bool in_ifc2x3 = false;
    bool in_ifc4 = false;

    bool available_in(SchemaVersion v) const noexcept {
        return v == SchemaVersion::IFC2X3 ? in_ifc2x3 : in_ifc4;
    }
};

class TypeRegistry {
public:
    /// Parses "TYPE;SUPERTYPE;GROUP;IFC2X3|IFC4|BOTH" lines. Blank lines and
    /// lines starting with '#' are skipped. Throws RegistryError on duplicate
    /// names, unknown supertypes, bad fields or a supertype cycle.
    static TypeRegistry parse(std::string_view text);
    static TypeRegistry load(const std::filesystem::path& path);
    /// The registry compiled into the library from data/ifc_types.txt.
    static const TypeRegistry& builtin();

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<TypeEntry>& entries() const noexcept { return entries_; }

    bool contains(std::string_view name) const { return find(name) != nullptr; }
    const TypeEntry* find(std::string_view name) const;
    /// Throws UnknownType.
    const TypeEntry& at(std::string_view name) const;

    /// Reflexive-transitive closure over supertype edges. Throws UnknownType
    /// if either name is missing.
    bool is_subtype_of(std::string_view a, std::string_view b) const;
    /// Group of a registered type; Other for unknown names, with a note
    /// appended to `diagnostics` when given.
    ReportGroup group_of(std::string_view name, std::vector<std::string>* diagnostics = nullptr) const;
    /// False for unknown names.
    bool available_in(std::string_view name, SchemaVersion v) const;
    /// The type itself followed by its supertypes up to the root.
    std::vector<std::string> ancestry(std::string_view name) const;
    /// Every entry ordered so each supertype precedes its subtypes.
    std::vector<std::string> topological_order() const;

private:
    std::vector<TypeEntry> entries_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::ptrdiff_t> parent_;  // entry index of the supertype, -1 for roots
};

inline bool is_subtype_of(const TypeRegistry& r, std::string_view a, std::string_view b) {
    return r.is_subtype_of(a, b);
}

inline ReportGroup group_of(const TypeRegistry& r, std::string_view name) {
    return r.group_of(name);
}

}  // namespace ifcaudit::schema
