// Per-type instance counts and their signed differences between two models.

#pragma once

#include "ifcaudit/schema.hpp"
#include "ifcaudit/spf.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ifcaudit::census {

using schema::ReportGroup;
using schema::SchemaVersion;

struct Census {
    std::map<std::string, std::uint64_t, std::less<>> counts;  // zero entries omitted
    std::uint64_t total = 0;
    std::uint64_t byte_size = 0;
    std::optional<SchemaVersion> schema;

    std::uint64_t count(std::string_view type_name) const;

    friend bool operator==(const Census&, const Census&) = default;
};

/// Counts every instance under its exact type name. byte_size is the
/// source size recorded by the parser, or the serialized size for graphs
/// built in memory.
Census census(const spf::InstanceGraph& graph);

/// Builds a census from explicit counts; zero entries are dropped.
Census make_census(const std::map<std::string, std::uint64_t>& counts, std::uint64_t byte_size = 0,
                   std::optional<SchemaVersion> schema = std::nullopt);

struct CensusDiff {
    std::map<std::string, std::int64_t, std::less<>> deltas;  // exported minus reference, non-zero only
    std::set<std::string, std::less<>> lost_types;
    std::set<std::string, std::less<>> gained_types;
    std::map<ReportGroup, std::int64_t> grouped_deltas;        // non-zero only
    std::int64_t size_delta_bytes = 0;
    std::vector<std::string> diagnostics;

    std::int64_t delta(std::string_view type_name) const;
    /// No per-type change and no size change.
    bool empty() const noexcept {
        return deltas.empty() && lost_types.empty() && gained_types.empty() && size_delta_bytes == 0;
    }
};

CensusDiff diff(const Census& reference, const Census& exported,
                const schema::TypeRegistry& registry = schema::TypeRegistry::builtin());

/// Sum of deltas over `family`. Throws std::invalid_argument for an empty family.
std::int64_t family_balance(const CensusDiff& d, const std::set<std::string, std::less<>>& family);

struct DiffRow {
    std::string type_name;
    std::uint64_t reference = 0;
    std::uint64_t exported = 0;
    std::int64_t delta = 0;
    ReportGroup group = ReportGroup::Other;
};

/// One row per type present in either census, sorted by group then name.
std::vector<DiffRow> diff_rows(const Census& reference, const Census& exported,
                               const schema::TypeRegistry& registry = schema::TypeRegistry::builtin());

void write_diff_csv(std::ostream& out, const std::vector<DiffRow>& rows);
void write_diff_markdown(std::ostream& out, const std::vector<DiffRow>& rows);

/// type,count,group rows sorted by group then name.
void write_census_csv(std::ostream& out, const Census& c,
                      const schema::TypeRegistry& registry = schema::TypeRegistry::builtin());
void write_census_markdown(std::ostream& out, const Census& c,
                           const schema::TypeRegistry& registry = schema::TypeRegistry::builtin());

}  // namespace ifcaudit::census
