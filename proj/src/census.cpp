#include "ifcaudit/census.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace ifcaudit::census {

std::uint64_t Census::count(std::string_view type_name) const {
    auto it = counts.find(type_name);
    return it == counts.end() ? 0 : it->second;
}

Census census(const spf::InstanceGraph& graph) {
    // Type names are interned in the graph, so tally by view first and only
    // materialise one string per distinct type.
    std::unordered_map<std::string_view, std::uint64_t> tally;
    for (spf::InstanceRef inst : graph) ++tally[inst.type_name()];

    Census c;
    for (auto& [name, n] : tally) c.counts.emplace(std::string(name), n);
    c.total = graph.size();
    c.byte_size = graph.byte_size() ? graph.byte_size() : spf::write_spf(graph).size();
    c.schema = schema::schema_of(graph.header());
    return c;
}

Census make_census(const std::map<std::string, std::uint64_t>& counts, std::uint64_t byte_size,
                   std::optional<SchemaVersion> schema) {
    Census c;
    for (auto& [name, n] : counts) {
        if (n == 0) continue;
        c.counts.emplace(name, n);
        c.total += n;
    }
    c.byte_size = byte_size;
    c.schema = schema;
    return c;
}

std::int64_t CensusDiff::delta(std::string_view type_name) const {
    auto it = deltas.find(type_name);
    return it == deltas.end() ? 0 : it->second;
}

CensusDiff diff(const Census& reference, const Census& exported, const schema::TypeRegistry& registry) {
    CensusDiff d;
    auto add = [&](const std::string& name, std::int64_t delta) {
        d.deltas.emplace(name, delta);
        d.grouped_deltas[registry.group_of(name)] += delta;
    };

    auto a = reference.counts.begin();
    auto b = exported.counts.begin();
    while (a != reference.counts.end() || b != exported.counts.end()) {
        if (b == exported.counts.end() || (a != reference.counts.end() && a->first < b->first)) {
            add(a->first, -static_cast<std::int64_t>(a->second));
            d.lost_types.insert(a->first);
            ++a;
        } else if (a == reference.counts.end() || b->first < a->first) {
            add(b->first, static_cast<std::int64_t>(b->second));
            d.gained_types.insert(b->first);
            ++b;
        } else {
            auto delta = static_cast<std::int64_t>(b->second) - static_cast<std::int64_t>(a->second);
            if (delta != 0) add(a->first, delta);
            ++a;
            ++b;
        }
    }
    std::erase_if(d.grouped_deltas, [](const auto& kv) { return kv.second == 0; });

    d.size_delta_bytes = static_cast<std::int64_t>(exported.byte_size) - static_cast<std::int64_t>(reference.byte_size);
    if (reference.schema && exported.schema && reference.schema != exported.schema) {
        d.diagnostics.push_back("cross-schema comparison: " + std::string(to_string(*reference.schema)) + " vs " +
                                std::string(to_string(*exported.schema)));
    }
    return d;
}

std::int64_t family_balance(const CensusDiff& d, const std::set<std::string, std::less<>>& family) {
    if (family.empty()) throw std::invalid_argument("family_balance: empty family");
    std::int64_t sum = 0;
    for (const auto& t : family) sum += d.delta(t);
    return sum;
}

namespace {

bool row_less(const DiffRow& x, const DiffRow& y) {
    if (x.group != y.group) return x.group < y.group;
    return x.type_name < y.type_name;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::vector<DiffRow> diff_rows(const Census& reference, const Census& exported,
                               const schema::TypeRegistry& registry) {
    std::map<std::string, DiffRow, std::less<>> rows;
    for (auto& [name, n] : reference.counts) {
        auto& r = rows[name];
        r.type_name = name;
        r.reference = n;
    }
    for (auto& [name, n] : exported.counts) {
        auto& r = rows[name];
        r.type_name = name;
        r.exported = n;
    }
    std::vector<DiffRow> out;
    out.reserve(rows.size());
    for (auto& [name, r] : rows) {
        r.delta = static_cast<std::int64_t>(r.exported) - static_cast<std::int64_t>(r.reference);
        r.group = registry.group_of(name);
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), row_less);
    return out;
}

void write_diff_csv(std::ostream& out, const std::vector<DiffRow>& rows) {
    out << "type,reference,exported,delta,group\n";
    for (const auto& r : rows) {
        out << csv_field(r.type_name) << ',' << r.reference << ',' << r.exported << ',' << r.delta << ','
            << to_string(r.group) << '\n';
    }
}

void write_diff_markdown(std::ostream& out, const std::vector<DiffRow>& rows) {
    out << "| Group | Type | Reference | Exported | Delta |\n";
    out << "|---|---|---:|---:|---:|\n";
    for (const auto& r : rows) {
        out << "| " << to_string(r.group) << " | " << r.type_name << " | " << r.reference << " | " << r.exported
            << " | " << (r.delta > 0 ? "+" : "") << r.delta << " |\n";
    }
}

void write_census_csv(std::ostream& out, const Census& c, const schema::TypeRegistry& registry) {
    auto rows = diff_rows(c, Census{}, registry);
    out << "type,count,group\n";
    for (const auto& r : rows) out << csv_field(r.type_name) << ',' << r.reference << ',' << to_string(r.group) << '\n';
}

void write_census_markdown(std::ostream& out, const Census& c, const schema::TypeRegistry& registry) {
    auto rows = diff_rows(c, Census{}, registry);
    out << "| Group | Type | Count |\n|---|---|---:|\n";
    for (const auto& r : rows) out << "| " << to_string(r.group) << " | " << r.type_name << " | " << r.reference << " |\n";
    out << "| | **Total** | " << c.total << " |\n";
}

}  // namespace ifcaudit::census
