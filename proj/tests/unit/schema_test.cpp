#include "ifcaudit/schema.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace ifcaudit::schema;

namespace {

// Edges read straight from the shipped data file, without the registry code.
std::map<std::string, std::string> read_edges() {
    std::ifstream in(IFCAUDIT_REGISTRY_PATH);
    std::map<std::string, std::string> edges;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string name, sup;
        std::getline(ss, name, ';');
        std::getline(ss, sup, ';');
        edges[name] = sup;
    }
    return edges;
}

}  // namespace

TEST(Schema, SubtypeExamples) {
    const auto& r = TypeRegistry::builtin();
    EXPECT_TRUE(is_subtype_of(r, "IFCWALLSTANDARDCASE", "IFCWALL"));
    EXPECT_TRUE(is_subtype_of(r, "IFCWALL", "IFCWALL"));
    EXPECT_FALSE(is_subtype_of(r, "IFCWALL", "IFCBEAM"));
    EXPECT_FALSE(is_subtype_of(r, "IFCWALL", "IFCWALLSTANDARDCASE"));
    EXPECT_TRUE(is_subtype_of(r, "IfcWallStandardCase", "IFCROOT"));
    EXPECT_THROW(is_subtype_of(r, "IFCWALL", "IFCNOSUCHTHING"), UnknownType);
}

TEST(Schema, SubtypeMatchesIndependentClosure) {
    const auto& r = TypeRegistry::builtin();
    auto edges = read_edges();
    ASSERT_EQ(edges.size(), r.size());

    // Floyd-Warshall reachability over the raw edges.
    std::vector<std::string> names;
    std::map<std::string, std::size_t> idx;
    for (auto& [n, s] : edges) {
        idx[n] = names.size();
        names.push_back(n);
    }
    const std::size_t n = names.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        reach[i][i] = 1;
        const auto& sup = edges[names[i]];
        if (!sup.empty()) reach[i][idx.at(sup)] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            ASSERT_EQ(r.is_subtype_of(names[i], names[j]), reach[i][j] != 0) << names[i] << " " << names[j];
}

TEST(Schema, GroupExamples) {
    const auto& r = TypeRegistry::builtin();
    EXPECT_EQ(group_of(r, "IFCUNITASSIGNMENT"), ReportGroup::Units);
    EXPECT_EQ(group_of(r, "IFCCARTESIANPOINT"), ReportGroup::Geometry);
    EXPECT_EQ(group_of(r, "IFCRELCONNECTSPATHELEMENTS"), ReportGroup::Relationships);
    std::vector<std::string> diags;
    EXPECT_EQ(r.group_of("IFCFLUBBER", &diags), ReportGroup::Other);
    EXPECT_EQ(diags.size(), 1u);
}

TEST(Schema, Availability) {
    const auto& r = TypeRegistry::builtin();
    EXPECT_TRUE(r.available_in("IFCCRANERAILASHAPEPROFILEDEF", SchemaVersion::IFC2X3));
    EXPECT_FALSE(r.available_in("IFCCRANERAILASHAPEPROFILEDEF", SchemaVersion::IFC4));
    EXPECT_TRUE(r.available_in("IFCMAPCONVERSION", SchemaVersion::IFC4));
    EXPECT_FALSE(r.available_in("IFCMAPCONVERSION", SchemaVersion::IFC2X3));
    EXPECT_FALSE(r.available_in("IFCNOPE", SchemaVersion::IFC4));
}

TEST(Schema, TopologicalOrderPutsSupertypesFirst) {
    const auto& r = TypeRegistry::builtin();
    auto order = r.topological_order();
    ASSERT_EQ(order.size(), r.size());
    std::set<std::string> seen;
    for (const auto& name : order) {
        const auto& sup = r.at(name).supertype;
        if (!sup.empty()) {
            EXPECT_TRUE(seen.contains(sup)) << name;
        }
        seen.insert(name);
    }
}

TEST(Schema, Ancestry) {
    auto a = TypeRegistry::builtin().ancestry("IFCWALLSTANDARDCASE");
    std::vector<std::string> expected = {"IFCWALLSTANDARDCASE", "IFCWALL",   "IFCBUILDINGELEMENT",
                                         "IFCELEMENT",          "IFCPRODUCT", "IFCOBJECT",
                                         "IFCOBJECTDEFINITION", "IFCROOT"};
    EXPECT_EQ(a, expected);
}

TEST(Schema, ParseRejectsBadData) {
    EXPECT_THROW(TypeRegistry::parse("A;B;Other;BOTH\nB;A;Other;BOTH\n"), RegistryError);
    EXPECT_THROW(TypeRegistry::parse("A;;Other;BOTH\nA;;Other;BOTH\n"), RegistryError);
    EXPECT_THROW(TypeRegistry::parse("A;MISSING;Other;BOTH\n"), RegistryError);
    EXPECT_THROW(TypeRegistry::parse("A;;Colour;BOTH\n"), RegistryError);
    EXPECT_THROW(TypeRegistry::parse("A;;Other;IFC5\n"), RegistryError);
    EXPECT_THROW(TypeRegistry::parse("A;;Other\n"), RegistryError);
    try {
        TypeRegistry::parse("# c\n\nA;;Other;BOTH\nA;;Other;BOTH\n");
        FAIL();
    } catch (const RegistryError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
    auto r = TypeRegistry::parse("a;;Units;IFC4\n");
    EXPECT_TRUE(r.contains("A"));
    EXPECT_EQ(r.group_of("A"), ReportGroup::Units);
}

TEST(Schema, VersionParsing) {
    EXPECT_EQ(parse_schema_version("IFC2X3"), SchemaVersion::IFC2X3);
    EXPECT_EQ(parse_schema_version("ifc4"), SchemaVersion::IFC4);
    EXPECT_EQ(parse_schema_version("IFC4X1"), SchemaVersion::IFC4);
    EXPECT_FALSE(parse_schema_version("IFC2X2_FINAL").has_value());
}
