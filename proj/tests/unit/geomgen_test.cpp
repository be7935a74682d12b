#include "ifcaudit/census.hpp"
#include "ifcaudit/geomgen.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <set>
#include <sstream>

using namespace ifcaudit;
using namespace ifcaudit::geomgen;
using schema::SchemaVersion;

namespace {

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (line.find(needle) != std::string::npos) ++n;
    return n;
}

std::set<std::string> slots(const SuiteManifest& m) {
    std::set<std::string> s;
    for (auto& it : m.items) s.insert(it.slot.name());
    return s;
}

}  // namespace

TEST(Geomgen, CanonicalGridIsCovered) {
    const auto& items = canonical_items();
    ASSERT_EQ(items.size(), 30u);
    std::set<std::pair<char, int>> seen;
    for (auto& it : items) {
        EXPECT_GE(it.slot.row, 'A');
        EXPECT_LE(it.slot.row, 'F');
        EXPECT_GE(it.slot.column, 1);
        EXPECT_LE(it.slot.column, 5);
        seen.insert({it.slot.row, it.slot.column});
    }
    EXPECT_EQ(seen.size(), 30u);
}

TEST(Geomgen, ExpectedValidityTable) {
    std::map<ValidityReason, std::set<std::string>> by_reason;
    for (auto& it : canonical_items())
        for (auto r : it.expected_validity.reasons) by_reason[r].insert(it.slot.name());
    EXPECT_EQ(by_reason[ValidityReason::PositiveLength], (std::set<std::string>{"B3", "B4"}));
    EXPECT_EQ(by_reason[ValidityReason::ValidExtrusionDirection], (std::set<std::string>{"C1", "C5", "D4", "E3"}));
    EXPECT_EQ(by_reason[ValidityReason::ParamRange], (std::set<std::string>{"F5"}));
}

TEST(Geomgen, SuiteCardinality) {
    auto s2 = generate_geometry_suite(SchemaVersion::IFC2X3);
    auto s4 = generate_geometry_suite(SchemaVersion::IFC4);
    EXPECT_EQ(s2.manifest.items.size(), 30u);
    EXPECT_EQ(s4.manifest.items.size(), 23u);
    std::set<std::string> excluded;
    auto in4 = slots(s4.manifest);
    for (auto& s : slots(s2.manifest))
        if (!in4.contains(s)) excluded.insert(s);
    EXPECT_EQ(excluded, (std::set<std::string>{"E1", "E2", "E3", "E4", "F3", "F4", "F5"}));

    std::set<std::string> defs2;
    for (auto& it : s2.manifest.items) defs2.insert(it.definition_name);
    for (auto& it : s4.manifest.items) EXPECT_TRUE(defs2.contains(it.definition_name));
}

TEST(Geomgen, ProxyAndExtrusionCountsMatchTextScan) {
    for (auto v : {SchemaVersion::IFC2X3, SchemaVersion::IFC4}) {
        auto s = generate_geometry_suite(v);
        auto text = spf::write_spf(s.graph);
        auto c = census::census(s.graph);
        std::size_t proxies = count_lines_with(text, "=IFCBUILDINGELEMENTPROXY(");
        EXPECT_EQ(c.count("IFCBUILDINGELEMENTPROXY"), proxies);
        EXPECT_EQ(proxies, v == SchemaVersion::IFC2X3 ? 30u : 23u);

        // Manifest walk: every extrusion item plus the clipping item's operand.
        std::size_t extrusions = 0;
        for (auto& it : s.manifest.items)
            if (it.kind == ItemKind::ExtrudedAreaSolid || it.kind == ItemKind::BooleanClippingResult) ++extrusions;
        EXPECT_EQ(c.count("IFCEXTRUDEDAREASOLID"), extrusions);
        EXPECT_EQ(count_lines_with(text, "=IFCEXTRUDEDAREASOLID("), extrusions);
        if (v == SchemaVersion::IFC2X3) {
            EXPECT_EQ(extrusions, 19u);
        } else {
            EXPECT_EQ(c.count("IFCCRANERAILASHAPEPROFILEDEF"), 0u);
        }

        std::regex rec(R"(^#\d+=)");
        std::size_t records = 0;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) records += std::regex_search(line, rec);
        EXPECT_EQ(records, s.graph.size());
    }
}

TEST(Geomgen, CleanParseAndClosedReferences) {
    for (auto v : {SchemaVersion::IFC2X3, SchemaVersion::IFC4}) {
        auto s = generate_geometry_suite(v);
        auto g = spf::parse_spf(spf::write_spf(s.graph));
        EXPECT_TRUE(g.diagnostics().empty());
        EXPECT_TRUE(g.dangling_references().empty());
        // Walk every reference through resolve().
        std::vector<spf::ValueRef> stack;
        std::size_t refs = 0;
        for (auto inst : g)
            for (std::size_t i = 0; i < inst.attribute_count(); ++i) stack.push_back(inst.attribute(i));
        while (!stack.empty()) {
            auto val = stack.back();
            stack.pop_back();
            if (val.kind() == spf::ValueKind::Reference) {
                ++refs;
                EXPECT_TRUE(spf::resolve(g, val.as_reference()).has_value());
            } else if (val.kind() == spf::ValueKind::List) {
                for (auto item : val) stack.push_back(item);
            }
        }
        EXPECT_GT(refs, 100u);
    }
}

TEST(Geomgen, EmittedTypesAvailableInSchema) {
    const auto& reg = schema::TypeRegistry::builtin();
    for (auto v : {SchemaVersion::IFC2X3, SchemaVersion::IFC4}) {
        auto s = generate_geometry_suite(v, {.include_below_tolerance = true});
        for (auto& [type, n] : census::census(s.graph).counts) EXPECT_TRUE(reg.available_in(type, v)) << type;
    }
}

TEST(Geomgen, Deterministic) {
    auto a = spf::write_spf(generate_geometry_suite(SchemaVersion::IFC2X3).graph);
    auto b = spf::write_spf(generate_geometry_suite(SchemaVersion::IFC2X3).graph);
    EXPECT_EQ(a, b);
    auto c = spf::write_spf(generate_geometry_suite(SchemaVersion::IFC2X3, {.timestamp = 0}).graph);
    EXPECT_NE(a, c);
    EXPECT_NE(c.find("'1970-01-01T00:00:00'"), std::string::npos);
}

TEST(Geomgen, RootTypeOncePerItem) {
    auto s = generate_geometry_suite(SchemaVersion::IFC2X3);
    const auto& g = s.graph;
    std::map<ItemKind, std::string> root_type = {
        {ItemKind::BooleanResult, "IFCBOOLEANRESULT"},
        {ItemKind::BooleanClippingResult, "IFCBOOLEANCLIPPINGRESULT"},
        {ItemKind::ShellBasedSurfaceModel, "IFCSHELLBASEDSURFACEMODEL"},
        {ItemKind::FacetedBrep, "IFCFACETEDBREP"},
        {ItemKind::ExtrudedAreaSolid, "IFCEXTRUDEDAREASOLID"},
        {ItemKind::RevolvedAreaSolid, "IFCREVOLVEDAREASOLID"},
        {ItemKind::SweptDiskSolid, "IFCSWEPTDISKSOLID"},
    };
    std::map<std::string, std::size_t> per_kind;
    for (auto& it : s.manifest.items) ++per_kind[root_type[it.kind]];
    auto c = census::census(g);
    EXPECT_EQ(c.count("IFCBOOLEANRESULT"), per_kind["IFCBOOLEANRESULT"] + per_kind["IFCBOOLEANCLIPPINGRESULT"] - 1);
    EXPECT_EQ(c.count("IFCSHELLBASEDSURFACEMODEL"), 1u);
    EXPECT_EQ(c.count("IFCFACETEDBREP"), 1u);
    EXPECT_EQ(c.count("IFCREVOLVEDAREASOLID"), per_kind["IFCREVOLVEDAREASOLID"]);
    EXPECT_EQ(c.count("IFCSWEPTDISKSOLID"), per_kind["IFCSWEPTDISKSOLID"]);

    for (auto proxy : g) {
        if (proxy.type_name() != "IFCBUILDINGELEMENTPROXY") continue;
        const auto* it = find_item(proxy.attribute(2).as_text());
        ASSERT_NE(it, nullptr);
        EXPECT_EQ(proxy.attribute(3).as_text(), it->definition_name);
        auto pds = g.find(proxy.attribute(6).as_reference());
        auto rep = g.find(pds->attribute(2)[0].as_reference());
        auto items = rep->attribute(3);
        ASSERT_EQ(items.size(), 1u);
        EXPECT_EQ(g.find(items[0].as_reference())->type_name(), root_type[it->kind]);
    }
}

TEST(Geomgen, ItemFragments) {
    auto a1 = generate_item(*find_item("A1"), SchemaVersion::IFC2X3);
    std::size_t booleans = 0;
    for (auto& fi : a1.instances)
        if (fi.type == "IFCBOOLEANRESULT") {
            ++booleans;
            EXPECT_EQ(fi.attributes[0].as_enum(), "DIFFERENCE");
        }
    EXPECT_EQ(booleans, 1u);
    EXPECT_EQ(a1.instances.back().id, a1.root);

    auto b1 = generate_item(*find_item("B1"), SchemaVersion::IFC2X3, 100);
    std::size_t faces = 0;
    std::set<std::vector<double>> points;
    for (auto& fi : b1.instances) {
        if (fi.type == "IFCFACE") ++faces;
        if (fi.type == "IFCCARTESIANPOINT") {
            std::vector<double> p;
            for (auto& c : fi.attributes[0].items()) p.push_back(c.as_real());
            points.insert(p);
        }
    }
    EXPECT_EQ(faces, 6u);
    EXPECT_EQ(points.size(), 8u);
    EXPECT_EQ(b1.instances.front().id, 100u);

    auto f5 = generate_item(*find_item("F5"), SchemaVersion::IFC2X3);
    const auto& disk = f5.instances.back();
    ASSERT_EQ(disk.type, "IFCSWEPTDISKSOLID");
    EXPECT_LT(disk.attributes[3].as_real(), dims::kParamStart);
    EXPECT_GT(disk.attributes[4].as_real(), dims::kParamEnd);

    auto d2_2x3 = generate_item(*find_item("D2"), SchemaVersion::IFC2X3);
    auto d2_4 = generate_item(*find_item("D2"), SchemaVersion::IFC4);
    for (auto& fi : d2_2x3.instances)
        if (fi.type == "IFCISHAPEPROFILEDEF") {
            EXPECT_EQ(fi.attributes.size(), 8u);
        }
    for (auto& fi : d2_4.instances)
        if (fi.type == "IFCISHAPEPROFILEDEF") {
            EXPECT_EQ(fi.attributes.size(), 10u);
        }
}

TEST(Geomgen, NegativeDepthInText) {
    auto s = generate_geometry_suite(SchemaVersion::IFC2X3);
    auto b3 = generate_item(*find_item("B3"), SchemaVersion::IFC2X3);
    EXPECT_EQ(b3.instances.back().attributes[3].lexeme(), "-2.");
    auto text = spf::write_spf(s.graph);
    EXPECT_TRUE(std::regex_search(text, std::regex(R"(=IFCEXTRUDEDAREASOLID\(#\d+,#\d+,#\d+,-2\.\);)")));
    EXPECT_TRUE(std::regex_search(text, std::regex(R"(=IFCEXTRUDEDAREASOLID\(#\d+,#\d+,#\d+,0\.\);)")));
}

TEST(Geomgen, UnavailableItems) {
    EXPECT_THROW(generate_item(*find_item("E1"), SchemaVersion::IFC4), UnavailableItem);
    EXPECT_THROW(generate_geometry_suite(SchemaVersion::IFC4, {.require_items = {"F3"}}), UnavailableItem);
    EXPECT_NO_THROW(generate_geometry_suite(SchemaVersion::IFC2X3, {.require_items = {"F3"}}));
    EXPECT_THROW(generate_geometry_suite(SchemaVersion::IFC2X3, {.spacing = 0}), std::invalid_argument);
    EXPECT_THROW(generate_geometry_suite(SchemaVersion::IFC2X3, {.precision = -1}), std::invalid_argument);
}

TEST(Geomgen, BelowToleranceIsOptIn) {
    auto s = generate_geometry_suite(SchemaVersion::IFC4, {.include_below_tolerance = true});
    EXPECT_EQ(s.manifest.items.size(), 24u);
    EXPECT_EQ(s.manifest.items.back().slot.name(), "G1");
    EXPECT_EQ(census::census(s.graph).count("IFCBUILDINGELEMENTPROXY"), 24u);
}

TEST(Geomgen, ManifestJsonRoundTrip) {
    auto m = generate_geometry_suite(SchemaVersion::IFC2X3).manifest;
    auto j = manifest_to_json(m);
    auto back = manifest_from_json(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(back.items.size(), m.items.size());
    for (std::size_t i = 0; i < m.items.size(); ++i) {
        EXPECT_EQ(back.items[i].slot, m.items[i].slot);
        EXPECT_EQ(back.items[i].definition_name, m.items[i].definition_name);
        EXPECT_EQ(back.items[i].variant, m.items[i].variant);
        EXPECT_EQ(back.items[i].expected_validity, m.items[i].expected_validity);
    }
    EXPECT_EQ(back.notes, m.notes);
    EXPECT_THROW(manifest_from_json(nlohmann::json::object()), std::invalid_argument);
}

TEST(Geomgen, GuidsAreValidAndDistinct) {
    std::set<std::string> seen;
    std::regex valid(R"(^[0-3][0-9A-Za-z_$]{21}$)");
    for (std::uint64_t i = 0; i < 5000; ++i) {
        auto g = make_guid(42, i);
        ASSERT_TRUE(std::regex_match(g, valid)) << g;
        seen.insert(g);
    }
    EXPECT_EQ(seen.size(), 5000u);
}
