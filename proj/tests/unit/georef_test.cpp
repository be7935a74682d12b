#include "ifcaudit/census.hpp"
#include "ifcaudit/georef.hpp"

#include "georef_fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ifcaudit;
using namespace ifcaudit::georef;
using ifcaudit::testing::georef_fixture;
using V = ifcaudit::testing::GeorefFixtureValues;
using schema::SchemaVersion;

namespace {

LoGeoRefReport detect(const std::string& text, SchemaVersion v = SchemaVersion::IFC4) {
    auto g = spf::parse_spf(text);
    EXPECT_TRUE(g.diagnostics().empty());
    EXPECT_TRUE(g.dangling_references().empty());
    return detect_georef(g, v);
}

}  // namespace

TEST(CompoundAngle, Examples) {
    EXPECT_EQ(compound_angle_to_degrees({0, 0, 0}), 0.0);
    EXPECT_EQ(compound_angle_to_degrees({-52, -30, 0}), -52.5);
    EXPECT_EQ(compound_angle_to_degrees({52, 30, 0, 0}), 52.5);
    EXPECT_EQ(compound_angle_to_degrees({0, -30, 0}), -0.5);
    EXPECT_THROW(compound_angle_to_degrees({52, -30, 0}), MixedSign);
    EXPECT_THROW(compound_angle_to_degrees({52, 30}), BadLength);
    EXPECT_THROW(compound_angle_to_degrees({1, 2, 3, 4, 5}), BadLength);
}

TEST(CompoundAngle, OddAndMatchesArithmetic) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> d(0, 179), ms(0, 59), u(0, 999999);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t v[4] = {d(rng), ms(rng), ms(rng), u(rng)};
        std::int64_t n[4] = {-v[0], -v[1], -v[2], -v[3]};
        double expect = static_cast<double>(v[0]) + static_cast<double>(v[1]) / 60.0 +
                        static_cast<double>(v[2]) / 3600.0 + static_cast<double>(v[3]) / 3.6e9;
        double got = compound_angle_to_degrees(std::span<const std::int64_t>(v, 4));
        ASSERT_NEAR(got, expect, 1e-12);
        ASSERT_EQ(compound_angle_to_degrees(std::span<const std::int64_t>(n, 4)), -got);
    }
}

TEST(Georef, BareModelHasNoLevels) {
    auto r = detect(georef_fixture(std::nullopt));
    EXPECT_TRUE(r.detected.empty());
}

TEST(Georef, L10Address) {
    auto r = detect(georef_fixture(Level::L10));
    ASSERT_EQ(r.levels(), std::vector<Level>{Level::L10});
    const auto& p = std::get<AddressParams>(r.get(Level::L10)->payload);
    EXPECT_EQ(p.host, "IFCSITE");
    EXPECT_EQ(p.address_lines, (std::vector<std::string>{"Via Roma 1", "Scala B"}));
    EXPECT_EQ(p.town, "Torino");
    EXPECT_EQ(p.region, "TO");
    EXPECT_EQ(p.postal_code, "10121");
    EXPECT_EQ(p.country, "Italy");
}

TEST(Georef, L20LatLon) {
    auto r = detect(georef_fixture(Level::L20));
    ASSERT_EQ(r.levels(), std::vector<Level>{Level::L20});
    const auto& p = std::get<LatLonParams>(r.get(Level::L20)->payload);
    EXPECT_EQ(p.latitude, 52.0);
    EXPECT_EQ(p.longitude, 4.5);
    EXPECT_EQ(p.elevation, V::kElevation);
}

TEST(Georef, L30SitePlacement) {
    auto r = detect(georef_fixture(Level::L30));
    ASSERT_EQ(r.levels(), std::vector<Level>{Level::L30});
    const auto& p = std::get<PlacementParams>(r.get(Level::L30)->payload);
    EXPECT_EQ(p.location, (Vec3{V::kSiteX, V::kSiteY, V::kSiteZ}));
    EXPECT_EQ(p.unit, "METRE");
    EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Georef, L40Context) {
    auto r = detect(georef_fixture(Level::L40));
    ASSERT_EQ(r.levels(), std::vector<Level>{Level::L40});
    const auto& p = std::get<ContextParams>(r.get(Level::L40)->payload);
    EXPECT_EQ(p.origin, (Vec3{V::kWcsX, V::kWcsY, V::kWcsZ}));
    ASSERT_TRUE(p.true_north);
    EXPECT_EQ((*p.true_north)[0], V::kNorthX);
    EXPECT_EQ((*p.true_north)[1], V::kNorthY);
}

TEST(Georef, L50MapConversion) {
    auto r = detect(georef_fixture(Level::L50));
    ASSERT_EQ(r.levels(), std::vector<Level>{Level::L50});
    const auto& p = std::get<MapParams>(r.get(Level::L50)->payload);
    EXPECT_EQ(p.eastings, V::kEastings);
    EXPECT_EQ(p.northings, V::kNorthings);
    EXPECT_EQ(p.orthogonal_height, V::kHeight);
    EXPECT_EQ(p.x_axis_abscissa, V::kAbscissa);
    EXPECT_EQ(p.x_axis_ordinate, V::kOrdinate);
    EXPECT_EQ(p.crs_name, V::kCrs);
    EXPECT_FALSE(p.scale);
}

TEST(Georef, L50NeverForIfc2x3) {
    auto text = georef_fixture(Level::L50, SchemaVersion::IFC2X3);
    auto r = detect(text, SchemaVersion::IFC2X3);
    EXPECT_TRUE(r.detected.empty());
    EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Georef, NoSiteDiagnostic) {
    auto g = spf::parse_spf(
        "ISO-10303-21;HEADER;FILE_DESCRIPTION((''),'2;1');FILE_NAME('','',(''),(''),'','','');"
        "FILE_SCHEMA(('IFC4'));ENDSEC;DATA;#1=IFCBUILDING($,$,'B',$,$,$,$,$,$,$,$,$);ENDSEC;END-ISO-10303-21;");
    auto r = detect_georef(g, SchemaVersion::IFC4);
    EXPECT_TRUE(r.detected.empty());
    bool found = false;
    for (auto& d : r.diagnostics) found |= d.starts_with("NoSite");
    EXPECT_TRUE(found);
}

TEST(Georef, ReadOnlyAndMonotone) {
    for (auto lvl : {Level::L10, Level::L30, Level::L40, Level::L50}) {
        auto g = spf::parse_spf(georef_fixture(lvl));
        auto before = census::census(g);
        auto r1 = detect_georef(g, SchemaVersion::IFC4);
        EXPECT_EQ(census::census(g), before);

        // Add the latitude/longitude fragment on top of the level's evidence.
        auto text = georef_fixture(lvl);
        auto pos = text.find(".ELEMENT.,$,$,$,");
        ASSERT_NE(pos, std::string::npos);
        text.replace(pos, 16, ".ELEMENT.,(52,0,0,0),(4,30,0,0),$,");
        auto r2 = detect(text);
        auto l1 = r1.levels();
        auto l2 = r2.levels();
        for (auto l : l1) EXPECT_NE(std::find(l2.begin(), l2.end(), l), l2.end());
        EXPECT_TRUE(r2.has(Level::L20));
        EXPECT_EQ(l2.size(), l1.size() + 1);
    }
}

TEST(Georef, JsonShape) {
    auto j = to_json(detect(georef_fixture(Level::L50)));
    EXPECT_EQ(j["levels"], nlohmann::json::array({"LoGeoRef50"}));
    EXPECT_EQ(j["params"]["LoGeoRef50"]["crs_name"], V::kCrs);
    EXPECT_EQ(j["params"]["LoGeoRef50"]["eastings"].get<double>(), V::kEastings);
}
