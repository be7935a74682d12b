#pragma once

#include "ifcaudit/georef.hpp"

#include <string>

namespace ifcaudit::testing {

// Values authored into the fixtures. Tests compare the detector's output to
// these literals.
struct GeorefFixtureValues {
    static constexpr double kEastings = 333780.622;
    static constexpr double kNorthings = 6246775.891;
    static constexpr double kHeight = 19.7;
    static constexpr double kAbscissa = 0.9975640502598242;
    static constexpr double kOrdinate = 0.0697564737441253;
    static constexpr const char* kCrs = "EPSG:25832";
    static constexpr double kSiteX = 120.5, kSiteY = -42.25, kSiteZ = 3.0;
    static constexpr double kWcsX = 500000.0, kWcsY = 5000000.0, kWcsZ = 12.5;
    static constexpr double kNorthX = -0.5, kNorthY = 0.8660254037844386;
    static constexpr double kElevation = 21.5;
};

/// A small model whose site sits at the local origin with no georeferencing,
/// plus exactly the evidence for `level`. nullopt gives the bare model.
std::string georef_fixture(std::optional<georef::Level> level,
                           schema::SchemaVersion version = schema::SchemaVersion::IFC4);

}  // namespace ifcaudit::testing
