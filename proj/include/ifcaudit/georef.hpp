// Level-of-georeferencing (LoGeoRef 10 to 50) detection and parameter
// extraction.

#pragma once

#include "ifcaudit/schema.hpp"
#include "ifcaudit/spf.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ifcaudit::georef {

enum class Level { L10, L20, L30, L40, L50 };

std::string_view to_string(Level l);  // "LoGeoRef10" ...

class MixedSign : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BadLength : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// degrees + minutes/60 + seconds/3600 (+ millionths/3.6e9). Throws BadLength
/// unless 3 or 4 components, MixedSign when a component disagrees with the
/// sign of the first non-zero one.
double compound_angle_to_degrees(std::span<const std::int64_t> measure);
inline double compound_angle_to_degrees(std::initializer_list<std::int64_t> measure) {
    return compound_angle_to_degrees(std::span<const std::int64_t>(measure.begin(), measure.size()));
}

using Vec3 = std::array<double, 3>;

struct AddressParams {
    std::string host;  // "IFCSITE" or "IFCBUILDING"
    std::vector<std::string> address_lines;
    std::string town;
    std::string region;
    std::string postal_code;
    std::string country;
};

struct LatLonParams {
    double latitude = 0;   // decimal degrees
    double longitude = 0;
    std::optional<double> elevation;  // metres
    std::vector<std::int64_t> raw_latitude;
    std::vector<std::int64_t> raw_longitude;
};

struct PlacementParams {
    Vec3 location{};
    std::optional<Vec3> axis;
    std::optional<Vec3> ref_direction;
    std::string unit;  // length unit of the file, e.g. "METRE", "MILLIMETRE"
};

struct ContextParams {
    Vec3 origin{};
    std::optional<Vec3> axis;
    std::optional<Vec3> ref_direction;
    std::optional<std::array<double, 2>> true_north;
    std::string unit;
};

struct MapParams {
    double eastings = 0;
    double northings = 0;
    double orthogonal_height = 0;
    double x_axis_abscissa = 1;
    double x_axis_ordinate = 0;
    std::optional<double> scale;
    std::string crs_name;
};

struct GeoParams {
    Level level;
    std::variant<AddressParams, LatLonParams, PlacementParams, ContextParams, MapParams> payload;
};

struct LoGeoRefReport {
    std::vector<GeoParams> detected;  // ordered by level, at most one per level
    std::vector<std::string> diagnostics;

    bool has(Level l) const;
    const GeoParams* get(Level l) const;
    std::vector<Level> levels() const;
};

/// Placement and context offsets at or below this magnitude count as origin.
inline constexpr double kOriginThreshold = 1e-9;

/// Read-only scan of `graph`. A model without IfcSite still yields a report,
/// with a NoSite diagnostic. L50 is only reported for IFC4.
LoGeoRefReport detect_georef(const spf::InstanceGraph& graph, schema::SchemaVersion version);

/// {"levels": [...], "params": {level: {...}}, "diagnostics": [...]}
nlohmann::json to_json(const LoGeoRefReport& report);

}  // namespace ifcaudit::georef
