// Synthetic geometry conformance suite: 30 test items laid out on a 6 x 5
// grid (rows A-F, columns 1-5), 23 of them for IFC4.

#pragma once

#include "ifcaudit/schema.hpp"
#include "ifcaudit/spf.hpp"
#include "ifcaudit/validity.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifcaudit::geomgen {

using schema::SchemaVersion;

enum class ItemKind {
    BooleanResult,
    BooleanClippingResult,
    ShellBasedSurfaceModel,
    FacetedBrep,
    ExtrudedAreaSolid,
    RevolvedAreaSolid,
    SweptDiskSolid,
};

enum class Profile { Rectangle, Ellipse, IShape, CraneRailAShape, Disk, None };

enum class Variant {
    Nominal,
    NegativeDepth,
    ZeroDepth,
    NonNormalizedDirection,
    DirectionParallelToProfile,
    Slanted,
    ParamRangeOutsideCurve,
    Subtraction,
    Intersection,
    Union,
    HalfspaceClip,
    BelowTolerance,
};

std::string_view to_string(ItemKind k);
std::string_view to_string(Profile p);
std::string_view to_string(Variant v);

struct Slot {
    char row = 'A';  // 'A'..'F'
    int column = 1;  // 1..5

    std::string name() const { return std::string(1, row) + std::to_string(column); }
    int row_index() const { return row - 'A'; }
    static std::optional<Slot> parse(std::string_view s);

    friend auto operator<=>(const Slot&, const Slot&) = default;
};

struct GeometryTestItem {
    Slot slot;
    std::string definition_name;
    ItemKind kind = ItemKind::ExtrudedAreaSolid;
    Profile profile = Profile::None;
    Variant variant = Variant::Nominal;
    bool in_ifc2x3 = true;
    bool in_ifc4 = true;
    ValidityVerdict expected_validity;

    bool available_in(SchemaVersion v) const noexcept {
        return v == SchemaVersion::IFC2X3 ? in_ifc2x3 : in_ifc4;
    }
};

/// The 30 canonical items in grid order A1..F5.
const std::vector<GeometryTestItem>& canonical_items();
const GeometryTestItem* find_item(std::string_view slot_or_definition);

/// Extra item with an extrusion depth of precision / 10, placed in row G.
GeometryTestItem below_tolerance_item();

// Dimensions used by the generator. Oracles in the tests derive expected
// volumes from these.
namespace dims {
inline constexpr double kCube = 1.0;
inline constexpr double kBooleanOffset = 0.5;  // second cube shifted along +X
inline constexpr double kClipHeight = 0.5;     // half-space boundary plane z = 0.5
inline constexpr double kRectX = 1.0, kRectY = 1.0;
inline constexpr double kEllipseA = 1.0, kEllipseB = 0.5;
inline constexpr double kIWidth = 0.6, kIDepth = 1.0, kIWeb = 0.1, kIFlange = 0.1, kIFillet = 0.05;
inline constexpr double kRailHeight = 1.0, kRailBaseWidth2 = 0.8, kRailBaseWidth4 = 0.4, kRailRadius = 0.05;
inline constexpr double kRailHeadWidth = 0.5, kRailHeadDepth2 = 0.15, kRailHeadDepth3 = 0.3, kRailWeb = 0.15;
inline constexpr double kRailBaseDepth1 = 0.1, kRailBaseDepth2 = 0.2, kRailBaseDepth3 = 0.3;
inline constexpr double kDepth = 2.0;
inline constexpr double kRevolutionOffset = 2.0;  // axis at local y = -2, parallel to local X
inline constexpr double kDiskRadius = 0.25;
inline constexpr double kDirectrixLength = 3.0;
inline constexpr double kDirectrixZ = 0.5;
inline constexpr double kParamStart = 0.0, kParamEnd = 1.0;
inline constexpr double kBadParamStart = -0.5, kBadParamEnd = 1.5;
}  // namespace dims

/// Outline of the crane rail A-shape in profile coordinates (bounding box
/// centred on the origin), counter-clockwise. The rail's radius attribute is
/// written but not modelled.
std::vector<std::array<double, 2>> crane_rail_outline();

class UnavailableItem : public std::runtime_error {
public:
    UnavailableItem(const GeometryTestItem& item, SchemaVersion v);
};

struct FragmentInstance {
    spf::EntityId id;
    std::string type;
    std::vector<spf::Value> attributes;
};

/// Geometry instances of one item. `root` is the representation item
/// (the solid, boolean result or surface model).
struct Fragment {
    std::vector<FragmentInstance> instances;
    spf::EntityId root = 0;
    std::string representation_type;  // "CSG", "Clipping", "SweptSolid", ...
};

/// Builds the item's geometry with ids starting at `first_id`. Throws
/// UnavailableItem when the item does not exist in `version`.
Fragment generate_item(const GeometryTestItem& item, SchemaVersion version, spf::EntityId first_id = 1,
                       double precision = 1e-5);

struct SuiteOptions {
    double spacing = 5.0;
    double precision = 1e-5;
    /// Seconds since the Unix epoch written to the header and owner history.
    std::int64_t timestamp = 1704067200;
    bool include_below_tolerance = false;
    /// Slots or definition names that must be present; an entry unavailable
    /// in the requested schema raises UnavailableItem.
    std::vector<std::string> require_items = {};
};

struct SuiteManifest {
    SchemaVersion schema = SchemaVersion::IFC2X3;
    std::vector<GeometryTestItem> items;
    double grid_spacing = 5.0;
    double precision = 1e-5;
    std::vector<std::string> notes;
};

struct GeneratedSuite {
    spf::InstanceGraph graph;
    SuiteManifest manifest;
};

/// Throws std::invalid_argument unless spacing > 0 and precision > 0.
GeneratedSuite generate_geometry_suite(SchemaVersion version, const SuiteOptions& options = {});

nlohmann::json manifest_to_json(const SuiteManifest& m);
/// Throws std::invalid_argument on malformed input.
SuiteManifest manifest_from_json(const nlohmann::json& j);

/// Deterministic 22-character IFC GlobalId for a sequence number.
std::string make_guid(std::uint64_t seed, std::uint64_t n);

/// "YYYY-MM-DDTHH:MM:SS" in UTC.
std::string iso_timestamp(std::int64_t epoch_seconds);

}  // namespace ifcaudit::geomgen
