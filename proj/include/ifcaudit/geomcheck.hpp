// Validity rules and mesh evaluation for the representation items of the
// geometry suite, plus the per-file check report used by `ifcaudit check`.

#pragma once

#include "ifcaudit/geomgen.hpp"
#include "ifcaudit/mesh.hpp"
#include "ifcaudit/spf.hpp"
#include "ifcaudit/validity.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifcaudit::geomcheck {

/// The representation item uses an entity or configuration this checker
/// does not model (general booleans, curved directrices, inner face bounds).
class UnsupportedShape : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ZRelation { AboveZ0, BelowZ0, StraddlesZ0, OnZ0 };
std::string_view to_string(ZRelation z);

struct ShapeClass {
    geomgen::ItemKind kind = geomgen::ItemKind::ExtrudedAreaSolid;
    geomgen::Profile profile = geomgen::Profile::None;

    /// "ExtrudedAreaSolid/Ellipse", "BooleanResult".
    std::string name() const;
    friend bool operator==(const ShapeClass&, const ShapeClass&) = default;
};

inline constexpr int kDefaultSegments = 64;
/// Segments per full circle from which curved geometry counts as smooth.
inline constexpr int kSmoothSegments = 32;

struct EvalOptions {
    int segments = kDefaultSegments;
    double precision = 1e-5;
    /// Radians per unit of plane angle in the file (pi/180 for degrees).
    double angle_factor = 1.0;
    /// Object placement applied before z_relation and the bbox are taken.
    mesh::Frame placement{};
};

struct EvaluationOutcome {
    bool displayed = false;
    /// Absent when no mesh could be produced.
    std::optional<ZRelation> z_relation;
    ShapeClass shape_class;
    /// True for surface models; display is then judged by area.
    bool surface = false;
    bool smooth_curves = false;
    std::optional<mesh::TriMesh> mesh;
    std::vector<std::string> warnings;
};

/// Applies the schema rules the suite exercises to the item rooted at
/// `root`. Throws UnsupportedShape for entities outside the suite's set.
ValidityVerdict check_validity(const spf::InstanceGraph& g, spf::EntityId root, double precision);

/// Tessellates the item. Items without a geometric meaning (zero depth,
/// extrusion direction inside the profile plane) come back with no mesh,
/// displayed = false and a NotEvaluable warning.
EvaluationOutcome evaluate(const spf::InstanceGraph& g, spf::EntityId root, const EvalOptions& options);
inline EvaluationOutcome evaluate(const spf::InstanceGraph& g, spf::EntityId root, double precision,
                                  int segments = kDefaultSegments) {
    EvalOptions o;
    o.precision = precision;
    o.segments = segments;
    return evaluate(g, root, o);
}

enum class Observation { Y, N, Unknown };
std::string_view to_string(Observation o);

enum class TupleFlag { NeverExported, LoosenCandidate, PractitionerProblem };
std::string_view to_string(TupleFlag f);

/// <exported, imported, valid>.
struct TupleClassification {
    Observation exported = Observation::Unknown;
    Observation imported = Observation::N;
    Observation valid = Observation::N;
    std::set<TupleFlag> flags;

    /// "<Y,Y,N>"; "?" for an unknown export observation.
    std::string label() const;
};

TupleClassification classify_tuple(const ValidityVerdict& verdict, const EvaluationOutcome& outcome,
                                   std::optional<bool> exported = std::nullopt);

/// Radians per plane angle unit declared in the file; 1 when none is found.
double plane_angle_factor(const spf::InstanceGraph& g);
/// Metres per length unit declared in the file; 1 when none is found.
double length_unit_factor(const spf::InstanceGraph& g);
/// Precision of the first 3D model context; nullopt when there is none.
std::optional<double> context_precision(const spf::InstanceGraph& g);

/// World frame of an IFCLOCALPLACEMENT chain.
mesh::Frame resolve_placement(const spf::InstanceGraph& g, spf::EntityId local_placement);

struct ItemReport {
    std::string slot;
    std::string definition;
    spf::EntityId product = 0;
    spf::EntityId root = 0;
    ValidityVerdict validity;
    EvaluationOutcome outcome;
    /// Set when a manifest was given and lists the slot.
    std::optional<ValidityVerdict> expected;
    /// Set when the item could not be checked at all.
    std::optional<std::string> error;
};

struct CheckOptions {
    int segments = kDefaultSegments;
    std::optional<geomgen::SuiteManifest> manifest;
};

struct CheckReport {
    double precision = 1e-5;
    std::vector<ItemReport> items;
    std::vector<std::string> diagnostics;

    std::size_t invalid_count() const;
    /// Items whose verdict differs from the manifest.
    std::vector<std::string> mismatches() const;
};

/// Checks every product whose body representation has a single item. The
/// item name is the product Name and its definition the Description, as
/// written by the suite generator. Meshes are in world coordinates, metres.
CheckReport check_file(const spf::InstanceGraph& g, const CheckOptions& options = {});

nlohmann::json to_json(const ItemReport& r);
nlohmann::json to_json(const CheckReport& r);

/// All item meshes as one OBJ document, one object per slot.
void write_meshes_obj(std::ostream& out, const CheckReport& r);

}  // namespace ifcaudit::geomcheck
