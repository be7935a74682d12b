#include "ifcaudit/geomgen.hpp"

#include <cmath>
#include <ctime>
#include <numbers>

namespace ifcaudit::geomgen {

using spf::EntityId;
using spf::Value;

namespace {

using enum ItemKind;
using enum Profile;
using enum Variant;
using R = ValidityReason;

GeometryTestItem item(char row, int col, std::string def, ItemKind kind, Profile profile, Variant variant,
                      bool in_ifc4 = true, std::set<R> reasons = {}) {
    GeometryTestItem it;
    it.slot = {row, col};
    it.definition_name = std::move(def);
    it.kind = kind;
    it.profile = profile;
    it.variant = variant;
    it.in_ifc4 = in_ifc4;
    it.expected_validity.reasons = std::move(reasons);
    return it;
}

std::vector<GeometryTestItem> build_items() {
    const std::set<R> pos{R::PositiveLength};
    const std::set<R> dir{R::ValidExtrusionDirection};
    return {
        item('A', 1, "IfcBooleanResult_1", BooleanResult, None, Subtraction),
        item('A', 2, "IfcBooleanResult_2", BooleanResult, None, Intersection),
        item('A', 3, "IfcBooleanResult_3", BooleanResult, None, Union),
        item('A', 4, "IfcBooleanClippingResult_1", BooleanClippingResult, None, HalfspaceClip),
        item('A', 5, "IfcShellBasedSurfaceModel_1", ShellBasedSurfaceModel, None, Nominal),
        item('B', 1, "IfcFacetedBrep_1", FacetedBrep, None, Nominal),
        item('B', 2, "IfcExtrudedAreaSolid_1", ExtrudedAreaSolid, Rectangle, Nominal),
        item('B', 3, "IfcExtrudedAreaSolid_2", ExtrudedAreaSolid, Rectangle, NegativeDepth, true, pos),
        item('B', 4, "IfcExtrudedAreaSolid_3", ExtrudedAreaSolid, Rectangle, ZeroDepth, true, pos),
        item('B', 5, "IfcExtrudedAreaSolid_4", ExtrudedAreaSolid, Rectangle, NonNormalizedDirection),
        item('C', 1, "IfcExtrudedAreaSolid_7", ExtrudedAreaSolid, Rectangle, DirectionParallelToProfile, true, dir),
        item('C', 2, "IfcExtrudedAreaSolid_10", ExtrudedAreaSolid, Rectangle, Slanted),
        item('C', 3, "IfcExtrudedAreaSolid_13", ExtrudedAreaSolid, Ellipse, Nominal),
        item('C', 4, "IfcExtrudedAreaSolid_16", ExtrudedAreaSolid, Ellipse, NonNormalizedDirection),
        item('C', 5, "IfcExtrudedAreaSolid_19", ExtrudedAreaSolid, Ellipse, DirectionParallelToProfile, true, dir),
        item('D', 1, "IfcExtrudedAreaSolid_22", ExtrudedAreaSolid, Ellipse, Slanted),
        item('D', 2, "IfcExtrudedAreaSolid_25", ExtrudedAreaSolid, IShape, Nominal),
        item('D', 3, "IfcExtrudedAreaSolid_28", ExtrudedAreaSolid, IShape, NonNormalizedDirection),
        item('D', 4, "IfcExtrudedAreaSolid_31", ExtrudedAreaSolid, IShape, DirectionParallelToProfile, true, dir),
        item('D', 5, "IfcExtrudedAreaSolid_34", ExtrudedAreaSolid, IShape, Slanted),
        item('E', 1, "IfcExtrudedAreaSolid_37", ExtrudedAreaSolid, CraneRailAShape, Nominal, false),
        item('E', 2, "IfcExtrudedAreaSolid_40", ExtrudedAreaSolid, CraneRailAShape, NonNormalizedDirection, false),
        item('E', 3, "IfcExtrudedAreaSolid_43", ExtrudedAreaSolid, CraneRailAShape, DirectionParallelToProfile,
             false, dir),
        item('E', 4, "IfcExtrudedAreaSolid_46", ExtrudedAreaSolid, CraneRailAShape, Slanted, false),
        item('E', 5, "IfcRevolvedAreaSolid_1", RevolvedAreaSolid, Rectangle, Nominal),
        item('F', 1, "IfcRevolvedAreaSolid_2", RevolvedAreaSolid, Ellipse, Nominal),
        item('F', 2, "IfcRevolvedAreaSolid_3", RevolvedAreaSolid, IShape, Nominal),
        item('F', 3, "IfcRevolvedAreaSolid_4", RevolvedAreaSolid, CraneRailAShape, Nominal, false),
        item('F', 4, "IfcSweptDiskSolid_1", SweptDiskSolid, Disk, Nominal, false),
        item('F', 5, "IfcSweptDiskSolid_2", SweptDiskSolid, Disk, ParamRangeOutsideCurve, false, {R::ParamRange}),
    };
}

// Collects instances with consecutive ids.
class Builder {
public:
    explicit Builder(EntityId first) : next_(first) {}

    EntityId add(std::string type, std::vector<Value> attrs) {
        EntityId id = next_++;
        out_.push_back({id, std::move(type), std::move(attrs)});
        return id;
    }

    EntityId point(double x, double y, double z) {
        return add("IFCCARTESIANPOINT", {Value::list({Value::real(x), Value::real(y), Value::real(z)})});
    }
    EntityId point2(double x, double y) {
        return add("IFCCARTESIANPOINT", {Value::list({Value::real(x), Value::real(y)})});
    }
    EntityId direction(double x, double y, double z) {
        return add("IFCDIRECTION", {Value::list({Value::real(x), Value::real(y), Value::real(z)})});
    }
    EntityId axis3(double x, double y, double z) {
        EntityId p = point(x, y, z);
        return add("IFCAXIS2PLACEMENT3D", {Value::ref(p), Value::unset(), Value::unset()});
    }
    EntityId axis2_origin() {
        EntityId p = point2(0, 0);
        return add("IFCAXIS2PLACEMENT2D", {Value::ref(p), Value::unset()});
    }

    EntityId next_id() const { return next_; }
    std::vector<FragmentInstance>& instances() { return out_; }

private:
    EntityId next_;
    std::vector<FragmentInstance> out_;
};

Value area() { return Value::enumeration("AREA"); }

EntityId make_profile(Builder& b, Profile p, SchemaVersion v) {
    using namespace dims;
    EntityId pos = b.axis2_origin();
    switch (p) {
        case Rectangle:
            return b.add("IFCRECTANGLEPROFILEDEF", {area(), Value::text("Rectangle"), Value::ref(pos),
                                                    Value::real(kRectX), Value::real(kRectY)});
        case Ellipse:
            return b.add("IFCELLIPSEPROFILEDEF", {area(), Value::text("Ellipse"), Value::ref(pos),
                                                  Value::real(kEllipseA), Value::real(kEllipseB)});
        case IShape: {
            std::vector<Value> a = {area(),
                                    Value::text("IShape"),
                                    Value::ref(pos),
                                    Value::real(kIWidth),
                                    Value::real(kIDepth),
                                    Value::real(kIWeb),
                                    Value::real(kIFlange),
                                    Value::real(kIFillet)};
            if (v == SchemaVersion::IFC4) {
                a.push_back(Value::unset());  // FlangeEdgeRadius
                a.push_back(Value::unset());  // FlangeSlope
            }
            return b.add("IFCISHAPEPROFILEDEF", std::move(a));
        }
        case CraneRailAShape: {
            auto outline = crane_rail_outline();
            double a2 = 0, cy = 0;
            for (std::size_t i = 0; i < outline.size(); ++i) {
                auto [x0, y0] = outline[i];
                auto [x1, y1] = outline[(i + 1) % outline.size()];
                double cross = x0 * y1 - x1 * y0;
                a2 += cross;
                cy += (y0 + y1) * cross;
            }
            double cog = cy / (3 * a2) + kRailHeight / 2;  // measured from the base
            return b.add("IFCCRANERAILASHAPEPROFILEDEF",
                         {area(), Value::text("CraneRailA"), Value::ref(pos), Value::real(kRailHeight),
                          Value::real(kRailBaseWidth2), Value::real(kRailRadius), Value::real(kRailHeadWidth),
                          Value::real(kRailHeadDepth2), Value::real(kRailHeadDepth3), Value::real(kRailWeb),
                          Value::real(kRailBaseWidth4), Value::real(kRailBaseDepth1), Value::real(kRailBaseDepth2),
                          Value::real(kRailBaseDepth3), Value::real(cog)});
        }
        case Disk:
        case None: break;
    }
    throw std::logic_error("no area profile for this item");
}

EntityId extrusion(Builder& b, EntityId profile, std::array<double, 3> dir, double depth) {
    EntityId pos = b.axis3(0, 0, 0);
    EntityId d = b.direction(dir[0], dir[1], dir[2]);
    return b.add("IFCEXTRUDEDAREASOLID", {Value::ref(profile), Value::ref(pos), Value::ref(d), Value::real(depth)});
}

EntityId block(Builder& b, double x) {
    using dims::kCube;
    EntityId pos = b.axis3(x, 0, 0);
    return b.add("IFCBLOCK", {Value::ref(pos), Value::real(kCube), Value::real(kCube), Value::real(kCube)});
}

// Unit cube [0,1]^3 as six outward-oriented faces over eight shared points.
std::vector<Value> cube_faces(Builder& b) {
    EntityId p[8];
    for (int i = 0; i < 8; ++i) p[i] = b.point(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    static constexpr int kFaces[6][4] = {
        {0, 2, 3, 1},  // z = 0
        {4, 5, 7, 6},  // z = 1
        {0, 1, 5, 4},  // y = 0
        {2, 6, 7, 3},  // y = 1
        {0, 4, 6, 2},  // x = 0
        {1, 3, 7, 5},  // x = 1
    };
    std::vector<Value> faces;
    for (auto& f : kFaces) {
        EntityId loop = b.add("IFCPOLYLOOP", {Value::list({Value::ref(p[f[0]]), Value::ref(p[f[1]]),
                                                           Value::ref(p[f[2]]), Value::ref(p[f[3]])})});
        EntityId bound = b.add("IFCFACEOUTERBOUND", {Value::ref(loop), Value::enumeration("T")});
        faces.push_back(Value::ref(b.add("IFCFACE", {Value::list({Value::ref(bound)})})));
    }
    return faces;
}

std::array<double, 3> extrusion_direction(Variant v) {
    switch (v) {
        case NonNormalizedDirection: return {0, 0, 2};
        case DirectionParallelToProfile: return {1, 0, 0};
        case Slanted: return {0, 0.6, 0.8};
        default: return {0, 0, 1};
    }
}

double extrusion_depth(Variant v, double precision) {
    switch (v) {
        case NegativeDepth: return -dims::kDepth;
        case ZeroDepth: return 0.0;
        case BelowTolerance: return precision / 10;
        default: return dims::kDepth;
    }
}

const char* boolean_operator(Variant v) {
    switch (v) {
        case Subtraction: return "DIFFERENCE";
        case Intersection: return "INTERSECTION";
        case Union: return "UNION";
        default: throw std::logic_error("not a boolean variant");
    }
}

// splitmix64
std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(ItemKind k) {
    switch (k) {
        case BooleanResult: return "BooleanResult";
        case BooleanClippingResult: return "BooleanClippingResult";
        case ShellBasedSurfaceModel: return "ShellBasedSurfaceModel";
        case FacetedBrep: return "FacetedBrep";
        case ExtrudedAreaSolid: return "ExtrudedAreaSolid";
        case RevolvedAreaSolid: return "RevolvedAreaSolid";
        case SweptDiskSolid: return "SweptDiskSolid";
    }
    return "?";
}

std::string_view to_string(Profile p) {
    switch (p) {
        case Rectangle: return "Rectangle";
        case Ellipse: return "Ellipse";
        case IShape: return "IShape";
        case CraneRailAShape: return "CraneRailAShape";
        case Disk: return "Disk";
        case None: return "None";
    }
    return "?";
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Nominal: return "Nominal";
        case NegativeDepth: return "NegativeDepth";
        case ZeroDepth: return "ZeroDepth";
        case NonNormalizedDirection: return "NonNormalizedDirection";
        case DirectionParallelToProfile: return "DirectionParallelToProfile";
        case Slanted: return "Slanted";
        case ParamRangeOutsideCurve: return "ParamRangeOutsideCurve";
        case Subtraction: return "Subtraction";
        case Intersection: return "Intersection";
        case Union: return "Union";
        case HalfspaceClip: return "HalfspaceClip";
        case BelowTolerance: return "BelowTolerance";
    }
    return "?";
}

std::optional<Slot> Slot::parse(std::string_view s) {
    if (s.size() != 2) return std::nullopt;
    char r = s[0];
    if (r >= 'a' && r <= 'z') r = static_cast<char>(r - 'a' + 'A');
    if (r < 'A' || r > 'Z' || s[1] < '1' || s[1] > '9') return std::nullopt;
    return Slot{r, s[1] - '0'};
}

const std::vector<GeometryTestItem>& canonical_items() {
    static const std::vector<GeometryTestItem> items = build_items();
    return items;
}

GeometryTestItem below_tolerance_item() {
    auto it = item('G', 1, "IfcExtrudedAreaSolid_BelowTolerance", ExtrudedAreaSolid, Rectangle, BelowTolerance);
    it.expected_validity.warnings = {R::BelowPrecision};
    return it;
}

const GeometryTestItem* find_item(std::string_view key) {
    auto slot = Slot::parse(key);
    for (const auto& it : canonical_items()) {
        if (slot && it.slot == *slot) return &it;
        if (it.definition_name == key) return &it;
    }
    return nullptr;
}

std::vector<std::array<double, 2>> crane_rail_outline() {
    using namespace dims;
    const double y0 = -kRailHeight / 2, y1 = kRailHeight / 2;
    std::vector<std::array<double, 2>> right = {
        {kRailBaseWidth2 / 2, y0},
        {kRailBaseWidth2 / 2, y0 + kRailBaseDepth1},
        {kRailBaseWidth4 / 2, y0 + kRailBaseDepth2},
        {kRailWeb / 2, y0 + kRailBaseDepth3},
        {kRailWeb / 2, y1 - kRailHeadDepth3},
        {kRailHeadWidth / 2, y1 - kRailHeadDepth2},
        {kRailHeadWidth / 2, y1},
    };
    auto out = right;
    for (auto it = right.rbegin(); it != right.rend(); ++it) out.push_back({-(*it)[0], (*it)[1]});
    return out;
}

UnavailableItem::UnavailableItem(const GeometryTestItem& item, SchemaVersion v)
    : std::runtime_error("item " + item.slot.name() + " (" + item.definition_name + ") is not available in " +
                         std::string(schema::to_string(v))) {}

Fragment generate_item(const GeometryTestItem& it, SchemaVersion v, EntityId first_id, double precision) {
    if (!it.available_in(v)) throw UnavailableItem(it, v);
    Builder b(first_id);
    Fragment f;
    switch (it.kind) {
        case BooleanResult: {
            EntityId a = block(b, 0);
            EntityId c = block(b, dims::kBooleanOffset);
            f.root = b.add("IFCBOOLEANRESULT",
                           {Value::enumeration(boolean_operator(it.variant)), Value::ref(a), Value::ref(c)});
            f.representation_type = "CSG";
            break;
        }
        case BooleanClippingResult: {
            EntityId cube = extrusion(b, make_profile(b, Rectangle, v), {0, 0, 1}, dims::kCube);
            EntityId loc = b.point(0, 0, dims::kClipHeight);
            EntityId z = b.direction(0, 0, 1);
            EntityId x = b.direction(1, 0, 0);
            EntityId pos = b.add("IFCAXIS2PLACEMENT3D", {Value::ref(loc), Value::ref(z), Value::ref(x)});
            EntityId plane = b.add("IFCPLANE", {Value::ref(pos)});
            // AgreementFlag .T.: the normal points away from the half-space,
            // so the half-space is z <= 0.5 and the difference keeps the top.
            EntityId hs = b.add("IFCHALFSPACESOLID", {Value::ref(plane), Value::enumeration("T")});
            f.root = b.add("IFCBOOLEANCLIPPINGRESULT",
                           {Value::enumeration("DIFFERENCE"), Value::ref(cube), Value::ref(hs)});
            f.representation_type = "Clipping";
            break;
        }
        case ShellBasedSurfaceModel: {
            auto faces = cube_faces(b);
            EntityId shell = b.add("IFCOPENSHELL", {Value::list(std::move(faces))});
            f.root = b.add("IFCSHELLBASEDSURFACEMODEL", {Value::list({Value::ref(shell)})});
            f.representation_type = "SurfaceModel";
            break;
        }
        case FacetedBrep: {
            auto faces = cube_faces(b);
            EntityId shell = b.add("IFCCLOSEDSHELL", {Value::list(std::move(faces))});
            f.root = b.add("IFCFACETEDBREP", {Value::ref(shell)});
            f.representation_type = "Brep";
            break;
        }
        case ExtrudedAreaSolid: {
            EntityId prof = make_profile(b, it.profile, v);
            f.root = extrusion(b, prof, extrusion_direction(it.variant), extrusion_depth(it.variant, precision));
            f.representation_type = "SweptSolid";
            break;
        }
        case RevolvedAreaSolid: {
            EntityId prof = make_profile(b, it.profile, v);
            EntityId pos = b.axis3(0, 0, 0);
            EntityId loc = b.point(0, -dims::kRevolutionOffset, 0);
            EntityId dir = b.direction(1, 0, 0);
            EntityId ax = b.add("IFCAXIS1PLACEMENT", {Value::ref(loc), Value::ref(dir)});
            f.root = b.add("IFCREVOLVEDAREASOLID", {Value::ref(prof), Value::ref(pos), Value::ref(ax),
                                                    Value::real(2 * std::numbers::pi)});
            f.representation_type = "SweptSolid";
            break;
        }
        case SweptDiskSolid: {
            using namespace dims;
            EntityId p0 = b.point(-kDirectrixLength / 2, 0, kDirectrixZ);
            EntityId p1 = b.point(kDirectrixLength / 2, 0, kDirectrixZ);
            EntityId line = b.add("IFCPOLYLINE", {Value::list({Value::ref(p0), Value::ref(p1)})});
            bool bad = it.variant == ParamRangeOutsideCurve;
            f.root = b.add("IFCSWEPTDISKSOLID",
                           {Value::ref(line), Value::real(kDiskRadius), Value::unset(),
                            Value::real(bad ? kBadParamStart : kParamStart), Value::real(bad ? kBadParamEnd : kParamEnd)});
            f.representation_type = "AdvancedSweptSolid";
            break;
        }
    }
    f.instances = std::move(b.instances());
    return f;
}

std::string make_guid(std::uint64_t seed, std::uint64_t n) {
    static constexpr char kChars[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_$";
    std::uint64_t hi = mix(seed ^ mix(n));
    std::uint64_t lo = mix(hi ^ n);
    // 128 bits: 2 bits in the first character, then 21 six-bit groups.
    std::string out(22, '0');
    out[0] = kChars[hi >> 62];
    for (int i = 1; i < 22; ++i) {
        int bit = 126 - 6 * i;  // position of the group's lowest bit
        std::uint64_t group;
        if (bit >= 64) {
            group = hi >> (bit - 64);
        } else if (bit + 6 <= 64) {
            group = lo >> bit;
        } else {
            group = (lo >> bit) | (hi << (64 - bit));
        }
        out[static_cast<std::size_t>(i)] = kChars[group & 63];
    }
    return out;
}

std::string iso_timestamp(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    return buf;
}

GeneratedSuite generate_geometry_suite(SchemaVersion v, const SuiteOptions& opt) {
    if (!(opt.spacing > 0)) throw std::invalid_argument("spacing must be positive");
    if (!(opt.precision > 0)) throw std::invalid_argument("precision must be positive");

    std::vector<GeometryTestItem> items;
    for (const auto& it : canonical_items())
        if (it.available_in(v)) items.push_back(it);
    for (const auto& key : opt.require_items) {
        const GeometryTestItem* it = find_item(key);
        if (!it) throw std::invalid_argument("unknown item " + key);
        if (!it->available_in(v)) throw UnavailableItem(*it, v);
    }
    if (opt.include_below_tolerance) items.push_back(below_tolerance_item());

    GeneratedSuite out;
    auto& g = out.graph;
    auto& h = g.header();
    h.description = {"ViewDefinition [CoordinationView]"};
    h.file_name.name = v == SchemaVersion::IFC2X3 ? "geometry_suite_ifc2x3.ifc" : "geometry_suite_ifc4.ifc";
    h.file_name.timestamp = iso_timestamp(opt.timestamp);
    h.file_name.authors = {""};
    h.file_name.organizations = {""};
    h.file_name.preprocessor_version = "ifcaudit";
    h.file_name.originating_system = "ifcaudit geometry suite";
    h.file_name.authorization = "";
    h.file_schema = {std::string(schema::to_string(v))};

    const std::uint64_t seed = v == SchemaVersion::IFC2X3 ? 0x2C3ull : 0x4ull;
    std::uint64_t guid_n = 0;
    auto guid = [&] { return Value::text(make_guid(seed, guid_n++)); };

    Builder b(1);
    // Owner history chain.
    EntityId person = b.add("IFCPERSON", {Value::unset(), Value::text("Suite"), Value::text("Generator"),
                                          Value::unset(), Value::unset(), Value::unset(), Value::unset(),
                                          Value::unset()});
    EntityId org = b.add("IFCORGANIZATION",
                         {Value::unset(), Value::text("ifcaudit"), Value::unset(), Value::unset(), Value::unset()});
    EntityId po = b.add("IFCPERSONANDORGANIZATION", {Value::ref(person), Value::ref(org), Value::unset()});
    EntityId app = b.add("IFCAPPLICATION", {Value::ref(org), Value::text("0.1"), Value::text("ifcaudit"),
                                            Value::text("ifcaudit")});
    EntityId oh = b.add("IFCOWNERHISTORY",
                        {Value::ref(po), Value::ref(app), Value::unset(), Value::enumeration("NOCHANGE"),
                         Value::unset(), Value::unset(), Value::unset(), Value::integer(opt.timestamp)});
    auto root_attrs = [&](std::string name) {
        return std::vector<Value>{guid(), Value::ref(oh), Value::text(std::move(name)), Value::unset()};
    };

    // Units and contexts.
    auto si = [&](const char* type, const char* name) {
        return b.add("IFCSIUNIT", {Value::derived(), Value::enumeration(type), Value::unset(), Value::enumeration(name)});
    };
    EntityId u_len = si("LENGTHUNIT", "METRE");
    EntityId u_area = si("AREAUNIT", "SQUARE_METRE");
    EntityId u_vol = si("VOLUMEUNIT", "CUBIC_METRE");
    EntityId u_ang = si("PLANEANGLEUNIT", "RADIAN");
    EntityId units = b.add("IFCUNITASSIGNMENT", {Value::list({Value::ref(u_len), Value::ref(u_area),
                                                              Value::ref(u_vol), Value::ref(u_ang)})});
    EntityId wcs = b.axis3(0, 0, 0);
    EntityId ctx = b.add("IFCGEOMETRICREPRESENTATIONCONTEXT",
                         {Value::unset(), Value::text("Model"), Value::integer(3), Value::real(opt.precision),
                          Value::ref(wcs), Value::unset()});
    EntityId body = b.add("IFCGEOMETRICREPRESENTATIONSUBCONTEXT",
                          {Value::text("Body"), Value::text("Model"), Value::derived(), Value::derived(),
                           Value::derived(), Value::derived(), Value::ref(ctx), Value::unset(),
                           Value::enumeration("MODEL_VIEW"), Value::unset()});

    // Spatial structure.
    auto pa = root_attrs("Geometry suite");
    pa.insert(pa.end(), {Value::unset(), Value::unset(), Value::unset(), Value::list({Value::ref(ctx)}),
                         Value::ref(units)});
    EntityId project = b.add("IFCPROJECT", std::move(pa));

    auto local_placement = [&](std::optional<EntityId> rel_to, double x, double y) {
        EntityId ax = b.axis3(x, y, 0);
        return b.add("IFCLOCALPLACEMENT", {rel_to ? Value::ref(*rel_to) : Value::unset(), Value::ref(ax)});
    };
    EntityId site_pl = local_placement(std::nullopt, 0, 0);
    auto sa = root_attrs("Site");
    sa.insert(sa.end(), {Value::unset(), Value::ref(site_pl), Value::unset(), Value::unset(), Value::enumeration("ELEMENT"),
                         Value::unset(), Value::unset(), Value::unset(), Value::unset(), Value::unset()});
    EntityId site = b.add("IFCSITE", std::move(sa));
    EntityId bldg_pl = local_placement(site_pl, 0, 0);
    auto ba = root_attrs("Building");
    ba.insert(ba.end(), {Value::unset(), Value::ref(bldg_pl), Value::unset(), Value::unset(),
                         Value::enumeration("ELEMENT"), Value::unset(), Value::unset(), Value::unset()});
    EntityId building = b.add("IFCBUILDING", std::move(ba));
    EntityId storey_pl = local_placement(bldg_pl, 0, 0);
    auto sta = root_attrs("Ground floor");
    sta.insert(sta.end(), {Value::unset(), Value::ref(storey_pl), Value::unset(), Value::unset(),
                           Value::enumeration("ELEMENT"), Value::real(0.0)});
    EntityId storey = b.add("IFCBUILDINGSTOREY", std::move(sta));
    auto rel = [&](EntityId whole, EntityId part) {
        auto r = root_attrs("");
        r[2] = Value::unset();
        r.push_back(Value::ref(whole));
        r.push_back(Value::list({Value::ref(part)}));
        b.add("IFCRELAGGREGATES", std::move(r));
    };
    rel(project, site);
    rel(site, building);
    rel(building, storey);

    // Items.
    std::vector<Value> proxies;
    for (const auto& it : items) {
        Fragment frag = generate_item(it, v, b.next_id(), opt.precision);
        for (auto& fi : frag.instances) b.add(std::move(fi.type), std::move(fi.attributes));
        EntityId pl = local_placement(storey_pl, (it.slot.column - 1) * opt.spacing, it.slot.row_index() * opt.spacing);
        EntityId rep = b.add("IFCSHAPEREPRESENTATION",
                             {Value::ref(body), Value::text("Body"), Value::text(frag.representation_type),
                              Value::list({Value::ref(frag.root)})});
        EntityId pds = b.add("IFCPRODUCTDEFINITIONSHAPE", {Value::unset(), Value::unset(), Value::list({Value::ref(rep)})});
        auto xa = root_attrs(it.slot.name());
        xa[3] = Value::text(it.definition_name);
        xa.insert(xa.end(), {Value::unset(), Value::ref(pl), Value::ref(pds), Value::unset(), Value::unset()});
        proxies.push_back(Value::ref(b.add("IFCBUILDINGELEMENTPROXY", std::move(xa))));
    }
    auto contained = root_attrs("");
    contained[2] = Value::unset();
    contained.push_back(Value::list(std::move(proxies)));
    contained.push_back(Value::ref(storey));
    b.add("IFCRELCONTAINEDINSPATIALSTRUCTURE", std::move(contained));

    for (auto& fi : b.instances()) g.add(fi.id, fi.type, fi.attributes);

    auto& m = out.manifest;
    m.schema = v;
    m.items = std::move(items);
    m.grid_spacing = opt.spacing;
    m.precision = opt.precision;
    m.notes.push_back(
        "F4 (IfcSweptDiskSolid_1, nominal swept disk) is left out of the IFC4 suite following the item table, "
        "although IfcSweptDiskSolid exists in IFC4.");
    m.notes.push_back("I-shape fillet radii are written to the profiles; whether a viewer shows them is reported, "
                      "not scored.");
    return out;
}

namespace {

nlohmann::json verdict_json(const ValidityVerdict& vv) {
    nlohmann::json reasons = nlohmann::json::array(), warnings = nlohmann::json::array();
    for (auto r : vv.reasons) reasons.push_back(to_string(r));
    for (auto r : vv.warnings) warnings.push_back(to_string(r));
    return {{"status", vv.status()}, {"reasons", reasons}, {"warnings", warnings}};
}

template <class E, std::size_t N>
E enum_from(const std::string& s, const E (&all)[N], const char* what) {
    for (E e : all)
        if (to_string(e) == s) return e;
    throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

ValidityReason reason_from(const std::string& s) {
    for (auto r : {R::PositiveLength, R::ValidExtrusionDirection, R::ParamRange, R::BelowPrecision})
        if (to_string(r) == s) return r;
    throw std::invalid_argument("unknown validity reason '" + s + "'");
}

}  // namespace

nlohmann::json manifest_to_json(const SuiteManifest& m) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : m.items) {
        nlohmann::json avail = nlohmann::json::array();
        if (it.in_ifc2x3) avail.push_back("IFC2X3");
        if (it.in_ifc4) avail.push_back("IFC4");
        items.push_back({{"slot", it.slot.name()},
                         {"definition_name", it.definition_name},
                         {"kind", to_string(it.kind)},
                         {"profile", to_string(it.profile)},
                         {"variant", to_string(it.variant)},
                         {"available_in", avail},
                         {"expected_validity", verdict_json(it.expected_validity)}});
    }
    return {{"format", "ifcaudit-suite-manifest/1"},
            {"schema", schema::to_string(m.schema)},
            {"grid_spacing", m.grid_spacing},
            {"precision", m.precision},
            {"notes", m.notes},
            {"items", items}};
}

SuiteManifest manifest_from_json(const nlohmann::json& j) {
    try {
        SuiteManifest m;
        auto sv = schema::parse_schema_version(j.at("schema").get<std::string>());
        if (!sv) throw std::invalid_argument("unknown schema");
        m.schema = *sv;
        m.grid_spacing = j.at("grid_spacing").get<double>();
        m.precision = j.at("precision").get<double>();
        if (j.contains("notes")) m.notes = j.at("notes").get<std::vector<std::string>>();
        static constexpr ItemKind kKinds[] = {BooleanResult,     BooleanClippingResult, ShellBasedSurfaceModel,
                                              FacetedBrep,       ExtrudedAreaSolid,     RevolvedAreaSolid,
                                              SweptDiskSolid};
        static constexpr Profile kProfiles[] = {Rectangle, Ellipse, IShape, CraneRailAShape, Disk, None};
        static constexpr Variant kVariants[] = {Nominal,      NegativeDepth, ZeroDepth,     NonNormalizedDirection,
                                                DirectionParallelToProfile, Slanted, ParamRangeOutsideCurve,
                                                Subtraction,  Intersection,  Union,         HalfspaceClip,
                                                BelowTolerance};
        for (const auto& ji : j.at("items")) {
            GeometryTestItem it;
            auto slot = Slot::parse(ji.at("slot").get<std::string>());
            if (!slot) throw std::invalid_argument("bad slot");
            it.slot = *slot;
            it.definition_name = ji.at("definition_name").get<std::string>();
            it.kind = enum_from(ji.at("kind").get<std::string>(), kKinds, "kind");
            it.profile = enum_from(ji.at("profile").get<std::string>(), kProfiles, "profile");
            it.variant = enum_from(ji.at("variant").get<std::string>(), kVariants, "variant");
            it.in_ifc2x3 = it.in_ifc4 = false;
            for (const auto& a : ji.at("available_in")) {
                if (a == "IFC2X3") it.in_ifc2x3 = true;
                if (a == "IFC4") it.in_ifc4 = true;
            }
            const auto& ev = ji.at("expected_validity");
            for (const auto& r : ev.at("reasons")) it.expected_validity.reasons.insert(reason_from(r.get<std::string>()));
            if (ev.contains("warnings"))
                for (const auto& r : ev.at("warnings"))
                    it.expected_validity.warnings.insert(reason_from(r.get<std::string>()));
            m.items.push_back(std::move(it));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
    }
}

}  // namespace ifcaudit::geomgen
