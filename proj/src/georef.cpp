#include "ifcaudit/georef.hpp"

#include "graph_util.hpp"

#include <cmath>

namespace ifcaudit::georef {

using detail::attr;
using detail::deref_attr;
using detail::number_attr;
using detail::text_attr;

namespace {

// IfcSite
constexpr std::size_t kSitePlacement = 5;
constexpr std::size_t kSiteLatitude = 9;
constexpr std::size_t kSiteLongitude = 10;
constexpr std::size_t kSiteElevation = 11;
constexpr std::size_t kSiteAddress = 13;
// IfcBuilding
constexpr std::size_t kBuildingAddress = 11;
// IfcProject
constexpr std::size_t kProjectContexts = 7;
constexpr std::size_t kProjectUnits = 8;
// IfcGeometricRepresentationContext
constexpr std::size_t kContextType = 1;
constexpr std::size_t kContextWcs = 4;
constexpr std::size_t kContextTrueNorth = 5;

const Vec3 kDefaultAxis{0, 0, 1};
const Vec3 kDefaultRefDirection{1, 0, 0};

bool is_origin(const Vec3& p) {
    return std::abs(p[0]) <= kOriginThreshold && std::abs(p[1]) <= kOriginThreshold &&
           std::abs(p[2]) <= kOriginThreshold;
}

bool same_direction(const Vec3& a, const Vec3& b) {
    double la = std::hypot(a[0], a[1], a[2]);
    double lb = std::hypot(b[0], b[1], b[2]);
    if (la == 0 || lb == 0) return false;
    for (int i = 0; i < 3; ++i)
        if (std::abs(a[i] / la - b[i] / lb) > kOriginThreshold) return false;
    return true;
}

bool non_default(const std::optional<Vec3>& given, const Vec3& dflt) {
    return given && !same_direction(*given, dflt);
}

std::optional<std::vector<std::int64_t>> integer_list(std::optional<spf::ValueRef> v) {
    if (!v || v->kind() != spf::ValueKind::List) return std::nullopt;
    std::vector<std::int64_t> out;
    for (spf::ValueRef item : *v) {
        if (item.kind() != spf::ValueKind::Integer) return std::nullopt;
        out.push_back(item.as_integer());
    }
    return out;
}

struct Axes {
    Vec3 location{};
    std::optional<Vec3> axis;
    std::optional<Vec3> ref_direction;
};

std::optional<Axes> read_axis2(const spf::InstanceGraph& g, spf::InstanceRef p) {
    Axes a;
    if (p.type_name() == "IFCAXIS2PLACEMENT3D") {
        auto loc = detail::point3(deref_attr(g, p, 0));
        if (!loc) return std::nullopt;
        a.location = *loc;
        a.axis = detail::direction3(deref_attr(g, p, 1));
        a.ref_direction = detail::direction3(deref_attr(g, p, 2));
        return a;
    }
    if (p.type_name() == "IFCAXIS2PLACEMENT2D") {
        auto loc = detail::point3(deref_attr(g, p, 0));
        if (!loc) return std::nullopt;
        a.location = *loc;
        a.ref_direction = detail::direction3(deref_attr(g, p, 1));
        return a;
    }
    return std::nullopt;
}

std::string length_unit(const spf::InstanceGraph& g, std::optional<spf::InstanceRef> project,
                        std::vector<std::string>& diags) {
    std::vector<spf::InstanceRef> assignments;
    if (project) {
        if (auto ua = deref_attr(g, *project, kProjectUnits)) assignments.push_back(*ua);
    }
    if (assignments.empty()) assignments = detail::instances_of(g, "IFCUNITASSIGNMENT");
    for (auto ua : assignments) {
        auto units = attr(ua, 0);
        if (!units || units->kind() != spf::ValueKind::List) continue;
        for (spf::ValueRef u : *units) {
            auto unit = detail::deref(g, u);
            if (!unit || detail::enum_attr(*unit, 1) != "LENGTHUNIT") continue;
            if (unit->type_name() == "IFCSIUNIT") {
                auto prefix = detail::enum_attr(*unit, 2).value_or("");
                return prefix + detail::enum_attr(*unit, 3).value_or("METRE");
            }
            if (unit->type_name() == "IFCCONVERSIONBASEDUNIT") {
                if (auto name = text_attr(*unit, 2)) return *name;
            }
        }
    }
    diags.push_back("no length unit assignment found");
    return "unknown";
}

void detect_address(const spf::InstanceGraph& g, const std::vector<spf::InstanceRef>& sites,
                    LoGeoRefReport& r) {
    std::vector<std::pair<std::string, spf::InstanceRef>> found;
    for (auto s : sites)
        if (auto a = deref_attr(g, s, kSiteAddress); a && a->type_name() == "IFCPOSTALADDRESS")
            found.emplace_back("IFCSITE", *a);
    for (auto b : detail::instances_of(g, "IFCBUILDING"))
        if (auto a = deref_attr(g, b, kBuildingAddress); a && a->type_name() == "IFCPOSTALADDRESS")
            found.emplace_back("IFCBUILDING", *a);
    if (found.empty()) return;
    if (found.size() > 1)
        r.diagnostics.push_back("LoGeoRef10: " + std::to_string(found.size()) +
                                " postal addresses found, reporting the first");

    auto [host, a] = found.front();
    AddressParams p;
    p.host = host;
    if (auto lines = attr(a, 4); lines && lines->kind() == spf::ValueKind::List)
        for (spf::ValueRef l : *lines)
            if (auto t = detail::text(l)) p.address_lines.push_back(*t);
    p.town = text_attr(a, 6).value_or("");
    p.region = text_attr(a, 7).value_or("");
    p.postal_code = text_attr(a, 8).value_or("");
    p.country = text_attr(a, 9).value_or("");
    r.detected.push_back({Level::L10, std::move(p)});
}

void detect_latlon(spf::InstanceRef site, LoGeoRefReport& r) {
    auto lat_attr = attr(site, kSiteLatitude);
    auto lon_attr = attr(site, kSiteLongitude);
    if (!lat_attr || !lon_attr) return;
    auto lat = integer_list(lat_attr);
    auto lon = integer_list(lon_attr);
    if (!lat || !lon) {
        r.diagnostics.push_back("LoGeoRef20: RefLatitude/RefLongitude are not integer lists");
        return;
    }
    LatLonParams p;
    try {
        p.latitude = compound_angle_to_degrees(*lat);
        p.longitude = compound_angle_to_degrees(*lon);
    } catch (const std::invalid_argument& e) {
        r.diagnostics.push_back(std::string("LoGeoRef20: ") + e.what());
        return;
    }
    if (std::abs(p.latitude) > 90 || std::abs(p.longitude) > 180) {
        r.diagnostics.push_back("LoGeoRef20: latitude/longitude out of range");
        return;
    }
    p.elevation = number_attr(site, kSiteElevation);
    p.raw_latitude = std::move(*lat);
    p.raw_longitude = std::move(*lon);
    r.detected.push_back({Level::L20, std::move(p)});
}

void detect_placement(const spf::InstanceGraph& g, spf::InstanceRef site, const std::string& unit,
                      LoGeoRefReport& r) {
    auto lp = deref_attr(g, site, kSitePlacement);
    if (!lp || lp->type_name() != "IFCLOCALPLACEMENT") {
        r.diagnostics.push_back("LoGeoRef30: site has no local placement");
        return;
    }
    if (attr(*lp, 0))
        r.diagnostics.push_back("LoGeoRef30: site placement is relative to another placement; only the site's own "
                                "offset is reported");
    auto rel = deref_attr(g, *lp, 1);
    std::optional<Axes> axes = rel ? read_axis2(g, *rel) : std::nullopt;
    if (!axes) {
        r.diagnostics.push_back("LoGeoRef30: site placement does not resolve to a Cartesian point");
        return;
    }
    if (is_origin(axes->location) && !non_default(axes->axis, kDefaultAxis) &&
        !non_default(axes->ref_direction, kDefaultRefDirection))
        return;
    r.diagnostics.push_back("LoGeoRef30: detection is best-effort; authoring tools use this placement in "
                            "different ways");
    r.detected.push_back({Level::L30, PlacementParams{axes->location, axes->axis, axes->ref_direction, unit}});
}

void detect_context(const spf::InstanceGraph& g, std::optional<spf::InstanceRef> project, const std::string& unit,
                    LoGeoRefReport& r) {
    std::vector<spf::InstanceRef> contexts;
    if (project) {
        if (auto list = attr(*project, kProjectContexts); list && list->kind() == spf::ValueKind::List)
            for (spf::ValueRef c : *list)
                if (auto ctx = detail::deref(g, c); ctx && ctx->type_name() == "IFCGEOMETRICREPRESENTATIONCONTEXT")
                    contexts.push_back(*ctx);
    } else {
        contexts = detail::instances_of(g, "IFCGEOMETRICREPRESENTATIONCONTEXT");
    }
    if (contexts.empty()) return;
    // Prefer the 3D model context when there are several.
    auto ctx = contexts.front();
    for (auto c : contexts)
        if (text_attr(c, kContextType) == "Model") {
            ctx = c;
            break;
        }

    ContextParams p;
    p.unit = unit;
    if (auto wcs = deref_attr(g, ctx, kContextWcs)) {
        if (auto axes = read_axis2(g, *wcs)) {
            p.origin = axes->location;
            p.axis = axes->axis;
            p.ref_direction = axes->ref_direction;
        }
    }
    if (auto tn = detail::direction3(deref_attr(g, ctx, kContextTrueNorth))) p.true_north = std::array{(*tn)[0], (*tn)[1]};

    bool offset = !is_origin(p.origin) || non_default(p.axis, kDefaultAxis) ||
                  non_default(p.ref_direction, kDefaultRefDirection);
    if (offset || p.true_north) r.detected.push_back({Level::L40, std::move(p)});
}

void detect_map(const spf::InstanceGraph& g, schema::SchemaVersion version, LoGeoRefReport& r) {
    auto conversions = detail::instances_of(g, "IFCMAPCONVERSION");
    if (conversions.empty()) return;
    if (version == schema::SchemaVersion::IFC2X3) {
        r.diagnostics.push_back("LoGeoRef50: IFCMAPCONVERSION present in an IFC2X3 file, ignored");
        return;
    }
    for (auto mc : conversions) {
        auto crs = deref_attr(g, mc, 1);
        if (!crs || crs->type_name() != "IFCPROJECTEDCRS") {
            r.diagnostics.push_back("LoGeoRef50: map conversion #" + std::to_string(mc.id()) +
                                    " has no IfcProjectedCRS target");
            continue;
        }
        auto e = number_attr(mc, 2);
        auto n = number_attr(mc, 3);
        auto h = number_attr(mc, 4);
        if (!e || !n || !h) {
            r.diagnostics.push_back("LoGeoRef50: map conversion #" + std::to_string(mc.id()) + " lacks offsets");
            continue;
        }
        MapParams p;
        p.eastings = *e;
        p.northings = *n;
        p.orthogonal_height = *h;
        p.x_axis_abscissa = number_attr(mc, 5).value_or(1.0);
        p.x_axis_ordinate = number_attr(mc, 6).value_or(0.0);
        p.scale = number_attr(mc, 7);
        p.crs_name = text_attr(*crs, 0).value_or("");
        if (p.x_axis_abscissa == 0 && p.x_axis_ordinate == 0) {
            r.diagnostics.push_back("LoGeoRef50: rotation pair is (0,0)");
            continue;
        }
        if (!r.has(Level::L50)) {
            r.detected.push_back({Level::L50, std::move(p)});
        } else {
            r.diagnostics.push_back("LoGeoRef50: additional map conversion #" + std::to_string(mc.id()) + " ignored");
        }
    }
}

nlohmann::json vec_json(const std::optional<Vec3>& v) {
    if (!v) return nullptr;
    return nlohmann::json::array({(*v)[0], (*v)[1], (*v)[2]});
}

}  // namespace

std::string_view to_string(Level l) {
    switch (l) {
        case Level::L10: return "LoGeoRef10";
        case Level::L20: return "LoGeoRef20";
        case Level::L30: return "LoGeoRef30";
        case Level::L40: return "LoGeoRef40";
        case Level::L50: return "LoGeoRef50";
    }
    return "?";
}

double compound_angle_to_degrees(std::span<const std::int64_t> m) {
    if (m.size() != 3 && m.size() != 4)
        throw BadLength("compound angle needs 3 or 4 components, got " + std::to_string(m.size()));
    int sign = 0;
    for (auto c : m) {
        int s = (c > 0) - (c < 0);
        if (s == 0) continue;
        if (sign == 0) {
            sign = s;
        } else if (s != sign) {
            throw MixedSign("compound angle components disagree in sign");
        }
    }
    double deg = static_cast<double>(m[0]) + static_cast<double>(m[1]) / 60.0 + static_cast<double>(m[2]) / 3600.0;
    if (m.size() == 4) deg += static_cast<double>(m[3]) / 3.6e9;
    return deg;
}

bool LoGeoRefReport::has(Level l) const { return get(l) != nullptr; }

const GeoParams* LoGeoRefReport::get(Level l) const {
    for (const auto& p : detected)
        if (p.level == l) return &p;
    return nullptr;
}

std::vector<Level> LoGeoRefReport::levels() const {
    std::vector<Level> out;
    for (const auto& p : detected) out.push_back(p.level);
    return out;
}

LoGeoRefReport detect_georef(const spf::InstanceGraph& graph, schema::SchemaVersion version) {
    LoGeoRefReport r;
    auto projects = detail::instances_of(graph, "IFCPROJECT");
    std::optional<spf::InstanceRef> project;
    if (!projects.empty()) project = projects.front();
    auto sites = detail::instances_of(graph, "IFCSITE");
    std::string unit = length_unit(graph, project, r.diagnostics);

    if (sites.empty()) r.diagnostics.push_back("NoSite: no IfcSite instance");
    if (sites.size() > 1) r.diagnostics.push_back("more than one IfcSite; levels 20 and 30 use the first");

    detect_address(graph, sites, r);
    if (!sites.empty()) {
        detect_latlon(sites.front(), r);
        detect_placement(graph, sites.front(), unit, r);
    }
    detect_context(graph, project, unit, r);
    detect_map(graph, version, r);
    return r;
}

nlohmann::json to_json(const LoGeoRefReport& report) {
    nlohmann::json levels = nlohmann::json::array();
    nlohmann::json params = nlohmann::json::object();
    for (const auto& gp : report.detected) {
        levels.push_back(to_string(gp.level));
        nlohmann::json j;
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, AddressParams>) {
                    j = {{"host", p.host},     {"address_lines", p.address_lines}, {"town", p.town},
                         {"region", p.region}, {"postal_code", p.postal_code},     {"country", p.country}};
                } else if constexpr (std::is_same_v<T, LatLonParams>) {
                    j = {{"latitude", p.latitude},
                         {"longitude", p.longitude},
                         {"elevation", p.elevation ? nlohmann::json(*p.elevation) : nlohmann::json(nullptr)},
                         {"ref_latitude", p.raw_latitude},
                         {"ref_longitude", p.raw_longitude}};
                } else if constexpr (std::is_same_v<T, PlacementParams>) {
                    j = {{"location", vec_json(p.location)},
                         {"axis", vec_json(p.axis)},
                         {"ref_direction", vec_json(p.ref_direction)},
                         {"unit", p.unit}};
                } else if constexpr (std::is_same_v<T, ContextParams>) {
                    j = {{"origin", vec_json(p.origin)},
                         {"axis", vec_json(p.axis)},
                         {"ref_direction", vec_json(p.ref_direction)},
                         {"true_north", p.true_north ? nlohmann::json(*p.true_north) : nlohmann::json(nullptr)},
                         {"unit", p.unit}};
                } else {
                    j = {{"eastings", p.eastings},
                         {"northings", p.northings},
                         {"orthogonal_height", p.orthogonal_height},
                         {"x_axis_abscissa", p.x_axis_abscissa},
                         {"x_axis_ordinate", p.x_axis_ordinate},
                         {"scale", p.scale ? nlohmann::json(*p.scale) : nlohmann::json(nullptr)},
                         {"crs_name", p.crs_name}};
                }
            },
            gp.payload);
        params[std::string(to_string(gp.level))] = std::move(j);
    }
    return {{"levels", levels}, {"params", params}, {"diagnostics", report.diagnostics}};
}

}  // namespace ifcaudit::georef
