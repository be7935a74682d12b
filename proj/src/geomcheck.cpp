#include "ifcaudit/geomcheck.hpp"

#include "graph_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

namespace ifcaudit::geomcheck {

using geomgen::ItemKind;
using geomgen::Profile;
using mesh::BoundingBox;
using mesh::Box;
using mesh::Frame;
using mesh::TriMesh;
using mesh::Vec2;
using mesh::Vec3;
using mesh::operator+;
using mesh::operator-;
using mesh::operator*;
using spf::EntityId;
using spf::InstanceGraph;
using spf::InstanceRef;
using spf::ValueKind;
using spf::ValueRef;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDirectionTolerance = 1e-12;

// Thrown while meshing an item that has no geometric extent.
struct NotEvaluable {
    std::string reason;
};

std::string entity_label(InstanceRef inst) {
    return "#" + std::to_string(inst.id()) + "=" + std::string(inst.type_name());
}

InstanceRef need(const InstanceGraph& g, EntityId id) {
    auto inst = g.find(id);
    if (!inst) throw UnsupportedShape("reference to missing instance #" + std::to_string(id));
    return *inst;
}

InstanceRef need_ref(const InstanceGraph& g, InstanceRef inst, std::size_t i) {
    auto r = detail::deref_attr(g, inst, i);
    if (!r) throw UnsupportedShape(entity_label(inst) + ": attribute " + std::to_string(i + 1) + " is not a reference");
    return *r;
}

double need_number(InstanceRef inst, std::size_t i) {
    auto n = detail::number_attr(inst, i);
    if (!n) throw UnsupportedShape(entity_label(inst) + ": attribute " + std::to_string(i + 1) + " is not a number");
    return *n;
}

std::vector<InstanceRef> ref_list(const InstanceGraph& g, InstanceRef inst, std::size_t i) {
    auto v = detail::attr(inst, i);
    if (!v || v->kind() != ValueKind::List)
        throw UnsupportedShape(entity_label(inst) + ": attribute " + std::to_string(i + 1) + " is not a list");
    std::vector<InstanceRef> out;
    for (ValueRef item : *v) {
        auto r = detail::deref(g, item);
        if (!r) throw UnsupportedShape(entity_label(inst) + ": list item is not a reference");
        out.push_back(*r);
    }
    return out;
}

Vec3 need_point(const InstanceGraph& g, InstanceRef inst, std::size_t i) {
    auto p = detail::point3(detail::deref_attr(g, inst, i));
    if (!p) throw UnsupportedShape(entity_label(inst) + ": attribute " + std::to_string(i + 1) + " is not a point");
    return *p;
}

Frame axis2_3d(const InstanceGraph& g, std::optional<InstanceRef> placement) {
    if (!placement) return {};
    if (placement->type_name() != "IFCAXIS2PLACEMENT3D")
        throw UnsupportedShape(entity_label(*placement) + ": expected IFCAXIS2PLACEMENT3D");
    Vec3 origin = need_point(g, *placement, 0);
    Vec3 axis = detail::direction3(detail::deref_attr(g, *placement, 1)).value_or(Vec3{0, 0, 1});
    Vec3 ref = detail::direction3(detail::deref_attr(g, *placement, 2)).value_or(Vec3{1, 0, 0});
    try {
        return Frame::from_axes(origin, axis, ref);
    } catch (const std::domain_error&) {
        throw UnsupportedShape(entity_label(*placement) + ": zero axis direction");
    }
}

Frame axis2_2d(const InstanceGraph& g, std::optional<InstanceRef> placement) {
    if (!placement) return {};
    if (placement->type_name() != "IFCAXIS2PLACEMENT2D")
        throw UnsupportedShape(entity_label(*placement) + ": expected IFCAXIS2PLACEMENT2D");
    Vec3 origin = need_point(g, *placement, 0);
    Vec3 ref = detail::direction3(detail::deref_attr(g, *placement, 1)).value_or(Vec3{1, 0, 0});
    ref[2] = 0;
    try {
        Vec3 x = mesh::normalized(ref);
        return {origin, x, mesh::cross({0, 0, 1}, x), {0, 0, 1}};
    } catch (const std::domain_error&) {
        throw UnsupportedShape(entity_label(*placement) + ": zero reference direction");
    }
}

// ---------------------------------------------------------------------------
// Validity

using R = ValidityReason;

void require_positive(InstanceRef inst, std::initializer_list<std::size_t> attrs, ValidityVerdict& v) {
    for (auto i : attrs) {
        auto n = detail::number_attr(inst, i);
        if (n && *n <= 0) v.reasons.insert(R::PositiveLength);
    }
}

// Any value explicitly typed as a positive length, wherever it appears.
void scan_typed_lengths(ValueRef value, ValidityVerdict& v) {
    if (value.kind() == ValueKind::Typed) {
        if (value.type_name() == "IFCPOSITIVELENGTHMEASURE") {
            auto n = detail::number(value);
            if (n && *n <= 0) v.reasons.insert(R::PositiveLength);
        }
        scan_typed_lengths(value.inner(), v);
    } else if (value.kind() == ValueKind::List) {
        for (ValueRef item : value) scan_typed_lengths(item, v);
    }
}

void validate_profile(InstanceRef p, ValidityVerdict& v) {
    for (std::size_t i = 0; i < p.attribute_count(); ++i) scan_typed_lengths(p.attribute(i), v);
    auto t = p.type_name();
    if (t == "IFCRECTANGLEPROFILEDEF" || t == "IFCELLIPSEPROFILEDEF") {
        require_positive(p, {3, 4}, v);
    } else if (t == "IFCISHAPEPROFILEDEF") {
        require_positive(p, {3, 4, 5, 6}, v);
        auto fillet = detail::number_attr(p, 7);
        if (fillet && *fillet < 0) v.reasons.insert(R::PositiveLength);
    } else if (t == "IFCCRANERAILASHAPEPROFILEDEF") {
        require_positive(p, {3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}, v);
    } else {
        throw UnsupportedShape(entity_label(p) + ": unsupported profile type");
    }
}

std::vector<Vec3> polyline_points(const InstanceGraph& g, InstanceRef curve) {
    if (curve.type_name() != "IFCPOLYLINE")
        throw UnsupportedShape(entity_label(curve) + ": only polyline directrices are supported");
    std::vector<Vec3> pts;
    for (auto p : ref_list(g, curve, 0)) {
        auto c = detail::point3(p);
        if (!c) throw UnsupportedShape(entity_label(curve) + ": polyline vertex is not a point");
        pts.push_back(*c);
    }
    if (pts.size() < 2) throw UnsupportedShape(entity_label(curve) + ": polyline needs two points");
    return pts;
}

void validate(const InstanceGraph& g, InstanceRef inst, double precision, ValidityVerdict& v, int depth) {
    if (depth > 64) throw UnsupportedShape("representation item nesting too deep");
    for (std::size_t i = 0; i < inst.attribute_count(); ++i) scan_typed_lengths(inst.attribute(i), v);

    auto t = inst.type_name();
    if (t == "IFCBOOLEANRESULT" || t == "IFCBOOLEANCLIPPINGRESULT") {
        validate(g, need_ref(g, inst, 1), precision, v, depth + 1);
        validate(g, need_ref(g, inst, 2), precision, v, depth + 1);
    } else if (t == "IFCHALFSPACESOLID" || t == "IFCFACETEDBREP" || t == "IFCSHELLBASEDSURFACEMODEL") {
        // No length or direction rules apply.
    } else if (t == "IFCBLOCK") {
        require_positive(inst, {1, 2, 3}, v);
    } else if (t == "IFCEXTRUDEDAREASOLID") {
        validate_profile(need_ref(g, inst, 0), v);
        double d = need_number(inst, 3);
        if (d <= 0) {
            v.reasons.insert(R::PositiveLength);
        } else if (d < precision) {
            v.warnings.insert(R::BelowPrecision);
        }
        auto dir = detail::direction3(detail::deref_attr(g, inst, 2));
        if (!dir) throw UnsupportedShape(entity_label(inst) + ": missing extrusion direction");
        double n = mesh::norm(*dir);
        // The profile lies in the local XY plane, so its normal is +Z.
        if (n == 0 || std::abs((*dir)[2] / n) <= kDirectionTolerance) v.reasons.insert(R::ValidExtrusionDirection);
    } else if (t == "IFCREVOLVEDAREASOLID") {
        validate_profile(need_ref(g, inst, 0), v);
    } else if (t == "IFCSWEPTDISKSOLID") {
        require_positive(inst, {1, 2}, v);
        auto pts = polyline_points(g, need_ref(g, inst, 0));
        double hi = static_cast<double>(pts.size() - 1);
        for (std::size_t i : {3u, 4u}) {
            auto p = detail::number_attr(inst, i);
            if (p && (*p < 0 || *p > hi)) v.reasons.insert(R::ParamRange);
        }
    } else {
        throw UnsupportedShape(entity_label(inst) + ": not a supported representation item");
    }
}

// ---------------------------------------------------------------------------
// Profiles

struct ProfileOutline {
    std::vector<Vec2> points;  // counter-clockwise
    bool curved = false;
};

int arc_steps(int segments, double sweep) {
    return std::max(1, static_cast<int>(std::ceil(segments * sweep / (2 * kPi) - 1e-9)));
}

// Arc from angle a0 to a1 (radians) around c, both ends included.
void arc(std::vector<Vec2>& out, Vec2 c, double r, double a0, double a1, int segments) {
    int n = arc_steps(segments, std::abs(a1 - a0));
    for (int k = 0; k <= n; ++k) {
        double a = a0 + (a1 - a0) * k / n;
        out.push_back({c[0] + r * std::cos(a), c[1] + r * std::sin(a)});
    }
}

std::vector<Vec2> i_shape(double w, double d, double web, double flange, double r, int segments) {
    const double b = w / 2, h = d / 2, t = web / 2, f = flange;
    std::vector<Vec2> p;
    p.push_back({b, -h});
    p.push_back({b, -h + f});
    if (r > 0) {
        arc(p, {t + r, -h + f + r}, r, 1.5 * kPi, kPi, segments);
        arc(p, {t + r, h - f - r}, r, kPi, 0.5 * kPi, segments);
    } else {
        p.push_back({t, -h + f});
        p.push_back({t, h - f});
    }
    p.push_back({b, h - f});
    p.push_back({b, h});
    p.push_back({-b, h});
    p.push_back({-b, h - f});
    if (r > 0) {
        arc(p, {-t - r, h - f - r}, r, 0.5 * kPi, 0, segments);
        arc(p, {-t - r, -h + f + r}, r, 0, -0.5 * kPi, segments);
    } else {
        p.push_back({-t, h - f});
        p.push_back({-t, -h + f});
    }
    p.push_back({-b, -h + f});
    p.push_back({-b, -h});
    return p;
}

// Same outline as the generator's crane rail, rebuilt from the attributes.
std::vector<Vec2> crane_rail(InstanceRef p) {
    double height = need_number(p, 3), base2 = need_number(p, 4), head_w = need_number(p, 6);
    double head_d2 = need_number(p, 7), head_d3 = need_number(p, 8), web = need_number(p, 9);
    double base4 = need_number(p, 10), base_d1 = need_number(p, 11), base_d2 = need_number(p, 12);
    double base_d3 = need_number(p, 13);
    const double y0 = -height / 2, y1 = height / 2;
    std::vector<Vec2> right = {
        {base2 / 2, y0},           {base2 / 2, y0 + base_d1}, {base4 / 2, y0 + base_d2}, {web / 2, y0 + base_d3},
        {web / 2, y1 - head_d3},   {head_w / 2, y1 - head_d2}, {head_w / 2, y1},
    };
    auto out = right;
    for (auto it = right.rbegin(); it != right.rend(); ++it) out.push_back({-(*it)[0], (*it)[1]});
    return out;
}

ProfileOutline profile_outline(const InstanceGraph& g, InstanceRef p, int segments) {
    ProfileOutline out;
    auto t = p.type_name();
    if (t == "IFCRECTANGLEPROFILEDEF") {
        double x = need_number(p, 3) / 2, y = need_number(p, 4) / 2;
        out.points = {{-x, -y}, {x, -y}, {x, y}, {-x, y}};
    } else if (t == "IFCELLIPSEPROFILEDEF") {
        double a = need_number(p, 3), b = need_number(p, 4);
        for (int k = 0; k < segments; ++k) {
            double th = 2 * kPi * k / segments;
            out.points.push_back({a * std::cos(th), b * std::sin(th)});
        }
        out.curved = true;
    } else if (t == "IFCISHAPEPROFILEDEF") {
        double r = detail::number_attr(p, 7).value_or(0.0);
        out.points = i_shape(need_number(p, 3), need_number(p, 4), need_number(p, 5), need_number(p, 6), r, segments);
        out.curved = r > 0;
    } else if (t == "IFCCRANERAILASHAPEPROFILEDEF") {
        out.points = crane_rail(p);
    } else {
        throw UnsupportedShape(entity_label(p) + ": unsupported profile type");
    }
    for (double dim : {detail::number_attr(p, 3).value_or(1), detail::number_attr(p, 4).value_or(1)})
        if (dim <= 0) throw NotEvaluable{entity_label(p) + " has a non-positive dimension"};

    Frame pos = axis2_2d(g, detail::deref_attr(g, p, 2));
    for (auto& q : out.points) {
        Vec3 w = pos.point({q[0], q[1], 0});
        q = {w[0], w[1]};
    }
    if (mesh::polygon_area(out.points) < 0) std::reverse(out.points.begin(), out.points.end());
    return out;
}

// ---------------------------------------------------------------------------
// Meshing

TriMesh extrude(const std::vector<Vec2>& poly, const Vec3& dir, double depth) {
    TriMesh m;
    const auto n = static_cast<std::uint32_t>(poly.size());
    for (const auto& p : poly) m.add_vertex({p[0], p[1], 0});
    for (const auto& p : poly) m.add_vertex(Vec3{p[0], p[1], 0} + depth * dir);
    for (auto t : mesh::triangulate(poly)) {
        m.add_triangle(t[0], t[2], t[1]);
        m.add_triangle(n + t[0], n + t[1], n + t[2]);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t j = (i + 1) % n;
        m.add_quad(i, j, n + j, n + i);
    }
    return m;
}

struct Evaluator {
    const InstanceGraph& g;
    const EvalOptions& o;
    EvaluationOutcome& out;
    bool curved = false;

    void warn(std::string w) {
        if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
            out.warnings.push_back(std::move(w));
    }

    TriMesh item(InstanceRef inst) {
        auto t = inst.type_name();
        if (t == "IFCEXTRUDEDAREASOLID") return extrusion(inst);
        if (t == "IFCREVOLVEDAREASOLID") return revolution(inst);
        if (t == "IFCSWEPTDISKSOLID") return swept_disk(inst);
        if (t == "IFCBOOLEANRESULT" || t == "IFCBOOLEANCLIPPINGRESULT") {
            auto boxes = region(inst, std::nullopt);
            return mesh::boxes_to_mesh(boxes);
        }
        if (t == "IFCFACETEDBREP") return faces(ref_list(g, need_ref(g, inst, 0), 0));
        if (t == "IFCSHELLBASEDSURFACEMODEL") {
            out.surface = true;
            TriMesh m;
            for (auto shell : ref_list(g, inst, 0)) m.append(faces(ref_list(g, shell, 0)));
            return m;
        }
        throw UnsupportedShape(entity_label(inst) + ": not a supported representation item");
    }

    TriMesh extrusion(InstanceRef inst) {
        auto prof = profile_outline(g, need_ref(g, inst, 0), o.segments);
        curved = curved || prof.curved;
        auto d = detail::direction3(detail::deref_attr(g, inst, 2));
        if (!d) throw UnsupportedShape(entity_label(inst) + ": missing extrusion direction");
        double len = mesh::norm(*d);
        if (len == 0) throw NotEvaluable{"extrusion direction is a zero vector"};
        Vec3 dir = (1.0 / len) * *d;
        if (std::abs(len - 1) > kDirectionTolerance)
            warn("NonNormalizedDirection: extrusion direction normalised before extruding by Depth");
        if (std::abs(dir[2]) <= kDirectionTolerance)
            throw NotEvaluable{"extrusion direction lies in the profile plane"};
        double depth = need_number(inst, 3);
        if (depth == 0) throw NotEvaluable{"extrusion depth is zero"};
        if (depth < 0) {
            warn("NegativeDepth: extruded along the reversed direction");
            depth = -depth;
            dir = -1.0 * dir;
        }
        if (depth < o.precision) warn("BelowPrecision: extrusion depth is below the context precision");
        TriMesh m = extrude(prof.points, dir, depth);
        m.transform(axis2_3d(g, detail::deref_attr(g, inst, 1)));
        return m;
    }

    TriMesh revolution(InstanceRef inst) {
        auto prof = profile_outline(g, need_ref(g, inst, 0), o.segments);
        curved = true;
        auto axis_pl = need_ref(g, inst, 2);
        if (axis_pl.type_name() != "IFCAXIS1PLACEMENT")
            throw UnsupportedShape(entity_label(axis_pl) + ": expected IFCAXIS1PLACEMENT");
        Vec3 loc = need_point(g, axis_pl, 0);
        Vec3 k = detail::direction3(detail::deref_attr(g, axis_pl, 1)).value_or(Vec3{0, 0, 1});
        if (mesh::norm(k) == 0) throw NotEvaluable{"revolution axis is a zero vector"};
        k = mesh::normalized(k);

        double angle = need_number(inst, 3) * o.angle_factor;
        if (angle <= 0) throw NotEvaluable{"revolution angle is not positive"};
        const bool full = angle >= 2 * kPi - 1e-9;
        if (full) angle = 2 * kPi;
        const int steps = std::max(full ? 3 : 1, arc_steps(o.segments, angle));
        const int rings = full ? steps : steps + 1;
        const auto n = static_cast<std::uint32_t>(prof.points.size());

        TriMesh m;
        for (int r = 0; r < rings; ++r) {
            double th = angle * r / steps, c = std::cos(th), s = std::sin(th);
            for (const auto& p : prof.points) {
                Vec3 v = Vec3{p[0], p[1], 0} - loc;
                Vec3 w = c * v + s * mesh::cross(k, v) + ((1 - c) * mesh::dot(k, v)) * k;
                m.add_vertex(loc + w);
            }
        }
        for (int r = 0; r < steps; ++r) {
            auto a = static_cast<std::uint32_t>(r) * n, b = static_cast<std::uint32_t>((r + 1) % rings) * n;
            for (std::uint32_t i = 0; i < n; ++i) {
                std::uint32_t j = (i + 1) % n;
                m.add_quad(a + i, a + j, b + j, b + i);
            }
        }
        if (!full) {
            auto last = static_cast<std::uint32_t>(rings - 1) * n;
            for (auto t : mesh::triangulate(prof.points)) {
                m.add_triangle(t[0], t[2], t[1]);
                m.add_triangle(last + t[0], last + t[1], last + t[2]);
            }
        }
        m.transform(axis2_3d(g, detail::deref_attr(g, inst, 1)));
        return m;
    }

    TriMesh swept_disk(InstanceRef inst) {
        curved = true;
        auto pts = polyline_points(g, need_ref(g, inst, 0));
        const double hi = static_cast<double>(pts.size() - 1);
        Vec3 axis = pts[1] - pts[0];
        if (mesh::norm(axis) == 0) throw NotEvaluable{"directrix has a zero-length segment"};
        axis = mesh::normalized(axis);
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            Vec3 seg = pts[i + 1] - pts[i];
            if (mesh::norm(seg) == 0 || mesh::norm(mesh::cross(mesh::normalized(seg), axis)) > 1e-9 ||
                mesh::dot(seg, axis) < 0)
                throw UnsupportedShape(entity_label(inst) + ": only straight directrices are supported");
        }

        double start = detail::number_attr(inst, 3).value_or(0.0);
        double end = detail::number_attr(inst, 4).value_or(hi);
        if (start < 0 || end > hi || start > hi || end < 0) {
            warn("ParamRange: StartParam/EndParam clamped to the directrix range [0, " + spf::format_real(hi) + "]");
            start = std::clamp(start, 0.0, hi);
            end = std::clamp(end, 0.0, hi);
        }
        if (end <= start) throw NotEvaluable{"empty directrix parameter interval"};
        auto at = [&](double u) {
            auto i = std::min(static_cast<std::size_t>(u), pts.size() - 2);
            double f = u - static_cast<double>(i);
            return pts[i] + f * (pts[i + 1] - pts[i]);
        };
        Vec3 a = at(start);
        double length = mesh::norm(at(end) - a);

        double radius = need_number(inst, 1);
        if (radius <= 0) throw NotEvaluable{"disk radius is not positive"};
        std::optional<double> inner = detail::number_attr(inst, 2);
        if (inner && (*inner <= 0 || *inner >= radius)) {
            warn("InnerRadius ignored: not within (0, Radius)");
            inner.reset();
        }

        std::vector<Vec2> circle;
        for (int k = 0; k < o.segments; ++k) {
            double th = 2 * kPi * k / o.segments;
            circle.push_back({radius * std::cos(th), radius * std::sin(th)});
        }
        Frame f = Frame::from_axes(a, axis, std::abs(axis[2]) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0});
        TriMesh m;
        if (!inner) {
            m = extrude(circle, {0, 0, 1}, length);
        } else {
            const auto n = static_cast<std::uint32_t>(circle.size());
            const double s = *inner / radius;
            for (double z : {0.0, length})
                for (const auto& c : circle) m.add_vertex({c[0], c[1], z});
            for (double z : {0.0, length})
                for (const auto& c : circle) m.add_vertex({s * c[0], s * c[1], z});
            const std::uint32_t o0 = 0, o1 = n, i0 = 2 * n, i1 = 3 * n;
            for (std::uint32_t k = 0; k < n; ++k) {
                std::uint32_t j = (k + 1) % n;
                m.add_quad(o0 + k, o0 + j, o1 + j, o1 + k);
                m.add_quad(i0 + k, i1 + k, i1 + j, i0 + j);
                m.add_quad(o0 + k, i0 + k, i0 + j, o0 + j);
                m.add_quad(o1 + k, o1 + j, i1 + j, i1 + k);
            }
        }
        m.transform(f);
        return m;
    }

    // Axis-aligned box decomposition of a boolean operand. `clamp` bounds
    // half-spaces, which are only accepted as second operands.
    std::vector<Box> region(InstanceRef inst, std::optional<BoundingBox> clamp) {
        auto t = inst.type_name();
        if (t == "IFCBOOLEANRESULT" || t == "IFCBOOLEANCLIPPINGRESULT") {
            auto op = detail::enum_attr(inst, 0).value_or("");
            mesh::BoolOp bop;
            if (op == "UNION") {
                bop = mesh::BoolOp::Union;
            } else if (op == "INTERSECTION") {
                bop = mesh::BoolOp::Intersection;
            } else if (op == "DIFFERENCE") {
                bop = mesh::BoolOp::Difference;
            } else {
                throw UnsupportedShape(entity_label(inst) + ": unknown boolean operator '" + op + "'");
            }
            if (t == "IFCBOOLEANCLIPPINGRESULT" && bop != mesh::BoolOp::Difference)
                throw UnsupportedShape(entity_label(inst) + ": clipping requires DIFFERENCE");
            auto a = region(need_ref(g, inst, 1), std::nullopt);
            auto b = region(need_ref(g, inst, 2), bounds(a));
            return mesh::box_boolean(a, b, bop);
        }
        if (t == "IFCBLOCK") {
            Frame f = axis2_3d(g, detail::deref_attr(g, inst, 0));
            require_axis_aligned(f, inst);
            Vec3 size{need_number(inst, 1), need_number(inst, 2), need_number(inst, 3)};
            if (size[0] <= 0 || size[1] <= 0 || size[2] <= 0) throw NotEvaluable{"block with a non-positive size"};
            return {Box{f.origin, f.origin + size}};
        }
        if (t == "IFCEXTRUDEDAREASOLID") {
            auto prof = need_ref(g, inst, 0);
            if (prof.type_name() != "IFCRECTANGLEPROFILEDEF")
                throw UnsupportedShape(entity_label(inst) + ": boolean operands must be boxes");
            TriMesh m = extrusion(inst);
            BoundingBox bb = m.bbox();
            // A box iff the extrusion volume fills its bounding box.
            Box box{bb.min, bb.max};
            if (std::abs(m.volume()) < box.volume() * (1 - 1e-12))
                throw UnsupportedShape(entity_label(inst) + ": boolean operands must be axis-aligned boxes");
            return {box};
        }
        if (t == "IFCHALFSPACESOLID") {
            if (!clamp) throw UnsupportedShape(entity_label(inst) + ": half-space as first operand");
            auto plane = need_ref(g, inst, 0);
            if (plane.type_name() != "IFCPLANE")
                throw UnsupportedShape(entity_label(plane) + ": half-space base surface must be a plane");
            Frame f = axis2_3d(g, detail::deref_attr(g, plane, 0));
            int axis = -1;
            for (int i = 0; i < 3; ++i)
                if (std::abs(std::abs(f.z[i]) - 1) < 1e-12) axis = i;
            if (axis < 0) throw UnsupportedShape(entity_label(inst) + ": half-space plane is not axis-aligned");
            bool agreement = detail::enum_attr(inst, 1).value_or("T") == "T";
            // Agreement: the plane normal points away from the material.
            double material = (f.z[axis] > 0 ? 1.0 : -1.0) * (agreement ? -1.0 : 1.0);
            Box b{clamp->min, clamp->max};
            for (int i = 0; i < 3; ++i) {
                b.min[i] -= 1;
                b.max[i] += 1;
            }
            double level = f.origin[axis];
            if (material < 0) {
                b.max[axis] = std::max(level, b.min[axis]);
            } else {
                b.min[axis] = std::min(level, b.max[axis]);
            }
            if (b.max[axis] <= b.min[axis]) return {};
            return {b};
        }
        throw UnsupportedShape(entity_label(inst) + ": unsupported boolean operand");
    }

    static BoundingBox bounds(const std::vector<Box>& boxes) {
        BoundingBox bb;
        if (boxes.empty()) return bb;
        bb.min = boxes.front().min;
        bb.max = boxes.front().max;
        for (const auto& b : boxes)
            for (int i = 0; i < 3; ++i) {
                bb.min[i] = std::min(bb.min[i], b.min[i]);
                bb.max[i] = std::max(bb.max[i], b.max[i]);
            }
        return bb;
    }

    static void require_axis_aligned(const Frame& f, InstanceRef inst) {
        if (mesh::norm(f.x - Vec3{1, 0, 0}) > 1e-12 || mesh::norm(f.z - Vec3{0, 0, 1}) > 1e-12)
            throw UnsupportedShape(entity_label(inst) + ": rotated boolean operands are not supported");
    }

    TriMesh faces(const std::vector<InstanceRef>& face_list) {
        TriMesh m;
        for (auto face : face_list) {
            auto bounds = ref_list(g, face, 0);
            if (bounds.size() != 1) throw UnsupportedShape(entity_label(face) + ": faces with inner bounds");
            auto bound = bounds.front();
            auto loop = need_ref(g, bound, 0);
            if (loop.type_name() != "IFCPOLYLOOP")
                throw UnsupportedShape(entity_label(loop) + ": only polyloop bounds are supported");
            std::vector<Vec3> pts;
            for (auto p : ref_list(g, loop, 0)) {
                auto c = detail::point3(p);
                if (!c) throw UnsupportedShape(entity_label(loop) + ": loop vertex is not a point");
                pts.push_back(*c);
            }
            if (detail::enum_attr(bound, 1).value_or("T") == "F") std::reverse(pts.begin(), pts.end());
            if (pts.size() < 3) continue;

            Vec3 normal{0, 0, 0};  // Newell
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const Vec3 &a = pts[i], &b = pts[(i + 1) % pts.size()];
                normal = normal + Vec3{(a[1] - b[1]) * (a[2] + b[2]), (a[2] - b[2]) * (a[0] + b[0]),
                                       (a[0] - b[0]) * (a[1] + b[1])};
            }
            if (mesh::norm(normal) == 0) {
                warn("DegenerateFace: " + entity_label(face) + " has no area");
                continue;
            }
            Vec3 n = mesh::normalized(normal);
            Vec3 helper = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            Vec3 u = mesh::normalized(mesh::cross(n, helper));
            Vec3 v = mesh::cross(n, u);
            std::vector<Vec2> flat;
            for (const auto& p : pts) flat.push_back({mesh::dot(p - pts[0], u), mesh::dot(p - pts[0], v)});
            auto base = static_cast<std::uint32_t>(m.vertices.size());
            for (const auto& p : pts) m.add_vertex(p);
            for (auto t : mesh::triangulate(flat)) m.add_triangle(base + t[0], base + t[1], base + t[2]);
        }
        return m;
    }
};

ShapeClass classify(const InstanceGraph& g, InstanceRef root) {
    static const std::map<std::string_view, ItemKind> kKinds = {
        {"IFCBOOLEANRESULT", ItemKind::BooleanResult},
        {"IFCBOOLEANCLIPPINGRESULT", ItemKind::BooleanClippingResult},
        {"IFCSHELLBASEDSURFACEMODEL", ItemKind::ShellBasedSurfaceModel},
        {"IFCFACETEDBREP", ItemKind::FacetedBrep},
        {"IFCEXTRUDEDAREASOLID", ItemKind::ExtrudedAreaSolid},
        {"IFCREVOLVEDAREASOLID", ItemKind::RevolvedAreaSolid},
        {"IFCSWEPTDISKSOLID", ItemKind::SweptDiskSolid},
    };
    auto it = kKinds.find(root.type_name());
    if (it == kKinds.end()) throw UnsupportedShape(entity_label(root) + ": not a supported representation item");
    ShapeClass c{it->second, Profile::None};
    if (c.kind == ItemKind::SweptDiskSolid) c.profile = Profile::Disk;
    if (c.kind == ItemKind::ExtrudedAreaSolid || c.kind == ItemKind::RevolvedAreaSolid) {
        auto p = detail::deref_attr(g, root, 0);
        auto t = p ? p->type_name() : std::string_view{};
        if (t == "IFCRECTANGLEPROFILEDEF") c.profile = Profile::Rectangle;
        if (t == "IFCELLIPSEPROFILEDEF") c.profile = Profile::Ellipse;
        if (t == "IFCISHAPEPROFILEDEF") c.profile = Profile::IShape;
        if (t == "IFCCRANERAILASHAPEPROFILEDEF") c.profile = Profile::CraneRailAShape;
    }
    return c;
}

ZRelation z_relation(const BoundingBox& bb, double band) {
    bool above = bb.max[2] > band, below = bb.min[2] < -band;
    if (above && below) return ZRelation::StraddlesZ0;
    if (above) return ZRelation::AboveZ0;
    if (below) return ZRelation::BelowZ0;
    return ZRelation::OnZ0;
}

double si_prefix(std::string_view p) {
    static const std::map<std::string_view, double> kPrefixes = {
        {"EXA", 1e18},   {"PETA", 1e15}, {"TERA", 1e12}, {"GIGA", 1e9},   {"MEGA", 1e6},   {"KILO", 1e3},
        {"HECTO", 1e2},  {"DECA", 1e1},  {"DECI", 1e-1}, {"CENTI", 1e-2}, {"MILLI", 1e-3}, {"MICRO", 1e-6},
        {"NANO", 1e-9},  {"PICO", 1e-12}, {"FEMTO", 1e-15}, {"ATTO", 1e-18},
    };
    auto it = kPrefixes.find(p);
    return it == kPrefixes.end() ? 1.0 : it->second;
}

// Factor of a named unit to its SI base, following conversion-based units.
double unit_factor(const InstanceGraph& g, InstanceRef unit, int depth = 0) {
    if (depth > 8) return 1.0;
    if (unit.type_name() == "IFCSIUNIT") return si_prefix(detail::enum_attr(unit, 2).value_or(""));
    if (unit.type_name() == "IFCCONVERSIONBASEDUNIT" ||
        unit.type_name() == "IFCCONVERSIONBASEDUNITWITHOFFSET") {
        auto mwu = detail::deref_attr(g, unit, 3);
        if (!mwu) return 1.0;
        double value = detail::number_attr(*mwu, 0).value_or(1.0);
        auto base = detail::deref_attr(g, *mwu, 1);
        return value * (base ? unit_factor(g, *base, depth + 1) : 1.0);
    }
    return 1.0;
}

std::optional<double> project_unit_factor(const InstanceGraph& g, std::string_view unit_type) {
    for (auto assignment : detail::instances_of(g, "IFCUNITASSIGNMENT")) {
        auto units = detail::attr(assignment, 0);
        if (!units || units->kind() != ValueKind::List) continue;
        for (ValueRef u : *units) {
            auto unit = detail::deref(g, u);
            if (!unit) continue;
            if (detail::enum_attr(*unit, 1) == unit_type) return unit_factor(g, *unit);
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(ZRelation z) {
    switch (z) {
        case ZRelation::AboveZ0: return "AboveZ0";
        case ZRelation::BelowZ0: return "BelowZ0";
        case ZRelation::StraddlesZ0: return "StraddlesZ0";
        case ZRelation::OnZ0: return "OnZ0";
    }
    return "?";
}

std::string ShapeClass::name() const {
    std::string out(geomgen::to_string(kind));
    if (profile != Profile::None) {
        out += '/';
        out += geomgen::to_string(profile);
    }
    return out;
}

ValidityVerdict check_validity(const InstanceGraph& g, EntityId root, double precision) {
    ValidityVerdict v;
    validate(g, need(g, root), precision, v, 0);
    return v;
}

EvaluationOutcome evaluate(const InstanceGraph& g, EntityId root_id, const EvalOptions& o) {
    if (o.segments < 3) throw std::invalid_argument("segments must be at least 3");
    if (!(o.precision > 0)) throw std::invalid_argument("precision must be positive");
    EvaluationOutcome out;
    InstanceRef root = need(g, root_id);
    out.shape_class = classify(g, root);
    Evaluator ev{g, o, out};
    TriMesh m;
    try {
        m = ev.item(root);
    } catch (const NotEvaluable& e) {
        out.warnings.push_back("NotEvaluable: " + e.reason);
        out.smooth_curves = ev.curved && o.segments >= kSmoothSegments;
        return out;
    }
    m.weld(o.precision);
    if (!out.surface || m.closed()) m.orient_outward();
    m.transform(o.placement);
    out.smooth_curves = ev.curved && o.segments >= kSmoothSegments;
    if (!m.empty()) out.z_relation = z_relation(m.bbox(), o.precision);
    out.displayed = out.surface ? m.surface_area() > o.precision * o.precision
                                : m.volume() > o.precision * o.precision * o.precision;
    out.mesh = std::move(m);
    return out;
}

std::string_view to_string(Observation o) {
    switch (o) {
        case Observation::Y: return "Y";
        case Observation::N: return "N";
        case Observation::Unknown: return "Unknown";
    }
    return "?";
}

std::string_view to_string(TupleFlag f) {
    switch (f) {
        case TupleFlag::NeverExported: return "NeverExported";
        case TupleFlag::LoosenCandidate: return "LoosenCandidate";
        case TupleFlag::PractitionerProblem: return "PractitionerProblem";
    }
    return "?";
}

std::string TupleClassification::label() const {
    auto s = [](Observation o) { return o == Observation::Unknown ? std::string("?") : std::string(to_string(o)); };
    return "<" + s(exported) + "," + s(imported) + "," + s(valid) + ">";
}

TupleClassification classify_tuple(const ValidityVerdict& verdict, const EvaluationOutcome& outcome,
                                   std::optional<bool> exported) {
    using O = Observation;
    TupleClassification t;
    t.exported = exported ? (*exported ? O::Y : O::N) : O::Unknown;
    t.imported = outcome.displayed ? O::Y : O::N;
    t.valid = verdict.valid() ? O::Y : O::N;
    if (t.exported == O::N) t.flags.insert(TupleFlag::NeverExported);
    if (t.exported == O::Y && t.imported == O::Y && t.valid == O::N) t.flags.insert(TupleFlag::LoosenCandidate);
    if (t.exported == O::Y && t.imported == O::N) t.flags.insert(TupleFlag::PractitionerProblem);
    return t;
}

double plane_angle_factor(const InstanceGraph& g) { return project_unit_factor(g, "PLANEANGLEUNIT").value_or(1.0); }

double length_unit_factor(const InstanceGraph& g) { return project_unit_factor(g, "LENGTHUNIT").value_or(1.0); }

std::optional<double> context_precision(const InstanceGraph& g) {
    for (auto ctx : detail::instances_of(g, "IFCGEOMETRICREPRESENTATIONCONTEXT")) {
        auto dim = detail::number_attr(ctx, 2);
        auto p = detail::number_attr(ctx, 3);
        if (dim && *dim == 3 && p && *p > 0) return p;
    }
    return std::nullopt;
}

Frame resolve_placement(const InstanceGraph& g, EntityId id) {
    std::vector<Frame> chain;
    std::optional<InstanceRef> cur = g.find(id);
    while (cur) {
        if (cur->type_name() != "IFCLOCALPLACEMENT")
            throw UnsupportedShape(entity_label(*cur) + ": expected IFCLOCALPLACEMENT");
        if (chain.size() > 64) throw UnsupportedShape("placement chain is cyclic or too deep");
        chain.push_back(axis2_3d(g, detail::deref_attr(g, *cur, 1)));
        cur = detail::deref_attr(g, *cur, 0);
    }
    Frame world;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) world = world.compose(*it);
    return world;
}

std::size_t CheckReport::invalid_count() const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [](const ItemReport& r) { return !r.error && !r.validity.valid(); }));
}

std::vector<std::string> CheckReport::mismatches() const {
    std::vector<std::string> out;
    for (const auto& r : items)
        if (r.expected && (r.error || r.validity.reasons != r.expected->reasons)) out.push_back(r.slot);
    return out;
}

CheckReport check_file(const InstanceGraph& g, const CheckOptions& options) {
    CheckReport report;
    if (auto p = context_precision(g)) {
        report.precision = *p;
    } else {
        report.diagnostics.push_back("no 3D representation context with a precision; using 1E-05");
    }
    const double angle = plane_angle_factor(g);
    const double scale = length_unit_factor(g);

    std::map<std::string, const geomgen::GeometryTestItem*> expected;
    if (options.manifest) {
        for (const auto& it : options.manifest->items) expected[it.slot.name()] = &it;
        if (auto fs = schema::schema_of(g.header()); fs && *fs != options.manifest->schema)
            report.diagnostics.push_back("manifest schema " + std::string(schema::to_string(options.manifest->schema)) +
                                         " differs from file schema " + std::string(schema::to_string(*fs)));
    }

    for (InstanceRef product : g) {
        auto shape = detail::deref_attr(g, product, 6);
        if (!shape || shape->type_name() != "IFCPRODUCTDEFINITIONSHAPE") continue;
        auto reps = detail::attr(*shape, 2);
        if (!reps || reps->kind() != ValueKind::List) continue;
        std::optional<InstanceRef> root;
        for (ValueRef r : *reps) {
            auto rep = detail::deref(g, r);
            if (!rep || detail::text_attr(*rep, 1).value_or("") != "Body") continue;
            auto items = detail::attr(*rep, 3);
            if (items && items->kind() == ValueKind::List && items->size() == 1) root = detail::deref(g, (*items)[0]);
        }
        if (!root) continue;

        ItemReport ir;
        ir.product = product.id();
        ir.root = root->id();
        ir.slot = detail::text_attr(product, 2).value_or("#" + std::to_string(product.id()));
        ir.definition = detail::text_attr(product, 3).value_or("");
        if (auto e = expected.find(ir.slot); e != expected.end()) {
            ir.expected = e->second->expected_validity;
            expected.erase(e);
        }
        try {
            ir.validity = check_validity(g, ir.root, report.precision);
            EvalOptions eo;
            eo.segments = options.segments;
            eo.precision = report.precision;
            eo.angle_factor = angle;
            if (auto pl = detail::attr(product, 5); pl && pl->kind() == ValueKind::Reference)
                eo.placement = resolve_placement(g, pl->as_reference());
            ir.outcome = evaluate(g, ir.root, eo);
            if (scale != 1.0 && ir.outcome.mesh)
                for (auto& v : ir.outcome.mesh->vertices) v = scale * v;
        } catch (const UnsupportedShape& e) {
            ir.error = e.what();
        }
        report.items.push_back(std::move(ir));
    }
    for (const auto& [slot, item] : expected)
        report.diagnostics.push_back("manifest item " + slot + " (" + item->definition_name + ") not found in file");
    return report;
}

nlohmann::json to_json(const ItemReport& r) {
    using nlohmann::json;
    json reasons = json::array(), warnings = json::array();
    for (auto x : r.validity.reasons) reasons.push_back(to_string(x));
    for (auto x : r.validity.warnings) warnings.push_back(to_string(x));
    for (const auto& w : r.outcome.warnings) warnings.push_back(w);
    json j = {{"slot", r.slot},
              {"definition", r.definition},
              {"validity", r.error ? "Unknown" : r.validity.status()},
              {"reasons", reasons},
              {"displayed", r.outcome.displayed},
              {"z_relation", nullptr},
              {"volume", nullptr},
              {"area", nullptr},
              {"centroid", nullptr},
              {"warnings", warnings},
              {"shape_class", r.outcome.shape_class.name()},
              {"smooth_curves", r.outcome.smooth_curves}};
    if (r.outcome.z_relation) j["z_relation"] = to_string(*r.outcome.z_relation);
    if (const auto& m = r.outcome.mesh; m && !m->empty()) {
        if (m->closed()) j["volume"] = m->volume();
        j["area"] = m->surface_area();
        auto c = m->centroid();
        j["centroid"] = {c[0], c[1], c[2]};
    }
    if (r.expected) {
        json er = json::array();
        for (auto x : r.expected->reasons) er.push_back(to_string(x));
        j["expected"] = {{"validity", r.expected->status()}, {"reasons", er}};
        j["matches_manifest"] = !r.error && r.expected->reasons == r.validity.reasons;
    }
    if (r.error) j["error"] = *r.error;
    return j;
}

nlohmann::json to_json(const CheckReport& r) {
    nlohmann::json items = nlohmann::json::array();
    std::size_t displayed = 0;
    for (const auto& it : r.items) {
        items.push_back(to_json(it));
        displayed += it.outcome.displayed ? 1 : 0;
    }
    return {{"precision", r.precision},
            {"items", items},
            {"diagnostics", r.diagnostics},
            {"summary",
             {{"items", r.items.size()},
              {"invalid", r.invalid_count()},
              {"displayed", displayed},
              {"manifest_mismatches", r.mismatches()}}}};
}

void write_meshes_obj(std::ostream& out, const CheckReport& r) {
    std::size_t offset = 0;
    for (const auto& it : r.items) {
        if (!it.outcome.mesh || it.outcome.mesh->empty()) continue;
        write_obj(out, *it.outcome.mesh, it.slot, offset);
        offset += it.outcome.mesh->vertices.size();
    }
}

}  // namespace ifcaudit::geomcheck
