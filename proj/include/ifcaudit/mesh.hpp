// Triangle meshes and the small amount of computational geometry the
// evaluator needs.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace ifcaudit::mesh {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a);
/// Unit vector; throws std::domain_error for a zero vector.
Vec3 normalized(const Vec3& a);

/// Right-handed orthonormal frame with origin.
struct Frame {
    Vec3 origin{0, 0, 0};
    Vec3 x{1, 0, 0};
    Vec3 y{0, 1, 0};
    Vec3 z{0, 0, 1};

    Vec3 point(const Vec3& p) const { return origin + p[0] * x + p[1] * y + p[2] * z; }
    Vec3 direction(const Vec3& d) const { return d[0] * x + d[1] * y + d[2] * z; }
    /// this * inner: inner is expressed in this frame.
    Frame compose(const Frame& inner) const;

    /// Frame from a location, a z axis and an approximate x axis, following
    /// the IfcAxis2Placement3D construction.
    static Frame from_axes(const Vec3& origin, const Vec3& axis, const Vec3& ref_direction);
};

using Triangle = std::array<std::uint32_t, 3>;

struct BoundingBox {
    Vec3 min{0, 0, 0};
    Vec3 max{0, 0, 0};
};

class TriMesh {
public:
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    bool empty() const noexcept { return triangles.empty(); }
    std::uint32_t add_vertex(const Vec3& v);
    void add_triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) { triangles.push_back({a, b, c}); }
    /// Fan-free quad split (a,b,c) (a,c,d).
    void add_quad(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d);
    void append(const TriMesh& other);
    void transform(const Frame& f);
    void flip();

    /// Signed volume by the divergence theorem; positive for closed,
    /// outward-oriented meshes.
    double signed_volume() const;
    double volume() const { return signed_volume(); }
    double surface_area() const;
    /// Volume centroid when the mesh encloses volume, otherwise the
    /// area-weighted centroid of the surface.
    Vec3 centroid() const;
    BoundingBox bbox() const;
    /// Every undirected edge is used by exactly two triangles, once in each
    /// direction.
    bool closed() const;

    /// Merges vertices closer than `tolerance`, then drops triangles that
    /// became degenerate (doubled area at or below tolerance squared) and
    /// unreferenced vertices.
    void weld(double tolerance);
    /// Flips all triangles when the signed volume is negative.
    void orient_outward();
};

/// Signed area of a polygon (positive when counter-clockwise).
double polygon_area(std::span<const Vec2> poly);
Vec2 polygon_centroid(std::span<const Vec2> poly);
/// Ear-clipping triangulation of a simple polygon. Returns index triples
/// counter-clockwise regardless of the input winding.
std::vector<Triangle> triangulate(std::span<const Vec2> poly);

/// Axis-aligned box; used by the boolean evaluator.
struct Box {
    Vec3 min;
    Vec3 max;
    double volume() const { return (max[0] - min[0]) * (max[1] - min[1]) * (max[2] - min[2]); }
};

enum class BoolOp { Union, Intersection, Difference };

/// Regions are unions of boxes. The result is decomposed on the grid formed
/// by all box coordinates of both operands; every cell whose centre lies in
/// the combined region is kept.
std::vector<Box> box_boolean(std::span<const Box> a, std::span<const Box> b, BoolOp op);
/// Boundary of a union of grid-aligned boxes as a closed, outward mesh.
TriMesh boxes_to_mesh(std::span<const Box> boxes);

/// OBJ-style ASCII dump ("v x y z" / "f i j k", 1-based) under an object name.
void write_obj(std::ostream& out, const TriMesh& m, std::string_view name, std::size_t vertex_offset = 0);

}  // namespace ifcaudit::mesh
