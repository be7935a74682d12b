#include "ifcaudit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace ifcaudit::mesh {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    if (n == 0 || !std::isfinite(n)) throw std::domain_error("cannot normalize a zero vector");
    return (1.0 / n) * a;
}

Frame Frame::compose(const Frame& inner) const {
    return {point(inner.origin), direction(inner.x), direction(inner.y), direction(inner.z)};
}

Frame Frame::from_axes(const Vec3& origin, const Vec3& axis, const Vec3& ref_direction) {
    Vec3 z = normalized(axis);
    Vec3 r = ref_direction - dot(ref_direction, z) * z;
    if (norm(r) < 1e-12) {
        // Reference direction parallel to the axis: pick any perpendicular.
        r = std::abs(z[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        r = r - dot(r, z) * z;
    }
    Vec3 x = normalized(r);
    return {origin, x, cross(z, x), z};
}

std::uint32_t TriMesh::add_vertex(const Vec3& v) {
    vertices.push_back(v);
    return static_cast<std::uint32_t>(vertices.size() - 1);
}

void TriMesh::add_quad(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    add_triangle(a, b, c);
    add_triangle(a, c, d);
}

void TriMesh::append(const TriMesh& other) {
    auto base = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    for (auto t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

void TriMesh::transform(const Frame& f) {
    for (auto& v : vertices) v = f.point(v);
}

void TriMesh::flip() {
    for (auto& t : triangles) std::swap(t[1], t[2]);
}

double TriMesh::signed_volume() const {
    double v = 0;
    for (auto t : triangles) v += dot(vertices[t[0]], cross(vertices[t[1]], vertices[t[2]]));
    return v / 6.0;
}

double TriMesh::surface_area() const {
    double a = 0;
    for (auto t : triangles)
        a += norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
    return a / 2.0;
}

Vec3 TriMesh::centroid() const {
    if (triangles.empty()) return {0, 0, 0};
    // Shift to a nearby origin to keep the tetrahedron sums well conditioned.
    const Vec3 o = vertices[triangles.front()[0]];
    double vol = 0, area = 0;
    Vec3 cv{0, 0, 0}, ca{0, 0, 0};
    for (auto t : triangles) {
        Vec3 a = vertices[t[0]] - o, b = vertices[t[1]] - o, c = vertices[t[2]] - o;
        double v = dot(a, cross(b, c)) / 6.0;
        vol += v;
        cv = cv + (v / 4.0) * (a + b + c);
        double ar = norm(cross(b - a, c - a)) / 2.0;
        area += ar;
        ca = ca + (ar / 3.0) * (a + b + c);
    }
    if (std::abs(vol) > 1e-15 * std::max(1.0, area * area)) return o + (1.0 / vol) * cv;
    if (area > 0) return o + (1.0 / area) * ca;
    return o;
}

BoundingBox TriMesh::bbox() const {
    BoundingBox b;
    if (vertices.empty()) return b;
    b.min = b.max = vertices.front();
    for (const auto& v : vertices)
        for (int i = 0; i < 3; ++i) {
            b.min[i] = std::min(b.min[i], v[i]);
            b.max[i] = std::max(b.max[i], v[i]);
        }
    return b;
}

bool TriMesh::closed() const {
    if (triangles.empty()) return false;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
    for (auto t : triangles)
        for (int i = 0; i < 3; ++i) ++directed[{t[i], t[(i + 1) % 3]}];
    for (auto& [e, n] : directed) {
        if (n != 1) return false;
        auto it = directed.find({e.second, e.first});
        if (it == directed.end() || it->second != 1) return false;
    }
    return true;
}

void TriMesh::weld(double tol) {
    struct KeyHash {
        std::size_t operator()(const std::array<std::int64_t, 3>& k) const noexcept {
            std::size_t h = static_cast<std::size_t>(k[0]) * 73856093u;
            h ^= static_cast<std::size_t>(k[1]) * 19349663u;
            h ^= static_cast<std::size_t>(k[2]) * 83492791u;
            return h;
        }
    };
    const double cell = tol > 0 ? tol : 1e-12;
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, KeyHash> grid;
    std::vector<Vec3> kept;
    std::vector<std::uint32_t> remap(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec3& v = vertices[i];
        std::array<std::int64_t, 3> k;
        for (int d = 0; d < 3; ++d) k[d] = static_cast<std::int64_t>(std::floor(v[d] / cell));
        std::int64_t found = -1;
        for (int dx = -1; dx <= 1 && found < 0; ++dx)
            for (int dy = -1; dy <= 1 && found < 0; ++dy)
                for (int dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
                    if (it == grid.end()) continue;
                    for (auto j : it->second)
                        if (norm(kept[j] - v) <= tol) {
                            found = j;
                            break;
                        }
                }
        if (found < 0) {
            found = static_cast<std::int64_t>(kept.size());
            kept.push_back(v);
            grid[k].push_back(static_cast<std::uint32_t>(found));
        }
        remap[i] = static_cast<std::uint32_t>(found);
    }

    std::vector<Triangle> tris;
    tris.reserve(triangles.size());
    const double min_double_area = tol * tol;
    for (auto t : triangles) {
        Triangle r{remap[t[0]], remap[t[1]], remap[t[2]]};
        if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
        if (norm(cross(kept[r[1]] - kept[r[0]], kept[r[2]] - kept[r[0]])) <= min_double_area) continue;
        tris.push_back(r);
    }

    // Compact away vertices no triangle uses.
    std::vector<std::int64_t> used(kept.size(), -1);
    std::vector<Vec3> out;
    for (auto& t : tris)
        for (auto& i : t) {
            if (used[i] < 0) {
                used[i] = static_cast<std::int64_t>(out.size());
                out.push_back(kept[i]);
            }
            i = static_cast<std::uint32_t>(used[i]);
        }
    vertices = std::move(out);
    triangles = std::move(tris);
}

void TriMesh::orient_outward() {
    if (signed_volume() < 0) flip();
}

double polygon_area(std::span<const Vec2> p) {
    double a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        a += u[0] * v[1] - v[0] * u[1];
    }
    return a / 2.0;
}

Vec2 polygon_centroid(std::span<const Vec2> p) {
    double a = 0, cx = 0, cy = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        double c = u[0] * v[1] - v[0] * u[1];
        a += c;
        cx += (u[0] + v[0]) * c;
        cy += (u[1] + v[1]) * c;
    }
    if (a == 0) return {0, 0};
    return {cx / (3 * a), cy / (3 * a)};
}

namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross2(a, b, p) >= 0 && cross2(b, c, p) >= 0 && cross2(c, a, p) >= 0;
}

}  // namespace

std::vector<Triangle> triangulate(std::span<const Vec2> poly) {
    std::vector<Triangle> out;
    const std::size_t n = poly.size();
    if (n < 3) return out;
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    if (polygon_area(poly) < 0) std::reverse(idx.begin(), idx.end());

    std::size_t guard = 0;
    while (idx.size() > 3 && guard < 4 * n * n) {
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i, ++guard) {
            auto ip = idx[(i + idx.size() - 1) % idx.size()];
            auto ic = idx[i];
            auto in = idx[(i + 1) % idx.size()];
            const Vec2 &a = poly[ip], &b = poly[ic], &c = poly[in];
            if (cross2(a, b, c) <= 0) continue;  // reflex or collinear
            bool ear = true;
            for (auto j : idx) {
                if (j == ip || j == ic || j == in) continue;
                const Vec2& q = poly[j];
                if (q == a || q == b || q == c) continue;
                if (in_triangle(q, a, b, c)) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            out.push_back({ip, ic, in});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) {
            // Only collinear runs remain; drop a middle vertex of zero area.
            bool dropped = false;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                auto ip = idx[(i + idx.size() - 1) % idx.size()];
                auto in = idx[(i + 1) % idx.size()];
                if (std::abs(cross2(poly[ip], poly[idx[i]], poly[in])) == 0) {
                    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
                    dropped = true;
                    break;
                }
            }
            if (!dropped) break;
        }
    }
    if (idx.size() == 3 && cross2(poly[idx[0]], poly[idx[1]], poly[idx[2]]) > 0)
        out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

namespace {

struct Grid {
    std::array<std::vector<double>, 3> coords;
    std::vector<char> inside;

    std::size_t cells(int d) const { return coords[d].size() - 1; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * cells(1) + j) * cells(2) + k;
    }
    bool at(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k) const {
        if (i < 0 || j < 0 || k < 0) return false;
        auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
        if (ui >= cells(0) || uj >= cells(1) || uk >= cells(2)) return false;
        return inside[index(ui, uj, uk)];
    }
};

bool contains(std::span<const Box> region, const Vec3& p) {
    for (const auto& b : region)
        if (p[0] > b.min[0] && p[0] < b.max[0] && p[1] > b.min[1] && p[1] < b.max[1] && p[2] > b.min[2] &&
            p[2] < b.max[2])
            return true;
    return false;
}

template <class Pred>
Grid make_grid(std::span<const Box> a, std::span<const Box> b, Pred keep) {
    Grid g;
    for (int d = 0; d < 3; ++d) {
        auto& c = g.coords[d];
        for (auto& x : a) c.insert(c.end(), {x.min[d], x.max[d]});
        for (auto& x : b) c.insert(c.end(), {x.min[d], x.max[d]});
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        if (c.size() < 2) c.assign({0.0, 0.0});
    }
    g.inside.assign(g.cells(0) * g.cells(1) * g.cells(2), 0);
    for (std::size_t i = 0; i < g.cells(0); ++i)
        for (std::size_t j = 0; j < g.cells(1); ++j)
            for (std::size_t k = 0; k < g.cells(2); ++k) {
                Vec3 centre{(g.coords[0][i] + g.coords[0][i + 1]) / 2, (g.coords[1][j] + g.coords[1][j + 1]) / 2,
                            (g.coords[2][k] + g.coords[2][k + 1]) / 2};
                g.inside[g.index(i, j, k)] = keep(contains(a, centre), contains(b, centre));
            }
    return g;
}

}  // namespace

std::vector<Box> box_boolean(std::span<const Box> a, std::span<const Box> b, BoolOp op) {
    auto keep = [op](bool in_a, bool in_b) {
        switch (op) {
            case BoolOp::Union: return in_a || in_b;
            case BoolOp::Intersection: return in_a && in_b;
            case BoolOp::Difference: return in_a && !in_b;
        }
        return false;
    };
    Grid g = make_grid(a, b, keep);
    std::vector<Box> out;
    for (std::size_t i = 0; i < g.cells(0); ++i)
        for (std::size_t j = 0; j < g.cells(1); ++j)
            for (std::size_t k = 0; k < g.cells(2); ++k)
                if (g.inside[g.index(i, j, k)])
                    out.push_back({{g.coords[0][i], g.coords[1][j], g.coords[2][k]},
                                   {g.coords[0][i + 1], g.coords[1][j + 1], g.coords[2][k + 1]}});
    return out;
}

TriMesh boxes_to_mesh(std::span<const Box> boxes) {
    Grid g = make_grid(boxes, {}, [](bool in_a, bool) { return in_a; });
    TriMesh m;
    std::map<std::array<std::size_t, 3>, std::uint32_t> vid;
    auto vertex = [&](std::size_t i, std::size_t j, std::size_t k) {
        auto [it, fresh] = vid.try_emplace({i, j, k}, 0);
        if (fresh) it->second = m.add_vertex({g.coords[0][i], g.coords[1][j], g.coords[2][k]});
        return it->second;
    };
    for (std::size_t i = 0; i < g.cells(0); ++i)
        for (std::size_t j = 0; j < g.cells(1); ++j)
            for (std::size_t k = 0; k < g.cells(2); ++k) {
                if (!g.inside[g.index(i, j, k)]) continue;
                auto si = static_cast<std::ptrdiff_t>(i), sj = static_cast<std::ptrdiff_t>(j),
                     sk = static_cast<std::ptrdiff_t>(k);
                for (int axis = 0; axis < 3; ++axis)
                    for (int side = 0; side < 2; ++side) {
                        std::ptrdiff_t n[3] = {si, sj, sk};
                        n[axis] += side ? 1 : -1;
                        if (g.at(n[0], n[1], n[2])) continue;
                        // Face corners on the plane axis = (cell + side).
                        std::size_t lo[3] = {i, j, k};
                        lo[axis] += static_cast<std::size_t>(side);
                        int u = (axis + 1) % 3, w = (axis + 2) % 3;
                        std::size_t c[4][3];
                        for (int q = 0; q < 4; ++q) {
                            std::copy(lo, lo + 3, c[q]);
                            if (q == 1 || q == 2) ++c[q][u];
                            if (q == 2 || q == 3) ++c[q][w];
                        }
                        auto a = vertex(c[0][0], c[0][1], c[0][2]);
                        auto b = vertex(c[1][0], c[1][1], c[1][2]);
                        auto cc = vertex(c[2][0], c[2][1], c[2][2]);
                        auto d = vertex(c[3][0], c[3][1], c[3][2]);
                        // (u, w, axis) is a cyclic permutation, so a-b-c-d is
                        // counter-clockwise seen from +axis.
                        if (side) {
                            m.add_quad(a, b, cc, d);
                        } else {
                            m.add_quad(a, d, cc, b);
                        }
                    }
            }
    return m;
}

void write_obj(std::ostream& out, const TriMesh& m, std::string_view name, std::size_t offset) {
    out << "o " << name << '\n';
    for (const auto& v : m.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (auto t : m.triangles)
        out << "f " << t[0] + offset + 1 << ' ' << t[1] + offset + 1 << ' ' << t[2] + offset + 1 << '\n';
}

}  // namespace ifcaudit::mesh
