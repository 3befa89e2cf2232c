#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "geosnakes/field.hpp"

namespace geosnakes {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Closed polyline extracted from the zero level set. Points are ordered so
// that the interior (phi < 0) lies on the left of the direction of travel,
// i.e. the rotated tangent (-ty, tx) points inward.
struct Contour {
    std::vector<Vec2> points;
    bool closed = true;

    double length() const {
        double len = 0.0;
        const std::size_t n = points.size();
        if (n < 2) return 0.0;
        const std::size_t last = closed ? n : n - 1;
        for (std::size_t i = 0; i < last; ++i) {
            const Vec2& a = points[i];
            const Vec2& b = points[(i + 1) % n];
            len += std::hypot(b.x - a.x, b.y - a.y);
        }
        return len;
    }

    // Unit tangent by central difference of neighboring points.
    Vec2 tangent(std::size_t i) const {
        const std::size_t n = points.size();
        const Vec2& p = points[(i + 1) % n];
        const Vec2& m = points[(i + n - 1) % n];
        double tx = p.x - m.x, ty = p.y - m.y;
        const double len = std::hypot(tx, ty);
        if (len > 1e-12) {
            tx /= len;
            ty /= len;
        }
        return {tx, ty};
    }

    // Inward normal: +90 degree rotation of the tangent.
    Vec2 inward_normal(std::size_t i) const {
        const Vec2 t = tangent(i);
        return {-t.y, t.x};
    }
};

// Signed geometric primitive for level-set initialization. `invert` flips
// inside and outside.
struct ShapeSpec {
    enum class Kind { Circle, Rectangle, Polygon };
    Kind kind = Kind::Circle;
    double cx = 0.0, cy = 0.0, radius = 0.0;          // circle
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;    // rectangle corners
    std::vector<Vec2> vertices;                        // polygon
    bool invert = false;

    static ShapeSpec circle(double cx, double cy, double r, bool invert = false) {
        ShapeSpec s;
        s.kind = Kind::Circle;
        s.cx = cx;
        s.cy = cy;
        s.radius = r;
        s.invert = invert;
        return s;
    }
    static ShapeSpec rectangle(double x0, double y0, double x1, double y1, bool invert = false) {
        ShapeSpec s;
        s.kind = Kind::Rectangle;
        s.x0 = std::min(x0, x1);
        s.y0 = std::min(y0, y1);
        s.x1 = std::max(x0, x1);
        s.y1 = std::max(y0, y1);
        s.invert = invert;
        return s;
    }
    static ShapeSpec polygon(std::vector<Vec2> verts, bool invert = false) {
        ShapeSpec s;
        s.kind = Kind::Polygon;
        s.vertices = std::move(verts);
        s.invert = invert;
        return s;
    }
};

namespace detail {

inline double circle_sdf(const ShapeSpec& s, double x, double y) {
    return std::hypot(x - s.cx, y - s.cy) - s.radius;
}

inline double rectangle_sdf(const ShapeSpec& s, double x, double y) {
    const double hx = 0.5 * (s.x1 - s.x0), hy = 0.5 * (s.y1 - s.y0);
    const double qx = std::abs(x - 0.5 * (s.x0 + s.x1)) - hx;
    const double qy = std::abs(y - 0.5 * (s.y0 + s.y1)) - hy;
    const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
    return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
}

inline double polygon_sdf(const ShapeSpec& s, double x, double y) {
    const std::vector<Vec2>& v = s.vertices;
    const std::size_t n = v.size();
    double d2 = std::numeric_limits<double>::max();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double ex = v[j].x - v[i].x, ey = v[j].y - v[i].y;
        const double px = x - v[i].x, py = y - v[i].y;
        const double t = std::clamp((px * ex + py * ey) / std::max(ex * ex + ey * ey, 1e-300), 0.0, 1.0);
        const double dx = px - t * ex, dy = py - t * ey;
        d2 = std::min(d2, dx * dx + dy * dy);
        const bool crosses = (v[i].y > y) != (v[j].y > y);
        if (crosses && x < v[i].x + (y - v[i].y) / (v[j].y - v[i].y) * (v[j].x - v[i].x))
            inside = !inside;
    }
    return (inside ? -1.0 : 1.0) * std::sqrt(d2);
}

inline double shape_sdf(const ShapeSpec& s, double x, double y) {
    double d;
    switch (s.kind) {
        case ShapeSpec::Kind::Circle: d = circle_sdf(s, x, y); break;
        case ShapeSpec::Kind::Rectangle: d = rectangle_sdf(s, x, y); break;
        default: d = polygon_sdf(s, x, y); break;
    }
    return s.invert ? -d : d;
}

inline void require_shape_fits(const ShapeSpec& s, int width, int height) {
    double rx = 0.0, ry = 0.0;
    switch (s.kind) {
        case ShapeSpec::Kind::Circle:
            rx = s.cx;
            ry = s.cy;
            break;
        case ShapeSpec::Kind::Rectangle:
            rx = 0.5 * (s.x0 + s.x1);
            ry = 0.5 * (s.y0 + s.y1);
            break;
        default:
            if (s.vertices.size() < 3)
                throw std::invalid_argument("init_from_shapes: polygon needs at least 3 vertices");
            for (const Vec2& p : s.vertices) {
                rx += p.x / s.vertices.size();
                ry += p.y / s.vertices.size();
            }
            break;
    }
    if (rx < 0.0 || rx > width - 1 || ry < 0.0 || ry > height - 1)
        throw std::invalid_argument("init_from_shapes: shape center outside the grid");
}

}  // namespace detail

// Signed distance to the union of the given primitives, negative inside.
// Exact for single primitives, pointwise min for unions.
inline ScalarField init_from_shapes(const std::vector<ShapeSpec>& shapes, int width, int height) {
    if (shapes.empty())
        throw std::invalid_argument("init_from_shapes: shape list is empty");
    if (width < 3 || height < 3)
        throw std::invalid_argument("init_from_shapes: grid must be at least 3x3");
    for (const ShapeSpec& s : shapes) detail::require_shape_fits(s, width, height);
    ScalarField phi(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double d = std::numeric_limits<double>::max();
            for (const ShapeSpec& s : shapes) d = std::min(d, detail::shape_sdf(s, x, y));
            phi.at(x, y) = d;
        }
    }
    return phi;
}

// div(grad phi / |grad phi|) by central differences, clamped to [-1, 1]
// (one over a one-pixel radius).
inline ScalarField curvature(const ScalarField& phi) {
    require_valid(phi, "curvature");
    constexpr double kEps = 1e-8;
    const int w = phi.width, h = phi.height;
    ScalarField out(w, h, 0.0);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double px = 0.5 * (phi.at(x + 1, y) - phi.at(x - 1, y));
            const double py = 0.5 * (phi.at(x, y + 1) - phi.at(x, y - 1));
            const double pxx = phi.at(x + 1, y) - 2.0 * phi.at(x, y) + phi.at(x - 1, y);
            const double pyy = phi.at(x, y + 1) - 2.0 * phi.at(x, y) + phi.at(x, y - 1);
            const double pxy = 0.25 * (phi.at(x + 1, y + 1) - phi.at(x + 1, y - 1) -
                                       phi.at(x - 1, y + 1) + phi.at(x - 1, y - 1));
            const double n2 = px * px + py * py;
            const double k = (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) /
                             (n2 * std::sqrt(n2) + kEps);
            out.at(x, y) = std::clamp(k, -1.0, 1.0);
        }
    }
    for (int x = 0; x < w; ++x) {
        out.at(x, 0) = out.at(x, 1);
        out.at(x, h - 1) = out.at(x, h - 2);
    }
    for (int y = 0; y < h; ++y) {
        out.at(0, y) = out.at(1, y);
        out.at(w - 1, y) = out.at(w - 2, y);
    }
    return out;
}

// Approximated Dirac delta with support [-1, 1].
inline double dirac_approx(double x) {
    if (std::abs(x) > 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
}

// Outward unit normal grad phi / (|grad phi| + 1e-12).
inline VectorField normal_field(const ScalarField& phi) {
    VectorField g = gradient_central(phi);
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double len = std::hypot(g.u[i], g.v[i]) + 1e-12;
        g.u[i] /= len;
        g.v[i] /= len;
    }
    return g;
}

namespace detail {

// Grid edge ids for marching squares: horizontal edge (x,y)-(x+1,y) and
// vertical edge (x,y)-(x,y+1).
inline std::int64_t h_edge_id(int x, int y, int w) { return (static_cast<std::int64_t>(y) * w + x) * 2; }
inline std::int64_t v_edge_id(int x, int y, int w) { return (static_cast<std::int64_t>(y) * w + x) * 2 + 1; }

struct MsSegment {
    std::int64_t a_id, b_id;
    Vec2 a, b;
};

inline double cross_t(double va, double vb) { return va / (va - vb); }

}  // namespace detail

// Marching squares on the zero level set with linear interpolation.
// Each closed component is returned as one positively oriented Contour
// (interior on the left); components with fewer than 3 vertices are
// discarded. Returns an empty list for uniform-sign phi.
inline std::vector<Contour> extract_contours(const ScalarField& phi) {
    require_valid(phi, "extract_contours");
    const int w = phi.width, h = phi.height;

    std::vector<detail::MsSegment> segments;
    auto inside = [&](int x, int y) { return phi.at(x, y) < 0.0; };

    for (int y = 0; y < h - 1; ++y) {
        for (int x = 0; x < w - 1; ++x) {
            const double tl = phi.at(x, y), tr = phi.at(x + 1, y);
            const double br = phi.at(x + 1, y + 1), bl = phi.at(x, y + 1);
            const bool itl = inside(x, y), itr = inside(x + 1, y);
            const bool ibr = inside(x + 1, y + 1), ibl = inside(x, y + 1);
            const int count = itl + itr + ibr + ibl;
            if (count == 0 || count == 4) continue;

            struct Crossing {
                std::int64_t id;
                Vec2 p;
            };
            Crossing top{detail::h_edge_id(x, y, w), {x + detail::cross_t(tl, tr), static_cast<double>(y)}};
            Crossing right{detail::v_edge_id(x + 1, y, w), {static_cast<double>(x + 1), y + detail::cross_t(tr, br)}};
            Crossing bottom{detail::h_edge_id(x, y + 1, w), {x + detail::cross_t(bl, br), static_cast<double>(y + 1)}};
            Crossing left{detail::v_edge_id(x, y, w), {static_cast<double>(x), y + detail::cross_t(tl, bl)}};

            auto emit = [&](const Crossing& p, const Crossing& q) {
                segments.push_back({p.id, q.id, p.p, q.p});
            };

            const bool cross_top = itl != itr, cross_right = itr != ibr;
            const bool cross_bottom = ibl != ibr, cross_left = itl != ibl;
            const int crossings = cross_top + cross_right + cross_bottom + cross_left;
            if (crossings == 2) {
                Crossing pts[2];
                int k = 0;
                if (cross_top) pts[k++] = top;
                if (cross_right) pts[k++] = right;
                if (cross_bottom) pts[k++] = bottom;
                if (cross_left) pts[k++] = left;
                emit(pts[0], pts[1]);
            } else if (crossings == 4) {
                // Saddle cell: resolve the pairing with the center average.
                const bool center_inside = (tl + tr + br + bl) < 0.0;
                if (center_inside == itl) {
                    emit(top, right);
                    emit(left, bottom);
                } else {
                    emit(top, left);
                    emit(right, bottom);
                }
            }
        }
    }

    if (segments.empty()) return {};

    // Chain segments into loops; every interior grid edge is shared by at
    // most two cells, so vertices have degree <= 2.
    std::unordered_map<std::int64_t, std::vector<std::size_t>> by_vertex;
    by_vertex.reserve(segments.size() * 2);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        by_vertex[segments[i].a_id].push_back(i);
        by_vertex[segments[i].b_id].push_back(i);
    }

    std::vector<bool> used(segments.size(), false);
    std::vector<Contour> contours;

    for (std::size_t start = 0; start < segments.size(); ++start) {
        if (used[start]) continue;
        used[start] = true;
        std::vector<std::int64_t> ids{segments[start].a_id, segments[start].b_id};
        std::vector<Vec2> pts{segments[start].a, segments[start].b};

        for (int dir = 0; dir < 2; ++dir) {
            bool extended = true;
            while (extended) {
                extended = false;
                const std::int64_t tail = dir == 0 ? ids.back() : ids.front();
                for (std::size_t si : by_vertex[tail]) {
                    if (used[si]) continue;
                    const detail::MsSegment& s = segments[si];
                    const std::int64_t next = (s.a_id == tail) ? s.b_id : s.a_id;
                    const Vec2 nextp = (s.a_id == tail) ? s.b : s.a;
                    used[si] = true;
                    if (dir == 0) {
                        ids.push_back(next);
                        pts.push_back(nextp);
                    } else {
                        ids.insert(ids.begin(), next);
                        pts.insert(pts.begin(), nextp);
                    }
                    extended = true;
                    break;
                }
                if (!ids.empty() && ids.front() == ids.back() && ids.size() > 2) break;
            }
            if (!ids.empty() && ids.front() == ids.back() && ids.size() > 2) break;
        }

        Contour c;
        c.closed = ids.size() > 2 && ids.front() == ids.back();
        if (c.closed) pts.pop_back();
        c.points = std::move(pts);
        if (c.points.size() < 3) continue;

        if (c.closed) {
            // Orient so that phi < 0 lies on the left (majority vote over
            // inward-normal probes).
            double vote = 0.0;
            const std::size_t n = c.points.size();
            const std::size_t step = std::max<std::size_t>(1, n / 16);
            for (std::size_t i = 0; i < n; i += step) {
                const Vec2 nrm = c.inward_normal(i);
                const Vec2& p = c.points[i];
                vote += bilinear(phi, p.x + 0.75 * nrm.x, p.y + 0.75 * nrm.y);
            }
            if (vote > 0.0) std::reverse(c.points.begin(), c.points.end());
        }
        contours.push_back(std::move(c));
    }
    return contours;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * ex), p.y - (a.y + t * ey));
}

inline double point_contours_distance(const Vec2& p, const std::vector<Contour>& cs) {
    double best = std::numeric_limits<double>::max();
    for (const Contour& c : cs) {
        const std::size_t n = c.points.size();
        if (n == 1) best = std::min(best, std::hypot(p.x - c.points[0].x, p.y - c.points[0].y));
        const std::size_t last = c.closed ? n : n - 1;
        for (std::size_t i = 0; i < last; ++i)
            best = std::min(best, point_segment_distance(p, c.points[i], c.points[(i + 1) % n]));
    }
    return best;
}

// Symmetric Hausdorff distance between two contour sets (vertices of one
// against the polyline of the other).
inline double contours_hausdorff(const std::vector<Contour>& a, const std::vector<Contour>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const Contour& c : a)
        for (const Vec2& p : c.points) worst = std::max(worst, point_contours_distance(p, b));
    for (const Contour& c : b)
        for (const Vec2& p : c.points) worst = std::max(worst, point_contours_distance(p, a));
    return worst;
}

// First-order reinitialization toward a signed distance function:
// phi_t = sign(phi0) (1 - |grad phi|) with Godunov upwinding and the
// smoothed sign phi / sqrt(phi^2 + 1), dt = 0.3. Signals if the zero level
// set moves by more than half a pixel.
inline ScalarField reinitialize(const ScalarField& phi0, int iterations) {
    require_valid(phi0, "reinitialize");
    if (iterations < 0)
        throw std::invalid_argument("reinitialize: negative iteration count");
    constexpr double kDt = 0.3;
    const std::size_t n = phi0.size();

    ScalarField sign_smooth(phi0.width, phi0.height);
    ScalarField godunov_sign(phi0.width, phi0.height);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = phi0.values[i] / std::sqrt(phi0.values[i] * phi0.values[i] + 1.0);
        sign_smooth.values[i] = s;
        godunov_sign.values[i] = -s;  // phi_t = -S * |grad phi| + S
    }

    const std::vector<Contour> before = extract_contours(phi0);
    ScalarField phi = phi0;
    for (int it = 0; it < iterations; ++it) {
        const ScalarField g = upwind_gradient_magnitude(phi, godunov_sign);
        for (std::size_t i = 0; i < n; ++i)
            phi.values[i] += kDt * sign_smooth.values[i] * (1.0 - g.values[i]);
    }

    if (!before.empty()) {
        const std::vector<Contour> after = extract_contours(phi);
        const double moved = contours_hausdorff(before, after);
        if (!(moved < 0.5))
            throw std::runtime_error("reinitialize: zero level set moved by " + std::to_string(moved) +
                                     " px (limit 0.5)");
    }
    return phi;
}

}  // namespace geosnakes
