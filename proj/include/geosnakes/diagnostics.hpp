#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "geosnakes/field.hpp"
#include "geosnakes/levelset.hpp"

namespace geosnakes {

struct CriticalPoint {
    enum class Kind { Saddle, Extremum, Degenerate };
    double x = 0.0, y = 0.0;
    Kind kind = Kind::Degenerate;
    double grad_norm = 0.0;
    double hessian_det = 0.0;

    static std::string kind_to_string(Kind k) {
        switch (k) {
            case Kind::Saddle: return "saddle";
            case Kind::Extremum: return "extremum";
            default: return "degenerate";
        }
    }
};

inline double default_critical_grad_tol(const ScalarField& g) {
    const VectorField grad = gradient_central(g);
    double mx = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i)
        mx = std::max(mx, std::hypot(grad.u[i], grad.v[i]));
    return 0.02 * mx;
}

// Scan interior pixels for local minima of the gradient norm, refine each
// to subpixel with a quadratic fit of the squared norm, keep those whose
// refined norm falls below grad_tol, classify by the sign of the Hessian
// determinant, and deduplicate within 2 px. Critical points rarely sit on
// lattice points, so the tolerance is applied to the refined value.
inline std::vector<CriticalPoint> find_critical_points(const ScalarField& g, double grad_tol) {
    require_valid(g, "find_critical_points");
    if (!(grad_tol > 0.0))
        throw std::invalid_argument("find_critical_points: grad_tol must be positive");
    const int w = g.width, h = g.height;

    const VectorField grad = gradient_central(g);
    ScalarField nsq(w, h);
    for (std::size_t i = 0; i < nsq.size(); ++i)
        nsq.values[i] = grad.u[i] * grad.u[i] + grad.v[i] * grad.v[i];

    std::vector<CriticalPoint> candidates;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double nv = nsq.at(x, y);
            bool is_min = true;
            for (int dy = -1; dy <= 1 && is_min; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (nsq.at(x + dx, y + dy) < nv) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;

            // Paraboloid fit of the squared norm; its minimum gives the
            // subpixel position and the refined norm value.
            double ox = 0.0, oy = 0.0;
            double refined = nv;
            const double nx = 0.5 * (nsq.at(x + 1, y) - nsq.at(x - 1, y));
            const double ny = 0.5 * (nsq.at(x, y + 1) - nsq.at(x, y - 1));
            const double nxx = nsq.at(x + 1, y) - 2.0 * nv + nsq.at(x - 1, y);
            const double nyy = nsq.at(x, y + 1) - 2.0 * nv + nsq.at(x, y - 1);
            const double nxy = 0.25 * (nsq.at(x + 1, y + 1) - nsq.at(x + 1, y - 1) -
                                       nsq.at(x - 1, y + 1) + nsq.at(x - 1, y - 1));
            const double det_fit = nxx * nyy - nxy * nxy;
            if (std::abs(det_fit) > 1e-15) {
                ox = std::clamp(-(nyy * nx - nxy * ny) / det_fit, -1.0, 1.0);
                oy = std::clamp(-(nxx * ny - nxy * nx) / det_fit, -1.0, 1.0);
                refined = nv + 0.5 * (nx * ox + ny * oy);
            }
            if (std::sqrt(std::max(refined, 0.0)) >= grad_tol) continue;

            const double hxx = g.at(x + 1, y) - 2.0 * g.at(x, y) + g.at(x - 1, y);
            const double hyy = g.at(x, y + 1) - 2.0 * g.at(x, y) + g.at(x, y - 1);
            const double hxy = 0.25 * (g.at(x + 1, y + 1) - g.at(x + 1, y - 1) - g.at(x - 1, y + 1) +
                                       g.at(x - 1, y - 1));
            const double det = hxx * hyy - hxy * hxy;

            CriticalPoint cp;
            cp.x = x + ox;
            cp.y = y + oy;
            cp.grad_norm = std::sqrt(nv);
            cp.hessian_det = det;
            cp.kind = det < 0.0 ? CriticalPoint::Kind::Saddle
                                : (det > 0.0 ? CriticalPoint::Kind::Extremum
                                             : CriticalPoint::Kind::Degenerate);
            candidates.push_back(cp);
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.grad_norm < b.grad_norm; });
    std::vector<CriticalPoint> kept;
    for (const CriticalPoint& c : candidates) {
        bool duplicate = false;
        for (const CriticalPoint& k : kept)
            if (std::hypot(c.x - k.x, c.y - k.y) < 2.0) {
                duplicate = true;
                break;
            }
        if (!duplicate) kept.push_back(c);
    }
    return kept;
}

inline std::string critical_points_csv(const std::vector<CriticalPoint>& points) {
    std::string out = "x,y,kind,grad_norm,hess_det\n";
    char line[160];
    for (const CriticalPoint& p : points) {
        std::snprintf(line, sizeof(line), "%.4f,%.4f,%s,%.9g,%.9g\n", p.x, p.y,
                      CriticalPoint::kind_to_string(p.kind).c_str(), p.grad_norm, p.hessian_det);
        out += line;
    }
    return out;
}

// Bilinear samples of a field at the contour vertices.
inline std::vector<double> sample_on_contour(const ScalarField& f, const Contour& contour) {
    std::vector<double> out;
    out.reserve(contour.points.size());
    for (const Vec2& p : contour.points) out.push_back(bilinear(f, p.x, p.y));
    return out;
}

struct PspReport {
    bool is_stationary_full = false;
    bool is_stationary_normal_only = false;
    double tangential_residual = 0.0;
    double normal_residual = 0.0;

    std::string to_text() const {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "is_stationary_full=%d\nis_stationary_normal_only=%d\n"
                      "tangential_residual=%.9g\nnormal_residual=%.9g\n",
                      is_stationary_full ? 1 : 0, is_stationary_normal_only ? 1 : 0,
                      tangential_residual, normal_residual);
        return buf;
    }
};

namespace detail {

inline double signed_area(const Contour& c) {
    double a = 0.0;
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = c.points[i];
        const Vec2& q = c.points[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

}  // namespace detail

// Samples the stationarity residual along the contour. The normal part is
// |g kappa + <F, N_in>| and the tangential part |<F, T>|; a contour that is
// stationary in the normal direction while the tangential part stays an
// order of magnitude above tol is flagged as pseudo stationary. The inward
// normal is recovered from the point order via the signed area, so the
// report does not depend on the traversal direction.
inline PspReport classify_psp(const Contour& contour, const ScalarField& g, const VectorField& F,
                              const std::vector<double>& kappa_on_contour, double tol) {
    if (!contour.closed) throw std::invalid_argument("classify_psp: contour must be closed");
    if (contour.points.size() < 3 || kappa_on_contour.size() != contour.points.size())
        throw std::invalid_argument("classify_psp: bad contour or curvature sample count");

    PspReport rep;
    const double orient = detail::signed_area(contour) >= 0.0 ? 1.0 : -1.0;
    const std::size_t n = contour.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = contour.points[i];
        const Vec2 t = contour.tangent(i);
        const double fx = bilinear_component(F.u, F.width, F.height, p.x, p.y);
        const double fy = bilinear_component(F.v, F.width, F.height, p.x, p.y);
        const double gv = bilinear(g, p.x, p.y);
        rep.tangential_residual += std::abs(fx * t.x + fy * t.y);
        rep.normal_residual +=
            std::abs(gv * kappa_on_contour[i] + orient * (fx * (-t.y) + fy * t.x));
    }
    rep.is_stationary_full = rep.normal_residual < tol && rep.tangential_residual < tol;
    rep.is_stationary_normal_only =
        rep.normal_residual < tol && rep.tangential_residual >= 10.0 * tol;
    return rep;
}

struct LevelResidence {
    double g_min = 0.0;
    double g_max = 0.0;
    double g_std = 0.0;
};

// Range and standard deviation of g sampled along the contour; converged
// equilibrium-flow contours ride level lines and show little variation.
inline LevelResidence level_set_residence(const Contour& contour, const ScalarField& g) {
    if (!contour.closed) throw std::invalid_argument("level_set_residence: contour must be closed");
    if (contour.points.size() < 3)
        throw std::invalid_argument("level_set_residence: contour needs at least 3 points");
    LevelResidence r;
    double sum = 0.0, sum2 = 0.0;
    bool first = true;
    for (const Vec2& p : contour.points) {
        const double v = bilinear(g, p.x, p.y);
        if (first) {
            r.g_min = r.g_max = v;
            first = false;
        } else {
            r.g_min = std::min(r.g_min, v);
            r.g_max = std::max(r.g_max, v);
        }
        sum += v;
        sum2 += v * v;
    }
    const double m = sum / static_cast<double>(contour.points.size());
    r.g_std = std::sqrt(std::max(0.0, sum2 / static_cast<double>(contour.points.size()) - m * m));
    return r;
}

}  // namespace geosnakes
