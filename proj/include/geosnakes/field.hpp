#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace geosnakes {

// Dense 2D scalar grid, row-major, unit pixel spacing.
// x is the column index, y the row index; rows grow downward.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return values.size(); }
    bool same_size(const ScalarField& o) const { return width == o.width && height == o.height; }
};

// Dense 2D field of 2-vectors, stored as separate u (x) and v (y) components.
struct VectorField {
    int width = 0;
    int height = 0;
    std::vector<double> u;
    std::vector<double> v;

    VectorField() = default;
    VectorField(int w, int h, double fu = 0.0, double fv = 0.0)
        : width(w), height(h),
          u(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fu),
          v(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fv) {}

    double& ux(int x, int y) { return u[static_cast<std::size_t>(y) * width + x]; }
    double ux(int x, int y) const { return u[static_cast<std::size_t>(y) * width + x]; }
    double& vy(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    double vy(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return u.size(); }
    bool same_size(const VectorField& o) const { return width == o.width && height == o.height; }
    bool same_size(const ScalarField& o) const { return width == o.width && height == o.height; }
};

inline void require_valid(const ScalarField& f, const char* what) {
    if (f.width < 3 || f.height < 3)
        throw std::invalid_argument(std::string(what) + ": field must be at least 3x3");
    if (f.values.size() != static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height))
        throw std::invalid_argument(std::string(what) + ": value count does not match dimensions");
    for (double x : f.values)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(what) + ": non-finite value");
}

inline void require_same_size(const ScalarField& a, const ScalarField& b, const char* what) {
    if (!a.same_size(b))
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

inline void require_same_size(const VectorField& a, const VectorField& b, const char* what) {
    if (!a.same_size(b))
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Central differences on interior points, one-sided on the boundary ring.
inline VectorField gradient_central(const ScalarField& f) {
    require_valid(f, "gradient_central");
    const int w = f.width, h = f.height;
    VectorField g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx, gy;
            if (x == 0)
                gx = f.at(1, y) - f.at(0, y);
            else if (x == w - 1)
                gx = f.at(w - 1, y) - f.at(w - 2, y);
            else
                gx = 0.5 * (f.at(x + 1, y) - f.at(x - 1, y));
            if (y == 0)
                gy = f.at(x, 1) - f.at(x, 0);
            else if (y == h - 1)
                gy = f.at(x, h - 1) - f.at(x, h - 2);
            else
                gy = 0.5 * (f.at(x, y + 1) - f.at(x, y - 1));
            g.ux(x, y) = gx;
            g.vy(x, y) = gy;
        }
    }
    return g;
}

namespace detail {

// Mirror index into [0, n), reflecting across the edge samples (-1 -> 0, n -> n-1).
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
        k[i + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

}  // namespace detail

// Separable discrete Gaussian, kernel truncated at ceil(3*sigma) and
// renormalized, reflective boundary handling.
inline ScalarField gaussian_smooth(const ScalarField& f, double sigma) {
    require_valid(f, "gaussian_smooth");
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_smooth: sigma must be positive");
    const std::vector<double> k = detail::gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = f.width, h = f.height;

    ScalarField tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * f.at(detail::reflect(x + i, w), y);
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp.at(x, detail::reflect(y + i, h));
            out.at(x, y) = acc;
        }
    }
    return out;
}

// Per-pixel +-90 degree rotation. direction +1 maps (u,v) -> (-v,u),
// direction -1 maps (u,v) -> (v,-u). Magnitude is preserved.
inline VectorField rotate90(const VectorField& F, int direction) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("rotate90: direction must be +1 or -1");
    VectorField out(F.width, F.height);
    const std::size_t n = F.size();
    if (direction == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out.u[i] = -F.v[i];
            out.v[i] = F.u[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            out.u[i] = F.v[i];
            out.v[i] = -F.u[i];
        }
    }
    return out;
}

inline ScalarField dot_field(const VectorField& A, const VectorField& B) {
    require_same_size(A, B, "dot_field");
    ScalarField out(A.width, A.height);
    const std::size_t n = A.size();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = A.u[i] * B.u[i] + A.v[i] * B.v[i];
    return out;
}

inline ScalarField magnitude(const VectorField& F) {
    ScalarField out(F.width, F.height);
    const std::size_t n = F.size();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = std::hypot(F.u[i], F.v[i]);
    return out;
}

// Godunov-upwinded |grad phi| for motion in the normal direction,
// phi_t = s * |grad phi|. The one-sided difference per axis is selected by
// the sign of the local speed s so that information flows from the front.
inline ScalarField upwind_gradient_magnitude(const ScalarField& phi, const ScalarField& speed_sign) {
    require_same_size(phi, speed_sign, "upwind_gradient_magnitude");
    const int w = phi.width, h = phi.height;
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double c = phi.at(x, y);
            const double dxm = (x > 0) ? c - phi.at(x - 1, y) : 0.0;
            const double dxp = (x < w - 1) ? phi.at(x + 1, y) - c : 0.0;
            const double dym = (y > 0) ? c - phi.at(x, y - 1) : 0.0;
            const double dyp = (y < h - 1) ? phi.at(x, y + 1) - c : 0.0;
            double gx2, gy2;
            if (speed_sign.at(x, y) >= 0.0) {
                gx2 = std::max(std::min(dxm, 0.0) * std::min(dxm, 0.0),
                               std::max(dxp, 0.0) * std::max(dxp, 0.0));
                gy2 = std::max(std::min(dym, 0.0) * std::min(dym, 0.0),
                               std::max(dyp, 0.0) * std::max(dyp, 0.0));
            } else {
                gx2 = std::max(std::max(dxm, 0.0) * std::max(dxm, 0.0),
                               std::min(dxp, 0.0) * std::min(dxp, 0.0));
                gy2 = std::max(std::max(dym, 0.0) * std::max(dym, 0.0),
                               std::min(dyp, 0.0) * std::min(dyp, 0.0));
            }
            out.at(x, y) = std::sqrt(gx2 + gy2);
        }
    }
    return out;
}

// Bilinear sample of a row-major component array, clamped to the grid.
inline double bilinear_component(const std::vector<double>& comp, int width, int height, double x,
                                 double y) {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(x), width - 2);
    const int y0 = std::min(static_cast<int>(y), height - 2);
    const double a = x - x0, b = y - y0;
    auto v = [&](int xx, int yy) { return comp[static_cast<std::size_t>(yy) * width + xx]; };
    return (1.0 - a) * (1.0 - b) * v(x0, y0) + a * (1.0 - b) * v(x0 + 1, y0) +
           (1.0 - a) * b * v(x0, y0 + 1) + a * b * v(x0 + 1, y0 + 1);
}

// Bilinear sample with clamping to the grid rectangle.
inline double bilinear(const ScalarField& f, double x, double y) {
    return bilinear_component(f.values, f.width, f.height, x, y);
}

inline double field_min(const ScalarField& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

inline double field_max(const ScalarField& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

// Affine rescale of the value range onto [lo, hi]; constant fields are
// returned unchanged.
inline ScalarField rescale(const ScalarField& f, double lo, double hi) {
    const double mn = field_min(f), mx = field_max(f);
    ScalarField out = f;
    if (mx > mn) {
        const double s = (hi - lo) / (mx - mn);
        for (double& x : out.values) x = lo + (x - mn) * s;
    }
    return out;
}

}  // namespace geosnakes
