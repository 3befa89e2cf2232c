#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geosnakes/field.hpp"

namespace geosnakes {

struct EdgeModelConfig {
    double sigma = 3.0;        // Gaussian width for the edge indicator
    double q = 2.0;            // edge indicator exponent
    double gvf_mu = 0.1;       // GVF regularization weight
    int gvf_iterations = 200;
    double gvf_dt = 1.0;
    int aniso_iterations = 15;
    double aniso_kappa = 10.0;  // conductance threshold on a [0,255] scale
    double aniso_dt = 0.15;

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("EdgeModelConfig: sigma must be positive");
        if (!(q > 0.0)) throw std::invalid_argument("EdgeModelConfig: q must be positive");
        if (gvf_mu < 0.0) throw std::invalid_argument("EdgeModelConfig: gvf_mu must be non-negative");
        if (gvf_iterations < 0 || aniso_iterations < 0)
            throw std::invalid_argument("EdgeModelConfig: iteration counts must be non-negative");
        if (!(gvf_dt > 0.0) || !(aniso_dt > 0.0))
            throw std::invalid_argument("EdgeModelConfig: time steps must be positive");
    }
};

// Perona-Malik diffusion with conductance exp(-(|grad I| / kappa)^2),
// explicit time stepping over 4-neighbor differences.
inline ScalarField anisotropic_smooth(const ScalarField& image, const EdgeModelConfig& cfg) {
    require_valid(image, "anisotropic_smooth");
    cfg.validate();
    const int w = image.width, h = image.height;
    const double inv_k2 = 1.0 / (cfg.aniso_kappa * cfg.aniso_kappa);

    ScalarField cur = image;
    ScalarField next(w, h);
    auto clamp_at = [&](int x, int y) { return cur.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

    for (int it = 0; it < cfg.aniso_iterations; ++it) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double c = cur.at(x, y);
                const double dn = clamp_at(x, y - 1) - c;
                const double ds = clamp_at(x, y + 1) - c;
                const double de = clamp_at(x + 1, y) - c;
                const double dw = clamp_at(x - 1, y) - c;
                const double flux = std::exp(-dn * dn * inv_k2) * dn + std::exp(-ds * ds * inv_k2) * ds +
                                    std::exp(-de * de * inv_k2) * de + std::exp(-dw * dw * inv_k2) * dw;
                const double v = c + cfg.aniso_dt * flux;
                if (!std::isfinite(v))
                    throw std::runtime_error("anisotropic_smooth: diffusion became unstable");
                next.at(x, y) = v;
            }
        }
        std::swap(cur, next);
    }
    return cur;
}

// g = 1 / (1 + |G_sigma * grad I|^q). Output lies in (0, 1].
inline ScalarField edge_indicator(const ScalarField& image_smoothed, const EdgeModelConfig& cfg) {
    require_valid(image_smoothed, "edge_indicator");
    cfg.validate();
    const VectorField grad = gradient_central(image_smoothed);
    ScalarField gx(image_smoothed.width, image_smoothed.height);
    ScalarField gy(image_smoothed.width, image_smoothed.height);
    gx.values = grad.u;
    gy.values = grad.v;
    const ScalarField sx = gaussian_smooth(gx, cfg.sigma);
    const ScalarField sy = gaussian_smooth(gy, cfg.sigma);

    ScalarField g(image_smoothed.width, image_smoothed.height);
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::hypot(sx.values[i], sy.values[i]);
        g.values[i] = 1.0 / (1.0 + std::pow(mag, cfg.q));
    }
    return g;
}

namespace detail {

// 5-point Laplacian with replicated (Neumann) boundary.
inline double laplacian_at(const std::vector<double>& f, int x, int y, int w, int h) {
    auto v = [&](int xx, int yy) { return f[static_cast<std::size_t>(std::clamp(yy, 0, h - 1)) * w + std::clamp(xx, 0, w - 1)]; };
    return v(x + 1, y) + v(x - 1, y) + v(x, y + 1) + v(x, y - 1) - 4.0 * v(x, y);
}

}  // namespace detail

// One explicit GVF relaxation step:
//   F += dt * (mu * Laplacian(F) - |grad f|^2 (F - grad f))
// where grad f is the (fx, fy) data field and mag2 = |grad f|^2.
inline void gvf_step(VectorField& F, const VectorField& grad_f, const ScalarField& mag2, double mu,
                     double dt) {
    const int w = F.width, h = F.height;
    VectorField next(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double lu = detail::laplacian_at(F.u, x, y, w, h);
            const double lv = detail::laplacian_at(F.v, x, y, w, h);
            next.u[i] = F.u[i] + dt * (mu * lu - mag2.values[i] * (F.u[i] - grad_f.u[i]));
            next.v[i] = F.v[i] + dt * (mu * lv - mag2.values[i] * (F.v[i] - grad_f.v[i]));
            if (!std::isfinite(next.u[i]) || !std::isfinite(next.v[i]))
                throw std::runtime_error("gvf: field diverged");
        }
    }
    F = std::move(next);
}

// Diffusion energy mu * |grad F|^2 + |grad f|^2 |F - grad f|^2 summed over
// the grid; non-increasing along the relaxation.
inline double gvf_energy(const VectorField& F, const VectorField& grad_f, const ScalarField& mag2,
                         double mu) {
    const int w = F.width, h = F.height;
    double e = 0.0;
    auto comp = [&](const std::vector<double>& f, int x, int y) {
        return f[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            for (const std::vector<double>* f : {&F.u, &F.v}) {
                const double dx = 0.5 * (comp(*f, x + 1, y) - comp(*f, x - 1, y));
                const double dy = 0.5 * (comp(*f, x, y + 1) - comp(*f, x, y - 1));
                e += mu * (dx * dx + dy * dy);
            }
            const double du = F.u[i] - grad_f.u[i];
            const double dv = F.v[i] - grad_f.v[i];
            e += mag2.values[i] * (du * du + dv * dv);
        }
    }
    return e;
}

// Gradient Vector Flow extension of the edge potential f = -g. The field is
// initialized to grad f and relaxed for cfg.gvf_iterations explicit steps
// (early exit once the largest per-pixel update drops below 1e-6).
inline VectorField gvf(const ScalarField& g, const EdgeModelConfig& cfg) {
    require_valid(g, "gvf");
    cfg.validate();
    if (cfg.gvf_mu > 0.0 && cfg.gvf_dt > 1.0 / (4.0 * cfg.gvf_mu))
        throw std::invalid_argument("gvf: dt violates the CFL bound 1/(4 mu)");

    ScalarField f(g.width, g.height);
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) f.values[i] = -g.values[i];

    const VectorField grad_f = gradient_central(f);
    ScalarField mag2(g.width, g.height);
    for (std::size_t i = 0; i < n; ++i)
        mag2.values[i] = grad_f.u[i] * grad_f.u[i] + grad_f.v[i] * grad_f.v[i];

    VectorField F = grad_f;
    for (int it = 0; it < cfg.gvf_iterations; ++it) {
        const VectorField prev = F;
        gvf_step(F, grad_f, mag2, cfg.gvf_mu, cfg.gvf_dt);
        double max_update = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            max_update = std::max({max_update, std::abs(F.u[i] - prev.u[i]), std::abs(F.v[i] - prev.v[i])});
        if (max_update < 1e-6) break;
    }
    return F;
}

}  // namespace geosnakes
