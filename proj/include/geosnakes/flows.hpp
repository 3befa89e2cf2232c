#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "geosnakes/field.hpp"
#include "geosnakes/levelset.hpp"

namespace geosnakes {

struct FlowParams {
    double dt = 0.1;
    double balloon = 1.0;       // positive shrinks under the inside-negative convention
    double ada_lambda = 1.0;
    double ada_beta = 0.1;
    double cv_lambda1 = 1.0;
    double cv_lambda2 = 1.0;
    double cv_mu = 0.1;
    double cv_nu = 0.0;
    int rotation_direction = 1;  // +1 counterclockwise

    void validate() const {
        if (!(dt > 0.0) || dt > 0.25)
            throw std::invalid_argument("FlowParams: dt must be in (0, 0.25]");
        if (rotation_direction != 1 && rotation_direction != -1)
            throw std::invalid_argument("FlowParams: rotation_direction must be +1 or -1");
    }
};

// Read-only bundle of the fields a speed function needs. `image` is only
// required by the Chan-Vese flow.
struct FlowContext {
    const ScalarField* g = nullptr;
    const VectorField* F = nullptr;
    const ScalarField* image = nullptr;
    const ScalarField* phi = nullptr;
    FlowParams params;

    void validate(bool needs_image = false) const {
        if (!g || !F || !phi) throw std::invalid_argument("FlowContext: missing field");
        if (!F->same_size(*g) || !g->same_size(*phi))
            throw std::invalid_argument("FlowContext: grid size mismatch");
        if (needs_image && (!image || !image->same_size(*g)))
            throw std::invalid_argument("FlowContext: image missing or mismatched");
        params.validate();
    }
};

namespace detail {

inline void require_finite_speed(const ScalarField& s, const char* what) {
    for (double v : s.values)
        if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": non-finite speed");
}

inline double upwind_dxm(const ScalarField& f, int x, int y) {
    return (x > 0) ? f.at(x, y) - f.at(x - 1, y) : 0.0;
}
inline double upwind_dxp(const ScalarField& f, int x, int y) {
    return (x < f.width - 1) ? f.at(x + 1, y) - f.at(x, y) : 0.0;
}
inline double upwind_dym(const ScalarField& f, int x, int y) {
    return (y > 0) ? f.at(x, y) - f.at(x, y - 1) : 0.0;
}
inline double upwind_dyp(const ScalarField& f, int x, int y) {
    return (y < f.height - 1) ? f.at(x, y + 1) - f.at(x, y) : 0.0;
}

// Central-difference |grad phi|.
inline ScalarField gradient_norm_central(const ScalarField& phi) {
    const VectorField g = gradient_central(phi);
    ScalarField out(phi.width, phi.height);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = std::hypot(g.u[i], g.v[i]);
    return out;
}

}  // namespace detail

// Upwinded transport of the level sets along the velocity field V:
// phi_t = -<V, grad phi>, one-sided differences keyed to the sign of each
// component of V.
inline ScalarField advect_along(const VectorField& V, const ScalarField& phi) {
    if (!V.same_size(phi)) throw std::invalid_argument("advect_along: dimension mismatch");
    const int w = phi.width, h = phi.height;
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double vx = V.u[i], vy = V.v[i];
            out.values[i] = -(std::max(vx, 0.0) * detail::upwind_dxm(phi, x, y) +
                              std::min(vx, 0.0) * detail::upwind_dxp(phi, x, y) +
                              std::max(vy, 0.0) * detail::upwind_dym(phi, x, y) +
                              std::min(vy, 0.0) * detail::upwind_dyp(phi, x, y));
        }
    }
    return out;
}

// Gradient-descent speed of the edge-based model: curvature smoothing plus
// attraction by the external force field, g kappa |grad phi| - <F, grad phi>.
// The curvature term uses central differences, the attraction term upwind
// differences keyed to F. Stationarity balances g kappa against the normal
// force component.
inline ScalarField geosnakes_descent_speed(const FlowContext& ctx) {
    ctx.validate();
    const ScalarField kappa = curvature(*ctx.phi);
    const ScalarField norm = detail::gradient_norm_central(*ctx.phi);
    ScalarField speed = advect_along(*ctx.F, *ctx.phi);
    for (std::size_t i = 0; i < speed.size(); ++i)
        speed.values[i] += ctx.g->values[i] * kappa.values[i] * norm.values[i];
    detail::require_finite_speed(speed, "geosnakes_descent_speed");
    return speed;
}

// Equilibrium-flow speed <rotate90(F, -direction), grad phi>: pure upwinded
// advection by the rotated force field, no curvature term. On the contour
// this equals <F, T> |grad phi| with T the positively oriented tangent.
inline ScalarField equilibrium_flow_speed(const FlowContext& ctx) {
    ctx.validate();
    const VectorField rotated = rotate90(*ctx.F, ctx.params.rotation_direction);
    ScalarField speed = advect_along(rotated, *ctx.phi);
    detail::require_finite_speed(speed, "equilibrium_flow_speed");
    return speed;
}

// Baseline edge-based speed: the descent speed, optionally with a constant
// Balloon (positive shrinks) and/or the adaptive Balloon that is modulated
// by how tangential the force is: ada_lambda (1 - |<F_hat, N>|) ada_beta g.
inline ScalarField gac_baseline_speed(const FlowContext& ctx, bool with_balloon, bool adaptive) {
    ctx.validate();
    ScalarField speed = geosnakes_descent_speed(ctx);
    if (!with_balloon && !adaptive) return speed;

    const int w = speed.width, h = speed.height;
    ScalarField balloon_sign(w, h, ctx.params.balloon >= 0.0 ? 1.0 : -1.0);
    const ScalarField upwind_norm = upwind_gradient_magnitude(*ctx.phi, balloon_sign);

    if (with_balloon) {
        for (std::size_t i = 0; i < speed.size(); ++i)
            speed.values[i] += ctx.params.balloon * ctx.g->values[i] * upwind_norm.values[i];
    }
    if (adaptive) {
        const VectorField grad = gradient_central(*ctx.phi);
        for (std::size_t i = 0; i < speed.size(); ++i) {
            const double fn = std::hypot(ctx.F->u[i], ctx.F->v[i]);
            const double nn = std::hypot(grad.u[i], grad.v[i]);
            double align = 0.0;  // no force information leaves the balloon fully on
            if (fn * nn > 0.0)
                align = std::min(
                    1.0, std::abs(ctx.F->u[i] * grad.u[i] + ctx.F->v[i] * grad.v[i]) / (fn * nn));
            speed.values[i] += ctx.params.ada_lambda * ctx.params.ada_beta * (1.0 - align) *
                               ctx.g->values[i] * upwind_norm.values[i];
        }
    }
    detail::require_finite_speed(speed, "gac_baseline_speed");
    return speed;
}

namespace detail {

inline double heaviside_eps(double z, double eps) {
    return 0.5 * (1.0 + 2.0 / std::numbers::pi * std::atan(z / eps));
}

inline double delta_eps(double z, double eps) {
    return eps / (std::numbers::pi * (eps * eps + z * z));
}

}  // namespace detail

// Region-competition speed with smoothed Heaviside/delta of width eps = 1.5.
// c1 is the mean intensity inside (phi < 0), c2 outside; pixels are pushed
// toward the region whose mean they match. Intensities are mapped onto
// [0, 1] first so the default weights are meaningful on any input scale.
inline ScalarField chan_vese_speed(const FlowContext& ctx) {
    ctx.validate(/*needs_image=*/true);
    constexpr double kEps = 1.5;
    const ScalarField& phi = *ctx.phi;
    const ScalarField I = rescale(*ctx.image, 0.0, 1.0);
    const std::size_t n = phi.size();

    std::size_t negatives = 0;
    for (double v : phi.values) negatives += v < 0.0;
    if (negatives == 0 || negatives == n)
        throw std::runtime_error("chan_vese_speed: one region is empty (uniform-sign phi)");

    double num1 = 0.0, den1 = 0.0, num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w_in = detail::heaviside_eps(-phi.values[i], kEps);
        num1 += I.values[i] * w_in;
        den1 += w_in;
        num2 += I.values[i] * (1.0 - w_in);
        den2 += 1.0 - w_in;
    }
    const double c1 = num1 / den1, c2 = num2 / den2;

    const ScalarField kappa = curvature(phi);
    const FlowParams& p = ctx.params;
    ScalarField speed(phi.width, phi.height);
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = I.values[i] - c1, d2 = I.values[i] - c2;
        speed.values[i] = detail::delta_eps(phi.values[i], kEps) *
                          (p.cv_mu * kappa.values[i] + p.cv_nu + p.cv_lambda1 * d1 * d1 -
                           p.cv_lambda2 * d2 * d2);
    }
    detail::require_finite_speed(speed, "chan_vese_speed");
    return speed;
}

}  // namespace geosnakes
