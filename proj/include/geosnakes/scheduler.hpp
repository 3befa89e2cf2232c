#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geosnakes/edge.hpp"
#include "geosnakes/field.hpp"
#include "geosnakes/flows.hpp"
#include "geosnakes/levelset.hpp"

namespace geosnakes {

struct ScheduleConfig {
    int max_cycle = 3;              // number of alternating phases, descent first
    int max_iteration = 1500;       // per-phase iteration cap
    double motion_tolerance = 0.05; // contour displacement in px per 10 iterations
    int reinit_every = 20;          // evolution iterations between reinitializations
    int reinit_iterations = 20;
    int snapshot_every = 0;         // 0 disables snapshot callbacks

    void validate() const {
        if (max_cycle < 1) throw std::invalid_argument("ScheduleConfig: max_cycle must be >= 1");
        if (max_iteration < 1) throw std::invalid_argument("ScheduleConfig: max_iteration must be >= 1");
        if (!(motion_tolerance > 0.0))
            throw std::invalid_argument("ScheduleConfig: motion_tolerance must be positive");
        if (reinit_every < 0 || reinit_iterations < 0)
            throw std::invalid_argument("ScheduleConfig: reinit settings must be non-negative");
    }
};

// Which speed function drives a phase.
enum class StepKind { Descent, EF, Gac, GacBalloon, GacAdaptive, ChanVese };

inline std::string step_kind_tag(StepKind k) {
    switch (k) {
        case StepKind::Descent: return "descent";
        case StepKind::EF: return "EF";
        case StepKind::Gac: return "gac";
        case StepKind::GacBalloon: return "gac_balloon";
        case StepKind::GacAdaptive: return "gac_adaptive";
        default: return "chan_vese";
    }
}

inline StepKind step_kind_from_string(const std::string& s) {
    if (s == "gac") return StepKind::Gac;
    if (s == "gac_balloon") return StepKind::GacBalloon;
    if (s == "gac_adaptive") return StepKind::GacAdaptive;
    if (s == "chan_vese") return StepKind::ChanVese;
    if (s == "descent") return StepKind::Descent;
    if (s == "EF" || s == "ef") return StepKind::EF;
    throw std::invalid_argument("unknown flow kind: " + s);
}

struct TraceRecord {
    int iteration = 0;
    std::string phase;
    double tangential_sum = 0.0;  // sum of |<F, T>| over contour points
    double normal_sum = 0.0;      // sum of |g kappa + <F, N_in>| over contour points
    int points = 0;
    double mean_displacement = 0.0;
};

struct PhaseSpan {
    std::string phase;
    int start_iter = 0;
    int end_iter = 0;
    bool converged_by_motion = false;
    double wall_seconds = 0.0;
    double contour_g_min_start = 0.0, contour_g_max_start = 0.0;
    double contour_g_min_end = 0.0, contour_g_max_end = 0.0;
};

struct EvolutionTrace {
    std::vector<TraceRecord> records;
    std::vector<PhaseSpan> phases;

    std::string to_csv() const {
        std::string out = "iter,phase,tangential_sum,normal_sum,points,mean_disp\n";
        char line[192];
        for (const TraceRecord& r : records) {
            std::snprintf(line, sizeof(line), "%d,%s,%.9g,%.9g,%d,%.9g\n", r.iteration,
                          r.phase.c_str(), r.tangential_sum, r.normal_sum, r.points,
                          r.mean_displacement);
            out += line;
        }
        return out;
    }

    std::string phases_csv() const {
        std::string out = "phase,start_iter,end_iter\n";
        char line[96];
        for (const PhaseSpan& p : phases) {
            std::snprintf(line, sizeof(line), "%s,%d,%d\n", p.phase.c_str(), p.start_iter, p.end_iter);
            out += line;
        }
        return out;
    }
};

struct RunResult {
    ScalarField phi;
    std::vector<Contour> contours;
    EvolutionTrace trace;
    bool vanished = false;
    int vanish_iteration = -1;
};

class contour_vanished_error : public std::runtime_error {
  public:
    contour_vanished_error(int cycle, int iteration)
        : std::runtime_error("contour vanished in cycle " + std::to_string(cycle) + " at iteration " +
                             std::to_string(iteration)),
          cycle(cycle),
          iteration(iteration) {}
    int cycle;
    int iteration;
};

// True once the mean contour displacement per iteration over the window
// falls below the tolerance. The window must cover at least 10 iterations.
inline bool detect_convergence(const std::vector<double>& displacement_window, double tolerance) {
    if (displacement_window.size() < 10)
        throw std::invalid_argument("detect_convergence: window must cover at least 10 iterations");
    double mean = 0.0;
    for (double d : displacement_window) mean += d;
    mean /= static_cast<double>(displacement_window.size());
    return mean < tolerance;
}

using SnapshotObserver =
    std::function<void(int iteration, const ScalarField& phi, const std::vector<Contour>& contours)>;

namespace detail {

struct ContourStats {
    double tangential_sum = 0.0;
    double normal_sum = 0.0;
    double g_min = 0.0, g_max = 0.0;
    int points = 0;
};

inline ContourStats contour_stats(const std::vector<Contour>& contours, const ScalarField& g,
                                  const VectorField& F, const ScalarField& kappa) {
    ContourStats st;
    bool first = true;
    for (const Contour& c : contours) {
        if (!c.closed) continue;
        const std::size_t n = c.points.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& p = c.points[i];
            const Vec2 t = c.tangent(i);
            const Vec2 nin{-t.y, t.x};
            const double fx = bilinear_component(F.u, F.width, F.height, p.x, p.y);
            const double fy = bilinear_component(F.v, F.width, F.height, p.x, p.y);
            const double gv = bilinear(g, p.x, p.y);
            const double kv = bilinear(kappa, p.x, p.y);
            st.tangential_sum += std::abs(fx * t.x + fy * t.y);
            st.normal_sum += std::abs(gv * kv + fx * nin.x + fy * nin.y);
            if (first) {
                st.g_min = st.g_max = gv;
                first = false;
            } else {
                st.g_min = std::min(st.g_min, gv);
                st.g_max = std::max(st.g_max, gv);
            }
            ++st.points;
        }
    }
    return st;
}

inline ScalarField phase_speed(StepKind kind, const FlowContext& ctx) {
    switch (kind) {
        case StepKind::Descent:
        case StepKind::Gac: return geosnakes_descent_speed(ctx);
        case StepKind::EF: return equilibrium_flow_speed(ctx);
        case StepKind::GacBalloon: return gac_baseline_speed(ctx, true, false);
        case StepKind::GacAdaptive: return gac_baseline_speed(ctx, false, true);
        default: return chan_vese_speed(ctx);
    }
}

}  // namespace detail

// Shared fields built once per run (Algorithm lines: normalize, anisotropic
// smoothing, edge indicator, GVF force).
struct PreparedFields {
    ScalarField image;     // intensity mapped onto [0, 255]
    ScalarField smoothed;
    ScalarField g;
    VectorField F;
};

inline PreparedFields prepare_fields(const ScalarField& image, const EdgeModelConfig& cfg) {
    require_valid(image, "prepare_fields");
    cfg.validate();
    PreparedFields out;
    out.image = rescale(image, 0.0, 255.0);
    out.smoothed = anisotropic_smooth(out.image, cfg);
    out.g = edge_indicator(out.smoothed, cfg);
    out.F = gvf(out.g, cfg);
    return out;
}

// Runs the given phase plan on prebuilt fields. Non-Chan-Vese updates are
// localized to the contour band by the approximated Dirac delta; the level
// set is reinitialized on a fixed cadence. Throws contour_vanished_error
// when `vanish_is_error`, otherwise vanishing ends the run and is reported.
inline RunResult run_plan_on_fields(const ScalarField& g, const VectorField& F,
                                    const ScalarField* image, ScalarField phi,
                                    const FlowParams& params, const ScheduleConfig& cfg,
                                    const std::vector<StepKind>& plan, bool vanish_is_error,
                                    const SnapshotObserver& observer = {}) {
    cfg.validate();
    params.validate();
    const std::size_t n = phi.size();
    RunResult result;
    int global_iter = 0;
    int stationary_streak = 0;

    for (std::size_t phase_index = 0; phase_index < plan.size(); ++phase_index) {
        const StepKind kind = plan[phase_index];
        PhaseSpan span;
        span.phase = step_kind_tag(kind);
        span.start_iter = global_iter + 1;
        const auto phase_clock_start = std::chrono::steady_clock::now();

        std::vector<double> displacements;
        bool phase_first_record = true;
        int phase_iters = 0;

        while (phase_iters < cfg.max_iteration) {
            FlowContext ctx;
            ctx.g = &g;
            ctx.F = &F;
            ctx.image = image;
            ctx.phi = &phi;
            ctx.params = params;
            const ScalarField speed = detail::phase_speed(kind, ctx);
            const ScalarField norm = detail::gradient_norm_central(phi);

            // Track front displacement over the contour band |phi| <= 1,
            // where the update actually moves the zero level set.
            double disp_sum = 0.0;
            std::size_t disp_count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double update = speed.values[i];
                if (kind != StepKind::ChanVese) update *= dirac_approx(phi.values[i]);
                update *= params.dt;
                if (std::abs(phi.values[i]) <= 1.0) {
                    disp_sum += std::abs(update) / std::clamp(norm.values[i], 0.25, 4.0);
                    ++disp_count;
                }
                phi.values[i] += update;
            }
            const double mean_disp = disp_count ? disp_sum / static_cast<double>(disp_count) : 0.0;

            ++phase_iters;
            ++global_iter;

            const double mn = field_min(phi), mx = field_max(phi);
            if (mn > 0.0 || mx < 0.0) {
                if (vanish_is_error)
                    throw contour_vanished_error(static_cast<int>(phase_index), global_iter);
                result.vanished = true;
                result.vanish_iteration = global_iter;
                break;
            }

            // Reinitialize on cadence. Fronts about to vanish (interior
            // shallower than 4 px) are left alone; first-order
            // reinitialization cannot track such small features and the
            // distance field no longer matters there.
            if (cfg.reinit_every > 0 && global_iter % cfg.reinit_every == 0 && mn < -4.0)
                phi = reinitialize(phi, cfg.reinit_iterations);

            const std::vector<Contour> contours = extract_contours(phi);
            const ScalarField kappa = curvature(phi);
            const detail::ContourStats st = detail::contour_stats(contours, g, F, kappa);

            TraceRecord rec;
            rec.iteration = global_iter;
            rec.phase = span.phase;
            rec.tangential_sum = st.tangential_sum;
            rec.normal_sum = st.normal_sum;
            rec.points = st.points;
            rec.mean_displacement = mean_disp;
            result.trace.records.push_back(rec);

            if (phase_first_record && st.points > 0) {
                span.contour_g_min_start = st.g_min;
                span.contour_g_max_start = st.g_max;
                phase_first_record = false;
            }
            if (st.points > 0) {
                span.contour_g_min_end = st.g_min;
                span.contour_g_max_end = st.g_max;
            }

            if (observer && cfg.snapshot_every > 0 && global_iter % cfg.snapshot_every == 0)
                observer(global_iter, phi, contours);

            displacements.push_back(mean_disp);
            if (displacements.size() >= 10) {
                const std::vector<double> window(displacements.end() - 10, displacements.end());
                if (detect_convergence(window, cfg.motion_tolerance / 10.0)) {
                    span.converged_by_motion = true;
                    break;
                }
            }
        }

        span.end_iter = global_iter;
        span.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - phase_clock_start).count();
        result.trace.phases.push_back(span);

        if (result.vanished) break;

        // Two consecutive phases that were stationary on entry mean the full
        // system has converged.
        const bool stationary = span.converged_by_motion && phase_iters <= 10;
        stationary_streak = stationary ? stationary_streak + 1 : 0;
        if (stationary_streak >= 2 && phase_index + 1 < plan.size()) break;
    }

    result.contours = extract_contours(phi);
    result.phi = std::move(phi);
    return result;
}

inline std::vector<StepKind> alternating_plan(int max_cycle) {
    std::vector<StepKind> plan;
    for (int c = 0; c < max_cycle; ++c)
        plan.push_back(c % 2 == 0 ? StepKind::Descent : StepKind::EF);
    return plan;
}

// Alternating curve evolution: descent on even cycles, equilibrium flow on
// odd cycles, each phase ending at the iteration cap or once the contour
// has little motion. Contour vanishing is an error here.
inline RunResult run_alternating(const ScalarField& image, const EdgeModelConfig& edge_cfg,
                                 const FlowParams& params, const ScheduleConfig& cfg,
                                 const std::vector<ShapeSpec>& init_shapes,
                                 const SnapshotObserver& observer = {}) {
    const PreparedFields fields = prepare_fields(image, edge_cfg);
    ScalarField phi = init_from_shapes(init_shapes, image.width, image.height);
    return run_plan_on_fields(fields.g, fields.F, &fields.image, std::move(phi), params, cfg,
                              alternating_plan(cfg.max_cycle), /*vanish_is_error=*/true, observer);
}

// Single-flow baseline evolution. Vanishing is a reported outcome.
inline RunResult run_single_flow(const ScalarField& image, const EdgeModelConfig& edge_cfg,
                                 const FlowParams& params, const ScheduleConfig& cfg,
                                 const std::vector<ShapeSpec>& init_shapes, StepKind kind,
                                 const SnapshotObserver& observer = {}) {
    const PreparedFields fields = prepare_fields(image, edge_cfg);
    ScalarField phi = init_from_shapes(init_shapes, image.width, image.height);
    return run_plan_on_fields(fields.g, fields.F, &fields.image, std::move(phi), params, cfg, {kind},
                              /*vanish_is_error=*/false, observer);
}

}  // namespace geosnakes
