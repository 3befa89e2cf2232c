#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "geosnakes/metrics.hpp"
#include "geosnakes/scheduler.hpp"
#include "geosnakes/synth.hpp"
#include "helpers.hpp"

using namespace geosnakes;
using test_helpers::circle_sdf;
using test_helpers::from_function;

namespace {

SyntheticSpec spec_of(SyntheticSpec::Kind kind) {
    SyntheticSpec s;
    s.kind = kind;
    return s;
}

}  // namespace

TEST_CASE("detect_convergence basics") {
    CHECK(detect_convergence(std::vector<double>(10, 0.0), 1e-6));
    CHECK_FALSE(detect_convergence(std::vector<double>(10, 1.0), 0.01));
    CHECK_THROWS_AS(detect_convergence(std::vector<double>(9, 0.0), 0.01), std::invalid_argument);
}

TEST_CASE("detect_convergence fires at the first window whose mean crosses the tolerance") {
    // Oracle: direct computation on the synthetic geometric sequence.
    const double tol = 0.01;
    std::vector<double> d;
    for (int i = 0; i < 120; ++i) d.push_back(0.5 * std::pow(0.93, i));
    int oracle_k = -1;
    for (int k = 9; k < 120; ++k) {
        double mean = 0.0;
        for (int j = k - 9; j <= k; ++j) mean += d[j];
        mean /= 10.0;
        if (mean < tol) {
            oracle_k = k;
            break;
        }
    }
    REQUIRE(oracle_k > 9);
    for (int k = 9; k < 120; ++k) {
        const std::vector<double> window(d.begin() + (k - 9), d.begin() + k + 1);
        CHECK(detect_convergence(window, tol) == (k >= oracle_k));
    }
}

TEST_CASE("constant image with one descent cycle is pure curve shortening") {
    const ScalarField image(80, 80, 100.0);
    EdgeModelConfig ecfg;
    ecfg.gvf_iterations = 5;
    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 1;
    cfg.max_iteration = 300;
    cfg.motion_tolerance = 1e-9;  // never triggers, runs the full cap

    const RunResult res =
        run_alternating(image, ecfg, params, cfg, {ShapeSpec::circle(40, 40, 25)});
    CHECK_FALSE(res.vanished);
    REQUIRE(res.contours.size() == 1);

    // The contour is still a circle, strictly smaller, centered at (40, 40).
    double mean_r = 0.0;
    for (const Vec2& p : res.contours[0].points) mean_r += std::hypot(p.x - 40.0, p.y - 40.0);
    mean_r /= res.contours[0].points.size();
    CHECK(mean_r < 24.5);
    CHECK(mean_r > 20.0);
    for (const Vec2& p : res.contours[0].points)
        CHECK(std::hypot(p.x - 40.0, p.y - 40.0) == doctest::Approx(mean_r).epsilon(0.05));

    // With F = 0 the tangential trace is identically zero and the normal
    // trace stays bounded (curvature flow on circles is scale free).
    REQUIRE_FALSE(res.trace.records.empty());
    for (const TraceRecord& r : res.trace.records) {
        CHECK(r.tangential_sum < 1e-9);
        CHECK(r.normal_sum < 3.0 * std::numbers::pi);
    }
}

TEST_CASE("phase plan alternates descent and EF with matching tags") {
    const std::vector<StepKind> plan = alternating_plan(4);
    REQUIRE(plan.size() == 4);
    CHECK(plan[0] == StepKind::Descent);
    CHECK(plan[1] == StepKind::EF);
    CHECK(plan[2] == StepKind::Descent);
    CHECK(plan[3] == StepKind::EF);

    const Synthetic s = generate(spec_of(SyntheticSpec::Kind::TwoRectangles));
    EdgeModelConfig ecfg;
    ecfg.gvf_iterations = 30;
    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 3;
    cfg.max_iteration = 15;
    cfg.motion_tolerance = 1e-9;
    const RunResult res = run_alternating(
        s.image, ecfg, params, cfg,
        standard_initializations(SyntheticSpec::Kind::TwoRectangles, 80, 80));
    REQUIRE(res.trace.phases.size() == 3);
    CHECK(res.trace.phases[0].phase == "descent");
    CHECK(res.trace.phases[1].phase == "EF");
    CHECK(res.trace.phases[2].phase == "descent");
    for (const TraceRecord& r : res.trace.records) {
        bool in_span = false;
        for (const PhaseSpan& p : res.trace.phases)
            if (r.iteration >= p.start_iter && r.iteration <= p.end_iter && r.phase == p.phase)
                in_span = true;
        CHECK(in_span);
    }
}

TEST_CASE("balloon baseline shrinks a circle to vanishing and reports it") {
    const ScalarField image(64, 64, 100.0);
    EdgeModelConfig ecfg;
    ecfg.gvf_iterations = 5;
    FlowParams params;
    params.balloon = 1.0;
    ScheduleConfig cfg;
    cfg.max_cycle = 1;
    cfg.max_iteration = 3000;
    cfg.motion_tolerance = 1e-12;

    const RunResult res =
        run_single_flow(image, ecfg, params, cfg, {ShapeSpec::circle(32, 32, 10)}, StepKind::GacBalloon);
    CHECK(res.vanished);
    CHECK(res.vanish_iteration > 0);
    CHECK(res.contours.empty());
}

TEST_CASE("alternating runs treat vanishing as an error with location info") {
    const ScalarField image(64, 64, 100.0);
    EdgeModelConfig ecfg;
    ecfg.gvf_iterations = 5;
    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 1;
    cfg.max_iteration = 3000;
    cfg.motion_tolerance = 1e-12;

    try {
        run_alternating(image, ecfg, params, cfg, {ShapeSpec::circle(32, 32, 4)});
        FAIL("expected contour_vanished_error");
    } catch (const contour_vanished_error& e) {
        CHECK(e.cycle == 0);
        CHECK(e.iteration > 0);
    }
}

TEST_CASE("EF phase conserves the contour's g-range and parks on level lines") {
    // Prebuilt radial indicator with F = -grad g; an eccentric elliptical
    // initialization slides along the level circles.
    const int n = 96;
    const double cx = 48.0, cy = 48.0;
    const ScalarField g = from_function(n, n, [&](double x, double y) {
        const double r = std::hypot(x - cx, y - cy);
        return 1.0 - 0.85 * std::exp(-(r - 26.0) * (r - 26.0) / (2.0 * 36.0));
    });
    ScalarField neg = g;
    for (double& v : neg.values) v = -v;
    const VectorField F = gradient_central(neg);

    std::vector<Vec2> ellipse;
    for (int i = 0; i < 72; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 72.0;
        ellipse.push_back({cx + 6.0 + 17.0 * std::cos(a), cy + 10.0 * std::sin(a)});
    }
    ScalarField phi = init_from_shapes({ShapeSpec::polygon(ellipse)}, n, n);

    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 1;
    cfg.max_iteration = 2500;
    cfg.motion_tolerance = 0.02;
    const RunResult res = run_plan_on_fields(g, F, nullptr, std::move(phi), params, cfg,
                                             {StepKind::EF}, /*vanish_is_error=*/true);

    REQUIRE(res.trace.phases.size() == 1);
    const PhaseSpan& span = res.trace.phases[0];
    CHECK(std::abs(span.contour_g_min_end - span.contour_g_min_start) < 0.05);
    CHECK(std::abs(span.contour_g_max_end - span.contour_g_max_start) < 0.05);

    // Stationarity placement: each converged contour point has either a
    // negligible force or a force aligned with the contour normal.
    double fmax = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) fmax = std::max(fmax, std::hypot(F.u[i], F.v[i]));
    int violations = 0, total = 0;
    for (const Contour& c : res.contours) {
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            const Vec2& p = c.points[i];
            const double fx = bilinear_component(F.u, n, n, p.x, p.y);
            const double fy = bilinear_component(F.v, n, n, p.x, p.y);
            const double fm = std::hypot(fx, fy);
            ++total;
            if (fm < 0.02 * fmax) continue;
            const Vec2 t = c.tangent(i);
            if (std::abs((fx * t.x + fy * t.y) / fm) >= 0.15) ++violations;
        }
    }
    REQUIRE(total > 0);
    CHECK(violations == 0);
}

TEST_CASE("chan_vese captures both rectangles from a partially overlapping init") {
    const Synthetic s = generate(spec_of(SyntheticSpec::Kind::TwoRectangles));
    EdgeModelConfig ecfg;
    ecfg.gvf_iterations = 30;
    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 1;
    cfg.max_iteration = 2000;
    cfg.motion_tolerance = 0.01;
    const RunResult res = run_single_flow(
        s.image, ecfg, params, cfg,
        standard_initializations(SyntheticSpec::Kind::TwoRectangles, 80, 80), StepKind::ChanVese);
    CHECK_FALSE(res.vanished);
    CHECK(dice(mask_from_phi(res.phi), s.mask) >= 0.95);
}

TEST_CASE("gac alone parks across the U-shape mouth") {
    const Synthetic s = generate(spec_of(SyntheticSpec::Kind::UShape));
    EdgeModelConfig ecfg;
    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 1;
    cfg.max_iteration = 2500;
    const RunResult res =
        run_alternating(s.image, ecfg, params, cfg,
                        standard_initializations(SyntheticSpec::Kind::UShape, 80, 80));
    REQUIRE_FALSE(res.contours.empty());

    // The converged curve still crosses the concavity opening instead of
    // descending into it.
    int mouth_points = 0;
    for (const Contour& c : res.contours)
        for (const Vec2& p : c.points)
            if (p.x > 30.0 && p.x < 50.0 && p.y > 18.0 && p.y < 50.0) ++mouth_points;
    CHECK(mouth_points > 0);
}

TEST_CASE("identical runs produce identical traces") {
    const Synthetic s = generate(spec_of(SyntheticSpec::Kind::UShape));
    EdgeModelConfig ecfg;
    ecfg.gvf_iterations = 40;
    FlowParams params;
    ScheduleConfig cfg;
    cfg.max_cycle = 2;
    cfg.max_iteration = 40;
    cfg.motion_tolerance = 1e-9;
    const auto shapes = standard_initializations(SyntheticSpec::Kind::UShape, 80, 80);
    const RunResult a = run_alternating(s.image, ecfg, params, cfg, shapes);
    const RunResult b = run_alternating(s.image, ecfg, params, cfg, shapes);
    CHECK(a.trace.to_csv() == b.trace.to_csv());
    CHECK(a.trace.phases_csv() == b.trace.phases_csv());
}

TEST_CASE("schedule config validation") {
    ScheduleConfig cfg;
    cfg.max_cycle = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.max_cycle = 1;
    cfg.motion_tolerance = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
