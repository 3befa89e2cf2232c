#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "geosnakes/field.hpp"
#include "geosnakes/levelset.hpp"

namespace geosnakes {

// Test scenes. Geometry is fixed relative to an 80x80 canonical layout and
// scales with min(width, height):
//   ushape           48x48 block, arm width 12, mouth width 24, opening up
//   two_rectangles   two 20x40 rectangles with a 12 px gap
//   three_objects    disc, square and ellipse
//   three_circle_arcs  three circle outlines, each drawn as three arcs
struct SyntheticSpec {
    enum class Kind { UShape, TwoRectangles, ThreeObjects, ThreeCircleArcs };
    Kind kind = Kind::UShape;
    int width = 80;
    int height = 80;
    double foreground = 200.0;
    double background = 50.0;
    double arc_gap_degrees = 10.0;  // three_circle_arcs only
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;

    void validate() const {
        if (width < 32 || height < 32)
            throw std::invalid_argument("SyntheticSpec: dimensions must be at least 32");
        if (foreground == background)
            throw std::invalid_argument("SyntheticSpec: foreground must differ from background");
        if (noise_sigma < 0.0)
            throw std::invalid_argument("SyntheticSpec: noise_sigma must be non-negative");
        if (arc_gap_degrees < 0.0 || arc_gap_degrees >= 120.0)
            throw std::invalid_argument("SyntheticSpec: arc_gap_degrees must lie in [0, 120)");
    }

    static Kind kind_from_string(const std::string& s) {
        if (s == "ushape") return Kind::UShape;
        if (s == "two_rectangles") return Kind::TwoRectangles;
        if (s == "three_objects") return Kind::ThreeObjects;
        if (s == "three_circle_arcs") return Kind::ThreeCircleArcs;
        throw std::invalid_argument("unknown synthetic kind: " + s);
    }
    static std::string kind_to_string(Kind k) {
        switch (k) {
            case Kind::UShape: return "ushape";
            case Kind::TwoRectangles: return "two_rectangles";
            case Kind::ThreeObjects: return "three_objects";
            default: return "three_circle_arcs";
        }
    }
};

struct Synthetic {
    ScalarField image;
    ScalarField mask;  // 1 inside objects, 0 outside
};

namespace detail {

// 64-bit linear congruential generator (Knuth MMIX constants
// 6364136223846793005 / 1442695040888963407).
struct Lcg64 {
    std::uint64_t state;
    explicit Lcg64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state;
    }
    double uniform() {  // in (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) / 9007199254740992.0;
    }
    double gaussian() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

inline double rect_sdf(double x, double y, double x0, double y0, double x1, double y1) {
    const double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0);
    const double qx = std::abs(x - 0.5 * (x0 + x1)) - hx;
    const double qy = std::abs(y - 0.5 * (y0 + y1)) - hy;
    const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
    return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
}

inline double coverage(double sdf) { return std::clamp(0.5 - sdf, 0.0, 1.0); }

struct ArcCircle {
    double cx, cy, r;
    double gap_offset_deg;  // first gap center angle
};

inline std::vector<ArcCircle> arc_circles(double s) {
    return {{40.0 * s, 22.0 * s, 13.0 * s, 90.0},
            {25.0 * s, 52.0 * s, 13.0 * s, 210.0},
            {55.0 * s, 52.0 * s, 13.0 * s, 330.0}};
}

}  // namespace detail

// Renders the scene with an anti-aliased 1 px boundary transition plus the
// matching ground-truth mask. For three_circle_arcs the mask closes the
// arcs into full discs. Deterministic for a fixed spec.
inline Synthetic generate(const SyntheticSpec& spec) {
    spec.validate();
    const int w = spec.width, h = spec.height;
    const double s = std::min(w, h) / 80.0;
    const double cx = 0.5 * w, cy = 0.5 * h;
    Synthetic out{ScalarField(w, h, spec.background), ScalarField(w, h, 0.0)};

    auto paint = [&](int x, int y, double cov, bool in_mask) {
        out.image.at(x, y) = spec.background + (spec.foreground - spec.background) * cov;
        out.mask.at(x, y) = in_mask ? 1.0 : 0.0;
    };

    switch (spec.kind) {
        case SyntheticSpec::Kind::UShape: {
            const double ox0 = cx - 24.0 * s, ox1 = cx + 24.0 * s;
            const double oy0 = cy - 24.0 * s, oy1 = cy + 24.0 * s;
            const double nx0 = cx - 12.0 * s, nx1 = cx + 12.0 * s;
            const double ny1 = oy0 + 36.0 * s;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double d_outer = detail::rect_sdf(x, y, ox0, oy0, ox1, oy1);
                    const double d_notch = detail::rect_sdf(x, y, nx0, oy0 - 2.0, nx1, ny1);
                    const double d = std::max(d_outer, -d_notch);
                    paint(x, y, detail::coverage(d), d < 0.0);
                }
            break;
        }
        case SyntheticSpec::Kind::TwoRectangles: {
            const double ay0 = cy - 20.0 * s, ay1 = cy + 20.0 * s;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double da = detail::rect_sdf(x, y, cx - 26.0 * s, ay0, cx - 6.0 * s, ay1);
                    const double db = detail::rect_sdf(x, y, cx + 6.0 * s, ay0, cx + 26.0 * s, ay1);
                    const double d = std::min(da, db);
                    paint(x, y, detail::coverage(d), d < 0.0);
                }
            break;
        }
        case SyntheticSpec::Kind::ThreeObjects: {
            const double dcx = 27.0 * s, dcy = 25.0 * s, dr = 9.0 * s;
            const double ex = 40.0 * s, ey = 58.0 * s, erx = 14.0 * s, ery = 8.0 * s;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double d_disc = std::hypot(x - dcx, y - dcy) - dr;
                    const double d_sq = detail::rect_sdf(x, y, 44.0 * s, 16.0 * s, 62.0 * s, 34.0 * s);
                    const double d_ell =
                        (std::hypot((x - ex) / erx, (y - ey) / ery) - 1.0) * std::min(erx, ery);
                    const double d = std::min({d_disc, d_sq, d_ell});
                    paint(x, y, detail::coverage(d), d < 0.0);
                }
            break;
        }
        case SyntheticSpec::Kind::ThreeCircleArcs: {
            const std::vector<detail::ArcCircle> circles = detail::arc_circles(s);
            const double half_width = 1.0;
            const double half_gap = 0.5 * spec.arc_gap_degrees * std::numbers::pi / 180.0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double cov = 0.0;
                    bool in_mask = false;
                    for (const detail::ArcCircle& c : circles) {
                        const double rad = std::hypot(x - c.cx, y - c.cy);
                        in_mask = in_mask || rad <= c.r;
                        const double d_ring = std::abs(rad - c.r) - half_width;
                        if (d_ring >= 0.5) continue;
                        double ang = std::atan2(y - c.cy, x - c.cx) -
                                     c.gap_offset_deg * std::numbers::pi / 180.0;
                        ang = std::fmod(std::fmod(ang, 2.0 * std::numbers::pi / 3.0) +
                                            2.0 * std::numbers::pi / 3.0,
                                        2.0 * std::numbers::pi / 3.0);
                        const double to_gap_center = std::min(ang, 2.0 * std::numbers::pi / 3.0 - ang);
                        if (to_gap_center < half_gap) continue;  // inside a gap sector
                        cov = std::max(cov, detail::coverage(d_ring));
                    }
                    paint(x, y, cov, in_mask);
                }
            break;
        }
    }

    if (spec.noise_sigma > 0.0) {
        detail::Lcg64 rng(spec.seed);
        for (double& v : out.image.values) v += spec.noise_sigma * rng.gaussian();
    }
    return out;
}

// Initial curves that overlap every object partially, so that neither pure
// shrinking nor pure expansion can reach the boundaries.
inline std::vector<ShapeSpec> standard_initializations(SyntheticSpec::Kind kind, int width,
                                                       int height) {
    const double s = std::min(width, height) / 80.0;
    const double cx = 0.5 * width, cy = 0.5 * height;
    switch (kind) {
        case SyntheticSpec::Kind::UShape:
            return {ShapeSpec::circle(cx, cy - 2.0 * s, 27.0 * s)};
        case SyntheticSpec::Kind::TwoRectangles:
            return {ShapeSpec::circle(cx, cy, 18.0 * s)};
        case SyntheticSpec::Kind::ThreeObjects:
            return {ShapeSpec::circle(cx, cy, 22.0 * s)};
        default:
            return {ShapeSpec::circle(cx, cy, 24.0 * s)};
    }
}

}  // namespace geosnakes
