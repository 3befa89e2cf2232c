#include <doctest.h>

#include <cmath>
#include <vector>

#include "geosnakes/field.hpp"
#include "geosnakes/levelset.hpp"
#include "geosnakes/synth.hpp"

using namespace geosnakes;

namespace {

// 4-connected component count over a binary predicate.
int component_count(const ScalarField& f, double threshold) {
    const int w = f.width, h = f.height;
    std::vector<int> label(f.size(), 0);
    int components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < f.size(); ++start) {
        if (f.values[start] <= threshold || label[start]) continue;
        ++components;
        stack.push_back(start);
        label[start] = components;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
            for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (f.values[j] > threshold && !label[j]) {
                    label[j] = components;
                    stack.push_back(j);
                }
            }
        }
    }
    return components;
}

SyntheticSpec make_spec(SyntheticSpec::Kind kind) {
    SyntheticSpec s;
    s.kind = kind;
    return s;
}

}  // namespace

TEST_CASE("two_rectangles: two components, bimodal away from boundaries") {
    const Synthetic s = generate(make_spec(SyntheticSpec::Kind::TwoRectangles));
    CHECK(component_count(s.mask, 0.5) == 2);
    int off_level = 0;
    for (double v : s.image.values)
        if (v != 50.0 && v != 200.0) ++off_level;
    // Only the 1 px anti-aliased boundary ring may sit between the levels.
    CHECK(off_level < 400);
    CHECK(off_level > 0);
}

TEST_CASE("ushape: one component, no holes, concave mouth") {
    const Synthetic s = generate(make_spec(SyntheticSpec::Kind::UShape));
    CHECK(component_count(s.mask, 0.5) == 1);
    // Complement has a single component (the mouth connects to the outside),
    // so the Euler number is 1.
    ScalarField inv = s.mask;
    for (double& v : inv.values) v = 1.0 - v;
    CHECK(component_count(inv, 0.5) == 1);
    CHECK(s.mask.at(40, 30) == 0.0);  // inside the concavity
    CHECK(s.mask.at(40, 58) == 1.0);  // bottom wall
    CHECK(s.mask.at(20, 40) == 1.0);  // left arm
    CHECK(s.mask.at(60, 40) == 1.0);  // right arm
}

TEST_CASE("three_circle_arcs: nine high-gradient segments, three disc masks") {
    // At 120 px the 10 degree gaps span ~4.5 px, enough for the thresholded
    // gradient blobs of adjacent arc ends to separate cleanly.
    SyntheticSpec spec = make_spec(SyntheticSpec::Kind::ThreeCircleArcs);
    spec.arc_gap_degrees = 10.0;
    spec.width = spec.height = 120;
    const Synthetic s = generate(spec);
    CHECK(component_count(s.mask, 0.5) == 3);

    const VectorField grad = gradient_central(s.image);
    ScalarField mag(s.image.width, s.image.height);
    double mx = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        mag.values[i] = std::hypot(grad.u[i], grad.v[i]);
        mx = std::max(mx, mag.values[i]);
    }
    CHECK(component_count(mag, 0.25 * mx) == 9);
}

TEST_CASE("three_objects: three components of distinct shapes") {
    const Synthetic s = generate(make_spec(SyntheticSpec::Kind::ThreeObjects));
    CHECK(component_count(s.mask, 0.5) == 3);
}

TEST_CASE("generation is deterministic including seeded noise") {
    SyntheticSpec spec = make_spec(SyntheticSpec::Kind::TwoRectangles);
    spec.noise_sigma = 5.0;
    spec.seed = 1234;
    const Synthetic a = generate(spec);
    const Synthetic b = generate(spec);
    for (std::size_t i = 0; i < a.image.size(); ++i) {
        CHECK(a.image.values[i] == b.image.values[i]);
        CHECK(a.mask.values[i] == b.mask.values[i]);
    }
    SyntheticSpec other = spec;
    other.seed = 4321;
    const Synthetic c = generate(other);
    int differing = 0;
    for (std::size_t i = 0; i < a.image.size(); ++i)
        if (a.image.values[i] != c.image.values[i]) ++differing;
    CHECK(differing > 1000);
}

TEST_CASE("mask matches the thresholded image away from boundaries (filled scenes)") {
    for (SyntheticSpec::Kind kind : {SyntheticSpec::Kind::UShape, SyntheticSpec::Kind::TwoRectangles,
                                     SyntheticSpec::Kind::ThreeObjects}) {
        const Synthetic s = generate(make_spec(kind));
        const double mid = 0.5 * (200.0 + 50.0);
        for (std::size_t i = 0; i < s.image.size(); ++i) {
            const bool above = s.image.values[i] > mid;
            const bool in_mask = s.mask.values[i] > 0.5;
            if (above == in_mask) continue;
            // Disagreements must lie in the anti-aliased transition ring.
            CHECK(s.image.values[i] > 50.0);
            CHECK(s.image.values[i] < 200.0);
        }
    }
}

TEST_CASE("spec validation rejects bad parameters") {
    SyntheticSpec s;
    s.width = 16;
    CHECK_THROWS_AS(generate(s), std::invalid_argument);
    s.width = 80;
    s.foreground = s.background;
    CHECK_THROWS_AS(generate(s), std::invalid_argument);
    s.foreground = 200.0;
    s.noise_sigma = -1.0;
    CHECK_THROWS_AS(generate(s), std::invalid_argument);
}

TEST_CASE("standard initializations overlap every object partially") {
    for (SyntheticSpec::Kind kind :
         {SyntheticSpec::Kind::UShape, SyntheticSpec::Kind::TwoRectangles,
          SyntheticSpec::Kind::ThreeObjects, SyntheticSpec::Kind::ThreeCircleArcs}) {
        const Synthetic s = generate(make_spec(kind));
        const std::vector<ShapeSpec> init = standard_initializations(kind, 80, 80);
        const ScalarField phi = init_from_shapes(init, 80, 80);

        // Label the mask objects, then check the initial region covers part
        // but not all of each object.
        const int w = 80, h = 80;
        std::vector<int> label(s.mask.size(), 0);
        int components = 0;
        std::vector<std::size_t> stack;
        for (std::size_t start = 0; start < s.mask.size(); ++start) {
            if (s.mask.values[start] < 0.5 || label[start]) continue;
            ++components;
            stack.push_back(start);
            label[start] = components;
            while (!stack.empty()) {
                const std::size_t i = stack.back();
                stack.pop_back();
                const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                    if (s.mask.values[j] > 0.5 && !label[j]) {
                        label[j] = components;
                        stack.push_back(j);
                    }
                }
            }
        }
        REQUIRE(components >= 1);
        for (int c = 1; c <= components; ++c) {
            int object = 0, covered = 0;
            for (std::size_t i = 0; i < label.size(); ++i) {
                if (label[i] != c) continue;
                ++object;
                if (phi.values[i] < 0.0) ++covered;
            }
            CHECK(covered > 0);
            CHECK(covered < object);
        }
    }
}
