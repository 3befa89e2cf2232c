#include <doctest.h>

#include "geosnakes/metrics.hpp"
#include "geosnakes/synth.hpp"
#include "helpers.hpp"

using namespace geosnakes;
using test_helpers::circle_sdf;

TEST_CASE("dice of identical and disjoint masks") {
    ScalarField a(20, 20, 0.0), b(20, 20, 0.0);
    for (int y = 3; y < 10; ++y)
        for (int x = 3; x < 10; ++x) a.at(x, y) = 1.0;
    CHECK(dice(a, a) == 1.0);
    for (int y = 12; y < 18; ++y)
        for (int x = 12; x < 18; ++x) b.at(x, y) = 1.0;
    CHECK(dice(a, b) == 0.0);
}

TEST_CASE("dice with known overlap") {
    // a: 10x10 square, b: same square shifted 5 -> overlap 50, dice = 100/200.
    ScalarField a(40, 40, 0.0), b(40, 40, 0.0);
    for (int y = 10; y < 20; ++y) {
        for (int x = 10; x < 20; ++x) a.at(x, y) = 1.0;
        for (int x = 15; x < 25; ++x) b.at(x, y) = 1.0;
    }
    CHECK(dice(a, b) == doctest::Approx(0.5));
}

TEST_CASE("label-agnostic dice handles inverted partitions") {
    ScalarField gt(20, 20, 0.0);
    for (int y = 5; y < 15; ++y)
        for (int x = 5; x < 15; ++x) gt.at(x, y) = 1.0;
    ScalarField inverted = gt;
    for (double& v : inverted.values) v = 1.0 - v;
    CHECK(dice(inverted, gt) < 0.1);
    CHECK(dice_label_agnostic(inverted, gt) == 1.0);
}

TEST_CASE("mask_from_phi thresholds at zero") {
    const ScalarField phi = circle_sdf(32, 32, 16, 16, 8);
    const ScalarField m = mask_from_phi(phi);
    CHECK(m.at(16, 16) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
}

TEST_CASE("contours_from_mask traces the mask boundary") {
    const Synthetic s = [] {
        SyntheticSpec spec;
        spec.kind = SyntheticSpec::Kind::TwoRectangles;
        return generate(spec);
    }();
    const std::vector<Contour> cs = contours_from_mask(s.mask);
    CHECK(cs.size() == 2);
    for (const Contour& c : cs) CHECK(c.closed);
}
