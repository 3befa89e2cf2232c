#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "geosnakes/field.hpp"

namespace test_helpers {

// Deterministic pseudo-random field for property tests.
inline geosnakes::ScalarField random_field(int w, int h, std::uint64_t seed, double lo = -1.0,
                                           double hi = 1.0) {
    geosnakes::ScalarField f(w, h);
    std::uint64_t state = seed * 2862933555777941757ULL + 3037000493ULL;
    for (double& v : f.values) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const double u = static_cast<double>(state >> 11) / 9007199254740992.0;
        v = lo + (hi - lo) * u;
    }
    return f;
}

inline geosnakes::VectorField random_vector_field(int w, int h, std::uint64_t seed) {
    geosnakes::VectorField F(w, h);
    const geosnakes::ScalarField a = random_field(w, h, seed);
    const geosnakes::ScalarField b = random_field(w, h, seed + 17);
    F.u = a.values;
    F.v = b.values;
    return F;
}

inline geosnakes::ScalarField circle_sdf(int w, int h, double cx, double cy, double r) {
    geosnakes::ScalarField phi(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) phi.at(x, y) = std::hypot(x - cx, y - cy) - r;
    return phi;
}

inline geosnakes::ScalarField from_function(int w, int h,
                                            const std::function<double(double, double)>& f) {
    geosnakes::ScalarField out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = f(x, y);
    return out;
}

}  // namespace test_helpers
