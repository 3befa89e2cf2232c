#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "geosnakes/field.hpp"
#include "geosnakes/levelset.hpp"

namespace geosnakes {

// Binary mask of the region enclosed by the contour (phi < 0).
inline ScalarField mask_from_phi(const ScalarField& phi) {
    ScalarField m(phi.width, phi.height);
    for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = phi.values[i] < 0.0 ? 1.0 : 0.0;
    return m;
}

inline double dice(const ScalarField& a, const ScalarField& b) {
    require_same_size(a, b, "dice");
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool ia = a.values[i] > 0.5, ib = b.values[i] > 0.5;
        na += ia;
        nb += ib;
        both += ia && ib;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

// Dice score that ignores which side of the partition carries the object
// label; region-competition segmentations are symmetric under relabeling.
inline double dice_label_agnostic(const ScalarField& a, const ScalarField& b) {
    ScalarField inv = a;
    for (double& v : inv.values) v = v > 0.5 ? 0.0 : 1.0;
    return std::max(dice(a, b), dice(inv, b));
}

// Zero contours of a binary mask (boundary between mask and background).
inline std::vector<Contour> contours_from_mask(const ScalarField& mask) {
    ScalarField phi(mask.width, mask.height);
    for (std::size_t i = 0; i < phi.size(); ++i) phi.values[i] = 0.5 - mask.values[i];
    return extract_contours(phi);
}

}  // namespace geosnakes
