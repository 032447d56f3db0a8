#pragma once

#include <vector>

#include "sigre/geometry.hpp"

namespace sigre {

// Longest chain selectable from a route word whose consecutive letters are at
// Euclidean distance >= 2 sqrt(D) in lattice units.
struct AdmissibleChainResult {
    int length = 0;            // the stable quantity; 0 for the empty word
    std::vector<int> witness;  // indices into the word realizing it
};

// O(n^2) chain DP; the gap test is exact (doubled_dist_sq >= 16 D).
// D is the ambient dimension the 2 sqrt(D) threshold refers to, which for a
// lifted trajectory excludes the frozen empty-word coordinate.
AdmissibleChainResult stable_quantity(const std::vector<LatticePoint>& word, int D);

// All widths in (0, delta_upper) at which the route word of y through the
// family changes.  Works for piecewise polynomial trajectories: every entry
// condition is polynomial in t and linear in delta, candidate widths come
// from branch tangencies and from delta-eliminated pairwise boundary
// collisions (polynomial root finding in t), and each candidate is kept only
// if the route words on its two sides actually differ, so the list is exact.
// family.delta is ignored (it is the scan variable); for hulls delta_outer
// must be >= delta_upper.
std::vector<double> route_change_thresholds(const AmbientTrajectory& y, SchemeParams family,
                                            double delta_upper, bool require_origin_start);

struct DeltaSelection {
    int level = 0;
    double delta = 0.0;  // the returned width: exactly half of sup
    double sup = 0.0;    // largest width below which the stable quantity is
                         // constant all the way down
    int sq = 0;          // that constant value
    std::vector<double> thresholds;      // verified route-change widths, ascending
    std::vector<LatticePoint> word;      // route word on the bottom constant interval
};

// Stable-quantity-driven width selection: evaluates the chain quantity on the
// constant-route intervals cut by the thresholds, certifies the largest width
// below which it never changes, and returns half of it.  Throws when a
// route-change width falls below the resolution floor 2^-40 * delta_upper.
DeltaSelection select_delta(const AmbientTrajectory& y, SchemeParams family, double delta_upper,
                            bool require_origin_start, int ambient_dim);

}  // namespace sigre
