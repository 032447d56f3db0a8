#pragma once

#include <vector>

#include "sigre/geometry.hpp"
#include "sigre/path_model.hpp"

namespace sigre {

// Route of the degree-N signature trajectory through the unit-scale wall
// family: cubes centered at half-lattice points with at least one coordinate
// exactly +-1/2 (plus the origin cube), halfwidth 1/2 - delta at integer
// centers and delta/2 at half-integer ones.  The trajectory starts at the
// offset origin, so the word always opens with the origin cube.
RouteWord route_in_halfint_scheme(const PiecewiseLinearPath& x, double delta, int degree);

// One width's worth of evidence from the stabilization scan.
struct DegreeEvidence {
    double delta = 0.0;
    int selected = 1;              // least degree whose higher blocks vanish in
                                   // every tested route at this width
    std::vector<int> tested;       // degrees the route was extracted at
    std::vector<int> top_nonzero;  // per tested degree, the highest degree
                                   // carrying a nonzero letter coordinate
                                   // (the floor when all of them vanish)
};

struct DegreeSelection {
    int n_g = 1;  // stabilized degree: max of selected over the width grid
    int degree_floor = 1;
    int n_max = 0;
    std::vector<DegreeEvidence> evidence;
    // post hoc containment check on the next three degree blocks: every
    // signature coordinate of degree in (n_g, n_g + 3] must stay within 1/2
    double tail_worst = 0.0;
    int tail_degree = 0;  // n_g + 3
    bool tail_ok = false;
};

// Least degree beyond which wall-route letters carry no information: for each
// width in the grid (default {1/8, 1/16, 1/32, 1/64}) extracts the wall route
// at every degree in (degree_floor, n_max] and finds the least N such that
// all letter coordinates of degree above N vanish in every tested route; the
// reported degree is the max over the grid.  Throws runtime_error naming the
// offending degree when some route still carries nonzero top-degree
// coordinates at n_max (stabilization not certifiable).
DegreeSelection projection_stabilized_degree(const PiecewiseLinearPath& x,
                                             std::vector<double> delta_grid = {},
                                             int n_max = 6, int degree_floor = 1);

// Route of the degree-N signature trajectory through cylinder extensions of
// base domains living on the degree-base_degree block: each domain keeps its
// lattice label and gains free coordinates bounded by |a^I| < 1 on the higher
// blocks.  When every higher coordinate stays below 1 in absolute value this
// word equals the base route.
RouteWord lift_scheme_route(const PiecewiseLinearPath& x, std::vector<SchemeParams> base,
                            int base_degree, int degree);

// Least degree in (base_degree, n_max] from which the lifted route word stays
// the same all the way to n_max.
int lifted_route_stability(const PiecewiseLinearPath& x, const std::vector<SchemeParams>& base,
                           int base_degree, int n_max);

}  // namespace sigre
