#pragma once

#include <vector>

#include "sigre/geometry.hpp"
#include "sigre/path_model.hpp"
#include "sigre/stability.hpp"

namespace sigre {

// Number of coordinates that actually move.  Error bounds and the chain gap
// use it as the ambient dimension D; a lifted trajectory's frozen unit
// coordinate never counts.
int effective_dim(const AmbientTrajectory& y);

// Width-recursive family of disjoint eps-scale domains: top-level cubes
// first, then one hull family per skeleton level going down, each width
// certified as half of the largest value below which the chain quantity of
// the corresponding route stays constant all the way down.
struct SchemeStack {
    double eps = 0.0;
    int ambient_dim = 0;                     // D
    std::vector<double> deltas;              // delta_1 > delta_2 > ... > delta_D
    std::vector<SchemeParams> schemes;       // levels dim, dim-1, ..., dim-D+1
    std::vector<DeltaSelection> selections;  // per-level certification
};

// Builds the stack level by level (upper width eps at the top, then each
// level's selected width feeds the next as both upper width and outer hull
// width) and certifies pairwise disjointness of every domain meeting the
// trajectory's bounding box; a violation throws logic_error.  ambient_dim
// <= 0 means effective_dim(y).
SchemeStack build_scheme_stack(const AmbientTrajectory& y, double eps, int ambient_dim = 0);

struct ReconstructionResult {
    SchemeStack stack;
    RouteWord route;                // merged chronological word over the stack
    PiecewiseLinearPath polygonal;  // domain centers at the entry times
    double sup_error = 0.0;         // max_t |y(t) - polygonal(t)| over the grid
    double bound = 0.0;             // 68 D^{3/2} eps
    double d_metric = 0.0;          // monotone-matching distance, sampled
};

// Polygonal reconstruction through the full stack.  The trace keeps the
// route's entry times, interpolates linearly between consecutive domain
// centers, and stays at the last center afterwards; sup_error compares
// against the trajectory on a 4096-point grid united with all breakpoints.
ReconstructionResult reconstruct_polygonal(const AmbientTrajectory& y, double eps,
                                           int ambient_dim = 0);

// Single-family baseline: top-level cubes with an independently chosen width
// and no stability selection.  Same diagnostics as the full pipeline.
ReconstructionResult naive_reconstruct(const AmbientTrajectory& y, double eps, double delta,
                                       int ambient_dim = 0);

struct ExcursionReport {
    bool ok = true;
    double threshold = 0.0;  // 33 D^{3/2} eps
    double worst = 0.0;      // largest displacement outside all domains
    double witness_s = 0.0, witness_t = 0.0;  // times attaining it
};

// Checks that on every maximal interval the trajectory spends outside all
// stack domains its displacement stays below 33 D^{3/2} eps.
ExcursionReport check_excursion_bound(const AmbientTrajectory& y, const SchemeStack& stack);

}  // namespace sigre
