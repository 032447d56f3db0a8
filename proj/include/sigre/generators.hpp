#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigre/path_model.hpp"

namespace sigre {

// Named example paths shared by the CLI and the acceptance suite.  All start
// at the origin so route extraction can anchor there.

// unit corner: right then up
PiecewiseLinearPath l_path();

// planar spiral, radius growing linearly from 0.06 to 0.44 over `turns` turns
PiecewiseLinearPath spiral_path(int turns = 5, int chords_per_turn = 16);

// two opposite thin lobes pinned at x = +-1/2 (see route tests: the level-2
// coordinates cross 1/2 while every deeper one stays below 1/4)
PiecewiseLinearPath figure_eight_path();

// unit-circle arc with central angle `central` around the top, `chords` equal
// chords, translated to start at the origin.  spike > 0 inserts a retraced
// radial excursion of that length at the midpoint: the arc-with-spike and the
// plain arc share their signature, but only the plain arc is tree-reduced.
PiecewiseLinearPath circle_arc_path(double central, int chords, double spike);

// leaves the origin cube by half a width and then runs far along a tunnel
PiecewiseLinearPath tunnel_runner_path(double eps);

// seeded vertex soup in [-amplitude, amplitude]^dim, first vertex at the origin
PiecewiseLinearPath random_pl_path(std::uint64_t seed, int dim, int segments,
                                   double amplitude = 0.6);

// registry used by the CLI: "l-path", "spiral", "figure-eight", "example-2-1"
// (arc + spike 1e-3, central angle 0.2, 512 chords), "example-2-1-arc" (no
// spike), "example-3-1" (the corner path; pair with scales 2/(2n+1)),
// "tunnel-runner" (eps 1/64), "random:<dim>:<segments>" (uses `seed`).
PiecewiseLinearPath named_path(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> generator_names();

}  // namespace sigre
