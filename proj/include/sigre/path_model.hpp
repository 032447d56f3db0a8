#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sigre {

// Piecewise-linear path in R^dim: vertex times (strictly increasing) and vertex
// positions, evaluated by linear interpolation.
class PiecewiseLinearPath {
public:
    PiecewiseLinearPath() = default;
    PiecewiseLinearPath(std::vector<double> times, std::vector<std::vector<double>> points);

    int dim() const { return points_.empty() ? 0 : static_cast<int>(points_[0].size()); }
    int segments() const { return static_cast<int>(times_.size()) - 1; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<std::vector<double>>& points() const { return points_; }

    std::vector<double> eval(double t) const;
    std::vector<double> velocity(int seg) const;   // dx/dt on segment seg
    double segment_length(int seg) const;          // Euclidean length
    double arc_length() const;
    double arc_length(double s, double t) const;   // along the path between times

    // New path carrying the same trajectory with vertex times = sorted union of
    // `grid` and the existing vertex times (vertices are always preserved).
    PiecewiseLinearPath resample(const std::vector<double>& grid) const;

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> points_;
};

// Concatenation: x on [0,1/2], y on [1/2,1] (times rescaled); requires
// x(end) == y(start) exactly.
PiecewiseLinearPath concat(const PiecewiseLinearPath& x, const PiecewiseLinearPath& y);

struct PVarResult {
    double value = 0.0;                 // ||x||_p over the sample grid
    std::vector<double> witness_times;  // maximizing partition
};

// p-variation over the grid (uniform `samples` points united with the vertex
// times) by the O(n^2) dynamic program; witness carries the maximizing partition.
PVarResult p_variation(const PiecewiseLinearPath& x, double p, int samples);

// Discrete monotone-matching (Frechet-style) distance between both paths
// sampled at `samples` points each: min over monotone couplings of the max
// pointwise distance.  Upper bound converging to the reparametrization metric.
double reparam_distance(const PiecewiseLinearPath& x, const PiecewiseLinearPath& y, int samples);
double reparam_distance_points(const std::vector<std::vector<double>>& xs,
                               const std::vector<std::vector<double>>& ys);

// JSON I/O; format: [[t, x1..xm], ...]
PiecewiseLinearPath path_from_json(const std::string& text);
std::string path_to_json(const PiecewiseLinearPath& x);
PiecewiseLinearPath load_path(const std::string& filename);

double euclid_dist(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sigre
