#include "sigre/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace sigre {

namespace {

double splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return (z >> 11) * 0x1.0p-53;
}

std::vector<double> uniform_times(std::size_t count) {
    std::vector<double> ts(count);
    for (std::size_t i = 0; i < count; ++i)
        ts[i] = static_cast<double>(i) / static_cast<double>(count - 1);
    return ts;
}

}  // namespace

PiecewiseLinearPath l_path() {
    return PiecewiseLinearPath({0.0, 0.5, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
}

PiecewiseLinearPath spiral_path(int turns, int chords_per_turn) {
    if (turns < 1 || chords_per_turn < 4) throw std::invalid_argument("spiral_path: bad shape");
    const int n = turns * chords_per_turn;
    const double r0 = 0.06, r1 = 0.44;
    std::vector<std::vector<double>> pts;
    for (int i = 0; i <= n; ++i) {
        double u = static_cast<double>(i) / n;
        double th = 2.0 * M_PI * turns * u;
        double r = r0 + (r1 - r0) * u;
        pts.push_back({r * std::cos(th) - r0, r * std::sin(th)});
    }
    return PiecewiseLinearPath(uniform_times(pts.size()), pts);
}

PiecewiseLinearPath figure_eight_path() {
    std::vector<std::vector<double>> pts = {
        {0.0, 0.0},  {0.5, 0.0},  {0.5, 0.96},  {0.52, 0.96},  {0.52, 0.0},  {0.0, 0.0},
        {-0.5, 0.0}, {-0.5, 0.96}, {-0.52, 0.96}, {-0.52, 0.0}, {0.0, 0.0}};
    return PiecewiseLinearPath(uniform_times(pts.size()), pts);
}

PiecewiseLinearPath circle_arc_path(double central, int chords, double spike) {
    if (!(central > 0.0) || chords < 2 || chords % 2 != 0 || spike < 0.0)
        throw std::invalid_argument("circle_arc_path: need central > 0, even chords >= 2");
    const double half = 0.5 * central;
    std::vector<std::vector<double>> pts;
    std::vector<double> start;
    for (int i = 0; i <= chords; ++i) {
        double u = static_cast<double>(i) / chords;
        double th = M_PI / 2 + half - central * u;
        std::vector<double> p{std::cos(th), std::sin(th)};
        if (i == 0) start = p;
        pts.push_back({p[0] - start[0], p[1] - start[1]});
        if (spike > 0.0 && i == chords / 2) {
            // out along the radius and straight back: same signature, tree part
            pts.push_back({(1.0 + spike) * p[0] - start[0], (1.0 + spike) * p[1] - start[1]});
            pts.push_back(pts[pts.size() - 2]);
        }
    }
    return PiecewiseLinearPath(uniform_times(pts.size()), pts);
}

PiecewiseLinearPath tunnel_runner_path(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("tunnel_runner_path: eps must be positive");
    return PiecewiseLinearPath({0.0, 0.05, 1.0},
                               {{0.0, 0.0}, {0.5 * eps, 0.0}, {0.5 * eps, 1.9}});
}

PiecewiseLinearPath random_pl_path(std::uint64_t seed, int dim, int segments, double amplitude) {
    if (dim < 1 || segments < 1 || !(amplitude > 0.0))
        throw std::invalid_argument("random_pl_path: bad shape");
    std::uint64_t s = seed;
    std::vector<std::vector<double>> pts{std::vector<double>(dim, 0.0)};
    for (int k = 1; k <= segments; ++k) {
        std::vector<double> p(dim);
        for (int c = 0; c < dim; ++c) p[c] = amplitude * (2.0 * splitmix(s) - 1.0);
        pts.push_back(std::move(p));
    }
    return PiecewiseLinearPath(uniform_times(pts.size()), pts);
}

PiecewiseLinearPath named_path(const std::string& name, std::uint64_t seed) {
    if (name == "l-path" || name == "example-3-1") return l_path();
    if (name == "spiral") return spiral_path();
    if (name == "figure-eight") return figure_eight_path();
    if (name == "example-2-1") return circle_arc_path(0.2, 512, 1e-3);
    if (name == "example-2-1-arc") return circle_arc_path(0.2, 512, 0.0);
    if (name == "tunnel-runner") return tunnel_runner_path(1.0 / 64.0);
    if (name.rfind("random:", 0) == 0) {
        std::size_t colon = name.find(':', 7);
        if (colon != std::string::npos) {
            int dim = std::stoi(name.substr(7, colon - 7));
            int segs = std::stoi(name.substr(colon + 1));
            return random_pl_path(seed, dim, segs);
        }
    }
    throw std::invalid_argument("unknown generator: " + name);
}

std::vector<std::string> generator_names() {
    return {"l-path",      "spiral",        "figure-eight", "example-2-1",
            "example-2-1-arc", "example-3-1", "tunnel-runner", "random:<dim>:<segments>"};
}

}  // namespace sigre
