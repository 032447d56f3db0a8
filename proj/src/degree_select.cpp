#include "sigre/degree_select.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "sigre/words.hpp"

namespace sigre {

namespace {

// degree of every flat coordinate of the degree-N ambient space
std::vector<int> flat_degrees(int base_dim, int degree) {
    std::vector<int> dg(flat_word_count(base_dim, degree));
    std::size_t at = 0;
    for (int k = 0; k <= degree; ++k)
        for (std::int64_t i = 0; i < level_size(base_dim, k); ++i) dg[at++] = k;
    return dg;
}

}  // namespace

RouteWord route_in_halfint_scheme(const PiecewiseLinearPath& x, double delta, int degree) {
    if (degree < 1) throw std::invalid_argument("route_in_halfint_scheme: degree must be >= 1");
    AmbientTrajectory y = AmbientTrajectory::from_lifted(x, degree);
    SchemeParams sp;
    sp.kind = SchemeParams::HalfInt;
    sp.dim = y.dim;
    sp.eps = 1.0;
    sp.delta = delta;
    return extract_route(y, {sp}, true);
}

DegreeSelection projection_stabilized_degree(const PiecewiseLinearPath& x,
                                             std::vector<double> delta_grid, int n_max,
                                             int degree_floor) {
    if (delta_grid.empty()) delta_grid = {0.125, 0.0625, 0.03125, 0.015625};
    for (double w : delta_grid)
        if (!(w > 0.0) || !(w < 0.25))
            throw std::invalid_argument(
                "projection_stabilized_degree: widths must lie in (0, 1/4)");
    if (degree_floor < 1)
        throw std::invalid_argument("projection_stabilized_degree: degree floor must be >= 1");
    if (n_max <= degree_floor)
        throw std::invalid_argument(
            "projection_stabilized_degree: n_max must exceed the degree floor");

    const int d = x.dim();
    DegreeSelection sel;
    sel.degree_floor = degree_floor;
    sel.n_max = n_max;
    sel.n_g = degree_floor;
    for (double delta : delta_grid) {
        DegreeEvidence ev;
        ev.delta = delta;
        ev.selected = degree_floor;
        for (int N = degree_floor + 1; N <= n_max; ++N) {
            RouteWord rw = route_in_halfint_scheme(x, delta, N);
            std::vector<int> dg = flat_degrees(d, N);
            int top = degree_floor;
            for (const LatticePoint& z : rw.labels())
                for (int c = 0; c < z.dim(); ++c)
                    if (z.doubled[c] != 0) top = std::max(top, dg[c]);
            ev.tested.push_back(N);
            ev.top_nonzero.push_back(top);
            ev.selected = std::max(ev.selected, top);
        }
        // a route whose letters are nonzero at the last tested degree leaves
        // no degree above it to witness a vanishing block
        if (ev.selected >= n_max)
            throw std::runtime_error(
                "projection_stabilized_degree: no stabilization by degree " +
                std::to_string(n_max) + " at width " + std::to_string(delta) +
                " (route letters carry nonzero coordinates up to degree " +
                std::to_string(ev.selected) + ")");
        sel.n_g = std::max(sel.n_g, ev.selected);
        sel.evidence.push_back(std::move(ev));
    }

    sel.tail_degree = sel.n_g + 3;
    AmbientTrajectory y = AmbientTrajectory::from_lifted(x, sel.tail_degree);
    std::vector<int> dg = flat_degrees(d, sel.tail_degree);
    for (int c = 0; c < y.dim; ++c) {
        if (dg[c] <= sel.n_g) continue;
        auto [lo, hi] = y.coord_range(c);
        sel.tail_worst = std::max({sel.tail_worst, std::abs(lo), std::abs(hi)});
    }
    sel.tail_ok = sel.tail_worst <= 0.5;
    return sel;
}

RouteWord lift_scheme_route(const PiecewiseLinearPath& x, std::vector<SchemeParams> base,
                            int base_degree, int degree) {
    if (base.empty()) throw std::invalid_argument("lift_scheme_route: no base schemes");
    if (base_degree < 1 || degree <= base_degree)
        throw std::invalid_argument("lift_scheme_route: need degree > base_degree >= 1");
    const int d = x.dim();
    const int base_dim = static_cast<int>(flat_word_count(d, base_degree));
    const int full_dim = static_cast<int>(flat_word_count(d, degree));
    for (SchemeParams& sp : base) {
        if (sp.dim != base_dim || sp.cylinder_dim != 0)
            throw std::invalid_argument(
                "lift_scheme_route: base schemes must be plain families on the base block");
        sp.cylinder_dim = full_dim - base_dim;
        sp.cylinder_bound = 1.0;
    }
    AmbientTrajectory y = AmbientTrajectory::from_lifted(x, degree);
    return extract_route(y, base, true);
}

int lifted_route_stability(const PiecewiseLinearPath& x, const std::vector<SchemeParams>& base,
                           int base_degree, int n_max) {
    if (n_max <= base_degree)
        throw std::invalid_argument("lifted_route_stability: n_max must exceed the base degree");
    std::vector<std::vector<LatticePoint>> words;
    for (int N = base_degree + 1; N <= n_max; ++N)
        words.push_back(lift_scheme_route(x, base, base_degree, N).labels());
    int n1 = n_max;
    for (int i = static_cast<int>(words.size()) - 2; i >= 0; --i) {
        if (words[i] != words.back()) break;
        n1 = base_degree + 1 + i;
    }
    return n1;
}

}  // namespace sigre
