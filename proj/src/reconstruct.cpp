#include "sigre/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sigre/polyroot.hpp"

namespace sigre {

int effective_dim(const AmbientTrajectory& y) {
    int n = 0;
    for (int c = 0; c < y.dim; ++c)
        if (!y.frozen[c]) ++n;
    return n;
}

namespace {

int resolve_dim(const AmbientTrajectory& y, int ambient_dim) {
    int D = ambient_dim > 0 ? ambient_dim : effective_dim(y);
    if (D < 1) throw std::invalid_argument("reconstruct: trajectory has no moving coordinate");
    if (D > y.dim)
        throw std::invalid_argument("reconstruct: ambient dimension exceeds coordinate count");
    return D;
}

// every domain of the family whose box can meet the trajectory's bounding box
void materialize(const AmbientTrajectory& y, const SchemeParams& sp, std::vector<Domain>& out) {
    std::vector<double> lo(sp.dim), hi(sp.dim);
    for (int c = 0; c < sp.dim; ++c) {
        auto r = y.coord_range(c);
        lo[c] = r.first;
        hi[c] = r.second;
    }
    for (const LatticePoint& z : sp.enumerate(lo, hi)) out.push_back(sp.make_domain(z));
}

PiecewiseLinearPath polygonal_trace(const AmbientTrajectory& y, const RouteWord& route) {
    if (route.entries.empty()) throw std::logic_error("reconstruct: route word is empty");
    std::vector<double> ts;
    std::vector<std::vector<double>> pts;
    for (const RouteEntry& e : route.entries) {
        ts.push_back(e.entry_time);
        pts.push_back(route.domains[e.domain].center);
    }
    double tend = y.times.back();
    if (tend > ts.back()) {  // constant tail after the last entry
        ts.push_back(tend);
        pts.push_back(pts.back());
    }
    return PiecewiseLinearPath(std::move(ts), std::move(pts));
}

std::vector<double> time_grid(const AmbientTrajectory& y, const PiecewiseLinearPath& q,
                              int samples) {
    double t0 = y.times.front(), t1 = y.times.back();
    std::vector<double> grid;
    for (int k = 0; k <= samples; ++k)
        grid.push_back(t0 + (t1 - t0) * static_cast<double>(k) / samples);
    grid.insert(grid.end(), y.times.begin(), y.times.end());
    grid.insert(grid.end(), q.times().begin(), q.times().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

ReconstructionResult finish(const AmbientTrajectory& y, SchemeStack st) {
    ReconstructionResult res;
    res.route = extract_route(y, st.schemes, true);
    res.polygonal = polygonal_trace(y, res.route);
    res.bound = 68.0 * std::pow(static_cast<double>(st.ambient_dim), 1.5) * st.eps;

    std::vector<double> grid = time_grid(y, res.polygonal, 4096);
    std::vector<std::vector<double>> xs, ys;
    xs.reserve(grid.size());
    ys.reserve(grid.size());
    for (double t : grid) {
        xs.push_back(res.polygonal.eval(t));
        ys.push_back(y.eval(t));
        res.sup_error = std::max(res.sup_error, euclid_dist(xs.back(), ys.back()));
    }
    // the matching distance is quadratic in the sample count, so thin the grid
    std::vector<std::vector<double>> xs_t, ys_t;
    std::size_t stride = std::max<std::size_t>(1, grid.size() / 512);
    for (std::size_t i = 0; i < grid.size(); i += stride) {
        xs_t.push_back(xs[i]);
        ys_t.push_back(ys[i]);
    }
    xs_t.push_back(xs.back());
    ys_t.push_back(ys.back());
    res.d_metric = reparam_distance_points(xs_t, ys_t);
    res.stack = std::move(st);
    return res;
}

}  // namespace

SchemeStack build_scheme_stack(const AmbientTrajectory& y, double eps, int ambient_dim) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_scheme_stack: eps must be positive");
    SchemeStack st;
    st.eps = eps;
    st.ambient_dim = resolve_dim(y, ambient_dim);
    double upper = eps;
    for (int i = 1; i <= st.ambient_dim; ++i) {
        SchemeParams sp;
        sp.dim = y.dim;
        sp.eps = eps;
        sp.level = y.dim - i + 1;
        if (i == 1) {
            sp.kind = SchemeParams::Cube;
        } else {
            sp.kind = SchemeParams::Hull;
            sp.delta_outer = st.deltas.back();
        }
        DeltaSelection sel = select_delta(y, sp, upper, /*require_origin_start=*/i == 1,
                                          st.ambient_dim);
        sp.delta = sel.delta;
        st.deltas.push_back(sel.delta);
        st.schemes.push_back(sp);
        st.selections.push_back(std::move(sel));
        upper = st.deltas.back();
    }
    std::vector<Domain> all;
    for (const SchemeParams& sp : st.schemes) materialize(y, sp, all);
    DisjointReport rep = validate_disjoint(all);
    if (!rep.ok)
        throw std::logic_error("build_scheme_stack: closures of " + all[rep.a].z.str() + " and " +
                               all[rep.b].z.str() + " intersect");
    return st;
}

ReconstructionResult reconstruct_polygonal(const AmbientTrajectory& y, double eps,
                                           int ambient_dim) {
    return finish(y, build_scheme_stack(y, eps, ambient_dim));
}

ReconstructionResult naive_reconstruct(const AmbientTrajectory& y, double eps, double delta,
                                       int ambient_dim) {
    if (!(delta > 0.0 && delta < eps))
        throw std::invalid_argument("naive_reconstruct: need 0 < delta < eps");
    SchemeStack st;
    st.eps = eps;
    st.ambient_dim = resolve_dim(y, ambient_dim);
    SchemeParams sp;
    sp.kind = SchemeParams::Cube;
    sp.dim = y.dim;
    sp.eps = eps;
    sp.delta = delta;
    sp.level = y.dim;
    st.deltas = {delta};
    st.schemes = {sp};
    return finish(y, std::move(st));
}

ExcursionReport check_excursion_bound(const AmbientTrajectory& y, const SchemeStack& stack) {
    ExcursionReport rep;
    rep.threshold = 33.0 * std::pow(static_cast<double>(stack.ambient_dim), 1.5) * stack.eps;
    SpanScan sc = domain_spans(y, stack.schemes);
    for (const DomainSpan& span : sc.spans) {
        if (span.domain >= 0) continue;
        // candidate extremal times: span ends, trajectory breakpoints inside,
        // per-coordinate critical points, plus a uniform fill
        std::vector<double> ts{span.begin, span.end};
        for (double t : y.times)
            if (t > span.begin && t < span.end) ts.push_back(t);
        for (int seg = 0; seg < y.segments(); ++seg) {
            double s0 = y.times[seg];
            double a = std::max(s0, span.begin), b = std::min(y.times[seg + 1], span.end);
            if (!(b > a)) continue;
            for (int c = 0; c < y.dim; ++c)
                if (y.polys[seg][c].size() > 2)
                    for (double u : poly_roots_in(poly_derivative(y.polys[seg][c]), a - s0, b - s0))
                        ts.push_back(s0 + u);
        }
        for (int k = 1; k < 32; ++k)
            ts.push_back(span.begin + (span.end - span.begin) * k / 32.0);
        std::vector<std::vector<double>> pts;
        pts.reserve(ts.size());
        for (double t : ts) pts.push_back(y.eval(t));
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                double d = euclid_dist(pts[i], pts[j]);
                if (d > rep.worst) {
                    rep.worst = d;
                    rep.witness_s = std::min(ts[i], ts[j]);
                    rep.witness_t = std::max(ts[i], ts[j]);
                }
            }
    }
    rep.ok = rep.worst < rep.threshold;
    return rep;
}

}  // namespace sigre
