#include "sigre/stability.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "sigre/polyroot.hpp"

namespace sigre {

AdmissibleChainResult stable_quantity(const std::vector<LatticePoint>& word, int D) {
    if (D < 1) throw std::invalid_argument("stable_quantity: dimension must be positive");
    AdmissibleChainResult res;
    int n = static_cast<int>(word.size());
    if (n == 0) return res;
    const long long gap = 16LL * D;  // (2 sqrt(D))^2 in doubled units
    std::vector<int> best(n, 1), prev(n, -1);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < k; ++j)
            if (best[j] + 1 > best[k] && doubled_dist_sq(word[k], word[j]) >= gap) {
                best[k] = best[j] + 1;
                prev[k] = j;
            }
    int arg = 0;
    for (int k = 1; k < n; ++k)
        if (best[k] > best[arg]) arg = k;
    res.length = best[arg];
    for (int k = arg; k >= 0; k = prev[k]) res.witness.push_back(k);
    std::reverse(res.witness.begin(), res.witness.end());
    return res;
}

namespace {

// One containment condition  sum_r mult_r |P_r(t)|  <  wb + wa * delta, with
// each P_r a power-basis polynomial in local segment time.
struct PolyTerm {
    std::vector<double> poly;
    double mult = 1.0;
};
struct Cond {
    std::vector<PolyTerm> parts;
    double wb = 0.0, wa = 0.0;
};

// sign-resolved boundary  P(t) + Ad * delta = 0
struct Variant {
    std::vector<double> P;
    double Ad = 0.0;
};

void axpy(std::vector<double>& acc, double c, const std::vector<double>& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) acc[k] += c * p[k];
}

void expand_variants(const Cond& cond, std::vector<Variant>& out) {
    int n = static_cast<int>(cond.parts.size());
    for (int mask = 0; mask < (1 << n); ++mask) {
        Variant v;
        v.Ad = -cond.wa;
        v.P = {-cond.wb};
        for (int r = 0; r < n; ++r) {
            double s = (mask >> r & 1) ? -1.0 : 1.0;
            axpy(v.P, s * cond.parts[r].mult, cond.parts[r].poly);
        }
        out.push_back(std::move(v));
    }
}

// Entry conditions of one lattice domain against one trajectory segment.  The
// blend parameter of hulls is eliminated, which leaves per-coordinate width
// conditions plus the delta-free diagonal cuts |d_int| + 2 |d_half| < eps/2.
std::vector<Cond> domain_conditions(const AmbientTrajectory& y, int seg, const SchemeParams& sp,
                                    const LatticePoint& z) {
    std::vector<Cond> conds;
    std::vector<PolyTerm> terms(y.dim);
    for (int c = 0; c < y.dim; ++c) {
        std::vector<double> poly = y.polys[seg][c];
        if (poly.empty()) poly = {0.0};
        double center = (c < sp.dim) ? sp.eps * z.coord(c) : 0.0;
        poly[0] -= center;
        terms[c].poly = std::move(poly);
    }
    std::vector<int> ints, halves;
    for (int c = 0; c < sp.dim; ++c)
        (z.doubled[c] % 2 == 0 ? ints : halves).push_back(c);

    auto plain = [&](int c, double wb, double wa) {
        Cond cd;
        cd.parts = {terms[c]};
        cd.wb = wb;
        cd.wa = wa;
        conds.push_back(cd);
    };
    switch (sp.kind) {
        case SchemeParams::Cube:
            for (int c : ints) plain(c, 0.5 * sp.eps, -0.5);
            for (int c : halves) plain(c, 0.0, 0.25);
            break;
        case SchemeParams::HalfInt:
            for (int c : ints) plain(c, 0.5, -1.0);
            for (int c : halves) plain(c, 0.0, 0.5);
            break;
        case SchemeParams::Hull:
            for (int c : ints) plain(c, 0.5 * sp.eps, -0.5);
            for (int c : halves) plain(c, 0.25 * sp.delta_outer, 0.0);
            for (int i : ints)
                for (int j : halves) {
                    Cond cd;
                    cd.parts = {terms[i], terms[j]};
                    cd.parts[1].mult = 2.0;
                    cd.wb = 0.5 * sp.eps;
                    cd.wa = 0.0;
                    conds.push_back(cd);
                }
            break;
    }
    for (int c = sp.dim; c < y.dim; ++c) plain(c, sp.cylinder_bound, 0.0);
    return conds;
}

double eval_phi(const Cond& cd, double t) {
    double s = 0.0;
    for (const PolyTerm& p : cd.parts) s += p.mult * std::abs(poly_eval(p.poly, t));
    return s;
}

}  // namespace

std::vector<double> route_change_thresholds(const AmbientTrajectory& y, SchemeParams family,
                                            double delta_upper, bool require_origin_start) {
    if (!(delta_upper > 0.0))
        throw std::invalid_argument("route_change_thresholds: delta_upper must be positive");
    if (family.kind == SchemeParams::Hull && family.delta_outer < delta_upper)
        throw std::invalid_argument("route_change_thresholds: hull needs delta_outer >= delta_upper");
    if (family.kind == SchemeParams::HalfInt && !(delta_upper < 0.25))
        throw std::invalid_argument("route_change_thresholds: half-integer width must stay below 1/4");
    if (family.kind != SchemeParams::HalfInt && !(delta_upper <= family.eps))
        throw std::invalid_argument("route_change_thresholds: delta_upper must not exceed eps");

    // candidate lattice points: per-coordinate widths are monotone in delta,
    // so the union of the enumerations at the two extreme widths over-covers.
    // The top probe is clamped into the open width interval; that can only
    // drop candidates whose domains appear within 2^-30 eps of the top end,
    // which is far inside the dedup tolerance of the threshold list.
    double top = delta_upper;
    if (family.kind != SchemeParams::HalfInt)
        top = std::min(top, family.eps * (1.0 - 0x1p-30));
    std::vector<std::set<std::vector<int>>> seg_cands(y.segments());
    for (double probe : {delta_upper * 0x1p-40, top}) {
        SchemeParams sp = family;
        sp.delta = probe;
        for (int seg = 0; seg < y.segments(); ++seg) {
            std::vector<double> lo(family.dim), hi(family.dim);
            for (int c = 0; c < family.dim; ++c) {
                auto r = y.seg_coord_range(seg, c);
                lo[c] = r.first;
                hi[c] = r.second;
            }
            for (const LatticePoint& z : sp.enumerate(lo, hi)) seg_cands[seg].insert(z.doubled);
        }
    }

    // every width at which a containment interval can appear solves one of the
    // active-constraint systems below, so this list over-covers the thresholds
    std::vector<double> cands;
    double d_lo = family.eps * 1e-14, d_hi = delta_upper * (1.0 - 1e-12);
    auto push = [&](double d) {
        if (d > d_lo && d < d_hi) cands.push_back(d);
    };
    for (int seg = 0; seg < y.segments(); ++seg) {
        double ulen = y.times[seg + 1] - y.times[seg];
        double tol_t = 1e-9 * std::max(ulen, 1.0);
        for (const std::vector<int>& doubled : seg_cands[seg]) {
            LatticePoint z{doubled};
            std::vector<Cond> conds = domain_conditions(y, seg, family, z);
            std::vector<Variant> vars;
            for (const Cond& cd : conds) {
                std::size_t v0 = vars.size();
                expand_variants(cd, vars);
                if (cd.wa == 0.0) continue;
                // one condition active at a segment endpoint, a kink of the
                // absolute values, or an interior extremum of a branch
                std::vector<double> ts = {0.0, ulen};
                for (const PolyTerm& p : cd.parts)
                    if (p.poly.size() > 1)
                        for (double tk : poly_roots_in(p.poly, 0.0, ulen)) ts.push_back(tk);
                for (std::size_t vi = v0; vi < vars.size(); ++vi)
                    if (vars[vi].P.size() > 2)
                        for (double te : poly_roots_in(poly_derivative(vars[vi].P), 0.0, ulen))
                            ts.push_back(te);
                for (double t : ts) push((eval_phi(cd, t) - cd.wb) / cd.wa);
            }
            // two conditions active at a common time: eliminating delta from
            // the pair of branch boundaries leaves one polynomial in t
            for (std::size_t a = 0; a < vars.size(); ++a)
                for (std::size_t b = a + 1; b < vars.size(); ++b) {
                    double Aa = vars[a].Ad, Ab = vars[b].Ad;
                    if (Aa == 0.0 && Ab == 0.0) continue;
                    std::vector<double> Q;
                    axpy(Q, Ab, vars[a].P);
                    axpy(Q, -Aa, vars[b].P);
                    double qmax = 0.0, pmax = 0.0;
                    for (double c : Q) qmax = std::max(qmax, std::abs(c));
                    for (double c : vars[a].P) pmax = std::max(pmax, std::abs(c));
                    for (double c : vars[b].P) pmax = std::max(pmax, std::abs(c));
                    double scale = (std::abs(Aa) + std::abs(Ab)) * std::max(pmax, 1.0);
                    if (qmax <= 1e-12 * scale) continue;  // parallel boundaries
                    for (double t : poly_roots_in(Q, -tol_t, ulen + tol_t)) {
                        double d = std::abs(Aa) >= std::abs(Ab) ? -poly_eval(vars[a].P, t) / Aa
                                                                : -poly_eval(vars[b].P, t) / Ab;
                        push(d);
                    }
                }
        }
    }
    if (cands.empty()) return {};
    std::sort(cands.begin(), cands.end());
    std::vector<double> merged;
    for (double d : cands)
        if (merged.empty() || d - merged.back() > 1e-11 * delta_upper) merged.push_back(d);

    // Below this cutoff containment intervals shrink under the route scanner's
    // resolution, so a change can be neither confirmed nor denied by probing.
    // Such candidates are reported as-is; the selection layer turns anything
    // under its resolution floor into a diagnostic failure.
    double vcut = delta_upper * 0x1p-28;
    std::vector<double> out;
    std::size_t i0 = 0;
    while (i0 < merged.size() && merged[i0] <= vcut) out.push_back(merged[i0++]);
    if (i0 == merged.size()) return out;

    // keep only candidates across which the route word actually changes
    auto word_at = [&](double d) {
        SchemeParams sp = family;
        sp.delta = d;
        return extract_route(y, {sp}, require_origin_start).labels();
    };
    std::vector<LatticePoint> left = word_at(0.5 * (vcut + merged[i0]));
    for (std::size_t i = i0; i < merged.size(); ++i) {
        double hi = (i + 1 < merged.size()) ? merged[i + 1] : delta_upper;
        std::vector<LatticePoint> right = word_at(0.5 * (merged[i] + hi));
        if (right != left) out.push_back(merged[i]);
        left = std::move(right);
    }
    return out;
}

DeltaSelection select_delta(const AmbientTrajectory& y, SchemeParams family, double delta_upper,
                            bool require_origin_start, int ambient_dim) {
    DeltaSelection sel;
    sel.level = family.level;
    sel.thresholds = route_change_thresholds(y, family, delta_upper, require_origin_start);
    double floor = delta_upper * 0x1p-40;
    if (!sel.thresholds.empty() && sel.thresholds.front() <= floor)
        throw std::runtime_error("select_delta: route keeps changing below the resolution floor (" +
                                 std::to_string(sel.thresholds.front()) + ")");
    auto sq_at = [&](double d) {
        SchemeParams sp = family;
        sp.delta = d;
        return extract_route(y, {sp}, require_origin_start).labels();
    };
    // route word on (0, t_1) is certified constant, so probing the midpoint
    // gives the all-the-way-down value of the chain quantity
    double first = sel.thresholds.empty() ? delta_upper : sel.thresholds.front();
    sel.word = sq_at(0.5 * first);
    sel.sq = stable_quantity(sel.word, ambient_dim).length;
    sel.sup = delta_upper;
    for (std::size_t j = 0; j < sel.thresholds.size(); ++j) {
        double hi = (j + 1 < sel.thresholds.size()) ? sel.thresholds[j + 1] : delta_upper;
        int s = stable_quantity(sq_at(0.5 * (sel.thresholds[j] + hi)), ambient_dim).length;
        if (s != sel.sq) {
            sel.sup = sel.thresholds[j];
            break;
        }
    }
    sel.delta = 0.5 * sel.sup;
    return sel;
}

}  // namespace sigre
