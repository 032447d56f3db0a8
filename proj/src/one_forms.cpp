#include "sigre/one_forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "sigre/lifted_path.hpp"
#include "sigre/polyroot.hpp"
#include "sigre/quadrature.hpp"

namespace sigre {

namespace {

// power-basis coefficients of the order-(2a+1) smoothstep and the matching
// normalization (2a+1)!/(a!)^2, so S' = norm x^a (1-x)^a
struct StepPoly {
    std::vector<double> coef;
    double norm = 1.0;
};

const StepPoly& step_poly(int alpha) {
    static std::map<int, StepPoly> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
    if (alpha < 0 || alpha > 12) throw std::invalid_argument("smoothstep: alpha out of range");
    StepPoly sp;
    double norm = 1.0;  // (2a+1)! / (a! a!)
    for (int k = 1; k <= alpha; ++k) norm *= static_cast<double>(alpha + k) / k;
    norm *= 2 * alpha + 1;
    sp.norm = norm;
    sp.coef.assign(2 * alpha + 2, 0.0);
    double binom = 1.0;
    for (int k = 0; k <= alpha; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sp.coef[alpha + 1 + k] = norm * sign * binom / (alpha + 1 + k);
        binom = binom * (alpha - k) / (k + 1);
    }
    return cache.emplace(alpha, std::move(sp)).first->second;
}

}  // namespace

double smoothstep(int alpha, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return poly_eval(step_poly(alpha).coef, x);
}

double smoothstep_deriv(int alpha, double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const StepPoly& sp = step_poly(alpha);
    return sp.norm * std::pow(x, alpha) * std::pow(1.0 - x, alpha);
}

namespace {

// plateau profile of one coordinate and its derivative
inline void coord_profile(double x, double lo, double hi, double m, int alpha, double& p,
                          double& dp) {
    if (m <= 0.0) {  // hard indicator (record-only boxes)
        p = (x >= lo && x <= hi) ? 1.0 : 0.0;
        dp = 0.0;
        return;
    }
    double xl = (x - lo + m) / m;
    double xr = (hi + m - x) / m;
    double pl = smoothstep(alpha, xl), pr = smoothstep(alpha, xr);
    p = pl * pr;
    dp = (smoothstep_deriv(alpha, xl) * pr - pl * smoothstep_deriv(alpha, xr)) / m;
}

}  // namespace

double BumpBox::value(const std::vector<double>& a, int alpha) const {
    double p, dp, out = 1.0;
    for (int c = 0; c < dim(); ++c) {
        coord_profile(a[c], lo[c], hi[c], margin, alpha, p, dp);
        if (p == 0.0) return 0.0;
        out *= p;
    }
    return out;
}

double BumpBox::grad_dot(const std::vector<double>& a, int alpha,
                         const std::vector<double>& da) const {
    const int n = dim();
    thread_local std::vector<double> p, dp, suf;
    p.resize(n);
    dp.resize(n);
    suf.resize(n + 1);
    for (int c = 0; c < n; ++c) coord_profile(a[c], lo[c], hi[c], margin, alpha, p[c], dp[c]);
    suf[n] = 1.0;
    for (int c = n - 1; c >= 0; --c) suf[c] = suf[c + 1] * p[c];
    double pre = 1.0, acc = 0.0;
    for (int c = 0; c < n; ++c) {
        acc += pre * dp[c] * da[c] * suf[c + 1];
        pre *= p[c];
        if (pre == 0.0) break;  // all later terms carry the zero prefix
    }
    return acc;
}

void PolynomialOneForm::validate() const {
    if (base_dim < 1 || degree < 1)
        throw std::invalid_argument("polynomial one-form: base_dim and degree must be >= 1");
    auto check_word = [&](const Word& w, const char* what) {
        if (w.empty() || static_cast<int>(w.size()) > degree)
            throw std::invalid_argument(std::string("polynomial one-form: ") + what +
                                        " word length outside [1, degree]");
        for (int letter : w)
            if (letter < 1 || letter > base_dim)
                throw std::invalid_argument(std::string("polynomial one-form: ") + what +
                                            " letter out of range");
    };
    for (const PolyTerm& t : terms) {
        check_word(t.target, "target");
        for (const Word& J : t.monomial) check_word(J, "factor");
    }
}

int PolynomialOneForm::demand() const {
    int best = 0;
    for (const PolyTerm& t : terms) {
        int len = static_cast<int>(t.target.size());
        for (const Word& J : t.monomial) len += static_cast<int>(J.size());
        best = std::max(best, len);
    }
    return best;
}

double PolynomialOneForm::eval(const std::vector<double>& a, const std::vector<double>& da) const {
    double out = 0.0;
    for (const PolyTerm& t : terms) {
        double v = t.coeff * da[flat_word_index(base_dim, t.target)];
        for (const Word& J : t.monomial) {
            if (v == 0.0) break;
            v *= a[flat_word_index(base_dim, J)];
        }
        out += v;
    }
    return out;
}

void PolynomialOneForm::check_dim(int ambient_dim) const {
    validate();
    if (flat_word_count(base_dim, degree) != ambient_dim)
        throw std::invalid_argument(
            "polynomial one-form: degree mismatch with the lifted trajectory (expected ambient "
            "dimension " +
            std::to_string(flat_word_count(base_dim, degree)) + ", trajectory has " +
            std::to_string(ambient_dim) + ")");
}

double BumpOneForm::F(const std::vector<double>& a) const {
    double out = 1.0;
    for (const BumpBox& b : u1) out *= 1.0 - b.value(a, alpha);
    for (const Ramp& r : ramps) out *= smoothstep(alpha, (a[r.c] - r.r0) / (r.r1 - r.r0));
    return out;
}

double BumpOneForm::G(const std::vector<double>& a) const {
    double miss = 1.0;
    for (const BumpBox& b : v1) {
        miss *= 1.0 - b.value(a, alpha);
        if (miss == 0.0) break;
    }
    return 1.0 - miss;
}

double BumpOneForm::eval(const std::vector<double>& a, const std::vector<double>& da) const {
    double g = G(a);
    if (g == 0.0) return 0.0;
    const int nf = static_cast<int>(u1.size() + ramps.size());
    thread_local std::vector<double> fv, fd;
    fv.resize(nf);
    fd.resize(nf);
    int k = 0;
    for (const BumpBox& b : u1) {
        fv[k] = 1.0 - b.value(a, alpha);
        fd[k] = -b.grad_dot(a, alpha, da);
        ++k;
    }
    for (const Ramp& r : ramps) {
        double w = r.r1 - r.r0;
        double arg = (a[r.c] - r.r0) / w;
        fv[k] = smoothstep(alpha, arg);
        fd[k] = smoothstep_deriv(alpha, arg) * da[r.c] / w;
        ++k;
    }
    thread_local std::vector<double> sufv;
    sufv.resize(nf + 1);
    sufv[nf] = 1.0;
    for (int i = nf - 1; i >= 0; --i) sufv[i] = sufv[i + 1] * fv[i];
    double pre = 1.0, dot = 0.0;
    for (int i = 0; i < nf; ++i) {
        dot += pre * fd[i] * sufv[i + 1];
        pre *= fv[i];
    }
    return g * dot;
}

void BumpOneForm::check_dim(int ambient_dim) const {
    auto boxes_ok = [&](const std::vector<BumpBox>& bs) {
        for (const BumpBox& b : bs)
            if (b.dim() != ambient_dim || b.hi.size() != b.lo.size())
                throw std::invalid_argument("bump one-form: box dimension mismatch");
    };
    boxes_ok(u1);
    boxes_ok(u2);
    boxes_ok(v1);
    boxes_ok(v2);
    for (const Ramp& r : ramps)
        if (r.c < 0 || r.c >= ambient_dim || !(r.r1 > r.r0))
            throw std::invalid_argument("bump one-form: bad ramp");
    if (!support.center.empty() && static_cast<int>(support.center.size()) != ambient_dim)
        throw std::invalid_argument("bump one-form: support dimension mismatch");
    if (alpha < 1) throw std::invalid_argument("bump one-form: alpha must be >= 1");
}

namespace {

bool poly_is_constant(const std::vector<double>& p) {
    for (size_t i = 1; i < p.size(); ++i)
        if (p[i] != 0.0) return false;
    return true;
}

void add_threshold_knots(const AmbientTrajectory& y, int c, double thr, std::vector<double>& out) {
    for (int s = 0; s < y.segments(); ++s) {
        const std::vector<double>& p = y.polys[s][c];
        if (poly_is_constant(p)) continue;
        std::vector<double> shifted(p);
        shifted[0] -= thr;
        double ulen = y.times[s + 1] - y.times[s];
        for (double u : poly_roots_in(shifted, 0.0, ulen)) out.push_back(y.times[s] + u);
    }
}

}  // namespace

void BumpOneForm::add_knots(const AmbientTrajectory& y, std::vector<double>& out) const {
    auto box_knots = [&](const BumpBox& b) {
        for (int c = 0; c < b.dim(); ++c) {
            add_threshold_knots(y, c, b.lo[c] - b.margin, out);
            add_threshold_knots(y, c, b.lo[c], out);
            add_threshold_knots(y, c, b.hi[c], out);
            add_threshold_knots(y, c, b.hi[c] + b.margin, out);
        }
    };
    for (const BumpBox& b : u1) box_knots(b);
    for (const BumpBox& b : v1) box_knots(b);
    for (const Ramp& r : ramps) {
        add_threshold_knots(y, r.c, r.r0, out);
        add_threshold_knots(y, r.c, r.r1, out);
    }
}

namespace {

// trajectory point/velocity evaluation with cached derivative polynomials
struct TrajEval {
    const AmbientTrajectory& y;
    std::vector<std::vector<std::vector<double>>> dpolys;

    explicit TrajEval(const AmbientTrajectory& yy) : y(yy) {
        dpolys.resize(y.polys.size());
        for (size_t s = 0; s < y.polys.size(); ++s) {
            dpolys[s].resize(y.polys[s].size());
            for (size_t c = 0; c < y.polys[s].size(); ++c)
                dpolys[s][c] = poly_derivative(y.polys[s][c]);
        }
    }

    void point_vel(double t, std::vector<double>& a, std::vector<double>& da) const {
        double t0 = y.times.front(), t1 = y.times.back();
        t = std::clamp(t, t0, t1);
        int seg = static_cast<int>(std::upper_bound(y.times.begin(), y.times.end(), t) -
                                   y.times.begin()) -
                  1;
        seg = std::clamp(seg, 0, y.segments() - 1);
        double u = t - y.times[seg];
        a.resize(y.dim);
        da.resize(y.dim);
        for (int c = 0; c < y.dim; ++c) {
            a[c] = poly_eval(y.polys[seg][c], u);
            da[c] = poly_eval(dpolys[seg][c], u);
        }
    }
};

// the level recursion over one fixed partition: h_j at the interior nodes of a
// cell comes from the degree-(q-1) interpolant's antiderivative
double esig_on_cells(const TrajEval& te, const std::vector<const OneForm*>& forms,
                     const std::vector<double>& pts, int q) {
    const GaussLegendre& gl = gauss_legendre(q);
    const int n = static_cast<int>(forms.size());
    std::vector<double> H(n + 1, 0.0);
    H[0] = 1.0;
    std::vector<double> a, da, xs(q), f(q), hnode(q);
    std::vector<std::vector<double>> phi(n, std::vector<double>(q));
    for (size_t ci = 0; ci + 1 < pts.size(); ++ci) {
        double lo = pts[ci], hi = pts[ci + 1];
        if (!(hi > lo)) continue;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < q; ++i) {
            xs[i] = mid + half * gl.nodes[i];
            te.point_vel(xs[i], a, da);
            for (int j = 0; j < n; ++j) phi[j][i] = forms[j]->eval(a, da);
        }
        std::vector<double> Hnew = H;
        std::fill(hnode.begin(), hnode.end(), 1.0);  // h_0
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < q; ++i) f[i] = hnode[i] * phi[j][i];
            CellAntiderivative A(lo, hi, f);
            for (int i = 0; i < q; ++i) hnode[i] = H[j + 1] + A(xs[i]);
            Hnew[j + 1] = H[j + 1] + A.full();
        }
        H.swap(Hnew);
    }
    return H[n];
}

}  // namespace

double extended_signature_quadrature(const AmbientTrajectory& y,
                                     const std::vector<const OneForm*>& forms, int quad_order) {
    if (y.segments() < 1) throw std::invalid_argument("extended signature: empty trajectory");
    if (quad_order < 4 || quad_order > 32)
        throw std::invalid_argument("extended signature: quad order out of range");
    for (const OneForm* f : forms) f->check_dim(y.dim);
    if (forms.empty()) return 1.0;
    TrajEval te(y);
    double t0 = y.times.front(), t1 = y.times.back();
    std::vector<double> seeds = y.times;
    for (const OneForm* f : forms) f->add_knots(y, seeds);
    std::sort(seeds.begin(), seeds.end());
    std::vector<double> uniq;
    double res = 1e-14 * (t1 - t0);
    for (double s : seeds) {
        if (s < t0 || s > t1) continue;
        if (uniq.empty() || s - uniq.back() > res) uniq.push_back(s);
    }
    if (uniq.empty() || uniq.front() != t0) uniq.insert(uniq.begin(), t0);
    if (uniq.back() < t1) uniq.push_back(t1);

    std::vector<std::function<double(double)>> fs;
    fs.reserve(forms.size());
    for (const OneForm* f : forms)
        fs.emplace_back([&te, f](double t) {
            thread_local std::vector<double> a, da;
            te.point_vel(t, a, da);
            return f->eval(a, da);
        });
    std::vector<double> pts = adaptive_cells(fs, uniq, quad_order, 1e-11, 12);

    double I = esig_on_cells(te, forms, pts, quad_order);
    for (int round = 0; round < 3; ++round) {
        std::vector<double> pts2;
        pts2.reserve(2 * pts.size());
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            pts2.push_back(pts[i]);
            pts2.push_back(0.5 * (pts[i] + pts[i + 1]));
        }
        pts2.push_back(pts.back());
        double I2 = esig_on_cells(te, forms, pts2, quad_order);
        bool converged = std::abs(I2 - I) <= 1e-10 * std::max(1.0, std::abs(I2));
        I = I2;
        pts.swap(pts2);
        if (converged) break;
    }
    return I;
}

double extended_signature_quadrature(const AmbientTrajectory& y,
                                     const std::vector<PolynomialOneForm>& forms, int quad_order) {
    std::vector<const OneForm*> ptrs;
    for (const auto& f : forms) ptrs.push_back(&f);
    return extended_signature_quadrature(y, ptrs, quad_order);
}

double extended_signature_quadrature(const AmbientTrajectory& y,
                                     const std::vector<BumpOneForm>& forms, int quad_order) {
    std::vector<const OneForm*> ptrs;
    for (const auto& f : forms) ptrs.push_back(&f);
    return extended_signature_quadrature(y, ptrs, quad_order);
}

double polynomial_extended_signature_from_g(const TruncatedTensor& g,
                                            const std::vector<PolynomialOneForm>& forms) {
    if (forms.empty()) return 1.0;
    int demand = 0;
    for (const PolynomialOneForm& f : forms) {
        f.validate();
        if (f.base_dim != g.dim())
            throw std::invalid_argument("polynomial extended signature: base dimension mismatch");
        demand += f.demand();
    }
    if (demand > g.degree())
        throw std::invalid_argument(
            "polynomial extended signature: insufficient signature degree (need " +
            std::to_string(demand) + ", have " + std::to_string(g.degree()) + ")");

    // accumulate words over the E_N alphabet: A_j = (A_{j-1} shuffle U_j) . target
    std::map<std::vector<Word>, double> acc;
    acc[{}] = 1.0;
    for (const PolynomialOneForm& f : forms) {
        std::map<std::vector<Word>, double> next;
        for (const PolyTerm& term : f.terms) {
            if (term.coeff == 0.0) continue;
            std::vector<int> idx(term.monomial.size());
            std::iota(idx.begin(), idx.end(), 0);
            do {
                std::vector<Word> U(idx.size());
                for (size_t i = 0; i < idx.size(); ++i) U[i] = term.monomial[idx[i]];
                for (const auto& [W, c] : acc) {
                    const int mw = static_cast<int>(W.size()), mu = static_cast<int>(U.size());
                    const auto& subs = position_subsets(mw + mu, mw);
                    for (const auto& S : subs) {
                        std::vector<char> used(mw + mu, 0);
                        for (int pos : S) used[pos] = 1;
                        std::vector<Word> V;
                        V.reserve(mw + mu + 1);
                        int wi = 0, ui = 0;
                        for (int p = 0; p < mw + mu; ++p)
                            V.push_back(used[p] ? W[wi++] : U[ui++]);
                        V.push_back(term.target);
                        next[V] += c * term.coeff;
                    }
                }
            } while (std::next_permutation(idx.begin(), idx.end()));
        }
        acc = std::move(next);
    }
    double out = 0.0;
    for (const auto& [W, c] : acc)
        if (c != 0.0) out += c * lifted_coefficient(g, W);
    return out;
}

namespace {

// tight bounding box of the trajectory over [t0, t1]
void sub_bbox(const AmbientTrajectory& y, double t0, double t1, std::vector<double>& lo,
              std::vector<double>& hi) {
    lo.assign(y.dim, std::numeric_limits<double>::infinity());
    hi.assign(y.dim, -std::numeric_limits<double>::infinity());
    for (int s = 0; s < y.segments(); ++s) {
        double u0 = std::max(t0, y.times[s]) - y.times[s];
        double u1 = std::min(t1, y.times[s + 1]) - y.times[s];
        if (u1 < u0) continue;
        for (int c = 0; c < y.dim; ++c) {
            const std::vector<double>& p = y.polys[s][c];
            auto take = [&](double u) {
                double v = poly_eval(p, u);
                lo[c] = std::min(lo[c], v);
                hi[c] = std::max(hi[c], v);
            };
            take(u0);
            take(u1);
            if (!poly_is_constant(p))
                for (double u : poly_roots_in(poly_derivative(p), u0, u1)) take(u);
        }
    }
}

// does the trajectory meet the closed box at some time in [t0, t1]?
bool path_meets_box(const AmbientTrajectory& y, double t0, double t1,
                    const std::vector<double>& lo, const std::vector<double>& hi) {
    if (!(t1 > t0)) return false;
    for (int s = 0; s < y.segments(); ++s) {
        double u0 = std::max(t0, y.times[s]) - y.times[s];
        double u1 = std::min(t1, y.times[s + 1]) - y.times[s];
        if (u1 <= u0) continue;
        std::vector<double> breaks{u0, u1};
        for (int c = 0; c < y.dim; ++c) {
            const std::vector<double>& p = y.polys[s][c];
            if (poly_is_constant(p)) continue;
            for (double thr : {lo[c], hi[c]}) {
                std::vector<double> shifted(p);
                shifted[0] -= thr;
                for (double u : poly_roots_in(shifted, u0, u1)) breaks.push_back(u);
            }
        }
        std::sort(breaks.begin(), breaks.end());
        for (size_t i = 0; i + 1 < breaks.size(); ++i) {
            double mid = 0.5 * (breaks[i] + breaks[i + 1]);
            bool inside = true;
            for (int c = 0; c < y.dim && inside; ++c) {
                double v = poly_eval(y.polys[s][c], mid);
                inside = v >= lo[c] && v <= hi[c];
            }
            if (inside) return true;
        }
    }
    return false;
}

bool core_meets_inflated(const BumpBox& core, const BumpBox& other) {
    for (int c = 0; c < core.dim(); ++c)
        if (core.lo[c] > other.hi[c] + other.margin || core.hi[c] < other.lo[c] - other.margin)
            return false;
    return true;
}

// worst-deviation corner of the inflated box relative to the domain center
std::vector<double> dev_point(const Domain& K, const BumpBox& b) {
    std::vector<double> p(K.center.size());
    for (size_t c = 0; c < K.center.size(); ++c) {
        double d = std::max(b.hi[c] + b.margin - K.center[c], K.center[c] - (b.lo[c] - b.margin));
        p[c] = K.center[c] + std::max(d, 0.0);
    }
    return p;
}

}  // namespace

std::vector<BumpOneForm> build_route_oneforms(const AmbientTrajectory& y, const RouteWord& route,
                                              double margin, int alpha) {
    if (!(margin > 0.0)) throw std::invalid_argument("build_route_oneforms: margin must be > 0");
    if (alpha < 1) throw std::invalid_argument("build_route_oneforms: alpha must be >= 1");
    if (route.entries.empty())
        throw std::invalid_argument("build_route_oneforms: route has no entries");
    for (const Domain& K : route.domains)
        if (static_cast<int>(K.center.size()) != y.dim)
            throw std::invalid_argument("build_route_oneforms: domain dimension mismatch");

    const int E = static_cast<int>(route.entries.size());
    std::vector<double> tau(E + 1);
    for (int k = 0; k < E; ++k) tau[k] = route.entries[k].entry_time;
    tau[E] = y.times.back();

    struct Visit {
        int entry;
        double s, s1, t1, t, tau0, tau1;
    };
    std::vector<std::vector<Visit>> per_domain(route.domains.size());
    for (int k = 0; k < E; ++k) {
        const RouteEntry& e = route.entries[k];
        double w = e.occ_end - e.occ_begin;
        if (!(w > 0.0))
            throw std::runtime_error("build_route_oneforms: entry " + std::to_string(k) +
                                     " has an empty occupancy interval");
        Visit v{k,
                e.occ_begin + 0.15 * w,
                e.occ_begin + 0.30 * w,
                e.occ_begin + 0.70 * w,
                e.occ_begin + 0.85 * w,
                tau[k],
                tau[k + 1]};
        per_domain[e.domain].push_back(v);
    }

    std::vector<BumpOneForm> forms(route.domains.size());
    for (size_t di = 0; di < route.domains.size(); ++di) {
        const Domain& K = route.domains[di];
        BumpOneForm& f = forms[di];
        f.alpha = alpha;
        f.support = K;
        f.name = K.z.doubled.empty() ? "domain#" + std::to_string(di) : "domain " + K.z.str();

        std::vector<double> cb_lo(y.dim), cb_hi(y.dim);
        for (int c = 0; c < y.dim; ++c) {
            double W = std::max(K.w_inner[c], K.w_outer[c]);
            cb_lo[c] = K.center[c] - W;
            cb_hi[c] = K.center[c] + W;
        }
        auto make_core = [&](double a, double b, bool clip) {
            BumpBox bb;
            sub_bbox(y, a, b, bb.lo, bb.hi);
            bb.margin = margin;
            if (clip)
                for (int c = 0; c < y.dim; ++c) {
                    bb.lo[c] = std::max(bb.lo[c], cb_lo[c]);
                    bb.hi[c] = std::min(bb.hi[c], cb_hi[c]);
                    if (bb.hi[c] < bb.lo[c])
                        throw std::runtime_error("build_route_oneforms: " + f.name +
                                                 " tube leg escapes the domain bounding box");
                }
            return bb;
        };
        const std::vector<Visit>& vs = per_domain[di];
        for (const Visit& v : vs) {
            f.u1.push_back(make_core(v.s, v.s1, true));
            f.v1.push_back(make_core(v.s1, v.t1, true));
            f.u2.push_back(make_core(v.t1, v.t, true));
            BumpBox r1, r2;
            sub_bbox(y, v.tau0, v.s, r1.lo, r1.hi);
            sub_bbox(y, v.t, v.tau1, r2.lo, r2.hi);
            f.v2.push_back(r1);
            f.v2.push_back(r2);
        }

        const int nv = static_cast<int>(vs.size());
        char msg[160];
        for (int a = 0; a < nv; ++a) {
            if (!K.contains(dev_point(K, f.v1[a]), false)) {
                std::snprintf(msg, sizeof msg,
                              "%s: inflated V1 of visit #%d escapes the open domain (margin %g)",
                              f.name.c_str(), a, margin);
                throw std::runtime_error(msg);
            }
        }
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                if (core_meets_inflated(f.u2[a], f.u1[b])) {
                    std::snprintf(msg, sizeof msg,
                                  "%s: U2 of visit #%d meets the inflated U1 of visit #%d "
                                  "(margin %g)",
                                  f.name.c_str(), a, b, margin);
                    throw std::runtime_error(msg);
                }
        for (int a = 0; a < nv; ++a) {
            for (int b = 0; b < nv; ++b) {
                BumpBox infl = f.v1[b];
                for (int c = 0; c < y.dim; ++c) {
                    infl.lo[c] -= infl.margin;
                    infl.hi[c] += infl.margin;
                }
                bool hit = path_meets_box(y, vs[a].tau0, vs[a].s, infl.lo, infl.hi) ||
                           path_meets_box(y, vs[a].t, vs[a].tau1, infl.lo, infl.hi);
                if (hit) {
                    std::snprintf(msg, sizeof msg,
                                  "%s: complement leg of visit #%d meets the inflated V1 of "
                                  "visit #%d (margin %g)",
                                  f.name.c_str(), a, b, margin);
                    throw std::runtime_error(msg);
                }
            }
        }
    }
    return forms;
}

namespace {

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next_u64() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double next() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

}  // namespace

BumpOneForm generic_bump_oneform(const Domain& K, int alpha, std::uint64_t seed,
                                 const std::vector<bool>* frozen) {
    const int dim = static_cast<int>(K.center.size());
    if (frozen && static_cast<int>(frozen->size()) != dim)
        throw std::invalid_argument("generic bump: frozen mask dimension mismatch");
    SplitMix rng{seed};
    BumpOneForm f;
    f.alpha = alpha;
    f.support = K;
    f.name = "generic " + (K.z.doubled.empty() ? std::string("domain") : K.z.str()) + " seed " +
             std::to_string(seed);

    BumpBox B;
    B.lo.resize(dim);
    B.hi.resize(dim);
    double min_h = std::numeric_limits<double>::infinity();
    for (int c = 0; c < dim; ++c) {
        double wc = K.w_inner[c];
        if (!(wc > 0.0)) throw std::invalid_argument("generic bump: degenerate domain width");
        if (frozen && (*frozen)[c]) {
            B.lo[c] = K.center[c] - 0.9 * wc;
            B.hi[c] = K.center[c] + 0.9 * wc;
            continue;
        }
        double u0 = rng.next(), u1 = rng.next();
        double mid = K.center[c] + (2.0 * u0 - 1.0) * 0.45 * wc;
        double h = (0.12 + 0.18 * u1) * wc;
        B.lo[c] = mid - h;
        B.hi[c] = mid + h;
        min_h = std::min(min_h, h);
    }
    if (!std::isfinite(min_h)) min_h = 0.3 * K.w_inner[0];  // all coordinates frozen
    B.margin = 0.35 * min_h;
    for (int tries = 0;; ++tries) {
        if (K.contains(dev_point(K, B), false)) break;
        if (tries >= 60)
            throw std::runtime_error("generic bump: failed to fit the seeded box inside " +
                                     (K.z.doubled.empty() ? std::string("the domain") : K.z.str()));
        for (int c = 0; c < dim; ++c) {
            double mid = 0.5 * (B.lo[c] + B.hi[c]);
            B.lo[c] = mid + 0.7 * (B.lo[c] - mid);
            B.hi[c] = mid + 0.7 * (B.hi[c] - mid);
        }
        B.margin *= 0.7;
    }

    std::vector<int> live;
    for (int c = 0; c < dim; ++c)
        if (!frozen || !(*frozen)[c]) live.push_back(c);
    if (live.empty()) throw std::invalid_argument("generic bump: all coordinates frozen");
    int c = live[std::min<std::size_t>(static_cast<std::size_t>(rng.next() * live.size()),
                                       live.size() - 1)];
    double w = B.hi[c] - B.lo[c];
    Ramp r;
    r.c = c;
    r.r0 = B.lo[c] + 0.25 * w;
    r.r1 = B.hi[c] - 0.25 * w;
    f.v1.push_back(B);
    f.ramps.push_back(r);
    return f;
}

RouteVerdict verify_route(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes,
                          const std::vector<LatticePoint>& candidate, double tol, int rounds) {
    if (candidate.empty()) throw std::invalid_argument("verify_route: empty candidate word");
    for (size_t k = 1; k < candidate.size(); ++k)
        if (candidate[k] == candidate[k - 1])
            throw std::invalid_argument("verify_route: immediate repeat in candidate word");
    if (!(tol > 0.0)) throw std::invalid_argument("verify_route: tol must be > 0");
    if (rounds < 1) throw std::invalid_argument("verify_route: rounds must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("verify_route: no schemes");

    std::vector<Domain> doms;
    for (const LatticePoint& z : candidate) {
        const SchemeParams* fam = nullptr;
        for (const SchemeParams& sp : schemes)
            if (sp.total_dim() == y.dim && sp.admits(z)) {
                fam = &sp;
                break;
            }
        if (!fam)
            throw std::invalid_argument("verify_route: letter " + z.str() +
                                        " is not admissible in any scheme");
        doms.push_back(fam->make_domain(z));
    }

    RouteVerdict out;
    auto consider = [&](double val, const std::vector<BumpOneForm>& seq, const char* kind) {
        double m = std::abs(val);
        if (m > out.magnitude) out.magnitude = m;
        if (m > tol && out.chi == 0) {
            out.chi = 1;
            out.witness = seq;
            out.witness_kind = kind;
        }
    };

    RouteWord route = extract_route(y, schemes, false);
    if (route.labels() == candidate) {
        double w = std::numeric_limits<double>::infinity();
        for (const Domain& K : route.domains)
            for (double wi : K.w_inner)
                if (wi > 0.0) w = std::min(w, wi);
        double frac = 0.25;
        for (int tries = 0; tries < 12 && out.chi == 0; ++tries, frac *= 0.5) {
            std::vector<BumpOneForm> per_domain;
            try {
                per_domain = build_route_oneforms(y, route, frac * w);
            } catch (const std::runtime_error&) {
                continue;
            }
            std::vector<BumpOneForm> seq;
            for (const RouteEntry& e : route.entries) seq.push_back(per_domain[e.domain]);
            consider(extended_signature_quadrature(y, seq), seq, "route-construction");
            break;
        }
    }

    if (out.chi == 0) {
        for (int r = 0; r < rounds && out.chi == 0; ++r) {
            std::vector<BumpOneForm> seq;
            for (size_t k = 0; k < candidate.size(); ++k) {
                std::uint64_t h = 1469598103934665603ULL;
                auto absorb = [&h](std::uint64_t v) {
                    h ^= v;
                    h *= 1099511628211ULL;
                };
                absorb(static_cast<std::uint64_t>(r) + 1);
                absorb(static_cast<std::uint64_t>(k) + 101);
                for (int d : candidate[k].doubled)
                    absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(d)) + 0x8000);
                seq.push_back(generic_bump_oneform(doms[k], 2, h, &y.frozen));
            }
            consider(extended_signature_quadrature(y, seq), seq, "generic-bump");
        }
    }
    return out;
}

}  // namespace sigre
