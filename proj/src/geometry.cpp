#include "sigre/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "sigre/lifted_path.hpp"
#include "sigre/polyroot.hpp"
#include "sigre/words.hpp"

namespace sigre {

int LatticePoint::level() const {
    int n = 0;
    for (int m : doubled)
        if (m % 2 == 0) ++n;
    return n;
}

bool LatticePoint::is_origin() const {
    for (int m : doubled)
        if (m != 0) return false;
    return true;
}

std::string LatticePoint::str() const {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < doubled.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%g", 0.5 * doubled[i]);
        if (i) s += ",";
        s += buf;
    }
    return s + ")";
}

long long doubled_dist_sq(const LatticePoint& a, const LatticePoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("doubled_dist_sq: dimension mismatch");
    long long s = 0;
    for (int i = 0; i < a.dim(); ++i) {
        long long d = a.doubled[i] - b.doubled[i];
        s += d * d;
    }
    return s;
}

std::vector<double> AmbientTrajectory::eval(double t) const {
    if (segments() < 1) throw std::logic_error("empty trajectory");
    t = std::min(std::max(t, times.front()), times.back());
    int seg = static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
    seg = std::min(std::max(seg, 0), segments() - 1);
    double u = t - times[seg];
    std::vector<double> a(dim);
    for (int c = 0; c < dim; ++c) a[c] = poly_eval(polys[seg][c], u);
    return a;
}

double AmbientTrajectory::coord_eval(int seg, int c, double u) const {
    return poly_eval(polys[seg][c], u);
}

std::pair<double, double> AmbientTrajectory::seg_coord_range(int seg, int c) const {
    const std::vector<double>& p = polys[seg][c];
    double ulen = times[seg + 1] - times[seg];
    double lo = poly_eval(p, 0.0), hi = lo;
    auto take = [&](double u) {
        double v = poly_eval(p, u);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    take(ulen);
    if (p.size() > 2)
        for (double u : poly_roots_in(poly_derivative(p), 0.0, ulen)) take(u);
    return {lo, hi};
}

std::pair<double, double> AmbientTrajectory::coord_range(int c) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int s = 0; s < segments(); ++s) {
        auto [a, b] = seg_coord_range(s, c);
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    return {lo, hi};
}

AmbientTrajectory AmbientTrajectory::from_pl(const PiecewiseLinearPath& x) {
    AmbientTrajectory y;
    y.dim = x.dim();
    y.times = x.times();
    y.frozen.assign(y.dim, true);
    const std::vector<double>& p0 = x.points().front();
    y.polys.resize(x.segments());
    for (int s = 0; s < x.segments(); ++s) {
        std::vector<double> v = x.velocity(s);
        y.polys[s].resize(y.dim);
        for (int c = 0; c < y.dim; ++c) {
            y.polys[s][c] = {x.points()[s][c] - p0[c], v[c]};
            if (v[c] != 0.0) y.frozen[c] = false;
        }
    }
    return y;
}

AmbientTrajectory AmbientTrajectory::from_lifted(const PiecewiseLinearPath& x, int degree) {
    int d = x.dim();
    AmbientTrajectory y;
    y.dim = static_cast<int>(flat_word_count(d, degree));
    y.times = x.times();
    y.frozen.assign(y.dim, false);
    y.frozen[0] = true;  // unit coordinate, offset to 0
    std::vector<TruncatedTensor> vs = vertex_signatures(x, degree);
    y.polys.resize(x.segments());
    double fact[16];
    fact[0] = 1.0;
    for (int k = 1; k < 16; ++k) fact[k] = fact[k - 1] * k;
    for (int s = 0; s < x.segments(); ++s) {
        const TruncatedTensor& g = vs[s];
        std::vector<double> v = x.velocity(s);
        y.polys[s].resize(y.dim);
        y.polys[s][0] = {0.0};
        for (int f = 1; f < y.dim; ++f) {
            Word I = flat_word_at(d, f);
            int n = static_cast<int>(I.size());
            // coefficient of u^k: prefix value at the vertex times the straight-run
            // monomial of the last k letters
            std::vector<double> c(n + 1, 0.0);
            double run = 1.0;
            for (int k = 0; k <= n; ++k) {
                Word prefix(I.begin(), I.end() - k);
                c[k] = g.coeff(prefix) * run / fact[k];
                if (k < n) run *= v[I[n - 1 - k] - 1];
            }
            y.polys[s][f] = std::move(c);
        }
    }
    return y;
}

bool Domain::contains(const std::vector<double>& a, bool closed) const {
    if (a.size() != center.size()) throw std::invalid_argument("Domain::contains: dimension mismatch");
    double L = 0.0, U = 1.0;
    for (std::size_t c = 0; c < center.size(); ++c) {
        double d = std::abs(a[c] - center[c]);
        double wa = w_inner[c], wb = w_outer[c];
        if (wa == wb) {
            if (closed ? d > wa : d >= wa) return false;
        } else if (wa > wb) {
            L = std::max(L, (d - wb) / (wa - wb));
        } else {
            U = std::min(U, (wb - d) / (wb - wa));
        }
    }
    return closed ? L <= U : L < U;
}

bool Domain::box_like() const { return w_inner == w_outer; }

double SchemeParams::w_int() const { return kind == HalfInt ? 0.5 - delta : 0.5 * (eps - delta); }
double SchemeParams::w_half() const { return kind == HalfInt ? 0.5 * delta : 0.25 * delta; }
double SchemeParams::w_int_outer() const { return kind == Hull ? 0.5 * (eps - delta_outer) : w_int(); }
double SchemeParams::w_half_outer() const { return kind == Hull ? 0.25 * delta_outer : w_half(); }

namespace {

void check_params(const SchemeParams& sp) {
    if (sp.dim < 1) throw std::invalid_argument("scheme: dim must be positive");
    if (sp.cylinder_dim < 0 || !(sp.cylinder_bound > 0.0))
        throw std::invalid_argument("scheme: bad cylinder block");
    if (sp.kind == SchemeParams::HalfInt) {
        if (sp.eps != 1.0) throw std::invalid_argument("half-integer scheme is unit scale");
        if (!(sp.delta > 0.0) || !(sp.delta < 0.25))
            throw std::invalid_argument("half-integer scheme needs delta in (0, 1/4)");
        return;
    }
    if (!(sp.eps > 0.0)) throw std::invalid_argument("scheme: eps must be positive");
    if (!(sp.delta > 0.0) || !(sp.delta < sp.eps))
        throw std::invalid_argument("scheme: delta must lie in (0, eps)");
    if (sp.level < 0 || sp.level > sp.dim) throw std::invalid_argument("scheme: bad skeleton level");
    if (sp.kind == SchemeParams::Hull &&
        (sp.delta_outer < sp.delta || !(sp.delta_outer < sp.eps)))
        throw std::invalid_argument("scheme: hull needs delta <= delta_outer < eps");
}

}  // namespace

bool SchemeParams::admits(const LatticePoint& z) const {
    if (z.dim() != dim) return false;
    if (kind == HalfInt) {
        if (z.is_origin()) return true;
        for (int m : z.doubled)
            if (m == 1 || m == -1) return true;
        return false;
    }
    return z.level() == level;
}

Domain SchemeParams::make_domain(const LatticePoint& z) const {
    check_params(*this);
    if (!admits(z)) throw std::invalid_argument("make_domain: lattice point not admitted by scheme");
    Domain dom;
    dom.z = z;
    dom.scheme_level = (kind == HalfInt) ? z.level() : level;
    int n = total_dim();
    dom.center.resize(n);
    dom.w_inner.resize(n);
    dom.w_outer.resize(n);
    for (int c = 0; c < dim; ++c) {
        bool isint = z.doubled[c] % 2 == 0;
        dom.center[c] = eps * z.coord(c);
        dom.w_inner[c] = isint ? w_int() : w_half();
        dom.w_outer[c] = isint ? w_int_outer() : w_half_outer();
    }
    for (int c = dim; c < n; ++c) {
        dom.center[c] = 0.0;
        dom.w_inner[c] = cylinder_bound;
        dom.w_outer[c] = cylinder_bound;
    }
    return dom;
}

std::vector<LatticePoint> SchemeParams::enumerate(const std::vector<double>& lo,
                                                  const std::vector<double>& hi) const {
    check_params(*this);
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
        throw std::invalid_argument("enumerate: box dimension mismatch");
    double wi = std::max(w_int(), w_int_outer());
    double wh = std::max(w_half(), w_half_outer());
    std::vector<std::vector<int>> cand(dim);
    for (int c = 0; c < dim; ++c) {
        auto push = [&](double w, bool even) {
            double a = 2.0 * (lo[c] - w) / eps, b = 2.0 * (hi[c] + w) / eps;
            long long ma = static_cast<long long>(std::ceil(a - 1e-9));
            long long mb = static_cast<long long>(std::floor(b + 1e-9));
            if (mb - ma > 4096) throw std::runtime_error("enumerate: coordinate range too wide");
            for (long long m = ma; m <= mb; ++m)
                if ((((m % 2) + 2) % 2 == 0) == even) cand[c].push_back(static_cast<int>(m));
        };
        push(wi, true);
        push(wh, false);
        std::sort(cand[c].begin(), cand[c].end());
        if (cand[c].empty()) return {};
    }
    std::vector<LatticePoint> out;
    std::vector<int> cur(dim);
    std::uint64_t visited = 0;
    std::function<void(int, int, bool, bool)> rec = [&](int c, int ints, bool halfone, bool allzero) {
        if (++visited > (1ull << 22)) throw std::runtime_error("enumerate: lattice blow-up");
        if (c == dim) {
            bool ok = (kind == HalfInt) ? (allzero || halfone) : (ints == level);
            if (ok) out.push_back(LatticePoint{cur});
            return;
        }
        int remaining = dim - c - 1;
        for (int m : cand[c]) {
            bool even = m % 2 == 0;
            if (kind != HalfInt) {
                int ni = ints + (even ? 1 : 0);
                if (ni > level || ni + remaining < level) continue;
                cur[c] = m;
                rec(c + 1, ni, false, false);
            } else {
                cur[c] = m;
                rec(c + 1, 0, halfone || m == 1 || m == -1, allzero && m == 0);
            }
        }
    };
    rec(0, 0, false, true);
    return out;
}

std::vector<LatticePoint> RouteWord::labels() const {
    std::vector<LatticePoint> w;
    w.reserve(entries.size());
    for (const RouteEntry& e : entries) w.push_back(domains[e.domain].z);
    return w;
}

namespace {

// all local times in [0, ulen] where membership of the segment trace in D can
// switch: coordinate kinks, clamp crossings, and blend-interval collisions
void domain_breakpoints(const AmbientTrajectory& y, int seg, const Domain& D, double ulen,
                        std::vector<double>& us) {
    int n = static_cast<int>(D.center.size());
    std::vector<std::vector<double>> diff(n);
    std::vector<int> iside, hside;
    auto add_roots = [&](std::vector<double> p, double shift) {
        p[0] += shift;
        for (double r : poly_roots_in(p, 0.0, ulen)) us.push_back(r);
    };
    for (int c = 0; c < n; ++c) {
        diff[c] = y.polys[seg][c];
        if (diff[c].empty()) diff[c] = {0.0};
        diff[c][0] -= D.center[c];
        double wa = D.w_inner[c], wb = D.w_outer[c];
        if (wa == wb) {
            add_roots(diff[c], -wa);
            add_roots(diff[c], +wa);
        } else {
            add_roots(diff[c], 0.0);
            add_roots(diff[c], -wa);
            add_roots(diff[c], +wa);
            add_roots(diff[c], -wb);
            add_roots(diff[c], +wb);
            (wa > wb ? iside : hside).push_back(c);
        }
    }
    // lower blend bound meets upper blend bound: (si di - wbi)/Ai = (wbj - sj dj)/Aj
    for (int ci : iside)
        for (int cj : hside) {
            double Ai = D.w_inner[ci] - D.w_outer[ci];
            double Aj = D.w_outer[cj] - D.w_inner[cj];
            std::size_t deg = std::max(diff[ci].size(), diff[cj].size());
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    std::vector<double> p(deg, 0.0);
                    for (std::size_t k = 0; k < diff[ci].size(); ++k) p[k] += Aj * si * diff[ci][k];
                    for (std::size_t k = 0; k < diff[cj].size(); ++k) p[k] += Ai * sj * diff[cj][k];
                    p[0] -= Aj * D.w_outer[ci] + Ai * D.w_outer[cj];
                    add_roots(p, 0.0);
                }
        }
}

struct SpanList {
    std::vector<double> b, e;
    std::vector<int> label;

    void add(double bb, double ee, int k) {
        if (!label.empty() && label.back() == k &&
            std::abs(bb - e.back()) <= 1e-12 * (1.0 + std::abs(bb))) {
            e.back() = ee;
            return;
        }
        b.push_back(bb);
        e.push_back(ee);
        label.push_back(k);
    }
};

// start_index >= 0 pins the first span to that box, kOriginStart requires the
// all-integer origin domain, kFreeStart accepts anything (possibly no entry).
constexpr int kOriginStart = -1;
constexpr int kFreeStart = -2;

RouteWord scan_route(const AmbientTrajectory& y,
                     const std::function<std::vector<int>(int, const std::vector<double>&,
                                                          const std::vector<double>&)>& cands_for,
                     std::vector<Domain>& grown, int start_index, SpanList* keep = nullptr) {
    if (y.segments() < 1) throw std::invalid_argument("route scan: empty trajectory");
    SpanList spans;
    for (int seg = 0; seg < y.segments(); ++seg) {
        double t0 = y.times[seg], t1 = y.times[seg + 1];
        double ulen = t1 - t0;
        std::vector<double> lo(y.dim), hi(y.dim);
        for (int c = 0; c < y.dim; ++c) {
            auto [a, b] = y.seg_coord_range(seg, c);
            lo[c] = a;
            hi[c] = b;
        }
        std::vector<int> cand = cands_for(seg, lo, hi);
        std::vector<double> us;
        for (int k : cand) domain_breakpoints(y, seg, grown[k], ulen, us);
        std::sort(us.begin(), us.end());
        double tol_u = 1e-13 * std::max(ulen, 1e-12);
        std::vector<double> vs{0.0};
        for (double u : us)
            if (u - vs.back() > tol_u && ulen - u > tol_u) vs.push_back(u);
        vs.push_back(ulen);
        std::vector<double> a(y.dim);
        for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
            double um = 0.5 * (vs[i] + vs[i + 1]);
            for (int c = 0; c < y.dim; ++c) a[c] = y.coord_eval(seg, c, um);
            int label = -1;
            for (int k : cand) {
                if (!grown[k].contains(a)) continue;
                if (label >= 0)
                    throw std::logic_error("route scan: point inside two domains (" +
                                           grown[label].z.str() + " and " + grown[k].z.str() + ")");
                label = k;
            }
            double babs = (i == 0) ? t0 : t0 + vs[i];
            double eabs = (i + 2 == vs.size()) ? t1 : t0 + vs[i + 1];
            spans.add(babs, eabs, label);
        }
    }
    if (keep) *keep = spans;
    RouteWord rw;
    rw.domains = grown;
    if (start_index != kFreeStart) {
        if (spans.label.empty() || spans.label.front() < 0)
            throw std::invalid_argument("route scan: trajectory does not start inside a domain");
        int first = spans.label.front();
        if (start_index >= 0) {
            if (first != start_index)
                throw std::invalid_argument("route scan: trajectory does not start in the designated box");
        } else if (!rw.domains[first].z.is_origin()) {
            throw std::invalid_argument("route scan: trajectory does not start in the origin domain");
        }
    }
    int last_occ = -1;
    for (std::size_t i = 0; i < spans.label.size(); ++i) {
        int k = spans.label[i];
        if (k < 0 || k == last_occ) continue;
        RouteEntry ent;
        ent.domain = k;
        ent.entry_time = spans.b[i];
        ent.occ_begin = spans.b[i];
        ent.occ_end = spans.e[i];
        rw.entries.push_back(ent);
        last_occ = k;
    }
    return rw;
}

RouteWord scheme_scan(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes,
                      int start_index, SpanList* keep) {
    if (schemes.empty()) throw std::invalid_argument("extract_route: no schemes");
    for (const SchemeParams& sp : schemes) {
        check_params(sp);
        if (sp.total_dim() != y.dim)
            throw std::invalid_argument("extract_route: scheme dimension mismatch");
    }
    std::vector<Domain> grown;
    std::map<std::pair<int, std::vector<int>>, int> index;
    auto cands = [&](int, const std::vector<double>& lo, const std::vector<double>& hi) {
        std::vector<int> out;
        for (std::size_t si = 0; si < schemes.size(); ++si) {
            const SchemeParams& sp = schemes[si];
            std::vector<double> lo_h(lo.begin(), lo.begin() + sp.dim);
            std::vector<double> hi_h(hi.begin(), hi.begin() + sp.dim);
            for (LatticePoint& z : sp.enumerate(lo_h, hi_h)) {
                auto key = std::make_pair(static_cast<int>(si), z.doubled);
                auto it = index.find(key);
                int id;
                if (it == index.end()) {
                    id = static_cast<int>(grown.size());
                    grown.push_back(sp.make_domain(z));
                    index.emplace(key, id);
                } else {
                    id = it->second;
                }
                out.push_back(id);
            }
        }
        return out;
    };
    return scan_route(y, cands, grown, start_index, keep);
}

}  // namespace

RouteWord extract_route(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes,
                        bool require_origin_start) {
    return scheme_scan(y, schemes, require_origin_start ? kOriginStart : kFreeStart, nullptr);
}

SpanScan domain_spans(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes) {
    SpanList sl;
    RouteWord rw = scheme_scan(y, schemes, kFreeStart, &sl);
    SpanScan sc;
    sc.domains = std::move(rw.domains);
    for (std::size_t i = 0; i < sl.label.size(); ++i)
        sc.spans.push_back({sl.b[i], sl.e[i], sl.label[i]});
    return sc;
}

RouteWord extract_route_explicit(const AmbientTrajectory& y, const std::vector<Domain>& boxes,
                                 int start_index) {
    if (boxes.empty()) throw std::invalid_argument("extract_route_explicit: no boxes");
    if (start_index < 0 || start_index >= static_cast<int>(boxes.size()))
        throw std::invalid_argument("extract_route_explicit: bad start index");
    for (const Domain& d : boxes)
        if (static_cast<int>(d.center.size()) != y.dim)
            throw std::invalid_argument("extract_route_explicit: box dimension mismatch");
    std::vector<Domain> grown = boxes;
    auto cands = [&](int, const std::vector<double>& lo, const std::vector<double>& hi) {
        std::vector<int> out;
        for (std::size_t k = 0; k < grown.size(); ++k) {
            const Domain& d = grown[k];
            bool overlap = true;
            for (std::size_t c = 0; c < d.center.size() && overlap; ++c) {
                double w = std::max(d.w_inner[c], d.w_outer[c]) + 1e-12 * (1.0 + std::abs(d.center[c]));
                overlap = (d.center[c] - w <= hi[c]) && (lo[c] <= d.center[c] + w);
            }
            if (overlap) out.push_back(static_cast<int>(k));
        }
        return out;
    };
    return scan_route(y, cands, grown, start_index);
}

DisjointReport validate_disjoint(const std::vector<Domain>& domains) {
    DisjointReport rep;
    rep.margin = -std::numeric_limits<double>::infinity();
    int n = static_cast<int>(domains.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Domain& A = domains[i];
            const Domain& B = domains[j];
            if (A.center.size() != B.center.size())
                throw std::invalid_argument("validate_disjoint: dimension mismatch");
            int dim = static_cast<int>(A.center.size());
            // closed blends meet iff exists (lambda, mu) in [0,1]^2 with
            // lambda*alpha_c + mu*beta_c >= gamma_c for every coordinate
            std::vector<double> alpha(dim), beta(dim), gamma(dim);
            double scale = 1.0;
            bool impossible = false;
            double fixed_slack = std::numeric_limits<double>::infinity();
            for (int c = 0; c < dim; ++c) {
                alpha[c] = A.w_inner[c] - A.w_outer[c];
                beta[c] = B.w_inner[c] - B.w_outer[c];
                gamma[c] = std::abs(A.center[c] - B.center[c]) - A.w_outer[c] - B.w_outer[c];
                scale = std::max({scale, std::abs(alpha[c]), std::abs(beta[c]), std::abs(gamma[c])});
            }
            double tol = 1e-12 * scale;
            for (int c = 0; c < dim; ++c)
                if (alpha[c] == 0.0 && beta[c] == 0.0) {
                    fixed_slack = std::min(fixed_slack, -gamma[c]);
                    if (gamma[c] > tol) impossible = true;
                }
            double best = -std::numeric_limits<double>::infinity();
            if (impossible) {
                best = fixed_slack;  // certainly negative
            } else {
                struct Line {
                    double a, b, r;
                };
                std::vector<Line> lines = {{1, 0, 0}, {1, 0, 1}, {0, 1, 0}, {0, 1, 1}};
                for (int c = 0; c < dim; ++c)
                    if (alpha[c] != 0.0 || beta[c] != 0.0) lines.push_back({alpha[c], beta[c], gamma[c]});
                auto eval_at = [&](double l, double m) {
                    l = std::min(std::max(l, 0.0), 1.0);
                    m = std::min(std::max(m, 0.0), 1.0);
                    double worst = std::numeric_limits<double>::infinity();
                    for (int c = 0; c < dim; ++c)
                        worst = std::min(worst, l * alpha[c] + m * beta[c] - gamma[c]);
                    return worst;
                };
                for (std::size_t p = 0; p < lines.size(); ++p)
                    for (std::size_t q = p + 1; q < lines.size(); ++q) {
                        double det = lines[p].a * lines[q].b - lines[q].a * lines[p].b;
                        if (std::abs(det) < 1e-14 * scale * scale) continue;
                        double l = (lines[p].r * lines[q].b - lines[q].r * lines[p].b) / det;
                        double m = (lines[p].a * lines[q].r - lines[q].a * lines[p].r) / det;
                        if (l < -1e-9 || l > 1 + 1e-9 || m < -1e-9 || m > 1 + 1e-9) continue;
                        best = std::max(best, eval_at(l, m));
                    }
                best = std::max(best, eval_at(0, 0));
                best = std::max(best, eval_at(1, 1));
            }
            if (best > rep.margin) rep.margin = best;
            if (best >= -tol && rep.ok) {
                rep.ok = false;
                rep.a = i;
                rep.b = j;
                rep.margin = best;
                return rep;
            }
        }
    return rep;
}

bool is_subword(const std::vector<LatticePoint>& small, const std::vector<LatticePoint>& big) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < big.size() && i < small.size(); ++j)
        if (small[i] == big[j]) ++i;
    return i == small.size();
}

}  // namespace sigre
