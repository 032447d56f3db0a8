#pragma once

#include <string>
#include <vector>

#include "sigre/path_model.hpp"
#include "sigre/tensor_algebra.hpp"

namespace sigre {

// Point on the half-integer lattice.  Coordinates are stored doubled, so even
// entries are the integer coordinates and odd entries the half-integers.
struct LatticePoint {
    std::vector<int> doubled;

    int dim() const { return static_cast<int>(doubled.size()); }
    double coord(int i) const { return 0.5 * doubled[i]; }
    int level() const;  // number of integer coordinates
    bool is_origin() const;
    std::string str() const;

    bool operator==(const LatticePoint& o) const { return doubled == o.doubled; }
    bool operator<(const LatticePoint& o) const { return doubled < o.doubled; }
};

// squared Euclidean distance in lattice units, times 4 (exact integer)
long long doubled_dist_sq(const LatticePoint& a, const LatticePoint& b);

// Piecewise-polynomial trajectory in an ambient Euclidean space, expressed in
// offset coordinates (so it starts at the origin when the source path does).
struct AmbientTrajectory {
    int dim = 0;
    std::vector<bool> frozen;   // coordinate constant along the whole trajectory
    std::vector<double> times;  // m+1 breakpoints
    // polys[s][c]: power-basis coefficients in local time u = t - times[s]
    std::vector<std::vector<std::vector<double>>> polys;

    int segments() const { return static_cast<int>(times.size()) - 1; }
    std::vector<double> eval(double t) const;
    double coord_eval(int seg, int c, double u) const;
    // tight coordinate range over one segment (via critical points)
    std::pair<double, double> seg_coord_range(int seg, int c) const;
    std::pair<double, double> coord_range(int c) const;

    // the path itself as a trajectory (offset by its start point)
    static AmbientTrajectory from_pl(const PiecewiseLinearPath& x);
    // the truncated signature path in E_N, offset by the unit; coordinates in
    // flat word order (index 0 = empty word, frozen at 0)
    static AmbientTrajectory from_lifted(const PiecewiseLinearPath& x, int degree);
};

// One open domain: the convex hull of two concentric axis boxes (equal widths
// degenerate to a plain box).  Membership is the lambda-blend feasibility test.
struct Domain {
    LatticePoint z;               // lattice label; empty for explicit boxes
    int scheme_level = -1;        // skeleton level tag (#integer coords), -1 = explicit
    std::vector<double> center;   // absolute coordinates
    std::vector<double> w_inner;  // per-coordinate halfwidths (the delta box)
    std::vector<double> w_outer;  // per-coordinate halfwidths (the delta_prev box)

    bool contains(const std::vector<double>& a, bool closed = false) const;
    bool box_like() const;  // w_inner == w_outer
};

// Scheme family descriptor: unit-lattice cubes/hulls at a given skeleton level
// scaled by eps, or the half-integer unit-scale cube family.  Optional trailing
// cylinder block of free coordinates bounded by |a^I| < cylinder_bound.
struct SchemeParams {
    enum Kind { Cube, Hull, HalfInt } kind = Cube;
    int dim = 0;          // lattice-indexed coordinates
    double eps = 1.0;     // scale; 1 for HalfInt
    double delta = 0.0;   // current width parameter
    double delta_outer = 0.0;  // previous level's width (hulls)
    int level = 0;        // required number of integer coordinates (Cube/Hull)
    int cylinder_dim = 0;
    double cylinder_bound = 1.0;

    int total_dim() const { return dim + cylinder_dim; }
    double w_int() const;        // inner halfwidth at integer coordinates
    double w_half() const;       // inner halfwidth at half-integer coordinates
    double w_int_outer() const;
    double w_half_outer() const;
    bool admits(const LatticePoint& z) const;
    Domain make_domain(const LatticePoint& z) const;
    // all admissible lattice points whose domain can meet the axis box [lo, hi]
    std::vector<LatticePoint> enumerate(const std::vector<double>& lo,
                                        const std::vector<double>& hi) const;
};

struct RouteEntry {
    int domain = -1;          // index into RouteWord::domains
    double entry_time = 0.0;  // tau_k
    double occ_begin = 0.0;   // first maximal containment interval of the visit
    double occ_end = 0.0;
};

struct RouteWord {
    std::vector<Domain> domains;
    std::vector<RouteEntry> entries;  // m_0 .. m_L

    int length() const { return static_cast<int>(entries.size()) - 1; }  // L
    std::vector<LatticePoint> labels() const;
};

// Ordered sequence of domains entered by the trajectory across the union of
// the given scheme families (open entries only; consecutive repeats merged;
// boundary touching is not an entry).  With require_origin_start the first
// entry must begin at time 0 in the all-integer origin domain (throws
// otherwise); without it the word may be empty or start anywhere.
RouteWord extract_route(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes,
                        bool require_origin_start = true);

// Same scan against an explicit list of domains (boxes[start_index] must
// contain the start point).
RouteWord extract_route_explicit(const AmbientTrajectory& y, const std::vector<Domain>& boxes,
                                 int start_index);

// Exact containment timeline: consecutive spans covering the whole time
// interval, each labeled with the index of the domain the trajectory sits in
// on the open span, or -1 between domains.
struct DomainSpan {
    double begin = 0.0, end = 0.0;
    int domain = -1;
};
struct SpanScan {
    std::vector<Domain> domains;
    std::vector<DomainSpan> spans;
};
SpanScan domain_spans(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes);

struct DisjointReport {
    bool ok = true;
    int a = -1, b = -1;    // offending pair when !ok
    double margin = 0.0;   // worst feasibility margin observed
};

// Certified pairwise closed-closure disjointness: for each pair, feasibility of
// the two-parameter blend system {exists lambda, mu in [0,1]: all coordinate
// gaps covered} is decided exactly by vertex enumeration of the 2-D polygon.
DisjointReport validate_disjoint(const std::vector<Domain>& domains);

// subsequence containment of route label words
bool is_subword(const std::vector<LatticePoint>& small, const std::vector<LatticePoint>& big);

}  // namespace sigre
