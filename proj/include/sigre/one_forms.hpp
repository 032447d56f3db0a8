#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigre/geometry.hpp"
#include "sigre/tensor_algebra.hpp"

namespace sigre {

// C^alpha ramp: 0 for x <= 0, 1 for x >= 1, the order-(2 alpha + 1) polynomial
// smoothstep between; the first alpha derivatives vanish at both knots.
double smoothstep(int alpha, double x);
double smoothstep_deriv(int alpha, double x);

// Axis box carrying a C^alpha plateau profile: 1 on [lo, hi], 0 outside the
// margin inflation, smoothstep transition across the shell.  A zero-width box
// is a valid (plane-like) core.
struct BumpBox {
    std::vector<double> lo, hi;
    double margin = 0.0;

    int dim() const { return static_cast<int>(lo.size()); }
    double value(const std::vector<double>& a, int alpha) const;
    // <grad value, da>
    double grad_dot(const std::vector<double>& a, int alpha, const std::vector<double>& da) const;
};

// One-form on the trajectory's ambient space, evaluated as a(t) |-> value
// against the tangent.  add_knots appends the global times where the pullback
// along y loses smoothness (profile transition crossings).
struct OneForm {
    virtual ~OneForm() = default;
    virtual double eval(const std::vector<double>& a, const std::vector<double>& da) const = 0;
    virtual void check_dim(int ambient_dim) const = 0;
    virtual void add_knots(const AmbientTrajectory&, std::vector<double>&) const {}
};

// Polynomial one-form on E_N: sum of terms  coeff * prod_k (y^{J_k} - y^{J_k}_0) dy^{I0},
// coordinates indexed by base words (|J| >= 1).  Trajectories are in offset
// coordinates, so a[flat(J)] is the increment itself.
struct PolyTerm {
    std::vector<Word> monomial;  // factors J
    double coeff = 1.0;
    Word target;                 // I0
};

struct PolynomialOneForm : OneForm {
    int base_dim = 0;
    int degree = 0;  // ambient lift degree N
    std::vector<PolyTerm> terms;

    void validate() const;  // word lengths in [1, degree], letters in [1, base_dim]
    int demand() const;     // max over terms of sum |J_k| + |I0| (0 if no terms)
    double eval(const std::vector<double>& a, const std::vector<double>& da) const override;
    void check_dim(int ambient_dim) const override;
};

// 1-D C^alpha ramp factor along coordinate c: 0 below r0, 1 above r1.
struct Ramp {
    int c = 0;
    double r0 = 0.0, r1 = 1.0;
};

// Bump one-form Phi = G dF.  F = prod over u1 of (1 - bump) times the ramp
// factors, so F = 0 on every u1 core and F = 1 wherever all u1 shells and ramp
// transitions are cleared; G = 1 - prod over v1 of (1 - bump), so G = 1 on the
// v1 cores and G = 0 outside their shells.  The support of Phi sits inside the
// union of the inflated v1 boxes, which feasibility keeps inside the
// designated domain.  u2 / v2 record the remaining regions of the
// construction (late legs and the complement legs) for validation.
struct BumpOneForm : OneForm {
    int alpha = 2;
    std::vector<BumpBox> u1, u2, v1, v2;
    std::vector<Ramp> ramps;
    Domain support;
    std::string name;

    double F(const std::vector<double>& a) const;
    double G(const std::vector<double>& a) const;
    double eval(const std::vector<double>& a, const std::vector<double>& da) const override;
    void check_dim(int ambient_dim) const override;
    void add_knots(const AmbientTrajectory& y, std::vector<double>& out) const override;
};

// Iterated integral int_{t0 < t_1 < ... < t_n < t1} Phi^1(dy) ... Phi^n(dy)
// over the whole time range of y, via the recursion h_j' = h_{j-1} Phi^j(y) y'
// on cells adapted to the pullbacks (segment times and profile knots seed the
// partition).  Absolute accuracy ~1e-10 at desk scales; empty sequence gives 1.
double extended_signature_quadrature(const AmbientTrajectory& y,
                                     const std::vector<const OneForm*>& forms,
                                     int quad_order = 16);
double extended_signature_quadrature(const AmbientTrajectory& y,
                                     const std::vector<PolynomialOneForm>& forms,
                                     int quad_order = 16);
double extended_signature_quadrature(const AmbientTrajectory& y,
                                     const std::vector<BumpOneForm>& forms,
                                     int quad_order = 16);

// Same iterated integral computed purely from the base signature g: each
// monomial expands through the shuffle identity into lifted-signature
// coefficients (per-level interleavings), targets append letters, and the
// result is a finite linear combination of coefficients of the lifted
// signature -- no path evaluation.  Throws when g's degree cannot supply the
// total word-length demand.
double polynomial_extended_signature_from_g(const TruncatedTensor& g,
                                            const std::vector<PolynomialOneForm>& forms);

// One bump form per route domain (indexed like route.domains), built from
// tubular boxes around sub-intervals of each visit's occupancy span at
// fractions 0.15 / 0.3 / 0.7 / 0.85 (early leg -> U1, middle -> V1, late ->
// U2, complement -> V2), cores clipped to the domain's bounding box and
// inflated by margin.  Repeated visits merge into the single form.  Throws
// runtime_error naming the offending pair when the regions cannot be
// separated at this margin (inflated V1 escaping the open domain, U2 meeting
// a U1 shell, or the complement legs meeting a V1 shell).
std::vector<BumpOneForm> build_route_oneforms(const AmbientTrajectory& y, const RouteWord& route,
                                              double margin, int alpha = 2);

// Deterministic generic bump form supported in K: seeded sub-box for G and a
// seeded 1-D ramp for F.  Coordinates flagged frozen get full-width box extent
// and are never picked as the ramp direction (a frozen ramp pulls back to the
// zero integrand).
BumpOneForm generic_bump_oneform(const Domain& K, int alpha, std::uint64_t seed,
                                 const std::vector<bool>* frozen = nullptr);

struct RouteVerdict {
    int chi = 0;
    double magnitude = 0.0;               // largest |extended signature| tested
    std::vector<BumpOneForm> witness;     // sequence achieving it (chi == 1)
    std::string witness_kind;             // "route-construction" or "generic-bump"
};

// chi = 1 iff some tested one-form sequence supported on the candidate's
// domains has |extended signature| > tol.  Tested family: the constructed
// route forms when the candidate equals the geometric route (margin halved
// until feasible), plus `rounds` seeded generic bumps per letter.  Candidate
// letters must be admissible in some scheme (first match wins) and carry no
// immediate repeats.
RouteVerdict verify_route(const AmbientTrajectory& y, const std::vector<SchemeParams>& schemes,
                          const std::vector<LatticePoint>& candidate, double tol, int rounds = 3);

}  // namespace sigre
