#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigre/geometry.hpp"
#include "sigre/lifted_path.hpp"
#include "sigre/one_forms.hpp"
#include "sigre/path_model.hpp"
#include "sigre/signature_core.hpp"

using namespace sigre;

namespace {

double splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
}

PiecewiseLinearPath random_path(std::uint64_t seed, int segs, double scale = 1.0) {
    std::vector<double> times;
    std::vector<std::vector<double>> pts;
    for (int k = 0; k <= segs; ++k) {
        times.push_back(static_cast<double>(k) / segs);
        pts.push_back({scale * (2.0 * splitmix(seed) - 1.0), scale * (2.0 * splitmix(seed) - 1.0)});
    }
    return PiecewiseLinearPath(times, pts);
}

SchemeParams cubes2(double eps, double delta) {
    SchemeParams sp;
    sp.kind = SchemeParams::Cube;
    sp.dim = 2;
    sp.eps = eps;
    sp.delta = delta;
    sp.level = 2;
    return sp;
}

PolynomialOneForm poly_form(int degree, std::vector<PolyTerm> terms) {
    PolynomialOneForm f;
    f.base_dim = 2;
    f.degree = degree;
    f.terms = std::move(terms);
    return f;
}

LatticePoint lat(std::vector<int> doubled) { return LatticePoint{std::move(doubled)}; }

}  // namespace

TEST_CASE("smoothstep: values, symmetry, and vanishing derivatives of order alpha") {
    CHECK(smoothstep(2, 0.0) == 0.0);
    CHECK(smoothstep(2, 1.0) == 1.0);
    CHECK(smoothstep(2, -0.3) == 0.0);
    CHECK(smoothstep(2, 1.7) == 1.0);
    // alpha = 2 is the quintic 10x^3 - 15x^4 + 6x^5
    for (double x : {0.1, 0.25, 0.5, 0.8, 0.97}) {
        double q = ((6.0 * x - 15.0) * x + 10.0) * x * x * x;
        CHECK(std::abs(smoothstep(2, x) - q) <= 1e-14);
    }
    for (int alpha : {1, 2, 3})
        for (double x : {0.05, 0.3, 0.5, 0.77})
            CHECK(std::abs(smoothstep(alpha, x) + smoothstep(alpha, 1.0 - x) - 1.0) <= 1e-13);
    // derivative matches a central difference in the interior
    for (int alpha : {1, 2}) {
        for (double x : {0.2, 0.5, 0.9}) {
            double h = 1e-6;
            double fd = (smoothstep(alpha, x + h) - smoothstep(alpha, x - h)) / (2 * h);
            CHECK(std::abs(smoothstep_deriv(alpha, x) - fd) <= 1e-7 * std::max(1.0, std::abs(fd)));
        }
    }
    // C^alpha at the knots: S' decays like x^alpha near 0, so the quotient
    // S'(h)/h vanishes for alpha = 2 but tends to 6 for alpha = 1
    double h = 1e-4;
    CHECK(smoothstep_deriv(2, h) / h < 1e-2);
    CHECK(smoothstep_deriv(2, 1.0 - h) / h < 1e-2);
    CHECK(std::abs(smoothstep_deriv(1, h) / h - 6.0) <= 1e-2);
    CHECK(std::abs(smoothstep_deriv(2, h) - 30.0 * h * h) <= 1e-3 * 30.0 * h * h);
}

TEST_CASE("bump box: plateau exact, shell smooth, gradient matches finite differences") {
    BumpBox b;
    b.lo = {0.0, 0.0};
    b.hi = {1.0, 2.0};
    b.margin = 0.5;
    CHECK(b.value({0.5, 1.0}, 2) == 1.0);
    CHECK(b.value({0.0, 2.0}, 2) == 1.0);  // plateau includes the core boundary
    CHECK(b.value({-0.5, 1.0}, 2) == 0.0);
    CHECK(b.value({1.6, 1.0}, 2) == 0.0);
    double shell = b.value({-0.25, 1.0}, 2);
    CHECK(shell > 0.0);
    CHECK(shell < 1.0);

    std::uint64_t seed = 17;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a = {3.0 * splitmix(seed) - 1.0, 4.0 * splitmix(seed) - 1.0};
        std::vector<double> da = {2.0 * splitmix(seed) - 1.0, 2.0 * splitmix(seed) - 1.0};
        double an = b.grad_dot(a, 2, da);
        double h = 1e-6;
        std::vector<double> ap = a, am = a;
        for (int c = 0; c < 2; ++c) {
            ap[c] = a[c] + h * da[c];
            am[c] = a[c] - h * da[c];
        }
        double fd = (b.value(ap, 2) - b.value(am, 2)) / (2 * h);
        CHECK(std::abs(an - fd) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("coordinate differential integrates to the signature coefficient") {
    PiecewiseLinearPath x = random_path(42, 4);
    TruncatedTensor g = path_signature(x, 3);
    AmbientTrajectory y = AmbientTrajectory::from_lifted(x, 3);
    for (const Word& I : {Word{1}, Word{2}, Word{1, 2}, Word{2, 1, 1}}) {
        PolynomialOneForm f = poly_form(3, {PolyTerm{{}, 1.0, I}});
        double quad = extended_signature_quadrature(y, std::vector<PolynomialOneForm>{f});
        CHECK(std::abs(quad - g.coeff(I)) <= 1e-9);
        double alg = polynomial_extended_signature_from_g(g, {f});
        CHECK(std::abs(alg - g.coeff(I)) <= 1e-14);
    }
}

TEST_CASE("monomial factors expand through interleavings of the lifted signature") {
    PiecewiseLinearPath x = random_path(7, 5);
    TruncatedTensor g = path_signature(x, 4);
    AmbientTrajectory y = AmbientTrajectory::from_lifted(x, 3);

    // (y^1 - y^1_0) dy^2 -> g^{12}
    PolynomialOneForm fa = poly_form(3, {PolyTerm{{Word{1}}, 1.0, Word{2}}});
    CHECK(std::abs(polynomial_extended_signature_from_g(g, {fa}) - g.coeff({1, 2})) <= 1e-14);
    CHECK(std::abs(extended_signature_quadrature(y, std::vector<PolynomialOneForm>{fa}) -
                   g.coeff({1, 2})) <= 1e-9);

    // (y^1 -)(y^2 -) dy^1 -> g^{121} + g^{211}
    PolynomialOneForm fb = poly_form(3, {PolyTerm{{Word{1}, Word{2}}, 1.0, Word{1}}});
    double expect = g.coeff({1, 2, 1}) + g.coeff({2, 1, 1});
    CHECK(std::abs(polynomial_extended_signature_from_g(g, {fb}) - expect) <= 1e-13);
    CHECK(std::abs(extended_signature_quadrature(y, std::vector<PolynomialOneForm>{fb}) -
                   expect) <= 1e-9);

    // repeated factor carries shuffle multiplicity: (y^1 -)^2 dy^2 -> 2 g^{112}
    PolynomialOneForm fc = poly_form(3, {PolyTerm{{Word{1}, Word{1}}, 1.0, Word{2}}});
    CHECK(std::abs(polynomial_extended_signature_from_g(g, {fc}) -
                   2.0 * g.coeff({1, 1, 2})) <= 1e-13);

    // a word-coordinate factor: (y^{12} -) dy^1 exercises a level-(2,1) block
    PolynomialOneForm fd = poly_form(3, {PolyTerm{{Word{1, 2}}, 1.0, Word{1}}});
    double alg = polynomial_extended_signature_from_g(g, {fd});
    double quad = extended_signature_quadrature(y, std::vector<PolynomialOneForm>{fd});
    CHECK(std::abs(alg - quad) <= 1e-9);

    // degree too small for the demand
    TruncatedTensor g2 = path_signature(x, 2);
    CHECK_THROWS_AS(polynomial_extended_signature_from_g(g2, {fb}), std::invalid_argument);
    // lifted trajectory of the wrong degree
    AmbientTrajectory y2 = AmbientTrajectory::from_lifted(x, 2);
    CHECK_THROWS_AS(extended_signature_quadrature(y2, std::vector<PolynomialOneForm>{fa}),
                    std::invalid_argument);
}

TEST_CASE("signature-only extended signatures agree with quadrature on random forms") {
    int checked = 0;
    for (std::uint64_t trial = 0; trial < 30; ++trial) {
        std::uint64_t seed = 1000 + trial * 77;
        PiecewiseLinearPath x = random_path(seed, 3 + static_cast<int>(splitmix(seed) * 4));
        TruncatedTensor g = path_signature(x, 6);
        AmbientTrajectory y = AmbientTrajectory::from_lifted(x, 3);
        int nforms = 1 + static_cast<int>(trial % 2);
        std::vector<PolynomialOneForm> forms;
        for (int j = 0; j < nforms; ++j) {
            int cap = (nforms == 2) ? 3 : 6;
            PolynomialOneForm f;
            f.base_dim = 2;
            f.degree = 3;
            int nterms = 1 + static_cast<int>(splitmix(seed) * 2);
            for (int t = 0; t < nterms; ++t) {
                PolyTerm term;
                term.coeff = 2.4 * splitmix(seed) - 1.2;
                int tlen = 1 + static_cast<int>(splitmix(seed) * 2);
                int room = cap - tlen;
                int nfac = static_cast<int>(splitmix(seed) * 3);
                for (int k = 0; k < nfac; ++k) {
                    int flen = 1 + static_cast<int>(splitmix(seed) * 2);
                    if (room - flen < 0) break;
                    Word J;
                    for (int l = 0; l < flen; ++l)
                        J.push_back(1 + static_cast<int>(splitmix(seed) * 2));
                    term.monomial.push_back(J);
                    room -= flen;
                }
                for (int l = 0; l < tlen; ++l)
                    term.target.push_back(1 + static_cast<int>(splitmix(seed) * 2));
                f.terms.push_back(term);
            }
            forms.push_back(f);
        }
        double alg = polynomial_extended_signature_from_g(g, forms);
        double quad = extended_signature_quadrature(y, forms);
        CHECK(std::abs(alg - quad) <= 1e-8);
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("route forms: unit visit integrals, product decomposition, order zeros") {
    PiecewiseLinearPath x({0.0, 1.0, 2.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
    AmbientTrajectory y = AmbientTrajectory::from_pl(x);
    SchemeParams sp = cubes2(0.25, 0.0625);
    RouteWord route = extract_route(y, {sp}, true);
    REQUIRE(route.entries.size() == 9);
    REQUIRE(route.domains.size() == 9);

    // the first visit starts at the domain center, so the entry leg sits only
    // 0.15 * w_int away from the V1 tube: the margin must stay under that
    std::vector<BumpOneForm> forms = build_route_oneforms(y, route, 0.01);
    REQUIRE(forms.size() == 9);

    // region values pin the construction: F is 0 early, 1 late; G rides the middle
    for (const BumpOneForm& f : forms) {
        REQUIRE(f.u1.size() == 1);
        std::vector<double> early(2), late(2), mid(2);
        for (int c = 0; c < 2; ++c) {
            early[c] = 0.5 * (f.u1[0].lo[c] + f.u1[0].hi[c]);
            late[c] = 0.5 * (f.u2[0].lo[c] + f.u2[0].hi[c]);
            mid[c] = 0.5 * (f.v1[0].lo[c] + f.v1[0].hi[c]);
        }
        CHECK(f.F(early) == 0.0);
        CHECK(f.F(late) == 1.0);
        CHECK(f.G(mid) == 1.0);
        CHECK(f.G({5.0, 5.0}) == 0.0);
    }

    // each single-visit transit integrates to one
    for (int k = 0; k < 9; ++k) {
        double I = extended_signature_quadrature(y, std::vector<BumpOneForm>{forms[k]});
        CHECK(std::abs(I - 1.0) <= 1e-8);
    }

    // the full route sequence multiplies out to one
    std::vector<BumpOneForm> seq;
    for (const RouteEntry& e : route.entries) seq.push_back(forms[e.domain]);
    CHECK(std::abs(extended_signature_quadrature(y, seq) - 1.0) <= 1e-8);

    // order violation: a later domain's form first -> structurally zero
    CHECK(std::abs(extended_signature_quadrature(
              y, std::vector<BumpOneForm>{forms[2], forms[1]})) <= 1e-9);
    std::vector<BumpOneForm> rev(seq.rbegin(), seq.rend());
    CHECK(std::abs(extended_signature_quadrature(y, rev)) <= 1e-9);

    // unvisited domain kills the sequence
    Domain off = sp.make_domain(lat({0, 2}));
    BumpOneForm ghost = generic_bump_oneform(off, 2, 5, &y.frozen);
    CHECK(extended_signature_quadrature(y, std::vector<BumpOneForm>{ghost}) == 0.0);
    CHECK(std::abs(extended_signature_quadrature(
              y, std::vector<BumpOneForm>{forms[0], ghost, forms[1]})) <= 1e-9);

    // product decomposition with non-unit factors from generic bumps; many
    // seeds give degenerate zeros (ramp along the transit's constant
    // coordinate), so hunt for live factors independently
    auto hunt = [&](const Domain& K, std::uint64_t s0, BumpOneForm& out, double& val) {
        for (std::uint64_t s = s0; s < s0 + 200; ++s) {
            BumpOneForm p = generic_bump_oneform(K, 2, s, &y.frozen);
            double I = extended_signature_quadrature(y, std::vector<BumpOneForm>{p});
            if (std::abs(I) > 1e-3) {
                out = p;
                val = I;
                return true;
            }
        }
        return false;
    };
    BumpOneForm pa, pb;
    double ia = 0.0, ib = 0.0;
    REQUIRE(hunt(route.domains[1], 1, pa, ia));
    REQUIRE(hunt(route.domains[5], 1001, pb, ib));
    double iab = extended_signature_quadrature(y, std::vector<BumpOneForm>{pa, pb});
    CHECK(std::abs(iab - ia * ib) <= 1e-8);
}

TEST_CASE("repeated visits merge into a single form per domain") {
    PiecewiseLinearPath x({0.0, 1.0, 1.5, 2.5, 3.0},
                          {{0.0, 0.0},
                           {0.5, 0.0},
                           {0.5, 0.22},
                           {0.0, 0.22},
                           {0.0, 0.0}});
    AmbientTrajectory y = AmbientTrajectory::from_pl(x);
    SchemeParams sp = cubes2(0.25, 0.0625);
    RouteWord route = extract_route(y, {sp}, true);
    std::vector<LatticePoint> want = {lat({0, 0}), lat({2, 0}), lat({4, 0}), lat({4, 2}),
                                      lat({2, 2}), lat({0, 2}), lat({0, 0})};
    REQUIRE(route.labels() == want);
    REQUIRE(route.domains.size() == 6);  // origin shared by first and last letter

    std::vector<BumpOneForm> forms = build_route_oneforms(y, route, 0.01);
    int twice = route.entries.front().domain;
    REQUIRE(twice == route.entries.back().domain);
    CHECK(forms[twice].u1.size() == 2);
    CHECK(forms[twice].v1.size() == 2);

    std::vector<BumpOneForm> seq;
    for (const RouteEntry& e : route.entries) seq.push_back(forms[e.domain]);
    CHECK(std::abs(extended_signature_quadrature(y, seq) - 1.0) <= 1e-8);
    // the merged form integrates to one over EACH visit, so alone it sums to two
    CHECK(std::abs(extended_signature_quadrature(
              y, std::vector<BumpOneForm>{forms[twice]}) - 2.0) <= 1e-8);
}

TEST_CASE("route form construction reports infeasible regions") {
    SchemeParams sp = cubes2(0.25, 0.0625);

    // back-and-forth retraversal: the return leg runs through the V1 tube
    PiecewiseLinearPath dip({0.0, 1.0, 2.0}, {{0.0, 0.0}, {0.15, 0.0}, {0.0, 0.0}});
    AmbientTrajectory yd = AmbientTrajectory::from_pl(dip);
    RouteWord rd = extract_route(yd, {sp}, true);
    try {
        build_route_oneforms(yd, rd, 0.01);
        FAIL("expected infeasibility");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("V1") != std::string::npos);
    }

    // margin wider than the tunnel gap: the inflated tube escapes the domain
    PiecewiseLinearPath lp({0.0, 1.0, 2.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
    AmbientTrajectory yl = AmbientTrajectory::from_pl(lp);
    RouteWord rl = extract_route(yl, {sp}, true);
    try {
        build_route_oneforms(yl, rl, 0.2);
        FAIL("expected infeasibility");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("V1") != std::string::npos);
    }

    CHECK_THROWS_AS(build_route_oneforms(yl, rl, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_route_oneforms(yl, RouteWord{}, 0.01), std::invalid_argument);
}

TEST_CASE("verify_route: the true word fires, every competitor of full length dies") {
    PiecewiseLinearPath x({0.0, 1.0}, {{0.0, 0.0}, {0.3, 0.0}});
    AmbientTrajectory y = AmbientTrajectory::from_pl(x);
    SchemeParams sp = cubes2(0.25, 0.0625);
    std::vector<SchemeParams> schemes = {sp};
    RouteWord route = extract_route(y, schemes, true);
    std::vector<LatticePoint> truth = route.labels();
    REQUIRE(truth == std::vector<LatticePoint>{lat({0, 0}), lat({2, 0})});

    RouteVerdict vr = verify_route(y, schemes, truth, 1e-9);
    CHECK(vr.chi == 1);
    CHECK(vr.witness_kind == "route-construction");
    CHECK(std::abs(vr.magnitude - 1.0) <= 1e-7);
    REQUIRE(vr.witness.size() == 2);

    // candidate universe: every admissible cube near the path
    std::vector<LatticePoint> universe;
    for (int i = -1; i <= 2; ++i)
        for (int j = -1; j <= 1; ++j) universe.push_back(lat({2 * i, 2 * j}));
    REQUIRE(universe.size() == 12);

    // every other word of length L in the universe dies ...
    int rejected = 0;
    for (const LatticePoint& z : universe) {
        if (z == truth[1]) continue;  // the true word itself
        if (z == truth[0]) continue;  // immediate repeat: not an admissible word
        std::vector<LatticePoint> w = {truth[0], z};
        RouteVerdict v = verify_route(y, schemes, w, 1e-9);
        CHECK(v.chi == 0);
        CHECK(v.magnitude <= 1e-9);
        ++rejected;
    }
    CHECK(rejected == 10);

    // ... and so does every word of length L+1, including route extensions
    for (const LatticePoint& z1 : universe) {
        if (z1 == truth[0]) continue;
        for (const LatticePoint& z2 : universe) {
            if (z2 == z1) continue;
            std::vector<LatticePoint> w = {truth[0], z1, z2};
            RouteVerdict v = verify_route(y, schemes, w, 1e-9);
            CHECK(v.chi == 0);
        }
    }

    // a strict prefix of the route is a live sub-word: the indicator's sup
    // semantics, not a defect
    RouteVerdict sub = verify_route(y, schemes, {truth[0]}, 1e-9, 8);
    CHECK(sub.chi == 1);
    CHECK(sub.witness_kind == "generic-bump");

    CHECK_THROWS_AS(verify_route(y, schemes, {truth[0], truth[0]}, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(verify_route(y, schemes, {lat({1, 0})}, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(verify_route(y, schemes, {}, 1e-9), std::invalid_argument);
}

TEST_CASE("generic bumps are reproducible and seed-sensitive") {
    SchemeParams sp = cubes2(0.25, 0.0625);
    Domain K = sp.make_domain(lat({2, 0}));
    BumpOneForm a = generic_bump_oneform(K, 2, 99);
    BumpOneForm b = generic_bump_oneform(K, 2, 99);
    BumpOneForm c = generic_bump_oneform(K, 2, 100);
    REQUIRE(a.v1.size() == 1);
    CHECK(a.v1[0].lo == b.v1[0].lo);
    CHECK(a.v1[0].hi == b.v1[0].hi);
    CHECK(a.v1[0].margin == b.v1[0].margin);
    REQUIRE(a.ramps.size() == 1);
    REQUIRE(b.ramps.size() == 1);
    CHECK(a.ramps[0].c == b.ramps[0].c);
    CHECK(a.ramps[0].r0 == b.ramps[0].r0);
    CHECK(a.v1[0].lo != c.v1[0].lo);
    // the seeded box really sits inside the open domain
    CHECK(K.contains(a.v1[0].lo, false));
    CHECK(K.contains(a.v1[0].hi, false));
}
