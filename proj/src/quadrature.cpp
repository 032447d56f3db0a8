#include "sigre/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sigre {

const GaussLegendre& gauss_legendre(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussLegendre gl;
    gl.nodes.resize(order);
    gl.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = order * (x * p1 - p0) / (x * x - 1.0);
        gl.nodes[order - 1 - i] = x;  // ascending
        gl.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(order, std::move(gl)).first->second;
}

std::vector<double> legendre_values(int kmax, double x) {
    std::vector<double> p(kmax + 1);
    p[0] = 1.0;
    if (kmax >= 1) p[1] = x;
    for (int k = 2; k <= kmax; ++k)
        p[k] = ((2 * k - 1) * x * p[k - 1] - (k - 1) * p[k - 2]) / k;
    return p;
}

CellAntiderivative::CellAntiderivative(double a, double b, const std::vector<double>& fv)
    : a_(a), b_(b) {
    const int q = static_cast<int>(fv.size());
    const auto& gl = gauss_legendre(q);
    coef_.assign(q, 0.0);
    for (int g = 0; g < q; ++g) {
        const auto p = legendre_values(q - 1, gl.nodes[g]);
        for (int k = 0; k < q; ++k)
            coef_[k] += 0.5 * (2 * k + 1) * gl.weights[g] * fv[g] * p[k];
    }
}

double CellAntiderivative::operator()(double x) const {
    const int q = static_cast<int>(coef_.size());
    const double h = 0.5 * (b_ - a_);
    const double xi = std::clamp((x - a_) / (b_ - a_) * 2.0 - 1.0, -1.0, 1.0);
    const auto p = legendre_values(q, xi);
    // integral_{-1}^{xi} P_k = (P_{k+1} - P_{k-1}) / (2k+1), with P_{-1} terms
    // cancelling at -1; k = 0 integrates to xi + 1.
    double acc = coef_[0] * (xi + 1.0);
    for (int k = 1; k < q; ++k) acc += coef_[k] * (p[k + 1] - p[k - 1]) / (2 * k + 1);
    return acc * h;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int q) {
    const auto& gl = gauss_legendre(q);
    const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int g = 0; g < q; ++g) acc += gl.weights[g] * f(mid + h * gl.nodes[g]);
    return acc * h;
}

namespace {

void refine(const std::function<double(double)>& f, double a, double b, int q, double tol,
            int depth, std::vector<double>& cuts) {
    const double whole = gl_integrate(f, a, b, q);
    const double mid = 0.5 * (a + b);
    const double halves = gl_integrate(f, a, mid, q) + gl_integrate(f, mid, b, q);
    if (std::abs(whole - halves) <= tol || depth <= 0) return;
    cuts.push_back(mid);
    refine(f, a, mid, q, 0.5 * tol, depth - 1, cuts);
    refine(f, mid, b, q, 0.5 * tol, depth - 1, cuts);
}

}  // namespace

std::vector<double> adaptive_cells(const std::vector<std::function<double(double)>>& fs,
                                   const std::vector<double>& seeds, int q, double tol,
                                   int max_depth) {
    if (seeds.size() < 2) throw std::invalid_argument("adaptive_cells: need at least 2 seeds");
    std::vector<double> cuts(seeds);
    for (size_t s = 0; s + 1 < seeds.size(); ++s)
        for (const auto& f : fs) refine(f, seeds[s], seeds[s + 1], q, tol, max_depth, cuts);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace sigre
