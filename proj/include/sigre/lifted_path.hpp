#pragma once

#include "sigre/signature_core.hpp"

namespace sigre {

// One level of the signature of the lifted path y = (1, X^1_{0,.}, ..., X^N_{0,.}):
// the block indexed by degree labels (i1..in), a tensor of order i1+...+in over R^d.
struct LiftedLevel {
    std::vector<int> labels;
    int dim = 0;
    std::vector<double> coeffs;  // size d^(i1+...+in); zero block if any label is 0
};

// Closed-form evaluation from the signature tensor g = S(x)_{s,t} (group-like,
// degree >= i1+...+in): the chained-shuffle formula, realized as interleaving
// steps applied to the top level of g.  Step j spreads the first i1+...+ij
// letters over the first i1+...+i(j+1)-1 slots in all order-preserving ways;
// steps are applied innermost-first (j = n-1 down to 1).
LiftedLevel lifted_signature_level(const TruncatedTensor& g, const std::vector<int>& labels);

// Independent oracle: nested Gauss-Legendre integration of
//   h_j(u) = integral_s^u h_{j-1} (x) dy^(i_j),  dy^(i)(r) = X^(i-1)_{0,r} (x) dx_r,
// per base segment, with the degree-(q-1) interpolant supplying interior
// antiderivative values.  Exact for q >= i1+...+in + 1 since the integrands are
// piecewise polynomial.  q = 0 picks that order automatically.
LiftedLevel lifted_level_quadrature(const PiecewiseLinearPath& x, const std::vector<int>& labels,
                                    double s, double t, int q = 0);

// Coefficient of the lifted signature S(Y)_{s,t} at a word over the E_N
// alphabet (letters are base words of length >= 1): the lifted level at the
// letter lengths, read at the concatenated component.
double lifted_coefficient(const TruncatedTensor& g, const std::vector<Word>& eword);

// Signature tensors X_{0,t_k} at every vertex time of x.
std::vector<TruncatedTensor> vertex_signatures(const PiecewiseLinearPath& x, int degree);

}  // namespace sigre
