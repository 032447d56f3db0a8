#pragma once

#include "sigre/path_model.hpp"
#include "sigre/tensor_algebra.hpp"

namespace sigre {

// exp of the increment: level k of a straight segment's signature is v^(x)k / k!.
TruncatedTensor segment_signature(const std::vector<double>& increment, int degree);

// Truncated signature of x over [s,t] (defaults to the whole interval) by
// chaining segment exponentials with the concatenation product.
TruncatedTensor path_signature(const PiecewiseLinearPath& x, int degree);
TruncatedTensor path_signature(const PiecewiseLinearPath& x, int degree, double s, double t);

// Frobenius norm of one level block.
double level_norm(const TruncatedTensor& a, int k);

struct DecayReport {
    bool ok = true;
    int worst_level = 0;
    double worst_excess = 0.0;  // |X^k| - omega^k/k! at the worst level
};

// Factorial decay |X^k_{s,t}| <= omega^k / k! with omega = arc length of x over
// [s,t]; slack is the additive tolerance per level.
DecayReport check_factorial_decay(const TruncatedTensor& sig, double omega, double slack);

}  // namespace sigre
