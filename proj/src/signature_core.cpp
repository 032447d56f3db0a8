#include "sigre/signature_core.hpp"

#include <cmath>
#include <stdexcept>

namespace sigre {

TruncatedTensor segment_signature(const std::vector<double>& increment, int degree) {
    const int d = static_cast<int>(increment.size());
    TruncatedTensor t = TruncatedTensor::unit(d, degree);
    for (int k = 1; k <= degree; ++k) {
        const auto& prev = t.level(k - 1);
        auto& cur = t.level(k);
        const double inv = 1.0 / k;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(prev.size()); ++i) {
            const double base = prev[i] * inv;
            if (base == 0.0) continue;
            for (int j = 0; j < d; ++j) cur[i * d + j] = base * increment[j];
        }
    }
    return t;
}

TruncatedTensor path_signature(const PiecewiseLinearPath& x, int degree, double s, double t) {
    if (!(s <= t)) throw std::invalid_argument("path_signature: need s <= t");
    const int d = x.dim();
    TruncatedTensor sig = TruncatedTensor::unit(d, degree);
    for (int seg = 0; seg < x.segments(); ++seg) {
        const double a = std::max(s, x.times()[seg]);
        const double b = std::min(t, x.times()[seg + 1]);
        if (!(b > a)) continue;
        const auto pa = x.eval(a), pb = x.eval(b);
        std::vector<double> inc(d);
        for (int i = 0; i < d; ++i) inc[i] = pb[i] - pa[i];
        sig = tensor_mul(sig, segment_signature(inc, degree), degree);
    }
    return sig;
}

TruncatedTensor path_signature(const PiecewiseLinearPath& x, int degree) {
    return path_signature(x, degree, x.times().front(), x.times().back());
}

double level_norm(const TruncatedTensor& a, int k) {
    double s = 0.0;
    for (double c : a.level(k)) s += c * c;
    return std::sqrt(s);
}

DecayReport check_factorial_decay(const TruncatedTensor& sig, double omega, double slack) {
    DecayReport r;
    double fact = 1.0, pw = 1.0;
    for (int k = 1; k <= sig.degree(); ++k) {
        fact *= k;
        pw *= omega;
        const double excess = level_norm(sig, k) - pw / fact;
        if (excess > r.worst_excess) { r.worst_excess = excess; r.worst_level = k; }
        if (excess > slack) r.ok = false;
    }
    return r;
}

}  // namespace sigre
