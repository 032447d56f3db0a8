#include "sigre/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sigre {

TruncatedTensor::TruncatedTensor(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1 || degree < 0) throw std::invalid_argument("TruncatedTensor: bad shape");
    levels_.resize(degree + 1);
    for (int k = 0; k <= degree; ++k) levels_[k].assign(level_size(dim, k), 0.0);
}

TruncatedTensor TruncatedTensor::unit(int dim, int degree) {
    TruncatedTensor t(dim, degree);
    t.levels_[0][0] = 1.0;
    return t;
}

TruncatedTensor TruncatedTensor::truncated(int degree) const {
    TruncatedTensor out(dim_, degree);
    for (int k = 0; k <= std::min(degree, degree_); ++k) out.levels_[k] = levels_[k];
    return out;
}

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b, int N) {
    if (a.dim() != b.dim()) throw std::invalid_argument("tensor_mul: dimension mismatch");
    const int d = a.dim();
    TruncatedTensor c(d, N);
    for (int k = 0; k <= N; ++k) {
        auto& ck = c.level(k);
        for (int j = 0; j <= k; ++j) {
            if (j > a.degree() || k - j > b.degree()) continue;
            const auto& aj = a.level(j);
            const auto& bk = b.level(k - j);
            const std::int64_t nb = level_size(d, k - j);
            for (std::int64_t ia = 0; ia < static_cast<std::int64_t>(aj.size()); ++ia) {
                const double av = aj[ia];
                if (av == 0.0) continue;
                const std::int64_t base = ia * nb;
                for (std::int64_t ib = 0; ib < nb; ++ib) ck[base + ib] += av * bk[ib];
            }
        }
    }
    return c;
}

const std::vector<std::vector<int>>& position_subsets(int total, int take) {
    static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(total, take);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int next) -> void {
        if (static_cast<int>(cur.size()) == take) {
            subsets.push_back(cur);
            return;
        }
        if (total - next < take - static_cast<int>(cur.size())) return;
        for (int i = next; i < total; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return cache.emplace(key, std::move(subsets)).first->second;
}

std::vector<double> shuffle_mul(const std::vector<double>& a, int m,
                                const std::vector<double>& b, int n, int dim) {
    if (static_cast<std::int64_t>(a.size()) != level_size(dim, m) ||
        static_cast<std::int64_t>(b.size()) != level_size(dim, n))
        throw std::invalid_argument("shuffle_mul: level size mismatch");
    const int total = m + n;
    std::vector<double> out(level_size(dim, total), 0.0);
    const auto& subsets = position_subsets(total, m);
    Word w(total);
    for (std::int64_t iw = 0; iw < static_cast<std::int64_t>(out.size()); ++iw) {
        // decode iw once
        std::int64_t rest = iw;
        for (int j = total - 1; j >= 0; --j) { w[j] = static_cast<int>(rest % dim); rest /= dim; }
        double acc = 0.0;
        for (const auto& S : subsets) {
            std::int64_t ia = 0, ib = 0;
            int si = 0;
            for (int pos = 0; pos < total; ++pos) {
                if (si < m && S[si] == pos) { ia = ia * dim + w[pos]; ++si; }
                else ib = ib * dim + w[pos];
            }
            acc += a[ia] * b[ib];
        }
        out[iw] = acc;
    }
    return out;
}

Permutation Permutation::identity(int m) {
    Permutation p;
    p.image.resize(m);
    for (int i = 0; i < m; ++i) p.image[i] = i;
    return p;
}

Permutation Permutation::inverse() const {
    Permutation p;
    p.image.assign(image.size(), 0);
    for (int i = 0; i < order(); ++i) p.image[image[i]] = i;
    return p;
}

Permutation Permutation::compose(const Permutation& a, const Permutation& b) {
    if (a.order() != b.order()) throw std::invalid_argument("Permutation::compose: order mismatch");
    Permutation p;
    p.image.resize(a.order());
    for (int i = 0; i < a.order(); ++i) p.image[i] = a.image[b.image[i]];
    return p;
}

std::vector<double> apply_permutation(const std::vector<double>& level_m, int dim,
                                      const Permutation& sigma) {
    const int m = sigma.order();
    if (static_cast<std::int64_t>(level_m.size()) != level_size(dim, m))
        throw std::invalid_argument("apply_permutation: level size mismatch");
    std::vector<double> out(level_m.size());
    std::vector<int> w(m);
    // strides for reading letter j of a word index
    std::vector<std::int64_t> stride(m, 1);
    for (int j = m - 2; j >= 0; --j) stride[j] = stride[j + 1] * dim;
    for (std::int64_t iw = 0; iw < static_cast<std::int64_t>(out.size()); ++iw) {
        std::int64_t rest = iw;
        for (int j = m - 1; j >= 0; --j) { w[j] = static_cast<int>(rest % dim); rest /= dim; }
        std::int64_t src = 0;
        for (int j = 0; j < m; ++j) src += w[sigma.image[j]] * stride[j];
        out[iw] = level_m[src];
    }
    return out;
}

namespace {

double group_like_defect_impl(const TruncatedTensor& a, double stop_above) {
    const int d = a.dim(), N = a.degree();
    double worst = 0.0;
    Word w;
    for (int m = 1; m < N + 1; ++m) {
        for (int n = 1; m + n <= N; ++n) {
            const auto& am = a.level(m);
            const auto& an = a.level(n);
            const auto& atot = a.level(m + n);
            const auto& subsets = position_subsets(m + n, m);
            const std::int64_t total_words = level_size(d, m + n);
            w.assign(m + n, 0);
            std::vector<std::int64_t> stride(m + n, 1);
            for (int j = m + n - 2; j >= 0; --j) stride[j] = stride[j + 1] * d;
            for (std::int64_t iw = 0; iw < total_words; ++iw) {
                std::int64_t rest = iw;
                for (int j = m + n - 1; j >= 0; --j) { w[j] = static_cast<int>(rest % d); rest /= d; }
                std::int64_t iu = 0, iv = 0;
                for (int j = 0; j < m; ++j) iu = iu * d + w[j];
                for (int j = m; j < m + n; ++j) iv = iv * d + w[j];
                const double lhs = am[iu] * an[iv];
                // interleave u into positions S (in order), v into the rest
                double rhs = 0.0;
                for (const auto& S : subsets) {
                    std::int64_t iz = 0;
                    int si = 0, ui = 0, vi = m;
                    for (int pos = 0; pos < m + n; ++pos) {
                        int letter;
                        if (si < m && S[si] == pos) { letter = w[ui++]; ++si; }
                        else letter = w[vi++];
                        iz = iz * d + letter;
                    }
                    rhs += atot[iz];
                }
                worst = std::max(worst, std::abs(lhs - rhs));
                if (worst > stop_above) return worst;
            }
        }
    }
    return worst;
}

}  // namespace

double group_like_defect(const TruncatedTensor& a) {
    return group_like_defect_impl(a, std::numeric_limits<double>::infinity());
}

bool check_group_like(const TruncatedTensor& a, double tol) {
    if (std::abs(a.level(0)[0] - 1.0) > tol)
        throw std::invalid_argument("check_group_like: empty-word coefficient is " +
                                    std::to_string(a.level(0)[0]) + ", expected 1");
    return group_like_defect_impl(a, tol) <= tol;
}

}  // namespace sigre
