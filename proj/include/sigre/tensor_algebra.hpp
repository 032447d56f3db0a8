#pragma once

#include <vector>

#include "sigre/words.hpp"

namespace sigre {

// Element of the truncated tensor algebra over R^dim, stored densely per level.
// levels[k] holds the d^k coefficients of degree k in word order.
class TruncatedTensor {
public:
    TruncatedTensor(int dim, int degree);
    static TruncatedTensor unit(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }

    std::vector<double>& level(int k) { return levels_[k]; }
    const std::vector<double>& level(int k) const { return levels_[k]; }

    double coeff(const Word& w) const { return levels_[w.size()][word_index(dim_, w)]; }
    double& coeff(const Word& w) { return levels_[w.size()][word_index(dim_, w)]; }

    TruncatedTensor truncated(int degree) const;  // copy up to min(degree, this->degree)

private:
    int dim_;
    int degree_;
    std::vector<std::vector<double>> levels_;
};

// Concatenation (Chen) product truncated at degree N: c^k = sum_j a^j (x) b^(k-j).
TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b, int N);

// Shuffle product of a homogeneous level-m block with a level-n block.  The
// coefficient of a word w of length m+n is the sum over all order-preserving
// splits of w into a length-m subword (fed to a) and its complement (fed to b).
std::vector<double> shuffle_mul(const std::vector<double>& a, int m,
                                const std::vector<double>& b, int n, int dim);

// Permutation of {0..m-1}; image[i] is where slot i is read from, i.e. the
// induced map on level-m coefficient arrays is out[w] = in[w o sigma].
struct Permutation {
    std::vector<int> image;
    int order() const { return static_cast<int>(image.size()); }
    static Permutation identity(int m);
    Permutation inverse() const;
    // compose(a, b): first apply b's gather, then a's; equals the gather of a o b.
    static Permutation compose(const Permutation& a, const Permutation& b);
};

std::vector<double> apply_permutation(const std::vector<double>& level_m, int dim,
                                      const Permutation& sigma);

// Shuffle identity check for group-likeness: for every m,n >= 1 with m+n <= N
// the outer product of levels m and n must equal the interleaving sum of level
// m+n, coefficient by coefficient.  Requires coeff(empty) == 1.
bool check_group_like(const TruncatedTensor& a, double tol);

// Largest absolute coefficient deviation in the group-like check (diagnostics).
double group_like_defect(const TruncatedTensor& a);

// All C(m+n, m) subsets of {0..m+n-1} of size m, each as a sorted index list.
const std::vector<std::vector<int>>& position_subsets(int total, int take);

}  // namespace sigre
