#include "sigre/lifted_path.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sigre/quadrature.hpp"

namespace sigre {

namespace {

// B[w] = sum over placements S of the first m letters of w into the first m+k
// slots (order kept, remaining k slots taking letters m..m+k-1 of w in order);
// slots beyond m+k are fixed.
std::vector<double> interleave_step(const std::vector<double>& A, int d, int m, int k, int M) {
    const auto& subsets = position_subsets(m + k, m);
    std::vector<double> B(A.size(), 0.0);
    std::vector<int> w(M);
    std::vector<std::int64_t> stride(M, 1);
    for (int j = M - 2; j >= 0; --j) stride[j] = stride[j + 1] * d;
    for (std::int64_t iw = 0; iw < static_cast<std::int64_t>(A.size()); ++iw) {
        std::int64_t rest = iw;
        for (int j = M - 1; j >= 0; --j) { w[j] = static_cast<int>(rest % d); rest /= d; }
        std::int64_t tail = 0;
        for (int j = m + k; j < M; ++j) tail += w[j] * stride[j];
        double acc = 0.0;
        for (const auto& S : subsets) {
            std::int64_t src = tail;
            int si = 0, ui = 0, vi = m;
            for (int pos = 0; pos < m + k; ++pos) {
                int letter;
                if (si < m && S[si] == pos) { letter = w[ui++]; ++si; }
                else letter = w[vi++];
                src += static_cast<std::int64_t>(letter) * stride[pos];
            }
            acc += A[src];
        }
        B[iw] = acc;
    }
    return B;
}

int label_sum(const std::vector<int>& labels) {
    for (int i : labels)
        if (i < 0) throw std::invalid_argument("lifted level: negative degree label");
    return std::accumulate(labels.begin(), labels.end(), 0);
}

}  // namespace

LiftedLevel lifted_signature_level(const TruncatedTensor& g, const std::vector<int>& labels) {
    const int M = label_sum(labels);
    if (g.degree() < M)
        throw std::invalid_argument("lifted_signature_level: signature degree too small for labels");
    LiftedLevel out;
    out.labels = labels;
    out.dim = g.dim();
    out.coeffs.assign(level_size(g.dim(), M), 0.0);
    if (std::find(labels.begin(), labels.end(), 0) != labels.end()) return out;  // flat coordinate
    if (labels.empty()) { out.coeffs = {1.0}; return out; }
    std::vector<double> A = g.level(M);
    int n = static_cast<int>(labels.size());
    for (int j = n - 1; j >= 1; --j) {
        int m = 0;
        for (int r = 0; r < j; ++r) m += labels[r];
        const int k = labels[j] - 1;
        if (k > 0) A = interleave_step(A, g.dim(), m, k, M);
    }
    out.coeffs = std::move(A);
    return out;
}

std::vector<TruncatedTensor> vertex_signatures(const PiecewiseLinearPath& x, int degree) {
    std::vector<TruncatedTensor> out;
    out.reserve(x.times().size());
    out.push_back(TruncatedTensor::unit(x.dim(), degree));
    for (int seg = 0; seg < x.segments(); ++seg) {
        std::vector<double> inc(x.dim());
        for (int i = 0; i < x.dim(); ++i) inc[i] = x.points()[seg + 1][i] - x.points()[seg][i];
        out.push_back(tensor_mul(out.back(), segment_signature(inc, degree), degree));
    }
    return out;
}

LiftedLevel lifted_level_quadrature(const PiecewiseLinearPath& x, const std::vector<int>& labels,
                                    double s, double t, int q) {
    const int d = x.dim();
    const int n = static_cast<int>(labels.size());
    const int M = label_sum(labels);
    if (q <= 0) q = M + 4;
    LiftedLevel out;
    out.labels = labels;
    out.dim = d;
    out.coeffs.assign(level_size(d, M), 0.0);
    if (n == 0) { out.coeffs = {1.0}; return out; }
    if (std::find(labels.begin(), labels.end(), 0) != labels.end()) return out;
    if (!(s < t)) return out;

    const int maxdeg = *std::max_element(labels.begin(), labels.end());
    const auto prefixes = vertex_signatures(x, maxdeg);
    const auto& gl = gauss_legendre(q);

    // quadrature cells: base segments clipped to [s,t]
    struct Cell { double a, b; int seg; };
    std::vector<Cell> cells;
    for (int seg = 0; seg < x.segments(); ++seg) {
        double a = std::max(s, x.times()[seg]), b = std::min(t, x.times()[seg + 1]);
        if (b > a) cells.push_back({a, b, seg});
    }

    // X_{0,r} at every node of every cell, up to degree maxdeg
    std::vector<std::vector<TruncatedTensor>> node_sig(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        const auto v = x.velocity(cell.seg);
        const double t_seg = x.times()[cell.seg];
        for (int gnode = 0; gnode < q; ++gnode) {
            const double r = 0.5 * (cell.a + cell.b) + 0.5 * (cell.b - cell.a) * gl.nodes[gnode];
            std::vector<double> inc(d);
            for (int i = 0; i < d; ++i) inc[i] = v[i] * (r - t_seg);
            node_sig[c].push_back(tensor_mul(prefixes[cell.seg], segment_signature(inc, maxdeg), maxdeg));
        }
    }

    // h_0 == 1 at all nodes
    std::vector<std::vector<std::vector<double>>> h(cells.size());
    for (size_t c = 0; c < cells.size(); ++c)
        h[c].assign(q, std::vector<double>{1.0});

    int Mprev = 0;
    for (int j = 0; j < n; ++j) {
        const int ij = labels[j];
        const int Mj = Mprev + ij;
        const std::int64_t sz = level_size(d, Mj);
        const std::int64_t szp = level_size(d, Mprev);
        const std::int64_t szi = level_size(d, ij - 1);
        std::vector<double> h_start(sz, 0.0);
        for (size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            const auto v = x.velocity(cell.seg);
            // integrand at the nodes: h_{j-1} (x) X^(ij-1)_{0,r} (x) v
            std::vector<std::vector<double>> gv(q, std::vector<double>(sz, 0.0));
            for (int gnode = 0; gnode < q; ++gnode) {
                const auto& hx = h[c][gnode];
                const auto& Xi = node_sig[c][gnode].level(ij - 1);
                auto& dst = gv[gnode];
                for (std::int64_t ia = 0; ia < szp; ++ia) {
                    if (hx[ia] == 0.0) continue;
                    for (std::int64_t ib = 0; ib < szi; ++ib) {
                        const double base = hx[ia] * Xi[ib];
                        if (base == 0.0) continue;
                        const std::int64_t off = (ia * szi + ib) * d;
                        for (int k = 0; k < d; ++k) dst[off + k] += base * v[k];
                    }
                }
            }
            // per-component antiderivative: values at nodes and at the cell end
            std::vector<std::vector<double>> hj(q, std::vector<double>(sz));
            std::vector<double> h_end(h_start);
            std::vector<double> samples(q);
            for (std::int64_t comp = 0; comp < sz; ++comp) {
                for (int gnode = 0; gnode < q; ++gnode) samples[gnode] = gv[gnode][comp];
                CellAntiderivative F(cell.a, cell.b, samples);
                for (int gnode = 0; gnode < q; ++gnode) {
                    const double r = 0.5 * (cell.a + cell.b) + 0.5 * (cell.b - cell.a) * gl.nodes[gnode];
                    hj[gnode][comp] = h_start[comp] + F(r);
                }
                h_end[comp] = h_start[comp] + F.full();
            }
            h[c] = std::move(hj);
            h_start = std::move(h_end);
        }
        Mprev = Mj;
        if (j == n - 1) out.coeffs = std::move(h_start);
    }
    return out;
}

double lifted_coefficient(const TruncatedTensor& g, const std::vector<Word>& eword) {
    std::vector<int> labels;
    Word concat;
    for (const auto& w : eword) {
        labels.push_back(static_cast<int>(w.size()));
        concat.insert(concat.end(), w.begin(), w.end());
    }
    if (labels.empty()) return 1.0;
    const auto lvl = lifted_signature_level(g, labels);
    return lvl.coeffs[word_index(g.dim(), concat)];
}

}  // namespace sigre
