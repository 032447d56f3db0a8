#include "sigre/path_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sigre {

double euclid_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) { double d = a[i] - b[i]; s += d * d; }
    return std::sqrt(s);
}

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> times,
                                         std::vector<std::vector<double>> points)
    : times_(std::move(times)), points_(std::move(points)) {
    if (times_.size() != points_.size() || times_.size() < 2)
        throw std::invalid_argument("PiecewiseLinearPath: need matching times/points, >= 2 vertices");
    for (size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("PiecewiseLinearPath: times must be strictly increasing");
    for (const auto& p : points_)
        if (p.size() != points_[0].size())
            throw std::invalid_argument("PiecewiseLinearPath: inconsistent point dimension");
}

std::vector<double> PiecewiseLinearPath::eval(double t) const {
    if (t <= times_.front()) return points_.front();
    if (t >= times_.back()) return points_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    size_t seg = static_cast<size_t>(it - times_.begin()) - 1;
    double lam = (t - times_[seg]) / (times_[seg + 1] - times_[seg]);
    std::vector<double> out(points_[seg].size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = points_[seg][i] + lam * (points_[seg + 1][i] - points_[seg][i]);
    return out;
}

std::vector<double> PiecewiseLinearPath::velocity(int seg) const {
    std::vector<double> v(points_[seg].size());
    double dt = times_[seg + 1] - times_[seg];
    for (size_t i = 0; i < v.size(); ++i) v[i] = (points_[seg + 1][i] - points_[seg][i]) / dt;
    return v;
}

double PiecewiseLinearPath::segment_length(int seg) const {
    return euclid_dist(points_[seg], points_[seg + 1]);
}

double PiecewiseLinearPath::arc_length() const {
    double s = 0.0;
    for (int k = 0; k < segments(); ++k) s += segment_length(k);
    return s;
}

double PiecewiseLinearPath::arc_length(double s, double t) const {
    if (t < s) std::swap(s, t);
    double acc = 0.0;
    for (int k = 0; k < segments(); ++k) {
        double a = std::max(s, times_[k]), b = std::min(t, times_[k + 1]);
        if (b > a) acc += segment_length(k) * (b - a) / (times_[k + 1] - times_[k]);
    }
    return acc;
}

PiecewiseLinearPath PiecewiseLinearPath::resample(const std::vector<double>& grid) const {
    std::set<double> ts(times_.begin(), times_.end());
    for (double t : grid)
        if (t >= times_.front() && t <= times_.back()) ts.insert(t);
    std::vector<double> nt(ts.begin(), ts.end());
    std::vector<std::vector<double>> np;
    np.reserve(nt.size());
    for (double t : nt) np.push_back(eval(t));
    return PiecewiseLinearPath(nt, np);
}

PiecewiseLinearPath concat(const PiecewiseLinearPath& x, const PiecewiseLinearPath& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("concat: dimension mismatch");
    if (x.points().back() != y.points().front())
        throw std::invalid_argument("concat: endpoint mismatch between x(end) and y(start)");
    std::vector<double> times;
    std::vector<std::vector<double>> pts;
    const double xa = x.times().front(), xb = x.times().back();
    for (size_t i = 0; i < x.times().size(); ++i) {
        times.push_back(0.5 * (x.times()[i] - xa) / (xb - xa));
        pts.push_back(x.points()[i]);
    }
    const double ya = y.times().front(), yb = y.times().back();
    for (size_t i = 1; i < y.times().size(); ++i) {
        times.push_back(0.5 + 0.5 * (y.times()[i] - ya) / (yb - ya));
        pts.push_back(y.points()[i]);
    }
    return PiecewiseLinearPath(times, pts);
}

PVarResult p_variation(const PiecewiseLinearPath& x, double p, int samples) {
    if (p < 1.0) throw std::invalid_argument("p_variation: p must be >= 1");
    if (samples < static_cast<int>(x.times().size()))
        throw std::invalid_argument("p_variation: samples must be >= number of vertices");
    std::set<double> grid(x.times().begin(), x.times().end());
    const double t0 = x.times().front(), t1 = x.times().back();
    for (int i = 0; i < samples; ++i)
        grid.insert(t0 + (t1 - t0) * static_cast<double>(i) / (samples - 1));
    std::vector<double> ts(grid.begin(), grid.end());
    const int n = static_cast<int>(ts.size());
    std::vector<std::vector<double>> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = x.eval(ts[i]);

    // f[j] = best sum of |increment|^p over partitions of [t0, ts[j]] ending at j
    std::vector<double> f(n, 0.0);
    std::vector<int> prev(n, -1);
    for (int j = 1; j < n; ++j) {
        double best = -1.0;
        int arg = 0;
        for (int i = 0; i < j; ++i) {
            double cand = f[i] + std::pow(euclid_dist(pts[i], pts[j]), p);
            if (cand > best) { best = cand; arg = i; }
        }
        f[j] = best;
        prev[j] = arg;
    }
    PVarResult r;
    r.value = std::pow(f[n - 1], 1.0 / p);
    for (int j = n - 1; j >= 0; j = prev[j]) {
        r.witness_times.push_back(ts[j]);
        if (j == 0) break;
    }
    std::reverse(r.witness_times.begin(), r.witness_times.end());
    return r;
}

double reparam_distance_points(const std::vector<std::vector<double>>& xs,
                               const std::vector<std::vector<double>>& ys) {
    const int n = static_cast<int>(xs.size()), m = static_cast<int>(ys.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m, inf), cur(m, inf);
    for (int j = 0; j < m; ++j)
        prev[j] = std::max(j == 0 ? 0.0 : prev[j - 1], euclid_dist(xs[0], ys[j]));
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double reach = prev[j];
            if (j > 0) reach = std::min(reach, std::min(prev[j - 1], cur[j - 1]));
            cur[j] = std::max(reach, euclid_dist(xs[i], ys[j]));
        }
        std::swap(prev, cur);
        std::fill(cur.begin(), cur.end(), inf);
    }
    return prev[m - 1];
}

double reparam_distance(const PiecewiseLinearPath& x, const PiecewiseLinearPath& y, int samples) {
    auto sample = [&](const PiecewiseLinearPath& z) {
        std::vector<std::vector<double>> pts;
        const double a = z.times().front(), b = z.times().back();
        for (int i = 0; i < samples; ++i)
            pts.push_back(z.eval(a + (b - a) * static_cast<double>(i) / (samples - 1)));
        return pts;
    };
    return reparam_distance_points(sample(x), sample(y));
}

PiecewiseLinearPath path_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::vector<double> times;
    std::vector<std::vector<double>> pts;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() < 2)
            throw std::invalid_argument("path JSON rows must be [t, x1..xm]");
        times.push_back(row[0].get<double>());
        std::vector<double> p;
        for (size_t i = 1; i < row.size(); ++i) p.push_back(row[i].get<double>());
        pts.push_back(std::move(p));
    }
    return PiecewiseLinearPath(times, pts);
}

std::string path_to_json(const PiecewiseLinearPath& x) {
    nlohmann::json j = nlohmann::json::array();
    for (size_t i = 0; i < x.times().size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        row.push_back(x.times()[i]);
        for (double c : x.points()[i]) row.push_back(c);
        j.push_back(row);
    }
    return j.dump();
}

PiecewiseLinearPath load_path(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("cannot open path file: " + filename);
    std::stringstream ss;
    ss << in.rdbuf();
    return path_from_json(ss.str());
}

}  // namespace sigre
