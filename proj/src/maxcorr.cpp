#include "corrtensor/maxcorr.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace corrtensor {

namespace {

constexpr double kPowerTol = 1e-12;
constexpr int kPowerMaxIters = 100'000;

// y <- M x for a dense row-major matrix (rows x cols)
void matvec(const std::vector<double>& m, std::size_t rows, std::size_t cols,
            const std::vector<double>& x, std::vector<double>& y) {
    y.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        const double* row = m.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
        y[r] = s;
    }
}

void matvec_t(const std::vector<double>& m, std::size_t rows, std::size_t cols,
              const std::vector<double>& x, std::vector<double>& y) {
    y.assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * x[r];
    }
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Top singular value of a rows x cols matrix by power iteration on M^T M.
double power_top_singular(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> w(cols);
    for (double& x : w) x = unif(rng);
    double n = norm2(w);
    if (n == 0.0) return 0.0;
    for (double& x : w) x /= n;

    std::vector<double> mw, next;
    double sigma2 = 0.0;
    for (int it = 0; it < kPowerMaxIters; ++it) {
        matvec(m, rows, cols, w, mw);
        matvec_t(m, rows, cols, mw, next);
        double nn = norm2(next);
        if (nn < 1e-300) return 0.0;
        for (double& x : next) x /= nn;
        double estimate = nn;  // Rayleigh quotient of M^T M at unit w
        if (std::abs(estimate - sigma2) < kPowerTol * std::max(1.0, estimate)) {
            sigma2 = estimate;
            break;
        }
        sigma2 = estimate;
        w.swap(next);
    }
    return std::sqrt(std::max(sigma2, 0.0));
}

}  // namespace

CorrelationOperator correlation_matrix(const JointDistribution& dist, int i, int j) {
    if (dist.num_variables() < 2) throw IndexOutOfRange("need at least two variables");
    if (i == j) throw IndexOutOfRange("i and j must differ");
    JointDistribution pair = marginal(dist, {i, j});
    int ci = pair.cardinality(0), cj = pair.cardinality(1);

    std::vector<double> px_full(static_cast<std::size_t>(ci), 0.0);
    std::vector<double> py_full(static_cast<std::size_t>(cj), 0.0);
    for (int x = 0; x < ci; ++x)
        for (int y = 0; y < cj; ++y) {
            double p = pair.prob({x, y});
            px_full[static_cast<std::size_t>(x)] += p;
            py_full[static_cast<std::size_t>(y)] += p;
        }

    CorrelationOperator op;
    for (int x = 0; x < ci; ++x)
        if (px_full[static_cast<std::size_t>(x)] > 0.0) {
            op.x_support.push_back(x);
            op.px.push_back(px_full[static_cast<std::size_t>(x)]);
        }
    for (int y = 0; y < cj; ++y)
        if (py_full[static_cast<std::size_t>(y)] > 0.0) {
            op.y_support.push_back(y);
            op.py.push_back(py_full[static_cast<std::size_t>(y)]);
        }

    op.q.assign(op.px.size() * op.py.size(), 0.0);
    for (std::size_t a = 0; a < op.x_support.size(); ++a)
        for (std::size_t b = 0; b < op.y_support.size(); ++b) {
            double p = pair.prob({op.x_support[a], op.y_support[b]});
            op.q[a * op.py.size() + b] = p / std::sqrt(op.px[a] * op.py[b]);
        }
    return op;
}

double top_singular_value(const CorrelationOperator& op) {
    return power_top_singular(op.q, op.px.size(), op.py.size());
}

double rho(const JointDistribution& dist, int i, int j) {
    CorrelationOperator op = correlation_matrix(dist, i, j);
    if (op.px.size() <= 1 || op.py.size() <= 1) return 0.0;  // point-mass convention

    // deflate the known top singular pair (sqrt px, sqrt py)
    std::vector<double> deflated = op.q;
    for (std::size_t a = 0; a < op.px.size(); ++a)
        for (std::size_t b = 0; b < op.py.size(); ++b)
            deflated[a * op.py.size() + b] -= std::sqrt(op.px[a] * op.py[b]);

    double sigma = power_top_singular(deflated, op.px.size(), op.py.size());
    return std::clamp(sigma, 0.0, 1.0);
}

double rho_conditional(const JointDistribution& dist, int i, int j, int z_index) {
    if (i == j || i == z_index || j == z_index)
        throw IndexOutOfRange("indices must be distinct");
    JointDistribution pz = marginal(dist, {z_index});
    double best = 0.0;
    for (int z = 0; z < pz.cardinality(0); ++z) {
        if (pz.prob({z}) <= 0.0) continue;
        JointDistribution slice = condition_on(dist, z_index, z);
        int si = i < z_index ? i : i - 1;
        int sj = j < z_index ? j : j - 1;
        best = std::max(best, rho(slice, si, sj));
    }
    return best;
}

}  // namespace corrtensor
