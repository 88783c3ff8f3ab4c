#include "corrtensor/localreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "corrtensor/optimizer.hpp"

namespace corrtensor {

namespace {

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

JacobiEigen jacobi_eigen(std::vector<double> matrix, int n, double tolerance) {
    JacobiEigen out;
    out.vectors.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) out.vectors[static_cast<std::size_t>(i * n + i)] = 1.0;

    auto a = [&](int r, int c) -> double& { return matrix[static_cast<std::size_t>(r * n + c)]; };
    auto v = [&](int r, int c) -> double& {
        return out.vectors[static_cast<std::size_t>(r * n + c)];
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= tolerance) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= tolerance * 1e-2) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int r = 0; r < n; ++r) {
                    double arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (int r = 0; r < n; ++r) {
                    double apr = a(p, r), aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                for (int r = 0; r < n; ++r) {
                    double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = a(i, i);
    return out;
}

double CondExpOperator::quadratic_form(const std::vector<double>& f) const {
    const std::size_t n = support.size();
    if (f.size() != n) throw DimensionMismatch("function length must match helper support");
    KahanSum mean;
    for (std::size_t x = 0; x < n; ++x) mean.add(weights[x] * f[x]);
    std::vector<double> coords(static_cast<std::size_t>(dim), 0.0);
    for (int c = 0; c < dim; ++c) {
        KahanSum s;
        for (std::size_t x = 0; x < n; ++x)
            s.add(basis[x * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)] *
                  std::sqrt(weights[x]) * (f[x] - mean.value()));
        coords[static_cast<std::size_t>(c)] = s.value();
    }
    double q = 0.0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            q += coords[static_cast<std::size_t>(r)] *
                 matrix[static_cast<std::size_t>(r * dim + c)] *
                 coords[static_cast<std::size_t>(c)];
    return q;
}

double CondExpOperator::top_eigenvalue() const {
    if (dim == 0) return 0.0;
    JacobiEigen eig = jacobi_eigen(matrix, dim);
    return *std::max_element(eig.values.begin(), eig.values.end());
}

std::vector<double> CondExpOperator::lift(const std::vector<double>& coords) const {
    const std::size_t n = support.size();
    std::vector<double> f(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        double phi = 0.0;
        for (int c = 0; c < dim; ++c)
            phi += basis[x * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)] *
                   coords[static_cast<std::size_t>(c)];
        f[x] = phi / std::sqrt(weights[x]);
    }
    return f;
}

namespace {

struct HelperView {
    std::vector<int> support;     // positive-probability helper symbols
    std::vector<double> weights;  // their probabilities
    std::vector<int> cell_to_support;  // full-joint cell -> support index (-1 off support)
};

HelperView helper_view(const JointDistribution& dist, int helper_index) {
    HelperView view;
    const auto& probs = dist.probabilities();
    if (helper_index < 0) {
        view.cell_to_support.assign(probs.size(), -1);
        for (std::size_t c = 0; c < probs.size(); ++c) {
            if (probs[c] <= 0.0) continue;
            view.cell_to_support[c] = static_cast<int>(view.support.size());
            view.support.push_back(static_cast<int>(c));
            view.weights.push_back(probs[c]);
        }
        return view;
    }
    JointDistribution ph = marginal(dist, {helper_index});
    std::vector<int> symbol_to_support(static_cast<std::size_t>(ph.cardinality(0)), -1);
    for (int h = 0; h < ph.cardinality(0); ++h) {
        if (ph.prob({h}) <= 0.0) continue;
        symbol_to_support[static_cast<std::size_t>(h)] = static_cast<int>(view.support.size());
        view.support.push_back(h);
        view.weights.push_back(ph.prob({h}));
    }
    view.cell_to_support.assign(probs.size(), -1);
    for (std::size_t c = 0; c < probs.size(); ++c)
        view.cell_to_support[c] =
            symbol_to_support[static_cast<std::size_t>(dist.unflatten(c)[helper_index])];
    return view;
}

// orthonormal basis of the complement of u = sqrt(weights), via Householder
std::vector<double> mean_zero_basis(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    const std::size_t dim = n - 1;
    std::vector<double> u(n);
    for (std::size_t x = 0; x < n; ++x) u[x] = std::sqrt(weights[x]);
    std::vector<double> v = u;
    v[0] -= 1.0;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    std::vector<double> basis(n * dim, 0.0);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t c = 0; c < dim; ++c) {
            double h = (x == c + 1 ? 1.0 : 0.0);
            if (vv > 1e-300) h -= 2.0 * v[x] * v[c + 1] / vv;
            basis[x * dim + c] = h;
        }
    return basis;
}

}  // namespace

CondExpOperator cond_exp_operator(const JointDistribution& dist, int helper_index, int i) {
    if (i < 0 || i >= dist.num_variables()) throw IndexOutOfRange("variable index out of range");
    HelperView view = helper_view(dist, helper_index);
    const std::size_t n = view.support.size();

    // joint[a][x]: p(X_i = a, helper = support[x])
    const int a_card = dist.cardinality(i);
    std::vector<double> joint(static_cast<std::size_t>(a_card) * n, 0.0);
    const auto& probs = dist.probabilities();
    for (std::size_t c = 0; c < probs.size(); ++c) {
        int x = view.cell_to_support[c];
        if (x < 0) continue;
        int a = dist.unflatten(c)[i];
        joint[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(x)] += probs[c];
    }
    std::vector<double> pa(static_cast<std::size_t>(a_card), 0.0);
    for (int a = 0; a < a_card; ++a)
        for (std::size_t x = 0; x < n; ++x)
            pa[static_cast<std::size_t>(a)] += joint[static_cast<std::size_t>(a) * n + x];

    // M[x][y] in weighted coordinates: quadratic form E[(E[f|X_i])^2]
    std::vector<double> m(n * n, 0.0);
    for (int a = 0; a < a_card; ++a) {
        double w = pa[static_cast<std::size_t>(a)];
        if (w <= 0.0) continue;
        for (std::size_t x = 0; x < n; ++x) {
            double jx = joint[static_cast<std::size_t>(a) * n + x];
            if (jx == 0.0) continue;
            for (std::size_t y = 0; y < n; ++y)
                m[x * n + y] += jx * joint[static_cast<std::size_t>(a) * n + y] /
                                (w * std::sqrt(view.weights[x] * view.weights[y]));
        }
    }

    CondExpOperator op;
    op.support = std::move(view.support);
    op.weights = std::move(view.weights);
    op.dim = static_cast<int>(n) - 1;
    op.basis = mean_zero_basis(op.weights);
    const std::size_t dim = static_cast<std::size_t>(op.dim);
    op.matrix.assign(dim * dim, 0.0);
    std::vector<double> mq(n * dim, 0.0);  // M * Q
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t c = 0; c < dim; ++c) {
            KahanSum s;
            for (std::size_t y = 0; y < n; ++y) s.add(m[x * n + y] * op.basis[y * dim + c]);
            mq[x * dim + c] = s.value();
        }
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            KahanSum s;
            for (std::size_t x = 0; x < n; ++x) s.add(op.basis[x * dim + r] * mq[x * dim + c]);
            op.matrix[r * dim + c] = s.value();
        }
    // enforce exact symmetry for the eigensolver
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = r + 1; c < dim; ++c) {
            double avg = 0.5 * (op.matrix[r * dim + c] + op.matrix[c * dim + r]);
            op.matrix[r * dim + c] = avg;
            op.matrix[c * dim + r] = avg;
        }
    return op;
}

namespace {

std::vector<int> region_variables(const JointDistribution& dist, int helper_index) {
    std::vector<int> vars;
    for (int i = 0; i < dist.num_variables(); ++i)
        if (helper_index < 0 || i != helper_index) vars.push_back(i);
    return vars;
}

// sum of coeff_i * A_i in the shared mean-zero basis; returns the operators too
CondExpOperator weighted_operator(const JointDistribution& dist, int helper_index,
                                  const std::vector<double>& coeffs) {
    std::vector<int> vars = region_variables(dist, helper_index);
    if (coeffs.size() != vars.size()) throw DimensionMismatch("lambda arity mismatch");
    CondExpOperator total;
    bool first = true;
    for (std::size_t idx = 0; idx < vars.size(); ++idx) {
        if (coeffs[idx] == 0.0 && !first) continue;
        CondExpOperator op = cond_exp_operator(dist, helper_index, vars[idx]);
        if (first) {
            total = std::move(op);
            for (double& v : total.matrix) v *= coeffs[idx];
            first = false;
        } else {
            for (std::size_t e = 0; e < total.matrix.size(); ++e)
                total.matrix[e] += coeffs[idx] * op.matrix[e];
        }
    }
    return total;
}

}  // namespace

MembershipResult lambda_member(const JointDistribution& dist, int helper_index,
                               const std::vector<double>& lambdas) {
    for (double l : lambdas)
        if (l < 0.0) throw IndexOutOfRange("lambdas must be non-negative");
    CondExpOperator total = weighted_operator(dist, helper_index, lambdas);
    MembershipResult result;
    if (total.dim == 0) {
        result.margin = -1.0;
        return result;
    }
    JacobiEigen eig = jacobi_eigen(total.matrix, total.dim);
    std::size_t top = static_cast<std::size_t>(
        std::max_element(eig.values.begin(), eig.values.end()) - eig.values.begin());
    result.margin = eig.values[top] - 1.0;
    if (eig.values[top] > 1.0 + 1e-10) {
        result.verdict = Verdict::CertifiedNonMember;
        std::vector<double> coords(static_cast<std::size_t>(total.dim));
        for (int r = 0; r < total.dim; ++r)
            coords[static_cast<std::size_t>(r)] =
                eig.vectors[static_cast<std::size_t>(r * total.dim) + top];
        result.function_witness = total.lift(coords);
    }
    return result;
}

double lambda_boundary(const JointDistribution& dist, int helper_index,
                       const std::vector<double>& direction) {
    bool nonzero = false;
    for (double d : direction) {
        if (d < 0.0) throw IndexOutOfRange("direction must be in the non-negative orthant");
        if (d > 0.0) nonzero = true;
    }
    if (!nonzero) throw IndexOutOfRange("direction must be nonzero");
    CondExpOperator total = weighted_operator(dist, helper_index, direction);
    double top = total.top_eigenvalue();
    if (top <= 1e-14) return std::numeric_limits<double>::infinity();
    return 1.0 / top;
}

PerturbationReport perturbation_second_derivative(const JointDistribution& dist, int helper_index,
                                                  const std::vector<double>& lambdas,
                                                  const std::vector<double>& f,
                                                  const std::vector<double>& epsilons) {
    HelperView view = helper_view(dist, helper_index);
    const std::size_t n = view.support.size();
    if (f.size() != n) throw DimensionMismatch("function length must match helper support");

    KahanSum mean;
    for (std::size_t x = 0; x < n; ++x) mean.add(view.weights[x] * f[x]);
    if (std::abs(mean.value()) > 1e-9)
        throw InvalidPerturbation("perturbation function must have zero mean");

    std::vector<int> vars = region_variables(dist, helper_index);
    if (lambdas.size() != vars.size()) throw DimensionMismatch("lambda arity mismatch");

    double ef2 = 0.0;
    for (std::size_t x = 0; x < n; ++x) ef2 += view.weights[x] * f[x] * f[x];
    double qform = ef2;
    for (std::size_t idx = 0; idx < vars.size(); ++idx) {
        if (lambdas[idx] == 0.0) continue;
        CondExpOperator op = cond_exp_operator(dist, helper_index, vars[idx]);
        qform -= lambdas[idx] * op.quadratic_form(f);
    }
    qform /= kLn2;

    auto t_of = [&](double eps) {
        const auto& probs = dist.probabilities();
        std::vector<double> scaled(probs.size(), 0.0);
        for (std::size_t c = 0; c < probs.size(); ++c) {
            int x = view.cell_to_support[c];
            if (x < 0) continue;
            double factor = 1.0 + eps * f[static_cast<std::size_t>(x)];
            if (factor < -1e-12)
                throw InvalidPerturbation("epsilon too large: perturbed mass negative");
            scaled[c] = probs[c] * std::max(factor, 0.0);
        }
        JointDistribution q(dist.cardinalities(), std::move(scaled));
        std::vector<int> helper_vars;
        if (helper_index < 0)
            for (int i = 0; i < dist.num_variables(); ++i) helper_vars.push_back(i);
        else
            helper_vars.push_back(helper_index);
        double t = -entropy(q, helper_vars);
        for (std::size_t idx = 0; idx < vars.size(); ++idx)
            t += lambdas[idx] * entropy(q, {vars[idx]});
        return t;
    };

    PerturbationReport report;
    report.quadratic_form = qform;
    double t0 = t_of(0.0);
    for (double eps : epsilons) {
        if (eps <= 0.0) throw InvalidPerturbation("epsilon must be positive");
        PerturbationProbe probe;
        probe.epsilon = eps;
        probe.finite_difference = (t_of(eps) - 2.0 * t0 + t_of(-eps)) / (eps * eps);
        probe.relative_error =
            std::abs(probe.finite_difference - qform) / std::max(std::abs(qform), 1e-12);
        report.probes.push_back(probe);
    }
    return report;
}

namespace {

// Var over groups of the group-conditional mean of f, plus within-group
// statistics: given masses m_g and weighted sums s_g = sum p f per group.
struct GroupStats {
    std::vector<double> mass;
    std::vector<double> mean;  // E[f | group], 0 mass -> 0
};

GroupStats group_stats(const JointDistribution& dist, int f_var, const std::vector<double>& f,
                       const std::vector<int>& group_vars) {
    std::size_t groups = 1;
    for (int g : group_vars) groups *= static_cast<std::size_t>(dist.cardinality(g));
    GroupStats st;
    st.mass.assign(groups, 0.0);
    std::vector<double> sum(groups, 0.0);
    const auto& probs = dist.probabilities();
    for (std::size_t c = 0; c < probs.size(); ++c) {
        if (probs[c] == 0.0) continue;
        std::vector<int> idx = dist.unflatten(c);
        std::size_t g = 0;
        for (int gv : group_vars)
            g = g * static_cast<std::size_t>(dist.cardinality(gv)) +
                static_cast<std::size_t>(idx[static_cast<std::size_t>(gv)]);
        st.mass[g] += probs[c];
        sum[g] += probs[c] * f[static_cast<std::size_t>(idx[static_cast<std::size_t>(f_var)])];
    }
    st.mean.assign(groups, 0.0);
    for (std::size_t g = 0; g < groups; ++g)
        if (st.mass[g] > 0.0) st.mean[g] = sum[g] / st.mass[g];
    return st;
}

double var_of_means(const GroupStats& st) {
    double mu = 0.0;
    for (std::size_t g = 0; g < st.mass.size(); ++g) mu += st.mass[g] * st.mean[g];
    double var = 0.0;
    for (std::size_t g = 0; g < st.mass.size(); ++g)
        var += st.mass[g] * (st.mean[g] - mu) * (st.mean[g] - mu);
    return var;
}

// E over the coarse grouping of the variance, within each coarse group, of the
// fine-group conditional means; fine groups must refine coarse ones.
double expected_within_var(const GroupStats& fine, const GroupStats& coarse, std::size_t refine) {
    double total = 0.0;
    for (std::size_t g = 0; g < fine.mass.size(); ++g) {
        std::size_t cg = g / refine;
        double d = fine.mean[g] - coarse.mean[cg];
        total += fine.mass[g] * d * d;
    }
    return total;
}

}  // namespace

VarianceIdentityReport variance_identity_checks(const JointDistribution& dist, int trials,
                                                std::uint64_t seed) {
    if (dist.num_variables() < 2) throw DimensionMismatch("need at least two variables");
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 3);
    std::normal_distribution<double> gauss(0.0, 1.0);

    VarianceIdentityReport report;
    report.trials = trials;
    report.min_markov_slack = std::numeric_limits<double>::infinity();

    const bool has_c = dist.num_variables() >= 3;
    for (int t = 0; t < trials; ++t) {
        // law of total variance on (A, B, C) = variables (0, 1, 2)
        std::vector<double> f(static_cast<std::size_t>(dist.cardinality(0)));
        for (double& v : f) v = gauss(rng);
        GroupStats by_b = group_stats(dist, 0, f, {1});
        double lhs, rhs;
        if (has_c) {
            GroupStats by_bc = group_stats(dist, 0, f, {1, 2});
            lhs = var_of_means(by_bc);
            rhs = var_of_means(by_b) +
                  expected_within_var(by_bc, by_b, static_cast<std::size_t>(dist.cardinality(2)));
        } else {
            lhs = var_of_means(by_b);
            rhs = var_of_means(by_b);
        }
        report.max_total_variance_residual =
            std::max(report.max_total_variance_residual, std::abs(lhs - rhs));

        // conditional-variance inequality on a constructed chain C - D - E:
        // joint p(a,c,d,e) = p(c,d) p(e|d) p(a|c,d,e), binary alphabets
        std::vector<double> pcd = random_simplex_point(rng, 4);
        std::vector<double> pe(4), pa(16);
        std::uniform_real_distribution<double> unif(0.05, 0.95);
        for (int d = 0; d < 2; ++d) pe[static_cast<std::size_t>(2 * d)] = unif(rng);
        for (int d = 0; d < 2; ++d)
            pe[static_cast<std::size_t>(2 * d + 1)] = 1.0 - pe[static_cast<std::size_t>(2 * d)];
        for (int r = 0; r < 8; ++r) {
            pa[static_cast<std::size_t>(2 * r)] = unif(rng);
            pa[static_cast<std::size_t>(2 * r + 1)] = 1.0 - pa[static_cast<std::size_t>(2 * r)];
        }
        std::vector<double> joint(16, 0.0);  // (a, c, d, e)
        for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
                for (int e = 0; e < 2; ++e)
                    for (int a = 0; a < 2; ++a) {
                        int cde = ((c * 2) + d) * 2 + e;
                        joint[static_cast<std::size_t>(((a * 2 + c) * 2 + d) * 2 + e)] =
                            pcd[static_cast<std::size_t>(c * 2 + d)] *
                            pe[static_cast<std::size_t>(d * 2 + e)] *
                            pa[static_cast<std::size_t>(cde * 2 + a)];
                    }
        JointDistribution chain({2, 2, 2, 2}, std::move(joint));
        std::vector<double> g{gauss(rng), gauss(rng)};
        // LHS = E_{DE} Var_{C|DE} E[g|CDE]; RHS = E_D Var_{C|D} E[g|CD]
        GroupStats by_cde = group_stats(chain, 0, g, {1, 2, 3});
        GroupStats by_de = group_stats(chain, 0, g, {2, 3});
        GroupStats by_cd = group_stats(chain, 0, g, {1, 2});
        GroupStats by_d = group_stats(chain, 0, g, {2});
        // fine groups are keyed (c, rest) with c in the high bits, so the
        // outer group index is fg mod |outer|
        auto within = [&](const GroupStats& fine, const GroupStats& outer) {
            double total = 0.0;
            for (std::size_t fg = 0; fg < fine.mass.size(); ++fg) {
                double d = fine.mean[fg] - outer.mean[fg % outer.mass.size()];
                total += fine.mass[fg] * d * d;
            }
            return total;
        };
        double lhs4 = within(by_cde, by_de);
        double rhs4 = within(by_cd, by_d);
        report.min_markov_slack = std::min(report.min_markov_slack, lhs4 - rhs4);
    }
    if (!std::isfinite(report.min_markov_slack)) report.min_markov_slack = 0.0;
    return report;
}

}  // namespace corrtensor
