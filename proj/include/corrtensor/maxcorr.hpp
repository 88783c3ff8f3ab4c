#ifndef CORRTENSOR_MAXCORR_HPP
#define CORRTENSOR_MAXCORR_HPP

#include <vector>

#include "corrtensor/prob.hpp"

namespace corrtensor {

/// Q[x,y] = p(x,y)/sqrt(p(x)p(y)) restricted to the support of the (i,j)
/// marginal; its second singular value is the maximal correlation.
struct CorrelationOperator {
    std::vector<int> x_support;  // original symbols of variable i
    std::vector<int> y_support;  // original symbols of variable j
    std::vector<double> px;      // marginal on x_support
    std::vector<double> py;      // marginal on y_support
    std::vector<double> q;       // |x_support| x |y_support|, row-major

    double at(std::size_t x, std::size_t y) const { return q[x * py.size() + y]; }
};

CorrelationOperator correlation_matrix(const JointDistribution& dist, int i, int j);

/// Largest singular value of Q (should be 1, achieved by constants).
double top_singular_value(const CorrelationOperator& op);

/// Maximal correlation rho(X_i, X_j): second singular value of Q, in [0,1].
/// Point-mass marginals give 0 by convention.
double rho(const JointDistribution& dist, int i, int j);

/// max over z with p(z)>0 of rho on the conditioned slice.
double rho_conditional(const JointDistribution& dist, int i, int j, int z_index);

}  // namespace corrtensor

#endif
