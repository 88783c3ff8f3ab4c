#ifndef CORRTENSOR_RIBBON_HPP
#define CORRTENSOR_RIBBON_HPP

#include <vector>

#include "corrtensor/dualreg.hpp"
#include "corrtensor/membership.hpp"
#include "corrtensor/prob.hpp"

namespace corrtensor {

struct LambdaOutOfRange : ProbError { using ProbError::ProbError; };
struct UnknownMethod : ProbError { using ProbError::ProbError; };

/// Schatten-norm membership test for the bipartite ribbon on variables (i, j):
/// searches nonnegative f, g maximizing E[fg] - ||f||_{1/l1} ||g||_{1/l2}.
/// l = 0 is handled as the essential-supremum norm.
MembershipResult hc_member_norms(const JointDistribution& dist, double lambda1, double lambda2,
                                 int i = 0, int j = 1, std::uint64_t seed = 0,
                                 int restarts = 32);

/// Auxiliary-variable membership for the (multipartite) hypercontractivity
/// ribbon: sign of the best-found G^s with X_{k+1} = X_{[k]}.
MembershipResult hc_member_aux(const JointDistribution& dist, const std::vector<double>& lambdas,
                               const OptimOptions& base = {});

/// Conditional ribbon: intersection over z-slices; lambdas index the
/// non-z variables in increasing order.
MembershipResult hc_member_conditional(const JointDistribution& dist,
                                       const std::vector<double>& lambdas, int z_index,
                                       const OptimOptions& base = {});

struct BoundaryPoint {
    std::vector<double> direction;
    double crossing = 0.0;
    double margin_below = 0.0;  // best-found G just inside
    double margin_above = 0.0;  // best-found G just outside
    bool monotone = true;       // no membership anomaly observed along the ray
};

/// Ray tracing of the ribbon boundary by bisection; membership monotonicity
/// along each ray is verified on the scan samples, not assumed.
std::vector<BoundaryPoint> hc_boundary_sample(const JointDistribution& dist,
                                              const std::vector<std::vector<double>>& directions,
                                              double resolution,
                                              const OptimOptions& base = {});

enum class SStarMethod { Direct, Ribbon, Lce };

SStarMethod s_star_method_from_string(const std::string& name);

/// s*(X_j -> X_i): supremum of I(X_i;U)/I(X_j;U) over channels p(u|x_j).
double s_star(const JointDistribution& dist, int i, int j,
              SStarMethod method = SStarMethod::Direct, const OptimOptions& base = {});

/// max over z-slices of the direct s*.
double s_star_conditional(const JointDistribution& dist, int i, int j, int z_index,
                          const OptimOptions& base = {});

struct SecureSimResult {
    bool witness_found = false;
    std::vector<double> witness_lambda;
    double source_margin = 0.0;  // best-found conditional G of the source
    double target_margin = 0.0;  // certified violation for the target
};

/// Necessary condition for secure simulation of the bipartite target from
/// (X1, X2 | Z): a lambda inside the conditional source ribbon but certifiably
/// outside the target ribbon proves impossibility.
SecureSimResult secure_sim_precondition(const JointDistribution& dist_x1x2z,
                                        const JointDistribution& dist_y1y2,
                                        const std::vector<std::vector<double>>& lambda_samples,
                                        const OptimOptions& base = {});

}  // namespace corrtensor

#endif
