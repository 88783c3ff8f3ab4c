#ifndef CORRTENSOR_DUALREG_HPP
#define CORRTENSOR_DUALREG_HPP

#include <optional>
#include <vector>

#include "corrtensor/optimizer.hpp"
#include "corrtensor/prob.hpp"

namespace corrtensor {

struct UnboundedObjective : ProbError { using ProbError::ProbError; };
struct GZeroViolated : ProbError { using ProbError::ProbError; };
struct AlternativeFormInvalid : ProbError { using ProbError::ProbError; };

/// Finite list of rate tuples; recession directions default to the
/// non-negative orthant axes (rates can always be increased).
struct RatePointSet {
    std::vector<std::vector<double>> points;
    std::vector<std::vector<double>> recession_directions;  // empty => axes

    std::size_t dimension() const { return points.empty() ? 0 : points[0].size(); }
};

/// Linear objective sum lambda_i R_i + sum theta_S H(X_S); the free/fixed
/// masks record which coefficients are region coordinates.
struct DualObjective {
    std::vector<double> lambda;
    std::vector<bool> lambda_free;                           // empty => all fixed
    std::vector<std::pair<std::vector<int>, double>> theta;  // subset S -> theta_S
    std::vector<bool> theta_free;
    std::vector<double> subset_entropies;                    // H(X_S) per theta entry

    double constant_part() const;
};

/// Best-found value of a dual functional G with its maximizer.
struct GEvaluation {
    double value = 0.0;               // bits
    std::optional<AuxChannel> maximizer;
    std::optional<std::vector<double>> rate_point;
    bool lower_bound_only = false;    // true when found by local search
    int restarts_used = 0;
    long long iterations = 0;
};

/// Exact maximum of the linear objective over the finite point set; throws
/// UnboundedObjective when a recession direction makes the objective +inf.
GEvaluation generic_dual_g(const RatePointSet& rate_points, const DualObjective& objective);

/// max over points with den > 1e-12 of num/den; 0 on the empty max.
double initial_efficiency(const RatePointSet& rate_points, int num_rate, int den_rate);

/// Objective of the one-side-information dual: -I(X_h;U) + sum lambda_i I(X_i;U)
/// with U conditioned on the helper. helper_index = -1 means X_{k+1} = X_{[k]}
/// (the full tuple); lambdas then run over all variables, otherwise over the
/// non-helper variables in increasing index order.
AuxObjective make_side_info_objective(const JointDistribution& dist, int helper_index,
                                      const std::vector<double>& lambdas);

/// Standard deterministic seeds for the side-information search: U constant,
/// U = each single variable, U = the helper value.
std::vector<AuxChannel> side_info_seeds(const JointDistribution& dist, int helper_index,
                                        int aux_cardinality);

/// Helper dual: max over p(u|x_j) of lambda I(X_i;U) - I(X_j;U).
GEvaluation g_helper(const JointDistribution& dist, int i, int j, double lambda,
                     const OptimOptions& base = {});

/// One-side-information dual G^s (local search lower bound).
GEvaluation g_side_info(const JointDistribution& dist, int helper_index,
                        const std::vector<double>& lambdas, const OptimOptions& base = {});

enum class ForkForm { Corner, Alternative };

/// Fork dual for k=2 over p(u|x_3); the Alternative form requires
/// I(X1;X2) <= 1e-9.
GEvaluation g_fork_k2(const JointDistribution& dist, double lambda1, double lambda2,
                      ForkForm form = ForkForm::Corner, const OptimOptions& base = {});

AuxObjective make_fork_objective(const JointDistribution& dist, double lambda1, double lambda2,
                                 ForkForm form);

/// Exhaustive-grid maximization of an aux objective over |U| / step choices;
/// returns the best over all of them.
GridResult grid_max_over(const AuxObjective& objective,
                         const std::vector<std::pair<int, double>>& card_steps);

/// Append U (drawn from `channel` conditioned on the helper) as the last
/// variable of the distribution.
JointDistribution extend_with_aux(const JointDistribution& dist, int helper_index,
                                  const AuxChannel& channel);

}  // namespace corrtensor

#endif
