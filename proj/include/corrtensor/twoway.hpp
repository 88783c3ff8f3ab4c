#ifndef CORRTENSOR_TWOWAY_HPP
#define CORRTENSOR_TWOWAY_HPP

#include <vector>

#include "corrtensor/dualreg.hpp"
#include "corrtensor/membership.hpp"
#include "corrtensor/prob.hpp"

namespace corrtensor {

struct EtaOutOfRange : ProbError { using ProbError::ProbError; };
struct PreconditionNotZeroCapacity : ProbError { using ProbError::ProbError; };
struct AlphabetTooLarge : ProbError { using ProbError::ProbError; };

/// Binary two-way channel biasing y1 xor y2 toward x1 and x2: entries
/// (1+eta)/4 on agreement, (1-eta)/4 otherwise.
Channel pr_box(double eta);

/// Per-input no-signaling test: p(y1 | x1, x2) independent of x2 and
/// p(y2 | x1, x2) independent of x1, within `tol`. Exact (no optimization).
struct ZeroCapacityReport {
    bool zero_capacity = false;
    double max_deviation = 0.0;
};
ZeroCapacityReport zero_capacity_check(const Channel& channel, double tol = 1e-12);

/// Channel functional: max over input pairs of the bipartite dual G of the
/// conditional output distribution.
struct GzEvaluation {
    double value = 0.0;
    std::vector<int> argmax_input;
    GEvaluation inner;  // evaluation at the argmax input
};
GzEvaluation g_z_channel(const Channel& channel, double lambda1, double lambda2,
                         const OptimOptions& base = {});

/// Same functional with each per-input G taken as the max of local search and
/// an exhaustive channel grid (per-cardinality steps).
GzEvaluation g_z_channel_grid(const Channel& channel, double lambda1, double lambda2,
                              const std::vector<std::pair<int, double>>& card_steps,
                              const OptimOptions& base = {});

/// Grid schedule that stays exhaustive yet affordable for 4-row helpers.
std::vector<std::pair<int, double>> default_gz_grid();

/// Impossibility witness for simulating `to` from `from`: a lambda whose
/// best-found G of `from` is <= tol (heuristic member) while the certified
/// G of `to` exceeds tol. Scans a 41x41 grid of [0,1]^2 plus random points.
struct SimulationCheck {
    bool witness_found = false;
    std::vector<double> witness_lambda;
    double g_from = 0.0;  // exhaustive-grid value at the witness
    double g_to = 0.0;    // certified violation at the witness
    std::vector<int> argmax_input_to;
    double grid_resolution = 0.025;
};
SimulationCheck simulation_precondition(const Channel& from, const Channel& to,
                                        const std::vector<std::vector<double>>& extra_lambdas = {},
                                        std::uint64_t seed = 0);

/// Numerical check that the dual G of the lifted pair (A Y1, B Y2) is bounded
/// by G(A, B) + G(channel) + lambda1 I(X2;Y1|X1) + lambda2 I(X1;Y2|X2), with
/// X1 = f(A), X2 = g(B). The left side is a certified lower bound and the
/// right side an exhaustive-grid estimate, so search gaps cannot fake a
/// violation. Binary alphabets only.
struct SourceChannelBoundReport {
    double lhs_lower = 0.0;
    double g_source = 0.0;
    double g_channel = 0.0;
    double correction1 = 0.0;  // lambda1 I(X2;Y1|X1)
    double correction2 = 0.0;  // lambda2 I(X1;Y2|X2)
    double rhs_total = 0.0;
    bool holds = false;
};
SourceChannelBoundReport source_channel_bound_check(const JointDistribution& p_ab,
                                                    const std::vector<int>& f_map,
                                                    const std::vector<int>& g_map,
                                                    const Channel& channel, double lambda1,
                                                    double lambda2,
                                                    const OptimOptions& base = {},
                                                    const std::vector<std::pair<int, double>>&
                                                        grid_schedule = default_gz_grid());

}  // namespace corrtensor

#endif
