#ifndef CORRTENSOR_MEMBERSHIP_HPP
#define CORRTENSOR_MEMBERSHIP_HPP

#include <optional>
#include <vector>

#include "corrtensor/optimizer.hpp"

namespace corrtensor {

/// Non-membership is certified (the witness is a proof); membership is the
/// best a bounded search can say.
enum class Verdict { CertifiedNonMember, HeuristicMember };

/// Witness function pair for the Schatten-norm characterization, defined on
/// the supports of the two variables.
struct FunctionPairWitness {
    std::vector<double> f;
    std::vector<double> g;
};

struct MembershipResult {
    Verdict verdict = Verdict::HeuristicMember;
    /// Best-found value of the relevant G; <= tol is consistent with membership.
    double margin = 0.0;
    std::optional<AuxChannel> aux_witness;
    std::optional<FunctionPairWitness> function_pair_witness;
    /// Eigen-route witness: a mean-zero function on the helper support.
    std::optional<std::vector<double>> function_witness;
    int restarts_used = 0;
    double grid_resolution = 0.0;  // 0 when local search only

    bool is_member() const { return verdict == Verdict::HeuristicMember; }
};

/// Tolerance on G values (bits) shared by every membership verdict.
inline constexpr double kMembershipTol = 1e-6;

}  // namespace corrtensor

#endif
