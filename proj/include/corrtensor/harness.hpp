#ifndef CORRTENSOR_HARNESS_HPP
#define CORRTENSOR_HARNESS_HPP

#include <string>
#include <vector>

#include "corrtensor/prob.hpp"

namespace corrtensor {

struct OracleUnavailable : ProbError { using ProbError::ProbError; };

enum class Measure { Rho, HcAux, LambdaRegion, GHelper, GSideInfo, GFork };

Measure measure_from_string(const std::string& name);
std::string measure_name(Measure measure);

/// One lambda sample (or the single scalar comparison). For region measures
/// `verdict_*` carry membership, for scalar/G measures `value_*` carry the
/// compared quantities. Samples inside the boundary band are excluded, not
/// counted as violations.
struct SampleRecord {
    std::vector<double> lambda;
    double value_base = 0.0;
    double value_other = 0.0;
    bool verdict_base = true;
    bool verdict_other = true;
    bool excluded = false;
    double violation = 0.0;
};

struct PropertyReport {
    int version = 1;
    std::string measure;
    std::string property;  // tensorization | data_processing | additivity
    std::string oracle_mode;  // exact | exhaustive | heuristic
    std::vector<SampleRecord> samples;
    double max_violation = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    bool passed = false;
};

/// Regroup an i.i.d. power so that the n copies of each source variable form
/// one composite variable (the shape region definitions quantify over).
JointDistribution grouped_power(const JointDistribution& p, int n,
                                std::size_t entry_cap = JointDistribution::kDefaultEntryCap);

/// Same regrouping for a product of two same-arity sources.
JointDistribution grouped_product(const JointDistribution& p, const JointDistribution& q);

/// Compare the measure on p and on its grouped n-fold power. Scalar measures
/// assert value agreement (for G-type: the certified super-additive side
/// always, the reverse side only under the exhaustive-grid oracle); region
/// measures assert verdict equality at low-discrepancy lambda samples in
/// [0, 1.5]^k, with a 1e-3 band excluded for search-based verdicts.
PropertyReport check_tensorization(Measure measure, const JointDistribution& p, int n,
                                   int lambda_samples, double tol, std::uint64_t seed);

/// Compare the measure before and after applying per-variable channels.
/// `channels` has one entry per variable; for measures with a distinguished
/// helper variable (the last one) the helper's channel must be the identity,
/// since the dual functionals fix the helper.
PropertyReport check_data_processing(Measure measure, const JointDistribution& p,
                                     const std::vector<Channel>& channels, int lambda_samples,
                                     double tol, std::uint64_t seed);

/// Additivity of the measure across an independent product of same-arity
/// sources: certified side always, two-sided under the exhaustive-grid oracle
/// (binary factors); rho checks the max rule and lambda verdicts the AND rule.
PropertyReport check_additivity(Measure measure, const JointDistribution& p,
                                const JointDistribution& q, int lambda_samples, double tol,
                                std::uint64_t seed);

}  // namespace corrtensor

#endif
