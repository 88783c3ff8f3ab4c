#ifndef CORRTENSOR_OPTIMIZER_HPP
#define CORRTENSOR_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "corrtensor/prob.hpp"

namespace corrtensor {

/// Row-stochastic matrix p(u|h), rows_ x cols_ row-major. The optimization
/// variable for every auxiliary-channel functional.
struct AuxChannel {
    int rows = 0;
    int cols = 0;
    std::vector<double> w;  // rows*cols, each row a probability vector

    double& at(int h, int u) { return w[static_cast<std::size_t>(h * cols + u)]; }
    double at(int h, int u) const { return w[static_cast<std::size_t>(h * cols + u)]; }

    static AuxChannel constant(int rows, int cols);
    static AuxChannel deterministic(int rows, int cols, const std::vector<int>& map);
};

/// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v);

/// Objective of the form  constant + sum_T coeff_T * I(U; X_T)  in bits,
/// where U ranges over channels from a helper variable (or the full tuple).
class AuxObjective {
public:
    /// helper_index: variable U is conditioned on; -1 means the full tuple.
    AuxObjective(const JointDistribution& dist, int helper_index,
                 std::vector<std::pair<std::vector<int>, double>> terms,
                 double constant = 0.0);

    int helper_alphabet() const { return helper_card_; }
    double constant() const { return constant_; }

    /// Objective value in bits.
    double value(const AuxChannel& channel) const;
    /// Gradient (bits) w.r.t. channel entries; same layout as channel.w.
    void gradient(const AuxChannel& channel, std::vector<double>& grad) const;

    /// I(U; X_T) in bits for term `t` alone (diagnostics / ratio objectives).
    double term_information(const AuxChannel& channel, std::size_t t) const;
    std::size_t num_terms() const { return terms_.size(); }

private:
    struct Term {
        double coeff;
        int t_card;
        std::vector<double> joint;     // t_card x helper_card, p(X_T = t, h)
        std::vector<double> marginal;  // p(X_T = t)
    };

    double term_mi(const Term& term, const AuxChannel& channel,
                   const std::vector<double>& q) const;
    std::vector<double> output_marginal(const AuxChannel& channel) const;

    int helper_card_ = 0;
    std::vector<double> helper_prob_;
    std::vector<Term> terms_;
    double constant_ = 0.0;
};

struct OptimOptions {
    int aux_cardinality = 2;
    int restarts = 32;
    int max_iterations = 2000;
    double gradient_tolerance = 1e-9;
    std::uint64_t seed = 0;
    /// Deterministic initial channels tried before the random restarts.
    std::vector<AuxChannel> seeds;
};

struct OptimResult {
    double value = 0.0;  // bits, recomputed from the maximizer
    AuxChannel maximizer;
    int restarts_used = 0;
    long long iterations = 0;
};

/// Multi-restart projected-gradient ascent on the channel simplex.
OptimResult maximize_aux(const AuxObjective& objective, const OptimOptions& options);

/// One ascent from a single start (for callers managing their own restarts).
OptimResult ascend_from(const AuxObjective& objective, const AuxChannel& start,
                        int max_iterations = 2000, double gradient_tolerance = 1e-9);

/// Ascent on a ratio numerator(W)/denominator(W) of single-term informations;
/// channels with denominator below `denominator_floor` are skipped.
struct RatioResult {
    double value = 0.0;
    AuxChannel maximizer;
    bool found = false;
};
RatioResult maximize_ratio(const AuxObjective& numerator, const AuxObjective& denominator,
                           const OptimOptions& options, double denominator_floor = 1e-9);

/// Exhaustive enumeration of channels on a simplex grid of the given step,
/// one fixed auxiliary cardinality. `step` should divide 1 evenly.
struct GridResult {
    double value = 0.0;
    AuxChannel maximizer;
    long long evaluations = 0;
};
GridResult grid_maximize(const std::function<double(const AuxChannel&)>& objective, int rows,
                         int aux_cardinality, double step);

// ---- randomness ------------------------------------------------------------

/// Dirichlet(1) random probability vector.
std::vector<double> random_simplex_point(std::mt19937_64& rng, int dim);

AuxChannel random_channel(std::mt19937_64& rng, int rows, int cols);

/// Random joint distribution with the given cardinalities (Dirichlet(1)).
JointDistribution random_distribution(std::mt19937_64& rng, const std::vector<int>& cards);

/// Random single-variable channel with the given input/output sizes.
Channel random_local_channel(std::mt19937_64& rng, int in_card, int out_card);

/// Halton low-discrepancy point in [0, scale]^dim, index >= 0.
std::vector<double> halton_point(int index, int dim, double scale = 1.0);

}  // namespace corrtensor

#endif
