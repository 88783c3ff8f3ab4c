#ifndef CORRTENSOR_PROB_HPP
#define CORRTENSOR_PROB_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrtensor {

// ---- error types -----------------------------------------------------------

struct ProbError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : ProbError { using ProbError::ProbError; };
struct NotNormalized : ProbError { using ProbError::ProbError; };
struct NegativeProbability : ProbError { using ProbError::ProbError; };
struct EmptySubset : ProbError { using ProbError::ProbError; };
struct IndexOutOfRange : ProbError { using ProbError::ProbError; };
struct ZeroProbabilityEvent : ProbError { using ProbError::ProbError; };
struct SizeCapExceeded : ProbError { using ProbError::ProbError; };
struct CardinalityMismatch : ProbError { using ProbError::ProbError; };
struct OverlappingSets : ProbError { using ProbError::ProbError; };

// ---- Kahan summation -------------------------------------------------------

/// Compensated accumulator; all probability reductions go through this.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// ---- JointDistribution -----------------------------------------------------

/// A k-variate probability tensor over finite alphabets, dense, row-major.
/// Immutable after construction.
class JointDistribution {
public:
    static constexpr std::size_t kDefaultEntryCap = 10'000'000;

    JointDistribution(std::vector<int> cardinalities, std::vector<double> probabilities,
                      std::vector<std::string> labels = {});

    int num_variables() const { return static_cast<int>(cards_.size()); }
    const std::vector<int>& cardinalities() const { return cards_; }
    int cardinality(int i) const;
    const std::vector<double>& probabilities() const { return probs_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return probs_.size(); }

    double prob(const std::vector<int>& index) const;
    double operator[](std::size_t flat) const { return probs_[flat]; }

    /// Row-major flat index of a symbol tuple.
    std::size_t flat_index(const std::vector<int>& index) const;
    /// Inverse of flat_index.
    std::vector<int> unflatten(std::size_t flat) const;

private:
    std::vector<int> cards_;
    std::vector<double> probs_;
    std::vector<std::string> labels_;
};

JointDistribution from_tensor(const std::vector<int>& cardinalities,
                              const std::vector<double>& values,
                              std::vector<std::string> labels = {});

JointDistribution marginal(const JointDistribution& dist, const std::vector<int>& subset);

JointDistribution condition_on(const JointDistribution& dist, int index, int value);

JointDistribution product(const JointDistribution& p, const JointDistribution& q);

JointDistribution iid_power(const JointDistribution& p, int n,
                            std::size_t entry_cap = JointDistribution::kDefaultEntryCap);

/// Shannon entropy of the marginal on `subset`, in bits.
double entropy(const JointDistribution& dist, const std::vector<int>& subset);

/// I(X_S; X_T | X_W) in bits, clamped at 0.
double mutual_information(const JointDistribution& dist, const std::vector<int>& S,
                          const std::vector<int>& T, const std::vector<int>& W = {});

// ---- Channel ---------------------------------------------------------------

/// Conditional distribution p(output tuple | input tuple); rows indexed by
/// row-major input tuple, columns by row-major output tuple.
class Channel {
public:
    Channel(std::vector<int> input_cardinalities, std::vector<int> output_cardinalities,
            std::vector<std::vector<double>> kernel);

    const std::vector<int>& input_cardinalities() const { return in_cards_; }
    const std::vector<int>& output_cardinalities() const { return out_cards_; }
    const std::vector<std::vector<double>>& kernel() const { return kernel_; }
    std::size_t num_inputs() const { return kernel_.size(); }
    std::size_t num_outputs() const { return kernel_.empty() ? 0 : kernel_[0].size(); }

    static Channel identity(int cardinality);
    static Channel constant(int input_cardinality, int output_cardinality, int value);
    static Channel binary_symmetric(double crossover);

private:
    std::vector<int> in_cards_;
    std::vector<int> out_cards_;
    std::vector<std::vector<double>> kernel_;
};

/// Replace variable `index` of `dist` by the channel output.
JointDistribution apply_local_channel(const JointDistribution& dist, const Channel& channel,
                                      int index);

// ---- common constructions --------------------------------------------------

/// Doubly symmetric binary source: uniform bit through BSC(crossover).
JointDistribution dsbs(double crossover);

JointDistribution uniform_pair();
JointDistribution perfectly_correlated_bits();

}  // namespace corrtensor

#endif
