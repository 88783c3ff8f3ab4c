#include "corrtensor/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace corrtensor {

namespace {

std::size_t checked_tensor_size(const std::vector<int>& cards) {
    if (cards.empty()) throw DimensionMismatch("cardinalities must be non-empty");
    std::size_t n = 1;
    for (int c : cards) {
        if (c <= 0) throw DimensionMismatch("cardinalities must be positive");
        n *= static_cast<std::size_t>(c);
    }
    return n;
}

void check_subset(const JointDistribution& dist, const std::vector<int>& subset) {
    for (std::size_t a = 0; a < subset.size(); ++a) {
        const int i = subset[a];
        if (i < 0 || i >= dist.num_variables())
            throw IndexOutOfRange("variable index " + std::to_string(i) + " out of range");
        for (std::size_t b = a + 1; b < subset.size(); ++b)
            if (subset[b] == i)
                throw OverlappingSets("variable index " + std::to_string(i) + " repeated");
    }
}

double xlogx(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

JointDistribution::JointDistribution(std::vector<int> cardinalities,
                                     std::vector<double> probabilities,
                                     std::vector<std::string> labels)
    : cards_(std::move(cardinalities)), probs_(std::move(probabilities)),
      labels_(std::move(labels)) {
    std::size_t n = checked_tensor_size(cards_);
    if (probs_.size() != n)
        throw DimensionMismatch("tensor length " + std::to_string(probs_.size()) +
                                " does not match alphabet product " + std::to_string(n));
    KahanSum total;
    for (double& p : probs_) {
        if (p < 0.0) {
            if (p < -1e-15) throw NegativeProbability("negative probability entry");
            p = 0.0;
        }
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > 1e-9)
        throw NotNormalized("probabilities sum to " + std::to_string(total.value()));
}

int JointDistribution::cardinality(int i) const {
    if (i < 0 || i >= num_variables()) throw IndexOutOfRange("variable index out of range");
    return cards_[i];
}

std::size_t JointDistribution::flat_index(const std::vector<int>& index) const {
    if (index.size() != cards_.size()) throw DimensionMismatch("index arity mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < cards_.size(); ++i) {
        if (index[i] < 0 || index[i] >= cards_[i]) throw IndexOutOfRange("symbol out of range");
        flat = flat * static_cast<std::size_t>(cards_[i]) + static_cast<std::size_t>(index[i]);
    }
    return flat;
}

std::vector<int> JointDistribution::unflatten(std::size_t flat) const {
    std::vector<int> index(cards_.size());
    for (std::size_t i = cards_.size(); i-- > 0;) {
        index[i] = static_cast<int>(flat % static_cast<std::size_t>(cards_[i]));
        flat /= static_cast<std::size_t>(cards_[i]);
    }
    return index;
}

double JointDistribution::prob(const std::vector<int>& index) const {
    return probs_[flat_index(index)];
}

JointDistribution from_tensor(const std::vector<int>& cardinalities,
                              const std::vector<double>& values,
                              std::vector<std::string> labels) {
    return JointDistribution(cardinalities, values, std::move(labels));
}

JointDistribution marginal(const JointDistribution& dist, const std::vector<int>& subset) {
    if (subset.empty()) throw EmptySubset("marginal over empty subset");
    check_subset(dist, subset);

    std::vector<int> out_cards;
    out_cards.reserve(subset.size());
    for (int i : subset) out_cards.push_back(dist.cardinality(i));
    std::size_t out_size = 1;
    for (int c : out_cards) out_size *= static_cast<std::size_t>(c);

    std::vector<KahanSum> sums(out_size);
    const auto& probs = dist.probabilities();
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        if (probs[flat] == 0.0) continue;
        std::vector<int> full = dist.unflatten(flat);
        std::size_t out = 0;
        for (std::size_t j = 0; j < subset.size(); ++j)
            out = out * static_cast<std::size_t>(out_cards[j]) +
                  static_cast<std::size_t>(full[subset[j]]);
        sums[out].add(probs[flat]);
    }
    std::vector<double> out_probs(out_size);
    for (std::size_t i = 0; i < out_size; ++i) out_probs[i] = sums[i].value();
    return JointDistribution(out_cards, std::move(out_probs));
}

JointDistribution condition_on(const JointDistribution& dist, int index, int value) {
    if (index < 0 || index >= dist.num_variables())
        throw IndexOutOfRange("conditioning index out of range");
    if (value < 0 || value >= dist.cardinality(index))
        throw IndexOutOfRange("conditioning value out of range");

    KahanSum mass;
    const auto& probs = dist.probabilities();
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        if (dist.unflatten(flat)[index] == value) mass.add(probs[flat]);
    }
    double pz = mass.value();
    if (pz <= 0.0) throw ZeroProbabilityEvent("conditioning on zero-probability event");

    std::vector<int> out_cards;
    for (int i = 0; i < dist.num_variables(); ++i)
        if (i != index) out_cards.push_back(dist.cardinality(i));
    if (out_cards.empty()) out_cards.push_back(1);  // degenerate: all variables conditioned away

    std::size_t out_size = 1;
    for (int c : out_cards) out_size *= static_cast<std::size_t>(c);
    std::vector<double> out_probs(out_size, 0.0);
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        std::vector<int> full = dist.unflatten(flat);
        if (full[index] != value) continue;
        std::size_t out = 0, j = 0;
        for (int i = 0; i < dist.num_variables(); ++i) {
            if (i == index) continue;
            out = out * static_cast<std::size_t>(out_cards[j]) + static_cast<std::size_t>(full[i]);
            ++j;
        }
        out_probs[out] += probs[flat] / pz;
    }
    // renormalize exactly against rounding in the division
    KahanSum total;
    for (double p : out_probs) total.add(p);
    for (double& p : out_probs) p /= total.value();
    return JointDistribution(out_cards, std::move(out_probs));
}

JointDistribution product(const JointDistribution& p, const JointDistribution& q) {
    std::vector<int> cards = p.cardinalities();
    cards.insert(cards.end(), q.cardinalities().begin(), q.cardinalities().end());
    std::vector<double> probs;
    probs.reserve(p.size() * q.size());
    for (double a : p.probabilities())
        for (double b : q.probabilities()) probs.push_back(a * b);
    return JointDistribution(std::move(cards), std::move(probs));
}

JointDistribution iid_power(const JointDistribution& p, int n, std::size_t entry_cap) {
    if (n < 1) throw DimensionMismatch("iid power requires n >= 1");
    double log_size = static_cast<double>(n) * std::log2(static_cast<double>(p.size()));
    if (log_size > std::log2(static_cast<double>(entry_cap)) + 1e-9)
        throw SizeCapExceeded("i.i.d. power exceeds the configured entry cap");
    JointDistribution out = p;
    for (int j = 1; j < n; ++j) out = product(out, p);
    return out;
}

JointDistribution apply_local_channel(const JointDistribution& dist, const Channel& channel,
                                      int index) {
    if (index < 0 || index >= dist.num_variables())
        throw IndexOutOfRange("channel target index out of range");
    std::size_t in_card = 1;
    for (int c : channel.input_cardinalities()) in_card *= static_cast<std::size_t>(c);
    if (in_card != static_cast<std::size_t>(dist.cardinality(index)))
        throw CardinalityMismatch("channel input cardinality does not match variable");

    int out_card = static_cast<int>(channel.num_outputs());
    std::vector<int> out_cards = dist.cardinalities();
    out_cards[index] = out_card;
    std::size_t out_size = 1;
    for (int c : out_cards) out_size *= static_cast<std::size_t>(c);

    std::vector<KahanSum> sums(out_size);
    const auto& probs = dist.probabilities();
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        if (probs[flat] == 0.0) continue;
        std::vector<int> full = dist.unflatten(flat);
        int x = full[index];
        for (int y = 0; y < out_card; ++y) {
            double w = channel.kernel()[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            if (w == 0.0) continue;
            full[index] = y;
            std::size_t out = 0;
            for (std::size_t i = 0; i < full.size(); ++i)
                out = out * static_cast<std::size_t>(out_cards[i]) +
                      static_cast<std::size_t>(full[i]);
            sums[out].add(probs[flat] * w);
        }
        full[index] = x;
    }
    std::vector<double> out_probs(out_size);
    for (std::size_t i = 0; i < out_size; ++i) out_probs[i] = sums[i].value();
    return JointDistribution(std::move(out_cards), std::move(out_probs));
}

double entropy(const JointDistribution& dist, const std::vector<int>& subset) {
    JointDistribution m = marginal(dist, subset);
    KahanSum h;
    for (double p : m.probabilities()) h.add(-xlogx(p));
    return h.value();
}

double mutual_information(const JointDistribution& dist, const std::vector<int>& S,
                          const std::vector<int>& T, const std::vector<int>& W) {
    std::vector<int> all = S;
    all.insert(all.end(), T.begin(), T.end());
    all.insert(all.end(), W.begin(), W.end());
    std::vector<int> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw OverlappingSets("S, T, W must be pairwise disjoint");
    check_subset(dist, all);

    std::vector<int> SW = S, TW = T, STW = all;
    SW.insert(SW.end(), W.begin(), W.end());
    TW.insert(TW.end(), W.begin(), W.end());

    // I(S;T|W) = H(SW) + H(TW) - H(STW) - H(W)
    double value = entropy(dist, SW) + entropy(dist, TW) - entropy(dist, STW);
    if (!W.empty()) value -= entropy(dist, W);
    return std::max(value, 0.0);
}

// ---- Channel ---------------------------------------------------------------

Channel::Channel(std::vector<int> input_cardinalities, std::vector<int> output_cardinalities,
                 std::vector<std::vector<double>> kernel)
    : in_cards_(std::move(input_cardinalities)), out_cards_(std::move(output_cardinalities)),
      kernel_(std::move(kernel)) {
    std::size_t n_in = checked_tensor_size(in_cards_);
    std::size_t n_out = checked_tensor_size(out_cards_);
    if (kernel_.size() != n_in) throw DimensionMismatch("kernel row count mismatch");
    for (auto& row : kernel_) {
        if (row.size() != n_out) throw DimensionMismatch("kernel row length mismatch");
        KahanSum total;
        for (double& w : row) {
            if (w < 0.0) {
                if (w < -1e-15) throw NegativeProbability("negative kernel entry");
                w = 0.0;
            }
            total.add(w);
        }
        if (std::abs(total.value() - 1.0) > 1e-9)
            throw NotNormalized("kernel row sums to " + std::to_string(total.value()));
    }
}

Channel Channel::identity(int cardinality) {
    std::vector<std::vector<double>> kernel(static_cast<std::size_t>(cardinality),
                                            std::vector<double>(static_cast<std::size_t>(cardinality), 0.0));
    for (int i = 0; i < cardinality; ++i) kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    return Channel({cardinality}, {cardinality}, std::move(kernel));
}

Channel Channel::constant(int input_cardinality, int output_cardinality, int value) {
    std::vector<std::vector<double>> kernel(
        static_cast<std::size_t>(input_cardinality),
        std::vector<double>(static_cast<std::size_t>(output_cardinality), 0.0));
    for (auto& row : kernel) row[static_cast<std::size_t>(value)] = 1.0;
    return Channel({input_cardinality}, {output_cardinality}, std::move(kernel));
}

Channel Channel::binary_symmetric(double crossover) {
    return Channel({2}, {2}, {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

// ---- common constructions --------------------------------------------------

JointDistribution dsbs(double crossover) {
    double same = (1.0 - crossover) / 2.0;
    double diff = crossover / 2.0;
    return JointDistribution({2, 2}, {same, diff, diff, same});
}

JointDistribution uniform_pair() { return JointDistribution({2, 2}, {0.25, 0.25, 0.25, 0.25}); }

JointDistribution perfectly_correlated_bits() {
    return JointDistribution({2, 2}, {0.5, 0.0, 0.0, 0.5});
}

}  // namespace corrtensor
