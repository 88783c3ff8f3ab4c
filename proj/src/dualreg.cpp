#include "corrtensor/dualreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corrtensor {

double DualObjective::constant_part() const {
    double c = 0.0;
    for (std::size_t s = 0; s < theta.size(); ++s) c += theta[s].second * subset_entropies[s];
    return c;
}

GEvaluation generic_dual_g(const RatePointSet& rate_points, const DualObjective& objective) {
    const std::size_t m = rate_points.dimension();
    if (objective.lambda.size() != m) throw DimensionMismatch("lambda arity mismatch");

    // recession check: objective must not increase along any recession direction
    std::vector<std::vector<double>> directions = rate_points.recession_directions;
    if (directions.empty()) {
        for (std::size_t r = 0; r < m; ++r) {
            std::vector<double> axis(m, 0.0);
            axis[r] = 1.0;
            directions.push_back(std::move(axis));
        }
    }
    for (const auto& d : directions) {
        double slope = 0.0;
        for (std::size_t r = 0; r < m; ++r) slope += objective.lambda[r] * d[r];
        if (slope > 1e-12) throw UnboundedObjective("objective increases along a recession direction");
    }

    GEvaluation eval;
    eval.value = -std::numeric_limits<double>::infinity();
    double constant = objective.constant_part();
    for (const auto& point : rate_points.points) {
        double v = constant;
        for (std::size_t r = 0; r < m; ++r) v += objective.lambda[r] * point[r];
        if (v > eval.value) {
            eval.value = v;
            eval.rate_point = point;
        }
    }
    if (rate_points.points.empty()) eval.value = 0.0;
    return eval;
}

double initial_efficiency(const RatePointSet& rate_points, int num_rate, int den_rate) {
    double best = 0.0;
    bool any = false;
    for (const auto& point : rate_points.points) {
        double num = point[static_cast<std::size_t>(num_rate)];
        double den = point[static_cast<std::size_t>(den_rate)];
        if (den <= 1e-12) {
            if (num > 1e-12) throw GZeroViolated("g(0)=0 violated: zero denominator with positive numerator");
            continue;
        }
        best = any ? std::max(best, num / den) : num / den;
        any = true;
    }
    return any ? best : 0.0;
}

AuxObjective make_side_info_objective(const JointDistribution& dist, int helper_index,
                                      const std::vector<double>& lambdas) {
    std::vector<std::pair<std::vector<int>, double>> terms;
    std::vector<int> all(static_cast<std::size_t>(dist.num_variables()));
    for (int i = 0; i < dist.num_variables(); ++i) all[static_cast<std::size_t>(i)] = i;

    if (helper_index < 0) {
        terms.emplace_back(all, -1.0);  // -I(X_{[k]};U)
        if (lambdas.size() != all.size()) throw DimensionMismatch("lambda arity mismatch");
        for (int i = 0; i < dist.num_variables(); ++i)
            terms.emplace_back(std::vector<int>{i}, lambdas[static_cast<std::size_t>(i)]);
    } else {
        terms.emplace_back(std::vector<int>{helper_index}, -1.0);
        std::size_t li = 0;
        for (int i = 0; i < dist.num_variables(); ++i) {
            if (i == helper_index) continue;
            if (li >= lambdas.size()) throw DimensionMismatch("lambda arity mismatch");
            terms.emplace_back(std::vector<int>{i}, lambdas[li++]);
        }
        if (li != lambdas.size()) throw DimensionMismatch("lambda arity mismatch");
    }
    return AuxObjective(dist, helper_index, std::move(terms));
}

std::vector<AuxChannel> side_info_seeds(const JointDistribution& dist, int helper_index,
                                        int aux_cardinality) {
    std::vector<AuxChannel> seeds;
    const auto& probs = dist.probabilities();
    int rows = helper_index < 0 ? static_cast<int>(probs.size()) : dist.cardinality(helper_index);

    // U = X_i for each variable readable from the helper symbol
    for (int i = 0; i < dist.num_variables(); ++i) {
        if (helper_index >= 0 && i != helper_index) continue;
        std::vector<int> map(static_cast<std::size_t>(rows));
        for (int h = 0; h < rows; ++h) {
            if (helper_index < 0)
                map[static_cast<std::size_t>(h)] = dist.unflatten(static_cast<std::size_t>(h))[i];
            else
                map[static_cast<std::size_t>(h)] = h;
        }
        seeds.push_back(AuxChannel::deterministic(rows, aux_cardinality, map));
    }
    return seeds;
}

namespace {

GEvaluation run_aux(const AuxObjective& objective, OptimOptions options) {
    OptimResult res = maximize_aux(objective, options);
    GEvaluation eval;
    eval.value = res.value;
    eval.maximizer = std::move(res.maximizer);
    eval.lower_bound_only = true;
    eval.restarts_used = res.restarts_used;
    eval.iterations = res.iterations;
    return eval;
}

}  // namespace

GEvaluation g_helper(const JointDistribution& dist, int i, int j, double lambda,
                     const OptimOptions& base) {
    if (lambda < 0.0) throw IndexOutOfRange("lambda must be non-negative");
    AuxObjective objective(dist, j, {{{i}, lambda}, {{j}, -1.0}});
    OptimOptions options = base;
    options.aux_cardinality = std::max(options.aux_cardinality, dist.cardinality(j) + 1);
    auto seeds = side_info_seeds(dist, j, options.aux_cardinality);
    options.seeds.insert(options.seeds.end(), seeds.begin(), seeds.end());
    return run_aux(objective, std::move(options));
}

GEvaluation g_side_info(const JointDistribution& dist, int helper_index,
                        const std::vector<double>& lambdas, const OptimOptions& base) {
    for (double l : lambdas)
        if (l < 0.0) throw IndexOutOfRange("lambdas must be non-negative");
    AuxObjective objective = make_side_info_objective(dist, helper_index, lambdas);
    OptimOptions options = base;
    options.aux_cardinality =
        std::max(options.aux_cardinality, objective.helper_alphabet() + 1);
    auto seeds = side_info_seeds(dist, helper_index, options.aux_cardinality);
    options.seeds.insert(options.seeds.end(), seeds.begin(), seeds.end());
    return run_aux(objective, std::move(options));
}

AuxObjective make_fork_objective(const JointDistribution& dist, double lambda1, double lambda2,
                                 ForkForm form) {
    if (dist.num_variables() != 3) throw DimensionMismatch("fork dual needs exactly 3 variables");
    double m = std::max(lambda1, lambda2);
    if (form == ForkForm::Corner) {
        // -I(X3;U) + l1 I(X1;U) + l2 I(X2;U) + m I(X1;X2|U), with the
        // conditional term expanded through I(X1;X2|U) - I(X1;X2)
        //   = I(X1X2;U) - I(X1;U) - I(X2;U).
        double i12 = mutual_information(dist, {0}, {1});
        return AuxObjective(dist, 2,
                            {{{2}, -1.0},
                             {{0}, lambda1 - m},
                             {{1}, lambda2 - m},
                             {{0, 1}, m}},
                            m * i12);
    }
    double i12 = mutual_information(dist, {0}, {1});
    if (i12 > 1e-9) throw AlternativeFormInvalid("alternative form requires I(X1;X2)=0");
    return AuxObjective(dist, 2,
                        {{{2}, -1.0},
                         {{0}, std::min(0.0, lambda1 - lambda2)},
                         {{1}, std::min(0.0, lambda2 - lambda1)},
                         {{0, 1}, m}});
}

GEvaluation g_fork_k2(const JointDistribution& dist, double lambda1, double lambda2,
                      ForkForm form, const OptimOptions& base) {
    if (lambda1 < 0.0 || lambda2 < 0.0) throw IndexOutOfRange("lambdas must be non-negative");
    AuxObjective objective = make_fork_objective(dist, lambda1, lambda2, form);
    OptimOptions options = base;
    options.aux_cardinality = std::max(options.aux_cardinality, dist.cardinality(2) + 1);
    auto seeds = side_info_seeds(dist, 2, options.aux_cardinality);
    options.seeds.insert(options.seeds.end(), seeds.begin(), seeds.end());
    return run_aux(objective, std::move(options));
}

GridResult grid_max_over(const AuxObjective& objective,
                         const std::vector<std::pair<int, double>>& card_steps) {
    GridResult best;
    best.value = -std::numeric_limits<double>::infinity();
    int rows = objective.helper_alphabet();
    long long evals = 0;
    for (const auto& [card, step] : card_steps) {
        GridResult res = grid_maximize(
            [&](const AuxChannel& w) { return objective.value(w); }, rows, card, step);
        evals += res.evaluations;
        if (res.value > best.value) best = std::move(res);
    }
    best.evaluations = evals;
    return best;
}

JointDistribution extend_with_aux(const JointDistribution& dist, int helper_index,
                                  const AuxChannel& channel) {
    std::vector<int> cards = dist.cardinalities();
    cards.push_back(channel.cols);
    const auto& probs = dist.probabilities();
    std::vector<double> out;
    out.reserve(probs.size() * static_cast<std::size_t>(channel.cols));
    for (std::size_t c = 0; c < probs.size(); ++c) {
        int h = helper_index < 0 ? static_cast<int>(c) : dist.unflatten(c)[helper_index];
        for (int u = 0; u < channel.cols; ++u) out.push_back(probs[c] * channel.at(h, u));
    }
    return JointDistribution(std::move(cards), std::move(out));
}

}  // namespace corrtensor
