#include "corrtensor/twoway.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace corrtensor {

Channel pr_box(double eta) {
    if (eta < 0.0 || eta > 1.0) throw EtaOutOfRange("eta must lie in [0,1]");
    std::vector<std::vector<double>> kernel(4, std::vector<double>(4, 0.0));
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                    bool agree = (y1 ^ y2) == (x1 & x2);
                    kernel[static_cast<std::size_t>(x1 * 2 + x2)]
                          [static_cast<std::size_t>(y1 * 2 + y2)] =
                              agree ? (1.0 + eta) / 4.0 : (1.0 - eta) / 4.0;
                }
    return Channel({2, 2}, {2, 2}, std::move(kernel));
}

ZeroCapacityReport zero_capacity_check(const Channel& channel, double tol) {
    const auto& in = channel.input_cardinalities();
    const auto& out = channel.output_cardinalities();
    if (in.size() != 2 || out.size() != 2)
        throw DimensionMismatch("two-way channel needs two inputs and two outputs");
    const int nx1 = in[0], nx2 = in[1], ny1 = out[0], ny2 = out[1];
    const auto& kernel = channel.kernel();

    auto marg1 = [&](int x1, int x2, int y1) {
        double s = 0.0;
        for (int y2 = 0; y2 < ny2; ++y2)
            s += kernel[static_cast<std::size_t>(x1 * nx2 + x2)]
                       [static_cast<std::size_t>(y1 * ny2 + y2)];
        return s;
    };
    auto marg2 = [&](int x1, int x2, int y2) {
        double s = 0.0;
        for (int y1 = 0; y1 < ny1; ++y1)
            s += kernel[static_cast<std::size_t>(x1 * nx2 + x2)]
                       [static_cast<std::size_t>(y1 * ny2 + y2)];
        return s;
    };

    ZeroCapacityReport report;
    for (int x1 = 0; x1 < nx1; ++x1)
        for (int y1 = 0; y1 < ny1; ++y1)
            for (int x2 = 1; x2 < nx2; ++x2)
                report.max_deviation = std::max(
                    report.max_deviation, std::abs(marg1(x1, x2, y1) - marg1(x1, 0, y1)));
    for (int x2 = 0; x2 < nx2; ++x2)
        for (int y2 = 0; y2 < ny2; ++y2)
            for (int x1 = 1; x1 < nx1; ++x1)
                report.max_deviation = std::max(
                    report.max_deviation, std::abs(marg2(x1, x2, y2) - marg2(0, x2, y2)));
    report.zero_capacity = report.max_deviation <= tol;
    return report;
}

namespace {

JointDistribution conditional_output(const Channel& channel, int x1, int x2) {
    const auto& out = channel.output_cardinalities();
    const int nx2 = channel.input_cardinalities()[1];
    return JointDistribution(out, channel.kernel()[static_cast<std::size_t>(x1 * nx2 + x2)]);
}

}  // namespace

GzEvaluation g_z_channel(const Channel& channel, double lambda1, double lambda2,
                         const OptimOptions& base) {
    if (lambda1 < 0.0 || lambda2 < 0.0) throw IndexOutOfRange("lambdas must be non-negative");
    const auto& in = channel.input_cardinalities();
    if (in.size() != 2) throw DimensionMismatch("two-way channel needs two inputs");
    GzEvaluation best;
    bool first = true;
    for (int x1 = 0; x1 < in[0]; ++x1)
        for (int x2 = 0; x2 < in[1]; ++x2) {
            GEvaluation eval =
                g_side_info(conditional_output(channel, x1, x2), -1, {lambda1, lambda2}, base);
            if (first || eval.value > best.value) {
                best.value = eval.value;
                best.argmax_input = {x1, x2};
                best.inner = std::move(eval);
                first = false;
            }
        }
    return best;
}

std::vector<std::pair<int, double>> default_gz_grid() {
    return {{2, 0.05}, {3, 0.2}, {4, 0.25}};
}

GzEvaluation g_z_channel_grid(const Channel& channel, double lambda1, double lambda2,
                              const std::vector<std::pair<int, double>>& card_steps,
                              const OptimOptions& base) {
    const auto& in = channel.input_cardinalities();
    if (in.size() != 2) throw DimensionMismatch("two-way channel needs two inputs");
    GzEvaluation best;
    bool first = true;
    for (int x1 = 0; x1 < in[0]; ++x1)
        for (int x2 = 0; x2 < in[1]; ++x2) {
            JointDistribution cond = conditional_output(channel, x1, x2);
            AuxObjective objective = make_side_info_objective(cond, -1, {lambda1, lambda2});
            GridResult grid = grid_max_over(objective, card_steps);
            GEvaluation local = g_side_info(cond, -1, {lambda1, lambda2}, base);
            double value = std::max(grid.value, local.value);
            if (first || value > best.value) {
                best.value = value;
                best.argmax_input = {x1, x2};
                best.inner = std::move(local);
                best.inner.value = value;
                best.inner.lower_bound_only = false;
                first = false;
            }
        }
    return best;
}

SimulationCheck simulation_precondition(const Channel& from, const Channel& to,
                                        const std::vector<std::vector<double>>& extra_lambdas,
                                        std::uint64_t seed) {
    if (!zero_capacity_check(from).zero_capacity)
        throw PreconditionNotZeroCapacity("source channel must have zero capacity");

    std::vector<std::vector<double>> samples;
    const int grid = 41;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            samples.push_back({static_cast<double>(i) / (grid - 1),
                               static_cast<double>(j) / (grid - 1)});
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int r = 0; r < 32; ++r) samples.push_back({unif(rng), unif(rng)});
    samples.insert(samples.end(), extra_lambdas.begin(), extra_lambdas.end());

    SimulationCheck check;
    OptimOptions quick;
    quick.restarts = 4;
    quick.seed = seed;
    for (const auto& lambda : samples) {
        // lambda on or below the simplex is a member for every channel:
        // useless as a witness, and the bulk of the grid
        if (lambda[0] + lambda[1] <= 1.0 + 1e-12) continue;
        // cheap certified screen on the target first
        GzEvaluation to_quick = g_z_channel(to, lambda[0], lambda[1], quick);
        if (to_quick.value <= 1e-3) continue;
        // cheap certified screen on the source: any positive lower bound
        // already rules lambda out as a witness, sparing the exhaustive grid
        GzEvaluation from_quick = g_z_channel(from, lambda[0], lambda[1], quick);
        if (from_quick.value > kMembershipTol) continue;
        // thorough exhaustive-grid check on the source
        OptimOptions full;
        full.seed = seed;
        GzEvaluation from_eval =
            g_z_channel_grid(from, lambda[0], lambda[1], default_gz_grid(), full);
        if (from_eval.value > kMembershipTol) continue;
        GzEvaluation to_eval = g_z_channel(to, lambda[0], lambda[1], full);
        check.witness_found = true;
        check.witness_lambda = lambda;
        check.g_from = from_eval.value;
        check.g_to = std::max(to_eval.value, to_quick.value);
        check.argmax_input_to = to_eval.argmax_input;
        return check;
    }
    return check;
}

SourceChannelBoundReport source_channel_bound_check(const JointDistribution& p_ab,
                                                    const std::vector<int>& f_map,
                                                    const std::vector<int>& g_map,
                                                    const Channel& channel, double lambda1,
                                                    double lambda2, const OptimOptions& base,
                                                    const std::vector<std::pair<int, double>>&
                                                        grid_schedule) {
    if (p_ab.num_variables() != 2 || p_ab.cardinality(0) != 2 || p_ab.cardinality(1) != 2)
        throw AlphabetTooLarge("source must be a binary pair");
    const auto& in = channel.input_cardinalities();
    const auto& out = channel.output_cardinalities();
    if (in != std::vector<int>{2, 2} || out != std::vector<int>{2, 2})
        throw AlphabetTooLarge("channel must be binary two-way");
    if (f_map.size() != 2 || g_map.size() != 2)
        throw DimensionMismatch("input maps must cover the binary source alphabets");
    for (int v : f_map)
        if (v < 0 || v > 1) throw IndexOutOfRange("input map value out of range");
    for (int v : g_map)
        if (v < 0 || v > 1) throw IndexOutOfRange("input map value out of range");

    const auto& kernel = channel.kernel();
    // joint over (a, b, y1, y2) with x1 = f(a), x2 = g(b)
    std::vector<double> joint(16, 0.0);
    // joint over (x1, x2, y1, y2) for the correction terms
    std::vector<double> jx(16, 0.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            int x1 = f_map[static_cast<std::size_t>(a)];
            int x2 = g_map[static_cast<std::size_t>(b)];
            double pab = p_ab.prob({a, b});
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                    double w = kernel[static_cast<std::size_t>(x1 * 2 + x2)]
                                     [static_cast<std::size_t>(y1 * 2 + y2)];
                    joint[static_cast<std::size_t>(((a * 2 + b) * 2 + y1) * 2 + y2)] += pab * w;
                    jx[static_cast<std::size_t>(((x1 * 2 + x2) * 2 + y1) * 2 + y2)] += pab * w;
                }
        }
    JointDistribution lifted({2, 2, 2, 2}, joint);
    JointDistribution xy({2, 2, 2, 2}, jx);

    // pair variables (A, Y1) and (B, Y2), each of cardinality 4
    std::vector<double> pairs(16, 0.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2)
                    pairs[static_cast<std::size_t>((a * 2 + y1) * 4 + (b * 2 + y2))] =
                        joint[static_cast<std::size_t>(((a * 2 + b) * 2 + y1) * 2 + y2)];
    JointDistribution lifted_pairs({4, 4}, std::move(pairs));

    SourceChannelBoundReport report;
    report.lhs_lower = g_side_info(lifted_pairs, -1, {lambda1, lambda2}, base).value;

    AuxObjective src_obj = make_side_info_objective(p_ab, -1, {lambda1, lambda2});
    GridResult src_grid = grid_max_over(src_obj, grid_schedule);
    report.g_source =
        std::max(src_grid.value, g_side_info(p_ab, -1, {lambda1, lambda2}, base).value);
    report.g_channel =
        g_z_channel_grid(channel, lambda1, lambda2, grid_schedule, base).value;
    report.correction1 = lambda1 * mutual_information(xy, {1}, {2}, {0});
    report.correction2 = lambda2 * mutual_information(xy, {0}, {3}, {1});
    report.rhs_total =
        report.g_source + report.g_channel + report.correction1 + report.correction2;
    report.holds = report.lhs_lower <= report.rhs_total + 5e-3;
    return report;
}

}  // namespace corrtensor
