// Acceptance gate: one integration check per shipped guarantee, one line of
// output each, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "corrtensor/dualreg.hpp"
#include "corrtensor/harness.hpp"
#include "corrtensor/localreg.hpp"
#include "corrtensor/maxcorr.hpp"
#include "corrtensor/membership.hpp"
#include "corrtensor/optimizer.hpp"
#include "corrtensor/prob.hpp"
#include "corrtensor/ribbon.hpp"
#include "corrtensor/twoway.hpp"

using namespace corrtensor;

namespace {

// Independent oracle for maximal correlation when variable 0 is binary: the
// only standardized f on X is fixed up to sign, so rho is the standard
// deviation of E[f | Y].
double pearson_oracle_binary_x(const JointDistribution& d) {
    int cy = d.cardinality(1);
    double p0 = 0.0, p1 = 0.0;
    for (int y = 0; y < cy; ++y) {
        p0 += d.prob({0, y});
        p1 += d.prob({1, y});
    }
    if (p0 <= 0.0 || p1 <= 0.0) return 0.0;
    double f0 = std::sqrt(p1 / p0), f1 = -std::sqrt(p0 / p1);
    double var = 0.0;
    for (int y = 0; y < cy; ++y) {
        double py = d.prob({0, y}) + d.prob({1, y});
        if (py <= 0.0) continue;
        double g = (d.prob({0, y}) * f0 + d.prob({1, y}) * f1) / py;
        var += py * g * g;
    }
    return std::sqrt(std::max(0.0, var));
}

bool criterion1(std::string& note) {
    if (rho(uniform_pair(), 0, 1) > 1e-9) { note = "independent pair not 0"; return false; }
    if (std::abs(rho(perfectly_correlated_bits(), 0, 1) - 1.0) > 1e-9) {
        note = "perfect bits not 1";
        return false;
    }
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int t = 0; t < 120; ++t) {
        JointDistribution d = random_distribution(rng, t < 60 ? std::vector<int>{2, 2}
                                                              : std::vector<int>{2, 3});
        worst = std::max(worst, std::abs(rho(d, 0, 1) - pearson_oracle_binary_x(d)));
    }
    note = "max oracle gap " + std::to_string(worst);
    return worst <= 1e-8;
}

bool criterion2(std::string& note) {
    std::mt19937_64 rng(102);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<int> cards = (t % 2 == 0) ? std::vector<int>{2, 2} : std::vector<int>{2, 3};
        JointDistribution d = random_distribution(rng, cards);
        PropertyReport tens =
            check_tensorization(Measure::Rho, d, 2, 1, 1e-8, static_cast<std::uint64_t>(t));
        std::vector<Channel> channels = {random_local_channel(rng, cards[0], cards[0]),
                                         random_local_channel(rng, cards[1], cards[1])};
        PropertyReport dp = check_data_processing(Measure::Rho, d, channels, 1, 1e-8,
                                                  static_cast<std::uint64_t>(t));
        worst = std::max({worst, tens.max_violation, dp.max_violation});
        if (!tens.passed || !dp.passed) {
            note = "violation " + std::to_string(worst) + " at case " + std::to_string(t);
            return false;
        }
    }
    note = "max violation " + std::to_string(worst) + " over 50 pairs";
    return true;
}

bool criterion3(std::string& note) {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> cards;
        if (t < 8) cards = {2, 2};
        else if (t < 14) cards = {2, 3};
        else cards = {2, 2, 2};
        JointDistribution d = random_distribution(rng, cards);
        int k = d.num_variables();

        std::vector<double> inside = random_simplex_point(rng, k);
        double shrink = unif(rng);
        for (double& v : inside) v *= shrink;
        if (!hc_member_aux(d, inside).is_member()) {
            note = "simplex point rejected at case " + std::to_string(t);
            return false;
        }

        std::vector<double> outside(static_cast<std::size_t>(k));
        for (double& v : outside) v = unif(rng);
        outside[static_cast<std::size_t>(t % k)] = 1.1;
        MembershipResult out = hc_member_aux(d, outside);
        if (out.verdict != Verdict::CertifiedNonMember) {
            note = "coordinate above 1 accepted at case " + std::to_string(t);
            return false;
        }
    }
    note = "20 distributions, zero exceptions";
    return true;
}

bool criterion4(std::string& note) {
    std::mt19937_64 rng(104);
    for (int t = 0; t < 20; ++t) {
        JointDistribution d = [&]() {
            std::vector<int> cards = (t % 4 < 2) ? std::vector<int>{2, 2}
                                                 : std::vector<int>{2, 2, 2};
            if (t < 10) return random_distribution(rng, cards);
            // independent construction: product of single-variable factors
            JointDistribution acc = random_distribution(rng, {static_cast<int>(cards[0])});
            for (std::size_t v = 1; v < cards.size(); ++v)
                acc = product(acc, random_distribution(rng, {cards[v]}));
            return acc;
        }();
        int k = d.num_variables();
        double tc = -entropy(d, [&] {
            std::vector<int> all(static_cast<std::size_t>(k));
            for (int v = 0; v < k; ++v) all[static_cast<std::size_t>(v)] = v;
            return all;
        }());
        for (int v = 0; v < k; ++v) tc += entropy(d, {v});
        bool independent = tc <= 1e-9;
        bool member = hc_member_aux(d, std::vector<double>(static_cast<std::size_t>(k), 1.0))
                          .is_member();
        if (member != independent) {
            note = "verdict/independence mismatch at case " + std::to_string(t) +
                   " (total correlation " + std::to_string(tc) + ")";
            return false;
        }
    }
    note = "verdict at all-ones matched independence on 20 cases";
    return true;
}

bool criterion5(std::string& note) {
    std::mt19937_64 rng(105);
    OptimOptions quick;
    quick.restarts = 12;
    quick.max_iterations = 1200;
    int compared = 0;
    for (int t = 0; t < 20; ++t) {
        JointDistribution d = random_distribution(rng, {2, 2});
        for (int s = 0; s < 20; ++s) {
            std::vector<double> lambda = halton_point(20 * t + s + 1, 2, 1.0);
            MembershipResult norms = hc_member_norms(d, lambda[0], lambda[1], 0, 1,
                                                     static_cast<std::uint64_t>(t), 16);
            MembershipResult aux = hc_member_aux(d, lambda, quick);
            if (norms.is_member() != aux.is_member()) {
                // escalate the member side to full strength: the cheap search
                // may simply have missed a witness the other route found
                if (norms.is_member())
                    norms = hc_member_norms(d, lambda[0], lambda[1], 0, 1,
                                            static_cast<std::uint64_t>(t) + 1, 64);
                else
                    aux = hc_member_aux(d, lambda);
            }
            if (norms.is_member() != aux.is_member()) {
                // a lingering disagreement is excused only inside the
                // boundary band, where the certificate itself is weak
                double cert = norms.is_member() ? aux.margin : norms.margin;
                if (cert < 1e-3) continue;
                note = "routes disagree at sample (" + std::to_string(lambda[0]) + ", " +
                       std::to_string(lambda[1]) + ") of case " + std::to_string(t);
                return false;
            }
            ++compared;
        }
    }
    note = std::to_string(compared) + " of 400 samples compared, all agree";
    return compared >= 300;
}

bool criterion6(std::string& note) {
    std::mt19937_64 rng(106);
    std::vector<JointDistribution> cases = {dsbs(0.1), dsbs(0.25)};
    for (int t = 0; t < 5; ++t) cases.push_back(random_distribution(rng, {2, 2}));
    double worst_spread = 0.0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        double direct = s_star(cases[c], 1, 0, SStarMethod::Direct);
        double ribbon = s_star(cases[c], 1, 0, SStarMethod::Ribbon);
        double lce = s_star(cases[c], 1, 0, SStarMethod::Lce);
        double lo = std::min({direct, ribbon, lce});
        double hi = std::max({direct, ribbon, lce});
        worst_spread = std::max(worst_spread, hi - lo);
        if (hi - lo > 2e-3) {
            note = "methods spread " + std::to_string(hi - lo) + " at case " +
                   std::to_string(c);
            return false;
        }
        double r = rho(cases[c], 0, 1);
        if (r * r > hi + 1e-6) {
            note = "rho^2 exceeds s* at case " + std::to_string(c);
            return false;
        }
    }
    note = "max method spread " + std::to_string(worst_spread) + " over 7 cases";
    return true;
}

bool criterion7(std::string& note) {
    std::mt19937_64 rng(107);
    // k=1 boundary against the closed form 1/rho^2
    for (int t = 0; t < 10; ++t) {
        JointDistribution d = (t == 0) ? dsbs(0.1) : random_distribution(rng, {2, 2});
        double r = rho(d, 0, 1);
        double bound = lambda_boundary(d, 0, {1.0});
        if (std::abs(bound - 1.0 / (r * r)) > 1e-8) {
            note = "k=1 boundary off by " + std::to_string(std::abs(bound - 1.0 / (r * r)));
            return false;
        }
    }
    // exact verdict tensorization and data processing on 50 random binary cases
    for (int t = 0; t < 50; ++t) {
        JointDistribution p = random_distribution(rng, {2, 2});
        JointDistribution q = random_distribution(rng, {2, 2});
        JointDistribution pq = grouped_product(p, q);
        JointDistribution mapped = apply_local_channel(
            apply_local_channel(p, random_local_channel(rng, 2, 2), 0),
            random_local_channel(rng, 2, 2), 1);
        for (int s = 0; s < 4; ++s) {
            std::vector<double> lambda = halton_point(4 * t + s + 1, 2, 1.5);
            bool joint = lambda_member(pq, -1, lambda).is_member();
            bool both = lambda_member(p, -1, lambda).is_member() &&
                        lambda_member(q, -1, lambda).is_member();
            if (joint != both) {
                note = "tensorization verdicts differ at case " + std::to_string(t);
                return false;
            }
            if (lambda_member(p, -1, lambda).is_member() &&
                !lambda_member(mapped, -1, lambda).is_member()) {
                note = "data processing implication fails at case " + std::to_string(t);
                return false;
            }
        }
    }
    note = "boundary, tensorization and data processing all exact";
    return true;
}

bool criterion8(std::string& note) {
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> lam(0.3, 1.2);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        JointDistribution d = random_distribution(rng, t % 3 == 2 ? std::vector<int>{2, 3}
                                                                  : std::vector<int>{2, 2});
        CondExpOperator op = cond_exp_operator(d, -1, 0);
        std::vector<double> f(op.support.size());
        double mean = 0.0;
        for (std::size_t c = 0; c < f.size(); ++c) {
            f[c] = unif(rng);
            mean += op.weights[c] * f[c];
        }
        for (double& v : f) v -= mean;
        std::vector<double> lambdas = {lam(rng), lam(rng)};
        PerturbationReport rep = perturbation_second_derivative(d, -1, lambdas, f, {1e-3});
        worst = std::max(worst, rep.probes[0].relative_error);
        if (rep.probes[0].relative_error > 1e-4) {
            note = "relative error " + std::to_string(rep.probes[0].relative_error) +
                   " at case " + std::to_string(t);
            return false;
        }
    }
    note = "max relative error " + std::to_string(worst) + " at epsilon 1e-3";
    return true;
}

bool criterion9(std::string& note) {
    std::mt19937_64 rng(109);
    struct Task { Measure measure; std::vector<int> cards; int samples; };
    std::vector<Task> tasks = {{Measure::GSideInfo, {2, 2}, 3},
                               {Measure::GHelper, {2, 2}, 3},
                               {Measure::GFork, {2, 2, 2}, 2}};
    double worst = 0.0;
    for (const Task& task : tasks) {
        JointDistribution p = random_distribution(rng, task.cards);
        JointDistribution q = random_distribution(rng, task.cards);
        PropertyReport rep = check_additivity(task.measure, p, q, task.samples, 2e-3, 109);
        worst = std::max(worst, rep.max_violation);
        if (!rep.passed || rep.oracle_mode != "exhaustive") {
            note = measure_name(task.measure) + " additivity " +
                   (rep.passed ? "lost the exhaustive oracle" : "violated");
            return false;
        }
        for (const SampleRecord& s : rep.samples)
            if (!s.excluded && s.value_base > s.value_other + 1e-9) {
                note = measure_name(task.measure) + " certified lower bound broken";
                return false;
            }
    }
    note = "max two-sided gap " + std::to_string(worst) + " across three duals";
    return true;
}

bool criterion10(std::string& note) {
    std::mt19937_64 rng(110);
    // correlated sources: any lambda with a component >= 0.05 is certified
    // outside the fork region by the constant channel alone
    for (int t = 0; t < 10; ++t) {
        JointDistribution d = random_distribution(rng, {2, 2, 2});
        double i12 = mutual_information(d, {0}, {1});
        if (i12 <= 0.01) { --t; continue; }
        for (const std::vector<double>& lambda :
             {std::vector<double>{0.05, 0.05}, {0.6, 0.3}, {1.0, 1.0}}) {
            double m = std::max(lambda[0], lambda[1]);
            AuxObjective obj = make_fork_objective(d, lambda[0], lambda[1], ForkForm::Corner);
            double at_constant = obj.value(AuxChannel::constant(2, 2));
            if (std::abs(at_constant - m * i12) > 1e-10 || at_constant <= kMembershipTol) {
                note = "constant-channel certificate failed at case " + std::to_string(t);
                return false;
            }
            if (g_fork_k2(d, lambda[0], lambda[1], ForkForm::Corner).value <
                at_constant - 1e-9) {
                note = "search fell below its own seed at case " + std::to_string(t);
                return false;
            }
        }
    }
    // independent sources: corner and alternative forms must agree
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        JointDistribution x1 = random_distribution(rng, {2});
        JointDistribution x2 = random_distribution(rng, {2});
        std::vector<double> cells(16, 0.0);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                cells[static_cast<std::size_t>((a * 2 + b) * 4 + (2 * a + b))] =
                    x1.prob({a}) * x2.prob({b});
        JointDistribution fork({2, 2, 4}, cells);
        for (const std::vector<double>& lambda :
             {std::vector<double>{0.5, 0.5}, {1.2, 0.4}}) {
            double corner = g_fork_k2(fork, lambda[0], lambda[1], ForkForm::Corner).value;
            double alt = g_fork_k2(fork, lambda[0], lambda[1], ForkForm::Alternative).value;
            worst = std::max(worst, std::abs(corner - alt));
            if (std::abs(corner - alt) > 1e-6) {
                note = "form gap " + std::to_string(std::abs(corner - alt)) + " at case " +
                       std::to_string(t);
                return false;
            }
        }
    }
    note = "collapse certified; independent-form gap at most " + std::to_string(worst);
    return true;
}

bool criterion11(std::string& note) {
    for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        ZeroCapacityReport rep = zero_capacity_check(pr_box(eta));
        if (!rep.zero_capacity || rep.max_deviation > 1e-12) {
            note = "zero capacity fails at eta " + std::to_string(eta);
            return false;
        }
    }
    SimulationCheck check = simulation_precondition(pr_box(0.6), pr_box(0.9));
    if (!check.witness_found) { note = "no witness found"; return false; }
    if (check.g_from > 1e-6) { note = "source value too large at witness"; return false; }
    if (check.g_to <= 1e-3) { note = "target violation too small at witness"; return false; }
    note = "witness (" + std::to_string(check.witness_lambda[0]) + ", " +
           std::to_string(check.witness_lambda[1]) + "), target value " +
           std::to_string(check.g_to);
    return true;
}

bool criterion12(std::string& note) {
    std::mt19937_64 rng(112);
    // coarser but still exhaustive schedule for the 4-row grids; the fine
    // maxima are recovered by the full local search the grid is paired with
    std::vector<std::pair<int, double>> schedule = {{2, 0.05}, {3, 0.2}, {4, 1.0 / 3.0}};
    std::vector<std::vector<int>> maps = {{0, 1}, {1, 0}, {0, 0}, {1, 1}};
    double worst = -1.0;
    for (int t = 0; t < 20; ++t) {
        JointDistribution p_ab = random_distribution(rng, {2, 2});
        std::vector<double> lambda = halton_point(t + 1, 2, 1.2);
        SourceChannelBoundReport rep = source_channel_bound_check(
            p_ab, maps[static_cast<std::size_t>(t % 4)],
            maps[static_cast<std::size_t>((t / 2) % 4)], pr_box(0.6), lambda[0], lambda[1],
            {}, schedule);
        worst = std::max(worst, rep.lhs_lower - rep.rhs_total);
        if (!rep.holds) {
            note = "bound violated by " + std::to_string(rep.lhs_lower - rep.rhs_total) +
                   " at case " + std::to_string(t);
            return false;
        }
    }
    note = "worst slack " + std::to_string(-worst) + " over 20 instances";
    return true;
}

bool criterion13(std::string& note) {
    std::mt19937_64 rng(113);
    JointDistribution d = random_distribution(rng, {2, 2, 3});
    VarianceIdentityReport rep = variance_identity_checks(d, 100, 113);
    note = "residual " + std::to_string(rep.max_total_variance_residual) + ", slack " +
           std::to_string(rep.min_markov_slack);
    return rep.trials == 100 && rep.max_total_variance_residual <= 1e-10 &&
           rep.min_markov_slack >= -1e-10;
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        bool (*run)(std::string&);
    };
    const Entry entries[] = {
        {"maximal correlation matches closed forms and the Pearson oracle", criterion1},
        {"maximal correlation tensorizes and respects data processing", criterion2},
        {"ribbon contains the simplex and excludes coordinates above 1", criterion3},
        {"all-ones membership characterizes mutual independence", criterion4},
        {"norm and auxiliary membership routes agree off the boundary", criterion5},
        {"three efficiency computations agree and dominate rho squared", criterion6},
        {"spectral region boundary, tensorization and data processing are exact", criterion7},
        {"perturbation quadratic form matches finite differences", criterion8},
        {"dual functionals are additive under the exhaustive-grid oracle", criterion9},
        {"fork region collapses for correlated sources, forms agree otherwise", criterion10},
        {"box separation witness and zero-capacity checks", criterion11},
        {"source-channel bound holds on random binary instances", criterion12},
        {"variance identities hold on random draws", criterion13},
    };
    int failures = 0;
    int id = 0;
    for (const Entry& entry : entries) {
        ++id;
        std::string note;
        bool ok = false;
        try {
            ok = entry.run(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("criterion %2d: %s - %s (%s)\n", id, ok ? "PASS" : "FAIL", entry.label,
                    note.c_str());
        std::fflush(stdout);
    }
    return failures;
}
