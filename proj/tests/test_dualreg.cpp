#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "corrtensor/dualreg.hpp"
#include "corrtensor/optimizer.hpp"
#include "corrtensor/prob.hpp"

using namespace corrtensor;

namespace {

double h2(double p) {
    auto xlx = [](double q) { return q > 0.0 ? q * std::log2(q) : 0.0; };
    return -xlx(p) - xlx(1.0 - p);
}

// independent pair of bits with the third variable equal to the full tuple
JointDistribution independent_fork() {
    std::vector<double> probs(16, 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            probs[static_cast<std::size_t>(x1 * 8 + x2 * 4 + (2 * x1 + x2))] = 0.25;
    return JointDistribution({2, 2, 4}, probs);
}

}  // namespace

TEST_CASE("generic dual over a finite rate-point set") {
    RatePointSet pts;
    pts.points = {{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}};

    DualObjective obj;
    obj.lambda = {-1.0, -0.5};
    GEvaluation g = generic_dual_g(pts, obj);
    CHECK(g.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.rate_point.has_value());

    obj.lambda = {-1.0, 1.0};  // second rate increasable without bound
    CHECK_THROWS_AS(generic_dual_g(pts, obj), UnboundedObjective);

    DualObjective with_entropy;
    with_entropy.lambda = {-1.0, -1.0};
    with_entropy.theta = {{{0}, 2.0}};
    with_entropy.subset_entropies = {1.5};
    CHECK(generic_dual_g(pts, with_entropy).value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("initial efficiency is the best finite rate ratio") {
    RatePointSet pts;
    pts.points = {{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}};
    CHECK(initial_efficiency(pts, 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(initial_efficiency(pts, 1, 0) == doctest::Approx(2.0).epsilon(1e-12));
    RatePointSet zeros;
    zeros.points = {{0.0, 0.0}};
    CHECK(initial_efficiency(zeros, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("side-information dual at unit coefficients recovers mutual information") {
    // I(X;U) + I(Y;U) - I(XY;U) = I(X;Y) - I(X;Y|U), maximized by U = X
    for (double crossover : {0.1, 0.25}) {
        GEvaluation g = g_side_info(dsbs(crossover), -1, {1.0, 1.0});
        CHECK(g.value == doctest::Approx(1.0 - h2(crossover)).epsilon(1e-6));
        CHECK(g.maximizer.has_value());
    }
}

TEST_CASE("side-information local search matches the exhaustive grid on a binary helper") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 4; ++t) {
        JointDistribution d = random_distribution(rng, {2, 2});
        for (std::vector<double> lambda : {std::vector<double>{0.9}, {1.2}}) {
            AuxObjective obj = make_side_info_objective(d, 1, lambda);
            GridResult grid = grid_max_over(obj, {{2, 0.02}, {3, 0.02}});
            GEvaluation local = g_side_info(d, 1, lambda);
            CHECK(local.value >= grid.value - 1e-9);
            CHECK(local.value - grid.value <= 2e-3);
        }
    }
}

TEST_CASE("helper dual switches on at the inverse efficiency") {
    // for DSBS(0.1), I(Y;U) <= 0.64 I(X;U), so the dual stays at zero up to 1/0.64
    GEvaluation below = g_helper(dsbs(0.1), 1, 0, 1.50);
    CHECK(below.value == doctest::Approx(0.0).epsilon(1e-9));
    GEvaluation above = g_helper(dsbs(0.1), 1, 0, 2.00);
    CHECK(above.value > 1e-3);
    // the positive value revalidates from its maximizer
    CHECK(above.maximizer.has_value());
}

TEST_CASE("fork dual: corner and alternative forms agree on independent sources") {
    JointDistribution d = independent_fork();
    REQUIRE(mutual_information(d, {0}, {1}) <= 1e-9);
    for (auto [l1, l2] : {std::pair{0.5, 0.5}, {0.8, 0.3}, {1.2, 0.7}}) {
        GEvaluation corner = g_fork_k2(d, l1, l2, ForkForm::Corner);
        GEvaluation alt = g_fork_k2(d, l1, l2, ForkForm::Alternative);
        CHECK(corner.value == doctest::Approx(alt.value).epsilon(1e-6));
    }
}

TEST_CASE("alternative fork form rejects correlated sources") {
    std::vector<double> probs(16, 0.0);
    // X2 = X1, X3 = X1: maximally correlated
    probs[0 * 8 + 0 * 4 + 0] = 0.5;
    probs[1 * 8 + 1 * 4 + 1] = 0.5;
    JointDistribution d({2, 2, 4}, probs);
    CHECK_THROWS_AS(g_fork_k2(d, 0.5, 0.5, ForkForm::Alternative), AlternativeFormInvalid);
    CHECK_NOTHROW(g_fork_k2(d, 0.5, 0.5, ForkForm::Corner));
}

TEST_CASE("extend_with_aux appends a consistent auxiliary variable") {
    JointDistribution d = dsbs(0.1);
    AuxChannel ident = AuxChannel::deterministic(2, 2, {0, 1});
    JointDistribution ext = extend_with_aux(d, 0, ident);
    CHECK(ext.num_variables() == 3);
    // original joint untouched
    JointDistribution back = marginal(ext, {0, 1});
    for (std::size_t f = 0; f < d.size(); ++f)
        CHECK(back[f] == doctest::Approx(d[f]).epsilon(1e-15));
    // U = X exactly
    CHECK(mutual_information(ext, {2}, {0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mutual_information(ext, {2}, {1}, {0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("seed channels have the right shape and finite objective values") {
    JointDistribution d = dsbs(0.25);
    AuxObjective obj = make_side_info_objective(d, -1, {0.7, 0.7});
    std::vector<AuxChannel> seeds = side_info_seeds(d, -1, 5);
    CHECK(!seeds.empty());
    for (const AuxChannel& w : seeds) {
        CHECK(w.rows == obj.helper_alphabet());
        CHECK(w.cols == 5);
        CHECK(std::isfinite(obj.value(w)));
    }
}
