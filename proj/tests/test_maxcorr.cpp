#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "corrtensor/maxcorr.hpp"
#include "corrtensor/optimizer.hpp"
#include "corrtensor/prob.hpp"

using namespace corrtensor;

namespace {

// Independent Pearson oracle for a pair with binary first variable: after
// standardizing f (only one non-constant direction exists), the optimal g is
// proportional to E[f|Y], and the maximal correlation is their correlation.
double pearson_oracle_binary_x(const JointDistribution& d) {
    const int ny = d.cardinality(1);
    double p0 = 0.0;
    std::vector<double> py(static_cast<std::size_t>(ny), 0.0);
    for (int y = 0; y < ny; ++y) {
        py[static_cast<std::size_t>(y)] = d.prob({0, y}) + d.prob({1, y});
        p0 += d.prob({0, y});
    }
    if (p0 <= 0.0 || p0 >= 1.0) return 0.0;
    // f standardized: mean 0, variance 1
    const double f0 = std::sqrt((1.0 - p0) / p0);
    const double f1 = -std::sqrt(p0 / (1.0 - p0));
    double var_g = 0.0;
    for (int y = 0; y < ny; ++y) {
        double w = py[static_cast<std::size_t>(y)];
        if (w <= 0.0) continue;
        double g = (d.prob({0, y}) * f0 + d.prob({1, y}) * f1) / w;
        var_g += w * g * g;  // E[g] = E[E[f|Y]] = 0
    }
    return std::sqrt(std::max(var_g, 0.0));
}

}  // namespace

TEST_CASE("known maximal correlations") {
    CHECK(rho(perfectly_correlated_bits(), 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rho(uniform_pair(), 0, 1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rho(dsbs(0.1), 0, 1) == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(rho(dsbs(0.25), 0, 1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(rho(dsbs(0.5), 0, 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("top singular value is one and rho is symmetric") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        JointDistribution d = random_distribution(rng, {3, 3});
        CorrelationOperator op = correlation_matrix(d, 0, 1);
        CHECK(top_singular_value(op) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rho(d, 0, 1) == doctest::Approx(rho(d, 1, 0)).epsilon(1e-10));
    }
}

TEST_CASE("spectral rho equals the Pearson oracle on 2x2 and 2x3 supports") {
    std::mt19937_64 rng(7);
    for (int ny : {2, 3}) {
        for (int t = 0; t < 60; ++t) {
            JointDistribution d = random_distribution(rng, {2, ny});
            CHECK(rho(d, 0, 1) == doctest::Approx(pearson_oracle_binary_x(d)).epsilon(1e-8));
        }
    }
}

TEST_CASE("zero-probability symbols do not perturb rho") {
    // embed dsbs(0.1) into a 3x3 alphabet with two dead symbols
    std::vector<double> probs(9, 0.0);
    probs[0] = 0.45;
    probs[1] = 0.05;
    probs[3] = 0.05;
    probs[4] = 0.45;
    JointDistribution d({3, 3}, probs);
    CHECK(rho(d, 0, 1) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("point-mass marginals give zero by convention") {
    JointDistribution d({2, 2}, {0.3, 0.7, 0.0, 0.0});
    CHECK(rho(d, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("data processing: local channels never increase rho") {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 20; ++t) {
        JointDistribution d = random_distribution(rng, {2, 3});
        Channel c = random_local_channel(rng, 3, 3);
        double before = rho(d, 0, 1);
        double after = rho(apply_local_channel(d, c, 1), 0, 1);
        CHECK(after <= before + 1e-8);
    }
}

TEST_CASE("conditional rho takes the worst slice") {
    // Z selects between dsbs(0.1) and dsbs(0.25)
    std::vector<double> probs(8, 0.0);
    JointDistribution a = dsbs(0.1);
    JointDistribution b = dsbs(0.25);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            probs[static_cast<std::size_t>(x * 4 + y * 2 + 0)] = 0.5 * a.prob({x, y});
            probs[static_cast<std::size_t>(x * 4 + y * 2 + 1)] = 0.5 * b.prob({x, y});
        }
    JointDistribution d({2, 2, 2}, probs);
    CHECK(rho_conditional(d, 0, 1, 2) == doctest::Approx(0.8).epsilon(1e-10));
    // the unconditional mixture sits between the slices
    double mixed = rho(d, 0, 1);
    CHECK(mixed <= 0.8 + 1e-10);
    CHECK(mixed >= 0.5 - 1e-10);
}
