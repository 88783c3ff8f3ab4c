#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "corrtensor/harness.hpp"
#include "corrtensor/json_io.hpp"
#include "corrtensor/optimizer.hpp"
#include "corrtensor/prob.hpp"

using namespace corrtensor;

TEST_CASE("measure names round trip") {
    for (const char* name : {"rho", "hc_aux", "lambda_region", "g_helper", "g_side_info", "g_fork"})
        CHECK(measure_name(measure_from_string(name)) == name);
    CHECK_THROWS_AS(measure_from_string("entropy"), IndexOutOfRange);
}

TEST_CASE("grouped product forms composite variables") {
    JointDistribution p = dsbs(0.1);
    JointDistribution q = dsbs(0.25);
    JointDistribution pq = grouped_product(p, q);
    REQUIRE(pq.num_variables() == 2);
    CHECK(pq.cardinality(0) == 4);
    CHECK(pq.cardinality(1) == 4);
    for (int xp = 0; xp < 2; ++xp)
        for (int yp = 0; yp < 2; ++yp)
            for (int xq = 0; xq < 2; ++xq)
                for (int yq = 0; yq < 2; ++yq)
                    CHECK(pq.prob({2 * xp + xq, 2 * yp + yq}) ==
                          doctest::Approx(p.prob({xp, yp}) * q.prob({xq, yq})).epsilon(1e-14));

    JointDistribution p2 = grouped_power(p, 2);
    CHECK(p2.cardinality(0) == 4);
    CHECK(p2.prob({2 * 0 + 1, 2 * 1 + 1}) ==
          doctest::Approx(p.prob({0, 1}) * p.prob({1, 1})).epsilon(1e-14));
    JointDistribution triple({2, 2, 2}, std::vector<double>(8, 0.125));
    CHECK_THROWS_AS(grouped_product(p, triple), DimensionMismatch);
}

TEST_CASE("rho tensorizes exactly") {
    PropertyReport rep = check_tensorization(Measure::Rho, dsbs(0.1), 2, 1, 1e-8, 0);
    CHECK(rep.passed);
    CHECK(rep.oracle_mode == "exact");
    CHECK(rep.max_violation <= 1e-8);
}

TEST_CASE("spectral region tensorization and additivity verdicts are exact") {
    std::mt19937_64 rng(3);
    JointDistribution p = random_distribution(rng, {2, 2});
    JointDistribution q = random_distribution(rng, {2, 2});
    PropertyReport tens = check_tensorization(Measure::LambdaRegion, p, 2, 12, 0.0, 1);
    CHECK(tens.passed);
    CHECK(tens.oracle_mode == "exact");
    PropertyReport add = check_additivity(Measure::LambdaRegion, p, q, 12, 0.0, 1);
    CHECK(add.passed);
}

TEST_CASE("ribbon verdicts tensorize modulo the boundary band") {
    PropertyReport rep = check_tensorization(Measure::HcAux, dsbs(0.25), 2, 6, 1e-6, 2);
    CHECK(rep.passed);
    CHECK(rep.samples.size() == 6);
}

TEST_CASE("side-information dual is additive under the grid oracle") {
    std::mt19937_64 rng(5);
    JointDistribution p = random_distribution(rng, {2, 2});
    JointDistribution q = random_distribution(rng, {2, 2});
    PropertyReport rep = check_additivity(Measure::GSideInfo, p, q, 3, 2e-3, 3);
    CHECK(rep.passed);
    CHECK(rep.oracle_mode == "exhaustive");
    CHECK(rep.max_violation <= 2e-3);
}

TEST_CASE("a point-mass factor contributes nothing") {
    JointDistribution point({2, 2}, {1.0, 0.0, 0.0, 0.0});
    PropertyReport rep = check_additivity(Measure::GSideInfo, point, dsbs(0.1), 3, 2e-3, 4);
    CHECK(rep.passed);
}

TEST_CASE("rho data processing under random local channels") {
    std::mt19937_64 rng(7);
    JointDistribution d = random_distribution(rng, {2, 3});
    std::vector<Channel> channels = {random_local_channel(rng, 2, 2),
                                     random_local_channel(rng, 3, 3)};
    PropertyReport rep = check_data_processing(Measure::Rho, d, channels, 1, 1e-8, 5);
    CHECK(rep.passed);

    std::vector<Channel> idents = {Channel::identity(2), Channel::identity(3)};
    PropertyReport same = check_data_processing(Measure::Rho, d, idents, 1, 1e-10, 5);
    CHECK(same.passed);
    CHECK(same.max_violation <= 1e-10);
}

TEST_CASE("helper measures require an identity channel on the helper") {
    JointDistribution d = dsbs(0.1);
    std::vector<Channel> bad = {Channel::identity(2), Channel::binary_symmetric(0.1)};
    CHECK_THROWS_AS(check_data_processing(Measure::GSideInfo, d, bad, 1, 1e-6, 0),
                    DimensionMismatch);
    std::vector<Channel> good = {Channel::binary_symmetric(0.1), Channel::identity(2)};
    PropertyReport rep = check_data_processing(Measure::GSideInfo, d, good, 2, 2e-3, 0);
    CHECK(rep.passed);
}

TEST_CASE("large helpers downgrade the oracle instead of failing") {
    std::mt19937_64 rng(11);
    JointDistribution p = random_distribution(rng, {3, 3});
    JointDistribution q = random_distribution(rng, {3, 3});
    // composite helper has 9 rows: no exhaustive grid is feasible
    PropertyReport rep = check_additivity(Measure::GSideInfo, p, q, 2, 2e-3, 6);
    CHECK(rep.oracle_mode == "heuristic");
    CHECK(rep.passed);  // the certified side must still hold
}

TEST_CASE("reports are deterministic and serialize") {
    PropertyReport a = check_tensorization(Measure::HcAux, dsbs(0.25), 2, 4, 1e-6, 9);
    PropertyReport b = check_tensorization(Measure::HcAux, dsbs(0.25), 2, 4, 1e-6, 9);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(a.version == 1);
    CHECK(!report_to_json(a).empty());
}
