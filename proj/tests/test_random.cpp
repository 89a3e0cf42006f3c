#include <catch2/catch_amalgamated.hpp>

#include "icmn/random.hpp"
#include "icmn/stats.hpp"

using namespace icmn;

TEST_CASE("streams are reproducible and substreams are distinct", "[random]") {
    RandomStream a(derive_seed(42, 1, 2));
    RandomStream b(derive_seed(42, 1, 2));
    RandomStream c(derive_seed(42, 1, 3));
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.bits();
        REQUIRE(x == b.bits());
        any_diff |= x != c.bits();
    }
    REQUIRE(any_diff);
    REQUIRE(derive_seed(42, 1, 2) != derive_seed(42, 2, 1));
    REQUIRE(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("uniform01 stays in [0,1)", "[random]") {
    RandomStream rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("exponential draws have the right mean and variance", "[random]") {
    // mean(1e6 draws at rate 1) ~ 1.0 within 0.01; variance at rate 2 ~ 0.25.
    RandomStream rng(12345);
    RunningStats unit;
    for (int i = 0; i < 1000000; ++i)
        unit.add(rng.exponential(1.0));
    REQUIRE(unit.mean == Catch::Approx(1.0).margin(0.01));

    RandomStream rng2(999);
    RunningStats slow;
    for (int i = 0; i < 1000000; ++i)
        slow.add(rng2.exponential(6.96e-4));
    REQUIRE(slow.mean == Catch::Approx(1.0 / 6.96e-4).epsilon(0.01)); // ~1436.8 s

    RandomStream rng3(31);
    RunningStats fast;
    for (int i = 0; i < 1000000; ++i)
        fast.add(rng3.exponential(2.0));
    REQUIRE(fast.variance() == Catch::Approx(0.25).margin(0.01));
}

TEST_CASE("exponential rejects non-positive rates", "[random]") {
    RandomStream rng(1);
    REQUIRE_THROWS_AS(rng.exponential(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(rng.exponential(-1.0), std::invalid_argument);
}

TEST_CASE("fair coin and bounded integers", "[random]") {
    RandomStream rng(5);
    int heads = 0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i)
        heads += rng.coin();
    REQUIRE(std::abs(heads / static_cast<double>(trials) - 0.5) < 0.01);

    RandomStream rng2(6);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng2.below(7);
        REQUIRE(v < 7);
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts)
        REQUIRE(std::abs(c - 10000) < 500);
    REQUIRE_THROWS_AS(rng2.below(0), std::invalid_argument);
}

TEST_CASE("ks statistic behaves on exact exponential data", "[random]") {
    RandomStream rng(77);
    std::vector<double> xs;
    xs.reserve(20000);
    for (int i = 0; i < 20000; ++i)
        xs.push_back(rng.exponential(3.0));
    const double d = ks_statistic_exponential(xs, 3.0);
    REQUIRE(d < ks_critical_value(0.01, xs.size()));
    // Wrong rate by 2x must be detected at this sample size.
    REQUIRE(ks_statistic_exponential(xs, 6.0) > ks_critical_value(0.01, xs.size()));
}
