#include <catch2/catch_amalgamated.hpp>

#include "ri/kfunc.hpp"
#include "ri/rng.hpp"

using namespace ri;

TEST_CASE("single atom picks the cheaper endpoint") {
    Couple c = Couple::sequence(Exponent(2.0), {5.0}, Exponent(2.0), {1.0});
    KResult r = k_at(c, {2.0}, 1.0, 5.0);
    CHECK(r.value == Catch::Approx(10.0).epsilon(1e-14));  // min(1*10, 5*2)
    CHECK(r.method == KMethod::closed_form);
}

TEST_CASE("both legs l1 splits per atom") {
    // contributions min(1,3) and min(4,2)
    Couple c = Couple::sequence(Exponent(1.0), {1.0, 2.0}, Exponent(1.0), {3.0, 1.0});
    KResult r = k_at(c, {1.0, 2.0}, 1.0, 1.0);
    CHECK(r.value == Catch::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("identical legs give min(s,t) times the norm") {
    Couple c = Couple::sequence(Exponent(3.0), {1.0, 2.0}, Exponent(3.0), {1.0, 2.0});
    Element x = {1.0, -1.0};
    double n = c.norm0(x);
    CHECK(k_at(c, x, 2.0, 0.5).value == Catch::Approx(0.5 * n).epsilon(1e-12));
    CHECK(k_at(c, x, 0.25, 8.0).value == Catch::Approx(0.25 * n).epsilon(1e-12));
}

TEST_CASE("decomposition witnesses add back to x") {
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 3.0}, Exponent(4.0), {2.0, 0.5});
    Element x = {1.5, -0.7};
    KResult r = k_at(c, x, 1.0, 2.0);
    for (int i = 0; i < 2; ++i) CHECK(r.x0[i] + r.x1[i] == Catch::Approx(x[i]).margin(1e-14));
    CHECK(r.value == Catch::Approx(1.0 * c.norm0(r.x0) + 2.0 * c.norm1(r.x1)).epsilon(1e-12));
}

TEST_CASE("frozen grid-oracle fixture, p0=p1=2") {
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 1.0}, Exponent(2.0), {2.0, 1.0});
    Element x = {1.0, 2.0};
    double oracle = 2.2360679774997898;  // recorded from k_oracle
    CHECK(k_oracle(c, x, 1.0, 1.5) == Catch::Approx(oracle).epsilon(1e-9));
    CHECK(k_at(c, x, 1.0, 1.5).value == Catch::Approx(oracle).margin(1e-5 * (1.0 + oracle)));
}

TEST_CASE("solver tracks the oracle on random instances") {
    const std::vector<double> menu = {1.0, 1.5, 2.0, 4.0,
                                      std::numeric_limits<double>::infinity()};
    for (int trial = 0; trial < 40; ++trial) {
        Rng rng = Rng::stream(911, static_cast<std::uint64_t>(trial));
        int M = 1 + rng.uniform_int(3);
        std::vector<double> w0(M), w1(M);
        Element x(M);
        for (auto& v : w0) v = rng.log_uniform(1.0 / 16.0, 16.0);
        for (auto& v : w1) v = rng.log_uniform(1.0 / 16.0, 16.0);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        if (std::abs(x[0]) < 0.1) x[0] = 1.0;
        Couple c = Couple::sequence(Exponent(menu[rng.uniform_int(5)]), w0,
                                    Exponent(menu[rng.uniform_int(5)]), w1);
        double s = rng.log_uniform(1.0 / 16.0, 16.0), t = rng.log_uniform(1.0 / 16.0, 16.0);
        double solved = k_at(c, x, s, t).value;
        double oracle = k_oracle(c, x, s, t);
        INFO("trial " << trial);
        CHECK(std::abs(solved - oracle) <= 1e-5 * (1.0 + oracle));
    }
}

TEST_CASE("K is monotone and concave in t") {
    Couple c = Couple::sequence(Exponent(1.0), {1.0, 2.0, 0.5}, Exponent(2.0), {3.0, 1.0, 1.0});
    Element x = {1.0, -0.5, 2.0};
    std::vector<double> grid;
    for (int e = -6; e <= 6; ++e) grid.push_back(std::exp2(e));
    auto prof = k_profile(c, x, grid);
    for (std::size_t i = 1; i < prof.size(); ++i) {
        CHECK(prof[i].second >= prof[i - 1].second * (1.0 - 1e-9));
        // K(1,t)/t nonincreasing
        CHECK(prof[i].second / prof[i].first <=
              prof[i - 1].second / prof[i - 1].first * (1.0 + 1e-9));
    }
}

TEST_CASE("extreme scale separation stays exact") {
    // geometric model couple: K(1,1) must track the profile value ~1
    const int N = 30;
    std::vector<double> w0(2 * N + 1, 1.0), w1(2 * N + 1);
    Element x(2 * N + 1);
    for (int i = 0; i <= 2 * N; ++i) {
        double tn = std::pow(16.0, i - N);
        w1[i] = 1.0 / tn;
        x[i] = std::pow(tn, 0.25);
    }
    Couple c = Couple::sequence(Exponent(2.0), w0, Exponent(2.0), w1);
    double v = k_at(c, x, 1.0, 1.0, 1e-6).value;
    CHECK(v > 0.5);
    CHECK(v < 5.0);
}

TEST_CASE("sum and intersection norms") {
    Couple c = Couple::sequence(Exponent(1.0), {1.0}, Exponent::infinity(), {4.0});
    auto [sum, inter] = sum_and_intersection_norms(c, {2.0});
    CHECK(sum == Catch::Approx(2.0).epsilon(1e-12));  // min(2, 8)
    CHECK(inter == 8.0);
}

TEST_CASE("input validation") {
    Couple c = Couple::sequence(Exponent(1.0), {1.0}, Exponent(2.0), {1.0});
    CHECK_THROWS_AS(k_at(c, {1.0, 2.0}, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(k_at(c, {1.0}, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(k_profile(c, {1.0}, {2.0, 1.0}), ValidationError);
    Couple big = Couple::sequence(Exponent(2.0), std::vector<double>(5, 1.0), Exponent(1.0),
                                  std::vector<double>(5, 1.0));
    CHECK_THROWS_AS(k_oracle(big, {1, 1, 1, 1, 1}, 1.0, 1.0), OracleScaleError);
}
