#include <catch2/catch_amalgamated.hpp>

#include "ri/clnorm.hpp"
#include "ri/rng.hpp"

using namespace ri;

TEST_CASE("single atom with power function has an explicit norm") {
    // |x| = a^{1-th} b^th with max(a w0, b w1) minimal: value = |x| w0^{1-th} w1^th
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(2.0), {4.0}, Exponent(2.0), {1.0});
    CLResult r = cl_norm(phi, c, {3.0}, 1e-8);
    CHECK(r.value == Catch::Approx(3.0 * 2.0).epsilon(1e-6));
    CHECK(phi(r.witness0[0], r.witness1[0]) == Catch::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("frozen asymmetric fixture matches the grid oracle") {
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(1.0), {1.0, 3.0}, Exponent(2.0), {2.0, 0.7});
    Element x = {1.0, 0.8};
    double value = cl_norm(phi, c, x, 1e-6).value;
    CHECK(value == Catch::Approx(2.1677487134685314).epsilon(1e-4));  // recorded cl_oracle
    CHECK(value == Catch::Approx(cl_oracle(phi, c, x)).epsilon(1e-4));
}

TEST_CASE("oracle agreement on random instances") {
    for (int trial = 0; trial < 12; ++trial) {
        Rng rng = Rng::stream(331, static_cast<std::uint64_t>(trial));
        int M = 1 + rng.uniform_int(3);
        std::vector<double> w0(M), w1(M);
        Element x(M);
        for (auto& v : w0) v = rng.log_uniform(0.25, 4.0);
        for (auto& v : w1) v = rng.log_uniform(0.25, 4.0);
        for (auto& v : x) v = rng.log_uniform(0.5, 2.0);
        double pv0 = rng.uniform_int(2) ? 2.0 : 1.0;
        double pv1 = rng.uniform_int(2) ? std::numeric_limits<double>::infinity() : 2.0;
        Couple c = Couple::sequence(Exponent(pv0), w0, Exponent(pv1), w1);
        InterpFunction phi = InterpFunction::power(rng.uniform(0.3, 0.7));
        double a = cl_norm(phi, c, x, 1e-6).value;
        double b = cl_oracle(phi, c, x);
        INFO("trial " << trial);
        CHECK(a == Catch::Approx(b).epsilon(2e-4));
    }
}

TEST_CASE("witnesses are feasible and achieve the value") {
    InterpFunction phi = InterpFunction::power(0.3);
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 2.0, 0.5}, Exponent(4.0), {1.0, 1.0, 3.0});
    Element x = {1.0, -2.0, 0.3};
    CLResult r = cl_norm(phi, c, x, 1e-8);
    for (int i = 0; i < 3; ++i)
        CHECK(phi(r.witness0[i], r.witness1[i]) == Catch::Approx(std::abs(x[i])).epsilon(1e-7));
    CHECK(r.value ==
          Catch::Approx(std::max(c.norm0(r.witness0), c.norm1(r.witness1))).epsilon(1e-12));
    CHECK(r.residual <= 1e-7);
}

TEST_CASE("norm scales with the element") {
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(1.0), {1.0, 1.0}, Exponent(2.0), {3.0, 0.5});
    Element x = {1.0, 0.4};
    Element y = {2.5, 1.0};
    double vx = cl_norm(phi, c, x, 1e-8).value;
    double vy = cl_norm(phi, c, y, 1e-8).value;
    CHECK(vy == Catch::Approx(2.5 * vx).epsilon(1e-5));
}

TEST_CASE("zero element and zero coordinates") {
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 1.0}, Exponent(2.0), {1.0, 1.0});
    CHECK(cl_norm(phi, c, {0.0, 0.0}).value == 0.0);
    CLResult r = cl_norm(phi, c, {0.0, 1.0}, 1e-8);
    CHECK(r.witness0[0] == 0.0);
    CHECK(r.witness1[0] == 0.0);
    CHECK(r.value == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sequence-couple form: single term reduces to psi over rho") {
    InterpFunction phi = InterpFunction::power(0.25);
    CLResult r = cl_seq_norm(phi, Exponent(2.0), Exponent(2.0), {3.0}, {1.7});
    CHECK(r.value == Catch::Approx(1.7 / phi.rho(3.0)).epsilon(1e-5));
}

TEST_CASE("sequence-couple form validates the grid") {
    InterpFunction phi = InterpFunction::power(0.5);
    CHECK_THROWS_AS(cl_seq_norm(phi, Exponent(1.0), Exponent(1.0), {1.0, 1.0}, {1.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(cl_seq_norm(phi, Exponent(1.0), Exponent(1.0), {1.0, -2.0}, {1.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(cl_seq_norm(phi, Exponent(1.0), Exponent(1.0), {}, {}), ValidationError);
}

TEST_CASE("oracle scale guard") {
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(2.0), std::vector<double>(4, 1.0), Exponent(2.0),
                                std::vector<double>(4, 1.0));
    CHECK_THROWS_AS(cl_oracle(phi, c, {1, 1, 1, 1}), OracleScaleError);
}
