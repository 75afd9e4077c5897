#include <catch2/catch_amalgamated.hpp>

#include "ri/clnorm.hpp"
#include "ri/means.hpp"

using namespace ri;

namespace {

InterpFunction sampled_rho(double (*g)(double)) {
    std::vector<double> ts, vs;
    for (int e = -80; e <= 80; ++e) {
        ts.push_back(std::exp2(0.5 * e));
        vs.push_back(g(ts.back()));
    }
    return InterpFunction::from_samples(ts, vs);
}

}  // namespace

TEST_CASE("both linear parts collapse to the sum space") {
    InterpFunction phi = sampled_rho(+[](double t) { return 1.0 + t; });
    Couple c = Couple::sequence(Exponent(1.0), {1.0, 2.0}, Exponent(2.0), {1.0, 1.0});
    Element x = {1.0, -0.5};
    MeansResult r = means_norm(phi, c, Exponent(2.0), Exponent(2.0), x);
    CHECK(r.degenerate_case == DegenerateCase::sum_space);
    CHECK(r.value == Catch::Approx(k_at(c, x, 1.0, 1.0).value).epsilon(1e-6));
}

TEST_CASE("pure first-argument function is the first leg") {
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 3.0}, Exponent(1.0), {2.0, 1.0});
    Element x = {1.0, 0.6};
    MeansResult r = means_norm(InterpFunction::power(0.0), c, Exponent(1.0), Exponent(1.0), x);
    CHECK(r.value == Catch::Approx(c.norm0(x)).epsilon(1e-12));
    MeansResult r1 = means_norm(InterpFunction::power(1.0), c, Exponent(1.0), Exponent(1.0), x);
    CHECK(r1.value == Catch::Approx(c.norm1(x)).epsilon(1e-12));
}

TEST_CASE("bounded trace on both sides gives the intersection") {
    InterpFunction phi = sampled_rho(+[](double t) { return std::min(1.0, t); });
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 0.5}, Exponent::infinity(), {1.0, 4.0});
    Element x = {1.0, 1.0};
    MeansResult r = means_norm(phi, c, Exponent(2.0), Exponent(2.0), x);
    CHECK(r.degenerate_case == DegenerateCase::intersection);
    CHECK(r.value == Catch::Approx(std::max(c.norm0(x), c.norm1(x))).epsilon(1e-12));
}

TEST_CASE("mixed linear part with a remainder is rejected") {
    InterpFunction phi = sampled_rho(+[](double t) { return 1.0 + std::sqrt(t); });
    Couple c = Couple::sequence(Exponent(2.0), {1.0}, Exponent(2.0), {1.0});
    CHECK_THROWS_AS(means_norm(phi, c, Exponent(2.0), Exponent(2.0), {1.0}), ValidationError);
}

TEST_CASE("frozen direct-representation fixture") {
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(2.0), {1.0, 2.0}, Exponent(2.0), {3.0, 0.5});
    Element x = {1.0, 1.0};
    BalancedSequence ts;
    ts.q = 2.0;
    ts.first_index = -6;
    ts.side = SequenceSide::two_sided;
    for (int n = -6; n <= 6; ++n) ts.t.push_back(std::pow(4.0, n));

    double direct = means_norm_direct(phi, c, Exponent(2.0), Exponent(2.0), x, ts, 4);
    CHECK(direct == Catch::Approx(1.330682433659099).epsilon(0.05));  // recorded oracle value

    MeansResult r = means_norm(phi, c, Exponent(2.0), Exponent(2.0), x);
    CHECK(r.degenerate_case == DegenerateCase::none);
    double ratio = direct / r.value;
    INFO("direct/means ratio " << ratio);
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);
}

TEST_CASE("characterization value stays within a fixed band of the lattice norm") {
    InterpFunction phi = InterpFunction::power(0.5);
    for (int k = 0; k < 5; ++k) {
        double w = std::pow(2.0, k - 2);
        Couple c = Couple::sequence(Exponent(1.0), {1.0, w}, Exponent(2.0), {w, 1.0});
        Element x = {1.0, 0.7};
        double m = means_norm(phi, c, Exponent(1.0), Exponent(2.0), x).value;
        double l = cl_norm(phi, c, x, 1e-6).value;
        double band = std::max(m / l, l / m);
        INFO("w=" << w << " means=" << m << " cl=" << l);
        CHECK(band < 10.0);
    }
}

TEST_CASE("zero element is free") {
    InterpFunction phi = InterpFunction::power(0.5);
    Couple c = Couple::sequence(Exponent(2.0), {1.0}, Exponent(2.0), {1.0});
    CHECK(means_norm(phi, c, Exponent(2.0), Exponent(2.0), {0.0}).value == 0.0);
}

TEST_CASE("direct oracle guards its scale") {
    InterpFunction phi = InterpFunction::power(0.5);
    BalancedSequence ts;
    ts.first_index = 0;
    ts.t = {1.0};
    Couple big = Couple::sequence(Exponent(2.0), std::vector<double>(4, 1.0), Exponent(2.0),
                                  std::vector<double>(4, 1.0));
    CHECK_THROWS_AS(
        means_norm_direct(phi, big, Exponent(2.0), Exponent(2.0), {1, 1, 1, 1}, ts, 4),
        OracleScaleError);
    Couple c = Couple::sequence(Exponent(2.0), {1.0}, Exponent(2.0), {1.0});
    CHECK_THROWS_AS(means_norm_direct(phi, c, Exponent(2.0), Exponent(2.0), {1.0}, ts, 9),
                    OracleScaleError);
}
