#include <catch2/catch_amalgamated.hpp>

#include "ri/orbit.hpp"

using namespace ri;

TEST_CASE("orbit exponent map examples") {
    // (p,q) -> r with 1/r = (1/q - 1/p)_+
    CHECK(orbit_exponent(Exponent(1.0), Exponent(2.0)).is_inf());
    CHECK(orbit_exponent(Exponent::infinity(), Exponent(1.0)).value() == 1.0);
    CHECK(orbit_exponent(Exponent(3.0), Exponent(3.0)).is_inf());
    Exponent r = orbit_exponent(Exponent::infinity(), Exponent(2.0));
    CHECK(r.value() == 2.0);
    // 1/r = 3/4 - 1/4 = 1/2 exactly
    Exponent r2 = orbit_exponent(Exponent(4.0), Exponent::from_ratio(4, 3));
    CHECK(r2.num() == 2);
    CHECK(r2.den() == 1);
}

TEST_CASE("geometric convolution weights, unit impulse") {
    // alpha = delta at the last index, eps = 1/2: beta0_m = 2^{m-last}
    std::vector<double> a0(6, 0.0), a1(6, 0.0);
    a0[5] = 1.0;
    a1[5] = 1.0;
    ConvolutionWeights w = convolution_weights(a0, a1, 0.5);
    for (int m = 0; m <= 5; ++m)
        CHECK(w.beta0[m] == Catch::Approx(std::pow(2.0, m - 5)).epsilon(1e-15));
    // beta1 accumulates the other way: zero before the impulse
    for (int m = 0; m < 5; ++m) CHECK(w.beta1[m] == 0.0);
    CHECK(w.beta1[5] == 1.0);
}

TEST_CASE("weights satisfy the decay inequalities and dominate alpha") {
    std::vector<double> a0 = {0.5, 2.0, 1.0, 4.0}, a1 = {1.0, 0.25, 3.0, 1.0};
    ConvolutionWeights w = convolution_weights(a0, a1, 0.25);
    for (int m = 0; m < 4; ++m) {
        CHECK(a0[m] <= w.beta0[m]);
        CHECK(a1[m] <= w.beta1[m]);
        if (m < 3) {
            CHECK(w.beta0[m + 1] * 0.75 <= w.beta0[m] * (1.0 + 1e-15));
            CHECK(w.beta1[m] * 0.75 <= w.beta1[m + 1] * (1.0 + 1e-15));
        }
    }
}

TEST_CASE("l1 couple K equals the general solver's closed form") {
    std::vector<double> psi = {0.2, 1.0, 3.0}, u = {0.25, 1.0, 4.0};
    std::vector<double> a0(3), a1(3);
    InterpFunction phi = InterpFunction::power(0.5);
    for (int i = 0; i < 3; ++i) a0[i] = a1[i] = psi[i] / phi.rho(u[i]);
    ConvolutionWeights w = convolution_weights(a0, a1, 0.25);
    std::vector<double> w0(3), w1(3);
    for (int i = 0; i < 3; ++i) {
        w0[i] = 1.0 / w.beta0[i];
        w1[i] = 1.0 / (w.beta1[i] * u[i]);
    }
    Couple c = Couple::sequence(Exponent(1.0), w0, Exponent(1.0), w1);
    for (double t : {0.1, 1.0, 10.0}) {
        double lhs = l1_couple_k(psi, w, u, 1.0, t);
        double rhs = k_at(c, psi, 1.0, t).value;
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("frozen construction fixture on the square-root power") {
    InterpFunction phi = InterpFunction::power(0.5);
    std::vector<double> u, psi;
    for (int n = -5; n <= 5; ++n) {
        u.push_back(std::pow(4.0, n));
        psi.push_back(std::sqrt(u.back()));
    }
    std::vector<double> grid;
    for (int e = -8; e <= 8; ++e) grid.push_back(std::exp2(e));
    WeightConstructionReport rep = weight_construction_check(phi, psi, u, 0.25, grid);
    CHECK(rep.q_measured == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(rep.q_prime == Catch::Approx(1.5).epsilon(1e-12));
    CHECK(rep.recurrence_ok);
    CHECK(rep.recurrence_residual == 0.0);
    CHECK(rep.per_index_ok);
    // alpha = 1 everywhere, so beta0[0] = sum_{j<=10} (3/4)^j exactly
    CHECK(rep.weights.beta0[0] ==
          Catch::Approx(4.0 * (1.0 - std::pow(0.75, 11))).epsilon(1e-14));
    CHECK(rep.grid_sup == Catch::Approx(0.84854886837391308).epsilon(1e-9));  // recorded
    CHECK(rep.grid_sup <= 10.0);
}

TEST_CASE("diagonal operator norm, sup to weighted-l1 legs") {
    std::vector<double> ones = {1.0, 1.0, 1.0};
    Couple src(WeightedSpace({1.0, 1.0, 1.0}, Exponent::infinity(), ones),
               WeightedSpace({1.0, 1.0, 1.0}, Exponent::infinity(), {1.0, 2.0, 4.0}));
    Couple dst(WeightedSpace({1.0, 1.0, 1.0}, Exponent(1.0), ones),
               WeightedSpace({1.0, 1.0, 1.0}, Exponent(1.0), {1.0, 2.0, 4.0}));
    OperatorSpec spec{DiagonalOp{{1.0, 0.5, 0.25}}, 0.0};
    double bound = operator_couple_bound(spec, src, dst);
    CHECK(bound == Catch::Approx(1.75).epsilon(1e-14));  // sum of the multipliers
}

TEST_CASE("diagonal bound dominates on random elements") {
    Couple src = Couple::sequence(Exponent(2.0), {1.0, 3.0}, Exponent(4.0), {0.5, 1.0});
    Couple dst = Couple::sequence(Exponent(1.0), {2.0, 1.0}, Exponent(2.0), {1.0, 1.0});
    OperatorSpec spec{DiagonalOp{{0.8, -1.3}}, 0.0};
    double bound = operator_couple_bound(spec, src, dst);
    for (double a : {0.2, 1.0, 3.0})
        for (double b : {-1.0, 0.5}) {
            Element x = {a, b};
            ApplyResult res = apply_operator(spec, src, dst, x);
            CHECK(dst.norm0(res.y) <= bound * src.norm0(x) * (1.0 + 1e-12));
            CHECK(dst.norm1(res.y) <= bound * src.norm1(x) * (1.0 + 1e-12));
        }
}

TEST_CASE("rank one operator bound is dual norm times target norm") {
    Couple src = Couple::sequence(Exponent(1.0), {1.0, 1.0}, Exponent(2.0), {2.0, 1.0});
    Couple dst = Couple::sequence(Exponent(2.0), {1.0, 1.0}, Exponent(1.0), {1.0, 3.0});
    RankOneOp op{{1.0, -2.0}, {0.5, 1.0}};
    OperatorSpec spec{op, 0.0};
    double bound = operator_couple_bound(spec, src, dst);
    double leg0 = src.space0().dual_norm(op.g) * dst.space0().norm(op.y);
    double leg1 = src.space1().dual_norm(op.g) * dst.space1().norm(op.y);
    CHECK(bound == Catch::Approx(std::max(leg0, leg1)).epsilon(1e-14));
    Element x = {1.0, 0.5};
    ApplyResult res = apply_operator(spec, src, dst, x);
    CHECK(dst.norm0(res.y) <= bound * src.norm0(x) * (1.0 + 1e-12));
    CHECK(dst.norm1(res.y) <= bound * src.norm1(x) * (1.0 + 1e-12));
}

TEST_CASE("factorized kernel bound dominates on random elements") {
    Couple src = Couple::sequence(Exponent(2.0), {1.0, 2.0}, Exponent(1.0), {1.0, 0.5});
    Couple dst = Couple::sequence(Exponent(2.0), {1.0, 1.0}, Exponent(2.0), {2.0, 1.0});
    LinftyFactorizedOp op{{{0.3, -0.8}, {1.1, 0.2}}};
    OperatorSpec spec{op, 0.0};
    double bound = operator_couple_bound(spec, src, dst);
    for (double a : {1.0, -0.4})
        for (double b : {0.7, 2.0}) {
            Element x = {a, b};
            ApplyResult res = apply_operator(spec, src, dst, x);
            CHECK(dst.norm0(res.y) <= bound * src.norm0(x) * (1.0 + 1e-12));
            CHECK(dst.norm1(res.y) <= bound * src.norm1(x) * (1.0 + 1e-12));
        }
}

TEST_CASE("orbit norm with sup-type sequence exponents is the sup ratio") {
    Couple src = Couple::sequence(Exponent(1.0), {1.0, 0.5}, Exponent::infinity(), {1.0, 2.0});
    Couple dst = Couple::sequence(Exponent(1.0), {2.0, 1.0}, Exponent::infinity(), {0.5, 1.0});
    OrbitReport rep = orbit_norm({src, dst, {1.0, -0.7}, {0.4, 0.9}});
    CHECK(rep.r0.is_inf());
    CHECK(rep.r1.is_inf());
    REQUIRE(rep.phi_in_phi0);
    double sup = 0.0;
    for (std::size_t i = 0; i < rep.u.t.size(); ++i)
        sup = std::max(sup, rep.k_seq[i] / rep.phi->rho(rep.u.t[i]));
    CHECK(rep.orbit_norm_value == Catch::Approx(sup).epsilon(1e-4));
}

TEST_CASE("zero target element has zero orbit norm") {
    Couple c = Couple::sequence(Exponent(1.0), {1.0}, Exponent(2.0), {1.0});
    OrbitReport rep = orbit_norm({c, c, {1.0}, {0.0}});
    CHECK(rep.orbit_norm_value == 0.0);
}

TEST_CASE("applying a couple-bounded operator keeps the orbit norm near 1") {
    Couple src = Couple::sequence(Exponent(1.0), {1.0, 2.0}, Exponent(2.0), {1.0, 0.5});
    Couple dst = Couple::sequence(Exponent(2.0), {1.0, 1.0}, Exponent(2.0), {2.0, 1.0});
    OperatorSpec spec{DiagonalOp{{0.7, 1.2}}, 0.0};
    double bound = operator_couple_bound(spec, src, dst);
    for (double& v : std::get<DiagonalOp>(spec.op).d) v /= bound;
    Element a = {1.0, -0.5};
    Element b = apply_operator(spec, src, dst, a).y;
    OrbitReport rep = orbit_norm({src, dst, a, b});
    CHECK(rep.orbit_norm_value > 0.0);
    CHECK(rep.orbit_norm_value < 10.0);
}

TEST_CASE("embedding chain on the constructed weights") {
    InterpFunction phi = InterpFunction::power(0.5);
    std::vector<double> u, psi;
    for (int n = -4; n <= 4; ++n) {
        u.push_back(std::pow(4.0, n));
        psi.push_back(std::sqrt(u.back()));
    }
    std::vector<double> a(9);
    for (int i = 0; i < 9; ++i) a[i] = psi[i] / phi.rho(u[i]);
    ConvolutionWeights w = convolution_weights(a, a, 0.25);
    EmbeddingChainReport rep = embedding_chain_check(psi, w, u, Exponent(2.0), Exponent(2.0),
                                                     Exponent(2.0), Exponent(2.0));
    CHECK(rep.left_ok);
    CHECK(rep.right_ok);
}

TEST_CASE("harness is reproducible and failure free at small scale") {
    HarnessReport a = inclusion_harness(7, 10);
    HarnessReport b = inclusion_harness(7, 10);
    REQUIRE(a.trials.size() == 10);
    CHECK(a.failures == 0);
    for (int i = 0; i < 10; ++i) {
        CHECK(a.trials[i].measured_constant == b.trials[i].measured_constant);
        CHECK(a.trials[i].op_kind == b.trials[i].op_kind);
    }
}

TEST_CASE("validation") {
    std::vector<double> g = {1.0, 1.0};
    CHECK_THROWS_AS(convolution_weights(g, {1.0}, 0.25), ValidationError);
    CHECK_THROWS_AS(convolution_weights(g, g, 0.9), ValidationError);
    CHECK_THROWS_AS(convolution_weights({-1.0, 1.0}, g, 0.25), ValidationError);
    Couple c = Couple::sequence(Exponent(1.0), {1.0}, Exponent(2.0), {1.0});
    CHECK_THROWS_AS(orbit_norm({c, c, {0.0}, {1.0}}), ValidationError);
    CHECK_THROWS_AS(orbit_norm({c, c, {1.0, 1.0}, {1.0}}), ValidationError);
}
