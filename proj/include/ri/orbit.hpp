#ifndef RI_ORBIT_HPP
#define RI_ORBIT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ri/clnorm.hpp"
#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/means.hpp"
#include "ri/phifn.hpp"
#include "ri/rng.hpp"
#include "ri/space.hpp"

namespace ri {

/// r_i^{-1} = (q_i^{-1} - p_i^{-1})_+, exact when the inputs carry rationals.
inline Exponent orbit_exponent(const Exponent& p, const Exponent& q) {
    if (p.has_ratio() && q.has_ratio()) {
        // inverses as fractions: 1/p = pd/pn (inf stored as 1/0 -> inverse 0/1)
        std::int64_t pn = p.is_inf() ? 1 : p.num(), pd = p.is_inf() ? 0 : p.den();
        std::int64_t qn = q.is_inf() ? 1 : q.num(), qd = q.is_inf() ? 0 : q.den();
        std::int64_t num = qd * pn - pd * qn;  // (1/q - 1/p) * (qn*pn)
        if (num <= 0) return Exponent::infinity();
        return Exponent::from_ratio(qn * pn, num);
    }
    double rinv = std::max(0.0, q.inv() - p.inv());
    return rinv == 0.0 ? Exponent::infinity() : Exponent(1.0 / rinv);
}

inline std::pair<Exponent, Exponent> orbit_exponents(const Exponent& p0, const Exponent& p1,
                                                     const Exponent& q0, const Exponent& q1) {
    return {orbit_exponent(p0, q0), orbit_exponent(p1, q1)};
}

struct OrbitProblem {
    Couple source;
    Couple target;
    Element a;
    Element b;
};

struct OrbitReport {
    Exponent r0, r1;
    std::optional<InterpFunction> phi;     // K(.,.,a; source)
    std::optional<InterpFunction> psi_b;   // K(.,.,b; target)
    BalancedSequence u;
    std::vector<double> k_seq;             // psi_b(u_m)
    std::optional<CLResult> cl;
    double orbit_norm_value = 0.0;
    bool phi_in_phi0 = false;
};

/// The main computation: orbit norm of b relative to a via the CL
/// characterization on the balanced grid of b's K-profile.
inline OrbitReport orbit_norm(const OrbitProblem& prob, double q = 2.0,
                              double tmin = std::exp2(-40.0), double tmax = std::exp2(40.0)) {
    if (prob.a.size() != prob.source.atoms() || prob.b.size() != prob.target.atoms())
        throw ValidationError("orbit_norm: element/couple size mismatch");
    if (is_zero(prob.a)) throw ValidationError("orbit_norm: a must be nonzero");

    OrbitReport rep;
    std::tie(rep.r0, rep.r1) =
        orbit_exponents(prob.source.space0().exponent(), prob.source.space1().exponent(),
                        prob.target.space0().exponent(), prob.target.space1().exponent());
    rep.phi = InterpFunction::k_derived(prob.source, prob.a, 1e-6);
    PhiClassification cls = classify(*rep.phi, tmin, tmax);
    rep.phi_in_phi0 = cls.in_phi0;
    if (!cls.in_phi0) {
        // reduction of non-Phi0 parameters is out of scope; flagged, not computed
        rep.orbit_norm_value = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    if (is_zero(prob.b)) return rep;

    rep.psi_b = InterpFunction::k_derived(prob.target, prob.b, 1e-6);
    rep.u = balanced_sequence(*rep.psi_b, q, tmin, tmax);
    for (double um : rep.u.t) rep.k_seq.push_back(rep.psi_b->rho(um));
    rep.cl = cl_seq_norm(*rep.phi, rep.r0, rep.r1, rep.u.t, rep.k_seq);
    rep.orbit_norm_value = rep.cl->value;
    return rep;
}

/// Geometric convolution weights feeding the weighted-l1 inclusion bound.
/// beta0 accumulates forward (beta0_m = alpha0_m + (1-eps) beta0_{m+1}),
/// beta1 backward, which is the direction making the domination inequalities and
/// the dominations alpha <= beta identities.
struct ConvolutionWeights {
    double epsilon = 0.25;
    int first_index = 0;  // index of entry 0, aligned with the balanced u grid
    std::vector<double> alpha0, alpha1, beta0, beta1;
};

inline ConvolutionWeights convolution_weights(const std::vector<double>& alpha0,
                                  const std::vector<double>& alpha1, double epsilon,
                                  int first_index = 0) {
    if (alpha0.size() != alpha1.size())
        throw ValidationError("convolution_weights: alpha length mismatch");
    if (!(epsilon > 0.0) || epsilon > 0.5)
        throw ValidationError("convolution_weights: epsilon must lie in (0, 1/2]");
    for (std::size_t i = 0; i < alpha0.size(); ++i)
        if (alpha0[i] < 0.0 || alpha1[i] < 0.0)
            throw ValidationError("convolution_weights: alphas must be nonnegative");
    ConvolutionWeights w;
    w.epsilon = epsilon;
    w.first_index = first_index;
    w.alpha0 = alpha0;
    w.alpha1 = alpha1;
    const std::size_t n = alpha0.size();
    w.beta0.assign(n, 0.0);
    w.beta1.assign(n, 0.0);
    const double decay = 1.0 - epsilon;
    for (std::size_t i = n; i-- > 0;)
        w.beta0[i] = alpha0[i] + (i + 1 < n ? decay * w.beta0[i + 1] : 0.0);
    for (std::size_t i = 0; i < n; ++i)
        w.beta1[i] = alpha1[i] + (i > 0 ? decay * w.beta1[i - 1] : 0.0);
    return w;
}

/// K(s,t,{psi(u_m)};{l_1(1/beta0), l_1(1/(beta1 u))}) via the exact p=1 sum.
inline double l1_couple_k(const std::vector<double>& psi_u, const ConvolutionWeights& w,
                          const std::vector<double>& u, double s, double t) {
    if (psi_u.size() != u.size() || psi_u.size() != w.beta0.size())
        throw ValidationError("l1_couple_k: sequence lengths disagree");
    double total = 0.0;
    for (std::size_t m = 0; m < psi_u.size(); ++m) {
        if (psi_u[m] == 0.0) continue;
        if (w.beta0[m] <= 0.0 || w.beta1[m] <= 0.0)
            throw ValidationError("l1_couple_k: zero beta under positive psi");
        total += psi_u[m] * std::min(s / w.beta0[m], t / (w.beta1[m] * u[m]));
    }
    return total;
}

struct WeightConstructionReport {
    ConvolutionWeights weights;
    double q_measured = 0.0;     // decay ratio of the (psi, u) grid itself
    double q_prime = 0.0;        // (1 - eps) q_measured, the constant of the proof
    double grid_sup = 0.0;       // sup over grid of K(s,t)/phi(s,t)
    bool per_index_ok = false;   // K(beta0_k, beta1_k u_k) <= q'/(q'-1) psi(u_k)
    double worst_index_ratio = 0.0;
    bool recurrence_ok = false;
    double recurrence_residual = 0.0;    // recurrence identity residual
};

/// Builds the convolution weights and measures the constants of the inclusion.
/// alpha0/alpha1 must satisfy psi(u_m) = phi(alpha0_m, alpha1_m u_m); pass
/// empty vectors for the canonical split alpha0 = alpha1 = psi(u_m)/rho(u_m).
inline WeightConstructionReport weight_construction_check(const InterpFunction& phi, const std::vector<double>& psi_u,
                                const std::vector<double>& u, double epsilon,
                                const std::vector<double>& t_grid,
                                std::vector<double> alpha0 = {},
                                std::vector<double> alpha1 = {}) {
    if (psi_u.size() != u.size()) throw ValidationError("weight_construction_check: length mismatch");
    const std::size_t n = u.size();
    if (alpha0.empty() && alpha1.empty()) {
        alpha0.resize(n);
        alpha1.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
            double r = psi_u[m] / phi.rho(u[m]);
            alpha0[m] = r;
            alpha1[m] = r;
        }
    }
    if (alpha0.size() != n || alpha1.size() != n)
        throw ValidationError("weight_construction_check: alpha length mismatch");
    for (std::size_t m = 0; m < n; ++m) {
        if (psi_u[m] == 0.0) continue;
        if (!(alpha0[m] > 0.0) || !(alpha1[m] > 0.0))
            throw ValidationError("weight_construction_check: decomposition witnesses missing");
        double rec = phi(alpha0[m], alpha1[m] * u[m]);
        if (std::abs(rec - psi_u[m]) > 1e-6 * psi_u[m])
            throw ValidationError("weight_construction_check: alphas do not reproduce psi(u)");
    }

    WeightConstructionReport rep;
    rep.weights = convolution_weights(alpha0, alpha1, epsilon);
    const ConvolutionWeights& w = rep.weights;

    // recurrence identities and the domination inequalities
    const double decay = 1.0 - epsilon;
    double resid = 0.0;
    bool dom_ok = true;
    for (std::size_t m = 0; m < n; ++m) {
        double next0 = (m + 1 < n) ? w.beta0[m + 1] : 0.0;
        double prev1 = (m > 0) ? w.beta1[m - 1] : 0.0;
        resid = std::max(resid, std::abs(w.beta0[m] - (alpha0[m] + decay * next0)));
        resid = std::max(resid, std::abs(w.beta1[m] - (alpha1[m] + decay * prev1)));
        if (m + 1 < n) {
            if (w.beta0[m + 1] * decay > w.beta0[m]) dom_ok = false;
            if (w.beta1[m] * decay > w.beta1[m + 1]) dom_ok = false;
        }
        if (alpha0[m] > w.beta0[m] || alpha1[m] > w.beta1[m]) dom_ok = false;
    }
    rep.recurrence_ok = dom_ok;
    rep.recurrence_residual = resid;

    // decay of the grid itself: psi grows and psi/u falls by at least q_measured
    // per step; the proof's constant is then q' = (1 - eps) q_measured
    double qm = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m + 1 < n; ++m) {
        if (psi_u[m] == 0.0 || psi_u[m + 1] == 0.0) continue;
        double g0 = psi_u[m + 1] / psi_u[m];
        double g1 = (psi_u[m] / u[m]) * (u[m + 1] / psi_u[m + 1]);
        qm = std::min({qm, g0, g1});
    }
    rep.q_measured = qm;
    double qp = (1.0 - epsilon) * qm;
    rep.q_prime = qp;

    if (qp > 1.0) {
        double bound_factor = qp / (qp - 1.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (psi_u[k] == 0.0) continue;
            double kk = l1_couple_k(psi_u, w, u, w.beta0[k], w.beta1[k] * u[k]);
            worst = std::max(worst, kk / (bound_factor * psi_u[k]));
        }
        rep.worst_index_ratio = worst;
        rep.per_index_ok = worst <= 1.0 + 1e-12;
    }

    double sup = 0.0;
    for (double t : t_grid)
        sup = std::max(sup, l1_couple_k(psi_u, w, u, 1.0, t) / phi(1.0, t));
    rep.grid_sup = sup;
    return rep;
}

// --------------------------------------------------------------------------
// couple-bounded operators

struct DiagonalOp {
    std::vector<double> d;
};
struct RankOneOp {
    Element g;  // functional x -> sum_m masses_m g_m x_m on the source
    Element y;  // output direction in the target
};
/// T(xi)(m) = sum_n w[n](m) xi_n from a sequence couple with unit masses;
/// the bound comes from the pointwise L_inf factorization majorants.
struct LinftyFactorizedOp {
    std::vector<Element> w;  // one target element per source atom
};

struct OperatorSpec {
    std::variant<DiagonalOp, RankOneOp, LinftyFactorizedOp> op;
    double declared_bound = 0.0;
};

namespace detail {

/// Exact norm of a diagonal multiplier between weighted L_p spaces over the
/// same atoms: sup of the reduced multipliers when q >= p, their l_r norm
/// with r^{-1} = q^{-1} - p^{-1} when q < p.
inline double diagonal_leg_norm(const WeightedSpace& src, const WeightedSpace& dst,
                                const std::vector<double>& d) {
    double pinv = src.exponent().inv(), qinv = dst.exponent().inv();
    std::vector<double> c(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        c[i] = std::abs(d[i]) * dst.weights()[i] / src.weights()[i] *
               std::pow(src.masses()[i], qinv - pinv);
    if (qinv <= pinv) return *std::max_element(c.begin(), c.end());
    double r = 1.0 / (qinv - pinv);
    double cmax = *std::max_element(c.begin(), c.end());
    if (cmax == 0.0) return 0.0;
    double sum = 0.0;
    for (double v : c) sum += std::pow(v / cmax, r);
    return cmax * std::pow(sum, 1.0 / r);
}

inline double lp_over_n(const std::vector<double>& v, const Exponent& p) {
    double zmax = 0.0;
    for (double z : v) zmax = std::max(zmax, std::abs(z));
    if (zmax == 0.0) return 0.0;
    if (p.is_inf()) return zmax;
    double sum = 0.0;
    for (double z : v) sum += std::pow(std::abs(z) / zmax, p.value());
    return zmax * std::pow(sum, 1.0 / p.value());
}

}  // namespace detail

struct ApplyResult {
    Element y;
    double bound = 0.0;  // upper bound on max of the two leg operator norms
};

inline double operator_couple_bound(const OperatorSpec& spec, const Couple& src,
                                    const Couple& dst) {
    if (std::holds_alternative<DiagonalOp>(spec.op)) {
        const auto& d = std::get<DiagonalOp>(spec.op).d;
        if (d.size() != src.atoms() || src.atoms() != dst.atoms())
            throw ValidationError("diagonal operator shape mismatch");
        return std::max(detail::diagonal_leg_norm(src.space0(), dst.space0(), d),
                        detail::diagonal_leg_norm(src.space1(), dst.space1(), d));
    }
    if (std::holds_alternative<RankOneOp>(spec.op)) {
        const auto& op = std::get<RankOneOp>(spec.op);
        if (op.g.size() != src.atoms() || op.y.size() != dst.atoms())
            throw ValidationError("rank-one operator shape mismatch");
        double leg0 = src.space0().dual_norm(op.g) * dst.space0().norm(op.y);
        double leg1 = src.space1().dual_norm(op.g) * dst.space1().norm(op.y);
        return std::max(leg0, leg1);
    }
    const auto& op = std::get<LinftyFactorizedOp>(spec.op);
    if (op.w.size() != src.atoms()) throw ValidationError("factorized operator shape mismatch");
    for (double m : src.space0().masses())
        if (m != 1.0)
            throw ValidationError("factorized operator needs a unit-mass sequence source");
    // Hoelder majorants W_i(m) = || w_n(m) / omega_i(n) ||_{p_i'} per target atom
    Element W0(dst.atoms(), 0.0), W1(dst.atoms(), 0.0);
    Exponent h0 = src.space0().exponent().dual(), h1 = src.space1().exponent().dual();
    std::vector<double> col(src.atoms());
    for (std::size_t m = 0; m < dst.atoms(); ++m) {
        for (std::size_t nidx = 0; nidx < src.atoms(); ++nidx) {
            if (op.w[nidx].size() != dst.atoms())
                throw ValidationError("factorized operator shape mismatch");
            col[nidx] = op.w[nidx][m] / src.space0().weights()[nidx];
        }
        W0[m] = detail::lp_over_n(col, h0);
        for (std::size_t nidx = 0; nidx < src.atoms(); ++nidx)
            col[nidx] = op.w[nidx][m] / src.space1().weights()[nidx];
        W1[m] = detail::lp_over_n(col, h1);
    }
    return std::max(dst.space0().norm(W0), dst.space1().norm(W1));
}

inline ApplyResult apply_operator(const OperatorSpec& spec, const Couple& src,
                                  const Couple& dst, const Element& x) {
    if (x.size() != src.atoms()) throw ValidationError("apply_operator: element shape mismatch");
    ApplyResult res;
    res.bound = operator_couple_bound(spec, src, dst);
    if (std::holds_alternative<DiagonalOp>(spec.op)) {
        const auto& d = std::get<DiagonalOp>(spec.op).d;
        res.y.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) res.y[i] = d[i] * x[i];
    } else if (std::holds_alternative<RankOneOp>(spec.op)) {
        const auto& op = std::get<RankOneOp>(spec.op);
        double val = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            val += src.space0().masses()[i] * op.g[i] * x[i];
        res.y.resize(dst.atoms());
        for (std::size_t i = 0; i < dst.atoms(); ++i) res.y[i] = val * op.y[i];
    } else {
        const auto& op = std::get<LinftyFactorizedOp>(spec.op);
        res.y.assign(dst.atoms(), 0.0);
        for (std::size_t nidx = 0; nidx < src.atoms(); ++nidx)
            for (std::size_t m = 0; m < dst.atoms(); ++m) res.y[m] += op.w[nidx][m] * x[nidx];
    }
    return res;
}

/// Normwise check of the embedding chain
///   {l_1(1/b0), l_1(1/(b1 u))} in {l_p0(1/b0), l_p1(1/(b1 u))} in {l_q0, l_q1(1/u)}
/// on a given element: the left legs embed with norm 1, the right legs with
/// the Hoelder constants ||b0||_{r0}, ||b1||_{r1}.  Requires q_i <= p_i.
struct EmbeddingChainReport {
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0, c0 = 0, c1 = 0;  // leg norms along the chain
    double const0 = 0, const1 = 0;                          // Hoelder constants
    bool left_ok = false, right_ok = false;
};

inline EmbeddingChainReport embedding_chain_check(const std::vector<double>& el,
                                                  const ConvolutionWeights& w,
                                                  const std::vector<double>& u,
                                                  const Exponent& p0, const Exponent& p1,
                                                  const Exponent& q0, const Exponent& q1) {
    if (p0.inv() > q0.inv() || p1.inv() > q1.inv())
        throw ValidationError("embedding_chain_check needs q_i <= p_i");
    const std::size_t n = el.size();
    if (w.beta0.size() != n || u.size() != n)
        throw ValidationError("embedding_chain_check: length mismatch");
    std::vector<double> inv_b0(n), inv_b1u(n), inv_u(n), ones(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        inv_b0[i] = 1.0 / w.beta0[i];
        inv_b1u[i] = 1.0 / (w.beta1[i] * u[i]);
        inv_u[i] = 1.0 / u[i];
    }
    EmbeddingChainReport rep;
    Exponent one(1.0);
    rep.a0 = WeightedSpace::sequence(one, inv_b0).norm(el);
    rep.a1 = WeightedSpace::sequence(one, inv_b1u).norm(el);
    rep.b0 = WeightedSpace::sequence(p0, inv_b0).norm(el);
    rep.b1 = WeightedSpace::sequence(p1, inv_b1u).norm(el);
    rep.c0 = WeightedSpace::sequence(q0, ones).norm(el);
    rep.c1 = WeightedSpace::sequence(q1, inv_u).norm(el);
    Exponent r0 = orbit_exponent(p0, q0), r1 = orbit_exponent(p1, q1);
    rep.const0 = detail::lp_over_n(w.beta0, r0);
    rep.const1 = detail::lp_over_n(w.beta1, r1);
    const double slack = 1.0 + 1e-9;
    rep.left_ok = rep.b0 <= rep.a0 * slack && rep.b1 <= rep.a1 * slack;
    rep.right_ok = rep.c0 <= rep.const0 * rep.b0 * slack && rep.c1 <= rep.const1 * rep.b1 * slack;
    return rep;
}

// --------------------------------------------------------------------------
// Random operator inclusion harness

struct HarnessConfig {
    int atoms = 3;
    std::vector<double> exponent_menu = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    double weight_lo = 1.0 / 16.0;
    double weight_hi = 16.0;
    double q = 2.0;
};

struct TrialReport {
    int trial = 0;
    std::uint64_t seed = 0;
    double p0 = 0, p1 = 0, q0 = 0, q1 = 0;
    std::string op_kind;
    double measured_constant = 0.0;
    bool pass = false;
    std::string error;
};

struct HarnessReport {
    std::vector<TrialReport> trials;
    double median_constant = 0.0;
    double max_constant = 0.0;
    int failures = 0;
};

inline HarnessReport inclusion_harness(std::uint64_t seed, int trials,
                                   const HarnessConfig& config = {}) {
    if (config.atoms < 1 || config.atoms > 6)
        throw ValidationError("harness: atom count must be in [1,6]");
    HarnessReport report;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(trial));
        TrialReport tr;
        tr.trial = trial;
        tr.seed = seed;
        const int M = config.atoms;
        auto draw_exponent = [&] {
            return Exponent(config.exponent_menu[rng.uniform_int(
                static_cast<int>(config.exponent_menu.size()))]);
        };
        auto draw_weights = [&] {
            std::vector<double> w(M);
            for (double& v : w) v = rng.log_uniform(config.weight_lo, config.weight_hi);
            return w;
        };
        Exponent p0 = draw_exponent(), p1 = draw_exponent();
        Exponent q0 = draw_exponent(), q1 = draw_exponent();
        tr.p0 = p0.value();
        tr.p1 = p1.value();
        tr.q0 = q0.value();
        tr.q1 = q1.value();
        std::vector<double> masses(M, 1.0);
        Couple src(WeightedSpace(masses, p0, draw_weights()),
                   WeightedSpace(masses, p1, draw_weights()));
        Couple dst(WeightedSpace(masses, q0, draw_weights()),
                   WeightedSpace(masses, q1, draw_weights()));
        Element a(M);
        for (double& v : a) v = rng.uniform(-2.0, 2.0);
        if (std::abs(a[0]) < 0.1) a[0] = (a[0] < 0 ? -0.5 : 0.5);

        OperatorSpec spec;
        if (rng.uniform_int(2) == 0) {
            tr.op_kind = "diagonal";
            DiagonalOp op;
            op.d.resize(M);
            for (double& v : op.d) v = rng.sign() * rng.log_uniform(0.125, 8.0);
            spec.op = op;
        } else {
            tr.op_kind = "rank_one";
            RankOneOp op;
            op.g.resize(M);
            op.y.resize(M);
            for (double& v : op.g) v = rng.uniform(-1.0, 1.0);
            for (double& v : op.y) v = rng.uniform(-1.0, 1.0);
            if (std::abs(op.y[0]) < 0.1) op.y[0] = 0.5;
            if (std::abs(op.g[0]) < 0.1) op.g[0] = 0.5;
            spec.op = op;
        }
        try {
            double bound = operator_couple_bound(spec, src, dst);
            // rescale so the couple norm is exactly 1
            if (std::holds_alternative<DiagonalOp>(spec.op)) {
                for (double& v : std::get<DiagonalOp>(spec.op).d) v /= bound;
            } else {
                for (double& v : std::get<RankOneOp>(spec.op).g) v /= bound;
            }
            spec.declared_bound = 1.0;
            Element y = apply_operator(spec, src, dst, a).y;
            if (is_zero(y)) {
                tr.measured_constant = 0.0;
                tr.pass = true;
            } else {
                OrbitReport orep = orbit_norm({src, dst, a, y}, config.q);
                tr.measured_constant = orep.orbit_norm_value;
                tr.pass = std::isfinite(orep.orbit_norm_value) && orep.phi_in_phi0;
            }
        } catch (const std::exception& e) {
            tr.pass = false;
            tr.error = e.what();
        }
        if (!tr.pass) ++report.failures;
        report.trials.push_back(tr);
    }
    std::vector<double> consts;
    for (const auto& tr : report.trials)
        if (tr.pass && tr.measured_constant > 0.0) consts.push_back(tr.measured_constant);
    if (!consts.empty()) {
        std::sort(consts.begin(), consts.end());
        report.median_constant = consts[consts.size() / 2];
        report.max_constant = consts.back();
    }
    return report;
}

}  // namespace ri

#endif
