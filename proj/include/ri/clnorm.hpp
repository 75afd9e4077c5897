#ifndef RI_CLNORM_HPP
#define RI_CLNORM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/phifn.hpp"
#include "ri/space.hpp"

namespace ri {

/// Result of a Calderon--Lozanovskii norm computation.  witness0/witness1 are
/// the nonnegative components of a feasible representation
/// |x| = phi(witness0, witness1) achieving max(||w0||_0, ||w1||_1) <= value.
struct CLResult {
    double value = 0.0;
    Element witness0, witness1;
    double residual = 0.0;
};

namespace detail {

constexpr double kLogRMin = -45.0;
constexpr double kLogRMax = 45.0;

// Feasible per-atom representations |x_m| = phi(a,b) form the curve
// a(r) = |x_m|/rho(r), b(r) = r |x_m|/rho(r): a nonincreasing and b
// nondecreasing in r by quasi-concavity.
struct AtomCurve {
    double c;        // |x_m|
    double mass, w0, w1;
    const InterpFunction* phi;

    double a(double r) const { return c / phi->rho(r); }
    double b(double r) const { return r * c / phi->rho(r); }
};

// Smallest log2 r with a(r) w0 <= cap, or nullopt when unreachable.
inline std::optional<double> min_logr_for_a(const AtomCurve& at, double cap) {
    if (at.a(std::exp2(kLogRMax)) * at.w0 > cap) return std::nullopt;
    if (at.a(std::exp2(kLogRMin)) * at.w0 <= cap) return kLogRMin;
    double lo = kLogRMin, hi = kLogRMax;
    for (int i = 0; i < 120; ++i) {
        double mid = 0.5 * (lo + hi);
        (at.a(std::exp2(mid)) * at.w0 <= cap ? hi : lo) = mid;
    }
    return hi;
}

// Largest log2 r with b(r) w1 <= cap, or nullopt.
inline std::optional<double> max_logr_for_b(const AtomCurve& at, double cap) {
    if (at.b(std::exp2(kLogRMin)) * at.w1 > cap) return std::nullopt;
    if (at.b(std::exp2(kLogRMax)) * at.w1 <= cap) return kLogRMax;
    double lo = kLogRMin, hi = kLogRMax;
    for (int i = 0; i < 120; ++i) {
        double mid = 0.5 * (lo + hi);
        (at.b(std::exp2(mid)) * at.w1 <= cap ? lo : hi) = mid;
    }
    return lo;
}

// argmin over log2 r of (b w1)^p1 + mu (a w0)^p0: coarse scan (the guard
// against non-unimodal surprises) plus golden-section polish.
inline double scalarized_argmin(const AtomCurve& at, double p0, double p1, double mu,
                                double lr_lo, double lr_hi) {
    auto h = [&](double lr) {
        double r = std::exp2(lr);
        return std::pow(at.b(r) * at.w1, p1) + mu * std::pow(at.a(r) * at.w0, p0);
    };
    const int pts = 33;
    double best_lr = lr_lo, best = h(lr_lo);
    for (int i = 1; i < pts; ++i) {
        double lr = lr_lo + (lr_hi - lr_lo) * i / (pts - 1);
        double v = h(lr);
        if (v < best) {
            best = v;
            best_lr = lr;
        }
    }
    double step = (lr_hi - lr_lo) / (pts - 1);
    double a = std::max(lr_lo, best_lr - step), b = std::min(lr_hi, best_lr + step);
    return golden_min(h, a, b, 48);
}

struct InnerResult {
    double b_norm = std::numeric_limits<double>::infinity();
    std::vector<double> logr;
};

// min ||b||_1 subject to ||a||_0 <= cap, over the per-atom curves.
inline InnerResult inner_min_b(const std::vector<AtomCurve>& atoms, const Exponent& p0,
                               const Exponent& p1, double cap) {
    InnerResult res;
    const std::size_t M = atoms.size();
    res.logr.assign(M, 0.0);
    if (M == 0) {
        res.b_norm = 0.0;
        return res;
    }
    auto b_norm_at = [&](const std::vector<double>& lr) {
        double zmax = 0.0;
        std::vector<double> z(M);
        for (std::size_t i = 0; i < M; ++i) {
            z[i] = atoms[i].b(std::exp2(lr[i])) * atoms[i].w1;
            zmax = std::max(zmax, z[i]);
        }
        if (zmax == 0.0) return 0.0;
        if (p1.is_inf()) return zmax;
        double sum = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            sum += atoms[i].mass * std::pow(z[i] / zmax, p1.value());
        return zmax * std::pow(sum, 1.0 / p1.value());
    };

    if (p0.is_inf()) {
        // per-atom cap on a; minimal b at the smallest admissible r
        for (std::size_t i = 0; i < M; ++i) {
            auto lr = min_logr_for_a(atoms[i], cap);
            if (!lr) return res;  // infeasible
            res.logr[i] = *lr;
        }
        res.b_norm = b_norm_at(res.logr);
        return res;
    }

    const double pv0 = p0.value();
    auto a_power_sum = [&](const std::vector<double>& lr) {
        double sum = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            sum += atoms[i].mass * std::pow(atoms[i].a(std::exp2(lr[i])) * atoms[i].w0, pv0);
        return sum;
    };
    const double cap_pow = std::pow(cap, pv0);

    // feasibility at the extreme: a is smallest at r = rmax
    {
        std::vector<double> lr(M, kLogRMax);
        if (a_power_sum(lr) > cap_pow) return res;
    }

    if (p1.is_inf()) {
        // bisect on the b-level L; a is minimal at the largest admissible r
        double L_hi = b_norm_at(std::vector<double>(M, kLogRMax));
        double L_lo = 0.0;
        std::vector<double> lr(M);
        auto feasible_level = [&](double L) {
            for (std::size_t i = 0; i < M; ++i) {
                auto v = max_logr_for_b(atoms[i], L);
                if (!v) return false;
                lr[i] = *v;
            }
            return a_power_sum(lr) <= cap_pow;
        };
        if (!feasible_level(L_hi)) return res;
        for (int i = 0; i < 90 && (L_hi - L_lo) > 1e-13 * L_hi; ++i) {
            double mid = 0.5 * (L_lo + L_hi);
            (feasible_level(mid) ? L_hi : L_lo) = mid;
        }
        feasible_level(L_hi);
        res.logr = lr;
        res.b_norm = b_norm_at(lr);
        return res;
    }

    // both exponents finite: Lagrangian per atom, multiplier bisected on the
    // powered a-constraint (monotone in mu)
    const double pv1 = p1.value();
    std::vector<double> lr(M);
    auto solve_mu = [&](double log_mu) {
        double mu = std::exp(log_mu);
        for (std::size_t i = 0; i < M; ++i)
            lr[i] = scalarized_argmin(atoms[i], pv0, pv1, mu, kLogRMin, kLogRMax);
        return a_power_sum(lr);
    };
    double lmu_lo = -90.0, lmu_hi = 700.0;
    if (solve_mu(lmu_lo) <= cap_pow) {
        res.logr = lr;
        res.b_norm = b_norm_at(lr);
        return res;
    }
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lmu_lo + lmu_hi);
        (solve_mu(mid) <= cap_pow ? lmu_hi : lmu_lo) = mid;
    }
    solve_mu(lmu_hi);
    res.logr = lr;
    res.b_norm = b_norm_at(lr);
    return res;
}

}  // namespace detail

/// ||x||_{phi(X0,X1)}: outer bisection on the candidate bound C; feasibility
/// of C is tested by minimizing ||x1||_1 along the per-atom representation
/// curves subject to ||x0||_0 <= C.
inline CLResult cl_norm(const InterpFunction& phi, const Couple& couple, const Element& x,
                        double tol = 1e-6) {
    if (x.size() != couple.atoms()) throw ValidationError("cl_norm: size mismatch");
    const std::size_t M = x.size();
    CLResult out;
    out.witness0.assign(M, 0.0);
    out.witness1.assign(M, 0.0);
    if (is_zero(x)) return out;

    std::vector<detail::AtomCurve> atoms;
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < M; ++i) {
        if (x[i] == 0.0) continue;
        atoms.push_back({std::abs(x[i]), couple.space0().masses()[i],
                         couple.space0().weights()[i], couple.space1().weights()[i], &phi});
        live.push_back(i);
    }

    // diagonal witness: x0 = x1 = |x|/rho(1) is always feasible
    double rho1 = phi.rho(1.0);
    Element diag(M, 0.0);
    for (std::size_t i = 0; i < M; ++i) diag[i] = std::abs(x[i]) / rho1;
    double c_hi = std::max(couple.norm0(diag), couple.norm1(diag));
    double c_lo = 0.0;

    const Exponent& p0 = couple.space0().exponent();
    const Exponent& p1 = couple.space1().exponent();

    auto inner = [&](double cap) { return detail::inner_min_b(atoms, p0, p1, cap); };

    detail::InnerResult best = inner(c_hi);
    for (int guard = 0; best.b_norm > c_hi; ++guard) {
        if (guard > 64)
            throw ValidationError("cl_norm: x not representable through phi (membership)");
        c_hi *= 2.0;
        best = inner(c_hi);
    }
    for (int it = 0; it < 200 && (c_hi - c_lo) > 0.25 * tol * c_hi; ++it) {
        double mid = 0.5 * (c_lo + c_hi);
        detail::InnerResult r = inner(mid);
        if (r.b_norm <= mid) {
            c_hi = mid;
            best = std::move(r);
        } else {
            c_lo = mid;
        }
    }

    double residual = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        double r = std::exp2(best.logr[j]);
        double a = atoms[j].a(r), b = atoms[j].b(r);
        out.witness0[live[j]] = a;
        out.witness1[live[j]] = b;
        residual = std::max(residual, std::abs(phi(a, b) - atoms[j].c));
    }
    out.residual = residual;
    out.value = std::max(couple.norm0(out.witness0), couple.norm1(out.witness1));
    return out;
}

/// Validation oracle: nested tensor-grid search over per-atom log ratios.
inline double cl_oracle(const InterpFunction& phi, const Couple& couple, const Element& x) {
    if (x.size() != couple.atoms()) throw ValidationError("cl_oracle: size mismatch");
    if (couple.atoms() > 3) throw OracleScaleError("cl_oracle limited to 3 atoms");
    if (is_zero(x)) return 0.0;

    std::vector<detail::AtomCurve> atoms;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0.0)
            atoms.push_back({std::abs(x[i]), couple.space0().masses()[i],
                             couple.space0().weights()[i], couple.space1().weights()[i], &phi});
    const std::size_t M = atoms.size();
    const Exponent& p0 = couple.space0().exponent();
    const Exponent& p1 = couple.space1().exponent();

    auto norm_of = [&](const std::vector<double>& z, const Exponent& p) {
        double zmax = 0.0;
        for (double v : z) zmax = std::max(zmax, v);
        if (zmax == 0.0) return 0.0;
        if (p.is_inf()) return zmax;
        double sum = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            sum += atoms[i].mass * std::pow(z[i] / zmax, p.value());
        return zmax * std::pow(sum, 1.0 / p.value());
    };
    std::vector<double> za(M), zb(M);
    auto F = [&](const std::vector<double>& lr) {
        for (std::size_t i = 0; i < M; ++i) {
            double r = std::exp2(lr[i]);
            za[i] = atoms[i].a(r) * atoms[i].w0;
            zb[i] = atoms[i].b(r) * atoms[i].w1;
        }
        return std::max(norm_of(za, p0), norm_of(zb, p1));
    };

    std::vector<double> lo(M, -20.0), hi(M, 20.0), lr(M, 0.0), best_lr(M, 0.0);
    double best = F(best_lr);
    const int pts = 21;
    std::vector<int> idx(M, 0);
    for (int level = 0; level < 10; ++level) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (std::size_t i = 0; i < M; ++i)
                lr[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (pts - 1);
            double f = F(lr);
            if (f < best) {
                best = f;
                best_lr = lr;
            }
            std::size_t k = 0;
            while (k < M && ++idx[k] == pts) idx[k++] = 0;
            if (k == M) break;
        }
        for (std::size_t i = 0; i < M; ++i) {
            double step = (hi[i] - lo[i]) / (pts - 1);
            lo[i] = std::max(-45.0, best_lr[i] - 1.5 * step);
            hi[i] = std::min(45.0, best_lr[i] + 1.5 * step);
        }
    }
    // the max-of-norms objective has curved valleys the axis grid cannot
    // track; finish with a simplex descent
    best = std::min(best, detail::nelder_mead_box(F, best_lr, std::vector<double>(M, -45.0),
                                                  std::vector<double>(M, 45.0), 0.02, 4000));
    return best;
}

/// Sequence form: the CL norm of a scalar sequence over the couple
/// {l_{r0}, l_{r1}(u_m^{-1})} built from a strictly increasing positive grid u.
inline CLResult cl_seq_norm(const InterpFunction& phi, const Exponent& r0, const Exponent& r1,
                            const std::vector<double>& u, const std::vector<double>& seq,
                            double tol = 1e-6) {
    if (u.size() != seq.size()) throw ValidationError("cl_seq_norm: u/seq length mismatch");
    if (u.empty()) throw ValidationError("cl_seq_norm: empty sequence");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0)) throw ValidationError("cl_seq_norm: u must be positive");
        if (i > 0 && u[i] <= u[i - 1])
            throw ValidationError("cl_seq_norm: u must be strictly increasing");
    }
    std::vector<double> w0(u.size(), 1.0), w1(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w1[i] = 1.0 / u[i];
    Couple couple = Couple::sequence(r0, std::move(w0), r1, std::move(w1));
    return cl_norm(phi, couple, seq, tol);
}

}  // namespace ri

#endif
