#ifndef RI_KFUNC_HPP
#define RI_KFUNC_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "ri/errors.hpp"
#include "ri/rng.hpp"
#include "ri/space.hpp"

namespace ri {

namespace detail {

/// Golden-section minimization of a unimodal (here: convex) function on [lo, hi].
/// Returns the argmin; evals counts function calls against the caller's budget.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iters, long* evals = nullptr) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    if (evals) *evals += 2;
    for (int it = 0; it < iters; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        if (evals) ++*evals;
    }
    return 0.5 * (a + b);
}

/// Box-constrained Nelder-Mead descent from a start point; returns the best
/// value reached.  Used as a final oracle polish where line searches stall in
/// the curved valleys that sup-norm legs produce.
inline double nelder_mead_box(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& start, const std::vector<double>& blo,
                              const std::vector<double>& bhi, double step_frac, int iters) {
    const std::size_t M = start.size();
    std::vector<std::vector<double>> sx(M + 1, start);
    std::vector<double> fx(M + 1);
    for (std::size_t i = 1; i <= M; ++i) {
        double span = bhi[i - 1] - blo[i - 1];
        double mid = 0.5 * (blo[i - 1] + bhi[i - 1]);
        double delta = step_frac * span * (sx[i][i - 1] > mid ? -1.0 : 1.0);
        sx[i][i - 1] = std::clamp(sx[i][i - 1] + delta, blo[i - 1], bhi[i - 1]);
    }
    for (std::size_t i = 0; i <= M; ++i) fx[i] = f(sx[i]);
    std::vector<double> cen(M), cand(M);
    for (int it = 0; it < iters; ++it) {
        std::size_t lo = 0, hi = 0, hi2 = 0;
        for (std::size_t i = 1; i <= M; ++i) {
            if (fx[i] < fx[lo]) lo = i;
            if (fx[i] > fx[hi]) hi = i;
        }
        hi2 = lo;
        for (std::size_t i = 0; i <= M; ++i)
            if (i != hi && fx[i] > fx[hi2]) hi2 = i;
        if (fx[hi] - fx[lo] <= 1e-14 * (1.0 + std::abs(fx[lo]))) break;
        std::fill(cen.begin(), cen.end(), 0.0);
        for (std::size_t i = 0; i <= M; ++i)
            if (i != hi)
                for (std::size_t j = 0; j < M; ++j) cen[j] += sx[i][j] / static_cast<double>(M);
        auto point = [&](double coef) {
            for (std::size_t j = 0; j < M; ++j)
                cand[j] = std::clamp(cen[j] + coef * (cen[j] - sx[hi][j]), blo[j], bhi[j]);
            return f(cand);
        };
        double fr = point(1.0);
        if (fr < fx[lo]) {
            std::vector<double> refl = cand;
            double fe = point(2.0);
            if (fe < fr) {
                sx[hi] = cand;
                fx[hi] = fe;
            } else {
                sx[hi] = refl;
                fx[hi] = fr;
            }
        } else if (fr < fx[hi2]) {
            sx[hi] = cand;
            fx[hi] = fr;
        } else {
            double fc = point(-0.5);
            if (fc < fx[hi]) {
                sx[hi] = cand;
                fx[hi] = fc;
            } else {
                for (std::size_t i = 0; i <= M; ++i) {
                    if (i == lo) continue;
                    for (std::size_t j = 0; j < M; ++j)
                        sx[i][j] = 0.5 * (sx[i][j] + sx[lo][j]);
                    fx[i] = f(sx[i]);
                }
            }
        }
    }
    double best = fx[0];
    for (std::size_t i = 1; i <= M; ++i) best = std::min(best, fx[i]);
    return best;
}

}  // namespace detail

enum class KMethod { closed_form, convex, oracle };

/// Value of K(s,t,x) together with a witnessing decomposition x = x0 + x1.
struct KResult {
    double value = 0.0;
    Element x0, x1;
    KMethod method = KMethod::closed_form;
};

namespace detail {

inline KResult make_kresult(const Element& x, const std::vector<double>& theta, double value,
                            KMethod method) {
    KResult r;
    r.value = value;
    r.method = method;
    r.x0.resize(x.size());
    r.x1.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.x0[i] = theta[i] * x[i];
        r.x1[i] = x[i] - r.x0[i];
    }
    return r;
}

inline double k_objective(const Couple& c, const Element& x, double s, double t,
                          const std::vector<double>& theta, Element& scratch0,
                          Element& scratch1) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        scratch0[i] = theta[i] * x[i];
        scratch1[i] = x[i] - scratch0[i];
    }
    return s * c.norm0(scratch0) + t * c.norm1(scratch1);
}

// One-dimensional reduction when a leg is an L_inf space: cap the weighted sup
// of that leg's part and take the pointwise-extreme split, which is optimal by
// lattice monotonicity of the other norm.
inline KResult k_at_with_inf_leg(const Couple& c, const Element& x, double s, double t,
                                 long* evals) {
    const bool inf0 = c.space0().exponent().is_inf();
    const auto& U0 = c.space0().weights();
    const auto& U1 = c.space1().weights();
    const std::size_t M = x.size();
    std::vector<double> theta(M, 0.0);
    Element b0(M), b1(M);

    if (inf0) {
        double amax = 0.0;
        for (std::size_t i = 0; i < M; ++i) amax = std::max(amax, std::abs(x[i]) * U0[i]);
        auto set_theta = [&](double cap) {
            for (std::size_t i = 0; i < M; ++i) {
                double a = std::abs(x[i]) * U0[i];
                theta[i] = (a <= cap || a == 0.0) ? 1.0 : cap / a;
            }
        };
        auto g = [&](double cap) {
            set_theta(cap);
            for (std::size_t i = 0; i < M; ++i) b1[i] = x[i] - theta[i] * x[i];
            return s * cap + t * c.norm1(b1);
        };
        // optimize log2 of the cap: unimodality survives the monotone map and
        // the search keeps full relative resolution across all scales
        auto gz = [&](double z) { return g(amax * std::exp2(-z)); };
        double cap = amax * std::exp2(-golden_min(gz, 0.0, 170.0, 160, evals));
        double best = g(cap);
        if (g(0.0) < best) {
            best = g(0.0);
            cap = 0.0;
        }
        if (g(amax) < best) {
            best = g(amax);
            cap = amax;
        }
        set_theta(cap);
        return make_kresult(x, theta, g(cap), KMethod::convex);
    }
    // space1 is L_inf: cap the remainder's weighted sup.
    double bmax = 0.0;
    for (std::size_t i = 0; i < M; ++i) bmax = std::max(bmax, std::abs(x[i]) * U1[i]);
    auto set_theta = [&](double cap) {
        for (std::size_t i = 0; i < M; ++i) {
            double b = std::abs(x[i]) * U1[i];
            theta[i] = (b <= cap || b == 0.0) ? 0.0 : 1.0 - cap / b;
        }
    };
    auto g = [&](double cap) {
        set_theta(cap);
        for (std::size_t i = 0; i < M; ++i) b0[i] = theta[i] * x[i];
        return s * c.norm0(b0) + t * cap;
    };
    auto gz = [&](double z) { return g(bmax * std::exp2(-z)); };
    double cap = bmax * std::exp2(-golden_min(gz, 0.0, 170.0, 160, evals));
    double best = g(cap);
    if (g(0.0) < best) {
        best = g(0.0);
        cap = 0.0;
    }
    if (g(bmax) < best) {
        best = g(bmax);
        cap = bmax;
    }
    set_theta(cap);
    return make_kresult(x, theta, g(cap), KMethod::convex);
}

}  // namespace detail

/// Peetre K-functional K(s,t,x;{X0,X1}) with a witnessing decomposition.
///
/// By lattice monotonicity the optimal x0 may be taken pointwise between 0 and
/// x with the same signs, so the infimum is over the box f(theta) =
/// s||theta.x||_0 + t||(1-theta).x||_1, theta in [0,1]^M, which is convex.
/// Closed forms (p0=p1=1, single atom, equal legs) are preferred; L_inf legs
/// reduce to a one-dimensional search; the rest runs cyclic coordinate descent
/// with golden-section line searches.
inline KResult k_at(const Couple& c, const Element& x, double s, double t, double tol = 1e-8) {
    if (x.size() != c.atoms()) throw ValidationError("k_at: element/couple size mismatch");
    if (!(s > 0.0) || !(t > 0.0)) throw ValidationError("k_at: s,t must be positive");
    const std::size_t M = x.size();
    std::vector<double> theta(M, 0.0);

    if (is_zero(x)) return detail::make_kresult(x, theta, 0.0, KMethod::closed_form);

    const auto& s0 = c.space0();
    const auto& s1 = c.space1();

    // p0 = p1 = 1: the objective is separable; pick per atom.
    if (s0.exponent().is_one() && s1.exponent().is_one()) {
        double total = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            double c0 = s * s0.masses()[i] * s0.weights()[i];
            double c1 = t * s1.masses()[i] * s1.weights()[i];
            theta[i] = (c0 <= c1) ? 1.0 : 0.0;
            total += std::min(c0, c1) * std::abs(x[i]);
        }
        return detail::make_kresult(x, theta, total, KMethod::closed_form);
    }

    // Single atom: piecewise-linear in theta, minimum at an endpoint.
    if (M == 1) {
        double n0 = s * s0.norm(x), n1 = t * s1.norm(x);
        theta[0] = (n0 <= n1) ? 1.0 : 0.0;
        return detail::make_kresult(x, theta, std::min(n0, n1), KMethod::closed_form);
    }

    // Equal legs: K = min(s,t)||x||.
    if (s0.same_space(s1)) {
        double th = (s <= t) ? 1.0 : 0.0;
        std::fill(theta.begin(), theta.end(), th);
        return detail::make_kresult(x, theta, std::min(s, t) * s0.norm(x), KMethod::closed_form);
    }

    long evals = 0;
    const long eval_cap = 2000000;

    if (s0.exponent().is_inf() || s1.exponent().is_inf())
        return detail::k_at_with_inf_leg(c, x, s, t, &evals);

    // General finite exponents: cyclic coordinate descent over the box.  The
    // per-coordinate slice is smooth and convex, so each line is minimized by
    // bisecting the sign of the partial derivative; the logistic substitution
    // theta = 1/(1 + 2^-y) keeps relative resolution at both box faces, where
    // optimal splits can sit hundreds of binary orders from 1/2.
    Element b0(M), b1(M);
    std::fill(theta.begin(), theta.end(), 0.5);
    double current = detail::k_objective(c, x, s, t, theta, b0, b1);
    ++evals;
    const double pv0 = s0.exponent().value(), pv1 = s1.exponent().value();
    auto theta_of = [](double y) { return 1.0 / (1.0 + std::exp2(-y)); };
    for (int sweep = 0; sweep < 400; ++sweep) {
        double before = current;
        for (std::size_t i = 0; i < M; ++i) {
            if (x[i] == 0.0) continue;
            const double m = s0.masses()[i];
            const double a = std::abs(x[i]) * s0.weights()[i];
            const double bb = std::abs(x[i]) * s1.weights()[i];
            auto deriv = [&](double th) {
                theta[i] = th;
                for (std::size_t j = 0; j < M; ++j) {
                    b0[j] = theta[j] * x[j];
                    b1[j] = x[j] - b0[j];
                }
                double n0 = c.norm0(b0), n1 = c.norm1(b1);
                ++evals;
                // scale-safe power of the term/norm ratio (bounded by 1/m)
                double d0 = s * m * a * std::pow(a * th / n0, pv0 - 1.0);
                double d1 = t * m * bb * std::pow(bb * (1.0 - th) / n1, pv1 - 1.0);
                return d0 - d1;
            };
            double th_star;
            if (deriv(theta_of(-60.0)) >= 0.0) {
                th_star = 0.0;
            } else if (deriv(theta_of(60.0)) <= 0.0) {
                th_star = 1.0;
            } else {
                double ylo = -60.0, yhi = 60.0;
                for (int it = 0; it < 100; ++it) {
                    double ym = 0.5 * (ylo + yhi);
                    (deriv(theta_of(ym)) <= 0.0 ? ylo : yhi) = ym;
                }
                th_star = theta_of(0.5 * (ylo + yhi));
            }
            double best_th = th_star, best_f = std::numeric_limits<double>::infinity();
            for (double cand : {th_star, 0.0, 1.0}) {
                theta[i] = cand;
                double f = detail::k_objective(c, x, s, t, theta, b0, b1);
                ++evals;
                if (f < best_f) {
                    best_f = f;
                    best_th = cand;
                }
            }
            theta[i] = best_th;
            current = best_f;
        }
        if (before - current <= 0.25 * tol * (1.0 + current) && sweep >= 2) {
            return detail::make_kresult(x, theta, current, KMethod::convex);
        }
        if (evals > eval_cap) throw SolverError("k_at: evaluation cap reached", current, 0.0);
    }
    return detail::make_kresult(x, theta, current, KMethod::convex);
}

/// Samples t -> K(1,t,x) on an ascending positive grid.
inline std::vector<std::pair<double, double>> k_profile(const Couple& c, const Element& x,
                                                        const std::vector<double>& t_grid,
                                                        double tol = 1e-8) {
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    double prev_t = 0.0;
    for (double t : t_grid) {
        if (!(t > 0.0) || t < prev_t)
            throw ValidationError("k_profile: grid must be ascending and positive");
        prev_t = t;
        out.emplace_back(t, k_at(c, x, 1.0, t, tol).value);
    }
    return out;
}

/// Exhaustive validation oracle: nested grid refinement over theta in [0,1]^M
/// followed by a cyclic golden-section polish.  Guarded to at most 4 atoms.
inline double k_oracle(const Couple& c, const Element& x, double s, double t) {
    if (x.size() != c.atoms()) throw ValidationError("k_oracle: size mismatch");
    const std::size_t M = x.size();
    if (M > 4) throw OracleScaleError("k_oracle limited to 4 atoms");
    if (is_zero(x)) return 0.0;

    Element b0(M), b1(M);
    std::vector<double> theta(M, 0.5), best_theta(M, 0.5);
    std::vector<double> lo(M, 0.0), hi(M, 1.0);
    double best = detail::k_objective(c, x, s, t, theta, b0, b1);

    const int pts = 17;
    std::vector<int> idx(M, 0);
    for (int level = 0; level < 6; ++level) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (std::size_t i = 0; i < M; ++i)
                theta[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (pts - 1);
            double f = detail::k_objective(c, x, s, t, theta, b0, b1);
            if (f < best) {
                best = f;
                best_theta = theta;
            }
            std::size_t k = 0;
            while (k < M && ++idx[k] == pts) idx[k++] = 0;
            if (k == M) break;
        }
        for (std::size_t i = 0; i < M; ++i) {
            double step = (hi[i] - lo[i]) / (pts - 1);
            lo[i] = std::max(0.0, best_theta[i] - 1.5 * step);
            hi[i] = std::min(1.0, best_theta[i] + 1.5 * step);
        }
    }
    // local polish: cyclic lines, then random directions (axis-aligned moves
    // alone can stall on the nonsmooth ridges of sup-norm legs)
    theta = best_theta;
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (std::size_t i = 0; i < M; ++i) {
            auto line = [&](double th) {
                theta[i] = th;
                return detail::k_objective(c, x, s, t, theta, b0, b1);
            };
            double th = detail::golden_min(line, 0.0, 1.0, 80);
            double fth = line(th);
            double f0 = line(0.0), f1 = line(1.0);
            if (f0 <= fth && f0 <= f1) {
                theta[i] = 0.0;
                fth = f0;
            } else if (f1 <= fth) {
                theta[i] = 1.0;
                fth = f1;
            } else {
                theta[i] = th;
            }
            best = std::min(best, fth);
        }
    }
    Rng dir_rng(0x051A5BD1ULL);
    std::vector<double> d(M), probe(M);
    for (int round = 0; round < 400; ++round) {
        for (double& v : d) v = dir_rng.uniform(-1.0, 1.0);
        double tau_lo = -std::numeric_limits<double>::infinity();
        double tau_hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < M; ++i) {
            if (d[i] == 0.0) continue;
            double to_zero = -theta[i] / d[i], to_one = (1.0 - theta[i]) / d[i];
            tau_lo = std::max(tau_lo, std::min(to_zero, to_one));
            tau_hi = std::min(tau_hi, std::max(to_zero, to_one));
        }
        if (!(tau_hi > tau_lo)) continue;
        auto line = [&](double tau) {
            for (std::size_t i = 0; i < M; ++i)
                probe[i] = std::clamp(theta[i] + tau * d[i], 0.0, 1.0);
            return detail::k_objective(c, x, s, t, probe, b0, b1);
        };
        double tau = detail::golden_min(line, tau_lo, tau_hi, 70);
        double f = line(tau);
        if (f < best) {
            best = f;
            for (std::size_t i = 0; i < M; ++i)
                theta[i] = std::clamp(theta[i] + tau * d[i], 0.0, 1.0);
        }
    }
    // Nelder-Mead polish: line searches stall in the curved valleys that
    // sup-norm legs produce, a crawling simplex does not
    auto feval = [&](const std::vector<double>& th) {
        return detail::k_objective(c, x, s, t, th, b0, b1);
    };
    best = std::min(best, detail::nelder_mead_box(feval, theta, std::vector<double>(M, 0.0),
                                                  std::vector<double>(M, 1.0), 0.08, 4000));
    return best;
}

/// Norms of the ambient sum and intersection spaces:
/// ||x||_{X0+X1} = K(1,1,x), ||x||_{X0 cap X1} = max of the leg norms.
inline std::pair<double, double> sum_and_intersection_norms(const Couple& c, const Element& x) {
    double sum = k_at(c, x, 1.0, 1.0).value;
    double inter = std::max(c.norm0(x), c.norm1(x));
    return {sum, inter};
}

}  // namespace ri

#endif
