#ifndef RI_MEANS_HPP
#define RI_MEANS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "ri/clnorm.hpp"
#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/phifn.hpp"
#include "ri/space.hpp"

namespace ri {

enum class DegenerateCase { none, intersection, one_sided_left, one_sided_right, sum_space };
enum class MeansPath { characterization, direct };

struct MeansResult {
    double value = 0.0;
    MeansPath path = MeansPath::characterization;
    BalancedSequence balanced_u;
    std::vector<double> k_seq;          // psi(u_m) = K(1, u_m, x)
    std::optional<CLResult> cl;         // CL norm on the sequence couple
    DegenerateCase degenerate_case = DegenerateCase::none;
    double k_char_value = 0.0;          // the K-characterization component
};

namespace detail {

// Sequence-characterization path: sample the K-profile of x on its own balanced grid
// and take the CL norm of the samples over {l_{p0}, l_{p1}(u_m^{-1})}.
inline void k_characterization(const InterpFunction& phi, const Couple& couple,
                               const Exponent& p0, const Exponent& p1, const Element& x,
                               double q, double tmin, double tmax, MeansResult& out) {
    InterpFunction psi = InterpFunction::k_derived(couple, x, 1e-6);
    out.balanced_u = balanced_sequence(psi, q, tmin, tmax);
    out.k_seq.clear();
    for (double u : out.balanced_u.t) out.k_seq.push_back(psi.rho(u));
    out.cl = cl_seq_norm(phi, p0, p1, out.balanced_u.t, out.k_seq);
    out.k_char_value = out.cl->value;
}

}  // namespace detail

/// The method-of-means norm ||x||_{phi(X0,X1)_{p0,p1}} with the Definition-2
/// split and degenerate handling; the nondegenerate case runs the sequence
/// K-profile characterization.
inline MeansResult means_norm(const InterpFunction& phi, const Couple& couple,
                              const Exponent& p0, const Exponent& p1, const Element& x,
                              double q = 2.0, double tmin = std::exp2(-40.0),
                              double tmax = std::exp2(40.0)) {
    MeansResult out;
    if (x.size() != couple.atoms()) throw ValidationError("means_norm: size mismatch");
    if (is_zero(x)) return out;

    PhiClassification cls = classify(phi, tmin, tmax);

    if (cls.alpha > 0.0 && cls.beta > 0.0) {
        // phi(X0,X1)_{p0,p1} = X0 + X1 regardless of p0, p1
        out.degenerate_case = DegenerateCase::sum_space;
        out.value = k_at(couple, x, 1.0, 1.0).value;
        return out;
    }
    if (!cls.in_phi0) {
        // exactly one linear part: only the pure cases (phi0 == 0) are
        // supported, where the space collapses to a rescaled leg
        if (cls.phi0.has_value())
            throw ValidationError(
                "means_norm: one-sided linear part with nonzero phi0 not supported");
        out.degenerate_case = DegenerateCase::sum_space;
        out.value = (cls.alpha > 0.0) ? cls.alpha * couple.norm0(x) : cls.beta * couple.norm1(x);
        return out;
    }

    if (!cls.nondegenerate0 && !cls.nondegenerate1) {
        // both traces bounded: phi(s,t) ~ min(s,t), the space is X0 cap X1
        out.degenerate_case = DegenerateCase::intersection;
        out.value = std::max(couple.norm0(x), couple.norm1(x));
        return out;
    }

    detail::k_characterization(phi, couple, p0, p1, x, q, tmin, tmax, out);

    if (cls.nondegenerate0 && cls.nondegenerate1) {
        out.degenerate_case = DegenerateCase::none;
        out.value = out.k_char_value;
    } else if (!cls.nondegenerate0) {
        // phi(1,t) bounded: one-sided sequence to the left, space meets X0
        out.degenerate_case = DegenerateCase::one_sided_left;
        out.value = std::max(out.k_char_value, couple.norm0(x));
    } else {
        out.degenerate_case = DegenerateCase::one_sided_right;
        out.value = std::max(out.k_char_value, couple.norm1(x));
    }
    return out;
}

namespace detail {

// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& y) {
    std::vector<double> u(y);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            tau = t;
            k = static_cast<int>(i + 1);
        }
    }
    (void)k;
    for (double& v : y) v = std::max(0.0, v - tau);
}

inline double seq_lp_norm(const std::vector<double>& v, const Exponent& p) {
    double zmax = 0.0;
    for (double z : v) zmax = std::max(zmax, z);
    if (zmax == 0.0) return 0.0;
    if (p.is_inf()) return zmax;
    double sum = 0.0;
    for (double z : v) sum += std::pow(z / zmax, p.value());
    return zmax * std::pow(sum, 1.0 / p.value());
}

}  // namespace detail

/// Direct Definition-1 oracle: minimize
///   max( ||{||w_n||_0}||_{l_p0}, ||{t_n ||w_n||_1}||_{l_p1} )
/// over representations x = sum_n rho(t_n) w_n, restricted to pointwise
/// nonnegative splittings of x and solved by projected subgradient descent.
/// Oracle scale only; relative accuracy about 5e-2.
inline double means_norm_direct(const InterpFunction& phi, const Couple& couple,
                                const Exponent& p0, const Exponent& p1, const Element& x,
                                const BalancedSequence& tseq, int truncation,
                                int iterations = 6000) {
    if (x.size() != couple.atoms()) throw ValidationError("means_norm_direct: size mismatch");
    if (couple.atoms() > 3) throw OracleScaleError("means_norm_direct limited to 3 atoms");
    if (truncation > 6) throw OracleScaleError("means_norm_direct limited to |n| <= 6");
    if (is_zero(x)) return 0.0;

    std::vector<double> tn, rho_n;
    for (int n = std::max(-truncation, tseq.first_index);
         n <= std::min(truncation, tseq.last_index()); ++n) {
        tn.push_back(tseq.at(n));
        rho_n.push_back(phi.rho(tseq.at(n)));
    }
    const std::size_t N = tn.size(), M = x.size();
    if (N == 0) throw ValidationError("means_norm_direct: empty truncated sequence");

    // mu[n][m]: fraction of x_m carried by term n (per-atom simplex)
    auto evaluate = [&](const std::vector<std::vector<double>>& mu) {
        std::vector<double> a(N), b(N);
        Element w(M);
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t m = 0; m < M; ++m) w[m] = mu[n][m] * x[m] / rho_n[n];
            a[n] = couple.norm0(w);
            b[n] = tn[n] * couple.norm1(w);
        }
        return std::max(detail::seq_lp_norm(a, p0), detail::seq_lp_norm(b, p1));
    };

    // init: best single-term representation
    std::vector<std::vector<double>> mu(N, std::vector<double>(M, 0.0));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_n = 0;
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<std::vector<double>> cand(N, std::vector<double>(M, 0.0));
        std::fill(cand[n].begin(), cand[n].end(), 1.0);
        double v = evaluate(cand);
        if (v < best) {
            best = v;
            best_n = n;
        }
    }
    std::fill(mu[best_n].begin(), mu[best_n].end(), 1.0);
    if (N == 1) return best;

    double current = best;
    const double h = 1e-6;
    std::vector<std::vector<double>> grad(N, std::vector<double>(M, 0.0));
    for (int it = 0; it < iterations; ++it) {
        // numerical subgradient (dimension is tiny at oracle scale)
        double gnorm2 = 0.0;
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t m = 0; m < M; ++m) {
                double saved = mu[n][m];
                mu[n][m] = saved + h;
                double up = evaluate(mu);
                mu[n][m] = saved;
                grad[n][m] = (up - current) / h;
                gnorm2 += grad[n][m] * grad[n][m];
            }
        if (gnorm2 <= 1e-24) break;
        double step = 0.25 / std::sqrt((it + 1.0) * gnorm2);
        std::vector<double> col(N);
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t n = 0; n < N; ++n) col[n] = mu[n][m] - step * best * grad[n][m];
            detail::project_simplex(col);
            for (std::size_t n = 0; n < N; ++n) mu[n][m] = col[n];
        }
        current = evaluate(mu);
        best = std::min(best, current);
    }
    return best;
}

}  // namespace ri

#endif
