#ifndef RI_PHIFN_HPP
#define RI_PHIFN_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/space.hpp"

namespace ri {

/// A positively homogeneous quasi-concave interpolation function phi(s,t).
/// Only the trace rho(t) = phi(1,t) is stored; phi(s,t) = s rho(t/s), so
/// degree-one homogeneity is an identity rather than a numerical property.
///
/// Kinds:
///   power      rho(t) = t^theta
///   sampled    least quasi-concave majorant of given (t,v) points:
///              piecewise linear between knots, linear through the origin on
///              the left, constant on the right
///   k_derived  rho(t) = K(1,t,x;couple), tabulated once by adaptive
///              refinement and evaluated as a sampled function
class InterpFunction {
public:
    enum class Kind { power, sampled, k_derived };

    static InterpFunction power(double theta) {
        if (theta < 0.0 || theta > 1.0)
            throw ValidationError("power kind needs theta in [0,1]");
        InterpFunction f;
        f.kind_ = Kind::power;
        f.theta_ = theta;
        return f;
    }

    /// Least concave majorant of the points, clamped to quasi-concavity.
    static InterpFunction from_samples(std::vector<double> t, std::vector<double> v) {
        if (t.size() != v.size() || t.size() < 2)
            throw ValidationError("sampled kind needs >= 2 (t,v) pairs");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!(t[i] > 0.0) || !(v[i] > 0.0))
                throw ValidationError("sampled kind needs positive t and v");
            if (i > 0 && t[i] <= t[i - 1])
                throw ValidationError("sampled kind needs strictly increasing t");
        }
        InterpFunction f;
        f.kind_ = Kind::sampled;
        f.build_knots(std::move(t), std::move(v));
        return f;
    }

    /// rho(t) = K(1,t,x;couple).  The profile is concave, so chord-vs-midpoint
    /// adaptive refinement over [2^-45, 2^45] tabulates it to relative
    /// accuracy ~tol; evaluation then costs a binary search.
    static InterpFunction k_derived(const Couple& couple, const Element& x, double tol = 1e-6) {
        if (is_zero(x)) throw ValidationError("k_derived: element must be nonzero");
        InterpFunction f;
        f.kind_ = Kind::k_derived;
        auto kval = [&](double t) { return k_at(couple, x, 1.0, t, 0.01 * tol).value; };

        const double lmin = -45.0, lmax = 45.0, step0 = 1.5;
        struct Seg {
            double la, lb, fa, fb;
            int depth;
        };
        std::vector<std::pair<double, double>> sampled;  // (log2 t, K)
        std::vector<Seg> todo;
        double prev_l = lmin, prev_f = kval(std::exp2(lmin));
        sampled.emplace_back(prev_l, prev_f);
        for (double l = lmin + step0; l <= lmax + 1e-9; l += step0) {
            double fl = kval(std::exp2(l));
            sampled.emplace_back(l, fl);
            todo.push_back({prev_l, l, prev_f, fl, 0});
            prev_l = l;
            prev_f = fl;
        }
        // depth-first chord-vs-midpoint refinement; every evaluated point is kept
        while (!todo.empty()) {
            Seg s = todo.back();
            todo.pop_back();
            double lm = 0.5 * (s.la + s.lb);
            double fm = kval(std::exp2(lm));
            sampled.emplace_back(lm, fm);
            double ta = std::exp2(s.la), tb = std::exp2(s.lb), tm = std::exp2(lm);
            double chord = s.fa + (s.fb - s.fa) * (tm - ta) / (tb - ta);
            if (std::abs(fm - chord) > tol * std::max(fm, 1e-12) && s.depth < 11) {
                todo.push_back({s.la, lm, s.fa, fm, s.depth + 1});
                todo.push_back({lm, s.lb, fm, s.fb, s.depth + 1});
            }
        }
        std::sort(sampled.begin(), sampled.end());
        std::vector<double> kt, kv;
        for (auto& p : sampled) {
            double tt = std::exp2(p.first);
            if (!kt.empty() && tt <= kt.back() * (1.0 + 1e-13)) continue;
            kt.push_back(tt);
            kv.push_back(std::max(p.second, 1e-300));
        }
        f.build_knots(std::move(kt), std::move(kv));
        return f;
    }

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    const std::vector<double>& knot_t() const { return kt_; }
    const std::vector<double>& knot_v() const { return kv_; }

    double rho(double t) const {
        if (!(t > 0.0)) throw ValidationError("rho: t must be positive");
        if (kind_ == Kind::power) return std::pow(t, theta_);
        if (t <= kt_.front()) return kv_.front() * (t / kt_.front());
        if (t >= kt_.back()) return kv_.back();
        auto it = std::upper_bound(kt_.begin(), kt_.end(), t);
        std::size_t j = static_cast<std::size_t>(it - kt_.begin());
        double t0 = kt_[j - 1], t1 = kt_[j];
        double v0 = kv_[j - 1], v1 = kv_[j];
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }

    /// phi(s,t) = s rho(t/s); exactly s^{1-theta} t^theta for the power kind.
    double operator()(double s, double t) const {
        if (!(s > 0.0) || !(t > 0.0)) throw ValidationError("phi: s,t must be positive");
        if (kind_ == Kind::power) return std::pow(s, 1.0 - theta_) * std::pow(t, theta_);
        return s * rho(t / s);
    }

private:
    void build_knots(std::vector<double> t, std::vector<double> v) {
        const std::size_t n = t.size();
        // nondecreasing clamp
        for (std::size_t i = 1; i < n; ++i) v[i] = std::max(v[i], v[i - 1]);
        // v/t nonincreasing clamp (raise earlier points; stays nondecreasing)
        for (std::size_t i = n - 1; i-- > 0;)
            v[i] = std::max(v[i], v[i + 1] * t[i] / t[i + 1]);
        // upper concave hull, monotone-chain style
        std::vector<double> ht, hv;
        for (std::size_t i = 0; i < n; ++i) {
            while (ht.size() >= 2) {
                std::size_t m = ht.size();
                double cross = (ht[m - 1] - ht[m - 2]) * (v[i] - hv[m - 2]) -
                               (t[i] - ht[m - 2]) * (hv[m - 1] - hv[m - 2]);
                if (cross >= 0.0) {
                    ht.pop_back();
                    hv.pop_back();
                } else {
                    break;
                }
            }
            ht.push_back(t[i]);
            hv.push_back(v[i]);
        }
        kt_ = std::move(ht);
        kv_ = std::move(hv);
    }

    Kind kind_ = Kind::power;
    double theta_ = 0.5;
    std::vector<double> kt_, kv_;
};

/// Constructor-style alias matching the operation name.
inline InterpFunction concave_majorant(const std::vector<double>& t,
                                       const std::vector<double>& v) {
    return InterpFunction::from_samples(t, v);
}

/// Definition-2 split phi = alpha s + beta t + phi0 with numerically
/// estimated boundary limits and per-side nondegeneracy flags.
struct PhiClassification {
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<InterpFunction> phi0;  // empty means phi0 == 0
    bool in_phi0 = false;
    bool nondegenerate0 = false;  // range of phi(1,t) unbounded above, reaching 0
    bool nondegenerate1 = false;  // same for phi(t,1)
};

namespace detail {

// Limit of f as t -> 0+, estimated from f(tmin), f(2 tmin), f(4 tmin) under a
// linear leading model f = L + c t.  Returns (limit, still_decreasing).
inline std::pair<double, bool> edge_limit(const std::function<double(double)>& f, double tmin,
                                          double scale) {
    const double grow = 1.01;
    double v1 = f(tmin), v2 = f(2.0 * tmin), v3 = f(4.0 * tmin);
    if (v2 > v1 * grow) return {0.0, true};  // no plateau yet: heading to 0
    double e1 = 2.0 * v1 - v2;
    double e2 = 2.0 * v2 - v3;
    if (std::abs(e1 - e2) > 0.05 * std::max({std::abs(e1), std::abs(e2), 1e-12 * scale}))
        throw ClassificationError("classify: limit estimates disagree", e1, e2);
    return {std::max(0.0, e1), false};
}

}  // namespace detail

inline PhiClassification classify(const InterpFunction& phi, double tmin = std::exp2(-40.0),
                                  double tmax = std::exp2(40.0)) {
    if (!(tmin > 0.0) || !(tmin < 1.0) || !(tmax > 1.0))
        throw ValidationError("classify: need 0 < tmin < 1 < tmax");
    PhiClassification cls;

    if (phi.kind() == InterpFunction::Kind::power) {
        double th = phi.theta();
        cls.alpha = (th == 0.0) ? 1.0 : 0.0;
        cls.beta = (th == 1.0) ? 1.0 : 0.0;
        cls.in_phi0 = (th > 0.0 && th < 1.0);
        cls.nondegenerate0 = cls.in_phi0;
        cls.nondegenerate1 = cls.in_phi0;
        if (cls.in_phi0) cls.phi0 = phi;
        return cls;
    }

    const double scale = phi.rho(1.0);
    auto side0 = [&](double t) { return phi(1.0, t); };          // = rho(t)
    auto side1 = [&](double t) { return phi(t, 1.0); };          // = t rho(1/t)
    auto [alpha, dec0] = detail::edge_limit(side0, tmin, scale);
    auto [beta, dec1] = detail::edge_limit(side1, tmin, scale);
    const double zero_tol = 1e-9 * scale;
    if (alpha <= zero_tol) alpha = 0.0;
    if (beta <= zero_tol) beta = 0.0;
    cls.alpha = alpha;
    cls.beta = beta;
    cls.in_phi0 = (alpha == 0.0 && beta == 0.0);

    const double grow = 1.01;
    bool top0 = side0(tmax) > side0(0.5 * tmax) * grow;
    bool top1 = side1(tmax) > side1(0.5 * tmax) * grow;
    cls.nondegenerate0 = top0 && (alpha == 0.0);
    cls.nondegenerate1 = top1 && (beta == 0.0);

    if (cls.in_phi0) {
        cls.phi0 = phi;
        return cls;
    }
    // phi0 = phi - alpha s - beta t, resampled on the domain.
    std::vector<double> ts, vs;
    const int pts = 129;
    double lmin = std::log2(tmin), lmax = std::log2(tmax);
    bool all_zero = true;
    for (int i = 0; i < pts; ++i) {
        double t = std::exp2(lmin + (lmax - lmin) * i / (pts - 1));
        double w = phi.rho(t) - alpha - beta * t;
        if (w > 1e-9 * scale) all_zero = false;
        ts.push_back(t);
        vs.push_back(std::max(w, 1e-12 * scale));
    }
    if (!all_zero) cls.phi0 = InterpFunction::from_samples(ts, vs);
    return cls;
}

enum class SequenceSide { two_sided, left_only, right_only, empty };

/// The geometric-like grid {t_n} on which rho moves by the exact factor
/// condition min(rho(t_{n+1})/rho(t_n), t_{n+1} rho(t_n)/(t_n rho(t_{n+1}))) = q.
struct BalancedSequence {
    std::vector<double> t;  // t[i] is t_{first_index + i}
    int first_index = 0;
    double q = 2.0;
    SequenceSide side = SequenceSide::empty;

    int last_index() const { return first_index + static_cast<int>(t.size()) - 1; }
    double at(int n) const { return t[static_cast<std::size_t>(n - first_index)]; }
};

namespace detail {

// min of the two eq-ratios for the step t_n -> t_next (t_next > t_n).
inline double balance_ratio(const InterpFunction& phi, double tn, double tnext) {
    double r0 = phi.rho(tnext) / phi.rho(tn);
    double r1 = (tnext / phi.rho(tnext)) * (phi.rho(tn) / tn);
    return std::min(r0, r1);
}

// Smallest t' > tn with balance_ratio == q, or nullopt if none exists below cap.
inline std::optional<double> balance_step_up(const InterpFunction& phi, double tn, double q,
                                             double cap) {
    double hi = tn;
    for (int i = 0; i < 400; ++i) {
        hi = std::min(hi * 4.0, cap);
        if (balance_ratio(phi, tn, hi) >= q) break;
        if (hi >= cap) return std::nullopt;
    }
    if (balance_ratio(phi, tn, hi) < q) return std::nullopt;
    double lo = std::max(tn, hi / 4.0);
    for (int i = 0; i < 200 && (hi - lo) > 1e-14 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (balance_ratio(phi, tn, mid) >= q ? hi : lo) = mid;
    }
    return hi;
}

// Largest t' < tn with the step t' -> tn balanced, or nullopt.
inline std::optional<double> balance_step_down(const InterpFunction& phi, double tn, double q,
                                               double cap) {
    double lo = tn;
    for (int i = 0; i < 400; ++i) {
        lo = std::max(lo / 4.0, cap);
        if (balance_ratio(phi, lo, tn) >= q) break;
        if (lo <= cap) return std::nullopt;
    }
    if (balance_ratio(phi, lo, tn) < q) return std::nullopt;
    double hi = std::min(tn, lo * 4.0);
    for (int i = 0; i < 200 && (hi - lo) > 1e-14 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (balance_ratio(phi, mid, tn) >= q ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

/// Builds the balanced sequence of the induction starting at t_0 = anchor,
/// truncated to [tmin, tmax].  A side stops either at the domain edge or
/// intrinsically, when the min-of-ratios never reaches q (plateaued rho); the
/// side flag records which directions produced steps.
inline BalancedSequence balanced_sequence(const InterpFunction& phi, double q,
                                          double tmin = std::exp2(-40.0),
                                          double tmax = std::exp2(40.0), double anchor = 1.0) {
    if (!(q > 1.0)) throw ValidationError("balanced_sequence: q must exceed 1");
    if (!(tmin < anchor) || !(anchor < tmax))
        throw ValidationError("balanced_sequence: anchor must lie inside the domain");
    std::vector<double> up, down;
    double t = anchor;
    while (true) {
        auto next = detail::balance_step_up(phi, t, q, tmax);
        if (!next) break;
        up.push_back(*next);
        t = *next;
    }
    t = anchor;
    while (true) {
        auto prev = detail::balance_step_down(phi, t, q, tmin);
        if (!prev) break;
        down.push_back(*prev);
        t = *prev;
    }
    BalancedSequence seq;
    seq.q = q;
    seq.first_index = -static_cast<int>(down.size());
    seq.t.assign(down.rbegin(), down.rend());
    seq.t.push_back(anchor);
    seq.t.insert(seq.t.end(), up.begin(), up.end());
    if (!up.empty() && !down.empty())
        seq.side = SequenceSide::two_sided;
    else if (!down.empty())
        seq.side = SequenceSide::left_only;
    else if (!up.empty())
        seq.side = SequenceSide::right_only;
    else
        seq.side = SequenceSide::empty;
    return seq;
}

}  // namespace ri

#endif
