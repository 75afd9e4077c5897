#ifndef RI_SPACE_HPP
#define RI_SPACE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ri/errors.hpp"
#include "ri/exponent.hpp"

namespace ri {

using Element = std::vector<double>;

inline bool is_zero(const Element& x) {
    for (double v : x)
        if (v != 0.0) return false;
    return true;
}

/// A finite atomic measure space carrying the weighted norm ||f U||_p.
/// Sequence spaces over Z-intervals are the same object with unit masses;
/// the integer offset of the index window is tracked by the caller
/// (see BalancedSequence::first_index).
class WeightedSpace {
public:
    WeightedSpace(std::vector<double> masses, Exponent p, std::vector<double> weights)
        : masses_(std::move(masses)), exponent_(p), weights_(std::move(weights)) {
        if (masses_.empty()) throw ValidationError("space needs at least one atom");
        if (weights_.size() != masses_.size())
            throw ValidationError("weight/mass length mismatch");
        for (std::size_t i = 0; i < masses_.size(); ++i) {
            if (!(masses_[i] > 0.0))
                throw ValidationError("masses[" + std::to_string(i) + "] must be positive");
            if (!(weights_[i] > 0.0))
                throw ValidationError("weights[" + std::to_string(i) + "] must be positive");
        }
    }

    /// Sequence space l_p(w) over n atoms: unit masses.
    static WeightedSpace sequence(Exponent p, std::vector<double> weights) {
        std::vector<double> ones(weights.size(), 1.0);
        return WeightedSpace(std::move(ones), p, std::move(weights));
    }

    std::size_t atoms() const { return masses_.size(); }
    const std::vector<double>& masses() const { return masses_; }
    const std::vector<double>& weights() const { return weights_; }
    const Exponent& exponent() const { return exponent_; }

    /// (sum_m masses_m |x_m U_m|^p)^{1/p}, max_m |x_m U_m| for p = inf.
    /// Scaled by the largest term so huge finite p does not overflow.
    double norm(const Element& x) const {
        if (x.size() != atoms())
            throw ValidationError("element length " + std::to_string(x.size()) +
                                  " does not match atom count " + std::to_string(atoms()));
        double zmax = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            zmax = std::max(zmax, std::abs(x[i]) * weights_[i]);
        if (zmax == 0.0) return 0.0;
        if (exponent_.is_inf()) return zmax;
        const double p = exponent_.value();
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double z = std::abs(x[i]) * weights_[i];
            if (z > 0.0) sum += masses_[i] * std::pow(z / zmax, p);
        }
        return zmax * std::pow(sum, 1.0 / p);
    }

    /// Dual-space norm of a functional g acting by x -> sum_m masses_m g_m x_m.
    double dual_norm(const Element& g) const {
        WeightedSpace dual_space(masses_, exponent_.dual(), invert(weights_));
        return dual_space.norm(g);
    }

    bool same_space(const WeightedSpace& o) const {
        return exponent_ == o.exponent_ && masses_ == o.masses_ && weights_ == o.weights_;
    }

private:
    static std::vector<double> invert(const std::vector<double>& w) {
        std::vector<double> r(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) r[i] = 1.0 / w[i];
        return r;
    }

    std::vector<double> masses_;
    Exponent exponent_;
    std::vector<double> weights_;
};

inline Exponent dual_exponent(const Exponent& p) { return p.dual(); }

/// An ordered pair of weighted spaces over the same atoms.
class Couple {
public:
    Couple(WeightedSpace s0, WeightedSpace s1) : s0_(std::move(s0)), s1_(std::move(s1)) {
        if (s0_.atoms() != s1_.atoms() || s0_.masses() != s1_.masses())
            throw ValidationError("couple legs must share atoms and masses");
    }

    /// {l_{p0}(w0), l_{p1}(w1)} with unit masses.
    static Couple sequence(Exponent p0, std::vector<double> w0, Exponent p1,
                           std::vector<double> w1) {
        return Couple(WeightedSpace::sequence(p0, std::move(w0)),
                      WeightedSpace::sequence(p1, std::move(w1)));
    }

    const WeightedSpace& space0() const { return s0_; }
    const WeightedSpace& space1() const { return s1_; }
    std::size_t atoms() const { return s0_.atoms(); }

    double norm0(const Element& x) const { return s0_.norm(x); }
    double norm1(const Element& x) const { return s1_.norm(x); }

private:
    WeightedSpace s0_, s1_;
};

}  // namespace ri

#endif
