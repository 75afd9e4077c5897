#ifndef RI_EXPONENT_HPP
#define RI_EXPONENT_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ri/errors.hpp"

namespace ri {

/// A Lebesgue exponent p in [1, inf].  Stores the double value plus, when the
/// value is recognizably rational, an exact num/den pair so that exponent
/// arithmetic (duals, the orbit exponent map) can be done without rounding.
class Exponent {
public:
    Exponent() : value_(2.0), num_(2), den_(1) {}

    explicit Exponent(double v) {
        if (std::isnan(v) || v < 1.0)
            throw ValidationError("exponent must lie in [1, inf], got " + std::to_string(v));
        value_ = v;
        num_ = den_ = 0;
        if (std::isinf(v)) {
            num_ = 1;
            den_ = 0;
        } else {
            // Recover small rationals (menus like 4/3 come in as doubles).
            for (std::int64_t d = 1; d <= 64; ++d) {
                double n = std::round(v * static_cast<double>(d));
                if (n >= 1.0 && std::abs(v - n / static_cast<double>(d)) <= 1e-9 * v) {
                    num_ = static_cast<std::int64_t>(n);
                    den_ = d;
                    break;
                }
            }
        }
    }

    static Exponent infinity() { return Exponent(std::numeric_limits<double>::infinity()); }

    static Exponent from_ratio(std::int64_t num, std::int64_t den) {
        if (den == 0) {
            if (num <= 0) throw ValidationError("invalid exponent ratio");
            return infinity();
        }
        if (num <= 0 || den < 0 || num < den)
            throw ValidationError("exponent ratio must be >= 1");
        Exponent e;
        e.value_ = static_cast<double>(num) / static_cast<double>(den);
        std::int64_t g = gcd(num, den);
        e.num_ = num / g;
        e.den_ = den / g;
        return e;
    }

    double value() const { return value_; }
    bool is_inf() const { return std::isinf(value_); }
    bool is_one() const { return value_ == 1.0; }
    bool has_ratio() const { return den_ != 0 || is_inf(); }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    /// 1/p with the 1/inf = 0 convention.
    double inv() const { return is_inf() ? 0.0 : 1.0 / value_; }

    /// p' = (1 - 1/p)^{-1}: 1 <-> inf, else p/(p-1).
    Exponent dual() const {
        if (is_one()) return infinity();
        if (is_inf()) return Exponent(1.0);
        if (has_ratio()) return from_ratio(num_, num_ - den_);
        return Exponent(value_ / (value_ - 1.0));
    }

    bool operator==(const Exponent& o) const { return value_ == o.value_; }
    bool operator!=(const Exponent& o) const { return value_ != o.value_; }

    std::string str() const {
        if (is_inf()) return "inf";
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(value_);
    }

private:
    static std::int64_t gcd(std::int64_t a, std::int64_t b) {
        while (b != 0) {
            std::int64_t t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    double value_;
    std::int64_t num_, den_;  // den_ == 0 and num_ == 1 encodes infinity
};

}  // namespace ri

#endif
