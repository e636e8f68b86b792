#pragma once

// Forward-mode dual numbers: value plus exact first derivative with respect
// to the curve parameter. Expression evaluation runs entirely on Dual so a,
// nu, r and their derivatives stay consistent by construction.

#include <cmath>
#include <stdexcept>
#include <string>

namespace minkenv {

/// Thrown when an expression is evaluated outside its domain of
/// differentiability: sqrt of a negative, log of a non-positive, division
/// by zero, |x| at x = 0, or a non-finite intermediate.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct Dual {
    double val = 0.0;
    double der = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double v, double d = 0.0) : val(v), der(d) {}

    /// The variable itself: d/dt t = 1.
    static constexpr Dual variable(double t) { return {t, 1.0}; }

    constexpr Dual operator-() const { return {-val, -der}; }
    constexpr Dual operator+(const Dual& r) const { return {val + r.val, der + r.der}; }
    constexpr Dual operator-(const Dual& r) const { return {val - r.val, der - r.der}; }
    constexpr Dual operator*(const Dual& r) const {
        return {val * r.val, val * r.der + der * r.val};
    }
    Dual operator/(const Dual& r) const {
        if (r.val == 0.0) throw DomainError("division by zero");
        return {val / r.val, (der * r.val - val * r.der) / (r.val * r.val)};
    }
};

namespace dual_ops {

inline Dual sqrt(const Dual& x) {
    if (x.val < 0.0) throw DomainError("sqrt of negative value " + std::to_string(x.val));
    if (x.val == 0.0) throw DomainError("sqrt at 0: derivative undefined");
    const double s = std::sqrt(x.val);
    return {s, x.der / (2.0 * s)};
}

inline Dual sinh(const Dual& x) { return {std::sinh(x.val), std::cosh(x.val) * x.der}; }
inline Dual cosh(const Dual& x) { return {std::cosh(x.val), std::sinh(x.val) * x.der}; }

inline Dual tanh(const Dual& x) {
    const double t = std::tanh(x.val);
    return {t, (1.0 - t * t) * x.der};
}

inline Dual exp(const Dual& x) {
    const double e = std::exp(x.val);
    return {e, e * x.der};
}

inline Dual log(const Dual& x) {
    if (x.val <= 0.0) throw DomainError("log of non-positive value " + std::to_string(x.val));
    return {std::log(x.val), x.der / x.val};
}

inline Dual abs(const Dual& x) {
    if (x.val == 0.0) throw DomainError("abs at 0: derivative undefined");
    return x.val > 0.0 ? x : -x;
}

/// x^n for a static integer exponent; valid for any sign of x (except
/// x = 0 with n < 1, where value or derivative is singular).
inline Dual pow_int(const Dual& x, long long n) {
    if (n == 0) return {1.0, 0.0};
    if (x.val == 0.0 && n < 0) throw DomainError("zero base with negative exponent");
    const double vpow = std::pow(x.val, static_cast<double>(n));
    const double dpow = static_cast<double>(n) * std::pow(x.val, static_cast<double>(n - 1));
    return {vpow, dpow * x.der};
}

/// General power via exp(e * log(b)); requires b > 0.
inline Dual pow_general(const Dual& base, const Dual& expo) {
    if (base.val <= 0.0)
        throw DomainError("x^y with non-integer exponent needs base > 0, base = " +
                          std::to_string(base.val));
    return exp(expo * log(base));
}

}  // namespace dual_ops
}  // namespace minkenv
