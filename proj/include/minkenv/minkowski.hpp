#pragma once

// Linear algebra of the Minkowski plane R^2_1: the indefinite scalar product
// <x,y> = -x1*y1 + x2*y2, causal classification of vectors, unit-vector
// normalization and pseudo-circle membership. Everything here is a pure
// function of immutable values and safe to call concurrently.

#include <cmath>
#include <stdexcept>
#include <string>

namespace minkenv {

/// Absolute tolerance under which <v,v> classifies v as lightlike.
/// Downstream normalization divides by sqrt(|<v,v>|) and must refuse
/// ill-conditioned inputs.
inline constexpr double kLightTol = 1e-10;

/// Vector in the Minkowski plane. x1 is the timelike axis (carries the
/// minus sign in the product), x2 the spacelike axis.
struct MVec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    constexpr MVec2() = default;
    constexpr MVec2(double a, double b) : x1(a), x2(b) {}

    constexpr MVec2 operator+(const MVec2& r) const { return {x1 + r.x1, x2 + r.x2}; }
    constexpr MVec2 operator-(const MVec2& r) const { return {x1 - r.x1, x2 - r.x2}; }
    constexpr MVec2 operator-() const { return {-x1, -x2}; }
    constexpr MVec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    constexpr MVec2 operator/(double s) const { return {x1 / s, x2 / s}; }
    friend constexpr MVec2 operator*(double s, const MVec2& v) { return {s * v.x1, s * v.x2}; }

    MVec2& operator+=(const MVec2& r) { x1 += r.x1; x2 += r.x2; return *this; }
    MVec2& operator-=(const MVec2& r) { x1 -= r.x1; x2 -= r.x2; return *this; }

    /// Euclidean norm of the coordinates. Used for set comparison and
    /// tolerance scales, never as the geometric (indefinite) norm.
    double euclidean_norm() const { return std::hypot(x1, x2); }

    bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
};

/// Pseudo-scalar product <u,v> = -u1*v1 + u2*v2.
constexpr double minkowski_dot(const MVec2& u, const MVec2& v) {
    return -u.x1 * v.x1 + u.x2 * v.x2;
}

/// Coordinate swap (v.x2, v.x1). Satisfies <v, v*> = 0 exactly and
/// <v*, v*> = -<v, v>: the Minkowski-orthogonal direction, with causal
/// character flipped.
constexpr MVec2 minkowski_orthogonal(const MVec2& v) { return {v.x2, v.x1}; }

/// Squared Euclidean distance between two points.
inline double euclidean_distance(const MVec2& p, const MVec2& q) {
    return std::hypot(p.x1 - q.x1, p.x2 - q.x2);
}

enum class Causality { Spacelike, Timelike, Lightlike };

inline const char* to_string(Causality c) {
    switch (c) {
        case Causality::Spacelike: return "spacelike";
        case Causality::Timelike: return "timelike";
        case Causality::Lightlike: return "lightlike";
    }
    return "?";
}

/// Causal character of a vector together with its sign epsilon:
/// +1 spacelike, -1 timelike, 0 lightlike.
struct CausalCharacter {
    Causality tag = Causality::Lightlike;
    int epsilon = 0;
};

/// Classifies v by the sign of <v,v>, treating |<v,v>| <= tol as lightlike.
inline CausalCharacter causal_character(const MVec2& v, double tol = kLightTol) {
    const double q = minkowski_dot(v, v);
    if (q > tol) return {Causality::Spacelike, +1};
    if (q < -tol) return {Causality::Timelike, -1};
    return {Causality::Lightlike, 0};
}

/// Thrown when a lightlike vector reaches an operation that needs a
/// well-defined unit direction.
class LightlikeError : public std::runtime_error {
public:
    explicit LightlikeError(const std::string& what) : std::runtime_error(what) {}
};

struct UnitVector {
    MVec2 vec;
    CausalCharacter character;
};

/// v / sqrt(|<v,v>|). The result u satisfies <u,u> = +1 (spacelike input)
/// or -1 (timelike input). Lightlike input has no unit multiple.
inline UnitVector normalize_unit(const MVec2& v, double tol = kLightTol) {
    const CausalCharacter c = causal_character(v, tol);
    if (c.tag == Causality::Lightlike)
        throw LightlikeError("normalize_unit: vector on the light cone, |<v,v>| <= " +
                             std::to_string(tol));
    const double scale = 1.0 / std::sqrt(std::fabs(minkowski_dot(v, v)));
    return {v * scale, c};
}

/// One member of a pseudo-circle family: sigma = +1 selects
/// {x : <x-P, x-P> = +r^2}, sigma = -1 selects {x : <x-P, x-P> = -r^2}.
struct PseudoCircleSpec {
    MVec2 center;
    double radius = 1.0;  // > 0
    int sigma = +1;       // +1 or -1
};

/// <p - P, p - P> - sigma * r^2. Zero iff p lies on the pseudo-circle.
inline double circle_residual(const PseudoCircleSpec& spec, const MVec2& p) {
    const MVec2 d = p - spec.center;
    return minkowski_dot(d, d) - spec.sigma * spec.radius * spec.radius;
}

}  // namespace minkenv
