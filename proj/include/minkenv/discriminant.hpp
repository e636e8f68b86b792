#pragma once

// The discriminant (D) envelope [F = dF/dt = 0 for F = <p-a(t), p-a(t)>
// - sigma r(t)^2], limiting intersections of nearby circles (E1), and
// point-set comparison between the three envelope notions.
//
// dF/dt = 0 is affine in p, so each slice reduces to a line/pseudo-circle
// intersection: a real quadratic in the line parameter that may degenerate
// to linear when the line direction is lightlike (parallel to a conic
// asymptote). Everything is solved per-t; slices are independent.

#include "minkenv/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace minkenv {

/// F and its t-derivative at (p, t):
///   F   = <p - a, p - a> - sigma r^2
///   F_t = -2 <p - a, a'> - 2 sigma r r'
struct FValue {
    double F = 0.0;
    double F_t = 0.0;
};

inline FValue F_eval(const PseudoCircleFamily& fam, const MVec2& p, double t) {
    const auto g = fam.geometry_at(t);
    const MVec2 d = p - g.a;
    return {minkowski_dot(d, d) - fam.sigma * g.r * g.r,
            -2.0 * minkowski_dot(d, g.a_prime) - 2.0 * fam.sigma * g.r * g.r_prime};
}

namespace discriminant_detail {

/// Intersection of the line {A x + B y + C = 0} with the pseudo-circle
/// <p - P, p - P> = sigma r^2, solved in the line's own parametrization:
/// base point anchored at the center's larger-coefficient coordinate,
/// Euclidean-unit direction. `tol` decides double roots and the lightlike
/// (linear) degeneration.
struct LineConicResult {
    enum Kind { Two, One, Empty, NoLine } kind = NoLine;
    MVec2 p1, p2;
    MVec2 closest;  // vertex of the quadratic: nearest approach along the line
    bool has_closest = false;
};

inline LineConicResult solve_line_conic(double A, double B, double C, const MVec2& P,
                                        double sigma_r2, double tol) {
    LineConicResult out;
    const double mag = std::max(std::fabs(A), std::fabs(B));
    if (mag <= tol) {
        out.kind = LineConicResult::NoLine;  // no x/y dependence: empty or the whole plane
        return out;
    }
    MVec2 q0;
    if (std::fabs(A) >= std::fabs(B))
        q0 = {-(C + B * P.x2) / A, P.x2};
    else
        q0 = {P.x1, -(C + A * P.x1) / B};
    MVec2 d{-B, A};
    d = d / std::hypot(d.x1, d.x2);

    const MVec2 u = q0 - P;
    const double aq = minkowski_dot(d, d);
    const double bq = 2.0 * minkowski_dot(u, d);
    const double cq = minkowski_dot(u, u) - sigma_r2;

    if (std::fabs(aq) <= 1e-12) {
        // Lightlike chord direction: the quadratic term cancels exactly in
        // the limit; treat as linear.
        if (std::fabs(bq) <= tol) {
            out.kind = LineConicResult::Empty;
            return out;
        }
        out.kind = LineConicResult::One;
        out.p1 = q0 + d * (-cq / bq);
        return out;
    }

    const double disc = bq * bq - 4.0 * aq * cq;
    const double s_vertex = -bq / (2.0 * aq);
    out.closest = q0 + d * s_vertex;
    out.has_closest = true;
    if (std::fabs(disc) <= tol) {
        out.kind = LineConicResult::One;
        out.p1 = out.closest;
        return out;
    }
    if (disc < 0.0) {
        out.kind = LineConicResult::Empty;
        return out;
    }
    // Stable quadratic: avoid cancellation in the small root.
    const double q = -0.5 * (bq + (bq >= 0.0 ? 1.0 : -1.0) * std::sqrt(disc));
    const double s1 = q / aq;
    const double s2 = cq / q;
    out.kind = LineConicResult::Two;
    out.p1 = q0 + d * s1;
    out.p2 = q0 + d * s2;
    return out;
}

/// 1 + r^2 + |a'|^2: the residual/tolerance scale of a slice.
inline double slice_scale(const PseudoCircleFamily::Geometry& g) {
    return 1.0 + g.r * g.r + g.a_prime.x1 * g.a_prime.x1 + g.a_prime.x2 * g.a_prime.x2;
}

}  // namespace discriminant_detail

inline constexpr double kDiscriminantTolRel = 1e-9;  // tol_D = this * slice scale

/// The solution set of F = F_t = 0 at one parameter value.
struct DiscriminantSlice {
    enum Kind { TwoPoints, OnePoint, Empty, WholeCircle } kind = Empty;
    double t = 0.0;
    std::vector<MVec2> points;  // 0..2 isolated solutions
    /// For WholeCircle slices: both branches of the full pseudo-circle,
    /// sampled densely for export.
    std::vector<std::vector<MVec2>> circle_polyline;
};

inline const char* to_string(DiscriminantSlice::Kind k) {
    switch (k) {
        case DiscriminantSlice::TwoPoints: return "two-point";
        case DiscriminantSlice::OnePoint: return "one-point";
        case DiscriminantSlice::Empty: return "empty";
        case DiscriminantSlice::WholeCircle: return "whole-circle";
    }
    return "?";
}

namespace discriminant_detail {

inline std::vector<std::vector<MVec2>> sample_circle(const MVec2& P, double r, int sigma,
                                                     std::size_t points_per_branch = 96,
                                                     double psi_max = 2.4) {
    std::vector<std::vector<MVec2>> branches(2);
    for (int which = 0; which < 2; ++which) {
        const double side = which == 0 ? 1.0 : -1.0;
        branches[which].reserve(points_per_branch);
        for (std::size_t k = 0; k < points_per_branch; ++k) {
            const double psi =
                -psi_max + 2.0 * psi_max * static_cast<double>(k) /
                               static_cast<double>(points_per_branch - 1);
            if (sigma > 0)
                branches[which].push_back(P + r * MVec2{std::sinh(psi), side * std::cosh(psi)});
            else
                branches[which].push_back(P + r * MVec2{side * std::cosh(psi), std::sinh(psi)});
        }
    }
    return branches;
}

}  // namespace discriminant_detail

/// Exact per-t solve of F = F_t = 0. F_t = 0 is the line
/// 2 a'_1 x - 2 a'_2 y + 2<a,a'> - 2 sigma r r' = 0; when all of its
/// coefficients vanish (singular point with r' = 0) the slice is the whole
/// pseudo-circle.
inline DiscriminantSlice discriminant_at(const PseudoCircleFamily& fam, double t,
                                         bool with_polyline = false) {
    using discriminant_detail::LineConicResult;
    const auto g = fam.geometry_at(t);
    const double tol = kDiscriminantTolRel * discriminant_detail::slice_scale(g);

    const double A = 2.0 * g.a_prime.x1;
    const double B = -2.0 * g.a_prime.x2;
    const double C = 2.0 * minkowski_dot(g.a, g.a_prime) - 2.0 * fam.sigma * g.r * g.r_prime;

    DiscriminantSlice slice;
    slice.t = t;
    if (std::fabs(A) <= tol && std::fabs(B) <= tol) {
        if (std::fabs(C) <= tol) {
            slice.kind = DiscriminantSlice::WholeCircle;
            if (with_polyline)
                slice.circle_polyline = discriminant_detail::sample_circle(g.a, g.r, fam.sigma);
        } else {
            slice.kind = DiscriminantSlice::Empty;  // F_t = C != 0: no solution at this t
        }
        return slice;
    }

    const LineConicResult res = discriminant_detail::solve_line_conic(
        A, B, C, g.a, fam.sigma * g.r * g.r, tol);
    switch (res.kind) {
        case LineConicResult::Two:
            slice.kind = DiscriminantSlice::TwoPoints;
            slice.points = {res.p1, res.p2};
            break;
        case LineConicResult::One:
            slice.kind = DiscriminantSlice::OnePoint;
            slice.points = {res.p1};
            break;
        default: slice.kind = DiscriminantSlice::Empty; break;
    }
    return slice;
}

/// One slice per grid sample.
inline std::vector<DiscriminantSlice> discriminant_set(const PseudoCircleFamily& fam,
                                                       bool with_polyline = true) {
    std::vector<DiscriminantSlice> slices;
    slices.reserve(fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i)
        slices.push_back(discriminant_at(fam, fam.frame.grid.t[i], with_polyline));
    return slices;
}

class DegenerateChordError : public std::runtime_error {
public:
    explicit DegenerateChordError(const std::string& what) : std::runtime_error(what) {}
};

/// Intersection points of the circles at t0 and t0 + eps. The difference
/// F(., t0) - F(., t0+eps) is affine (the quadratic terms cancel), so this
/// is again a line/conic solve against the circle at t0. When the two
/// circles are tangent or disjoint (negative discriminant) the nearest
/// point of the circle to the chord line is returned instead, flagged:
/// it is the real part of the complexified intersection pair and converges
/// to the same E1 limit.
struct E1Intersections {
    std::vector<MVec2> points;
    bool tangent_fallback = false;
};

inline E1Intersections e1_intersections(const PseudoCircleFamily& fam, double t0, double eps) {
    using discriminant_detail::LineConicResult;
    if (eps == 0.0) throw std::invalid_argument("e1_intersections: eps must be nonzero");
    if (!fam.frame.grid.contains(t0) || !fam.frame.grid.contains(t0 + eps))
        throw std::invalid_argument("e1_intersections: t0 and t0+eps must lie in the domain");

    const auto g0 = fam.geometry_at(t0);
    const auto g1 = fam.geometry_at(t0 + eps);
    const MVec2 da = g1.a - g0.a;

    // F0 - F1 = 2<p, a1-a0> + (<a0,a0> - <a1,a1>) - sigma (r0^2 - r1^2) = 0
    const double A = -2.0 * da.x1;
    const double B = 2.0 * da.x2;
    const double C = (minkowski_dot(g0.a, g0.a) - minkowski_dot(g1.a, g1.a)) -
                     fam.sigma * (g0.r * g0.r - g1.r * g1.r);

    const double scale = discriminant_detail::slice_scale(g0);
    const double tol_chord = 1e-12 * scale;
    if (std::fabs(A) <= tol_chord && std::fabs(B) <= tol_chord && std::fabs(C) <= tol_chord)
        throw DegenerateChordError("identical circles at t0 = " + std::to_string(t0) +
                                   " and eps = " + std::to_string(eps) +
                                   ": no isolated intersections");

    const LineConicResult res = discriminant_detail::solve_line_conic(
        A, B, C, g0.a, fam.sigma * g0.r * g0.r, kDiscriminantTolRel * scale);

    E1Intersections out;
    switch (res.kind) {
        case LineConicResult::Two: out.points = {res.p1, res.p2}; break;
        case LineConicResult::One: out.points = {res.p1}; break;
        case LineConicResult::Empty:
            if (res.has_closest) {
                out.points = {res.closest};
                out.tangent_fallback = true;
            }
            break;
        case LineConicResult::NoLine: break;
    }
    return out;
}

class NoConvergenceError : public std::runtime_error {
public:
    explicit NoConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// One extrapolated E1 point with its observed convergence order.
struct E1LimitPoint {
    MVec2 point;
    double rate = 0.0;
    bool pass = false;  // rate >= 0.9, or the sequence was already converged
};

struct E1Limit {
    std::vector<E1LimitPoint> points;
    bool tangent_fallback = false;
};

/// Evaluates the chord intersections at eps0, eps0/2, eps0/4, matches the
/// points across scales by nearest neighbor and Richardson-extrapolates to
/// first order (the chord construction has O(eps) bias).
inline E1Limit e1_limit(const PseudoCircleFamily& fam, double t0, double eps0) {
    if (discriminant_at(fam, t0).kind == DiscriminantSlice::WholeCircle)
        throw std::invalid_argument("e1_limit: discriminant at t0 is a whole circle");

    const E1Intersections s0 = e1_intersections(fam, t0, eps0);
    const E1Intersections s1 = e1_intersections(fam, t0, eps0 / 2.0);
    const E1Intersections s2 = e1_intersections(fam, t0, eps0 / 4.0);
    if (s0.points.empty() || s0.points.size() != s1.points.size() ||
        s1.points.size() != s2.points.size())
        throw NoConvergenceError("intersection count changed across eps scales at t0 = " +
                                 std::to_string(t0));

    const auto nearest = [](const MVec2& p, const std::vector<MVec2>& set) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < set.size(); ++i) {
            const double d = euclidean_distance(p, set[i]);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return best;
    };

    E1Limit out;
    out.tangent_fallback = s0.tangent_fallback || s1.tangent_fallback || s2.tangent_fallback;
    std::vector<bool> used1(s1.points.size(), false), used0(s0.points.size(), false);
    for (const MVec2& p2 : s2.points) {
        const std::size_t i1 = nearest(p2, s1.points);
        const std::size_t i0 = nearest(s1.points[i1], s0.points);
        if (used1[i1] || used0[i0])
            throw NoConvergenceError("point matching across eps scales is not one-to-one");
        used1[i1] = used0[i0] = true;

        const double d1 = euclidean_distance(s0.points[i0], s1.points[i1]);
        const double d2 = euclidean_distance(s1.points[i1], p2);
        // Below this floor, differences are rounding noise in the chord
        // coefficients (which shrink like eps), not convergence data.
        const double floor_tol = 1e-8 * (1.0 + p2.euclidean_norm());
        E1LimitPoint lp;
        if (d2 <= floor_tol) {
            lp.point = p2;  // already converged (e.g. a point common to all circles)
            lp.rate = 2.0;
            lp.pass = true;
        } else {
            if (d2 > d1 * 1.05 + floor_tol)
                throw NoConvergenceError("matched sequence does not contract at t0 = " +
                                         std::to_string(t0));
            lp.rate = std::log2(d1 / d2);
            lp.point = 2.0 * p2 - s1.points[i1];
            lp.pass = lp.rate >= 0.9;
        }
        out.points.push_back(lp);
    }
    return out;
}

class EmptyInputError : public std::invalid_argument {
public:
    explicit EmptyInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// One-sided sup-of-min Euclidean distances and their max. Euclidean on
/// coordinates: set convergence is a topological statement and the
/// indefinite form is not a metric.
struct SetComparison {
    double sup_AtoB = 0.0;
    double sup_BtoA = 0.0;
    double hausdorff = 0.0;
};

inline SetComparison compare_sets(const std::vector<MVec2>& A, const std::vector<MVec2>& B) {
    if (A.empty() || B.empty()) throw EmptyInputError("compare_sets: empty point cloud");
    const auto one_sided = [](const std::vector<MVec2>& from, const std::vector<MVec2>& to) {
        double sup = 0.0;
        for (const MVec2& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const MVec2& q : to) best = std::min(best, euclidean_distance(p, q));
            sup = std::max(sup, best);
        }
        return sup;
    };
    SetComparison c;
    c.sup_AtoB = one_sided(A, B);
    c.sup_BtoA = one_sided(B, A);
    c.hausdorff = std::max(c.sup_AtoB, c.sup_BtoA);
    return c;
}

/// D split into its regular part (isolated slice solutions) and the
/// pseudo-circles contributed by singular parameters. Consecutive
/// whole-circle slices are one cluster, represented by the circle at the
/// middle sample.
struct DDecomposition {
    std::vector<MVec2> regular_points;
    std::vector<double> regular_t;  // parallel to regular_points
    std::vector<PseudoCircleSpec> singular_circles;
    std::vector<double> singular_t;
};

inline DDecomposition decompose_D(const PseudoCircleFamily& fam,
                                  const std::vector<DiscriminantSlice>& slices) {
    DDecomposition out;
    std::size_t i = 0;
    const std::size_t n = slices.size();
    while (i < n) {
        if (slices[i].kind == DiscriminantSlice::WholeCircle) {
            std::size_t j = i;
            while (j + 1 < n && slices[j + 1].kind == DiscriminantSlice::WholeCircle) ++j;
            const std::size_t mid = (i + j) / 2;
            const auto g = fam.geometry_at(slices[mid].t);
            out.singular_circles.push_back({g.a, g.r, fam.sigma});
            out.singular_t.push_back(slices[mid].t);
            i = j + 1;
        } else {
            for (const MVec2& p : slices[i].points) {
                out.regular_points.push_back(p);
                out.regular_t.push_back(slices[i].t);
            }
            ++i;
        }
    }
    return out;
}

inline DDecomposition decompose_D(const PseudoCircleFamily& fam) {
    return decompose_D(fam, discriminant_set(fam, false));
}

}  // namespace minkenv
