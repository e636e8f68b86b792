#pragma once

// Frontals in the Minkowski plane: a center curve a(t) with a unit Gauss
// map nu(t) satisfying the Legendre condition <a', nu> = 0, the canonical
// frame vector mu, the curvature pair (ell, beta) of the Frenet relations
//
//   nu' = ell * mu,   mu' = ell * nu,   a' = beta * mu,
//
// with ell = eps_mu <mu, nu'> and beta = eps_mu <mu, a'>. Samples where
// beta vanishes are the singular points of a.

#include "minkenv/expr.hpp"
#include "minkenv/grid.hpp"
#include "minkenv/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minkenv {

class LightlikeFrameError : public std::runtime_error {
public:
    LightlikeFrameError(std::size_t sample, double t, const std::string& what)
        : std::runtime_error("lightlike frame at sample " + std::to_string(sample) + " (t = " +
                             std::to_string(t) + "): " + what),
          sample(sample),
          t(t) {}
    std::size_t sample;
    double t;
};

class LegendreViolationError : public std::runtime_error {
public:
    LegendreViolationError(std::size_t sample, double t, double residual, double tol)
        : std::runtime_error("Legendre condition <a',nu> = 0 violated at sample " +
                             std::to_string(sample) + " (t = " + std::to_string(t) +
                             "): |<a',nu>| = " + std::to_string(residual) + " > " +
                             std::to_string(tol)),
          sample(sample),
          residual(residual) {}
    std::size_t sample;
    double residual;
};

/// The causal character of nu changed along the grid; the frontal would be
/// crossing the light cone, which is out of scope.
class MixedCausalityError : public std::runtime_error {
public:
    explicit MixedCausalityError(const std::string& what) : std::runtime_error(what) {}
};

/// Center curve plus optional user-supplied Gauss map, as expressions in t,
/// with the open sampling interval and grid resolution.
struct CurveSpec {
    ExprAst ax, ay;
    std::optional<ExprAst> nux, nuy;  // both present or both absent
    double t_min = -1.0;
    double t_max = 1.0;
    std::size_t n_samples = 601;

    bool has_gauss_map() const { return nux.has_value(); }
};

/// Frontal data sampled on a uniform grid. Immutable after construction.
struct FrontalFrame {
    CurveSpec spec;
    Grid grid;

    std::vector<MVec2> a;         // center curve
    std::vector<MVec2> a_prime;   // da/dt, exact (dual numbers)
    std::vector<MVec2> nu;        // unit Gauss map
    std::vector<MVec2> mu;        // unit frame vector, mu = (nu.x2, nu.x1)
    std::vector<MVec2> nu_prime;  // dnu/dt: exact when nu has expressions, grid FD otherwise
    std::vector<double> ell;
    std::vector<double> beta;

    int eps_nu = 0;  // +1 spacelike nu (timelike frontal), -1 timelike nu (spacelike frontal)
    int eps_mu = 0;  // always -eps_nu
    bool nu_exact = false;  // nu_prime from dual numbers rather than grid FD

    std::size_t size() const { return grid.n; }
    double max_a_prime_norm = 0.0;  // max Euclidean |a'| over the grid
    double max_abs_beta = 0.0;

    MVec2 mu_prime(std::size_t i) const { return minkowski_orthogonal(nu_prime[i]); }
};

/// (ell_i, beta_i); throws std::out_of_range for a bad index.
inline std::pair<double, double> curvature_at(const FrontalFrame& f, std::size_t i) {
    if (i >= f.size()) throw std::out_of_range("curvature_at: sample index out of range");
    return {f.ell[i], f.beta[i]};
}

namespace frontal_detail {

struct DualVec {
    Dual x1, x2;
    MVec2 value() const { return {x1.val, x2.val}; }
    MVec2 derivative() const { return {x1.der, x2.der}; }
};

inline Dual mdot(const DualVec& u, const DualVec& v) { return -(u.x1 * v.x1) + u.x2 * v.x2; }

inline DualVec normalize(const DualVec& v, std::size_t sample, double t) {
    const Dual q = mdot(v, v);
    if (std::fabs(q.val) <= kLightTol)
        throw LightlikeFrameError(sample, t,
                                  "<v,v> = " + std::to_string(q.val) + " within light tolerance");
    const Dual absq = q.val > 0.0 ? q : -q;
    const Dual inv = Dual(1.0) / dual_ops::sqrt(absq);
    return {v.x1 * inv, v.x2 * inv};
}

}  // namespace frontal_detail

/// Builds the sampled frame. With a supplied Gauss map: nu is normalized,
/// mu is the exact Minkowski-orthogonal coordinate swap of nu, and the
/// Legendre condition is verified. Without one, a must be a regular
/// non-lightlike curve; then mu := normalize(a') and nu := swap(mu).
inline FrontalFrame build_frame(const CurveSpec& spec) {
    using frontal_detail::DualVec;
    if (spec.nux.has_value() != spec.nuy.has_value())
        throw std::invalid_argument("build_frame: supply both Gauss map components or neither");

    FrontalFrame f;
    f.spec = spec;
    f.grid = Grid::uniform(spec.t_min, spec.t_max, spec.n_samples);
    const std::size_t n = f.grid.n;
    f.a.resize(n);
    f.a_prime.resize(n);
    f.nu.resize(n);
    f.mu.resize(n);
    f.nu_prime.resize(n);
    f.ell.resize(n);
    f.beta.resize(n);
    f.nu_exact = spec.has_gauss_map();

    std::vector<DualVec> nu_dual(spec.has_gauss_map() ? n : 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = f.grid.t[i];
        const DualVec ad{spec.ax.eval_dual(t), spec.ay.eval_dual(t)};
        f.a[i] = ad.value();
        f.a_prime[i] = ad.derivative();
        f.max_a_prime_norm = std::max(f.max_a_prime_norm, f.a_prime[i].euclidean_norm());

        if (spec.has_gauss_map()) {
            const DualVec raw{spec.nux->eval_dual(t), spec.nuy->eval_dual(t)};
            nu_dual[i] = frontal_detail::normalize(raw, i, t);
            f.nu[i] = nu_dual[i].value();
            f.nu_prime[i] = nu_dual[i].derivative();
        } else {
            const CausalCharacter c = causal_character(f.a_prime[i]);
            if (c.tag == Causality::Lightlike)
                throw LightlikeFrameError(i, t, "a'(t) on the light cone, no derived frame");
            f.mu[i] = f.a_prime[i] / std::sqrt(std::fabs(minkowski_dot(f.a_prime[i], f.a_prime[i])));
            f.nu[i] = minkowski_orthogonal(f.mu[i]);
        }
    }

    if (spec.has_gauss_map()) {
        for (std::size_t i = 0; i < n; ++i) f.mu[i] = minkowski_orthogonal(f.nu[i]);
    } else {
        // No expressions for nu here, so nu' comes from the grid.
        f.nu_prime = grid_derivative(f.nu, f.grid.h);
    }

    // Character coherence: a frontal is spacelike or timelike, not mixed.
    f.eps_nu = causal_character(f.nu[0]).epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        const int e = causal_character(f.nu[i]).epsilon;
        if (e == 0) throw LightlikeFrameError(i, f.grid.t[i], "unit nu degenerated to lightlike");
        if (e != f.eps_nu)
            throw MixedCausalityError("causal character of nu changes at sample " +
                                      std::to_string(i) + " (t = " + std::to_string(f.grid.t[i]) +
                                      ")");
    }
    f.eps_mu = -f.eps_nu;

    const double tol_leg = 1e-8 * (1.0 + f.max_a_prime_norm);
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.has_gauss_map()) {
            const double leg = minkowski_dot(f.a_prime[i], f.nu[i]);
            if (std::fabs(leg) > tol_leg)
                throw LegendreViolationError(i, f.grid.t[i], std::fabs(leg), tol_leg);
        }
        f.ell[i] = f.eps_mu * minkowski_dot(f.mu[i], f.nu_prime[i]);
        f.beta[i] = f.eps_mu * minkowski_dot(f.mu[i], f.a_prime[i]);
        f.max_abs_beta = std::max(f.max_abs_beta, std::fabs(f.beta[i]));
    }
    return f;
}

/// Maximal grid interval with |beta| <= tol, inclusive sample indices.
struct SingularInterval {
    std::size_t first = 0;
    std::size_t last = 0;
    double t_first = 0.0;
    double t_last = 0.0;
    std::size_t length() const { return last - first + 1; }
};

struct SingularSet {
    std::vector<SingularInterval> intervals;
    bool dense_nonzero = true;  // numeric proxy for "beta != 0 is dense"
    std::size_t max_run_allowed = 2;
};

/// Collects the maximal runs of samples with |beta| <= tol_beta.
/// dense_nonzero stays true while every run is short (at most
/// max(2, n/200) samples): isolated zeros of beta are measure-zero sets
/// and must not destroy density; only interval-sized gaps are detectable
/// on a grid.
inline SingularSet singular_set(const FrontalFrame& f, double tol_beta) {
    if (!(tol_beta > 0.0)) throw std::invalid_argument("singular_set: tol_beta must be > 0");
    SingularSet out;
    const std::size_t n = f.size();
    out.max_run_allowed = std::max<std::size_t>(2, n / 200);
    std::size_t i = 0;
    while (i < n) {
        if (std::fabs(f.beta[i]) <= tol_beta) {
            std::size_t j = i;
            while (j + 1 < n && std::fabs(f.beta[j + 1]) <= tol_beta) ++j;
            out.intervals.push_back({i, j, f.grid.t[i], f.grid.t[j]});
            if (j - i + 1 > out.max_run_allowed) out.dense_nonzero = false;
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

/// Residuals of the frame invariants, for verification and reporting.
struct FrameDiagnostics {
    double max_unit_nu = 0.0;    // max |<nu,nu> - eps_nu|
    double max_unit_mu = 0.0;    // max |<mu,mu> - eps_mu|
    double max_ortho = 0.0;      // max |<mu,nu>|
    double max_legendre = 0.0;   // max |<a',nu>|
    double frenet_nu = 0.0;      // max |nu' - ell*mu| (sup over components)
    double frenet_mu = 0.0;      // max |mu' - ell*nu|
    double frenet_a = 0.0;       // max |a' - beta*mu|
    double tol_legendre = 0.0;
    double tol_frenet = 1e-6;

    bool pass() const {
        return max_unit_nu <= 1e-9 && max_unit_mu <= 1e-9 && max_ortho <= 1e-9 &&
               max_legendre <= tol_legendre && frenet_nu <= tol_frenet &&
               frenet_mu <= tol_frenet && frenet_a <= tol_frenet;
    }
};

inline FrameDiagnostics frame_diagnostics(const FrontalFrame& f) {
    FrameDiagnostics d;
    d.tol_legendre = 1e-8 * (1.0 + f.max_a_prime_norm);
    const auto sup = [](const MVec2& v) { return std::max(std::fabs(v.x1), std::fabs(v.x2)); };
    for (std::size_t i = 0; i < f.size(); ++i) {
        d.max_unit_nu = std::max(d.max_unit_nu,
                                 std::fabs(minkowski_dot(f.nu[i], f.nu[i]) - f.eps_nu));
        d.max_unit_mu = std::max(d.max_unit_mu,
                                 std::fabs(minkowski_dot(f.mu[i], f.mu[i]) - f.eps_mu));
        d.max_ortho = std::max(d.max_ortho, std::fabs(minkowski_dot(f.mu[i], f.nu[i])));
        d.max_legendre =
            std::max(d.max_legendre, std::fabs(minkowski_dot(f.a_prime[i], f.nu[i])));
        d.frenet_nu = std::max(d.frenet_nu, sup(f.nu_prime[i] - f.ell[i] * f.mu[i]));
        d.frenet_mu = std::max(d.frenet_mu, sup(f.mu_prime(i) - f.ell[i] * f.nu[i]));
        d.frenet_a = std::max(d.frenet_a, sup(f.a_prime[i] - f.beta[i] * f.mu[i]));
    }
    return d;
}

}  // namespace minkenv
