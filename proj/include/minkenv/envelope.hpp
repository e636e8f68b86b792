#pragma once

// Envelopes of pseudo-circle families C_(a(t), +r(t)) and C_(a(t), -r(t)).
//
// A family is creative when a unit field nutilde exists with
//
//   r' + beta <nutilde, mu> = 0     (sigma = +1, nutilde spacelike)
//   r' - beta <nutilde, mu> = 0     (sigma = -1, nutilde timelike),
//
// and it creates an envelope exactly when it is creative; every envelope is
// f = a + r*nutilde. Writing nutilde = c*mu + s*nu, the identity pins the
// mu-coefficient c = -sigma*eps_mu*(r'/beta) wherever beta != 0, while the
// unit constraint couples c and s through a hyperbolic angle theta:
//
//   case eps_nutilde*eps_mu = +1:  c = +-cosh(theta), s = +-sinh(theta),
//                                  feasible only when |r'/beta| >= 1;
//   case eps_nutilde*eps_mu = -1:  c = sinh-type (any value), s = +-cosh(theta).
//
// The free sign of s is what produces multiple envelope branches.

#include "minkenv/frontal.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace minkenv {

class FamilyError : public std::runtime_error {
public:
    explicit FamilyError(const std::string& what) : std::runtime_error(what) {}
};

/// A frontal, a positive radius function and the family sign sigma:
/// +1 picks the spacelike circles S^1_1(a, r), -1 the timelike H^1(a, -r).
struct PseudoCircleFamily {
    FrontalFrame frame;
    ExprAst radius;
    std::vector<double> r;        // samples, all > 0
    std::vector<double> r_prime;  // dr/dt, exact
    int sigma = +1;
    int eps_nutilde = +1;  // equals sigma: the unit circle nutilde lives on
    int case_sign = 0;     // eps_nutilde * eps_mu
    double max_abs_r_prime = 0.0;

    std::size_t size() const { return frame.size(); }

    struct Geometry {
        MVec2 a, a_prime;
        double r = 0.0, r_prime = 0.0;
    };

    /// Exact geometry at an arbitrary parameter (not restricted to the grid).
    Geometry geometry_at(double t) const {
        const Dual ax = frame.spec.ax.eval_dual(t);
        const Dual ay = frame.spec.ay.eval_dual(t);
        const Dual rd = radius.eval_dual(t);
        return {{ax.val, ay.val}, {ax.der, ay.der}, rd.val, rd.der};
    }

    PseudoCircleSpec circle_at_sample(std::size_t i) const {
        return {frame.a[i], r[i], sigma};
    }
};

inline PseudoCircleFamily make_family(FrontalFrame frame, ExprAst radius, int sigma) {
    if (sigma != +1 && sigma != -1) throw FamilyError("family: sigma must be +1 or -1");
    PseudoCircleFamily fam;
    fam.frame = std::move(frame);
    fam.radius = std::move(radius);
    fam.sigma = sigma;
    fam.eps_nutilde = sigma;
    fam.case_sign = sigma * fam.frame.eps_mu;
    const std::size_t n = fam.frame.size();
    fam.r.resize(n);
    fam.r_prime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Dual rd = fam.radius.eval_dual(fam.frame.grid.t[i]);
        if (!(rd.val > 0.0))
            throw FamilyError("radius must be positive; r(" +
                              std::to_string(fam.frame.grid.t[i]) +
                              ") = " + std::to_string(rd.val));
        fam.r[i] = rd.val;
        fam.r_prime[i] = rd.der;
        fam.max_abs_r_prime = std::max(fam.max_abs_r_prime, std::fabs(rd.der));
    }
    return fam;
}

inline constexpr double kCreativeTol = 1e-8;  // tol_cr

/// Per-sample solution of the creative condition.
struct CreativeSolution {
    int case_sign = 0;
    int sigma = 0;
    std::vector<double> theta;     // hyperbolic angle; arcosh-based in case +1, arsinh in case -1
    std::vector<double> mu_coeff;  // identity-pinned coefficient of mu in nutilde
    std::vector<bool> underdetermined;    // beta = 0 = r': theta interpolated from neighbors
    std::vector<bool> branch_degenerate;  // case +1 with |r'/beta| ~ 1: theta -> 0, sign may switch
    std::size_t underdetermined_count = 0;
};

struct NotCreative {
    std::size_t witness_sample = 0;
    double t = 0.0;
    std::string reason;
};

using CreativeResult = std::variant<CreativeSolution, NotCreative>;

inline bool is_creative(const CreativeResult& r) {
    return std::holds_alternative<CreativeSolution>(r);
}

namespace envelope_detail {

// Linear interpolation of theta across runs of underdetermined samples;
// runs touching a grid end copy the nearest determined value. A fully
// underdetermined grid gets theta = 0.
inline void fill_underdetermined(std::vector<double>& theta, const std::vector<bool>& undet) {
    const std::size_t n = theta.size();
    std::size_t i = 0;
    while (i < n) {
        if (!undet[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && undet[j + 1]) ++j;
        const bool has_left = i > 0;
        const bool has_right = j + 1 < n;
        for (std::size_t k = i; k <= j; ++k) {
            if (has_left && has_right) {
                const double w = static_cast<double>(k - i + 1) / static_cast<double>(j - i + 2);
                theta[k] = theta[i - 1] * (1.0 - w) + theta[j + 1] * w;
            } else if (has_left) {
                theta[k] = theta[i - 1];
            } else if (has_right) {
                theta[k] = theta[j + 1];
            } else {
                theta[k] = 0.0;
            }
        }
        i = j + 1;
    }
}

}  // namespace envelope_detail

/// Decides creativity sample-wise. In case +1 feasibility needs
/// (beta = 0 and r' = 0) or |r'/beta| >= 1 - tol; the first infeasible
/// sample is returned as a NotCreative witness. In case -1 every sample
/// with beta != 0 is feasible, and beta = 0 forces r' = 0.
inline CreativeResult creative_solve(const PseudoCircleFamily& fam) {
    const FrontalFrame& fr = fam.frame;
    const std::size_t n = fam.size();
    const double zero_beta = 1e-14 * (1.0 + fr.max_abs_beta);
    const double zero_r = 1e-14 * (1.0 + fam.max_abs_r_prime);
    const double pin = -static_cast<double>(fam.sigma * fr.eps_mu);  // c = pin * r'/beta

    CreativeSolution sol;
    sol.case_sign = fam.case_sign;
    sol.sigma = fam.sigma;
    sol.theta.assign(n, 0.0);
    sol.mu_coeff.assign(n, 0.0);
    sol.underdetermined.assign(n, false);
    sol.branch_degenerate.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const double beta = fr.beta[i];
        const double rp = fam.r_prime[i];
        if (std::fabs(beta) <= zero_beta) {
            if (std::fabs(rp) <= zero_r) {
                sol.underdetermined[i] = true;
                ++sol.underdetermined_count;
                continue;
            }
            return NotCreative{i, fr.grid.t[i],
                               fam.case_sign > 0
                                   ? "beta = 0 but r' != 0: no cosh(theta) solves the identity"
                                   : "beta = 0 but r' != 0: no sinh(theta) solves the identity"};
        }
        const double rho = rp / beta;
        if (fam.case_sign > 0) {
            const double arho = std::fabs(rho);
            if (arho < 1.0 - kCreativeTol)
                return NotCreative{i, fr.grid.t[i],
                                   "|r'/beta| = " + std::to_string(arho) +
                                       " < 1: cosh(theta) >= 1 forbids a solution"};
            sol.branch_degenerate[i] = std::fabs(arho - 1.0) <= kCreativeTol;
            if (arho <= 1.0 + kCreativeTol) {
                // |rho| = 1 within tolerance: rounding in rho would otherwise
                // leak into theta as sqrt-amplified noise and split the
                // collapsed +-sinh branches.
                sol.theta[i] = 0.0;
                sol.mu_coeff[i] = pin * rho < 0.0 ? -1.0 : 1.0;
            } else {
                sol.theta[i] = std::acosh(arho);
                sol.mu_coeff[i] = pin * rho;
            }
        } else {
            sol.theta[i] = std::asinh(rho);
            sol.mu_coeff[i] = pin * rho;
        }
    }

    if (sol.underdetermined_count > 0) {
        envelope_detail::fill_underdetermined(sol.theta, sol.underdetermined);
        // Rebuild the pinned coefficient on the interpolated samples, keeping
        // the sign of the nearest determined run in case +1.
        for (std::size_t i = 0; i < n; ++i) {
            if (!sol.underdetermined[i]) continue;
            if (fam.case_sign > 0) {
                double sign = 1.0;
                for (std::size_t d = 1; d < n; ++d) {
                    if (i >= d && !sol.underdetermined[i - d]) {
                        sign = sol.mu_coeff[i - d] < 0.0 ? -1.0 : 1.0;
                        break;
                    }
                    if (i + d < n && !sol.underdetermined[i + d]) {
                        sign = sol.mu_coeff[i + d] < 0.0 ? -1.0 : 1.0;
                        break;
                    }
                }
                sol.mu_coeff[i] = sign * std::cosh(sol.theta[i]);
            } else {
                sol.mu_coeff[i] = pin * std::sinh(sol.theta[i]);
            }
        }
    }
    return sol;
}

/// One envelope branch f(t) = a(t) + r(t) * nutilde(t) on the family grid.
struct EnvelopeCurve {
    std::vector<MVec2> points;
    std::vector<MVec2> nutilde;
    int branch_id = 0;
    std::string descriptor;
};

namespace envelope_detail {

inline double sup_distance(const std::vector<MVec2>& p, const std::vector<MVec2>& q) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        m = std::max(m, euclidean_distance(p[i], q[i]));
    return m;
}

/// Checks a candidate nutilde field against the defining identity at every
/// sample. Tolerance scales with the identity's own terms.
inline bool satisfies_identity(const PseudoCircleFamily& fam, const std::vector<MVec2>& nutilde) {
    const FrontalFrame& fr = fam.frame;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const double coupling = fr.beta[i] * minkowski_dot(nutilde[i], fr.mu[i]);
        const double res = fam.sigma > 0 ? fam.r_prime[i] + coupling : fam.r_prime[i] - coupling;
        const double scale = 1.0 + std::fabs(fam.r_prime[i]) + std::fabs(coupling);
        if (std::fabs(res) > kCreativeTol * scale) return false;
    }
    return true;
}

inline EnvelopeCurve assemble(const PseudoCircleFamily& fam, std::vector<MVec2> nutilde,
                              std::string descriptor) {
    EnvelopeCurve env;
    env.nutilde = std::move(nutilde);
    env.descriptor = std::move(descriptor);
    env.points.resize(fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i)
        env.points[i] = fam.frame.a[i] + fam.r[i] * env.nutilde[i];
    return env;
}

}  // namespace envelope_detail

inline constexpr double kBranchMergeTol = 1e-9;

/// Emits every distinct envelope branch of a creative family. Candidates
/// enumerate the free sign of the nu-coefficient and, where the identity
/// pinned nothing, the mirrored mu-coefficient; candidates that fail the
/// identity are dropped and branches whose point sets coincide within
/// 1e-9 sup distance are merged.
inline std::vector<EnvelopeCurve> envelope_branches(const PseudoCircleFamily& fam,
                                                    const CreativeSolution& sol) {
    const FrontalFrame& fr = fam.frame;
    const std::size_t n = fam.size();
    std::vector<EnvelopeCurve> branches;

    for (int mirror = 0; mirror <= 1; ++mirror) {
        for (int nu_sign = +1; nu_sign >= -1; nu_sign -= 2) {
            std::vector<MVec2> nutilde(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double c = mirror ? -sol.mu_coeff[i] : sol.mu_coeff[i];
                const double s = fam.case_sign > 0 ? nu_sign * std::sinh(sol.theta[i])
                                                   : nu_sign * std::cosh(sol.theta[i]);
                nutilde[i] = c * fr.mu[i] + s * fr.nu[i];
            }
            if (!envelope_detail::satisfies_identity(fam, nutilde)) continue;
            std::string desc = fam.case_sign > 0
                                   ? std::string(mirror ? "-" : "+") + "cosh(theta) mu " +
                                         (nu_sign > 0 ? "+" : "-") + "sinh(theta) nu"
                                   : std::string(mirror ? "-" : "+") + "sinh(theta) mu " +
                                         (nu_sign > 0 ? "+" : "-") + "cosh(theta) nu";
            EnvelopeCurve cand = envelope_detail::assemble(fam, std::move(nutilde), desc);
            bool duplicate = false;
            for (const EnvelopeCurve& b : branches)
                if (envelope_detail::sup_distance(b.points, cand.points) <= kBranchMergeTol) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) {
                cand.branch_id = static_cast<int>(branches.size());
                branches.push_back(std::move(cand));
            }
        }
    }
    return branches;
}

/// Convenience: solve + emit; empty exactly when the family is not creative.
inline std::vector<EnvelopeCurve> envelope_branches(const PseudoCircleFamily& fam) {
    const CreativeResult res = creative_solve(fam);
    if (!is_creative(res)) return {};
    return envelope_branches(fam, std::get<CreativeSolution>(res));
}

/// Residuals of the two defining envelope conditions: membership
/// f(t) on the circle at t, and tangency <f', f - a> = 0 with f' taken by
/// central differences on the grid.
struct EnvelopeVerifyReport {
    double max_membership_residual = 0.0;
    double max_tangency_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

inline EnvelopeVerifyReport envelope_verify(const EnvelopeCurve& env,
                                            const PseudoCircleFamily& fam,
                                            double tol_env = 1e-6) {
    EnvelopeVerifyReport rep;
    rep.tol = tol_env;
    const std::size_t n = fam.size();
    const std::vector<MVec2> fp = grid_derivative(env.points, fam.frame.grid.h);
    for (std::size_t i = 0; i < n; ++i) {
        const MVec2 d = env.points[i] - fam.frame.a[i];
        rep.max_membership_residual =
            std::max(rep.max_membership_residual,
                     std::fabs(minkowski_dot(d, d) - fam.sigma * fam.r[i] * fam.r[i]));
        rep.max_tangency_residual =
            std::max(rep.max_tangency_residual, std::fabs(minkowski_dot(fp[i], d)));
    }
    rep.pass = rep.max_membership_residual <= tol_env && rep.max_tangency_residual <= tol_env;
    return rep;
}

/// Number-of-envelopes classification.
struct CountClass {
    enum Kind { NoEnvelope, Unique, ExactlyTwo, UncountablyMany } kind = NoEnvelope;
    std::string evidence;
};

inline const char* to_string(CountClass::Kind k) {
    switch (k) {
        case CountClass::NoEnvelope: return "NoEnvelope";
        case CountClass::Unique: return "Unique";
        case CountClass::ExactlyTwo: return "ExactlyTwo";
        case CountClass::UncountablyMany: return "UncountablyMany";
    }
    return "?";
}

namespace envelope_detail {

// Density proxy on an inclusion mask: the marked set is "dense" when every
// maximal run of unmarked samples has at most max(2, n/200) samples.
inline bool dense_mask(const std::vector<bool>& in_set) {
    const std::size_t n = in_set.size();
    const std::size_t allowed = std::max<std::size_t>(2, n / 200);
    std::size_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run = in_set[i] ? 0 : run + 1;
        if (run > allowed) return false;
    }
    return true;
}

}  // namespace envelope_detail

/// Classifies the number of envelopes.
///
///   case +1:  Unique        iff beta != 0 dense and |r'| = |beta| on a dense set,
///             ExactlyTwo    iff beta != 0 dense and |r'| > |beta| somewhere,
///             UncountablyMany iff beta != 0 is not dense;
///   case -1:  never Unique; ExactlyTwo iff beta != 0 dense, else UncountablyMany.
///
/// NoEnvelope when the family is not creative.
inline CountClass count_classification(const PseudoCircleFamily& fam) {
    const CreativeResult res = creative_solve(fam);
    if (!is_creative(res)) {
        const NotCreative& nc = std::get<NotCreative>(res);
        return {CountClass::NoEnvelope,
                "not creative at t = " + std::to_string(nc.t) + ": " + nc.reason};
    }
    const FrontalFrame& fr = fam.frame;
    const std::size_t n = fam.size();
    const double tol_beta = 1e-8 * (1.0 + fr.max_abs_beta);
    const SingularSet sing = singular_set(fr, tol_beta);

    if (!sing.dense_nonzero) {
        return {CountClass::UncountablyMany,
                "beta = 0 on an interval of " + std::to_string(sing.intervals.size()) +
                    " run(s) longer than the density proxy"};
    }
    if (fam.case_sign < 0)
        return {CountClass::ExactlyTwo,
                "case -1 with beta != 0 dense: both signs of the cosh(theta) nu term are valid"};

    const double tol_eq = 1e-7 * (1.0 + fr.max_abs_beta);
    std::vector<bool> equality(n);
    bool strict = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double ab = std::fabs(fr.beta[i]);
        const double ar = std::fabs(fam.r_prime[i]);
        equality[i] = ab > tol_beta && std::fabs(ar - ab) <= tol_eq;
        if (ar > ab + tol_eq) strict = true;
    }
    if (envelope_detail::dense_mask(equality))
        return {CountClass::Unique, "|r'| = |beta| != 0 on a dense sample set"};
    if (strict)
        return {CountClass::ExactlyTwo, "beta != 0 dense and |r'| > |beta| at some sample"};
    return {CountClass::Unique, "no strict inequality sample; equality holds up to gaps"};
}

/// Witness envelopes for the UncountablyMany class: theta is patched over
/// the widest beta = 0 interval with smooth bumps of the given amplitudes.
/// Off the interval every witness coincides with the base branch; on it the
/// identity is vacuous, so each patched field is again a valid envelope.
inline std::vector<EnvelopeCurve> uncountable_witnesses(
    const PseudoCircleFamily& fam, const CreativeSolution& sol,
    const std::vector<double>& amplitudes = {0.0, 1.0, 2.0}) {
    const FrontalFrame& fr = fam.frame;
    const std::size_t n = fam.size();
    const double tol_beta = 1e-8 * (1.0 + fr.max_abs_beta);
    const SingularSet sing = singular_set(fr, tol_beta);

    const SingularInterval* widest = nullptr;
    for (const SingularInterval& iv : sing.intervals)
        if (!widest || iv.length() > widest->length()) widest = &iv;
    if (!widest || widest->length() <= sing.max_run_allowed)
        throw std::logic_error("uncountable_witnesses: no beta = 0 interval to patch");

    const double lo = widest->t_first, hi = widest->t_last;
    const auto bump = [lo, hi](double t) {
        const double u = (2.0 * t - (lo + hi)) / (hi - lo);
        const double w = 1.0 - u * u;
        if (!(w > 1e-12)) return 0.0;
        return std::exp(1.0 - 1.0 / w);
    };

    std::vector<EnvelopeCurve> witnesses;
    for (double amp : amplitudes) {
        std::vector<MVec2> nutilde(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double th = sol.theta[i] + amp * bump(fr.grid.t[i]);
            double c, s;
            if (fam.case_sign > 0) {
                const double sign = sol.mu_coeff[i] < 0.0 ? -1.0 : 1.0;
                c = sign * std::cosh(th);
                s = std::sinh(th);
            } else {
                c = -static_cast<double>(fam.sigma * fr.eps_mu) * std::sinh(th);
                s = std::cosh(th);
            }
            nutilde[i] = c * fr.mu[i] + s * fr.nu[i];
        }
        EnvelopeCurve w = envelope_detail::assemble(
            fam, std::move(nutilde), "witness bump amplitude " + std::to_string(amp));
        w.branch_id = static_cast<int>(witnesses.size());
        witnesses.push_back(std::move(w));
    }
    return witnesses;
}

}  // namespace minkenv
