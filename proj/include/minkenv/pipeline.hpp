#pragma once

// End-to-end run of one family: frame construction, creativity, envelope
// branches with definition-level verification, count classification,
// discriminant set, D-decomposition and the D-vs-envelope set comparison,
// plus the pass/fail checks that drive the CLI exit code.

#include "minkenv/config.hpp"
#include "minkenv/discriminant.hpp"
#include "minkenv/envelope.hpp"

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace minkenv {

struct PipelineOptions {
    std::optional<std::size_t> n_override;
    double tol_scale = 1.0;  // scales every pass/fail tolerance uniformly
};

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    FamilyConfig config;
    PipelineOptions options;

    std::optional<PseudoCircleFamily> family;
    FrameDiagnostics frame_diag;

    std::optional<CreativeSolution> creative;
    std::optional<NotCreative> not_creative;

    std::vector<EnvelopeCurve> branches;
    std::vector<EnvelopeVerifyReport> branch_verify;
    CountClass classification;
    std::vector<EnvelopeCurve> witnesses;
    std::vector<EnvelopeVerifyReport> witness_verify;

    std::vector<DiscriminantSlice> slices;
    std::size_t n_two = 0, n_one = 0, n_empty = 0, n_whole = 0;
    DDecomposition decomposition;
    std::optional<SetComparison> d_vs_envelopes;
    double hausdorff_bound = 0.0;
    double max_envelope_speed = 0.0;  // max Euclidean |f'| over all branches

    std::vector<Check> checks;

    bool all_pass() const {
        for (const Check& c : checks)
            if (!c.pass) return false;
        return true;
    }

    /// Every envelope sample of every branch (and witness), pooled.
    std::vector<MVec2> envelope_point_pool() const {
        std::vector<MVec2> pool;
        for (const EnvelopeCurve& b : branches)
            pool.insert(pool.end(), b.points.begin(), b.points.end());
        return pool;
    }
};

namespace pipeline_detail {

inline void add_check(RunResult& r, const std::string& name, bool pass,
                      const std::string& detail) {
    r.checks.push_back({name, pass, detail});
}

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

}  // namespace pipeline_detail

inline RunResult run_family(const FamilyConfig& config, const PipelineOptions& options = {}) {
    using pipeline_detail::add_check;
    using pipeline_detail::fmt;

    RunResult res;
    res.config = config;
    res.options = options;

    FamilyConfig cfg = config;
    if (options.n_override) cfg.n_samples = *options.n_override;
    const double ts = options.tol_scale;

    const ParsedFamily parsed = parse_family(cfg);
    FrontalFrame frame = build_frame(parsed.curve);
    try {
        res.family = make_family(std::move(frame), parsed.radius, parsed.sigma);
    } catch (const FamilyError& e) {
        throw ConfigError(cfg.name, e.what());
    }
    const PseudoCircleFamily& fam = *res.family;

    res.frame_diag = frame_diagnostics(fam.frame);
    {
        FrameDiagnostics d = res.frame_diag;
        const bool ok = d.max_unit_nu <= 1e-9 * ts && d.max_unit_mu <= 1e-9 * ts &&
                        d.max_ortho <= 1e-9 * ts && d.max_legendre <= d.tol_legendre * ts &&
                        d.frenet_nu <= d.tol_frenet * ts && d.frenet_mu <= d.tol_frenet * ts &&
                        d.frenet_a <= d.tol_frenet * ts;
        add_check(res, "frame invariants", ok,
                  "unit " + fmt(std::max(d.max_unit_nu, d.max_unit_mu)) + ", ortho " +
                      fmt(d.max_ortho) + ", legendre " + fmt(d.max_legendre) + ", frenet " +
                      fmt(std::max({d.frenet_nu, d.frenet_mu, d.frenet_a})));
    }

    const CreativeResult creative = creative_solve(fam);
    const double tol_env = 1e-6 * ts;
    if (is_creative(creative)) {
        res.creative = std::get<CreativeSolution>(creative);
        res.branches = envelope_branches(fam, *res.creative);
        bool verify_ok = !res.branches.empty();
        double worst = 0.0;
        for (const EnvelopeCurve& b : res.branches) {
            res.branch_verify.push_back(envelope_verify(b, fam, tol_env));
            verify_ok = verify_ok && res.branch_verify.back().pass;
            worst = std::max({worst, res.branch_verify.back().max_membership_residual,
                              res.branch_verify.back().max_tangency_residual});
        }
        add_check(res, "envelope definition residuals", verify_ok,
                  std::to_string(res.branches.size()) + " branch(es), worst residual " +
                      fmt(worst) + " vs tol " + fmt(tol_env));
    } else {
        res.not_creative = std::get<NotCreative>(creative);
    }

    res.classification = count_classification(fam);
    add_check(res, "existence matches creativity",
              is_creative(creative) == (res.classification.kind != CountClass::NoEnvelope),
              std::string("creative: ") + (is_creative(creative) ? "yes" : "no") +
                  ", classification: " + to_string(res.classification.kind));
    if (res.classification.kind == CountClass::Unique ||
        res.classification.kind == CountClass::ExactlyTwo) {
        const std::size_t expected = res.classification.kind == CountClass::Unique ? 1 : 2;
        add_check(res, "branch count matches classification", res.branches.size() == expected,
                  std::to_string(res.branches.size()) + " emitted, classification " +
                      to_string(res.classification.kind));
    }

    if (res.classification.kind == CountClass::UncountablyMany && res.creative) {
        res.witnesses = uncountable_witnesses(fam, *res.creative);
        bool ok = res.witnesses.size() >= 3;
        for (const EnvelopeCurve& w : res.witnesses) {
            res.witness_verify.push_back(envelope_verify(w, fam, tol_env));
            ok = ok && res.witness_verify.back().pass;
        }
        double min_sep = 0.0;
        if (res.witnesses.size() >= 2) {
            min_sep = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < res.witnesses.size(); ++i)
                for (std::size_t j = i + 1; j < res.witnesses.size(); ++j)
                    min_sep = std::min(min_sep,
                                       envelope_detail::sup_distance(res.witnesses[i].points,
                                                                     res.witnesses[j].points));
        }
        ok = ok && min_sep > 0.1;
        add_check(res, "uncountable witnesses", ok,
                  std::to_string(res.witnesses.size()) + " distinct envelopes, min separation " +
                      fmt(min_sep));
    }

    res.slices = discriminant_set(fam, true);
    for (const DiscriminantSlice& s : res.slices) {
        switch (s.kind) {
            case DiscriminantSlice::TwoPoints: ++res.n_two; break;
            case DiscriminantSlice::OnePoint: ++res.n_one; break;
            case DiscriminantSlice::Empty: ++res.n_empty; break;
            case DiscriminantSlice::WholeCircle: ++res.n_whole; break;
        }
    }
    res.decomposition = decompose_D(fam, res.slices);

    const std::vector<MVec2> pool = res.envelope_point_pool();
    for (const EnvelopeCurve& b : res.branches) {
        const auto fp = grid_derivative(b.points, fam.frame.grid.h);
        for (const MVec2& v : fp)
            res.max_envelope_speed = std::max(res.max_envelope_speed, v.euclidean_norm());
    }
    res.hausdorff_bound = 2.0 * res.max_envelope_speed * fam.frame.grid.h;

    if (!pool.empty() && !res.decomposition.regular_points.empty()) {
        res.d_vs_envelopes = compare_sets(res.decomposition.regular_points, pool);
        add_check(res, "D vs envelope Hausdorff bound",
                  res.d_vs_envelopes->hausdorff <= res.hausdorff_bound * ts,
                  "hausdorff " + fmt(res.d_vs_envelopes->hausdorff) + " vs bound " +
                      fmt(res.hausdorff_bound * ts));
    }

    if (!res.branches.empty()) {
        // D contains E2: every branch sample solves F = F_t = 0 at its own t,
        // so it must sit on the slice there (on the circle for whole-circle
        // slices, near a slice point otherwise).
        bool ok = true;
        double worst = 0.0;
        const double point_tol = std::max(1e-6, res.hausdorff_bound) * ts;
        for (const EnvelopeCurve& b : res.branches) {
            for (std::size_t i = 0; i < fam.size(); ++i) {
                const DiscriminantSlice& s = res.slices[i];
                if (s.kind == DiscriminantSlice::WholeCircle) {
                    const double f = std::fabs(F_eval(fam, b.points[i], s.t).F);
                    worst = std::max(worst, f);
                    ok = ok && f <= 1e-6 * ts;
                } else {
                    double best = std::numeric_limits<double>::infinity();
                    for (const MVec2& p : s.points)
                        best = std::min(best, euclidean_distance(b.points[i], p));
                    worst = std::max(worst, best);
                    ok = ok && best <= point_tol;
                }
            }
        }
        add_check(res, "D contains envelope samples", ok, "worst deviation " + fmt(worst));
    }

    return res;
}

/// Fixture runner: adds the example's expected outcome to the checks.
inline RunResult run_example(int n, const PipelineOptions& options = {}) {
    using pipeline_detail::add_check;
    RunResult res = run_family(example_config(n), options);
    const FixtureExpectation exp = example_expectation(n);

    add_check(res, "expected classification", res.classification.kind == exp.kind,
              std::string("got ") + to_string(res.classification.kind) + ", expected " +
                  to_string(exp.kind));
    if (exp.all_slices_empty)
        add_check(res, "all discriminant slices empty", res.n_empty == res.slices.size(),
                  std::to_string(res.n_empty) + " of " + std::to_string(res.slices.size()));
    if (exp.regular_part_empty)
        add_check(res, "regular part of D empty", res.decomposition.regular_points.empty(),
                  std::to_string(res.decomposition.regular_points.size()) + " points");
    if (exp.singular_circles >= 0)
        add_check(res, "singular circle count",
                  res.decomposition.singular_circles.size() ==
                      static_cast<std::size_t>(exp.singular_circles),
                  std::to_string(res.decomposition.singular_circles.size()) + " found");
    if (exp.circle && res.decomposition.singular_circles.size() == 1) {
        const PseudoCircleSpec& got = res.decomposition.singular_circles.front();
        const bool ok = euclidean_distance(got.center, exp.circle->center) <= 1e-9 &&
                        std::fabs(got.radius - exp.circle->radius) <= 1e-9 &&
                        got.sigma == exp.circle->sigma;
        add_check(res, "singular circle identity", ok,
                  "center (" + pipeline_detail::fmt(got.center.x1) + ", " +
                      pipeline_detail::fmt(got.center.x2) + "), r = " +
                      pipeline_detail::fmt(got.radius));
    }
    return res;
}

inline std::string format_report(const RunResult& res) {
    using pipeline_detail::fmt;
    const PseudoCircleFamily& fam = *res.family;
    std::ostringstream out;
    out << "family " << res.config.name << ": a = (" << res.config.ax << ", " << res.config.ay
        << "), r = " << res.config.r << ", sigma = " << (fam.sigma > 0 ? "+1" : "-1") << "\n";
    out << "  grid: n = " << fam.size() << " on (" << fam.frame.grid.t_min << ", "
        << fam.frame.grid.t_max << ")\n";
    out << "  frontal: " << (fam.frame.eps_nu < 0 ? "spacelike" : "timelike")
        << " (eps_nu = " << fam.frame.eps_nu << ", eps_mu = " << fam.frame.eps_mu
        << "), case sign " << (fam.case_sign > 0 ? "+1" : "-1") << "\n";

    if (res.creative) {
        out << "  creative: yes";
        if (res.creative->underdetermined_count > 0)
            out << " (" << res.creative->underdetermined_count
                << " underdetermined samples, theta interpolated)";
        out << "\n";
    } else if (res.not_creative) {
        out << "  creative: no -- witness at t = " << res.not_creative->t << ": "
            << res.not_creative->reason << "\n";
    }

    out << "  classification: " << to_string(res.classification.kind) << " ["
        << res.classification.evidence << "]\n";

    out << "  envelopes: " << res.branches.size() << " branch(es)\n";
    for (std::size_t i = 0; i < res.branches.size(); ++i) {
        const EnvelopeVerifyReport& v = res.branch_verify[i];
        out << "    [" << res.branches[i].branch_id << "] " << res.branches[i].descriptor
            << ": membership " << fmt(v.max_membership_residual) << ", tangency "
            << fmt(v.max_tangency_residual) << (v.pass ? "  (pass)" : "  (FAIL)") << "\n";
    }
    for (std::size_t i = 0; i < res.witnesses.size(); ++i) {
        const EnvelopeVerifyReport& v = res.witness_verify[i];
        out << "    witness " << i << " (" << res.witnesses[i].descriptor << "): membership "
            << fmt(v.max_membership_residual) << ", tangency " << fmt(v.max_tangency_residual)
            << (v.pass ? "  (pass)" : "  (FAIL)") << "\n";
    }

    out << "  discriminant slices: " << res.n_two << " two-point, " << res.n_one
        << " one-point, " << res.n_empty << " empty, " << res.n_whole << " whole-circle\n";
    out << "  D decomposition: " << res.decomposition.regular_points.size()
        << " regular points, " << res.decomposition.singular_circles.size()
        << " singular circle(s)";
    for (std::size_t i = 0; i < res.decomposition.singular_circles.size(); ++i) {
        const PseudoCircleSpec& c = res.decomposition.singular_circles[i];
        out << (i == 0 ? ": " : ", ") << "center (" << c.center.x1 << ", " << c.center.x2
            << "), r = " << c.radius;
    }
    out << "\n";
    if (res.d_vs_envelopes) {
        out << "  compare |D_regular vs E2|: sup " << fmt(res.d_vs_envelopes->sup_AtoB) << " / "
            << fmt(res.d_vs_envelopes->sup_BtoA) << ", hausdorff "
            << fmt(res.d_vs_envelopes->hausdorff) << " (bound " << fmt(res.hausdorff_bound)
            << ")\n";
    }

    out << "  checks:\n";
    for (const Check& c : res.checks)
        out << "    [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << " -- " << c.detail
            << "\n";
    return out.str();
}

}  // namespace minkenv
