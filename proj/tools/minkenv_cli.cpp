// Command-line front end: built-in fixtures, config-driven runs, E1/E2/D
// comparison and SVG rendering.

#include "minkenv/emit.hpp"
#include "minkenv/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

namespace {

struct GlobalFlags {
    std::size_t samples = 0;  // 0: keep the family's own resolution
    std::string out_dir;
    bool csv = false;
    bool svg = false;
    double tol = 1.0;
};

minkenv::PipelineOptions make_options(const GlobalFlags& g) {
    minkenv::PipelineOptions opt;
    if (g.samples > 0) opt.n_override = g.samples;
    opt.tol_scale = g.tol;
    return opt;
}

int finish_run(const minkenv::RunResult& res, const GlobalFlags& g) {
    std::cout << minkenv::format_report(res);
    const bool want_csv = g.csv || res.config.csv;
    const bool want_svg = g.svg || res.config.svg;
    if (want_csv || want_svg) {
        std::string dir = !g.out_dir.empty() ? g.out_dir : res.config.out_dir;
        if (dir.empty()) dir = ".";
        std::filesystem::create_directories(dir);
        for (const std::string& path : minkenv::emit_outputs(res, want_csv, want_svg, dir))
            std::cout << "  wrote " << path << "\n";
    }
    if (!res.all_pass()) {
        for (const minkenv::Check& c : res.checks)
            if (!c.pass) {
                std::cout << "first failing check: " << c.name << " (" << c.detail << ")\n";
                break;
            }
        return 1;
    }
    return 0;
}

// E1/E2/D distance summary at a handful of regular parameters.
int run_compare(const minkenv::FamilyConfig& cfg, const GlobalFlags& g) {
    using namespace minkenv;
    const RunResult res = run_family(cfg, make_options(g));
    const PseudoCircleFamily& fam = *res.family;

    std::cout << "family " << cfg.name << ": classification "
              << to_string(res.classification.kind) << "\n";
    const std::vector<MVec2> pool = res.envelope_point_pool();
    if (!pool.empty() && !res.decomposition.regular_points.empty()) {
        const SetComparison c = compare_sets(res.decomposition.regular_points, pool);
        std::cout << "  D_regular -> E2 sup: " << c.sup_AtoB << "\n"
                  << "  E2 -> D_regular sup: " << c.sup_BtoA << "\n"
                  << "  hausdorff:           " << c.hausdorff << " (grid bound "
                  << res.hausdorff_bound << ")\n";
    } else {
        std::cout << "  set comparison skipped (empty envelope set or empty regular part)\n";
    }

    if (!res.branches.empty()) {
        const double eps0 = 1e-3;
        std::cout << "  E1 limit vs E2 at sample parameters (eps0 = " << eps0 << "):\n";
        std::mt19937 rng(20240901);
        const std::size_t n = fam.size();
        std::uniform_int_distribution<std::size_t> pick(n / 10, n - 1 - n / 10);
        int shown = 0;
        for (int tries = 0; tries < 200 && shown < 5; ++tries) {
            const std::size_t i = pick(rng);
            if (std::fabs(fam.frame.beta[i]) < 1e-3) continue;
            const double t0 = fam.frame.grid.t[i];
            try {
                const E1Limit lim = e1_limit(fam, t0, eps0);
                double worst = 0.0;
                for (const E1LimitPoint& lp : lim.points) {
                    double best = std::numeric_limits<double>::infinity();
                    for (const EnvelopeCurve& b : res.branches)
                        best = std::min(best, euclidean_distance(lp.point, b.points[i]));
                    worst = std::max(worst, best);
                }
                std::printf("    t0 = %+.4f: %zu point(s), max |E1 - E2| = %.3e, min rate %.2f\n",
                            t0, lim.points.size(), worst,
                            lim.points.empty() ? 0.0
                                               : std::min_element(lim.points.begin(),
                                                                  lim.points.end(),
                                                                  [](const auto& a, const auto& b) {
                                                                      return a.rate < b.rate;
                                                                  })
                                                     ->rate);
                ++shown;
            } catch (const std::exception&) {
                continue;  // WholeCircle/degenerate parameter: try another
            }
        }
        if (shown == 0) std::cout << "    no regular parameters available\n";
    }
    return res.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Envelopes of pseudo-circle families in the Minkowski plane"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalFlags g;
    app.add_option("--samples", g.samples, "Override the sample count");
    app.add_option("--out-dir", g.out_dir, "Directory for CSV/SVG artifacts");
    app.add_flag("--csv", g.csv, "Write per-object CSV");
    app.add_flag("--svg", g.svg, "Write an SVG rendering");
    app.add_option("--tol", g.tol, "Scale all pass/fail tolerances uniformly")
        ->check(CLI::PositiveNumber);

    int example_n = 1;
    CLI::App* ex = app.add_subcommand("example", "Run a built-in fixture (1..5)");
    ex->add_option("n", example_n, "Example number")->required()->check(CLI::Range(1, 5));

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "Run a family from a config file");
    run->add_option("config", config_path, "Config file")->required();

    std::string compare_path;
    CLI::App* cmp = app.add_subcommand("compare", "E1/E2/D distances for a config file");
    cmp->add_option("config", compare_path, "Config file")->required();

    std::string render_path;
    CLI::App* ren = app.add_subcommand("render", "Render a config file to SVG");
    ren->add_option("config", render_path, "Config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ex->parsed()) return finish_run(minkenv::run_example(example_n, make_options(g)), g);
        if (run->parsed())
            return finish_run(minkenv::run_family(minkenv::load_config_file(config_path),
                                                  make_options(g)),
                              g);
        if (cmp->parsed()) return run_compare(minkenv::load_config_file(compare_path), g);
        if (ren->parsed()) {
            GlobalFlags gr = g;
            gr.svg = true;
            gr.csv = false;
            minkenv::RunResult res =
                minkenv::run_family(minkenv::load_config_file(render_path), make_options(gr));
            return finish_run(res, gr);
        }
    } catch (const minkenv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const minkenv::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
