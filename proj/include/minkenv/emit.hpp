#pragma once

// CSV and SVG emission of a pipeline run. CSV carries one row per sample
// per object (center | envelope | discriminant | circle) with doubles at 17
// significant digits; two runs of the same command produce byte-identical
// files. The SVG is a fixed 800x800 viewport with the data bounding box
// fitted affinely plus a 5% margin, y flipped to screen coordinates;
// singular-point circles are dashed.

#include "minkenv/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minkenv {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace emit_detail {

inline std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void csv_row(std::ostream& out, const char* type, int branch, double t, const MVec2& p) {
    out << type << ',' << branch << ',' << num17(t) << ',' << num17(p.x1) << ',' << num17(p.x2)
        << '\n';
}

}  // namespace emit_detail

inline std::string render_csv(const RunResult& res) {
    using emit_detail::csv_row;
    const PseudoCircleFamily& fam = *res.family;
    std::ostringstream out;
    out << "object_type,branch_id,t,x,y\n";
    for (std::size_t i = 0; i < fam.size(); ++i)
        csv_row(out, "center", 0, fam.frame.grid.t[i], fam.frame.a[i]);
    int branch = 0;
    for (const EnvelopeCurve& b : res.branches) {
        for (std::size_t i = 0; i < fam.size(); ++i)
            csv_row(out, "envelope", branch, fam.frame.grid.t[i], b.points[i]);
        ++branch;
    }
    for (const EnvelopeCurve& w : res.witnesses) {
        for (std::size_t i = 0; i < fam.size(); ++i)
            csv_row(out, "envelope", branch, fam.frame.grid.t[i], w.points[i]);
        ++branch;
    }
    for (const DiscriminantSlice& s : res.slices) {
        int k = 0;
        for (const MVec2& p : s.points) csv_row(out, "discriminant", k++, s.t, p);
    }
    for (std::size_t c = 0; c < res.decomposition.singular_circles.size(); ++c) {
        const PseudoCircleSpec& spec = res.decomposition.singular_circles[c];
        const double t = res.decomposition.singular_t[c];
        for (const auto& arm : discriminant_detail::sample_circle(spec.center, spec.radius,
                                                                  spec.sigma))
            for (const MVec2& p : arm) csv_row(out, "circle", static_cast<int>(c), t, p);
    }
    return out.str();
}

namespace emit_detail {

struct Bbox {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    void add(const MVec2& p) {
        xmin = std::min(xmin, p.x1);
        xmax = std::max(xmax, p.x1);
        ymin = std::min(ymin, p.x2);
        ymax = std::max(ymax, p.x2);
    }
    bool valid() const { return xmin <= xmax && ymin <= ymax; }
};

struct Mapper {
    double sx = 1, sy = 1, ox = 0, oy = 0;
    double px(const MVec2& p) const { return ox + sx * p.x1; }
    double py(const MVec2& p) const { return oy - sy * p.x2; }  // y flipped
};

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline void polyline(std::ostream& out, const Mapper& m, const std::vector<MVec2>& pts,
                     const std::string& style) {
    if (pts.size() < 2) return;
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (const MVec2& p : pts) out << fmt_coord(m.px(p)) << ',' << fmt_coord(m.py(p)) << ' ';
    out << "\"/>\n";
}

}  // namespace emit_detail

inline std::string render_svg(const RunResult& res) {
    using namespace emit_detail;
    const PseudoCircleFamily& fam = *res.family;
    const std::size_t n = fam.size();

    // Family circles, subsampled: every k-th slice.
    const std::size_t k = std::max<std::size_t>(1, n / 20);
    std::vector<std::vector<MVec2>> family_arcs;
    for (std::size_t i = 0; i < n; i += k)
        for (auto& arm :
             discriminant_detail::sample_circle(fam.frame.a[i], fam.r[i], fam.sigma, 64, 1.6))
            family_arcs.push_back(std::move(arm));

    std::vector<std::vector<MVec2>> dashed_circles;
    for (const PseudoCircleSpec& c : res.decomposition.singular_circles)
        for (auto& arm : discriminant_detail::sample_circle(c.center, c.radius, c.sigma, 96, 1.8))
            dashed_circles.push_back(std::move(arm));

    Bbox box;
    for (const auto& arc : family_arcs)
        for (const MVec2& p : arc) box.add(p);
    for (const auto& arc : dashed_circles)
        for (const MVec2& p : arc) box.add(p);
    for (const MVec2& p : fam.frame.a) box.add(p);
    for (const EnvelopeCurve& b : res.branches)
        for (const MVec2& p : b.points) box.add(p);
    for (const EnvelopeCurve& w : res.witnesses)
        for (const MVec2& p : w.points) box.add(p);
    for (const MVec2& p : res.decomposition.regular_points) box.add(p);
    if (!box.valid()) box = Bbox{-1, 1, -1, 1};

    const double W = 800.0, H = 800.0, margin = 0.05;
    const double dx = std::max(box.xmax - box.xmin, 1e-9);
    const double dy = std::max(box.ymax - box.ymin, 1e-9);
    const double scale = std::min(W * (1 - 2 * margin) / dx, H * (1 - 2 * margin) / dy);
    Mapper m;
    m.sx = m.sy = scale;
    m.ox = W / 2 - scale * (box.xmin + box.xmax) / 2;
    m.oy = H / 2 + scale * (box.ymin + box.ymax) / 2;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 800 800\">\n";
    out << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";

    for (const auto& arc : family_arcs)
        polyline(out, m, arc, "stroke=\"#c8c8c8\" stroke-width=\"0.6\"");
    polyline(out, m, fam.frame.a, "stroke=\"#202020\" stroke-width=\"1.6\"");

    static const char* branch_colors[] = {"#c82020", "#2040c8", "#20a040", "#a040a0"};
    int ci = 0;
    for (const EnvelopeCurve& b : res.branches) {
        polyline(out, m, b.points,
                 std::string("stroke=\"") + branch_colors[ci % 4] + "\" stroke-width=\"1.8\"");
        ++ci;
    }
    for (const EnvelopeCurve& w : res.witnesses) {
        polyline(out, m, w.points,
                 std::string("stroke=\"") + branch_colors[ci % 4] +
                     "\" stroke-width=\"1.2\" stroke-opacity=\"0.8\"");
        ++ci;
    }

    for (const MVec2& p : res.decomposition.regular_points)
        out << "<circle cx=\"" << fmt_coord(m.px(p)) << "\" cy=\"" << fmt_coord(m.py(p))
            << "\" r=\"1.1\" fill=\"#e08020\" fill-opacity=\"0.6\"/>\n";

    for (const auto& arc : dashed_circles)
        polyline(out, m, arc,
                 "stroke=\"#606060\" stroke-width=\"1.4\" stroke-dasharray=\"6 4\"");

    out << "</svg>\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// Writes the flagged artifacts; returns the paths written.
inline std::vector<std::string> emit_outputs(const RunResult& res, bool csv, bool svg,
                                             const std::string& out_dir) {
    std::vector<std::string> written;
    const std::string stem = out_dir.empty() ? res.config.name : out_dir + "/" + res.config.name;
    if (csv) {
        write_file(stem + ".csv", render_csv(res));
        written.push_back(stem + ".csv");
    }
    if (svg) {
        write_file(stem + ".svg", render_svg(res));
        written.push_back(stem + ".svg");
    }
    return written;
}

}  // namespace minkenv
