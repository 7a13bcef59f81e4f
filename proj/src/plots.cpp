#include "laprep/plots.hpp"

#include "laprep/dense.hpp"
#include "laprep/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace laprep::bench {

namespace {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;     // mean
    std::vector<double> y_lo;  // band
    std::vector<double> y_hi;
    bool band = true;
};

struct Aggregate {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

std::map<double, Aggregate> aggregate_by(const std::vector<double>& keys,
                                         const std::vector<double>& values) {
    std::map<double, std::vector<double>> groups;
    for (std::size_t i = 0; i < keys.size(); ++i) groups[keys[i]].push_back(values[i]);
    std::map<double, Aggregate> out;
    for (auto& [key, vals] : groups) {
        Aggregate a;
        a.lo = *std::min_element(vals.begin(), vals.end());
        a.hi = *std::max_element(vals.begin(), vals.end());
        for (double v : vals) a.mean += v;
        a.mean /= static_cast<double>(vals.size());
        out[key] = a;
    }
    return out;
}

Series to_series(const std::map<double, Aggregate>& agg, std::string label, std::string color) {
    Series s;
    s.label = std::move(label);
    s.color = std::move(color);
    for (const auto& [x, a] : agg) {
        s.x.push_back(x);
        s.y.push_back(a.mean);
        s.y_lo.push_back(a.lo);
        s.y_hi.push_back(a.hi);
    }
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    std::vector<Series> series, bool log_y) {
    const double width = 640.0, height = 440.0;
    const double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    // Clamp non-positive values before a log transform.
    if (log_y) {
        double min_pos = 1e300;
        for (const Series& s : series)
            for (double v : s.y_lo)
                if (v > 0.0) min_pos = std::min(min_pos, v);
        if (min_pos == 1e300) min_pos = 1e-12;
        const double floor_v = min_pos * 0.5;
        for (Series& s : series)
            for (auto* vec : {&s.y, &s.y_lo, &s.y_hi})
                for (double& v : *vec) v = std::log10(std::max(v, floor_v));
    }

    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const Series& s : series) {
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y_lo) y_min = std::min(y_min, v);
        for (double v : s.y_hi) y_max = std::max(y_max, v);
    }
    if (x_min > x_max) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (x_min == x_max) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_min == y_max) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto sx = [&](double v) { return left + (v - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double v) { return top + (y_max - v) / (y_max - y_min) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";

    // Axes, ticks and grid.
    svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        const double fx = x_min + (x_max - x_min) * t / ticks;
        const double fy = y_min + (y_max - y_min) * t / ticks;
        svg << "<line x1=\"" << sx(fx) << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx(fx)
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << sx(fx) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fx)
            << "</text>\n";
        const std::string y_text = log_y ? ("1e" + fmt(fy)) : fmt(fy);
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << left
            << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << left << "\" y1=\"" << sy(fy) << "\" x2=\"" << left + plot_w
            << "\" y2=\"" << sy(fy) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << y_text
            << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">" << y_label << "</text>\n";

    double legend_y = top + 8.0;
    for (const Series& s : series) {
        if (s.band && s.x.size() > 1) {
            svg << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
                << "points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << sx(s.x[i]) << "," << sy(s.y_hi[i]) << " ";
            for (std::size_t i = s.x.size(); i-- > 0;)
                svg << sx(s.x[i]) << "," << sy(s.y_lo[i]) << " ";
            svg << "\"/>\n";
        }
        if (s.x.size() == 1) {
            svg << "<circle cx=\"" << sx(s.x[0]) << "\" cy=\"" << sy(s.y[0])
                << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
        } else {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" "
                << "points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
            svg << "\"/>\n";
        }
        svg << "<rect x=\"" << left + plot_w - 150 << "\" y=\"" << legend_y - 9
            << "\" width=\"18\" height=\"4\" fill=\"" << s.color << "\"/>\n";
        svg << "<text x=\"" << left + plot_w - 126 << "\" y=\"" << legend_y
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        legend_y += 16.0;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("render_plots: cannot open " + path);
    out << svg.str();
    if (!out) throw IoError("render_plots: write failed for " + path);
}

}  // namespace

void render_plots(const std::string& csv_path, const std::string& out_dir) {
    const SweepResult data = read_csv(csv_path);
    if (data.records.empty()) throw SchemaError("render_plots: CSV holds no records");
    std::filesystem::create_directories(out_dir);
    const std::string dir = out_dir + "/";

    std::vector<double> w, k, lambda2, err_exact, err_gdo;
    for (const SweepRecord& r : data.records) {
        w.push_back(static_cast<double>(r.w));
        k.push_back(static_cast<double>(r.k));
        lambda2.push_back(r.lambda2);
        err_exact.push_back(r.err_exact);
        err_gdo.push_back(r.err_gdo);
    }

    write_svg_plot(dir + "err-vs-walls.svg", "Value-approximation error vs walls", "walls w",
                   "error (Phi norm)",
                   {to_series(aggregate_by(w, err_exact), "exact basis", "#1f77b4"),
                    to_series(aggregate_by(w, err_gdo), "GDO basis", "#d62728")},
                   false);
    write_svg_plot(dir + "lambda2-vs-walls.svg", "Algebraic connectivity vs walls", "walls w",
                   "lambda_2",
                   {to_series(aggregate_by(w, lambda2), "lambda_2", "#2ca02c")}, true);
    write_svg_plot(dir + "err-vs-k.svg", "Error vs number of eigenvectors", "k",
                   "error (Phi norm)",
                   {to_series(aggregate_by(k, err_exact), "exact basis", "#1f77b4"),
                    to_series(aggregate_by(k, err_gdo), "GDO basis", "#d62728")},
                   true);

    // Per-w means on both axes for the lambda_2 scatter trends.
    const auto agg_l2 = aggregate_by(w, lambda2);
    const auto agg_gdo = aggregate_by(w, err_gdo);
    const auto agg_exact = aggregate_by(w, err_exact);
    Series gdo_vs_l2{"GDO basis", "#d62728", {}, {}, {}, {}, false};
    Series exact_vs_l2{"exact basis", "#1f77b4", {}, {}, {}, {}, false};
    for (const auto& [key, a] : agg_l2) {
        gdo_vs_l2.x.push_back(a.mean);
        gdo_vs_l2.y.push_back(agg_gdo.at(key).mean);
        exact_vs_l2.x.push_back(a.mean);
        exact_vs_l2.y.push_back(agg_exact.at(key).mean);
    }
    auto sort_series = [](Series& s) {
        std::vector<std::size_t> order(s.x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
        Series sorted = s;
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted.x[i] = s.x[order[i]];
            sorted.y[i] = s.y[order[i]];
        }
        sorted.y_lo = sorted.y;
        sorted.y_hi = sorted.y;
        s = sorted;
    };
    sort_series(gdo_vs_l2);
    sort_series(exact_vs_l2);
    write_svg_plot(dir + "err-gdo-vs-lambda2.svg", "GDO error vs connectivity", "lambda_2",
                   "error (Phi norm)", {gdo_vs_l2}, false);
    write_svg_plot(dir + "err-exact-vs-lambda2.svg", "Exact-basis error vs connectivity",
                   "lambda_2", "error (Phi norm)", {exact_vs_l2}, false);
}

}  // namespace laprep::bench
