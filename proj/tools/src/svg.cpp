#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace nodeid::cli {

namespace {

constexpr double kPanelW = 360, kPanelH = 300;
constexpr double kLeft = 56, kRight = 16, kTop = 40, kBottom = 48;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::round(x * 1000) / 1000);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

void draw_panel(std::ostream& out, const Panel& panel, double x0) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : panel.series)
        for (auto [x, y] : s.points) {
            if (!any) xmin = xmax = x;
            any = true;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
    auto sx = [&](double x) { return x0 + kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

    out << "<g>\n";
    out << "<text x=\"" << num(x0 + kPanelW / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"13\">"
        << escape(panel.title) << "</text>\n";
    out << "<rect x=\"" << num(x0 + kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
        out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 16)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv) << "</text>\n";
        out << "<text x=\"" << num(x0 + kLeft - 6) << "\" y=\"" << num(sy(yv) + 3)
            << "\" text-anchor=\"end\" font-size=\"10\">" << tick(yv) << "</text>\n";
        out << "<line x1=\"" << num(x0 + kLeft) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << num(x0 + kLeft + pw)
            << "\" y2=\"" << num(sy(yv)) << "\" stroke=\"#ddd\"/>\n";
    }
    out << "<text x=\"" << num(x0 + kLeft + pw / 2) << "\" y=\"" << num(kPanelH - 12)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(panel.x_label) << "</text>\n";
    out << "<text x=\"" << num(x0 + 14) << "\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" "
        << "font-size=\"11\" transform=\"rotate(-90 " << num(x0 + 14) << ' ' << num(kTop + ph / 2) << ")\">"
        << escape(panel.y_label) << "</text>\n";

    int row = 0;
    for (const auto& s : panel.series) {
        if (s.points.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) out << " stroke-dasharray=\"5,3\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i)
            out << (i ? " " : "") << num(sx(s.points[i].first)) << ',' << num(sy(s.points[i].second));
        out << "\"/>\n";
        const double ly = kTop + 12 + 13 * row++;
        out << "<line x1=\"" << num(x0 + kLeft + pw - 96) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
            << num(x0 + kLeft + pw - 80) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\"";
        if (s.dashed) out << " stroke-dasharray=\"5,3\"";
        out << "/>\n<text x=\"" << num(x0 + kLeft + pw - 76) << "\" y=\"" << num(ly)
            << "\" font-size=\"10\">" << escape(s.label) << "</text>\n";
    }
    out << "</g>\n";
}

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[i % 6];
}

}  // namespace

void write_line_panels(std::ostream& out, const std::string& title, std::span<const Panel> panels) {
    const double width = kPanelW * static_cast<double>(std::max<std::size_t>(1, panels.size()));
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(kPanelH + 20) << "\" font-family=\"sans-serif\">\n";
    out << "<title>" << escape(title) << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g transform=\"translate(0,20)\">\n";
    for (std::size_t i = 0; i < panels.size(); ++i) draw_panel(out, panels[i], kPanelW * double(i));
    out << "</g>\n</svg>\n";
}

void write_separation_svg(std::ostream& out, std::span<const SeparationRecord> records) {
    // Series keyed by (method, n) in first-seen order.
    std::vector<std::pair<std::string, std::size_t>> keys;
    std::vector<std::size_t> ns;
    for (const auto& rec : records) {
        const auto key = std::make_pair(rec.method, rec.n);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        if (std::find(ns.begin(), ns.end(), rec.n) == ns.end()) ns.push_back(rec.n);
    }
    auto color_of = [&](std::size_t n) {
        return palette(static_cast<std::size_t>(std::find(ns.begin(), ns.end(), n) - ns.begin()));
    };

    Panel acc{"(a) top-1 accuracy", "k", "accuracy", {}};
    Panel scaled{"(b) rescaled", "k / log2 n", "accuracy", {}};
    Panel buckets{"(c) bucket diagnostics", "k", "probability", {}};
    for (const auto& [method, n] : keys) {
        const std::string label = method + " n=" + std::to_string(n);
        Series a{label, color_of(n), method != "WL", {}};
        Series b = a;
        for (const auto& rec : records) {
            if (rec.method != method || rec.n != n) continue;
            a.points.emplace_back(double(rec.k), rec.accuracy);
            b.points.emplace_back(double(rec.k) / std::log2(double(n)), rec.accuracy);
        }
        acc.series.push_back(std::move(a));
        scaled.series.push_back(std::move(b));
    }
    for (std::size_t n : ns) {
        Series inv{"E[1/|B|] n=" + std::to_string(n), color_of(n), false, {}};
        Series single{"Pr(single) n=" + std::to_string(n), color_of(n), true, {}};
        for (const auto& rec : records) {
            if (rec.method != "WL" || rec.n != n) continue;
            inv.points.emplace_back(double(rec.k), rec.exp_inv_bucket);
            single.points.emplace_back(double(rec.k), rec.singleton_prob);
        }
        buckets.series.push_back(std::move(inv));
        buckets.series.push_back(std::move(single));
    }
    const Panel panels[] = {acc, scaled, buckets};
    write_line_panels(out, "Sample-complexity separation", panels);
}

}  // namespace nodeid::cli
