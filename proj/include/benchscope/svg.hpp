#ifndef BENCHSCOPE_SVG_HPP
#define BENCHSCOPE_SVG_HPP

#include "benchscope/cluster.hpp"
#include "benchscope/stats.hpp"
#include "benchscope/text.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

// Static SVG output. Coordinates are printed with fixed precision so repeated
// renders of the same input are byte-identical.
namespace benchscope::svg {

inline std::string num(double v) { return text::format_fixed(v, 2); }

inline std::string escape(std::string_view s)
{
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

class Canvas {
public:
    Canvas(double width, double height) : width_(width), height_(height) {}

    void line(double x1, double y1, double x2, double y2, std::string_view stroke = "#333")
    {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
              << "\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
    }

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "#333")
    {
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
              << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
    }

    void label(double x, double y, std::string_view s, std::string_view anchor = "middle", double rotate = 0.0,
               int size = 10)
    {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\"";
        if (rotate != 0.0) {
            body_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
        }
        body_ << '>' << escape(s) << "</text>\n";
    }

    [[nodiscard]] std::string str() const
    {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
            << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

/// Classic dendrogram: leaves along the bottom, linkage height upwards.
inline std::string render_dendrogram(const Dendrogram& dg, std::string_view title = {})
{
    const std::size_t n = dg.leaf_count();
    const double spacing = 28.0;
    const double left = 60.0;
    const double top = 40.0;
    const double plot_h = 300.0;
    const double label_h = 150.0;
    const double width = left + spacing * static_cast<double>(n) + 20.0;
    const double height = top + plot_h + label_h;
    const double max_h = dg.root_height() > 0.0 ? dg.root_height() : 1.0;
    const auto y_of = [&](double h) { return top + plot_h - h / max_h * plot_h; };

    Canvas c(width, height);
    if (!title.empty()) {
        c.label(width / 2.0, 20.0, title, "middle", 0.0, 13);
    }
    c.line(left - 10.0, top, left - 10.0, top + plot_h);
    for (int t = 0; t <= 4; ++t) {
        const double h = max_h * t / 4.0;
        c.line(left - 14.0, y_of(h), left - 10.0, y_of(h));
        c.label(left - 16.0, y_of(h) + 3.0, text::format_fixed(h, 2), "end");
    }

    std::vector<double> x(n + dg.merges.size());
    std::vector<double> y(n + dg.merges.size(), top + plot_h);
    const auto order = dg.leaf_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
        x[order[i]] = left + spacing * (static_cast<double>(i) + 0.5);
        c.label(x[order[i]], top + plot_h + 8.0, dg.leaves[order[i]], "end", -60.0);
    }
    for (std::size_t i = 0; i < dg.merges.size(); ++i) {
        const auto& m = dg.merges[i];
        const double yh = y_of(m.height);
        c.line(x[m.left], y[m.left], x[m.left], yh);
        c.line(x[m.right], y[m.right], x[m.right], yh);
        c.line(x[m.left], yh, x[m.right], yh);
        x[n + i] = (x[m.left] + x[m.right]) / 2.0;
        y[n + i] = yh;
    }
    return c.str();
}

struct BoxSeries {
    std::string name;
    stats::Summary summary;
};

struct BoxPanel {
    std::string title;
    std::vector<BoxSeries> series;
};

/// Grid of box-and-whisker panels, one per metric, whiskers at min/max.
inline std::string render_boxplots(const std::vector<BoxPanel>& panels, std::string_view title = {})
{
    static constexpr std::string_view palette[] = {"#8fb8de", "#f4a582", "#a6d96a", "#d9b3ff", "#fee08b", "#bababa"};
    const std::size_t per_row = 4;
    const double pw = 200.0;
    const double ph = 190.0;
    const double top = 40.0;
    const std::size_t rows = (panels.size() + per_row - 1) / per_row;
    Canvas c(pw * static_cast<double>(per_row) + 20.0, top + ph * static_cast<double>(std::max<std::size_t>(rows, 1)));
    if (!title.empty()) {
        c.label(pw * static_cast<double>(per_row) / 2.0, 20.0, title, "middle", 0.0, 13);
    }
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double ox = 10.0 + pw * static_cast<double>(p % per_row);
        const double oy = top + ph * static_cast<double>(p / per_row);
        const double plot_top = oy + 24.0;
        const double plot_h = ph - 70.0;
        c.label(ox + pw / 2.0, oy + 14.0, panel.title, "middle", 0.0, 11);
        double lo = 0.0;
        double hi = 0.0;
        bool first = true;
        for (const auto& s : panel.series) {
            lo = first ? s.summary.min : std::min(lo, s.summary.min);
            hi = first ? s.summary.max : std::max(hi, s.summary.max);
            first = false;
        }
        if (hi <= lo) {
            hi = lo + 1.0;
        }
        const auto y_of = [&](double v) { return plot_top + plot_h - (v - lo) / (hi - lo) * plot_h; };
        c.line(ox + 40.0, plot_top, ox + 40.0, plot_top + plot_h);
        c.label(ox + 36.0, plot_top + 4.0, text::format_fixed(hi, 2), "end", 0.0, 8);
        c.label(ox + 36.0, plot_top + plot_h, text::format_fixed(lo, 2), "end", 0.0, 8);
        const double slot = (pw - 50.0) / static_cast<double>(std::max<std::size_t>(panel.series.size(), 1));
        for (std::size_t i = 0; i < panel.series.size(); ++i) {
            const auto& s = panel.series[i].summary;
            const double cx = ox + 45.0 + slot * (static_cast<double>(i) + 0.5);
            const double bw = std::min(24.0, slot * 0.6);
            c.line(cx, y_of(s.min), cx, y_of(s.q1));
            c.line(cx, y_of(s.q3), cx, y_of(s.max));
            c.line(cx - bw / 4.0, y_of(s.min), cx + bw / 4.0, y_of(s.min));
            c.line(cx - bw / 4.0, y_of(s.max), cx + bw / 4.0, y_of(s.max));
            c.rect(cx - bw / 2.0, y_of(s.q3), bw, std::max(0.0, y_of(s.q1) - y_of(s.q3)),
                palette[i % std::size(palette)]);
            c.line(cx - bw / 2.0, y_of(s.median), cx + bw / 2.0, y_of(s.median), "#000");
            c.label(cx, plot_top + plot_h + 10.0, panel.series[i].name, "end", -45.0, 8);
        }
    }
    return c.str();
}

} // namespace benchscope::svg

#endif
