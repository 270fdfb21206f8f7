#include "eigenmarket/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace eigenmarket::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    if (std::abs(v) < 1e-12) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

class Canvas {
public:
    Canvas(const Axes& axes, Range x, Range y) : axes_(axes), x_(x), y_(y) {
        x_.settle();
        y_.settle();
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
            << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
        os_ << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
            << "\" style=\"fill:#ffffff\"/>\n";
    }

    double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }
    const Range& xr() const { return x_; }
    const Range& yr() const { return y_; }

    void rect(double x0, double y0, double x1, double y1, const std::string& color, double opacity) {
        const double left = std::min(px(x0), px(x1));
        const double top = std::min(py(y0), py(y1));
        const double w = std::abs(px(x1) - px(x0));
        const double h = std::abs(py(y1) - py(y0));
        os_ << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
            << "\" style=\"fill:" << color << ";fill-opacity:" << num(opacity) << ";stroke:#333333;stroke-width:0.5\"/>\n";
    }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color,
                  const std::string& dash = "") {
        os_ << "<polyline style=\"fill:none;stroke:" << color << ";stroke-width:1.5";
        if (!dash.empty()) os_ << ";stroke-dasharray:" << dash;
        os_ << "\" points=\"";
        const std::size_t n = std::min(xs.size(), ys.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
            os_ << num(px(xs[i])) << ',' << num(py(ys[i])) << (i + 1 < n ? " " : "");
        }
        os_ << "\"/>\n";
    }

    void dots(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color) {
        const std::size_t n = std::min(xs.size(), ys.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
            os_ << "<circle cx=\"" << num(px(xs[i])) << "\" cy=\"" << num(py(ys[i])) << "\" r=\"1.5\" style=\"fill:"
                << color << ";fill-opacity:0.6\"/>\n";
        }
    }

    void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        double y = kTop + 14.0;
        for (const auto& [name, color] : entries) {
            if (name.empty()) continue;
            const double x = kWidth - kRight - 170.0;
            os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9.0) << "\" width=\"12\" height=\"10\" style=\"fill:"
                << color << "\"/>\n";
            text(x + 18.0, y, escape(name), "start", 12.0);
            y += 16.0;
        }
    }

    std::string finish() {
        const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
        os_ << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
            << num(y1 - y0) << "\" style=\"fill:none;stroke:#000000;stroke-width:1\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double xv = x_.lo + (x_.hi - x_.lo) * i / 5.0;
            const double yv = y_.lo + (y_.hi - y_.lo) * i / 5.0;
            line(px(xv), y1, px(xv), y1 + 5.0);
            text(px(xv), y1 + 18.0, tick(xv), "middle", 11.0);
            line(x0 - 5.0, py(yv), x0, py(yv));
            text(x0 - 8.0, py(yv) + 4.0, tick(yv), "end", 11.0);
        }
        text(kWidth / 2.0, 24.0, escape(axes_.title), "middle", 15.0);
        text((x0 + x1) / 2.0, kHeight - 14.0, escape(axes_.x_label), "middle", 13.0);
        os_ << "<text x=\"18\" y=\"" << num((y0 + y1) / 2.0) << "\" transform=\"rotate(-90 18 " << num((y0 + y1) / 2.0)
            << ")\" style=\"font-family:sans-serif;font-size:13px;text-anchor:middle\">" << escape(axes_.y_label)
            << "</text>\n";
        os_ << "</svg>\n";
        return os_.str();
    }

    void hline(double y, const std::string& color, const std::string& dash) {
        polyline({x_.lo, x_.hi}, {y, y}, color, dash);
    }

private:
    void line(double x0, double y0, double x1, double y1) {
        os_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
            << "\" style=\"stroke:#000000;stroke-width:1\"/>\n";
    }
    void text(double x, double y, const std::string& content, const char* anchor, double size) {
        os_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" style=\"font-family:sans-serif;font-size:" << num(size)
            << "px;text-anchor:" << anchor << "\">" << content << "</text>\n";
    }

    Axes axes_;
    Range x_;
    Range y_;
    std::ostringstream os_;
};

}  // namespace

std::string histogram_chart(const Axes& axes, const std::vector<BarHistogram>& bars, const std::vector<Series>& curves) {
    Range x, y;
    y.add(0.0);
    for (const auto& b : bars) {
        for (double e : b.histogram.edges) x.add(e);
        for (double d : b.histogram.densities) y.add(d * 1.05);
    }
    for (const auto& c : curves) {
        for (double v : c.x) x.add(v);
        for (double v : c.y) y.add(v * 1.05);
    }
    Canvas canvas(axes, x, y);
    std::vector<std::pair<std::string, std::string>> legend;
    const double opacity = bars.size() > 1 ? 0.45 : 0.8;
    for (const auto& b : bars) {
        const auto& h = b.histogram;
        for (std::size_t i = 0; i < h.bins(); ++i) {
            if (h.densities[i] > 0.0) canvas.rect(h.edges[i], 0.0, h.edges[i + 1], h.densities[i], b.color, opacity);
        }
        legend.emplace_back(b.name, b.color);
    }
    for (const auto& c : curves) {
        canvas.polyline(c.x, c.y, c.color);
        legend.emplace_back(c.name, c.color);
    }
    canvas.legend(legend);
    return canvas.finish();
}

std::string scatter_chart(const Axes& axes, const std::vector<Series>& points, const std::vector<Series>& lines) {
    Range x, y;
    for (const auto& s : points) {
        for (double v : s.x) x.add(v);
        for (double v : s.y) y.add(v);
    }
    Canvas canvas(axes, x, y);
    std::vector<std::pair<std::string, std::string>> legend;
    for (const auto& s : points) {
        canvas.dots(s.x, s.y, s.color);
        legend.emplace_back(s.name, s.color);
    }
    for (const auto& l : lines) {
        // Clip fit lines to the point cloud's vertical extent.
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < std::min(l.x.size(), l.y.size()); ++i) {
            lx.push_back(l.x[i]);
            ly.push_back(std::clamp(l.y[i], canvas.yr().lo, canvas.yr().hi));
        }
        canvas.polyline(lx, ly, l.color);
        legend.emplace_back(l.name, l.color);
    }
    canvas.legend(legend);
    return canvas.finish();
}

std::string line_chart(const Axes& axes, const std::vector<Series>& lines) {
    Range x, y;
    for (const auto& s : lines) {
        for (double v : s.x) x.add(v);
        for (double v : s.y) y.add(v);
    }
    Canvas canvas(axes, x, y);
    std::vector<std::pair<std::string, std::string>> legend;
    for (const auto& s : lines) {
        canvas.polyline(s.x, s.y, s.color);
        legend.emplace_back(s.name, s.color);
    }
    canvas.legend(legend);
    return canvas.finish();
}

std::string bar_chart(const Axes& axes, const std::vector<double>& values, double threshold) {
    Range x, y;
    x.add(0.5);
    x.add(static_cast<double>(values.size()) + 0.5);
    y.add(0.0);
    for (double v : values) y.add(v * 1.05);
    if (threshold > 0.0) {
        y.add(threshold * 1.1);
        y.add(-threshold * 1.1);
    }
    Canvas canvas(axes, x, y);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double c = static_cast<double>(i + 1);
        canvas.rect(c - 0.4, 0.0, c + 0.4, values[i], values[i] >= 0.0 ? "#1f77b4" : "#ff7f0e", 0.85);
    }
    if (threshold > 0.0) {
        canvas.hline(threshold, "#d62728", "4,3");
        canvas.hline(-threshold, "#d62728", "4,3");
    }
    return canvas.finish();
}

}  // namespace eigenmarket::svg
