#include "keyopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace keyopt::svg {

std::string num(double value) {
  if (std::abs(value) < 0.005) value = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill,
                    std::string_view stroke, double stroke_width, double fill_opacity) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" rx=\"3.00\" fill=\"" + std::string(fill) +
           "\" fill-opacity=\"" + num(fill_opacity) + "\" stroke=\"" + std::string(stroke) +
           "\" stroke-width=\"" + num(stroke_width) + "\"/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke,
                    double stroke_width, double opacity) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" +
           num(stroke_width) + "\" stroke-opacity=\"" + num(opacity) +
           "\" stroke-linecap=\"round\"/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view fill, double opacity) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + std::string(fill) + "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, double size,
                    std::string_view anchor, std::string_view fill) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           num(size) + "\" text-anchor=\"" + std::string(anchor) + "\" fill=\"" +
           std::string(fill) + "\">" + escape(content) + "</text>\n";
}

void Document::comment(std::string_view content) {
  body_ += "<!-- " + std::string(content) + " -->\n";
}

std::string Document::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" fill=\"#ffffff\"/>\n" + body_ + "</svg>\n";
}

namespace {

constexpr double kPlotW = 480;
constexpr double kPlotH = 360;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 55;

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo) * 0.1);
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

struct Frame {
  Range x;
  Range y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kPlotW - kLeft - kRight); }
  double py(double v) const {
    return kPlotH - kBottom - (v - y.lo) / (y.hi - y.lo) * (kPlotH - kTop - kBottom);
  }
};

void draw_axes(Document& doc, const Frame& f, std::string_view title, std::string_view x_label,
               std::string_view y_label) {
  doc.text(kPlotW / 2, 22, title, 14);
  const double x0 = kLeft;
  const double x1 = kPlotW - kRight;
  const double y0 = kPlotH - kBottom;
  const double y1 = kTop;
  doc.line(x0, y0, x1, y0, "#333333");
  doc.line(x0, y0, x0, y1, "#333333");
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
    const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    doc.line(f.px(xv), y0, f.px(xv), y0 + 5, "#333333");
    doc.text(f.px(xv), y0 + 18, num(xv), 10);
    doc.line(x0 - 5, f.py(yv), x0, f.py(yv), "#333333");
    doc.text(x0 - 8, f.py(yv) + 3, num(yv), 10, "end");
  }
  doc.text((x0 + x1) / 2, kPlotH - 12, x_label, 12);
  doc.text(14, (y0 + y1) / 2, y_label, 12, "start");
}

}  // namespace

std::string scatter_plot(std::string_view title, std::string_view x_label,
                         std::string_view y_label, const Series& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!series.points.empty()) {
    xmin = xmax = series.points.front().first;
    ymin = ymax = series.points.front().second;
    for (const auto& [x, y] : series.points) {
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  }
  const Frame f{padded(xmin, xmax), padded(ymin, ymax)};
  Document doc(kPlotW, kPlotH);
  draw_axes(doc, f, title, x_label, y_label);
  if (series.fit) {
    const auto [m, c] = *series.fit;
    doc.line(f.px(f.x.lo), f.py(m * f.x.lo + c), f.px(f.x.hi), f.py(m * f.x.hi + c), "#1f4e9c",
             1.5);
  }
  for (const auto& [x, y] : series.points) doc.circle(f.px(x), f.py(y), 3, "#c0392b", 0.8);
  return doc.str();
}

std::string histogram(std::string_view title, std::string_view x_label,
                      const std::vector<double>& values, int bins) {
  double lo = 0, hi = 1;
  if (!values.empty()) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
  }
  const Range xr = padded(lo, hi);
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto b = static_cast<int>((v - xr.lo) / (xr.hi - xr.lo) * bins);
    counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
  }
  const int peak = counts.empty() ? 1 : std::max(1, *std::max_element(counts.begin(), counts.end()));
  const Frame f{xr, {0.0, static_cast<double>(peak)}};
  Document doc(kPlotW, kPlotH);
  draw_axes(doc, f, title, x_label, "users");
  const double width = (xr.hi - xr.lo) / bins;
  for (int b = 0; b < bins; ++b) {
    if (counts[b] == 0) continue;
    const double x0 = f.px(xr.lo + b * width);
    const double x1 = f.px(xr.lo + (b + 1) * width);
    const double top = f.py(counts[b]);
    doc.rect(x0, top, x1 - x0, f.py(0) - top, "#7f8fa6", "#2f3640", 1.0);
  }
  return doc.str();
}

}  // namespace keyopt::svg
