#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace keyopt::svg {

/// Minimal SVG builder. Numbers are printed with fixed precision so the
/// same drawing always produces the same bytes.
class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke, double stroke_width = 1.0, double fill_opacity = 1.0);
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double stroke_width = 1.0, double opacity = 1.0);
  void circle(double cx, double cy, double r, std::string_view fill, double opacity = 1.0);
  /// anchor: "start", "middle" or "end".
  void text(double x, double y, std::string_view content, double size = 10.0,
            std::string_view anchor = "middle", std::string_view fill = "#333333");
  void comment(std::string_view content);

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string escape(std::string_view text);
std::string num(double value);

struct Series {
  std::vector<std::pair<double, double>> points;
  /// slope, intercept of a line to overlay.
  std::optional<std::pair<double, double>> fit;
};

std::string scatter_plot(std::string_view title, std::string_view x_label,
                         std::string_view y_label, const Series& series);
std::string histogram(std::string_view title, std::string_view x_label,
                      const std::vector<double>& values, int bins = 12);

}  // namespace keyopt::svg
