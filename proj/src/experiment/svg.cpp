#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rssgp/experiment.hpp"

namespace rssgp {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#ff7f0e", "#9467bd", "#8c564b"};

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string escape(const std::string& text) {
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

}  // namespace

std::string render_regret_svg(const std::string& title, const std::vector<PlotSeries>& series) {
  std::size_t n = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const PlotSeries& s : series) {
    n = std::max(n, s.mean.size());
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      const double se = i < s.std_error.size() ? s.std_error[i] : 0.0;
      if (!std::isfinite(s.mean[i])) continue;
      lo = std::min(lo, s.mean[i] - se);
      hi = std::max(hi, s.mean[i] + se);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  lo = std::min(lo, 0.0);
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double x_max = std::max<double>(static_cast<double>(n), 2.0);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double it) { return kLeft + (it - 1.0) / (x_max - 1.0) * plot_w; };
  const auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double v = lo + (hi - lo) * k / 5.0;
    const double y = py(v);
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(y) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fixed(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">" << fixed(v) << "</text>\n";
    const double it = 1.0 + (x_max - 1.0) * k / 5.0;
    const double x = px(it);
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << fixed(x)
        << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(x) << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\">" << std::lround(it) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">mean simple regret</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& line = series[s];
    const char* color = kColors[s % kColors.size()];
    std::ostringstream upper, lower, mean;
    for (std::size_t i = 0; i < line.mean.size(); ++i) {
      const double se = i < line.std_error.size() ? line.std_error[i] : 0.0;
      const double x = px(static_cast<double>(i + 1));
      upper << fixed(x) << ',' << fixed(py(line.mean[i] + se)) << ' ';
      mean << fixed(x) << ',' << fixed(py(line.mean[i])) << ' ';
    }
    for (std::size_t i = line.mean.size(); i-- > 0;) {
      const double se = i < line.std_error.size() ? line.std_error[i] : 0.0;
      lower << fixed(px(static_cast<double>(i + 1))) << ',' << fixed(py(line.mean[i] - se)) << ' ';
    }
    svg << "<polygon points=\"" << upper.str() << lower.str() << "\" fill=\"" << color
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n"
        << "<polyline points=\"" << mean.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    const double ly = kTop + 16.0 + 20.0 * static_cast<double>(s);
    svg << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\">"
        << escape(line.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rssgp
