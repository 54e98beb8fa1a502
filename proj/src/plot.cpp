#include "twpa/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace twpa {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi == lo) lo -= 0.5, hi += 0.5;
  }
};

void frame(std::ostringstream& out, const std::string& title, const std::string& xl, const std::string& yl,
           const Range& xr, const Range& yr) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = kLeft + pw * i / 5.0, fy = kTop + ph - ph * i / 5.0;
    out << "<text x=\"" << fx << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
        << num(xr.lo + (xr.hi - xr.lo) * i / 5.0) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << fy + 4 << "\" text-anchor=\"end\">"
        << num(yr.lo + (yr.hi - yr.lo) * i / 5.0) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << escape(xl) << "</text>\n"
      << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(yl) << "</text>\n";
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) xr.add(s.x[i]), yr.add(s.y[i]);
    }
  }
  xr.finish();
  yr.finish();
  std::ostringstream out;
  frame(out, title, x_label, y_label, xr, yr);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * (x - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double y) { return kTop + ph - ph * (y - yr.lo) / (yr.hi - yr.lo); };
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string path;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        pen = false;
        continue;
      }
      path += (pen ? " L" : " M") + num(px(s.x[i])) + "," + num(py(s.y[i]));
      pen = true;
    }
    if (!path.empty()) {
      out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_heatmap(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const std::vector<double>& x, const std::vector<double>& y, const Matrix& z,
                        const std::string& z_label) {
  Range xr, yr, zr;
  for (double v : x) xr.add(v);
  for (double v : y) yr.add(v);
  for (double v : z.data) zr.add(v);
  xr.finish();
  yr.finish();
  zr.finish();
  std::ostringstream out;
  frame(out, title, x_label, y_label, xr, yr);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(std::max<std::size_t>(x.size(), 1));
  const double ch = ph / static_cast<double>(std::max<std::size_t>(y.size(), 1));
  auto color = [&](double v) {
    if (!std::isfinite(v)) return std::string("#808080");
    const double t = (v - zr.lo) / (zr.hi - zr.lo);
    int r, g, b;
    if (t < 0.5) {
      r = g = static_cast<int>(255 * t * 2);
      b = 255;
    } else {
      r = 255;
      g = b = static_cast<int>(255 * (1 - t) * 2);
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  for (std::size_t r = 0; r < y.size(); ++r) {
    for (std::size_t c = 0; c < x.size(); ++c) {
      out << "<rect x=\"" << num(kLeft + cw * static_cast<double>(c)) << "\" y=\""
          << num(kTop + ph - ch * static_cast<double>(r + 1)) << "\" width=\"" << num(cw + 0.5) << "\" height=\""
          << num(ch + 0.5) << "\" fill=\"" << color(z(r, c)) << "\"/>\n";
    }
  }
  for (int i = 0; i <= 10; ++i) {
    const double v = zr.lo + (zr.hi - zr.lo) * i / 10.0;
    const double yy = kTop + ph - ph * (i + 1) / 11.0;
    out << "<rect x=\"" << kWidth - kRight + 15 << "\" y=\"" << num(yy) << "\" width=\"20\" height=\""
        << num(ph / 11.0 + 0.5) << "\" fill=\"" << color(v) << "\"/>\n"
        << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << num(yy + ph / 22.0 + 4) << "\">" << num(v)
        << "</text>\n";
  }
  out << "<text x=\"" << kWidth - kRight + 15 << "\" y=\"" << kTop - 6 << "\">" << escape(z_label) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace twpa
