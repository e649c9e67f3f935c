#include "spafac/svg.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace spafac {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string open(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "start", const char* extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape(s) +
         "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke, const char* extra = "") {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
         "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

// Maps data coordinates to the plotting area.
struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double sy(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

}  // namespace

std::string scree_svg(const ResultBundle& b) {
  std::string svg = open("Eigenvalues");
  const auto& ev = b.spectrum.eigenvalues;
  const double top = ev.empty() ? 1.0 : std::max(*std::max_element(ev.begin(), ev.end()), 1e-300);
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(ev.size(), 1)), 0.0, top * 1.1};
  svg += line(f.sx(0), f.sy(0), f.sx(f.x1), f.sy(0), "black");
  svg += line(f.sx(0), f.sy(0), f.sx(0), f.sy(f.y1), "black");
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const double x = f.sx(static_cast<double>(k) + 0.15);
    const double w = f.sx(static_cast<double>(k) + 0.85) - x;
    svg += "<rect x=\"" + num(x) + "\" y=\"" + num(f.sy(ev[k])) + "\" width=\"" + num(w) + "\" height=\"" +
           num(f.sy(0) - f.sy(ev[k])) + "\" fill=\"#4477aa\"/>\n";
    svg += text(x + w / 2, f.sy(ev[k]) - 4, num(b.spectrum.percent_inertia[k]) + "%", "middle");
    svg += text(x + w / 2, f.sy(0) + 16, std::to_string(k + 1), "middle");
  }
  svg += text(kWidth / 2, kHeight - 16, "Dimension", "middle");
  svg += text(f.sx(0) - 6, f.sy(top), num(top), "end");
  svg += "</svg>\n";
  return svg;
}

std::string zone_map_svg(const TuningGrid& grid, const ZoneThresholds& z) {
  std::string svg = open("Fit against zero ratio");
  const Frame f{0.0, 1.0, 0.0, 1.0};
  auto rect = [&](double xa, double ya, double xb, double yb, const char* fill, const std::string& label) {
    std::string s = "<rect x=\"" + num(f.sx(xa)) + "\" y=\"" + num(f.sy(yb)) + "\" width=\"" +
                    num(f.sx(xb) - f.sx(xa)) + "\" height=\"" + num(f.sy(ya) - f.sy(yb)) + "\" fill=\"" + fill +
                    "\" fill-opacity=\"0.35\"/>\n";
    s += text(f.sx((xa + xb) / 2), f.sy((ya + yb) / 2), label, "middle", " fill=\"#333\"");
    return s;
  };
  svg += rect(0, 0, 1, 1, "#ddcc77", "Zone 5");
  svg += rect(0, z.near_zero, z.near_zero, 1, "#88ccee", "2");
  svg += rect(z.near_zero, 0, 1, z.near_zero, "#cc6677", "3");
  svg += rect(0, 0, z.near_zero, z.near_zero, "#aa4499", "1");
  svg += rect(z.high, z.high, 1, 1, "#117733", "4");
  svg += line(f.sx(0), f.sy(0), f.sx(1), f.sy(0), "black");
  svg += line(f.sx(0), f.sy(0), f.sx(0), f.sy(1), "black");
  for (int t = 0; t <= 10; t += 2) {
    const double v = t / 10.0;
    svg += text(f.sx(v), f.sy(0) + 16, num(v), "middle");
    svg += text(f.sx(0) - 6, f.sy(v) + 4, num(v), "end");
  }
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const auto& c = grid.cells[k];
    if (!c.ok) continue;
    const bool best = grid.best && *grid.best == k;
    svg += "<circle cx=\"" + num(f.sx(c.indices.zero_ratio)) + "\" cy=\"" + num(f.sy(c.indices.fit)) + "\" r=\"" +
           (best ? "6" : "3") + "\" fill=\"" + (best ? "#d81b60" : "#222") + "\" fill-opacity=\"" +
           (best ? "1" : "0.6") + "\"/>\n";
  }
  svg += text(kWidth / 2, kHeight - 16, "Zero ratio", "middle");
  svg += text(18, kHeight / 2, "Fit", "middle", " transform=\"rotate(-90 18 240.00)\"");
  svg += "</svg>\n";
  return svg;
}

std::string factor_map_svg(const ResultBundle& b, Index dx, Index dy) {
  require(dx >= 0 && dy >= 0 && dx < b.rank && dy < b.rank && dx != dy, ErrorCode::InvalidArgument,
          "factor map dimensions must be two distinct retained dimensions");
  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  auto extend = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  auto extend_table = [&](const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) extend(m(i, dx), m(i, dy));
  };
  extend_table(b.F.values);
  extend_table(b.G.values);
  if (b.observations) extend_table(b.observations->scores);
  const bool regions = b.bootstrap && b.bootstrap->dim_x == dx && b.bootstrap->dim_y == dy;
  if (regions)
    for (const auto& r : b.bootstrap->regions)
      for (const auto& p : r.boundary) extend(p[0], p[1]);
  const double pad_x = std::max((hi_x - lo_x) * 0.08, 1e-9);
  const double pad_y = std::max((hi_y - lo_y) * 0.08, 1e-9);
  const Frame f{lo_x - pad_x, hi_x + pad_x, lo_y - pad_y, hi_y + pad_y};

  auto axis_label = [&](Index d) {
    return "Dimension " + std::to_string(d + 1) + " (" + num(b.spectrum.percent_inertia[static_cast<std::size_t>(d)]) +
           "%)";
  };
  std::string svg = open(b.method + " factor map");
  svg += line(f.sx(f.x0), f.sy(0), f.sx(f.x1), f.sy(0), "#888", " stroke-dasharray=\"4 3\"");
  svg += line(f.sx(0), f.sy(f.y0), f.sx(0), f.sy(f.y1), "#888", " stroke-dasharray=\"4 3\"");
  svg += text(kWidth / 2, kHeight - 16, axis_label(dx), "middle");
  svg += text(18, kHeight / 2, axis_label(dy), "middle", " transform=\"rotate(-90 18 240.00)\"");

  if (b.observations) {
    const auto& s = b.observations->scores;
    for (Index i = 0; i < s.rows(); ++i)
      svg += "<circle cx=\"" + num(f.sx(s(i, dx))) + "\" cy=\"" + num(f.sy(s(i, dy))) +
             "\" r=\"2\" fill=\"#999\" fill-opacity=\"0.5\"/>\n";
  }
  if (regions)
    for (const auto& r : b.bootstrap->regions) {
      std::string pts;
      for (const auto& p : r.boundary) pts += num(f.sx(p[0])) + "," + num(f.sy(p[1])) + " ";
      svg += "<polygon points=\"" + pts + "\" fill=\"#4477aa\" fill-opacity=\"0.12\" stroke=\"#4477aa\"" +
             (r.tiny ? " stroke-dasharray=\"3 2\"" : "") + "/>\n";
    }
  auto points = [&](const ScoreTable& t, const char* color) {
    for (Index i = 0; i < t.values.rows(); ++i) {
      const double x = f.sx(t.values(i, dx));
      const double y = f.sy(t.values(i, dy));
      svg += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
      svg += text(x + 6, y - 6, t.labels[static_cast<std::size_t>(i)], "start",
                  (std::string(" fill=\"") + color + "\"").c_str());
    }
  };
  points(b.F, "#4477aa");
  points(b.G, "#cc3311");
  svg += "</svg>\n";
  return svg;
}

}  // namespace spafac
