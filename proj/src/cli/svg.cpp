#include "conebill/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <vector>

namespace conebill::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

struct Panel {
  double x0, y0, w, h;        // pixel box
  double xmin, xmax, ymin, ymax;

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void polyline(std::ostringstream& os, const Panel& p, const std::vector<double>& xs, const std::vector<double>& ys,
              const char* stroke, double width) {
  os << "  <path fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" d=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? " L" : "M") << num(p.px(xs[i])) << "," << num(p.py(ys[i]));
  os << "\"/>\n";
}

void frame(std::ostringstream& os, const Panel& p, const std::string& title) {
  os << "  <rect x=\"" << num(p.x0) << "\" y=\"" << num(p.y0) << "\" width=\"" << num(p.w) << "\" height=\""
     << num(p.h) << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "  <text x=\"" << num(p.x0) << "\" y=\"" << num(p.y0 - 8) << "\" font-size=\"13\">" << title << "</text>\n";
}

}  // namespace

std::string curve_svg(const BuiltCurve& curve, int markers) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"480\" font-family=\"sans-serif\">\n";

  // Left: the whole curve and the unit circle.
  const Panel left{30, 40, 400, 400, -1.15, 1.15, -1.15, 1.15};
  frame(os, left, "gamma (blue) and unit circle (grey)");
  std::vector<double> cx, cy, gx, gy;
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n - std::numbers::pi;
    cx.push_back(std::cos(t));
    cy.push_back(std::sin(t));
    const double r = curve.rho(t);
    gx.push_back(r * std::cos(t));
    gy.push_back(r * std::sin(t));
  }
  polyline(os, left, cx, cy, "#bbb", 2.0);
  polyline(os, left, gx, gy, "#1f5fbf", 1.0);
  const long k1 = curve.k1();
  for (int j = 0; j < markers; ++j) {
    const double xi = spiral_xi(k1 + 1 + j);
    os << "  <circle cx=\"" << num(left.px(std::cos(xi))) << "\" cy=\"" << num(left.py(std::sin(xi)))
       << "\" r=\"1.5\" fill=\"#c0392b\"/>\n";
  }

  // Right: ρ - 1 near ξ = 0, with q_k on the axis.
  const double xi_hi = spiral_xi(k1);
  const double xi_lo = spiral_xi(k1 + markers + 1);
  std::vector<double> zx, zy;
  double ymax = 0.0;
  const int m = 4000;
  for (int i = 0; i <= m; ++i) {
    const double xi = xi_lo + (xi_hi - xi_lo) * i / m;
    const double d = curve.sample(xi).dev;
    zx.push_back(xi);
    zy.push_back(d);
    ymax = std::max(ymax, std::abs(d));
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  const Panel right{500, 40, 430, 400, xi_lo, xi_hi, -1.1 * ymax, 1.1 * ymax};
  char title[96];
  std::snprintf(title, sizeof title, "rho - 1 on [xi_%ld, xi_%ld], |rho - 1| < %.3g", k1 + markers + 1, k1, ymax);
  frame(os, right, title);
  polyline(os, right, {xi_lo, xi_hi}, {0.0, 0.0}, "#bbb", 1.0);
  polyline(os, right, zx, zy, "#1f5fbf", 1.0);
  for (int j = 0; j <= markers; ++j) {
    const double xi = spiral_xi(k1 + 1 + j);
    os << "  <circle cx=\"" << num(right.px(xi)) << "\" cy=\"" << num(right.py(0.0))
       << "\" r=\"2\" fill=\"#c0392b\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace conebill::cli
