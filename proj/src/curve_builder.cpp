#include "conebill/curve_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace conebill {

namespace {

constexpr double kFlatIndex = 4.0e18;  // beyond this the curve is the circle to double precision

double half_versine(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;  // 1 - cos x
}

// Logistic step s(x) = 1/(1 + e^h), h = 1/x - 1/(1-x), with s' and s''.
BumpValue logistic_step(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const double y = 1.0 - x;
  const double h = 1.0 / x - 1.0 / y;
  if (h > 700.0) return {0.0, 0.0, 0.0};
  if (h < -700.0) return {1.0, 0.0, 0.0};
  const double hp = -1.0 / (x * x) - 1.0 / (y * y);
  const double hpp = 2.0 / (x * x * x) - 2.0 / (y * y * y);
  const double ch = std::cosh(0.5 * h);
  const double q = 0.25 / (ch * ch);  // s(1 - s)
  const double s = 1.0 / (1.0 + std::exp(h));
  const double sp = -hp * q;
  const double spp = -(std::tanh(0.5 * h) * sp * hp + q * hpp);
  return {s, sp, spp};
}

}  // namespace

BumpValue bump(double t) {
  const double x = 3.0 * t - 1.0;
  if (x <= 0.0) return {1.0, 0.0, 0.0};
  if (x >= 1.0) return {0.0, 0.0, 0.0};
  const BumpValue s = logistic_step(x);
  const double h = 1.0 / x - 1.0 / (1.0 - x);
  const double a = h < -700.0 ? 0.0 : 1.0 / (1.0 + std::exp(-h));
  return {a, -3.0 * s.d1, -9.0 * s.d2};
}

double bump_constant() {
  static const double c = [] {
    double m = 1.0;
    constexpr int n = 200000;
    for (int i = 0; i <= n; ++i) {
      const BumpValue b = bump(static_cast<double>(i) / n);
      m = std::max({m, std::abs(b.d1), std::abs(b.d2)});
    }
    return m;
  }();
  return c;
}

PolarSample circle_polar(double xi, double sigma) {
  constexpr double kPi = std::numbers::pi;
  if (!(std::abs(xi) <= kPi / 3.0 && std::abs(sigma) <= kPi / 4.0))
    throw DomainError("circle_polar argument outside [-pi/3, pi/3] x [-pi/4, pi/4]");
  const double cs = half_versine(sigma);
  const double cx = half_versine(xi);
  const double sx = std::sin(xi), cxx = std::cos(xi);
  const double ss = std::sin(sigma);
  const double B = cxx * cs - sx * ss;
  const double C = 1.0 - 2.0 * std::cos(sigma);
  const double Rs = std::sqrt(B * B - C);
  const double P0 = 2.0 * (cs * cx + sx * ss);
  const double eta = -P0 / ((1.0 - B) + Rs);
  const double g = 1.0 + eta;
  const double Bx = -sx * cs - cxx * ss;
  const double g1 = g * Bx / Rs;
  const double g2 = (2.0 * g1 * Bx - g1 * g1 - g * B) / Rs;
  return {eta, g1, g2};
}

BuiltCurve::BuiltCurve(const SpiralParams& params, const CurveBuildOptions& options)
    : params_(params), options_(options) {
  const long n = std::max(options.scan_k_max + 3, 100003L);
  sigma_.assign(static_cast<std::size_t>(n), 0.0);
  for (long k = 2; k < n; ++k) sigma_[static_cast<std::size_t>(k)] = spiral_sigma(k);
}

double BuiltCurve::sigma(long k) const {
  if (k < static_cast<long>(sigma_.size())) return sigma_[static_cast<std::size_t>(std::max(k, 2L))];
  return spiral_sigma(k);
}

namespace {

PolarSample arc_with(const BuiltCurve& c, long k, long k1, double xi) {
  if (k <= k1 || k < 2) return {};
  return circle_polar(xi - spiral_xi(k), c.sigma(k));
}

PolarSample window_with(const BuiltCurve& c, long k, long k1, double xi) {
  const double xk1 = spiral_xi(k + 1);
  const double d = spiral_delta(k);
  const double tau = std::clamp((xi - xk1) / d, 0.0, 1.0);
  const BumpValue b = bump(tau);
  const PolarSample e0 = arc_with(c, k, k1, xi);
  const PolarSample e1 = arc_with(c, k + 1, k1, xi);
  const double dd = e1.dev - e0.dev;
  const double d1 = e1.d1 - e0.d1;
  const double d2 = e1.d2 - e0.d2;
  return {e0.dev + dd * b.a,
          e0.d1 + d1 * b.a + dd * b.d1 / d,
          e0.d2 + d2 * b.a + 2.0 * d1 * b.d1 / d + dd * b.d2 / (d * d)};
}

double window_min_kappa_with(const BuiltCurve& c, long k, long k1, int samples) {
  const double lo = spiral_xi(k + 1);
  const double d = spiral_delta(k);
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples + 1; ++i) {
    const double xi = i == samples + 1 ? spiral_xi(k) : lo + d * static_cast<double>(i) / (samples + 1);
    m = std::min(m, polar_curvature(window_with(c, k, k1, xi)));
  }
  return m;
}

}  // namespace

std::shared_ptr<const BuiltCurve> BuiltCurve::build(const SpiralParams& params, const CurveBuildOptions& options) {
  if (options.scan_k_max < 2 || options.samples_per_window < 1)
    throw ContractViolation("invalid curve build options");
  std::shared_ptr<BuiltCurve> curve(new BuiltCurve(params, options));
  const long n = options.scan_k_max;
  const int spw = options.samples_per_window;
  const double thr = options.kappa_threshold;

  // suffix[k] = min over windows k..n of the unflattened curve.
  std::vector<double> suffix(static_cast<std::size_t>(n + 2), std::numeric_limits<double>::infinity());
  for (long k = n; k >= 1; --k)
    suffix[static_cast<std::size_t>(k)] =
        std::min(suffix[static_cast<std::size_t>(k + 1)], window_min_kappa_with(*curve, k, 1, spw));

  for (long k1 = std::max(options.min_k1, 1L); k1 < n; ++k1) {
    if (suffix[static_cast<std::size_t>(k1 + 1)] <= thr) continue;
    const double flat = window_min_kappa_with(*curve, k1, k1, spw);
    if (flat <= thr) continue;
    curve->k1_ = k1;
    curve->min_kappa_ = std::min(flat, suffix[static_cast<std::size_t>(k1 + 1)]);
    return curve;
  }
  throw ConstructionError("curvature threshold " + std::to_string(thr) + " not reached for k1 < " +
                          std::to_string(n));
}

PolarSample BuiltCurve::arc(long k, double xi) const { return arc_with(*this, k, k1_, xi); }

PolarSample BuiltCurve::window(long k, double xi) const {
  if (k < k1_) throw ContractViolation("window index below k1");
  return window_with(*this, k, k1_, xi);
}

double BuiltCurve::window_min_kappa(long k, int samples) const {
  return window_min_kappa_with(*this, k, k1_, samples);
}

PolarSample BuiltCurve::sample(double xi_in) const {
  const double xi = wrap_angle(xi_in);
  if (!(xi > 0.0) || xi > spiral_xi(k1_)) return {};
  const double kd = std::floor(1.0 / (xi * xi));
  if (kd > kFlatIndex) return {};
  long k = std::max(static_cast<long>(kd), k1_);
  while (k > k1_ && xi > spiral_xi(k)) --k;
  while (xi < spiral_xi(k + 1)) ++k;
  return window_with(*this, k, k1_, xi);
}

CurvatureSurvey curvature_survey(const BuiltCurve& curve, long k_hi, int per_window, int uniform, int log_points) {
  const long k1 = curve.k1();
  if (k_hi <= k1 || per_window < 1 || uniform < 1 || log_points < 2)
    throw ContractViolation("invalid curvature survey range");
  CurvatureSurvey s;
  s.min_kappa = std::numeric_limits<double>::infinity();
  auto visit = [&](double xi, const PolarSample& p) {
    const double kappa = polar_curvature(p);
    ++s.samples;
    if (kappa < s.min_kappa) {
      s.min_kappa = kappa;
      s.argmin_xi = xi;
    }
  };
  for (long k = k1; k < k_hi; ++k) {
    const double lo = spiral_xi(k + 1);
    const double d = spiral_delta(k);
    for (int i = 0; i <= per_window + 1; ++i) {
      const double xi = i == per_window + 1 ? spiral_xi(k) : lo + d * static_cast<double>(i) / (per_window + 1);
      visit(xi, curve.window(k, xi));
    }
  }
  for (int i = 0; i < uniform; ++i) {
    const double xi = -std::numbers::pi + 2.0 * std::numbers::pi * (i + 0.5) / uniform;
    visit(xi, curve.sample(xi));
  }
  const double top = std::log(spiral_xi(k_hi));
  const double bottom = std::log(1e-12);
  for (int i = 0; i < log_points; ++i) {
    const double xi = std::exp(bottom + (top - bottom) * i / (log_points - 1));
    visit(xi, curve.sample(xi));
  }

  auto jump = [&](const PolarSample& l, const PolarSample& r) {
    s.junction_rho = std::max(s.junction_rho, std::abs(l.dev - r.dev));
    s.junction_d1 = std::max(s.junction_d1, std::abs(l.d1 - r.d1));
    s.junction_d2 = std::max(s.junction_d2, std::abs(l.d2 - r.d2));
  };
  // ξ_{k1}: the flattened window against the circle above it.
  jump(curve.window(k1, spiral_xi(k1)), PolarSample{});
  for (long k = k1 + 1; k <= k_hi; ++k) {
    const double xi = spiral_xi(k);
    jump(curve.window(k, xi), curve.window(k - 1, xi));
  }
  // ξ → 0⁺ against the circle below 0.
  jump(curve.sample(1e-12), PolarSample{});
  return s;
}

namespace {

DecayFit fit_decay(const std::vector<long>& ks, const std::vector<double>& sup, double expected, double tol) {
  DecayFit fit;
  fit.expected = expected;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double x = std::log(static_cast<double>(ks[i]));
    const double y = std::log(sup[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.constant = std::max(fit.constant, sup[i] * std::pow(static_cast<double>(ks[i]), -expected));
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.ok = std::isfinite(fit.slope) && std::abs(fit.slope - expected) <= tol;
  return fit;
}

}  // namespace

C2Report c2_check_at_zero(const BuiltCurve& curve, const C2CheckOptions& options) {
  if (options.k_lo <= curve.k1() || options.k_hi <= options.k_lo || options.k_points < 3)
    throw ContractViolation("c2 check range must lie above k1");
  C2Report report;
  std::vector<double> s0, s1, s2;
  const double ratio = std::log(static_cast<double>(options.k_hi) / options.k_lo) / (options.k_points - 1);
  for (int i = 0; i < options.k_points; ++i) {
    const long k = std::lround(options.k_lo * std::exp(ratio * i));
    if (!report.ks.empty() && k == report.ks.back()) continue;
    report.ks.push_back(k);
    const double lo = spiral_xi(k + 1);
    const double d = spiral_delta(k);
    double m0 = 0, m1 = 0, m2 = 0;
    for (int j = 0; j <= options.samples_per_window; ++j) {
      const PolarSample s = curve.sample(lo + d * static_cast<double>(j) / options.samples_per_window);
      m0 = std::max(m0, std::abs(s.dev));
      m1 = std::max(m1, std::abs(s.d1));
      m2 = std::max(m2, std::abs(s.d2));
    }
    s0.push_back(m0);
    s1.push_back(m1);
    s2.push_back(m2);
  }
  report.dev = fit_decay(report.ks, s0, -4.0, options.slope_tol);
  report.d1 = fit_decay(report.ks, s1, -2.5, options.slope_tol);
  report.d2 = fit_decay(report.ks, s2, -1.0, options.slope_tol);

  const double h = spiral_xi(options.k_hi);
  const PolarSample at_h = curve.sample(h);
  report.rho_prime_at_zero = at_h.dev / h;
  report.rho_second_at_zero = at_h.d1 / h;

  report.passed = report.dev.ok && report.d1.ok && report.d2.ok;
  if (!report.passed && options.throw_on_failure)
    throw C2CheckFailure("decay slopes " + std::to_string(report.dev.slope) + ", " +
                         std::to_string(report.d1.slope) + ", " + std::to_string(report.d2.slope) +
                         " outside tolerance");
  return report;
}

long sign_change_census(const BuiltCurve& curve, long k_lo, long k_hi) {
  if (k_lo < 1 || k_hi < k_lo) throw ContractViolation("invalid census range");
  long count = 0;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double xk = spiral_xi(k);
    const double h = 0.1 * spiral_delta(k);
    const double below = curve.sample(xk - h).dev;
    const double above = curve.sample(xk + h).dev;
    if ((below < 0.0 && above > 0.0) || (below > 0.0 && above < 0.0)) ++count;
  }
  return count;
}

ReplayReport replay(std::shared_ptr<const BuiltCurve> curve, long steps, long k_start, double tol) {
  if (!curve) throw ContractViolation("replay needs a curve");
  if (steps < 1) throw ContractViolation("replay needs at least one step");
  const SpiralParams& params = curve->params();
  ReplayReport report;
  report.k_start = k_start > 0 ? k_start : std::max(curve->k1() + 1, params.k0);
  if (report.k_start <= curve->k1() || report.k_start < params.k0)
    throw ContractViolation("replay must start above k1 and at or after k0");
  report.steps = steps;

  const long k0 = report.k_start;
  const Spiral spiral(params, k0 + steps + 1);
  const GeneralCone cone(curve);
  Line3 line = spiral.line(k0);
  Vec3 prev = line.base;
  CompensatedSum length;
  for (long j = 1; j <= steps; ++j) {
    const long k = k0 + j;
    const ConeStep step = cone_step(cone, line);
    if (!step.outgoing) throw ReplayFailure("simulated trajectory left the cone", k);
    const Vec3 expected = spiral.vertex(k);
    const double err = (step.hit.point - expected).norm() / expected.norm();
    report.max_vertex_error = std::max(report.max_vertex_error, err);
    if (!(err <= tol))
      throw ReplayFailure("vertex " + std::to_string(k) + " off by " + std::to_string(err), k);
    line = *step.outgoing;
    report.max_distance_sq_error = std::max(report.max_distance_sq_error, std::abs(line_distance_sq(line) - 2.0));
    length.add((step.hit.point - prev).norm());
    prev = step.hit.point;
    const double cum = length.value();
    if (!report.partial_lengths.empty() && !(cum > report.partial_lengths.back())) report.length_increasing = false;
    report.partial_lengths.push_back(cum);
  }
  report.cumulative_length = length.value();
  const long k_end = k0 + steps;
  const double swept = spiral.S(k0) - spiral.S(k_end);
  report.closed_partial_length =
      std::numbers::sqrt2 * std::sin(swept) / (std::cos(spiral.A(k0)) * std::cos(spiral.A(k_end)));
  const TotalLength rem = spiral.remaining_length(k_end - 1);
  report.remaining_infinite = rem.infinite;
  report.remaining_length = rem.value;
  return report;
}

}  // namespace conebill
