#include "conebill/ndim_cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace conebill {

LiftedSection::LiftedSection(std::shared_ptr<const PolarSection> section, int n)
    : section_(std::move(section)), n_(n) {
  if (!section_) throw ContractViolation("lifted section needs a curve");
  if (n < 3 || n > 10) throw ContractViolation("dimension must lie in [3, 10]");
}

GraphProfile LiftedSection::profile_at_angle(double xi) const {
  const double half_pi = 0.5 * std::numbers::pi;
  if (!(std::abs(xi) < half_pi)) throw DomainError("graph form needs xi in (-pi/2, pi/2)");
  const PolarSample s = section_->sample(xi);
  const double r = s.rho();
  const double c = std::cos(xi), sn = std::sin(xi);
  const double x1p = s.d1 * c - r * sn;
  const double x2p = s.d1 * sn + r * c;
  const double x1pp = s.d2 * c - 2.0 * s.d1 * sn - r * c;
  const double x2pp = s.d2 * sn + 2.0 * s.d1 * c - r * sn;
  GraphProfile p;
  p.xi = xi;
  p.x2 = r * sn;
  p.f = r * c;
  const double hs = std::sin(0.5 * xi);
  p.gap = 2.0 * r * hs * hs - s.dev;
  p.d1 = x1p / x2p;
  p.d2 = (x1pp * x2p - x1p * x2pp) / (x2p * x2p * x2p);
  return p;
}

GraphProfile LiftedSection::profile(double x2) const {
  if (!(std::abs(x2) < 1.0)) throw DomainError("x2 must lie in (-1, 1)");
  double lo = -0.5 * std::numbers::pi;
  double hi = 0.5 * std::numbers::pi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (section_->rho(mid) * std::sin(mid) < x2)
      lo = mid;
    else
      hi = mid;
  }
  const double xi = std::abs(section_->rho(lo) * std::sin(lo) - x2) <= std::abs(section_->rho(hi) * std::sin(hi) - x2)
                        ? lo
                        : hi;
  GraphProfile p = profile_at_angle(xi);
  p.x2 = x2;
  return p;
}

void LiftedSection::check_point(const VecX& x) const {
  if (x.size() != n_ - 2) throw ContractViolation("point must have n - 2 coordinates");
  if (!(x.squaredNorm() < 1.0)) throw DomainError("point outside the unit ball D");
}

double LiftedSection::F1(const VecX& x) const {
  check_point(x);
  const GraphProfile p = profile(x[0]);
  const double rad = p.f * p.f - x.tail(x.size() - 1).squaredNorm();
  if (!(rad > 0.0)) throw DomainError("negative radicand in F1");
  return std::sqrt(rad);
}

VecX LiftedSection::gradient_F1(const VecX& x) const {
  check_point(x);
  const GraphProfile p = profile(x[0]);
  const double rad = p.f * p.f - x.tail(x.size() - 1).squaredNorm();
  if (!(rad > 0.0)) throw DomainError("negative radicand in F1");
  const double F = std::sqrt(rad);
  VecX g(x.size());
  g[0] = p.f * p.d1 / F;
  for (Eigen::Index j = 1; j < x.size(); ++j) g[j] = -x[j] / F;
  return g;
}

Eigen::MatrixXd LiftedSection::hessian_F1(const VecX& x) const {
  check_point(x);
  const GraphProfile p = profile(x[0]);
  const double rad = p.f * p.f - x.tail(x.size() - 1).squaredNorm();
  if (!(rad > 0.0)) throw DomainError("negative radicand in F1");
  const double F = std::sqrt(rad);
  const double F3 = F * F * F;
  const Eigen::Index m = x.size();
  Eigen::MatrixXd H(m, m);
  H(0, 0) = (p.f * p.d2 + p.d1 * p.d1) / F - p.f * p.f * p.d1 * p.d1 / F3;
  for (Eigen::Index j = 1; j < m; ++j) {
    H(0, j) = H(j, 0) = p.f * p.d1 * x[j] / F3;
    H(j, j) = -1.0 / F - x[j] * x[j] / F3;
    for (Eigen::Index i = 1; i < j; ++i) H(i, j) = H(j, i) = -x[i] * x[j] / F3;
  }
  return H;
}

Eigen::MatrixXd LiftedSection::hessian_F1_fd(const VecX& x, double h) const {
  const Eigen::Index m = x.size();
  Eigen::MatrixXd H(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    VecX xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    H.col(j) = (gradient_F1(xp) - gradient_F1(xm)) / (2.0 * h);
  }
  return H;
}

double LiftedSection::completed_quadratic_form(const VecX& x, const VecX& w) const {
  check_point(x);
  if (w.size() != x.size()) throw ContractViolation("direction must match the point dimension");
  const GraphProfile p = profile(x[0]);
  const double rad = p.f * p.f - x.tail(x.size() - 1).squaredNorm();
  if (!(rad > 0.0)) throw DomainError("negative radicand in F1");
  const double F = std::sqrt(rad);
  const Eigen::Index m = x.size();
  const double cross = p.f * p.d1 * w[0] - x.tail(m - 1).dot(w.tail(m - 1));
  return (p.f * p.d2 + p.d1 * p.d1) / F * w[0] * w[0] - cross * cross / (F * F * F) -
         w.tail(m - 1).squaredNorm() / F;
}

double LiftedSection::scalar_margin(double x2) const {
  const GraphProfile p = profile(x2);
  return p.f * p.d2 + p.d1 * p.d1;
}

long lift_min_k1() {
  long k = 1;
  while (std::sin(spiral_xi(k)) * (1.0 + 1e-6) >= 1.0 / 3.0) ++k;
  return k;
}

namespace {

std::vector<VecX> ball_grid(int dim, long target, double margin) {
  int m = std::max(2, static_cast<int>(std::ceil(std::pow(static_cast<double>(target), 1.0 / dim))));
  for (;; ++m) {
    std::vector<VecX> pts;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (;;) {
      VecX x(dim);
      for (int d = 0; d < dim; ++d) x[d] = -1.0 + (idx[static_cast<std::size_t>(d)] + 0.5) * 2.0 / m;
      if (x.norm() < 1.0 - margin) pts.push_back(x);
      int d = 0;
      while (d < dim && ++idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d++)] = 0;
      if (d == dim) break;
    }
    if (static_cast<long>(pts.size()) >= target) return pts;
  }
}

}  // namespace

NegdefReport negdef_check(const LiftedSection& section, const NegdefOptions& options, bool throw_on_failure) {
  NegdefReport rep;
  rep.n = section.n();
  const std::vector<VecX> grid = ball_grid(section.n() - 2, options.target_points, options.boundary_margin);
  rep.grid_size = static_cast<long>(grid.size());
  for (const VecX& x : grid) {
    const Eigen::MatrixXd H = section.hessian_F1(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, top);
    if (!(top < 0.0)) rep.failures.push_back({std::vector<double>(x.data(), x.data() + x.size()), top});
    // A negative w₂² coefficient in the completed square is sufficient for definiteness.
    if (section.scalar_margin(x[0]) < 0.0 && !(top < 0.0)) ++rep.oracle_disagreements;
  }
  rep.margin = -rep.max_eigenvalue;

  const int ns = options.scalar_samples;
  for (int i = 0; i < ns; ++i) {
    const double x2 = -1.0 + options.boundary_margin + (2.0 - 2.0 * options.boundary_margin) * (i + 0.5) / ns;
    rep.max_scalar_margin = std::max(rep.max_scalar_margin, section.scalar_margin(x2));
  }

  rep.window_bound = 0.125 * (1.0 - std::numbers::sqrt2 / 3.0) - std::numbers::sqrt2 / 3.0;
  rep.min_d1_window = rep.min_f_window = rep.min_gap_window = std::numeric_limits<double>::infinity();
  rep.max_d1_window = rep.max_f_window = -std::numeric_limits<double>::infinity();
  std::vector<double> window;
  for (int i = 0; i < ns; ++i) window.push_back((i + 0.5) / ns / 3.0);
  for (int e = -12; e <= -3; ++e)
    for (double m : {1.0, 2.0, 5.0}) window.push_back(m * std::pow(10.0, e));
  for (double x2 : window) {
    const GraphProfile p = section.profile(x2);
    const double s = p.f * p.d2 + p.d1 * p.d1;
    rep.max_scalar_margin_window = std::max(rep.max_scalar_margin_window, s);
    rep.min_d1_window = std::min(rep.min_d1_window, p.d1);
    rep.max_d1_window = std::max(rep.max_d1_window, p.d1);
    rep.min_f_window = std::min(rep.min_f_window, p.f);
    rep.max_f_window = std::max(rep.max_f_window, p.f);
    rep.min_gap_window = std::min(rep.min_gap_window, p.gap);
  }
  rep.window_bounds_ok = rep.min_d1_window > -1.0 / (2.0 * std::numbers::sqrt2) && rep.max_d1_window < 0.0 &&
                         rep.min_f_window > 2.0 * std::numbers::sqrt2 / 3.0 && rep.min_gap_window > 0.0 &&
                         rep.max_scalar_margin_window < rep.window_bound;

  rep.passed = rep.failures.empty() && rep.oracle_disagreements == 0 && rep.max_scalar_margin < 0.0 && rep.window_bounds_ok;
  if (!rep.failures.empty() && throw_on_failure)
    throw ConvexityFailure("Hessian of F1 is not negative definite at " + std::to_string(rep.failures.size()) +
                           " grid points, first at x2 = " + std::to_string(rep.failures.front().point.front()));
  return rep;
}

VecX embed(const Vec3& y, int n) {
  VecX x = VecX::Zero(n);
  x[0] = y[0];
  x[1] = y[1];
  x[n - 1] = y[2];
  return x;
}

EmbeddedReport embedded_reflection_check(const Spiral& spiral, const LiftedSection& section, long k_lo,
                                         long count) {
  const int n = section.n();
  EmbeddedReport rep;
  rep.n = n;
  rep.k_lo = k_lo;
  rep.count = count;
  for (long k = k_lo; k < k_lo + count; ++k) {
    const Vec3 p = spiral.vertex(k + 1);
    const VecX vk = embed(spiral.direction(k).vec(), n);
    const VecX vk1 = embed(spiral.direction(k + 1).vec(), n);
    const double x2 = p[1] / p[2];
    const GraphProfile prof = section.profile(x2);
    VecX e1 = VecX::Zero(n), e2 = VecX::Zero(n);
    e1[0] = prof.f;
    e1[1] = x2;
    e1[n - 1] = 1.0;
    e2[0] = prof.d1;
    e2[1] = 1.0;
    for (int j = 2; j < n - 1; ++j) rep.max_perpendicular = std::max(rep.max_perpendicular, std::abs(vk[j]));
    const VecX dv = vk - vk1;
    rep.max_e1 = std::max(rep.max_e1, std::abs(dv.dot(e1)));
    rep.max_e2 = std::max(rep.max_e2, std::abs(dv.dot(e2)));
  }
  return rep;
}

}  // namespace conebill
