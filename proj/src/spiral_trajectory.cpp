#include "conebill/spiral_trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conebill {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

// asin(y) - y
double asin_excess(double y) {
  double coeff = 1.0;  // (2n)! / (4^n n!²)
  double power = y;
  double sum = 0.0;
  for (int n = 1; n < 60; ++n) {
    coeff *= (2.0 * n - 1.0) / (2.0 * n);
    power *= y * y;
    const double term = coeff * power / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) <= 1e-20 * std::abs(sum)) break;
  }
  return sum;
}

// sin(x) - x
double sin_defect(double x) {
  double term = x;
  double sum = 0.0;
  for (int n = 1; n < 60; ++n) {
    term *= -x * x / ((2.0 * n) * (2.0 * n + 1.0));
    sum += term;
    if (std::abs(term) <= 1e-20 * std::abs(sum)) break;
  }
  return sum;
}

// Σ_{i≥M} δ_i³ lies in [(M+1)^{-7/2}, (M-1)^{-7/2}] / 28; θ_i - δ_i/√2 ≈ -δ_i³/(48√2).
constexpr double kTailCoeff = 1.0 / (48.0 * kSqrt2 * 28.0);

double far_tail_estimate(long M) {
  const double lo = std::pow(static_cast<double>(M + 1), -3.5);
  const double hi = std::pow(static_cast<double>(M - 1), -3.5);
  return -kTailCoeff * 0.5 * (lo + hi);
}

double far_tail_error(long M) {
  const double lo = std::pow(static_cast<double>(M + 1), -3.5);
  const double hi = std::pow(static_cast<double>(M - 1), -3.5);
  // Next order: 7√2 δ⁵/15360 with Σδ⁵ ≤ (M-1)^{-13/2}/208, doubled for the rest of the series.
  const double next = 2.0 * 7.0 * kSqrt2 / 15360.0 * std::pow(static_cast<double>(M - 1), -6.5) / 208.0;
  return kTailCoeff * 0.5 * (hi - lo) + next;
}

// Σ_{i≥k} (θ_i - δ_i/√2).
double excess_tail(long k, double tol) {
  if (k < 1) throw DomainError("tail index must be >= 1");
  if (!(tol > 0.0)) throw ContractViolation("tail tolerance must be positive");
  long M = std::max(k, 2L);
  while (far_tail_error(M) >= tol) {
    if (M > 1000000000L) throw ToleranceError("tail tolerance not reachable with 1e9 terms");
    M = std::max(M + 1, static_cast<long>(M * 1.25));
  }
  CompensatedSum sum;
  sum.add(far_tail_estimate(M));
  for (long i = M - 1; i >= k; --i) sum.add(spiral_theta_excess(i));
  return sum.value();
}

}  // namespace

double spiral_xi(long k) {
  if (k < 1) throw DomainError("spiral index must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(k));
}

double spiral_delta(long k) {
  if (k < 1) throw DomainError("spiral index must be >= 1");
  const double kd = static_cast<double>(k);
  const double sk = std::sqrt(kd);
  const double sk1 = std::sqrt(kd + 1.0);
  return 1.0 / (sk * sk1 * (sk + sk1));
}

double spiral_theta(long k) { return 2.0 * std::asin(std::sin(0.5 * spiral_delta(k)) / kSqrt2); }

double spiral_theta_arccos(long k) { return std::acos(0.5 * (std::cos(spiral_delta(k)) + 1.0)); }

double spiral_theta_excess(long k) {
  const double x = 0.5 * spiral_delta(k);
  const double y = std::sin(x) / kSqrt2;
  return 2.0 * asin_excess(y) + kSqrt2 * sin_defect(x);
}

double theta_tail(long k, double tol) { return spiral_xi(k) / kSqrt2 + excess_tail(k, tol); }

long spiral_k0(double a) {
  if (!(a > -kHalfPi && a <= kHalfPi)) throw DomainError("a must lie in (-pi/2, pi/2]");
  const double margin = a + kHalfPi;
  auto ok = [&](long k) { return theta_tail(k) < margin; };
  if (ok(1)) return 1;
  long hi = 2;
  while (!ok(hi)) {
    if (hi > (1L << 60)) throw DomainError("a is too close to -pi/2");
    hi *= 2;
  }
  long lo = hi / 2;  // !ok(lo)
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

TailTable::TailTable(long k_lo, long k_hi, double tol) : k_lo_(k_lo), k_hi_(k_hi) {
  if (k_lo < 1 || k_hi < k_lo) throw ContractViolation("invalid tail table range");
  excess_tail_.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
  const double start = excess_tail(k_hi, tol);
  CompensatedSum sum;
  sum.add(start);
  excess_tail_.back() = start;
  for (long k = k_hi - 1; k >= k_lo; --k) {
    sum.add(spiral_theta_excess(k));
    excess_tail_[static_cast<std::size_t>(k - k_lo)] = sum.value();
  }
}

double TailTable::S(long k) const {
  if (k < k_lo_ || k > k_hi_) throw ContractViolation("tail index outside the table");
  return spiral_xi(k) / kSqrt2 + excess_tail_[static_cast<std::size_t>(k - k_lo_)];
}

SpiralParams SpiralParams::make(double a, double tail_tol) {
  SpiralParams p;
  p.a = a;
  p.tail_tol = tail_tol;
  p.k0 = spiral_k0(a);
  return p;
}

Spiral::Spiral(const SpiralParams& params, long k_max)
    : params_(params), k_max_(k_max), tails_(params.k0, std::max(k_max, params.k0) + 2, params.tail_tol) {
  if (k_max < params.k0) throw ContractViolation("k_max must be >= k0");
}

void Spiral::check_index(long k, long hi) const {
  if (k < params_.k0) throw DomainError("spiral index below k0(a)");
  if (k > hi) throw ContractViolation("spiral index beyond the cached range");
}

double Spiral::S(long k) const { return tails_.S(k); }

double Spiral::A(long k) const { return params_.a - tails_.S(k); }

double Spiral::t(long k) const {
  check_index(k, k_max_ + 2);
  return 1.0 / std::cos(A(k));
}

Vec3 Spiral::vertex(long k) const {
  const double tk = t(k);
  const double x = spiral_xi(k);
  return tk * Vec3(std::cos(x), std::sin(x), 1.0);
}

Vec3 Spiral::chord(long k) const {
  check_index(k, k_max_ + 1);
  const double xk = spiral_xi(k);
  const double xk1 = spiral_xi(k + 1);
  const double d = spiral_delta(k);
  const double th = spiral_theta(k);
  const double ak = A(k);
  const double ak1 = A(k + 1);
  const double ck = std::cos(ak), ck1 = std::cos(ak1);
  const double dt = 2.0 * std::sin(0.5 * (ak + ak1)) * std::sin(0.5 * th) / (ck * ck1);
  const double m = 0.5 * (xk + xk1);
  const double sd = std::sin(0.5 * d);
  const Vec3 dq(2.0 * std::sin(m) * sd, -2.0 * std::cos(m) * sd, 0.0);
  const Vec3 q1(std::cos(xk1), std::sin(xk1), 1.0);
  return dt * q1 + (1.0 / ck) * dq;
}

Direction3 Spiral::direction(long k) const { return Direction3::normalize(chord(k)); }

Line3 Spiral::line(long k) const { return Line3{vertex(k), direction(k)}; }

double Spiral::chord_length(long k) const {
  check_index(k, k_max_ + 1);
  return kSqrt2 * std::sin(spiral_theta(k)) * t(k) * t(k + 1);
}

double Spiral::chord_length_telescoped(long k) const {
  check_index(k, k_max_ + 1);
  return kSqrt2 * (std::tan(A(k + 1)) - std::tan(A(k)));
}

double Spiral::partial_length_closed(long K) const {
  check_index(K, k_max_ + 1);
  const double a0 = A(params_.k0);
  const double a1 = A(K + 1);
  const double swept = S(params_.k0) - S(K + 1);
  return kSqrt2 * std::sin(swept) / (std::cos(a0) * std::cos(a1));
}

double Spiral::partial_length_sum(long K) const {
  check_index(K, k_max_ + 1);
  CompensatedSum sum;
  for (long k = params_.k0; k <= K; ++k) sum.add(chord_length(k));
  return sum.value();
}

TotalLength Spiral::remaining_length(long K) const {
  check_index(K, k_max_ + 1);
  if (params_.a >= kHalfPi) return {true, std::numeric_limits<double>::infinity()};
  const double s = S(K + 1);
  return {false, kSqrt2 * std::sin(s) / (std::cos(A(K + 1)) * std::cos(params_.a))};
}

double Spiral::cos_alpha_closed(long k) const {
  check_index(k, k_max_ + 2);
  return std::sin(A(k));
}

double Spiral::verify_distance(long k) const {
  return std::sqrt(line_distance_sq(line(k))) - kSqrt2;
}

Spiral::EqualAngles Spiral::verify_equal_angles(long k) const {
  if (k <= params_.k0) throw DomainError("equal-angle check needs k > k0(a)");
  const Vec3 p = vertex(k);
  return {angle_between(direction(k).vec(), p), angle_between(direction(k - 1).vec(), p)};
}

ReflectionRecord<3> Spiral::record(long k) const {
  const Direction3 out = direction(k);
  const Direction3 in = k > params_.k0 ? direction(k - 1) : out;
  return make_record<3>(vertex(k), in, out, spiral_theta(k));
}

TotalLength total_length(const SpiralParams& params) {
  if (params.a >= kHalfPi) return {true, std::numeric_limits<double>::infinity()};
  const double s = theta_tail(params.k0, params.tail_tol);
  return {false, kSqrt2 * std::sin(s) / (std::cos(params.a - s) * std::cos(params.a))};
}

NormalCoefficients normal_coefficients(long k) {
  if (k < 2) throw DomainError("normal frame needs k >= 2");
  const double dk = spiral_delta(k), dk1 = spiral_delta(k - 1);
  const double tk = spiral_theta(k), tk1 = spiral_theta(k - 1);
  const double g = std::sin(0.5 * tk) * std::cos(0.5 * tk1) + std::cos(0.5 * tk) * std::sin(0.5 * tk1);
  // f/√2 = cos X cos Y - cos Z cos W with X = δ_k/2, Y = θ_{k-1}/2, Z = θ_k/2, W = δ_{k-1}/2,
  // expanded through c(x) = 1 - cos x = 2 sin²(x/2).
  auto c = [](double x) {
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s;
  };
  const double diff = 2.0 * (std::sin(0.25 * (dk1 + tk1)) * std::sin(0.25 * (dk1 - tk1)) -
                             std::sin(0.25 * (dk + tk)) * std::sin(0.25 * (dk - tk)));
  const double f = kSqrt2 * (diff + c(0.5 * dk) * c(0.5 * tk1) - c(0.5 * tk) * c(0.5 * dk1));
  return {g, f};
}

double spiral_sigma(long k) {
  if (k < 2) throw DomainError("sigma needs k >= 2");
  if (k > 1000000L) {
    const double kd = static_cast<double>(k);
    const double b = 3.0 / 16.0 + (35.0 / 256.0) / (kd * kd) + (3.0 / 512.0) / (kd * kd * kd);
    return b * std::pow(kd, -2.5);
  }
  const NormalCoefficients nc = normal_coefficients(k);
  return std::atan2(nc.f, nc.g);
}

NormalFrame normal_frame(long k) {
  const double x = spiral_xi(k);
  const double s = spiral_sigma(k);
  const Vec2 q(std::cos(x), std::sin(x));
  const Vec2 z = -q;
  const Vec2 zt(q[1], -q[0]);
  return {q, std::cos(s) * z + std::sin(s) * zt, s};
}

Vec2 normal_by_projection(const Spiral& spiral, long k) {
  const Vec3 dv = spiral.direction(k).vec() - spiral.direction(k - 1).vec();
  const Vec2 w(dv[0], dv[1]);
  return w / w.norm();
}

}  // namespace conebill
