#pragma once

// Line and reflection geometry shared by every cone simulator: oriented lines,
// their angular momenta m_ij = x^i v^j - x^j v^i, the squared distance to the
// origin (a first integral of any billiard inside a cone with apex O), the
// reflection law and numerically careful angles.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "conebill/errors.hpp"
#include "conebill/tolerances.hpp"

namespace conebill {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
using Vec2 = Vec<2>;
using Vec3 = Vec<3>;
using VecX = Vec<Eigen::Dynamic>;

template <int N>
class Direction {
 public:
  /// Wraps an already-normalized vector; throws ContractViolation otherwise.
  static Direction unit(const Vec<N>& v, double tol = kDefaultTolerances.unit_norm) {
    if (!v.allFinite()) throw ContractViolation("direction has non-finite components");
    if (std::abs(v.norm() - 1.0) > tol) throw ContractViolation("direction is not a unit vector");
    return Direction(v);
  }

  static Direction normalize(const Vec<N>& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ContractViolation("cannot normalize a zero or non-finite vector");
    return Direction(v / n);
  }

  const Vec<N>& vec() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  double operator[](Eigen::Index i) const { return v_[i]; }
  Direction operator-() const { return Direction(-v_); }

 private:
  explicit Direction(Vec<N> v) : v_(std::move(v)) {}
  Vec<N> v_;
};

template <int N>
struct OrientedLine {
  Vec<N> base;
  Direction<N> dir;

  Vec<N> at(double t) const { return base + t * dir.vec(); }

  /// The oriented line from `from` towards `to`.
  static OrientedLine through(const Vec<N>& from, const Vec<N>& to) {
    return OrientedLine{from, Direction<N>::normalize(to - from)};
  }
};

using Direction3 = Direction<3>;
using Line3 = OrientedLine<3>;
using LineX = OrientedLine<Eigen::Dynamic>;

/// m_ij for i < j, stored in lexicographic order (m_01, m_02, ..., m_{n-2,n-1}).
class AngularMomenta {
 public:
  explicit AngularMomenta(int n) : n_(n), m_(static_cast<std::size_t>(n * (n - 1) / 2), 0.0) {}

  int dim() const { return n_; }

  /// 0-based indices; antisymmetric, so (j, i) returns -m_ij.
  double operator()(int i, int j) const {
    if (i == j) return 0.0;
    return i < j ? m_[index(i, j)] : -m_[index(j, i)];
  }
  double& at(int i, int j) { return m_[index(i, j)]; }

  std::span<const double> values() const { return m_; }

  double sum_of_squares() const {
    double s = 0.0;
    for (double v : m_) s += v * v;
    return s;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i * n_ - i * (i + 1) / 2 + (j - i - 1));
  }

  int n_;
  std::vector<double> m_;
};

/// ad - bc with one rounding error (Kahan's fma scheme).
inline double det2(double a, double b, double c, double d) {
  const double w = b * c;
  const double e = std::fma(-b, c, w);
  const double f = std::fma(a, d, -w);
  return f + e;
}

template <int N>
AngularMomenta angular_momenta(const OrientedLine<N>& line) {
  const auto& x = line.base;
  const auto& v = line.dir.vec();
  const int n = static_cast<int>(x.size());
  if (v.size() != x.size()) throw ContractViolation("base and direction dimensions differ");
  AngularMomenta m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.at(i, j) = det2(x[i], v[i], x[j], v[j]);
  return m;
}

/// Squared distance from the line to the origin as the sum of squared momenta.
template <int N>
double line_distance_sq(const OrientedLine<N>& line) {
  return angular_momenta(line).sum_of_squares() / line.dir.vec().squaredNorm();
}

/// Same quantity through the projection formula ‖x‖² - <x,v>², evaluated as the
/// squared norm of the rejection of x from v (one refinement pass).
template <int N>
double line_distance_sq_projection(const OrientedLine<N>& line) {
  const auto& v = line.dir.vec();
  const double vv = v.squaredNorm();
  auto r = (line.base - (line.base.dot(v) / vv) * v).eval();
  r -= (r.dot(v) / vv) * v;
  return r.squaredNorm();
}

/// v' = v - 2<v,n>n. Throws GrazingError when |<v,n>| is below the grazing threshold.
template <int N>
Direction<N> reflect_direction(const Direction<N>& v, const Direction<N>& normal,
                               const Tolerances& tol = kDefaultTolerances) {
  const double vn = v.vec().dot(normal.vec());
  if (std::abs(vn) < tol.grazing) throw GrazingError("grazing incidence: |<v,n>| below threshold");
  return Direction<N>::normalize(v.vec() - 2.0 * vn * normal.vec());
}

/// Angle in [0, π] between two nonzero vectors, accurate near 0 and π:
/// 2·atan2(‖û - ŵ‖, ‖û + ŵ‖).
template <typename DerivedU, typename DerivedW>
double angle_between(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedW>& w) {
  const double nu = u.norm();
  const double nw = w.norm();
  if (!(nu > 0.0) || !(nw > 0.0)) throw ContractViolation("angle_between needs nonzero vectors");
  const auto uh = (u / nu).eval();
  const auto wh = (w / nw).eval();
  return 2.0 * std::atan2((uh - wh).norm(), (uh + wh).norm());
}

template <int N>
double angle_between(const Direction<N>& u, const Direction<N>& w) {
  return 2.0 * std::atan2((u.vec() - w.vec()).norm(), (u.vec() + w.vec()).norm());
}

// ---- Planar wedge -----------------------------------------------------------

/// ⌈π/θ⌉ for a wedge of opening θ ∈ (0, π).
int wedge_reflection_count(double theta);

/// Reflections of the complete billiard line through `start` (strictly inside
/// the wedge {0 < arg < θ}) with heading `direction_angle`, counted by
/// unfolding: the number of sector boundaries jθ swept by the straight line.
int wedge_unfolded_reflections(double theta, const Vec2& start, double direction_angle);

/// Same count by explicit reflection off the two sides, forwards and backwards.
int wedge_direct_reflections(double theta, const Vec2& start, double direction_angle,
                             int max_steps = 100000);

// ---- Reflection records and the α/θ recurrence ------------------------------

template <int N>
struct ReflectionRecord {
  Vec<N> vertex;
  Direction<N> incoming;
  Direction<N> outgoing;
  double alpha = 0.0;                  // angle(outgoing, vertex)
  std::optional<double> theta_to_next; // angle(vertex, next vertex)
};

template <int N>
ReflectionRecord<N> make_record(const Vec<N>& vertex, const Direction<N>& incoming,
                                const Direction<N>& outgoing,
                                std::optional<double> theta_to_next = std::nullopt) {
  return ReflectionRecord<N>{vertex, incoming, outgoing, angle_between(outgoing.vec(), vertex),
                             theta_to_next};
}

struct AlphaThetaReport {
  std::vector<double> recurrence;  // α_{k+1} - (α_k - θ_k)
  std::vector<double> sine_law;    // ‖p_k‖ sin α_k - R, R = dist(l_k, O)

  double max_recurrence() const;
  double max_sine_law() const;
};

template <int N>
AlphaThetaReport alpha_theta_residuals(std::span<const ReflectionRecord<N>> records) {
  if (records.size() < 2) throw ContractViolation("alpha_theta_residuals needs at least two records");
  AlphaThetaReport report;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const OrientedLine<N> line{r.vertex, r.outgoing};
    const double dist = std::sqrt(line_distance_sq(line));
    report.sine_law.push_back(r.vertex.norm() * std::sin(r.alpha) - dist);
    if (k + 1 < records.size()) {
      const double theta = r.theta_to_next ? *r.theta_to_next
                                           : angle_between(r.vertex, records[k + 1].vertex);
      report.recurrence.push_back(records[k + 1].alpha - (r.alpha - theta));
    }
  }
  return report;
}

inline double AlphaThetaReport::max_recurrence() const {
  double m = 0.0;
  for (double r : recurrence) m = std::max(m, std::abs(r));
  return m;
}

inline double AlphaThetaReport::max_sine_law() const {
  double m = 0.0;
  for (double r : sine_law) m = std::max(m, std::abs(r));
  return m;
}

// ---- Summation helper --------------------------------------------------------

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace conebill
