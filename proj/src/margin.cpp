#include "adgac/margin.hpp"

#include <limits>

namespace adgac {

Halfspace Halfspace::from(const Eigen::VectorXd& w) {
  const double norm = w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("Halfspace: zero or non-finite weights");
  return Halfspace{w / norm};
}

double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double denom = u.norm() * v.norm();
  if (!(denom > 0.0)) throw std::invalid_argument("angle_between: zero vector");
  return std::acos(std::clamp(u.dot(v) / denom, -1.0, 1.0));
}

MarginSchedule MarginSchedule::make(double epsilon, const TunableConstants& constants) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("margin: epsilon must lie in (0, 1)");
  constants.validate();
  MarginSchedule s;
  s.constants = constants;
  s.M = std::max(2.0 / (constants.c2 * std::acos(-1.0)), 2.0);
  s.kappa_prec = 1.0 / (4.0 * constants.c1_prime * s.M);
  if (!(s.kappa_prec < 0.5)) throw std::invalid_argument("margin: c1_prime too small, precision must be < 1/2");
  s.rounds = std::max(1, static_cast<int>(std::ceil(std::log(4.0 / epsilon))));
  return s;
}

std::size_t MarginSchedule::n(int k, int dimension, double epsilon, double delta,
                              const NoiseModel& noise) const {
  if (k < 1) throw std::invalid_argument("margin: round must be >= 1");
  const double d = dimension;
  const double lg = std::log(d * k / delta);
  double n = d / b(k) * lg * lg * lg;
  if (!noise.adversarial) n += std::pow(1.0 / epsilon, 2.0 * noise.kappa - 1.0) * std::log(1.0 / delta);
  return static_cast<std::size_t>(std::ceil(constants.margin_n_multiplier * n));
}

double hinge_loss(const Eigen::VectorXd& w, const HingeData& data, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("hinge_loss: tau must be positive");
  if (data.size() == 0) throw std::invalid_argument("hinge_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += hinge_loss(w, data.points.col(static_cast<Eigen::Index>(i)), data.labels[i], tau);
  }
  return total / static_cast<double>(data.size());
}

Eigen::VectorXd hinge_subgradient(const Eigen::VectorXd& w, const HingeData& data, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("hinge_subgradient: tau must be positive");
  if (data.size() == 0) throw std::invalid_argument("hinge_subgradient: empty batch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.points.col(static_cast<Eigen::Index>(i));
    const double y = data.labels[i];
    if (y * w.dot(x) < tau) g -= y * x;
  }
  return g / (tau * static_cast<double>(data.size()));
}

double zero_one_error(const Eigen::VectorXd& w, const HingeData& data) {
  if (data.size() == 0) throw std::invalid_argument("zero_one_error: empty batch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (sign_label(w.dot(data.points.col(static_cast<Eigen::Index>(i)))) != data.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

bool BallIntersection::contains(const Eigen::VectorXd& v, double slack) const {
  if (v.norm() > 1.0 + slack) return false;
  return !std::isfinite(radius) || (v - center).norm() <= radius + slack;
}

namespace {

Eigen::VectorXd project_ball(const Eigen::VectorXd& u, const Eigen::VectorXd& c, double radius) {
  const Eigen::VectorXd diff = u - c;
  const double norm = diff.norm();
  if (norm <= radius) return u;
  return c + diff * (radius / norm);
}

bool has_second_ball(const BallIntersection& region) { return std::isfinite(region.radius); }

/// A strictly feasible point: the unit-norm center pulled inward by half of min(r, 1).
Eigen::VectorXd interior_point(const BallIntersection& region, Eigen::Index dim) {
  if (!has_second_ball(region)) return Eigen::VectorXd::Zero(dim);
  if (!(region.radius > 0.0)) throw std::invalid_argument("feasible region: radius must be positive");
  if (std::abs(region.center.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("feasible region: center must have unit norm");
  }
  const double s = std::min(region.radius, 1.0) / 2.0;
  return (1.0 - s) * region.center;
}

}  // namespace

Eigen::VectorXd project_to_feasible(const Eigen::VectorXd& v, const BallIntersection& region,
                                    int max_alternations, double tol) {
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(v.size());
  if (!has_second_ball(region)) return project_ball(v, origin, 1.0);
  Eigen::VectorXd x = v;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd q = Eigen::VectorXd::Zero(v.size());
  for (int i = 0; i < max_alternations; ++i) {
    const Eigen::VectorXd y = project_ball(x + p, origin, 1.0);
    p = x + p - y;
    const Eigen::VectorXd next = project_ball(y + q, region.center, region.radius);
    q = y + q - next;
    const double moved = (next - x).norm();
    x = next;
    if (moved < tol) break;
  }
  if (region.contains(x)) return x;
  // Dykstra stopped early: pull back along the segment towards an interior point.
  const Eigen::VectorXd inner = interior_point(region, v.size());
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (region.contains(inner + mid * (x - inner), 0.0) ? lo : hi) = mid;
  }
  return inner + lo * (x - inner);
}

namespace {

/// min sum(xi) s.t. xi >= 0, xi >= tau - a_i . v, |v| < 1, |v - c| < r, solved with a log barrier.
/// The slack block is eliminated so each Newton step solves a d x d system.
class HingeBarrier {
 public:
  HingeBarrier(const HingeData& data, const BallIntersection& region, double tau)
      : region_(region), tau_(tau), a_(data.points) {
    for (Eigen::Index i = 0; i < a_.cols(); ++i) a_.col(i) *= static_cast<double>(data.labels[static_cast<std::size_t>(i)]);
    constraints_ = 2.0 * static_cast<double>(a_.cols()) + 1.0 + (has_second_ball(region) ? 1.0 : 0.0);
  }

  double constraints() const { return constraints_; }

  double value(double t, const Eigen::VectorXd& v, const Eigen::VectorXd& xi) const {
    const Eigen::ArrayXd s = xi.array() - tau_ + (a_.transpose() * v).array();
    if ((xi.array() <= 0.0).any() || (s <= 0.0).any()) return kInf;
    const double unit = 1.0 - v.squaredNorm();
    if (unit <= 0.0) return kInf;
    double f = t * xi.sum() - xi.array().log().sum() - s.log().sum() - std::log(unit);
    if (has_second_ball(region_)) {
      const double ball = region_.radius * region_.radius - (v - region_.center).squaredNorm();
      if (ball <= 0.0) return kInf;
      f -= std::log(ball);
    }
    return f;
  }

  /// Newton direction at (v, xi); returns the squared Newton decrement.
  double newton_step(double t, const Eigen::VectorXd& v, const Eigen::VectorXd& xi, Eigen::VectorXd& dv,
                     Eigen::VectorXd& dxi) const {
    const Eigen::Index d = v.size();
    const Eigen::ArrayXd s = xi.array() - tau_ + (a_.transpose() * v).array();
    const Eigen::ArrayXd inv_xi2 = xi.array().square().inverse();
    const Eigen::ArrayXd c = s.square().inverse();
    const Eigen::ArrayXd D = inv_xi2 + c;
    const Eigen::ArrayXd g_xi = t - xi.array().inverse() - s.inverse();

    Eigen::VectorXd g_v = -(a_ * s.inverse().matrix());
    // Reduced Hessian weights c - c^2 / D = c * (1/xi^2) / D stay non-negative.
    const Eigen::ArrayXd weight = c * inv_xi2 / D;
    Eigen::MatrixXd H = a_ * weight.matrix().asDiagonal() * a_.transpose();
    add_ball_terms(v, Eigen::VectorXd::Zero(d), 1.0, g_v, H);
    if (has_second_ball(region_)) add_ball_terms(v, region_.center, region_.radius * region_.radius, g_v, H);

    const Eigen::VectorXd rhs = -g_v + a_ * (c * g_xi / D).matrix();
    dv = H.ldlt().solve(rhs);
    dxi = ((-g_xi - c * (a_.transpose() * dv).array()) / D).matrix();
    return -(g_v.dot(dv) + g_xi.matrix().dot(dxi));
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  /// Gradient and Hessian of -log(r2 - |v - c|^2).
  static void add_ball_terms(const Eigen::VectorXd& v, const Eigen::VectorXd& center, double r2,
                             Eigen::VectorXd& g, Eigen::MatrixXd& H) {
    const Eigen::VectorXd u = v - center;
    const double gap = r2 - u.squaredNorm();
    g += 2.0 * u / gap;
    H.diagonal().array() += 2.0 / gap;
    H.noalias() += (4.0 / (gap * gap)) * u * u.transpose();
  }

  BallIntersection region_;
  double tau_;
  Eigen::MatrixXd a_;  // columns y_i x_i
  double constraints_ = 0.0;
};

}  // namespace

HingeResult minimize_hinge(const HingeData& data, const BallIntersection& region, double tau,
                           const HingeOptions& options) {
  if (!(tau > 0.0)) throw std::invalid_argument("minimize_hinge: tau must be positive");
  if (data.size() == 0) throw std::invalid_argument("minimize_hinge: empty batch");
  if (!(options.slack > 0.0)) throw std::invalid_argument("minimize_hinge: slack must be positive");
  const Eigen::Index dim = data.points.rows();
  const auto n = static_cast<double>(data.size());

  HingeBarrier barrier(data, region, tau);
  Eigen::VectorXd v = interior_point(region, dim);
  Eigen::VectorXd xi(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double margin = data.labels[i] * v.dot(data.points.col(static_cast<Eigen::Index>(i)));
    xi(static_cast<Eigen::Index>(i)) = std::max(0.0, tau - margin) + tau;
  }

  // Loss gap of an exact center is constraints / (t n tau).
  const double target_t = barrier.constraints() / (options.slack * n * tau);
  double t = std::min(target_t, barrier.constraints() / std::max(xi.sum(), tau));
  constexpr double growth = 10.0;
  HingeResult out;
  Eigen::VectorXd dv;
  Eigen::VectorXd dxi;
  bool converged = false;
  while (out.iterations < options.max_newton) {
    // Centering by damped Newton.
    bool centered = false;
    while (out.iterations < options.max_newton) {
      const double decrement = barrier.newton_step(t, v, xi, dv, dxi);
      ++out.iterations;
      if (!(decrement >= 0.0) || decrement / 2.0 <= 1e-10) {
        centered = true;
        break;
      }
      const double f0 = barrier.value(t, v, xi);
      double step = 1.0;
      double f1 = barrier.value(t, v + step * dv, xi + step * dxi);
      while (!(f1 <= f0 - 0.25 * step * decrement) && step > 1e-20) {
        step *= 0.5;
        f1 = barrier.value(t, v + step * dv, xi + step * dxi);
      }
      if (step <= 1e-20) {
        centered = true;  // no further progress is representable
        break;
      }
      v += step * dv;
      xi += step * dxi;
    }
    if (!centered) break;
    if (t >= target_t) {
      converged = true;
      break;
    }
    t = std::min(t * growth, target_t);
  }
  out.v = v;
  out.loss = hinge_loss(v, data, tau);
  out.gap_bound = barrier.constraints() / (t * n * tau);
  out.degraded = !converged;
  return out;
}

HingeResult minimize_hinge_subgradient(const HingeData& data, const BallIntersection& region,
                                       double tau, const HingeOptions& options) {
  if (data.size() == 0) throw std::invalid_argument("minimize_hinge_subgradient: empty batch");
  const Eigen::Index dim = data.points.rows();
  const double diameter = has_second_ball(region) ? std::min(2.0, 2.0 * region.radius) : 2.0;
  Eigen::VectorXd v = interior_point(region, dim);
  HingeResult out;
  out.v = v;
  out.loss = hinge_loss(v, data, tau);
  const int window = std::max(1, options.max_subgradient / 10);
  int last_improvement = 0;
  for (int j = 1; j <= options.max_subgradient; ++j) {
    const Eigen::VectorXd g = hinge_subgradient(v, data, tau);
    const double norm = g.norm();
    if (norm == 0.0) break;  // zero subgradient: v is optimal
    v = project_to_feasible(v - (diameter / std::sqrt(static_cast<double>(j))) * g / norm, region);
    const double loss = hinge_loss(v, data, tau);
    if (loss < out.loss) {
      out.loss = loss;
      out.v = v;
      last_improvement = j;
    }
    out.iterations = j;
  }
  out.degraded = out.iterations == options.max_subgradient && out.iterations - last_improvement >= window &&
                 out.loss > 0.0;
  out.gap_bound = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace adgac
