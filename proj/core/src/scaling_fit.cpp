#include "permqfi/scaling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

constexpr double kGradientTol = 1e-10;
constexpr std::size_t kMaxIterations = 2000;

struct Problem {
  Eigen::VectorXd x;  // N / max N
  Eigen::VectorXd y;  // y / max |y|
};

struct Candidate {
  Eigen::Vector3d p;  // (a, b, c) on the normalised problem
  double cost = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

Eigen::VectorXd powers(const Eigen::VectorXd& x, double b) {
  return x.array().pow(b).matrix();
}

double cost_of(const Problem& pr, const Eigen::Vector3d& p) {
  const Eigen::VectorXd r = p[0] * powers(pr.x, p[1]) + Eigen::VectorXd::Constant(pr.x.size(), p[2]) - pr.y;
  const double c = 0.5 * r.squaredNorm();
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

// a and c minimising the residual at fixed b
Eigen::Vector3d linear_start(const Problem& pr, double b) {
  Eigen::MatrixXd m(pr.x.size(), 2);
  m.col(0) = powers(pr.x, b);
  m.col(1).setOnes();
  const Eigen::Vector2d ac = m.colPivHouseholderQr().solve(pr.y);
  return {ac[0], b, ac[1]};
}

Candidate levenberg_marquardt(const Problem& pr, Eigen::Vector3d p) {
  Candidate out;
  const Eigen::Index n = pr.x.size();
  const Eigen::VectorXd logx = pr.x.array().log().matrix();
  double cost = cost_of(pr, p);
  double mu = 1e-3;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd xb = powers(pr.x, p[1]);
    const Eigen::VectorXd r = p[0] * xb + Eigen::VectorXd::Constant(n, p[2]) - pr.y;
    Eigen::MatrixXd jac(n, 3);
    jac.col(0) = xb;
    jac.col(1) = p[0] * xb.cwiseProduct(logx);
    jac.col(2).setOnes();
    const Eigen::Vector3d grad = jac.transpose() * r;
    out.iterations = it;
    if (grad.lpNorm<Eigen::Infinity>() < kGradientTol) {
      out.converged = true;
      break;
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    bool improved = false;
    while (mu < 1e20) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += mu * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d step = damped.ldlt().solve(-grad);
      const Eigen::Vector3d trial = p + step;
      const double trial_cost = cost_of(pr, trial);
      if (trial_cost < cost) {
        p = trial;
        cost = trial_cost;
        mu = std::max(mu / 3.0, 1e-15);
        improved = true;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) {
      // no descent step left at machine precision: accept if the gradient is small in
      // relative terms
      out.converged = grad.lpNorm<Eigen::Infinity>() < 1e-8;
      break;
    }
  }
  out.p = p;
  out.cost = cost;
  return out;
}

std::optional<double> loglog_slope(const Problem& pr) {
  const double ymin = pr.y.minCoeff();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (Eigen::Index i = 0; i < pr.x.size(); ++i) {
    const double d = pr.y[i] - ymin;
    if (d <= 0.0) continue;
    const double lx = std::log(pr.x[i]);
    const double ly = std::log(d);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return std::nullopt;
  const double slope = (count * sxy - sx * sy) / denom;
  if (!std::isfinite(slope)) return std::nullopt;
  return slope;
}

}  // namespace

ScalingFit scaling_fit(std::span<const double> n_values, std::span<const double> y) {
  if (n_values.size() != y.size()) throw InvalidArgument("N and y lists differ in length");
  if (n_values.size() < 4) throw InvalidArgument("scaling fit needs at least 4 points");
  std::vector<double> sorted(n_values.begin(), n_values.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("scaling fit needs distinct N values");
  }
  if (sorted.front() <= 0.0) throw InvalidArgument("N values must be positive");

  const auto n = static_cast<Eigen::Index>(y.size());
  Problem pr{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  double ymax = 0.0;
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("scaling fit input is not finite");
    ymax = std::max(ymax, std::abs(v));
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (ymax == 0.0 || (*hi - *lo) <= 1e-9 * ymax) throw NumericalError("degenerate data: y does not vary with N");

  const double nref = sorted.back();
  for (Eigen::Index i = 0; i < n; ++i) {
    pr.x[i] = n_values[static_cast<std::size_t>(i)] / nref;
    pr.y[i] = y[static_cast<std::size_t>(i)] / ymax;
  }

  std::vector<double> starts = {0.5, 1.0, 1.5, 2.0, 2.5};
  if (auto s = loglog_slope(pr)) starts.push_back(*s);

  Candidate best;
  bool found = false;
  for (double b0 : starts) {
    Candidate c = levenberg_marquardt(pr, linear_start(pr, b0));
    if (!c.converged || !std::isfinite(c.p[1])) continue;
    if (!found || c.cost < best.cost) {
      best = c;
      found = true;
    }
  }
  if (!found) throw NumericalError("scaling fit did not converge from any start");

  ScalingFit fit;
  fit.b = best.p[1];
  fit.a = best.p[0] * ymax / std::pow(nref, fit.b);
  fit.c = best.p[2] * ymax;
  fit.n_values.assign(n_values.begin(), n_values.end());
  fit.iterations = best.iterations;
  double r2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = fit.a * std::pow(n_values[i], fit.b) + fit.c - y[i];
    r2 += r * r;
  }
  fit.residual_norm = std::sqrt(r2);
  return fit;
}

}  // namespace permqfi
