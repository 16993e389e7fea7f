#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dsgda {

struct InnerOptions {
  double tolerance = 1e-8;   // on the projected-gradient mapping
  int max_iterations = 20000;
  int starts = 8;
};

struct InnerResult {
  Eigen::VectorXd arg;
  double value = 0.0;
  double residual = 0.0;
  bool converged = false;
};

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Projected gradient ascent with backtracking, run from each start; the best
// finishing point wins. `radius` empty means unconstrained.
InnerResult maximize_on_ball(const ScalarFn& f, const GradFn& grad,
                             const std::vector<Eigen::VectorXd>& starts,
                             std::optional<double> radius, const InnerOptions& opt);

InnerResult minimize_on_ball(const ScalarFn& f, const GradFn& grad,
                             const std::vector<Eigen::VectorXd>& starts,
                             std::optional<double> radius, const InnerOptions& opt);

// Deterministic spread of starting points: the origin, the given hint, and
// points on a few coordinate directions scaled to the ball.
std::vector<Eigen::VectorXd> spread_starts(const Eigen::VectorXd& hint,
                                           std::optional<double> radius, int count);

}  // namespace dsgda
