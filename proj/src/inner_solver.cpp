#include "dsgda/inner_solver.hpp"

#include <cmath>
#include <limits>

#include "dsgda/problems.hpp"

namespace dsgda {

namespace {

InnerResult ascend(const ScalarFn& f, const GradFn& grad, Eigen::VectorXd v,
                   std::optional<double> radius, const InnerOptions& opt) {
  v = project_ball(v, radius);
  double fv = f(v);
  double step = 1.0;
  double res = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Eigen::VectorXd g = grad(v);
    // Residual of the projected-gradient map at unit step.
    res = (project_ball(v + g, radius) - v).norm();
    if (res <= opt.tolerance) {
      converged = true;
      break;
    }
    step = std::min(step * 4.0, 1e8);
    bool moved = false;
    for (int bt = 0; bt < 80; ++bt) {
      const Eigen::VectorXd cand = project_ball(v + step * g, radius);
      const double fc = f(cand);
      const double gain = g.dot(cand - v);
      if (fc >= fv + 1e-4 * gain && std::isfinite(fc)) {
        moved = (cand - v).norm() > 0;
        v = cand;
        fv = fc;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return {v, fv, res, converged};
}

}  // namespace

InnerResult maximize_on_ball(const ScalarFn& f, const GradFn& grad,
                             const std::vector<Eigen::VectorXd>& starts,
                             std::optional<double> radius, const InnerOptions& opt) {
  InnerResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    InnerResult r = ascend(f, grad, s, radius, opt);
    if (r.value > best.value) best = r;
  }
  return best;
}

InnerResult minimize_on_ball(const ScalarFn& f, const GradFn& grad,
                             const std::vector<Eigen::VectorXd>& starts,
                             std::optional<double> radius, const InnerOptions& opt) {
  InnerResult r = maximize_on_ball([&](const Eigen::VectorXd& v) { return -f(v); },
                                   [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                                     return -grad(v);
                                   },
                                   starts, radius, opt);
  r.value = -r.value;
  return r;
}

std::vector<Eigen::VectorXd> spread_starts(const Eigen::VectorXd& hint,
                                           std::optional<double> radius, int count) {
  const int n = static_cast<int>(hint.size());
  const double scale = radius.value_or(std::max(1.0, 2.0 * hint.norm()));
  std::vector<Eigen::VectorXd> out;
  out.push_back(hint);
  out.push_back(Eigen::VectorXd::Zero(n));
  for (int j = 0; static_cast<int>(out.size()) < count; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    const int coord = (j / 2) % n;
    const double level = 1.0 - 0.25 * (j / (2 * n));
    v[coord] = ((j % 2 == 0) ? 1.0 : -1.0) * scale * std::max(level, 0.1);
    out.push_back(v);
  }
  return out;
}

}  // namespace dsgda
