#include "dsgda/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsgda/errors.hpp"
#include "dsgda/rng.hpp"
#include "dsgda/stats.hpp"

namespace dsgda {

namespace {

constexpr std::uint64_t kProbeTag = 0x9b0eULL;

double joint_distance(const Vec& x, const Vec& y, const Vec& xp, const Vec& yp) {
  return std::sqrt((x - xp).squaredNorm() + (y - yp).squaredNorm());
}

}  // namespace

CoupledTrace run_coupled(const MinimaxProblem& problem, const NeighborPair& pair,
                         const MixingMatrix& W, const Schedule& schedule, RunConfig config) {
  if (config.record == RecordLevel::kFinal) config.record = RecordLevel::kAverages;
  CoupledTrace out;
  out.seed = config.seed;
  out.traj = run(problem, pair.S, W, schedule, config);
  out.traj_prime = run(problem, pair.S_prime, W, schedule, config);

  const auto& a = out.traj;
  const auto& b = out.traj_prime;
  const int K = config.K;
  out.delta.reserve(static_cast<std::size_t>(config.T) * (K + 1) + 1);
  out.delta.push_back({1, 0, false, 0.0});
  for (int t = 1; t <= config.T; ++t) {
    for (int k = 1; k < K; ++k) {
      const std::size_t idx = static_cast<std::size_t>(t - 1) * K + k;
      out.delta.push_back({t, k, false,
                           joint_distance(a.steps[idx].x_bar, a.steps[idx].y_bar,
                                          b.steps[idx].x_bar, b.steps[idx].y_bar)});
    }
    const auto& ra = a.rounds[t - 1];
    const auto& rb = b.rounds[t - 1];
    out.delta.push_back({t, K, false,
                         joint_distance(ra.x_bar_local, ra.y_bar_local, rb.x_bar_local,
                                        rb.y_bar_local)});
    out.delta.push_back({t, K, true,
                         joint_distance(ra.x_bar_comm, ra.y_bar_comm, rb.x_bar_comm,
                                        rb.y_bar_comm)});
  }
  return out;
}

std::string to_string(OutputKind k) { return k == OutputKind::kFinal ? "final" : "averaged"; }

OutputKind parse_output_kind(const std::string& name) {
  if (name == "final") return OutputKind::kFinal;
  if (name == "averaged") return OutputKind::kAveraged;
  throw std::invalid_argument("unknown output kind '" + name + "' (expected final or averaged)");
}

OutputPair outputs(const CoupledTrace& trace, OutputKind kind) {
  if (kind == OutputKind::kFinal) {
    return {trace.traj.x_final, trace.traj.y_final, trace.traj_prime.x_final,
            trace.traj_prime.y_final};
  }
  const AveragedOutput a = averaged_output(trace.traj);
  const AveragedOutput b = averaged_output(trace.traj_prime);
  return {a.x, a.y, b.x, b.y};
}

double argument_stability(const CoupledTrace& trace, OutputKind kind) {
  const OutputPair o = outputs(trace, kind);
  return joint_distance(o.x, o.y, o.xp, o.yp);
}

double primal_stability(const CoupledTrace& trace, OutputKind kind) {
  const OutputPair o = outputs(trace, kind);
  return (o.x - o.xp).norm();
}

std::pair<double, double> argument_squared_split(const CoupledTrace& trace, OutputKind kind) {
  const OutputPair o = outputs(trace, kind);
  return {(o.x - o.xp).squaredNorm(), (o.y - o.yp).squaredNorm()};
}

// ---------------------------------------------------------------------------

namespace {

struct InnerSup {
  double value = 0.0;
  double residual = 0.0;
  bool converged = true;
  bool analytic = false;
};

// sup over v of mean_r [f(u_r, v) - f(u'_r, v)], where `first` says whether u
// is the x block.
InnerSup difference_sup(const MinimaxProblem& p, const std::vector<Vec>& u,
                        const std::vector<Vec>& up, const Sample& s, bool first,
                        const InnerOptions& opt) {
  const ProblemSpec& spec = p.spec();
  const double R = static_cast<double>(u.size());
  Vec du = Vec::Zero(u.front().size());
  for (std::size_t r = 0; r < u.size(); ++r) du += u[r] - up[r];
  du /= R;

  // Terms that do not involve v, evaluated at v = 0.
  auto constant = [&] {
    const int dv = first ? spec.d_y : spec.d_x;
    const Vec zero = Vec::Zero(dv);
    double acc = 0;
    for (std::size_t r = 0; r < u.size(); ++r) {
      acc += first ? p.value(u[r], zero, s) - p.value(up[r], zero, s)
                   : p.value(zero, u[r], s) - p.value(zero, up[r], s);
    }
    return acc / R;
  };

  if (p.kind() == ProblemKind::kQuadScSc) {
    const double kappa = p.params().coupling;
    const double radius = first ? *spec.B_y : *spec.B_x;
    return {constant() + std::abs(kappa) * radius * du.norm(), 0.0, true, true};
  }
  if (p.kind() == ProblemKind::kBilinearCC) {
    const Mat& A = p.params().matrix;
    const double lin = first ? (A.transpose() * du).norm() * *spec.B_y : (A * du).norm() * *spec.B_x;
    return {constant() + lin, 0.0, true, true};
  }

  const std::optional<double> radius = first ? spec.B_y : spec.B_x;
  const int dv = first ? spec.d_y : spec.d_x;
  auto f = [&](const Vec& v) {
    double acc = 0;
    for (std::size_t r = 0; r < u.size(); ++r) {
      acc += first ? p.value(u[r], v, s) - p.value(up[r], v, s)
                   : p.value(v, u[r], s) - p.value(v, up[r], s);
    }
    return acc / R;
  };
  auto g = [&](const Vec& v) {
    Vec acc = Vec::Zero(dv);
    for (std::size_t r = 0; r < u.size(); ++r) {
      if (first) {
        acc += p.grad(u[r], v, s).gy - p.grad(up[r], v, s).gy;
      } else {
        acc += p.grad(v, u[r], s).gx - p.grad(v, up[r], s).gx;
      }
    }
    return Vec(acc / R);
  };
  const InnerResult res =
      maximize_on_ball(f, g, spread_starts(Vec::Zero(dv), radius, opt.starts), radius, opt);
  return {res.value, res.residual, res.converged, false};
}

}  // namespace

WeakStabilityEstimate weak_stability_estimate(std::span<const CoupledTrace> traces,
                                              const MinimaxProblem& problem,
                                              std::span<const Sample> probes,
                                              const InnerOptions& budget, OutputKind kind) {
  if (traces.empty()) throw std::invalid_argument("weak stability needs at least one trace");
  if (probes.empty()) throw std::invalid_argument("weak stability needs a nonempty probe set");
  if (budget.max_iterations <= 0) throw std::invalid_argument("inner solver budget must be positive");
  std::vector<Vec> xs, xps, ys, yps;
  for (const auto& tr : traces) {
    OutputPair o = outputs(tr, kind);
    xs.push_back(std::move(o.x));
    xps.push_back(std::move(o.xp));
    ys.push_back(std::move(o.y));
    yps.push_back(std::move(o.yp));
  }
  WeakStabilityEstimate est;
  est.value = -std::numeric_limits<double>::infinity();
  est.probes = static_cast<int>(probes.size());
  bool analytic = true;
  for (const Sample& s : probes) {
    problem.check_sample(s);
    const InnerSup a = difference_sup(problem, xs, xps, s, true, budget);
    const InnerSup b = difference_sup(problem, ys, yps, s, false, budget);
    est.value = std::max(est.value, a.value + b.value);
    est.residual = std::max({est.residual, a.residual, b.residual});
    est.converged = est.converged && a.converged && b.converged;
    analytic = analytic && a.analytic && b.analytic;
  }
  est.method = analytic ? "analytic" : "inner-solver";
  return est;
}

WeakStabilityEstimate weak_stability_estimate(const CoupledTrace& trace,
                                              const MinimaxProblem& problem,
                                              std::span<const Sample> probes,
                                              const InnerOptions& budget, OutputKind kind) {
  return weak_stability_estimate(std::span<const CoupledTrace>(&trace, 1), problem, probes,
                                 budget, kind);
}

std::vector<Sample> default_probes(const MinimaxProblem& problem, const NeighborPair& pair,
                                   int fresh, std::uint64_t seed) {
  std::vector<Sample> out = pair.S.pooled();
  for (int i = 0; i < pair.S.m(); ++i) {
    out.push_back(pair.S_prime.at(i, pair.replaced[i]));
  }
  const auto extra = population_draws(problem, pair.S.m(), fresh, hash_key(kProbeTag, seed));
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

// ---------------------------------------------------------------------------

ObjectiveSet ObjectiveSet::empirical(const MinimaxProblem& problem, const DistributedDataset& S) {
  ObjectiveSet o;
  const auto pooled = S.pooled();
  if (problem.mean_reducible()) {
    o.samples.push_back(mean_sample(pooled));
  } else {
    o.samples = pooled;
  }
  return o;
}

ObjectiveSet ObjectiveSet::population_of(const MinimaxProblem& problem, int m, int mc_samples,
                                         std::uint64_t seed) {
  ObjectiveSet o;
  o.population = true;
  if (problem.mean_reducible()) {
    o.samples.push_back(Sample{problem.population_mean(m)});
  } else {
    if (mc_samples < 1) throw std::invalid_argument("Monte-Carlo budget must be positive");
    o.samples = population_draws(problem, m, mc_samples, seed);
    o.monte_carlo = true;
  }
  return o;
}

namespace {

struct Extremum {
  double value = 0.0;
  Vec arg;
  double residual = 0.0;
  bool converged = true;
  bool analytic = false;
};

// sup over y' of F(x, y'); never below F(x, y_hint).
Extremum sup_y(const MinimaxProblem& p, const Vec& x, const Vec& y_hint,
               std::span<const Sample> obj, const InnerOptions& opt) {
  const double at_hint = objective_value(p, x, y_hint, obj);
  if (const auto br = p.best_response_y(x, obj)) {
    const double v = objective_value(p, x, *br, obj);
    if (v >= at_hint) return {v, *br, 0.0, true, true};
    return {at_hint, y_hint, 0.0, true, true};
  }
  auto f = [&](const Vec& y) { return objective_value(p, x, y, obj); };
  auto g = [&](const Vec& y) { return objective_grad(p, x, y, obj).gy; };
  const InnerResult r =
      maximize_on_ball(f, g, spread_starts(y_hint, p.spec().B_y, opt.starts), p.spec().B_y, opt);
  if (r.value >= at_hint) return {r.value, r.arg, r.residual, r.converged, false};
  return {at_hint, y_hint, r.residual, r.converged, false};
}

// inf over x' of F(x', y); never above F(x_hint, y).
Extremum inf_x(const MinimaxProblem& p, const Vec& y, const Vec& x_hint,
               std::span<const Sample> obj, const InnerOptions& opt) {
  const double at_hint = objective_value(p, x_hint, y, obj);
  if (const auto br = p.best_response_x(y, obj)) {
    const double v = objective_value(p, *br, y, obj);
    if (v <= at_hint) return {v, *br, 0.0, true, true};
    return {at_hint, x_hint, 0.0, true, true};
  }
  auto f = [&](const Vec& x) { return objective_value(p, x, y, obj); };
  auto g = [&](const Vec& x) { return objective_grad(p, x, y, obj).gx; };
  const InnerResult r =
      minimize_on_ball(f, g, spread_starts(x_hint, p.spec().B_x, opt.starts), p.spec().B_x, opt);
  if (r.value <= at_hint) return {r.value, r.arg, r.residual, r.converged, false};
  return {at_hint, x_hint, r.residual, r.converged, false};
}

std::string method_tag(const ObjectiveSet& scope, bool analytic) {
  if (scope.monte_carlo) return "monte-carlo";
  return analytic ? "analytic" : "inner-solver";
}

}  // namespace

RiskValue weak_pd_risk(const Vec& x, const Vec& y, const MinimaxProblem& problem,
                       const ObjectiveSet& scope, const InnerOptions& budget) {
  problem.check_point(x, y);
  if (scope.samples.empty()) throw std::invalid_argument("objective set is empty");
  const Extremum hi = sup_y(problem, x, y, scope.samples, budget);
  const Extremum lo = inf_x(problem, y, x, scope.samples, budget);
  RiskValue out;
  out.value = hi.value - lo.value;
  out.residual = std::max(hi.residual, lo.residual);
  out.converged = hi.converged && lo.converged;
  out.method = method_tag(scope, hi.analytic && lo.analytic);
  return out;
}

RiskValue excess_primal_risk(const Vec& x, const MinimaxProblem& problem,
                             const ObjectiveSet& scope, const InnerOptions& budget) {
  const ProblemSpec& spec = problem.spec();
  problem.check_point(x, Vec::Zero(spec.d_y));
  if (scope.samples.empty()) throw std::invalid_argument("objective set is empty");
  std::span<const Sample> obj = scope.samples;
  const Vec y0 = Vec::Zero(spec.d_y);

  bool analytic = true;
  double residual = 0.0;
  bool converged = true;
  auto R = [&](const Vec& v) {
    const Extremum e = sup_y(problem, v, y0, obj, budget);
    analytic = analytic && e.analytic;
    residual = std::max(residual, e.residual);
    converged = converged && e.converged;
    return e;
  };
  const double at_x = R(x).value;

  double best = at_x;
  const bool convex_concave =
      spec.convexity == ConvexityClass::kScSc || spec.convexity == ConvexityClass::kCC;
  if (convex_concave && (problem.kind() == ProblemKind::kQuadScSc ||
                         problem.kind() == ProblemKind::kBilinearCC)) {
    // The primal part of a saddle minimizes R on convex-concave problems.
    const SaddleSolution sol = saddle(problem, obj, SolverBudget{});
    analytic = analytic && sol.method == "analytic";
    residual = std::max(residual, sol.method == "analytic" ? 0.0 : sol.residual);
    best = std::min(best, R(sol.x).value);
  } else {
    analytic = false;
    auto f = [&](const Vec& v) { return R(v).value; };
    auto g = [&](const Vec& v) {
      const Extremum e = R(v);
      return Vec(objective_grad(problem, v, e.arg, obj).gx);
    };
    const InnerResult r =
        minimize_on_ball(f, g, spread_starts(x, spec.B_x, budget.starts), spec.B_x, budget);
    residual = std::max(residual, r.residual);
    converged = converged && r.converged;
    best = std::min(best, r.value);
  }
  RiskValue out;
  out.value = at_x - best;
  out.residual = residual;
  out.converged = converged;
  out.method = method_tag(scope, analytic);
  return out;
}

namespace {

// Standard error of a Monte-Carlo risk from independent batch estimates.
template <typename Fn>
double batch_error(const ObjectiveSet& pop, int batches, Fn&& risk) {
  if (!pop.monte_carlo || batches < 2) return 0.0;
  const std::size_t per = pop.samples.size() / batches;
  if (per == 0) return 0.0;
  std::vector<double> vals;
  for (int b = 0; b < batches; ++b) {
    ObjectiveSet part;
    part.population = true;
    part.monte_carlo = true;
    part.samples.assign(pop.samples.begin() + b * per, pop.samples.begin() + (b + 1) * per);
    vals.push_back(risk(part).value);
  }
  return stddev(vals) / std::sqrt(static_cast<double>(batches));
}

}  // namespace

RiskReport generalization_gaps(const Vec& x, const Vec& y, const MinimaxProblem& problem,
                               const DistributedDataset& S, const PopulationScope& scope,
                               double argument_eps, double primal_eps, bool with_primal,
                               const InnerOptions& budget) {
  const ObjectiveSet emp = ObjectiveSet::empirical(problem, S);
  const ObjectiveSet pop = ObjectiveSet::population_of(problem, S.m(), scope.mc_samples, scope.seed);
  RiskReport rep;
  auto weak = [&](const ObjectiveSet& o) { return weak_pd_risk(x, y, problem, o, budget); };
  rep.weak_pd_empirical = weak(emp);
  rep.weak_pd_population = weak(pop);
  rep.weak_pd_population.std_error = batch_error(pop, scope.batches, weak);
  rep.weak_gap = rep.weak_pd_population.value - rep.weak_pd_empirical.value;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (with_primal) {
    auto ep = [&](const ObjectiveSet& o) { return excess_primal_risk(x, problem, o, budget); };
    rep.excess_primal_empirical = ep(emp);
    rep.excess_primal_population = ep(pop);
    rep.excess_primal_population.std_error = batch_error(pop, scope.batches, ep);
    rep.excess_primal_gap =
        rep.excess_primal_population.value - rep.excess_primal_empirical.value;
  } else {
    rep.excess_primal_empirical = {nan, "skipped", 0.0, true, 0.0};
    rep.excess_primal_population = {nan, "skipped", 0.0, true, 0.0};
    rep.excess_primal_gap = nan;
  }

  const ProblemSpec& spec = problem.spec();
  const double G = spec.G, L = spec.L, mu = spec.mu;
  const double mn = static_cast<double>(S.m()) * S.n();
  rep.weak_gap_bound = std::sqrt(2.0) * G * argument_eps;
  if (mu > 0) {
    const double r = L / mu;
    rep.excess_primal_gap_bound = G * std::sqrt(1 + r * r) * primal_eps + 4 * G * G / (mu * mn);
    rep.strong_gap_bound = G * std::sqrt(2 + 2 * r * r) * argument_eps;
  } else {
    rep.excess_primal_gap_bound = nan;
    rep.strong_gap_bound = nan;
  }
  return rep;
}

MeasureStats summarize(const std::vector<double>& values) {
  return {mean(values), stddev(values), static_cast<int>(values.size())};
}

StabilityReport stability_report(std::span<const CoupledTrace> traces,
                                 const MinimaxProblem& problem, std::span<const Sample> probes,
                                 OutputKind kind, const InnerOptions& budget) {
  std::vector<double> arg, sx, sy, pri;
  for (const auto& tr : traces) {
    arg.push_back(argument_stability(tr, kind));
    const auto [a, b] = argument_squared_split(tr, kind);
    sx.push_back(a);
    sy.push_back(b);
    pri.push_back(primal_stability(tr, kind));
  }
  StabilityReport rep;
  rep.repeats = static_cast<int>(traces.size());
  rep.argument = summarize(arg);
  rep.argument_sq_x = summarize(sx);
  rep.argument_sq_y = summarize(sy);
  rep.primal = summarize(pri);
  if (!probes.empty()) rep.weak = weak_stability_estimate(traces, problem, probes, budget, kind);
  return rep;
}

}  // namespace dsgda
