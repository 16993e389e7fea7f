#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsgda/data.hpp"
#include "dsgda/engine.hpp"
#include "dsgda/inner_solver.hpp"
#include "dsgda/problems.hpp"
#include "dsgda/topology.hpp"

namespace dsgda {

// Distance between the two runs' agent averages. `k` counts the local steps
// already taken in round t; the entry with after_gossip set follows the mixing
// step of round t. The first entry (t = 1, k = 0) is the shared start.
struct DeltaRecord {
  int t = 0;
  int k = 0;
  bool after_gossip = false;
  double delta = 0.0;
};

struct CoupledTrace {
  Trajectory traj;
  Trajectory traj_prime;
  std::vector<DeltaRecord> delta;
  std::uint64_t seed = 0;
};

// Both runs share one sample stream and the zero start. Recording is raised to
// the averages level when the config asks for less.
CoupledTrace run_coupled(const MinimaxProblem& problem, const NeighborPair& pair,
                         const MixingMatrix& W, const Schedule& schedule, RunConfig config);

enum class OutputKind { kFinal, kAveraged };
std::string to_string(OutputKind k);
OutputKind parse_output_kind(const std::string& name);

struct OutputPair {
  Vec x, y;      // output on S
  Vec xp, yp;    // output on S'
};
OutputPair outputs(const CoupledTrace& trace, OutputKind kind = OutputKind::kFinal);

double argument_stability(const CoupledTrace& trace, OutputKind kind = OutputKind::kFinal);
double primal_stability(const CoupledTrace& trace, OutputKind kind = OutputKind::kFinal);
// (|x - x'|^2, |y - y'|^2)
std::pair<double, double> argument_squared_split(const CoupledTrace& trace,
                                                 OutputKind kind = OutputKind::kFinal);

struct WeakStabilityEstimate {
  double value = 0.0;
  double residual = 0.0;  // worst inner-solver residual, 0 when solved in closed form
  bool converged = true;
  std::string method;     // "analytic" or "inner-solver"
  int probes = 0;
};

// Maximizes over the probe set; the expectation over the algorithm's
// randomness is the mean over `traces`, taken inside both inner sups.
WeakStabilityEstimate weak_stability_estimate(std::span<const CoupledTrace> traces,
                                              const MinimaxProblem& problem,
                                              std::span<const Sample> probes,
                                              const InnerOptions& budget = {},
                                              OutputKind kind = OutputKind::kFinal);
WeakStabilityEstimate weak_stability_estimate(const CoupledTrace& trace,
                                              const MinimaxProblem& problem,
                                              std::span<const Sample> probes,
                                              const InnerOptions& budget = {},
                                              OutputKind kind = OutputKind::kFinal);

// Union of both datasets plus `fresh` new draws.
std::vector<Sample> default_probes(const MinimaxProblem& problem, const NeighborPair& pair,
                                   int fresh, std::uint64_t seed);

// The samples whose average defines an objective. For problems whose risks
// depend only on the mean payload, a single mean sample stands in.
struct ObjectiveSet {
  std::vector<Sample> samples;
  bool population = false;
  bool monte_carlo = false;

  static ObjectiveSet empirical(const MinimaxProblem& problem, const DistributedDataset& S);
  static ObjectiveSet population_of(const MinimaxProblem& problem, int m, int mc_samples,
                                    std::uint64_t seed);
};

struct RiskValue {
  double value = 0.0;
  std::string method;     // "analytic", "inner-solver" or "monte-carlo"
  double residual = 0.0;
  bool converged = true;
  double std_error = 0.0;  // Monte-Carlo batch-mean standard error
};

RiskValue weak_pd_risk(const Vec& x, const Vec& y, const MinimaxProblem& problem,
                       const ObjectiveSet& scope, const InnerOptions& budget = {});
RiskValue excess_primal_risk(const Vec& x, const MinimaxProblem& problem,
                             const ObjectiveSet& scope, const InnerOptions& budget = {});

struct PopulationScope {
  int mc_samples = 20000;  // ignored when the problem is mean reducible
  int batches = 8;
  std::uint64_t seed = 0x90b5;
};

struct RiskReport {
  RiskValue weak_pd_empirical;
  RiskValue weak_pd_population;
  RiskValue excess_primal_empirical;
  RiskValue excess_primal_population;
  double weak_gap = 0.0;
  double excess_primal_gap = 0.0;
  // Upper bounds on the gaps implied by a measured stability; NaN without one.
  double weak_gap_bound = 0.0;
  double excess_primal_gap_bound = 0.0;
  double strong_gap_bound = 0.0;
};

// `argument_eps` and `primal_eps` are measured stabilities (NaN to skip the
// bound columns). Excess primal quantities are skipped for mu = 0 problems
// unless `with_primal` is set.
RiskReport generalization_gaps(const Vec& x, const Vec& y, const MinimaxProblem& problem,
                               const DistributedDataset& S, const PopulationScope& scope,
                               double argument_eps, double primal_eps, bool with_primal,
                               const InnerOptions& budget = {});

struct MeasureStats {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};
MeasureStats summarize(const std::vector<double>& values);

struct StabilityReport {
  MeasureStats argument;
  MeasureStats argument_sq_x;
  MeasureStats argument_sq_y;
  MeasureStats primal;
  WeakStabilityEstimate weak;
  int repeats = 0;
};

// Aggregates traces produced from independent seeds. The weak estimate is
// computed only when `probes` is nonempty.
StabilityReport stability_report(std::span<const CoupledTrace> traces,
                                 const MinimaxProblem& problem, std::span<const Sample> probes,
                                 OutputKind kind = OutputKind::kFinal,
                                 const InnerOptions& budget = {});

}  // namespace dsgda
