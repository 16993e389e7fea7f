#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/engine.hpp"
#include "dsgda/problems.hpp"
#include "dsgda/topology.hpp"

namespace dsgda {

struct BoundInputs {
  std::optional<double> G, L, mu, rho, M;
  double lambda = 0.0;
  double C_lambda = 0.0;
  double C_lambda_sq = 0.0;
  int T = 1, K = 1, m = 1, n = 1;
  std::optional<double> B_x, B_y;
  Schedule schedule;

  // 2 mu^3 L^2 / (mu^4 - 32 L^2); sign not guaranteed.
  double b_const() const;
  double kappa() const;
};

// Fills constants from a problem and a topology. The C-constants are taken at
// the schedule's alpha when it lies in (1/2, 1], else at alpha = 1.
BoundInputs make_bound_inputs(const ProblemSpec& spec, const MixingMatrix& W,
                              const Schedule& schedule, int T, int K, int n);

enum class ConsensusCase { kFixed, kDecayK, kDecayT, kDecayTK, kLocalSgda };
std::string to_string(ConsensusCase c);
// Case implied by the schedule shape.
ConsensusCase consensus_case_for(const Schedule& s);

double consensus_bound(const BoundInputs& in, int t, int k, ConsensusCase c);

enum class ArgumentForm { kGeneral, kFixedClosed, kDecayingClosed, kCcCorollary };
std::string to_string(ArgumentForm f);

using ConsensusFn = std::function<double(int t, int k)>;

// The master recursion with a per-(t, k) consensus bound.
double argument_stability_general(const BoundInputs& in, const ConsensusFn& delta);
double argument_stability_bound(const BoundInputs& in, ArgumentForm form);

enum class RateForm { kFixed, kDecaying };

double weak_pd_empirical_bound(const BoundInputs& in, RateForm form);
double weak_pd_population_bound(const BoundInputs& in, RateForm form);

double primal_stability_bound(const BoundInputs& in, double ep_empirical_sup);

enum class PrimalForm { kEmpirical, kPopulation, kGap };

struct FlaggedValue {
  double value = 0.0;
  bool valid = true;
  std::string note;
};

// `epsilon` is the primal stability used by the gap form.
FlaggedValue excess_primal_bound(const BoundInputs& in, PrimalForm form, double epsilon = 0.0);

double weak_stability_bound(const BoundInputs& in, RateForm form);

struct ConnectionMultipliers {
  double weak_gap = 0.0;
  double excess_primal_gap = 0.0;
  double strong_gap = 0.0;
};
ConnectionMultipliers connection_multipliers(const BoundInputs& in, double epsilon);

struct BoundEntry {
  std::string id;
  double value = 0.0;
  bool valid = false;
  std::string note;
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  const BoundEntry* find(const std::string& id) const;
};

// Evaluates every bound whose preconditions can be checked from `in`;
// failed preconditions become invalid entries carrying the reason.
BoundReport bound_report(const BoundInputs& in, double epsilon = 0.0,
                         double ep_empirical_sup = 0.0);

}  // namespace dsgda
