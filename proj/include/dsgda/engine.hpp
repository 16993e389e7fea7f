#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/data.hpp"
#include "dsgda/problems.hpp"
#include "dsgda/topology.hpp"

namespace dsgda {

enum class ScheduleKind { kFixed, kDecaying };

// eta^t_k = c for fixed, c / ((k+1)^alpha t^beta) for decaying; t >= 1, k >= 0.
struct Schedule {
  ScheduleKind kind = ScheduleKind::kFixed;
  double c = 0.01;
  double alpha = 0.0;
  double beta = 0.0;

  static Schedule fixed(double eta) { return {ScheduleKind::kFixed, eta, 0.0, 0.0}; }
  static Schedule decaying(double c, double alpha, double beta) {
    return {ScheduleKind::kDecaying, c, alpha, beta};
  }
};

double schedule_rate(const Schedule& s, int t, int k);
std::string describe(const Schedule& s);

enum class RecordLevel { kFinal, kAverages, kFull };

struct RunConfig {
  int T = 1;
  int K = 1;
  std::uint64_t seed = 0;
  bool project = false;  // project each local iterate onto the problem's balls
  RecordLevel record = RecordLevel::kAverages;
};

// Counter-based index stream: j^t_k(i) depends only on (seed, t, k, i).
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : seed_(seed) {}
  int index(int t, int k, int agent, int n) const;

 private:
  std::uint64_t seed_;
};

// Averages and consensus just before local step k of round t (k = 0..K-1).
struct StepRecord {
  int t = 0;
  int k = 0;
  double eta = 0.0;
  double consensus = 0.0;
  Vec x_bar;
  Vec y_bar;
};

// End-of-round quantities: after the last local step and after gossip.
struct RoundRecord {
  int t = 0;
  Vec x_bar_local;
  Vec y_bar_local;
  Vec x_bar_comm;
  Vec y_bar_comm;
  double consensus_local = 0.0;
  double consensus_comm = 0.0;
};

struct AgentStates {
  int t = 0;
  int k = 0;
  Mat X;
  Mat Y;
};

struct Trajectory {
  RecordLevel level = RecordLevel::kAverages;
  int T = 0;
  int K = 0;
  Vec x_final;  // agent average after the last gossip step
  Vec y_final;
  std::vector<StepRecord> steps;
  std::vector<RoundRecord> rounds;
  std::vector<AgentStates> agents;  // full level only, pre-step states
};

Trajectory run(const MinimaxProblem& problem, const DistributedDataset& S,
               const MixingMatrix& W, const Schedule& schedule, const RunConfig& config);

// Mean distance of the agents to their average, in the joint (x, y) norm.
double consensus(const Mat& X, const Mat& Y);
Vec row_mean(const Mat& X);

struct AveragedOutput {
  Vec x;
  Vec y;
};
AveragedOutput averaged_output(const Trajectory& traj);

void write_trace_csv(const std::string& path, const Trajectory& traj);
std::string trace_json(const Trajectory& traj);

}  // namespace dsgda
