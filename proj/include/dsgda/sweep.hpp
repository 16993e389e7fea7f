#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/engine.hpp"
#include "dsgda/inner_solver.hpp"
#include "dsgda/problems.hpp"
#include "dsgda/stability.hpp"
#include "dsgda/topology.hpp"

namespace dsgda {

struct ExperimentSetup {
  ProblemParams problem;
  TopologyKind topology = TopologyKind::kRing;
  Weighting weighting = Weighting::kMetropolis;
  int m = 4;
  int n = 50;
  int T = 20;
  int K = 5;
  Schedule schedule = Schedule::fixed(0.01);
  bool project = false;
  OutputKind output = OutputKind::kFinal;
  int repeats = 20;
  std::uint64_t seed_base = 0;
  // When nonempty, repeat r is seeded from seeds[r] and `repeats` is ignored.
  std::vector<std::uint64_t> seeds;
  // Used when topology is kCustom.
  std::optional<Eigen::MatrixXd> custom_matrix;
  // Debug switch: run both sides of the pair on S.
  bool identical_datasets = false;
  bool weak_stability = false;
  int fresh_probes = 64;
  bool risks = false;
  PopulationScope population;
  InnerOptions inner;
};

enum class SweepAxisKind { kNone, kLearningRate, kNodes, kLocalSteps, kSampleSize, kTopology };
std::string to_string(SweepAxisKind k);
SweepAxisKind parse_axis(const std::string& name);

struct SweepAxis {
  SweepAxisKind kind = SweepAxisKind::kNone;
  std::vector<std::string> values;
};

// Copy of `base` with the axis set to `value`.
ExperimentSetup apply_axis(const ExperimentSetup& base, SweepAxisKind axis, const std::string& value);

// Seeds of repeat r: one each for the data, the neighbor swap and the sample stream.
struct RepeatSeeds {
  std::uint64_t data;
  std::uint64_t swap;
  std::uint64_t stream;
};
RepeatSeeds repeat_seeds(std::uint64_t seed_base, int r);

struct OutputRow {
  std::string axis;
  std::string value;
  std::string measure;
  int seeds = 0;
  double mean = 0.0;
  double std = 0.0;
  double bound = 0.0;  // NaN when no bound applies
  bool bound_valid = false;
  double lambda = 0.0;
  std::string failure;
};

struct CellResult {
  std::string value;
  double lambda = 0.0;
  std::vector<OutputRow> rows;
  std::string failure;

  const OutputRow* find(const std::string& measure) const;
};

// Every repeat of one configuration; rows carry axis = "none".
CellResult run_cell(const ExperimentSetup& setup);

// Cells run on up to `workers` threads; output keeps the axis order.
std::vector<CellResult> sweep(const ExperimentSetup& base, const SweepAxis& axis, int workers = 1);

std::vector<OutputRow> flatten(const std::vector<CellResult>& cells);
std::string rows_csv(const std::vector<OutputRow>& rows);
std::string rows_json(const std::vector<OutputRow>& rows);
std::vector<OutputRow> parse_rows_csv(const std::string& text);

}  // namespace dsgda
