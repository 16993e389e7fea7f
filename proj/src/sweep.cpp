#include "dsgda/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dsgda/bounds.hpp"
#include "dsgda/data.hpp"
#include "dsgda/errors.hpp"
#include "dsgda/report_io.hpp"
#include "dsgda/rng.hpp"

namespace dsgda {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(SweepAxisKind k) {
  switch (k) {
    case SweepAxisKind::kNone: return "none";
    case SweepAxisKind::kLearningRate: return "learning_rate";
    case SweepAxisKind::kNodes: return "nodes";
    case SweepAxisKind::kLocalSteps: return "local_steps";
    case SweepAxisKind::kSampleSize: return "sample_size";
    case SweepAxisKind::kTopology: return "topology";
  }
  return "none";
}

SweepAxisKind parse_axis(const std::string& name) {
  for (auto k : {SweepAxisKind::kNone, SweepAxisKind::kLearningRate, SweepAxisKind::kNodes,
                 SweepAxisKind::kLocalSteps, SweepAxisKind::kSampleSize, SweepAxisKind::kTopology}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown sweep axis '" + name +
                              "' (expected learning_rate, nodes, local_steps, sample_size or topology)");
}

namespace {

int parse_int(const std::string& s, const char* what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw std::invalid_argument(std::string(what) + " value '" + s + "' is not an integer");
  }
  return v;
}

double parse_real(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw std::invalid_argument(std::string(what) + " value '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

ExperimentSetup apply_axis(const ExperimentSetup& base, SweepAxisKind axis,
                           const std::string& value) {
  ExperimentSetup s = base;
  switch (axis) {
    case SweepAxisKind::kNone: break;
    case SweepAxisKind::kLearningRate: s.schedule.c = parse_real(value, "learning_rate"); break;
    case SweepAxisKind::kNodes: s.m = parse_int(value, "nodes"); break;
    case SweepAxisKind::kLocalSteps: s.K = parse_int(value, "local_steps"); break;
    case SweepAxisKind::kSampleSize: s.n = parse_int(value, "sample_size"); break;
    case SweepAxisKind::kTopology: s.topology = parse_topology_kind(value); break;
  }
  return s;
}

RepeatSeeds repeat_seeds(std::uint64_t seed_base, int r) {
  const std::uint64_t s = hash_key(seed_base, static_cast<std::uint64_t>(r));
  return {hash_key(s, 1), hash_key(s, 2), hash_key(s, 3)};
}

const OutputRow* CellResult::find(const std::string& measure) const {
  for (const auto& r : rows) {
    if (r.measure == measure) return &r;
  }
  return nullptr;
}

namespace {

struct BoundPick {
  double value = kNaN;
  bool valid = false;
};

BoundPick pick(const BoundReport& rep, const std::string& id) {
  const BoundEntry* e = rep.find(id);
  if (!e) return {};
  return {e->value, e->valid};
}

std::string rate_tag(const Schedule& s) {
  return s.kind == ScheduleKind::kFixed ? "fixed" : "decaying";
}

}  // namespace

CellResult run_cell(const ExperimentSetup& setup) {
  const int repeats = setup.seeds.empty() ? setup.repeats : static_cast<int>(setup.seeds.size());
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const ProblemPtr problem = make_problem(setup.problem);
  if (setup.topology == TopologyKind::kCustom && !setup.custom_matrix) {
    throw std::invalid_argument("custom topology needs a matrix");
  }
  const MixingMatrix W = setup.topology == TopologyKind::kCustom
                             ? custom_topology(*setup.custom_matrix)
                             : build_topology(setup.topology, setup.m, setup.weighting);
  if (W.m() != setup.m) {
    throw DimensionError("topology has " + std::to_string(W.m()) + " nodes but m = " +
                         std::to_string(setup.m));
  }
  const ProblemSpec& spec = problem->spec();

  CellResult cell;
  cell.lambda = W.lambda();

  RunConfig rc;
  rc.T = setup.T;
  rc.K = setup.K;
  rc.project = setup.project;
  rc.record = RecordLevel::kAverages;

  std::vector<CoupledTrace> traces;
  std::vector<double> cons;
  std::vector<double> wemp, wpop, wgap, eemp, epop, egap;
  std::vector<Sample> probes;
  const bool with_primal = spec.mu > 0;
  for (int r = 0; r < repeats; ++r) {
    const RepeatSeeds seeds =
        setup.seeds.empty() ? repeat_seeds(setup.seed_base, r) : repeat_seeds(setup.seeds[r], 0);
    const DistributedDataset S = generate(*problem, setup.m, setup.n, seeds.data);
    NeighborPair pair = make_neighbor(*problem, S, seeds.swap);
    if (setup.identical_datasets) pair.S_prime = pair.S;
    rc.seed = seeds.stream;
    CoupledTrace tr = run_coupled(*problem, pair, W, setup.schedule, rc);

    double cmax = 0;
    for (const auto& st : tr.traj.steps) cmax = std::max(cmax, st.consensus);
    cons.push_back(cmax);

    if (setup.weak_stability) {
      const auto p = default_probes(*problem, pair, setup.fresh_probes, seeds.swap);
      probes.insert(probes.end(), p.begin(), p.end());
    }
    if (setup.risks) {
      const OutputPair o = outputs(tr, setup.output);
      PopulationScope pop = setup.population;
      pop.seed = hash_key(pop.seed, seeds.data);
      const RiskReport rep = generalization_gaps(o.x, o.y, *problem, pair.S, pop, kNaN, kNaN,
                                                 with_primal, setup.inner);
      wemp.push_back(rep.weak_pd_empirical.value);
      wpop.push_back(rep.weak_pd_population.value);
      wgap.push_back(rep.weak_gap);
      if (with_primal) {
        eemp.push_back(rep.excess_primal_empirical.value);
        epop.push_back(rep.excess_primal_population.value);
        egap.push_back(rep.excess_primal_gap);
      }
    }
    traces.push_back(std::move(tr));
  }

  const StabilityReport st = stability_report(
      traces, *problem, setup.weak_stability ? std::span<const Sample>(probes) : std::span<const Sample>{},
      setup.output, setup.inner);

  const BoundInputs in = make_bound_inputs(spec, W, setup.schedule, setup.T, setup.K, setup.n);
  const BoundReport bounds = bound_report(in, st.argument.mean, 0.0);
  const BoundReport primal_bounds = bound_report(in, st.primal.mean, 0.0);
  const double connection = std::sqrt(2.0) * spec.G * st.argument.mean;

  auto add = [&](const std::string& measure, const MeasureStats& ms, BoundPick b) {
    OutputRow row;
    row.axis = "none";
    row.measure = measure;
    row.seeds = ms.count;
    row.mean = ms.mean;
    row.std = ms.std;
    row.bound = b.value;
    row.bound_valid = b.valid && std::isfinite(b.value);
    row.lambda = cell.lambda;
    cell.rows.push_back(row);
  };

  BoundPick arg_bound;
  if (spec.convexity == ConvexityClass::kScSc) {
    arg_bound = pick(bounds, setup.schedule.kind == ScheduleKind::kFixed ? "argument_fixed_closed"
                                                                          : "argument_decaying_closed");
  } else if (spec.convexity == ConvexityClass::kCC) {
    arg_bound = pick(bounds, "argument_cc_corollary");
  }
  add("argument_stability", st.argument, arg_bound);
  add("argument_sq_x", st.argument_sq_x, {});
  add("argument_sq_y", st.argument_sq_y, {});
  add("primal_stability", st.primal, {});
  add("consensus_max", summarize(cons), pick(bounds, "consensus_max"));
  if (setup.weak_stability) {
    BoundPick wb{connection, true};
    if (spec.convexity == ConvexityClass::kNcNc) {
      wb = pick(bounds, "weak_stability_" + rate_tag(setup.schedule));
    }
    add("weak_stability", {st.weak.value, 0.0, st.repeats}, wb);
  }
  if (setup.risks) {
    const std::string tag = rate_tag(setup.schedule);
    add("weak_pd_empirical", summarize(wemp), pick(bounds, "weak_pd_empirical_" + tag));
    add("weak_pd_population", summarize(wpop), pick(bounds, "weak_pd_population_" + tag));
    add("weak_gap", summarize(wgap), {connection, true});
    if (with_primal) {
      add("excess_primal_empirical", summarize(eemp), pick(bounds, "excess_primal_empirical"));
      add("excess_primal_population", summarize(epop), pick(bounds, "excess_primal_population"));
      add("excess_primal_gap", summarize(egap), pick(primal_bounds, "excess_primal_gap"));
    }
  }
  return cell;
}

std::vector<CellResult> sweep(const ExperimentSetup& base, const SweepAxis& axis, int workers) {
  std::vector<std::string> values = axis.values;
  if (axis.kind == SweepAxisKind::kNone) values = {""};
  if (values.empty()) throw std::invalid_argument("sweep axis has no values");
  const std::string axis_name = to_string(axis.kind);

  std::vector<CellResult> cells(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      CellResult c;
      try {
        c = run_cell(apply_axis(base, axis.kind, values[i]));
      } catch (const std::exception& e) {
        c.failure = e.what();
        std::replace(c.failure.begin(), c.failure.end(), '\n', ' ');
        OutputRow row;
        row.measure = "cell";
        row.bound = kNaN;
        row.failure = c.failure;
        c.rows.push_back(row);
      }
      c.value = values[i];
      for (auto& r : c.rows) {
        r.axis = axis_name;
        r.value = values[i];
      }
      cells[i] = std::move(c);
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

std::vector<OutputRow> flatten(const std::vector<CellResult>& cells) {
  std::vector<OutputRow> out;
  for (const auto& c : cells) out.insert(out.end(), c.rows.begin(), c.rows.end());
  return out;
}

namespace {
const std::vector<std::string> kHeader = {"axis", "value", "measure", "seeds", "mean", "std",
                                          "bound", "bound_valid", "lambda", "failures"};

std::string optional_number(double v) { return std::isfinite(v) ? format_double(v) : ""; }
}  // namespace

std::string rows_csv(const std::vector<OutputRow>& rows) {
  CsvTable t;
  t.header = kHeader;
  for (const auto& r : rows) {
    t.rows.push_back({r.axis, r.value, r.measure, std::to_string(r.seeds), format_double(r.mean),
                      format_double(r.std), optional_number(r.bound), r.bound_valid ? "1" : "0",
                      format_double(r.lambda), r.failure});
  }
  return to_csv(t);
}

std::string rows_json(const std::vector<OutputRow>& rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["axis"] = r.axis;
    o["value"] = r.value;
    o["measure"] = r.measure;
    o["seeds"] = r.seeds;
    o["mean"] = r.mean;
    o["std"] = r.std;
    if (std::isfinite(r.bound)) {
      o["bound"] = r.bound;
    } else {
      o["bound"] = nullptr;
    }
    o["bound_valid"] = r.bound_valid;
    o["lambda"] = r.lambda;
    o["failures"] = r.failure;
    j.push_back(std::move(o));
  }
  return j.dump(1);
}

std::vector<OutputRow> parse_rows_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  if (t.header != kHeader) throw std::invalid_argument("results file has an unexpected header");
  std::vector<OutputRow> out;
  for (const auto& c : t.rows) {
    if (c.size() != kHeader.size()) throw std::invalid_argument("results row has wrong width");
    OutputRow r;
    r.axis = c[0];
    r.value = c[1];
    r.measure = c[2];
    r.seeds = std::stoi(c[3]);
    r.mean = std::stod(c[4]);
    r.std = std::stod(c[5]);
    r.bound = c[6].empty() ? kNaN : std::stod(c[6]);
    r.bound_valid = c[7] == "1";
    r.lambda = std::stod(c[8]);
    r.failure = c[9];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dsgda
