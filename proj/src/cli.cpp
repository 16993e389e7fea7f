#include "dsgda/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "dsgda/bounds.hpp"
#include "dsgda/data.hpp"
#include "dsgda/errors.hpp"
#include "dsgda/plot.hpp"
#include "dsgda/report_io.hpp"
#include "dsgda/stability.hpp"
#include "dsgda/sweep.hpp"

namespace dsgda {

namespace fs = std::filesystem;

std::string resolve_out_dir(const std::string& configured, const CliOptions& opt) {
  if (opt.out_dir) return *opt.out_dir;
  if (const char* env = std::getenv("DSGDA_OUT_DIR"); env && *env) return env;
  return configured;
}

namespace {

bool wants(const ExperimentConfig& cfg, const std::string& format) {
  for (const auto& f : cfg.formats) {
    if (f == format) return true;
  }
  return false;
}

std::string bounds_csv(const BoundReport& rep, const std::string& setting) {
  CsvTable t;
  t.header = {"id", "value", "valid", "setting", "note"};
  for (const auto& e : rep.entries) {
    t.rows.push_back({e.id, std::isfinite(e.value) ? format_double(e.value) : "", e.valid ? "1" : "0",
                      setting, e.note});
  }
  return to_csv(t);
}

void print_bounds(std::ostream& out, const BoundReport& rep) {
  for (const auto& e : rep.entries) {
    out << "  " << std::left << std::setw(28) << e.id << ' ' << std::setw(23)
        << (std::isfinite(e.value) ? format_double(e.value) : "-") << ' '
        << (e.valid ? "valid" : "invalid");
    if (!e.note.empty()) out << "  (" << e.note << ")";
    out << "\n";
  }
}

std::string setting_name(double lambda, int K) {
  if (lambda == 0) return "local-sgda";
  if (K == 1) return "decentralized-sgda";
  return "distributed-sgda";
}

}  // namespace

int cmd_run(const std::string& config_path, const CliOptions& opt, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  ExperimentSetup& s = cfg.setup;
  if (opt.seed_base) s.seed_base = *opt.seed_base;
  const std::string dir = resolve_out_dir(cfg.out_dir, opt);

  try {
    const ProblemPtr problem = make_problem(s.problem);
    const MixingMatrix W = s.topology == TopologyKind::kCustom
                               ? custom_topology(*s.custom_matrix)
                               : build_topology(s.topology, s.m, s.weighting);
    const RepeatSeeds seeds = s.seeds.empty() ? repeat_seeds(s.seed_base, 0) : repeat_seeds(s.seeds[0], 0);
    const DistributedDataset S = generate(*problem, s.m, s.n, seeds.data);
    NeighborPair pair = make_neighbor(*problem, S, seeds.swap);
    if (s.identical_datasets) pair.S_prime = pair.S;

    RunConfig rc;
    rc.T = s.T;
    rc.K = s.K;
    rc.seed = seeds.stream;
    rc.project = s.project;
    rc.record = RecordLevel::kAverages;
    const CoupledTrace tr = run_coupled(*problem, pair, W, s.schedule, rc);

    const double arg = argument_stability(tr, s.output);
    const double pri = primal_stability(tr, s.output);
    const auto [sqx, sqy] = argument_squared_split(tr, s.output);
    const auto probes = default_probes(*problem, pair, s.fresh_probes, seeds.swap);
    const WeakStabilityEstimate weak = weak_stability_estimate(tr, *problem, probes, s.inner, s.output);

    const OutputPair o = outputs(tr, s.output);
    const bool with_primal = problem->spec().mu > 0;
    PopulationScope pop = s.population;
    pop.seed = seeds.data;
    const RiskReport risk = generalization_gaps(o.x, o.y, *problem, pair.S, pop, arg, pri,
                                                with_primal, s.inner);

    const BoundInputs in = make_bound_inputs(problem->spec(), W, s.schedule, s.T, s.K, s.n);
    const double ep_sup = with_primal ? risk.excess_primal_empirical.value : 0.0;
    const BoundReport bounds = bound_report(in, arg, ep_sup);

    write_trace_csv((fs::path(dir) / "trace.csv").string(), tr.traj);
    if (wants(cfg, "json")) write_atomic((fs::path(dir) / "trace.json").string(), trace_json(tr.traj));

    CsvTable st;
    st.header = {"measure", "value", "method", "residual"};
    st.rows.push_back({"argument_stability", format_double(arg), "exact", "0"});
    st.rows.push_back({"argument_sq_x", format_double(sqx), "exact", "0"});
    st.rows.push_back({"argument_sq_y", format_double(sqy), "exact", "0"});
    st.rows.push_back({"primal_stability", format_double(pri), "exact", "0"});
    st.rows.push_back({"weak_stability_estimate", format_double(weak.value), weak.method,
                       format_double(weak.residual)});
    write_atomic((fs::path(dir) / "stability.csv").string(), to_csv(st));

    CsvTable rk;
    rk.header = {"quantity", "value", "method", "residual", "std_error"};
    auto add_risk = [&](const std::string& name, const RiskValue& v) {
      rk.rows.push_back({name, format_double(v.value), v.method, format_double(v.residual),
                         format_double(v.std_error)});
    };
    add_risk("weak_pd_empirical", risk.weak_pd_empirical);
    add_risk("weak_pd_population", risk.weak_pd_population);
    add_risk("excess_primal_empirical", risk.excess_primal_empirical);
    add_risk("excess_primal_population", risk.excess_primal_population);
    rk.rows.push_back({"weak_gap", format_double(risk.weak_gap), "difference", "0", "0"});
    rk.rows.push_back({"excess_primal_gap", format_double(risk.excess_primal_gap), "difference", "0", "0"});
    rk.rows.push_back({"weak_gap_bound", format_double(risk.weak_gap_bound), "formula", "0", "0"});
    rk.rows.push_back({"excess_primal_gap_bound", format_double(risk.excess_primal_gap_bound), "formula", "0", "0"});
    rk.rows.push_back({"strong_gap_bound", format_double(risk.strong_gap_bound), "formula", "0", "0"});
    write_atomic((fs::path(dir) / "risk.csv").string(), to_csv(rk));

    write_atomic((fs::path(dir) / "bounds.csv").string(),
                 bounds_csv(bounds, setting_name(W.lambda(), s.K)));

    out << "problem " << to_string(problem->kind()) << ", topology " << W.label() << " (m = " << W.m()
        << ", lambda = " << format_double(W.lambda()) << "), n = " << s.n << ", T = " << s.T
        << ", K = " << s.K << ", " << describe(s.schedule) << "\n";
    out << "argument stability " << format_double(arg) << ", primal " << format_double(pri)
        << ", weak estimate " << format_double(weak.value) << "\n";
    out << "weak PD risk: empirical " << format_double(risk.weak_pd_empirical.value) << ", population "
        << format_double(risk.weak_pd_population.value) << ", gap " << format_double(risk.weak_gap)
        << " (bound " << format_double(risk.weak_gap_bound) << ")\n";
    out << "wrote trace.csv, stability.csv, risk.csv, bounds.csv to " << dir << "\n";
    return kExitOk;
  } catch (const DivergenceError& e) {
    err << "error: run diverged: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_sweep(const std::string& config_path, const CliOptions& opt, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (cfg.axis.kind == SweepAxisKind::kNone) {
    err << "error: " << config_path << ": sweep needs a [sweep] section with an axis\n";
    return kExitUsage;
  }
  if (opt.seed_base) cfg.setup.seed_base = *opt.seed_base;
  const std::string dir = resolve_out_dir(cfg.out_dir, opt);

  const auto cells = sweep(cfg.setup, cfg.axis, opt.workers);
  const auto rows = flatten(cells);
  int failed = 0;
  for (const auto& c : cells) {
    if (!c.failure.empty()) {
      ++failed;
      err << "cell " << to_string(cfg.axis.kind) << " = " << c.value << " failed: " << c.failure << "\n";
    }
  }
  try {
    if (wants(cfg, "csv")) write_atomic((fs::path(dir) / "results.csv").string(), rows_csv(rows));
    if (wants(cfg, "json")) write_atomic((fs::path(dir) / "results.json").string(), rows_json(rows));
    if (wants(cfg, "svg")) {
      for (const auto& [measure, svg] : svg_plots(rows)) {
        write_atomic((fs::path(dir) / "plots" / (measure + ".svg")).string(), svg);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  out << std::left << std::setw(13) << to_string(cfg.axis.kind) << ' ' << std::setw(24) << "measure"
      << ' ' << std::setw(23) << "mean" << ' ' << std::setw(23) << "std" << " bound\n";
  for (const auto& r : rows) {
    if (!r.failure.empty()) continue;
    out << std::setw(13) << r.value << ' ' << std::setw(24) << r.measure << ' ' << std::setw(23)
        << format_double(r.mean) << ' ' << std::setw(23) << format_double(r.std) << ' '
        << (std::isfinite(r.bound) ? format_double(r.bound) : "-") << "\n";
  }
  out << "wrote results to " << dir << "\n";
  return failed == static_cast<int>(cells.size()) ? kExitFailure : kExitOk;
}

int cmd_bounds(const std::string& constants_path, const CliOptions& opt, std::ostream& out,
               std::ostream& err) {
  BoundInputs in;
  double epsilon = 0, ep_sup = 0;
  try {
    const IniDocument doc = parse_ini(read_file(constants_path), constants_path);
    static const std::set<std::string> known = {
        "G", "L", "mu", "rho", "M", "lambda", "T", "K", "m", "n", "B_x", "B_y",
        "schedule", "eta", "alpha", "beta", "epsilon", "ep_empirical_sup"};
    for (const auto& [sec, keys] : doc.sections()) {
      if (sec != "constants") {
        throw ConfigError(constants_path, doc.section_line(sec), "unknown section [" + sec + "]");
      }
      for (const auto& [k, v] : keys) {
        if (!known.count(k)) throw ConfigError(constants_path, v.line, "unknown constant '" + k + "'");
      }
    }
    std::vector<std::string> missing;
    for (const char* k : {"T", "K", "m", "n", "lambda", "eta"}) {
      if (!doc.has("constants", k)) missing.push_back(k);
    }
    if (!missing.empty()) {
      err << "error: " << constants_path << ": missing constants:";
      for (const auto& k : missing) err << " " << k;
      err << "\n";
      return kExitUsage;
    }
    auto num = [&](const std::string& k) {
      const IniValue* v = doc.get("constants", k);
      std::size_t pos = 0;
      double x = 0;
      try {
        x = std::stod(v->text, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != v->text.size()) {
        throw ConfigError(constants_path, v->line, k + ": '" + v->text + "' is not a number");
      }
      return x;
    };
    auto opt_num = [&](const std::string& k) -> std::optional<double> {
      if (!doc.has("constants", k)) return std::nullopt;
      return num(k);
    };
    in.G = opt_num("G");
    in.L = opt_num("L");
    in.mu = opt_num("mu");
    in.rho = opt_num("rho");
    in.M = opt_num("M");
    in.B_x = opt_num("B_x");
    in.B_y = opt_num("B_y");
    in.T = static_cast<int>(num("T"));
    in.K = static_cast<int>(num("K"));
    in.m = static_cast<int>(num("m"));
    in.n = static_cast<int>(num("n"));
    std::string kind = "fixed";
    if (const IniValue* v = doc.get("constants", "schedule")) kind = v->text;
    if (kind == "fixed") {
      in.schedule = Schedule::fixed(num("eta"));
    } else if (kind == "decaying") {
      in.schedule = Schedule::decaying(num("eta"), opt_num("alpha").value_or(1.0),
                                       opt_num("beta").value_or(1.0));
    } else {
      throw ConfigError(constants_path, doc.get("constants", "schedule")->line,
                        "schedule must be 'fixed' or 'decaying'");
    }
    const double a = kind == "decaying" && in.schedule.alpha > 0.5 && in.schedule.alpha <= 1
                         ? in.schedule.alpha
                         : 1.0;
    const SpectralConstants sc = spectral_constants(num("lambda"), a);
    in.lambda = sc.lambda;
    in.C_lambda = sc.C_lambda;
    in.C_lambda_sq = sc.C_lambda_sq;
    epsilon = opt_num("epsilon").value_or(0.0);
    ep_sup = opt_num("ep_empirical_sup").value_or(0.0);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const BoundReport rep = bound_report(in, epsilon, ep_sup);
  const std::string setting = setting_name(in.lambda, in.K);
  out << "setting: " << setting << " (lambda = " << format_double(in.lambda) << ", K = " << in.K
      << ")\n";
  print_bounds(out, rep);
  const std::string dir = resolve_out_dir("out", opt);
  try {
    write_atomic((fs::path(dir) / "bounds.csv").string(), bounds_csv(rep, setting));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_validate_topology(const std::string& target, int m, const std::string& weighting,
                          std::ostream& out, std::ostream& err) {
  Eigen::MatrixXd W;
  std::string label;
  try {
    if (fs::exists(target)) {
      W = read_matrix(target);
      label = target;
    } else {
      const TopologyKind kind = parse_topology_kind(target);
      if (m < 1) throw std::invalid_argument("topology '" + target + "' needs --m >= 1");
      const MixingMatrix built = build_topology(kind, m, parse_weighting(weighting));
      W = built.weights();
      label = built.label();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  out << "matrix: " << label << " (" << W.rows() << "x" << W.cols() << ")\n";
  const auto violations = mixing_violations(W);
  if (W.rows() == W.cols() && W.rows() > 0) {
    const double sym = (W - W.transpose()).cwiseAbs().maxCoeff();
    const double rows = (W.rowwise().sum().array() - 1.0).abs().maxCoeff();
    out << "symmetry residual   max|W - W^T|    = " << format_double(sym) << "\n";
    out << "stochastic residual max|W 1 - 1|    = " << format_double(rows) << "\n";
    out << "smallest entry                      = " << format_double(W.minCoeff()) << "\n";
  }
  if (!violations.empty()) {
    for (const auto& v : violations) err << "FAIL: " << v << "\n";
    return kExitFailure;
  }

  const MixingMatrix M(W);
  out << "lambda = " << format_double(M.lambda()) << "\n";
  for (double a : {0.6, 0.75, 1.0}) {
    out << "C_lambda(alpha = " << a << ") = " << format_double(c_constant(M.lambda(), a)) << "\n";
  }
  out << "k   |W^k - P_m|            lambda^k               difference\n";
  double worst = 0;
  for (int k = 1; k <= 10; ++k) {
    const double dev = deviation_norm(M, k);
    const double ref = std::pow(M.lambda(), k);
    worst = std::max(worst, std::abs(dev - ref));
    out << std::left << std::setw(4) << k << std::setw(23) << format_double(dev) << std::setw(23)
        << format_double(ref) << format_double(std::abs(dev - ref)) << "\n";
  }
  if (worst > 1e-10) {
    err << "FAIL: power deviation differs from lambda^k by " << format_double(worst) << "\n";
    return kExitFailure;
  }
  out << "all checks passed\n";
  return kExitOk;
}

}  // namespace dsgda
