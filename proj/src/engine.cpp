#include "dsgda/engine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dsgda/errors.hpp"
#include "dsgda/report_io.hpp"
#include "dsgda/rng.hpp"

namespace dsgda {

double schedule_rate(const Schedule& s, int t, int k) {
  if (t < 1 || k < 0) throw std::invalid_argument("schedule indices need t >= 1, k >= 0");
  if (s.kind == ScheduleKind::kFixed) return s.c;
  return s.c / (std::pow(k + 1.0, s.alpha) * std::pow(static_cast<double>(t), s.beta));
}

std::string describe(const Schedule& s) {
  std::ostringstream os;
  if (s.kind == ScheduleKind::kFixed) {
    os << "fixed(eta=" << s.c << ")";
  } else {
    os << "decaying(c=" << s.c << ", alpha=" << s.alpha << ", beta=" << s.beta << ")";
  }
  return os.str();
}

int SampleStream::index(int t, int k, int agent, int n) const {
  const std::uint64_t h = hash_key(seed_, static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(agent));
  return static_cast<int>(bounded(h, static_cast<std::uint64_t>(n)));
}

Vec row_mean(const Mat& X) {
  Vec acc = Vec::Zero(X.cols());
  for (int i = 0; i < X.rows(); ++i) acc += X.row(i).transpose();
  return acc / static_cast<double>(X.rows());
}

double consensus(const Mat& X, const Mat& Y) {
  const Vec xb = row_mean(X), yb = row_mean(Y);
  double acc = 0;
  for (int i = 0; i < X.rows(); ++i) {
    acc += std::sqrt((X.row(i).transpose() - xb).squaredNorm() +
                     (Y.row(i).transpose() - yb).squaredNorm());
  }
  return acc / static_cast<double>(X.rows());
}

namespace {

void validate(const MinimaxProblem& problem, const DistributedDataset& S, const MixingMatrix& W,
              const Schedule& schedule, const RunConfig& config) {
  if (config.T < 1 || config.K < 1) {
    throw std::invalid_argument("run needs T >= 1 and K >= 1");
  }
  if (S.m() != W.m()) {
    throw DimensionError("dataset has " + std::to_string(S.m()) + " agents, topology has " +
                         std::to_string(W.m()));
  }
  if (!(schedule.c >= 0)) throw std::invalid_argument("schedule scale must be non-negative");
  if (schedule.kind == ScheduleKind::kDecaying && (schedule.alpha < 0 || schedule.beta < 0)) {
    throw std::invalid_argument("decaying schedule exponents must be non-negative");
  }
  problem.check_sample(S.at(0, 0));
  if (config.project && (!problem.spec().B_x || !problem.spec().B_y)) {
    throw std::invalid_argument("projection requested but the problem declares no balls");
  }
}

}  // namespace

Trajectory run(const MinimaxProblem& problem, const DistributedDataset& S,
               const MixingMatrix& W, const Schedule& schedule, const RunConfig& config) {
  validate(problem, S, W, schedule, config);
  const int m = S.m(), n = S.n();
  const int dx = problem.spec().d_x, dy = problem.spec().d_y;
  const SampleStream stream(config.seed);

  Trajectory traj;
  traj.level = config.record;
  traj.T = config.T;
  traj.K = config.K;
  const bool keep_avg = config.record != RecordLevel::kFinal;
  const bool keep_full = config.record == RecordLevel::kFull;
  if (keep_avg) {
    traj.steps.reserve(static_cast<std::size_t>(config.T) * config.K);
    traj.rounds.reserve(config.T);
  }

  Mat X = Mat::Zero(m, dx), Y = Mat::Zero(m, dy);
  Vec xi(dx), yi(dy);
  for (int t = 1; t <= config.T; ++t) {
    for (int k = 0; k < config.K; ++k) {
      const double eta = schedule_rate(schedule, t, k);
      if (keep_avg) {
        traj.steps.push_back({t, k, eta, consensus(X, Y), row_mean(X), row_mean(Y)});
      }
      if (keep_full) traj.agents.push_back({t, k, X, Y});
      for (int i = 0; i < m; ++i) {
        xi = X.row(i).transpose();
        yi = Y.row(i).transpose();
        const Sample& s = S.at(i, stream.index(t, k, i, n));
        const Gradient g = problem.grad(xi, yi, s);
        Vec xn = xi - eta * g.gx;
        Vec yn = yi + eta * g.gy;
        if (config.project) {
          xn = problem.project_x(xn);
          yn = problem.project_y(yn);
        }
        if (!xn.allFinite() || !yn.allFinite()) throw DivergenceError(t, k);
        X.row(i) = xn.transpose();
        Y.row(i) = yn.transpose();
      }
    }
    RoundRecord rr;
    if (keep_avg) {
      rr.t = t;
      rr.x_bar_local = row_mean(X);
      rr.y_bar_local = row_mean(Y);
      rr.consensus_local = consensus(X, Y);
    }
    X = mix(W, X);
    Y = mix(W, Y);
    if (keep_avg) {
      rr.x_bar_comm = row_mean(X);
      rr.y_bar_comm = row_mean(Y);
      rr.consensus_comm = consensus(X, Y);
      traj.rounds.push_back(std::move(rr));
    }
  }
  traj.x_final = row_mean(X);
  traj.y_final = row_mean(Y);
  return traj;
}

AveragedOutput averaged_output(const Trajectory& traj) {
  if (traj.level == RecordLevel::kFinal || traj.steps.empty()) {
    throw std::invalid_argument("averaged output needs a trajectory recorded at averages level");
  }
  AveragedOutput out{Vec::Zero(traj.steps.front().x_bar.size()),
                     Vec::Zero(traj.steps.front().y_bar.size())};
  for (const auto& s : traj.steps) {
    out.x += s.x_bar;
    out.y += s.y_bar;
  }
  out.x /= static_cast<double>(traj.steps.size());
  out.y /= static_cast<double>(traj.steps.size());
  return out;
}

void write_trace_csv(const std::string& path, const Trajectory& traj) {
  std::ostringstream os;
  os << "t,k,eta,consensus";
  const int dx = static_cast<int>(traj.x_final.size()), dy = static_cast<int>(traj.y_final.size());
  for (int c = 0; c < dx; ++c) os << ",x" << c;
  for (int c = 0; c < dy; ++c) os << ",y" << c;
  os << "\n";
  for (const auto& s : traj.steps) {
    os << s.t << "," << s.k << "," << format_double(s.eta) << "," << format_double(s.consensus);
    for (int c = 0; c < dx; ++c) os << "," << format_double(s.x_bar[c]);
    for (int c = 0; c < dy; ++c) os << "," << format_double(s.y_bar[c]);
    os << "\n";
  }
  write_atomic(path, os.str());
}

std::string trace_json(const Trajectory& traj) {
  nlohmann::ordered_json j;
  j["T"] = traj.T;
  j["K"] = traj.K;
  j["x_final"] = std::vector<double>(traj.x_final.data(), traj.x_final.data() + traj.x_final.size());
  j["y_final"] = std::vector<double>(traj.y_final.data(), traj.y_final.data() + traj.y_final.size());
  auto& steps = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : traj.steps) {
    steps.push_back({{"t", s.t},
                     {"k", s.k},
                     {"eta", s.eta},
                     {"consensus", s.consensus},
                     {"x_bar", std::vector<double>(s.x_bar.data(), s.x_bar.data() + s.x_bar.size())},
                     {"y_bar", std::vector<double>(s.y_bar.data(), s.y_bar.data() + s.y_bar.size())}});
  }
  return j.dump(1);
}

}  // namespace dsgda
