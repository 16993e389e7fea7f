#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dsgda/data.hpp"
#include "dsgda/engine.hpp"
#include "dsgda/errors.hpp"
#include "dsgda/report_io.hpp"

using namespace dsgda;

namespace {

ProblemParams quad_params(double kappa = 0.5, int dim = 2) {
  ProblemParams p;
  p.kind = ProblemKind::kQuadScSc;
  p.dim = dim;
  p.mu = 1.0;
  p.coupling = kappa;
  p.radius_x = 5.0;
  p.radius_y = 5.0;
  return p;
}

DistributedDataset single(double a, double b) {
  Vec p(2);
  p << a, b;
  return DistributedDataset({{Sample{p}}}, 0);
}

RunConfig cfg(int T, int K, std::uint64_t seed = 1, RecordLevel level = RecordLevel::kAverages) {
  RunConfig c;
  c.T = T;
  c.K = K;
  c.seed = seed;
  c.record = level;
  return c;
}

bool bit_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST(Schedule, Rates) {
  const auto f = Schedule::fixed(0.01);
  EXPECT_EQ(schedule_rate(f, 1, 0), 0.01);
  EXPECT_EQ(schedule_rate(f, 37, 12), 0.01);
  EXPECT_DOUBLE_EQ(schedule_rate(Schedule::decaying(1, 1, 1), 2, 1), 0.25);
  EXPECT_EQ(schedule_rate(Schedule::decaying(1, 0.75, 1), 1, 0), 1.0);
  EXPECT_THROW(schedule_rate(f, 0, 0), std::invalid_argument);
  EXPECT_THROW(schedule_rate(f, 1, -1), std::invalid_argument);
}

TEST(Consensus, Examples) {
  Mat X(3, 2);
  X << 1, 2, 1, 2, 1, 2;
  EXPECT_EQ(consensus(X, Mat::Zero(3, 1)), 0.0);
  Mat two(2, 1);
  two << 1, -1;
  EXPECT_DOUBLE_EQ(consensus(two, Mat::Zero(2, 0)), 1.0);
  Mat four(4, 1);
  four << 2, 0, 0, 0;
  EXPECT_DOUBLE_EQ(consensus(four, Mat::Zero(4, 0)), 0.75);
}

TEST(Run, OneHandComputedStep) {
  auto p = make_problem(quad_params(0.0, 1));
  const auto W = build_topology(TopologyKind::kComplete, 1);
  const auto traj = run(*p, single(2, 0), W, Schedule::fixed(0.1), cfg(1, 1));
  EXPECT_DOUBLE_EQ(traj.x_final[0], 0.2);
  EXPECT_DOUBLE_EQ(traj.y_final[0], 0.0);
}

TEST(Run, AveragedOutputOfTwoSteps) {
  auto p = make_problem(quad_params(0.0, 1));
  const auto W = build_topology(TopologyKind::kComplete, 1);
  const auto traj = run(*p, single(2, 0), W, Schedule::fixed(0.1), cfg(1, 2));
  ASSERT_EQ(traj.steps.size(), 2u);
  EXPECT_EQ(traj.steps[0].x_bar[0], 0.0);
  EXPECT_DOUBLE_EQ(traj.steps[1].x_bar[0], 0.2);
  EXPECT_DOUBLE_EQ(averaged_output(traj).x[0], 0.1);
}

TEST(Run, AveragedOutputIsTheMeanOfRecordedAverages) {
  auto p = make_problem(quad_params());
  const auto S = generate(*p, 4, 20, 3);
  const auto W = build_topology(TopologyKind::kRing, 4);
  const auto traj = run(*p, S, W, Schedule::fixed(0.05), cfg(6, 3));
  Vec acc = Vec::Zero(2);
  for (const auto& s : traj.steps) acc += s.x_bar;
  acc /= static_cast<double>(traj.steps.size());
  EXPECT_LE((averaged_output(traj).x - acc).cwiseAbs().maxCoeff(), 1e-15);
  const auto final_only = run(*p, S, W, Schedule::fixed(0.05), cfg(6, 3, 1, RecordLevel::kFinal));
  EXPECT_THROW(averaged_output(final_only), std::invalid_argument);
}

TEST(Run, ZeroRateStaysAtTheStart) {
  auto p = make_problem(quad_params());
  const auto S = generate(*p, 3, 10, 1);
  const auto W = build_topology(TopologyKind::kRing, 3);
  const auto traj = run(*p, S, W, Schedule::fixed(0.0), cfg(4, 3));
  EXPECT_EQ(traj.x_final.norm(), 0.0);
  EXPECT_EQ(traj.y_final.norm(), 0.0);
  for (const auto& s : traj.steps) EXPECT_EQ(s.consensus, 0.0);
}

TEST(Run, FullAveragingErasesConsensusAtRoundStart) {
  auto p = make_problem(quad_params());
  ProblemParams het = quad_params();
  het.data.heterogeneity = 1.0;
  auto ph = make_problem(het);
  const auto S = generate(*ph, 6, 20, 2);
  const auto W = build_topology(TopologyKind::kComplete, 6);
  const auto traj = run(*ph, S, W, Schedule::fixed(0.1), cfg(5, 4));
  for (const auto& s : traj.steps) {
    if (s.k == 0) EXPECT_LE(s.consensus, 1e-15) << "t=" << s.t;
  }
  for (const auto& r : traj.rounds) EXPECT_LE(r.consensus_comm, 1e-15);
}

TEST(Run, DeterministicAcrossCalls) {
  auto p = make_problem(quad_params());
  const auto S = generate(*p, 4, 15, 9);
  const auto W = build_topology(TopologyKind::kStar, 4);
  const auto a = run(*p, S, W, Schedule::decaying(0.5, 0.75, 1), cfg(7, 4, 42, RecordLevel::kFull));
  const auto b = run(*p, S, W, Schedule::decaying(0.5, 0.75, 1), cfg(7, 4, 42, RecordLevel::kFull));
  EXPECT_TRUE(bit_equal(a.x_final, b.x_final));
  EXPECT_TRUE(bit_equal(a.y_final, b.y_final));
  ASSERT_EQ(a.agents.size(), b.agents.size());
  for (std::size_t i = 0; i < a.agents.size(); ++i) EXPECT_EQ(a.agents[i].X, b.agents[i].X);
}

TEST(Run, CommunicationPreservesTheAverage) {
  ProblemParams het = quad_params();
  het.data.heterogeneity = 2.0;
  auto p = make_problem(het);
  const auto S = generate(*p, 8, 20, 5);
  const auto W = build_topology(TopologyKind::kRing, 8);
  const auto traj = run(*p, S, W, Schedule::fixed(0.05), cfg(10, 5));
  for (const auto& r : traj.rounds) {
    EXPECT_LE((r.x_bar_comm - r.x_bar_local).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((r.y_bar_comm - r.y_bar_local).cwiseAbs().maxCoeff(), 1e-12);
  }
  for (const auto& s : traj.steps) {
    if (s.k != 0 || s.t == 1) continue;
    const auto& prev = traj.rounds[s.t - 2];
    EXPECT_TRUE(bit_equal(s.x_bar, prev.x_bar_comm));
  }
}

TEST(Run, FullRecordKeepsPreStepStates) {
  auto p = make_problem(quad_params());
  const auto S = generate(*p, 3, 10, 5);
  const auto W = build_topology(TopologyKind::kRing, 3);
  const auto traj = run(*p, S, W, Schedule::fixed(0.05), cfg(3, 2, 1, RecordLevel::kFull));
  ASSERT_EQ(traj.agents.size(), 6u);
  for (std::size_t i = 0; i < traj.agents.size(); ++i) {
    const auto& st = traj.agents[i];
    EXPECT_NEAR(consensus(st.X, st.Y), traj.steps[i].consensus, 1e-15);
    EXPECT_LE((row_mean(st.X) - traj.steps[i].x_bar).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Run, ProjectionKeepsIteratesInTheBalls) {
  ProblemParams q = quad_params();
  q.radius_x = 0.1;
  q.radius_y = 0.1;
  q.data.heterogeneity = 3.0;
  auto p = make_problem(q);
  const auto S = generate(*p, 4, 10, 5);
  const auto W = build_topology(TopologyKind::kRing, 4);
  RunConfig c = cfg(5, 3, 1, RecordLevel::kFull);
  c.project = true;
  const auto traj = run(*p, S, W, Schedule::fixed(0.5), c);
  for (const auto& st : traj.agents)
    for (int i = 0; i < st.X.rows(); ++i) EXPECT_LE(st.X.row(i).norm(), 0.1 + 1e-15);
}

TEST(Run, SampleStreamIsCounterBased) {
  const SampleStream a(7), b(7), c(8);
  int differ = 0;
  for (int t = 1; t <= 5; ++t)
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 6; ++i) {
        const int j = a.index(t, k, i, 13);
        EXPECT_EQ(j, b.index(t, k, i, 13));
        EXPECT_GE(j, 0);
        EXPECT_LT(j, 13);
        differ += j != c.index(t, k, i, 13);
      }
  EXPECT_GT(differ, 0);
}

TEST(Run, DivergenceReportsRoundAndStep) {
  ProblemParams q = quad_params();
  q.data.heterogeneity = 1.0;
  auto p = make_problem(q);
  const auto S = generate(*p, 2, 5, 1);
  const auto W = build_topology(TopologyKind::kComplete, 2);
  try {
    run(*p, S, W, Schedule::fixed(1e150), cfg(50, 3));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.round(), 1);
    EXPECT_GE(e.step(), 0);
    EXPECT_NE(std::string(e.what()).find("round " + std::to_string(e.round())), std::string::npos);
  }
}

TEST(Run, RejectsBadInputs) {
  auto p = make_problem(quad_params());
  const auto S = generate(*p, 4, 5, 1);
  const auto W3 = build_topology(TopologyKind::kRing, 3);
  const auto W4 = build_topology(TopologyKind::kRing, 4);
  EXPECT_THROW(run(*p, S, W3, Schedule::fixed(0.1), cfg(1, 1)), DimensionError);
  EXPECT_THROW(run(*p, S, W4, Schedule::fixed(0.1), cfg(0, 1)), std::invalid_argument);
  EXPECT_THROW(run(*p, S, W4, Schedule::fixed(0.1), cfg(1, 0)), std::invalid_argument);
  EXPECT_THROW(run(*p, S, W4, Schedule::fixed(-0.1), cfg(1, 1)), std::invalid_argument);
  ProblemParams nc;
  nc.kind = ProblemKind::kNcNcToy;
  auto pn = make_problem(nc);
  EXPECT_THROW(run(*pn, S, W4, Schedule::fixed(0.1), cfg(1, 1)), DimensionError);
  const auto Sn = generate(*pn, 4, 5, 1);
  RunConfig c = cfg(1, 1);
  c.project = true;
  EXPECT_THROW(run(*pn, Sn, W4, Schedule::fixed(0.1), c), std::invalid_argument);
}

TEST(GradientMap, QuadFactorMatchesTheLinearAlgebra) {
  // One full-batch step is affine with linear part I - eta [[mu, k], [-k, mu]].
  for (double kappa : {0.0, 0.5, std::sqrt(3.0)}) {
    auto p = make_problem(quad_params(kappa, 1));
    const std::vector<Sample> S = {Sample{Vec::Constant(2, 0.3)}};
    const double eta = 0.5;
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = rng.normal_vector(1), y = rng.normal_vector(1);
      const Vec xp = rng.normal_vector(1), yp = rng.normal_vector(1);
      const Gradient g = objective_grad(*p, x, y, S), gp = objective_grad(*p, xp, yp, S);
      const double after = std::hypot((x - eta * g.gx - xp + eta * gp.gx).norm(),
                                      (y + eta * g.gy - yp - eta * gp.gy).norm());
      const double before = std::hypot((x - xp).norm(), (y - yp).norm());
      const double exact = std::hypot(1 - eta, eta * kappa);
      EXPECT_NEAR(after / before, exact, 1e-12);
    }
  }
  const double mu = 1, L = 2, eta = 0.5;
  EXPECT_DOUBLE_EQ(1 - eta * L * mu / (L + mu), 2.0 / 3.0);
}

TEST(TraceIo, CsvAndJsonCarryEveryStep) {
  auto p = make_problem(quad_params());
  const auto S = generate(*p, 2, 5, 1);
  const auto W = build_topology(TopologyKind::kComplete, 2);
  const auto traj = run(*p, S, W, Schedule::fixed(0.1), cfg(3, 2));
  const auto path = std::filesystem::temp_directory_path() / "dsgda_trace_test.csv";
  write_trace_csv(path.string(), traj);
  const auto table = parse_csv(read_file(path.string()));
  std::filesystem::remove(path);
  EXPECT_EQ(table.header.front(), "t");
  EXPECT_EQ(table.header.size(), 4u + 2 + 2);
  ASSERT_EQ(table.rows.size(), 6u);
  EXPECT_EQ(std::stod(table.rows[3][2]), 0.1);
  EXPECT_EQ(std::stod(table.rows[5][4]), traj.steps[5].x_bar[0]);

  const auto j = nlohmann::json::parse(trace_json(traj));
  EXPECT_EQ(j["steps"].size(), 6u);
  EXPECT_EQ(j["x_final"][0].get<double>(), traj.x_final[0]);
}
