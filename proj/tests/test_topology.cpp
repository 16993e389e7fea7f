#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "dsgda/errors.hpp"
#include "dsgda/rng.hpp"
#include "dsgda/topology.hpp"

using namespace dsgda;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Eigen's general (non-symmetric) solver keeps this oracle independent of the
// library's symmetric path.
double second_magnitude(const MatrixXd& W) {
  const int m = static_cast<int>(W.rows());
  Eigen::EigenSolver<MatrixXd> es(W - MatrixXd::Constant(m, m, 1.0 / m));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double c_oracle(double q, double a) {
  const double l = std::log(1.0 / q);
  const double t1 = std::pow(a / std::exp(1.0), a) / (q * std::pow(l, a));
  const double t2 = 2.0 / (std::exp(1.0) * q * l);
  const double t3 = std::pow(2.0, a) / (q * l);
  return t1 + t2 + t3;
}

}  // namespace

TEST(BuildTopology, CompleteIsUniformAveraging) {
  const auto W = build_topology(TopologyKind::kComplete, 4);
  EXPECT_TRUE(W.weights().isApproxToConstant(0.25, 0.0));
  EXPECT_NEAR(W.lambda(), 0.0, 1e-15);
}

TEST(BuildTopology, RingFourUniformNeighbor) {
  const auto W = build_topology(TopologyKind::kRing, 4, Weighting::kUniformNeighbor);
  EXPECT_DOUBLE_EQ(W.weights()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(W.weights()(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(W.weights()(0, 3), 0.25);
  EXPECT_DOUBLE_EQ(W.weights()(0, 2), 0.0);
  EXPECT_NEAR(W.lambda(), 0.5, 1e-14);
  for (int k = 0; k < 4; ++k) {
    const double circulant = 0.5 + 0.5 * std::cos(2 * M_PI * k / 4);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(W.weights());
    EXPECT_NEAR((es.eigenvalues().array() - circulant).abs().minCoeff(), 0.0, 1e-14);
  }
}

TEST(BuildTopology, StarThreeMetropolis) {
  const auto W = build_topology(TopologyKind::kStar, 3);
  MatrixXd expect(3, 3);
  expect << 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3, 0, 1.0 / 3, 0, 2.0 / 3;
  EXPECT_LE((W.weights() - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(W.lambda(), 2.0 / 3.0, 1e-14);
}

TEST(BuildTopology, EveryKindSatisfiesMixingInvariants) {
  for (auto w : {Weighting::kMetropolis, Weighting::kUniformNeighbor}) {
    for (auto kind : {TopologyKind::kComplete, TopologyKind::kRing, TopologyKind::kStar,
                      TopologyKind::kMeshgrid, TopologyKind::kExponential}) {
      const auto W = build_topology(kind, 16, w);
      const MatrixXd& A = W.weights();
      EXPECT_EQ(A, A.transpose()) << to_string(kind);
      EXPECT_LE((A.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
      EXPECT_LE((A.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
      EXPECT_GE(A.minCoeff(), 0.0);
      EXPECT_LT(W.lambda(), 1.0);
      EXPECT_NEAR(W.lambda(), second_magnitude(A), 1e-10) << to_string(kind);
    }
  }
}

TEST(BuildTopology, LambdaOrderingAtSixteen) {
  for (auto w : {Weighting::kMetropolis, Weighting::kUniformNeighbor}) {
    const double complete = build_topology(TopologyKind::kComplete, 16, w).lambda();
    EXPECT_NEAR(complete, 0.0, 1e-14);
    for (auto kind : {TopologyKind::kRing, TopologyKind::kMeshgrid, TopologyKind::kExponential,
                      TopologyKind::kStar}) {
      EXPECT_GT(build_topology(kind, 16, w).lambda(), complete) << to_string(kind);
    }
  }
  const double star_u = build_topology(TopologyKind::kStar, 16, Weighting::kUniformNeighbor).lambda();
  for (auto kind : {TopologyKind::kRing, TopologyKind::kMeshgrid, TopologyKind::kExponential}) {
    EXPECT_LT(build_topology(kind, 16, Weighting::kUniformNeighbor).lambda(), star_u)
        << to_string(kind);
  }
  // Under Metropolis weights the 16-ring mixes slower than the 16-star.
  const double ring_m = build_topology(TopologyKind::kRing, 16).lambda();
  const double star_m = build_topology(TopologyKind::kStar, 16).lambda();
  EXPECT_NEAR(ring_m, 1.0 / 3.0 + 2.0 / 3.0 * std::cos(2.0 * M_PI / 16.0), 1e-12);
  EXPECT_NEAR(star_m, 15.0 / 16.0, 1e-12);
  EXPECT_GT(ring_m, star_m);
}

TEST(BuildTopology, RejectsImpossibleShapes) {
  EXPECT_THROW(build_topology(TopologyKind::kMeshgrid, 10), std::invalid_argument);
  EXPECT_THROW(build_topology(TopologyKind::kExponential, 12), std::invalid_argument);
  EXPECT_THROW(build_topology(TopologyKind::kRing, 0), std::invalid_argument);
  EXPECT_THROW(build_topology(TopologyKind::kRing, kMaxNodes + 1), std::invalid_argument);
  EXPECT_THROW(build_topology(TopologyKind::kCustom, 4), std::invalid_argument);
  EXPECT_THROW(parse_topology_kind("torus"), std::invalid_argument);
  EXPECT_THROW(parse_weighting("max_degree"), std::invalid_argument);
}

TEST(CustomTopology, ValidationNamesEachViolation) {
  MatrixXd W(2, 2);
  W << 0.6, 0.4, 0.3, 0.7;
  const auto issues = mixing_violations(W);
  ASSERT_FALSE(issues.empty());
  bool names_entry = false;
  for (const auto& s : issues) names_entry |= s.find("asymmetric entries (0,1)") != std::string::npos;
  EXPECT_TRUE(names_entry);
  EXPECT_THROW(custom_topology(W), std::invalid_argument);

  MatrixXd neg(2, 2);
  neg << 1.5, -0.5, -0.5, 1.5;
  EXPECT_FALSE(mixing_violations(neg).empty());
}

TEST(CustomTopology, DisconnectedGraphHasNoSpectralGap) {
  EXPECT_THROW(custom_topology(MatrixXd::Identity(3, 3)), SpectralGapError);
  MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_THROW(custom_topology(swap), SpectralGapError);
}

TEST(CustomTopology, SingleNode) {
  const auto W = custom_topology(MatrixXd::Ones(1, 1));
  EXPECT_EQ(W.lambda(), 0.0);
  MatrixXd states(1, 3);
  states << 1.5, -2, 7;
  EXPECT_EQ(mix(W, states), states);
}

TEST(CustomTopology, MatrixFileRoundTrip) {
  const auto W = build_topology(TopologyKind::kRing, 5);
  const auto path = std::filesystem::temp_directory_path() / "dsgda_topology_roundtrip.txt";
  write_matrix(path.string(), W.weights());
  const MatrixXd back = read_matrix(path.string());
  EXPECT_EQ(back, W.weights());
  std::filesystem::remove(path);
}

TEST(CustomTopology, MatrixFileErrorsCarryLine) {
  const auto path = std::filesystem::temp_directory_path() / "dsgda_topology_bad.txt";
  {
    std::ofstream out(path);
    out << "0.5 0.5\n0.5 abc\n";
  }
  try {
    read_matrix(path.string());
    FAIL() << "expected a parse error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  {
    std::ofstream out(path);
    out << "0.5 0.5\n0.5\n";
  }
  EXPECT_THROW(read_matrix(path.string()), std::invalid_argument);
  std::filesystem::remove(path);
  EXPECT_THROW(read_matrix(path.string()), std::runtime_error);
}

TEST(SpectralConstants, CompleteGraphConstantsVanish) {
  const auto W = build_topology(TopologyKind::kComplete, 6);
  for (double a : {0.6, 0.75, 1.0}) {
    const auto sc = spectral_constants(W, a);
    EXPECT_EQ(sc.C_lambda, 0.0);
    EXPECT_EQ(sc.C_lambda_sq, 0.0);
  }
}

TEST(SpectralConstants, WorkedExampleHalfAndThreeQuarters) {
  const auto sc = spectral_constants(0.5, 0.75);
  EXPECT_NEAR(sc.C_lambda, 7.978, 5e-4);
  EXPECT_NEAR(sc.C_lambda, c_oracle(0.5, 0.75), 1e-12);
  EXPECT_NEAR(sc.C_lambda_sq, c_oracle(0.25, 0.75), 1e-12);
  const double l = std::log(2.0);
  EXPECT_NEAR(std::pow(0.75 / std::exp(1.0), 0.75) / (0.5 * std::pow(l, 0.75)), 1.0024, 5e-4);
  EXPECT_NEAR(2.0 / (std::exp(1.0) * 0.5 * l), 2.1230, 1e-4);
  EXPECT_NEAR(std::pow(2.0, 0.75) / (0.5 * l), 4.8527, 1e-4);
}

TEST(SpectralConstants, RingFour) {
  const auto W = build_topology(TopologyKind::kRing, 4, Weighting::kUniformNeighbor);
  EXPECT_NEAR(spectral_constants(W, 0.75).lambda, 0.5, 1e-14);
}

TEST(SpectralConstants, Preconditions) {
  EXPECT_THROW(spectral_constants(1.0, 0.75), SpectralGapError);
  EXPECT_THROW(spectral_constants(0.5, 0.5), PreconditionError);
  EXPECT_THROW(spectral_constants(0.5, 1.2), PreconditionError);
}

TEST(Mix, CompleteGraphAveragesColumns) {
  const auto W = build_topology(TopologyKind::kComplete, 5);
  Rng rng(1);
  MatrixXd states(5, 3);
  for (int i = 0; i < 5; ++i) states.row(i) = rng.normal_vector(3).transpose();
  const MatrixXd out = mix(W, states);
  const Eigen::RowVectorXd mean = states.colwise().mean();
  for (int i = 0; i < 5; ++i) EXPECT_LE((out.row(i) - mean).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mix, RingFourUnitVector) {
  const auto W = build_topology(TopologyKind::kRing, 4, Weighting::kUniformNeighbor);
  MatrixXd e(4, 1);
  e << 1, 0, 0, 0;
  const MatrixXd out = mix(W, e);
  EXPECT_DOUBLE_EQ(out(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(out(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(out(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(out(3, 0), 0.25);
}

TEST(Mix, PreservesTheAverage) {
  Rng rng(9);
  for (auto kind : {TopologyKind::kRing, TopologyKind::kStar, TopologyKind::kMeshgrid,
                    TopologyKind::kExponential}) {
    const auto W = build_topology(kind, 16);
    MatrixXd states(16, 4);
    for (int i = 0; i < 16; ++i) states.row(i) = rng.normal_vector(4).transpose();
    const MatrixXd out = mix(W, states);
    EXPECT_LE((out.colwise().mean() - states.colwise().mean()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Mix, ShapeMismatch) {
  const auto W = build_topology(TopologyKind::kRing, 4);
  EXPECT_THROW(mix(W, MatrixXd::Zero(3, 2)), DimensionError);
}

TEST(DeviationNorm, ExamplesAndPowerLaw) {
  const auto ring4 = build_topology(TopologyKind::kRing, 4, Weighting::kUniformNeighbor);
  EXPECT_NEAR(deviation_norm(ring4, 0), 1.0, 1e-14);
  EXPECT_NEAR(deviation_norm(ring4, 3), 0.125, 1e-14);
  const auto complete = build_topology(TopologyKind::kComplete, 4);
  EXPECT_NEAR(deviation_norm(complete, 5), 0.0, 1e-15);
  EXPECT_THROW(deviation_norm(ring4, -1), std::invalid_argument);

  for (auto [kind, m] : {std::pair{TopologyKind::kRing, 8}, std::pair{TopologyKind::kStar, 9},
                         std::pair{TopologyKind::kMeshgrid, 16},
                         std::pair{TopologyKind::kExponential, 16}}) {
    const auto W = build_topology(kind, m);
    const double lam = second_magnitude(W.weights());
    for (int k = 0; k <= 20; ++k) {
      EXPECT_NEAR(deviation_norm(W, k), std::pow(lam, k), 1e-10) << to_string(kind) << " k=" << k;
    }
  }
}
