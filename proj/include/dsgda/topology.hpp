#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dsgda {

enum class TopologyKind { kComplete, kRing, kStar, kMeshgrid, kExponential, kCustom };
enum class Weighting { kMetropolis, kUniformNeighbor };

std::string to_string(TopologyKind kind);
std::string to_string(Weighting w);
TopologyKind parse_topology_kind(const std::string& name);
Weighting parse_weighting(const std::string& name);

inline constexpr int kMaxNodes = 512;

// Lists every violated invariant of a candidate mixing matrix (empty = valid).
std::vector<std::string> mixing_violations(const Eigen::MatrixXd& W, double tol = 1e-12);

class MixingMatrix {
 public:
  // Validates symmetry, non-negativity, unit row sums and the spectral gap.
  MixingMatrix(Eigen::MatrixXd W, TopologyKind kind = TopologyKind::kCustom,
               std::string label = "custom");

  int m() const { return static_cast<int>(W_.rows()); }
  const Eigen::MatrixXd& weights() const { return W_; }
  TopologyKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  // Spectral norm of W - P_m.
  double lambda() const { return lambda_; }
  // Largest eigenvalue of W - P_m (may differ from lambda in sign/magnitude).
  double lambda_signed() const { return lambda_signed_; }

 private:
  Eigen::MatrixXd W_;
  TopologyKind kind_;
  std::string label_;
  double lambda_ = 0.0;
  double lambda_signed_ = 0.0;
};

MixingMatrix build_topology(TopologyKind kind, int m, Weighting w = Weighting::kMetropolis);
MixingMatrix custom_topology(const Eigen::MatrixXd& W);

// Plain text: one row per line, whitespace separated.
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXd& W);

struct SpectralConstants {
  double lambda = 0.0;
  double lambda_signed = 0.0;
  double alpha = 0.0;
  double C_lambda = 0.0;
  double C_lambda_sq = 0.0;
};

// C constant from the consensus lemma evaluated at contraction factor q.
double c_constant(double q, double alpha);
SpectralConstants spectral_constants(const MixingMatrix& W, double alpha);
SpectralConstants spectral_constants(double lambda, double alpha);

// One gossip step: row i of the result is sum_h w_ih states_h, summed in h order.
Eigen::MatrixXd mix(const MixingMatrix& W, const Eigen::MatrixXd& states);

// Spectral norm of W^k - P_m.
double deviation_norm(const MixingMatrix& W, int k);

}  // namespace dsgda
