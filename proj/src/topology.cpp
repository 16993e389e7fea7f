#include "dsgda/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dsgda/errors.hpp"

namespace dsgda {

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kStar: return "star";
    case TopologyKind::kMeshgrid: return "meshgrid";
    case TopologyKind::kExponential: return "exponential";
    case TopologyKind::kCustom: return "custom";
  }
  return "unknown";
}

std::string to_string(Weighting w) {
  return w == Weighting::kMetropolis ? "metropolis" : "uniform_neighbor";
}

TopologyKind parse_topology_kind(const std::string& name) {
  for (auto k : {TopologyKind::kComplete, TopologyKind::kRing, TopologyKind::kStar,
                 TopologyKind::kMeshgrid, TopologyKind::kExponential, TopologyKind::kCustom}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown topology '" + name + "'");
}

Weighting parse_weighting(const std::string& name) {
  if (name == "metropolis") return Weighting::kMetropolis;
  if (name == "uniform_neighbor") return Weighting::kUniformNeighbor;
  throw std::invalid_argument("unknown weighting '" + name + "'");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Eigenvalues of W - P_m, ascending.
Eigen::VectorXd centered_spectrum(const Eigen::MatrixXd& W) {
  const int m = static_cast<int>(W.rows());
  const Eigen::MatrixXd P = Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  const Eigen::MatrixXd D = W - P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (D + D.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

std::vector<std::string> mixing_violations(const Eigen::MatrixXd& W, double tol) {
  std::vector<std::string> out;
  if (W.rows() != W.cols() || W.rows() == 0) {
    out.push_back("matrix is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) +
                  ", expected a non-empty square matrix");
    return out;
  }
  const int m = static_cast<int>(W.rows());
  if (m > kMaxNodes) {
    out.push_back("m = " + std::to_string(m) + " exceeds the supported " +
                  std::to_string(kMaxNodes) + " nodes");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!std::isfinite(W(i, j))) out.push_back("non-finite entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (W(i, j) < 0 || W(i, j) > 1) {
        out.push_back("entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                      fmt(W(i, j)) + " outside [0,1]");
      }
      if (j > i && W(i, j) != W(j, i)) {
        out.push_back("asymmetric entries (" + std::to_string(i) + "," + std::to_string(j) +
                      ") = " + fmt(W(i, j)) + " vs " + fmt(W(j, i)));
      }
    }
    const double rs = W.row(i).sum();
    if (std::abs(rs - 1.0) > tol) {
      out.push_back("row " + std::to_string(i) + " sums to " + fmt(rs));
    }
  }
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    const double cs = W.col(j).sum();
    if (std::abs(cs - 1.0) > tol) {
      out.push_back("column " + std::to_string(j) + " sums to " + fmt(cs));
    }
  }
  if (out.empty()) {
    const Eigen::VectorXd ev = centered_spectrum(W);
    const double lam = ev.cwiseAbs().maxCoeff();
    if (lam >= 1.0 - 1e-9) {
      out.push_back("spectral gap vanishes: lambda = " + fmt(lam));
    }
  }
  return out;
}

MixingMatrix::MixingMatrix(Eigen::MatrixXd W, TopologyKind kind, std::string label)
    : W_(std::move(W)), kind_(kind), label_(std::move(label)) {
  const auto issues = mixing_violations(W_);
  if (!issues.empty()) {
    std::string msg = "invalid mixing matrix:";
    for (const auto& s : issues) msg += "\n  " + s;
    if (issues.size() == 1 && issues[0].rfind("spectral gap", 0) == 0) {
      throw SpectralGapError(msg);
    }
    throw std::invalid_argument(msg);
  }
  const Eigen::VectorXd ev = centered_spectrum(W_);
  if (m() == 1) {
    lambda_ = 0.0;
    lambda_signed_ = 0.0;
    return;
  }
  lambda_ = ev.cwiseAbs().maxCoeff();
  // The all-ones direction contributes an exact zero to the centered spectrum;
  // the remaining m-1 eigenvalues are those of W on the complement.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W_, Eigen::EigenvaluesOnly);
  lambda_signed_ = es.eigenvalues()(m() - 2);
}

namespace {

using EdgeSet = std::set<std::pair<int, int>>;

void add_edge(EdgeSet& e, int a, int b) {
  if (a == b) return;
  e.insert({std::min(a, b), std::max(a, b)});
}

Eigen::MatrixXd weights_from_edges(int m, const EdgeSet& edges, Weighting w) {
  std::vector<int> deg(m, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  const int max_deg = m > 0 ? *std::max_element(deg.begin(), deg.end()) : 0;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  for (auto [a, b] : edges) {
    const double v = w == Weighting::kMetropolis ? 1.0 / (1.0 + std::max(deg[a], deg[b]))
                                                 : 1.0 / (2.0 * max_deg);
    W(a, b) = W(b, a) = v;
  }
  for (int i = 0; i < m; ++i) {
    double off = 0;
    for (int j = 0; j < m; ++j) off += (j == i) ? 0.0 : W(i, j);
    W(i, i) = 1.0 - off;
  }
  return W;
}

}  // namespace

MixingMatrix build_topology(TopologyKind kind, int m, Weighting w) {
  if (m < 1 || m > kMaxNodes) {
    throw std::invalid_argument("node count " + std::to_string(m) + " outside [1, " +
                                std::to_string(kMaxNodes) + "]");
  }
  EdgeSet edges;
  switch (kind) {
    case TopologyKind::kComplete:
      return MixingMatrix(Eigen::MatrixXd::Constant(m, m, 1.0 / m), kind, "complete");
    case TopologyKind::kRing:
      for (int i = 0; i < m; ++i) add_edge(edges, i, (i + 1) % m);
      break;
    case TopologyKind::kStar:
      for (int i = 1; i < m; ++i) add_edge(edges, 0, i);
      break;
    case TopologyKind::kMeshgrid: {
      const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
      if (s * s != m) {
        throw std::invalid_argument("meshgrid needs a perfect-square node count, got " +
                                    std::to_string(m));
      }
      for (int r = 0; r < s; ++r) {
        for (int c = 0; c < s; ++c) {
          const int i = r * s + c;
          if (c + 1 < s) add_edge(edges, i, i + 1);
          if (r + 1 < s) add_edge(edges, i, i + s);
        }
      }
      break;
    }
    case TopologyKind::kExponential: {
      if ((m & (m - 1)) != 0) {
        throw std::invalid_argument("exponential graph needs a power-of-two node count, got " +
                                    std::to_string(m));
      }
      for (int i = 0; i < m; ++i) {
        for (int hop = 1; hop < m; hop <<= 1) {
          add_edge(edges, i, (i + hop) % m);
          add_edge(edges, i, ((i - hop) % m + m) % m);
        }
      }
      break;
    }
    case TopologyKind::kCustom:
      throw std::invalid_argument("custom topology needs an explicit matrix");
  }
  if (m == 1) return MixingMatrix(Eigen::MatrixXd::Ones(1, 1), kind, to_string(kind));
  return MixingMatrix(weights_from_edges(m, edges, w), kind, to_string(kind));
}

MixingMatrix custom_topology(const Eigen::MatrixXd& W) {
  return MixingMatrix(W, TopologyKind::kCustom, "custom");
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad number '" +
                                    tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": row has " +
                                  std::to_string(row.size()) + " entries, expected " +
                                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no matrix rows");
  Eigen::MatrixXd W(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) W(i, j) = rows[i][j];
  }
  return W;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& W) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file '" + path + "'");
  out << std::setprecision(17);
  for (int i = 0; i < W.rows(); ++i) {
    for (int j = 0; j < W.cols(); ++j) out << (j ? " " : "") << W(i, j);
    out << "\n";
  }
}

double c_constant(double q, double alpha) {
  if (!(alpha > 0.5 && alpha <= 1.0)) {
    throw PreconditionError("C constant needs 1/2 < alpha <= 1, got alpha = " + fmt(alpha));
  }
  if (q < 0 || q >= 1) throw PreconditionError("C constant needs 0 <= q < 1, got " + fmt(q));
  if (q == 0) return 0.0;
  const double ln = -std::log(q);
  return std::pow(alpha / M_E, alpha) / (q * std::pow(ln, alpha)) + 2.0 / (M_E * q * ln) +
         std::pow(2.0, alpha) / (q * ln);
}

SpectralConstants spectral_constants(double lambda, double alpha) {
  if (lambda >= 1.0 - 1e-9) {
    throw SpectralGapError("spectral gap vanishes: lambda = " + fmt(lambda));
  }
  SpectralConstants sc;
  sc.lambda = lambda;
  sc.lambda_signed = lambda;
  sc.alpha = alpha;
  sc.C_lambda = c_constant(lambda, alpha);
  sc.C_lambda_sq = c_constant(lambda * lambda, alpha);
  return sc;
}

SpectralConstants spectral_constants(const MixingMatrix& W, double alpha) {
  SpectralConstants sc = spectral_constants(W.lambda(), alpha);
  sc.lambda_signed = W.lambda_signed();
  return sc;
}

Eigen::MatrixXd mix(const MixingMatrix& W, const Eigen::MatrixXd& states) {
  const int m = W.m();
  if (states.rows() != m) {
    throw DimensionError("mix: states have " + std::to_string(states.rows()) +
                         " rows, mixing matrix has " + std::to_string(m));
  }
  const Eigen::MatrixXd& w = W.weights();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, states.cols());
  for (int i = 0; i < m; ++i) {
    for (int h = 0; h < m; ++h) {
      const double wih = w(i, h);
      if (wih == 0.0) continue;
      for (int c = 0; c < states.cols(); ++c) out(i, c) += wih * states(h, c);
    }
  }
  return out;
}

double deviation_norm(const MixingMatrix& W, int k) {
  if (k < 0) throw std::invalid_argument("deviation_norm: k must be >= 0");
  const int m = W.m();
  Eigen::MatrixXd Wk = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < k; ++i) Wk = Wk * W.weights();
  const Eigen::MatrixXd D = Wk - Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (D + D.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace dsgda
