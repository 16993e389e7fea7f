#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsgda/rng.hpp"

namespace dsgda {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ProblemKind { kQuadScSc, kBilinearCC, kAucCC, kPlScToy, kNcNcToy };
enum class ConvexityClass { kScSc, kCC, kPlSc, kNcNc };

std::string to_string(ProblemKind kind);
std::string to_string(ConvexityClass c);
ProblemKind parse_problem_kind(const std::string& name);

// One draw from the data distribution. The payload layout is problem specific:
//   quad_scsc, bilinear_cc : [xi_a (d_x) | xi_b (d_y)]
//   auc_cc                 : [features (d) | label in {-1, +1}]
//   pl_sc_toy, ncnc_toy    : [xi]
struct Sample {
  Vec payload;
  bool operator==(const Sample& o) const {
    return payload.size() == o.payload.size() && payload == o.payload;
  }
};

// Per-agent data law. Agent i draws around a center of norm `heterogeneity`
// whose sign alternates with i; the Gaussian deviation is radially clipped to
// `clip`, which keeps the support bounded and the mean exactly on the center.
struct DataDistribution {
  double sigma = 1.0;
  double clip = 3.0;
  double heterogeneity = 0.0;

  double support_radius() const { return heterogeneity + clip; }
};

struct ProblemParams {
  ProblemKind kind = ProblemKind::kQuadScSc;
  int dim = 1;             // quad_scsc: d_x = d_y = dim; auc_cc: feature dimension
  double mu = 1.0;         // quad_scsc / pl_sc_toy modulus
  double coupling = 0.0;   // quad_scsc: A = coupling * I; pl_sc_toy: c
  Mat matrix;              // bilinear_cc coupling A (d_x x d_y)
  double class_prior = 0.5;  // auc_cc: P(label = +1)
  double separation = 1.0;   // auc_cc: class mean offset along e_1
  double l2 = 0.0;           // auc_cc: ridge term, > 0 makes it SC-SC
  double amplitude = 1.0;    // ncnc_toy: M
  std::optional<double> radius_x;
  std::optional<double> radius_y;
  DataDistribution data;
};

struct ProblemSpec {
  int d_x = 0;
  int d_y = 0;
  double G = 0.0;
  double L = 0.0;
  double mu = 0.0;
  std::optional<double> rho;
  bool rho_empirical = false;
  std::optional<double> M;
  std::optional<double> B_x;
  std::optional<double> B_y;
  ConvexityClass convexity = ConvexityClass::kScSc;
  bool G_exact = true;  // false when G is a certified upper bound
};

struct Gradient {
  Vec gx;
  Vec gy;
};

class MinimaxProblem {
 public:
  explicit MinimaxProblem(ProblemParams params) : params_(std::move(params)) {}
  virtual ~MinimaxProblem() = default;

  const ProblemSpec& spec() const { return spec_; }
  const ProblemParams& params() const { return params_; }
  ProblemKind kind() const { return params_.kind; }
  virtual int payload_dim() const = 0;

  virtual double value(const Vec& x, const Vec& y, const Sample& s) const = 0;
  virtual Gradient grad(const Vec& x, const Vec& y, const Sample& s) const = 0;

  // Draw a sample for agent `agent` out of `m` agents.
  virtual Sample draw(Rng& rng, int agent, int m) const;
  // Largest payload-block norm any sample can have.
  virtual double support_radius() const { return params_.data.support_radius(); }

  // True when the risk functionals depend on the data only through the mean
  // payload (up to constants that cancel in every risk difference).
  virtual bool mean_reducible() const { return false; }
  // Mean payload of the population mixture over `m` agents.
  virtual Vec population_mean(int m) const;

  // Closed-form maximizer of F(x, .) over Theta_y, F being the average of f
  // over `objective`. Empty when no closed form is implemented.
  virtual std::optional<Vec> best_response_y(const Vec& /*x*/,
                                             std::span<const Sample> /*objective*/) const {
    return std::nullopt;
  }
  virtual std::optional<Vec> best_response_x(const Vec& /*y*/,
                                             std::span<const Sample> /*objective*/) const {
    return std::nullopt;
  }

  // Projection of x (or y) onto its declared ball; identity when unconstrained.
  Vec project_x(const Vec& x) const;
  Vec project_y(const Vec& y) const;

  void check_point(const Vec& x, const Vec& y) const;
  void check_sample(const Sample& s) const;

 protected:
  // Samples random points of the domain and the sample support and checks the
  // declared G holds there. Throws std::logic_error on violation.
  void verify_gradient_bound(int probes = 256) const;
  Vec center(int agent, int block_dim) const;
  Vec clipped_noise(Rng& rng, int n) const;
  Vec random_in_ball(Rng& rng, int n, double radius) const;

  ProblemParams params_;
  ProblemSpec spec_;
};

using ProblemPtr = std::shared_ptr<const MinimaxProblem>;

ProblemPtr make_problem(const ProblemParams& params);

// Average objective over a set of samples.
double objective_value(const MinimaxProblem& p, const Vec& x, const Vec& y,
                       std::span<const Sample> samples);
Gradient objective_grad(const MinimaxProblem& p, const Vec& x, const Vec& y,
                        std::span<const Sample> samples);
Sample mean_sample(std::span<const Sample> samples);

Vec project_ball(const Vec& v, std::optional<double> radius);

// Saddle point of the empirical objective F_S.
struct SaddleSolution {
  Vec x;
  Vec y;
  std::string method;  // "analytic" or "numeric"
  double residual = 0.0;
};

struct SolverBudget {
  int max_iterations = 200000;
  double tolerance = 1e-10;
};

SaddleSolution saddle(const MinimaxProblem& p, std::span<const Sample> samples,
                      std::optional<SolverBudget> budget = std::nullopt);

}  // namespace dsgda
