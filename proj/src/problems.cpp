#include "dsgda/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsgda/errors.hpp"

namespace dsgda {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kQuadScSc: return "quad_scsc";
    case ProblemKind::kBilinearCC: return "bilinear_cc";
    case ProblemKind::kAucCC: return "auc_cc";
    case ProblemKind::kPlScToy: return "pl_sc_toy";
    case ProblemKind::kNcNcToy: return "ncnc_toy";
  }
  return "unknown";
}

std::string to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::kScSc: return "SC-SC";
    case ConvexityClass::kCC: return "C-C";
    case ConvexityClass::kPlSc: return "PL-SC";
    case ConvexityClass::kNcNc: return "NC-NC";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
  for (auto k : {ProblemKind::kQuadScSc, ProblemKind::kBilinearCC, ProblemKind::kAucCC,
                 ProblemKind::kPlScToy, ProblemKind::kNcNcToy}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown problem kind '" + name + "'");
}

Vec project_ball(const Vec& v, std::optional<double> radius) {
  if (!radius) return v;
  const double n = v.norm();
  if (n <= *radius) return v;
  return v * (*radius / n);
}

Vec MinimaxProblem::project_x(const Vec& x) const { return project_ball(x, spec_.B_x); }
Vec MinimaxProblem::project_y(const Vec& y) const { return project_ball(y, spec_.B_y); }

void MinimaxProblem::check_point(const Vec& x, const Vec& y) const {
  if (x.size() != spec_.d_x || y.size() != spec_.d_y) {
    throw DimensionError("point has shape (" + std::to_string(x.size()) + ", " +
                         std::to_string(y.size()) + "), problem expects (" +
                         std::to_string(spec_.d_x) + ", " + std::to_string(spec_.d_y) + ")");
  }
}

void MinimaxProblem::check_sample(const Sample& s) const {
  if (s.payload.size() != payload_dim()) {
    throw DimensionError("sample payload has length " + std::to_string(s.payload.size()) +
                         ", expected " + std::to_string(payload_dim()));
  }
}

Vec MinimaxProblem::center(int agent, int block_dim) const {
  const double sign = (agent % 2 == 0) ? 1.0 : -1.0;
  return Vec::Constant(block_dim, sign * params_.data.heterogeneity / std::sqrt(block_dim));
}

Vec MinimaxProblem::clipped_noise(Rng& rng, int n) const {
  Vec z = params_.data.sigma * rng.normal_vector(n);
  const double norm = z.norm();
  if (norm > params_.data.clip) z *= params_.data.clip / norm;
  return z;
}

Vec MinimaxProblem::random_in_ball(Rng& rng, int n, double radius) const {
  Vec v = rng.normal_vector(n);
  const double r = radius * std::pow(rng.uniform(), 1.0 / n);
  const double norm = v.norm();
  return norm > 0 ? Vec(v * (r / norm)) : Vec(Vec::Zero(n));
}

Sample MinimaxProblem::draw(Rng& rng, int agent, int /*m*/) const {
  const int n = payload_dim();
  return Sample{center(agent, n) + clipped_noise(rng, n)};
}

Vec MinimaxProblem::population_mean(int m) const {
  const int n = payload_dim();
  Vec acc = Vec::Zero(n);
  for (int i = 0; i < m; ++i) acc += center(i, n);
  return acc / m;
}

void MinimaxProblem::verify_gradient_bound(int probes) const {
  Rng rng(0x5eedULL + static_cast<std::uint64_t>(params_.kind));
  const double bx = spec_.B_x.value_or(10.0);
  const double by = spec_.B_y.value_or(10.0);
  for (int s = 0; s < probes; ++s) {
    const Vec x = random_in_ball(rng, spec_.d_x, bx);
    const Vec y = random_in_ball(rng, spec_.d_y, by);
    const Sample smp = draw(rng, s, 2);
    const Gradient g = grad(x, y, smp);
    const double norm = std::sqrt(g.gx.squaredNorm() + g.gy.squaredNorm());
    if (norm > spec_.G * (1.0 + 1e-9) + 1e-12) {
      throw std::logic_error(to_string(params_.kind) + ": gradient norm " + std::to_string(norm) +
                             " exceeds declared G = " + std::to_string(spec_.G));
    }
  }
}

namespace {

void require_radii(const ProblemParams& p, const char* name) {
  if (!p.radius_x || !p.radius_y) {
    throw std::invalid_argument(std::string(name) +
                                ": radius_x and radius_y are needed to declare G");
  }
  if (*p.radius_x <= 0 || *p.radius_y <= 0) {
    throw std::invalid_argument(std::string(name) + ": ball radii must be positive");
  }
}

void require_data(const ProblemParams& p) {
  if (p.data.sigma < 0 || p.data.clip < 0 || p.data.heterogeneity < 0) {
    throw std::invalid_argument("data distribution parameters must be non-negative");
  }
}

// Maximizer of a concave function on [lo, hi].
double golden_max(const std::function<double(double)>& h, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (hc < hd) {
      a = c;
      c = d;
      hc = hd;
      d = a + phi * (b - a);
      hd = h(d);
    } else {
      b = d;
      d = c;
      hd = hc;
      c = b - phi * (b - a);
      hc = h(c);
    }
  }
  return std::max({h(lo), h(hi), h(0.5 * (a + b))});
}

// ---------------------------------------------------------------------------
// f(x, y; a, b) = mu/2 |x - a|^2 - mu/2 |y - b|^2 + kappa x^T y

class QuadScSc final : public MinimaxProblem {
 public:
  explicit QuadScSc(ProblemParams p) : MinimaxProblem(std::move(p)) {
    const auto& q = params_;
    if (q.dim < 1) throw std::invalid_argument("quad_scsc: dim must be >= 1");
    if (!(q.mu > 0)) throw std::invalid_argument("quad_scsc: mu must be positive");
    require_radii(q, "quad_scsc");
    require_data(q);
    d_ = q.dim;
    mu_ = q.mu;
    kappa_ = q.coupling;
    spec_.d_x = spec_.d_y = d_;
    spec_.mu = mu_;
    spec_.L = std::hypot(mu_, kappa_);
    spec_.B_x = q.radius_x;
    spec_.B_y = q.radius_y;
    spec_.convexity = ConvexityClass::kScSc;
    spec_.G = gradient_sup();
    verify_gradient_bound();
  }

  int payload_dim() const override { return 2 * d_; }
  bool mean_reducible() const override { return true; }

  double value(const Vec& x, const Vec& y, const Sample& s) const override {
    const auto a = s.payload.head(d_);
    const auto b = s.payload.tail(d_);
    return 0.5 * mu_ * (x - a).squaredNorm() - 0.5 * mu_ * (y - b).squaredNorm() +
           kappa_ * x.dot(y);
  }

  Gradient grad(const Vec& x, const Vec& y, const Sample& s) const override {
    const auto a = s.payload.head(d_);
    const auto b = s.payload.tail(d_);
    return {mu_ * (x - a) + kappa_ * y, -mu_ * (y - b) + kappa_ * x};
  }

  Sample draw(Rng& rng, int agent, int /*m*/) const override {
    Vec p(2 * d_);
    p.head(d_) = center(agent, d_) + clipped_noise(rng, d_);
    p.tail(d_) = center(agent, d_) + clipped_noise(rng, d_);
    return Sample{p};
  }

  Vec population_mean(int m) const override {
    Vec acc = Vec::Zero(2 * d_);
    for (int i = 0; i < m; ++i) {
      acc.head(d_) += center(i, d_);
      acc.tail(d_) += center(i, d_);
    }
    return acc / m;
  }

  std::optional<Vec> best_response_y(const Vec& x, std::span<const Sample> obj) const override {
    const Vec b = mean_sample(obj).payload.tail(d_);
    return project_y(b + (kappa_ / mu_) * x);
  }

  std::optional<Vec> best_response_x(const Vec& y, std::span<const Sample> obj) const override {
    const Vec a = mean_sample(obj).payload.head(d_);
    return project_x(a - (kappa_ / mu_) * y);
  }

 private:
  // With x, y on their spheres the only free quantity is p = x.y, and the
  // squared norm is concave in p. The sample sup aligns a and b with the
  // deterministic part of each block.
  double gradient_sup() const {
    const double bx = *spec_.B_x, by = *spec_.B_y;
    const double r = support_radius();
    const double P = mu_ * mu_ * bx * bx + kappa_ * kappa_ * by * by;
    const double Q = kappa_ * kappa_ * bx * bx + mu_ * mu_ * by * by;
    const double al = mu_ * r, be = mu_ * r;
    auto h = [&](double p) {
      const double u = std::sqrt(std::max(0.0, P + 2 * mu_ * kappa_ * p));
      const double v = std::sqrt(std::max(0.0, Q - 2 * mu_ * kappa_ * p));
      return (u + al) * (u + al) + (v + be) * (v + be);
    };
    const double lim = bx * by;
    const double best = d_ == 1 ? std::max(h(-lim), h(lim)) : golden_max(h, -lim, lim);
    return std::sqrt(best);
  }

  int d_;
  double mu_;
  double kappa_;
};

// ---------------------------------------------------------------------------
// f(x, y; xi) = x^T A y + xi_a^T x + xi_b^T y

class BilinearCC final : public MinimaxProblem {
 public:
  explicit BilinearCC(ProblemParams p) : MinimaxProblem(std::move(p)) {
    const auto& q = params_;
    if (q.matrix.size() == 0) throw std::invalid_argument("bilinear_cc: coupling matrix is empty");
    require_radii(q, "bilinear_cc");
    require_data(q);
    A_ = q.matrix;
    spec_.d_x = static_cast<int>(A_.rows());
    spec_.d_y = static_cast<int>(A_.cols());
    Eigen::JacobiSVD<Mat> svd(A_);
    sigma_ = svd.singularValues()(0);
    spec_.L = sigma_;
    spec_.mu = 0.0;
    spec_.B_x = q.radius_x;
    spec_.B_y = q.radius_y;
    spec_.convexity = ConvexityClass::kCC;
    const double r = support_radius();
    spec_.G = std::hypot(sigma_ * *spec_.B_y + r, sigma_ * *spec_.B_x + r);
    verify_gradient_bound();
  }

  int payload_dim() const override { return spec_.d_x + spec_.d_y; }
  bool mean_reducible() const override { return true; }

  double value(const Vec& x, const Vec& y, const Sample& s) const override {
    return x.dot(A_ * y) + s.payload.head(spec_.d_x).dot(x) + s.payload.tail(spec_.d_y).dot(y);
  }

  Gradient grad(const Vec& x, const Vec& y, const Sample& s) const override {
    return {A_ * y + s.payload.head(spec_.d_x), A_.transpose() * x + s.payload.tail(spec_.d_y)};
  }

  Sample draw(Rng& rng, int agent, int /*m*/) const override {
    Vec p(payload_dim());
    p.head(spec_.d_x) = center(agent, spec_.d_x) + clipped_noise(rng, spec_.d_x);
    p.tail(spec_.d_y) = center(agent, spec_.d_y) + clipped_noise(rng, spec_.d_y);
    return Sample{p};
  }

  Vec population_mean(int m) const override {
    Vec acc = Vec::Zero(payload_dim());
    for (int i = 0; i < m; ++i) {
      acc.head(spec_.d_x) += center(i, spec_.d_x);
      acc.tail(spec_.d_y) += center(i, spec_.d_y);
    }
    return acc / m;
  }

  // F is linear in each block, so the best response sits on the sphere.
  std::optional<Vec> best_response_y(const Vec& x, std::span<const Sample> obj) const override {
    const Vec v = A_.transpose() * x + mean_sample(obj).payload.tail(spec_.d_y);
    const double n = v.norm();
    return n > 0 ? Vec(v * (*spec_.B_y / n)) : Vec(Vec::Zero(spec_.d_y));
  }

  std::optional<Vec> best_response_x(const Vec& y, std::span<const Sample> obj) const override {
    const Vec u = A_ * y + mean_sample(obj).payload.head(spec_.d_x);
    const double n = u.norm();
    return n > 0 ? Vec(-u * (*spec_.B_x / n)) : Vec(Vec::Zero(spec_.d_x));
  }

  const Mat& A() const { return A_; }

 private:
  Mat A_;
  double sigma_ = 0.0;
};

// ---------------------------------------------------------------------------
// Square-loss AUC surrogate in its saddle form. Primal block x = (w, a, b),
// dual block y = (alpha). With l2 > 0 a ridge on x makes it SC-SC.

class AucCC final : public MinimaxProblem {
 public:
  explicit AucCC(ProblemParams p) : MinimaxProblem(std::move(p)) {
    const auto& q = params_;
    if (q.dim < 1) throw std::invalid_argument("auc_cc: dim must be >= 1");
    if (!(q.class_prior > 0 && q.class_prior < 1)) {
      throw std::invalid_argument("auc_cc: class_prior must lie in (0, 1)");
    }
    if (q.l2 < 0) throw std::invalid_argument("auc_cc: l2 must be non-negative");
    require_radii(q, "auc_cc");
    require_data(q);
    d_ = q.dim;
    p_ = q.class_prior;
    l2_ = q.l2;
    spec_.d_x = d_ + 2;
    spec_.d_y = 1;
    spec_.B_x = q.radius_x;
    spec_.B_y = q.radius_y;
    if (l2_ > 0) {
      spec_.convexity = ConvexityClass::kScSc;
      spec_.mu = std::min(l2_, 2 * p_ * (1 - p_));
    } else {
      spec_.convexity = ConvexityClass::kCC;
      spec_.mu = 0.0;
    }
    spec_.L = hessian_sup();
    spec_.G = gradient_upper_bound();
    spec_.G_exact = false;
    verify_gradient_bound();
  }

  int payload_dim() const override { return d_ + 1; }
  double support_radius() const override {
    return params_.separation + params_.data.support_radius();
  }

  double value(const Vec& x, const Vec& y, const Sample& s) const override {
    const auto w = x.head(d_);
    const double a = x[d_], b = x[d_ + 1], al = y[0];
    const double score = w.dot(s.payload.head(d_));
    double v = -p_ * (1 - p_) * al * al + 0.5 * l2_ * x.squaredNorm();
    if (s.payload[d_] > 0) {
      v += (1 - p_) * (score - a) * (score - a) - 2 * (1 + al) * (1 - p_) * score;
    } else {
      v += p_ * (score - b) * (score - b) + 2 * (1 + al) * p_ * score;
    }
    return v;
  }

  Gradient grad(const Vec& x, const Vec& y, const Sample& s) const override {
    const auto w = x.head(d_);
    const auto z = s.payload.head(d_);
    const double a = x[d_], b = x[d_ + 1], al = y[0];
    const double score = w.dot(z);
    Vec gx = l2_ * x;
    Vec gy(1);
    if (s.payload[d_] > 0) {
      const double r = score - a;
      gx.head(d_) += (2 * (1 - p_) * r - 2 * (1 + al) * (1 - p_)) * z;
      gx[d_] += -2 * (1 - p_) * r;
      gy[0] = -2 * (1 - p_) * score - 2 * p_ * (1 - p_) * al;
    } else {
      const double r = score - b;
      gx.head(d_) += (2 * p_ * r + 2 * (1 + al) * p_) * z;
      gx[d_ + 1] += -2 * p_ * r;
      gy[0] = 2 * p_ * score - 2 * p_ * (1 - p_) * al;
    }
    return {gx, gy};
  }

  Sample draw(Rng& rng, int agent, int /*m*/) const override {
    Vec p(d_ + 1);
    const double label = rng.uniform() < p_ ? 1.0 : -1.0;
    p.head(d_) = center(agent, d_) + clipped_noise(rng, d_);
    p[0] += label * params_.separation;
    p[d_] = label;
    return Sample{p};
  }

  Vec population_mean(int) const override {
    throw std::logic_error("auc_cc risk is not a function of the mean payload");
  }

  // F is a concave quadratic in the scalar alpha.
  std::optional<Vec> best_response_y(const Vec& x, std::span<const Sample> obj) const override {
    const auto w = x.head(d_);
    double acc = 0;
    for (const auto& s : obj) {
      const double score = w.dot(s.payload.head(d_));
      acc += s.payload[d_] > 0 ? -(1 - p_) * score : p_ * score;
    }
    acc /= static_cast<double>(obj.size());
    Vec al(1);
    al[0] = acc / (p_ * (1 - p_));
    return project_y(al);
  }

 private:
  // The Hessian is constant per sample and rotation invariant in z, so it is
  // enough to scan |z| along e_1. Columns come from exact gradient differences.
  double hessian_sup() const {
    const int n = spec_.d_x + 1;
    const double rmax = support_radius();
    double best = 0;
    for (double label : {1.0, -1.0}) {
      for (int g = 0; g <= 64; ++g) {
        Sample s{Vec::Zero(d_ + 1)};
        s.payload[0] = rmax * g / 64.0;
        s.payload[d_] = label;
        const Vec x0 = Vec::Zero(spec_.d_x), y0 = Vec::Zero(1);
        const Gradient g0 = grad(x0, y0, s);
        Mat H(n, n);
        for (int j = 0; j < n; ++j) {
          Vec x = x0, y = y0;
          if (j < spec_.d_x) x[j] = 1; else y[0] = 1;
          const Gradient gj = grad(x, y, s);
          H.col(j).head(spec_.d_x) = gj.gx - g0.gx;
          H(n - 1, j) = gj.gy[0] - g0.gy[0];
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
        best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
      }
    }
    return best;
  }

  // Triangle-inequality bound over the balls and the sample support.
  double gradient_upper_bound() const {
    const double bx = *spec_.B_x, by = *spec_.B_y, r = support_radius();
    const double q = std::max(p_, 1 - p_);
    const double gx = 2 * q * bx * (r * r + 1) + 2 * q * (1 + by) * r + l2_ * bx;
    const double ga = 2 * q * r * bx + 2 * p_ * (1 - p_) * by;
    return std::hypot(gx, ga);
  }

  int d_;
  double p_;
  double l2_;
};

// ---------------------------------------------------------------------------
// f(x, y; xi) = (x - xi)^2 + 3 sin^2(x - xi) + c x y - mu/2 y^2

class PlScToy final : public MinimaxProblem {
 public:
  explicit PlScToy(ProblemParams p) : MinimaxProblem(std::move(p)) {
    const auto& q = params_;
    if (!(q.mu > 0)) throw std::invalid_argument("pl_sc_toy: mu must be positive");
    require_radii(q, "pl_sc_toy");
    require_data(q);
    c_ = q.coupling;
    mu_ = q.mu;
    spec_.d_x = spec_.d_y = 1;
    spec_.mu = mu_;
    spec_.B_x = q.radius_x;
    spec_.B_y = q.radius_y;
    spec_.convexity = ConvexityClass::kPlSc;
    // Hessian [[h, c], [c, -mu]] with h = 2 + 6 cos(2u) in [-4, 8]; its norm
    // is convex in h, so the endpoints decide.
    auto norm_at = [&](double h) {
      const double tr = h - mu_;
      const double disc = std::sqrt((h + mu_) * (h + mu_) + 4 * c_ * c_);
      return std::max(std::abs(0.5 * (tr + disc)), std::abs(0.5 * (tr - disc)));
    };
    spec_.L = std::max(norm_at(-4.0), norm_at(8.0));
    spec_.G = gradient_sup();
    spec_.G_exact = false;
    spec_.rho = estimate_rho();
    spec_.rho_empirical = true;
    verify_gradient_bound();
  }

  int payload_dim() const override { return 1; }

  double value(const Vec& x, const Vec& y, const Sample& s) const override {
    const double u = x[0] - s.payload[0];
    const double su = std::sin(u);
    return u * u + 3 * su * su + c_ * x[0] * y[0] - 0.5 * mu_ * y[0] * y[0];
  }

  Gradient grad(const Vec& x, const Vec& y, const Sample& s) const override {
    const double u = x[0] - s.payload[0];
    Vec gx(1), gy(1);
    gx[0] = 2 * u + 3 * std::sin(2 * u) + c_ * y[0];
    gy[0] = c_ * x[0] - mu_ * y[0];
    return {gx, gy};
  }

  std::optional<Vec> best_response_y(const Vec& x, std::span<const Sample>) const override {
    Vec y(1);
    y[0] = c_ * x[0] / mu_;
    return project_y(y);
  }

 private:
  // Grid maximum plus a Lipschitz pad, so the result is a certified bound.
  double gradient_sup() const {
    const double bx = *spec_.B_x, by = *spec_.B_y, r = support_radius();
    const int n = 160;
    double best = 0;
    for (int i = 0; i <= n; ++i) {
      const double x = -bx + 2 * bx * i / n;
      for (int j = 0; j <= n; ++j) {
        const double y = -by + 2 * by * j / n;
        const double gy = c_ * x - mu_ * y;
        for (int l = 0; l <= n; ++l) {
          const double u = x - (-r + 2 * r * l / n);
          const double gx = 2 * u + 3 * std::sin(2 * u) + c_ * y;
          best = std::max(best, gx * gx + gy * gy);
        }
      }
    }
    const double h = 2 * std::max({bx, by, r}) / n;
    return std::sqrt(best) + (spec_.L + 8.0) * h;
  }

  // PL modulus of x -> f(x, y; xi) over a dense grid; xi only shifts x, so the
  // scan runs over u = x - xi and the slope c y.
  double estimate_rho() const {
    const double by = *spec_.B_y;
    const double span = 30.0;
    const int nu = 12001;
    double rho = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 40; ++j) {
      const double s = c_ * (-by + 2 * by * j / 40.0);
      std::vector<double> hv(nu), dv(nu);
      double hmin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < nu; ++i) {
        const double u = -span + 2 * span * i / (nu - 1);
        const double su = std::sin(u);
        hv[i] = u * u + 3 * su * su + s * u;
        dv[i] = 2 * u + 3 * std::sin(2 * u) + s;
        hmin = std::min(hmin, hv[i]);
      }
      for (int i = 0; i < nu; ++i) {
        const double gap = hv[i] - hmin;
        if (gap > 1e-6) rho = std::min(rho, 0.5 * dv[i] * dv[i] / gap);
      }
    }
    return rho;
  }

  double c_;
  double mu_;
};

// ---------------------------------------------------------------------------
// f(x, y; xi) = M sin(x - xi) sin(y)

class NcNcToy final : public MinimaxProblem {
 public:
  explicit NcNcToy(ProblemParams p) : MinimaxProblem(std::move(p)) {
    const auto& q = params_;
    if (!(q.amplitude > 0)) throw std::invalid_argument("ncnc_toy: amplitude M must be positive");
    require_data(q);
    M_ = q.amplitude;
    spec_.d_x = spec_.d_y = 1;
    spec_.G = M_;
    spec_.L = M_;
    spec_.M = M_;
    spec_.B_x = q.radius_x;
    spec_.B_y = q.radius_y;
    spec_.convexity = ConvexityClass::kNcNc;
    verify_gradient_bound();
  }

  int payload_dim() const override { return 1; }

  double value(const Vec& x, const Vec& y, const Sample& s) const override {
    return M_ * std::sin(x[0] - s.payload[0]) * std::sin(y[0]);
  }

  Gradient grad(const Vec& x, const Vec& y, const Sample& s) const override {
    const double u = x[0] - s.payload[0];
    Vec gx(1), gy(1);
    gx[0] = M_ * std::cos(u) * std::sin(y[0]);
    gy[0] = M_ * std::sin(u) * std::cos(y[0]);
    return {gx, gy};
  }

 private:
  double M_;
};

}  // namespace

ProblemPtr make_problem(const ProblemParams& params) {
  switch (params.kind) {
    case ProblemKind::kQuadScSc: return std::make_shared<QuadScSc>(params);
    case ProblemKind::kBilinearCC: return std::make_shared<BilinearCC>(params);
    case ProblemKind::kAucCC: return std::make_shared<AucCC>(params);
    case ProblemKind::kPlScToy: return std::make_shared<PlScToy>(params);
    case ProblemKind::kNcNcToy: return std::make_shared<NcNcToy>(params);
  }
  throw std::invalid_argument("unknown problem kind");
}

double objective_value(const MinimaxProblem& p, const Vec& x, const Vec& y,
                       std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("objective over an empty sample set");
  double acc = 0;
  for (const auto& s : samples) acc += p.value(x, y, s);
  return acc / static_cast<double>(samples.size());
}

Gradient objective_grad(const MinimaxProblem& p, const Vec& x, const Vec& y,
                        std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("objective over an empty sample set");
  Gradient acc{Vec::Zero(x.size()), Vec::Zero(y.size())};
  for (const auto& s : samples) {
    const Gradient g = p.grad(x, y, s);
    acc.gx += g.gx;
    acc.gy += g.gy;
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  acc.gx *= inv;
  acc.gy *= inv;
  return acc;
}

Sample mean_sample(std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("mean of an empty sample set");
  Vec acc = Vec::Zero(samples.front().payload.size());
  for (const auto& s : samples) acc += s.payload;
  return Sample{acc / static_cast<double>(samples.size())};
}

namespace {

double saddle_residual(const MinimaxProblem& p, const Vec& x, const Vec& y,
                       std::span<const Sample> samples) {
  const Gradient g = objective_grad(p, x, y, samples);
  const Vec rx = x - p.project_x(x - g.gx);
  const Vec ry = y - p.project_y(y + g.gy);
  return std::sqrt(rx.squaredNorm() + ry.squaredNorm());
}

bool inside(const Vec& v, std::optional<double> r) { return !r || v.norm() <= *r; }

SaddleSolution extragradient(const MinimaxProblem& p, std::span<const Sample> samples,
                             const SolverBudget& budget) {
  const auto& sp = p.spec();
  Vec x = Vec::Zero(sp.d_x), y = Vec::Zero(sp.d_y);
  const double step = 0.5 / std::max(sp.L, 1e-12);
  double res = saddle_residual(p, x, y, samples);
  for (int it = 0; it < budget.max_iterations && res > budget.tolerance; ++it) {
    const Gradient g = objective_grad(p, x, y, samples);
    const Vec xh = p.project_x(x - step * g.gx);
    const Vec yh = p.project_y(y + step * g.gy);
    const Gradient gh = objective_grad(p, xh, yh, samples);
    x = p.project_x(x - step * gh.gx);
    y = p.project_y(y + step * gh.gy);
    if (it % 16 == 0) res = saddle_residual(p, x, y, samples);
  }
  res = saddle_residual(p, x, y, samples);
  return {x, y, "numeric", res};
}

}  // namespace

SaddleSolution saddle(const MinimaxProblem& p, std::span<const Sample> samples,
                      std::optional<SolverBudget> budget) {
  if (samples.empty()) throw std::invalid_argument("saddle of an empty sample set");
  const auto& sp = p.spec();
  std::optional<SaddleSolution> analytic;
  if (p.kind() == ProblemKind::kQuadScSc) {
    const int d = sp.d_x;
    const double mu = p.params().mu, kappa = p.params().coupling;
    const Sample mean = mean_sample(samples);
    // mu x + kappa y = mu a,  kappa x - mu y = -mu b, per coordinate.
    const double det = -mu * mu - kappa * kappa;
    const Vec a = mean.payload.head(d), b = mean.payload.tail(d);
    const Vec x = (-mu * mu * a + kappa * mu * b) / det;
    const Vec y = (-mu * kappa * a - mu * mu * b) / det;
    analytic = SaddleSolution{x, y, "analytic", 0.0};
  } else if (p.kind() == ProblemKind::kBilinearCC && sp.d_x == sp.d_y) {
    const Mat& A = p.params().matrix;
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.isInvertible()) {
      const Sample mean = mean_sample(samples);
      const Vec y = lu.solve(-mean.payload.head(sp.d_x));
      const Vec x = Eigen::FullPivLU<Mat>(A.transpose()).solve(-mean.payload.tail(sp.d_y));
      analytic = SaddleSolution{x, y, "analytic", 0.0};
    }
  }
  if (analytic && inside(analytic->x, sp.B_x) && inside(analytic->y, sp.B_y)) {
    analytic->residual = saddle_residual(p, analytic->x, analytic->y, samples);
    return *analytic;
  }
  if (!analytic && !budget) {
    throw std::invalid_argument("saddle of " + to_string(p.kind()) +
                                " needs a numeric solver budget");
  }
  return extragradient(p, samples, budget.value_or(SolverBudget{}));
}

}  // namespace dsgda
