#include "dsgda/bounds.hpp"

#include <cmath>
#include <sstream>

#include "dsgda/errors.hpp"

namespace dsgda {

namespace {

double need(const std::optional<double>& v, const char* name) {
  if (!v) throw PreconditionError(std::string("missing constant: ") + name);
  return *v;
}

double positive(const std::optional<double>& v, const char* name) {
  const double x = need(v, name);
  if (!(x > 0)) throw PreconditionError(std::string(name) + " must be positive");
  return x;
}

void check_lambda(double lambda) {
  if (lambda < 0 || lambda >= 1) {
    std::ostringstream os;
    os << "lambda must lie in [0, 1), got " << lambda;
    throw SpectralGapError(os.str());
  }
}

void check_sizes(const BoundInputs& in) {
  if (in.T < 1 || in.K < 1 || in.m < 1 || in.n < 1) {
    throw PreconditionError("T, K, m and n must all be >= 1");
  }
}

// sqrt(1/(1-lambda)) and the fixed-rate companion radical.
double radical_one(double lambda) { return std::sqrt(1.0 / (1.0 - lambda)); }
double radical_two_fixed(double lambda) {
  return std::sqrt(2.0 * lambda / ((1.0 - lambda) * (1.0 - lambda * lambda)));
}
double radical_two_decaying(const BoundInputs& in) {
  return std::sqrt(in.C_lambda_sq + in.C_lambda / (1.0 - in.lambda));
}

// k (1 + ln k 1{alpha = 1/2} + 1/(2 alpha - 1) 1{alpha > 1/2}), zero at k = 0.
double harmonic_weight(int k, double alpha) {
  if (k <= 0) return 0.0;
  if (alpha == 0.5) return k * (1.0 + std::log(static_cast<double>(k)));
  if (alpha > 0.5) return k * (1.0 + 1.0 / (2.0 * alpha - 1.0));
  std::ostringstream os;
  os << "consensus case needs alpha >= 1/2, got " << alpha;
  throw PreconditionError(os.str());
}

double contraction(const BoundInputs& in) {
  const double L = positive(in.L, "L");
  const double mu = need(in.mu, "mu");
  return L * mu / (L + mu);
}

void require_fixed(const Schedule& s, const char* what) {
  if (s.kind != ScheduleKind::kFixed) {
    throw PreconditionError(std::string(what) + " needs a fixed learning rate");
  }
}

void require_decaying(const Schedule& s, const char* what) {
  if (s.kind != ScheduleKind::kDecaying) {
    throw PreconditionError(std::string(what) + " needs a decaying learning rate");
  }
}

double t_factor(int T, double beta) {
  return beta < 1 ? std::pow(T, 1 - beta) / (1 - beta) : 1 + std::log(static_cast<double>(T));
}

double k_factor(int K, double alpha) {
  return alpha < 1 ? std::pow(K, 1 - alpha) / (1 - alpha) : 1 + std::log(static_cast<double>(K));
}

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

double BoundInputs::b_const() const {
  const double m = need(mu, "mu"), l = need(L, "L");
  return 2 * m * m * m * l * l / (m * m * m * m - 32 * l * l);
}

double BoundInputs::kappa() const { return positive(L, "L") / positive(mu, "mu"); }

BoundInputs make_bound_inputs(const ProblemSpec& spec, const MixingMatrix& W,
                              const Schedule& schedule, int T, int K, int n) {
  BoundInputs in;
  in.G = spec.G;
  in.L = spec.L;
  in.mu = spec.mu;
  in.rho = spec.rho;
  in.M = spec.M;
  in.B_x = spec.B_x;
  in.B_y = spec.B_y;
  in.T = T;
  in.K = K;
  in.m = W.m();
  in.n = n;
  in.schedule = schedule;
  const double a = (schedule.kind == ScheduleKind::kDecaying && schedule.alpha > 0.5 &&
                    schedule.alpha <= 1.0)
                       ? schedule.alpha
                       : 1.0;
  const SpectralConstants sc = spectral_constants(W, a);
  in.lambda = sc.lambda;
  in.C_lambda = sc.C_lambda;
  in.C_lambda_sq = sc.C_lambda_sq;
  return in;
}

std::string to_string(ConsensusCase c) {
  switch (c) {
    case ConsensusCase::kFixed: return "fixed";
    case ConsensusCase::kDecayK: return "decay_k";
    case ConsensusCase::kDecayT: return "decay_t";
    case ConsensusCase::kDecayTK: return "decay_tk";
    case ConsensusCase::kLocalSgda: return "local_sgda";
  }
  return "unknown";
}

ConsensusCase consensus_case_for(const Schedule& s) {
  if (s.kind == ScheduleKind::kFixed) return ConsensusCase::kFixed;
  if (s.beta == 0) return ConsensusCase::kDecayK;
  if (s.alpha == 0) return ConsensusCase::kDecayT;
  return ConsensusCase::kDecayTK;
}

double consensus_bound(const BoundInputs& in, int t, int k, ConsensusCase c) {
  check_lambda(in.lambda);
  if (t < 1 || k < 0 || k > in.K) throw PreconditionError("consensus index out of range");
  const double G = positive(in.G, "G");
  const double lam = in.lambda;
  const double K = in.K;
  const Schedule& s = in.schedule;
  switch (c) {
    case ConsensusCase::kFixed: {
      require_fixed(s, "fixed consensus case");
      const double eta = s.c;
      return eta * G * std::sqrt((1 / (1 - lam)) * (double(k) * k + 2 * lam * K * K / (1 - lam * lam)));
    }
    case ConsensusCase::kDecayK: {
      require_decaying(s, "decay_k consensus case");
      const double inner = harmonic_weight(k, s.alpha) +
                           2 * lam / (1 - lam * lam) * harmonic_weight(in.K, s.alpha);
      return s.c * G * std::sqrt(inner / (1 - lam));
    }
    case ConsensusCase::kDecayT: {
      require_decaying(s, "decay_t consensus case");
      const double tb = std::pow(static_cast<double>(t), 2 * s.beta);
      return s.c * G *
             std::sqrt((1 / (1 - lam)) * double(k) * k / tb + in.C_lambda_sq * K * K / tb +
                       in.C_lambda / (1 - lam) * K * K / tb);
    }
    case ConsensusCase::kDecayTK: {
      require_decaying(s, "decay_tk consensus case");
      const double tb = std::pow(static_cast<double>(t), 2 * s.beta);
      return s.c * G *
             std::sqrt((1 / (1 - lam)) * harmonic_weight(k, s.alpha) / tb +
                       (in.C_lambda_sq + in.C_lambda / (1 - lam)) * harmonic_weight(in.K, s.alpha) / tb);
    }
    case ConsensusCase::kLocalSgda: {
      const double cst = contraction(in);
      double acc = 0;
      for (int kp = 0; kp < k; ++kp) {
        double prod = 1;
        for (int kq = kp + 1; kq < k; ++kq) prod *= 1 - schedule_rate(s, t, kq) * cst;
        acc += schedule_rate(s, t, kp) * prod;
      }
      return 2 * G * acc;
    }
  }
  throw PreconditionError("unknown consensus case");
}

std::string to_string(ArgumentForm f) {
  switch (f) {
    case ArgumentForm::kGeneral: return "general";
    case ArgumentForm::kFixedClosed: return "fixed_closed";
    case ArgumentForm::kDecayingClosed: return "decaying_closed";
    case ArgumentForm::kCcCorollary: return "cc_corollary";
  }
  return "unknown";
}

double argument_stability_general(const BoundInputs& in, const ConsensusFn& delta) {
  check_sizes(in);
  const double G = positive(in.G, "G");
  const double L = positive(in.L, "L");
  const double cst = contraction(in);
  const double n = in.n;
  // Walk rounds backwards so the tail product over later rounds is a running value.
  double tail = 1.0;
  double total = 0.0;
  for (int t = in.T; t >= 1; --t) {
    double inner = 0.0;
    double suffix = 1.0;
    for (int k = in.K - 1; k >= 0; --k) {
      const double eta = schedule_rate(in.schedule, t, k);
      inner += eta * (L * delta(t, k) + G / n) * suffix;
      suffix *= 1 - eta * cst;
    }
    total += tail * inner;
    tail *= suffix;
  }
  return 2 * total;
}

double argument_stability_bound(const BoundInputs& in, ArgumentForm form) {
  check_lambda(in.lambda);
  check_sizes(in);
  const Schedule& s = in.schedule;
  switch (form) {
    case ArgumentForm::kGeneral: {
      const ConsensusCase c = consensus_case_for(s);
      return argument_stability_general(in, [&](int t, int k) { return consensus_bound(in, t, k, c); });
    }
    case ArgumentForm::kFixedClosed: {
      require_fixed(s, "fixed_closed argument bound");
      const double G = positive(in.G, "G"), L = positive(in.L, "L"), mu = positive(in.mu, "mu");
      const double eta = s.c, K = in.K;
      return 2 * G * (L + mu) / (L * mu) *
             (eta * L * radical_one(in.lambda) * K * K / 2 +
              eta * L * radical_two_fixed(in.lambda) * K * K + K / in.n);
    }
    case ArgumentForm::kDecayingClosed: {
      require_decaying(s, "decaying_closed argument bound");
      if (s.c != 1.0 || s.beta != 1.0) {
        throw PreconditionError("decaying_closed needs eta = 1/((k+1)^alpha t): c = 1 and beta = 1");
      }
      const double a = s.alpha;
      if (!(a > 0.5 && a < 1)) throw PreconditionError("decaying_closed needs 1/2 < alpha < 1");
      const double G = positive(in.G, "G"), L = positive(in.L, "L"), mu = positive(in.mu, "mu");
      const double cst = L * mu / (L + mu);
      const double K = in.K;
      const double Ka = std::pow(K, 1 - a);
      const double D = cst * (Ka + 1 - a) + a - 1;
      if (!(cst * (1 + Ka / (1 - a)) > 1)) {
        throw PreconditionError(
            "decaying_closed needs L mu/(L+mu) (1 + K^(1-alpha)/(1-alpha)) > 1");
      }
      const double w = 2 * a / (2 * a - 1);
      const double A = (std::pow(K, 1.5 - a) + 1.5 - a) * std::sqrt(w / (1 - in.lambda)) *
                       2 * G * L * (1 - a) / (1.5 - a) / D;
      const double B = (Ka + 1 - a) * 2 * G * L *
                       std::sqrt((in.C_lambda_sq + in.C_lambda / (1 - in.lambda)) * w * K) / D;
      return (A + B) / (in.T + 1.0) + G / in.n * (L + mu) / (L * mu);
    }
    case ArgumentForm::kCcCorollary: {
      const double mu = need(in.mu, "mu");
      if (mu != 0) throw PreconditionError("cc_corollary applies to mu = 0");
      const double G = positive(in.G, "G"), L = positive(in.L, "L");
      const ConsensusCase c = consensus_case_for(s);
      double acc = 0;
      for (int t = 1; t <= in.T; ++t) {
        for (int k = 0; k < in.K; ++k) {
          acc += schedule_rate(s, t, k) * (L * consensus_bound(in, t, k, c) + G / in.n);
        }
      }
      return 2 * acc;
    }
  }
  throw PreconditionError("unknown argument form");
}

double weak_pd_empirical_bound(const BoundInputs& in, RateForm form) {
  check_lambda(in.lambda);
  check_sizes(in);
  const double G = positive(in.G, "G"), L = positive(in.L, "L");
  const double Bx = need(in.B_x, "B_x"), By = need(in.B_y, "B_y");
  const double T = in.T, K = in.K;
  const Schedule& s = in.schedule;
  if (form == RateForm::kFixed) {
    require_fixed(s, "fixed weak-PD bound");
    const double eta = s.c;
    return (1 - eta) / (2 * eta * T * K) * (Bx * Bx + By * By) + eta * G * G +
           (Bx + By) * 2 * G / std::sqrt(T * K) +
           eta * G * K * (Bx + By) * (1 + L / 2) *
               (0.5 * radical_one(in.lambda) + radical_two_fixed(in.lambda));
  }
  require_decaying(s, "decaying weak-PD bound");
  if (!(s.alpha > 0.5 && s.alpha <= 1) || s.beta > 1) {
    throw PreconditionError("decaying weak-PD bound needs 1/2 < alpha <= 1 and beta <= 1");
  }
  const double w = 2 * s.alpha / (2 * s.alpha - 1);
  const double tf = t_factor(in.T, s.beta);
  return G * G / (T * K) * tf * k_factor(in.K, s.alpha) +
         (Bx + By) * G * (L + 2) *
             (std::sqrt(w / (1 - in.lambda)) + std::sqrt((in.C_lambda_sq + in.C_lambda / (1 - in.lambda)) * w)) /
             (2 * T) * std::sqrt(K) * tf +
         2 * G * (Bx + By) / std::sqrt(T * K);
}

double weak_pd_population_bound(const BoundInputs& in, RateForm form) {
  positive(in.mu, "mu");
  const double G = positive(in.G, "G");
  const double opt = weak_pd_empirical_bound(in, form);
  const ArgumentForm af = form == RateForm::kFixed ? ArgumentForm::kFixedClosed
                                                   : ArgumentForm::kDecayingClosed;
  return opt + std::sqrt(2.0) * G * argument_stability_bound(in, af);
}

double primal_stability_bound(const BoundInputs& in, double ep_empirical_sup) {
  const double G = positive(in.G, "G"), rho = positive(in.rho, "rho"), mu = positive(in.mu, "mu");
  if (ep_empirical_sup < 0) throw PreconditionError("excess primal empirical sup must be >= 0");
  return 2 * G / in.n * std::sqrt(1 / (4 * rho) + 1 / mu) + 2 * std::sqrt(2 / rho * ep_empirical_sup);
}

FlaggedValue excess_primal_bound(const BoundInputs& in, PrimalForm form, double epsilon) {
  const double G = positive(in.G, "G"), L = positive(in.L, "L"), mu = positive(in.mu, "mu");
  const double kappa = L / mu;
  if (form == PrimalForm::kGap) {
    if (epsilon < 0) throw PreconditionError("epsilon must be >= 0");
    return {G * std::sqrt(1 + kappa * kappa) * epsilon + 4 * G * G / (mu * in.m * in.n), true, ""};
  }
  check_lambda(in.lambda);
  check_sizes(in);
  const double rho = positive(in.rho, "rho");
  const Schedule& s = in.schedule;
  if (s.kind != ScheduleKind::kDecaying || !close_to(s.c, 4 / mu) || s.beta != 1 ||
      !(s.alpha > 0.5 && s.alpha < 1)) {
    throw PreconditionError(
        "schedule mismatch: excess primal bounds need eta = 4/(mu (k+1)^alpha t), 1/2 < alpha < 1");
  }
  FlaggedValue out;
  std::string notes;
  const double a = s.alpha, K = in.K, T = in.T;
  const double w = 2 * a / (2 * a - 1);
  const double r1sq = 1 / (1 - in.lambda);
  const double r2sq = in.C_lambda_sq + in.C_lambda / (1 - in.lambda);
  if (form == PrimalForm::kEmpirical) {
    const double By = need(in.B_y, "B_y");
    const double b = in.b_const();
    if (!(mu * mu * mu * mu > 32 * L * L)) notes += "b not positive (needs mu^4 > 32 L^2); ";
    if (s.c * (L + L * L / mu) > 1) notes += "eta (L + L^2/mu) > 1 at t=1, k=0; ";
    const double Ka = std::pow(K, 1 - a);
    const double first = 16 * G / (mu * mu) * (4 * By * b * L / (1 - mu * L) + 2 * G) *
                         ((std::pow(K, 1.5) + 1.5 - a) / Ka * (1 - a) / (1.5 - a) * std::sqrt(w * r1sq) +
                          (Ka + 1 - a) / Ka * std::sqrt(K) * std::sqrt(r2sq * w));
    const double second = 64 * G * G * b / (mu * mu * mu * mu) * (1 - a) * K * K / Ka *
                          (w * r1sq + r2sq * w);
    const double third = 1 / Ka * (2 * a * (1 - a) / (2 * a - 1)) * 16 * G * G / (mu * mu) *
                         (rho / (1 - mu * L) + 2 * (L + L * L / mu));
    out.value = (first + second + third) / T;
  } else {
    const double By = need(in.B_y, "B_y");
    const double O = std::sqrt(r1sq) + std::sqrt(r2sq);
    out.value = 2 * G * G / in.n * std::sqrt(1 + kappa * kappa) * std::sqrt(1 / (4 * rho) + 1 / mu) +
                4 * G * G / (mu * in.m * in.n) +
                2 * std::sqrt(2.0) * G * G / std::sqrt(T) * std::sqrt(1 / rho + kappa * kappa) *
                    (std::sqrt(64 * By * kappa * kappa * kappa / (mu * mu)) * std::sqrt(O) * std::pow(K, 0.25) +
                     O * std::sqrt(128 * kappa * kappa / (mu * mu * mu)) * std::pow(K, (1 + a) / 2) +
                     std::sqrt(32 * rho * kappa * kappa / (mu * mu)) / std::pow(K, (1 - a) / 2));
    if (s.c * (L + L * L / mu) > 1) notes += "eta (L + L^2/mu) > 1 at t=1, k=0; ";
  }
  out.valid = notes.empty() && std::isfinite(out.value) && out.value >= 0;
  if (!std::isfinite(out.value) || out.value < 0) notes += "value not finite and non-negative; ";
  out.note = notes;
  return out;
}

double weak_stability_bound(const BoundInputs& in, RateForm form) {
  check_lambda(in.lambda);
  check_sizes(in);
  const double G = positive(in.G, "G"), L = positive(in.L, "L");
  const double K = in.K, T = in.T, n = in.n;
  const Schedule& s = in.schedule;
  if (form == RateForm::kFixed) {
    require_fixed(s, "fixed weak-stability bound");
    const double eta = s.c;
    const double O = radical_one(in.lambda) + radical_two_fixed(in.lambda);
    return 2 * std::sqrt(2.0) * eta * G * G * (eta * K * L * O + 1 / n) * K * (T + 1);
  }
  const double M = positive(in.M, "M");
  require_decaying(s, "decaying weak-stability bound");
  if (!close_to(s.c, 1 / L) || s.alpha != 1 || s.beta != 1) {
    throw PreconditionError("schedule mismatch: decaying weak stability needs eta = 1/(L (k+1) t)");
  }
  const double lk = std::log(K);
  const double inner = 2 * G / L * std::pow(T, 1 + lk) / (1 + lk) *
                       (K / n + radical_one(in.lambda) * K + radical_two_decaying(in) * std::pow(K, 1.5));
  return 2 * std::pow(inner, 0.2) * std::pow(2 * M * in.m, 0.8) * std::pow(K, 0.4) / std::pow(n, 0.8);
}

ConnectionMultipliers connection_multipliers(const BoundInputs& in, double epsilon) {
  if (epsilon < 0) throw PreconditionError("epsilon must be >= 0");
  const double G = positive(in.G, "G");
  ConnectionMultipliers c;
  c.weak_gap = std::sqrt(2.0) * G * epsilon;
  const double mu = positive(in.mu, "mu");
  const double kappa = positive(in.L, "L") / mu;
  c.excess_primal_gap = G * std::sqrt(1 + kappa * kappa) * epsilon + 4 * G * G / (mu * in.m * in.n);
  c.strong_gap = G * std::sqrt(2 + 2 * kappa * kappa) * epsilon;
  return c;
}

const BoundEntry* BoundReport::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

BoundReport bound_report(const BoundInputs& in, double epsilon, double ep_empirical_sup) {
  BoundReport rep;
  auto add = [&](const std::string& id, const std::function<double()>& fn) {
    try {
      const double v = fn();
      rep.entries.push_back({id, v, std::isfinite(v) && v >= 0, ""});
    } catch (const std::exception& e) {
      rep.entries.push_back({id, std::nan(""), false, e.what()});
    }
  };
  auto add_flagged = [&](const std::string& id, const std::function<FlaggedValue()>& fn) {
    try {
      const FlaggedValue f = fn();
      rep.entries.push_back({id, f.value, f.valid, f.note});
    } catch (const std::exception& e) {
      rep.entries.push_back({id, std::nan(""), false, e.what()});
    }
  };
  add("consensus_max", [&] {
    const ConsensusCase c = consensus_case_for(in.schedule);
    double best = 0;
    for (int t = 1; t <= in.T; ++t)
      for (int k = 0; k < in.K; ++k) best = std::max(best, consensus_bound(in, t, k, c));
    return best;
  });
  for (auto f : {ArgumentForm::kGeneral, ArgumentForm::kFixedClosed, ArgumentForm::kDecayingClosed,
                 ArgumentForm::kCcCorollary}) {
    add("argument_" + to_string(f), [&] { return argument_stability_bound(in, f); });
  }
  for (auto f : {RateForm::kFixed, RateForm::kDecaying}) {
    const std::string tag = f == RateForm::kFixed ? "fixed" : "decaying";
    add("weak_pd_empirical_" + tag, [&] { return weak_pd_empirical_bound(in, f); });
    add("weak_pd_population_" + tag, [&] { return weak_pd_population_bound(in, f); });
    add("weak_stability_" + tag, [&] { return weak_stability_bound(in, f); });
  }
  add("primal_stability", [&] { return primal_stability_bound(in, ep_empirical_sup); });
  add_flagged("excess_primal_empirical", [&] { return excess_primal_bound(in, PrimalForm::kEmpirical); });
  add_flagged("excess_primal_population", [&] { return excess_primal_bound(in, PrimalForm::kPopulation); });
  add_flagged("excess_primal_gap", [&] { return excess_primal_bound(in, PrimalForm::kGap, epsilon); });
  add("connection_weak", [&] {
    if (epsilon < 0) throw PreconditionError("epsilon must be >= 0");
    return std::sqrt(2.0) * positive(in.G, "G") * epsilon;
  });
  add("connection_excess_primal", [&] { return connection_multipliers(in, epsilon).excess_primal_gap; });
  add("connection_strong", [&] { return connection_multipliers(in, epsilon).strong_gap; });
  return rep;
}

}  // namespace dsgda
