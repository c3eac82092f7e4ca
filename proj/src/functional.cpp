#include "fichain/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fichain {

const char* to_string(EstimateKind kind) {
  switch (kind) {
    case EstimateKind::exact: return "exact";
    case EstimateKind::certified_lower_bound: return "certified_lower_bound";
    case EstimateKind::analytic_upper_bound: return "analytic_upper_bound";
  }
  return "unknown";
}

ConstantEstimate t_rel(const ReversibleChain& chain) {
  const int n = chain.size();
  // D^{1/2} (-Q) D^{-1/2} with D = diag(pi) is symmetric by detailed balance.
  Matrix sym(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) {
        sym(x, y) = chain.total_rate(x);
      } else {
        sym(x, y) = -chain.rate(x, y) * std::sqrt(chain.pi()[x] / chain.pi()[y]);
      }
    }
  }
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw DegenerateSpectrum("eigendecomposition failed");
  const double gap = solver.eigenvalues()[1];  // eigenvalue 0 is exact
  if (gap < 1e-13)
    throw DegenerateSpectrum("spectral gap below 1e-13");
  ConstantEstimate est;
  est.value = 1.0 / gap;
  est.kind = EstimateKind::exact;
  return est;
}

double h_constant(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw Error("h_constant requires r in (0, inf)");
  const double t = std::log(r);
  if (t == 0.0) return 4.0;
  // (sqrt r + 1)/(sqrt r - 1) = (e^{t/2} + 1)/(e^{t/2} - 1); expm1 keeps the
  // denominator exact near r = 1 where the direct quotient loses digits
  const double em = std::expm1(0.5 * t);
  return t * (em + 2.0) / em;
}

double theorem1_upper_bound(const ReversibleChain& chain, double tmls_value) {
  const double p = sparsity(chain);
  if (p > 0.5 * (1.0 + 1e-12))
    throw TwoPointRegime("sparsity p > 1/2: state space has at most two "
                         "states; use the two-point oracle");
  return 20.0 * tmls_value * std::log(1.0 / p);
}

double poor_upper_bound(const ReversibleChain& chain) {
  const double pi_star = chain.pi().minCoeff();
  if (pi_star >= 0.5 * (1.0 - 1e-12))
    throw DegeneratePiStar("pi_star >= 1/2 (symmetric two-point limit)");
  return t_rel(chain).value * std::log(1.0 / pi_star - 1.0) / (1.0 - 2.0 * pi_star);
}

double entropy_dual_gap(const ReversibleChain& chain, const Observable& g,
                        const Vector& h) {
  if (h.size() != chain.size()) throw Error("dual function has wrong length");
  const double ee = chain.pi().dot(h.array().exp().matrix());
  if (!(ee <= 1.0 + 1e-12))
    throw DualConstraintViolated("E[e^h] = " + std::to_string(ee) + " > 1");
  return entropy(chain, g) - chain.pi().dot((g.values().array() * h.array()).matrix());
}

namespace {

// Numerically robust forms of the two Dirichlet energies, used only inside
// the ratio maximization: per-edge terms are evaluated without subtracting
// nearly equal logarithms or square roots, so the objective stays accurate
// all the way into the near-constant regime.
double energy_sqrt_robust(const ReversibleChain& chain, const Vector& f,
                          const Vector& sqrt_f) {
  double acc = 0.0;
  for (const Edge& e : chain.edges()) {
    const double diff = (f[e.from] - f[e.to]) / (sqrt_f[e.from] + sqrt_f[e.to]);
    acc += chain.conductance(e.from, e.to) * diff * diff;
  }
  return 0.5 * acc;
}

double energy_mls_robust(const ReversibleChain& chain, const Vector& f) {
  double acc = 0.0;
  for (const Edge& e : chain.edges()) {
    const double diff = f[e.from] - f[e.to];
    acc += chain.conductance(e.from, e.to) * diff * std::log1p(diff / f[e.to]);
  }
  return 0.5 * acc;
}

struct RatioParts {
  double numerator = 0.0;    // Ent(f)
  double denominator = 0.0;  // E(sqrt f, sqrt f) or E(f, log f)
  double value() const { return numerator / denominator; }
};

enum class Kind { lsi, mlsi };

RatioParts ratio_parts(const ReversibleChain& chain, Kind kind, const Vector& g) {
  const Vector f = g.array().exp().matrix();
  RatioParts parts;
  parts.numerator = entropy(chain, Observable(f));
  if (kind == Kind::lsi) {
    parts.denominator = energy_sqrt_robust(chain, f, sqrt_vec(f));
  } else {
    parts.denominator = energy_mls_robust(chain, f);
  }
  return parts;
}

// Gradient of the ratio in g. With f = e^g:
//   d Ent / d g_x           = pi(x) f(x) (g_x - log E[f])
//   d E(sqrt f, sqrt f)/d g_x = sum_y c(x,y) (s_x - s_y) s_x,  s = e^{g/2}
//   d E(f, log f)/d g_x     = sum_y c(x,y) (f_x (g_x - g_y) + f_x - f_y)
Vector ratio_gradient(const ReversibleChain& chain, Kind kind, const Vector& g) {
  const int n = chain.size();
  const Vector f = g.array().exp().matrix();
  const double ef = chain.pi().dot(f);
  const double log_ef = std::log(ef);

  Vector grad_num(n);
  for (int x = 0; x < n; ++x)
    grad_num[x] = chain.pi()[x] * f[x] * (g[x] - log_ef);

  Vector grad_den = Vector::Zero(n);
  if (kind == Kind::lsi) {
    const Vector s = (g.array() * 0.5).exp().matrix();
    for (const Edge& e : chain.edges())
      grad_den[e.from] +=
          chain.conductance(e.from, e.to) * (s[e.from] - s[e.to]) * s[e.from];
  } else {
    for (const Edge& e : chain.edges())
      grad_den[e.from] += chain.conductance(e.from, e.to) *
                          (f[e.from] * (g[e.from] - g[e.to]) + f[e.from] - f[e.to]);
  }

  const RatioParts parts = ratio_parts(chain, kind, g);
  const double d2 = parts.denominator * parts.denominator;
  return (parts.denominator * grad_num - parts.numerator * grad_den) / d2;
}

// Shift g so that E[e^g] = 1 (stable log-sum-exp).
void normalize(const ReversibleChain& chain, Vector& g) {
  const double m = g.maxCoeff();
  const double lse = m + std::log(chain.pi().dot((g.array() - m).exp().matrix()));
  g.array() -= lse;
}

double variance_of_exp(const ReversibleChain& chain, const Vector& g) {
  return variance(chain, g.array().exp().matrix());
}

// The reported value is always the plain-formula ratio at the witness, so a
// certified lower bound can be re-derived from the stored observable alone.
double public_ratio(const ReversibleChain& chain, Kind kind, const Vector& f) {
  const double num = entropy(chain, Observable(f));
  const double den = kind == Kind::lsi
                         ? dirichlet(chain, sqrt_vec(f), sqrt_vec(f))
                         : dirichlet(chain, f, log_vec(f));
  return num / den;
}

struct StartResult {
  double best_value = -std::numeric_limits<double>::infinity();
  Vector best_f;
  long long iters = 0;
};

constexpr double kDegenerateVariance = 1e-14;

StartResult run_start(const ReversibleChain& chain, Kind kind,
                      const OptimizerConfig& config, std::uint64_t start_index) {
  const int n = chain.size();
  std::seed_seq seq{config.seed, start_index, std::uint64_t(kind == Kind::lsi ? 1 : 2)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(-2.0, 2.0);

  Vector g(n);
  for (int i = 0; i < n; ++i) g[i] = uniform(rng);
  normalize(chain, g);
  while (variance_of_exp(chain, g) < kDegenerateVariance) {
    for (int i = 0; i < n; ++i) g[i] += 0.25 * uniform(rng);
    normalize(chain, g);
  }

  StartResult result;
  auto consider = [&](const Vector& g_now) {
    const double v = public_ratio(chain, kind, g_now.array().exp().matrix());
    if (std::isfinite(v) && v > result.best_value) {
      result.best_value = v;
      result.best_f = g_now.array().exp().matrix();
    }
  };

  double value = ratio_parts(chain, kind, g).value();
  if (!std::isfinite(value)) return result;
  consider(g);

  double step = 0.25;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    ++result.iters;
    Vector grad = ratio_gradient(chain, kind, g);
    if (!grad.allFinite()) break;

    bool accepted = false;
    Vector candidate;
    double candidate_value = 0.0;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      // exp(g) must stay a normal double for the entropy evaluation
      candidate = (g + step * grad).cwiseMax(-650.0);
      normalize(chain, candidate);
      if (variance_of_exp(chain, candidate) < kDegenerateVariance) {
        // re-perturb away from the constant degeneracy
        for (int i = 0; i < n; ++i) candidate[i] += 1e-4 * uniform(rng);
        normalize(chain, candidate);
      }
      candidate_value = ratio_parts(chain, kind, candidate).value();
      if (std::isfinite(candidate_value) && candidate_value > value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double improvement = (candidate_value - value) / std::abs(candidate_value);
    g = candidate;
    value = candidate_value;
    consider(g);
    step *= 1.6;
    if (improvement < config.tol_opt) break;
  }
  return result;
}

ConstantEstimate estimate_ratio(const ReversibleChain& chain, Kind kind,
                                const OptimizerConfig& config) {
  if (config.starts < 1) throw Error("optimizer needs at least one start");
  ConstantEstimate est;
  est.kind = EstimateKind::certified_lower_bound;
  est.meta.starts = config.starts;

  double best = -std::numeric_limits<double>::infinity();
  Vector best_f;
  for (int s = 0; s < config.starts; ++s) {
    StartResult r = run_start(chain, kind, config, std::uint64_t(s));
    est.meta.total_iters += r.iters;
    est.meta.start_values.push_back(r.best_value);
    if (r.best_value > best) {
      best = r.best_value;
      best_f = r.best_f;
    }
  }
  if (!std::isfinite(best) || best <= 0.0)
    throw AllStartsDegenerate("no start escaped the constant-function "
                              "degeneracy");

  est.value = best;
  est.witness = Observable(best_f);

  // converged: the best quarter of the starts agree within 0.5% relative
  std::vector<double> sorted = est.meta.start_values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const int quarter = std::max(1, (config.starts + 3) / 4);
  double lo = sorted[quarter - 1], hi = sorted[0];
  est.meta.converged = std::isfinite(lo) && (hi - lo) <= 0.005 * hi;
  return est;
}

}  // namespace

ConstantEstimate estimate_tls(const ReversibleChain& chain,
                              const OptimizerConfig& config) {
  return estimate_ratio(chain, Kind::lsi, config);
}

ConstantEstimate estimate_tmls(const ReversibleChain& chain,
                               const OptimizerConfig& config) {
  return estimate_ratio(chain, Kind::mlsi, config);
}

double lsi_objective(const ReversibleChain& chain, const Vector& g) {
  return ratio_parts(chain, Kind::lsi, g).value();
}

Vector lsi_gradient(const ReversibleChain& chain, const Vector& g) {
  return ratio_gradient(chain, Kind::lsi, g);
}

double mlsi_objective(const ReversibleChain& chain, const Vector& g) {
  return ratio_parts(chain, Kind::mlsi, g).value();
}

Vector mlsi_gradient(const ReversibleChain& chain, const Vector& g) {
  return ratio_gradient(chain, Kind::mlsi, g);
}

}  // namespace fichain
