#include "fichain/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "fichain/regularization.hpp"
#include "fichain/sampling.hpp"

namespace fichain {

namespace {

const std::vector<std::string> kAllChecks = {
    "lsi_vs_mlsi",      "lemma_r",        "dirichlet_comparison",
    "entropy_comparison", "entropy_lemmas", "local_lemma",
    "tmap",             "kappa",          "varentropy",
    "pipeline"};

std::mt19937_64 sample_rng(std::uint64_t seed, long index) {
  std::seed_seq seq{seed, std::uint64_t(index), std::uint64_t(0x5eedu)};
  return std::mt19937_64(seq);
}

double relative(double value, double scale) {
  return scale > 0.0 ? value / scale : value;
}

struct MarginTracker {
  double min_margin = std::numeric_limits<double>::infinity();
  void feed(double rel_margin) { min_margin = std::min(min_margin, rel_margin); }
  void feed(const Margin& m) { feed(m.relative()); }
  double result() const { return std::isfinite(min_margin) ? min_margin : 0.0; }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::vector<std::string> parse_suite(const std::string& csv) {
  if (csv == "all" || csv.empty()) return kAllChecks;
  std::vector<std::string> names;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (std::find(kAllChecks.begin(), kAllChecks.end(), item) == kAllChecks.end())
      throw SpecParseError("unknown check '" + item + "'");
    names.push_back(item);
  }
  return names;
}

VerificationReport run_verification(const ReversibleChain& chain,
                                    const std::string& description,
                                    const std::vector<std::string>& suite,
                                    int samples, std::uint64_t seed,
                                    const OptimizerConfig& opt_config) {
  VerificationReport report;
  report.chain_description = description;
  report.n_states = chain.size();
  report.p = sparsity(chain);
  report.seed = seed;
  report.samples = samples;

  const std::set<std::string> wanted(suite.begin(), suite.end());
  const int n = chain.size();

  auto add_record = [&](CheckRecord record) {
    record.pass = record.pass && record.min_margin >= -kVerifyRelTol;
    report.pass = report.pass && record.pass;
    report.checks.push_back(std::move(record));
  };

  // per-sample checks share one pass over the sampled observables
  auto sampled_check =
      [&](const std::string& name,
          const std::function<double(std::mt19937_64&, long, const Observable&)>&
              margin_fn) {
        if (!wanted.count(name)) return;
        Stopwatch timer;
        CheckRecord record{name, samples, 0.0, true, ""};
        if (samples <= 0) {
          record.detail = "no samples";
        } else {
          MarginTracker tracker;
          for (long s = 0; s < samples; ++s) {
            auto rng = sample_rng(seed, s);
            const Observable f = random_observable(rng, n, s);
            try {
              tracker.feed(margin_fn(rng, s, f));
            } catch (const Error& e) {
              record.pass = false;
              record.detail = e.what();
              break;
            }
          }
          record.min_margin = tracker.result();
        }
        report.timings_ms[name] = timer.ms();
        add_record(std::move(record));
      };

  const bool needs_r =
      wanted.count("lemma_r") || wanted.count("dirichlet_comparison") ||
      wanted.count("entropy_comparison") || wanted.count("entropy_lemmas") ||
      wanted.count("local_lemma") || wanted.count("tmap") ||
      wanted.count("kappa") || wanted.count("pipeline");
  const double r = needs_r ? default_r(chain) : 0.0;

  sampled_check("lsi_vs_mlsi", [&](std::mt19937_64&, long, const Observable& f) {
    const double mls = dirichlet(chain, f.values(), log_vec(f.values()));
    const double ls4 =
        4.0 * dirichlet(chain, sqrt_vec(f.values()), sqrt_vec(f.values()));
    return relative(mls - ls4, std::max(std::abs(mls), std::abs(ls4)));
  });

  sampled_check("lemma_r", [&](std::mt19937_64&, long, const Observable& f) {
    // clip the sample to r-regularity via its majorant
    const Observable regular = regularize(chain, f, r).f_star;
    return verify_lemma_r(chain, regular, r).relative();
  });

  sampled_check("dirichlet_comparison",
                [&](std::mt19937_64&, long, const Observable& f) {
                  const auto margins = verify_dirichlet_comparison(chain, f);
                  return std::min(margins.sqrt_form.relative(),
                                  margins.mls_form.relative());
                });

  sampled_check("entropy_comparison",
                [&](std::mt19937_64&, long, const Observable& f) {
                  return verify_entropy_comparison(chain, f).relative();
                });

  sampled_check("entropy_lemmas",
                [&](std::mt19937_64&, long, const Observable& f) {
                  const auto margins = verify_entropy_lemmas(chain, f);
                  return std::min(margins.majorant_side.relative(),
                                  margins.excess_side.relative());
                });

  sampled_check("local_lemma", [&](std::mt19937_64&, long, const Observable& f) {
    double worst = std::numeric_limits<double>::infinity();
    for (const LocalWitness& w : verify_local_lemma(chain, f, r))
      worst = std::min({worst, w.lower_margin, w.upper_margin});
    return std::isfinite(worst) ? worst : 0.0;
  });

  sampled_check("tmap", [&](std::mt19937_64&, long, const Observable& f) {
    const RegularizationResult reg = regularize(chain, f, r);
    for (int x = 0; x < n; ++x)
      if (reg.t_map[reg.t_map[x]] != reg.t_map[x])
        throw WitnessNotFound("T is not idempotent at state " + std::to_string(x));
    std::set<int> range(reg.t_map.begin(), reg.t_map.end());
    std::set<int> fixed;
    for (int x = 0; x < n; ++x)
      if (reg.t_map[x] == x) fixed.insert(x);
    if (range != fixed)
      throw WitnessNotFound("range of T differs from its fixed-point set");

    const Vector h = tmap_dual_weights(chain, reg);
    return relative(1.0 / 3.0 - h.maxCoeff(), 1.0 / 3.0);
  });

  if (wanted.count("kappa")) {
    Stopwatch timer;
    CheckRecord record{"kappa", samples > 0 ? 1 : 0, 0.0, true, ""};
    if (samples > 0) {
      const double k = kappa(chain, r);
      record.min_margin = relative(4.0 / 3.0 - k, 4.0 / 3.0);
      std::ostringstream os;
      os << "kappa=" << k << " at r=" << r;
      record.detail = os.str();
    } else {
      record.detail = "no samples";
    }
    report.timings_ms["kappa"] = timer.ms();
    add_record(std::move(record));
  }

  sampled_check("varentropy", [&](std::mt19937_64& rng, long, const Observable& f) {
    const double scale = std::max(entropy(chain, f), 1e-300);
    // random admissible dual: h = log(w / E[w]) has E[e^h] = 1
    std::uniform_real_distribution<double> uniform(-3.0, 3.0);
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = std::exp(uniform(rng));
    const Vector h = (w.array() / mean(chain, w)).log().matrix();
    const double gap_random = entropy_dual_gap(chain, f, h);

    // the optimal dual h = log(f / E[f]) has zero gap
    const Vector h_opt =
        (f.values().array() / mean(chain, f.values())).log().matrix();
    const double gap_opt = entropy_dual_gap(chain, f, h_opt);
    return std::min(gap_random / scale, -std::abs(gap_opt) / scale);
  });

  if (wanted.count("pipeline")) {
    Stopwatch timer;
    CheckRecord record{"pipeline", samples, 0.0, true, ""};
    if (samples <= 0) {
      record.detail = "no samples";
    } else {
      const ConstantEstimate tmls = estimate_tmls(chain, opt_config);
      const double hr = h_constant(r);
      std::ostringstream os;
      os << "t_mls=" << tmls.value
         << (tmls.meta.converged ? " (converged)" : " (not converged; entropy "
                                                    "production link skipped)");
      record.detail = os.str();

      MarginTracker tracker;
      for (long s = 0; s < samples; ++s) {
        auto rng = sample_rng(seed, s);
        const Observable f = random_observable(rng, n, s);
        const RegularizationResult reg = regularize(chain, f, r);
        const Vector& fs = reg.f_star.values();

        const double ent_f = entropy(chain, f);
        const double ent_fs = entropy(chain, reg.f_star);
        const double e_mls_fs = dirichlet(chain, fs, log_vec(fs));
        const double e_ls_fs = dirichlet(chain, sqrt_vec(fs), sqrt_vec(fs));
        const double e_ls_f =
            dirichlet(chain, sqrt_vec(f.values()), sqrt_vec(f.values()));

        tracker.feed(relative(2.0 * ent_fs - ent_f,
                              std::max(2.0 * ent_fs, ent_f)));
        if (tmls.meta.converged) {
          const double bound = tmls.value * e_mls_fs;
          tracker.feed(relative(bound - ent_fs, std::max(bound, ent_fs)));
        }
        tracker.feed(relative(hr * e_ls_fs - e_mls_fs,
                              std::max(hr * e_ls_fs, e_mls_fs)));
        tracker.feed(relative(4.0 / 3.0 * e_ls_f - e_ls_fs,
                              std::max(4.0 / 3.0 * e_ls_f, e_ls_fs)));
      }
      record.min_margin = tracker.result();
    }
    report.timings_ms["pipeline"] = timer.ms();
    add_record(std::move(record));
  }

  return report;
}

Json report_to_json(const VerificationReport& report) {
  Json j;
  j["chain"] = {{"description", report.chain_description},
                {"n_states", report.n_states},
                {"p", report.p}};
  j["seed"] = report.seed;
  j["samples"] = report.samples;
  j["tolerance"] = kVerifyRelTol;
  Json checks = Json::array();
  for (const CheckRecord& record : report.checks) {
    Json c;
    c["name"] = record.name;
    c["samples"] = record.samples;
    c["min_margin"] = record.min_margin;
    c["pass"] = record.pass;
    if (!record.detail.empty()) c["detail"] = record.detail;
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  j["pass"] = report.pass;
  Json timings;
  for (const auto& [name, ms] : report.timings_ms) timings[name] = ms;
  j["timings_ms"] = std::move(timings);
  return j;
}

VerificationReport report_from_json(const Json& j) {
  VerificationReport report;
  try {
    report.chain_description = j.at("chain").at("description").get<std::string>();
    report.n_states = j.at("chain").at("n_states").get<int>();
    report.p = j.at("chain").at("p").get<double>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.samples = j.at("samples").get<int>();
    for (const Json& c : j.at("checks")) {
      CheckRecord record;
      record.name = c.at("name").get<std::string>();
      record.samples = c.at("samples").get<int>();
      record.min_margin = c.at("min_margin").get<double>();
      record.pass = c.at("pass").get<bool>();
      record.detail = c.value("detail", "");
      report.checks.push_back(std::move(record));
    }
    report.pass = j.at("pass").get<bool>();
    for (const auto& [name, ms] : j.at("timings_ms").items())
      report.timings_ms[name] = ms.get<double>();
  } catch (const Json::exception& e) {
    throw SpecParseError(std::string("malformed verification report: ") + e.what());
  }
  return report;
}

}  // namespace fichain
