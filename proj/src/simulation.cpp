#include "collusion/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "collusion/errors.hpp"
#include "collusion/rng.hpp"

namespace collusion {

namespace {

constexpr std::uint32_t kPopulationDomain = 1;
constexpr std::uint32_t kDeviationDomain = 2;
constexpr std::uint64_t kBlockSize = 4096;

// Sums for a ratio estimator sum(y) / sum(x) over replications.
struct RatioSums {
  double x = 0.0, y = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;

  void add(double xi, double yi) {
    x += xi;
    y += yi;
    xx += xi * xi;
    yy += yi * yi;
    xy += xi * yi;
  }
  void merge(const RatioSums& o) {
    x += o.x;
    y += o.y;
    xx += o.xx;
    yy += o.yy;
    xy += o.xy;
  }
  // Delta-method standard error of the ratio.
  Estimate ratio() const {
    if (x <= 0.0) return {};
    const double r = y / x;
    const double resid = std::max(0.0, yy - 2.0 * r * xy + r * r * xx);
    return {r, std::sqrt(resid) / x};
  }
};

struct MeanSums {
  double n = 0.0, sum = 0.0, sumsq = 0.0;

  void add(double v) {
    n += 1.0;
    sum += v;
    sumsq += v * v;
  }
  void merge(const MeanSums& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  Estimate mean() const {
    if (n < 1.0) return {};
    const double m = sum / n;
    if (n < 2.0) return {m, 0.0};
    const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1.0));
    return {m, std::sqrt(var / n)};
  }
};

struct PopulationSums {
  RatioSums payoff;       // x = joiners, y = payoff
  RatioSums detection;    // x = joiners, y = detected
  RatioSums success;      // x = joiners, y = joiners in successful attempts
  RatioSums det_success;  // within successful attempts
  RatioSums det_failure;  // within failed attempts
  double joiners = 0.0;
  double successes = 0.0;
  double excess = 0.0;

  void merge(const PopulationSums& o) {
    payoff.merge(o.payoff);
    detection.merge(o.detection);
    success.merge(o.success);
    det_success.merge(o.det_success);
    det_failure.merge(o.det_failure);
    joiners += o.joiners;
    successes += o.successes;
    excess += o.excess;
  }
};

// Runs body(first, last, partial) over fixed-size blocks of replications on a
// thread pool and merges the partials in block order, so the result is the
// same for any thread count.
template <typename Sums, typename Body>
Sums run_blocks(std::uint64_t replications, int threads, Body body) {
  const std::uint64_t blocks = (replications + kBlockSize - 1) / kBlockSize;
  std::vector<Sums> partial(blocks);
  std::atomic<std::uint64_t> next{0};
  const auto worker = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      body(b * kBlockSize, std::min(replications, (b + 1) * kBlockSize), partial[b]);
    }
  };
  unsigned count = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  count = static_cast<unsigned>(std::min<std::uint64_t>(count, blocks));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  Sums total;
  for (const Sums& p : partial) total.merge(p);
  return total;
}

double draw_theta(const SimConfig& config, CounterStream& rng) {
  if (config.fixed_theta) return *config.fixed_theta;
  if (const auto* p = std::get_if<NormalPrior>(&config.spec.prior)) return p->mean + p->sd * rng.normal();
  const auto& u = std::get<UniformPrior>(config.spec.prior);
  return u.lo + (u.hi - u.lo) * rng.uniform();
}

bool decides_to_join(const Strategy& strategy, double theta, double sigma, CounterStream& rng) {
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, JoinNever>) {
          return false;
        } else if constexpr (std::is_same_v<S, JoinAlways>) {
          return true;
        } else if constexpr (std::is_same_v<S, CutoffStrategy>) {
          return theta + sigma * rng.normal() >= s.tau;
        } else {
          return rng.uniform() < s.alpha;
        }
      },
      strategy);
}

}  // namespace

void SimConfig::validate() const {
  spec.validate();
  if (replications < 1) throw ValidationError("sim.replications: must be >= 1");
  if (fixed_theta && !std::isfinite(*fixed_theta)) throw ValidationError("sim.fixed_theta: must be finite");
  if (const auto* r = std::get_if<RandomizedStrategy>(&strategy)) {
    if (!(r->alpha >= 0.0 && r->alpha <= 1.0)) throw ValidationError("sim.strategy.alpha: must lie in [0, 1]");
  }
  if (const auto* c = std::get_if<CutoffStrategy>(&strategy)) {
    if (std::isnan(c->tau)) throw ValidationError("sim.strategy.tau: must not be NaN");
  }
}

SimResult simulate(const SimConfig& config) {
  config.validate();
  const ModelParams& m = config.spec.base;
  const PayoffConstants pc = PayoffConstants::from(m);
  const double sigma = config.spec.sigma;

  const auto body = [&](std::uint64_t first, std::uint64_t last, PopulationSums& acc) {
    std::vector<char> joins(static_cast<std::size_t>(m.n));
    for (std::uint64_t r = first; r < last; ++r) {
      CounterStream rng(config.seed, r, kPopulationDomain);
      const double theta = draw_theta(config, rng);
      const double omega = config.spec.prize_map(theta);
      int J = 0;
      for (int i = 0; i < m.n; ++i) {
        joins[static_cast<std::size_t>(i)] = decides_to_join(config.strategy, theta, sigma, rng);
        J += joins[static_cast<std::size_t>(i)];
      }
      const bool success = J >= m.K;
      const double p_detect = success ? pc.p_K : pc.p_tilde;
      int detected = 0;
      double payoff = 0.0;
      for (int i = 0; i < J; ++i) {
        const bool caught = rng.bernoulli(p_detect);
        detected += caught;
        payoff += (success && !caught ? omega / m.K : 0.0) - (caught ? pc.F_eff : 0.0);
      }
      acc.payoff.add(J, payoff);
      acc.detection.add(J, detected);
      acc.success.add(J, success ? J : 0);
      if (success) {
        acc.det_success.add(J, detected);
        acc.successes += 1.0;
        if (J > m.K) acc.excess += 1.0;
      } else {
        acc.det_failure.add(J, detected);
      }
      acc.joiners += J;
    }
  };
  const PopulationSums sums = run_blocks<PopulationSums>(config.replications, config.threads, body);

  SimResult out;
  out.replications = config.replications;
  out.empirical_join_rate = sums.joiners / (static_cast<double>(config.replications) * m.n);
  out.success_rate_estimate = sums.success.ratio();
  out.empirical_success_rate = out.success_rate_estimate.mean;
  out.empirical_detection_rate = sums.detection.ratio().mean;
  out.mean_realized_payoff = sums.payoff.ratio();
  out.success_detection_rate = sums.det_success.ratio();
  out.attempt_detection_rate = sums.det_failure.ratio();
  out.excess_joiner_rate = sums.successes > 0.0 ? sums.excess / sums.successes : 0.0;
  if (std::holds_alternative<CutoffStrategy>(config.strategy)) out.deviation_gain = estimate_deviation_gain(config);
  return out;
}

Estimate estimate_deviation_gain(const SimConfig& config) {
  config.validate();
  const auto* cutoff = std::get_if<CutoffStrategy>(&config.strategy);
  if (cutoff == nullptr) throw ValidationError("sim.strategy: deviation gain needs a cutoff strategy");
  const double tau = cutoff->tau;
  if (!std::isfinite(tau)) throw ValidationError("sim.strategy.tau: deviation gain needs a finite cutoff");
  const ModelParams& m = config.spec.base;
  const PayoffConstants pc = PayoffConstants::from(m);
  const double sigma = config.spec.sigma;
  const Posterior post = posterior_given_signal(config.spec, tau);

  const auto body = [&](std::uint64_t first, std::uint64_t last, MeanSums& acc) {
    for (std::uint64_t r = first; r < last; ++r) {
      CounterStream rng(config.seed, r, kDeviationDomain);
      const double theta = config.fixed_theta ? *config.fixed_theta : post.sample(rng.open_uniform());
      const double omega = config.spec.prize_map(theta);
      int others = 0;
      for (int i = 1; i < m.n; ++i) others += theta + sigma * rng.normal() >= tau;
      const bool success = others + 1 >= m.K;
      const bool caught = rng.bernoulli(success ? pc.p_K : pc.p_tilde);
      const double join_payoff = (success && !caught ? omega / m.K : 0.0) - (caught ? pc.F_eff : 0.0);
      constexpr double stay_out_payoff = 0.0;
      acc.add(join_payoff - stay_out_payoff);
    }
  };
  return run_blocks<MeanSums>(config.replications, config.threads, body).mean();
}

}  // namespace collusion
