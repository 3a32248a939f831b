#include "collusion/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "collusion/errors.hpp"

namespace collusion {

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& why) {
  throw ValidationError(field + ": " + why);
}

}  // namespace

SanctionProfile SanctionProfile::explicit_values(std::vector<double> values) {
  if (values.empty()) reject("sanctions.values", "must be nonempty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) reject("sanctions.values", "entries must be finite and > 0");
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return SanctionProfile(Explicit{std::move(values)});
}

SanctionProfile SanctionProfile::zipf(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) reject("sanctions.C", "must be finite and > 0");
  return SanctionProfile(Zipf{scale});
}

SanctionProfile SanctionProfile::homogeneous(double value, int n) {
  if (n < 1) reject("n", "must be >= 1");
  return explicit_values(std::vector<double>(static_cast<std::size_t>(n), value));
}

double SanctionProfile::zipf_scale() const {
  if (const auto* z = std::get_if<Zipf>(&law_)) return z->scale;
  throw ValidationError("sanctions: profile is not a Zipf law");
}

std::span<const double> SanctionProfile::explicit_list() const {
  if (const auto* e = std::get_if<Explicit>(&law_)) return e->values;
  return {};
}

void SanctionProfile::validate_for(int n) const {
  if (const auto* e = std::get_if<Explicit>(&law_)) {
    if (static_cast<int>(e->values.size()) != n) {
      reject("sanctions.values", "length " + std::to_string(e->values.size()) +
                                     " does not match n = " + std::to_string(n));
    }
  }
}

double SanctionProfile::order_statistic(int rank, int n) const {
  validate_for(n);
  if (rank < 1 || rank > n) reject("rank", "must lie in [1, n]");
  if (const auto* z = std::get_if<Zipf>(&law_)) return z->scale / static_cast<double>(rank);
  return std::get<Explicit>(law_).values[static_cast<std::size_t>(rank - 1)];
}

std::vector<double> SanctionProfile::values(int n) const {
  validate_for(n);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) out[static_cast<std::size_t>(r - 1)] = order_statistic(r, n);
  return out;
}

SanctionProfile SanctionProfile::scaled(double factor) const {
  if (!(factor > 0.0)) reject("factor", "must be > 0");
  if (const auto* z = std::get_if<Zipf>(&law_)) return zipf(z->scale * factor);
  auto v = std::get<Explicit>(law_).values;
  for (double& x : v) x *= factor;
  return explicit_values(std::move(v));
}

void ModelParams::validate() const {
  if (n < 2) reject("n", "must be >= 2");
  if (n > kMaxProviders) reject("n", "must be <= " + std::to_string(kMaxProviders));
  if (K < 1 || K > n) reject("K", "must satisfy 1 <= K <= n");
  if (!(q > 0.0 && q < 1.0)) reject("q", "must lie in (0, 1)");
  if (pre_coordination_size && (*pre_coordination_size < 0 || *pre_coordination_size > K)) {
    reject("pre_coordination_size", "must satisfy 0 <= m <= K");
  }
  if (!(beta > 0.0 && beta <= 1.0)) reject("beta", "must lie in (0, 1]");
  if (!(V >= 0.0) || !std::isfinite(V)) reject("V", "must be finite and >= 0");
  sanctions.validate_for(n);
}

double ModelParams::p_tilde() const { return detection_prob(q, exposure_size()); }

double ModelParams::p_K() const { return detection_prob(q, K); }

double ModelParams::omega() const { return flow_prize(beta, V); }

double ModelParams::F_eff() const { return effective_sanction(sanctions, n, K); }

int majority_threshold(int n) {
  if (n < 2) reject("n", "must be >= 2");
  return n / 2 + 1;
}

double detection_prob(double q, int m) {
  if (!(q > 0.0 && q < 1.0)) reject("q", "must lie in (0, 1)");
  if (m < 0) reject("m", "must be >= 0");
  return 1.0 - std::pow(1.0 - q, m);
}

double flow_prize(double beta, double V) {
  if (!(beta > 0.0 && beta <= 1.0)) reject("beta", "must lie in (0, 1]");
  if (!(V >= 0.0)) reject("V", "must be >= 0");
  return beta * V;
}

double effective_sanction(const SanctionProfile& profile, int n, int K) {
  if (K < 1 || K > n) reject("K", "must satisfy 1 <= K <= n");
  return profile.order_statistic(n - K + 1, n);
}

Coalition select_coalition(const SanctionProfile& profile, int n, int K) {
  if (K < 1 || K > n) reject("K", "must satisfy 1 <= K <= n");
  const auto F = profile.values(n);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return F[static_cast<std::size_t>(a)] < F[static_cast<std::size_t>(b)];
  });
  Coalition c;
  c.member_indices.assign(order.begin(), order.begin() + K);
  std::sort(c.member_indices.begin(), c.member_indices.end());
  for (int i : c.member_indices) c.binding_F = std::max(c.binding_F, F[static_cast<std::size_t>(i)]);
  return c;
}

}  // namespace collusion
