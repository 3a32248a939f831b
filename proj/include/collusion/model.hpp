#pragma once

// Primitives of the cost-of-collusion game: threshold, detection, flow prize
// and the sanction profile of the n providers.

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace collusion {

// Largest provider count for which exact binomial sums are supported.
inline constexpr int kMaxProviders = 64;

// Per-provider sanction scales F. Stored in order-statistic form,
// F_(1) >= F_(2) >= ... >= F_(n). Provider index i (0-based) is rank i+1.
class SanctionProfile {
 public:
  struct Explicit {
    std::vector<double> values;
    bool operator==(const Explicit&) const = default;
  };
  struct Zipf {
    double scale;  // C, with F_(r) = C / r
    bool operator==(const Zipf&) const = default;
  };

  // Sorts descending. Throws ValidationError on empty or non-positive input.
  static SanctionProfile explicit_values(std::vector<double> values);
  static SanctionProfile zipf(double scale);
  // n copies of the same value.
  static SanctionProfile homogeneous(double value, int n);

  bool is_zipf() const { return std::holds_alternative<Zipf>(law_); }
  double zipf_scale() const;
  std::span<const double> explicit_list() const;

  // F_(rank) for a population of n providers, rank in [1, n].
  double order_statistic(int rank, int n) const;
  // All n values, descending.
  std::vector<double> values(int n) const;

  // Throws unless the profile can describe exactly n providers.
  void validate_for(int n) const;

  // Multiplies every sanction by factor > 0.
  SanctionProfile scaled(double factor) const;

  bool operator==(const SanctionProfile&) const = default;

 private:
  explicit SanctionProfile(std::variant<Explicit, Zipf> law) : law_(std::move(law)) {}
  std::variant<Explicit, Zipf> law_;
};

struct ModelParams {
  int n = 5;
  int K = 3;
  double q = 0.05;
  // Members exposed during pre-coordination; unset means K-1.
  std::optional<int> pre_coordination_size;
  double beta = 1.0;
  double V = 0.0;
  SanctionProfile sanctions = SanctionProfile::homogeneous(1.0, 5);

  // Throws ValidationError naming the first bad field.
  void validate() const;

  int exposure_size() const { return pre_coordination_size.value_or(K - 1); }
  double p_tilde() const;  // p(m~)
  double p_K() const;      // p(K)
  double omega() const;    // beta * V
  double F_eff() const;    // F_(n-K+1)

  bool operator==(const ModelParams&) const = default;
};

struct Coalition {
  std::vector<int> member_indices;  // ascending rank positions
  double binding_F = 0.0;
};

int majority_threshold(int n);

// p(m) = 1 - (1-q)^m.
double detection_prob(double q, int m);

double flow_prize(double beta, double V);

double effective_sanction(const SanctionProfile& profile, int n, int K);

// The K providers with smallest F; ties go to the lowest index.
Coalition select_coalition(const SanctionProfile& profile, int n, int K);

}  // namespace collusion
