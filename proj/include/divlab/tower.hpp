#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "divlab/homogeneity.hpp"

namespace divlab {

using Rng = std::mt19937_64;

struct GrowthPolicy {
  std::size_t rounds = 0;
  std::size_t support_size_max = 3;
  /// Every sampled value is a multiple of this.
  Rat value_granularity{1, 8};
  /// Upper bound for sampled Katetov values.
  Rat diameter_cap{4};
  double star_weight = 1.0;
  double rejection_weight = 1.0;
  std::size_t max_retries = 64;
  std::size_t ground_cap = kDefaultGroundCap;

  void check() const {
    if (value_granularity <= Rat{0}) throw Error(ErrorKind::kInvalidArgument, "granularity must be positive");
    if (diameter_cap <= Rat{0}) throw Error(ErrorKind::kInvalidArgument, "diameter cap must be positive");
    if (star_weight < 0 || rejection_weight < 0 || star_weight + rejection_weight <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "generator weights must be nonnegative and not all zero");
    }
    if (support_size_max == 0) throw Error(ErrorKind::kInvalidArgument, "support_size_max must be positive");
    if (ground_cap > kMaxGroundSize) throw Error(ErrorKind::kCapExceeded, "ground cap above hard limit");
  }
};

struct HistoryEntry {
  std::size_t round = 0;
  SubsetKey support;
  std::string label;
  /// Admissible table over the ground set as it was before the round.
  std::vector<Rat> values;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct TowerState {
  FiniteDiversity current = FiniteDiversity::single_point("x0");
  std::vector<HistoryEntry> history;
  std::uint64_t seed = 0;

  friend bool operator==(const TowerState&, const TowerState&) = default;
};

namespace detail {

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline Rat floor_div(const Rat& a, const Rat& g) {
  const Rat q = a / g;
  std::int64_t f = q.num() / q.den();
  if (q.num() < 0 && q.num() % q.den() != 0) --f;
  return Rat{f};
}

inline SubsetKey random_subset(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  SubsetKey s;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_index(rng, n - i);
    std::swap(idx[i], idx[j]);
    s = s.with(idx[i]);
  }
  return s;
}

}  // namespace detail

/*
 * Random Katetov function r on m: |r(x) - r(y)| <= d(x, y) <= r(x) + r(y).
 * Points are assigned in index order; each r(x) is uniform over the grid
 * points of [max_y |d(x,y) - r(y)|, min(min_y r(y) + d(x,y), cap)]. The lower
 * end is used when that interval holds no grid point.
 */
inline std::vector<Rat> random_katetov(const MetricSpace& m, Rng& rng, const GrowthPolicy& policy) {
  const Rat& g = policy.value_granularity;
  std::vector<Rat> r(m.size());
  for (std::size_t x = 0; x < m.size(); ++x) {
    Rat lo{0};
    Rat hi = policy.diameter_cap;
    for (std::size_t y = 0; y < x; ++y) {
      lo = std::max(lo, abs(m(x, y) - r[y]));
      hi = std::min(hi, r[y] + m(x, y));
    }
    if (lo > policy.diameter_cap) {
      throw Error(ErrorKind::kInfeasibleInterval,
                  "forced lower bound " + lo.to_string() + " exceeds cap " + policy.diameter_cap.to_string());
    }
    const Rat first = -detail::floor_div(-lo, g);  // ceil(lo / g)
    const Rat last = detail::floor_div(hi, g);
    if (first > last) {
      r[x] = lo;
      continue;
    }
    const auto span = static_cast<std::size_t>((last - first).num());
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, span)(rng);
    r[x] = (first + Rat{static_cast<std::int64_t>(pick)}) * g;
  }
  return r;
}

/// f(A) = delta(A) + min over b in A of r(b); f(empty) = 0.
inline std::vector<Rat> star_table(const FiniteDiversity& d, const std::vector<Rat>& r) {
  std::vector<Rat> f(subset_count(d.size()));
  for (std::uint32_t m = 1; m < f.size(); ++m) {
    const SubsetKey a{m};
    Rat low = r[a.lowest()];
    for (auto b : a.members()) low = std::min(low, r[b]);
    f[m] = d(a) + low;
  }
  return f;
}

/// f(A) = max over x of delta(A u {x}) + c(x) for A nonempty. Each term is a
/// shifted kappa_x and admissibility is closed under pointwise max, so the
/// result is always admissible.
inline std::vector<Rat> kappa_max_table(const FiniteDiversity& d, const std::vector<Rat>& c) {
  std::vector<Rat> f(subset_count(d.size()));
  for (std::uint32_t m = 1; m < f.size(); ++m) {
    const SubsetKey a{m};
    for (std::size_t x = 0; x < d.size(); ++x) f[m] = std::max(f[m], d(a.with(x)) + c[x]);
  }
  return f;
}

/// Star table for a random Katetov r. The star table is only admissible for
/// some r; otherwise the kappa-max table with the same radii is used.
inline std::vector<Rat> random_star(const FiniteDiversity& d, Rng& rng, const GrowthPolicy& policy) {
  const auto r = random_katetov(induced_metric(d), rng, policy);
  std::vector<Rat> f = star_table(d, r);
  if (is_admissible(d, f, 1).ok()) return f;
  return kappa_max_table(d, r);
}

/// An admissible function over all of d, sampled by the star or the
/// rejection generator according to the policy weights.
inline AdmissibleFunction random_admissible_full(std::shared_ptr<const FiniteDiversity> d, Rng& rng,
                                                 const GrowthPolicy& policy) {
  const double total = policy.star_weight + policy.rejection_weight;
  const bool star = std::uniform_real_distribution<double>(0.0, total)(rng) < policy.star_weight;
  if (star) return AdmissibleFunction(d, random_star(*d, rng, policy));
  for (std::size_t attempt = 0; attempt < policy.max_retries; ++attempt) {
    std::vector<Rat> f = random_star(*d, rng, policy);
    for (std::size_t i = 1; i < f.size(); ++i) {
      switch (detail::uniform_index(rng, 4)) {
        case 0: f[i] += policy.value_granularity; break;
        case 1:
          if (f[i] >= policy.value_granularity) f[i] -= policy.value_granularity;
          break;
        default: break;
      }
    }
    if (is_admissible(*d, f, 1).ok()) return AdmissibleFunction(d, std::move(f));
  }
  throw Error(ErrorKind::kGenerationExhausted,
              "no admissible perturbation after " + std::to_string(policy.max_retries) + " attempts");
}

/// Random admissible function on restrict(d, s), lifted to d with support s.
inline AdmissibleFunction random_admissible(const FiniteDiversity& d, SubsetKey s, Rng& rng,
                                            const GrowthPolicy& policy) {
  if (s.empty()) throw Error(ErrorKind::kEmptySupport, "support must be nonempty");
  const AdmissibleFunction local = random_admissible_full(share(restrict(d, s)), rng, policy);
  return extend_from_support(d, s, local);
}

/// Rebuilds the current diversity from the initial point and the history.
inline FiniteDiversity replay(const FiniteDiversity& initial, const std::vector<HistoryEntry>& history,
                              std::size_t cap = kMaxGroundSize) {
  FiniteDiversity d = initial;
  for (const auto& h : history) {
    auto next = amalgamate(d, h.values, h.label, cap);
    if (!std::holds_alternative<FiniteDiversity>(next)) {
      throw Error(ErrorKind::kStructural, "history entry " + std::to_string(h.round) + " duplicates a point");
    }
    d = std::get<FiniteDiversity>(std::move(next));
  }
  return d;
}

/*
 * Adds policy.rounds points. Each round draws a support of random size up to
 * support_size_max, samples a lifted admissible function and adjoins its
 * point under the label z<round>. Draws that hit an infeasible Katetov
 * interval, exhaust the rejection sampler or duplicate an existing point are
 * re-rolled.
 */
inline TowerState grow(TowerState state, const GrowthPolicy& policy, Rng& rng) {
  policy.check();
  if (state.current.size() + policy.rounds > policy.ground_cap) {
    throw Error(ErrorKind::kCapExceeded, std::to_string(state.current.size()) + " points plus " +
                                             std::to_string(policy.rounds) + " rounds exceeds cap " +
                                             std::to_string(policy.ground_cap));
  }
  constexpr std::size_t kMaxAttempts = 256;
  for (std::size_t r = 0; r < policy.rounds; ++r) {
    const FiniteDiversity& d = state.current;
    const std::size_t round = state.history.size() + 1;
    const std::string label = "z" + std::to_string(round);
    bool done = false;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      const std::size_t k = 1 + detail::uniform_index(rng, std::min(policy.support_size_max, d.size()));
      const SubsetKey s = detail::random_subset(rng, d.size(), k);
      std::optional<AdmissibleFunction> f;
      try {
        f = random_admissible(d, s, rng, policy);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kInfeasibleInterval || e.kind() == ErrorKind::kGenerationExhausted) continue;
        throw;
      }
      auto next = amalgamate(*f, label, policy.ground_cap);
      if (!std::holds_alternative<FiniteDiversity>(next)) continue;
      FiniteDiversity grown = std::get<FiniteDiversity>(std::move(next));
      if (!validate(grown, 1).ok()) throw Error(ErrorKind::kStructural, "grown diversity failed validation");
      state.history.push_back({round, s, label, std::vector<Rat>(f->table().begin(), f->table().end())});
      state.current = std::move(grown);
      done = true;
    }
    if (!done) {
      throw Error(ErrorKind::kGenerationExhausted, "round " + std::to_string(round) + " found no extension");
    }
  }
  return state;
}

enum class BatteryKind { kRandom, kKappa };

struct BatterySpec {
  std::size_t size = 50;
  BatteryKind kind = BatteryKind::kRandom;
  std::size_t frame_size_max = 3;
};

/// Exact-realisation queries on random frames of d.
inline std::vector<RealizationQuery> sample_battery(std::shared_ptr<const FiniteDiversity> d, const BatterySpec& spec,
                                                    const GrowthPolicy& policy, Rng& rng) {
  std::vector<RealizationQuery> out;
  out.reserve(spec.size);
  for (std::size_t q = 0; q < spec.size; ++q) {
    const std::size_t k = 1 + detail::uniform_index(rng, std::min(spec.frame_size_max, d->size()));
    const SubsetKey frame = detail::random_subset(rng, d->size(), k);
    if (spec.kind == BatteryKind::kKappa) {
      const std::size_t x = detail::uniform_index(rng, d->size());
      out.push_back({d, frame, restrict_function(kappa(d, x), frame), Rat{0}});
      continue;
    }
    auto sub = share(restrict(*d, frame));
    std::optional<AdmissibleFunction> f;
    for (std::size_t attempt = 0; attempt < policy.max_retries && !f; ++attempt) {
      try {
        f = random_admissible_full(sub, rng, policy);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kGenerationExhausted && e.kind() != ErrorKind::kInfeasibleInterval) throw;
      }
    }
    // Frames wider than twice the cap admit no Katetov radii at all.
    if (!f) f.emplace(sub, kappa_max_table(*sub, std::vector<Rat>(sub->size())));
    out.push_back({d, frame, std::move(*f), Rat{0}});
  }
  return out;
}

struct DeficitRow {
  std::size_t round;
  Rat deficit;
};

namespace detail {

/// Battery draws use a stream independent of growth.
inline Rng battery_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xba77e27u};
  return Rng(seq);
}

}  // namespace detail

/// Deficit of `initial` and of every prefix of `history` (row k after k
/// rounds), each against a freshly sampled battery.
inline std::vector<DeficitRow> history_deficits(const FiniteDiversity& initial,
                                                const std::vector<HistoryEntry>& history,
                                                const GrowthPolicy& policy, const BatterySpec& battery,
                                                std::uint64_t seed) {
  Rng rng = detail::battery_rng(seed);
  std::vector<DeficitRow> rows;
  FiniteDiversity d = initial;
  for (std::size_t round = 0;; ++round) {
    auto host = share(d);
    const auto queries = sample_battery(host, battery, policy, rng);
    rows.push_back({round, extension_deficit(*host, queries)});
    if (round == history.size()) break;
    d = replay(d, {history[round]}, kMaxGroundSize);
  }
  return rows;
}

/*
 * Grows from `initial` for policy.rounds rounds with Rng(seed), exactly as
 * grow() does, and records the extension deficit after each round (round 0
 * is the initial state).
 */
inline std::vector<DeficitRow> deficit_trace(const TowerState& initial, const GrowthPolicy& policy,
                                             const BatterySpec& battery, std::uint64_t seed) {
  policy.check();
  if (initial.current.size() + policy.rounds > policy.ground_cap) {
    throw Error(ErrorKind::kCapExceeded, "trace of " + std::to_string(policy.rounds) + " rounds from " +
                                             std::to_string(initial.current.size()) + " points exceeds cap " +
                                             std::to_string(policy.ground_cap));
  }
  Rng growth(seed);
  const TowerState grown = grow(initial, policy, growth);
  const std::vector<HistoryEntry> added(grown.history.begin() + static_cast<std::ptrdiff_t>(initial.history.size()),
                                        grown.history.end());
  return history_deficits(initial.current, added, policy, battery, seed);
}

}  // namespace divlab
