#pragma once

// Brute-force evaluators that follow the defining formulas literally. They
// share no code with the optimised routines and exist for differential
// testing and the CLI's --oracle mode. All are exponential; keep n small.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "divlab/extension.hpp"

namespace divlab::oracle {

/// (D1) and (D2) over every triple A, B != empty, C. O(8^n).
inline bool is_diversity(const FiniteDiversity& d) {
  const std::uint32_t total = static_cast<std::uint32_t>(subset_count(d.size()));
  for (std::uint32_t a = 0; a < total; ++a) {
    const bool small = SubsetKey{a}.size() <= 1;
    if (d(SubsetKey{a}).is_negative() || (small != d(SubsetKey{a}).is_zero())) return false;
  }
  for (std::uint32_t a = 0; a < total; ++a) {
    for (std::uint32_t b = 1; b < total; ++b) {
      for (std::uint32_t c = 0; c < total; ++c) {
        if (d(SubsetKey{a | b}) + d(SubsetKey{b | c}) < d(SubsetKey{a | c})) return false;
      }
    }
  }
  return true;
}

/// Conditions (i)-(iv) of admissibility, each over all of its quantifiers.
inline bool is_admissible(const FiniteDiversity& d, std::span<const Rat> f) {
  const std::uint32_t total = static_cast<std::uint32_t>(subset_count(d.size()));
  if (f.size() != total) return false;
  if (!f[0].is_zero()) return false;
  for (std::uint32_t a = 0; a < total; ++a) {
    if (f[a] < d(SubsetKey{a})) return false;
  }
  for (std::uint32_t a = 0; a < total; ++a) {
    for (std::uint32_t b = 0; b < total; ++b) {
      for (std::uint32_t c = 1; c < total; ++c) {
        if (f[a | c] + d(SubsetKey{b | c}) < f[a | b]) return false;
      }
      if (f[a] + f[b] < f[a | b]) return false;
    }
  }
  return true;
}

/// max_j max over tuples (A_i)_{i != j} of f_j(u A_i) - sum f_i(A_i),
/// enumerating all (2^n)^(k-1) tuples.
inline Rat hat_delta(std::span<const AdmissibleFunction> family) {
  if (family.size() <= 1) return Rat{0};
  const std::size_t k = family.size();
  const std::uint32_t total = static_cast<std::uint32_t>(family.front().table().size());
  Rat best;
  std::vector<std::uint32_t> pick(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      std::uint32_t uni = 0;
      Rat cost;
      for (std::size_t i = 0; i < k; ++i) {
        if (i == j) continue;
        uni |= pick[i];
        cost += family[i](SubsetKey{pick[i]});
      }
      const Rat v = family[j](SubsetKey{uni}) - cost;
      if (v > best) best = v;
      std::size_t pos = 0;
      while (pos < k) {
        if (pos == j) {
          ++pos;
          continue;
        }
        if (++pick[pos] < total) break;
        pick[pos++] = 0;
      }
      if (pos == k) break;
    }
  }
  return best;
}

/*
 * f_S^X(A) as written: minimum over B subset of S and families {A_b} with
 * union exactly A of f(B) + sum delta(A_b u {b}). Parts may overlap and may be
 * empty. f is over restrict(d, s).
 */
inline std::vector<Rat> extend_from_support(const FiniteDiversity& d, SubsetKey s, const AdmissibleFunction& f) {
  const std::vector<std::size_t> sm = s.members();
  const std::uint32_t total = static_cast<std::uint32_t>(subset_count(d.size()));
  std::vector<Rat> out(total);
  for (std::uint32_t a = 0; a < total; ++a) {
    std::optional<Rat> best;
    std::vector<std::uint32_t> subs;
    for_each_subset(SubsetKey{a}, [&](SubsetKey x) { subs.push_back(x.bits()); });
    for (std::uint32_t b = 0; b < subset_count(sm.size()); ++b) {
      const std::vector<std::size_t> members = SubsetKey{b}.members();
      std::vector<std::size_t> choice(members.size(), 0);
      while (true) {
        std::uint32_t uni = 0;
        Rat cost = f(SubsetKey{b});
        for (std::size_t i = 0; i < members.size(); ++i) {
          uni |= subs[choice[i]];
          cost += d(SubsetKey{subs[choice[i]]}.with(sm[members[i]]));
        }
        if (uni == a && (!best || cost < *best)) best = cost;
        std::size_t pos = 0;
        while (pos < choice.size() && ++choice[pos] == subs.size()) choice[pos++] = 0;
        if (pos == choice.size()) break;
      }
    }
    out[a] = *best;
  }
  return out;
}

/// Admissibility by definition: some point z, fresh or already in X, makes
/// delta_hat a diversity on X u {z}.
inline bool admissible_by_definition(const FiniteDiversity& d, std::span<const Rat> f) {
  for (std::size_t x = 0; x < d.size(); ++x) {
    bool same = true;
    for (std::uint32_t m = 0; m < f.size() && same; ++m) same = f[m] == d(SubsetKey{m}.with(x));
    if (same) return true;
  }
  for (const auto& v : f) {
    if (v.is_negative()) return false;
  }
  std::string label = "z";
  while (d.index_of(label)) label += "'";
  return validate(amalgamation_table(d, f, label), 1).ok();
}

}  // namespace divlab::oracle
