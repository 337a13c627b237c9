#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "divlab/core.hpp"

namespace divlab {

enum class SteinerMethod { kDreyfusWagner, kExhaustive };

struct SteinerConfig {
  SteinerMethod method = SteinerMethod::kDreyfusWagner;
  /// Largest terminal set a single Dreyfus-Wagner query accepts.
  std::size_t terminal_cap = 10;
};

/// Ground sets up to this size may use exhaustive tree enumeration.
inline constexpr std::size_t kExhaustiveSteinerLimit = 6;

/// delta_diam(A) = max over a, b in A of d(a, b).
inline FiniteDiversity diameter_diversity(const MetricSpace& m) {
  const std::size_t n = m.size();
  std::vector<Rat> values(subset_count(n));
  for (std::uint32_t s = 1; s < values.size(); ++s) {
    const SubsetKey a{s};
    const std::size_t top = std::bit_width(s) - 1;
    const SubsetKey rest = a.without(top);
    Rat best = values[rest.bits()];
    for (auto b : rest.members()) best = std::max(best, m(top, b));
    values[s] = best;
  }
  return FiniteDiversity(m.labels(), std::move(values), kMaxGroundSize);
}

namespace detail {

/*
 * Dreyfus-Wagner over the terminal set `terminals`, with every point of the
 * metric available as a Steiner vertex. Returns dp where dp[S * n + v] is the
 * weight of a lightest tree spanning (members of S) u {v}, S given in
 * positions of `terminals`. The metric is its own shortest-path closure, so a
 * single relaxation per subset suffices.
 */
inline std::vector<Rat> dreyfus_wagner(const MetricSpace& m, SubsetKey terminals) {
  const std::size_t n = m.size();
  const std::vector<std::size_t> term = terminals.members();
  const std::size_t k = term.size();
  const std::size_t states = subset_count(k);
  std::vector<Rat> dp(states * n);
  std::vector<Rat> merged(n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t v = 0; v < n; ++v) dp[(std::size_t{1} << i) * n + v] = m(term[i], v);
  }
  for (std::uint32_t s = 1; s < states; ++s) {
    if (std::has_single_bit(s)) continue;
    const std::uint32_t low = s & (~s + 1);
    for (std::size_t v = 0; v < n; ++v) {
      std::optional<Rat> best;
      // Each split visited once: the part containing the lowest terminal.
      for (std::uint32_t sub = (s - 1) & s; sub != 0; sub = (sub - 1) & s) {
        if ((sub & low) == 0) continue;
        Rat cand = dp[sub * n + v] + dp[(s ^ sub) * n + v];
        if (!best || cand < *best) best = cand;
      }
      merged[v] = *best;
    }
    for (std::size_t v = 0; v < n; ++v) {
      Rat best = merged[v];
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v) continue;
        Rat cand = merged[u] + m(u, v);
        if (cand < best) best = cand;
      }
      dp[s * n + v] = best;
    }
  }
  return dp;
}

inline Rat mst_weight(const MetricSpace& m, const std::vector<std::size_t>& verts) {
  if (verts.size() <= 1) return Rat{0};
  std::vector<bool> in(verts.size(), false);
  std::vector<std::optional<Rat>> key(verts.size());
  key[0] = Rat{0};
  Rat total;
  for (std::size_t step = 0; step < verts.size(); ++step) {
    std::size_t pick = verts.size();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (!in[i] && key[i] && (pick == verts.size() || *key[i] < *key[pick])) pick = i;
    }
    in[pick] = true;
    total += *key[pick];
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (in[i]) continue;
      const Rat& w = m(verts[pick], verts[i]);
      if (!key[i] || w < *key[i]) key[i] = w;
    }
  }
  return total;
}

/// Minimum over all labelled trees on `verts`, enumerated by Pruefer code.
inline Rat min_tree_by_pruefer(const MetricSpace& m, const std::vector<std::size_t>& verts) {
  const std::size_t k = verts.size();
  if (k <= 1) return Rat{0};
  if (k == 2) return m(verts[0], verts[1]);
  std::vector<std::size_t> code(k - 2, 0);
  std::optional<Rat> best;
  std::vector<std::size_t> degree(k);
  while (true) {
    std::fill(degree.begin(), degree.end(), 1);
    for (auto c : code) ++degree[c];
    Rat weight;
    std::vector<std::size_t> deg = degree;
    for (auto c : code) {
      std::size_t leaf = 0;
      while (deg[leaf] != 1) ++leaf;
      weight += m(verts[leaf], verts[c]);
      --deg[leaf];
      --deg[c];
    }
    std::size_t u = k, w = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (deg[i] == 1) (u == k ? u : w) = i;
    }
    weight += m(verts[u], verts[w]);
    if (!best || weight < *best) best = weight;

    std::size_t pos = 0;
    while (pos < code.size() && ++code[pos] == k) code[pos++] = 0;
    if (pos == code.size()) break;
  }
  return *best;
}

}  // namespace detail

/// Weight of a lightest tree with vertices in X covering `a`.
inline Rat steiner_value(const MetricSpace& m, SubsetKey a, const SteinerConfig& cfg = {}) {
  if (!a.fits(m.size())) throw Error(ErrorKind::kInvalidArgument, "subset outside ground set");
  if (a.size() <= 1) return Rat{0};
  if (cfg.method == SteinerMethod::kExhaustive) {
    if (m.size() > kExhaustiveSteinerLimit) {
      throw Error(ErrorKind::kCapExceeded, "exhaustive Steiner enumeration limited to " +
                                               std::to_string(kExhaustiveSteinerLimit) + " points");
    }
    const SubsetKey others = SubsetKey::full(m.size()).minus(a);
    std::optional<Rat> best;
    for_each_subset(others, [&](SubsetKey extra) {
      Rat w = detail::min_tree_by_pruefer(m, (a | extra).members());
      if (!best || w < *best) best = w;
    });
    return *best;
  }
  if (a.size() > cfg.terminal_cap) {
    throw Error(ErrorKind::kCapExceeded, "terminal set of " + std::to_string(a.size()) +
                                             " points exceeds cap " + std::to_string(cfg.terminal_cap));
  }
  // Root the tree at the highest terminal and span the rest.
  const std::size_t top = std::bit_width(a.bits()) - 1;
  const SubsetKey rest = a.without(top);
  const auto dp = detail::dreyfus_wagner(m, rest);
  return dp[SubsetKey::full(rest.size()).bits() * m.size() + top];
}

/*
 * Full Steiner table. Dreyfus-Wagner with every point as a terminal yields
 * the optimum for every subset in one pass: the tree for A is dp[A - t][t].
 */
inline FiniteDiversity steiner_diversity(const MetricSpace& m, const SteinerConfig& cfg = {}) {
  const std::size_t n = m.size();
  std::vector<Rat> values(subset_count(n));
  if (cfg.method == SteinerMethod::kExhaustive) {
    for (std::uint32_t s = 0; s < values.size(); ++s) values[s] = steiner_value(m, SubsetKey{s}, cfg);
  } else {
    const auto dp = detail::dreyfus_wagner(m, SubsetKey::full(n));
    for (std::uint32_t s = 1; s < values.size(); ++s) {
      const SubsetKey a{s};
      if (a.size() == 1) continue;
      const std::size_t t = a.lowest();
      values[s] = dp[a.without(t).bits() * n + t];
    }
  }
  return FiniteDiversity(m.labels(), std::move(values), kMaxGroundSize);
}

struct SteinerTree {
  Rat weight;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (u, v) with u < v, sorted
};

/*
 * A witness tree for steiner_value(m, a). A lightest covering tree is a
 * minimum spanning tree of its own vertex set, so the witness is the MST of
 * the first optimal vertex set (in subset-mask order), built by Kruskal with
 * edges ordered by (weight, u, v).
 */
inline SteinerTree steiner_tree(const MetricSpace& m, SubsetKey a) {
  if (!a.fits(m.size())) throw Error(ErrorKind::kInvalidArgument, "subset outside ground set");
  SteinerTree out;
  if (a.size() <= 1) return out;
  const SubsetKey others = SubsetKey::full(m.size()).minus(a);
  std::optional<std::pair<Rat, SubsetKey>> best;
  std::vector<SubsetKey> extras;
  for_each_subset(others, [&](SubsetKey e) { extras.push_back(e); });
  std::sort(extras.begin(), extras.end());
  for (auto e : extras) {
    Rat w = detail::mst_weight(m, (a | e).members());
    if (!best || w < best->first) best = {w, a | e};
  }
  const auto verts = best->second.members();
  std::vector<std::tuple<Rat, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t j = i + 1; j < verts.size(); ++j) cand.emplace_back(m(verts[i], verts[j]), verts[i], verts[j]);
  }
  std::sort(cand.begin(), cand.end());
  std::vector<std::size_t> parent(m.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [w, u, v] : cand) {
    auto ru = find(u), rv = find(v);
    if (ru == rv) continue;
    parent[ru] = rv;
    out.weight += w;
    out.edges.emplace_back(u, v);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

/// diam(A) <= delta(A) <= Steiner(A) for every subset, both bounds taken
/// over the induced metric of d.
inline ValidationReport sandwich_check(const FiniteDiversity& d, const SteinerConfig& cfg = {},
                                       std::size_t limit = 32) {
  ValidationReport report;
  report.limit = limit;
  const MetricSpace m = induced_metric(d);
  const FiniteDiversity lo = diameter_diversity(m);
  const FiniteDiversity hi = steiner_diversity(m, cfg);
  for (std::uint32_t s = 0; s < subset_count(d.size()); ++s) {
    const SubsetKey a{s};
    if (lo(a) > d(a) && !report.add("diameter-bound", {a}, lo(a), d(a))) break;
    if (d(a) > hi(a) && !report.add("steiner-bound", {a}, d(a), hi(a))) break;
  }
  return report;
}

}  // namespace divlab
