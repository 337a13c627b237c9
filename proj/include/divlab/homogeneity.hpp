#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "divlab/extension.hpp"

namespace divlab {

/// Asks for a host point x with |delta(A u {x}) - f(A)| <= epsilon for every
/// A subset of `frame`; f is a function over restrict(*host, frame).
struct RealizationQuery {
  std::shared_ptr<const FiniteDiversity> host;
  SubsetKey frame;
  AdmissibleFunction f;
  Rat epsilon;
};

namespace detail {

inline void check_query(const RealizationQuery& q) {
  if (!q.host) throw Error(ErrorKind::kInvalidArgument, "query without host");
  if (!q.frame.fits(q.host->size())) throw Error(ErrorKind::kInvalidArgument, "query frame outside host");
  if (q.epsilon.is_negative()) throw Error(ErrorKind::kInvalidArgument, "negative epsilon");
  if (q.frame.empty()) throw Error(ErrorKind::kEmptySubset, "query frame must be nonempty");
  if (!(q.f.base() == restrict(*q.host, q.frame))) {
    throw Error(ErrorKind::kMixedBase, "query function is not over the restriction of the host to its frame");
  }
}

}  // namespace detail

/// max over A subset of frame of |delta(A u {x}) - f(A)|.
inline Rat realization_error(const FiniteDiversity& host, SubsetKey frame, const AdmissibleFunction& f,
                             std::size_t x) {
  Rat worst;
  for (std::uint32_t m = 0; m < f.table().size(); ++m) {
    const SubsetKey a = expand(SubsetKey{m}, frame);
    worst = std::max(worst, abs(host(a.with(x)) - f(SubsetKey{m})));
  }
  return worst;
}

/// Best host point within epsilon: smallest worst-case error, then lowest index.
inline std::optional<std::size_t> realize(const RealizationQuery& q) {
  detail::check_query(q);
  std::optional<std::pair<Rat, std::size_t>> best;
  for (std::size_t x = 0; x < q.host->size(); ++x) {
    Rat err = realization_error(*q.host, q.frame, q.f, x);
    if (err > q.epsilon) continue;
    if (!best || err < best->first) best = {err, x};
  }
  if (!best) return std::nullopt;
  return best->second;
}

/// max over queries of min over host points of the realization error;
/// zero exactly when every query is realized exactly.
inline Rat extension_deficit(const FiniteDiversity& d, std::span<const RealizationQuery> queries) {
  Rat deficit;
  for (const auto& q : queries) {
    detail::check_query(q);
    if (!(*q.host == d)) throw Error(ErrorKind::kMixedBase, "query targets a different host");
    std::optional<Rat> best;
    for (std::size_t x = 0; x < d.size(); ++x) {
      Rat err = realization_error(d, q.frame, q.f, x);
      if (!best || err < *best) best = err;
    }
    deficit = std::max(deficit, *best);
  }
  return deficit;
}

/*
 * Injective point map between two diversities. The referenced diversities
 * are not owned and must outlive the map. The value-preservation invariant
 * is not enforced on construction; holds() checks it exhaustively.
 */
class PartialIsomorphism {
 public:
  using Pair = std::pair<std::size_t, std::size_t>;

  PartialIsomorphism(const FiniteDiversity& source, const FiniteDiversity& target, std::vector<Pair> pairs = {})
      : source_(&source), target_(&target), pairs_(std::move(pairs)) {
    for (const auto& [x, y] : pairs_) {
      if (x >= source.size() || y >= target.size()) throw Error(ErrorKind::kInvalidArgument, "pair out of range");
      if (domain_.contains(x) || range_.contains(y)) {
        throw Error(ErrorKind::kInvalidPartialIso, "map is not injective");
      }
      domain_ = domain_.with(x);
      range_ = range_.with(y);
    }
  }

  const FiniteDiversity& source() const { return *source_; }
  const FiniteDiversity& target() const { return *target_; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  SubsetKey domain() const { return domain_; }
  SubsetKey range() const { return range_; }
  bool is_total() const { return domain_ == source_->all(); }

  std::optional<std::size_t> image(std::size_t x) const {
    for (const auto& [a, b] : pairs_) {
      if (a == x) return b;
    }
    return std::nullopt;
  }

  SubsetKey map(SubsetKey a) const {
    SubsetKey out;
    for (const auto& [x, y] : pairs_) {
      if (a.contains(x)) out = out.with(y);
    }
    return out;
  }

  /// delta_X(A) == delta_Y(phi(A)) for every A subset of the domain.
  bool holds() const {
    bool ok = true;
    for_each_subset(domain_, [&](SubsetKey a) {
      if (ok && (*source_)(a) != (*target_)(map(a))) ok = false;
    });
    return ok;
  }

  PartialIsomorphism extended(std::size_t x, std::size_t y) const {
    auto p = pairs_;
    p.emplace_back(x, y);
    return PartialIsomorphism(*source_, *target_, std::move(p));
  }

 private:
  const FiniteDiversity* source_;
  const FiniteDiversity* target_;
  std::vector<Pair> pairs_;
  SubsetKey domain_;
  SubsetKey range_;
};

namespace detail {

/// Whether adding (x, y) to the map given by fwd keeps every value on
/// subsets of dom u {x} preserved; pairs inside dom are assumed preserved.
inline bool compatible(const FiniteDiversity& src, const FiniteDiversity& dst, const std::vector<std::size_t>& fwd,
                       SubsetKey dom, std::size_t x, std::size_t y) {
  bool ok = true;
  for_each_subset(dom, [&](SubsetKey a) {
    if (!ok) return;
    SubsetKey img;
    for (auto i : a.members()) img = img.with(fwd[i]);
    if (src(a.with(x)) != dst(img.with(y))) ok = false;
  });
  return ok;
}

inline std::vector<std::vector<Rat>> distance_signatures(const FiniteDiversity& d) {
  std::vector<std::vector<Rat>> sig(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t b = 0; b < d.size(); ++b) {
      if (a != b) sig[a].push_back(d.distance(a, b));
    }
    std::sort(sig[a].begin(), sig[a].end());
  }
  return sig;
}

inline std::vector<std::vector<Rat>> values_by_cardinality(const FiniteDiversity& d) {
  std::vector<std::vector<Rat>> out(d.size() + 1);
  for (std::uint32_t m = 0; m < subset_count(d.size()); ++m) out[SubsetKey{m}.size()].push_back(d(SubsetKey{m}));
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

}  // namespace detail

/// Extends phi by x, choosing the lowest-index target point y with
/// delta_Y(B u {y}) = delta_X(phi^-1(B) u {x}) for every B in the range.
inline std::optional<PartialIsomorphism> extend_partial_isomorphism(const PartialIsomorphism& phi, std::size_t x) {
  if (x >= phi.source().size()) throw Error(ErrorKind::kInvalidArgument, "point index out of range");
  if (phi.domain().contains(x)) throw Error(ErrorKind::kInvalidArgument, "point already mapped");
  if (!phi.holds()) throw Error(ErrorKind::kInvalidPartialIso, "map does not preserve diversity values");
  std::vector<std::size_t> fwd(phi.source().size());
  for (const auto& [a, b] : phi.pairs()) fwd[a] = b;
  for (std::size_t y = 0; y < phi.target().size(); ++y) {
    if (phi.range().contains(y)) continue;
    if (detail::compatible(phi.source(), phi.target(), fwd, phi.domain(), x, y)) return phi.extended(x, y);
  }
  return std::nullopt;
}

struct IsoSearchOptions {
  /// Reject candidates whose sorted distance lists differ, and reject
  /// outright when the value multisets per cardinality differ.
  bool prune = true;
};

/*
 * Back-and-forth search for a total isomorphism. Steps alternate strictly:
 * even steps map the lowest unmapped source point forward, odd steps pull
 * the lowest unmapped target point back. Candidates are tried in ascending
 * index order; a dead end backtracks, which an infinite space with the
 * extension property never needs.
 */
inline std::optional<PartialIsomorphism> find_isomorphism(const FiniteDiversity& a, const FiniteDiversity& b,
                                                          IsoSearchOptions opts = {}) {
  const std::size_t n = a.size();
  if (n != b.size()) return std::nullopt;
  std::vector<std::vector<Rat>> sig_a, sig_b;
  if (opts.prune) {
    if (detail::values_by_cardinality(a) != detail::values_by_cardinality(b)) return std::nullopt;
    sig_a = detail::distance_signatures(a);
    sig_b = detail::distance_signatures(b);
  }
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> fwd(n, kNone), bwd(n, kNone);
  SubsetKey dom, ran;

  std::function<bool(std::size_t)> step = [&](std::size_t depth) -> bool {
    if (dom.size() == n) return true;
    const bool forward = depth % 2 == 0;
    if (forward) {
      const std::size_t x = SubsetKey::full(n).minus(dom).lowest();
      for (std::size_t y = 0; y < n; ++y) {
        if (ran.contains(y)) continue;
        if (opts.prune && sig_a[x] != sig_b[y]) continue;
        if (!detail::compatible(a, b, fwd, dom, x, y)) continue;
        fwd[x] = y, bwd[y] = x, dom = dom.with(x), ran = ran.with(y);
        if (step(depth + 1)) return true;
        fwd[x] = kNone, bwd[y] = kNone, dom = dom.without(x), ran = ran.without(y);
      }
    } else {
      const std::size_t y = SubsetKey::full(n).minus(ran).lowest();
      for (std::size_t x = 0; x < n; ++x) {
        if (dom.contains(x)) continue;
        if (opts.prune && sig_a[x] != sig_b[y]) continue;
        if (!detail::compatible(b, a, bwd, ran, y, x)) continue;
        fwd[x] = y, bwd[y] = x, dom = dom.with(x), ran = ran.with(y);
        if (step(depth + 1)) return true;
        fwd[x] = kNone, bwd[y] = kNone, dom = dom.without(x), ran = ran.without(y);
      }
    }
    return false;
  };
  if (!step(0)) return std::nullopt;
  std::vector<PartialIsomorphism::Pair> pairs;
  for (std::size_t x = 0; x < n; ++x) pairs.emplace_back(x, fwd[x]);
  return PartialIsomorphism(a, b, std::move(pairs));
}

/// Injective value-preserving map of all of `small` into `big`, found by
/// one-sided extension in source index order.
inline std::optional<PartialIsomorphism> find_embedding(const FiniteDiversity& small, const FiniteDiversity& big) {
  const std::size_t n = small.size();
  if (n > big.size()) return std::nullopt;
  std::vector<std::size_t> fwd(n);
  SubsetKey used;
  std::function<bool(std::size_t)> step = [&](std::size_t x) -> bool {
    if (x == n) return true;
    const SubsetKey dom = SubsetKey::full(x);
    for (std::size_t y = 0; y < big.size(); ++y) {
      if (used.contains(y)) continue;
      if (!detail::compatible(small, big, fwd, dom, x, y)) continue;
      fwd[x] = y;
      used = used.with(y);
      if (step(x + 1)) return true;
      used = used.without(y);
    }
    return false;
  };
  if (!step(0)) return std::nullopt;
  std::vector<PartialIsomorphism::Pair> pairs;
  for (std::size_t x = 0; x < n; ++x) pairs.emplace_back(x, fwd[x]);
  return PartialIsomorphism(small, big, std::move(pairs));
}

/// Nonempty subsets of a k-element set by descending cardinality, then
/// lexicographically by member list. Supersets always precede subsets.
inline std::vector<SubsetKey> superset_first_order(std::size_t k) {
  std::vector<SubsetKey> order;
  for (std::uint32_t m = 1; m < subset_count(k); ++m) order.emplace_back(m);
  std::sort(order.begin(), order.end(), [](SubsetKey a, SubsetKey b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.members() < b.members();
  });
  return order;
}

/// Throws InvalidOrdering unless `order` lists every nonempty subset of a
/// k-element set once, with A_j subset of A_i implying j >= i.
inline void check_superset_first(const std::vector<SubsetKey>& order, std::size_t k) {
  if (order.size() + 1 != subset_count(k)) throw Error(ErrorKind::kInvalidOrdering, "ordering has wrong length");
  std::vector<std::size_t> pos(subset_count(k), 0);
  std::vector<bool> seen(subset_count(k), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto m = order[i].bits();
    if (m == 0 || !order[i].fits(k) || seen[m]) {
      throw Error(ErrorKind::kInvalidOrdering, "ordering is not a permutation of the nonempty subsets");
    }
    seen[m] = true;
    pos[m] = i;
  }
  for (std::uint32_t big = 1; big < subset_count(k); ++big) {
    for_each_subset(SubsetKey{big}, [&](SubsetKey sub) {
      if (sub.empty() || sub.bits() == big) return;
      if (pos[sub.bits()] < pos[big]) {
        throw Error(ErrorKind::kInvalidOrdering, "a subset is listed before one of its supersets");
      }
    });
  }
}

/*
 * Perturbation of an admissible f on F (a frame of the host) to an admissible
 * g on gamma(F): with nonempty subsets A_1, A_2, ... in superset-first order,
 *   g(gamma A_i) = f(A_i) + i * eps0,   g(empty) = 0.
 * Requires |delta(gamma A) - delta(A)| < eps0 for every nonempty A subset of F.
 * gamma[k] is the image of the k-th member of the frame. The result is a
 * function over restrict(host, gamma(F)); construction re-checks admissibility.
 */
inline AdmissibleFunction perturb_to_admissible(const FiniteDiversity& host, SubsetKey frame,
                                                const AdmissibleFunction& f, const std::vector<std::size_t>& gamma,
                                                const Rat& eps0, std::optional<std::vector<SubsetKey>> order = {}) {
  const std::size_t k = frame.size();
  if (frame.empty()) throw Error(ErrorKind::kEmptySubset, "frame must be nonempty");
  if (!(f.base() == restrict(host, frame))) {
    throw Error(ErrorKind::kMixedBase, "function is not over the restriction of the host to the frame");
  }
  if (eps0 <= Rat{0}) throw Error(ErrorKind::kInvalidArgument, "eps0 must be positive");
  if (gamma.size() != k) throw Error(ErrorKind::kInvalidArgument, "gamma must map every frame point");
  SubsetKey image;
  for (auto g : gamma) {
    if (g >= host.size() || image.contains(g)) throw Error(ErrorKind::kInvalidArgument, "gamma must be injective");
    image = image.with(g);
  }
  auto map_local = [&](SubsetKey local) {
    SubsetKey out;
    for (auto i : local.members()) out = out.with(gamma[i]);
    return out;
  };
  for (std::uint32_t m = 1; m < subset_count(k); ++m) {
    const SubsetKey local{m};
    const Rat gap = abs(host(map_local(local)) - host(expand(local, frame)));
    if (gap >= eps0) {
      throw Error(ErrorKind::kDistortionTooLarge,
                  "gamma moves delta({" + host.describe(expand(local, frame)) + "}) by " + gap.to_string());
    }
  }
  const std::vector<SubsetKey> seq = order ? *order : superset_first_order(k);
  check_superset_first(seq, k);

  std::vector<Rat> values(subset_count(k));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const SubsetKey target_local = compress(map_local(seq[i]), image);
    values[target_local.bits()] = f(seq[i]) + Rat{static_cast<std::int64_t>(i + 1)} * eps0;
  }
  return AdmissibleFunction(share(restrict(host, image)), std::move(values));
}

/// eps0 = eps / (2 (2^n + n)), the step that keeps the total realisation
/// error 2^n eps0 + eps/2 + n eps0 within eps.
inline Rat perturbation_step(const Rat& eps, std::size_t n) {
  return eps / Rat{2 * (static_cast<std::int64_t>(subset_count(n)) + static_cast<std::int64_t>(n))};
}

}  // namespace divlab
