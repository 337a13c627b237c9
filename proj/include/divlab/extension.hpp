#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "divlab/core.hpp"

namespace divlab {

/*
 * One-point extensions of a finite diversity (X, delta).
 *
 * A function f on the subsets of X is admissible when X u {z} carries a
 * diversity with delta_hat(A) = delta(A) and delta_hat(A u {z}) = f(A). The
 * checks below use the table form of that condition:
 *   (i)   f(empty) = 0
 *   (ii)  f(A) >= delta(A)
 *   (iii) f(A u C) + delta(B u C) >= f(A u B)        for C nonempty
 *   (iv)  f(A) + f(B) >= f(A u B)
 */

/// Admissibility of a candidate table over all 2^n subsets of d, d a valid
/// diversity. Reduced form, O(n * 3^n):
///   (iii) <=> f monotone and f(P u R) <= f(P) + delta(R u {x}), x in P, R disjoint from P
///   (iv)  <=> (given monotone) the same inequality for disjoint A, B.
inline ValidationReport is_admissible(const FiniteDiversity& d, std::span<const Rat> f, std::size_t limit = 32) {
  if (f.size() != subset_count(d.size())) {
    throw Error(ErrorKind::kStructural, "function table has " + std::to_string(f.size()) + " entries, expected " +
                                            std::to_string(subset_count(d.size())));
  }
  ValidationReport report;
  report.limit = limit;
  const std::size_t n = d.size();
  const std::uint32_t full = d.all().bits();

  if (!f[0].is_zero() && !report.add("(i)", {SubsetKey{}}, f[0], Rat{0})) return report;
  for (std::uint32_t m = 0; m <= full; ++m) {
    if (f[m] < d(SubsetKey{m}) && !report.add("(ii)", {SubsetKey{m}}, f[m], d(SubsetKey{m}))) return report;
  }
  for (std::uint32_t m = 0; m <= full; ++m) {
    const SubsetKey a{m};
    for (std::size_t y = 0; y < n; ++y) {
      if (a.contains(y)) continue;
      const std::uint32_t up = a.with(y).bits();
      if (f[m] > f[up] && !report.add("(iii)", {a, a.with(y)}, f[m], f[up])) return report;
    }
  }
  for (std::uint32_t p = 1; p <= full; ++p) {
    const SubsetKey pk{p};
    for_each_subset(SubsetKey{full}.minus(pk), [&](SubsetKey r) {
      if (r.empty() || report.full()) return;
      Rat best = d(r.with(pk.lowest()));
      std::size_t best_x = pk.lowest();
      for (auto x : pk.members()) {
        if (d(r.with(x)) < best) {
          best = d(r.with(x));
          best_x = x;
        }
      }
      const Rat rhs = f[p] + best;
      if (f[(pk | r).bits()] > rhs) report.add("(iii)", {pk, r.with(best_x)}, f[(pk | r).bits()], rhs);
    });
    if (report.full()) return report;
  }
  for (std::uint32_t a = 1; a <= full; ++a) {
    for_each_subset(SubsetKey{full}.minus(SubsetKey{a}), [&](SubsetKey b) {
      if (b.empty() || b.bits() < a || report.full()) return;
      const Rat rhs = f[a] + f[b.bits()];
      if (f[a | b.bits()] > rhs) report.add("(iv)", {SubsetKey{a}, b}, f[a | b.bits()], rhs);
    });
    if (report.full()) return report;
  }
  return report;
}

/*
 * An admissible function over a shared base diversity, optionally carrying a
 * verified support claim. The full table over P(X) is stored even when a
 * support is declared. Construction re-checks admissibility and the claim.
 */
class AdmissibleFunction {
 public:
  AdmissibleFunction(std::shared_ptr<const FiniteDiversity> base, std::vector<Rat> values,
                     std::optional<SubsetKey> support = std::nullopt);

  const FiniteDiversity& base() const { return *base_; }
  const std::shared_ptr<const FiniteDiversity>& base_ptr() const { return base_; }
  const Rat& operator()(SubsetKey a) const { return values_[a.bits()]; }
  std::span<const Rat> table() const { return values_; }
  const std::optional<SubsetKey>& support() const { return support_; }

  /// Same table and base contents; support metadata is ignored.
  bool same_values(const AdmissibleFunction& o) const {
    return values_ == o.values_ && (base_ == o.base_ || *base_ == *o.base_);
  }

 private:
  struct Unchecked {};
  AdmissibleFunction(Unchecked, std::shared_ptr<const FiniteDiversity> base, std::vector<Rat> values,
                     std::optional<SubsetKey> support)
      : base_(std::move(base)), values_(std::move(values)), support_(support) {}

  friend AdmissibleFunction extend_from_support(const FiniteDiversity&, SubsetKey, const AdmissibleFunction&);
  friend AdmissibleFunction kappa(std::shared_ptr<const FiniteDiversity>, std::size_t);

  std::shared_ptr<const FiniteDiversity> base_;
  std::vector<Rat> values_;
  std::optional<SubsetKey> support_;
};

inline std::shared_ptr<const FiniteDiversity> share(FiniteDiversity d) {
  return std::make_shared<const FiniteDiversity>(std::move(d));
}

/// kappa_x(A) = delta(A u {x}); support {x}.
inline AdmissibleFunction kappa(std::shared_ptr<const FiniteDiversity> d, std::size_t x) {
  if (x >= d->size()) throw Error(ErrorKind::kInvalidArgument, "point index out of range");
  std::vector<Rat> values(subset_count(d->size()));
  for (std::uint32_t m = 0; m < values.size(); ++m) values[m] = (*d)(SubsetKey{m}.with(x));
  values[0] = Rat{0};
  return AdmissibleFunction(AdmissibleFunction::Unchecked{}, std::move(d), std::move(values),
                            SubsetKey::singleton(x));
}

/*
 * Maximal admissible extension of f from S to X:
 *   f_S^X(A) = min over B subset of S and covers {A_b} of A of f(B) + sum_b delta(A_b u {b}).
 * delta is monotone, so covers reduce to assignments of each element of A to
 * one b in B. For each B the cheapest assignment is a subset-sum DP over the
 * members of B, giving O(2^|S| * 3^n) overall.
 *
 * f must be defined over restrict(d, s) (labels in the same order).
 */
inline AdmissibleFunction extend_from_support(const FiniteDiversity& d, SubsetKey s, const AdmissibleFunction& f) {
  if (s.empty()) throw Error(ErrorKind::kEmptySupport, "support must be nonempty");
  if (!s.fits(d.size())) throw Error(ErrorKind::kInvalidArgument, "support outside ground set");
  const std::vector<std::size_t> sm = s.members();
  if (f.base().size() != sm.size()) {
    throw Error(ErrorKind::kNotAdmissible, "function is not defined over the support");
  }
  for (std::size_t k = 0; k < sm.size(); ++k) {
    if (f.base().label(k) != d.label(sm[k])) {
      throw Error(ErrorKind::kNotAdmissible, "function base does not match the support points");
    }
  }
  for (std::uint32_t m = 0; m < f.table().size(); ++m) {
    if (f.base()(SubsetKey{m}) != d(expand(SubsetKey{m}, s))) {
      throw Error(ErrorKind::kNotAdmissible, "function base differs from the restriction to the support");
    }
  }

  const std::size_t n = d.size();
  const std::size_t total = subset_count(n);
  const std::size_t k = sm.size();
  // cover[B][A]: cheapest assignment of A to the members of B; nullopt = impossible.
  std::vector<std::vector<std::optional<Rat>>> cover(subset_count(k));
  cover[0].assign(total, std::nullopt);
  cover[0][0] = Rat{0};
  for (std::uint32_t b = 1; b < subset_count(k); ++b) {
    const std::size_t top = std::bit_width(b) - 1;
    const auto& prev = cover[b & ~(std::uint32_t{1} << top)];
    const std::size_t anchor = sm[top];
    auto& cur = cover[b];
    cur.assign(total, std::nullopt);
    for (std::uint32_t a = 0; a < total; ++a) {
      std::optional<Rat> best;
      for_each_subset(SubsetKey{a}, [&](SubsetKey part) {
        const auto& rest = prev[a ^ part.bits()];
        if (!rest) return;
        Rat cand = *rest + d(part.with(anchor));
        if (!best || cand < *best) best = cand;
      });
      cur[a] = best;
    }
  }
  std::vector<Rat> values(total);
  for (std::uint32_t a = 0; a < total; ++a) {
    std::optional<Rat> best;
    for (std::uint32_t b = 0; b < subset_count(k); ++b) {
      if (!cover[b][a]) continue;
      Rat cand = f(SubsetKey{b}) + *cover[b][a];
      if (!best || cand < *best) best = cand;
    }
    values[a] = *best;
  }
  return AdmissibleFunction(AdmissibleFunction::Unchecked{}, share(d), std::move(values), s);
}

/// Restriction of g to the subsets of s, as a function over restrict(base, s).
inline AdmissibleFunction restrict_function(const AdmissibleFunction& g, SubsetKey s) {
  auto sub = share(restrict(g.base(), s));
  std::vector<Rat> values(subset_count(sub->size()));
  for (std::uint32_t m = 0; m < values.size(); ++m) values[m] = g(expand(SubsetKey{m}, s));
  return AdmissibleFunction(std::move(sub), std::move(values));
}

/// g has support s iff re-extending its restriction to s reproduces g.
inline bool has_support(const FiniteDiversity& d, const AdmissibleFunction& g, SubsetKey s) {
  if (s.empty()) throw Error(ErrorKind::kEmptySupport, "support must be nonempty");
  if (!(g.base() == d)) throw Error(ErrorKind::kMixedBase, "function is over a different base");
  const AdmissibleFunction lifted = extend_from_support(d, s, restrict_function(g, s));
  return std::equal(lifted.table().begin(), lifted.table().end(), g.table().begin(), g.table().end());
}

inline AdmissibleFunction::AdmissibleFunction(std::shared_ptr<const FiniteDiversity> base, std::vector<Rat> values,
                                              std::optional<SubsetKey> support)
    : base_(std::move(base)), values_(std::move(values)), support_(support) {
  if (!base_) throw Error(ErrorKind::kInvalidArgument, "null base diversity");
  const ValidationReport r = is_admissible(*base_, values_, 1);
  if (!r.ok()) {
    const auto& v = r.violations.front();
    std::string where;
    for (auto w : v.witnesses) where += " {" + base_->describe(w) + "}";
    throw Error(ErrorKind::kNotAdmissible, "condition " + v.rule + " fails at" + where);
  }
  if (support_) {
    if (support_->empty()) throw Error(ErrorKind::kEmptySupport, "declared support is empty");
    if (!has_support(*base_, *this, *support_)) {
      throw Error(ErrorKind::kNotAdmissible, "declared support {" + base_->describe(*support_) + "} does not hold");
    }
  }
}

inline void check_family(std::span<const AdmissibleFunction> family) {
  for (const auto& f : family) {
    if (f.base_ptr() != family.front().base_ptr() && !(f.base() == family.front().base())) {
      throw Error(ErrorKind::kMixedBase, "family members have different bases");
    }
  }
}

/// max over B of |f(B) - g(B)|: the two-member case of hat_delta.
inline Rat hat_delta_pair(const AdmissibleFunction& f, const AdmissibleFunction& g) {
  const std::array<AdmissibleFunction, 2> fam{f, g};
  check_family(fam);
  Rat best;
  for (std::uint32_t m = 0; m < f.table().size(); ++m) best = std::max(best, abs(f(SubsetKey{m}) - g(SubsetKey{m})));
  return best;
}

/*
 * Extension diversity of a family f_1..f_k:
 *   max over j, and subsets A_i (i != j), of f_j(u A_i) - sum f_i(A_i).
 * Members are monotone, so overlapping A_i can be shrunk to a partition of
 * U = u A_i. For each j the cheapest partition cost of every U is an infimal
 * convolution of the other members, O(k^2 * 3^n).
 */
inline Rat hat_delta(std::span<const AdmissibleFunction> family) {
  if (family.size() <= 1) return Rat{0};
  check_family(family);
  const std::size_t total = family.front().table().size();
  Rat best;
  std::vector<Rat> conv(total), next(total);
  for (std::size_t j = 0; j < family.size(); ++j) {
    bool first = true;
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (i == j) continue;
      const auto& fi = family[i];
      if (first) {
        std::copy(fi.table().begin(), fi.table().end(), conv.begin());
        first = false;
        continue;
      }
      for (std::uint32_t u = 0; u < total; ++u) {
        Rat low = conv[u];  // part for f_i empty
        for_each_subset(SubsetKey{u}, [&](SubsetKey part) {
          if (part.empty()) return;
          Rat cand = conv[u ^ part.bits()] + fi(part);
          if (cand < low) low = cand;
        });
        next[u] = low;
      }
      std::swap(conv, next);
    }
    const auto& fj = family[j];
    for (std::uint32_t u = 0; u < total; ++u) {
      Rat gap = fj(SubsetKey{u}) - conv[u];
      if (gap > best) best = gap;
    }
  }
  return best;
}

/// The point z of an admissible f with f({x}) = 0 is x itself.
struct Identified {
  std::size_t point;
};

using AmalgamationResult = std::variant<FiniteDiversity, Identified>;

/// Raw table on X u {z} (z appended last) with delta_hat(A u {z}) = f(A).
/// No checks beyond structure; used to test admissibility against validate().
inline FiniteDiversity amalgamation_table(const FiniteDiversity& d, std::span<const Rat> f, const std::string& label,
                                          std::size_t cap = kMaxGroundSize) {
  const std::size_t n = d.size();
  if (f.size() != subset_count(n)) throw Error(ErrorKind::kStructural, "function table has wrong size");
  if (d.index_of(label)) throw Error(ErrorKind::kDuplicateLabel, "label \"" + label + "\" already in use");
  std::vector<std::string> labels = d.labels();
  labels.push_back(label);
  std::vector<Rat> values(subset_count(n + 1));
  const std::uint32_t z = std::uint32_t{1} << n;
  for (std::uint32_t m = 0; m < subset_count(n); ++m) {
    values[m] = d(SubsetKey{m});
    values[m | z] = f[m];
  }
  return FiniteDiversity(std::move(labels), std::move(values), cap);
}

/// Adjoins the point realising f under a fresh label. When f({x}) = 0 the
/// point would duplicate x, so Identified{x} is returned instead.
inline AmalgamationResult amalgamate(const FiniteDiversity& d, std::span<const Rat> f, const std::string& label,
                                     std::size_t cap = kDefaultGroundCap) {
  if (d.index_of(label)) throw Error(ErrorKind::kDuplicateLabel, "label \"" + label + "\" already in use");
  if (f.size() != subset_count(d.size())) throw Error(ErrorKind::kStructural, "function table has wrong size");
  const ValidationReport r = is_admissible(d, f, 1);
  if (!r.ok()) {
    throw Error(ErrorKind::kNotAdmissible, "condition " + r.violations.front().rule + " fails");
  }
  for (std::size_t x = 0; x < d.size(); ++x) {
    if (f[SubsetKey::singleton(x).bits()].is_zero()) return Identified{x};
  }
  return amalgamation_table(d, f, label, cap);
}

inline AmalgamationResult amalgamate(const AdmissibleFunction& f, const std::string& label,
                                     std::size_t cap = kDefaultGroundCap) {
  return amalgamate(f.base(), f.table(), label, cap);
}

}  // namespace divlab
