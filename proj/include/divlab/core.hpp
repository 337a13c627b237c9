#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "divlab/error.hpp"
#include "divlab/rational.hpp"
#include "divlab/subset.hpp"

namespace divlab {

namespace detail {

inline void check_labels(const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    if (l.empty()) throw Error(ErrorKind::kStructural, "empty point label");
    if (std::any_of(l.begin(), l.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
      throw Error(ErrorKind::kStructural, "point label contains whitespace: \"" + l + "\"");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (labels[j] == l) throw Error(ErrorKind::kDuplicateLabel, "duplicate point label \"" + l + "\"");
    }
  }
}

inline void check_ground_size(std::size_t n, std::size_t cap) {
  if (cap > kMaxGroundSize) {
    throw Error(ErrorKind::kCapExceeded, "configured cap " + std::to_string(cap) + " exceeds hard limit " +
                                             std::to_string(kMaxGroundSize));
  }
  if (n > cap) {
    throw Error(ErrorKind::kCapExceeded,
                "ground set of " + std::to_string(n) + " points exceeds cap " + std::to_string(cap));
  }
}

}  // namespace detail

/*
 * A diversity on a finite ground set: one exact value per subset.
 *
 * The table is indexed by SubsetKey bits and always has 2^n entries. Entries
 * for the empty set and singletons are zero for every well-formed diversity;
 * they are kept in the table only so candidate tables (for example the
 * one-point amalgamation of a non-admissible function) can be represented and
 * rejected by validate().
 *
 * Construction checks structure only (labels, table size, nonnegativity, cap);
 * the diversity axioms are checked by validate().
 */
class FiniteDiversity {
 public:
  FiniteDiversity(std::vector<std::string> labels, std::vector<Rat> values,
                  std::size_t cap = kDefaultGroundCap)
      : labels_(std::move(labels)), values_(std::move(values)) {
    if (labels_.empty()) throw Error(ErrorKind::kStructural, "ground set must be nonempty");
    detail::check_ground_size(labels_.size(), cap);
    detail::check_labels(labels_);
    if (values_.size() != subset_count(labels_.size())) {
      throw Error(ErrorKind::kStructural, "value table has " + std::to_string(values_.size()) +
                                              " entries, expected " +
                                              std::to_string(subset_count(labels_.size())));
    }
    for (std::size_t m = 0; m < values_.size(); ++m) {
      if (values_[m].is_negative()) {
        throw Error(ErrorKind::kStructural, "negative value " + values_[m].to_string() + " on subset {" +
                                                describe(SubsetKey{static_cast<std::uint32_t>(m)}) + "}");
      }
    }
  }

  static FiniteDiversity single_point(std::string label) {
    return FiniteDiversity({std::move(label)}, {Rat{0}, Rat{0}});
  }

  std::size_t size() const { return labels_.size(); }
  SubsetKey all() const { return SubsetKey::full(size()); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return i;
    }
    return std::nullopt;
  }

  const Rat& operator()(SubsetKey a) const { return values_[a.bits()]; }
  const Rat& value(SubsetKey a) const {
    if (!a.fits(size())) throw Error(ErrorKind::kInvalidArgument, "subset outside ground set");
    return values_[a.bits()];
  }
  /// Induced metric value d(a, b).
  const Rat& distance(std::size_t a, std::size_t b) const {
    return values_[(SubsetKey::singleton(a) | SubsetKey::singleton(b)).bits()];
  }

  std::span<const Rat> table() const { return values_; }

  /// Space-separated member labels in ground-set order.
  std::string describe(SubsetKey a) const {
    std::string out;
    for (auto i : a.members()) {
      if (!out.empty()) out += ' ';
      out += i < labels_.size() ? labels_[i] : "#" + std::to_string(i);
    }
    return out;
  }

  friend bool operator==(const FiniteDiversity&, const FiniteDiversity&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<Rat> values_;
};

/// Symmetric distance matrix with zero diagonal, positive off-diagonal
/// entries and the triangle inequality; all checked on construction.
class MetricSpace {
 public:
  MetricSpace(std::vector<std::string> labels, std::vector<Rat> dist, std::size_t cap = kDefaultGroundCap)
      : labels_(std::move(labels)), dist_(std::move(dist)) {
    const std::size_t n = labels_.size();
    if (n == 0) throw Error(ErrorKind::kStructural, "metric space must be nonempty");
    detail::check_ground_size(n, cap);
    detail::check_labels(labels_);
    if (dist_.size() != n * n) throw Error(ErrorKind::kStructural, "distance matrix has wrong size");
    for (std::size_t a = 0; a < n; ++a) {
      if (!(*this)(a, a).is_zero()) throw Error(ErrorKind::kStructural, "nonzero diagonal at " + labels_[a]);
      for (std::size_t b = a + 1; b < n; ++b) {
        if ((*this)(a, b) != (*this)(b, a)) {
          throw Error(ErrorKind::kStructural, "asymmetric distance " + labels_[a] + "-" + labels_[b]);
        }
        if ((*this)(a, b) <= Rat{0}) {
          throw Error(ErrorKind::kStructural, "distinct points " + labels_[a] + ", " + labels_[b] +
                                                  " at non-positive distance");
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          if ((*this)(a, c) > (*this)(a, b) + (*this)(b, c)) {
            throw Error(ErrorKind::kStructural,
                        "triangle inequality fails at " + labels_[a] + ", " + labels_[b] + ", " + labels_[c]);
          }
        }
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Rat& operator()(std::size_t a, std::size_t b) const { return dist_[a * labels_.size() + b]; }

  friend bool operator==(const MetricSpace&, const MetricSpace&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<Rat> dist_;
};

struct Violation {
  std::string rule;
  std::vector<SubsetKey> witnesses;
  Rat lhs;
  Rat rhs;
};

/// Outcome of a property check. ok() holds exactly when no violation was
/// recorded; recording stops at the report's limit but never hides failure.
struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t limit = 32;

  bool ok() const { return violations.empty(); }
  /// Returns false once the limit is reached so callers can stop scanning.
  bool add(std::string rule, std::vector<SubsetKey> witnesses, Rat lhs, Rat rhs) {
    if (violations.size() < limit) {
      violations.push_back({std::move(rule), std::move(witnesses), lhs, rhs});
    }
    return violations.size() < limit;
  }
  bool full() const { return violations.size() >= limit; }
};

/*
 * Checks the diversity axioms through the equivalent characterisation
 *   (D1) delta(A) = 0 iff |A| <= 1,
 *   monotone: delta(A) <= delta(A + y),
 *   overlap:  delta(P u R) <= delta(P) + delta(R u {x}) for x in P, R disjoint from P.
 * Overlap with a single shared point suffices: for overlapping P, Q sharing x,
 * monotonicity gives delta((Q \ P) u {x}) <= delta(Q). Cost O(n * 3^n).
 */
inline ValidationReport validate(const FiniteDiversity& d, std::size_t limit = 32) {
  ValidationReport report;
  report.limit = limit;
  const std::size_t n = d.size();
  const std::uint32_t full = d.all().bits();

  for (std::uint32_t m = 0; m <= full; ++m) {
    const SubsetKey a{m};
    const Rat& v = d(a);
    if (a.size() <= 1 ? !v.is_zero() : v.is_zero()) {
      if (!report.add("D1", {a}, v, Rat{0})) return report;
    }
  }
  for (std::uint32_t m = 0; m <= full; ++m) {
    const SubsetKey a{m};
    for (std::size_t y = 0; y < n; ++y) {
      if (a.contains(y)) continue;
      if (d(a) > d(a.with(y))) {
        if (!report.add("monotone", {a, a.with(y)}, d(a), d(a.with(y)))) return report;
      }
    }
  }
  for (std::uint32_t p = 1; p <= full; ++p) {
    const SubsetKey pk{p};
    const SubsetKey rest = SubsetKey{full}.minus(pk);
    for_each_subset(rest, [&](SubsetKey r) {
      if (r.empty() || report.full()) return;
      std::size_t best_x = pk.lowest();
      Rat best = d(r.with(best_x));
      for (auto x : pk.members()) {
        if (d(r.with(x)) < best) {
          best = d(r.with(x));
          best_x = x;
        }
      }
      const Rat rhs = d(pk) + best;
      if (d(pk | r) > rhs) report.add("subadditive", {pk, r.with(best_x)}, d(pk | r), rhs);
    });
    if (report.full()) return report;
  }
  return report;
}

/// d(a, b) = delta({a, b}). Throws StructuralError when the pair values do not
/// form a metric, which cannot happen for a valid diversity.
inline MetricSpace induced_metric(const FiniteDiversity& d) {
  const std::size_t n = d.size();
  std::vector<Rat> dist(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) dist[a * n + b] = a == b ? Rat{0} : d.distance(a, b);
  }
  return MetricSpace(d.labels(), std::move(dist), kMaxGroundSize);
}

/// Sub-diversity on the members of s, in ground-set order.
inline FiniteDiversity restrict(const FiniteDiversity& d, SubsetKey s) {
  if (s.empty()) throw Error(ErrorKind::kEmptySubset, "cannot restrict to the empty set");
  if (!s.fits(d.size())) throw Error(ErrorKind::kInvalidArgument, "subset outside ground set");
  std::vector<std::string> labels;
  for (auto i : s.members()) labels.push_back(d.label(i));
  std::vector<Rat> values(subset_count(labels.size()));
  for (std::uint32_t m = 0; m < values.size(); ++m) values[m] = d(expand(SubsetKey{m}, s));
  return FiniteDiversity(std::move(labels), std::move(values), kMaxGroundSize);
}

/// |delta(A) - delta(A - x + x')| <= d(x, x') for every A, x in A and x'.
inline ValidationReport lipschitz_check(const FiniteDiversity& d, std::size_t limit = 32) {
  ValidationReport report;
  report.limit = limit;
  const std::size_t n = d.size();
  const std::uint32_t full = d.all().bits();
  for (std::uint32_t m = 1; m <= full; ++m) {
    const SubsetKey a{m};
    for (auto x : a.members()) {
      for (std::size_t x2 = 0; x2 < n; ++x2) {
        if (x2 == x) continue;
        const SubsetKey moved = a.without(x).with(x2);
        const Rat gap = abs(d(a) - d(moved));
        const Rat& dist = d.distance(x, x2);
        if (gap > dist) {
          if (!report.add("lipschitz", {a, moved, SubsetKey::singleton(x) | SubsetKey::singleton(x2)}, gap,
                          dist)) {
            return report;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace divlab
