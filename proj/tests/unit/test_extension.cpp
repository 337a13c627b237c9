#include <gtest/gtest.h>

#include "divlab/divlab.hpp"
#include "support/generators.hpp"

namespace divlab {
namespace {

using testing::unit_triangle;

std::vector<Rat> table_of(const AdmissibleFunction& f) { return {f.table().begin(), f.table().end()}; }

TEST(Admissible, KappaIsAdmissibleEverywhere) {
  Rng rng(2);
  for (int i = 0; i < 40; ++i) {
    auto d = share(testing::random_diversity(2 + i % 4, rng));
    for (std::size_t x = 0; x < d->size(); ++x) {
      const AdmissibleFunction k = kappa(d, x);
      EXPECT_TRUE(is_admissible(*d, k.table()).ok());
      EXPECT_EQ(k.support(), SubsetKey::singleton(x));
      EXPECT_TRUE(has_support(*d, k, SubsetKey::singleton(x)));
    }
  }
}

TEST(Admissible, KappaValuesOnTripleTwo) {
  auto d = share(unit_triangle(Rat{2}));
  const AdmissibleFunction ka = kappa(d, 0);
  EXPECT_EQ(ka(SubsetKey{}), Rat{0});
  EXPECT_EQ(ka(SubsetKey::singleton(0)), Rat{0});
  EXPECT_EQ(ka(SubsetKey::of({1, 2})), Rat{2});
}

TEST(Admissible, NonzeroEmptyValueFailsConditionOne) {
  const FiniteDiversity d = unit_triangle(Rat{2});
  std::vector<Rat> f(8, Rat{3});
  const auto r = is_admissible(d, f);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations.front().rule, "(i)");
}

TEST(Admissible, DeltaItselfIsRejectedLikeTheOracle) {
  // f = delta: f({y}) = 0 for every y, so z would sit at distance 0 from every point.
  const FiniteDiversity d = unit_triangle(Rat{2});
  const std::vector<Rat> f(d.table().begin(), d.table().end());
  EXPECT_FALSE(is_admissible(d, f).ok());
  EXPECT_FALSE(oracle::is_admissible(d, f));
  EXPECT_FALSE(oracle::admissible_by_definition(d, f));
}

TEST(Admissible, StarTableSometimesFails) {
  Rng rng(3);
  GrowthPolicy policy;
  policy.diameter_cap = Rat{40};
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const FiniteDiversity d = testing::random_diversity(2 + i % 4, rng);
    const auto r = random_katetov(induced_metric(d), rng, policy);
    const auto star = star_table(d, r);
    const bool ok = is_admissible(d, star).ok();
    EXPECT_EQ(ok, oracle::is_admissible(d, star));
    failures += ok ? 0 : 1;
    const auto f = kappa_max_table(d, r);
    EXPECT_TRUE(is_admissible(d, f).ok());
    EXPECT_TRUE(oracle::is_admissible(d, f));
  }
  EXPECT_GT(failures, 0);
}

TEST(Admissible, ConstantStar) {
  const FiniteDiversity d = unit_triangle(Rat{1});
  for (Rat c : {Rat{1}, Rat{3}}) {
    const auto f = star_table(d, std::vector<Rat>(3, c));
    EXPECT_TRUE(is_admissible(d, f).ok());
    EXPECT_TRUE(oracle::is_admissible(d, f));
    for (std::uint32_t m = 1; m < 8; ++m) EXPECT_EQ(f[m], d(SubsetKey{m}) + c);
  }
  // Radius below the pair distance: f(a) + f(b) = 1 < 3/2 = f(ab).
  const auto f = star_table(d, std::vector<Rat>(3, Rat{1, 2}));
  EXPECT_FALSE(is_admissible(d, f).ok());
  EXPECT_FALSE(oracle::is_admissible(d, f));
}

TEST(Admissible, ReducedCheckMatchesLiteralConditions) {
  Rng rng(4);
  int yes = 0;
  for (int i = 0; i < 600; ++i) {
    const FiniteDiversity d = testing::random_diversity(1 + i % 4, rng);
    const auto f = testing::candidate_function(d, rng);
    const bool fast = is_admissible(d, f).ok();
    EXPECT_EQ(fast, oracle::is_admissible(d, f));
    EXPECT_EQ(fast, oracle::admissible_by_definition(d, f));
    yes += fast;
  }
  EXPECT_GT(yes, 60);
  EXPECT_LT(yes, 540);
}

TEST(Admissible, ConstructorRejectsBadTables) {
  auto d = share(unit_triangle(Rat{2}));
  try {
    AdmissibleFunction(d, std::vector<Rat>(8, Rat{0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAdmissible);
  }
  EXPECT_THROW(AdmissibleFunction(d, std::vector<Rat>(4)), Error);
}

TEST(Admissible, MonotoneAndContinuous) {
  Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    auto d = share(testing::random_diversity(5, rng));
    const AdmissibleFunction f = testing::random_function(d, rng);
    for (std::uint32_t a = 0; a < 32; ++a) {
      for (std::size_t y = 0; y < 5; ++y) EXPECT_LE(f(SubsetKey{a}), f(SubsetKey{a}.with(y)));
    }
    // |f(A) - f(B)| <= sum of d(a_i, b_i) for a pairing of equal-size A, B
    std::vector<std::size_t> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t k = 1 + i % 5;
    SubsetKey a, b;
    Rat eps;
    for (std::size_t j = 0; j < k; ++j) {
      a = a.with(j);
      b = b.with(perm[j]);
      if (j != perm[j]) eps = std::max(eps, d->distance(j, perm[j]));
    }
    EXPECT_LE(abs(f(a) - f(b)), Rat{static_cast<std::int64_t>(k)} * eps);
  }
}

TEST(HatDelta, SmallFamilies) {
  auto d = share(unit_triangle(Rat{2}));
  const std::vector<AdmissibleFunction> none;
  EXPECT_EQ(hat_delta(none), Rat{0});
  const std::vector<AdmissibleFunction> one{kappa(d, 0)};
  EXPECT_EQ(hat_delta(one), Rat{0});
  const std::vector<AdmissibleFunction> same{kappa(d, 1), kappa(d, 1)};
  EXPECT_EQ(hat_delta(same), Rat{0});
}

TEST(HatDelta, KappaPairsGiveDistances) {
  auto d = share(unit_triangle(Rat{2}));
  const std::vector<AdmissibleFunction> ab{kappa(d, 0), kappa(d, 1)};
  EXPECT_EQ(hat_delta(ab), Rat{1});
  const std::vector<AdmissibleFunction> abc{kappa(d, 0), kappa(d, 1), kappa(d, 2)};
  EXPECT_EQ(hat_delta(abc), Rat{2});
}

TEST(HatDelta, EmbeddingOnRandomDiversities) {
  Rng rng(6);
  for (int i = 0; i < 40; ++i) {
    auto d = share(testing::random_diversity(2 + i % 4, rng));
    for (std::uint32_t s = 1; s < subset_count(d->size()); ++s) {
      std::vector<AdmissibleFunction> fam;
      for (auto x : SubsetKey{s}.members()) fam.push_back(kappa(d, x));
      EXPECT_EQ(hat_delta(fam), (*d)(SubsetKey{s}));
    }
  }
}

TEST(HatDelta, PairFormulaAndOracleAgree) {
  Rng rng(7);
  for (int i = 0; i < 150; ++i) {
    auto d = share(testing::random_diversity(1 + i % 4, rng));
    std::vector<AdmissibleFunction> fam;
    const std::size_t k = 2 + i % 2;
    for (std::size_t j = 0; j < k; ++j) fam.push_back(testing::random_function(d, rng));
    EXPECT_EQ(hat_delta(fam), oracle::hat_delta(fam));
    if (k == 2) {
      EXPECT_EQ(hat_delta(fam), hat_delta_pair(fam[0], fam[1]));
    }
  }
}

TEST(HatDelta, FamilyValuesFormADiversity) {
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    auto d = share(testing::random_diversity(3, rng));
    std::vector<AdmissibleFunction> fam;
    for (int j = 0; j < 4; ++j) fam.push_back(testing::random_function(d, rng));
    std::vector<Rat> t(16);
    bool distinct = true;
    for (std::uint32_t s = 0; s < 16; ++s) {
      std::vector<AdmissibleFunction> sub;
      for (auto j : SubsetKey{s}.members()) sub.push_back(fam[j]);
      t[s] = hat_delta(sub);
      if (SubsetKey{s}.size() == 2 && t[s].is_zero()) distinct = false;
    }
    if (!distinct) continue;
    EXPECT_TRUE(validate(FiniteDiversity(testing::labels(4), t)).ok());
  }
}

TEST(HatDelta, MixedBaseThrows) {
  auto d1 = share(unit_triangle(Rat{2}));
  auto d2 = share(unit_triangle(Rat{1}));
  const std::vector<AdmissibleFunction> fam{kappa(d1, 0), kappa(d2, 1)};
  try {
    hat_delta(fam);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMixedBase);
  }
}

TEST(Extend, FullSupportIsIdentity) {
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    auto d = share(testing::random_diversity(4, rng));
    const AdmissibleFunction f = testing::random_function(d, rng);
    EXPECT_EQ(table_of(extend_from_support(*d, d->all(), f)), table_of(f));
    EXPECT_TRUE(has_support(*d, f, d->all()));
  }
}

TEST(Extend, ZeroAtSingletonGivesKappa) {
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    auto d = share(testing::random_diversity(4, rng));
    const std::size_t x = static_cast<std::size_t>(i % 4);
    const SubsetKey s = SubsetKey::singleton(x);
    const AdmissibleFunction zero(share(restrict(*d, s)), {Rat{0}, Rat{0}});
    EXPECT_EQ(table_of(extend_from_support(*d, s, zero)), table_of(kappa(d, x)));
  }
}

TEST(Extend, MatchesOracleRestrictsAndIsMaximal) {
  Rng rng(11);
  for (int i = 0; i < 120; ++i) {
    const std::size_t n = 2 + i % 3;
    auto d = share(testing::random_diversity(n, rng));
    const SubsetKey s = testing::random_nonempty(rng, n, 3);
    const AdmissibleFunction f = testing::random_function(share(restrict(*d, s)), rng);
    const AdmissibleFunction g = extend_from_support(*d, s, f);
    EXPECT_TRUE(is_admissible(*d, g.table()).ok());
    EXPECT_EQ(table_of(g), oracle::extend_from_support(*d, s, f));
    EXPECT_EQ(table_of(restrict_function(g, s)), table_of(f));
    EXPECT_TRUE(has_support(*d, g, s));
    // Any admissible extension of f is bounded by g.
    for (int t = 0; t < 5; ++t) {
      const AdmissibleFunction h = testing::random_function(d, rng);
      std::vector<Rat> cand = table_of(h);
      bool extends = true;
      for (std::uint32_t m = 0; m < subset_count(s.size()); ++m) extends &= cand[expand(SubsetKey{m}, s).bits()] == f(SubsetKey{m});
      if (!extends) continue;
      for (std::uint32_t m = 0; m < cand.size(); ++m) EXPECT_LE(cand[m], g(SubsetKey{m}));
    }
  }
}

TEST(Extend, ErrorsAndSupportClaims) {
  auto d = share(unit_triangle(Rat{2}));
  const AdmissibleFunction ka = kappa(d, 0);
  EXPECT_THROW(extend_from_support(*d, SubsetKey{}, ka), Error);
  EXPECT_THROW(has_support(*d, ka, SubsetKey{}), Error);
  try {
    extend_from_support(*d, SubsetKey::of({0, 1}), ka);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAdmissible);
  }
  auto other = share(unit_triangle(Rat{1}));
  try {
    has_support(*other, ka, SubsetKey::singleton(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMixedBase);
  }
  // kappa_a on triple=2 is not supported by {b}
  EXPECT_FALSE(has_support(*d, ka, SubsetKey::singleton(1)));
  EXPECT_THROW(AdmissibleFunction(d, table_of(ka), SubsetKey::singleton(1)), Error);
  EXPECT_NO_THROW(AdmissibleFunction(d, table_of(ka), SubsetKey::singleton(0)));
}

TEST(Extend, StrictSubsetSupportUsuallyChangesTable) {
  Rng rng(12);
  int changed = 0;
  for (int i = 0; i < 40; ++i) {
    auto d = share(testing::random_diversity(4, rng));
    const SubsetKey s = SubsetKey::of({0, 1});
    const AdmissibleFunction g =
        extend_from_support(*d, s, testing::random_function(share(restrict(*d, s)), rng));
    if (!has_support(*d, g, SubsetKey::singleton(0))) ++changed;
  }
  EXPECT_GT(changed, 20);
}

TEST(Amalgamate, KappaIsIdentified) {
  auto d = share(unit_triangle(Rat{2}));
  const auto res = amalgamate(kappa(d, 2), "z");
  ASSERT_TRUE(std::holds_alternative<Identified>(res));
  EXPECT_EQ(std::get<Identified>(res).point, 2u);
}

TEST(Amalgamate, StarOnUnitPair) {
  const FiniteDiversity pair({"a", "b"}, {Rat{0}, Rat{0}, Rat{0}, Rat{1}});
  const auto f = star_table(pair, {Rat{1}, Rat{1}});
  const auto res = amalgamate(pair, f, "z");
  ASSERT_TRUE(std::holds_alternative<FiniteDiversity>(res));
  const FiniteDiversity& g = std::get<FiniteDiversity>(res);
  EXPECT_TRUE(validate(g).ok());
  EXPECT_TRUE(oracle::is_diversity(g));
  EXPECT_EQ(g(SubsetKey::of({0, 2})), Rat{1});
  EXPECT_EQ(g(SubsetKey::of({1, 2})), Rat{1});
  EXPECT_EQ(g(SubsetKey::of({0, 1, 2})), f[3]);
  EXPECT_EQ(restrict(g, SubsetKey::of({0, 1})), pair);
}

TEST(Amalgamate, Errors) {
  const FiniteDiversity d = unit_triangle(Rat{2});
  const auto f = star_table(d, {Rat{1}, Rat{1}, Rat{1}});
  try {
    amalgamate(d, f, "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDuplicateLabel);
  }
  std::vector<Rat> bad(8, Rat{1});
  bad[0] = Rat{0};
  bad[7] = Rat{5};
  try {
    amalgamate(d, bad, "z");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAdmissible);
  }
}

}  // namespace
}  // namespace divlab
