#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "asyncmed/concepts.hpp"
#include "asyncmed/fixtures.hpp"
#include "asyncmed/mediator.hpp"
#include "asyncmed/relations.hpp"

using namespace asyncmed;

namespace {

Evaluation exact() { return Evaluation{}; }

}  // namespace

TEST(ParityMediator, HonestPayoffIsThreeHalvesForEverySize) {
  for (auto [n, k] : {std::pair{2, 0}, std::pair{4, 1}, std::pair{7, 2}}) {
    auto fx = parity_fixture(n, k);
    for (const auto& s : {std::shared_ptr<const Scheduler>(std::make_shared<FifoScheduler>()),
                          std::shared_ptr<const Scheduler>(std::make_shared<LifoScheduler>())}) {
      auto u = expected_utility(*fx.ext, *fx.profile, *s, {}, exact());
      for (const auto& v : u) EXPECT_EQ(v, frac(3, 2)) << n;
    }
  }
}

TEST(ParityMediator, IsInCanonicalForm) {
  auto fx = parity_fixture(3, 0);
  std::vector<std::shared_ptr<const Scheduler>> menu{std::make_shared<FifoScheduler>(),
                                                     std::make_shared<LifoScheduler>()};
  auto v = check_canonical_form(*fx.ext, {*fx.profile}, menu, 2);
  EXPECT_TRUE(v.holds) << v.witness;
  EXPECT_GT(v.runs, 0u);
  auto tight = check_canonical_form(*fx.ext, {*fx.profile}, menu, 1);
  EXPECT_FALSE(tight.holds);
}

TEST(Rounds, LeastRoundsMatchesFactorialSearch) {
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t classes : {1ull, 2ull, 6ull, 7ull, 100ull, 5000ull}) {
      int r = 1;
      while (factorial(static_cast<unsigned long>(r * n)) < classes) ++r;
      EXPECT_EQ(least_rounds(classes, n), r) << n << " " << classes;
    }
}

TEST(Rounds, PermutationRankIsLexicographic) {
  std::vector<int> perm{0, 1, 2, 3};
  std::uint64_t expected = 0;
  do {
    EXPECT_EQ(permutation_rank(perm), expected);
    ++expected;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(expected, 24u);
}

TEST(Rounds, PatternBoundsAreOrdered) {
  for (int r = 1; r <= 2; ++r)
    for (int n = 1; n <= 2; ++n) {
      EXPECT_LE(pattern_bound_factorial(r, n), pattern_bound_prefixes(r, n));
      EXPECT_LE(pattern_bound_prefixes(r, n), loose_rounds(r, n));
    }
  EXPECT_EQ(pattern_bound_square(1, 1), mpz_class(2 * 2 * 2));
}

TEST(Transform, FullVariantIsSurjectiveAndImplements) {
  auto fx = order_revealing_fixture();
  MiOptions o;
  auto mi = minimally_informative_transform(fx.ext, fx.profile, o);
  ASSERT_TRUE(mi.classes);
  EXPECT_EQ(mi.rounds, least_rounds(mi.classes->size(), 2));
  auto s = surjection_check(mi);
  EXPECT_TRUE(s.holds);
  EXPECT_TRUE(s.uncovered.empty());
  auto r = check_implementation(GameSide{mi.ext, mi.profile}, GameSide{fx.ext, fx.profile}, 0, ImplementationMode::Full);
  EXPECT_TRUE(r.holds) << r.witness;
}

TEST(Transform, OrderRevealingTransformIsMinimallyInformative) {
  auto fx = order_revealing_fixture();
  MiOptions o;
  o.variant = MiVariant::Weak;
  auto mi = minimally_informative_transform(fx.ext, fx.profile, o);
  EXPECT_TRUE(check_minimally_informative(mi, standard_menu(2)).holds);
}

TEST(Transform, WeakVariantUsesAtMostTwoMessagesPerPlayer) {
  auto fx = parity_fixture(3, 0);
  MiOptions o;
  o.variant = MiVariant::Weak;
  auto mi = minimally_informative_transform(fx.ext, fx.profile, o);
  for (const auto& s : standard_menu(3)) {
    if (s->name() == "random" || s->name() == "mostly-fifo") continue;
    for_each_exact_run(*mi.ext, *mi.profile, *s, {0, 0, 0}, ExactOptions{},
                       [&](const RunResult& r, const Rational&) { EXPECT_LE(r.messages, 6u) << s->name(); });
  }
  auto r = check_implementation(GameSide{mi.ext, mi.profile}, GameSide{fx.ext, fx.profile}, 0, ImplementationMode::Weak);
  EXPECT_TRUE(r.holds);
}

TEST(Transform, ForcedRoundsStillImplement) {
  auto fx = race_fixture();
  MiOptions o;
  o.force_rounds = 2;
  auto mi = minimally_informative_transform(fx.ext, fx.profile, o);
  EXPECT_EQ(mi.rounds, 2);
  EXPECT_TRUE(surjection_check(mi).holds);
}

TEST(Classes, RaceHasTwoClassesParityOne) {
  auto race = race_fixture();
  auto rc = enumerate_scheduler_classes(*race.ext, *race.profile);
  EXPECT_EQ(rc.size(), 2u);
  auto parity = parity_fixture(2, 0);
  EXPECT_EQ(enumerate_scheduler_classes(*parity.ext, *parity.profile).size(), 1u);
  auto coin = coin_fixture();
  EXPECT_EQ(enumerate_scheduler_classes(*coin.ext, *coin.profile).size(), 1u);
}

TEST(Classes, NodeCapOverflowIsReported) {
  auto fx = parity_fixture(4, 1);
  ClassOptions o;
  o.node_cap = 10;
  EXPECT_THROW(enumerate_scheduler_classes(*fx.ext, *fx.profile, o), EnumerationOverflow);
}
