#include <gtest/gtest.h>

#include "asyncmed/game.hpp"

using namespace asyncmed;

namespace {

// Straight reading of the parity game's payoff rule.
Rational parity_rule(const ActionProfile& a, int k) {
  int bottoms = 0;
  bool only_zero = true, only_one = true;
  for (Action x : a) {
    if (x == kBottom) ++bottoms;
    if (x == 1) only_zero = false;
    if (x == 0) only_one = false;
  }
  if (bottoms >= k + 1) return frac(11, 10);
  if (only_zero) return 1;
  if (only_one) return 2;
  return 0;
}

void for_each_profile(int n, const std::function<void(const ActionProfile&)>& f) {
  ActionProfile a(n, 0);
  const Action vals[3] = {0, 1, kBottom};
  std::vector<int> idx(n, 0);
  while (true) {
    for (int i = 0; i < n; ++i) a[i] = vals[idx[i]];
    f(a);
    int i = 0;
    while (i < n && ++idx[i] == 3) idx[i++] = 0;
    if (i == n) break;
  }
}

}  // namespace

TEST(Rational, ParsesFractionsAndDecimals) {
  EXPECT_EQ(parse_rational("3/2"), frac(3, 2));
  EXPECT_EQ(parse_rational("1.1"), frac(11, 10));
  EXPECT_EQ(parse_rational("-4"), Rational(-4));
  EXPECT_EQ(frac(2, 4), frac(1, 2));
}

TEST(ParityGame, PayoffTableMatchesRule) {
  for (auto [n, k] : {std::pair{4, 1}, std::pair{7, 2}, std::pair{2, 0}}) {
    auto g = build_parity_game(n, k);
    ASSERT_EQ(g->n(), n);
    ASSERT_EQ(g->types().size(), 1u);
    for_each_profile(n, [&](const ActionProfile& a) {
      auto u = g->payoff(g->types()[0], a);
      for (const auto& v : u) ASSERT_EQ(v, parity_rule(a, k)) << profile_name(a);
    });
  }
}

TEST(ParityGame, RejectsTooFewPlayers) {
  EXPECT_THROW(build_parity_game(6, 2), ParameterError);
}

TEST(MajorityGame, ValidatesAndHasPayoffs) {
  auto g = build_majority_game(3);
  EXPECT_NO_THROW(g->validate());
  Rational total = 0;
  for (const auto& p : g->prior()) total += p;
  EXPECT_EQ(total, 1);
}

TEST(UnderlyingGame, ValidateRejectsBadPrior) {
  UnderlyingGame g(1, {{0}}, {frac(1, 2)}, {{0, 1}});
  g.set_utility({0}, {0}, {Rational(0)});
  g.set_utility({0}, {1}, {Rational(1)});
  EXPECT_THROW(g.validate(), ParameterError);
}

TEST(UtilityVariant, BoundIsChecked) {
  auto base = build_parity_game(4, 1);
  // The largest payoff is 2, so M = 4 is the least bound that holds.
  EXPECT_TRUE(UtilityVariant(base, 4).respects_bound());
  EXPECT_FALSE(UtilityVariant(base, 3).respects_bound());
  UtilityVariant v(base, 4);
  v.set_utility(base->types()[0], ActionProfile(4, 0), RationalVector(4, Rational(-3)));
  EXPECT_FALSE(v.respects_bound());
}
