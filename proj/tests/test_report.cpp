#include <gtest/gtest.h>

#include "asyncmed/report.hpp"

using namespace asyncmed;

TEST(Report, RationalsAreExactText) {
  EXPECT_EQ(rational_text(frac(31, 20)), "31/20");
  EXPECT_EQ(rational_text(Rational(2)), "2");
  EXPECT_EQ(rational_text(frac(-1, 20)), "-1/20");
}

TEST(Report, RenderSortsKeysAndEndsWithNewline) {
  Json a{{"b", 1}, {"a", 2}};
  Json b{{"a", 2}, {"b", 1}};
  EXPECT_EQ(render(a), render(b));
  EXPECT_EQ(render(a).back(), '\n');
  EXPECT_LT(render(a).find("\"a\""), render(a).find("\"b\""));
}

TEST(Report, VerdictCarriesItsWitness) {
  Verdict v;
  v.holds = false;
  Witness w;
  w.K = {1, 2};
  w.deviation = "x";
  w.player = 1;
  w.lhs = frac(31, 20);
  w.rhs = frac(3, 2);
  w.gap = frac(1, 20);
  v.witness = w;
  auto j = to_json(v);
  EXPECT_FALSE(j["holds"].get<bool>());
  EXPECT_EQ(j["witness"]["gap"], "1/20");
  EXPECT_EQ(j["witness"]["K"], Json::array({1, 2}));
  EXPECT_NE(summary(j).find("holds"), std::string::npos);
}

TEST(Report, CheapTalkProfileSerializesDigestAndStrategyMap) {
  auto fx = parity_fixture(5, 0);
  CtOptions o;
  o.t = 1;
  auto ct = build_cheaptalk_profile(fx.ext, fx.profile, o);
  auto j = to_json(ct);
  EXPECT_EQ(j["digest"], ct.digest);
  EXPECT_EQ(j["H"]["ct-honest"], "canonical");
  EXPECT_EQ(render(j), render(to_json(build_cheaptalk_profile(fx.ext, fx.profile, o))));
}
