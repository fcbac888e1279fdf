#include <gtest/gtest.h>

#include "asyncmed/cheaptalk.hpp"
#include "asyncmed/relations.hpp"

using namespace asyncmed;

namespace {

CheapTalkProfile parity_ct(int n, int k, int t, CtOptions o = {}) {
  auto fx = parity_fixture(n, k);
  o.k = k;
  o.t = t;
  return build_cheaptalk_profile(fx.ext, fx.profile, o);
}

void expect_agreement(const RunResult& r, const std::set<int>& T) {
  std::optional<Action> common;
  for (int i = 1; i <= static_cast<int>(r.outcome.size()); ++i) {
    if (T.count(i)) continue;
    EXPECT_TRUE(r.halted[i - 1]) << "player " << i;
    EXPECT_FALSE(r.by_policy[i - 1]);
    if (!common) common = r.outcome[i - 1];
    EXPECT_EQ(r.outcome[i - 1], *common);
  }
  ASSERT_TRUE(common);
  EXPECT_TRUE(*common == 0 || *common == 1);
}

}  // namespace

TEST(CheapTalkParams, RegimeInequalitiesAreEnforced) {
  EXPECT_THROW(parity_ct(4, 0, 1), ParameterError);  // exact needs n > 4k+4t
  EXPECT_NO_THROW(parity_ct(5, 0, 1));
  CtOptions eps;
  eps.regime = CtRegime::Epsilon;
  EXPECT_THROW(parity_ct(4, 0, 1, eps), ParameterError);  // epsilon given by nobody
  eps.epsilon = frac(1, 10);
  EXPECT_NO_THROW(parity_ct(4, 0, 1, eps));  // n > 3k+3t
  EXPECT_THROW(parity_ct(3, 0, 1, eps), ParameterError);
  eps.epsilon = Rational(1);
  EXPECT_THROW(parity_ct(4, 0, 1, eps), ParameterError);
}

TEST(CheapTalkParams, DerivedDegreesAndErrorBudget) {
  auto ct = parity_ct(9, 1, 1);
  EXPECT_EQ(ct.params.d, 2);
  EXPECT_EQ(ct.params.f, 2);
  EXPECT_EQ(ct.params.e, 2);  // min(f, (n - 2d - 1) / 2)
  auto small = parity_ct(5, 0, 1);
  EXPECT_EQ(small.params.e, 1);
}

TEST(CheapTalkParams, StrongPunishmentIsUnsupported) {
  CtOptions o;
  o.strong = true;
  EXPECT_THROW(parity_ct(5, 0, 1, o), Unsupported);
}

TEST(CheapTalkParams, PunishmentPrerequisite) {
  CtOptions o;
  o.regime = CtRegime::Punishment;
  EXPECT_THROW(parity_ct(4, 1, 0, o), ContractError);  // no rho
  o.rho = pure_punishment(1);
  EXPECT_THROW(parity_ct(4, 1, 0, o), ContractError);  // 1 does not punish
  o.rho = pure_punishment(kBottom);
  EXPECT_NO_THROW(parity_ct(4, 1, 0, o));
}

TEST(CheapTalkParams, PrimeMustBePrimeAndLargerThanN) {
  CtOptions o;
  o.prime = 4;
  EXPECT_THROW(parity_ct(5, 0, 1, o), ParameterError);
  o.prime = 5;
  EXPECT_THROW(parity_ct(5, 0, 1, o), ParameterError);
  o.prime = 7;
  EXPECT_NO_THROW(parity_ct(5, 0, 1, o));
}

TEST(CheapTalk, HonestRunsAgreeHaltAndStayInBudget) {
  auto ct = parity_ct(5, 0, 1);
  RunOptions ro{.step_budget = 2000000, .record_log = false};
  for (const auto& s : standard_menu(5))
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto r = run(*ct.ext, *ct.profile, *s, TypeProfile(5, 0), seed, ro);
      expect_agreement(r, {});
      EXPECT_LE(r.messages, ct.budget.limit());
    }
}

TEST(CheapTalk, HonestOutcomeMatchesTheMediator) {
  auto ct = parity_ct(5, 0, 1);
  auto fx = parity_fixture(5, 0);
  auto target = exact_distribution(*fx.ext, *fx.profile, FifoScheduler(), TypeProfile(5, 0));
  auto emp = sample_distribution(*ct.ext, *ct.profile, RandomScheduler(), TypeProfile(5, 0), 2000, 9);
  EXPECT_LT(dist(emp, target), frac(1, 10));
}

TEST(CheapTalk, HonestPlayersSurviveEveryMenuDeviation) {
  auto ct = parity_ct(5, 0, 1);
  RunOptions ro{.step_budget = 2000000, .record_log = false};
  for (const auto& a : adversary_menu_for(ct)) {
    Profile p = apply_adversary(*ct.profile, a);
    std::shared_ptr<const Scheduler> s = a.scheduler ? a.scheduler : std::make_shared<RandomScheduler>();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto r = run(*ct.ext, p, *s, TypeProfile(5, 0), seed, ro);
      EXPECT_TRUE(coterminates(r, a.members())) << a.name;
      if (a.name.rfind("ct-staller", 0) != 0) expect_agreement(r, a.members());
    }
  }
}

TEST(CheapTalk, EquivocationDoesNotMoveTheDistribution) {
  auto ct = parity_ct(9, 1, 1);
  auto fx = parity_fixture(9, 1);
  auto target = exact_distribution(*fx.ext, *fx.profile, FifoScheduler(), TypeProfile(9, 0));
  Adversary a = build_colluding_adversary({}, {2}, {{2, ct_equivocate(ct)}}, nullptr, "equivocate");
  Profile p = apply_adversary(*ct.profile, a);
  OutcomeDistribution emp;
  emp.exact = false;
  std::map<Action, int> counts;
  const int samples = 400;
  for (int i = 0; i < samples; ++i) {
    auto r = run(*ct.ext, p, FifoScheduler(), TypeProfile(9, 0), run_seed(3, i),
                 RunOptions{.step_budget = 2000000, .record_log = false});
    expect_agreement(r, {2});
    ++counts[r.outcome[0]];
  }
  // Both moves show up with roughly equal frequency.
  EXPECT_GT(counts[0], samples / 4);
  EXPECT_GT(counts[1], samples / 4);
}

TEST(CheapTalk, StrategyMapCoversEveryDeviation) {
  auto ct = parity_ct(5, 0, 1);
  EXPECT_EQ(ct.H.at("ct-honest").name, "canonical");
  EXPECT_EQ(ct.H.at(ct_corrupt(ct).name).name, "canonical");
  EXPECT_EQ(ct.H.at(ct_crash(ct, 0).name).name, "silent");
  EXPECT_EQ(ct.H.at(ct_input(ct, 0).name).name, "report-0");
  for (const auto& p : ct.profile->players) EXPECT_TRUE(ct.H.count(p.name));
}

TEST(CheapTalk, MenuNamesAndPunishmentStaller) {
  auto ct = parity_ct(5, 0, 1);
  std::set<std::string> names;
  for (const auto& a : adversary_menu_for(ct)) {
    names.insert(a.name);
    EXPECT_TRUE(a.K.empty());
    EXPECT_EQ(a.T.size(), 1u);
  }
  EXPECT_TRUE(names.count("ct-crash-0@1"));
  EXPECT_TRUE(names.count("ct-equivocate@2"));
  CtOptions o;
  o.regime = CtRegime::Punishment;
  o.rho = pure_punishment(kBottom);
  auto pct = parity_ct(7, 1, 0, o);
  bool staller = false;
  for (const auto& a : adversary_menu_for(pct)) staller = staller || (a.name.rfind("coalition-staller", 0) == 0 && a.K.size() == 2);
  EXPECT_TRUE(staller);
}

TEST(CheapTalk, AhApproachPutsThePunishmentInTheWills) {
  CtOptions o;
  o.regime = CtRegime::Punishment;
  o.approach = CtApproach::AH;
  o.rho = pure_punishment(kBottom);
  auto ct = parity_ct(7, 1, 0, o);
  EXPECT_EQ(ct.ext->policy, InfinitePlay::Wills);
  Adversary crash = build_colluding_adversary({}, {1}, {{1, ct_crash(ct, 0)}}, nullptr, "crash");
  auto r = run(*ct.ext, apply_adversary(*ct.profile, crash), FifoScheduler(), TypeProfile(7, 0), 1,
               RunOptions{.step_budget = 2000000, .record_log = false});
  // One silent player is tolerated: the rest finish without their wills.
  expect_agreement(r, {1});
}

TEST(CheapTalk, FragileOutputDeadlocksOnACrash) {
  CtOptions o;
  o.fragile_output = true;
  auto ct = parity_ct(5, 0, 1, o);
  Adversary crash = build_colluding_adversary({}, {1}, {{1, ct_crash(ct, 0)}}, nullptr, "crash");
  auto r = run(*ct.ext, apply_adversary(*ct.profile, crash), FifoScheduler(), TypeProfile(5, 0), 1,
               RunOptions{.step_budget = 2000000, .record_log = false});
  EXPECT_TRUE(r.deadlock);
  for (int i = 2; i <= 5; ++i) EXPECT_FALSE(r.halted[i - 1]);
}

// One player's row and column of a degree-1 bivariate sharing are
// distributed the same way for every secret.
TEST(Bivariate, SinglePlayerViewIsIndependentOfTheSecret) {
  PrimeField F(5);
  const std::uint64_t player = 2;
  std::map<std::uint64_t, std::map<std::pair<Poly, Poly>, int>> views;
  for (std::uint64_t secret = 0; secret < 5; ++secret) {
    Bivariate B;
    B.d = 1;
    B.c.assign(2, std::vector<std::uint64_t>(2, 0));
    for (int code = 0; code < 5 * 5 * 5; ++code) {
      int rest = code;
      B.c[0][0] = secret;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (a || b) {
            B.c[a][b] = rest % 5;
            rest /= 5;
          }
      ++views[secret][{B.row(F, player), B.col(F, player)}];
    }
  }
  for (std::uint64_t s = 1; s < 5; ++s) EXPECT_EQ(views[s], views[0]);
}

TEST(Bivariate, RowsAndColumnsAreConsistent) {
  PrimeField F(65537);
  std::mt19937_64 rng(3);
  auto B = Bivariate::random(F, 1234, 2, rng);
  for (std::uint64_t i = 1; i <= 5; ++i)
    for (std::uint64_t j = 1; j <= 5; ++j) EXPECT_EQ(evaluate(F, B.row(F, i), j), evaluate(F, B.col(F, j), i));
  EXPECT_EQ(evaluate(F, B.row(F, 0), 0), 1234u);
}

TEST(Budget, LimitAndConstant) {
  MessageBudget b{9, 36, 1, 32};
  EXPECT_EQ(b.limit(), 32u * 9 * 36);
  EXPECT_DOUBLE_EQ(b.constant(648), 2.0);
}
