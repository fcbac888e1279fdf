#include <gtest/gtest.h>

#include <cmath>

#include "asyncmed/fixtures.hpp"
#include "asyncmed/relations.hpp"

using namespace asyncmed;

namespace {

OutcomeDistribution point(Action a, Action b) {
  OutcomeDistribution d;
  d.p[{a, b}] = 1;
  return d;
}

GameSide side(const MediatorFixture& f) { return GameSide{f.ext, f.profile}; }

}  // namespace

TEST(Mask, HidesOnlyTheListedPlayers) {
  OutcomeDistribution d;
  d.p[{0, 1}] = frac(1, 2);
  d.p[{1, 1}] = frac(1, 2);
  auto m = mask(OutcomeFn{d}, {1});
  ASSERT_EQ(m[0].p.size(), 1u);
  EXPECT_EQ(m[0].p.begin()->first, (ActionProfile{kHidden, 1}));
  EXPECT_EQ(m[0].p.begin()->second, 1);
}

TEST(Implementation, VectorFormFullAndWeak) {
  OutcomeFn a{point(0, 0)}, b{point(1, 1)};
  EXPECT_TRUE(check_implementation({a}, {a, b}, 0, ImplementationMode::Weak).holds);
  EXPECT_FALSE(check_implementation({a}, {a, b}, 0, ImplementationMode::Full).holds);
  EXPECT_TRUE(check_implementation({a, b}, {b, a}, 0, ImplementationMode::Full).holds);
  // Within tolerance.
  OutcomeDistribution near;
  near.p[{0, 0}] = frac(19, 20);
  near.p[{1, 1}] = frac(1, 20);
  EXPECT_FALSE(check_implementation({OutcomeFn{near}}, {a}, 0, ImplementationMode::Weak).holds);
  EXPECT_TRUE(check_implementation({OutcomeFn{near}}, {a}, frac(1, 10), ImplementationMode::Weak).holds);
}

TEST(Implementation, FixturesOnTheRaceGame) {
  auto race = race_fixture(), constant = constant_fixture(), coin = coin_fixture();
  // The constant mediator yields one of the race's two functions.
  EXPECT_TRUE(check_implementation(side(constant), side(race), 0, ImplementationMode::Weak).holds);
  EXPECT_FALSE(check_implementation(side(constant), side(race), 0, ImplementationMode::Full).holds);
  EXPECT_FALSE(check_implementation(side(coin), side(race), 0, ImplementationMode::Weak).holds);
  EXPECT_TRUE(check_implementation(side(coin), side(coin), 0, ImplementationMode::Full).holds);
}

TEST(Bisimulation, ReflexiveAndSeparatesDifferentMediators) {
  AdversarySide race{side(race_fixture()), {}, {}, true, {}};
  AdversarySide coin{side(coin_fixture()), {}, {}, true, {}};
  EXPECT_TRUE(check_bisimulation(race, race, 0, 0).holds);
  EXPECT_FALSE(check_bisimulation(race, coin, 0, 0).holds);
  // Distance from a fair coin to either point mass is 1.
  EXPECT_TRUE(check_bisimulation(race, coin, 0, 1).holds);
}

TEST(Emulation, MissingStrategyNameIsAContractError) {
  EmulationQuery q;
  q.cheap = AdversarySide{side(constant_fixture()), {}, {}, true, {}};
  q.mediated = side(race_fixture());
  EXPECT_THROW(check_emulation(q), ContractError);
}

TEST(Cotermination, FailureFixtureIsCaught) {
  auto fx = cotermination_failure_fixture();
  CoterminationQuery q;
  q.game = side(fx);
  q.schedulers = {std::make_shared<FifoScheduler>()};
  q.runs_per_cell = 10;
  auto v = check_cotermination(q);
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.violations, 10u);
  EXPECT_FALSE(v.witness.empty());
}

TEST(Cotermination, ParityMediatorCoterminates) {
  auto fx = parity_fixture(4, 1);
  CoterminationQuery q;
  q.game = side(fx);
  q.schedulers = standard_menu(4);
  q.runs_per_cell = 50;
  auto v = check_cotermination(q);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.runs, 500u);
}

TEST(Cotermination, PredicateIgnoresDeviators) {
  RunResult r;
  r.halted = {1, 0, 1};
  EXPECT_FALSE(coterminates(r, {}));
  EXPECT_TRUE(coterminates(r, {2}));
  r.halted = {0, 0, 0};
  EXPECT_TRUE(coterminates(r, {}));
}

TEST(ClopperPearson, ClosedFormsAtTheEdges) {
  // Zero successes: the upper bound solves (1-p)^n = 0.05.
  for (std::uint64_t n : {10u, 1000u, 15000u})
    EXPECT_NEAR(clopper_pearson_upper(0, n), 1 - std::pow(0.05, 1.0 / static_cast<double>(n)), 1e-9);
  // All successes: the lower bound solves p^n = 0.05.
  EXPECT_NEAR(clopper_pearson_lower(20, 20), std::pow(0.05, 1.0 / 20), 1e-9);
  EXPECT_EQ(clopper_pearson_upper(20, 20), 1.0);
  double u = clopper_pearson_upper(5, 100);
  EXPECT_GT(u, 0.05);
  EXPECT_LT(u, 0.12);
}
