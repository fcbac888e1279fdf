#include <gtest/gtest.h>

#include "asyncmed/concepts.hpp"
#include "asyncmed/fixtures.hpp"
#include "asyncmed/naive.hpp"

using namespace asyncmed;

namespace {

std::vector<std::shared_ptr<const Scheduler>> fifo() { return {std::make_shared<FifoScheduler>()}; }

RobustnessQuery parity_query(int n, int k, int t) {
  auto fx = parity_fixture(n, k);
  RobustnessQuery q;
  q.ext = fx.ext;
  q.profile = fx.profile;
  q.k = k;
  q.t = t;
  q.schedulers = fifo();
  return q;
}

}  // namespace

TEST(Punishment, BottomPunishesParityAtTwo) {
  auto fx = parity_fixture(7, 2);
  auto r = check_punishment(*fx.ext->game, *fx.ext, pure_punishment(kBottom), *fx.profile, 2, fifo());
  EXPECT_TRUE(r.verdict.holds);
  EXPECT_EQ(r.min_lhs, frac(3, 2));
  EXPECT_EQ(r.max_rhs, frac(11, 10));
}

TEST(Punishment, PlayingOneIsNotAPunishment) {
  // A lone deviator who joins the others on 1 gets 2 > 3/2.
  auto fx = parity_fixture(4, 1);
  auto r = check_punishment(*fx.ext->game, *fx.ext, pure_punishment(1), *fx.profile, 1, fifo());
  EXPECT_FALSE(r.verdict.holds);
  ASSERT_TRUE(r.verdict.witness);
  EXPECT_EQ(r.verdict.witness->rhs, 2);
}

TEST(Resilience, ParityMediatorResistsReactiveDeviations) {
  auto q = parity_query(4, 1, 0);
  q.schedulers = {std::make_shared<FifoScheduler>(), std::make_shared<LifoScheduler>()};
  for (int i = 1; i <= 4; ++i) q.deviations.push_back(reactive_deviations(*q.ext, i, ReactiveMenuOptions{}));
  auto v = check_k_resilience(q);
  EXPECT_TRUE(v.holds) << (v.witness ? v.witness->deviation : "");
  EXPECT_GT(v.caps.deviations, 0u);
}

TEST(Resilience, ReactiveMenuRespectsCap) {
  auto fx = parity_fixture(4, 1);
  ReactiveMenuOptions o;
  o.cap = 5;
  std::size_t total = 0;
  auto menu = reactive_deviations(*fx.ext, 1, o, &total);
  EXPECT_LE(menu.size(), 5u);
  EXPECT_GT(total, 5u);
}

TEST(Resilience, NaiveCheapTalkStallerGainsAndReplays) {
  auto np = naive_parity_cheaptalk(7, 2);
  RobustnessQuery q;
  q.ext = np.ext;
  q.profile = np.profile;
  q.k = 2;
  q.adversaries = naive_menu(np);
  q.schedulers = fifo();
  auto v = check_k_resilience(q);
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->K.size(), 2u);
  EXPECT_EQ(v.witness->gap, frac(1, 20));
  EXPECT_EQ(replay_gap(q, *v.witness), frac(1, 20));
}

TEST(Resilience, NaiveCheapTalkHonestPayoff) {
  auto np = naive_parity_cheaptalk(4, 1);
  auto u = expected_utility(*np.ext, *np.profile, FifoScheduler(), {});
  for (const auto& v : u) EXPECT_EQ(v, frac(3, 2));
}

TEST(Immunity, ContraryMoveHurtsTheOthers) {
  // One player who plays against the mediator's instruction leaves a mixed
  // profile, worth 0 to everyone.
  auto q = parity_query(4, 1, 1);
  for (int i = 1; i <= 4; ++i) {
    ReactiveMenuOptions o;
    o.vary_report = false;
    q.deviations.push_back(reactive_deviations(*q.ext, i, o));
  }
  auto v = check_t_immunity(q);
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_LT(v.witness->lhs, v.witness->rhs);
}

TEST(SchedulerProof, ParityPayoffsDoNotDependOnTheScheduler) {
  auto q = parity_query(3, 0, 0);
  q.schedulers = standard_menu(3);
  q.eval.mode = Evaluation::Mode::MonteCarlo;
  q.eval.samples = 200;
  EXPECT_TRUE(check_scheduler_proof(q).holds);
}

TEST(SchedulerProof, OrderToyDependsOnTheScheduler) {
  auto fx = order_toy_fixture();
  RobustnessQuery q;
  q.ext = fx.ext;
  q.profile = fx.profile;
  q.schedulers = {std::make_shared<FifoScheduler>(), std::make_shared<LifoScheduler>()};
  EXPECT_FALSE(check_scheduler_proof(q).holds);
}

TEST(Subsets, CountsMatchBinomials) {
  EXPECT_EQ(subsets_up_to(5, 2).size(), 5u + 10u);
  EXPECT_EQ(subsets_up_to(5, 2, 0).size(), 1u + 5u + 10u);
  EXPECT_EQ(subsets_up_to(4, 4).size(), 15u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
