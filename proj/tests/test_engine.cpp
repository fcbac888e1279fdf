#include <gtest/gtest.h>

#include "asyncmed/distribution.hpp"
#include "asyncmed/mediator.hpp"
#include "asyncmed/schedulers.hpp"

using namespace asyncmed;

namespace {

// Player 1 sends `count` messages to player 2 and plays 0; player 2 plays
// the number of messages it has seen once it has seen them all.
struct Sender : AgentBase<Sender> {
  int count;
  explicit Sender(int c) : count(c) {}
  void start(Ctx& ctx) override {
    for (int i = 0; i < count; ++i) ctx.send(2, Payload{1, {i}});
    ctx.act(0);
    ctx.halt();
  }
  void react(Ctx&, const Message*) override {}
};

struct Counter : AgentBase<Counter> {
  int count;
  int seen = 0;
  std::vector<std::int64_t> order;
  explicit Counter(int c) : count(c) {}
  void react(Ctx& ctx, const Message* m) override {
    if (!m) return;
    order.push_back(m->body.data[0]);
    if (++seen == count) {
      ctx.act(order.front());
      ctx.halt();
    }
  }
};

struct Waiter : AgentBase<Waiter> {
  std::optional<Action> w;
  explicit Waiter(std::optional<Action> will) : w(will) {}
  void react(Ctx&, const Message*) override {}
  std::optional<Action> will() const override { return w; }
};

std::shared_ptr<ExtensionGame> two_player_game(InfinitePlay policy) {
  auto g = std::make_shared<UnderlyingGame>(2, std::vector<TypeProfile>{{0, 0}}, std::vector<Rational>{1},
                                            std::vector<std::vector<Action>>{{0, 1, 2}, {0, 1, 2}});
  for (Action a : {0, 1, 2})
    for (Action b : {0, 1, 2}) g->set_utility({0, 0}, {a, b}, {Rational(a), Rational(b)});
  auto ext = std::make_shared<ExtensionGame>();
  ext->game = g;
  ext->has_mediator = false;
  ext->policy = policy;
  ext->defaults = {{{0, 2}}, {{0, 2}}};
  return ext;
}

Profile sender_counter(int count) {
  Profile p;
  p.name = "sender-counter";
  p.players = {StrategySpec{"sender", [count](int, int) { return std::make_unique<Sender>(count); }},
               StrategySpec{"counter", [count](int, int) { return std::make_unique<Counter>(count); }}};
  return p;
}

}  // namespace

TEST(Engine, FifoAndLifoDeliverInOppositeOrders) {
  auto ext = two_player_game(InfinitePlay::DefaultMove);
  auto p = sender_counter(3);
  auto fifo = run(*ext, p, FifoScheduler(), {0, 0}, 1);
  auto lifo = run(*ext, p, LifoScheduler(), {0, 0}, 1);
  EXPECT_EQ(fifo.outcome, (ActionProfile{0, 0}));
  EXPECT_EQ(lifo.outcome, (ActionProfile{0, 2}));
  EXPECT_EQ(fifo.messages, 3u);
  EXPECT_EQ(fifo.deliveries, 3u);
  EXPECT_FALSE(fifo.deadlock);
  EXPECT_EQ(fifo.reason, EndReason::AllHalted);
}

TEST(Engine, DeadlockUsesDefaultsOrWills) {
  Profile p;
  p.name = "waiters";
  p.players = {StrategySpec{"w1", [](int, int) { return std::make_unique<Waiter>(1); }},
               StrategySpec{"w2", [](int, int) { return std::make_unique<Waiter>(std::nullopt); }}};
  auto defaults = run(*two_player_game(InfinitePlay::DefaultMove), p, FifoScheduler(), {0, 0}, 1);
  EXPECT_TRUE(defaults.deadlock);
  EXPECT_EQ(defaults.outcome, (ActionProfile{2, 2}));
  auto wills = run(*two_player_game(InfinitePlay::Wills), p, FifoScheduler(), {0, 0}, 1);
  EXPECT_EQ(wills.outcome, (ActionProfile{1, kBottom}));  // no will: bottom
  EXPECT_TRUE(wills.by_policy[0]);
  EXPECT_TRUE(wills.by_policy[1]);
}

TEST(Engine, SameSeedSameRun) {
  auto fx = parity_fixture(4, 1);
  RandomScheduler s;
  for (std::uint64_t seed = 1; seed < 20; ++seed) {
    auto a = run(*fx.ext, *fx.profile, s, {0, 0, 0, 0}, seed);
    auto b = run(*fx.ext, *fx.profile, s, {0, 0, 0, 0}, seed);
    EXPECT_EQ(export_log(a.log), export_log(b.log));
    EXPECT_EQ(a.outcome, b.outcome);
  }
}

TEST(Engine, ParityRunsFollowTheMediator) {
  auto fx = parity_fixture(5, 1);
  for (const auto& s : standard_menu(5))
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      RunOptions o;
      o.record_local = true;
      auto r = run(*fx.ext, *fx.profile, *s, {0, 0, 0, 0, 0}, seed, o);
      ASSERT_FALSE(r.deadlock) << s->name();
      for (Action a : r.outcome) EXPECT_EQ(a, r.outcome[0]);
      EXPECT_TRUE(r.outcome[0] == 0 || r.outcome[0] == 1);
      // Two mediator messages per player, the final one STOP.
      for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(r.mediator_sent[i], 2);
        EXPECT_TRUE(r.mediator_last_stop[i]);
      }
      EXPECT_NO_THROW(check_information_sets(*fx.ext, *fx.profile, r, {0, 0, 0, 0, 0}));
    }
}

TEST(Engine, WithholdingNeedsARelaxedScheduler) {
  auto ext = two_player_game(InfinitePlay::DefaultMove);
  auto p = sender_counter(2);
  asyncmed::Run r(*ext, p, {0, 0}, nullptr);
  RngCoins coins(1, 2);
  r.set_coins(&coins);
  r.start();
  r.advance_to_choice();
  ASSERT_FALSE(r.pending().empty());
  EXPECT_THROW(r.apply(Choice::withhold(0), false), std::exception);
  EXPECT_NO_THROW(r.apply(Choice::withhold(0), true));
}

TEST(Schedulers, StandardMenuHasTenDistinctNames) {
  auto menu = standard_menu(9);
  ASSERT_EQ(menu.size(), 10u);
  std::set<std::string> names;
  for (const auto& s : menu) names.insert(s->name());
  EXPECT_EQ(names.size(), 10u);
  for (const auto& s : menu) EXPECT_FALSE(s->relaxed());
}

TEST(Distribution, CoinMediatorIsExactlyFair) {
  auto fx = single_player_fixture();
  auto d = exact_distribution(*fx.ext, *fx.profile, FifoScheduler(), {0});
  ASSERT_EQ(d.p.size(), 2u);
  for (const auto& [a, q] : d.p) EXPECT_EQ(q, frac(1, 2));
  EXPECT_EQ(d.total(), 1);
}

TEST(Distribution, ParityExactAndSampledAgree) {
  auto fx = parity_fixture(4, 1);
  TypeProfile x(4, 0);
  auto exact = exact_distribution(*fx.ext, *fx.profile, FifoScheduler(), x);
  EXPECT_EQ(exact.at(ActionProfile(4, 0)), frac(1, 2));
  EXPECT_EQ(exact.at(ActionProfile(4, 1)), frac(1, 2));
  auto sampled = sample_distribution(*fx.ext, *fx.profile, FifoScheduler(), x, 4000, 3);
  EXPECT_LT(dist(exact, sampled), frac(1, 10));
  EXPECT_EQ(sampled.samples, 4000u);
  EXPECT_FALSE(sampled.exact);
  auto u = expected_payoff(*fx.ext->game, 0, exact);
  for (const auto& v : u) EXPECT_EQ(v, frac(3, 2));
}

TEST(Distribution, RunSeedsDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(run_seed(7, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_EQ(run_seed(7, 3), run_seed(7, 3));
}

TEST(Distribution, DistOfFunctionsIsMaxOverInputs) {
  OutcomeDistribution a, b, c;
  a.p[{0}] = 1;
  b.p[{1}] = 1;
  c.p[{0}] = frac(1, 2);
  c.p[{1}] = frac(1, 2);
  EXPECT_EQ(dist(a, b), 2);
  EXPECT_EQ(dist(a, c), 1);
  EXPECT_EQ(dist(OutcomeFn{a, a}, OutcomeFn{a, c}), 1);
  EXPECT_THROW(dist(OutcomeFn{a}, OutcomeFn{a, a}), ContractError);
}
