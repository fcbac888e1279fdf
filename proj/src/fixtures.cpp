#include "asyncmed/fixtures.hpp"

namespace asyncmed {

namespace {

class ConstantMediator : public AgentBase<ConstantMediator> {
 public:
  void react(Ctx& c, const Message*) override {
    if (done_) return;
    done_ = true;
    for (int i = 1; i <= c.n(); ++i) c.send(i, stop_payload(0));
  }

 private:
  bool done_ = false;
};

class CoinMediator : public AgentBase<CoinMediator> {
 public:
  void react(Ctx& c, const Message*) override {
    if (done_) return;
    done_ = true;
    Action a = static_cast<Action>(c.coin(2));
    for (int i = 1; i <= c.n(); ++i) c.send(i, stop_payload(a));
  }

 private:
  bool done_ = false;
};

class TwoMessages : public AgentBase<TwoMessages> {
 public:
  void start(Ctx& c) override {
    c.send(2, Payload{1, {}});
    c.send(2, Payload{2, {}});
    c.act(0);
    c.halt();
  }
  void react(Ctx&, const Message*) override {}
};

class OrderReader : public AgentBase<OrderReader> {
 public:
  void react(Ctx& c, const Message* m) override {
    if (!m) return;
    if (first_ == 0) {
      first_ = m->body.tag;
      return;
    }
    c.act(first_ == 1 ? 1 : 0);
    c.halt();
  }

 private:
  int first_ = 0;
};

class QuitAtOnce : public AgentBase<QuitAtOnce> {
 public:
  void start(Ctx& c) override {
    c.act(0);
    c.halt();
  }
  void react(Ctx&, const Message*) override {}
};

class WaitForever : public AgentBase<WaitForever> {
 public:
  void react(Ctx& c, const Message* m) override {
    if (!m) return;
    c.act(0);
    c.halt();
  }
};

template <class A>
StrategySpec spec(std::string name) {
  return StrategySpec{std::move(name), [](int, int) { return std::make_unique<A>(); }};
}

std::shared_ptr<Profile> with_mediator(const std::string& name, StrategySpec m) {
  auto p = std::make_shared<Profile>();
  p->name = name;
  p->mediator = std::move(m);
  p->players.assign(2, canonical_player());
  p->canonical = true;
  p->r = 1;
  return p;
}

std::shared_ptr<const ExtensionGame> without_mediator(const ExtensionGame& base) {
  auto ext = std::make_shared<ExtensionGame>(base);
  ext->has_mediator = false;
  return ext;
}

}  // namespace

MediatorFixture constant_fixture() {
  return {race_fixture().ext, with_mediator("constant", spec<ConstantMediator>("constant-mediator"))};
}

MediatorFixture coin_fixture() { return {race_fixture().ext, with_mediator("coin", spec<CoinMediator>("coin-mediator"))}; }

MediatorFixture order_toy_fixture() {
  auto p = std::make_shared<Profile>();
  p->name = "order-toy";
  p->players = {spec<TwoMessages>("two-messages"), spec<OrderReader>("order-reader")};
  return {without_mediator(*race_fixture().ext), p};
}

MediatorFixture cotermination_failure_fixture() {
  auto p = std::make_shared<Profile>();
  p->name = "cotermination-failure";
  p->players = {spec<QuitAtOnce>("quit"), spec<WaitForever>("wait")};
  return {without_mediator(*race_fixture().ext), p};
}

}  // namespace asyncmed
