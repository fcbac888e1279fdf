#include "asyncmed/adversary.hpp"

#include <algorithm>

namespace asyncmed {

std::set<int> Adversary::members() const {
  std::set<int> m = K;
  m.insert(T.begin(), T.end());
  return m;
}

Adversary build_colluding_adversary(std::set<int> K, std::set<int> T, std::map<int, StrategySpec> plans,
                                    std::shared_ptr<const Scheduler> scheduler, std::string name) {
  for (int i : K)
    if (T.count(i)) throw ContractError("player " + std::to_string(i) + " is in both K and T");
  Adversary a{std::move(name), std::move(K), std::move(T), std::move(plans), std::move(scheduler)};
  auto m = a.members();
  for (const auto& [i, s] : a.strategies)
    if (!m.count(i)) throw ContractError("strategy given for non-member " + std::to_string(i));
  return a;
}

Profile apply_adversary(const Profile& honest, const Adversary& a) {
  Profile p = honest;
  p.name = honest.name + "+" + a.name;
  p.board_access.assign(honest.players.size() + 1, 0);
  for (int i : a.members()) {
    if (i < 1 || i > static_cast<int>(honest.players.size())) throw ContractError("coalition member out of range");
    p.board_access[i] = 1;
    auto it = a.strategies.find(i);
    if (it != a.strategies.end()) p.players[i - 1] = it->second;
  }
  return p;
}

int encode_to_environment(int j, int alphabet) {
  if (j < 0 || (alphabet > 0 && j >= alphabet))
    throw ParameterError("symbol " + std::to_string(j) + " outside an alphabet of size " + std::to_string(alphabet));
  return j;
}

void send_with_symbol(Ctx& ctx, int to, Payload real, int j, int alphabet) {
  int burst = encode_to_environment(j, alphabet);
  ctx.send(to, std::move(real));
  for (int s = 0; s < burst; ++s) ctx.send(ctx.self(), Payload{});
}

std::optional<int> decode_symbol(const MessagePattern& pattern, int sender) {
  std::optional<int> found;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const auto& e = pattern[i];
    if (e.kind != 'S' || e.from != sender || e.to == sender) continue;
    int j = 0;
    std::size_t k = i + 1;
    while (k < pattern.size() && pattern[k].kind == 'S' && pattern[k].from == sender && pattern[k].to == sender) {
      ++j;
      ++k;
    }
    found = j;
  }
  return found;
}

int environment_broadcast_event(int j1, int j2, int n) {
  if (j1 < 0 || j1 > n || j2 < 0 || j2 > n) throw ParameterError("participant id outside 0..n");
  return (n + 1) * j1 + j2;
}

std::pair<int, int> decode_broadcast(int count, int n) {
  if (count < 0 || count >= pool_size(n)) throw ParameterError("count outside the pool");
  return {count / (n + 1), count % (n + 1)};
}

Choice PoolScheduler::decide(const SchedView& v, CoinSource&) const {
  int delivered = 0;
  bool idled = false;
  for (const auto& e : *v.pattern) {
    if (e.kind == 'D' && e.from == player_ && e.to == player_) ++delivered;
    if (e.kind == 'I' && e.from == player_) idled = true;
  }
  const auto& p = *v.pending;
  if (!idled) {
    if (delivered < count_) {
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i].from == player_ && p[i].to == player_) return Choice::deliver(i);
      throw ProtocolError("pool of player " + std::to_string(player_) + " is too small for the broadcast");
    }
    return Choice::idle(player_);
  }
  return Choice::deliver(0);
}

namespace {

class PassiveAgent : public AgentBase<PassiveAgent> {
 public:
  void react(Ctx&, const Message*) override {}
};

class PassivePlayer : public AgentBase<PassivePlayer> {
 public:
  void start(Ctx& c) override {
    c.act(0);
    c.halt();
  }
  void react(Ctx&, const Message*) override {}
};

class SymbolSender : public AgentBase<SymbolSender> {
 public:
  SymbolSender(int to, int j, int alphabet) : to_(to), j_(j), alphabet_(alphabet) {}
  void start(Ctx& c) override {
    send_with_symbol(c, to_, Payload{5, {}}, j_, alphabet_);
    c.act(0);
  }
  void react(Ctx&, const Message*) override {}

 private:
  int to_, j_, alphabet_;
};

class PoolReceiver : public AgentBase<PoolReceiver> {
 public:
  void start(Ctx& c) override {
    for (int i = 0; i < pool_size(c.n()); ++i) c.send(c.self(), Payload{});
  }
  void react(Ctx& c, const Message* m) override {
    if (m) {
      if (m->header.from == c.self()) ++count_;
      return;
    }
    auto [j1, j2] = decode_broadcast(count_, c.n());
    c.act(environment_broadcast_event(j1, j2, c.n()));
    for (int i = 0; i < count_; ++i) c.send(c.self(), Payload{});
    count_ = 0;
    c.halt();
  }

 private:
  int count_ = 0;
};

// Canonical player that also reveals its first-round message to the coalition.
class BoardParityMember : public AgentBase<BoardParityMember> {
 public:
  void start(Ctx& c) override { c.send(kMediator, Payload{tag::kInit, {c.type()}}); }
  void react(Ctx& c, const Message* m) override {
    if (!m || m->header.from != kMediator) return;
    if (is_stop(m->body)) {
      c.act(static_cast<Action>(m->body.data.at(0)));
      c.halt();
      return;
    }
    if (m->body.tag == tag::kHint && c.board()) (*c.board())["hint" + std::to_string(c.self())] = m->body.data.at(0);
    c.send(kMediator, Payload{tag::kAck, {}});
  }
};

class EncodedParityMember : public AgentBase<EncodedParityMember> {
 public:
  void start(Ctx& c) override { c.send(kMediator, Payload{tag::kInit, {c.type()}}); }
  void react(Ctx& c, const Message* m) override {
    if (!m || m->header.from != kMediator) return;
    if (is_stop(m->body)) {
      c.act(static_cast<Action>(m->body.data.at(0)));
      c.halt();
      return;
    }
    if (m->body.tag == tag::kHint) send_with_symbol(c, kMediator, Payload{tag::kAck, {}}, static_cast<int>(m->body.data.at(0)), 2);
    else c.send(kMediator, Payload{tag::kAck, {}});
  }
};

// Delivers the coalition's hints first and everything but STOP next; once
// both hints are known it withholds the STOP batch iff b = m_i xor m_j = 0.
class ParityStopScheduler : public Scheduler {
 public:
  ParityStopScheduler(int i, int j, bool encoded) : i_(i), j_(j), encoded_(encoded) {}

  Choice decide(const SchedView& v, CoinSource&) const override {
    const auto& p = *v.pending;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p[k].from == kMediator && p[k].seq == 1 && (p[k].to == i_ || p[k].to == j_)) return Choice::deliver(k);
    for (std::size_t k = 0; k < p.size(); ++k)
      if (!(p[k].from == kMediator && p[k].seq >= 2)) return Choice::deliver(k);
    auto hi = hint(v, i_), hj = hint(v, j_);
    if (hi && hj && ((*hi + *hj) % 2) == 0) return Choice::withhold(0);
    return Choice::deliver(0);
  }
  bool relaxed() const override { return true; }
  bool needs_pattern() const override { return encoded_; }
  std::string name() const override { return encoded_ ? "parity-stop-encoded" : "parity-stop-board"; }

 private:
  std::optional<int> hint(const SchedView& v, int who) const {
    if (encoded_) return decode_symbol(*v.pattern, who);
    auto it = v.board->find("hint" + std::to_string(who));
    if (it == v.board->end()) return std::nullopt;
    return static_cast<int>(it->second);
  }
  int i_, j_;
  bool encoded_;
};

template <class A>
StrategySpec spec(std::string name) {
  return StrategySpec{std::move(name), [](int, int) { return std::make_unique<A>(); }};
}

}  // namespace

std::shared_ptr<const ExtensionGame> covert_game(int n) {
  std::vector<Action> acts(pool_size(n));
  for (int a = 0; a < pool_size(n); ++a) acts[a] = a;
  auto g = std::make_shared<UnderlyingGame>(n, std::vector<TypeProfile>{TypeProfile(n, 0)}, std::vector<Rational>{1},
                                            std::vector<std::vector<Action>>(n, acts));
  for (std::size_t idx = 0; idx < g->action_profile_count(); ++idx)
    g->set_utility(TypeProfile(n, 0), g->action_profile_at(idx), RationalVector(n, Rational(0)));
  auto ext = std::make_shared<ExtensionGame>();
  ext->game = g;
  ext->has_mediator = true;
  ext->policy = InfinitePlay::Wills;
  ext->alphabet_size = 5;
  return ext;
}

StrategySpec symbol_sender(int to, int j, int alphabet) {
  return StrategySpec{"symbol-sender", [=](int, int) { return std::make_unique<SymbolSender>(to, j, alphabet); }};
}
StrategySpec pool_receiver() { return spec<PoolReceiver>("pool-receiver"); }
StrategySpec passive_player() { return spec<PassivePlayer>("passive"); }
StrategySpec passive_mediator() { return spec<PassiveAgent>("passive-mediator"); }

Adversary parity_board_adversary(int i, int j) {
  return build_colluding_adversary({i, j}, {}, {{i, spec<BoardParityMember>("board-member")}, {j, spec<BoardParityMember>("board-member")}},
                                   std::make_shared<ParityStopScheduler>(i, j, false), "parity-board");
}

Adversary parity_encoded_adversary(int i, int j) {
  return build_colluding_adversary({i, j}, {},
                                   {{i, spec<EncodedParityMember>("encoded-member")}, {j, spec<EncodedParityMember>("encoded-member")}},
                                   std::make_shared<ParityStopScheduler>(i, j, true), "parity-encoded");
}

}  // namespace asyncmed
