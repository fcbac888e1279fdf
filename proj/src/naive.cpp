#include "asyncmed/naive.hpp"

#include <string>

namespace asyncmed {

namespace {

constexpr int kPiece = 50;
constexpr int kReveal = 51;

class NaivePlayer : public AgentBase<NaivePlayer> {
 public:
  NaivePlayer(int contributors, bool withhold, std::optional<Action> fixed)
      : contributors_(contributors), withhold_(withhold), fixed_(fixed) {}

  void start(Ctx& c) override {
    self_ = c.self();
    if (!contributor()) return;
    b_ = static_cast<int>(c.coin(2));
    int a = static_cast<int>(c.coin(2));
    for (int i = 1; i <= c.n(); ++i) {
      int piece = (a + b_ * i) % 2;
      if (i == self_) take_piece(piece);
      else c.send(i, Payload{kPiece, {piece}});
    }
  }

  void react(Ctx& c, const Message* m) override {
    if (m && m->header.from >= 1) {
      if (m->body.tag == kPiece) take_piece(static_cast<int>(m->body.data.at(0)));
      if (m->body.tag == kReveal) reveals_.emplace(m->header.from, static_cast<int>(m->body.data.at(0)));
    }
    if (contributor() && !revealed_ && !withhold_) reveal(c);
    finish(c);
  }

  std::optional<Action> will() const override { return kBottom; }

 protected:
  bool contributor() const { return self_ >= 1 && self_ <= contributors_; }

  void take_piece(int v) {
    hint_ ^= v;
    ++pieces_;
  }
  bool hint_known() const { return pieces_ == contributors_; }

  void reveal(Ctx& c) {
    revealed_ = true;
    reveals_.emplace(self_, b_);
    for (int i = 1; i <= c.n(); ++i)
      if (i != self_) c.send(i, Payload{kReveal, {b_}});
  }

  void finish(Ctx& c) {
    if (c.has_acted() || static_cast<int>(reveals_.size()) < contributors_) return;
    int b = 0;
    for (const auto& [j, v] : reveals_) b ^= v;
    c.act(fixed_.value_or(b));
    c.halt();
  }

  int contributors_;
  bool withhold_;
  std::optional<Action> fixed_;
  int self_ = 0;
  int b_ = 0;
  int hint_ = 0;
  int pieces_ = 0;
  bool revealed_ = false;
  std::map<int, int> reveals_;
};

class NaiveStaller : public NaivePlayer {
 public:
  NaiveStaller(int contributors, int partner) : NaivePlayer(contributors, true, std::nullopt), partner_(partner) {}
  std::unique_ptr<Agent> clone() const override { return std::make_unique<NaiveStaller>(*this); }

  void react(Ctx& c, const Message* m) override {
    if (m && m->header.from >= 1) {
      if (m->body.tag == kPiece) take_piece(static_cast<int>(m->body.data.at(0)));
      if (m->body.tag == kReveal) reveals_.emplace(m->header.from, static_cast<int>(m->body.data.at(0)));
    }
    Blackboard* board = c.board();
    if (board && hint_known()) (*board)["hint" + std::to_string(self_)] = hint_;
    if (board && !decided_) {
      auto mine = board->find("hint" + std::to_string(self_));
      auto theirs = board->find("hint" + std::to_string(partner_));
      if (mine != board->end() && theirs != board->end()) {
        decided_ = true;
        int b = static_cast<int>((mine->second + theirs->second) % 2);
        if (b == 0) {
          c.act(kBottom);
          c.halt();
          return;
        }
        if (contributor()) reveal(c);
      }
    }
    if (decided_) finish(c);
  }

 private:
  int partner_;
  bool decided_ = false;
};

StrategySpec naive_spec(int contributors, bool withhold, std::optional<Action> fixed, std::string name) {
  return StrategySpec{std::move(name), [=](int, int) { return std::make_unique<NaivePlayer>(contributors, withhold, fixed); }};
}

}  // namespace

NaiveParity naive_parity_cheaptalk(int n, int k) {
  auto ext = std::make_shared<ExtensionGame>();
  ext->game = build_parity_game(n, k);
  ext->has_mediator = false;
  ext->policy = InfinitePlay::Wills;
  auto p = std::make_shared<Profile>();
  p->name = "naive-parity";
  p->players.assign(n, naive_spec(k + 1, false, std::nullopt, "naive"));
  return {ext, p, n, k};
}

Adversary naive_parity_staller(const NaiveParity& np, int i, int j) {
  if ((i + j) % 2 == 0) throw ParameterError("the staller pair needs i + j odd");
  const int c = np.k + 1;
  auto spec = [c](int partner) {
    return StrategySpec{"naive-staller", [c, partner](int, int) { return std::make_unique<NaiveStaller>(c, partner); }};
  };
  return build_colluding_adversary({i, j}, {}, {{i, spec(j)}, {j, spec(i)}}, nullptr,
                                   "parity-staller@" + std::to_string(i) + "," + std::to_string(j));
}

std::vector<Adversary> naive_menu(const NaiveParity& np) {
  std::vector<Adversary> menu;
  const int c = np.k + 1;
  for (int i = 1; i <= c; ++i) {
    menu.push_back(build_colluding_adversary({i}, {}, {{i, naive_spec(c, true, std::nullopt, "never-reveal")}}, nullptr,
                                             "never-reveal@" + std::to_string(i)));
    for (Action a : {0, 1})
      menu.push_back(build_colluding_adversary({i}, {}, {{i, naive_spec(c, false, a, "always-" + std::to_string(a))}},
                                               nullptr, "always-" + std::to_string(a) + "@" + std::to_string(i)));
  }
  if (np.k >= 2)
    for (int i = 1; i <= c; ++i)
      for (int j = i + 1; j <= np.n; ++j)
        if ((i + j) % 2 == 1) menu.push_back(naive_parity_staller(np, i, j));
  return menu;
}

}  // namespace asyncmed
