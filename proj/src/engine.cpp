#include "asyncmed/engine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace asyncmed {

Payload stop_payload(Action a) { return Payload{kStopTag, {a}}; }

namespace {

const char* kind_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::Start: return "start";
    case Event::Kind::Schedule: return "sched";
    case Event::Kind::Send: return "send";
    case Event::Kind::Deliver: return "deliver";
    case Event::Kind::Act: return "act";
    case Event::Kind::Halt: return "halt";
    case Event::Kind::Coin: return "coin";
    case Event::Kind::Withhold: return "withhold";
    case Event::Kind::Policy: return "policy";
  }
  return "?";
}

}  // namespace

std::string format_event(const Event& e) {
  std::ostringstream out;
  out << e.step << ' ' << kind_name(e.kind) << ' ' << e.a << ' ' << e.b << ' ' << e.c << ' ' << e.v;
  return out.str();
}

std::string export_log(const std::vector<Event>& log) {
  std::string out;
  for (const auto& e : log) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

std::string to_string(EndReason r) {
  switch (r) {
    case EndReason::Running: return "running";
    case EndReason::AllHalted: return "all-halted";
    case EndReason::Quiescent: return "quiescent";
    case EndReason::Withheld: return "withheld";
    case EndReason::Budget: return "budget";
  }
  return "?";
}

RngCoins::RngCoins(std::uint64_t seed, int n) {
  streams_.reserve(n + 2);
  for (int who = -1; who <= n; ++who) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(who + 1), 0x5eedu};
    streams_.emplace_back(seq);
  }
}

std::uint64_t RngCoins::draw(int who, std::uint64_t arity) {
  if (arity == 0) throw ContractError("coin with arity 0");
  if (arity == 1) return 0;
  auto& g = streams_.at(static_cast<std::size_t>(who + 1));
  std::uniform_int_distribution<std::uint64_t> d(0, arity - 1);
  return d(g);
}

std::uint64_t TapeCoins::draw(int, std::uint64_t arity) {
  if (arity == 0) throw ContractError("coin with arity 0");
  if (pos_ < tape_.size()) {
    if (tape_[pos_].arity != arity) throw ContractError("coin arity changed between enumerated runs");
    return tape_[pos_++].value;
  }
  tape_.push_back({arity, 0});
  ++pos_;
  return 0;
}

Rational TapeCoins::probability() const {
  mpz_class den = 1;
  for (std::size_t i = 0; i < pos_; ++i) den *= static_cast<unsigned long>(tape_[i].arity);
  Rational p(1, den);
  p.canonicalize();
  return p;
}

bool TapeCoins::advance() {
  tape_.resize(pos_);
  while (!tape_.empty()) {
    auto& last = tape_.back();
    if (last.value + 1 < last.arity) {
      ++last.value;
      pos_ = 0;
      return true;
    }
    tape_.pop_back();
  }
  pos_ = 0;
  return false;
}

Action ExtensionGame::default_move(int player, int type) const {
  if (defaults.empty()) return kBottom;
  const auto& m = defaults.at(player - 1);
  auto it = m.find(type);
  if (it == m.end())
    throw ContractError("no default move for player " + std::to_string(player) + " type " + std::to_string(type));
  return it->second;
}

class Run::RunCtx : public Ctx {
 public:
  RunCtx(Run& run, int self) : run_(run), self_(self) {}
  int self() const override { return self_; }
  int n() const override { return run_.n_; }
  int type() const override { return self_ == kMediator ? 0 : run_.x_[self_ - 1]; }
  bool has_acted() const override { return self_ > 0 && run_.acted_[self_ - 1]; }

  void send(int to, Payload body) override {
    if (to < 0 || to > run_.n_ || (to == kMediator && !run_.ext_->has_mediator))
      throw ProtocolError("participant " + std::to_string(self_) + " sent to unknown participant " +
                          std::to_string(to));
    int& seq = run_.seq_[static_cast<std::size_t>(self_) * (run_.n_ + 1) + to];
    ++seq;
    MessageHeader h{run_.next_id_++, self_, to, seq, run_.step_};
    if (self_ == kMediator && to > 0) {
      ++run_.mediator_sent_[to - 1];
      run_.mediator_last_stop_[to - 1] = is_stop(body);
    }
    if (run_.opt_.record_log) run_.log(Event::Kind::Send, self_, to, seq, body.tag);
    if (run_.opt_.record_pattern) run_.pattern_.push_back({'S', self_, to, seq});
    if (run_.current_) run_.current_->sends.emplace_back(to, body);
    run_.pending_.push_back(h);
    run_.bodies_.push_back(std::move(body));
    ++run_.messages_;
    run_.progress_ = true;
  }

  void act(Action a) override {
    if (self_ == kMediator) throw ProtocolError("the mediator has no move in the underlying game");
    if (run_.acted_[self_ - 1]) return;
    run_.acted_[self_ - 1] = 1;
    run_.moves_[self_ - 1] = a;
    if (run_.opt_.record_log) run_.log(Event::Kind::Act, self_, 0, 0, a);
    if (run_.current_) run_.current_->act = a;
    run_.progress_ = true;
  }

  void halt() override {
    if (!run_.live_[self_]) return;
    run_.live_[self_] = 0;
    if (run_.opt_.record_log) run_.log(Event::Kind::Halt, self_);
    if (run_.current_) run_.current_->halted = true;
    run_.progress_ = true;
  }

  std::uint64_t coin(std::uint64_t arity) override {
    std::uint64_t v = run_.coins_->draw(self_, arity);
    if (run_.opt_.record_log) run_.log(Event::Kind::Coin, self_, static_cast<int>(arity), 0, static_cast<std::int64_t>(v));
    if (run_.current_) run_.current_->coins.push_back(v);
    return v;
  }

  Blackboard* board() override {
    return run_.profile_->has_board_access(self_) ? &run_.board_ : nullptr;
  }

 private:
  Run& run_;
  int self_;
};

Run::Run(const ExtensionGame& ext, const Profile& profile, TypeProfile x, CoinSource* coins, RunOptions opt)
    : ext_(&ext), profile_(&profile), x_(std::move(x)), coins_(coins), opt_(opt), n_(ext.n()) {
  if (static_cast<int>(profile.players.size()) != n_) throw ContractError("profile needs one strategy per player");
  if (static_cast<int>(x_.size()) != n_) throw ContractError("type profile length differs from n");
  if (ext.has_mediator && !profile.mediator) throw ContractError("mediator game needs a mediator strategy");
  agents_.resize(n_ + 1);
  live_.assign(n_ + 1, 0);
  if (ext.has_mediator) {
    agents_[0] = profile.mediator->make(kMediator, 0);
    live_[0] = 1;
  }
  for (int i = 1; i <= n_; ++i) {
    agents_[i] = profile.players[i - 1].make(i, x_[i - 1]);
    live_[i] = 1;
  }
  acted_.assign(n_, 0);
  moves_.assign(n_, kBottom);
  got_stop_.assign(n_, 0);
  seq_.assign(static_cast<std::size_t>(n_ + 1) * (n_ + 1), 0);
  mediator_sent_.assign(n_, 0);
  mediator_last_stop_.assign(n_, 0);
  if (opt_.record_local) local_.resize(n_ + 1);
}

Run::Run(const Run& o)
    : ext_(o.ext_), profile_(o.profile_), x_(o.x_), coins_(o.coins_), opt_(o.opt_), n_(o.n_), live_(o.live_),
      acted_(o.acted_), moves_(o.moves_), got_stop_(o.got_stop_), pending_(o.pending_), bodies_(o.bodies_),
      withheld_(o.withheld_), withheld_bodies_(o.withheld_bodies_),
      delivered_mediator_batches_(o.delivered_mediator_batches_), seq_(o.seq_), next_id_(o.next_id_),
      step_(o.step_), progress_(o.progress_), reason_(o.reason_), log_(o.log_), pattern_(o.pattern_),
      messages_(o.messages_), deliveries_(o.deliveries_), mediator_sent_(o.mediator_sent_),
      mediator_last_stop_(o.mediator_last_stop_), local_(o.local_), board_(o.board_) {
  agents_.resize(o.agents_.size());
  for (std::size_t i = 0; i < o.agents_.size(); ++i)
    if (o.agents_[i]) agents_[i] = o.agents_[i]->clone();
}

void Run::log(Event::Kind k, int a, int b, int c, std::int64_t v) { log_.push_back({k, step_, a, b, c, v}); }

void Run::react(int who, const Message* m, char kind) {
  if (opt_.record_local) {
    LocalStep ls;
    ls.kind = kind;
    if (m) ls.delivered = *m;
    local_[who].push_back(std::move(ls));
    current_ = &local_[who].back();
  }
  RunCtx ctx(*this, who);
  if (kind == 'T') agents_[who]->start(ctx);
  else agents_[who]->react(ctx, m);
  current_ = nullptr;
}

void Run::start() {
  for (int who = 0; who <= n_; ++who) {
    if (!agents_[who]) continue;
    ++step_;
    if (opt_.record_log) log(Event::Kind::Start, who);
    if (opt_.record_pattern) pattern_.push_back({'T', who, who, 0});
    react(who, nullptr, 'T');
  }
  check_end();
}

bool Run::all_players_halted() const {
  for (int i = 1; i <= n_; ++i)
    if (live_[i]) return false;
  return true;
}

bool Run::any_stop_received() const {
  return std::any_of(got_stop_.begin(), got_stop_.end(), [](char c) { return c != 0; });
}

void Run::check_end() {
  if (reason_ != EndReason::Running) return;
  if (all_players_halted()) reason_ = EndReason::AllHalted;
  else if (step_ >= opt_.step_budget) reason_ = EndReason::Budget;
}

void Run::deliver_at(std::size_t idx) {
  Message m{pending_[idx], std::move(bodies_[idx])};
  pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(idx));
  bodies_.erase(bodies_.begin() + static_cast<std::ptrdiff_t>(idx));
  ++step_;
  ++deliveries_;
  const auto& h = m.header;
  if (opt_.record_log) log(Event::Kind::Deliver, h.from, h.to, h.seq, m.body.tag);
  if (opt_.record_pattern) pattern_.push_back({'D', h.from, h.to, h.seq});
  if (h.from == kMediator) ++delivered_mediator_batches_[h.batch];
  if (h.from == kMediator && h.to > 0 && is_stop(m.body)) got_stop_[h.to - 1] = 1;
  if (live_[h.to]) react(h.to, &m, 'D');
  check_end();
}

void Run::apply(const Choice& c, bool relaxed) {
  if (finished()) return;
  switch (c.kind) {
    case Choice::Kind::Deliver:
      if (c.index >= pending_.size()) throw ContractError("scheduler chose a message that is not pending");
      deliver_at(c.index);
      return;
    case Choice::Kind::Idle:
      if (c.who < 0 || c.who > n_ || !agents_[c.who]) throw ContractError("scheduler chose an unknown participant");
      ++step_;
      if (opt_.record_log) log(Event::Kind::Schedule, c.who);
      if (opt_.record_pattern) pattern_.push_back({'I', c.who, c.who, 0});
      if (live_[c.who]) react(c.who, nullptr, 'I');
      check_end();
      return;
    case Choice::Kind::Withhold:
    case Choice::Kind::WithholdAll: {
      if (!relaxed) throw FairnessViolation("a non-relaxed scheduler withheld a pending message");
      std::size_t lo = c.kind == Choice::Kind::Withhold ? c.index : 0;
      std::size_t hi = c.kind == Choice::Kind::Withhold ? c.index + 1 : pending_.size();
      if (hi > pending_.size()) throw ContractError("scheduler withheld a message that is not pending");
      for (std::size_t i = lo; i < hi; ++i) {
        if (opt_.record_log) log(Event::Kind::Withhold, pending_[i].from, pending_[i].to, pending_[i].seq);
        withheld_.push_back(pending_[i]);
        withheld_bodies_.push_back(std::move(bodies_[i]));
      }
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(lo), pending_.begin() + static_cast<std::ptrdiff_t>(hi));
      bodies_.erase(bodies_.begin() + static_cast<std::ptrdiff_t>(lo), bodies_.begin() + static_cast<std::ptrdiff_t>(hi));
      return;
    }
  }
}

void Run::settle() {
  if (finished()) return;
  // All-or-none for mediator batches: once part of a batch is delivered the
  // rest must follow.
  std::vector<std::uint64_t> forced;
  for (std::size_t i = 0; i < withheld_.size();) {
    const auto& h = withheld_[i];
    if (h.from == kMediator && delivered_mediator_batches_.count(h.batch)) {
      forced.push_back(h.id);
      pending_.push_back(h);
      bodies_.push_back(std::move(withheld_bodies_[i]));
      withheld_.erase(withheld_.begin() + static_cast<std::ptrdiff_t>(i));
      withheld_bodies_.erase(withheld_bodies_.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (!forced.empty()) {
    for (auto id : forced) {
      if (finished()) return;
      auto it = std::find_if(pending_.begin(), pending_.end(), [id](const MessageHeader& h) { return h.id == id; });
      if (it != pending_.end()) deliver_at(static_cast<std::size_t>(it - pending_.begin()));
    }
    return;
  }
  progress_ = false;
  for (int who = 0; who <= n_ && !finished(); ++who) {
    if (!agents_[who] || !live_[who]) continue;
    apply(Choice::idle(who), false);
  }
  if (finished()) return;
  if (!progress_ && pending_.empty()) reason_ = withheld_.empty() ? EndReason::Quiescent : EndReason::Withheld;
}

void Run::advance_to_choice() {
  while (!finished() && pending_.empty()) settle();
}

SchedView Run::view(bool with_pattern) const {
  SchedView v;
  v.pattern = with_pattern ? &pattern_ : nullptr;
  v.pending = &pending_;
  v.live = &live_;
  v.board = &board_;
  v.step = step_;
  v.n = n_;
  v.has_mediator = ext_->has_mediator;
  return v;
}

void Run::drive(const Scheduler& s) {
  bool want_pattern = s.needs_pattern();
  if (want_pattern && !opt_.record_pattern && !pattern_.empty())
    throw ContractError("scheduler needs the message pattern but it was not recorded");
  if (want_pattern) opt_.record_pattern = true;
  while (!finished()) {
    if (pending_.empty()) {
      settle();
      continue;
    }
    Choice c = s.decide(view(want_pattern), *coins_);
    apply(c, s.relaxed());
  }
}

RunResult Run::finish() {
  RunResult r;
  r.reason = reason_;
  r.outcome = moves_;
  r.acted = acted_;
  r.got_stop = got_stop_;
  r.halted.assign(n_, 0);
  r.by_policy.assign(n_, 0);
  bool unresolved = false;
  for (int i = 1; i <= n_; ++i) {
    r.halted[i - 1] = !live_[i];
    if (acted_[i - 1]) continue;
    unresolved = true;
    Action a = kBottom;
    if (ext_->policy == InfinitePlay::DefaultMove) {
      a = ext_->default_move(i, x_[i - 1]);
    } else if (auto w = agents_[i]->will()) {
      a = *w;
    }
    r.outcome[i - 1] = a;
    r.by_policy[i - 1] = 1;
    if (opt_.record_log) log(Event::Kind::Policy, i, 0, 0, a);
  }
  r.deadlock = unresolved && reason_ != EndReason::AllHalted;
  r.log = std::move(log_);
  r.pattern = std::move(pattern_);
  r.messages = messages_;
  r.deliveries = deliveries_;
  r.steps = step_;
  r.undelivered = pending_.size() + withheld_.size();
  r.mediator_sent = mediator_sent_;
  r.mediator_last_stop = mediator_last_stop_;
  r.local = std::move(local_);
  r.board = board_;
  return r;
}

RunResult run_with_coins(const ExtensionGame& ext, const Profile& profile, const Scheduler& scheduler,
                         const TypeProfile& x, CoinSource& coins, RunOptions opt) {
  if (scheduler.needs_pattern()) opt.record_pattern = true;
  Run r(ext, profile, x, &coins, opt);
  r.start();
  r.drive(scheduler);
  return r.finish();
}

RunResult run(const ExtensionGame& ext, const Profile& profile, const Scheduler& scheduler, const TypeProfile& x,
              std::uint64_t seed, RunOptions opt) {
  RngCoins coins(seed, ext.n());
  return run_with_coins(ext, profile, scheduler, x, coins, opt);
}

namespace {

class ReplayCtx : public Ctx {
 public:
  ReplayCtx(int self, int n, int type, const LocalStep& rec) : self_(self), n_(n), type_(type), rec_(rec) {}
  int self() const override { return self_; }
  int n() const override { return n_; }
  int type() const override { return type_; }
  bool has_acted() const override { return acted_before; }
  void send(int to, Payload body) override { out.sends.emplace_back(to, std::move(body)); }
  void act(Action a) override {
    if (!acted_before && !out.act) out.act = a;
  }
  void halt() override { out.halted = true; }
  std::uint64_t coin(std::uint64_t) override {
    if (next_coin_ >= rec_.coins.size()) throw InformationSetViolation("replay drew more coins than recorded");
    std::uint64_t v = rec_.coins[next_coin_++];
    out.coins.push_back(v);
    return v;
  }
  Blackboard* board() override { return nullptr; }

  LocalStep out;
  bool acted_before = false;

 private:
  int self_, n_, type_;
  const LocalStep& rec_;
  std::size_t next_coin_ = 0;
};

}  // namespace

void check_information_sets(const ExtensionGame& ext, const Profile& profile, const RunResult& r,
                            const TypeProfile& x) {
  if (r.local.empty()) throw ContractError("run was not recorded with local histories");
  for (int who = 0; who <= ext.n(); ++who) {
    if (who == kMediator && !ext.has_mediator) continue;
    if (profile.has_board_access(who)) continue;
    int type = who == kMediator ? 0 : x[who - 1];
    auto agent = who == kMediator ? profile.mediator->make(who, 0) : profile.players[who - 1].make(who, type);
    bool acted = false;
    for (std::size_t s = 0; s < r.local[who].size(); ++s) {
      const auto& rec = r.local[who][s];
      ReplayCtx ctx(who, ext.n(), type, rec);
      ctx.acted_before = acted;
      if (rec.kind == 'T') agent->start(ctx);
      else agent->react(ctx, rec.delivered ? &*rec.delivered : nullptr);
      bool same = ctx.out.sends == rec.sends && ctx.out.act == rec.act && ctx.out.halted == rec.halted &&
                  ctx.out.coins == rec.coins;
      if (!same)
        throw InformationSetViolation("participant " + std::to_string(who) + " reacted differently at local step " +
                                      std::to_string(s) + " with an identical local history");
      if (rec.act) acted = true;
    }
  }
}

DeadlockVerdict detect_deadlock(const Run& state, const Profile& profile, const Scheduler& s) {
  if (!profile.canonical) throw Unsupported("deadlock detection needs a canonical-form mediator profile");
  DeadlockVerdict v;
  v.stop_received = state.any_stop_received();
  std::set<std::uint64_t> ids;
  for (const auto& h : state.pending()) ids.insert(h.id);
  v.pending = ids.size();
  Run copy(state);
  RngCoins coins(0, state.n());
  copy.set_coins(&coins);
  copy.drive(s);
  std::size_t still = 0;
  // Messages leave the pending set only by delivery or by being withheld.
  for (const auto& h : copy.pending()) still += ids.count(h.id);
  for (const auto& h : copy.withheld()) still += ids.count(h.id);
  v.delivered_later = ids.size() - still;
  v.deadlocked = !v.stop_received && v.delivered_later == 0;
  return v;
}

}  // namespace asyncmed
