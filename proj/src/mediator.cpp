#include "asyncmed/mediator.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace asyncmed {

namespace {

class CanonicalPlayer : public AgentBase<CanonicalPlayer> {
 public:
  void start(Ctx& c) override { c.send(kMediator, Payload{tag::kInit, {c.type()}}); }
  void react(Ctx& c, const Message* m) override {
    if (!m || m->header.from != kMediator) return;
    if (is_stop(m->body)) {
      c.act(static_cast<Action>(m->body.data.at(0)));
      c.halt();
      return;
    }
    c.send(kMediator, Payload{tag::kAck, {}});
  }
};

class ParityMediator : public AgentBase<ParityMediator> {
 public:
  void start(Ctx& c) override {
    b_ = static_cast<int>(c.coin(2));
    int a = static_cast<int>(c.coin(2));
    for (int i = 1; i <= c.n(); ++i) c.send(i, Payload{tag::kHint, {(a + b_ * i) % 2}});
  }
  void react(Ctx& c, const Message*) override {
    if (stopped_) return;
    stopped_ = true;
    for (int i = 1; i <= c.n(); ++i) c.send(i, stop_payload(b_));
  }

 private:
  int b_ = 0;
  bool stopped_ = false;
};

class RaceMediator : public AgentBase<RaceMediator> {
 public:
  void react(Ctx& c, const Message* m) override {
    if (done_ || !m || m->header.from == kMediator || m->body.tag != tag::kInit) return;
    done_ = true;
    for (int i = 1; i <= c.n(); ++i) c.send(i, stop_payload(m->header.from - 1));
  }

 private:
  bool done_ = false;
};

class OrderRevealingMediator : public AgentBase<OrderRevealingMediator> {
 public:
  void react(Ctx& c, const Message* m) override {
    if (done_ || !m) return;
    if (m->body.tag == tag::kInit && first_ == 0) {
      first_ = m->header.from;
      first_type_ = static_cast<int>(m->body.data.at(0));
      for (int i = 1; i <= c.n(); ++i) c.send(i, Payload{tag::kRound, {1}});
    } else if (m->body.tag == tag::kAck && first_ != 0) {
      done_ = true;
      Action a = first_type_ + 2 * (m->header.from - 1);
      for (int i = 1; i <= c.n(); ++i) c.send(i, stop_payload(a));
    }
  }

 private:
  bool done_ = false;
  int first_ = 0;
  int first_type_ = 0;
};

class CoinStopMediator : public AgentBase<CoinStopMediator> {
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

class NeverStopMediator : public AgentBase<NeverStopMediator> {
 public:
  void start(Ctx& c) override {
    for (int i = 1; i <= c.n(); ++i) c.send(i, Payload{tag::kHint, {0}});
  }
  void react(Ctx&, const Message*) override {}
};


template <class A>
StrategySpec simple_spec(std::string name) {
  return StrategySpec{std::move(name), [](int, int) { return std::make_unique<A>(); }};
}

std::shared_ptr<Profile> canonical_profile(const std::string& name, StrategySpec mediator, int n, int r) {
  auto p = std::make_shared<Profile>();
  p->name = name;
  p->mediator = std::move(mediator);
  p->players.assign(n, canonical_player());
  p->canonical = true;
  p->r = r;
  return p;
}

std::shared_ptr<ExtensionGame> mediator_ext(std::shared_ptr<const UnderlyingGame> g) {
  auto ext = std::make_shared<ExtensionGame>();
  ext->game = std::move(g);
  ext->has_mediator = true;
  ext->policy = InfinitePlay::Wills;
  return ext;
}

std::shared_ptr<const UnderlyingGame> agreement_game(int n, std::vector<TypeProfile> types, std::vector<Rational> prior,
                                                     std::vector<Action> actions) {
  auto g = std::make_shared<UnderlyingGame>(n, types, prior, std::vector<std::vector<Action>>(n, actions));
  for (const auto& x : types)
    for (std::size_t idx = 0; idx < g->action_profile_count(); ++idx) {
      ActionProfile a = g->action_profile_at(idx);
      bool same = std::all_of(a.begin(), a.end(), [&](Action v) { return v == a[0]; });
      g->set_utility(x, a, RationalVector(n, same ? Rational(1) : Rational(0)));
    }
  return g;
}

}  // namespace

StrategySpec canonical_player() { return simple_spec<CanonicalPlayer>("canonical"); }
StrategySpec parity_mediator() { return simple_spec<ParityMediator>("parity-mediator"); }
StrategySpec never_stop_mediator() { return simple_spec<NeverStopMediator>("never-stop"); }

MediatorFixture parity_fixture(int n, int k) {
  auto ext = mediator_ext(build_parity_game(n, k));
  return {ext, canonical_profile("parity-honest", parity_mediator(), n, 2)};
}

MediatorFixture race_fixture() {
  auto ext = mediator_ext(agreement_game(2, {{0, 0}}, {Rational(1)}, {0, 1}));
  return {ext, canonical_profile("race", simple_spec<RaceMediator>("race-mediator"), 2, 1)};
}

MediatorFixture order_revealing_fixture() {
  std::vector<TypeProfile> types{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::vector<Rational> prior(4, frac(1, 4));
  auto ext = mediator_ext(agreement_game(2, types, prior, {0, 1, 2, 3}));
  return {ext, canonical_profile("order-revealing", simple_spec<OrderRevealingMediator>("order-mediator"), 2, 2)};
}

MediatorFixture single_player_fixture() {
  auto g = std::make_shared<UnderlyingGame>(1, std::vector<TypeProfile>{{0}}, std::vector<Rational>{1},
                                            std::vector<std::vector<Action>>{{0, 1}});
  g->set_utility({0}, {0}, {Rational(0)});
  g->set_utility({0}, {1}, {Rational(1)});
  auto ext = mediator_ext(g);
  return {ext, canonical_profile("single", simple_spec<CoinStopMediator>("coin-stop"), 1, 1)};
}

CanonicalVerdict check_canonical_form(const ExtensionGame& ext, const std::vector<Profile>& profiles,
                                      const std::vector<std::shared_ptr<const Scheduler>>& schedulers, int r,
                                      const ExactOptions& opt) {
  CanonicalVerdict v;
  if (profiles.empty()) return v;
  ExactOptions eo = opt;
  eo.run.record_log = true;
  const Profile& honest = profiles.front();
  for (const auto& prof : profiles) {
    for (const auto& s : schedulers) {
      for (const auto& x : ext.game->types()) {
        for_each_exact_run(ext, prof, *s, x, eo, [&](const RunResult& res, const Rational&) {
          ++v.runs;
          if (!v.holds) return;
          std::ostringstream w;
          w << "profile " << prof.name << ", scheduler " << s->name() << ", types " << profile_name(x) << ": ";
          for (int i = 1; i <= ext.n(); ++i) {
            if (res.mediator_sent[i - 1] > r) {
              w << "mediator sent " << res.mediator_sent[i - 1] << " messages to player " << i << " (bound " << r << ")";
              v.holds = false;
              v.witness = w.str();
              return;
            }
            if (!s->relaxed() && res.mediator_sent[i - 1] > 0 && !res.mediator_last_stop[i - 1]) {
              w << "last mediator message to player " << i << " carries no STOP";
              v.holds = false;
              v.witness = w.str();
              return;
            }
          }
          for (int i = 1; i <= ext.n(); ++i) {
            if (prof.players[i - 1].name != honest.players[i - 1].name) continue;
            int sends = 0, allowed = 1;
            for (const auto& e : res.log) {
              if (e.kind == Event::Kind::Send && e.a == i) ++sends;
              if (e.kind == Event::Kind::Deliver && e.a == kMediator && e.b == i && e.v != kStopTag) ++allowed;
            }
            if (sends > allowed) {
              w << "honest player " << i << " sent " << sends << " messages, more than it may answer";
              v.holds = false;
              v.witness = w.str();
              return;
            }
          }
        });
      }
    }
  }
  return v;
}

mpz_class factorial(unsigned long m) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), m);
  return f;
}

int least_rounds(std::uint64_t classes, int n) {
  if (n < 1) throw ParameterError("need at least one player");
  mpz_class c(static_cast<unsigned long>(classes));
  int R = 1;
  while (factorial(static_cast<unsigned long>(R * n)) < c) ++R;
  return R;
}

mpz_class loose_rounds(int r, int n) {
  mpz_class out;
  unsigned long m = 4ul * r * n;
  mpz_ui_pow_ui(out.get_mpz_t(), m, m);
  return out;
}

mpz_class pattern_bound_factorial(int r, int n) {
  mpz_class den;
  mpz_class rf = factorial(r);
  mpz_pow_ui(den.get_mpz_t(), rf.get_mpz_t(), 2ul * n);
  return factorial(4ul * r * n) / den;
}

mpz_class pattern_bound_prefixes(int r, int n) { return mpz_class(4ul * r * n) * pattern_bound_factorial(r, n); }

mpz_class pattern_bound_square(int r, int n) {
  mpz_class f = factorial(2ul * r * n);
  return mpz_class(2ul * r * n) * f * f;
}

mpz_class permutation_rank(const std::vector<int>& perm) {
  mpz_class rank = 0;
  const std::size_t m = perm.size();
  for (std::size_t i = 0; i < m; ++i) {
    unsigned long smaller = 0;
    for (std::size_t j = i + 1; j < m; ++j)
      if (perm[j] < perm[i]) ++smaller;
    rank += mpz_class(smaller) * factorial(m - 1 - i);
  }
  return rank;
}

std::size_t class_for_order(const std::vector<int>& order, std::size_t classes) {
  if (classes == 0) throw ContractError("no scheduler classes");
  mpz_class rank = permutation_rank(order);
  mpz_class c = rank % mpz_class(static_cast<unsigned long>(classes));
  return static_cast<std::size_t>(c.get_ui());
}

namespace {

struct MiShared {
  MiVariant variant;
  int R, n, k, t;
  std::shared_ptr<const ExtensionGame> inner_ext;
  std::shared_ptr<const Profile> inner;
  std::shared_ptr<const SchedulerClasses> classes;
};

class MiPlayer : public AgentBase<MiPlayer> {
 public:
  explicit MiPlayer(MiVariant v) : variant_(v) {}
  void start(Ctx& c) override {
    if (variant_ == MiVariant::Full) c.send(kMediator, Payload{tag::kMiInput, {c.self(), 0, c.type()}});
    else c.send(kMediator, Payload{tag::kMiWeak, {c.self(), c.type()}});
  }
  void react(Ctx& c, const Message* m) override {
    if (!m || m->header.from != kMediator) return;
    if (is_stop(m->body)) {
      c.act(static_cast<Action>(m->body.data.at(0)));
      c.halt();
      return;
    }
    if (m->body.tag == tag::kMarker) c.send(kMediator, Payload{tag::kMiInput, {c.self(), m->body.data.at(0), c.type()}});
  }

 private:
  MiVariant variant_;
};

class MiMediator : public AgentBase<MiMediator> {
 public:
  explicit MiMediator(std::shared_ptr<const MiShared> s) : s_(std::move(s)) {
    count_.assign(s_->n + 1, std::vector<int>(s_->R, 0));
    value_.assign(s_->n + 1, std::vector<std::int64_t>(s_->R, 0));
    bad_.assign(s_->n + 1, 0);
    weak_.assign(s_->n + 1, std::nullopt);
  }

  void start(Ctx& c) override {
    if (s_->variant != MiVariant::Full) return;
    for (int i = 1; i <= s_->n; ++i)
      for (int r = 1; r < s_->R; ++r) c.send(i, Payload{tag::kMarker, {r}});
  }

  void react(Ctx& c, const Message* m) override {
    if (done_ || !m || m->header.from == kMediator) return;
    const int from = m->header.from;
    const auto& d = m->body.data;
    if (s_->variant == MiVariant::Full) {
      if (m->body.tag != tag::kMiInput || d.size() != 3 || d[0] != from || d[1] < 0 || d[1] >= s_->R) {
        bad_[from] = 1;
      } else {
        int r = static_cast<int>(d[1]);
        ++count_[from][r];
        value_[from][r] = d[2];
        order_.push_back((from - 1) * s_->R + r);
      }
    } else {
      if (m->body.tag != tag::kMiWeak || d.size() != 2 || d[0] != from) bad_[from] = 1;
      else if (!weak_[from]) weak_[from] = d[1];
    }
    std::vector<int> present = complete_players();
    if (static_cast<int>(present.size()) >= s_->n - s_->k - s_->t) decide(c, present);
  }

 private:
  bool valid_type(int player, std::int64_t v) const { return s_->inner_ext->game->has_type_value(player, static_cast<int>(v)); }

  std::optional<std::int64_t> input_of(int i) const {
    if (bad_[i]) return std::nullopt;
    if (s_->variant == MiVariant::Weak) {
      if (weak_[i] && valid_type(i, *weak_[i])) return weak_[i];
      return std::nullopt;
    }
    for (int r = 0; r < s_->R; ++r)
      if (count_[i][r] != 1 || value_[i][r] != value_[i][0]) return std::nullopt;
    if (!valid_type(i, value_[i][0])) return std::nullopt;
    return value_[i][0];
  }

  std::vector<int> complete_players() const {
    std::vector<int> out;
    for (int i = 1; i <= s_->n; ++i)
      if (input_of(i)) out.push_back(i);
    return out;
  }

  TypeProfile extend(const std::vector<int>& present) const {
    const auto& types = s_->inner_ext->game->types();
    for (const auto& x : types) {
      bool ok = true;
      for (int i : present)
        if (x[i - 1] != *input_of(i)) ok = false;
      if (ok) return x;
    }
    return types.front();
  }

  void decide(Ctx& c, const std::vector<int>& present) {
    done_ = true;
    TypeProfile x = extend(present);
    std::unique_ptr<Scheduler> owned;
    const Scheduler* sched = nullptr;
    if (s_->variant == MiVariant::Full && static_cast<int>(present.size()) == s_->n) {
      std::size_t cls = class_for_order(order_, s_->classes->size());
      sched = &s_->classes->representatives[cls];
    } else {
      owned = std::make_unique<DeferringScheduler>(std::set<int>(present.begin(), present.end()));
      sched = owned.get();
    }
    ForwardCoins coins([&c](std::uint64_t arity) { return c.coin(arity); });
    RunOptions ro;
    ro.record_log = false;
    ro.step_budget = 100000;
    RunResult inner = run_with_coins(*s_->inner_ext, *s_->inner, *sched, x, coins, ro);
    for (int i = 1; i <= s_->n; ++i) c.send(i, stop_payload(inner.outcome[i - 1]));
  }

  std::shared_ptr<const MiShared> s_;
  std::vector<std::vector<int>> count_;
  std::vector<std::vector<std::int64_t>> value_;
  std::vector<char> bad_;
  std::vector<std::optional<std::int64_t>> weak_;
  std::vector<int> order_;
  bool done_ = false;
};

}  // namespace

MinimallyInformativeProfile minimally_informative_transform(std::shared_ptr<const ExtensionGame> ext,
                                                            std::shared_ptr<const Profile> profile,
                                                            const MiOptions& opt) {
  if (!profile->canonical) throw Unsupported("the transform needs a canonical-form mediator profile");
  MinimallyInformativeProfile mi;
  mi.variant = opt.variant;
  mi.n = ext->n();
  mi.k = opt.k;
  mi.t = opt.t;
  mi.inner_ext = ext;
  mi.inner = profile;
  if (opt.variant == MiVariant::Full) {
    try {
      mi.classes = std::make_shared<SchedulerClasses>(enumerate_scheduler_classes(*ext, *profile, opt.classes));
    } catch (const EnumerationOverflow& e) {
      throw EnumerationOverflow("too many scheduler classes for the full variant; use the weak variant", e.reached());
    }
    mi.rounds = opt.force_rounds ? *opt.force_rounds : least_rounds(mi.classes->size(), mi.n);
  } else {
    mi.rounds = 1;
  }
  if (mi.rounds < 1) throw ParameterError("R must be at least 1");
  auto shared = std::make_shared<MiShared>(
      MiShared{opt.variant, mi.rounds, mi.n, opt.k, opt.t, ext, profile, mi.classes});
  auto outer = std::make_shared<ExtensionGame>(*ext);
  auto prof = std::make_shared<Profile>();
  prof->name = std::string(opt.variant == MiVariant::Full ? "mi-full(" : "mi-weak(") + profile->name + ")";
  prof->mediator = StrategySpec{"mi-mediator", [shared](int, int) { return std::make_unique<MiMediator>(shared); }};
  MiVariant v = opt.variant;
  prof->players.assign(mi.n, StrategySpec{"mi-player", [v](int, int) { return std::make_unique<MiPlayer>(v); }});
  prof->canonical = true;
  prof->r = mi.rounds;
  mi.ext = outer;
  mi.profile = prof;
  return mi;
}

namespace {

// Delivers mediator messages first, then the players' inputs in a given order.
class ArrivalOrderScheduler : public Scheduler {
 public:
  explicit ArrivalOrderScheduler(std::vector<ChannelKey> order) : order_(std::move(order)) {}
  Choice decide(const SchedView& v, CoinSource&) const override {
    const auto& p = *v.pending;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i].to != kMediator) return Choice::deliver(i);
    std::size_t done = 0;
    for (const auto& e : *v.pattern) done += e.kind == 'D' && e.to == kMediator;
    if (done < order_.size()) {
      std::size_t idx = find_pending(v, order_[done]);
      if (idx < p.size()) return Choice::deliver(idx);
    }
    return Choice::deliver(0);
  }
  bool needs_pattern() const override { return true; }
  std::string name() const override { return "arrival-order"; }

 private:
  std::vector<ChannelKey> order_;
};

}  // namespace

SurjectionVerdict surjection_check(const MinimallyInformativeProfile& mi) {
  SurjectionVerdict v;
  if (mi.variant != MiVariant::Full || !mi.classes) throw ContractError("surjection check needs the full variant");
  const int R = mi.rounds, n = mi.n;
  std::vector<int> items(R * n);
  std::iota(items.begin(), items.end(), 0);
  std::set<std::size_t> hit;
  RunOptions ro;
  ro.record_log = false;
  ro.record_local = true;
  const TypeProfile& x = mi.ext->game->types().front();
  do {
    std::vector<ChannelKey> keys;
    // Markers are delivered in channel order, so the r-th input of player i
    // travels with sequence number r+1.
    for (int it : items) keys.emplace_back(it / R + 1, kMediator, it % R + 1);
    ArrivalOrderScheduler s(keys);
    RngCoins coins(0, n);
    RunResult r = run_with_coins(*mi.ext, *mi.profile, s, x, coins, ro);
    std::vector<int> seen;
    for (const auto& step : r.local[kMediator])
      if (step.kind == 'D' && step.delivered->body.tag == tag::kMiInput) {
        const auto& d = step.delivered->body.data;
        seen.push_back(static_cast<int>((d[0] - 1) * R + d[1]));
      }
    if (seen == items) {
      ++v.orders_realized;
      hit.insert(class_for_order(items, mi.classes->size()));
    }
  } while (std::next_permutation(items.begin(), items.end()));
  for (std::size_t c = 0; c < mi.classes->size(); ++c)
    if (!hit.count(c)) v.uncovered.push_back(c);
  v.holds = v.uncovered.empty();
  return v;
}

InformativenessVerdict check_minimally_informative(const MinimallyInformativeProfile& mi,
                                                   const std::vector<std::shared_ptr<const Scheduler>>& schedulers,
                                                   const ExactOptions& opt) {
  InformativenessVerdict v;
  ExactOptions eo = opt;
  eo.run.record_local = true;
  const auto& types = mi.ext->game->types();
  for (const auto& s : schedulers) {
    std::vector<std::vector<std::map<std::vector<Payload>, Rational>>> per(mi.n + 1);
    for (const auto& x : types) {
      std::vector<std::map<std::vector<Payload>, Rational>> dist(mi.n + 1);
      for_each_exact_run(*mi.ext, *mi.profile, *s, x, eo, [&](const RunResult& r, const Rational& pr) {
        for (int i = 1; i <= mi.n; ++i) {
          std::vector<Payload> transcript;
          for (const auto& step : r.local[i]) {
            if (step.kind != 'D' || step.delivered->header.from != kMediator) continue;
            if (is_stop(step.delivered->body)) break;
            transcript.push_back(step.delivered->body);
          }
          dist[i][transcript] += pr;
        }
      });
      for (int i = 1; i <= mi.n; ++i) per[i].push_back(std::move(dist[i]));
    }
    for (int i = 1; i <= mi.n; ++i)
      for (std::size_t a = 1; a < per[i].size(); ++a) {
        ++v.comparisons;
        if (per[i][a] != per[i][0] && v.holds) {
          v.holds = false;
          v.witness = "player " + std::to_string(i) + " under " + s->name() + ": transcript law differs between " +
                      profile_name(types[0]) + " and " + profile_name(types[a]);
        }
      }
  }
  return v;
}

}  // namespace asyncmed
