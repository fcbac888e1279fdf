#include "asyncmed/concepts.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

namespace asyncmed {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::set<int>> subsets_up_to(int n, int size, int min_size) {
  std::vector<std::set<int>> out;
  for (int s = std::max(min_size, 0); s <= std::min(size, n); ++s) {
    std::vector<int> pick(s);
    for (int i = 0; i < s; ++i) pick[i] = i + 1;
    while (true) {
      out.emplace_back(pick.begin(), pick.end());
      int i = s - 1;
      while (i >= 0 && pick[i] == n - s + i + 1) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

std::string describe(const PartialTypes& x) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [i, v] : x) {
    os << (first ? "" : ",") << i << ':' << v;
    first = false;
  }
  os << '}';
  return os.str();
}

PayoffTable payoff_table(const ExtensionGame& ext, const Profile& profile, const Scheduler& s, const Evaluation& eval) {
  const auto& g = *ext.game;
  PayoffTable out(g.types().size());
  for (std::size_t t = 0; t < g.types().size(); ++t) {
    if (g.prior()[t] == 0) {
      out[t] = RationalVector(g.n(), Rational(0));
      continue;
    }
    OutcomeDistribution d = eval.mode == Evaluation::Mode::Exact
                                ? exact_distribution(ext, profile, s, g.types()[t], eval.exact)
                                : sample_distribution(ext, profile, s, g.types()[t], eval.samples,
                                                      run_seed(eval.seed, t), eval.sampled);
    out[t] = expected_payoff(g, t, d);
  }
  return out;
}

namespace {

bool consistent(const TypeProfile& x, const PartialTypes& xK) {
  for (const auto& [i, v] : xK)
    if (x.at(i - 1) != v) return false;
  return true;
}

}  // namespace

RationalVector conditional_payoff(const UnderlyingGame& g, const PayoffTable& table, const PartialTypes& xK) {
  RationalVector u(g.n(), Rational(0));
  Rational mass = 0;
  for (std::size_t t = 0; t < g.types().size(); ++t) {
    if (!consistent(g.types()[t], xK) || g.prior()[t] == 0) continue;
    mass += g.prior()[t];
    for (int i = 0; i < g.n(); ++i) u[i] += g.prior()[t] * table[t][i];
  }
  if (mass == 0) throw ContractError("conditioning on a zero-prior event " + describe(xK));
  for (auto& v : u) v /= mass;
  return u;
}

RationalVector expected_utility(const ExtensionGame& ext, const Profile& profile, const Scheduler& s,
                                const PartialTypes& xK, const Evaluation& eval) {
  return conditional_payoff(*ext.game, payoff_table(ext, profile, s, eval), xK);
}

std::vector<PartialTypes> partial_type_profiles(const UnderlyingGame& g, const std::set<int>& who) {
  std::set<PartialTypes> seen;
  for (std::size_t t = 0; t < g.types().size(); ++t) {
    if (g.prior()[t] == 0) continue;
    PartialTypes p;
    for (int i : who) p[i] = g.types()[t].at(i - 1);
    seen.insert(p);
  }
  return {seen.begin(), seen.end()};
}

namespace {

using SchedPtr = std::shared_ptr<const Scheduler>;

// One deviation to test: a profile, the baseline it is compared against,
// and optionally a scheduler that replaces the menu.
struct Case {
  std::set<int> K;
  std::set<int> T;
  std::string name;
  std::shared_ptr<const Profile> dev;
  std::shared_ptr<const Profile> base;
  SchedPtr sched;
};

// Cartesian product of (own strategy + alternatives) over `who`, applied to `base`.
std::vector<std::pair<std::string, std::shared_ptr<const Profile>>> products(const RobustnessQuery& q,
                                                                               const std::shared_ptr<const Profile>& base,
                                                                               const std::set<int>& who,
                                                                               bool include_identity) {
  std::vector<int> members(who.begin(), who.end());
  std::vector<std::size_t> choice(members.size(), 0);
  std::vector<std::pair<std::string, std::shared_ptr<const Profile>>> out;
  auto options = [&](int i) {
    return 1 + (static_cast<std::size_t>(i - 1) < q.deviations.size() ? q.deviations[i - 1].size() : 0);
  };
  while (true) {
    bool identity = std::all_of(choice.begin(), choice.end(), [](std::size_t c) { return c == 0; });
    if (!identity || include_identity) {
      auto p = std::make_shared<Profile>(*base);
      std::string name;
      for (std::size_t m = 0; m < members.size(); ++m) {
        int i = members[m];
        if (choice[m] > 0) p->players[i - 1] = q.deviations[i - 1][choice[m] - 1];
        p->board_access.resize(p->players.size() + 1, 0);
        name += (m ? "," : "") + std::to_string(i) + "=" + p->players[i - 1].name;
      }
      p->name = base->name + "[" + name + "]";
      out.emplace_back(name, p);
    }
    std::size_t m = 0;
    while (m < members.size() && ++choice[m] == options(members[m])) choice[m++] = 0;
    if (m == members.size()) break;
  }
  return out;
}

std::vector<std::set<int>> coalitions(const std::vector<std::set<int>>& given, int n, int bound, int min_size) {
  if (given.empty()) return subsets_up_to(n, bound, min_size);
  std::vector<std::set<int>> out;
  for (const auto& c : given)
    if (static_cast<int>(c.size()) <= bound && static_cast<int>(c.size()) >= min_size) out.push_back(c);
  return out;
}

bool disjoint(const std::set<int>& a, const std::set<int>& b) {
  return std::none_of(a.begin(), a.end(), [&](int i) { return b.count(i); });
}

class TableCache {
 public:
  TableCache(const RobustnessQuery& q) : q_(q) {}
  const PayoffTable& get(const std::shared_ptr<const Profile>& p, const SchedPtr& s) {
    std::lock_guard<std::mutex> lock(m_);
    return tables_.at({p.get(), s.get()});
  }
  void compute(const std::vector<std::pair<std::shared_ptr<const Profile>, SchedPtr>>& jobs) {
    std::vector<std::pair<std::shared_ptr<const Profile>, SchedPtr>> todo;
    for (const auto& j : jobs)
      if (!tables_.count({j.first.get(), j.second.get()}) &&
          std::none_of(todo.begin(), todo.end(), [&](const auto& o) { return o.first == j.first && o.second == j.second; }))
        todo.push_back(j);
    std::vector<PayoffTable> out(todo.size());
    parallel_for(todo.size(), q_.eval.workers,
                 [&](std::size_t i) { out[i] = payoff_table(*q_.ext, *todo[i].first, *todo[i].second, q_.eval); });
    for (std::size_t i = 0; i < todo.size(); ++i) {
      keep_.push_back(todo[i].first);
      tables_[{todo[i].first.get(), todo[i].second.get()}] = std::move(out[i]);
    }
  }

 private:
  const RobustnessQuery& q_;
  std::mutex m_;
  std::map<std::pair<const void*, const void*>, PayoffTable> tables_;
  std::vector<std::shared_ptr<const Profile>> keep_;
};

enum class Rule { Resilience, StrongResilience, Immunity };

struct Cell {
  const Case* c;
  SchedPtr s_lhs, s_rhs;
  PartialTypes x_lhs, x_rhs;
};

// Returns the violating player and gap (lhs - rhs), if any.
std::optional<std::pair<int, Rational>> violation(const RobustnessQuery& q, Rule rule, const std::set<int>& players,
                                                  const RationalVector& lhs, const RationalVector& rhs) {
  const bool mc = q.eval.mode == Evaluation::Mode::MonteCarlo;
  Rational slack = mc ? q.eval.slack : Rational(0);
  auto gains = [&](int i) {  // the deviator strictly prefers the deviation
    const Rational& a = lhs[i - 1];
    const Rational& b = rhs[i - 1];
    if (q.epsilon) return a >= b + *q.epsilon + slack;
    return a > b + slack;
  };
  auto hurt = [&](int i) {
    const Rational& a = lhs[i - 1];
    const Rational& b = rhs[i - 1];
    if (q.epsilon) return a <= b - *q.epsilon - slack;
    return a < b - slack;
  };
  if (rule == Rule::Resilience) {
    if (players.empty()) return std::nullopt;
    int best = 0;
    std::optional<Rational> gap;
    for (int i : players) {
      if (!gains(i)) return std::nullopt;
      Rational g = lhs[i - 1] - rhs[i - 1];
      if (!gap || g < *gap) {
        gap = g;
        best = i;
      }
    }
    return std::make_pair(best, *gap);
  }
  std::optional<std::pair<int, Rational>> found;
  for (int i : players) {
    bool bad = rule == Rule::Immunity ? hurt(i) : gains(i);
    if (!bad) continue;
    Rational g = lhs[i - 1] - rhs[i - 1];
    Rational size = rule == Rule::Immunity ? Rational(-g) : g;
    if (!found || size > (rule == Rule::Immunity ? Rational(-found->second) : found->second)) found = std::make_pair(i, g);
  }
  return found;
}

Verdict evaluate(const RobustnessQuery& q, const std::vector<Case>& cases, Rule rule, std::size_t coalition_count) {
  const auto& g = *q.ext->game;
  const int n = g.n();
  TableCache cache(q);
  std::vector<std::pair<std::shared_ptr<const Profile>, SchedPtr>> jobs;
  auto menu_for = [&](const Case& c) { return c.sched ? std::vector<SchedPtr>{c.sched} : q.schedulers; };
  for (const auto& c : cases)
    for (const auto& s : menu_for(c)) {
      jobs.emplace_back(c.base, s);
      jobs.emplace_back(c.dev, s);
    }
  cache.compute(jobs);

  Verdict v;
  v.caps.mode = q.eval.mode == Evaluation::Mode::Exact ? "exact" : "montecarlo";
  v.caps.samples = q.eval.mode == Evaluation::Mode::Exact ? 0 : q.eval.samples;
  v.caps.coalitions = coalition_count;
  v.caps.deviations = cases.size();
  v.caps.schedulers = q.schedulers.size();
  std::set<std::string> typeset;

  for (const auto& c : cases) {
    std::set<int> conditioned = rule == Rule::Immunity ? c.T : c.K;
    if (rule != Rule::Immunity) conditioned.insert(c.T.begin(), c.T.end());
    std::set<int> judged;
    if (rule == Rule::Immunity) {
      for (int i = 1; i <= n; ++i)
        if (!c.T.count(i)) judged.insert(i);
    } else {
      judged = c.K;
    }
    auto xs = partial_type_profiles(g, conditioned);
    for (const auto& x : xs) typeset.insert(describe(x));
    auto menu = menu_for(c);
    std::vector<std::tuple<SchedPtr, PartialTypes, RationalVector>> lhs, rhs;
    for (const auto& s : menu)
      for (const auto& x : xs) {
        lhs.emplace_back(s, x, conditional_payoff(g, cache.get(c.dev, s), x));
        rhs.emplace_back(s, x, conditional_payoff(g, cache.get(c.base, s), x));
      }
    for (std::size_t a = 0; a < lhs.size(); ++a)
      for (std::size_t b = 0; b < rhs.size(); ++b) {
        if (!q.independent && a != b) continue;
        ++v.caps.cells;
        auto bad = violation(q, rule, judged, std::get<2>(lhs[a]), std::get<2>(rhs[b]));
        if (!bad) continue;
        Rational size = rule == Rule::Immunity ? Rational(-bad->second) : bad->second;
        if (v.witness) {
          Rational cur = rule == Rule::Immunity ? Rational(-v.witness->gap) : v.witness->gap;
          if (size <= cur) continue;
        }
        v.holds = false;
        Witness w;
        w.K = c.K;
        w.T = c.T;
        w.deviation = c.name;
        w.scheduler = std::get<0>(lhs[a])->name();
        w.scheduler_rhs = std::get<0>(rhs[b])->name();
        w.types = std::get<1>(lhs[a]);
        w.types_rhs = std::get<1>(rhs[b]);
        w.player = bad->first;
        w.lhs = std::get<2>(lhs[a])[bad->first - 1];
        w.rhs = std::get<2>(rhs[b])[bad->first - 1];
        w.gap = bad->second;
        w.deviated = c.dev;
        w.baseline = c.base;
        w.sched_lhs = std::get<0>(lhs[a]);
        w.sched_rhs = std::get<0>(rhs[b]);
        v.witness = std::move(w);
      }
  }
  v.caps.type_profiles = typeset.size();
  return v;
}

std::shared_ptr<const Profile> with_strategies(const std::shared_ptr<const Profile>& base, const Adversary& a,
                                               const std::set<int>& only) {
  Adversary part = a;
  part.K.clear();
  part.T.clear();
  part.strategies.clear();
  for (const auto& [i, s] : a.strategies)
    if (only.count(i)) part.strategies.emplace(i, s);
  for (int i : only) (a.K.count(i) ? part.K : part.T).insert(i);
  return std::make_shared<Profile>(apply_adversary(*base, part));
}

void validate(const RobustnessQuery& q) {
  if (!q.ext || !q.profile) throw ContractError("query needs an extension game and a profile");
  if (q.schedulers.empty()) throw ContractError("scheduler menu is empty");
  if (q.k < 0 || q.t < 0) throw ContractError("negative coalition bound");
}

std::vector<Case> resilience_cases(const RobustnessQuery& q, const std::shared_ptr<const Profile>& base,
                                   const std::set<int>& T, const std::vector<std::set<int>>& ks, const std::string& tname) {
  std::vector<Case> out;
  for (const auto& K : ks) {
    if (!disjoint(K, T)) continue;
    for (auto& [name, p] : products(q, base, K, false))
      out.push_back(Case{K, T, tname.empty() ? name : tname + ";" + name, p, base, nullptr});
  }
  return out;
}

}  // namespace

Verdict check_k_resilience(const RobustnessQuery& q) {
  validate(q);
  const int n = q.ext->n();
  auto ks = coalitions(q.k_coalitions, n, q.k, 1);
  std::vector<Case> cases = resilience_cases(q, q.profile, {}, ks, "");
  for (const auto& a : q.adversaries) {
    if (!a.T.empty() || a.K.empty() || static_cast<int>(a.K.size()) > q.k) continue;
    cases.push_back(Case{a.K, {}, a.name, std::make_shared<Profile>(apply_adversary(*q.profile, a)), q.profile, a.scheduler});
  }
  return evaluate(q, cases, q.strong ? Rule::StrongResilience : Rule::Resilience, ks.size());
}

Verdict check_t_immunity(const RobustnessQuery& q) {
  validate(q);
  const int n = q.ext->n();
  auto ts = coalitions(q.t_coalitions, n, q.t, 1);
  std::vector<Case> cases;
  for (const auto& T : ts)
    for (auto& [name, p] : products(q, q.profile, T, false)) cases.push_back(Case{{}, T, name, p, q.profile, nullptr});
  for (const auto& a : q.adversaries) {
    if (!a.K.empty() || a.T.empty() || static_cast<int>(a.T.size()) > q.t) continue;
    cases.push_back(Case{{}, a.T, a.name, std::make_shared<Profile>(apply_adversary(*q.profile, a)), q.profile, a.scheduler});
  }
  return evaluate(q, cases, Rule::Immunity, ts.size());
}

Verdict check_kt_robustness(const RobustnessQuery& q) {
  Verdict imm = check_t_immunity(q);
  if (!imm.holds) return imm;
  const int n = q.ext->n();
  auto ts = coalitions(q.t_coalitions, n, q.t, 0);
  auto ks = coalitions(q.k_coalitions, n, q.k, 1);
  std::vector<Case> cases;
  for (const auto& T : ts) {
    auto pinned = T.empty() ? std::vector<std::pair<std::string, std::shared_ptr<const Profile>>>{{"", q.profile}}
                            : products(q, q.profile, T, true);
    for (auto& [tname, base] : pinned) {
      auto more = resilience_cases(q, base, T, ks, tname);
      for (auto& c : more) cases.push_back(std::move(c));
    }
  }
  for (const auto& a : q.adversaries) {
    if (a.K.empty() || static_cast<int>(a.K.size()) > q.k || static_cast<int>(a.T.size()) > q.t) continue;
    auto base = with_strategies(q.profile, a, a.T);
    cases.push_back(Case{a.K, a.T, a.name, std::make_shared<Profile>(apply_adversary(*q.profile, a)), base, a.scheduler});
  }
  Verdict v = evaluate(q, cases, q.strong ? Rule::StrongResilience : Rule::Resilience, ks.size() * ts.size());
  v.caps.deviations += imm.caps.deviations;
  v.caps.cells += imm.caps.cells;
  return v;
}

Rational replay_gap(const RobustnessQuery& q, const Witness& w) {
  const auto& g = *q.ext->game;
  auto lhs = conditional_payoff(g, payoff_table(*q.ext, *w.deviated, *w.sched_lhs, q.eval), w.types);
  auto rhs = conditional_payoff(g, payoff_table(*q.ext, *w.baseline, *w.sched_rhs, q.eval), w.types_rhs);
  return lhs[w.player - 1] - rhs[w.player - 1];
}

PunishmentStrategy pure_punishment(Action a) {
  return [a](int, int) { return std::map<Action, Rational>{{a, Rational(1)}}; };
}

PunishmentResult check_punishment(const UnderlyingGame& game, const ExtensionGame& ext, const PunishmentStrategy& rho,
                                  const Profile& sigma, int m,
                                  const std::vector<std::shared_ptr<const Scheduler>>& schedulers,
                                  const Evaluation& eval) {
  const int n = game.n();
  PunishmentResult out;
  Verdict& v = out.verdict;
  v.caps.mode = eval.mode == Evaluation::Mode::Exact ? "exact" : "montecarlo";
  v.caps.samples = eval.mode == Evaluation::Mode::Exact ? 0 : eval.samples;
  v.caps.schedulers = schedulers.size();
  if (m <= 0) return out;
  if (schedulers.empty()) throw ContractError("scheduler menu is empty");

  std::vector<PayoffTable> tables(schedulers.size());
  parallel_for(schedulers.size(), eval.workers,
               [&](std::size_t s) { tables[s] = payoff_table(ext, sigma, *schedulers[s], eval); });
  const bool mc = eval.mode == Evaluation::Mode::MonteCarlo;
  bool first = true;
  auto ks = subsets_up_to(n, m, 1);
  v.caps.coalitions = ks.size();
  std::set<std::string> typeset;
  for (const auto& K : ks) {
    std::vector<int> members(K.begin(), K.end());
    std::vector<int> others;
    for (int i = 1; i <= n; ++i)
      if (!K.count(i)) others.push_back(i);
    for (const auto& xK : partial_type_profiles(game, K)) {
      typeset.insert(describe(xK));
      // Lowest payoff under sigma' over the scheduler menu, per member.
      std::vector<std::pair<Rational, std::size_t>> lhs(members.size());
      for (std::size_t s = 0; s < schedulers.size(); ++s) {
        auto u = conditional_payoff(game, tables[s], xK);
        for (std::size_t j = 0; j < members.size(); ++j)
          if (s == 0 || u[members[j] - 1] < lhs[j].first) lhs[j] = {u[members[j] - 1], s};
      }
      // Best joint move of K against rho, per member.
      Rational mass = 0;
      for (std::size_t t = 0; t < game.types().size(); ++t)
        if (consistent(game.types()[t], xK)) mass += game.prior()[t];
      std::vector<std::size_t> pick(members.size(), 0);
      while (true) {
        RationalVector u(n, Rational(0));
        for (std::size_t t = 0; t < game.types().size(); ++t) {
          if (!consistent(game.types()[t], xK) || game.prior()[t] == 0) continue;
          const auto& x = game.types()[t];
          // Enumerate rho's mixtures for the other players.
          std::vector<std::vector<std::pair<Action, Rational>>> mix;
          for (int i : others) {
            auto d = rho(i, x[i - 1]);
            mix.emplace_back(d.begin(), d.end());
          }
          std::vector<std::size_t> idx(others.size(), 0);
          while (true) {
            ActionProfile a(n);
            Rational w = game.prior()[t] / mass;
            for (std::size_t j = 0; j < members.size(); ++j) a[members[j] - 1] = game.actions(members[j])[pick[j]];
            for (std::size_t j = 0; j < others.size(); ++j) {
              a[others[j] - 1] = mix[j][idx[j]].first;
              w *= mix[j][idx[j]].second;
            }
            std::size_t ai = game.action_index(a);
            for (int i : members) u[i - 1] += w * game.payoff(t, ai, i);
            std::size_t j = 0;
            while (j < idx.size() && ++idx[j] == mix[j].size()) idx[j++] = 0;
            if (j == idx.size()) break;
          }
        }
        ++v.caps.deviations;
        for (std::size_t j = 0; j < members.size(); ++j) {
          int i = members[j];
          const Rational& l = lhs[j].first;
          const Rational& r = u[i - 1];
          if (first || l < out.min_lhs) out.min_lhs = l;
          if (first || r > out.max_rhs) out.max_rhs = r;
          first = false;
          ++v.caps.cells;
          bool ok = mc ? l - eval.slack > r : l > r;
          if (ok) continue;
          Rational gap = l - r;
          if (v.witness && gap >= v.witness->gap) continue;
          v.holds = false;
          Witness w;
          w.K = K;
          w.player = i;
          w.types = xK;
          w.types_rhs = xK;
          std::string dev;
          for (std::size_t z = 0; z < members.size(); ++z)
            dev += (z ? "," : "") + std::to_string(members[z]) + "=" + action_name(game.actions(members[z])[pick[z]]);
          w.deviation = dev;
          w.scheduler = schedulers[lhs[j].second]->name();
          w.lhs = l;
          w.rhs = r;
          w.gap = gap;
          w.sched_lhs = schedulers[lhs[j].second];
          v.witness = std::move(w);
        }
        std::size_t j = 0;
        while (j < pick.size() && ++pick[j] == game.actions(members[j]).size()) pick[j++] = 0;
        if (j == pick.size()) break;
      }
    }
  }
  v.caps.type_profiles = typeset.size();
  return out;
}

Verdict check_scheduler_proof(const RobustnessQuery& q) {
  validate(q);
  const auto& g = *q.ext->game;
  const int n = g.n();
  auto ts = coalitions(q.t_coalitions, n, q.t, 0);
  std::vector<Case> cases;
  for (const auto& T : ts) {
    if (T.empty()) {
      cases.push_back(Case{{}, {}, "honest", q.profile, q.profile, nullptr});
      continue;
    }
    for (auto& [name, p] : products(q, q.profile, T, false)) cases.push_back(Case{{}, T, name, p, q.profile, nullptr});
  }
  for (const auto& a : q.adversaries)
    if (a.K.empty() && static_cast<int>(a.T.size()) <= q.t)
      cases.push_back(Case{{}, a.T, a.name, std::make_shared<Profile>(apply_adversary(*q.profile, a)), q.profile, nullptr});

  TableCache cache(q);
  std::vector<std::pair<std::shared_ptr<const Profile>, SchedPtr>> jobs;
  for (const auto& c : cases)
    for (const auto& s : q.schedulers) jobs.emplace_back(c.dev, s);
  cache.compute(jobs);

  Verdict v;
  v.caps.mode = q.eval.mode == Evaluation::Mode::Exact ? "exact" : "montecarlo";
  v.caps.samples = q.eval.mode == Evaluation::Mode::Exact ? 0 : q.eval.samples;
  v.caps.coalitions = ts.size();
  v.caps.deviations = cases.size();
  v.caps.schedulers = q.schedulers.size();
  v.caps.type_profiles = g.types().size();
  const bool mc = q.eval.mode == Evaluation::Mode::MonteCarlo;
  for (const auto& c : cases) {
    const auto& ref = cache.get(c.dev, q.schedulers.front());
    for (std::size_t s = 1; s < q.schedulers.size(); ++s) {
      const auto& other = cache.get(c.dev, q.schedulers[s]);
      for (std::size_t t = 0; t < g.types().size(); ++t)
        for (int i = 1; i <= n; ++i) {
          if (c.T.count(i)) continue;
          ++v.caps.cells;
          Rational gap = other[t][i - 1] - ref[t][i - 1];
          bool equal = mc ? abs(gap) <= q.eval.slack : gap == 0;
          if (equal) continue;
          if (v.witness && abs(gap) <= abs(v.witness->gap)) continue;
          v.holds = false;
          Witness w;
          w.T = c.T;
          w.deviation = c.name;
          w.scheduler = q.schedulers[s]->name();
          w.scheduler_rhs = q.schedulers.front()->name();
          for (int j = 1; j <= n; ++j) w.types[j] = g.types()[t][j - 1];
          w.types_rhs = w.types;
          w.player = i;
          w.lhs = other[t][i - 1];
          w.rhs = ref[t][i - 1];
          w.gap = gap;
          w.deviated = c.dev;
          w.baseline = c.dev;
          w.sched_lhs = q.schedulers[s];
          w.sched_rhs = q.schedulers.front();
          v.witness = std::move(w);
        }
    }
  }
  return v;
}

namespace {

class ReactiveAgent : public AgentBase<ReactiveAgent> {
 public:
  struct Plan {
    std::optional<int> report;  // unset: stay silent at the start
    bool ack = true;
    std::vector<std::int64_t> values;
    int observations = 1;
    std::vector<std::optional<Action>> stop_values;  // STOP instruction -> key part
    std::vector<std::optional<Action>> table;        // key -> move (unset: no move)
  };
  explicit ReactiveAgent(std::shared_ptr<const Plan> plan) : plan_(std::move(plan)) {}

  void start(Ctx& c) override {
    if (plan_->report) c.send(kMediator, Payload{tag::kInit, {*plan_->report}});
  }
  void react(Ctx& c, const Message* m) override {
    if (!m || m->header.from != kMediator || done_) return;
    if (!is_stop(m->body)) {
      if (static_cast<int>(seen_.size()) < plan_->observations)
        seen_.push_back(value_index(m->body.data.empty() ? 0 : m->body.data[0]));
      if (plan_->ack) c.send(kMediator, Payload{tag::kAck, {}});
      return;
    }
    std::size_t key = 0;
    for (int j = 0; j < plan_->observations; ++j)
      key = key * plan_->values.size() + (j < static_cast<int>(seen_.size()) ? seen_[j] : 0);
    std::int64_t instructed = m->body.data.at(0);
    std::size_t s = 0;
    for (; s < plan_->stop_values.size(); ++s)
      if (plan_->stop_values[s] && *plan_->stop_values[s] == instructed) break;
    if (s == plan_->stop_values.size()) s = 0;
    key = key * plan_->stop_values.size() + s;
    done_ = true;
    if (auto a = plan_->table.at(key)) {
      c.act(*a);
      c.halt();
    }
  }

 private:
  std::size_t value_index(std::int64_t v) const {
    for (std::size_t i = 0; i < plan_->values.size(); ++i)
      if (plan_->values[i] == v) return i;
    return 0;
  }
  std::shared_ptr<const Plan> plan_;
  std::vector<std::size_t> seen_;
  bool done_ = false;
};

}  // namespace

std::vector<StrategySpec> reactive_deviations(const ExtensionGame& ext, int player, const ReactiveMenuOptions& opt,
                                              std::size_t* total) {
  if (opt.values.empty()) throw ContractError("reactive menu needs a value domain");
  const auto& g = *ext.game;
  std::vector<std::optional<Action>> moves(g.actions(player).begin(), g.actions(player).end());
  if (!g.has_action(player, kBottom)) moves.push_back(std::nullopt);
  std::vector<std::optional<Action>> stops;
  for (auto v : opt.values) stops.push_back(static_cast<Action>(v));
  std::size_t keys = stops.size();
  for (int j = 0; j < opt.observations; ++j) keys *= opt.values.size();

  std::vector<std::optional<int>> reports;
  if (opt.vary_report) {
    for (int v : g.type_values(player)) reports.push_back(v);
    reports.push_back(std::nullopt);
  } else {
    reports.push_back(g.type_values(player).front());
  }
  std::vector<bool> acks = opt.vary_ack ? std::vector<bool>{true, false} : std::vector<bool>{true};

  mpz_class tables = 1;
  for (std::size_t k = 0; k < keys; ++k) tables *= static_cast<unsigned long>(moves.size());
  mpz_class all = tables * static_cast<unsigned long>(reports.size() * acks.size());
  if (total) *total = all.fits_ulong_p() ? all.get_ui() : static_cast<std::size_t>(-1);

  std::vector<StrategySpec> out;
  std::vector<std::size_t> digits(keys, 0);
  for (std::size_t r = 0; r < reports.size() && out.size() < opt.cap; ++r)
    for (bool ack : acks) {
      std::fill(digits.begin(), digits.end(), 0);
      while (out.size() < opt.cap) {
        auto plan = std::make_shared<ReactiveAgent::Plan>();
        plan->report = reports[r];
        plan->ack = ack;
        plan->values = opt.values;
        plan->observations = opt.observations;
        plan->stop_values = stops;
        std::string name = "reactive[r=" + (reports[r] ? std::to_string(*reports[r]) : std::string("-")) +
                           ",ack=" + (ack ? "1" : "0") + ",moves=";
        for (std::size_t k = 0; k < keys; ++k) {
          plan->table.push_back(moves[digits[k]]);
          name += moves[digits[k]] ? action_name(*moves[digits[k]]) : std::string("-");
          name += k + 1 < keys ? "." : "]";
        }
        std::shared_ptr<const ReactiveAgent::Plan> fixed = plan;
        out.push_back(StrategySpec{name, [fixed](int, int) { return std::make_unique<ReactiveAgent>(fixed); }});
        std::size_t k = 0;
        while (k < keys && ++digits[k] == moves.size()) digits[k++] = 0;
        if (k == keys) break;
      }
      if (out.size() >= opt.cap) break;
    }
  return out;
}

}  // namespace asyncmed
