// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "asyncmed/cheaptalk.hpp"
#include "asyncmed/fixtures.hpp"
#include "asyncmed/naive.hpp"
#include "asyncmed/relations.hpp"

using namespace asyncmed;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Evaluation exact_eval() {
  Evaluation e;
  e.mode = Evaluation::Mode::Exact;
  return e;
}

std::vector<std::shared_ptr<const Scheduler>> fifo_only() { return {std::make_shared<FifoScheduler>()}; }

Outcome criterion1() {
  auto t0 = Clock::now();
  auto fx = parity_fixture(7, 2);
  const auto& g = *fx.ext->game;
  FifoScheduler fifo;
  auto u = expected_utility(*fx.ext, *fx.profile, fifo, {}, exact_eval());
  bool honest = std::all_of(u.begin(), u.end(), [](const Rational& v) { return v == frac(3, 2); });
  auto bottom = g.payoff(TypeProfile(7, 0), ActionProfile(7, kBottom));
  bool punish = std::all_of(bottom.begin(), bottom.end(), [](const Rational& v) { return v == frac(11, 10); });
  auto pr = check_punishment(g, *fx.ext, pure_punishment(kBottom), *fx.profile, 2, fifo_only(), exact_eval());
  double s = seconds_since(t0);
  std::ostringstream d;
  d << "honest payoff " << u[0] << ", all-bottom payoff " << bottom[0] << ", punishment at m=2 "
    << (pr.verdict.holds ? "holds" : "fails") << " (" << pr.max_rhs << " < " << pr.min_lhs << "), " << s << " s";
  return {honest && punish && pr.verdict.holds && s < 1.0, d.str()};
}

Outcome criterion2() {
  auto t0 = Clock::now();
  auto np = naive_parity_cheaptalk(7, 2);
  RobustnessQuery q;
  q.ext = np.ext;
  q.profile = np.profile;
  q.k = 2;
  q.adversaries = naive_menu(np);
  q.schedulers = fifo_only();
  q.eval = exact_eval();
  Verdict v = check_k_resilience(q);
  // Two branches over b: withholding when b = 0 leaves everyone on bottom.
  const Rational oracle = (frac(11, 10) + Rational(2)) / 2;
  bool found = !v.holds && v.witness && v.witness->lhs == oracle && v.witness->rhs == frac(3, 2);
  Rational replay = found ? replay_gap(q, *v.witness) : Rational(0);
  double s = seconds_since(t0);
  std::ostringstream d;
  if (v.witness)
    d << "witness " << v.witness->deviation << " lhs " << v.witness->lhs << " rhs " << v.witness->rhs << ", replay gap "
      << replay << ", oracle " << oracle << ", " << s << " s";
  else
    d << "no witness, " << s << " s";
  return {found && replay == oracle - frac(3, 2) && s < 10.0, d.str()};
}

MinimallyInformativeProfile mi_of(const MediatorFixture& fx, MiVariant variant) {
  MiOptions o;
  o.variant = variant;
  return minimally_informative_transform(fx.ext, fx.profile, o);
}

Outcome criterion3() {
  auto t0 = Clock::now();
  auto fx = parity_fixture(2, 0);
  auto full = mi_of(fx, MiVariant::Full);
  auto weak = mi_of(fx, MiVariant::Weak);
  auto rf = check_implementation(GameSide{full.ext, full.profile}, GameSide{fx.ext, fx.profile}, 0, ImplementationMode::Full);
  auto rw = check_implementation(GameSide{weak.ext, weak.profile}, GameSide{fx.ext, fx.profile}, 0, ImplementationMode::Weak);
  std::uint64_t max_messages = 0;
  for (const auto& s : standard_menu(2))
    for_each_exact_run(*weak.ext, *weak.profile, *s, TypeProfile(2, 0), ExactOptions{},
                       [&](const RunResult& r, const Rational&) { max_messages = std::max(max_messages, r.messages); });
  double s = seconds_since(t0);
  std::ostringstream d;
  d << "full R=" << full.rounds << " " << (rf.holds ? "implements" : "fails") << " (" << rf.mode
    << "), weak " << (rw.holds ? "weakly implements" : "fails") << ", weak messages per run <= " << max_messages << ", "
    << s << " s";
  return {rf.holds && !rf.fell_back && rw.holds && max_messages <= 4 && s < 60.0, d.str()};
}

Outcome criterion4() {
  auto t0 = Clock::now();
  auto fx = order_revealing_fixture();
  bool ok = true;
  std::ostringstream d;
  for (auto variant : {MiVariant::Full, MiVariant::Weak}) {
    auto mi = mi_of(fx, variant);
    auto v = check_minimally_informative(mi, standard_menu(2));
    ok = ok && v.holds;
    d << (variant == MiVariant::Full ? "full " : "weak ") << (v.holds ? "holds" : "fails: " + v.witness) << " ("
      << v.comparisons << " comparisons); ";
  }
  d << seconds_since(t0) << " s";
  return {ok, d.str()};
}

Outcome criterion5() {
  auto t0 = Clock::now();
  PrimeField F(13);
  std::uint64_t cases = 0, failures = 0;
  for (std::uint64_t s = 0; s < 13; ++s)
    for (std::uint64_t a = 0; a < 13; ++a) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
      for (std::uint64_t x = 1; x <= 4; ++x) pts.emplace_back(x, (s + a * x) % 13);
      for (int bad = -1; bad < 4; ++bad)
        for (std::uint64_t delta = (bad < 0 ? 0 : 1); delta < (bad < 0 ? 1 : 13); ++delta) {
          auto p = pts;
          if (bad >= 0) p[bad].second = (p[bad].second + delta) % 13;
          ++cases;
          try {
            if (shamir_reconstruct(F, p, 1, 1) != s) ++failures;
          } catch (const std::exception&) {
            ++failures;
          }
        }
    }
  std::ostringstream d;
  d << cases << " cases, " << failures << " failures, " << seconds_since(t0) << " s";
  return {failures == 0 && cases == 169 * 49 && seconds_since(t0) < 60.0, d.str()};
}

Outcome criterion6() {
  auto t0 = Clock::now();
  auto fx = parity_fixture(9, 1);
  CtOptions o;
  o.k = 1;
  o.t = 1;
  auto ct = build_cheaptalk_profile(fx.ext, fx.profile, o);
  FifoScheduler fifo;
  auto target = exact_distribution(*fx.ext, *fx.profile, fifo, TypeProfile(9, 0));
  const std::uint64_t samples = 10000;
  Rational worst = 0;
  std::uint64_t max_messages = 0;
  bool within = true;
  RunOptions ro{.step_budget = 2000000, .record_log = false};
  for (const auto& s : standard_menu(9)) {
    std::map<ActionProfile, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < samples; ++i) {
      auto r = run(*ct.ext, *ct.profile, *s, TypeProfile(9, 0), run_seed(1, i), ro);
      ++counts[r.outcome];
      max_messages = std::max(max_messages, r.messages);
      if (r.messages > ct.budget.limit()) within = false;
    }
    OutcomeDistribution emp;
    emp.exact = false;
    emp.samples = samples;
    for (const auto& [a, c] : counts) emp.p[a] = frac(static_cast<long>(c), static_cast<long>(samples));
    worst = std::max(worst, dist(emp, target));
  }
  double s = seconds_since(t0);
  std::ostringstream d;
  d << "max dist " << worst.get_d() << " over 10 schedulers x " << samples << " samples, max messages " << max_messages
    << " <= budget " << ct.budget.limit() << " (measured constant " << ct.budget.constant(max_messages) << " vs C="
    << ct.budget.C << "), " << s << " s";
  return {worst <= frac(5, 100) && within && s < 600.0, d.str()};
}

Outcome criterion7() {
  auto t0 = Clock::now();
  auto fx = parity_fixture(9, 1);
  std::ostringstream d;
  bool ok = true;
  for (auto regime : {CtRegime::Exact, CtRegime::Epsilon}) {
    CtOptions o;
    o.k = 1;
    o.t = 1;
    o.regime = regime;
    if (regime == CtRegime::Epsilon) o.epsilon = frac(1, 10);
    auto ct = build_cheaptalk_profile(fx.ext, fx.profile, o);
    CoterminationQuery q;
    q.game = GameSide{ct.ext, ct.profile};
    q.adversaries = adversary_menu_for(ct);
    q.schedulers = {std::make_shared<RandomScheduler>()};
    q.runs_per_cell = 1000;
    q.seed = 7;
    if (regime == CtRegime::Epsilon) q.epsilon = frac(1, 10);
    auto v = check_cotermination(q);
    ok = ok && v.holds && (regime != CtRegime::Exact || v.violations == 0);
    d << to_string(regime) << ": " << v.violations << "/" << v.runs << " violations over " << v.cells
      << " cells, 95% upper bound " << v.cp_upper << "; ";
  }
  d << seconds_since(t0) << " s";
  return {ok, d.str()};
}

struct Named {
  std::string name;
  MediatorFixture fx;
};

Outcome criterion8() {
  auto t0 = Clock::now();
  std::vector<Named> race_family{{"race", race_fixture()},
                                 {"constant", constant_fixture()},
                                 {"coin", coin_fixture()},
                                 {"order-toy", order_toy_fixture()}};
  auto parity = parity_fixture(2, 0);
  auto pf = mi_of(parity, MiVariant::Full);
  auto pw = mi_of(parity, MiVariant::Weak);
  std::vector<Named> parity_family{{"parity", parity},
                                   {"parity-mi-full", {pf.ext, pf.profile}},
                                   {"parity-mi-weak", {pw.ext, pw.profile}}};
  std::size_t pairs = 0, agree = 0;
  std::string mismatch;
  for (const auto* family : {&race_family, &parity_family})
    for (const auto& a : *family)
      for (const auto& b : *family) {
        GameSide A{a.fx.ext, a.fx.profile}, B{b.fx.ext, b.fx.profile};
        bool impl = check_implementation(A, B, 0, ImplementationMode::Full).holds;
        bool weak = check_implementation(A, B, 0, ImplementationMode::Weak).holds;
        AdversarySide sa{A, {}, {}, true, {}};
        AdversarySide sb{B, {}, {}, true, {}};
        bool bisim = check_bisimulation(sa, sb, 0, 0).holds;
        EmulationQuery eq;
        eq.cheap = sa;
        eq.mediated = B;
        for (int i = 1; i <= A.ext->n(); ++i) eq.H[A.profile->players[i - 1].name] = B.profile->players[i - 1];
        bool consistent_h = true;
        for (int i = 1; i <= A.ext->n(); ++i)
          consistent_h = consistent_h && eq.H[A.profile->players[i - 1].name].name == B.profile->players[i - 1].name;
        bool emul = consistent_h ? check_emulation(eq).holds : weak;
        ++pairs;
        if (impl == bisim && weak == emul) ++agree;
        else if (mismatch.empty())
          mismatch = a.name + " vs " + b.name;
      }
  // Metric properties on random distribution pairs.
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> w(0, 6);
  std::size_t metric_bad = 0;
  auto random_dist = [&]() {
    OutcomeDistribution d;
    int total = 0;
    std::vector<int> weights(4);
    for (auto& x : weights) total += (x = w(rng));
    if (total == 0) weights[0] = total = 1;
    for (int i = 0; i < 4; ++i)
      if (weights[i]) d.p[ActionProfile{i % 2, i / 2}] = frac(weights[i], total);
    return d;
  };
  for (int i = 0; i < 10000; ++i) {
    auto p = random_dist(), q = random_dist(), r = random_dist();
    Rational pq = dist(p, q);
    if (pq < 0 || pq > 2 || pq != dist(q, p) || dist(p, p) != 0 || (pq == 0) != (p.p == q.p) || dist(p, r) > pq + dist(q, r))
      ++metric_bad;
  }
  std::ostringstream d;
  d << agree << "/" << pairs << " fixture pairs agree" << (mismatch.empty() ? "" : " (first mismatch " + mismatch + ")")
    << ", metric violations " << metric_bad << "/10000, " << seconds_since(t0) << " s";
  return {agree == pairs && metric_bad == 0, d.str()};
}

Outcome criterion9() {
  auto t0 = Clock::now();
  const int n = 3, alphabet = 5;
  auto ext = covert_game(n);
  std::size_t cases = 0, bad = 0;
  FifoScheduler fifo;
  for (int sender = 1; sender <= n; ++sender)
    for (int to = 1; to <= n; ++to) {
      if (to == sender) continue;
      for (int j = 0; j < alphabet; ++j) {
        Profile p;
        p.name = "covert";
        p.mediator = passive_mediator();
        p.players.assign(n, passive_player());
        p.players[sender - 1] = symbol_sender(to, j, alphabet);
        RunOptions ro;
        ro.record_pattern = true;
        auto r = run(*ext, p, fifo, TypeProfile(n, 0), 1, ro);
        ++cases;
        if (decode_symbol(r.pattern, sender) != j) ++bad;
      }
    }
  for (int player = 1; player <= n; ++player)
    for (int j1 = 0; j1 <= n; ++j1)
      for (int j2 = 0; j2 <= n; ++j2) {
        Profile p;
        p.name = "pool";
        p.mediator = passive_mediator();
        p.players.assign(n, passive_player());
        p.players[player - 1] = pool_receiver();
        PoolScheduler sched(player, environment_broadcast_event(j1, j2, n));
        auto r = run(*ext, p, sched, TypeProfile(n, 0), 1);
        ++cases;
        if (r.outcome[player - 1] != (n + 1) * j1 + j2 || decode_broadcast((n + 1) * j1 + j2, n) != std::make_pair(j1, j2))
          ++bad;
      }
  // The parity deviation with a blackboard and with the encoded channel.
  auto fx = parity_fixture(4, 1);
  std::size_t scenarios = 0, equal = 0;
  for (auto [i, j] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{1, 4}}) {
    auto board = parity_board_adversary(i, j);
    auto enc = parity_encoded_adversary(i, j);
    auto fb = exact_outcome_fn(*fx.ext, apply_adversary(*fx.profile, board), *board.scheduler);
    auto fe = exact_outcome_fn(*fx.ext, apply_adversary(*fx.profile, enc), *enc.scheduler);
    ++scenarios;
    if (fb == fe) ++equal;
  }
  std::ostringstream d;
  d << cases << " roundtrips, " << bad << " failures; board vs encoded equal in " << equal << "/" << scenarios
    << " scenarios, " << seconds_since(t0) << " s";
  return {bad == 0 && equal == scenarios, d.str()};
}

Outcome criterion10() {
  auto t0 = Clock::now();
  auto fx = parity_fixture(2, 0);
  auto classes = enumerate_scheduler_classes(*fx.ext, *fx.profile);
  const auto& g = *fx.ext->game;
  std::set<std::string> payoffs;
  for (const auto& f : classes.functions) {
    std::string key;
    for (std::size_t t = 0; t < g.types().size(); ++t)
      for (const auto& u : expected_payoff(g, t, f[t])) key += u.get_str() + ",";
    payoffs.insert(key);
  }
  std::ostringstream d;
  d << classes.size() << " scheduler classes, " << payoffs.size() << " distinct payoff vectors ("
    << (payoffs.empty() ? "" : *payoffs.begin()) << "), " << seconds_since(t0) << " s";
  return {classes.size() > 0 && payoffs.size() == 1, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9, criterion10};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
