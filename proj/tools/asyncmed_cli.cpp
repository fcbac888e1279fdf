// asyncmed: experiment harness over the library's checkers.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "asyncmed/cheaptalk.hpp"
#include "asyncmed/errors.hpp"
#include "asyncmed/fixtures.hpp"
#include "asyncmed/naive.hpp"
#include "asyncmed/report.hpp"

using namespace asyncmed;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  unsigned workers = 1;
  std::optional<std::size_t> cap;
  std::string output;
};

fs::path workspace() {
  if (const char* w = std::getenv("ASYNCMED_WORKSPACE"); w && *w) return fs::path(w);
  return fs::current_path();
}

fs::path resolve(const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : workspace() / path;
}

Json load_json(const std::string& p, const std::string& field) {
  std::ifstream in(resolve(p));
  if (!in) throw ConfigError(field + ": cannot open " + resolve(p).string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

// Typed field access with the field path in every error.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }
  Node at(const std::string& key) const {
    if (!has(key)) throw ConfigError(path_ + "." + key + ": required field is missing");
    return Node(j_.at(key), path_ + "." + key);
  }
  const Json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  std::int64_t integer() const {
    if (!j_.is_number_integer()) throw ConfigError(path_ + ": expected an integer");
    return j_.get<std::int64_t>();
  }
  std::string text() const {
    if (!j_.is_string()) throw ConfigError(path_ + ": expected a string");
    return j_.get<std::string>();
  }
  bool flag() const {
    if (!j_.is_boolean()) throw ConfigError(path_ + ": expected true or false");
    return j_.get<bool>();
  }
  Rational rational() const {
    if (j_.is_number_integer()) return Rational(j_.get<long>());
    if (j_.is_string()) {
      try {
        return parse_rational(j_.get<std::string>());
      } catch (const std::exception&) {
      }
    }
    throw ConfigError(path_ + ": expected a rational such as \"1/10\"");
  }

  std::int64_t integer_or(const std::string& key, std::int64_t d) const { return has(key) ? at(key).integer() : d; }
  std::string text_or(const std::string& key, const std::string& d) const { return has(key) ? at(key).text() : d; }
  bool flag_or(const std::string& key, bool d) const { return has(key) ? at(key).flag() : d; }

 private:
  const Json& j_;
  std::string path_;
};

// A game side as named by the config, with the menus that belong to it.
struct Loaded {
  Json spec;
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
  std::vector<Adversary> adversaries;
  std::optional<CheapTalkProfile> ct;
  bool canonical = false;  // a mediator game whose players are canonical
  int n() const { return ext->n(); }
};

MediatorFixture fixture_by_name(const Node& g) {
  const std::string name = g.at("fixture").text();
  if (name == "parity") {
    int n = static_cast<int>(g.at("n").integer()), k = static_cast<int>(g.integer_or("k", 0));
    if (n < 1 || n <= 3 * k) throw ConfigError(g.path() + ".n: the parity game needs n > 3k");
    return parity_fixture(n, k);
  }
  if (name == "race") return race_fixture();
  if (name == "constant") return constant_fixture();
  if (name == "coin") return coin_fixture();
  if (name == "order-toy") return order_toy_fixture();
  if (name == "order-revealing") return order_revealing_fixture();
  if (name == "single-player") return single_player_fixture();
  if (name == "cotermination-failure") return cotermination_failure_fixture();
  throw ConfigError(g.path() + ".fixture: unknown fixture '" + name + "'");
}

CtOptions ct_options(const Node& c, const Flags& flags, const UnderlyingGame& g) {
  CtOptions o;
  const std::string regime = c.text_or("regime", "exact");
  if (regime == "exact") o.regime = CtRegime::Exact;
  else if (regime == "punishment") o.regime = CtRegime::Punishment;
  else if (regime == "epsilon") o.regime = CtRegime::Epsilon;
  else if (regime == "epsilon-punishment") o.regime = CtRegime::EpsilonPunishment;
  else throw ConfigError(c.path() + ".regime: expected exact, punishment, epsilon or epsilon-punishment");
  const std::string approach = c.text_or("approach", "default");
  if (approach == "ah") o.approach = CtApproach::AH;
  else if (approach == "default") o.approach = CtApproach::Default;
  else throw ConfigError(c.path() + ".approach: expected ah or default");
  o.k = static_cast<int>(c.integer_or("k", 0));
  o.t = static_cast<int>(c.integer_or("t", 0));
  if (c.has("epsilon")) o.epsilon = c.at("epsilon").rational();
  if (c.has("rho")) {
    Node r = c.at("rho");
    Action a = r.raw().is_string() && r.text() == "bottom" ? kBottom : static_cast<Action>(r.integer());
    o.rho = pure_punishment(a);
  }
  o.strong = c.flag_or("strong", false);
  o.prime = static_cast<std::uint64_t>(c.integer_or("prime", 65537));
  if (flags.cap) o.gate_cap = *flags.cap;
  o.fragile_output = c.flag_or("fragile_output", false);
  if (c.has("defaults")) {
    Node d = c.at("defaults");
    if (d.text() != "bottom" && d.text() != "first") throw ConfigError(d.path() + ": expected bottom or first");
    if (d.text() == "bottom") {
      o.defaults.resize(g.n());
      for (int i = 1; i <= g.n(); ++i)
        for (int v : g.type_values(i)) o.defaults[i - 1][v] = kBottom;
    }
  }
  return o;
}

Loaded load_side(const Node& g, const Flags& flags) {
  if (g.raw().is_string()) {
    Json inner = load_json(g.text(), g.path());
    Node n(inner, g.path());
    Loaded l = load_side(n, flags);
    return l;
  }
  Loaded l;
  l.spec = g.raw();
  if (g.has("compiled")) {
    // A compile-ct report: rebuild from its recorded parameters and check the digest.
    Json file = load_json(g.at("compiled").text(), g.path() + ".compiled");
    Node f(file, g.path() + ".compiled");
    if (f.text_or("kind", "") != "compiled-ct") throw ConfigError(f.path() + ".kind: not a compile-ct report");
    Loaded rebuilt = load_side(f.at("game"), flags);
    if (!rebuilt.ct || rebuilt.ct->digest != f.at("profile").at("digest").text())
      throw ConfigError(f.path() + ".profile.digest: does not match the rebuilt profile");
    rebuilt.spec = file.at("game");
    return rebuilt;
  }
  const std::string name = g.at("fixture").text();
  if (name == "naive-parity") {
    auto np = naive_parity_cheaptalk(static_cast<int>(g.at("n").integer()), static_cast<int>(g.at("k").integer()));
    l.ext = np.ext;
    l.profile = np.profile;
    l.adversaries = naive_menu(np);
    return l;
  }
  auto fx = fixture_by_name(g);
  l.ext = fx.ext;
  l.profile = fx.profile;
  l.canonical = name == "parity" || name == "race" || name == "constant" || name == "coin" ||
                name == "order-revealing" || name == "single-player";
  if (g.has("transform")) {
    const std::string v = g.at("transform").text();
    if (v != "mi-full" && v != "mi-weak") throw ConfigError(g.path() + ".transform: expected mi-full or mi-weak");
    MiOptions o;
    o.variant = v == "mi-full" ? MiVariant::Full : MiVariant::Weak;
    auto mi = minimally_informative_transform(fx.ext, fx.profile, o);
    l.ext = mi.ext;
    l.profile = mi.profile;
    l.canonical = false;
  }
  if (g.has("cheaptalk")) {
    auto ct = build_cheaptalk_profile(l.ext, l.profile, ct_options(g.at("cheaptalk"), flags, *l.ext->game));
    l.ext = ct.ext;
    l.profile = ct.profile;
    l.adversaries = adversary_menu_for(ct);
    l.ct = std::move(ct);
    l.canonical = false;
  }
  return l;
}

std::vector<std::shared_ptr<const Scheduler>> schedulers_from(const Node& cfg, int n) {
  auto menu = standard_menu(n);
  if (!cfg.has("schedulers")) return menu;
  Node s = cfg.at("schedulers");
  if (s.raw().is_string() && s.text() == "standard") return menu;
  if (!s.raw().is_array()) throw ConfigError(s.path() + ": expected \"standard\" or a list of scheduler names");
  std::vector<std::shared_ptr<const Scheduler>> out;
  for (std::size_t i = 0; i < s.raw().size(); ++i) {
    Node e(s.raw()[i], s.path() + "[" + std::to_string(i) + "]");
    auto name = e.text();
    auto it = std::find_if(menu.begin(), menu.end(), [&](const auto& m) { return m->name() == name; });
    if (it == menu.end()) throw ConfigError(e.path() + ": unknown scheduler '" + name + "'");
    out.push_back(*it);
  }
  if (out.empty()) throw ConfigError(s.path() + ": the scheduler menu is empty");
  return out;
}

Evaluation evaluation_from(const Node& cfg, const Flags& flags, const Loaded& side) {
  Evaluation e;
  const std::string mode = cfg.text_or("evaluation", side.ct ? "monte-carlo" : "exact");
  if (mode == "exact") e.mode = Evaluation::Mode::Exact;
  else if (mode == "monte-carlo") e.mode = Evaluation::Mode::MonteCarlo;
  else throw ConfigError(cfg.path() + ".evaluation: expected exact or monte-carlo");
  e.samples = flags.samples.value_or(static_cast<std::uint64_t>(cfg.integer_or("samples", 1000)));
  e.seed = flags.seed.value_or(static_cast<std::uint64_t>(cfg.integer_or("seed", 1)));
  e.workers = flags.workers;
  if (cfg.has("slack")) e.slack = cfg.at("slack").rational();
  return e;
}

Json names(const std::vector<std::shared_ptr<const Scheduler>>& s) {
  Json j = Json::array();
  for (const auto& x : s) j.push_back(x->name());
  return j;
}

Json names(const std::vector<Adversary>& a) {
  Json j = Json::array();
  for (const auto& x : a) j.push_back(x.name);
  return j;
}

Json payoffs_json(const RationalVector& u) {
  Json j = Json::array();
  for (const auto& v : u) j.push_back(rational_text(v));
  return j;
}

struct Outcome {
  Json report;
  bool ok = true;
};

int emit(const Outcome& o, const Flags& flags, const Node& cfg) {
  std::string out = flags.output.empty() ? cfg.text_or("output", "") : flags.output;
  const std::string text = render(o.report);
  if (out.empty()) {
    std::cout << text;
  } else {
    auto path = resolve(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    std::cout << summary(o.report);
  }
  return o.ok ? 0 : 1;
}

RobustnessQuery robustness_query(const Node& cfg, const Flags& flags, const Loaded& side) {
  RobustnessQuery q;
  q.ext = side.ext;
  q.profile = side.profile;
  q.k = static_cast<int>(cfg.integer_or("k", side.ct ? side.ct->params.k : 0));
  q.t = static_cast<int>(cfg.integer_or("t", side.ct ? side.ct->params.t : 0));
  if (cfg.has("epsilon")) q.epsilon = cfg.at("epsilon").rational();
  q.adversaries = side.adversaries;
  q.schedulers = schedulers_from(cfg, side.n());
  q.eval = evaluation_from(cfg, flags, side);
  if (cfg.has("menu") && cfg.at("menu").flag_or("reactive", false)) {
    if (!side.canonical) throw ConfigError(cfg.path() + ".menu.reactive: needs a canonical mediator game");
    ReactiveMenuOptions m;
    m.observations = static_cast<int>(cfg.at("menu").integer_or("observations", 1));
    if (flags.cap) m.cap = *flags.cap;
    for (int i = 1; i <= side.n(); ++i) q.deviations.push_back(reactive_deviations(*side.ext, i, m));
  }
  return q;
}

Json menu_json(const RobustnessQuery& q) {
  Json dev = Json::array();
  for (const auto& d : q.deviations) dev.push_back(d.size());
  return Json{{"schedulers", names(q.schedulers)}, {"adversaries", names(q.adversaries)}, {"deviations_per_player", dev}};
}

Json honest_payoffs(const RobustnessQuery& q) {
  Json j = Json::object();
  for (const auto& s : q.schedulers) j[s->name()] = payoffs_json(expected_utility(*q.ext, *q.profile, *s, {}, q.eval));
  return j;
}

Outcome cmd_check_robust(const Node& cfg, const Flags& flags) {
  Loaded side = load_side(cfg.at("game"), flags);
  RobustnessQuery q = robustness_query(cfg, flags, side);
  const std::string property = cfg.text_or("property", "kt-robustness");
  Verdict v;
  if (property == "k-resilience") v = check_k_resilience(q);
  else if (property == "t-immunity") v = check_t_immunity(q);
  else if (property == "kt-robustness") v = check_kt_robustness(q);
  else if (property == "scheduler-proof") v = check_scheduler_proof(q);
  else throw ConfigError(cfg.path() + ".property: expected k-resilience, t-immunity, kt-robustness or scheduler-proof");
  Json r{{"command", "check-robust"}, {"game", side.spec}, {"property", property}, {"k", q.k}, {"t", q.t},
         {"honest_payoff", honest_payoffs(q)}, {"menu", menu_json(q)}, {"verdict", to_json(v)}};
  return {r, v.holds};
}

Outcome cmd_check_punish(const Node& cfg, const Flags& flags) {
  Loaded side = load_side(cfg.at("game"), flags);
  Action a = kBottom;
  if (cfg.has("rho") && !(cfg.at("rho").raw().is_string() && cfg.at("rho").text() == "bottom"))
    a = static_cast<Action>(cfg.at("rho").integer());
  const int m = static_cast<int>(cfg.at("m").integer());
  auto scheds = schedulers_from(cfg, side.n());
  auto eval = evaluation_from(cfg, flags, side);
  auto res = check_punishment(*side.ext->game, *side.ext, pure_punishment(a), *side.profile, m, scheds, eval);
  Json r{{"command", "check-punish"}, {"game", side.spec}, {"rho", action_name(a)}, {"m", m},
         {"menu", Json{{"schedulers", names(scheds)}}}, {"verdict", to_json(res)}};
  return {r, res.verdict.holds};
}

Outcome cmd_transform_mi(const Node& cfg, const Flags& flags) {
  Node g = cfg.at("game");
  Json holder;
  if (g.raw().is_string()) holder = load_json(g.text(), g.path());
  Node gn = g.raw().is_string() ? Node(holder, g.path()) : g;
  auto fx = fixture_by_name(gn);
  const std::string variant = cfg.text_or("variant", "full");
  if (variant != "full" && variant != "weak") throw ConfigError(cfg.path() + ".variant: expected full or weak");
  MiOptions o;
  o.variant = variant == "full" ? MiVariant::Full : MiVariant::Weak;
  auto mi = minimally_informative_transform(fx.ext, fx.profile, o);
  auto scheds = schedulers_from(cfg, mi.n);
  auto impl = check_implementation(GameSide{mi.ext, mi.profile}, GameSide{fx.ext, fx.profile}, 0,
                                   o.variant == MiVariant::Full ? ImplementationMode::Full : ImplementationMode::Weak);
  auto info = check_minimally_informative(mi, scheds);
  std::uint64_t max_messages = 0;
  for (const auto& s : scheds)
    for (std::size_t x = 0; x < fx.ext->game->types().size(); ++x)
      for_each_exact_run(*mi.ext, *mi.profile, *s, fx.ext->game->types()[x], ExactOptions{},
                         [&](const RunResult& r, const Rational&) { max_messages = std::max(max_messages, r.messages); });
  Json r{{"command", "transform-mi"}, {"game", gn.raw()}, {"variant", variant}, {"rounds", mi.rounds},
         {"implementation", to_json(impl)},
         {"minimally_informative", Json{{"holds", info.holds}, {"witness", info.witness}, {"comparisons", info.comparisons}}},
         {"max_messages_per_run", max_messages}, {"menu", Json{{"schedulers", names(scheds)}}}};
  bool ok = impl.holds && info.holds;
  if (o.variant == MiVariant::Full) {
    auto sur = surjection_check(mi);
    r["surjection"] = Json{{"holds", sur.holds}, {"orders_realized", sur.orders_realized}, {"uncovered", sur.uncovered}};
    ok = ok && sur.holds;
  }
  return {r, ok};
}

Outcome cmd_compile_ct(const Node& cfg, const Flags& flags) {
  Node g = cfg.at("game");
  if (!g.raw().is_string() && !g.has("cheaptalk")) throw ConfigError(g.path() + ".cheaptalk: required field is missing");
  Loaded side = load_side(g, flags);
  if (!side.ct) throw ConfigError(g.path() + ".cheaptalk: required field is missing");
  Json r{{"kind", "compiled-ct"}, {"command", "compile-ct"}, {"game", side.spec}, {"profile", to_json(*side.ct)}};
  return {r, true};
}

const Adversary* find_adversary(const std::vector<Adversary>& menu, const std::string& name) {
  for (const auto& a : menu)
    if (a.name == name) return &a;
  return nullptr;
}

Outcome cmd_run(const Node& cfg, const Flags& flags) {
  Loaded side = load_side(cfg.at("game"), flags);
  auto scheds = schedulers_from(cfg, side.n());
  auto eval = evaluation_from(cfg, flags, side);
  Profile profile = *side.profile;
  std::shared_ptr<const Scheduler> forced;
  std::set<int> T;
  std::string adversary = cfg.text_or("adversary", "");
  if (!adversary.empty()) {
    const Adversary* a = find_adversary(side.adversaries, adversary);
    if (!a) throw ConfigError(cfg.path() + ".adversary: '" + adversary + "' is not in the menu");
    profile = apply_adversary(profile, *a);
    forced = a->scheduler;
    T = a->members();
  }
  const auto& types = side.ext->game->types();
  const std::size_t x = static_cast<std::size_t>(cfg.integer_or("types", 0));
  if (x >= types.size()) throw ConfigError(cfg.path() + ".types: type profile index out of range");
  bool ok = true;
  Json per = Json::object();
  for (const auto& s0 : scheds) {
    const Scheduler& s = forced ? *forced : *s0;
    Json cell;
    if (eval.mode == Evaluation::Mode::Exact) {
      cell["distribution"] = to_json(exact_distribution(*side.ext, profile, s, types[x]));
    } else {
      std::map<ActionProfile, std::uint64_t> counts;
      std::uint64_t lo = UINT64_MAX, hi = 0, total = 0, deadlocks = 0, non_coterminating = 0;
      for (std::uint64_t i = 0; i < eval.samples; ++i) {
        auto r = run(*side.ext, profile, s, types[x], run_seed(eval.seed, i), eval.sampled);
        ++counts[r.outcome];
        lo = std::min(lo, r.messages);
        hi = std::max(hi, r.messages);
        total += r.messages;
        deadlocks += r.deadlock ? 1 : 0;
        non_coterminating += coterminates(r, T) ? 0 : 1;
      }
      Json hist = Json::object();
      for (const auto& [a, c] : counts) hist[profile_name(a)] = c;
      cell = Json{{"samples", eval.samples}, {"histogram", hist}, {"messages_min", lo}, {"messages_max", hi},
                  {"messages_mean", static_cast<double>(total) / static_cast<double>(eval.samples)},
                  {"deadlocks", deadlocks}, {"cotermination_violations", non_coterminating}};
      if (side.ct && adversary.empty()) {
        cell["budget_limit"] = side.ct->budget.limit();
        cell["budget_constant"] = side.ct->budget.constant(hi);
        ok = ok && hi <= side.ct->budget.limit();
      }
    }
    per[s.name()] = cell;
    if (forced) break;
  }
  Json r{{"command", "run"}, {"game", side.spec}, {"adversary", adversary}, {"types", x},
         {"seed", eval.seed}, {"schedulers", per}};
  return {r, ok};
}

Outcome cmd_check_relation(const Node& cfg, const Flags& flags) {
  Loaded a = load_side(cfg.at("a"), flags);
  Loaded b = load_side(cfg.at("b"), flags);
  const std::string rel = cfg.text_or("relation", "implementation");
  const Rational eps = cfg.has("epsilon") ? cfg.at("epsilon").rational() : Rational(0);
  const int t = static_cast<int>(cfg.integer_or("t", 0));
  auto eval = evaluation_from(cfg, flags, a);
  GameSide A{a.ext, a.profile}, B{b.ext, b.profile};
  // Sides without cheap talk are compared over their enumerated scheduler
  // classes; a listed menu adds to them.
  auto menu_for = [&](const Loaded& side) {
    if (!side.ct && !cfg.has("schedulers")) return std::vector<std::shared_ptr<const Scheduler>>{};
    return schedulers_from(cfg, side.n());
  };
  RelationVerdict v;
  if (rel == "implementation" || rel == "weak-implementation") {
    v = check_implementation(A, B, eps, rel == "implementation" ? ImplementationMode::Full : ImplementationMode::Weak,
                             {}, schedulers_from(cfg, a.n()), eval);
  } else if (rel == "bisimulation") {
    AdversarySide sa{A, a.adversaries, menu_for(a), !a.ct, {}};
    AdversarySide sb{B, b.adversaries, menu_for(b), !b.ct, {}};
    v = check_bisimulation(sa, sb, t, eps, eval);
  } else if (rel == "emulation") {
    EmulationQuery q;
    q.cheap = AdversarySide{A, a.adversaries, menu_for(a), !a.ct, {}};
    q.mediated = B;
    if (a.ct) {
      q.H = a.ct->H;
    } else {
      if (a.n() != b.n()) throw ConfigError(cfg.path() + ".b: both sides need the same number of players");
      for (int i = 0; i < a.n(); ++i) q.H[a.profile->players[i].name] = b.profile->players[i];
    }
    q.t = t;
    q.eps = eps;
    q.eval = eval;
    q.mediated_fair = menu_for(b);
    v = check_emulation(q);
  } else {
    throw ConfigError(cfg.path() + ".relation: expected implementation, weak-implementation, bisimulation or emulation");
  }
  Json r{{"command", "check-relation"}, {"a", a.spec}, {"b", b.spec}, {"relation", rel}, {"t", t},
         {"epsilon", rational_text(eps)}, {"verdict", to_json(v)}};
  return {r, v.holds};
}

// Everything needed to rerun a robustness witness.
Json witness_file(const Loaded& side, const RobustnessQuery& q, const Verdict& v, const std::string& property) {
  return Json{{"kind", "witness"},
              {"game", side.spec},
              {"property", property},
              {"k", q.k},
              {"t", q.t},
              {"schedulers", names(q.schedulers)},
              {"evaluation", Json{{"mode", q.eval.mode == Evaluation::Mode::Exact ? "exact" : "monte-carlo"},
                                  {"samples", q.eval.samples},
                                  {"seed", q.eval.seed}}},
              {"witness", to_json(*v.witness)}};
}

Outcome cmd_fuzz(const Node& cfg, const Flags& flags) {
  Loaded side = load_side(cfg.at("game"), flags);
  if (!side.ct) throw ConfigError(cfg.path() + ".game: fuzzing needs a cheap-talk profile");
  RobustnessQuery q = robustness_query(cfg, flags, side);
  if (!cfg.has("schedulers")) q.schedulers = {std::make_shared<RandomScheduler>()};
  q.eval.mode = Evaluation::Mode::MonteCarlo;

  Json r{{"command", "fuzz"}, {"game", side.spec}, {"menu", menu_json(q)}, {"seed", q.eval.seed},
         {"samples", q.eval.samples}};
  bool ok = true;
  Json witnesses = Json::array();
  std::vector<std::pair<std::string, Verdict>> checks;
  if (q.t > 0) checks.emplace_back("t-immunity", check_t_immunity(q));
  if (q.k > 0) checks.emplace_back("k-resilience", check_k_resilience(q));
  for (const auto& [name, v] : checks) {
    r[name] = to_json(v);
    ok = ok && v.holds;
    if (v.witness) {
      auto w = witness_file(side, q, v, name);
      w["replayed_gap"] = rational_text(replay_gap(q, *v.witness));
      witnesses.push_back(w);
    }
  }
  CoterminationQuery cq;
  cq.game = GameSide{side.ext, side.profile};
  cq.adversaries = side.adversaries;
  cq.schedulers = q.schedulers;
  cq.runs_per_cell = q.eval.samples;
  cq.seed = q.eval.seed;
  cq.workers = flags.workers;
  if (side.ct->params.epsilon) cq.epsilon = side.ct->params.epsilon;
  auto cv = check_cotermination(cq);
  r["cotermination"] = to_json(cv);
  ok = ok && cv.holds;
  r["witnesses"] = witnesses;
  const std::string wpath = cfg.text_or("witness_output", "");
  if (!wpath.empty() && !witnesses.empty()) {
    auto path = resolve(wpath);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << render(witnesses[0]);
  }
  return {r, ok};
}

PartialTypes types_from(const Node& n) {
  PartialTypes x;
  for (const auto& [k, v] : n.raw().items()) x[std::stoi(k)] = v.get<int>();
  return x;
}

// Replays a witness file without the config that produced it.
Outcome replay(const Node& w, const Flags& flags) {
  Loaded side = load_side(w.at("game"), flags);
  Json q_cfg{{"k", w.at("k").integer()}, {"t", w.at("t").integer()}, {"schedulers", w.at("schedulers").raw()},
             {"evaluation", w.at("evaluation").at("mode").text()},
             {"samples", w.at("evaluation").at("samples").integer()},
             {"seed", w.at("evaluation").at("seed").integer()}};
  Flags plain;
  plain.workers = flags.workers;
  Node qn(q_cfg, w.path());
  RobustnessQuery q = robustness_query(qn, plain, side);
  Node wn = w.at("witness");
  Witness wit;
  wit.player = static_cast<int>(wn.at("player").integer());
  wit.types = types_from(wn.at("types"));
  wit.types_rhs = types_from(wn.at("types_rhs"));
  const std::string dev = wn.at("deviation").text();
  const Adversary* a = find_adversary(side.adversaries, dev);
  if (!a) throw ConfigError(wn.path() + ".deviation: '" + dev + "' is not in the rebuilt menu");
  wit.deviated = std::make_shared<Profile>(apply_adversary(*side.profile, *a));
  wit.baseline = side.profile;
  auto by_name = [&](const std::string& name) -> std::shared_ptr<const Scheduler> {
    if (a->scheduler && a->scheduler->name() == name) return a->scheduler;
    for (const auto& s : q.schedulers)
      if (s->name() == name) return s;
    throw ConfigError(wn.path() + ": unknown scheduler '" + name + "'");
  };
  wit.sched_lhs = by_name(wn.at("scheduler").text());
  wit.sched_rhs = by_name(wn.at("scheduler_rhs").text());
  const Rational recorded = wn.at("gap").rational();
  const Rational gap = replay_gap(q, wit);
  Json r{{"command", "report"}, {"replay", Json{{"recorded_gap", rational_text(recorded)},
                                                {"replayed_gap", rational_text(gap)},
                                                {"reproduced", gap == recorded}}}};
  return {r, gap == recorded};
}

Outcome cmd_report(const Node& cfg, const Flags& flags) {
  if (cfg.text_or("kind", "") == "witness") return replay(cfg, flags);
  // Any other report: restate its summary and pass on its verdicts.
  bool ok = true;
  std::function<void(const Json&)> scan = [&](const Json& j) {
    if (j.is_object()) {
      if (j.contains("holds") && j["holds"].is_boolean() && !j["holds"].get<bool>()) ok = false;
      for (const auto& [k, v] : j.items()) scan(v);
    } else if (j.is_array()) {
      for (const auto& v : j) scan(v);
    }
  };
  scan(cfg.raw());
  return {cfg.raw(), ok};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asyncmed: checkers for mediators and cheap talk in asynchronous games"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  std::uint64_t seed = 0, samples = 0;
  std::size_t cap = 0;
  app.add_option("--seed", seed, "Seed for every randomized step");
  app.add_option("--samples", samples, "Samples per Monte-Carlo estimate");
  app.add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cap", cap, "Menu and circuit size cap");
  app.add_option("-o,--output", flags.output, "Report path (default: stdout)");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"check-robust", "k-resilience, t-immunity or (k,t)-robustness over a menu"},
      {"check-punish", "punishment strategy prerequisite"},
      {"transform-mi", "minimally informative transform with its checks"},
      {"compile-ct", "compile a mediator to a cheap-talk profile"},
      {"run", "sample or enumerate runs"},
      {"check-relation", "implementation, bisimulation or emulation"},
      {"fuzz", "adversary campaign against a cheap-talk profile"},
      {"report", "summarize a report or replay a witness file"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("config", flags.config, "Config, report or witness file (JSON)")->required();
    subs[name] = s;
  }
  CLI11_PARSE(app, argc, argv);
  if (app.count("--seed")) flags.seed = seed;
  if (app.count("--samples")) flags.samples = samples;
  if (app.count("--cap")) flags.cap = cap;

  try {
    Json cfg = load_json(flags.config, "config");
    Node root(cfg, "config");
    Outcome o;
    if (subs["check-robust"]->parsed()) o = cmd_check_robust(root, flags);
    else if (subs["check-punish"]->parsed()) o = cmd_check_punish(root, flags);
    else if (subs["transform-mi"]->parsed()) o = cmd_transform_mi(root, flags);
    else if (subs["compile-ct"]->parsed()) o = cmd_compile_ct(root, flags);
    else if (subs["run"]->parsed()) o = cmd_run(root, flags);
    else if (subs["check-relation"]->parsed()) o = cmd_check_relation(root, flags);
    else if (subs["fuzz"]->parsed()) o = cmd_fuzz(root, flags);
    else o = cmd_report(root, flags);
    return emit(o, flags, root);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
