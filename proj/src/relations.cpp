#include "asyncmed/relations.hpp"

#include <boost/math/special_functions/beta.hpp>

#include "asyncmed/schedulers.hpp"

namespace asyncmed {

OutcomeFn mask(const OutcomeFn& f, const std::set<int>& T) {
  if (T.empty()) return f;
  OutcomeFn out(f.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    out[t].exact = f[t].exact;
    out[t].samples = f[t].samples;
    for (const auto& [a, q] : f[t].p) {
      ActionProfile b = a;
      for (int i : T) b.at(i - 1) = kHidden;
      out[t].p[b] += q;
    }
  }
  return out;
}

OutcomeFn outcome_fn(const ExtensionGame& ext, const Profile& profile, const Scheduler& s, const Evaluation& eval) {
  const auto& g = *ext.game;
  OutcomeFn out(g.types().size());
  for (std::size_t t = 0; t < g.types().size(); ++t) {
    if (g.prior()[t] == 0) continue;
    out[t] = eval.mode == Evaluation::Mode::Exact
                 ? exact_distribution(ext, profile, s, g.types()[t], eval.exact)
                 : sample_distribution(ext, profile, s, g.types()[t], eval.samples, run_seed(eval.seed, t), eval.sampled);
  }
  return out;
}

RelationVerdict covered(const std::vector<LabeledFn>& from, const std::vector<LabeledFn>& to, const Rational& eps) {
  RelationVerdict v;
  for (const auto& f : from) {
    std::optional<Rational> best;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < to.size(); ++j) {
      if (to[j].fn.size() != f.fn.size()) throw ContractError("outcome functions over different input spaces");
      ++v.compared;
      Rational d = dist(f.fn, to[j].fn);
      if (!best || d < *best) {
        best = d;
        arg = j;
        if (d == 0) break;
      }
    }
    if (!best) {
      v.holds = false;
      if (v.witness.empty()) v.witness = f.label + " has no candidate to match";
      continue;
    }
    if (*best > v.worst) v.worst = *best;
    std::vector<Rational> row;
    for (std::size_t t = 0; t < f.fn.size(); ++t) row.push_back(dist(f.fn[t], to[arg].fn[t]));
    v.per_input.push_back(std::move(row));
    v.matches.emplace_back(f.label, to[arg].label);
    if (*best > eps) {
      v.holds = false;
      if (v.witness.empty())
        v.witness = f.label + " is at distance " + to_string(*best) + " from its nearest match " + to[arg].label;
    }
  }
  return v;
}

namespace {

std::vector<LabeledFn> label(const std::vector<OutcomeFn>& fns, const std::string& prefix) {
  std::vector<LabeledFn> out;
  for (std::size_t i = 0; i < fns.size(); ++i) out.push_back({prefix + " class " + std::to_string(i), fns[i]});
  return out;
}

RelationVerdict merge(RelationVerdict a, const RelationVerdict& b) {
  a.holds = a.holds && b.holds;
  if (b.worst > a.worst) a.worst = b.worst;
  if (a.witness.empty()) a.witness = b.witness;
  a.matches.insert(a.matches.end(), b.matches.begin(), b.matches.end());
  a.per_input.insert(a.per_input.end(), b.per_input.begin(), b.per_input.end());
  a.compared += b.compared;
  a.fell_back = a.fell_back || b.fell_back;
  if (b.mode != "exact") a.mode = b.mode;
  return a;
}

RelationVerdict implementation(const std::vector<LabeledFn>& a, const std::vector<LabeledFn>& b, const Rational& eps,
                               ImplementationMode mode) {
  RelationVerdict v = covered(a, b, eps);
  if (mode == ImplementationMode::Full) v = merge(std::move(v), covered(b, a, eps));
  return v;
}

}  // namespace

RelationVerdict check_implementation(const std::vector<OutcomeFn>& implementing,
                                     const std::vector<OutcomeFn>& implemented, const Rational& eps,
                                     ImplementationMode mode) {
  return implementation(label(implementing, "implementing"), label(implemented, "implemented"), eps, mode);
}

std::vector<LabeledFn> class_functions(const GameSide& side, const ClassOptions& opt) {
  auto classes = enumerate_scheduler_classes(*side.ext, *side.profile, opt);
  return label(classes.functions, side.profile->name);
}

RelationVerdict check_implementation(const GameSide& implementing, const GameSide& implemented, const Rational& eps,
                                     ImplementationMode mode, const ClassOptions& classes,
                                     const std::vector<std::shared_ptr<const Scheduler>>& fallback,
                                     const Evaluation& sampled) {
  try {
    return implementation(class_functions(implementing, classes), class_functions(implemented, classes), eps, mode);
  } catch (const EnumerationOverflow&) {
  }
  auto menu = fallback.empty() ? standard_menu(implementing.ext->n()) : fallback;
  Evaluation eval = sampled;
  eval.mode = Evaluation::Mode::MonteCarlo;
  std::vector<LabeledFn> a, b;
  for (const auto& s : menu) {
    a.push_back({implementing.profile->name + " " + s->name(), outcome_fn(*implementing.ext, *implementing.profile, *s, eval)});
    b.push_back({implemented.profile->name + " " + s->name(), outcome_fn(*implemented.ext, *implemented.profile, *s, eval)});
  }
  RelationVerdict v = implementation(a, b, eps, mode);
  v.mode = "sampled";
  v.fell_back = true;
  return v;
}

namespace {

// Output functions of every plan with coalition exactly T.
std::vector<LabeledFn> side_functions(const AdversarySide& side, const std::set<int>& T, const Evaluation& eval) {
  std::vector<Adversary> plans;
  if (T.empty()) plans.push_back(Adversary{"none", {}, {}, {}, nullptr});
  for (const auto& a : side.adversaries)
    if (a.members() == T && !(T.empty() && a.strategies.empty() && !a.scheduler)) plans.push_back(a);
  std::vector<LabeledFn> out;
  for (const auto& a : plans) {
    auto p = std::make_shared<Profile>(apply_adversary(*side.game.profile, a));
    std::vector<std::shared_ptr<const Scheduler>> menu =
        a.scheduler ? std::vector<std::shared_ptr<const Scheduler>>{a.scheduler} : side.schedulers;
    for (const auto& s : menu)
      out.push_back({a.name + "/" + s->name(), mask(outcome_fn(*side.game.ext, *p, *s, eval), T)});
    if (side.enumerate_classes && !a.scheduler) {
      auto classes = enumerate_scheduler_classes(*side.game.ext, *p, side.classes);
      for (std::size_t i = 0; i < classes.size(); ++i)
        out.push_back({a.name + "/class " + std::to_string(i), mask(classes.functions[i], T)});
    }
  }
  return out;
}

}  // namespace

RelationVerdict check_bisimulation(const AdversarySide& a, const AdversarySide& b, int t, const Rational& eps,
                                   const Evaluation& eval) {
  const int n = a.game.ext->n();
  if (b.game.ext->n() != n) throw ContractError("bisimulation between games with different player counts");
  RelationVerdict v;
  v.mode = eval.mode == Evaluation::Mode::Exact ? "exact" : "sampled";
  for (const auto& T : subsets_up_to(n, t, 0)) {
    auto fa = side_functions(a, T, eval);
    auto fb = side_functions(b, T, eval);
    if (fa.empty() && fb.empty()) continue;
    v = merge(std::move(v), implementation(fa, fb, eps, ImplementationMode::Full));
  }
  return v;
}

RelationVerdict check_emulation(const EmulationQuery& q) {
  const auto& cheap = q.cheap.game;
  const auto& med = q.mediated;
  const int n = cheap.ext->n();
  RelationVerdict v;
  v.mode = q.eval.mode == Evaluation::Mode::Exact ? "exact" : "sampled";
  auto h = [&](const StrategySpec& s) -> const StrategySpec& {
    auto it = q.H.find(s.name);
    if (it == q.H.end()) throw ContractError("H is not defined on strategy '" + s.name + "'");
    return it->second;
  };
  for (int i = 1; i <= n; ++i)
    if (h(cheap.profile->players[i - 1]).name != med.profile->players[i - 1].name) {
      v.holds = false;
      v.witness = "H does not map player " + std::to_string(i) + "'s strategy to the mediated one";
      return v;
    }

  std::vector<Adversary> plans{Adversary{"none", {}, {}, {}, nullptr}};
  for (const auto& a : q.cheap.adversaries)
    if (static_cast<int>(a.members().size()) <= q.t) plans.push_back(a);

  for (const auto& a : plans) {
    std::set<int> T = a.members();
    // The mediated-side coalition plays H of each member's strategy.
    Adversary mapped{a.name + "/H", {}, T, {}, nullptr};
    for (const auto& [i, s] : a.strategies) mapped.strategies.emplace(i, h(s));
    auto mp = std::make_shared<Profile>(apply_adversary(*med.profile, mapped));
    bool relaxed_ok = q.variant == EmulationVariant::Relaxed ||
                      (q.variant == EmulationVariant::TT && static_cast<int>(T.size()) > q.t_prime);
    std::vector<LabeledFn> targets;
    for (const auto& s : q.mediated_fair)
      targets.push_back({"mediated/" + s->name(), mask(outcome_fn(*med.ext, *mp, *s, q.eval), T)});
    if (relaxed_ok)
      for (const auto& s : q.mediated_relaxed)
        targets.push_back({"mediated/" + s->name(), mask(outcome_fn(*med.ext, *mp, *s, q.eval), T)});
    if (q.enumerate_mediated_classes) {
      auto classes = enumerate_scheduler_classes(*med.ext, *mp, q.classes);
      for (std::size_t i = 0; i < classes.size(); ++i)
        targets.push_back({"mediated/class " + std::to_string(i), mask(classes.functions[i], T)});
    }

    AdversarySide one = q.cheap;
    one.adversaries = {a};
    auto sources = side_functions(one, T, q.eval);
    if (!T.empty() || a.scheduler || !a.strategies.empty()) {
      // side_functions adds the empty plan for T = {}; keep only this plan's rows.
      std::vector<LabeledFn> mine;
      for (auto& f : sources)
        if (f.label.rfind(a.name + "/", 0) == 0) mine.push_back(std::move(f));
      sources = std::move(mine);
    }
    v = merge(std::move(v), covered(sources, targets, q.eps));
  }
  return v;
}

bool coterminates(const RunResult& r, const std::set<int>& T) {
  bool some = false, all = true;
  for (std::size_t i = 0; i < r.halted.size(); ++i) {
    if (T.count(static_cast<int>(i) + 1)) continue;
    if (r.halted[i]) some = true;
    else all = false;
  }
  return all || !some;
}

double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0 || k >= n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), confidence);
}

double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0 || k == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), 1.0 - confidence);
}

CoterminationVerdict check_cotermination(const CoterminationQuery& q) {
  const auto& g = *q.game.ext->game;
  std::vector<std::size_t> support;
  for (std::size_t t = 0; t < g.types().size(); ++t)
    if (g.prior()[t] > 0) support.push_back(t);

  struct CellSpec {
    Adversary plan;
    std::shared_ptr<const Profile> profile;
    std::shared_ptr<const Scheduler> sched;
  };
  std::vector<Adversary> plans{Adversary{"none", {}, {}, {}, nullptr}};
  plans.insert(plans.end(), q.adversaries.begin(), q.adversaries.end());
  std::vector<CellSpec> cells;
  for (const auto& a : plans) {
    auto p = std::make_shared<Profile>(apply_adversary(*q.game.profile, a));
    if (a.scheduler) cells.push_back({a, p, a.scheduler});
    else
      for (const auto& s : q.schedulers) cells.push_back({a, p, s});
  }

  struct CellResult {
    std::uint64_t violations = 0;
    std::optional<std::pair<std::uint64_t, std::size_t>> first;  // seed, type index
  };
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), q.workers, [&](std::size_t c) {
    const auto& cell = cells[c];
    auto T = cell.plan.members();
    for (std::uint64_t j = 0; j < q.runs_per_cell; ++j) {
      std::uint64_t seed = run_seed(q.seed, c * q.runs_per_cell + j);
      std::size_t t = support[j % support.size()];
      RunResult r = run(*q.game.ext, *cell.profile, *cell.sched, g.types()[t], seed, q.run);
      if (coterminates(r, T)) continue;
      ++results[c].violations;
      if (!results[c].first) results[c].first = std::make_pair(seed, t);
    }
  });

  CoterminationVerdict v;
  v.cells = cells.size();
  v.runs = cells.size() * q.runs_per_cell;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    v.violations += results[c].violations;
    if (results[c].first && v.witness.empty()) {
      v.witness_seed = results[c].first->first;
      v.witness = cells[c].plan.name + " under " + cells[c].sched->name() + " with types " +
                  profile_name(g.types()[results[c].first->second]) + " and seed " + std::to_string(v.witness_seed);
    }
  }
  v.rate = v.runs ? static_cast<double>(v.violations) / static_cast<double>(v.runs) : 0.0;
  v.cp_upper = clopper_pearson_upper(v.violations, v.runs);
  if (q.epsilon) v.holds = v.cp_upper <= to_double(*q.epsilon);
  else v.holds = v.violations == 0;
  return v;
}

}  // namespace asyncmed
