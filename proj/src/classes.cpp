#include "asyncmed/classes.hpp"

#include <map>

namespace asyncmed {

namespace {

struct World {
  Rational weight;
  std::size_t type;
  Run run;
};

struct Option {
  OutcomeFn fn;
  std::map<MessagePattern, ChannelKey> table;
};

class Enumerator {
 public:
  Enumerator(const ExtensionGame& ext, const ClassOptions& opt) : ext_(ext), opt_(opt) {}

  std::vector<Option> solve(std::vector<World>& node) {
    if (++nodes_ > opt_.node_cap) throw EnumerationOverflow("scheduler-class enumeration exceeded the node cap", nodes_);
    Option fixed = empty_option();
    std::vector<World*> live;
    for (auto& w : node) {
      if (w.run.finished()) {
        Run copy(w.run);
        RunResult r = copy.finish();
        fixed.fn[w.type].p[r.outcome] += w.weight;
      } else {
        live.push_back(&w);
      }
    }
    if (live.empty()) return {fixed};
    const MessagePattern key = live.front()->run.pattern();
    const auto pending = live.front()->run.pending();
    std::vector<Option> result;
    for (std::size_t c = 0; c < pending.size(); ++c) {
      std::map<MessagePattern, std::vector<World>> children;
      for (World* w : live) {
        TapeCoins tape;
        do {
          tape.rewind();
          Run copy(w->run);
          copy.set_coins(&tape);
          copy.apply(Choice::deliver(c), false);
          copy.advance_to_choice();
          Rational weight = w->weight * tape.probability();
          children[copy.pattern()].push_back(World{weight, w->type, copy});
        } while (tape.advance());
      }
      std::vector<Option> acc{fixed};
      acc.front().table[key] = ChannelKey{pending[c].from, pending[c].to, pending[c].seq};
      for (auto& [pat, child] : children) {
        std::vector<Option> sub = solve(child);
        std::vector<Option> next;
        for (const auto& a : acc)
          for (const auto& b : sub) next.push_back(combine(a, b));
        acc = dedupe(std::move(next));
      }
      for (auto& o : acc) result.push_back(std::move(o));
    }
    return dedupe(std::move(result));
  }

  Option empty_option() const {
    Option o;
    o.fn.resize(ext_.game->types().size());
    return o;
  }

  static Option combine(const Option& a, const Option& b) {
    Option o = a;
    for (std::size_t t = 0; t < o.fn.size(); ++t)
      for (const auto& [k, v] : b.fn[t].p) o.fn[t].p[k] += v;
    for (const auto& [k, v] : b.table) o.table.emplace(k, v);
    return o;
  }

  static std::vector<Option> dedupe(std::vector<Option> in) {
    std::vector<Option> out;
    for (auto& o : in) {
      bool seen = false;
      for (const auto& e : out)
        if (e.fn == o.fn) {
          seen = true;
          break;
        }
      if (!seen) out.push_back(std::move(o));
    }
    return out;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  const ExtensionGame& ext_;
  const ClassOptions& opt_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

SchedulerClasses enumerate_scheduler_classes(const ExtensionGame& ext, const Profile& profile,
                                             const ClassOptions& opt) {
  Enumerator en(ext, opt);
  RunOptions ro;
  ro.step_budget = opt.step_budget;
  ro.record_log = false;
  ro.record_pattern = true;
  std::map<MessagePattern, std::vector<World>> roots;
  const auto& types = ext.game->types();
  for (std::size_t t = 0; t < types.size(); ++t) {
    TapeCoins tape;
    do {
      tape.rewind();
      Run r(ext, profile, types[t], &tape, ro);
      r.start();
      r.advance_to_choice();
      roots[r.pattern()].push_back(World{tape.probability(), t, r});
    } while (tape.advance());
  }
  std::vector<Option> acc{en.empty_option()};
  for (auto& [pat, node] : roots) {
    std::vector<Option> sub = en.solve(node);
    std::vector<Option> next;
    for (const auto& a : acc)
      for (const auto& b : sub) next.push_back(Enumerator::combine(a, b));
    acc = Enumerator::dedupe(std::move(next));
  }
  SchedulerClasses out;
  out.nodes = en.nodes();
  for (auto& o : acc) {
    out.functions.push_back(std::move(o.fn));
    out.representatives.emplace_back(std::move(o.table));
  }
  return out;
}

}  // namespace asyncmed
