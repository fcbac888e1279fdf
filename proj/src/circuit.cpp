#include "asyncmed/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "asyncmed/schedulers.hpp"

namespace asyncmed {

const ActionProfile& DecisionTable::at(const TypeProfile& x, const std::vector<std::uint64_t>& coins) const {
  auto it = table.find({x, coins});
  if (it == table.end()) throw TableMiss("no decision recorded for types " + profile_name(x));
  return it->second;
}

namespace {

class RecordingCoins : public CoinSource {
 public:
  explicit RecordingCoins(TapeCoins& tape) : tape_(tape) {}
  std::uint64_t draw(int who, std::uint64_t arity) override {
    std::uint64_t v = tape_.draw(who, arity);
    arity_.push_back(arity);
    values_.push_back(v);
    return v;
  }
  void clear() {
    arity_.clear();
    values_.clear();
  }
  const std::vector<std::uint64_t>& arity() const { return arity_; }
  const std::vector<std::uint64_t>& values() const { return values_; }

 private:
  TapeCoins& tape_;
  std::vector<std::uint64_t> arity_;
  std::vector<std::uint64_t> values_;
};

int log2_exact(std::uint64_t a) {
  int m = 0;
  while ((1ull << m) < a) ++m;
  if ((1ull << m) != a) throw ParameterError("coin of arity " + std::to_string(a) + " is not a power of two");
  return m;
}

}  // namespace

DecisionTable decision_table(const ExtensionGame& ext, const Profile& profile) {
  const auto& g = *ext.game;
  DecisionTable t;
  t.n = g.n();
  for (int i = 1; i <= g.n(); ++i) {
    t.type_values.push_back(g.type_values(i));
    t.actions.push_back(g.actions(i));
  }
  FifoScheduler fifo;
  RunOptions ro;
  ro.record_log = false;
  bool first = true;
  for (const auto& x : g.types()) {
    TapeCoins tape;
    do {
      tape.rewind();
      RecordingCoins rec(tape);
      RunResult r = run_with_coins(ext, profile, fifo, x, rec, ro);
      for (std::size_t i = 0; i < r.acted.size(); ++i)
        if (!r.acted[i]) throw ContractError("mediator leaves player " + std::to_string(i + 1) + " without a move");
      if (first) {
        t.coin_arity = rec.arity();
        first = false;
      } else if (rec.arity() != t.coin_arity) {
        throw ContractError("coin usage differs between runs; the decision function is not a fixed table");
      }
      t.table[{x, rec.values()}] = r.outcome;
    } while (tape.advance());
  }
  return t;
}

std::vector<int> coin_bits_of(const std::vector<std::uint64_t>& arity, const std::vector<std::uint64_t>& coins) {
  std::vector<int> bits;
  for (std::size_t c = 0; c < arity.size(); ++c) {
    int m = log2_exact(arity[c]);
    for (int b = 0; b < m; ++b) bits.push_back(static_cast<int>((coins.at(c) >> b) & 1));
  }
  return bits;
}

std::size_t MediatorCircuit::multiplications() const {
  return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == Gate::Kind::Mul; }));
}

std::vector<int> MediatorCircuit::depths() const {
  std::vector<int> d(gates.size(), 0);
  for (std::size_t w = 0; w < gates.size(); ++w) {
    const Gate& g = gates[w];
    switch (g.kind) {
      case Gate::Kind::Add: d[w] = std::max(d[g.a], d[g.b]); break;
      case Gate::Kind::Mul: d[w] = std::max(d[g.a], d[g.b]) + 1; break;
      case Gate::Kind::Scale: d[w] = d[g.a]; break;
      default: d[w] = 0;
    }
  }
  return d;
}

std::vector<std::uint64_t> MediatorCircuit::evaluate(const std::vector<std::uint64_t>& inputs,
                                                     const std::vector<int>& bits) const {
  PrimeField F(p);
  std::vector<std::uint64_t> v(gates.size(), 0);
  for (std::size_t w = 0; w < gates.size(); ++w) {
    const Gate& g = gates[w];
    switch (g.kind) {
      case Gate::Kind::Const: v[w] = g.c; break;
      case Gate::Kind::Input: v[w] = inputs.at(g.index - 1) % p; break;
      case Gate::Kind::CoinBit: v[w] = static_cast<std::uint64_t>(bits.at(g.index)); break;
      case Gate::Kind::Add: v[w] = F.add(v[g.a], v[g.b]); break;
      case Gate::Kind::Mul: v[w] = F.mul(v[g.a], v[g.b]); break;
      case Gate::Kind::Scale: v[w] = F.mul(g.c, v[g.a]); break;
    }
  }
  std::vector<std::uint64_t> out;
  for (int w : outputs) out.push_back(v[w]);
  return out;
}

ActionProfile MediatorCircuit::actions_for(const TypeProfile& x, const std::vector<std::uint64_t>& coins) const {
  std::vector<std::uint64_t> in(n);
  for (int j = 0; j < n; ++j) {
    auto it = std::find(type_values[j].begin(), type_values[j].end(), x.at(j));
    if (it == type_values[j].end()) throw ParameterError("type outside the player's type set");
    in[j] = static_cast<std::uint64_t>(it - type_values[j].begin());
  }
  auto out = evaluate(in, coin_bits_of(coin_arity, coins));
  ActionProfile a(n);
  for (int i = 0; i < n; ++i) a[i] = out[i] < actions[i].size() ? actions[i][out[i]] : kBottom;
  return a;
}

std::string MediatorCircuit::digest() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(p);
  mix(static_cast<std::uint64_t>(n));
  for (const auto& g : gates) {
    mix(static_cast<std::uint64_t>(g.kind));
    mix(g.c);
    mix(static_cast<std::uint64_t>(g.a + 1));
    mix(static_cast<std::uint64_t>(g.b + 1));
    mix(static_cast<std::uint64_t>(g.index));
  }
  for (int w : outputs) mix(static_cast<std::uint64_t>(w));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class Builder {
 public:
  Builder(MediatorCircuit& c, std::size_t cap) : c_(c), cap_(cap) {}
  int add(Gate g) {
    if (c_.gates.size() >= cap_)
      throw CircuitTooLarge("decision function needs more than the gate cap of " + std::to_string(cap_) + " gates", cap_);
    c_.gates.push_back(g);
    return static_cast<int>(c_.gates.size()) - 1;
  }
  int constant(std::uint64_t v) {
    auto it = consts_.find(v);
    if (it != consts_.end()) return it->second;
    Gate g;
    g.kind = Gate::Kind::Const;
    g.c = v;
    return consts_[v] = add(g);
  }

 private:
  MediatorCircuit& c_;
  std::size_t cap_;
  std::map<std::uint64_t, int> consts_;
};

}  // namespace

MediatorCircuit compile_decision_table(const DecisionTable& t, std::uint64_t p, std::size_t gate_cap) {
  PrimeField F(p);
  MediatorCircuit c;
  c.p = p;
  c.n = t.n;
  c.type_values = t.type_values;
  c.actions = t.actions;
  c.coin_arity = t.coin_arity;
  for (auto a : t.coin_arity) c.coin_bits += log2_exact(a);
  for (int i = 0; i < t.n; ++i)
    if (t.actions[i].size() >= p || t.type_values[i].size() >= p) throw ParameterError("field too small for the game");

  // Variables: inputs with more than one value, then coin bits.
  struct Var {
    bool coin;
    int index;  // player or bit
    std::size_t size;
  };
  std::vector<Var> vars;
  for (int j = 1; j <= t.n; ++j)
    if (t.type_values[j - 1].size() > 1) vars.push_back({false, j, t.type_values[j - 1].size()});
  for (int b = 0; b < c.coin_bits; ++b) vars.push_back({true, b, 2});
  std::size_t grid = 1;
  for (const auto& v : vars) {
    grid *= v.size;
    if (grid > (1u << 20)) throw CircuitTooLarge("decision table too large to compile", gate_cap);
  }

  // Coin outcome sequences, in the order of coin_bits_of.
  std::vector<std::vector<std::uint64_t>> coin_seqs{{}};
  for (auto a : t.coin_arity) {
    std::vector<std::vector<std::uint64_t>> next;
    for (const auto& s : coin_seqs)
      for (std::uint64_t v = 0; v < a; ++v) {
        auto s2 = s;
        s2.push_back(v);
        next.push_back(std::move(s2));
      }
    coin_seqs = std::move(next);
  }

  // values[i][cell]: index of player i's action at the grid cell.
  std::vector<std::vector<std::uint64_t>> values(t.n, std::vector<std::uint64_t>(grid, 0));
  std::vector<bool> seen(grid, false);
  std::set<TypeProfile> listed;
  for (const auto& [key, a] : t.table) listed.insert(key.first);
  for (const auto& x : listed)
    for (const auto& coins : coin_seqs) {
      auto bits = coin_bits_of(t.coin_arity, coins);
      std::size_t cell = 0, stride = 1;
      for (const auto& v : vars) {
        std::size_t digit;
        if (v.coin) {
          digit = static_cast<std::size_t>(bits[v.index]);
        } else {
          const auto& tv = t.type_values[v.index - 1];
          digit = static_cast<std::size_t>(std::find(tv.begin(), tv.end(), x[v.index - 1]) - tv.begin());
        }
        cell += digit * stride;
        stride *= v.size;
      }
      const ActionProfile& a = t.at(x, coins);
      for (int i = 0; i < t.n; ++i) {
        const auto& acts = t.actions[i];
        values[i][cell] = static_cast<std::uint64_t>(std::find(acts.begin(), acts.end(), a[i]) - acts.begin());
      }
      seen[cell] = true;
    }

  // Tensor interpolation: along each axis, values at 0..m-1 to monomial coefficients.
  for (auto& y : values) {
    std::size_t stride = 1;
    for (const auto& v : vars) {
      for (std::size_t base = 0; base < grid; ++base) {
        if ((base / stride) % v.size != 0) continue;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
        for (std::size_t k = 0; k < v.size; ++k) pts.emplace_back(k, y[base + k * stride]);
        Poly coef = interpolate(F, pts);
        coef.resize(v.size, 0);
        for (std::size_t k = 0; k < v.size; ++k) y[base + k * stride] = coef[k];
      }
      stride *= v.size;
    }
  }

  Builder B(c, gate_cap);
  std::map<std::pair<std::size_t, std::size_t>, int> powers;  // (var, exponent) -> wire
  std::map<std::vector<std::size_t>, int> monomials;
  auto var_wire = [&](std::size_t vi) {
    auto key = std::make_pair(vi, std::size_t{1});
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    Gate g;
    g.kind = vars[vi].coin ? Gate::Kind::CoinBit : Gate::Kind::Input;
    g.index = vars[vi].index;
    return powers[key] = B.add(g);
  };
  std::function<int(std::size_t, std::size_t)> power = [&](std::size_t vi, std::size_t e) -> int {
    if (e == 1) return var_wire(vi);
    auto key = std::make_pair(vi, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    int lower = power(vi, e - 1);
    Gate g;
    g.kind = Gate::Kind::Mul;
    g.a = lower;
    g.b = var_wire(vi);
    return powers[key] = B.add(g);
  };
  auto monomial = [&](const std::vector<std::size_t>& exps) {
    auto it = monomials.find(exps);
    if (it != monomials.end()) return it->second;
    int w = -1;
    for (std::size_t vi = 0; vi < exps.size(); ++vi) {
      if (!exps[vi]) continue;
      int pw = power(vi, exps[vi]);
      if (w < 0) {
        w = pw;
      } else {
        Gate g;
        g.kind = Gate::Kind::Mul;
        g.a = w;
        g.b = pw;
        w = B.add(g);
      }
    }
    return monomials[exps] = w;
  };

  for (int i = 0; i < t.n; ++i) {
    int acc = -1;
    std::uint64_t constant = 0;
    for (std::size_t cell = 0; cell < grid; ++cell) {
      std::uint64_t coef = values[i][cell];
      if (!coef) continue;
      std::vector<std::size_t> exps(vars.size());
      std::size_t rest = cell;
      bool any = false;
      for (std::size_t vi = 0; vi < vars.size(); ++vi) {
        exps[vi] = rest % vars[vi].size;
        rest /= vars[vi].size;
        any = any || exps[vi];
      }
      if (!any) {
        constant = coef;
        continue;
      }
      int term = monomial(exps);
      if (coef != 1) {
        Gate g;
        g.kind = Gate::Kind::Scale;
        g.c = coef;
        g.a = term;
        term = B.add(g);
      }
      if (acc < 0) {
        acc = term;
      } else {
        Gate g;
        g.kind = Gate::Kind::Add;
        g.a = acc;
        g.b = term;
        acc = B.add(g);
      }
    }
    if (acc < 0) {
      acc = B.constant(constant);
    } else if (constant) {
      Gate g;
      g.kind = Gate::Kind::Add;
      g.a = acc;
      g.b = B.constant(constant);
      acc = B.add(g);
    }
    c.outputs.push_back(acc);
  }
  return c;
}

MediatorCircuit compile_mediator_to_circuit(const MinimallyInformativeProfile& mi, std::uint64_t p, std::size_t gate_cap) {
  return compile_decision_table(decision_table(*mi.inner_ext, *mi.inner), p, gate_cap);
}

std::size_t verify_circuit(const MediatorCircuit& c, const DecisionTable& t) {
  std::size_t bad = 0;
  for (const auto& [key, a] : t.table)
    if (c.actions_for(key.first, key.second) != a) ++bad;
  return bad;
}

}  // namespace asyncmed
