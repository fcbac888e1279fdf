#include "asyncmed/cheaptalk.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>

#include "asyncmed/schedulers.hpp"

namespace asyncmed {

std::string to_string(CtRegime r) {
  switch (r) {
    case CtRegime::Exact: return "exact";
    case CtRegime::Punishment: return "punishment";
    case CtRegime::Epsilon: return "epsilon";
    case CtRegime::EpsilonPunishment: return "epsilon-punishment";
  }
  return "?";
}

std::string to_string(CtApproach a) { return a == CtApproach::AH ? "ah" : "default"; }

Bivariate Bivariate::random(const PrimeField& F, std::uint64_t secret, int d, std::mt19937_64& rng) {
  Bivariate B;
  B.d = d;
  B.c.assign(d + 1, std::vector<std::uint64_t>(d + 1));
  for (auto& row : B.c)
    for (auto& v : row) v = F.uniform(rng);
  B.c[0][0] = secret % F.p();
  return B;
}

Poly Bivariate::row(const PrimeField& F, std::uint64_t i) const {
  Poly r(d + 1, 0);
  std::uint64_t xp = 1;
  for (int a = 0; a <= d; ++a) {
    for (int b = 0; b <= d; ++b) r[b] = F.add(r[b], F.mul(c[a][b], xp));
    xp = F.mul(xp, i % F.p());
  }
  return r;
}

Poly Bivariate::col(const PrimeField& F, std::uint64_t i) const {
  Poly r(d + 1, 0);
  for (int a = 0; a <= d; ++a) r[a] = evaluate(F, c[a], i);
  return r;
}

namespace {

constexpr int kCtTag = 40;
enum Sub : std::int64_t { kShare = 1, kEchoR = 2, kEchoC = 3, kReady = 4, kBval = 5, kAux = 6, kDecide = 7, kOpen = 8, kOut = 9 };

struct Behavior {
  std::string name = "ct-honest";
  int crash_after = -1;
  std::optional<int> input;
  bool corrupt = false;
  bool equivocate = false;
  bool staller = false;
};

struct CtConfig {
  CtParams params;
  std::shared_ptr<const MediatorCircuit> circuit;
  int slots = 0;
  int input_slot = -1;
  std::map<int, int> bit_r;  // coin bit -> slot of its r
  std::map<int, int> bit_a, bit_b;  // coin bit -> slots of its zero-mask parts
  std::vector<int> bits;     // coin bits the circuit reads
  std::map<int, int> mul_slot;  // gate -> slot of its r; a and b follow
  std::vector<std::vector<int>> muls_by_level;  // level 1.. at index level-1
  int bit_rounds = 0;
  int rounds = 0;
  std::vector<std::optional<Action>> wills;  // per player
};

struct Avss {
  bool have = false;
  std::vector<Poly> row, col;  // per slot
  std::vector<std::vector<std::uint64_t>> row_at, col_at;  // [slot][i]
  std::map<int, std::vector<std::uint64_t>> er, ec;
  std::set<int> consistent;
  std::set<int> readies;
  bool sent_r = false, sent_c = false, sent_ready = false, ready_own = false, complete = false;
  std::optional<std::vector<Poly>> dec_col, dec_row;
  std::vector<std::uint64_t> sd;
};

struct BaRound {
  std::array<std::set<int>, 2> bval;
  std::array<bool, 2> bval_sent{false, false};
  std::set<int> bin;
  int first_bin = -1;
  bool aux_sent = false;
  std::map<int, int> aux;
};

struct Ba {
  bool proposed = false;
  int est = 0;
  int round = 0;
  std::map<int, BaRound> rounds;
  std::optional<int> decided;
  std::array<std::set<int>, 2> dec;
  bool dec_sent = false;
  bool terminated = false;
};

struct Local {
  std::int64_t kind;
  std::vector<std::int64_t> fields;
};

class CtAgent : public AgentBase<CtAgent> {
 public:
  CtAgent(std::shared_ptr<const CtConfig> cfg, Behavior beh, int self)
      : cfg_(std::move(cfg)), beh_(std::move(beh)), F_(cfg_->params.p), self_(self), n_(cfg_->params.n) {
    const auto& P = cfg_->params;
    d_ = P.d;
    f_ = P.f;
    e_ = P.e;
    avss_.resize(n_ + 1);
    ba_.resize(n_ + 1);
    buf_.resize(n_ + 1);
  }

  std::optional<Action> will() const override { return cfg_->wills.at(self_ - 1); }

  void start(Ctx& c) override {
    if (crashed()) return;
    ctx_ = &c;
    deal(c);
    drain();
    flush(c);
    ctx_ = nullptr;
  }

  void react(Ctx& c, const Message* m) override {
    if (crashed()) return;
    ctx_ = &c;
    if (m) {
      if (m->header.from >= 1 && m->body.tag == kCtTag) parse(m->header.from, m->body.data);
      drain();
    } else {
      flush(c);
    }
    maybe_finish(c);
    ctx_ = nullptr;
  }

 private:
  bool crashed() {
    if (beh_.crash_after < 0) return false;
    return reactions_++ >= beh_.crash_after;
  }

  std::uint64_t shift(int to, std::uint64_t v) const {
    return beh_.equivocate && to != self_ && to % 2 == 0 ? F_.add(v, 1) : v;
  }

  void emit(int to, std::int64_t kind, std::vector<std::int64_t> fields) {
    if (to == self_) {
      local_.push_back({kind, std::move(fields)});
      return;
    }
    auto& b = buf_[to];
    b.push_back(kind);
    b.push_back(static_cast<std::int64_t>(fields.size()));
    b.insert(b.end(), fields.begin(), fields.end());
  }

  void broadcast(std::int64_t kind, const std::vector<std::int64_t>& fields) {
    for (int l = 1; l <= n_; ++l) emit(l, kind, fields);
  }

  void flush(Ctx& c) {
    for (int l = 1; l <= n_; ++l) {
      if (buf_[l].empty()) continue;
      c.send(l, Payload{kCtTag, std::move(buf_[l])});
      buf_[l].clear();
    }
  }

  void parse(int from, const std::vector<std::int64_t>& data) {
    std::size_t i = 0;
    while (i + 1 < data.size()) {
      std::int64_t kind = data[i];
      std::size_t len = static_cast<std::size_t>(data[i + 1]);
      i += 2;
      if (i + len > data.size()) return;
      std::vector<std::int64_t> fields(data.begin() + static_cast<std::ptrdiff_t>(i),
                                       data.begin() + static_cast<std::ptrdiff_t>(i + len));
      i += len;
      handle(from, kind, fields);
    }
  }

  void drain() {
    while (!local_.empty()) {
      Local l = std::move(local_.front());
      local_.pop_front();
      handle(self_, l.kind, l.fields);
    }
  }

  std::uint64_t fe(std::int64_t v) const { return F_.norm(v); }

  void handle(int from, std::int64_t kind, const std::vector<std::int64_t>& f) {
    const int S = cfg_->slots;
    switch (kind) {
      case kShare:
        if (from >= 1 && static_cast<int>(f.size()) == S * 2 * (d_ + 1)) on_share(from, f);
        break;
      case kEchoR:
      case kEchoC:
        if (static_cast<int>(f.size()) == S + 1) on_echo(from, kind, f);
        break;
      case kReady:
        if (f.size() == 1) on_ready(from, static_cast<int>(f[0]));
        break;
      case kBval:
      case kAux:
        if (f.size() == 3) on_ba(from, kind, static_cast<int>(f[0]), static_cast<int>(f[1]), static_cast<int>(f[2]));
        break;
      case kDecide:
        if (f.size() == 2) on_decide(from, static_cast<int>(f[0]), static_cast<int>(f[1]));
        break;
      case kOpen:
        if (f.size() >= 2) on_open(from, f);
        break;
      case kOut:
        if (f.size() == 1) on_out(from, fe(f[0]));
        break;
      default: break;
    }
  }

  // ---- dealing and verifiable sharing ----

  void deal(Ctx& c) {
    const int S = cfg_->slots;
    const auto& circ = *cfg_->circuit;
    std::vector<Bivariate> polys(S);
    for (int s = 0; s < S; ++s) {
      Bivariate& B = polys[s];
      B.d = d_;
      B.c.assign(d_ + 1, std::vector<std::uint64_t>(d_ + 1));
      for (auto& row : B.c)
        for (auto& v : row) v = c.coin(F_.p());
    }
    if (cfg_->input_slot >= 0) {
      int value = beh_.input.value_or(c.type());
      const auto& tv = circ.type_values.at(self_ - 1);
      auto it = std::find(tv.begin(), tv.end(), value);
      polys[cfg_->input_slot].c[0][0] = it == tv.end() ? 0 : static_cast<std::uint64_t>(it - tv.begin());
    }
    const int next = self_ % n_ + 1;
    for (int l = 1; l <= n_; ++l) {
      std::vector<std::int64_t> fields;
      fields.reserve(S * 2 * (d_ + 1));
      std::uint64_t bump = shift(l, 0) + (beh_.corrupt && l == next ? 1 : 0);
      for (int s = 0; s < S; ++s) {
        Poly r = polys[s].row(F_, l);
        r[0] = F_.add(r[0], bump);
        for (auto v : r) fields.push_back(static_cast<std::int64_t>(v));
      }
      for (int s = 0; s < S; ++s) {
        Poly cc = polys[s].col(F_, l);
        cc[0] = F_.add(cc[0], bump);
        for (auto v : cc) fields.push_back(static_cast<std::int64_t>(v));
      }
      emit(l, kShare, std::move(fields));
    }
  }

  void on_share(int D, const std::vector<std::int64_t>& f) {
    Avss& a = avss_[D];
    if (a.have) return;
    const int S = cfg_->slots;
    a.have = true;
    a.row.assign(S, Poly(d_ + 1));
    a.col.assign(S, Poly(d_ + 1));
    std::size_t i = 0;
    for (int s = 0; s < S; ++s)
      for (auto& v : a.row[s]) v = fe(f[i++]);
    for (int s = 0; s < S; ++s)
      for (auto& v : a.col[s]) v = fe(f[i++]);
    a.row_at.assign(S, std::vector<std::uint64_t>(n_ + 1));
    a.col_at.assign(S, std::vector<std::uint64_t>(n_ + 1));
    for (int s = 0; s < S; ++s)
      for (int l = 0; l <= n_; ++l) {
        a.row_at[s][l] = evaluate(F_, a.row[s], l);
        a.col_at[s][l] = evaluate(F_, a.col[s], l);
      }
    send_echo(D, kEchoR, a.row);
    send_echo(D, kEchoC, a.col);
    for (const auto& [from, v] : a.er) check_consistent(D, from);
    check_avss(D);
  }

  // ECHO-R to l carries my row at l; ECHO-C carries my column at l.
  void send_echo(int D, std::int64_t kind, const std::vector<Poly>& polys) {
    Avss& a = avss_[D];
    bool& sent = kind == kEchoR ? a.sent_r : a.sent_c;
    if (sent) return;
    sent = true;
    for (int l = 1; l <= n_; ++l) {
      std::vector<std::int64_t> fields{D};
      for (const auto& p : polys) fields.push_back(static_cast<std::int64_t>(shift(l, evaluate(F_, p, l))));
      emit(l, kind, std::move(fields));
    }
  }

  void on_echo(int from, std::int64_t kind, const std::vector<std::int64_t>& f) {
    int D = static_cast<int>(f[0]);
    if (D < 1 || D > n_) return;
    Avss& a = avss_[D];
    auto& store = kind == kEchoR ? a.er : a.ec;
    if (store.count(from)) return;
    std::vector<std::uint64_t> vals;
    for (std::size_t i = 1; i < f.size(); ++i) vals.push_back(fe(f[i]));
    store.emplace(from, std::move(vals));
    check_consistent(D, from);
    check_avss(D);
  }

  void check_consistent(int D, int from) {
    Avss& a = avss_[D];
    if (!a.have) return;
    auto r = a.er.find(from);
    auto c = a.ec.find(from);
    if (r == a.er.end() || c == a.ec.end()) return;
    for (int s = 0; s < cfg_->slots; ++s)
      if (r->second[s] != a.col_at[s][from] || c->second[s] != a.row_at[s][from]) return;
    a.consistent.insert(from);
  }

  void on_ready(int from, int D) {
    if (D < 1 || D > n_) return;
    avss_[D].readies.insert(from);
    check_avss(D);
  }

  // Recovers my polynomials from the other players' echoes. Echoes of honest
  // players whose shares were also bad agree with each other, so the
  // polynomial agreeing with the most senders on every slot wins, provided it
  // has d+f+1 of them and no other candidate ties it.
  std::optional<std::vector<Poly>> recover(const std::map<int, std::vector<std::uint64_t>>& store) {
    std::vector<int> from;
    for (const auto& [j, v] : store)
      if (j != self_) from.push_back(j);
    const int m = static_cast<int>(from.size());
    const int need = d_ + f_ + 1;
    if (m < need) return std::nullopt;
    const int S = cfg_->slots;
    std::vector<Poly> best;
    std::set<int> best_set;
    bool tie = false;
    std::vector<int> pick(d_ + 1);
    for (int i = 0; i <= d_; ++i) pick[i] = i;
    while (true) {
      std::vector<Poly> cand(S);
      for (int s = 0; s < S; ++s) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> pts;
        for (int i : pick) pts.emplace_back(static_cast<std::uint64_t>(from[i]), store.at(from[i])[s]);
        cand[s] = interpolate(F_, pts);
        cand[s].resize(d_ + 1, 0);
      }
      std::set<int> agree;
      for (int j : from) {
        bool ok = true;
        for (int s = 0; s < S && ok; ++s) ok = evaluate(F_, cand[s], j) == store.at(j)[s];
        if (ok) agree.insert(j);
      }
      if (agree.size() > best_set.size()) {
        best = std::move(cand);
        best_set = std::move(agree);
        tie = false;
      } else if (agree.size() == best_set.size() && agree != best_set) {
        tie = true;
      }
      int i = d_;
      while (i >= 0 && pick[i] == m - (d_ + 1) + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j <= d_; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (tie || static_cast<int>(best_set.size()) < need) return std::nullopt;
    return best;
  }

  void check_avss(int D) {
    Avss& a = avss_[D];
    if (!a.complete && a.have && static_cast<int>(a.consistent.size()) >= n_ - f_) a.ready_own = true;
    if (!a.sent_ready && (a.ready_own || static_cast<int>(a.readies.size()) >= f_ + 1)) send_ready(D);
    if (a.complete) return;
    if (!a.ready_own && static_cast<int>(a.readies.size()) >= f_ + 1) {
      // My own polynomials are missing or wrong: recover them from the echoes.
      if (!a.dec_col) {
        a.dec_col = recover(a.er);
        if (a.dec_col) send_echo(D, kEchoC, *a.dec_col);
      }
      if (!a.dec_row) {
        a.dec_row = recover(a.ec);
        if (a.dec_row) send_echo(D, kEchoR, *a.dec_row);
      }
    }
    if (static_cast<int>(a.readies.size()) < 2 * f_ + 1) return;
    const int S = cfg_->slots;
    a.sd.assign(S, 0);
    if (a.ready_own) {
      for (int s = 0; s < S; ++s) a.sd[s] = a.row[s][0];
    } else if (a.dec_col && a.dec_row) {
      for (int s = 0; s < S; ++s) a.sd[s] = (*a.dec_row)[s][0];
    } else {
      return;
    }
    a.complete = true;
    propose(D, 1);
    try_compute();
  }

  void send_ready(int D) {
    avss_[D].sent_ready = true;
    broadcast(kReady, {D});
  }

  // ---- common subset: one binary agreement per dealer ----

  void propose(int j, int v) {
    Ba& b = ba_[j];
    if (b.proposed || b.terminated) return;
    b.proposed = true;
    b.est = v;
    enter_round(j, 1);
  }

  void enter_round(int j, int r) {
    Ba& b = ba_[j];
    b.round = r;
    BaRound& R = b.rounds[r];
    if (!R.bval_sent[b.est]) {
      R.bval_sent[b.est] = true;
      broadcast(kBval, {j, r, b.est});
    }
    ba_eval(j);
  }

  void on_ba(int from, std::int64_t kind, int j, int r, int v) {
    if (j < 1 || j > n_ || r < 1 || (v != 0 && v != 1)) return;
    Ba& b = ba_[j];
    if (b.terminated) return;
    BaRound& R = b.rounds[r];
    if (kind == kAux) {
      R.aux.emplace(from, v);
    } else {
      if (!R.bval[v].insert(from).second) return;
      if (static_cast<int>(R.bval[v].size()) >= f_ + 1 && !R.bval_sent[v]) {
        R.bval_sent[v] = true;
        broadcast(kBval, {j, r, v});
      }
      if (static_cast<int>(R.bval[v].size()) >= 2 * f_ + 1 && R.bin.insert(v).second && R.first_bin < 0) R.first_bin = v;
    }
    ba_eval(j);
  }

  void ba_eval(int j) {
    Ba& b = ba_[j];
    while (b.proposed && !b.terminated) {
      int r = b.round;
      BaRound& R = b.rounds[r];
      if (R.first_bin >= 0 && !R.aux_sent) {
        R.aux_sent = true;
        broadcast(kAux, {j, r, R.first_bin});
      }
      if (!R.aux_sent) return;
      std::set<int> vals;
      int count = 0;
      for (const auto& [from, v] : R.aux)
        if (R.bin.count(v)) {
          vals.insert(v);
          ++count;
        }
      if (count < n_ - f_) return;
      int coin = r % 2;
      if (vals.size() == 1) {
        b.est = *vals.begin();
        if (b.est == coin && !b.decided) decide(j, b.est);
      } else {
        b.est = coin;
      }
      b.round = r + 1;
      BaRound& N = b.rounds[r + 1];
      if (!N.bval_sent[b.est]) {
        N.bval_sent[b.est] = true;
        broadcast(kBval, {j, r + 1, b.est});
      }
    }
  }

  void decide(int j, int v) {
    Ba& b = ba_[j];
    if (!b.decided) b.decided = v;
    if (!b.dec_sent) {
      b.dec_sent = true;
      broadcast(kDecide, {j, v});
    }
    acs_update();
  }

  void on_decide(int from, int j, int v) {
    if (j < 1 || j > n_ || (v != 0 && v != 1)) return;
    Ba& b = ba_[j];
    if (b.terminated) return;
    b.dec[v].insert(from);
    if (static_cast<int>(b.dec[v].size()) >= f_ + 1) decide(j, v);
    if (static_cast<int>(b.dec[v].size()) >= 2 * f_ + 1) {
      b.terminated = true;
      b.decided = v;
      acs_update();
    }
  }

  void acs_update() {
    if (core_fixed_) return;
    int ones = 0;
    for (int j = 1; j <= n_; ++j)
      if (ba_[j].decided == 1) ++ones;
    if (ones >= n_ - f_)
      for (int j = 1; j <= n_; ++j) propose(j, 0);
    for (int j = 1; j <= n_; ++j)
      if (!ba_[j].terminated) return;
    core_fixed_ = true;
    for (int j = 1; j <= n_; ++j)
      if (ba_[j].decided == 1) core_.push_back(j);
    try_compute();
  }

  // ---- evaluation ----

  void try_compute() {
    if (!core_fixed_ || computing_) return;
    for (int D : core_)
      if (!avss_[D].complete) return;
    computing_ = true;
    const int S = cfg_->slots;
    sum_d_.assign(S, 0);
    for (int D : core_)
      for (int s = 0; s < S; ++s) sum_d_[s] = F_.add(sum_d_[s], avss_[D].sd[s]);
    wires_.assign(cfg_->circuit->gates.size(), std::nullopt);
    advance();
  }

  std::optional<std::uint64_t> input_share(int player) const {
    if (cfg_->input_slot < 0) return 0;
    if (std::find(core_.begin(), core_.end(), player) == core_.end()) return 0;
    return avss_[player].sd[cfg_->input_slot];
  }

  void compute_wires() {
    const auto& gates = cfg_->circuit->gates;
    for (std::size_t w = 0; w < gates.size(); ++w) {
      if (wires_[w]) continue;
      const Gate& g = gates[w];
      switch (g.kind) {
        case Gate::Kind::Const: wires_[w] = g.c; break;
        case Gate::Kind::Input: wires_[w] = input_share(g.index); break;
        case Gate::Kind::CoinBit: {
          auto it = bit_share_.find(g.index);
          if (it != bit_share_.end()) wires_[w] = it->second;
          break;
        }
        case Gate::Kind::Add:
          if (wires_[g.a] && wires_[g.b]) wires_[w] = F_.add(*wires_[g.a], *wires_[g.b]);
          break;
        case Gate::Kind::Scale:
          if (wires_[g.a]) wires_[w] = F_.mul(g.c, *wires_[g.a]);
          break;
        case Gate::Kind::Mul: {
          auto it = mul_result_.find(static_cast<int>(w));
          if (it != mul_result_.end()) wires_[w] = it->second;
          break;
        }
      }
    }
  }

  // My share of x A(x) + x^d B(x): a random degree-2d sharing of zero built
  // from the degree-d sharings in slots a and b.
  std::uint64_t zero_mask(int a, int b) const {
    if (d_ == 0) return 0;
    const std::uint64_t x = static_cast<std::uint64_t>(self_);
    return F_.add(F_.mul(x, sum_d_[a]), F_.mul(F_.pow(x, static_cast<std::uint64_t>(d_)), sum_d_[b]));
  }

  std::optional<std::vector<std::uint64_t>> round_values(int r) {
    std::vector<std::uint64_t> v;
    if (r < cfg_->bit_rounds) {
      for (int b : cfg_->bits) {
        std::uint64_t R = sum_d_[cfg_->bit_r.at(b)];
        v.push_back(F_.add(F_.mul(R, R), zero_mask(cfg_->bit_a.at(b), cfg_->bit_b.at(b))));
      }
      return v;
    }
    compute_wires();
    const auto& gates = cfg_->circuit->gates;
    for (int g : cfg_->muls_by_level.at(r - cfg_->bit_rounds)) {
      const Gate& G = gates[g];
      if (!wires_[G.a] || !wires_[G.b]) return std::nullopt;
      int s = cfg_->mul_slot.at(g);
      v.push_back(F_.add(F_.add(F_.mul(*wires_[G.a], *wires_[G.b]), sum_d_[s]), zero_mask(s + 1, s + 2)));
    }
    return v;
  }

  void apply_round(int r) {
    const auto& E = opened_.at(r);
    if (r < cfg_->bit_rounds) {
      const std::uint64_t inv2 = F_.inv(2);
      for (std::size_t i = 0; i < cfg_->bits.size(); ++i) {
        int b = cfg_->bits[i];
        std::uint64_t u = E[i];
        if (u == 0) {
          bit_share_[b] = 0;
          continue;
        }
        auto root = F_.sqrt(u);
        if (!root) throw ProtocolError("opened square is not a residue");
        std::uint64_t R = sum_d_[cfg_->bit_r.at(b)];
        bit_share_[b] = F_.mul(F_.add(F_.mul(R, F_.inv(*root)), 1), inv2);
      }
    } else {
      const auto& level = cfg_->muls_by_level.at(r - cfg_->bit_rounds);
      for (std::size_t i = 0; i < level.size(); ++i)
        mul_result_[level[i]] = F_.sub(E[i], sum_d_[cfg_->mul_slot.at(level[i])]);
    }
  }

  void advance() {
    if (!computing_) return;
    while (round_ < cfg_->rounds) {
      if (!round_sent_) {
        auto v = round_values(round_);
        if (!v) return;
        round_sent_ = true;
        for (int l = 1; l <= n_; ++l) {
          std::vector<std::int64_t> fields{round_, static_cast<std::int64_t>(v->size())};
          for (auto x : *v) fields.push_back(static_cast<std::int64_t>(shift(l, x)));
          emit(l, kOpen, std::move(fields));
        }
        drain_opens();
      }
      if (!opened_.count(round_)) return;
      apply_round(round_);
      ++round_;
      round_sent_ = false;
    }
    compute_wires();
    if (out_sent_ || out_held_) return;
    const auto& outs = cfg_->circuit->outputs;
    for (int w : outs)
      if (!wires_[w]) return;
    if (beh_.staller && (!my_action_ || *my_action_ == cfg_->circuit->actions.at(self_ - 1).front())) {
      out_held_ = true;
      return;
    }
    send_outputs();
  }

  void send_outputs() {
    out_sent_ = true;
    out_held_ = false;
    const auto& outs = cfg_->circuit->outputs;
    for (int l = 1; l <= n_; ++l) emit(l, kOut, {static_cast<std::int64_t>(shift(l, *wires_[outs[l - 1]]))});
  }

  // Processes my own OPEN share now so that the round can complete.
  void drain_opens() {
    std::deque<Local> rest;
    while (!local_.empty()) {
      Local l = std::move(local_.front());
      local_.pop_front();
      if (l.kind == kOpen) record_open(self_, l.fields);
      else rest.push_back(std::move(l));
    }
    local_ = std::move(rest);
  }

  void record_open(int from, const std::vector<std::int64_t>& f) {
    int r = static_cast<int>(f[0]);
    std::size_t count = static_cast<std::size_t>(f[1]);
    if (r < 0 || r >= cfg_->rounds || f.size() != count + 2) return;
    auto& pts = open_pts_[r];
    if (pts.count(from)) return;
    std::vector<std::uint64_t> vals;
    for (std::size_t i = 0; i < count; ++i) vals.push_back(fe(f[i + 2]));
    pts.emplace(from, std::move(vals));
    try_open(r);
  }

  void on_open(int from, const std::vector<std::int64_t>& f) {
    record_open(from, f);
    advance();
  }

  void try_open(int r) {
    if (opened_.count(r)) return;
    const auto& pts = open_pts_[r];
    const int deg = 2 * d_;
    if (static_cast<int>(pts.size()) < deg + e_ + 1) return;
    std::size_t count = pts.begin()->second.size();
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> xy;
      for (const auto& [from, v] : pts)
        if (v.size() == count) xy.emplace_back(static_cast<std::uint64_t>(from), v[i]);
      auto p = online_decode(F_, xy, deg, e_);
      if (!p) return;
      out.push_back((*p)[0]);
    }
    opened_[r] = std::move(out);
  }

  // ---- output ----

  void on_out(int from, std::uint64_t v) {
    if (my_action_ || !out_pts_.emplace(from, v).second) return;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> xy(out_pts_.begin(), out_pts_.end());
    std::optional<Poly> p;
    if (cfg_->params.fragile_output) {
      if (static_cast<int>(xy.size()) < n_) return;
      p = berlekamp_welch(F_, xy, d_, 0);
    } else {
      p = online_decode(F_, xy, d_, e_);
    }
    if (!p) return;
    std::uint64_t idx = (*p)[0];
    const auto& acts = cfg_->circuit->actions.at(self_ - 1);
    my_action_ = idx < acts.size() ? acts[idx] : acts.front();
    if (out_held_) {
      if (*my_action_ != acts.front()) send_outputs();
    }
  }

  void maybe_finish(Ctx& c) {
    if (!my_action_ || c.has_acted()) return;
    if (!out_sent_ && !beh_.staller) return;
    if (beh_.staller && !out_sent_ && !out_held_) return;
    flush(c);
    c.act(*my_action_);
    c.halt();
  }

  std::shared_ptr<const CtConfig> cfg_;
  Behavior beh_;
  PrimeField F_;
  int self_;
  int n_;
  int d_ = 0, f_ = 0, e_ = 0;
  int reactions_ = 0;
  Ctx* ctx_ = nullptr;
  std::vector<std::vector<std::int64_t>> buf_;
  std::deque<Local> local_;
  std::vector<Avss> avss_;
  std::vector<Ba> ba_;
  bool core_fixed_ = false;
  bool computing_ = false;
  std::vector<int> core_;
  std::vector<std::uint64_t> sum_d_;
  std::vector<std::optional<std::uint64_t>> wires_;
  std::map<int, std::uint64_t> bit_share_;
  std::map<int, std::uint64_t> mul_result_;
  int round_ = 0;
  bool round_sent_ = false;
  std::map<int, std::map<int, std::vector<std::uint64_t>>> open_pts_;
  std::map<int, std::vector<std::uint64_t>> opened_;
  std::map<int, std::uint64_t> out_pts_;
  bool out_sent_ = false;
  bool out_held_ = false;
  std::optional<Action> my_action_;
};

// Mediator-game images of cheap-talk deviations.

class SilentPlayer : public AgentBase<SilentPlayer> {
 public:
  void react(Ctx&, const Message*) override {}
};

class MisreportingPlayer : public AgentBase<MisreportingPlayer> {
 public:
  explicit MisreportingPlayer(int v) : v_(v) {}
  void start(Ctx& c) override { c.send(kMediator, Payload{tag::kInit, {v_}}); }
  void react(Ctx& c, const Message* m) override {
    if (!m || m->header.from != kMediator) return;
    if (is_stop(m->body)) {
      c.act(static_cast<Action>(m->body.data.at(0)));
      c.halt();
      return;
    }
    c.send(kMediator, Payload{tag::kAck, {}});
  }

 private:
  int v_;
};

StrategySpec make_spec(std::shared_ptr<const CtConfig> cfg, Behavior beh) {
  std::string name = beh.name;
  return StrategySpec{name, [cfg, beh](int self, int) { return std::make_unique<CtAgent>(cfg, beh, self); }};
}

bool gt_bound(int n, int bound) { return n > bound; }

}  // namespace

namespace {

std::shared_ptr<const CtConfig> config_of(const CheapTalkProfile& ct) {
  if (!ct.impl) throw ContractError("profile was not built by build_cheaptalk_profile");
  return std::static_pointer_cast<const CtConfig>(ct.impl);
}

}  // namespace

CheapTalkProfile build_cheaptalk_profile(std::shared_ptr<const ExtensionGame> mediated_ext,
                                         std::shared_ptr<const Profile> mediated, const CtOptions& opt) {
  if (!mediated_ext || !mediated) throw ContractError("mediator game and profile are required");
  const auto& g = *mediated_ext->game;
  const int n = g.n(), k = opt.k, t = opt.t;
  if (k < 0 || t < 0) throw ParameterError("k and t must be non-negative");
  if (opt.strong) throw Unsupported("strong punishment strategies are not supported");
  const bool punish = opt.regime == CtRegime::Punishment || opt.regime == CtRegime::EpsilonPunishment;
  const bool eps = opt.regime == CtRegime::Epsilon || opt.regime == CtRegime::EpsilonPunishment;
  int bound = 0;
  std::string rule;
  switch (opt.regime) {
    case CtRegime::Exact: bound = 4 * k + 4 * t; rule = "n > 4k+4t"; break;
    case CtRegime::Punishment: bound = 3 * k + 4 * t; rule = "n > 3k+4t"; break;
    case CtRegime::Epsilon: bound = 3 * k + 3 * t; rule = "n > 3k+3t"; break;
    case CtRegime::EpsilonPunishment: bound = 2 * k + 3 * t; rule = "n > 2k+3t"; break;
  }
  if (!gt_bound(n, bound))
    throw ParameterError(to_string(opt.regime) + " regime needs " + rule + "; got n=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + ", t=" + std::to_string(t));
  if (eps && (!opt.epsilon || *opt.epsilon <= 0 || *opt.epsilon >= 1))
    throw ParameterError("epsilon regimes need 0 < epsilon < 1");
  if (punish && !opt.rho) throw ContractError("punishment regimes need a punishment strategy");
  if (opt.prime <= static_cast<std::uint64_t>(n) || !is_prime(opt.prime)) throw ParameterError("field prime must exceed n");

  if (punish) {
    int m = opt.regime == CtRegime::Punishment ? k + t : 2 * k + 2 * t;
    auto scheds = opt.punishment_schedulers;
    if (scheds.empty()) scheds.push_back(std::make_shared<FifoScheduler>());
    auto res = check_punishment(g, *mediated_ext, *opt.rho, *mediated, m, scheds, opt.punishment_eval);
    if (!res.verdict.holds)
      throw ContractError("punishment prerequisite fails at m=" + std::to_string(m));
  }

  auto circuit = std::make_shared<const MediatorCircuit>(
      compile_decision_table(decision_table(*mediated_ext, *mediated), opt.prime, opt.gate_cap));

  auto cfg = std::make_shared<CtConfig>();
  CtParams& P = cfg->params;
  P.n = n;
  P.k = k;
  P.t = t;
  P.d = k + t;
  P.f = k + t;
  P.e = std::max(0, std::min(P.f, (n - 2 * P.d - 1) / 2));
  P.p = opt.prime;
  P.regime = opt.regime;
  P.approach = opt.approach;
  P.epsilon = opt.epsilon;
  P.fragile_output = opt.fragile_output;
  cfg->circuit = circuit;

  int slot = 0;
  std::set<int> bits;
  bool inputs = false;
  for (const auto& gate : circuit->gates) {
    if (gate.kind == Gate::Kind::CoinBit) bits.insert(gate.index);
    if (gate.kind == Gate::Kind::Input) inputs = true;
  }
  if (inputs) cfg->input_slot = slot++;
  for (int b : bits) {
    cfg->bits.push_back(b);
    cfg->bit_r[b] = slot++;
    cfg->bit_a[b] = slot++;
    cfg->bit_b[b] = slot++;
  }
  auto depth = circuit->depths();
  for (std::size_t w = 0; w < circuit->gates.size(); ++w) {
    if (circuit->gates[w].kind != Gate::Kind::Mul) continue;
    cfg->mul_slot[static_cast<int>(w)] = slot;
    slot += 3;
    std::size_t level = static_cast<std::size_t>(depth[w]);
    if (cfg->muls_by_level.size() < level) cfg->muls_by_level.resize(level);
    cfg->muls_by_level[level - 1].push_back(static_cast<int>(w));
  }
  cfg->slots = std::max(slot, 1);
  cfg->bit_rounds = bits.empty() ? 0 : 1;
  cfg->rounds = cfg->bit_rounds + static_cast<int>(cfg->muls_by_level.size());

  // Moves used when a run never resolves.
  std::vector<std::map<int, Action>> defaults = opt.defaults;
  if (defaults.empty()) {
    defaults.resize(n);
    for (int i = 1; i <= n; ++i)
      for (int v : g.type_values(i)) defaults[i - 1][v] = g.actions(i).front();
  }
  cfg->wills.assign(n, std::nullopt);
  if (opt.approach == CtApproach::AH) {
    for (int i = 1; i <= n; ++i) {
      // Wills do not see the type; the punishment must not depend on it.
      Action a = defaults[i - 1].begin()->second;
      if (opt.rho) {
        auto mix = (*opt.rho)(i, 0);
        auto it = std::find_if(mix.begin(), mix.end(), [](const auto& kv) { return kv.second == 1; });
        if (it == mix.end()) throw ContractError("wills need a pure punishment strategy");
        a = it->first;
      }
      cfg->wills[i - 1] = a;
    }
  }

  auto ext = std::make_shared<ExtensionGame>();
  ext->game = mediated_ext->game;
  ext->has_mediator = false;
  ext->policy = opt.approach == CtApproach::AH ? InfinitePlay::Wills : InfinitePlay::DefaultMove;
  ext->defaults = defaults;

  auto profile = std::make_shared<Profile>();
  profile->name = "cheaptalk-" + to_string(opt.regime);
  profile->players.assign(n, make_spec(cfg, Behavior{}));

  CheapTalkProfile ct;
  ct.params = P;
  ct.circuit = circuit;
  ct.ext = ext;
  ct.profile = profile;
  ct.mediated_ext = mediated_ext;
  ct.mediated = mediated;

  StrategySpec canonical = canonical_player();
  StrategySpec silent{"silent", [](int, int) { return std::make_unique<SilentPlayer>(); }};
  ct.H["ct-honest"] = canonical;
  ct.H["ct-corrupt"] = canonical;
  ct.H["ct-equivocate"] = canonical;
  ct.H["ct-staller"] = StrategySpec{"withholding-canonical", canonical.make};
  for (int s = 0; s <= 16; ++s) ct.H["ct-crash-" + std::to_string(s)] = silent;
  std::set<int> values;
  for (int i = 1; i <= n; ++i)
    for (int v : g.type_values(i)) values.insert(v);
  for (int v : values)
    ct.H["ct-input-" + std::to_string(v)] =
        StrategySpec{"report-" + std::to_string(v), [v](int, int) { return std::make_unique<MisreportingPlayer>(v); }};

  ct.budget.n = static_cast<std::uint64_t>(n);
  ct.budget.N = 2ull * static_cast<std::uint64_t>(std::max(1, mediated->r)) * static_cast<std::uint64_t>(n);
  ct.budget.c = std::max<std::uint64_t>(1, circuit->size());
  ct.budget.C = opt.budget_constant;

  std::ostringstream dg;
  dg << circuit->digest() << "-n" << n << "k" << k << "t" << t << "d" << P.d << "e" << P.e << "p" << P.p << "-"
     << to_string(opt.regime) << "-" << to_string(opt.approach) << (opt.fragile_output ? "-fragile" : "");
  ct.digest = dg.str();

  ct.impl = cfg;
  return ct;
}

StrategySpec ct_honest(const CheapTalkProfile& ct) { return make_spec(config_of(ct), Behavior{}); }

StrategySpec ct_crash(const CheapTalkProfile& ct, int reactions) {
  Behavior b;
  b.name = "ct-crash-" + std::to_string(reactions);
  b.crash_after = std::max(0, reactions);
  return make_spec(config_of(ct), b);
}

StrategySpec ct_input(const CheapTalkProfile& ct, int value) {
  Behavior b;
  b.name = "ct-input-" + std::to_string(value);
  b.input = value;
  return make_spec(config_of(ct), b);
}

StrategySpec ct_corrupt(const CheapTalkProfile& ct) {
  Behavior b;
  b.name = "ct-corrupt";
  b.corrupt = true;
  return make_spec(config_of(ct), b);
}

StrategySpec ct_equivocate(const CheapTalkProfile& ct) {
  Behavior b;
  b.name = "ct-equivocate";
  b.equivocate = true;
  return make_spec(config_of(ct), b);
}

StrategySpec ct_staller(const CheapTalkProfile& ct) {
  Behavior b;
  b.name = "ct-staller";
  b.staller = true;
  return make_spec(config_of(ct), b);
}

std::vector<Adversary> adversary_menu_for(const CheapTalkProfile& ct, const CtMenuOptions& opt) {
  std::vector<Adversary> menu;
  const auto& g = *ct.ext->game;
  auto single = [&](int i, StrategySpec s, std::shared_ptr<const Scheduler> sched = nullptr) {
    std::string name = s.name + "@" + std::to_string(i) + (sched ? "+" + sched->name() : "");
    menu.push_back(build_colluding_adversary({}, {i}, {{i, std::move(s)}}, std::move(sched), name));
  };
  for (int i : opt.players) {
    if (i < 1 || i > g.n()) throw ParameterError("menu player out of range");
    for (int s : opt.crash_after) single(i, ct_crash(ct, s));
    auto tv = g.type_values(i);
    if (tv.size() > 1)
      for (int v : tv) single(i, ct_input(ct, v));
    single(i, ct_corrupt(ct));
    single(i, ct_equivocate(ct));
    single(i, ct_staller(ct));
    if (opt.stalls) single(i, ct_honest(ct), std::make_shared<DelayPlayerScheduler>(i));
  }
  const bool punish = ct.params.regime == CtRegime::Punishment || ct.params.regime == CtRegime::EpsilonPunishment;
  if (punish && g.n() >= 2 && !opt.players.empty()) {
    int i = opt.players.front();
    int j = i % g.n() + 1;
    menu.push_back(build_colluding_adversary({i, j}, {}, {{i, ct_staller(ct)}, {j, ct_staller(ct)}}, nullptr,
                                             "coalition-staller@" + std::to_string(i) + "," + std::to_string(j)));
  }
  return menu;
}

}  // namespace asyncmed
