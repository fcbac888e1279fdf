#include "asyncmed/game.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace asyncmed {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParameterError("empty rational");
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    Rational q(text);
    q.canonicalize();
    return q;
  }
  std::string whole = text.substr(0, dot);
  std::string part = text.substr(dot + 1);
  bool negative = !whole.empty() && whole[0] == '-';
  if (negative) whole = whole.substr(1);
  if (whole.empty()) whole = "0";
  mpz_class den = 1;
  for (std::size_t i = 0; i < part.size(); ++i) den *= 10;
  mpz_class num(whole + part);
  Rational q(num, den);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string action_name(Action a) { return a == kBottom ? "bot" : std::to_string(a); }

std::string profile_name(const std::vector<int>& p) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out << ',';
    out << action_name(p[i]);
  }
  out << ')';
  return out.str();
}

UnderlyingGame::UnderlyingGame(int n, std::vector<TypeProfile> types, std::vector<Rational> prior,
                               std::vector<std::vector<Action>> actions)
    : n_(n), types_(std::move(types)), prior_(std::move(prior)), actions_(std::move(actions)) {
  if (n_ < 1) throw ParameterError("game needs at least one player");
  if (static_cast<int>(actions_.size()) != n_) throw ParameterError("one action set per player required");
  if (types_.size() != prior_.size()) throw ParameterError("one prior weight per type profile required");
  for (const auto& x : types_)
    if (static_cast<int>(x.size()) != n_) throw ParameterError("type profile length differs from n");
  for (const auto& a : actions_) {
    if (a.empty()) throw ParameterError("empty action set");
    profile_count_ *= a.size();
  }
  table_.resize(types_.size() * profile_count_);
}

bool UnderlyingGame::has_action(int player, Action a) const {
  const auto& set = actions_.at(player - 1);
  return std::find(set.begin(), set.end(), a) != set.end();
}

bool UnderlyingGame::has_type_value(int player, int value) const {
  for (const auto& x : types_)
    if (x[player - 1] == value) return true;
  return false;
}

std::vector<int> UnderlyingGame::type_values(int player) const {
  std::set<int> values;
  for (const auto& x : types_) values.insert(x[player - 1]);
  return {values.begin(), values.end()};
}

std::optional<std::size_t> UnderlyingGame::find_type(const TypeProfile& x) const {
  for (std::size_t i = 0; i < types_.size(); ++i)
    if (types_[i] == x) return i;
  return std::nullopt;
}

std::size_t UnderlyingGame::type_index(const TypeProfile& x) const {
  auto found = find_type(x);
  if (!found) throw TableMiss("unknown type profile " + profile_name(x));
  return *found;
}

std::size_t UnderlyingGame::action_index(const ActionProfile& a) const {
  if (static_cast<int>(a.size()) != n_) throw TableMiss("action profile " + profile_name(a) + " has wrong length");
  std::size_t index = 0;
  for (int i = 0; i < n_; ++i) {
    const auto& set = actions_[i];
    auto it = std::find(set.begin(), set.end(), a[i]);
    if (it == set.end())
      throw TableMiss("action " + action_name(a[i]) + " of player " + std::to_string(i + 1) + " in " +
                      profile_name(a) + " is not in the action set");
    index = index * set.size() + static_cast<std::size_t>(it - set.begin());
  }
  return index;
}

ActionProfile UnderlyingGame::action_profile_at(std::size_t index) const {
  ActionProfile a(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    a[i] = actions_[i][index % actions_[i].size()];
    index /= actions_[i].size();
  }
  return a;
}

void UnderlyingGame::set_utility(const TypeProfile& x, const ActionProfile& a, RationalVector u) {
  if (static_cast<int>(u.size()) != n_) throw ParameterError("utility vector length differs from n");
  table_[type_index(x) * profile_count_ + action_index(a)] = std::move(u);
}

RationalVector UnderlyingGame::payoff(const TypeProfile& x, const ActionProfile& a) const {
  const auto& row = table_[type_index(x) * profile_count_ + action_index(a)];
  if (row.empty()) throw TableMiss("no utility entry for types " + profile_name(x) + " actions " + profile_name(a));
  return row;
}

const Rational& UnderlyingGame::payoff(std::size_t typeIndex, std::size_t actionIndex, int player) const {
  const auto& row = table_[typeIndex * profile_count_ + actionIndex];
  if (row.empty()) throw TableMiss("no utility entry for type index " + std::to_string(typeIndex));
  return row[player - 1];
}

void UnderlyingGame::validate() const {
  Rational total = 0;
  for (const auto& p : prior_) {
    if (p < 0) throw ParameterError("negative prior weight");
    total += p;
  }
  if (total != 1) throw ParameterError("prior sums to " + to_string(total) + ", not 1");
  for (std::size_t t = 0; t < types_.size(); ++t)
    for (std::size_t a = 0; a < profile_count_; ++a)
      if (table_[t * profile_count_ + a].empty())
        throw TableMiss("no utility entry for types " + profile_name(types_[t]) + " actions " +
                        profile_name(action_profile_at(a)));
}

UtilityVariant::UtilityVariant(std::shared_ptr<const UnderlyingGame> base, Rational bound)
    : base_(std::move(base)), bound_(std::move(bound)), game_(*base_) {}

void UtilityVariant::set_utility(const TypeProfile& x, const ActionProfile& a, RationalVector u) {
  game_.set_utility(x, a, std::move(u));
}

RationalVector UtilityVariant::payoff(const TypeProfile& x, const ActionProfile& a) const {
  return game_.payoff(x, a);
}

bool UtilityVariant::respects_bound() const {
  Rational half = bound_ / 2;
  for (std::size_t t = 0; t < game_.types().size(); ++t)
    for (std::size_t a = 0; a < game_.action_profile_count(); ++a)
      for (int i = 1; i <= game_.n(); ++i) {
        const Rational& u = game_.payoff(t, a, i);
        if (u > half || u < -half) return false;
      }
  return true;
}

UnderlyingGame UtilityVariant::as_game() const { return game_; }

RationalVector payoff(const UnderlyingGame& g, const TypeProfile& x, const ActionProfile& a) {
  return g.payoff(x, a);
}

RationalVector payoff(const UtilityVariant& g, const TypeProfile& x, const ActionProfile& a) {
  return g.payoff(x, a);
}

std::shared_ptr<const UnderlyingGame> build_parity_game(int n, int k) {
  if (k < 0 || n <= 3 * k) throw ParameterError("parity game needs n > 3k");
  std::vector<std::vector<Action>> actions(n, std::vector<Action>{0, 1, kBottom});
  auto game = std::make_shared<UnderlyingGame>(n, std::vector<TypeProfile>{TypeProfile(n, 0)},
                                               std::vector<Rational>{1}, actions);
  const TypeProfile x(n, 0);
  for (std::size_t idx = 0; idx < game->action_profile_count(); ++idx) {
    ActionProfile a = game->action_profile_at(idx);
    int bottoms = 0, zeros = 0, ones = 0;
    for (Action v : a) {
      if (v == kBottom) ++bottoms;
      else if (v == 0) ++zeros;
      else ++ones;
    }
    Rational u;
    if (bottoms >= k + 1) u = frac(11, 10);
    else if (ones == 0) u = 1;  // the rest play 0 (n > 3k leaves at least one non-bottom player)
    else if (zeros == 0) u = 2;
    else u = 0;
    game->set_utility(x, a, RationalVector(n, u));
  }
  return game;
}

std::shared_ptr<const UnderlyingGame> build_majority_game(int n) {
  if (n < 1) throw ParameterError("majority game needs n >= 1");
  std::vector<std::vector<Action>> actions(n, std::vector<Action>{0, 1});
  auto game = std::make_shared<UnderlyingGame>(n, std::vector<TypeProfile>{TypeProfile(n, 0)},
                                               std::vector<Rational>{1}, actions);
  const TypeProfile x(n, 0);
  for (std::size_t idx = 0; idx < game->action_profile_count(); ++idx) {
    ActionProfile a = game->action_profile_at(idx);
    int ones = static_cast<int>(std::count(a.begin(), a.end(), 1));
    int zeros = n - ones;
    RationalVector u(n);
    for (int i = 0; i < n; ++i) {
      bool win = a[i] == 1 ? 2 * ones > n : 2 * zeros > n;
      u[i] = win ? 1 : 0;
    }
    game->set_utility(x, a, u);
  }
  return game;
}

}  // namespace asyncmed
