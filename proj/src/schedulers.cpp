#include "asyncmed/schedulers.hpp"

#include <algorithm>
#include <numeric>

namespace asyncmed {

namespace {

std::size_t oldest_matching(const std::vector<MessageHeader>& p, auto pred) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (pred(p[i])) return i;
  return p.size();
}

}  // namespace

Choice FifoScheduler::decide(const SchedView&, CoinSource&) const { return Choice::deliver(0); }

Choice LifoScheduler::decide(const SchedView& v, CoinSource&) const { return Choice::deliver(v.pending->size() - 1); }

Choice RandomScheduler::decide(const SchedView& v, CoinSource& env) const {
  return Choice::deliver(static_cast<std::size_t>(env.draw(kEnvironment, v.pending->size())));
}

Choice RoundRobinScheduler::decide(const SchedView& v, CoinSource&) const {
  const auto& p = *v.pending;
  int span = v.n + 1;
  int first = static_cast<int>(v.step % span);
  for (int k = 0; k < span; ++k) {
    int to = (first + k) % span;
    std::size_t idx = oldest_matching(p, [to](const MessageHeader& h) { return h.to == to; });
    if (idx < p.size()) return Choice::deliver(idx);
  }
  return Choice::deliver(0);
}

SenderPriorityScheduler::SenderPriorityScheduler(std::vector<int> order, std::string label)
    : label_(std::move(label)) {
  int top = order.empty() ? 0 : *std::max_element(order.begin(), order.end());
  rank_.assign(top + 1, static_cast<int>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) rank_[order[i]] = static_cast<int>(i);
}

Choice SenderPriorityScheduler::decide(const SchedView& v, CoinSource&) const {
  const auto& p = *v.pending;
  std::size_t best = 0;
  int best_rank = 1 << 30;
  for (std::size_t i = 0; i < p.size(); ++i) {
    int from = p[i].from;
    int r = from < static_cast<int>(rank_.size()) ? rank_[from] : static_cast<int>(rank_.size());
    if (r < best_rank) {
      best_rank = r;
      best = i;
    }
  }
  return Choice::deliver(best);
}

Choice DelayPlayerScheduler::decide(const SchedView& v, CoinSource&) const {
  const auto& p = *v.pending;
  std::size_t idx =
      oldest_matching(p, [this](const MessageHeader& h) { return h.from != player_ && h.to != player_; });
  return Choice::deliver(idx < p.size() ? idx : 0);
}

Choice MostlyFifoScheduler::decide(const SchedView& v, CoinSource& env) const {
  if (env.draw(kEnvironment, 4) != 0) return Choice::deliver(0);
  return Choice::deliver(static_cast<std::size_t>(env.draw(kEnvironment, v.pending->size())));
}

Choice SilentScheduler::decide(const SchedView&, CoinSource&) const { return Choice::withhold_all(); }

Choice WithholdMediatorScheduler::decide(const SchedView& v, CoinSource&) const {
  const auto& p = *v.pending;
  std::size_t idx = oldest_matching(p, [this](const MessageHeader& h) { return h.from == kMediator && h.seq >= seq_; });
  if (idx < p.size()) return Choice::withhold(idx);
  return Choice::deliver(0);
}

std::string WithholdSendersScheduler::name() const {
  std::string s = "withhold-from";
  for (int i : senders_) s += "-" + std::to_string(i);
  return s;
}

Choice WithholdSendersScheduler::decide(const SchedView& v, CoinSource&) const {
  const auto& p = *v.pending;
  std::size_t idx = oldest_matching(p, [this](const MessageHeader& h) { return senders_.count(h.from) > 0; });
  if (idx < p.size()) return Choice::withhold(idx);
  return Choice::deliver(0);
}

std::size_t find_pending(const SchedView& v, const ChannelKey& key) {
  const auto& p = *v.pending;
  auto [from, to, seq] = key;
  return oldest_matching(p, [&](const MessageHeader& h) { return h.from == from && h.to == to && h.seq == seq; });
}

Choice ScriptedScheduler::decide(const SchedView& v, CoinSource&) const {
  std::size_t done = 0;
  for (const auto& e : *v.pattern) done += e.kind == 'D';
  if (done < script_.size()) {
    std::size_t idx = find_pending(v, script_[done]);
    if (idx < v.pending->size()) return Choice::deliver(idx);
  }
  return Choice::deliver(0);
}

Choice ChoiceTreeScheduler::decide(const SchedView& v, CoinSource&) const {
  auto it = table_.find(*v.pattern);
  if (it != table_.end()) {
    std::size_t idx = find_pending(v, it->second);
    if (idx < v.pending->size()) return Choice::deliver(idx);
  }
  return Choice::deliver(0);
}

Choice DeferringScheduler::decide(const SchedView& v, CoinSource&) const {
  const auto& p = *v.pending;
  std::size_t idx = oldest_matching(
      p, [this](const MessageHeader& h) { return !(h.to == kMediator && h.from > 0 && !present_.count(h.from)); });
  return Choice::deliver(idx < p.size() ? idx : 0);
}

std::vector<std::shared_ptr<const Scheduler>> standard_menu(int n) {
  std::vector<int> up(n + 1), down(n + 1);
  std::iota(up.begin(), up.end(), 0);
  std::iota(down.rbegin(), down.rend(), 0);
  std::vector<int> evens_first;
  for (int i = 0; i <= n; i += 2) evens_first.push_back(i);
  for (int i = 1; i <= n; i += 2) evens_first.push_back(i);
  return {std::make_shared<FifoScheduler>(),
          std::make_shared<LifoScheduler>(),
          std::make_shared<RandomScheduler>(),
          std::make_shared<RoundRobinScheduler>(),
          std::make_shared<SenderPriorityScheduler>(up, "sender-ascending"),
          std::make_shared<SenderPriorityScheduler>(down, "sender-descending"),
          std::make_shared<SenderPriorityScheduler>(evens_first, "sender-evens-first"),
          std::make_shared<DelayPlayerScheduler>(1),
          std::make_shared<DelayPlayerScheduler>(n),
          std::make_shared<MostlyFifoScheduler>()};
}

}  // namespace asyncmed
