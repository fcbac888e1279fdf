#pragma once

#include <cstdint>
#include <vector>

#include "asyncmed/distribution.hpp"
#include "asyncmed/schedulers.hpp"

namespace asyncmed {

struct SchedulerClasses {
  std::vector<OutcomeFn> functions;                // one per class, canonical order
  std::vector<ChoiceTreeScheduler> representatives;  // same order
  std::uint64_t nodes = 0;                         // pattern nodes expanded
  std::size_t size() const { return functions.size(); }
};

struct ClassOptions {
  std::uint64_t node_cap = 200000;
  std::int64_t step_budget = 10000;
};

// Deterministic schedulers that only ever deliver (scheduling without
// delivery happens automatically once nothing is pending), grouped by the
// type-profile to outcome-distribution function they induce.
SchedulerClasses enumerate_scheduler_classes(const ExtensionGame& ext, const Profile& profile,
                                             const ClassOptions& opt = {});

}  // namespace asyncmed
