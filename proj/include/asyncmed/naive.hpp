#pragma once

#include <memory>
#include <vector>

#include "asyncmed/adversary.hpp"

namespace asyncmed {

// Cheap talk for the parity game that imitates the parity mediator directly.
// Players 1..k+1 each draw (b_j, a_j), send a_j + b_j i mod 2 to every i, and
// reveal b_j to everyone at their next scheduling. A player plays the xor of
// the k+1 revealed bits once all have arrived. Every will is bottom.
struct NaiveParity {
  std::shared_ptr<const ExtensionGame> ext;
  std::shared_ptr<const Profile> profile;
  int n = 0;
  int k = 0;
};

NaiveParity naive_parity_cheaptalk(int n, int k);

// Contributors i and j (i + j odd) pool their hints on the blackboard, which
// gives them b. If b = 0 they never reveal and play bottom.
Adversary naive_parity_staller(const NaiveParity& np, int i, int j);

// Every odd-sum pair of contributors as a staller, plus simple single-player
// deviations (never reveal, always play 0, always play 1).
std::vector<Adversary> naive_menu(const NaiveParity& np);

}  // namespace asyncmed
