#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "asyncmed/field.hpp"
#include "asyncmed/mediator.hpp"

namespace asyncmed {

class CircuitTooLarge : public ParameterError {
 public:
  CircuitTooLarge(const std::string& what, std::size_t cap) : ParameterError(what), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// What the mediator tells every player, as a function of the reported types
// and its coin outcomes.
struct DecisionTable {
  int n = 0;
  std::vector<std::vector<int>> type_values;   // per player
  std::vector<std::vector<Action>> actions;    // per player
  std::vector<std::uint64_t> coin_arity;       // mediator draws, in order
  std::map<std::pair<TypeProfile, std::vector<std::uint64_t>>, ActionProfile> table;
  const ActionProfile& at(const TypeProfile& x, const std::vector<std::uint64_t>& coins) const;
};

// Runs the mediator game under FIFO for every type profile and coin sequence.
// Every run must draw coins of the same arities in the same order.
DecisionTable decision_table(const ExtensionGame& ext, const Profile& profile);

struct Gate {
  enum class Kind { Const, Input, CoinBit, Add, Mul, Scale };
  Kind kind = Kind::Const;
  std::uint64_t c = 0;  // Const value, Scale factor
  int a = -1;           // operand wires
  int b = -1;
  int index = 0;        // Input: player; CoinBit: bit number
};

struct MediatorCircuit {
  std::uint64_t p = 65537;
  int n = 0;
  std::vector<Gate> gates;  // topological order; wire w is the output of gate w
  std::vector<int> outputs;  // output wire per player (index i-1)
  int coin_bits = 0;
  std::vector<std::vector<int>> type_values;  // input wire value = index in this list
  std::vector<std::vector<Action>> actions;   // output wire value = index in this list
  std::vector<std::uint64_t> coin_arity;

  std::size_t multiplications() const;
  // Multiplicative depth of every wire.
  std::vector<int> depths() const;
  std::size_t size() const { return gates.size(); }
  std::vector<std::uint64_t> evaluate(const std::vector<std::uint64_t>& inputs, const std::vector<int>& bits) const;
  ActionProfile actions_for(const TypeProfile& x, const std::vector<std::uint64_t>& coins) const;
  std::string digest() const;
};

// Coin outcomes in mixed radix to the circuit's coin bits (arities must be powers of two).
std::vector<int> coin_bits_of(const std::vector<std::uint64_t>& arity, const std::vector<std::uint64_t>& coins);

MediatorCircuit compile_decision_table(const DecisionTable& t, std::uint64_t p = 65537, std::size_t gate_cap = 4096);

// Compiles the decision function of the transform's underlying mediator.
MediatorCircuit compile_mediator_to_circuit(const MinimallyInformativeProfile& mi, std::uint64_t p = 65537,
                                            std::size_t gate_cap = 4096);

// Exhaustive comparison against the table; returns the number of mismatches.
std::size_t verify_circuit(const MediatorCircuit& c, const DecisionTable& t);

}  // namespace asyncmed
