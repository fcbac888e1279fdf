#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace asyncmed {

// A non-relaxed scheduler tried to leave messages undelivered.
class FairnessViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A strategy's reactions were not a function of its own local history.
class InformationSetViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationOverflow : public std::runtime_error {
 public:
  EnumerationOverflow(const std::string& what, std::uint64_t reached)
      : std::runtime_error(what + " (reached " + std::to_string(reached) + ")"), reached_(reached) {}
  std::uint64_t reached() const { return reached_; }

 private:
  std::uint64_t reached_;
};

}  // namespace asyncmed
