#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace asyncmed {

class DecodeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic modulo a prime below 2^31.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p);
  std::uint64_t p() const { return p_; }
  std::uint64_t norm(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p_) : r);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % p_; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + p_ - b) % p_; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return (a * b) % p_; }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t inv(std::uint64_t a) const;  // throws on 0
  // A square root of a quadratic residue; the smaller of the two roots.
  std::optional<std::uint64_t> sqrt(std::uint64_t a) const;
  std::uint64_t uniform(std::mt19937_64& rng) const;

 private:
  std::uint64_t p_;
};

bool is_prime(std::uint64_t p);

using Poly = std::vector<std::uint64_t>;  // coefficients, constant first

std::uint64_t evaluate(const PrimeField& F, const Poly& f, std::uint64_t x);
// Lagrange interpolation through distinct points; degree < points.size().
Poly interpolate(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points);
// Lagrange coefficients for the value at 0 from the given abscissas.
std::vector<std::uint64_t> lagrange_at_zero(const PrimeField& F, const std::vector<std::uint64_t>& xs);

// Berlekamp-Welch: the polynomial of degree <= d within distance e of the
// points, if one exists. Needs points.size() >= d + 2e + 1.
std::optional<Poly> berlekamp_welch(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points,
                                    int d, int e);

// Online error correction: a polynomial of degree <= d that agrees with at
// least d + e + 1 of the points and disagrees with at most e, if the points
// already determine it.
std::optional<Poly> online_decode(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points,
                                  int d, int e);

// Evaluations at 1..n of a uniformly random degree-d polynomial with the
// given constant term.
std::vector<std::uint64_t> shamir_share(const PrimeField& F, std::uint64_t secret, int d, int n, std::mt19937_64& rng);
// Same, returning the polynomial too.
Poly random_poly(const PrimeField& F, std::uint64_t constant, int d, std::mt19937_64& rng);

// points are (x, share). Throws std::invalid_argument if fewer than d+2e+1
// points and DecodeFailure if more than e of them are wrong.
std::uint64_t shamir_reconstruct(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points,
                                 int d, int e);

}  // namespace asyncmed
