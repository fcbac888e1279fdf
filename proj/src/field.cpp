#include "asyncmed/field.hpp"

#include <string>

namespace asyncmed {

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p >= (1ull << 31) || !is_prime(p)) throw std::invalid_argument("field modulus " + std::to_string(p) + " is not a prime below 2^31");
}

std::uint64_t PrimeField::pow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t r = 1;
  a %= p_;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t PrimeField::inv(std::uint64_t a) const {
  if (a % p_ == 0) throw std::domain_error("inverse of zero");
  return pow(a, p_ - 2);
}

std::optional<std::uint64_t> PrimeField::sqrt(std::uint64_t a) const {
  a %= p_;
  if (a == 0) return 0;
  if (p_ == 2) return a;
  if (pow(a, (p_ - 1) / 2) != 1) return std::nullopt;
  // Tonelli-Shanks.
  std::uint64_t q = p_ - 1, s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  std::uint64_t z = 2;
  while (pow(z, (p_ - 1) / 2) != p_ - 1) ++z;
  std::uint64_t m = s, c = pow(z, q), t = pow(a, q), r = pow(a, (q + 1) / 2);
  while (t != 1) {
    std::uint64_t i = 0, tt = t;
    while (tt != 1) {
      tt = mul(tt, tt);
      ++i;
    }
    std::uint64_t b = c;
    for (std::uint64_t j = 0; j + 1 < m - i; ++j) b = mul(b, b);
    m = i;
    c = mul(b, b);
    t = mul(t, c);
    r = mul(r, b);
  }
  return std::min(r, p_ - r);
}

std::uint64_t PrimeField::uniform(std::mt19937_64& rng) const {
  return std::uniform_int_distribution<std::uint64_t>(0, p_ - 1)(rng);
}

std::uint64_t evaluate(const PrimeField& F, const Poly& f, std::uint64_t x) {
  std::uint64_t r = 0;
  for (std::size_t i = f.size(); i-- > 0;) r = F.add(F.mul(r, x), f[i]);
  return r;
}

Poly interpolate(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) {
  const std::size_t m = points.size();
  Poly result(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    // basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j)
    Poly basis{1};
    std::uint64_t denom = 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      Poly next(basis.size() + 1, 0);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        next[k + 1] = F.add(next[k + 1], basis[k]);
        next[k] = F.add(next[k], F.mul(basis[k], F.neg(points[j].first % F.p())));
      }
      basis = std::move(next);
      denom = F.mul(denom, F.sub(points[i].first % F.p(), points[j].first % F.p()));
    }
    std::uint64_t scale = F.mul(points[i].second % F.p(), F.inv(denom));
    for (std::size_t k = 0; k < basis.size(); ++k) result[k] = F.add(result[k], F.mul(basis[k], scale));
  }
  while (result.size() > 1 && result.back() == 0) result.pop_back();
  return result;
}

std::vector<std::uint64_t> lagrange_at_zero(const PrimeField& F, const std::vector<std::uint64_t>& xs) {
  std::vector<std::uint64_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint64_t num = 1, den = 1;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      num = F.mul(num, F.neg(xs[j] % F.p()));
      den = F.mul(den, F.sub(xs[i] % F.p(), xs[j] % F.p()));
    }
    out[i] = F.mul(num, F.inv(den));
  }
  return out;
}

namespace {

// Solves A z = b over F by Gaussian elimination; any solution, or none.
std::optional<std::vector<std::uint64_t>> solve(const PrimeField& F, std::vector<std::vector<std::uint64_t>> A,
                                                std::vector<std::uint64_t> b) {
  const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && A[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(A[piv], A[r]);
    std::swap(b[piv], b[r]);
    std::uint64_t iv = F.inv(A[r][c]);
    for (auto& v : A[r]) v = F.mul(v, iv);
    b[r] = F.mul(b[r], iv);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      std::uint64_t f = A[i][c];
      for (std::size_t k = 0; k < cols; ++k) A[i][k] = F.sub(A[i][k], F.mul(f, A[r][k]));
      b[i] = F.sub(b[i], F.mul(f, b[r]));
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  std::vector<std::uint64_t> z(cols, 0);
  for (std::size_t i = 0; i < r; ++i) z[pivot_col[i]] = b[i];
  return z;
}

// Quotient of a by b when b divides a exactly.
std::optional<Poly> divide(const PrimeField& F, Poly a, Poly b) {
  while (b.size() > 1 && b.back() == 0) b.pop_back();
  while (a.size() > 1 && a.back() == 0) a.pop_back();
  if (b.size() == 1 && b[0] == 0) return std::nullopt;
  if (a.size() < b.size()) {
    if (a.size() == 1 && a[0] == 0) return Poly{0};
    return std::nullopt;
  }
  Poly q(a.size() - b.size() + 1, 0);
  std::uint64_t lead = F.inv(b.back());
  for (std::size_t i = q.size(); i-- > 0;) {
    std::uint64_t c = F.mul(a[i + b.size() - 1], lead);
    q[i] = c;
    for (std::size_t j = 0; j < b.size(); ++j) a[i + j] = F.sub(a[i + j], F.mul(c, b[j]));
  }
  for (auto v : a)
    if (v != 0) return std::nullopt;
  return q;
}

std::size_t agreement(const PrimeField& F, const Poly& f, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) {
  std::size_t c = 0;
  for (const auto& [x, y] : points)
    if (evaluate(F, f, x) == y % F.p()) ++c;
  return c;
}

}  // namespace

std::optional<Poly> berlekamp_welch(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points,
                                    int d, int e) {
  const std::size_t m = points.size();
  if (static_cast<int>(m) < d + 2 * e + 1) return std::nullopt;
  if (e == 0) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> head(points.begin(), points.begin() + d + 1);
    Poly f = interpolate(F, head);
    if (agreement(F, f, points) == m) return f;
    return std::nullopt;
  }
  // Unknowns: Q (degree d+e, d+e+1 coeffs), E (monic degree e, e coeffs).
  const std::size_t qn = d + e + 1, en = e;
  std::vector<std::vector<std::uint64_t>> A(m, std::vector<std::uint64_t>(qn + en, 0));
  std::vector<std::uint64_t> b(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t x = points[i].first % F.p(), y = points[i].second % F.p();
    std::uint64_t xp = 1;
    for (std::size_t k = 0; k < qn; ++k) {
      A[i][k] = xp;
      xp = F.mul(xp, x);
    }
    xp = 1;
    for (std::size_t k = 0; k < en; ++k) {
      A[i][qn + k] = F.neg(F.mul(y, xp));
      xp = F.mul(xp, x);
    }
    b[i] = F.mul(y, F.pow(x, e));  // y x^e from the monic term
  }
  auto z = solve(F, A, b);
  if (!z) return std::nullopt;
  Poly Q(z->begin(), z->begin() + qn);
  Poly E(z->begin() + qn, z->end());
  E.push_back(1);
  auto f = divide(F, Q, E);
  if (!f) return std::nullopt;
  if (static_cast<int>(f->size()) > d + 1) return std::nullopt;
  if (agreement(F, *f, points) + e < m) return std::nullopt;
  return f;
}

std::optional<Poly> online_decode(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points,
                                  int d, int e) {
  const int m = static_cast<int>(points.size());
  if (m < d + e + 1) return std::nullopt;
  // Fast path: the first d+1 points are usually correct.
  {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> head(points.begin(), points.begin() + d + 1);
    Poly f = interpolate(F, head);
    int agree = static_cast<int>(agreement(F, f, points));
    if (agree >= d + e + 1 && m - agree <= e) return f;
  }
  for (int errs = std::min(e, (m - d - 1) / 2); errs >= 1; --errs) {
    auto f = berlekamp_welch(F, points, d, errs);
    if (!f) continue;
    int agree = static_cast<int>(agreement(F, *f, points));
    if (agree >= d + e + 1 && m - agree <= e) return f;
  }
  return std::nullopt;
}

Poly random_poly(const PrimeField& F, std::uint64_t constant, int d, std::mt19937_64& rng) {
  Poly f(d + 1);
  f[0] = constant % F.p();
  for (int i = 1; i <= d; ++i) f[i] = F.uniform(rng);
  return f;
}

std::vector<std::uint64_t> shamir_share(const PrimeField& F, std::uint64_t secret, int d, int n, std::mt19937_64& rng) {
  if (d < 0 || n < 1) throw std::invalid_argument("bad sharing parameters");
  Poly f = random_poly(F, secret, d, rng);
  std::vector<std::uint64_t> out(n);
  for (int i = 1; i <= n; ++i) out[i - 1] = evaluate(F, f, i);
  return out;
}

std::uint64_t shamir_reconstruct(const PrimeField& F, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points,
                                 int d, int e) {
  if (static_cast<int>(points.size()) < d + 2 * e + 1)
    throw std::invalid_argument("need at least " + std::to_string(d + 2 * e + 1) + " points, got " +
                                std::to_string(points.size()));
  for (int errs = e; errs >= 0; --errs) {
    auto f = berlekamp_welch(F, points, d, errs);
    if (f && agreement(F, *f, points) + e >= points.size()) return (*f)[0];
  }
  throw DecodeFailure("more than " + std::to_string(e) + " corrupted shares");
}

}  // namespace asyncmed
