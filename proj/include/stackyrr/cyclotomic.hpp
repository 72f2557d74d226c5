#pragma once

// Exact arithmetic in the cyclotomic fields Q(zeta_N).
//
// An element is stored in the power basis 1, z, ..., z^(phi(N)-1) of
// Q[X]/Phi_N(X) at its minimal conductor N. Conductors congruent to 2 mod 4
// never appear in canonical form (Q(zeta_2m) = Q(zeta_m) for odd m), and
// rationals live at conductor 1. With that normalization two values are equal
// exactly when their conductors and coefficient vectors agree.
//
// Binary operations lift both operands to Q(zeta_lcm) and re-canonicalize.
// A conductor above conductor_cap() raises ResourceError.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "rational.hpp"

namespace stackyrr {

namespace cyclo_detail {

inline int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

inline std::vector<int> prime_factors(int n) {
  std::vector<int> out;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Field that Q(zeta_n) actually is: n itself, or n/2 when n = 2 mod 4.
inline int canonical_conductor(int n) { return (n % 4 == 2) ? n / 2 : n; }

using IntPoly = std::vector<BigInt>;  // low degree first

inline IntPoly exact_divide(IntPoly num, const IntPoly& den) {
  const std::size_t dn = den.size() - 1;
  IntPoly q(num.size() - dn, 0);
  for (std::size_t i = num.size(); i-- > dn;) {
    BigInt c = num[i];  // den is monic
    q[i - dn] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return q;
}

struct FieldTable {
  int modulus = 1;    // exponents live in Z/modulus
  int conductor = 1;  // canonical conductor of the field
  int dim = 1;        // phi(conductor)
  // power[e] holds the coordinates of zeta_modulus^e in the power basis of
  // Q(zeta_conductor).
  std::vector<std::vector<long>> power;
};

struct Projection {
  std::vector<int> rows;                    // pivot rows of the embedding matrix
  std::vector<std::vector<Rational>> inv;  // inverse of the square pivot block
};

class Cache {
 public:
  static Cache& instance() {
    static Cache cache;
    return cache;
  }

  const IntPoly& cyclotomic_poly(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    return poly_locked(n);
  }

  const FieldTable& table(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    return table_locked(n);
  }

  const Projection& projection(int from, int to) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(from, to);
    auto it = projections_.find(key);
    if (it != projections_.end()) return *it->second;
    auto proj = build_projection(table_locked(from), to);
    return *projections_.emplace(key, std::move(proj)).first->second;
  }

 private:
  const IntPoly& poly_locked(int n) {
    auto it = polys_.find(n);
    if (it != polys_.end()) return it->second;
    IntPoly num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (int d = 1; d < n; ++d) {
      if (n % d == 0) num = exact_divide(std::move(num), poly_locked(d));
    }
    return polys_.emplace(n, std::move(num)).first->second;
  }

  const FieldTable& table_locked(int n) {
    auto it = tables_.find(n);
    if (it != tables_.end()) return *it->second;
    auto t = std::make_unique<FieldTable>();
    t->modulus = n;
    t->conductor = canonical_conductor(n);
    t->dim = euler_phi(t->conductor);
    if (t->conductor == n) {
      const IntPoly& phi = poly_locked(n);
      const int d = t->dim;
      std::vector<long> cur(d, 0);
      cur[0] = 1;
      t->power.reserve(n);
      for (int e = 0; e < n; ++e) {
        t->power.push_back(cur);
        // multiply by X and reduce with the monic Phi_n
        long top = cur[d - 1];
        for (int j = d - 1; j > 0; --j) cur[j] = cur[j - 1];
        cur[0] = 0;
        if (top != 0) {
          for (int j = 0; j < d; ++j) cur[j] -= top * phi[j].get_si();
        }
      }
    } else {
      // zeta_{2m} = -zeta_m^{(m+1)/2} for odd m
      const int m = t->conductor;
      const FieldTable& base = table_locked(m);
      const long half = (m + 1) / 2;
      t->power.reserve(n);
      for (int e = 0; e < n; ++e) {
        std::vector<long> v = base.power[static_cast<std::size_t>((e * half) % m)];
        if (e % 2 == 1) {
          for (auto& c : v) c = -c;
        }
        t->power.push_back(std::move(v));
      }
    }
    return *tables_.emplace(n, std::move(t)).first->second;
  }

  std::unique_ptr<Projection> build_projection(const FieldTable& big, int to) {
    const FieldTable& small = table_locked(to);
    const int rows = big.dim;
    const int cols = small.dim;
    const int step = big.modulus / to;
    // Embedding matrix: column j is zeta_to^j written in the big basis.
    std::vector<std::vector<Rational>> emb(rows, std::vector<Rational>(cols));
    for (int j = 0; j < cols; ++j) {
      const auto& v = big.power[static_cast<std::size_t>(step * j)];
      for (int i = 0; i < rows; ++i) emb[i][j] = v[i];
    }
    // Greedy row selection keeping an echelon basis of the chosen rows.
    auto proj = std::make_unique<Projection>();
    std::vector<std::vector<Rational>> echelon;
    std::vector<int> pivot_col;
    for (int i = 0; i < rows && static_cast<int>(proj->rows.size()) < cols; ++i) {
      std::vector<Rational> r = emb[i];
      for (std::size_t b = 0; b < echelon.size(); ++b) {
        const int pc = pivot_col[b];
        if (r[pc] != 0) {
          Rational f = r[pc] / echelon[b][pc];
          for (int j = 0; j < cols; ++j) r[j] -= f * echelon[b][j];
        }
      }
      auto nz = std::find_if(r.begin(), r.end(), [](const Rational& q) { return q != 0; });
      if (nz == r.end()) continue;
      pivot_col.push_back(static_cast<int>(nz - r.begin()));
      echelon.push_back(std::move(r));
      proj->rows.push_back(i);
    }
    // Gauss-Jordan inverse of the selected square block.
    std::vector<std::vector<Rational>> a(cols, std::vector<Rational>(2 * cols));
    for (int i = 0; i < cols; ++i) {
      for (int j = 0; j < cols; ++j) a[i][j] = emb[proj->rows[i]][j];
      a[i][cols + i] = 1;
    }
    for (int c = 0; c < cols; ++c) {
      int p = c;
      while (a[p][c] == 0) ++p;
      std::swap(a[p], a[c]);
      Rational inv_p = 1 / a[c][c];
      for (auto& x : a[c]) x *= inv_p;
      for (int i = 0; i < cols; ++i) {
        if (i == c || a[i][c] == 0) continue;
        Rational f = a[i][c];
        for (int j = 0; j < 2 * cols; ++j) a[i][j] -= f * a[c][j];
      }
    }
    proj->inv.assign(cols, std::vector<Rational>(cols));
    for (int i = 0; i < cols; ++i)
      for (int j = 0; j < cols; ++j) proj->inv[i][j] = a[i][cols + j];
    return proj;
  }

  std::mutex mu_;
  std::map<int, IntPoly> polys_;
  std::map<int, std::unique_ptr<FieldTable>> tables_;
  std::map<std::pair<int, int>, std::unique_ptr<Projection>> projections_;
};

inline void check_conductor(long n) {
  if (n > conductor_cap()) {
    throw ResourceError("conductor " + std::to_string(n) + " exceeds cap " + std::to_string(conductor_cap()));
  }
}

}  // namespace cyclo_detail

/// Coefficients of the n-th cyclotomic polynomial, constant term first.
inline std::vector<BigInt> cyclotomic_polynomial(int n) {
  if (n < 1) throw DomainError("invalid conductor " + std::to_string(n));
  return cyclo_detail::Cache::instance().cyclotomic_poly(n);
}

class CyclotomicNumber {
 public:
  CyclotomicNumber() : coeffs_(1) {}
  CyclotomicNumber(long v) : coeffs_{Rational(v)} {}  // NOLINT(google-explicit-constructor)
  CyclotomicNumber(Rational q) : coeffs_{std::move(q)} {}  // NOLINT(google-explicit-constructor)

  /// Builds sum_j coeffs[j] * zeta_n^j for any n >= 1 (the input need not be
  /// reduced nor at minimal conductor) and canonicalizes.
  static CyclotomicNumber from_power_basis(int n, const std::vector<Rational>& coeffs) {
    if (n < 1) throw DomainError("invalid conductor " + std::to_string(n));
    cyclo_detail::check_conductor(n);
    std::vector<Rational> exps(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < coeffs.size(); ++j) exps[j % n] += coeffs[j];
    return from_exponents(n, exps);
  }

  int conductor() const { return conductor_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const { return conductor_ == 1 && coeffs_[0] == 0; }
  bool is_rational() const { return conductor_ == 1; }

  const Rational& rational_value() const {
    if (!is_rational()) throw DomainError("cyclotomic number " + to_string() + " is not rational");
    return coeffs_[0];
  }

  CyclotomicNumber operator-() const {
    CyclotomicNumber out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }

  friend CyclotomicNumber operator+(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    if (a.is_rational() && b.is_rational()) return CyclotomicNumber(a.coeffs_[0] + b.coeffs_[0]);
    const int n = std::lcm(a.conductor_, b.conductor_);
    std::vector<Rational> ca = a.lifted(n);
    std::vector<Rational> cb = b.lifted(n);
    for (std::size_t j = 0; j < ca.size(); ++j) ca[j] += cb[j];
    return from_canonical_field(n, std::move(ca));
  }

  friend CyclotomicNumber operator-(const CyclotomicNumber& a, const CyclotomicNumber& b) { return a + (-b); }

  friend CyclotomicNumber operator*(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    if (a.is_rational()) return b.scaled(a.coeffs_[0]);
    if (b.is_rational()) return a.scaled(b.coeffs_[0]);
    const int n = std::lcm(a.conductor_, b.conductor_);
    std::vector<Rational> ca = a.lifted(n);
    std::vector<Rational> cb = b.lifted(n);
    std::vector<Rational> exps(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (ca[i] == 0) continue;
      for (std::size_t j = 0; j < cb.size(); ++j) {
        if (cb[j] == 0) continue;
        exps[(i + j) % n] += ca[i] * cb[j];
      }
    }
    return from_exponents(n, exps);
  }

  friend CyclotomicNumber operator/(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    return a * b.inverse();
  }

  CyclotomicNumber& operator+=(const CyclotomicNumber& o) { return *this = *this + o; }
  CyclotomicNumber& operator-=(const CyclotomicNumber& o) { return *this = *this - o; }
  CyclotomicNumber& operator*=(const CyclotomicNumber& o) { return *this = *this * o; }
  CyclotomicNumber& operator/=(const CyclotomicNumber& o) { return *this = *this / o; }

  friend bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    return a.conductor_ == b.conductor_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const CyclotomicNumber& a, const CyclotomicNumber& b) { return !(a == b); }

  /// Multiplicative inverse: solves (a * sum_j c_j z^j) = 1 for the c_j,
  /// using the multiplication-by-a matrix in the power basis.
  CyclotomicNumber inverse() const {
    if (is_zero()) throw DomainError("division by zero");
    if (is_rational()) return CyclotomicNumber(Rational(1) / coeffs_[0]);
    const auto& phi = cyclo_detail::Cache::instance().cyclotomic_poly(conductor_);
    const int d = static_cast<int>(coeffs_.size());
    // augmented system [M | e_0]; column j of M is a * z^j
    std::vector<std::vector<Rational>> m(d, std::vector<Rational>(d + 1));
    std::vector<Rational> col = coeffs_;
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) m[i][j] = col[i];
      Rational top = col[d - 1];
      for (int i = d - 1; i > 0; --i) col[i] = col[i - 1];
      col[0] = 0;
      if (top != 0) {
        for (int i = 0; i < d; ++i) {
          if (phi[i] != 0) col[i] -= top * phi[i];
        }
      }
    }
    m[0][d] = 1;
    for (int c = 0; c < d; ++c) {
      int p = c;
      while (p < d && m[p][c] == 0) ++p;
      if (p == d) throw ConsistencyError("singular multiplication matrix for nonzero " + to_string());
      std::swap(m[p], m[c]);
      Rational inv_p = Rational(1) / m[c][c];
      for (int j = c; j <= d; ++j) m[c][j] *= inv_p;
      for (int i = 0; i < d; ++i) {
        if (i == c || m[i][c] == 0) continue;
        Rational f = m[i][c];
        for (int j = c; j <= d; ++j) {
          if (m[c][j] != 0) m[i][j] -= f * m[c][j];
        }
      }
    }
    std::vector<Rational> out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) out[i] = m[i][d];
    return from_canonical_field(conductor_, std::move(out));
  }

  /// Applies the automorphism zeta_N -> zeta_N^k, N the conductor.
  CyclotomicNumber conjugate(long k) const {
    const long n = conductor_;
    long kk = ((k % n) + n) % n;
    if (std::gcd(kk, n) != 1 && n != 1) {
      throw DomainError("exponent " + std::to_string(k) + " is not coprime to conductor " + std::to_string(n));
    }
    if (is_rational()) return *this;
    std::vector<Rational> exps(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < coeffs_.size(); ++j) exps[(kk * static_cast<long>(j)) % n] += coeffs_[j];
    return from_exponents(static_cast<int>(n), exps);
  }

  CyclotomicNumber pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    CyclotomicNumber result(1);
    CyclotomicNumber base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e > 0) base *= base;
    }
    return result;
  }

  /// Renders e.g. "1/2 + 3*z5^2"; z<N> denotes exp(2*pi*i/N).
  std::string to_string() const {
    if (is_rational()) return stackyrr::to_string(coeffs_[0]);
    std::ostringstream out;
    bool first = true;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      const Rational& c = coeffs_[j];
      if (c == 0) continue;
      Rational mag = abs(c);
      if (!first) out << (c < 0 ? " - " : " + ");
      else if (c < 0) out << "-";
      first = false;
      if (j == 0) {
        out << stackyrr::to_string(mag);
        continue;
      }
      if (mag != 1) out << stackyrr::to_string(mag) << "*";
      out << "z" << conductor_;
      if (j > 1) out << "^" << j;
    }
    return out.str();
  }

 private:
  CyclotomicNumber(int conductor, std::vector<Rational> coeffs) : conductor_(conductor), coeffs_(std::move(coeffs)) {}

  CyclotomicNumber scaled(const Rational& q) const {
    if (q == 0) return CyclotomicNumber();
    CyclotomicNumber out = *this;
    for (auto& c : out.coeffs_) c *= q;
    return out;
  }

  /// Coordinates of *this in the power basis of Q(zeta_n); n is a canonical
  /// multiple of the conductor.
  std::vector<Rational> lifted(int n) const {
    cyclo_detail::check_conductor(n);
    if (n == conductor_) return coeffs_;
    const auto& t = cyclo_detail::Cache::instance().table(n);
    const int step = n / conductor_;
    std::vector<Rational> out(static_cast<std::size_t>(t.dim));
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      if (coeffs_[j] == 0) continue;
      const auto& v = t.power[step * j];
      for (int i = 0; i < t.dim; ++i) {
        if (v[i] != 0) out[i] += coeffs_[j] * v[i];
      }
    }
    return out;
  }

  /// sum_e exps[e] * zeta_n^e, canonicalized.
  static CyclotomicNumber from_exponents(int n, const std::vector<Rational>& exps) {
    const auto& t = cyclo_detail::Cache::instance().table(n);
    std::vector<Rational> out(static_cast<std::size_t>(t.dim));
    for (int e = 0; e < n; ++e) {
      if (exps[e] == 0) continue;
      const auto& v = t.power[e];
      for (int i = 0; i < t.dim; ++i) {
        if (v[i] != 0) out[i] += exps[e] * v[i];
      }
    }
    return from_canonical_field(t.conductor, std::move(out));
  }

  /// Takes coordinates in Q(zeta_n), n canonical, and descends to the minimal
  /// conductor one prime at a time.
  static CyclotomicNumber from_canonical_field(int n, std::vector<Rational> coeffs) {
    for (;;) {
      if (n == 1) return CyclotomicNumber(1, std::move(coeffs));
      if (std::all_of(coeffs.begin() + 1, coeffs.end(), [](const Rational& q) { return q == 0; })) {
        return CyclotomicNumber(1, {coeffs[0]});
      }
      bool descended = false;
      for (int p : cyclo_detail::prime_factors(n)) {
        int m = cyclo_detail::canonical_conductor(n / p);
        auto down = try_descend(n, m, coeffs);
        if (!down) continue;
        n = m;
        coeffs = std::move(*down);
        descended = true;
        break;
      }
      if (!descended) return CyclotomicNumber(n, std::move(coeffs));
    }
  }

  static std::unique_ptr<std::vector<Rational>> try_descend(int n, int m, const std::vector<Rational>& coeffs) {
    auto& cache = cyclo_detail::Cache::instance();
    const auto& proj = cache.projection(n, m);
    const auto& big = cache.table(n);
    const int dim = static_cast<int>(proj.rows.size());
    auto down = std::make_unique<std::vector<Rational>>(dim);
    for (int i = 0; i < dim; ++i) {
      Rational s;
      for (int j = 0; j < dim; ++j) {
        const Rational& y = coeffs[proj.rows[j]];
        if (y != 0) s += proj.inv[i][j] * y;
      }
      (*down)[i] = std::move(s);
    }
    // membership check: the candidate must lift back exactly
    const int step = n / m;
    std::vector<Rational> back(coeffs.size());
    for (int j = 0; j < dim; ++j) {
      if ((*down)[j] == 0) continue;
      const auto& v = big.power[step * j];
      for (std::size_t i = 0; i < back.size(); ++i) {
        if (v[i] != 0) back[i] += (*down)[j] * v[i];
      }
    }
    if (back != coeffs) return nullptr;
    return down;
  }

  int conductor_ = 1;
  std::vector<Rational> coeffs_;
};

using Cyclo = CyclotomicNumber;

inline std::ostream& operator<<(std::ostream& os, const CyclotomicNumber& z) { return os << z.to_string(); }

/// zeta_n^k in canonical form.
inline CyclotomicNumber root_of_unity(long n, long k) {
  if (n < 1) throw DomainError("invalid conductor " + std::to_string(n));
  long kk = ((k % n) + n) % n;
  long g = std::gcd(kk, n);  // gcd(0, n) = n
  long order = n / g;
  cyclo_detail::check_conductor(order);
  std::vector<Rational> coeffs(static_cast<std::size_t>(kk / g + 1));
  coeffs.back() = 1;
  return CyclotomicNumber::from_power_basis(static_cast<int>(order), coeffs);
}

enum class ArithOp { add, sub, mul, div };

inline CyclotomicNumber arith(const CyclotomicNumber& a, const CyclotomicNumber& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  throw DomainError("unknown arithmetic operation");
}

/// Values are always stored canonically; this re-derives the canonical form
/// from an arbitrary power-basis presentation.
inline CyclotomicNumber canonicalize(const CyclotomicNumber& a) {
  return CyclotomicNumber::from_power_basis(a.conductor(), a.coeffs());
}

inline CyclotomicNumber galois_conjugate(const CyclotomicNumber& a, long k) { return a.conjugate(k); }

/// Sum of the conjugates over (Z/N)^*, divided by phi(N). Always rational.
inline Rational galois_average(const CyclotomicNumber& a) {
  const int n = a.conductor();
  CyclotomicNumber sum;
  int count = 0;
  for (int k = 1; k <= n; ++k) {
    if (std::gcd(k, n) == 1) {
      sum += a.conjugate(k);
      ++count;
    }
  }
  return sum.rational_value() / count;
}

namespace cyclo_detail {

/// 1 / (1 - zeta_r^a) for a = 0..r-1 (entry 0 unused), cached per r.
inline const std::vector<CyclotomicNumber>& todd_terms(long r) {
  static std::mutex mu;
  static std::map<long, std::vector<CyclotomicNumber>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(r); it != cache.end()) return it->second;
  }
  std::vector<CyclotomicNumber> terms(static_cast<std::size_t>(r));
  for (long a = 1; a < r; ++a) terms[a] = (CyclotomicNumber(1) - root_of_unity(r, a)).inverse();
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(r, std::move(terms)).first->second;
}

}  // namespace cyclo_detail

/// Stacky Todd contribution at a point of order r whose fibre has
/// multiplicity k:
///
///     sum_{a=1}^{r-1} zeta_r^{-a k} / (1 - zeta_r^a)
///
/// evaluated in Q(zeta_r). The fibre character is paired with the Todd term in
/// the dual orientation; with it the sum equals (r-1)/2 - k on 0 <= k < r.
inline Rational stacky_todd_sum(long r, long k) {
  if (r < 2) throw DomainError("stacky point order must be at least 2, got " + std::to_string(r));
  if (k < 0 || k >= r) {
    throw DomainError("multiplicity " + std::to_string(k) + " outside [0, " + std::to_string(r - 1) + "]");
  }
  const auto& todd = cyclo_detail::todd_terms(r);
  CyclotomicNumber total;
  for (long a = 1; a < r; ++a) total += root_of_unity(r, -a * k) * todd[static_cast<std::size_t>(a)];
  if (!total.is_rational()) throw ConsistencyError("Todd sum is not rational: " + total.to_string());
  return total.rational_value();
}

/// Closed form of stacky_todd_sum.
inline Rational stacky_todd_closed_form(long r, long k) {
  if (r < 2 || k < 0 || k >= r) throw DomainError("stacky Todd closed form outside its range");
  return make_rational(r - 1, 2) - k;
}

}  // namespace stackyrr
