#pragma once

// Complex log-gamma via the Stirling asymptotic series after an argument
// shift into the region where the series converges to working precision,
// with reflection for Re z < 1/2. Bernoulli coefficients are stored as exact
// fractions so the same code path serves binary64 and the extended mode.

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "irrper/scalar.hpp"

namespace irrper {

namespace detail {

template <class R>
R parse_rational(const char* num, const char* den) {
  if constexpr (std::numeric_limits<R>::digits10 > 20) {
    return R(num) / R(den);
  } else {
    return static_cast<R>(std::strtold(num, nullptr) / std::strtold(den, nullptr));
  }
}

// B_{2j} / (2j (2j-1)) for j = 1..20.
template <class R>
const std::vector<R>& stirling_coefficients() {
  static const std::vector<R> coeffs = [] {
    static constexpr const char* b2j[][2] = {
        {"1", "6"},
        {"-1", "30"},
        {"1", "42"},
        {"-1", "30"},
        {"5", "66"},
        {"-691", "2730"},
        {"7", "6"},
        {"-3617", "510"},
        {"43867", "798"},
        {"-174611", "330"},
        {"854513", "138"},
        {"-236364091", "2730"},
        {"8553103", "6"},
        {"-23749461029", "870"},
        {"8615841276005", "14322"},
        {"-7709321041217", "510"},
        {"2577687858367", "6"},
        {"-26315271553053477373", "1919190"},
        {"2929993913841559", "6"},
        {"-261082718496449122051", "13530"},
    };
    std::vector<R> out;
    for (int j = 1; j <= 20; ++j) {
      const R b = parse_rational<R>(b2j[j - 1][0], b2j[j - 1][1]);
      out.push_back(b / (R(2 * j) * R(2 * j - 1)));
    }
    return out;
  }();
  return coeffs;
}

}  // namespace detail

// Principal log-gamma up to multiples of 2*pi*i (the imaginary part is not
// the continuous lgamma branch; every consumer here exponentiates or works
// with real arguments).
template <class C>
C log_gamma(const C& z) {
  using R = real_t<C>;
  using std::log;
  using std::sin;
  const R pi = scalar_traits<C>::pi();
  if (z.real() < R(1) / 2) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    C s = sin(C(pi) * z);
    if (abs_of(s) == R(0)) throw std::domain_error("log_gamma: pole at non-positive integer");
    return log_of(C(pi)) - log_of(s) - log_gamma(C(1) - z);
  }
  constexpr int digits = std::numeric_limits<R>::digits10;
  const R need = R(digits > 20 ? 54 : 21);

  C shift_log(0);
  C w = z;
  while (w.real() < need) {
    shift_log += log_of(w);
    w += C(1);
  }

  const R eps = scalar_traits<C>::epsilon();
  C res = (w - C(R(1) / 2)) * log_of(w) - w + C(log(2 * pi) / 2);
  const C w2 = w * w;
  C inv = C(1) / w;
  for (const R& coeff : detail::stirling_coefficients<R>()) {
    const C term = C(coeff) * inv;
    res += term;
    if (abs_of(term) < eps * abs_of(res)) break;
    inv /= w2;
  }
  return res - shift_log;
}

template <class C>
C gamma_fn(const C& z) {
  return exp_of(log_gamma(z));
}

}  // namespace irrper
