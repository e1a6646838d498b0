#include "psido/symbol_class.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "psido/parallel.hpp"

namespace psido {

std::vector<double> halton_point(std::uint64_t index, int dims) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (dims > 8) throw std::invalid_argument("halton_point supports at most 8 dimensions");
  std::vector<double> out(dims);
  for (int d = 0; d < dims; ++d) {
    const int base = kPrimes[d];
    double f = 1.0, r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    out[d] = r;
  }
  return out;
}

ClassEstimate class_shell_estimate(const Symbol& sym, const MultiIndex& alpha, const MultiIndex& beta, double s,
                                   const std::vector<double>& shells, int samples_per_shell, std::uint64_t seed) {
  if (samples_per_shell < 16) throw std::invalid_argument("class_shell_estimate needs at least 16 samples per shell");
  if (shells.size() < 2) throw std::invalid_argument("class_shell_estimate needs at least two shell radii");
  for (std::size_t i = 0; i + 1 < shells.size(); ++i)
    if (!(shells[i] >= 0.0 && shells[i + 1] > shells[i]))
      throw std::invalid_argument("shell radii must be non-negative and strictly increasing");

  const int d = sym.dimension();
  const std::size_t n_shells = shells.size() - 1;
  ClassEstimate est;
  est.alpha = alpha;
  est.beta = beta;
  est.order = s;
  est.seed = seed;
  est.shell_radii.assign(shells.begin(), shells.end() - 1);
  est.shell_sups.assign(n_shells, 0.0);
  est.sample_counts.assign(n_shells, samples_per_shell);

  const double weight_exp = beta.order() - s;
  parallel_for(n_shells, [&](std::size_t i) {
    const double lo = shells[i];
    const double hi = shells[i + 1];
    double sup = 0.0;
    for (int k = 0; k < samples_per_shell; ++k) {
      const auto u = halton_point(seed + 1 + static_cast<std::uint64_t>(k), 4);
      const double r = lo + u[0] * (hi - lo);
      const double rx = u[1] * r;
      const double rxi = r - rx;
      Point x{}, xi{};
      if (d == 1) {
        x[0] = u[2] < 0.5 ? -rx : rx;
        xi[0] = u[3] < 0.5 ? -rxi : rxi;
      } else {
        const double tx = 2.0 * std::numbers::pi * u[2];
        const double tk = 2.0 * std::numbers::pi * u[3];
        x = {rx * std::cos(tx), rx * std::sin(tx)};
        xi = {rxi * std::cos(tk), rxi * std::sin(tk)};
      }
      const double v = std::abs(sym.eval(x, xi, alpha, beta)) * std::pow(1.0 + norm(xi), weight_exp);
      sup = std::max(sup, v);
    }
    est.shell_sups[i] = sup;
  });
  return est;
}

Complex cordes_stat(const Symbol& sym, int N, const Point& x, const Point& xi) {
  if (N < 0) throw std::invalid_argument("cordes_stat needs N >= 0");
  const int d = sym.dimension();
  // (Id - Δ)^N = Σ_k C(N,k) (-1)^k Δ^k,  Δ^k = Σ_{|γ|=k} k!/γ! ∂^{2γ}
  struct Term {
    MultiIndex index;
    double coeff;
  };
  std::vector<Term> terms;
  for (int k = 0; k <= N; ++k) {
    const double outer = binomial(N, k) * ((k % 2) ? -1.0 : 1.0);
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    for (const MultiIndex& g : multi_indices_of_order(d, k))
      terms.push_back({g + g, outer * kfact / g.factorial()});
  }
  Complex total = 0.0;
  for (const Term& tx : terms)
    for (const Term& tk : terms) total += tx.coeff * tk.coeff * sym.eval(x, xi, tx.index, tk.index);
  return total;
}

namespace {

// Nested central differences; each level peels one derivative.
Complex nested_difference(const Symbol& sym, const Point& x, const Point& xi, MultiIndex alpha, MultiIndex beta,
                          double hx, double hxi) {
  const int d = sym.dimension();
  for (int i = 0; i < d; ++i) {
    if (alpha[i] > 0) {
      alpha[i] -= 1;
      Point xp = x, xm = x;
      xp[i] += hx;
      xm[i] -= hx;
      return (nested_difference(sym, xp, xi, alpha, beta, hx, hxi) -
              nested_difference(sym, xm, xi, alpha, beta, hx, hxi)) /
             (2.0 * hx);
    }
  }
  for (int i = 0; i < d; ++i) {
    if (beta[i] > 0) {
      beta[i] -= 1;
      Point kp = xi, km = xi;
      kp[i] += hxi;
      km[i] -= hxi;
      return (nested_difference(sym, x, kp, alpha, beta, hx, hxi) -
              nested_difference(sym, x, km, alpha, beta, hx, hxi)) /
             (2.0 * hxi);
    }
  }
  return sym.eval(x, xi);
}

}  // namespace

double fd_check(const Symbol& sym, const Point& x, const Point& xi, const MultiIndex& alpha, const MultiIndex& beta,
                double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_check step must be positive");
  const Complex analytic = sym.eval(x, xi, alpha, beta);
  const Complex numeric = nested_difference(sym, x, xi, alpha, beta, h, h * (1.0 + norm(xi)));
  return std::abs(analytic - numeric);
}

double peetre_margin(const Point& z, const Point& xi, double s, double k) {
  if (k < 0.0) throw std::invalid_argument("peetre_margin requires k >= 0");
  const double lhs = std::pow(1.0 + norm(z), s - k);
  const double rhs = std::pow(1.0 + norm(xi), s - k) * std::pow(1.0 + norm(z - xi), std::abs(s) + k);
  return rhs - lhs;
}

}  // namespace psido
