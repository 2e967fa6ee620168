#include "helab/pointwise_lemmas.hpp"

#include <cmath>
#include <random>
#include <string>

#include "helab/errors.hpp"

namespace helab {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void require_one_form(const PQForm& f) {
  if (f.p() != 1 || f.q() != 0)
    throw Error(ErrorKind::BidegreeMismatch, "expected a (1,0)-form");
}

void require_transverse(const PQForm& omega, const PQForm& big_omega, int m) {
  const int n = omega.n();
  if (omega.p() != 1 || omega.q() != 1)
    throw Error(ErrorKind::BidegreeMismatch, "omega must be a (1,1)-form");
  if (m < 1 || m > n || big_omega.n() != n || big_omega.p() != n - m || big_omega.q() != n - m)
    throw Error(ErrorKind::BidegreeMismatch,
                "test form must have bidegree (n-m, n-m) = (" + std::to_string(n - m) + "," +
                    std::to_string(n - m) + ")");
}

double simple_pairing(const PQForm& big_omega, const std::vector<PQForm>& alphas) {
  PQForm t = big_omega;
  for (const auto& a : alphas) t = wedge(t, kI * wedge(a, conjugate(a)));
  return top_ratio(t, euclidean_volume(big_omega.n())).real();
}

}  // namespace

PQForm kahler_volume(const PQForm& omega) {
  return power(omega, omega.n()) * cplx(1.0 / factorial(omega.n()));
}

PQForm sesquilinear_bracket(const VectorOneForm& eta, const VectorOneForm& xi,
                            const FibreMetric& h) {
  const int r = h.rank();
  if (static_cast<int>(eta.size()) != r || static_cast<int>(xi.size()) != r)
    throw Error(ErrorKind::RankMismatch, "bracket operands must have one entry per frame vector");
  const int n = eta.front().n();
  PQForm out(n, 1, 1);
  for (int a = 0; a < r; ++a) {
    require_one_form(eta[a]);
    for (int b = 0; b < r; ++b) {
      require_one_form(xi[b]);
      // <e_a, e_b>_h = H(b, a)
      out += h.matrix()(b, a) * wedge(eta[a], conjugate(xi[b]));
    }
  }
  return out;
}

PositivityVerdict weak_positivity_sample(const PQForm& big_omega, int trials, double delta,
                                         std::uint64_t seed) {
  if (big_omega.p() != big_omega.q())
    throw Error(ErrorKind::BidegreeMismatch, "weak positivity is defined for (p,p)-forms only");
  const int n = big_omega.n();
  const int m = n - big_omega.p();

  PositivityVerdict verdict{true, std::nullopt, INFINITY};
  auto consider = [&](std::vector<PQForm> alphas) {
    const double d = simple_pairing(big_omega, alphas);
    if (d < verdict.min_density) {
      verdict.min_density = d;
      if (d < delta) {
        verdict.plausibly_positive = false;
        verdict.witness = PositivityWitness{std::move(alphas), d};
      }
    }
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < trials && verdict.plausibly_positive; ++t) {
    std::vector<PQForm> alphas;
    for (int k = 0; k < m; ++k) {
      PQForm a(n, 1, 0);
      double norm2 = 0.0;
      for (int j = 0; j < n; ++j) {
        a[j] = {gauss(rng), gauss(rng)};
        norm2 += std::norm(a[j]);
      }
      a *= 1.0 / std::sqrt(norm2);
      alphas.push_back(std::move(a));
    }
    consider(std::move(alphas));
  }
  return verdict;
}

double positivity_density(const VectorOneForm& eta, const FibreMetric& h, const PQForm& omega,
                          const PQForm& big_omega, int m) {
  require_transverse(omega, big_omega, m);
  const PQForm form =
      wedge(wedge(kI * sesquilinear_bracket(eta, eta, h), power(omega, m - 1)), big_omega);
  return top_ratio(form, euclidean_volume(omega.n())).real();
}

BetaTraces beta_trace_densities(const MatrixPQForm& beta, const PQForm& omega,
                                const PQForm& big_omega, int m) {
  require_transverse(omega, big_omega, m);
  if (beta.p() != 1 || beta.q() != 0)
    throw Error(ErrorKind::BidegreeMismatch, "second fundamental form must be of type (1,0)");
  const MatrixPQForm beta_star = conjugate_transpose(beta);
  const PQForm transverse = wedge(power(omega, m - 1), big_omega);
  const PQForm dV = kahler_volume(omega);
  const PQForm q_form = kI * trace(wedge(beta, beta_star));
  const PQForm s_form = kI * trace(wedge(beta_star, beta));
  return {top_ratio(wedge(q_form, transverse), dV).real(),
          top_ratio(wedge(s_form, transverse), dV).real()};
}

}  // namespace helab
