#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "helab/pq_form.hpp"

namespace helab {

/// An E-valued (1,0)-covector: one C-valued (1,0)-form per frame vector.
using VectorOneForm = std::vector<PQForm>;

/// {η, ξ}_h = Σ_{a,b} η_a ^ conj(ξ_b) <e_a, e_b>_h. Throws RankMismatch.
PQForm sesquilinear_bracket(const VectorOneForm& eta, const VectorOneForm& xi,
                            const FibreMetric& h);

struct PositivityWitness {
  std::vector<PQForm> directions;  // unit (1,0)-forms α_1..α_m
  double density;
};

struct PositivityVerdict {
  bool plausibly_positive;
  std::optional<PositivityWitness> witness;  // set iff !plausibly_positive
  double min_density;
};

/// Samples the pairing of a real (n-m, n-m)-form with simple strongly
/// positive (m,m)-forms iα_1^ᾱ_1 ^ ... ^ iα_m^ᾱ_m along `trials` seeded
/// Gaussian unit directions. A density below `delta` certifies failure.
/// Throws BidegreeMismatch unless p == q.
PositivityVerdict weak_positivity_sample(const PQForm& big_omega, int trials, double delta,
                                         std::uint64_t seed);

/// Density of i{η,η}_h ^ ω^{m-1} ^ Ω against dV_n (bare power of ω, no
/// 1/(m-1)! factor).
double positivity_density(const VectorOneForm& eta, const FibreMetric& h, const PQForm& omega,
                          const PQForm& big_omega, int m);

struct BetaTraces {
  double trace_q;  // Trace_Q(iβ^β* ^ ω^{m-1} ^ Ω) / dV_ω, >= 0
  double trace_s;  // Trace_S(iβ*^β ^ ω^{m-1} ^ Ω) / dV_ω, <= 0
};

/// β is a q x s matrix of (1,0)-forms (a Hom(S, Q)-valued form in
/// orthonormal frames).
BetaTraces beta_trace_densities(const MatrixPQForm& beta, const PQForm& omega,
                                const PQForm& big_omega, int m);

/// ω^n / n!
PQForm kahler_volume(const PQForm& omega);

}  // namespace helab
