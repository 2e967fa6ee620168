#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "helab/torus.hpp"

namespace helab {

struct GeometryTolerances {
  /// sup|∂∂̄Ω| must not exceed tol_closed * max(1, sup|Ω|).
  double tol_closed = 1e-10;
  double realness = 1e-13;
  double positivity_delta = 1e-10;
  int positivity_stride = 8;
  int positivity_directions = 32;
  std::uint64_t seed = 0x5eedULL;
};

struct ValidationRecord {
  double omega_min_eigenvalue = 0.0;
  double omega_closedness = 0.0;     // sup|∂ω|
  double omega_realness = 0.0;
  double test_realness = 0.0;
  double test_scale = 0.0;           // sup|Ω|
  double ddbar_residual = 0.0;       // sup|∂∂̄Ω|
  double d_residual = 0.0;           // sup|∂Ω|, zero iff Ω is closed
  double min_positivity_density = 0.0;
  std::size_t positivity_points = 0;
};

/// The validated pair (ω, Ω) on the torus together with the derived data
/// every other module uses: dV_ω = ω^n/n!, Vol_ω, and the transverse form
/// ω^{m-1} ^ Ω of bidegree (n-1, n-1).
struct GeometryContext {
  TorusGrid grid;
  int m = 1;
  FormField omega;
  FormField omega_test;
  FormField dV;
  double vol = 0.0;
  FormField transverse;
  ValidationRecord validation;

  int n() const { return grid.n; }
  /// (γ ^ ω^{m-1} ^ Ω) / dV_ω for a (1,1)-form field γ.
  ScalarField transverse_density(const FormField& gamma) const;
  /// kernel(j, k) = (dz_j ^ dzbar_k ^ ω^{m-1} ^ Ω) / dV_ω, so that the
  /// transverse density of γ is Σ γ_{jk} kernel(j, k).
  std::vector<ScalarField> transverse_kernel() const;
};

/// Throws BidegreeMismatch, NotReal, NotPositiveDefinite, NotDdbarClosed or
/// NotWeaklyPositive.
GeometryContext validate_structures(const FormField& omega, const FormField& omega_test, int m,
                                    const GeometryTolerances& tol = {});

/// Constant flat Kähler form i Σ dz_j ^ dzbar_j.
FormField flat_kahler_form(const TorusGrid& grid);
/// Constant Kähler form i Σ g_{jk} dz_j ^ dzbar_k.
FormField constant_kahler_form(const TorusGrid& grid, const Eigen::MatrixXcd& g);

/// One coefficient of a form field built from a trigonometric profile:
/// profile(x) * dz_I ^ dzbar_J with I, J given as 0-based index lists.
struct FormTerm {
  std::vector<int> holomorphic;
  std::vector<int> antiholomorphic;
  TrigSeries profile;
  cplx scale = 1.0;
};

FormField build_form_field(const TorusGrid& grid, int p, int q, const std::vector<FormTerm>& terms);

struct TestFormSpec {
  enum class Mode { Constant, KahlerPower, DdbarClosedPerturbation };
  Mode mode = Mode::Constant;
  /// Constant and perturbation base form Ω_0; defaults to ω_0^{n-m} (the
  /// scalar 1 when m = n) when unset.
  std::optional<PQForm> base;
  /// KahlerPower: ω' = ω_0 + i∂∂̄ρ, Ω = ω'^{n-m}.
  TrigSeries potential;
  /// Perturbation: Ω = Ω_0 + ε(∂u + ∂̄ū) with u of bidegree (n-m-1, n-m).
  std::vector<FormTerm> perturbation;
  double epsilon = 1.0;
};

/// Builds Ω on the grid of `omega` and checks it with validate_structures.
/// Throws InvalidAuxiliaryPotential when ω' loses positivity and
/// PositivityLostAtEpsilon when the perturbation destroys weak positivity.
FormField generate_test_form(const FormField& omega, int m, const TestFormSpec& spec,
                             const GeometryTolerances& tol = {});

/// generate_test_form followed by validate_structures.
GeometryContext make_geometry(const FormField& omega, int m, const TestFormSpec& spec,
                              const GeometryTolerances& tol = {});

}  // namespace helab
