#pragma once

#include <vector>

#include "helab/geometry.hpp"

namespace helab {

struct SolverSettings {
  int max_iterations = 600;
  int restart = 40;
  /// Target for sup|P f - g|.
  double residual_target = 1e-9;
  /// |∫ g dV_ω| must not exceed compat_tol * ||g|| * sqrt(Vol_ω).
  double compat_tol = 1e-9;
};

/// P φ = -(i∂∂̄φ ^ ω^{m-1} ^ Ω) / dV_ω written as
/// P φ = -i Σ_{j,k} ∂_j∂̄_k φ · K^{jk} with K the transverse kernel.
struct POperatorContext {
  GeometryContext geometry;
  std::vector<ScalarField> kernel;  // K^{jk} at index j * n + k
  std::vector<cplx> mean_kernel;
  bool constant_coefficients = false;
  FormField omega_power;  // ω^{m-1}
  FormField d_test;       // ∂Ω
  FormField dbar_test;    // ∂̄Ω
  std::vector<std::vector<cplx>> symbol_d, symbol_dbar;  // ∂_j and ∂̄_j symbols
  SolverSettings settings;

  /// Throws InvalidSpec for a non-positive residual target.
  static POperatorContext make(GeometryContext geometry, SolverSettings settings = {});
  int n() const { return geometry.n(); }
  const TorusGrid& grid() const { return geometry.grid; }
};

/// Throws GridMismatch.
ScalarField apply_P(const POperatorContext& ctx, const ScalarField& phi);

/// Fourier symbol of the constant-coefficient operator built from the mean
/// kernel, in FFT order.
std::vector<cplx> mean_symbol(const POperatorContext& ctx);

struct AdjointDefect {
  cplx defect;     // <<φ, Pψ>> - <<Pφ, ψ>>
  cplx predicted;  // ∫ conj(ψ) i(∂̄φ ^ ∂Ω - ∂φ ^ ∂̄Ω) ^ ω^{m-1}
  double residual; // |defect - predicted| / (||φ|| ||ψ||)
};

AdjointDefect adjoint_defect(const POperatorContext& ctx, const ScalarField& phi,
                             const ScalarField& psi);

struct SolveReport {
  ScalarField f;
  double residual = 0.0;  // sup|P f - g|
  int iterations = 0;
};

/// Solves P f = g with f normalised to ∫ f dV_ω = 0.
/// Throws IncompatibleRightHandSide and SolverDiverged.
SolveReport solve_P(const POperatorContext& ctx, const ScalarField& g);

struct Decomposition {
  double c = 0.0;
  ScalarField f;
  double residual = 0.0;  // sup|λ - c - P f|
};

/// λ = c + P f with c the ω-average of λ.
Decomposition decompose(const POperatorContext& ctx, const ScalarField& lambda);

}  // namespace helab
