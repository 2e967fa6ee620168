#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helab/bundles.hpp"
#include "helab/p_operator.hpp"

namespace helab {

struct EinsteinAnalysis {
  int rank = 1;
  std::vector<ScalarField> matrix_field;  // M_{ab} = (iΘ_{ab} ^ ω^{m-1} ^ Ω) / dV_ω, row-major
  ScalarField lambda_field;               // Tr M / r
  double deviation = 0.0;                 // sup ||M - λ Id|| in h-unitary frames
  double scale = 0.0;                     // sup ||M||
  double tolerance = 0.0;                 // tol_we
  bool weakly_he = false;
  std::optional<double> einstein_factor;

  Eigen::MatrixXcd matrix_at(std::size_t point) const;
};

/// tol_we = rel_tol * max(1, sup||M||).
EinsteinAnalysis einstein_analysis(const CurvatureField& curv, const GeometryContext& geo,
                                   double rel_tol = 1e-9);
EinsteinAnalysis einstein_matrix(const BundleSpec& spec, const GeometryContext& geo,
                                 double rel_tol = 1e-9);

struct RescaleResult {
  ScalarField f;
  double c = 0.0;
  BundleSpec rescaled;   // conformal weight accumulated
  double post_residual = 0.0;
};

/// Throws NotWeaklyHE for r > 1 with deviation above tolerance.
RescaleResult he_rescale(const BundleSpec& spec, const POperatorContext& ctx, double rel_tol = 1e-9);

struct SlopeLink {
  double lambda = 0.0;
  double slope_over_vol = 0.0;
  double residual = 0.0;  // |λ - μ / Vol|
  double scale = 1.0;
};

/// Throws NotHermiteEinstein.
SlopeLink slope_link_check(const BundleSpec& spec, const GeometryContext& geo, double rel_tol = 1e-9);

struct VanishingIdentity {
  ScalarField lhs;  // P|s|²_h
  ScalarField rhs;  // <M s, s>_h - i{D's, D's}_h ^ ω^{m-1} ^ Ω / dV_ω
  double residual = 0.0;
  double lambda_max = 0.0;   // sup of the largest h-eigenvalue of M
  double inequality_slack = 0.0;  // inf (λ_max |s|² - P|s|²)
  bool inequality_holds = false;
  double parallel_defect = 0.0;   // sup|D's|
};

/// For bundles with trivial ∂̄-structure (all classes zero, no extension).
/// Throws InvalidSpec and NonHolomorphicSection.
VanishingIdentity vanishing_identity_check(const BundleSpec& spec,
                                           const std::vector<ScalarField>& section,
                                           const POperatorContext& ctx, double tol = 1e-10);

struct FactorCheck {
  std::string operation;
  double predicted = 0.0;
  std::optional<double> measured;
  double residual = 0.0;
  bool passed = false;
};

/// Einstein factors of dual, tensor, End, Λ^p (1 <= p <= r) and det. The
/// tensor partner defaults to E itself. Throws NotHermiteEinstein.
std::vector<FactorCheck> bundle_factor_check(const BundleSpec& e, const BundleSpec* f,
                                             const GeometryContext& geo, double tol = 1e-9);

}  // namespace helab
