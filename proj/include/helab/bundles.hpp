#pragma once

#include <optional>
#include <vector>

#include "helab/torus.hpp"

namespace helab {

/// A line bundle given by curvature data: iΘ = C + i∂∂̄φ for the metric
/// e^{-φ} relative to the class normalisation.
struct LineBundleData {
  PQForm class_form;                 // constant real (1,1)-form C
  std::optional<ScalarField> weight;  // φ, zero when unset
};

/// Direct sums of lines and two-step extensions 0 -> S -> E -> Q -> 0.
///
/// Extensions carry the C^∞ splitting h = h_S ⊕ h_Q. S and Q must be direct
/// sums of lines sharing one class form and carrying no weights, so that
/// Hom(Q, S) is flat and β = (β*)^† in unitary frames.
///
/// `metric` replaces the line weights by a full fibre metric H (in the
/// holomorphic frame, <u, v> = v^H H u) and needs every class to vanish.
/// `conformal_weight` f rescales the fibre metric to h e^{-f}.
struct BundleSpec {
  enum class Kind { Line, DirectSum, Extension };
  Kind kind = Kind::Line;
  std::vector<LineBundleData> lines;
  std::vector<BundleSpec> parts;           // {S, Q} for an extension
  std::optional<MatrixFormField> beta_star;  // s x q of (0,1)-forms
  std::optional<MatrixFormField> metric;     // r x r of (0,0)-forms
  std::optional<ScalarField> conformal_weight;

  static BundleSpec line(LineBundleData data);
  static BundleSpec direct_sum(std::vector<LineBundleData> lines);
  static BundleSpec extension(BundleSpec sub, BundleSpec quotient, MatrixFormField beta_star);

  int rank() const;
};

/// Θ_h(E) as a matrix of (1,1)-forms, together with the frame Gram matrix H
/// it is written in (identity for unitary frames).
struct CurvatureField {
  MatrixFormField theta;
  MatrixFormField metric;

  int rank() const { return theta.rows(); }
  /// iΘ entry-wise.
  MatrixFormField i_theta() const;
};

/// Identity (0,0)-matrix field.
MatrixFormField identity_matrix_field(const TorusGrid& grid, int rank);
/// Matrix of (0,0)-forms from pointwise values.
MatrixFormField matrix_field(const TorusGrid& grid, int rows, int cols,
                             const std::function<Eigen::MatrixXcd(std::size_t)>& at);
Eigen::MatrixXcd scalar_matrix_at(const MatrixFormField& f, std::size_t point);

/// True for lines and direct sums whose classes all vanish.
bool trivial_structure(const BundleSpec& spec);
/// Fibre metric in the holomorphic frame of a bundle with trivial structure:
/// the metric field, or diag(e^{-φ_a}), times e^{-f}.
MatrixFormField holomorphic_frame_metric(const BundleSpec& spec, const TorusGrid& grid);

/// Throws InvalidSpec, NotPositiveDefinite, NotDbarClosedBetaStar.
CurvatureField chern_curvature(const BundleSpec& spec, const TorusGrid& grid, double tol = 1e-11);

/// β = (β*)^† for an extension spec. Throws InvalidSpec.
MatrixFormField second_fundamental_form(const BundleSpec& spec);

/// sup|∂̄β*|.
double dbar_residual(const MatrixFormField& beta_star);

struct Transform {
  enum class Kind { Dual, Tensor, End, WedgePower, Det };
  Kind kind = Kind::Dual;
  int power = 1;                           // WedgePower
  const CurvatureField* other = nullptr;   // Tensor
};

/// Throws RankMismatch and InvalidPower.
CurvatureField transform_curvature(const CurvatureField& curv, const Transform& op);

struct Subquotients {
  MatrixFormField sub;       // Θ_S
  MatrixFormField quotient;  // Θ_Q
};

/// Θ_S = Θ_E|_S + β* ^ β and Θ_Q = Θ_E|_Q + β ^ β* for β of shape q x s.
/// Throws ShapeMismatch.
Subquotients subquotient_curvatures(const MatrixFormField& theta_e, const MatrixFormField& beta);

/// sup over points of the anti-Hermitian part of i H Θ.
double hermitian_residual(const CurvatureField& curv);

}  // namespace helab
