#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helab/bundles.hpp"
#include "helab/p_operator.hpp"

namespace helab {

struct DegreeReport {
  double degree = 0.0;
  ScalarField density;      // Tr(iΘ) ^ ω^{m-1} ^ Ω / dV_ω
  double quadrature = 0.0;  // ∫ density dV_ω, computed separately
  std::string metric_tag;
};

DegreeReport degree(const CurvatureField& curv, const GeometryContext& geo,
                    std::string metric_tag = "chern");
DegreeReport degree(const BundleSpec& spec, const GeometryContext& geo);

/// Throws ZeroRank.
double slope(const BundleSpec& spec, const GeometryContext& geo);

struct GaugeCheck {
  double degree_h = 0.0;
  double degree_rescaled = 0.0;
  double residual = 0.0;
  double scale = 1.0;
};

/// |deg(h) - deg(h e^{-f})|.
GaugeCheck gauge_invariance_check(const BundleSpec& spec, const ScalarField& f,
                                  const GeometryContext& geo);

enum class EqualityCase { Split, Strict, Mixed };
std::string to_string(EqualityCase c);

struct SlopeComparison {
  double mu_s = 0.0, mu_e = 0.0, mu_q = 0.0;
  ScalarField density_s, density_e, density_q;  // d_S, d_E, d_Q
  double chain_slack = 0.0;  // inf over x of min(d_E/r - d_S/s, d_Q/q - d_E/r)
  bool pointwise_chain_ok = false;
  EqualityCase equality_case = EqualityCase::Split;
  double beta_norm = 0.0;
};

struct ExactSequenceTolerances {
  double slack = 1e-11;
  double beta = 1e-12;
  double strict = 1e-13;
};

/// Synthetic mode: the ambient curvature is λ_E Id (in unitary frames), so
/// d_E = r λ_E and the subquotient densities follow from β alone.
/// Throws ShapeMismatch and NotDbarClosedBetaStar.
SlopeComparison exact_sequence_synthetic(double lambda_e, const MatrixFormField& beta,
                                         const GeometryContext& geo,
                                         const ExactSequenceTolerances& tol = {});

/// Metric mode for an extension spec whose Chern curvature is HE.
/// Throws AmbientNotHE.
SlopeComparison exact_sequence_metric(const BundleSpec& extension, const GeometryContext& geo,
                                      const ExactSequenceTolerances& tol = {});

/// A declared subobject of E.
struct SubobjectSpec {
  enum class Kind { Factors, ExtensionSub, ConstantSubspace };
  Kind kind = Kind::Factors;
  std::vector<int> factors;   // direct-sum line indices
  Eigen::MatrixXcd subspace;  // r x k, columns spanning a constant subspace
  std::string label;
};

struct StabilityVerdict {
  bool destabilized = false;
  int index = -1;
  double mu_sub = 0.0;
  double mu_e = 0.0;
  std::vector<double> member_slopes;

  std::string describe() const;
};

/// Falsifier over the declared family only. Throws NotASubobject.
StabilityVerdict semistability_verdict(const BundleSpec& e, const std::vector<SubobjectSpec>& family,
                                       const GeometryContext& geo, double tol = 1e-9);

struct DemoOutcome {
  std::string name;
  std::string expected;
  std::string observed;
  bool passed = false;
};

/// The three Kobayashi-Lübke style scenarios on the context's geometry
/// (n >= 2 required).
std::vector<DemoOutcome> kl_demo(const POperatorContext& ctx);

}  // namespace helab
