#include "helab/he_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "helab/errors.hpp"
#include "helab/pointwise_lemmas.hpp"
#include "helab/spectral.hpp"
#include "helab/stability.hpp"

namespace helab {

namespace {

double omega_mean(const GeometryContext& geo, const ScalarField& f) {
  return (integrate_top(f * geo.dV) / geo.vol).real();
}

// L^H M L^{-H} with H = L L^H: the matrix of M in an h-orthonormal frame.
Eigen::MatrixXcd unitary_frame(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& H) {
  if (H.isIdentity(0.0)) return M;
  const Eigen::LLT<Eigen::MatrixXcd> llt(H);
  const Eigen::MatrixXcd L = llt.matrixL();
  const Eigen::MatrixXcd LH = L.adjoint();
  return LH * M * LH.inverse();
}

double spectral_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 1) return std::abs(A(0, 0));
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
}

}  // namespace

Eigen::MatrixXcd EinsteinAnalysis::matrix_at(std::size_t point) const {
  Eigen::MatrixXcd m(rank, rank);
  for (int a = 0; a < rank; ++a)
    for (int b = 0; b < rank; ++b) m(a, b) = matrix_field[a * rank + b][point];
  return m;
}

EinsteinAnalysis einstein_analysis(const CurvatureField& curv, const GeometryContext& geo,
                                   double rel_tol) {
  require_same_grid(curv.theta.grid(), geo.grid);
  EinsteinAnalysis out;
  const int r = curv.rank();
  out.rank = r;
  const MatrixFormField itheta = curv.i_theta();
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) out.matrix_field.push_back(geo.transverse_density(itheta(a, b)));

  out.lambda_field = ScalarField(geo.grid);
  for (std::size_t i = 0; i < geo.grid.size(); ++i) {
    const Eigen::MatrixXcd M = unitary_frame(out.matrix_at(i), scalar_matrix_at(curv.metric, i));
    const cplx lambda = M.trace() / static_cast<double>(r);
    out.lambda_field[i] = lambda;
    out.scale = std::max(out.scale, spectral_norm(M));
    if (r > 1) {
      const Eigen::MatrixXcd dev = M - lambda * Eigen::MatrixXcd::Identity(r, r);
      out.deviation = std::max(out.deviation, spectral_norm(dev));
    }
  }
  out.tolerance = rel_tol * std::max(1.0, out.scale);
  out.weakly_he = out.deviation <= out.tolerance;
  if (out.weakly_he) {
    const double mean = omega_mean(geo, out.lambda_field);
    ScalarField spread = out.lambda_field;
    spread += cplx(-mean);
    if (spread.sup_norm() <= out.tolerance) out.einstein_factor = mean;
  }
  return out;
}

EinsteinAnalysis einstein_matrix(const BundleSpec& spec, const GeometryContext& geo, double rel_tol) {
  return einstein_analysis(chern_curvature(spec, geo.grid), geo, rel_tol);
}

RescaleResult he_rescale(const BundleSpec& spec, const POperatorContext& ctx, double rel_tol) {
  const auto& geo = ctx.geometry;
  const EinsteinAnalysis before = einstein_matrix(spec, geo, rel_tol);
  if (before.rank > 1 && !before.weakly_he)
    throw Error(ErrorKind::NotWeaklyHE, "deviation " + sci(before.deviation) + " exceeds " +
                                            sci(before.tolerance));
  const Decomposition dec = decompose(ctx, real_part(before.lambda_field));
  RescaleResult out;
  out.c = dec.c;
  out.f = real_part(dec.f);
  out.rescaled = spec;
  out.rescaled.conformal_weight = spec.conformal_weight ? *spec.conformal_weight + out.f : out.f;
  const EinsteinAnalysis after = einstein_matrix(out.rescaled, geo, rel_tol);
  ScalarField diff = after.lambda_field;
  diff += cplx(-out.c);
  out.post_residual = diff.sup_norm();
  return out;
}

SlopeLink slope_link_check(const BundleSpec& spec, const GeometryContext& geo, double rel_tol) {
  const CurvatureField curv = chern_curvature(spec, geo.grid);
  const EinsteinAnalysis ea = einstein_analysis(curv, geo, rel_tol);
  if (!ea.einstein_factor)
    throw Error(ErrorKind::NotHermiteEinstein, "Einstein function is not constant (deviation " +
                                                   sci(ea.deviation) + ")");
  const double mu = degree(curv, geo).degree / curv.rank();
  SlopeLink out;
  out.lambda = *ea.einstein_factor;
  out.slope_over_vol = mu / geo.vol;
  out.residual = std::abs(out.lambda * geo.vol - mu);
  out.scale = std::max(1.0, std::abs(mu));
  return out;
}

VanishingIdentity vanishing_identity_check(const BundleSpec& spec,
                                           const std::vector<ScalarField>& section,
                                           const POperatorContext& ctx, double tol) {
  const auto& geo = ctx.geometry;
  const TorusGrid& grid = geo.grid;
  const int r = spec.rank();
  if (!trivial_structure(spec))
    throw Error(ErrorKind::InvalidSpec, "vanishing identity needs a trivial holomorphic structure");
  if (static_cast<int>(section.size()) != r)
    throw Error(ErrorKind::RankMismatch, "section needs one component per frame vector");

  Eigen::VectorXcd s(r);
  for (int a = 0; a < r; ++a) {
    require_same_grid(grid, section[a].grid());
    s[a] = section[a][0];
    ScalarField diff = section[a];
    diff += -s[a];
    if (diff.sup_norm() > tol * std::max(1.0, std::abs(s[a])))
      throw Error(ErrorKind::NonHolomorphicSection,
                  "only constant sections are holomorphic on a trivial structure");
  }

  const MatrixFormField H = holomorphic_frame_metric(spec, grid);
  const CurvatureField curv = chern_curvature(spec, grid);
  const EinsteinAnalysis ea = einstein_analysis(curv, geo);

  // D's = H^{-1} ∂H s
  const MatrixFormField H_inv = matrix_field(grid, r, r, [&](std::size_t i) {
    return Eigen::MatrixXcd(scalar_matrix_at(H, i).inverse());
  });
  MatrixFormField dH(grid, r, r, 1, 0);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) dH(a, b) = spectral_derivative(H(a, b), Derivative::d);
  const MatrixFormField A = wedge(H_inv, dH);
  std::vector<FormField> eta(r, FormField(grid, 1, 0));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) eta[a] += s[b] * A(a, b);

  FormField bracket(grid, 1, 1);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      // <e_a, e_b>_h = H(b, a)
      FormField term = wedge(eta[a], conjugate(eta[b]));
      term *= H(b, a).scalar();
      bracket += term;
    }

  ScalarField norm2(grid), m_term(grid);
  VanishingIdentity out;
  out.lambda_max = -INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::MatrixXcd Hi = scalar_matrix_at(H, i);
    const Eigen::MatrixXcd Mi = ea.matrix_at(i);
    norm2[i] = s.dot(Hi * s);
    m_term[i] = s.dot(Hi * Mi * s);
    const Eigen::MatrixXcd Mu = unitary_frame(Mi, Hi);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (Mu + Mu.adjoint()),
                                                              Eigen::EigenvaluesOnly);
    out.lambda_max = std::max(out.lambda_max, eig.eigenvalues().maxCoeff());
  }
  out.lhs = apply_P(ctx, norm2);
  out.rhs = m_term - geo.transverse_density(kI * bracket);
  out.residual = (out.lhs - out.rhs).sup_norm();
  out.inequality_slack = INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.inequality_slack =
        std::min(out.inequality_slack, out.lambda_max * norm2[i].real() - out.lhs[i].real());
  out.inequality_holds = out.inequality_slack >= -1e-8 * std::max(1.0, out.lhs.sup_norm());
  for (const auto& e : eta) out.parallel_defect = std::max(out.parallel_defect, e.sup_norm());
  return out;
}

std::vector<FactorCheck> bundle_factor_check(const BundleSpec& e, const BundleSpec* f,
                                             const GeometryContext& geo, double tol) {
  const CurvatureField ce = chern_curvature(e, geo.grid);
  const CurvatureField cf = f ? chern_curvature(*f, geo.grid) : ce;
  const auto le = einstein_analysis(ce, geo).einstein_factor;
  const auto lf = einstein_analysis(cf, geo).einstein_factor;
  if (!le || !lf) throw Error(ErrorKind::NotHermiteEinstein, "bundle operations need HE inputs");
  const int r = ce.rank();

  std::vector<std::pair<std::string, std::pair<Transform, double>>> ops = {
      {"dual", {{Transform::Kind::Dual, 1, nullptr}, -*le}},
      {"tensor", {{Transform::Kind::Tensor, 1, &cf}, *le + *lf}},
      {"end", {{Transform::Kind::End, 1, nullptr}, 0.0}},
      {"det", {{Transform::Kind::Det, 1, nullptr}, r * *le}},
  };
  for (int p = 1; p <= r; ++p)
    ops.push_back({"wedge_power_" + std::to_string(p), {{Transform::Kind::WedgePower, p, nullptr}, p * *le}});

  std::vector<FactorCheck> out;
  for (const auto& [name, op] : ops) {
    FactorCheck check;
    check.operation = name;
    check.predicted = op.second;
    check.measured = einstein_analysis(transform_curvature(ce, op.first), geo).einstein_factor;
    check.residual = check.measured ? std::abs(*check.measured - check.predicted) : INFINITY;
    check.passed = check.residual <= tol * std::max(1.0, std::abs(check.predicted));
    out.push_back(std::move(check));
  }
  return out;
}

}  // namespace helab
