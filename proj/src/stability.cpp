#include "helab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "helab/errors.hpp"
#include "helab/he_analysis.hpp"
#include "helab/spectral.hpp"

namespace helab {

namespace {

double integrate_density(const ScalarField& density, const GeometryContext& geo) {
  return integrate_top(density * geo.dV).real();
}

PQForm class_form(int n, double a, double b) {
  PQForm c(n, 1, 1);
  c += a * i_dz_dzbar(n, 0, 0);
  c += b * i_dz_dzbar(n, 1, 1);
  return c;
}

SlopeComparison compare(ScalarField d_s, ScalarField d_e, ScalarField d_q, int s, int q,
                        double beta_norm, const GeometryContext& geo,
                        const ExactSequenceTolerances& tol) {
  const int r = s + q;
  SlopeComparison out;
  out.mu_s = integrate_density(d_s, geo) / s;
  out.mu_e = integrate_density(d_e, geo) / r;
  out.mu_q = integrate_density(d_q, geo) / q;
  out.chain_slack = INFINITY;
  double min_gap = INFINITY;
  for (std::size_t i = 0; i < geo.grid.size(); ++i) {
    const double ls = d_s[i].real() / s, le = d_e[i].real() / r, lq = d_q[i].real() / q;
    out.chain_slack = std::min({out.chain_slack, le - ls, lq - le});
    min_gap = std::min(min_gap, std::min(le - ls, lq - le));
  }
  out.pointwise_chain_ok = out.chain_slack >= -tol.slack;
  out.beta_norm = beta_norm;
  if (beta_norm <= tol.beta)
    out.equality_case = EqualityCase::Split;
  else if (min_gap > tol.strict)
    out.equality_case = EqualityCase::Strict;
  else
    out.equality_case = EqualityCase::Mixed;
  out.density_s = std::move(d_s);
  out.density_e = std::move(d_e);
  out.density_q = std::move(d_q);
  return out;
}

}  // namespace

DegreeReport degree(const CurvatureField& curv, const GeometryContext& geo, std::string metric_tag) {
  const MatrixFormField itheta = curv.i_theta();
  const FormField tr = trace(itheta);
  DegreeReport out;
  out.degree = integrate_top(wedge(tr, geo.transverse)).real();
  out.density = geo.transverse_density(tr);
  out.quadrature = integrate_density(out.density, geo);
  out.metric_tag = std::move(metric_tag);
  return out;
}

DegreeReport degree(const BundleSpec& spec, const GeometryContext& geo) {
  if (spec.rank() < 1) throw Error(ErrorKind::ZeroRank, "degree of a rank-zero bundle");
  return degree(chern_curvature(spec, geo.grid), geo,
                spec.conformal_weight ? "chern, conformally rescaled" : "chern");
}

double slope(const BundleSpec& spec, const GeometryContext& geo) {
  if (spec.rank() < 1) throw Error(ErrorKind::ZeroRank, "slope of a rank-zero bundle");
  return degree(spec, geo).degree / spec.rank();
}

GaugeCheck gauge_invariance_check(const BundleSpec& spec, const ScalarField& f,
                                  const GeometryContext& geo) {
  BundleSpec rescaled = spec;
  rescaled.conformal_weight = spec.conformal_weight ? *spec.conformal_weight + f : f;
  GaugeCheck out;
  out.degree_h = degree(spec, geo).degree;
  out.degree_rescaled = degree(rescaled, geo).degree;
  out.residual = std::abs(out.degree_h - out.degree_rescaled);
  out.scale = std::max(1.0, std::abs(out.degree_h));
  return out;
}

std::string to_string(EqualityCase c) {
  switch (c) {
    case EqualityCase::Split: return "Split";
    case EqualityCase::Strict: return "Strict";
    case EqualityCase::Mixed: return "Mixed";
  }
  return "?";
}

SlopeComparison exact_sequence_synthetic(double lambda_e, const MatrixFormField& beta,
                                         const GeometryContext& geo,
                                         const ExactSequenceTolerances& tol) {
  if (beta.p() != 1 || beta.q() != 0)
    throw Error(ErrorKind::ShapeMismatch, "β must be a matrix of (1,0)-forms");
  require_same_grid(beta.grid(), geo.grid);
  const int q = beta.rows(), s = beta.cols();
  const MatrixFormField beta_star = conjugate_transpose(beta);
  const double res = dbar_residual(beta_star);
  if (res > 1e-11 * std::max(1.0, beta.sup_norm()))
    throw Error(ErrorKind::NotDbarClosedBetaStar, "sup|dbar beta_star| = " + sci(res));

  ScalarField d_s = geo.transverse_density(kI * trace(wedge(beta_star, beta)));
  ScalarField d_q = geo.transverse_density(kI * trace(wedge(beta, beta_star)));
  d_s += cplx(s * lambda_e);
  d_q += cplx(q * lambda_e);
  ScalarField d_e(geo.grid, cplx((s + q) * lambda_e));
  return compare(std::move(d_s), std::move(d_e), std::move(d_q), s, q, beta.sup_norm(), geo, tol);
}

SlopeComparison exact_sequence_metric(const BundleSpec& extension, const GeometryContext& geo,
                                      const ExactSequenceTolerances& tol) {
  if (extension.kind != BundleSpec::Kind::Extension)
    throw Error(ErrorKind::InvalidSpec, "metric mode needs an extension spec");
  const CurvatureField curv = chern_curvature(extension, geo.grid);
  const EinsteinAnalysis ea = einstein_analysis(curv, geo);
  if (!ea.einstein_factor)
    throw Error(ErrorKind::AmbientNotHE, "ambient metric is not HE (deviation " + sci(ea.deviation) + ")");
  const MatrixFormField beta = second_fundamental_form(extension);
  const Subquotients sq = subquotient_curvatures(curv.theta, beta);
  MatrixFormField i_s = sq.sub, i_q = sq.quotient;
  i_s *= kI;
  i_q *= kI;
  return compare(geo.transverse_density(trace(i_s)), degree(curv, geo).density,
                 geo.transverse_density(trace(i_q)), beta.cols(), beta.rows(), beta.sup_norm(), geo,
                 tol);
}

std::string StabilityVerdict::describe() const {
  std::ostringstream os;
  if (!destabilized)
    os << "NoDestabilizerFound";
  else
    os << "Destabilizer(" << index << ", " << mu_sub << ", " << mu_e << ")";
  return os.str();
}

StabilityVerdict semistability_verdict(const BundleSpec& e, const std::vector<SubobjectSpec>& family,
                                       const GeometryContext& geo, double tol) {
  const int r = e.rank();
  StabilityVerdict out;
  out.mu_e = slope(e, geo);
  const double threshold = out.mu_e + tol * std::max(1.0, std::abs(out.mu_e));

  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const SubobjectSpec& member = family[idx];
    double mu = 0.0;
    switch (member.kind) {
      case SubobjectSpec::Kind::Factors: {
        if (e.kind == BundleSpec::Kind::Extension || e.metric)
          throw Error(ErrorKind::NotASubobject, "factor subobjects need a direct sum of lines");
        std::vector<int> f = member.factors;
        std::sort(f.begin(), f.end());
        if (f.empty() || static_cast<int>(f.size()) >= r || f.front() < 0 || f.back() >= r ||
            std::adjacent_find(f.begin(), f.end()) != f.end())
          throw Error(ErrorKind::NotASubobject, "factor indices must pick a proper non-empty subset");
        std::vector<LineBundleData> lines;
        for (int i : f) lines.push_back(e.lines[i]);
        BundleSpec sub = BundleSpec::direct_sum(std::move(lines));
        sub.conformal_weight = e.conformal_weight;
        mu = slope(sub, geo);
        break;
      }
      case SubobjectSpec::Kind::ExtensionSub: {
        if (e.kind != BundleSpec::Kind::Extension)
          throw Error(ErrorKind::NotASubobject, "extension sub needs an extension");
        const CurvatureField curv = chern_curvature(e, geo.grid);
        const MatrixFormField beta = second_fundamental_form(e);
        const Subquotients sq = subquotient_curvatures(curv.theta, beta);
        const int s = beta.cols();
        mu = degree(CurvatureField{sq.sub, identity_matrix_field(geo.grid, s)}, geo).degree / s;
        break;
      }
      case SubobjectSpec::Kind::ConstantSubspace: {
        if (!trivial_structure(e))
          throw Error(ErrorKind::NotASubobject, "constant subspaces need a trivial holomorphic structure");
        const Eigen::MatrixXcd& V = member.subspace;
        const int k = static_cast<int>(V.cols());
        if (V.rows() != r || k < 1 || k >= r || Eigen::FullPivLU<Eigen::MatrixXcd>(V).rank() != k)
          throw Error(ErrorKind::NotASubobject, "subspace must have full column rank below the bundle rank");
        const MatrixFormField H = holomorphic_frame_metric(e, geo.grid);
        BundleSpec sub;
        sub.kind = k == 1 ? BundleSpec::Kind::Line : BundleSpec::Kind::DirectSum;
        sub.lines.assign(k, LineBundleData{PQForm(geo.n(), 1, 1), std::nullopt});
        sub.metric = matrix_field(geo.grid, k, k, [&](std::size_t i) {
          return Eigen::MatrixXcd(V.adjoint() * scalar_matrix_at(H, i) * V);
        });
        mu = slope(sub, geo);
        break;
      }
    }
    out.member_slopes.push_back(mu);
    if (!out.destabilized && mu > threshold) {
      out.destabilized = true;
      out.index = static_cast<int>(idx);
      out.mu_sub = mu;
    }
  }
  return out;
}

std::vector<DemoOutcome> kl_demo(const POperatorContext& ctx) {
  const auto& geo = ctx.geometry;
  const int n = geo.n();
  if (n < 2) throw Error(ErrorKind::InvalidSpec, "the demonstration needs n >= 2");
  const TorusGrid& grid = geo.grid;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<DemoOutcome> out;

  {
    // (a) two lines rescaled to HE with equal Einstein factors
    const ScalarField w1 = ScalarField::sample(grid, [&](std::span<const double> x) {
      return cplx(0.3 * std::cos(two_pi * x[0]));
    });
    const ScalarField w2 = ScalarField::sample(grid, [&](std::span<const double> x) {
      return cplx(0.2 * std::sin(two_pi * x[3]));
    });
    std::vector<LineBundleData> lines;
    std::vector<double> factors;
    for (const auto& [a, b, w] : {std::tuple{1.0, 2.0, w1}, std::tuple{2.0, 1.0, w2}}) {
      const BundleSpec line = BundleSpec::line({class_form(n, a, b), w});
      const RescaleResult rr = he_rescale(line, ctx);
      lines.push_back({class_form(n, a, b), w + rr.f});
      factors.push_back(rr.c);
    }
    const BundleSpec e = BundleSpec::direct_sum(lines);
    const EinsteinAnalysis ea = einstein_matrix(e, geo);
    const StabilityVerdict v =
        semistability_verdict(e, {{SubobjectSpec::Kind::Factors, {0}, {}, "L1"},
                                  {SubobjectSpec::Kind::Factors, {1}, {}, "L2"}},
                              geo);
    std::ostringstream os;
    os << "factors (" << factors[0] << ", " << factors[1] << "), HE "
       << (ea.einstein_factor ? "yes" : "no") << ", " << v.describe();
    out.push_back({"equal_factors", "HE direct sum, NoDestabilizerFound", os.str(),
                   ea.einstein_factor.has_value() && !v.destabilized});
  }
  {
    // (b) unequal Einstein factors
    const BundleSpec e = BundleSpec::direct_sum({{class_form(n, 1.0, 2.0), std::nullopt},
                                                 {class_form(n, 0.0, 1.0), std::nullopt}});
    const EinsteinAnalysis ea = einstein_matrix(e, geo);
    const StabilityVerdict v =
        semistability_verdict(e, {{SubobjectSpec::Kind::Factors, {0}, {}, "L1"}}, geo);
    std::ostringstream os;
    os << "weakly HE " << (ea.weakly_he ? "yes" : "no") << ", " << v.describe();
    out.push_back({"unequal_factors", "not HE, Destabilizer(0, ...)", os.str(),
                   !ea.weakly_he && v.destabilized && v.index == 0});
  }
  {
    // (c) non-split extension of the trivial line by itself, flat metric
    const cplx b = 0.5;
    MatrixFormField beta_star(grid, 1, 1, 0, 1);
    beta_star(0, 0) = FormField(grid, b * dzbar(n, 0));
    const BundleSpec trivial = BundleSpec::line({PQForm(n, 1, 1), std::nullopt});
    const BundleSpec e = BundleSpec::extension(trivial, trivial, beta_star);
    bool flagged = false;
    try {
      (void)he_rescale(e, ctx);
    } catch (const Error& err) {
      flagged = err.kind() == ErrorKind::NotWeaklyHE;
    }
    const CurvatureField curv = chern_curvature(e, grid);
    const Subquotients sq = subquotient_curvatures(curv.theta, second_fundamental_form(e));
    const double mu_s = degree(CurvatureField{sq.sub, identity_matrix_field(grid, 1)}, geo).degree;
    const double mu_q = degree(CurvatureField{sq.quotient, identity_matrix_field(grid, 1)}, geo).degree;
    const cplx zero_mode = beta_star(0, 0).channel(0).mean();
    const bool equal = std::abs(mu_s - mu_q) <= 1e-10;
    const bool non_exact = std::abs(zero_mode) > 1e-12;
    std::ostringstream os;
    os << (flagged ? "NotWeaklyHE" : "not flagged") << ", mu_S " << mu_s << ", mu_Q " << mu_q
       << ", zero mode |" << std::abs(zero_mode) << "|";
    out.push_back({"nonsplit_extension", "NotWeaklyHE, equal slopes, non-exact class", os.str(),
                   flagged && equal && non_exact});
  }
  return out;
}

}  // namespace helab
