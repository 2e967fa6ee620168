#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helab/bundles.hpp"
#include "helab/errors.hpp"
#include "helab/geometry.hpp"
#include "helab/spectral.hpp"
#include "oracles.hpp"

using namespace helab;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::IoError;
}

PQForm diag_class(double a, double b) { return a * i_dz_dzbar(2, 0, 0) + b * i_dz_dzbar(2, 1, 1); }

LineBundleData line(double a, double b) { return {diag_class(a, b), std::nullopt}; }

BundleSpec unit_extension(const TorusGrid& g, cplx b) {
  MatrixFormField beta_star(g, 1, 1, 0, 1);
  beta_star(0, 0) = FormField(g, b * dzbar(2, 0));
  return BundleSpec::extension(BundleSpec::line(line(0, 0)), BundleSpec::line(line(0, 0)), beta_star);
}

double sup_entry_diff(const MatrixFormField& a, const std::function<PQForm(int, int)>& expected) {
  double d = 0.0;
  for (std::size_t x = 0; x < a.grid().size(); ++x) {
    const MatrixPQForm m = a.at(x);
    for (int i = 0; i < m.rows(); ++i)
      for (int k = 0; k < m.cols(); ++k) d = std::max(d, oracle::max_diff(m(i, k), expected(i, k)));
  }
  return d;
}

}  // namespace

TEST_CASE("line curvature") {
  const TorusGrid g = TorusGrid::make(2, 8);
  const CurvatureField c = chern_curvature(BundleSpec::line(line(1, 2)), g);
  CHECK(c.rank() == 1);
  CHECK(sup_entry_diff(c.i_theta(), [](int, int) { return diag_class(1, 2); }) < 1e-15);

  TrigSeries w;
  w.terms = {oracle::cos_term(0.3, {1, 0, 0, 0}), oracle::sin_term(0.1, {0, 1, 1, 0})};
  const ScalarField phi = w.sample(g);
  const CurvatureField cw = chern_curvature(BundleSpec::line({PQForm(2, 1, 1), phi}), g);
  const FormField expected = spectral_derivative(phi, Derivative::i_ddbar);
  double err = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x)
    err = std::max(err, oracle::max_diff(cw.i_theta().at(x)(0, 0), expected.at(x)));
  CHECK(err < 1e-12);
  CHECK(hermitian_residual(cw) <= 1e-11);
}

TEST_CASE("direct sums and conformal rescaling") {
  const TorusGrid g = TorusGrid::make(2, 8);
  TrigSeries w;
  w.terms = {oracle::cos_term(0.2, {0, 0, 1, 1})};
  BundleSpec e = BundleSpec::direct_sum({line(1, 2), {diag_class(0, 1), w.sample(g)}});
  CHECK(e.rank() == 2);
  const CurvatureField base = chern_curvature(e, g);
  CHECK(base.theta(0, 1).sup_norm() == 0.0);
  CHECK(base.theta(1, 0).sup_norm() == 0.0);

  TrigSeries f;
  f.terms = {oracle::sin_term(0.4, {1, 0, 0, 1}), oracle::cos_term(0.3, {0, 2, 0, 0})};
  e.conformal_weight = f.sample(g);
  const CurvatureField scaled = chern_curvature(e, g);
  const FormField ddf = spectral_derivative(f.sample(g), Derivative::i_ddbar);
  double err = 0.0;
  for (int a = 0; a < 2; ++a) {
    FormField expected = base.i_theta()(a, a) + ddf;
    for (std::size_t x = 0; x < g.size(); ++x)
      err = std::max(err, oracle::max_diff(scaled.i_theta()(a, a).at(x), expected.at(x)));
  }
  CHECK(err <= 1e-10);
  CHECK(hermitian_residual(scaled) <= 1e-11);
}

TEST_CASE("full fibre metric on a trivial bundle") {
  // H^{-1} and log det H are not band limited, so identities hold up to a
  // truncation error that must decay spectrally in N.
  auto metric = [](const TorusGrid& g) {
    return matrix_field(g, 2, 2, [&](std::size_t x) {
      const double t = 2 * pi * g.coordinate(x, 0), u = 2 * pi * g.coordinate(x, 3);
      Eigen::MatrixXcd h(2, 2);
      const cplx off = 0.2 * std::exp(kI * u) * std::cos(t);
      h << 1.0 + 0.3 * std::cos(t), off, std::conj(off), 1.2 + 0.2 * std::sin(u);
      return h;
    });
  };
  std::vector<double> herm, tr_err;
  for (int N : {8, 16, 24}) {
    const TorusGrid g = TorusGrid::make(2, N);
    BundleSpec e = BundleSpec::direct_sum({line(0, 0), line(0, 0)});
    e.metric = metric(g);
    CHECK(trivial_structure(e));
    const CurvatureField c = chern_curvature(e, g);
    CHECK(c.theta.sup_norm() > 1e-2);
    herm.push_back(hermitian_residual(c));
    // Tr iΘ = i∂∂̄(-log det H).
    ScalarField logdet(g);
    for (std::size_t x = 0; x < g.size(); ++x) logdet[x] = -std::log(scalar_matrix_at(*e.metric, x).determinant());
    FormField diff = trace(c.i_theta());
    diff -= spectral_derivative(logdet, Derivative::i_ddbar);
    tr_err.push_back(diff.sup_norm());
  }
  for (std::size_t k = 1; k < herm.size(); ++k) {
    CHECK(herm[k] < 0.01 * herm[k - 1]);
    CHECK(tr_err[k] < 0.01 * tr_err[k - 1]);
  }
  CHECK(herm.back() < 1e-6);
  CHECK(tr_err.back() < 1e-5);

  const TorusGrid g = TorusGrid::make(2, 8);
  BundleSpec e = BundleSpec::direct_sum({line(0, 0), line(0, 0)});
  e.metric = metric(g);
  BundleSpec neg = e;
  neg.metric = matrix_field(g, 2, 2, [](std::size_t) { return Eigen::MatrixXcd(-Eigen::MatrixXcd::Identity(2, 2)); });
  CHECK(kind_of([&] { chern_curvature(neg, g); }) == ErrorKind::NotPositiveDefinite);

  BundleSpec classed = BundleSpec::direct_sum({line(1, 0), line(0, 0)});
  classed.metric = e.metric;
  CHECK(kind_of([&] { chern_curvature(classed, g); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("extension curvature closed form") {
  const TorusGrid g = TorusGrid::make(2, 4);
  const cplx b(0.6, -0.3);
  const BundleSpec ext = unit_extension(g, b);
  const CurvatureField c = chern_curvature(ext, g);
  const double b2 = std::norm(b);
  // A^{0,1} = [[0, b dzbar0], [0, 0]], A^{1,0} = -(A^{0,1})^† and Θ = A ^ A.
  CHECK(sup_entry_diff(c.i_theta(), [&](int i, int k) {
          if (i != k) return PQForm(2, 1, 1);
          return (i == 0 ? b2 : -b2) * i_dz_dzbar(2, 0, 0);
        }) <= 1e-10);
  CHECK(hermitian_residual(c) <= 1e-11);

  const MatrixFormField beta = second_fundamental_form(ext);
  CHECK(beta.rows() == 1);
  CHECK(oracle::max_diff(beta(0, 0).at(0), std::conj(b) * dz(2, 0)) < 1e-15);
  CHECK(dbar_residual(*ext.beta_star) == 0.0);

  const Subquotients sq = subquotient_curvatures(c.theta, beta);
  CHECK(sq.sub.sup_norm() <= 1e-10);
  CHECK(sq.quotient.sup_norm() <= 1e-10);

  // β = 0 returns the diagonal blocks.
  MatrixFormField zero_beta(g, 1, 1, 1, 0);
  const Subquotients blocks = subquotient_curvatures(c.theta, zero_beta);
  CHECK(sup_entry_diff(blocks.sub, [&](int, int) { return c.theta.at(0)(0, 0); }) == 0.0);
  CHECK(sup_entry_diff(blocks.quotient, [&](int, int) { return c.theta.at(0)(1, 1); }) == 0.0);
  CHECK(kind_of([&] { subquotient_curvatures(c.theta, MatrixFormField(g, 2, 1, 1, 0)); }) ==
        ErrorKind::ShapeMismatch);
}

TEST_CASE("subquotient trace identity on a rank-3 extension") {
  const TorusGrid g = TorusGrid::make(2, 4);
  MatrixFormField beta_star(g, 2, 1, 0, 1);
  beta_star(0, 0) = FormField(g, cplx(0.3, 0.1) * dzbar(2, 0) + 0.2 * dzbar(2, 1));
  beta_star(1, 0) = FormField(g, cplx(0.0, -0.4) * dzbar(2, 1));
  const BundleSpec ext = BundleSpec::extension(BundleSpec::direct_sum({line(1, 1), line(1, 1)}),
                                               BundleSpec::line(line(1, 1)), beta_star);
  const CurvatureField c = chern_curvature(ext, g);
  CHECK(c.rank() == 3);
  CHECK(hermitian_residual(c) <= 1e-11);
  const Subquotients sq = subquotient_curvatures(c.theta, second_fundamental_form(ext));
  const FormField lhs = trace(sq.sub) + trace(sq.quotient);
  const FormField rhs = trace(c.theta);
  CHECK(oracle::max_diff(lhs.at(3), rhs.at(3)) < 1e-13);
  // Both subquotients carry the shared class.
  CHECK(sup_entry_diff(sq.sub, [&](int i, int k) { return i == k ? -kI * diag_class(1, 1) : PQForm(2, 1, 1); }) < 1e-13);
}

TEST_CASE("extension errors") {
  const TorusGrid g = TorusGrid::make(2, 8);
  TrigSeries prof;
  prof.terms = {oracle::cos_term(0.5, {0, 0, 1, 0})};
  MatrixFormField beta_star(g, 1, 1, 0, 1);
  beta_star(0, 0) = build_form_field(g, 0, 1, {FormTerm{{}, {0}, prof, 1.0}});
  CHECK(dbar_residual(beta_star) > 0.1);
  const BundleSpec bad = BundleSpec::extension(BundleSpec::line(line(0, 0)), BundleSpec::line(line(0, 0)), beta_star);
  CHECK(kind_of([&] { chern_curvature(bad, g); }) == ErrorKind::NotDbarClosedBetaStar);
  CHECK(kind_of([&] { second_fundamental_form(BundleSpec::line(line(0, 0))); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("curvature transforms") {
  const TorusGrid g = TorusGrid::make(2, 4);
  const CurvatureField l12 = chern_curvature(BundleSpec::line(line(1, 2)), g);
  const CurvatureField lm = chern_curvature(BundleSpec::line(line(-0.5, -0.5)), g);
  const CurvatureField sum = chern_curvature(BundleSpec::direct_sum({line(1, 2), line(0.5, 0.25)}), g);

  const CurvatureField dual = transform_curvature(l12, {Transform::Kind::Dual});
  CHECK(sup_entry_diff(dual.i_theta(), [](int, int) { return diag_class(-1, -2); }) < 1e-15);

  const CurvatureField ten = transform_curvature(l12, {Transform::Kind::Tensor, 1, &lm});
  CHECK(sup_entry_diff(ten.i_theta(), [](int, int) { return diag_class(0.5, 1.5); }) < 1e-15);

  const CurvatureField ts = transform_curvature(sum, {Transform::Kind::Tensor, 1, &sum});
  CHECK(ts.rank() == 4);
  CHECK(sup_entry_diff(ts.i_theta(), [](int i, int k) {
          const double a[2] = {1, 0.5}, b[2] = {2, 0.25};
          if (i != k) return PQForm(2, 1, 1);
          const int p = i / 2, q = i % 2;
          return diag_class(a[p] + a[q], b[p] + b[q]);
        }) < 1e-15);

  const CurvatureField end = transform_curvature(sum, {Transform::Kind::End});
  CHECK(end.rank() == 4);
  CHECK(trace(end.theta).sup_norm() < 1e-15);
  CHECK(end.theta(0, 0).sup_norm() < 1e-15);
  CHECK(sup_entry_diff(end.i_theta(), [](int i, int k) {
          if (i != k) return PQForm(2, 1, 1);
          if (i == 1) return diag_class(0.5, 1.75);
          if (i == 2) return diag_class(-0.5, -1.75);
          return PQForm(2, 1, 1);
        }) < 1e-15);

  const CurvatureField det = transform_curvature(sum, {Transform::Kind::Det});
  CHECK(det.rank() == 1);
  CHECK(sup_entry_diff(det.i_theta(), [](int, int) { return diag_class(1.5, 2.25); }) < 1e-15);
  const CurvatureField w2 = transform_curvature(sum, {Transform::Kind::WedgePower, 2});
  CHECK(sup_entry_diff(w2.i_theta(), [](int, int) { return diag_class(1.5, 2.25); }) < 1e-15);
  const CurvatureField w1 = transform_curvature(sum, {Transform::Kind::WedgePower, 1});
  CHECK(sup_entry_diff(w1.i_theta(), [&](int i, int k) { return sum.i_theta().at(0)(i, k); }) == 0.0);

  CHECK(kind_of([&] { transform_curvature(sum, {Transform::Kind::WedgePower, 3}); }) == ErrorKind::InvalidPower);
  CHECK(kind_of([&] { transform_curvature(sum, {Transform::Kind::WedgePower, 0}); }) == ErrorKind::InvalidPower);
}

TEST_CASE("wedge power of a rank-3 sum") {
  const TorusGrid g = TorusGrid::make(2, 4);
  const CurvatureField s = chern_curvature(BundleSpec::direct_sum({line(1, 0), line(0, 2), line(3, 1)}), g);
  const CurvatureField w2 = transform_curvature(s, {Transform::Kind::WedgePower, 2});
  REQUIRE(w2.rank() == 3);
  // Λ² of diag(c0, c1, c2) is diag(c0+c1, c0+c2, c1+c2) in lexicographic pair order.
  const PQForm expected[3] = {diag_class(1, 2), diag_class(4, 1), diag_class(3, 3)};
  CHECK(sup_entry_diff(w2.i_theta(), [&](int i, int k) { return i == k ? expected[i] : PQForm(2, 1, 1); }) < 1e-15);
}
