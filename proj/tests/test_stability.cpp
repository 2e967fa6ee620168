#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helab/errors.hpp"
#include "helab/stability.hpp"
#include "oracles.hpp"

using namespace helab;

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

TestFormSpec perturbation() {
  TestFormSpec s;
  s.mode = TestFormSpec::Mode::DdbarClosedPerturbation;
  TrigSeries profile;
  profile.terms = {oracle::cos_term(0.02, {0, 0, 1, 0})};
  s.perturbation = {FormTerm{{}, {0}, profile, 1.0}};
  return s;
}

GeometryContext flat_geo(int N) {
  const TorusGrid g = TorusGrid::make(2, N);
  return make_geometry(flat_kahler_form(g), 1, TestFormSpec{});
}

// Ω = i dz1 ^ dzbar1 isolates the dz0 direction.
GeometryContext transverse_geo(int N) {
  const TorusGrid g = TorusGrid::make(2, N);
  return validate_structures(flat_kahler_form(g), FormField(g, i_dz_dzbar(2, 1, 1)), 1);
}

MatrixFormField constant_beta(const TorusGrid& g, const std::vector<std::vector<PQForm>>& rows) {
  MatrixFormField b(g, static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) b(int(i), int(k)) = FormField(g, rows[i][k]);
  return b;
}

}  // namespace

TEST_CASE("degrees of constant-class lines") {
  const GeometryContext geo = flat_geo(8);
  const DegreeReport d = degree(BundleSpec::line(line(1, 2)), geo);
  CHECK(std::abs(d.degree - 12.0) <= 1e-10);
  CHECK(std::abs(d.quadrature - 12.0) <= 1e-10);
  CHECK(std::abs(d.density[3] - 3.0) < 1e-13);
  CHECK(degree(BundleSpec::line(line(0, 0)), geo).degree == 0.0);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), e = u(rng);
    CHECK(std::abs(degree(BundleSpec::line(line(a, b)), geo).degree - 4 * (a + b)) <= 1e-10);
    const double sum = degree(BundleSpec::direct_sum({line(a, b), line(c, e)}), geo).degree;
    CHECK(std::abs(sum - 4 * (a + b + c + e)) <= 1e-10);
  }

  CHECK(std::abs(slope(BundleSpec::line(line(1, 2)), geo) - 12.0) <= 1e-10);
  CHECK(std::abs(slope(BundleSpec::direct_sum({line(1, 2), line(0, 1)}), geo) - 8.0) <= 1e-10);
  CHECK(kind_of([&] { slope(BundleSpec::direct_sum({}), geo); }) == ErrorKind::ZeroRank);
}

TEST_CASE("degree of a non-diagonal class on a non-flat metric") {
  const TorusGrid g = TorusGrid::make(2, 8);
  std::mt19937_64 rng(41);
  const Eigen::MatrixXcd gm = oracle::random_positive(2, rng);
  const GeometryContext geo = make_geometry(constant_kahler_form(g, gm), 1, TestFormSpec{});
  const Eigen::MatrixXcd c = oracle::random_positive(2, rng) - Eigen::MatrixXcd::Identity(2, 2);
  // deg = ∫ C ^ ω = Λ_ω(C) Vol_ω with Λ_ω(C) = tr(g^{-1} c).
  const double expected = (gm.inverse() * c).trace().real() * 4.0 * gm.determinant().real();
  const DegreeReport d = degree(BundleSpec::line({kahler_form(c), std::nullopt}), geo);
  CHECK(std::abs(d.degree - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
}

TEST_CASE("gauge invariance of the degree") {
  const GeometryContext geo = flat_geo(16);
  const BundleSpec e = BundleSpec::line(line(1, 2));
  const GaugeCheck zero = gauge_invariance_check(e, ScalarField(geo.grid, 0.0), geo);
  CHECK(zero.residual == 0.0);

  TrigSeries f;
  f.terms = {oracle::cos_term(0.4, {0, 0, 1, 0})};
  CHECK(gauge_invariance_check(e, f.sample(geo.grid), geo).residual <= 1e-10);

  const GeometryContext pert = make_geometry(flat_kahler_form(geo.grid), 1, perturbation());
  CHECK(pert.validation.d_residual > 1e-3);
  TrigSeries big;
  big.terms = {oracle::cos_term(2.0, {0, 1, 1, 0}), oracle::sin_term(1.0, {1, 0, 0, 1})};
  const GaugeCheck gp = gauge_invariance_check(e, big.sample(geo.grid), pert);
  CHECK(gp.residual <= 1e-8 * gp.scale);
  CHECK(std::abs(gp.degree_h - 12.0) <= 1e-10);
}

TEST_CASE("exact sequence, synthetic mode") {
  const GeometryContext geo = transverse_geo(8);
  const MatrixFormField unit = constant_beta(geo.grid, {{dz(2, 0)}});
  const SlopeComparison c = exact_sequence_synthetic(0.0, unit, geo);
  CHECK(std::abs(c.density_s[0] + 1.0) <= 1e-10);
  CHECK(std::abs(c.density_e[0]) <= 1e-10);
  CHECK(std::abs(c.density_q[0] - 1.0) <= 1e-10);
  CHECK(c.mu_s < c.mu_e);
  CHECK(c.mu_e < c.mu_q);
  CHECK(c.equality_case == EqualityCase::Strict);
  CHECK(c.pointwise_chain_ok);
  CHECK(c.chain_slack >= -1e-11);

  const SlopeComparison z = exact_sequence_synthetic(2.0, constant_beta(geo.grid, {{PQForm(2, 1, 0)}}), geo);
  CHECK(z.equality_case == EqualityCase::Split);
  CHECK(std::abs(z.density_s[4] - 2.0) < 1e-14);
  CHECK(std::abs(z.density_q[4] - 2.0) < 1e-14);
  CHECK(std::abs(z.density_e[4] - 4.0) < 1e-14);  // d_E = r λ_E with r = 2

  // β along dz1 is invisible to Ω = i dz1 ^ dzbar1: nonzero β with equal slopes.
  const SlopeComparison m = exact_sequence_synthetic(0.0, constant_beta(geo.grid, {{dz(2, 1)}}), geo);
  CHECK(m.equality_case == EqualityCase::Mixed);
  CHECK(m.beta_norm > 0.0);

  // Random constant β of shape q x s on the flat background keeps the chain.
  const GeometryContext fgeo = flat_geo(8);
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 2, s = 1 + (trial / 2) % 2;
    std::vector<std::vector<PQForm>> rows(q, std::vector<PQForm>(s));
    for (auto& r : rows)
      for (auto& x : r) x = oracle::random_form(2, 1, 0, rng);
    const SlopeComparison r = exact_sequence_synthetic(0.7, constant_beta(fgeo.grid, rows), fgeo);
    CHECK(r.chain_slack >= -1e-11);
    CHECK(r.equality_case == EqualityCase::Strict);
    CHECK(std::abs(s * r.mu_s + q * r.mu_q - (s + q) * r.mu_e) <= 1e-10 * std::max(1.0, std::abs(r.mu_e)));
  }

  MatrixFormField not_holo(geo.grid, 1, 1, 1, 0);
  TrigSeries prof;
  prof.terms = {oracle::cos_term(0.5, {0, 0, 1, 0})};
  not_holo(0, 0) = build_form_field(geo.grid, 1, 0, {FormTerm{{0}, {}, prof, 1.0}});
  CHECK(kind_of([&] { exact_sequence_synthetic(0.0, not_holo, geo); }) == ErrorKind::NotDbarClosedBetaStar);
}

TEST_CASE("exact sequence, metric mode") {
  const GeometryContext geo = flat_geo(8);
  auto extension = [&](cplx b) {
    MatrixFormField beta_star(geo.grid, 1, 1, 0, 1);
    beta_star(0, 0) = FormField(geo.grid, b * dzbar(2, 0));
    return BundleSpec::extension(BundleSpec::line(line(0, 0)), BundleSpec::line(line(0, 0)), beta_star);
  };
  const SlopeComparison split = exact_sequence_metric(extension(0.0), geo);
  CHECK(split.equality_case == EqualityCase::Split);
  CHECK(std::abs(split.mu_s) <= 1e-10);
  CHECK(kind_of([&] { exact_sequence_metric(extension(0.5), geo); }) == ErrorKind::AmbientNotHE);
}

TEST_CASE("semistability verdicts") {
  const GeometryContext geo = flat_geo(8);
  const BundleSpec equal = BundleSpec::direct_sum({line(1, 2), line(2, 1)});
  const StabilityVerdict v = semistability_verdict(
      equal, {{SubobjectSpec::Kind::Factors, {0}, {}, "L1"}, {SubobjectSpec::Kind::Factors, {1}, {}, "L2"}}, geo);
  CHECK_FALSE(v.destabilized);
  CHECK(v.describe() == "NoDestabilizerFound");
  REQUIRE(v.member_slopes.size() == 2);
  CHECK(std::abs(v.member_slopes[0] - 12.0) <= 1e-10);

  const BundleSpec unequal = BundleSpec::direct_sum({line(1, 2), line(0, 1)});
  const StabilityVerdict d = semistability_verdict(unequal, {{SubobjectSpec::Kind::Factors, {0}, {}, "L1"}}, geo);
  CHECK(d.destabilized);
  CHECK(d.index == 0);
  CHECK(std::abs(d.mu_sub - 12.0) <= 1e-10);
  CHECK(std::abs(d.mu_e - 8.0) <= 1e-10);
  CHECK(d.describe().rfind("Destabilizer(0", 0) == 0);

  const StabilityVerdict vac = semistability_verdict(BundleSpec::line(line(1, 2)), {}, geo);
  CHECK_FALSE(vac.destabilized);

  // A constant subspace spanned by (1, 1) in the unequal sum has slope 8 = μ_E.
  Eigen::MatrixXcd span(2, 1);
  span << 1.0, 1.0;
  BundleSpec trivial = BundleSpec::direct_sum({line(0, 0), line(0, 0)});
  const StabilityVerdict cs =
      semistability_verdict(trivial, {{SubobjectSpec::Kind::ConstantSubspace, {}, span, "diag"}}, geo);
  CHECK_FALSE(cs.destabilized);

  CHECK(kind_of([&] {
          semistability_verdict(unequal, {{SubobjectSpec::Kind::Factors, {5}, {}, "bad"}}, geo);
        }) == ErrorKind::NotASubobject);
  CHECK(kind_of([&] {
          semistability_verdict(unequal, {{SubobjectSpec::Kind::ExtensionSub, {}, {}, "S"}}, geo);
        }) == ErrorKind::NotASubobject);
}

TEST_CASE("Kobayashi-Lübke style demo") {
  const GeometryContext geo = make_geometry(flat_kahler_form(TorusGrid::make(2, 16)), 1, perturbation());
  const POperatorContext ctx = POperatorContext::make(geo);
  const auto outcomes = kl_demo(ctx);
  REQUIRE(outcomes.size() == 3);
  for (const auto& o : outcomes) {
    INFO(o.name, ": expected ", o.expected, ", observed ", o.observed);
    CHECK(o.passed);
  }
}

TEST_CASE("equality case names") {
  CHECK(to_string(EqualityCase::Split) == "Split");
  CHECK(to_string(EqualityCase::Strict) == "Strict");
  CHECK(to_string(EqualityCase::Mixed) == "Mixed");
}
