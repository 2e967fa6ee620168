#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "helab/errors.hpp"
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

double point_value(const TrigSeries& s, const std::vector<double>& x) {
  double v = s.constant;
  for (const auto& t : s.terms) {
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) phase += t.wave[a] * x[a];
    phase *= 2 * pi;
    v += t.amplitude * (t.kind == TrigTerm::Kind::Cos ? std::cos(phase) : std::sin(phase));
  }
  return v;
}

std::vector<double> coords(const TorusGrid& g, std::size_t i) {
  std::vector<double> x(g.axes());
  for (int a = 0; a < g.axes(); ++a) x[a] = g.coordinate(i, a);
  return x;
}

}  // namespace

TEST_CASE("grid construction") {
  const TorusGrid g = TorusGrid::make(2, 8);
  CHECK(g.size() == 4096);
  CHECK(g.coordinate(0, 0) == 0.0);
  CHECK(g.coordinate(1, 3) == 0.125);
  CHECK(g.coordinate(512, 0) == 0.125);
  CHECK(kind_of([] { TorusGrid::make(2, 7); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { TorusGrid::make(2, 2); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { TorusGrid::make(4, 64); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { require_same_grid(TorusGrid::make(2, 8), TorusGrid::make(2, 4)); }) ==
        ErrorKind::GridMismatch);
}

TEST_CASE("first derivatives of cos(2πx0)") {
  const TorusGrid g = TorusGrid::make(2, 16);
  TrigSeries s;
  s.terms = {oracle::cos_term(1.0, {1, 0, 0, 0})};
  const ScalarField phi = s.sample(g);
  const FormField d = spectral_derivative(phi, Derivative::d);
  const FormField db = spectral_derivative(phi, Derivative::d_bar);
  REQUIRE(d.p() == 1);
  REQUIRE(db.q() == 1);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expected = -pi * std::sin(2 * pi * g.coordinate(i, 0));
    err = std::max({err, std::abs(d.channel(0)[i] - expected), std::abs(d.channel(1)[i]),
                    std::abs(db.channel(0)[i] - expected)});
  }
  CHECK(err < 1e-12);
}

TEST_CASE("i ddbar against finite differences") {
  const TorusGrid g = TorusGrid::make(2, 16);
  TrigSeries s;
  s.terms = {oracle::cos_term(1.0, {1, 0, 0, 1}), oracle::sin_term(0.5, {0, 2, -1, 0}),
             oracle::cos_term(0.25, {1, 1, 1, -1})};
  const FormField h = spectral_derivative(s.sample(g), Derivative::i_ddbar);
  REQUIRE(h.p() == 1);
  REQUIRE(h.q() == 1);
  auto f = [&](const std::vector<double>& x) { return point_value(s, x); };
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int sample = 0; sample < 5; ++sample) {
    const std::size_t i = pick(rng);
    const PQForm at = h.at(i);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const cplx fd = kI * oracle::ddbar_fd(f, coords(g, i), j, k);
        CHECK(std::abs(at.coeff(IndexMask(1 << j), IndexMask(1 << k)) - fd) < 1e-3);
      }
  }

  // Spec example: i∂∂̄ cos(2πx0) = -π² cos(2πx0) i dz0 ^ dzbar0.
  TrigSeries c;
  c.terms = {oracle::cos_term(1.0, {1, 0, 0, 0})};
  const FormField hc = spectral_derivative(c.sample(g), Derivative::i_ddbar);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx expected = -kI * pi * pi * std::cos(2 * pi * g.coordinate(i, 0));
    err = std::max(err, std::abs(hc.at(i).coeff(1, 1) - expected));
    err = std::max({err, std::abs(hc.at(i).coeff(1, 2)), std::abs(hc.at(i).coeff(2, 2))});
  }
  CHECK(err < 1e-11);
}

TEST_CASE("derivative structure") {
  const TorusGrid g = TorusGrid::make(2, 8);
  CHECK(spectral_derivative(ScalarField(g, 2.5), Derivative::i_ddbar).sup_norm() == 0.0);

  const TrigSeries s = random_trig_series(2, 3, 6, 1.0, 99);
  const ScalarField phi = s.sample(g);
  // i∂∂̄ of a real function is a real form.
  CHECK(realness_residual(spectral_derivative(phi, Derivative::i_ddbar)) < 1e-12);
  // ∂_j and ∂̄_k commute.
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      CHECK(oracle::sup_diff(partial(partial_bar(phi, k), j), partial_bar(partial(phi, j), k)) < 1e-11);
  // conj(∂φ) = ∂̄φ for real φ.
  CHECK(oracle::sup_diff(conj(partial(phi, 1)), partial_bar(phi, 1)) < 1e-12);

  // The Nyquist mode cos(πN x0) has no first derivative.
  TrigSeries ny;
  ny.terms = {oracle::cos_term(1.0, {4, 0, 0, 0})};
  CHECK(spectral_derivative(ny.sample(g), Derivative::d).sup_norm() < 1e-12);

  ScalarField bad(g, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { spectral_derivative(bad, Derivative::d); }) == ErrorKind::NonFiniteInput);
}

TEST_CASE("integration") {
  const TorusGrid g = TorusGrid::make(2, 8);
  const FormField dV(g, euclidean_volume(2));
  CHECK(std::abs(integrate_top(dV) - 4.0) < 1e-13);
  CHECK(std::abs(integrate_top(FormField(g, euclidean_volume(2) * cplx(0, 1))) - cplx(0, 4)) < 1e-13);

  const double a = 1.7, b = -0.4;
  const PQForm lhs = a * i_dz_dzbar(2, 0, 0) + b * i_dz_dzbar(2, 1, 1);
  const PQForm rhs = i_dz_dzbar(2, 0, 0) + i_dz_dzbar(2, 1, 1);
  CHECK(std::abs(integrate_top(FormField(g, wedge(lhs, rhs))) - 4.0 * (a + b)) < 1e-12);

  // Stokes: ∫ i∂∂̄φ ^ Ω0 = 0 for constant Ω0.
  const FormField h = spectral_derivative(random_trig_series(2, 3, 5, 1.0, 4).sample(g), Derivative::i_ddbar);
  CHECK(std::abs(integrate_top(wedge(h, rhs + 0.3 * i_dz_dzbar(2, 0, 1) + 0.3 * i_dz_dzbar(2, 1, 0)))) < 1e-12);

  CHECK(kind_of([&] { integrate_top(FormField(g, i_dz_dzbar(2, 0, 0))); }) == ErrorKind::BidegreeMismatch);
}

TEST_CASE("L2 pairing") {
  const TorusGrid g = TorusGrid::make(2, 8);
  const FormField dV(g, euclidean_volume(2));
  TrigSeries c1, c2;
  c1.terms = {oracle::cos_term(1.0, {1, 0, 0, 0})};
  c2.terms = {oracle::cos_term(1.0, {2, 0, 0, 0})};
  CHECK(std::abs(l2_inner(ScalarField(g, 1.0), ScalarField(g, 1.0), dV) - 4.0) < 1e-13);
  CHECK(std::abs(l2_inner(c1.sample(g), c2.sample(g), dV)) < 1e-13);
  CHECK(std::abs(l2_inner(c1.sample(g), c1.sample(g), dV) - 2.0) < 1e-13);
  CHECK(std::abs(l2_norm(c1.sample(g), dV) - std::sqrt(2.0)) < 1e-13);
  const ScalarField phi(g, cplx(0, 1));
  CHECK(std::abs(l2_inner(phi, ScalarField(g, 1.0), dV) - cplx(0, 4)) < 1e-13);
  CHECK(kind_of([&] { l2_inner(phi, ScalarField(TorusGrid::make(2, 4), 1.0), dV); }) == ErrorKind::GridMismatch);
}

TEST_CASE("form fields") {
  const TorusGrid g = TorusGrid::make(2, 4);
  const FormField w(g, i_dz_dzbar(2, 0, 0));
  const FormField v = wedge(w, FormField(g, i_dz_dzbar(2, 1, 1)));
  CHECK(oracle::max_diff(v.at(7), euclidean_volume(2)) == 0.0);
  const ScalarField r = top_ratio(FormField(g, 3.0 * euclidean_volume(2)), FormField(g, euclidean_volume(2)));
  CHECK(std::abs(r[5] - 3.0) < 1e-15);

  MatrixFormField m(g, 2, 2, 1, 1);
  m(0, 0) = w;
  m(1, 1) = 2.0 * w;
  CHECK(std::abs(trace(m).at(0).coeff(1, 1) - 3.0 * kI) < 1e-15);
  const MatrixFormField blk = block(m, 1, 1, 1, 1);
  CHECK(blk.rows() == 1);
  CHECK(std::abs(blk(0, 0).at(0).coeff(1, 1) - 2.0 * kI) < 1e-15);
}

TEST_CASE("trig series") {
  const TrigSeries a = random_trig_series(2, 2, 5, 0.5, 42);
  const TrigSeries b = random_trig_series(2, 2, 5, 0.5, 42);
  const TrigSeries c = random_trig_series(2, 2, 5, 0.5, 43);
  REQUIRE(a.terms.size() == 5);
  CHECK(a.bandwidth() <= 2);
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    CHECK(a.terms[i].wave == b.terms[i].wave);
    CHECK(a.terms[i].amplitude == b.terms[i].amplitude);
    CHECK(std::abs(a.terms[i].amplitude) <= 0.5);
  }
  bool differs = false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) differs |= a.terms[i].amplitude != c.terms[i].amplitude;
  CHECK(differs);

  const TorusGrid g = TorusGrid::make(2, 8);
  const ScalarField f = a.sample(g);
  CHECK(f.sup_imag() == 0.0);
  for (std::size_t i : {0ul, 17ul, 1000ul}) CHECK(std::abs(f[i] - point_value(a, coords(g, i))) < 1e-13);
}
