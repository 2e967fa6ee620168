#include "helab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helab/errors.hpp"
#include "helab/pointwise_lemmas.hpp"
#include "helab/spectral.hpp"

namespace helab {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

bool is_constant(const FormField& f) {
  for (int c = 0; c < f.channels(); ++c) {
    const auto& ch = f.channel(c);
    for (std::size_t i = 1; i < ch.size(); ++i)
      if (ch[i] != ch[0]) return false;
  }
  return true;
}

FormField field_power(const FormField& a, int k) {
  FormField result(a.grid(), unit_scalar(a.n()));
  for (int i = 0; i < k; ++i) result = wedge(result, a);
  return result;
}

std::string describe_point(const TorusGrid& grid, std::size_t point) {
  std::ostringstream os;
  os << "grid point " << point << " (";
  for (int a = 0; a < grid.axes(); ++a) os << (a ? ", " : "") << grid.coordinate(point, a);
  os << ")";
  return os.str();
}

double min_eigenvalue(const PQForm& omega_at) {
  const Eigen::MatrixXcd g = hermitian_matrix(omega_at);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

IndexMask mask_of(const std::vector<int>& idx, int n) {
  IndexMask m = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= n || (i > 0 && idx[i] <= idx[i - 1]))
      throw Error(ErrorKind::InvalidSpec, "multi-indices must be strictly increasing and within [0, n)");
    m |= static_cast<IndexMask>(1u << idx[i]);
  }
  return m;
}

}  // namespace

ScalarField GeometryContext::transverse_density(const FormField& gamma) const {
  return top_ratio(wedge(gamma, transverse), dV);
}

std::vector<ScalarField> GeometryContext::transverse_kernel() const {
  std::vector<ScalarField> kernel;
  for (int j = 0; j < n(); ++j)
    for (int k = 0; k < n(); ++k)
      kernel.push_back(top_ratio(wedge(wedge(dz(n(), j), dzbar(n(), k)), transverse), dV));
  return kernel;
}

FormField flat_kahler_form(const TorusGrid& grid) {
  return FormField(grid, kahler_form(Eigen::MatrixXcd::Identity(grid.n, grid.n)));
}

FormField constant_kahler_form(const TorusGrid& grid, const Eigen::MatrixXcd& g) {
  if (g.rows() != grid.n || g.cols() != grid.n)
    throw Error(ErrorKind::ShapeMismatch, "Kähler matrix must be n x n");
  return FormField(grid, kahler_form(g));
}

FormField build_form_field(const TorusGrid& grid, int p, int q, const std::vector<FormTerm>& terms) {
  FormField out(grid, p, q);
  const PQForm shape(grid.n, p, q);
  for (const auto& t : terms) {
    if (static_cast<int>(t.holomorphic.size()) != p || static_cast<int>(t.antiholomorphic.size()) != q)
      throw Error(ErrorKind::BidegreeMismatch, "form term does not match the requested bidegree");
    const int c = shape.channel(mask_of(t.holomorphic, grid.n), mask_of(t.antiholomorphic, grid.n));
    out.channel(c) += t.scale * t.profile.sample(grid);
  }
  return out;
}

GeometryContext validate_structures(const FormField& omega, const FormField& omega_test, int m,
                                    const GeometryTolerances& tol) {
  const TorusGrid grid = omega.grid();
  require_same_grid(grid, omega_test.grid());
  const int n = grid.n;
  if (omega.p() != 1 || omega.q() != 1)
    throw Error(ErrorKind::BidegreeMismatch, "omega must be a (1,1)-form field");
  if (m < 1 || m > n)
    throw Error(ErrorKind::BidegreeMismatch, "level m must satisfy 1 <= m <= n");
  if (omega_test.p() != n - m || omega_test.q() != n - m)
    throw Error(ErrorKind::BidegreeMismatch, "test form must have bidegree (n-m, n-m)");

  GeometryContext ctx;
  ctx.grid = grid;
  ctx.m = m;
  ctx.omega = omega;
  ctx.omega_test = omega_test;
  auto& rec = ctx.validation;

  const double omega_scale = std::max(1.0, omega.sup_norm());
  rec.omega_realness = realness_residual(omega);
  if (rec.omega_realness > tol.realness * omega_scale)
    throw Error(ErrorKind::NotReal, "omega is not a real form (residual " + sci(rec.omega_realness) + ")");

  const bool omega_constant = is_constant(omega);
  rec.omega_min_eigenvalue = INFINITY;
  for (std::size_t i = 0; i < (omega_constant ? 1 : grid.size()); ++i) {
    const double ev = min_eigenvalue(omega.at(i));
    rec.omega_min_eigenvalue = std::min(rec.omega_min_eigenvalue, ev);
    if (!(ev > 0.0))
      throw Error(ErrorKind::NotPositiveDefinite, "omega is not positive definite at " + describe_point(grid, i));
  }
  if (!omega_constant) {
    rec.omega_closedness = spectral_derivative(omega, Derivative::d).sup_norm();
    if (rec.omega_closedness > tol.tol_closed * omega_scale)
      throw Error(ErrorKind::NotDdbarClosed, "omega is not closed (sup|d omega| = " +
                                                 sci(rec.omega_closedness) + ")");
  }

  rec.test_scale = omega_test.sup_norm();
  const double test_scale = std::max(1.0, rec.test_scale);
  rec.test_realness = realness_residual(omega_test);
  if (rec.test_realness > tol.realness * test_scale)
    throw Error(ErrorKind::NotReal, "test form is not real (residual " + sci(rec.test_realness) + ")");

  const bool test_constant = is_constant(omega_test);
  if (!test_constant) {
    rec.ddbar_residual = spectral_derivative(omega_test, Derivative::i_ddbar).sup_norm();
    rec.d_residual = spectral_derivative(omega_test, Derivative::d).sup_norm();
  }
  if (rec.ddbar_residual > tol.tol_closed * test_scale)
    throw Error(ErrorKind::NotDdbarClosed,
                "sup|ddbar Omega| = " + sci(rec.ddbar_residual) + " exceeds tolerance");
  if (m == n && !test_constant) {
    // a ∂∂̄-closed function on a compact manifold is constant
    throw Error(ErrorKind::NotDdbarClosed, "for m = n the test form must be a constant scalar");
  }

  rec.min_positivity_density = INFINITY;
  const std::size_t stride = static_cast<std::size_t>(std::max(1, tol.positivity_stride));
  for (std::size_t i = 0; i < grid.size(); i += stride) {
    const auto verdict = weak_positivity_sample(omega_test.at(i), tol.positivity_directions,
                                                tol.positivity_delta,
                                                tol.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    ++rec.positivity_points;
    rec.min_positivity_density = std::min(rec.min_positivity_density, verdict.min_density);
    if (!verdict.plausibly_positive)
      throw Error(ErrorKind::NotWeaklyPositive,
                  "density " + sci(verdict.witness->density) + " < delta at " +
                      describe_point(grid, i));
    if (test_constant) break;
  }

  ctx.dV = cplx(1.0 / factorial(n)) * field_power(omega, n);
  ctx.vol = integrate_top(ctx.dV).real();
  if (!(ctx.vol > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "omega-volume is not positive");
  ctx.transverse = wedge(field_power(omega, m - 1), omega_test);
  return ctx;
}

FormField generate_test_form(const FormField& omega, int m, const TestFormSpec& spec,
                             const GeometryTolerances& tol) {
  const TorusGrid grid = omega.grid();
  const int n = grid.n;
  if (m < 1 || m > n) throw Error(ErrorKind::BidegreeMismatch, "level m must satisfy 1 <= m <= n");
  const int p = n - m;

  FormField base = spec.base ? FormField(grid, *spec.base) : field_power(omega, p);
  if (base.p() != p || base.q() != p)
    throw Error(ErrorKind::BidegreeMismatch, "base test form must have bidegree (n-m, n-m)");

  FormField result;
  switch (spec.mode) {
    case TestFormSpec::Mode::Constant:
      result = base;
      break;
    case TestFormSpec::Mode::KahlerPower: {
      FormField omega_prime =
          omega + spectral_derivative(spec.potential.sample(grid), Derivative::i_ddbar);
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (!(min_eigenvalue(omega_prime.at(i)) > 0.0))
          throw Error(ErrorKind::InvalidAuxiliaryPotential,
                      "omega + i ddbar rho is not positive at " + describe_point(grid, i));
      result = field_power(omega_prime, p);
      break;
    }
    case TestFormSpec::Mode::DdbarClosedPerturbation: {
      if (p < 1)
        throw Error(ErrorKind::InvalidSpec, "perturbation mode needs n - m >= 1");
      const FormField u = build_form_field(grid, p - 1, p, spec.perturbation);
      FormField delta = spectral_derivative(u, Derivative::d) +
                        spectral_derivative(conjugate(u), Derivative::d_bar);
      result = base + cplx(spec.epsilon) * delta;
      break;
    }
  }

  try {
    (void)validate_structures(omega, result, m, tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotWeaklyPositive &&
        spec.mode == TestFormSpec::Mode::DdbarClosedPerturbation)
      throw Error(ErrorKind::PositivityLostAtEpsilon,
                  "epsilon = " + sci(spec.epsilon) + " is too large: " + e.what());
    throw;
  }
  return result;
}

GeometryContext make_geometry(const FormField& omega, int m, const TestFormSpec& spec,
                              const GeometryTolerances& tol) {
  return validate_structures(omega, generate_test_form(omega, m, spec, tol), m, tol);
}

}  // namespace helab
