#include "helab/p_operator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "detail/fft.hpp"
#include "helab/errors.hpp"
#include "helab/spectral.hpp"

namespace helab {

namespace {

using Vec = Eigen::VectorXcd;

bool is_constant(const ScalarField& f) {
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] != f[0]) return false;
  return true;
}

Vec to_vec(const ScalarField& f) {
  Vec v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v[static_cast<Eigen::Index>(i)] = f[i];
  return v;
}

ScalarField to_field(const TorusGrid& grid, const Vec& v) {
  return ScalarField(grid, std::vector<cplx>(v.data(), v.data() + v.size()));
}

double sup_abs(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

// Pseudo-inverse of a symbol: zero where the symbol (numerically) vanishes.
std::vector<cplx> invert_symbol(const std::vector<cplx>& symbol) {
  double peak = 0.0;
  for (const auto& s : symbol) peak = std::max(peak, std::abs(s));
  std::vector<cplx> inv(symbol.size());
  for (std::size_t i = 0; i < symbol.size(); ++i)
    inv[i] = std::abs(symbol[i]) > 1e-12 * peak ? 1.0 / symbol[i] : cplx{};
  return inv;
}

ScalarField apply_multiplier(const ScalarField& f, const std::vector<cplx>& multiplier) {
  auto spectrum = detail::forward_fft(f.grid(), f.values());
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= multiplier[i];
  return ScalarField(f.grid(), detail::inverse_fft(f.grid(), spectrum));
}

// 1 on modes with no Nyquist wave number along any axis, 0 elsewhere.
std::vector<cplx> resolved_modes(const TorusGrid& grid) {
  const int N = grid.points_per_axis;
  std::vector<cplx> mask(grid.size(), 1.0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    std::size_t r = i;
    for (int a = 0; a < grid.axes(); ++a, r /= N)
      if (static_cast<int>(r % N) == N / 2) mask[i] = 0.0;
  }
  return mask;
}

double omega_mean(const POperatorContext& ctx, const ScalarField& f) {
  return (integrate_top(f * ctx.geometry.dV) / ctx.geometry.vol).real();
}

}  // namespace

POperatorContext POperatorContext::make(GeometryContext geometry, SolverSettings settings) {
  if (!(settings.residual_target > 0.0))
    throw Error(ErrorKind::InvalidSpec, "residual target must be positive");
  if (settings.restart < 1 || settings.max_iterations < 1)
    throw Error(ErrorKind::InvalidSpec, "solver iteration limits must be positive");
  POperatorContext ctx;
  ctx.settings = settings;
  ctx.kernel = geometry.transverse_kernel();
  ctx.constant_coefficients = true;
  for (const auto& k : ctx.kernel) {
    ctx.mean_kernel.push_back(k.mean());
    ctx.constant_coefficients = ctx.constant_coefficients && is_constant(k);
  }
  const int n = geometry.n();
  FormField power(geometry.grid, unit_scalar(n));
  for (int i = 1; i < geometry.m; ++i) power = wedge(power, geometry.omega);
  ctx.omega_power = std::move(power);
  ctx.d_test = spectral_derivative(geometry.omega_test, Derivative::d);
  ctx.dbar_test = spectral_derivative(geometry.omega_test, Derivative::d_bar);
  for (int j = 0; j < n; ++j) {
    ctx.symbol_d.push_back(derivative_symbol(geometry.grid, j, false));
    ctx.symbol_dbar.push_back(derivative_symbol(geometry.grid, j, true));
  }
  ctx.geometry = std::move(geometry);
  return ctx;
}

std::vector<cplx> mean_symbol(const POperatorContext& ctx) {
  const int n = ctx.n();
  const auto& s = ctx.symbol_d;
  const auto& sbar = ctx.symbol_dbar;
  std::vector<cplx> symbol(ctx.grid().size());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    cplx acc{};
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) acc += ctx.mean_kernel[j * n + k] * s[j][i] * sbar[k][i];
    symbol[i] = -kI * acc;
  }
  return symbol;
}

ScalarField apply_P(const POperatorContext& ctx, const ScalarField& phi) {
  require_same_grid(ctx.grid(), phi.grid());
  if (!phi.all_finite()) throw Error(ErrorKind::NonFiniteInput, "field contains NaN or Inf");
  if (ctx.constant_coefficients) return apply_multiplier(phi, mean_symbol(ctx));

  const int n = ctx.n();
  const auto spectrum = detail::forward_fft(phi.grid(), phi.values());
  ScalarField out(phi.grid());
  for (int j = 0; j < n; ++j) {
    const auto& s = ctx.symbol_d[j];
    for (int k = 0; k < n; ++k) {
      const auto& sbar = ctx.symbol_dbar[k];
      std::vector<cplx> mixed(spectrum.size());
      for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = spectrum[i] * s[i] * sbar[i];
      ScalarField second(phi.grid(), detail::inverse_fft(phi.grid(), mixed));
      second *= ctx.kernel[j * n + k];
      out += second;
    }
  }
  out *= -kI;
  return out;
}

AdjointDefect adjoint_defect(const POperatorContext& ctx, const ScalarField& phi,
                             const ScalarField& psi) {
  require_same_grid(ctx.grid(), phi.grid());
  require_same_grid(ctx.grid(), psi.grid());
  const auto& dV = ctx.geometry.dV;
  AdjointDefect out{};
  out.defect = l2_inner(phi, apply_P(ctx, psi), dV) - l2_inner(apply_P(ctx, phi), psi, dV);

  const FormField dphi = spectral_derivative(phi, Derivative::d);
  const FormField dbar_phi = spectral_derivative(phi, Derivative::d_bar);
  FormField correction = wedge(dbar_phi, ctx.d_test) - wedge(dphi, ctx.dbar_test);
  correction = kI * wedge(correction, ctx.omega_power);
  out.predicted = integrate_top(conj(psi) * correction);

  double scale = l2_norm(phi, dV) * l2_norm(psi, dV);
  if (!(scale > 0.0)) scale = 1.0;
  out.residual = std::abs(out.defect - out.predicted) / scale;
  return out;
}

SolveReport solve_P(const POperatorContext& ctx, const ScalarField& g) {
  require_same_grid(ctx.grid(), g.grid());
  if (!g.all_finite()) throw Error(ErrorKind::NonFiniteInput, "right-hand side contains NaN or Inf");
  const auto& geo = ctx.geometry;
  const double g_norm = l2_norm(g, geo.dV);
  const double integral = std::abs(integrate_top(g * geo.dV));
  if (integral > ctx.settings.compat_tol * g_norm * std::sqrt(geo.vol))
    throw Error(ErrorKind::IncompatibleRightHandSide,
                "|∫ g dV| = " + sci(integral) + " is not orthogonal to constants");

  const auto& settings = ctx.settings;
  const auto precond = invert_symbol(mean_symbol(ctx));
  const TorusGrid& grid = ctx.grid();
  SolveReport report;

  auto finish = [&](ScalarField f) {
    f += cplx(-omega_mean(ctx, f));
    report.residual = (apply_P(ctx, f) - g).sup_norm();
    report.f = std::move(f);
    return report;
  };

  if (ctx.constant_coefficients) {
    report = finish(apply_multiplier(g, precond));
    if (report.residual > settings.residual_target)
      throw Error(ErrorKind::SolverDiverged, "symbol division left residual " +
                                                  sci(report.residual));
    return report;
  }

  // Right-preconditioned restarted GMRES on (Π P M^+ Π) y = Π g, f = M^+ Π y,
  // where Π drops Nyquist modes: variable coefficients alias energy there
  // that the symbol cannot resolve.
  const auto resolved = resolved_modes(grid);
  auto precond_resolved = precond;
  for (std::size_t i = 0; i < precond_resolved.size(); ++i) precond_resolved[i] *= resolved[i];
  auto operator_apply = [&](const Vec& v) {
    return to_vec(apply_multiplier(apply_P(ctx, apply_multiplier(to_field(grid, v), precond_resolved)), resolved));
  };
  const Vec b = to_vec(apply_multiplier(g, resolved));
  const auto size = b.size();
  const double rms_target = 1e-3 * settings.residual_target * std::sqrt(static_cast<double>(size));
  Vec y = Vec::Zero(size);
  const int m = settings.restart;
  double previous_norm = INFINITY;

  while (report.iterations < settings.max_iterations) {
    const Vec r = b - operator_apply(y);
    const double sup_r = sup_abs(r);
    if (sup_r <= 1e-2 * settings.residual_target) break;
    const double beta = r.norm();
    if (!(beta < 0.999 * previous_norm)) break;  // stagnation across a restart
    previous_norm = beta;

    std::vector<Vec> V{r / beta};
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<cplx> cs(m), sn(m);
    Vec e = Vec::Zero(m + 1);
    e[0] = beta;
    int k = 0;
    for (; k < m && report.iterations < settings.max_iterations; ++k) {
      Vec w = operator_apply(V[k]);
      ++report.iterations;
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V[i].dot(w);
        w -= H(i, k) * V[i];
      }
      const double h_next = w.norm();
      H(k + 1, k) = h_next;
      for (int i = 0; i < k; ++i) {
        const cplx a = H(i, k), c2 = H(i + 1, k);
        H(i, k) = cs[i] * a + sn[i] * c2;
        H(i + 1, k) = -std::conj(sn[i]) * a + cs[i] * c2;
      }
      const cplx a = H(k, k), c2 = H(k + 1, k);
      const double rho = std::hypot(std::abs(a), std::abs(c2));
      if (std::abs(a) == 0.0) {
        cs[k] = 0.0;
        sn[k] = 1.0;
      } else {
        cs[k] = std::abs(a) / rho;
        sn[k] = (a / std::abs(a)) * std::conj(c2) / rho;
      }
      H(k, k) = cs[k] * a + sn[k] * c2;
      H(k + 1, k) = 0.0;
      e[k + 1] = -std::conj(sn[k]) * e[k];
      e[k] = cs[k] * e[k];
      if (std::abs(e[k + 1]) <= rms_target || h_next <= 1e-14 * beta) {
        ++k;
        break;
      }
      V.push_back(w / h_next);
    }
    const Vec z = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(e.head(k));
    for (int i = 0; i < k; ++i) y += z[i] * V[i];
  }

  report = finish(apply_multiplier(to_field(grid, y), precond_resolved));
  if (report.residual > settings.residual_target)
    throw Error(ErrorKind::SolverDiverged, "after " + std::to_string(report.iterations) +
                                                " iterations the residual is " +
                                                sci(report.residual));
  return report;
}

Decomposition decompose(const POperatorContext& ctx, const ScalarField& lambda) {
  Decomposition out;
  out.c = omega_mean(ctx, lambda);
  ScalarField g = lambda;
  g += cplx(-out.c);
  const auto solved = solve_P(ctx, g);
  out.f = solved.f;
  ScalarField recon = apply_P(ctx, out.f);
  recon += cplx(out.c);
  out.residual = (lambda - recon).sup_norm();
  return out;
}

}  // namespace helab
