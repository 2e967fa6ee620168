#include "helab/spectral.hpp"

#include <cmath>
#include <numbers>

#include "detail/fft.hpp"
#include "helab/errors.hpp"

namespace helab {

namespace {

int wave_number(int a, int N) {
  if (2 * a == N) return 0;  // Nyquist
  return 2 * a < N ? a : a - N;
}

void require_finite(const FormField& f) {
  if (!f.all_finite()) throw Error(ErrorKind::NonFiniteInput, "field contains NaN or Inf");
}

ScalarField apply_symbol(const TorusGrid& grid, const std::vector<cplx>& spectrum,
                         const std::vector<cplx>& symbol) {
  std::vector<cplx> s(spectrum.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = spectrum[i] * symbol[i];
  return ScalarField(grid, detail::inverse_fft(grid, s));
}

// Exterior ∂ (bar = false) or ∂̄ (bar = true) of a form field.
FormField exterior(const FormField& f, bool bar) {
  require_finite(f);
  const int n = f.n();
  const auto& table = bar ? wedge_table(n, 0, 1, f.p(), f.q()) : wedge_table(n, 1, 0, f.p(), f.q());
  FormField out(f.grid(), table.p, table.q);
  std::vector<std::vector<cplx>> symbols;
  for (int j = 0; j < n; ++j) symbols.push_back(derivative_symbol(f.grid(), j, bar));
  for (int c = 0; c < f.channels(); ++c) {
    const auto spectrum = detail::forward_fft(f.grid(), f.channel(c).values());
    for (const auto& e : table.entries) {
      if (e.b != c) continue;
      // e.a is the basis 1-form index j (dz_j or dzbar_j)
      ScalarField deriv = apply_symbol(f.grid(), spectrum, symbols[e.a]);
      deriv *= e.sign;
      out.channel(e.c) += deriv;
    }
  }
  return out;
}

}  // namespace

std::vector<cplx> derivative_symbol(const TorusGrid& grid, int j, bool bar) {
  const int N = grid.points_per_axis;
  const std::size_t size = grid.size();
  std::vector<cplx> symbol(size);
  // strides of the x_j and y_j axes in row-major order
  std::size_t stride_y = 1;
  for (int a = grid.axes() - 1; a > 2 * j + 1; --a) stride_y *= static_cast<std::size_t>(N);
  const std::size_t stride_x = stride_y * static_cast<std::size_t>(N);
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < size; ++i) {
    const int kx = wave_number(static_cast<int>((i / stride_x) % N), N);
    const int ky = wave_number(static_cast<int>((i / stride_y) % N), N);
    // d/dx -> 2πi kx, d/dy -> 2πi ky
    const cplx dx{0.0, 2.0 * pi * kx};
    const cplx dy{0.0, 2.0 * pi * ky};
    symbol[i] = bar ? 0.5 * (dx + kI * dy) : 0.5 * (dx - kI * dy);
  }
  return symbol;
}

ScalarField partial(const ScalarField& f, int j) {
  if (!f.all_finite()) throw Error(ErrorKind::NonFiniteInput, "field contains NaN or Inf");
  return apply_symbol(f.grid(), detail::forward_fft(f.grid(), f.values()),
                      derivative_symbol(f.grid(), j, false));
}

ScalarField partial_bar(const ScalarField& f, int j) {
  if (!f.all_finite()) throw Error(ErrorKind::NonFiniteInput, "field contains NaN or Inf");
  return apply_symbol(f.grid(), detail::forward_fft(f.grid(), f.values()),
                      derivative_symbol(f.grid(), j, true));
}

FormField spectral_derivative(const FormField& f, Derivative which) {
  switch (which) {
    case Derivative::d: return exterior(f, false);
    case Derivative::d_bar: return exterior(f, true);
    case Derivative::i_ddbar: return kI * exterior(exterior(f, true), false);
  }
  return f;
}

FormField spectral_derivative(const ScalarField& f, Derivative which) {
  return spectral_derivative(FormField::from_scalar(f), which);
}

cplx integrate_top(const FormField& t) {
  const int n = t.n();
  if (t.p() != n || t.q() != n) throw Error(ErrorKind::BidegreeMismatch, "integrand must be an (n,n)-form");
  const cplx unit = euclidean_volume(n)[0];
  return t.scalar().mean() / unit * std::pow(2.0, n);
}

cplx l2_inner(const ScalarField& phi, const ScalarField& psi, const FormField& dV) {
  require_same_grid(phi.grid(), psi.grid());
  require_same_grid(phi.grid(), dV.grid());
  return integrate_top((phi * conj(psi)) * dV);
}

double l2_norm(const ScalarField& phi, const FormField& dV) {
  return std::sqrt(std::abs(l2_inner(phi, phi, dV)));
}

}  // namespace helab
