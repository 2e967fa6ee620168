#pragma once

#include <vector>

#include "helab/torus.hpp"

namespace helab {

enum class Derivative { d_bar, d, i_ddbar };

/// Fourier differentiation on the torus with ∂/∂z_j = (∂_{x_j} - i∂_{y_j})/2
/// and ∂/∂zbar_j = (∂_{x_j} + i∂_{y_j})/2. The Nyquist wave number is
/// treated as zero in every first derivative, so the operators are exact on
/// trigonometric polynomials of degree < N/2, map real data to real data,
/// and commute. Throws NonFiniteInput.
FormField spectral_derivative(const FormField& f, Derivative which);
FormField spectral_derivative(const ScalarField& f, Derivative which);

ScalarField partial(const ScalarField& f, int j);
ScalarField partial_bar(const ScalarField& f, int j);

/// Fourier symbol of ∂/∂z_j (or ∂/∂zbar_j) at every mode, in FFT order.
std::vector<cplx> derivative_symbol(const TorusGrid& grid, int j, bool bar);

/// ∫_X t for an (n,n)-form field by the periodic trapezoidal rule;
/// ∫ dV_n = 2^n on the unit torus. Throws BidegreeMismatch.
cplx integrate_top(const FormField& t);

/// ∫ φ conj(ψ) dV. Throws GridMismatch.
cplx l2_inner(const ScalarField& phi, const ScalarField& psi, const FormField& dV);
double l2_norm(const ScalarField& phi, const FormField& dV);

}  // namespace helab
