#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "helab/pq_form.hpp"

namespace helab {

/// Uniform periodic grid on C^n / (Z + iZ)^n. Real axes are ordered
/// (x_0, y_0, x_1, y_1, ...) with z_j = x_j + i y_j; the point index is
/// row-major over the 2n axes, axis 0 varying slowest.
struct TorusGrid {
  static constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 21;

  int n = 2;
  int points_per_axis = 16;

  /// Throws InvalidGrid unless N >= 4 is even and N^{2n} fits the budget.
  static TorusGrid make(int n, int points_per_axis,
                        std::size_t point_budget = kDefaultPointBudget);

  int axes() const { return 2 * n; }
  std::size_t size() const;
  /// Coordinate in [0, 1) of `point` along real axis `axis`.
  double coordinate(std::size_t point, int axis) const;

  bool operator==(const TorusGrid&) const = default;
};

void require_same_grid(const TorusGrid& a, const TorusGrid& b);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(TorusGrid grid, cplx value = {});
  ScalarField(TorusGrid grid, std::vector<cplx> values);
  /// Samples f(x) where x holds the 2n real coordinates.
  static ScalarField sample(const TorusGrid& grid,
                            const std::function<cplx(std::span<const double>)>& f);

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  double sup_norm() const;
  double sup_imag() const;
  cplx mean() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(cplx s);
  ScalarField& operator+=(cplx s);

 private:
  TorusGrid grid_;
  std::vector<cplx> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(cplx s, ScalarField a);
ScalarField conj(ScalarField a);
ScalarField exp(ScalarField a);
ScalarField real_part(ScalarField a);

/// A grid of (p,q)-covectors stored as one scalar channel per coefficient.
class FormField {
 public:
  FormField() = default;
  FormField(TorusGrid grid, int p, int q);
  /// Constant field.
  FormField(TorusGrid grid, const PQForm& value);
  static FormField from_scalar(const ScalarField& f);

  const TorusGrid& grid() const { return grid_; }
  int n() const { return grid_.n; }
  int p() const { return p_; }
  int q() const { return q_; }
  int channels() const { return static_cast<int>(channels_.size()); }

  ScalarField& channel(int c) { return channels_[c]; }
  const ScalarField& channel(int c) const { return channels_[c]; }

  PQForm at(std::size_t point) const;
  void set(std::size_t point, const PQForm& value);
  /// The (0,0) or (n,n) coefficient as a scalar field.
  const ScalarField& scalar() const { return channels_.front(); }

  double sup_norm() const;
  bool all_finite() const;

  FormField& operator+=(const FormField& o);
  FormField& operator-=(const FormField& o);
  FormField& operator*=(cplx s);
  /// Pointwise multiplication by a scalar function.
  FormField& operator*=(const ScalarField& f);

 private:
  TorusGrid grid_;
  int p_ = 0;
  int q_ = 0;
  std::vector<ScalarField> channels_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(cplx s, FormField a);
FormField operator*(const ScalarField& f, FormField a);

FormField wedge(const FormField& a, const FormField& b);
FormField wedge(const FormField& a, const PQForm& b);
FormField wedge(const PQForm& a, const FormField& b);
FormField conjugate(const FormField& a);
/// sup over points and channels of |a - conjugate(a)|.
double realness_residual(const FormField& a);
/// Pointwise t / dV for (n,n) fields. Throws ZeroVolumeForm.
ScalarField top_ratio(const FormField& t, const FormField& dV);

/// A rows x cols matrix of form fields (End- or Hom-valued forms).
class MatrixFormField {
 public:
  MatrixFormField() = default;
  MatrixFormField(TorusGrid grid, int rows, int cols, int p, int q);

  const TorusGrid& grid() const { return entries_.front().grid(); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int p() const { return entries_.front().p(); }
  int q() const { return entries_.front().q(); }

  FormField& operator()(int i, int k) { return entries_[i * cols_ + k]; }
  const FormField& operator()(int i, int k) const { return entries_[i * cols_ + k]; }

  MatrixPQForm at(std::size_t point) const;
  double sup_norm() const;

  MatrixFormField& operator+=(const MatrixFormField& o);
  MatrixFormField& operator*=(cplx s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<FormField> entries_;
};

MatrixFormField wedge(const MatrixFormField& a, const MatrixFormField& b);
MatrixFormField conjugate_transpose(const MatrixFormField& a);
FormField trace(const MatrixFormField& a);
/// Sub-block [row0, row0+rows) x [col0, col0+cols).
MatrixFormField block(const MatrixFormField& a, int row0, int col0, int rows, int cols);

/// A finite real trigonometric sum Σ amp * cos|sin(2π k·x) over the 2n real
/// axes, used for weights, potentials and test data.
struct TrigTerm {
  enum class Kind { Cos, Sin };
  double amplitude = 0.0;
  Kind kind = Kind::Cos;
  std::vector<int> wave;  // one integer per real axis, length 2n
};

struct TrigSeries {
  double constant = 0.0;
  std::vector<TrigTerm> terms;

  ScalarField sample(const TorusGrid& grid) const;
  /// Largest |k_axis| over all terms.
  int bandwidth() const;
};

/// Seeded random real trigonometric polynomial with every wave component in
/// [-bandwidth, bandwidth] and amplitudes in [-scale, scale].
TrigSeries random_trig_series(int n, int bandwidth, int terms, double scale,
                              std::uint64_t seed);

}  // namespace helab
