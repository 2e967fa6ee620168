#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "helab/multi_index.hpp"

namespace helab {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

/// A complex (p,q)-covector at one point of C^n.
///
/// Coefficient (I, J) multiplies dz_I ^ dzbar_J, where dz_I is the wedge of
/// dz_{i_1}, ..., dz_{i_p} for the increasing multi-index I and all dz factors
/// precede all dzbar factors. Coefficients are dense, ordered by
/// (lex position of I) * C(n, q) + (lex position of J).
/// Coordinates are 0-based: dz_0 is the first holomorphic differential.
class PQForm {
 public:
  PQForm() : PQForm(1, 0, 0) {}
  PQForm(int n, int p, int q);
  PQForm(int n, int p, int q, std::vector<cplx> coeffs);

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx& operator[](int i) { return coeffs_[i]; }
  const cplx& operator[](int i) const { return coeffs_[i]; }

  /// Coefficient of dz_I ^ dzbar_J for masks of the right length.
  cplx coeff(IndexMask I, IndexMask J) const;
  void set_coeff(IndexMask I, IndexMask J, cplx value);

  int channel(IndexMask I, IndexMask J) const;
  IndexMask holomorphic_mask(int channel) const;
  IndexMask antiholomorphic_mask(int channel) const;

  bool same_shape(const PQForm& other) const {
    return n_ == other.n_ && p_ == other.p_ && q_ == other.q_;
  }
  double max_abs() const;

  PQForm& operator+=(const PQForm& other);
  PQForm& operator-=(const PQForm& other);
  PQForm& operator*=(cplx s);

 private:
  int n_, p_, q_;
  std::vector<cplx> coeffs_;
};

PQForm operator+(PQForm a, const PQForm& b);
PQForm operator-(PQForm a, const PQForm& b);
PQForm operator*(cplx s, PQForm a);
PQForm operator*(PQForm a, cplx s);
PQForm operator-(PQForm a);

// Basis elements.
PQForm dz(int n, int j);
PQForm dzbar(int n, int j);
/// i dz_j ^ dzbar_k
PQForm i_dz_dzbar(int n, int j, int k);
/// The scalar 1 as a (0,0)-form.
PQForm unit_scalar(int n, cplx value = 1.0);
/// dV_n = (i dz_0 ^ dzbar_0) ^ ... ^ (i dz_{n-1} ^ dzbar_{n-1})
PQForm euclidean_volume(int n);
/// The real (1,1)-form i * sum g_{jk} dz_j ^ dzbar_k for a Hermitian g.
PQForm kahler_form(const Eigen::MatrixXcd& g);
/// Recovers g from a (1,1)-form: g_{jk} = -i * coeff(j, k).
Eigen::MatrixXcd hermitian_matrix(const PQForm& form);
PQForm form_from_one_form_coeffs(int n, std::span<const cplx> c, bool antiholomorphic);

/// Precomputed structure constants of the wedge product between two
/// bidegrees: product channel c gets sign * a[ia] * b[ib].
struct WedgeTable {
  struct Entry {
    int a;
    int b;
    int c;
    double sign;
  };
  int n, p, q;
  std::vector<Entry> entries;
};

/// Cached. Throws DegreeOverflow if the product bidegree exceeds (n, n).
const WedgeTable& wedge_table(int n, int pa, int qa, int pb, int qb);

PQForm wedge(const PQForm& a, const PQForm& b);
PQForm power(const PQForm& a, int k);
PQForm conjugate(const PQForm& a);
/// Coefficient-wise sup of |a - conjugate(a)|; zero iff a is real.
double realness_residual(const PQForm& a);

/// t = ratio * dV for top-degree t and dV. Throws ZeroVolumeForm.
cplx top_ratio(const PQForm& t, const PQForm& dV);

/// Λ_ω γ defined by γ ^ ω^{n-1} = (Λ_ω γ / n) ω^n. Throws DegenerateMetric
/// unless ω is a positive (1,1)-form.
cplx lambda_contract(const PQForm& gamma, const PQForm& omega);

/// Pointwise positive-definite Hermitian fibre metric. The inner product of
/// frame-coefficient vectors is <u, v>_h = v^H H u, so <e_a, e_b>_h = H(b, a).
class FibreMetric {
 public:
  explicit FibreMetric(Eigen::MatrixXcd h);
  static FibreMetric identity(int rank);

  int rank() const { return static_cast<int>(h_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return h_; }
  cplx inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
    return v.dot(h_ * u);
  }

 private:
  Eigen::MatrixXcd h_;
};

/// Returns true when h is Hermitian (to tol) and has a Cholesky factor.
bool is_hermitian_positive_definite(const Eigen::MatrixXcd& h, double tol = 1e-12);

/// A rows x cols matrix of (p,q)-covectors, i.e. a (p,q)-form with values in
/// Hom(C^cols, C^rows). Entry (i, k) is stored row-major.
class MatrixPQForm {
 public:
  MatrixPQForm(int rows, int cols, int n, int p, int q);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int n() const { return entries_.front().n(); }
  int p() const { return entries_.front().p(); }
  int q() const { return entries_.front().q(); }

  PQForm& operator()(int i, int k) { return entries_[i * cols_ + k]; }
  const PQForm& operator()(int i, int k) const { return entries_[i * cols_ + k]; }
  double max_abs() const;

 private:
  int rows_, cols_;
  std::vector<PQForm> entries_;
};

/// (A ^ B)_{ik} = sum_j A_{ij} ^ B_{jk}. Throws ShapeMismatch.
MatrixPQForm wedge(const MatrixPQForm& a, const MatrixPQForm& b);
MatrixPQForm wedge(const MatrixPQForm& a, const PQForm& b);
/// Entry-wise conjugate then transpose: β* = transpose(conj β).
MatrixPQForm conjugate_transpose(const MatrixPQForm& a);
/// Throws ShapeMismatch for non-square input.
PQForm trace(const MatrixPQForm& a);

}  // namespace helab
