#include "helab/pq_form.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <cmath>
#include <string>

#include "helab/errors.hpp"

namespace helab {

namespace {

void check_dimension(int n, int p, int q) {
  if (n < 1 || n > kMaxDimension)
    throw Error(ErrorKind::BidegreeMismatch,
                "dimension n=" + std::to_string(n) + " outside [1, 4]");
  if (p < 0 || q < 0 || p > n || q > n)
    throw Error(ErrorKind::DegreeOverflow, "bidegree (" + std::to_string(p) + "," +
                                               std::to_string(q) + ") exceeds n=" +
                                               std::to_string(n));
}

}  // namespace

PQForm::PQForm(int n, int p, int q) : n_(n), p_(p), q_(q) {
  check_dimension(n, p, q);
  coeffs_.assign(static_cast<size_t>(binomial(n, p) * binomial(n, q)), cplx{});
}

PQForm::PQForm(int n, int p, int q, std::vector<cplx> coeffs) : PQForm(n, p, q) {
  if (coeffs.size() != coeffs_.size())
    throw Error(ErrorKind::ShapeMismatch, "coefficient count does not match C(n,p)C(n,q)");
  coeffs_ = std::move(coeffs);
}

int PQForm::channel(IndexMask I, IndexMask J) const {
  const int i = multi_index_table(n_, p_).position(I);
  const int j = multi_index_table(n_, q_).position(J);
  if (i < 0 || j < 0) return -1;
  return i * binomial(n_, q_) + j;
}

IndexMask PQForm::holomorphic_mask(int channel) const {
  return multi_index_table(n_, p_).mask(channel / binomial(n_, q_));
}

IndexMask PQForm::antiholomorphic_mask(int channel) const {
  return multi_index_table(n_, q_).mask(channel % binomial(n_, q_));
}

cplx PQForm::coeff(IndexMask I, IndexMask J) const {
  const int c = channel(I, J);
  return c < 0 ? cplx{} : coeffs_[c];
}

void PQForm::set_coeff(IndexMask I, IndexMask J, cplx value) {
  const int c = channel(I, J);
  if (c < 0) throw Error(ErrorKind::BidegreeMismatch, "multi-index length does not match bidegree");
  coeffs_[c] = value;
}

double PQForm::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

PQForm& PQForm::operator+=(const PQForm& other) {
  if (!same_shape(other)) throw Error(ErrorKind::BidegreeMismatch, "adding forms of different bidegree");
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

PQForm& PQForm::operator-=(const PQForm& other) {
  if (!same_shape(other)) throw Error(ErrorKind::BidegreeMismatch, "subtracting forms of different bidegree");
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

PQForm& PQForm::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

PQForm operator+(PQForm a, const PQForm& b) { return a += b; }
PQForm operator-(PQForm a, const PQForm& b) { return a -= b; }
PQForm operator*(cplx s, PQForm a) { return a *= s; }
PQForm operator*(PQForm a, cplx s) { return a *= s; }
PQForm operator-(PQForm a) { return a *= -1.0; }

PQForm dz(int n, int j) {
  PQForm f(n, 1, 0);
  f.set_coeff(static_cast<IndexMask>(1u << j), 0, 1.0);
  return f;
}

PQForm dzbar(int n, int j) {
  PQForm f(n, 0, 1);
  f.set_coeff(0, static_cast<IndexMask>(1u << j), 1.0);
  return f;
}

PQForm i_dz_dzbar(int n, int j, int k) {
  PQForm f(n, 1, 1);
  f.set_coeff(static_cast<IndexMask>(1u << j), static_cast<IndexMask>(1u << k), kI);
  return f;
}

PQForm unit_scalar(int n, cplx value) {
  PQForm f(n, 0, 0);
  f[0] = value;
  return f;
}

PQForm euclidean_volume(int n) {
  PQForm v = unit_scalar(n);
  for (int j = 0; j < n; ++j) v = wedge(v, i_dz_dzbar(n, j, j));
  return v;
}

PQForm kahler_form(const Eigen::MatrixXcd& g) {
  const int n = static_cast<int>(g.rows());
  PQForm f(n, 1, 1);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      f.set_coeff(static_cast<IndexMask>(1u << j), static_cast<IndexMask>(1u << k), kI * g(j, k));
  return f;
}

Eigen::MatrixXcd hermitian_matrix(const PQForm& form) {
  if (form.p() != 1 || form.q() != 1)
    throw Error(ErrorKind::BidegreeMismatch, "expected a (1,1)-form");
  const int n = form.n();
  Eigen::MatrixXcd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      g(j, k) = -kI * form.coeff(static_cast<IndexMask>(1u << j), static_cast<IndexMask>(1u << k));
  return g;
}

PQForm form_from_one_form_coeffs(int n, std::span<const cplx> c, bool antiholomorphic) {
  PQForm f = antiholomorphic ? PQForm(n, 0, 1) : PQForm(n, 1, 0);
  for (int j = 0; j < n; ++j) f[j] = c[j];
  return f;
}

namespace {

WedgeTable build_wedge_table(int n, int pa, int qa, int pb, int qb) {
  if (pa + pb > n || qa + qb > n)
    throw Error(ErrorKind::DegreeOverflow,
                "wedge of (" + std::to_string(pa) + "," + std::to_string(qa) + ") and (" +
                    std::to_string(pb) + "," + std::to_string(qb) + ") exceeds (n,n) for n=" +
                    std::to_string(n));
  WedgeTable table{n, pa + pb, qa + qb, {}};
  const auto& Ia = multi_index_table(n, pa);
  const auto& Ja = multi_index_table(n, qa);
  const auto& Ib = multi_index_table(n, pb);
  const auto& Jb = multi_index_table(n, qb);
  const auto& Ic = multi_index_table(n, pa + pb);
  const auto& Jc = multi_index_table(n, qa + qb);
  for (int ia = 0; ia < Ia.size(); ++ia)
    for (int ja = 0; ja < Ja.size(); ++ja)
      for (int ib = 0; ib < Ib.size(); ++ib)
        for (int jb = 0; jb < Jb.size(); ++jb) {
          const IndexMask I1 = Ia.mask(ia), J1 = Ja.mask(ja);
          const IndexMask I2 = Ib.mask(ib), J2 = Jb.mask(jb);
          const int s = merge_sign(I1, I2) * merge_sign(J1, J2);
          if (s == 0) continue;
          // move dz_{I2} to the left across dzbar_{J1}
          const int pass = ((popcount(J1) * popcount(I2)) % 2) ? -1 : 1;
          const int c = Ic.position(I1 | I2) * Jc.size() + Jc.position(J1 | J2);
          table.entries.push_back({ia * Ja.size() + ja, ib * Jb.size() + jb, c,
                                   static_cast<double>(s * pass)});
        }
  return table;
}

}  // namespace

const WedgeTable& wedge_table(int n, int pa, int qa, int pb, int qb) {
  static std::mutex mutex;
  static std::map<std::array<int, 5>, WedgeTable> cache;
  const std::array<int, 5> key{n, pa, qa, pb, qb};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_wedge_table(n, pa, qa, pb, qb)).first;
  return it->second;
}

PQForm wedge(const PQForm& a, const PQForm& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::BidegreeMismatch, "wedge of forms on different dimensions");
  const auto& table = wedge_table(a.n(), a.p(), a.q(), b.p(), b.q());
  PQForm c(a.n(), table.p, table.q);
  for (const auto& e : table.entries) c[e.c] += e.sign * a[e.a] * b[e.b];
  return c;
}

PQForm power(const PQForm& a, int k) {
  PQForm result = unit_scalar(a.n());
  for (int i = 0; i < k; ++i) result = wedge(result, a);
  return result;
}

PQForm conjugate(const PQForm& a) {
  // conj(c dz_I ^ dzbar_J) = conj(c) dzbar_I ^ dz_J = (-1)^{pq} conj(c) dz_J ^ dzbar_I
  PQForm out(a.n(), a.q(), a.p());
  const double sign = ((a.p() * a.q()) % 2) ? -1.0 : 1.0;
  for (int c = 0; c < a.size(); ++c)
    out.set_coeff(a.antiholomorphic_mask(c), a.holomorphic_mask(c), sign * std::conj(a[c]));
  return out;
}

double realness_residual(const PQForm& a) {
  if (a.p() != a.q()) return a.max_abs() == 0.0 ? 0.0 : INFINITY;
  return (conjugate(a) - a).max_abs();
}

cplx top_ratio(const PQForm& t, const PQForm& dV) {
  const int n = dV.n();
  if (t.n() != n || t.p() != n || t.q() != n || dV.p() != n || dV.q() != n)
    throw Error(ErrorKind::BidegreeMismatch, "top_ratio needs two (n,n)-forms");
  if (dV[0] == cplx{}) throw Error(ErrorKind::ZeroVolumeForm, "reference volume form vanishes");
  return t[0] / dV[0];
}

bool is_hermitian_positive_definite(const Eigen::MatrixXcd& h, double tol) {
  if (h.rows() != h.cols() || h.rows() == 0) return false;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (h + h.adjoint()));
  if (llt.info() != Eigen::Success) return false;
  return llt.matrixL().toDenseMatrix().diagonal().real().minCoeff() > 0.0;
}

cplx lambda_contract(const PQForm& gamma, const PQForm& omega) {
  if (gamma.p() != 1 || gamma.q() != 1 || omega.p() != 1 || omega.q() != 1 ||
      gamma.n() != omega.n())
    throw Error(ErrorKind::BidegreeMismatch, "lambda_contract needs two (1,1)-forms");
  if (!is_hermitian_positive_definite(hermitian_matrix(omega)))
    throw Error(ErrorKind::DegenerateMetric, "omega is not a positive (1,1)-form");
  const int n = omega.n();
  return static_cast<double>(n) * top_ratio(wedge(gamma, power(omega, n - 1)), power(omega, n));
}

FibreMetric::FibreMetric(Eigen::MatrixXcd h) : h_(std::move(h)) {
  if (!is_hermitian_positive_definite(h_))
    throw Error(ErrorKind::NotPositiveDefinite, "fibre metric is not Hermitian positive definite");
}

FibreMetric FibreMetric::identity(int rank) {
  return FibreMetric(Eigen::MatrixXcd::Identity(rank, rank));
}

MatrixPQForm::MatrixPQForm(int rows, int cols, int n, int p, int q)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::ShapeMismatch, "empty matrix form");
  entries_.assign(static_cast<size_t>(rows * cols), PQForm(n, p, q));
}

double MatrixPQForm::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.max_abs());
  return m;
}

MatrixPQForm wedge(const MatrixPQForm& a, const MatrixPQForm& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorKind::ShapeMismatch, "matrix wedge: inner dimensions differ");
  const auto& table = wedge_table(a.n(), a.p(), a.q(), b.p(), b.q());
  MatrixPQForm out(a.rows(), b.cols(), a.n(), table.p, table.q);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < b.cols(); ++k)
      for (int j = 0; j < a.cols(); ++j)
        for (const auto& e : table.entries) out(i, k)[e.c] += e.sign * a(i, j)[e.a] * b(j, k)[e.b];
  return out;
}

MatrixPQForm wedge(const MatrixPQForm& a, const PQForm& b) {
  const auto& table = wedge_table(a.n(), a.p(), a.q(), b.p(), b.q());
  MatrixPQForm out(a.rows(), a.cols(), a.n(), table.p, table.q);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k)
      for (const auto& e : table.entries) out(i, k)[e.c] += e.sign * a(i, k)[e.a] * b[e.b];
  return out;
}

MatrixPQForm conjugate_transpose(const MatrixPQForm& a) {
  MatrixPQForm out(a.cols(), a.rows(), a.n(), a.q(), a.p());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) out(k, i) = conjugate(a(i, k));
  return out;
}

PQForm trace(const MatrixPQForm& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "trace of a non-square matrix form");
  PQForm t = a(0, 0);
  for (int i = 1; i < a.rows(); ++i) t += a(i, i);
  return t;
}

}  // namespace helab
