#include "helab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "helab/errors.hpp"

namespace helab {

TorusGrid TorusGrid::make(int n, int points_per_axis, std::size_t point_budget) {
  if (n < 1 || n > kMaxDimension)
    throw Error(ErrorKind::InvalidGrid, "complex dimension must be in [1, 4], got " + std::to_string(n));
  if (points_per_axis < 4 || points_per_axis % 2 != 0)
    throw Error(ErrorKind::InvalidGrid,
                "points per axis must be even and >= 4, got " + std::to_string(points_per_axis));
  TorusGrid g{n, points_per_axis};
  double total = std::pow(static_cast<double>(points_per_axis), 2.0 * n);
  if (total > static_cast<double>(point_budget))
    throw Error(ErrorKind::InvalidGrid, "grid of " + std::to_string(static_cast<long long>(total)) +
                                            " points exceeds the budget of " +
                                            std::to_string(point_budget));
  return g;
}

std::size_t TorusGrid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < axes(); ++a) s *= static_cast<std::size_t>(points_per_axis);
  return s;
}

double TorusGrid::coordinate(std::size_t point, int axis) const {
  const auto N = static_cast<std::size_t>(points_per_axis);
  for (int a = axes() - 1; a > axis; --a) point /= N;
  return static_cast<double>(point % N) / static_cast<double>(N);
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(TorusGrid grid, cplx value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(TorusGrid grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorKind::GridMismatch, "value count does not match the grid");
}

ScalarField ScalarField::sample(const TorusGrid& grid,
                                const std::function<cplx(std::span<const double>)>& f) {
  ScalarField out(grid);
  std::vector<double> x(grid.axes());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.axes(); ++a) x[a] = grid.coordinate(i, a);
    out[i] = f(x);
  }
  return out;
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::sup_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

cplx ScalarField::mean() const {
  cplx s{};
  for (const auto& v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(cplx s) {
  for (auto& v : values_) v += s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

ScalarField conj(ScalarField a) {
  for (auto& v : a.values()) v = std::conj(v);
  return a;
}

ScalarField exp(ScalarField a) {
  for (auto& v : a.values()) v = std::exp(v);
  return a;
}

ScalarField real_part(ScalarField a) {
  for (auto& v : a.values()) v = v.real();
  return a;
}

// ------------------------------------------------------------------ FormField

FormField::FormField(TorusGrid grid, int p, int q) : grid_(grid), p_(p), q_(q) {
  const PQForm shape(grid.n, p, q);
  channels_.assign(static_cast<std::size_t>(shape.size()), ScalarField(grid));
}

FormField::FormField(TorusGrid grid, const PQForm& value) : FormField(grid, value.p(), value.q()) {
  if (value.n() != grid.n) throw Error(ErrorKind::BidegreeMismatch, "form dimension differs from grid");
  for (int c = 0; c < channels(); ++c) channels_[c] = ScalarField(grid, value[c]);
}

FormField FormField::from_scalar(const ScalarField& f) {
  FormField out(f.grid(), 0, 0);
  out.channels_[0] = f;
  return out;
}

PQForm FormField::at(std::size_t point) const {
  PQForm f(grid_.n, p_, q_);
  for (int c = 0; c < channels(); ++c) f[c] = channels_[c][point];
  return f;
}

void FormField::set(std::size_t point, const PQForm& value) {
  for (int c = 0; c < channels(); ++c) channels_[c][point] = value[c];
}

double FormField::sup_norm() const {
  double m = 0.0;
  for (const auto& ch : channels_) m = std::max(m, ch.sup_norm());
  return m;
}

bool FormField::all_finite() const {
  return std::all_of(channels_.begin(), channels_.end(),
                     [](const ScalarField& c) { return c.all_finite(); });
}

FormField& FormField::operator+=(const FormField& o) {
  if (p_ != o.p_ || q_ != o.q_) throw Error(ErrorKind::BidegreeMismatch, "adding fields of different bidegree");
  for (int c = 0; c < channels(); ++c) channels_[c] += o.channels_[c];
  return *this;
}

FormField& FormField::operator-=(const FormField& o) {
  if (p_ != o.p_ || q_ != o.q_) throw Error(ErrorKind::BidegreeMismatch, "subtracting fields of different bidegree");
  for (int c = 0; c < channels(); ++c) channels_[c] -= o.channels_[c];
  return *this;
}

FormField& FormField::operator*=(cplx s) {
  for (auto& ch : channels_) ch *= s;
  return *this;
}

FormField& FormField::operator*=(const ScalarField& f) {
  for (auto& ch : channels_) ch *= f;
  return *this;
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(cplx s, FormField a) { return a *= s; }
FormField operator*(const ScalarField& f, FormField a) { return a *= f; }

FormField wedge(const FormField& a, const FormField& b) {
  require_same_grid(a.grid(), b.grid());
  const auto& table = wedge_table(a.n(), a.p(), a.q(), b.p(), b.q());
  FormField out(a.grid(), table.p, table.q);
  const std::size_t size = a.grid().size();
  for (const auto& e : table.entries) {
    auto dst = out.channel(e.c).values();
    auto x = a.channel(e.a).values();
    auto y = b.channel(e.b).values();
    for (std::size_t i = 0; i < size; ++i) dst[i] += e.sign * x[i] * y[i];
  }
  return out;
}

FormField wedge(const FormField& a, const PQForm& b) {
  const auto& table = wedge_table(a.n(), a.p(), a.q(), b.p(), b.q());
  FormField out(a.grid(), table.p, table.q);
  const std::size_t size = a.grid().size();
  for (const auto& e : table.entries) {
    if (b[e.b] == cplx{}) continue;
    auto dst = out.channel(e.c).values();
    auto x = a.channel(e.a).values();
    const cplx s = e.sign * b[e.b];
    for (std::size_t i = 0; i < size; ++i) dst[i] += s * x[i];
  }
  return out;
}

FormField wedge(const PQForm& a, const FormField& b) {
  const auto& table = wedge_table(b.n(), a.p(), a.q(), b.p(), b.q());
  FormField out(b.grid(), table.p, table.q);
  const std::size_t size = b.grid().size();
  for (const auto& e : table.entries) {
    if (a[e.a] == cplx{}) continue;
    auto dst = out.channel(e.c).values();
    auto y = b.channel(e.b).values();
    const cplx s = e.sign * a[e.a];
    for (std::size_t i = 0; i < size; ++i) dst[i] += s * y[i];
  }
  return out;
}

FormField conjugate(const FormField& a) {
  FormField out(a.grid(), a.q(), a.p());
  const PQForm shape(a.n(), a.p(), a.q());
  const PQForm target(a.n(), a.q(), a.p());
  const double sign = ((a.p() * a.q()) % 2) ? -1.0 : 1.0;
  for (int c = 0; c < a.channels(); ++c) {
    const int t = target.channel(shape.antiholomorphic_mask(c), shape.holomorphic_mask(c));
    out.channel(t) = sign * conj(a.channel(c));
  }
  return out;
}

double realness_residual(const FormField& a) {
  if (a.p() != a.q()) return a.sup_norm() == 0.0 ? 0.0 : INFINITY;
  return (conjugate(a) - a).sup_norm();
}

ScalarField top_ratio(const FormField& t, const FormField& dV) {
  require_same_grid(t.grid(), dV.grid());
  const int n = t.n();
  if (t.p() != n || t.q() != n || dV.p() != n || dV.q() != n)
    throw Error(ErrorKind::BidegreeMismatch, "top_ratio needs (n,n)-form fields");
  ScalarField out(t.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx v = dV.scalar()[i];
    if (v == cplx{}) throw Error(ErrorKind::ZeroVolumeForm, "reference volume form vanishes at a grid point");
    out[i] = t.scalar()[i] / v;
  }
  return out;
}

// ------------------------------------------------------------ MatrixFormField

MatrixFormField::MatrixFormField(TorusGrid grid, int rows, int cols, int p, int q)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::ShapeMismatch, "empty matrix field");
  entries_.assign(static_cast<std::size_t>(rows * cols), FormField(grid, p, q));
}

MatrixPQForm MatrixFormField::at(std::size_t point) const {
  MatrixPQForm m(rows_, cols_, grid().n, p(), q());
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) m(i, k) = (*this)(i, k).at(point);
  return m;
}

double MatrixFormField::sup_norm() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.sup_norm());
  return m;
}

MatrixFormField& MatrixFormField::operator+=(const MatrixFormField& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::ShapeMismatch, "adding matrix fields of different shape");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  return *this;
}

MatrixFormField& MatrixFormField::operator*=(cplx s) {
  for (auto& e : entries_) e *= s;
  return *this;
}

MatrixFormField wedge(const MatrixFormField& a, const MatrixFormField& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::ShapeMismatch, "matrix wedge: inner dimensions differ");
  MatrixFormField out(a.grid(), a.rows(), b.cols(), a.p() + b.p(), a.q() + b.q());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < b.cols(); ++k)
      for (int j = 0; j < a.cols(); ++j) out(i, k) += wedge(a(i, j), b(j, k));
  return out;
}

MatrixFormField conjugate_transpose(const MatrixFormField& a) {
  MatrixFormField out(a.grid(), a.cols(), a.rows(), a.q(), a.p());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) out(k, i) = conjugate(a(i, k));
  return out;
}

FormField trace(const MatrixFormField& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "trace of a non-square matrix field");
  FormField t = a(0, 0);
  for (int i = 1; i < a.rows(); ++i) t += a(i, i);
  return t;
}

MatrixFormField block(const MatrixFormField& a, int row0, int col0, int rows, int cols) {
  if (row0 < 0 || col0 < 0 || row0 + rows > a.rows() || col0 + cols > a.cols())
    throw Error(ErrorKind::ShapeMismatch, "block outside the matrix field");
  MatrixFormField out(a.grid(), rows, cols, a.p(), a.q());
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) out(i, k) = a(row0 + i, col0 + k);
  return out;
}

// ----------------------------------------------------------------- TrigSeries

ScalarField TrigSeries::sample(const TorusGrid& grid) const {
  for (const auto& t : terms)
    if (static_cast<int>(t.wave.size()) != grid.axes())
      throw Error(ErrorKind::InvalidSpec, "trigonometric term needs one wave number per real axis");
  return ScalarField::sample(grid, [&](std::span<const double> x) {
    double v = constant;
    for (const auto& t : terms) {
      double phase = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) phase += t.wave[a] * x[a];
      phase *= 2.0 * std::numbers::pi;
      v += t.amplitude * (t.kind == TrigTerm::Kind::Cos ? std::cos(phase) : std::sin(phase));
    }
    return cplx(v);
  });
}

int TrigSeries::bandwidth() const {
  int b = 0;
  for (const auto& t : terms)
    for (int k : t.wave) b = std::max(b, std::abs(k));
  return b;
}

TrigSeries random_trig_series(int n, int bandwidth, int terms, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(-bandwidth, bandwidth);
  std::uniform_real_distribution<double> amp(-scale, scale);
  TrigSeries s;
  for (int t = 0; t < terms; ++t) {
    TrigTerm term;
    term.amplitude = amp(rng);
    term.kind = (rng() & 1u) ? TrigTerm::Kind::Cos : TrigTerm::Kind::Sin;
    term.wave.resize(2 * n);
    for (auto& k : term.wave) k = wave(rng);
    s.terms.push_back(std::move(term));
  }
  return s;
}

}  // namespace helab
