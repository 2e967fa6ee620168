#include "helab/bundles.hpp"

#include <algorithm>
#include <cmath>

#include "helab/errors.hpp"
#include "helab/spectral.hpp"

namespace helab {

namespace {

FormField ddbar_of(const ScalarField& f) {
  // ∂∂̄f = -i (i∂∂̄f)
  return -kI * spectral_derivative(f, Derivative::i_ddbar);
}

void require_class_form(const PQForm& c, int n) {
  if (c.n() != n || c.p() != 1 || c.q() != 1)
    throw Error(ErrorKind::InvalidSpec, "class form must be a (1,1)-form on the grid dimension");
  if (realness_residual(c) > 1e-13 * std::max(1.0, c.max_abs()))
    throw Error(ErrorKind::InvalidSpec, "class form must be real");
}

MatrixFormField diagonal_lines(const std::vector<LineBundleData>& lines, const TorusGrid& grid) {
  const int r = static_cast<int>(lines.size());
  MatrixFormField theta(grid, r, r, 1, 1);
  for (int a = 0; a < r; ++a) {
    require_class_form(lines[a].class_form, grid.n);
    theta(a, a) = FormField(grid, -kI * lines[a].class_form);
    if (lines[a].weight) {
      require_same_grid(grid, lines[a].weight->grid());
      theta(a, a) += ddbar_of(*lines[a].weight);
    }
  }
  return theta;
}

MatrixFormField metric_curvature(const MatrixFormField& H) {
  const TorusGrid& grid = H.grid();
  const int r = H.rows();
  if (H.cols() != r || H.p() != 0 || H.q() != 0)
    throw Error(ErrorKind::InvalidSpec, "metric field must be a square matrix of functions");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!is_hermitian_positive_definite(scalar_matrix_at(H, i), 1e-12))
      throw Error(ErrorKind::NotPositiveDefinite,
                  "fibre metric is not Hermitian positive definite at grid point " + std::to_string(i));
  const MatrixFormField H_inv = matrix_field(grid, r, r, [&](std::size_t i) {
    return Eigen::MatrixXcd(scalar_matrix_at(H, i).inverse());
  });
  MatrixFormField dH(grid, r, r, 1, 0);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) dH(a, b) = spectral_derivative(H(a, b), Derivative::d);
  const MatrixFormField A = wedge(H_inv, dH);
  MatrixFormField theta(grid, r, r, 1, 1);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) theta(a, b) = spectral_derivative(A(a, b), Derivative::d_bar);
  return theta;
}

std::vector<LineBundleData> flatten_lines(const BundleSpec& spec) {
  if (spec.kind == BundleSpec::Kind::Extension)
    throw Error(ErrorKind::InvalidSpec, "extension parts must be lines or direct sums of lines");
  if (spec.metric || spec.conformal_weight)
    throw Error(ErrorKind::InvalidSpec, "extension parts carry no metric or weight of their own");
  return spec.lines;
}

std::vector<std::vector<int>> subsets(int r, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < r; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

Eigen::MatrixXcd compound(const Eigen::MatrixXcd& h, const std::vector<std::vector<int>>& sets) {
  const auto k = static_cast<Eigen::Index>(sets.size());
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index s = 0; s < k; ++s)
    for (Eigen::Index t = 0; t < k; ++t) {
      Eigen::MatrixXcd minor(sets[s].size(), sets[t].size());
      for (std::size_t i = 0; i < sets[s].size(); ++i)
        for (std::size_t j = 0; j < sets[t].size(); ++j) minor(i, j) = h(sets[s][i], sets[t][j]);
      out(s, t) = minor.determinant();
    }
  return out;
}

// Kronecker product of matrix form fields where at most one factor has
// positive degree: (A ⊗ B)_{(a,a'),(b,b')} = A_{ab} B_{a'b'}.
MatrixFormField kron(const MatrixFormField& A, const MatrixFormField& B) {
  const int ra = A.rows(), rb = B.rows();
  MatrixFormField out(A.grid(), ra * rb, ra * rb, A.p() + B.p(), A.q() + B.q());
  for (int a = 0; a < ra; ++a)
    for (int b = 0; b < ra; ++b)
      for (int a2 = 0; a2 < rb; ++a2)
        for (int b2 = 0; b2 < rb; ++b2) out(a * rb + a2, b * rb + b2) = wedge(A(a, b), B(a2, b2));
  return out;
}

MatrixFormField transpose(const MatrixFormField& a) {
  MatrixFormField out(a.grid(), a.cols(), a.rows(), a.p(), a.q());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) out(k, i) = a(i, k);
  return out;
}

}  // namespace

BundleSpec BundleSpec::line(LineBundleData data) {
  BundleSpec s;
  s.kind = Kind::Line;
  s.lines.push_back(std::move(data));
  return s;
}

BundleSpec BundleSpec::direct_sum(std::vector<LineBundleData> lines) {
  BundleSpec s;
  s.kind = Kind::DirectSum;
  s.lines = std::move(lines);
  return s;
}

BundleSpec BundleSpec::extension(BundleSpec sub, BundleSpec quotient, MatrixFormField beta_star) {
  BundleSpec s;
  s.kind = Kind::Extension;
  s.parts = {std::move(sub), std::move(quotient)};
  s.beta_star = std::move(beta_star);
  return s;
}

int BundleSpec::rank() const {
  if (kind == Kind::Extension) return parts.at(0).rank() + parts.at(1).rank();
  return static_cast<int>(lines.size());
}

MatrixFormField CurvatureField::i_theta() const {
  MatrixFormField out = theta;
  out *= kI;
  return out;
}

MatrixFormField identity_matrix_field(const TorusGrid& grid, int rank) {
  MatrixFormField out(grid, rank, rank, 0, 0);
  for (int a = 0; a < rank; ++a) out(a, a) = FormField(grid, unit_scalar(grid.n));
  return out;
}

MatrixFormField matrix_field(const TorusGrid& grid, int rows, int cols,
                             const std::function<Eigen::MatrixXcd(std::size_t)>& at) {
  MatrixFormField out(grid, rows, cols, 0, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::MatrixXcd m = at(i);
    for (int a = 0; a < rows; ++a)
      for (int b = 0; b < cols; ++b) out(a, b).channel(0)[i] = m(a, b);
  }
  return out;
}

Eigen::MatrixXcd scalar_matrix_at(const MatrixFormField& f, std::size_t point) {
  Eigen::MatrixXcd m(f.rows(), f.cols());
  for (int a = 0; a < f.rows(); ++a)
    for (int b = 0; b < f.cols(); ++b) m(a, b) = f(a, b).channel(0)[point];
  return m;
}

double dbar_residual(const MatrixFormField& beta_star) {
  double r = 0.0;
  for (int a = 0; a < beta_star.rows(); ++a)
    for (int b = 0; b < beta_star.cols(); ++b)
      r = std::max(r, spectral_derivative(beta_star(a, b), Derivative::d_bar).sup_norm());
  return r;
}

bool trivial_structure(const BundleSpec& spec) {
  if (spec.kind == BundleSpec::Kind::Extension) return false;
  for (const auto& l : spec.lines)
    if (l.class_form.max_abs() != 0.0) return false;
  return true;
}

MatrixFormField holomorphic_frame_metric(const BundleSpec& spec, const TorusGrid& grid) {
  if (!trivial_structure(spec))
    throw Error(ErrorKind::InvalidSpec, "holomorphic frames are only global on a trivial structure");
  const int r = spec.rank();
  MatrixFormField H = spec.metric ? *spec.metric : identity_matrix_field(grid, r);
  if (!spec.metric)
    for (int a = 0; a < r; ++a)
      if (spec.lines[a].weight) H(a, a) = FormField::from_scalar(exp(cplx(-1.0) * *spec.lines[a].weight));
  if (spec.conformal_weight) {
    const ScalarField scale = exp(cplx(-1.0) * *spec.conformal_weight);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) H(a, b) *= scale;
  }
  return H;
}

MatrixFormField second_fundamental_form(const BundleSpec& spec) {
  if (spec.kind != BundleSpec::Kind::Extension || !spec.beta_star)
    throw Error(ErrorKind::InvalidSpec, "second fundamental form needs an extension spec");
  return conjugate_transpose(*spec.beta_star);
}

CurvatureField chern_curvature(const BundleSpec& spec, const TorusGrid& grid, double tol) {
  const int r = spec.rank();
  if (r < 1) throw Error(ErrorKind::InvalidSpec, "bundle of rank zero");
  CurvatureField curv{MatrixFormField(grid, r, r, 1, 1), identity_matrix_field(grid, r)};

  switch (spec.kind) {
    case BundleSpec::Kind::Line:
    case BundleSpec::Kind::DirectSum:
      if (spec.kind == BundleSpec::Kind::Line && r != 1)
        throw Error(ErrorKind::InvalidSpec, "a line spec carries exactly one line");
      if (spec.metric) {
        for (const auto& l : spec.lines)
          if (l.class_form.max_abs() != 0.0 || l.weight)
            throw Error(ErrorKind::InvalidSpec,
                        "a full metric field needs zero class forms and no line weights");
        if (spec.metric->rows() != r) throw Error(ErrorKind::RankMismatch, "metric field rank differs from bundle rank");
        require_same_grid(grid, spec.metric->grid());
        curv.theta = metric_curvature(*spec.metric);
        curv.metric = *spec.metric;
      } else {
        curv.theta = diagonal_lines(spec.lines, grid);
      }
      break;
    case BundleSpec::Kind::Extension: {
      if (spec.metric) throw Error(ErrorKind::InvalidSpec, "extensions use the split metric h_S ⊕ h_Q");
      const auto sub = flatten_lines(spec.parts.at(0));
      const auto quo = flatten_lines(spec.parts.at(1));
      const int s = static_cast<int>(sub.size()), q = static_cast<int>(quo.size());
      if (s < 1 || q < 1) throw Error(ErrorKind::InvalidSpec, "extension needs non-zero sub and quotient");
      const PQForm C = sub.front().class_form;
      require_class_form(C, grid.n);
      for (const auto* part : {&sub, &quo})
        for (const auto& l : *part) {
          if (l.weight) throw Error(ErrorKind::InvalidSpec, "extension lines carry no weights");
          if (!l.class_form.same_shape(C) || (l.class_form - C).max_abs() > 1e-15)
            throw Error(ErrorKind::InvalidSpec, "extension lines must share one class form");
        }
      if (!spec.beta_star) throw Error(ErrorKind::InvalidSpec, "extension without beta_star");
      const MatrixFormField& bs = *spec.beta_star;
      if (bs.rows() != s || bs.cols() != q || bs.p() != 0 || bs.q() != 1)
        throw Error(ErrorKind::InvalidSpec, "beta_star must be an s x q matrix of (0,1)-forms");
      require_same_grid(grid, bs.grid());
      const double res = dbar_residual(bs);
      if (res > tol * std::max(1.0, bs.sup_norm()))
        throw Error(ErrorKind::NotDbarClosedBetaStar, "sup|dbar beta_star| = " + sci(res));

      const MatrixFormField beta = conjugate_transpose(bs);
      const MatrixFormField top = wedge(bs, beta);     // s x s
      const MatrixFormField bottom = wedge(beta, bs);  // q x q
      const FormField base(grid, -kI * C);
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) curv.theta(a, b) = (a == b ? base : FormField(grid, 1, 1)) - top(a, b);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          curv.theta(s + a, s + b) = (a == b ? base : FormField(grid, 1, 1)) - bottom(a, b);
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < q; ++b) {
          curv.theta(a, s + b) = spectral_derivative(bs(a, b), Derivative::d);
          curv.theta(s + b, a) = -1.0 * spectral_derivative(beta(b, a), Derivative::d_bar);
        }
      break;
    }
  }

  if (spec.conformal_weight) {
    require_same_grid(grid, spec.conformal_weight->grid());
    const FormField shift = ddbar_of(*spec.conformal_weight);
    for (int a = 0; a < r; ++a) curv.theta(a, a) += shift;
    const ScalarField scale = exp(cplx(-1.0) * *spec.conformal_weight);
    if (spec.metric)
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) curv.metric(a, b) *= scale;
  }
  return curv;
}

CurvatureField transform_curvature(const CurvatureField& curv, const Transform& op) {
  const TorusGrid& grid = curv.theta.grid();
  const int r = curv.rank();
  auto pointwise = [&](const MatrixFormField& H, int size, auto fn) {
    return matrix_field(grid, size, size, [&](std::size_t i) { return fn(scalar_matrix_at(H, i)); });
  };
  switch (op.kind) {
    case Transform::Kind::Dual: {
      MatrixFormField theta = transpose(curv.theta);
      theta *= -1.0;
      return {theta, pointwise(curv.metric, r, [](const Eigen::MatrixXcd& h) {
                Eigen::MatrixXcd inv = h.inverse().transpose();
                return inv;
              })};
    }
    case Transform::Kind::Tensor: {
      if (!op.other) throw Error(ErrorKind::RankMismatch, "tensor product needs a second curvature");
      const CurvatureField& o = *op.other;
      require_same_grid(grid, o.theta.grid());
      MatrixFormField theta = kron(curv.theta, identity_matrix_field(grid, o.rank()));
      theta += kron(identity_matrix_field(grid, r), o.theta);
      return {theta, kron(curv.metric, o.metric)};
    }
    case Transform::Kind::End: {
      const CurvatureField dual = transform_curvature(curv, {Transform::Kind::Dual, 1, nullptr});
      return transform_curvature(curv, {Transform::Kind::Tensor, 1, &dual});
    }
    case Transform::Kind::WedgePower: {
      const int p = op.power;
      if (p < 1 || p > r) throw Error(ErrorKind::InvalidPower, "wedge power " + std::to_string(p) + " of a rank " + std::to_string(r) + " bundle");
      const auto sets = subsets(r, p);
      const int k = static_cast<int>(sets.size());
      MatrixFormField theta(grid, k, k, 1, 1);
      for (int t = 0; t < k; ++t)
        for (int slot = 0; slot < p; ++slot)
          for (int a = 0; a < r; ++a) {
            // replace sets[t][slot] by a, then sort
            std::vector<int> img = sets[t];
            img[slot] = a;
            if (std::count(img.begin(), img.end(), a) > 1) continue;
            int sign = 1;
            for (int i = 0; i < p; ++i)
              for (int j = i + 1; j < p; ++j)
                if (img[i] > img[j]) sign = -sign;
            std::sort(img.begin(), img.end());
            const int s = static_cast<int>(std::find(sets.begin(), sets.end(), img) - sets.begin());
            theta(s, t) += static_cast<double>(sign) * curv.theta(a, sets[t][slot]);
          }
      return {theta, pointwise(curv.metric, k, [&](const Eigen::MatrixXcd& h) { return compound(h, sets); })};
    }
    case Transform::Kind::Det: {
      MatrixFormField theta(grid, 1, 1, 1, 1);
      theta(0, 0) = trace(curv.theta);
      return {theta, pointwise(curv.metric, 1, [](const Eigen::MatrixXcd& h) {
                Eigen::MatrixXcd d(1, 1);
                d(0, 0) = h.determinant();
                return d;
              })};
    }
  }
  return curv;
}

Subquotients subquotient_curvatures(const MatrixFormField& theta_e, const MatrixFormField& beta) {
  const int q = beta.rows(), s = beta.cols();
  if (theta_e.rows() != s + q || theta_e.cols() != s + q)
    throw Error(ErrorKind::ShapeMismatch, "curvature rank must equal rank S + rank Q");
  if (beta.p() != 1 || beta.q() != 0)
    throw Error(ErrorKind::ShapeMismatch, "second fundamental form must be of type (1,0)");
  const MatrixFormField beta_star = conjugate_transpose(beta);
  Subquotients out{block(theta_e, 0, 0, s, s), block(theta_e, s, s, q, q)};
  out.sub += wedge(beta_star, beta);
  out.quotient += wedge(beta, beta_star);
  return out;
}

double hermitian_residual(const CurvatureField& curv) {
  MatrixFormField x = wedge(curv.metric, curv.theta);
  x *= kI;
  double res = 0.0;
  for (int a = 0; a < x.rows(); ++a)
    for (int b = 0; b < x.cols(); ++b) res = std::max(res, (x(a, b) - conjugate(x(b, a))).sup_norm());
  return res;
}

}  // namespace helab
