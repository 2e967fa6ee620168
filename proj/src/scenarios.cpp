#include "helab/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "helab/errors.hpp"
#include "helab/he_analysis.hpp"
#include "helab/pointwise_lemmas.hpp"
#include "helab/spectral.hpp"
#include "helab/stability.hpp"

namespace helab {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, VerificationReport& report) : cfg_(cfg), report_(report) {}

  void begin(const ScenarioConfig& s) {
    current_ = &s;
    tick_ = Clock::now();
  }

  const ScenarioConfig& scenario() const { return *current_; }
  const RunConfig& cfg() const { return cfg_; }
  VerificationReport& report() { return report_; }

  void check(const std::string& name, const std::string& anchor, double residual, double tolerance,
             const std::string& detail = {}) {
    const std::string digest_input = current_->name + "|" + name + "|" + current_->params.dump() +
                                     "|" + std::to_string(cfg_.seed) + "|" + std::to_string(cfg_.n) +
                                     "|" + std::to_string(cfg_.m) + "|" +
                                     std::to_string(cfg_.points_per_axis) + "|" +
                                     to_json(cfg_).at("omega_test").dump();
    CheckRecord c = make_check(current_->name + "/" + name, anchor, residual, tolerance * cfg_.tol_scale,
                               fnv1a_hex(digest_input), detail);
    const auto now = Clock::now();
    if (cfg_.record_timings) c.runtime_ms = std::chrono::duration<double, std::milli>(now - tick_).count();
    tick_ = now;
    report_.checks.push_back(std::move(c));
  }

  /// Boolean outcome as a 0/1 residual against tolerance 0.
  void verdict(const std::string& name, const std::string& anchor, bool ok, const std::string& detail) {
    check(name, anchor, ok ? 0.0 : 1.0, 0.0, detail);
  }

  std::uint64_t seed(const std::string& tag, int k = 0) const {
    return fnv1a(current_->name + "/" + tag + "/" + std::to_string(k)) ^ cfg_.seed;
  }

  int p_int(const char* key, int fallback) const { return param<int>(key, fallback); }
  double p_double(const char* key, double fallback) const { return param<double>(key, fallback); }
  std::vector<std::string> p_names(const char* key) const {
    return param<std::vector<std::string>>(key, {});
  }
  std::vector<double> p_doubles(const char* key) const { return param<std::vector<double>>(key, {}); }

  TorusGrid grid() const { return make_grid(cfg_, cfg_.points_per_axis); }

  SolverSettings solver() const {
    SolverSettings s;
    s.residual_target = cfg_.tolerances.solver_residual;
    return s;
  }

  const POperatorContext& ctx() {
    if (!ctx_) {
      const TorusGrid g = grid();
      ctx_ = POperatorContext::make(make_geometry(make_omega(cfg_, g), cfg_.m, make_test_form_spec(cfg_),
                                                  make_geometry_tolerances(cfg_)),
                                    solver());
    }
    return *ctx_;
  }

  const POperatorContext& closed_ctx() {
    if (!closed_) {
      const TorusGrid g = grid();
      closed_ = POperatorContext::make(
          make_geometry(make_omega(cfg_, g), cfg_.m, TestFormSpec{}, make_geometry_tolerances(cfg_)), solver());
    }
    return *closed_;
  }

  /// Geometry at another resolution with the configured test form.
  POperatorContext ctx_at(int points_per_axis) const {
    const TorusGrid g = make_grid(cfg_, points_per_axis);
    return POperatorContext::make(make_geometry(make_omega(cfg_, g), cfg_.m, make_test_form_spec(cfg_),
                                                make_geometry_tolerances(cfg_)),
                                  solver());
  }

  BundleSpec bundle(const std::string& name, const TorusGrid& g) const {
    return build_bundle(cfg_.bundles.at(name), g);
  }

  bool closed_test_form(const GeometryContext& geo) const {
    return geo.validation.d_residual <= cfg_.tolerances.tol_closed * std::max(1.0, geo.validation.test_scale);
  }

 private:
  template <class T>
  T param(const char* key, T fallback) const {
    const json& p = current_->params;
    if (!p.contains(key)) return fallback;
    try {
      return p.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::ConfigError, current_->name + ".params." + key + ": wrong type");
    }
  }

  const RunConfig& cfg_;
  VerificationReport& report_;
  const ScenarioConfig* current_ = nullptr;
  Clock::time_point tick_;
  std::optional<POperatorContext> ctx_, closed_;
};

ScalarField random_real(const TorusGrid& g, int bandwidth, int terms, double scale, std::uint64_t seed) {
  return real_part(random_trig_series(g.n, bandwidth, terms, scale, seed).sample(g));
}

// ---------------------------------------------------------------------------

void adjoint_defect_suite(Runner& r) {
  const int pairs = r.p_int("pairs", 20);
  const int band = r.p_int("bandwidth", 2);
  const int terms = r.p_int("terms", 16);
  const std::pair<const char*, const POperatorContext*> cases[] = {{"configured", &r.ctx()},
                                                                   {"closed", &r.closed_ctx()}};
  for (const auto& [label, ctx] : cases) {
    const auto& geo = ctx->geometry;
    const bool closed = r.closed_test_form(geo);
    double worst = 0.0, largest_defect = 0.0;
    for (int k = 0; k < pairs; ++k) {
      const ScalarField phi = random_real(geo.grid, band, terms, 1.0, r.seed("phi", k));
      const ScalarField psi = random_real(geo.grid, band, terms, 1.0, r.seed("psi", k));
      const AdjointDefect d = adjoint_defect(*ctx, phi, psi);
      const double norms = l2_norm(phi, geo.dV) * l2_norm(psi, geo.dV);
      worst = std::max(worst, closed ? std::abs(d.defect) / norms : d.residual);
      largest_defect = std::max(largest_defect, std::abs(d.defect) / norms);
    }
    r.check(std::string("defect_") + label, "adjoint defect identity", worst, closed ? 1e-10 : 1e-8,
            std::string(closed ? "closed" : "perturbed") + " test form, largest |defect|/norms " +
                fmt(largest_defect));
  }
}

void kernel_and_decompose(Runner& r) {
  const POperatorContext& ctx = r.ctx();
  const auto& geo = ctx.geometry;
  const int samples = r.p_int("samples", 5);
  const int band = r.p_int("bandwidth", 2);
  const int terms = r.p_int("terms", 8);

  const ScalarField constant(geo.grid, cplx(1.7));
  r.check("kernel_constant", "kernel of P", apply_P(ctx, constant).sup_norm(), 1e-13);

  double worst = 0.0, worst_c = 0.0, worst_orth = 0.0;
  const ScalarField one(geo.grid, cplx(1.0));
  for (int k = 0; k < samples; ++k) {
    ScalarField lambda = random_real(geo.grid, band, terms, 1.0, r.seed("lambda", k));
    lambda += cplx(0.5 * (k + 1));
    const Decomposition dec = decompose(ctx, lambda);
    ScalarField recon = apply_P(ctx, dec.f);
    recon += cplx(dec.c);
    worst = std::max(worst, (recon - lambda).sup_norm());
    const double mean = (l2_inner(lambda, one, geo.dV) / geo.vol).real();
    worst_c = std::max(worst_c, std::abs(dec.c - mean));
    const ScalarField f = random_real(geo.grid, band, terms, 1.0, r.seed("f", k));
    worst_orth = std::max(worst_orth, std::abs(l2_inner(apply_P(ctx, f), one, geo.dV)));
  }
  r.check("decompose_residual", "orthogonal decomposition", worst, 1e-8);
  r.check("decompose_constant", "orthogonal decomposition", worst_c, 1e-10);
  r.check("range_orthogonal_to_constants", "orthogonal decomposition", worst_orth, 1e-10);
}

void he_rescale_line(Runner& r) {
  const POperatorContext& ctx = r.ctx();
  const auto names = r.p_names("bundles");
  const auto expected = r.p_doubles("expected_c");
  for (std::size_t i = 0; i < names.size(); ++i) {
    const RescaleResult rr = he_rescale(r.bundle(names[i], ctx.grid()), ctx);
    r.check(names[i] + "_post_residual", "conformal rescaling", rr.post_residual, 1e-8,
            "c = " + fmt(rr.c));
    if (i < expected.size())
      r.check(names[i] + "_factor", "conformal rescaling", std::abs(rr.c - expected[i]), 1e-9,
              "c = " + fmt(rr.c) + ", expected " + fmt(expected[i]));
  }
}

void slope_link(Runner& r) {
  const POperatorContext& ctx = r.ctx();
  const auto& geo = ctx.geometry;
  for (const auto& name : r.p_names("bundles")) {
    BundleSpec spec = r.bundle(name, geo.grid);
    const EinsteinAnalysis ea = einstein_matrix(spec, geo);
    std::string note = "HE as given";
    if (!ea.einstein_factor) {
      spec = he_rescale(spec, ctx).rescaled;
      note = "rescaled to HE";
    }
    const SlopeLink sl = slope_link_check(spec, geo);
    r.check(name, "Einstein factor and slope", sl.residual, 1e-8 * sl.scale,
            note + ", lambda " + fmt(sl.lambda) + ", mu/Vol " + fmt(sl.slope_over_vol));
  }
  const json& p = r.scenario().params;
  if (p.contains("closed_form")) {
    const json& cf = p.at("closed_form");
    const BundleSpec spec = r.bundle(cf.at("bundle").get<std::string>(), geo.grid);
    const SlopeLink sl = slope_link_check(spec, geo);
    const double mu = sl.slope_over_vol * geo.vol;
    const double res = std::max({std::abs(sl.lambda - cf.at("lambda").get<double>()),
                                 std::abs(mu - cf.at("mu").get<double>()),
                                 std::abs(geo.vol - cf.at("vol").get<double>())});
    r.check("closed_form", "Einstein factor and slope", res, 1e-10,
            "lambda " + fmt(sl.lambda) + ", mu " + fmt(mu) + ", Vol " + fmt(geo.vol));
  }
}

void vanishing_identity(Runner& r) {
  const POperatorContext& ctx = r.ctx();
  const TorusGrid& g = ctx.grid();
  const int weights = r.p_int("weights", 10);
  const int rank = r.p_int("rank", 2);
  const int band = r.p_int("bandwidth", 1);
  const int terms = r.p_int("terms", 4);
  const double amp = r.p_double("amplitude", 0.05);
  std::mt19937_64 rng(r.seed("section"));
  std::normal_distribution<double> normal;

  auto section = [&] {
    std::vector<ScalarField> s;
    for (int a = 0; a < rank; ++a) s.emplace_back(g, cplx(normal(rng), normal(rng)));
    return s;
  };

  double worst = 0.0, worst_slack = 0.0;
  for (int k = 0; k < weights; ++k) {
    std::vector<LineBundleData> lines;
    for (int a = 0; a < rank; ++a)
      lines.push_back({PQForm(g.n, 1, 1), random_real(g, band, terms, amp, r.seed("weight", k * rank + a))});
    const VanishingIdentity vi =
        vanishing_identity_check(BundleSpec::direct_sum(std::move(lines)), section(), ctx);
    worst = std::max(worst, vi.residual);
    const double scale = std::max(1.0, vi.lhs.sup_norm());
    worst_slack = std::max(worst_slack, -vi.inequality_slack / scale);
  }
  r.check("identity_random_weights", "vanishing identity", worst, 1e-8);
  r.check("inequality_random_weights", "vanishing identity", std::max(0.0, worst_slack), 1e-8);

  std::vector<LineBundleData> flat(rank, LineBundleData{PQForm(g.n, 1, 1), std::nullopt});
  const VanishingIdentity vi = vanishing_identity_check(BundleSpec::direct_sum(std::move(flat)), section(), ctx);
  r.check("identity_flat", "vanishing identity",
          std::max({vi.residual, vi.lhs.sup_norm(), vi.parallel_defect}), 1e-13);
}

void bundle_factor_suite(Runner& r) {
  const auto& geo = r.ctx().geometry;
  const json& p = r.scenario().params;
  const BundleSpec e = r.bundle(p.at("e").get<std::string>(), geo.grid);
  std::optional<BundleSpec> f;
  if (p.contains("f")) f = r.bundle(p.at("f").get<std::string>(), geo.grid);
  for (const auto& c : bundle_factor_check(e, f ? &*f : nullptr, geo)) {
    r.check(c.operation, "Einstein factors of bundle operations", c.residual,
            1e-9 * std::max(1.0, std::abs(c.predicted)),
            "predicted " + fmt(c.predicted) + ", measured " + (c.measured ? fmt(*c.measured) : "none"));
  }
}

void degree_gauge_invariance(Runner& r) {
  const auto names = r.p_names("bundles");
  const auto expected = r.p_doubles("expected_degrees");
  const int rescalings = r.p_int("rescalings", 10);
  const int band = r.p_int("bandwidth", 2);
  const int terms = r.p_int("terms", 6);
  const double amp = r.p_double("amplitude", 0.5);
  const auto& geo = r.ctx().geometry;

  for (std::size_t i = 0; i < names.size(); ++i) {
    const DegreeReport d = degree(r.bundle(names[i], geo.grid), geo);
    r.check(names[i] + "_quadrature", "degree density", std::abs(d.degree - d.quadrature),
            1e-10 * std::max(1.0, std::abs(d.degree)));
    if (i < expected.size())
      r.check(names[i] + "_degree", "degree", std::abs(d.degree - expected[i]), 1e-10,
              "degree " + fmt(d.degree) + ", expected " + fmt(expected[i]));
  }

  const std::pair<const char*, const POperatorContext*> cases[] = {{"configured", &r.ctx()},
                                                                   {"closed", &r.closed_ctx()}};
  for (const auto& [label, ctx] : cases) {
    const auto& cg = ctx->geometry;
    double worst = 0.0;
    for (const auto& name : names) {
      const BundleSpec spec = r.bundle(name, cg.grid);
      for (int k = 0; k < rescalings; ++k) {
        const GaugeCheck gc = gauge_invariance_check(spec, random_real(cg.grid, band, terms, amp, r.seed(name, k)), cg);
        worst = std::max(worst, gc.residual / gc.scale);
      }
    }
    r.check(std::string("gauge_") + label, "metric independence of the degree", worst, 1e-8);
  }
}

// iΘ of an extension with constant β* predicted pointwise from the algebra:
// C - iβ*^β on S, C - iβ^β* on Q, zero off the diagonal.
MatrixPQForm predicted_extension_curvature(const MatrixPQForm& beta_star, const PQForm& class_form) {
  const int s = beta_star.rows(), q = beta_star.cols(), n = beta_star.n();
  const MatrixPQForm beta = conjugate_transpose(beta_star);
  const MatrixPQForm ss = wedge(beta_star, beta);
  const MatrixPQForm qq = wedge(beta, beta_star);
  MatrixPQForm out(s + q, s + q, n, 1, 1);
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) out(a, b) = (a == b ? class_form : PQForm(n, 1, 1)) - kI * ss(a, b);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) out(s + a, s + b) = (a == b ? class_form : PQForm(n, 1, 1)) - kI * qq(a, b);
  return out;
}

double matrix_form_distance(const MatrixPQForm& a, const MatrixPQForm& b) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) d = std::max(d, (a(i, k) - b(i, k)).max_abs());
  return d;
}

void exact_sequence_suite(Runner& r) {
  const auto& geo = r.ctx().geometry;
  const TorusGrid& g = geo.grid;
  const int n = g.n;
  const json& p = r.scenario().params;

  // Unit β against Ω = i dz_{n-1} ^ dzbar_{n-1}; closed form only for n = 2, m = 1.
  if (n == 2 && r.cfg().m == 1) {
    TestFormSpec spec;
    spec.base = i_dz_dzbar(n, 1, 1);
    const GeometryContext ug = make_geometry(make_omega(r.cfg(), g), 1, spec, make_geometry_tolerances(r.cfg()));
    MatrixFormField beta(g, 1, 1, 1, 0);
    beta(0, 0) = FormField(g, dz(n, 0));
    const SlopeComparison sc = exact_sequence_synthetic(0.0, beta, ug);
    ScalarField ds = sc.density_s, dq = sc.density_q;
    ds += cplx(1.0);
    dq += cplx(-1.0);
    r.check("unit_beta_densities", "subquotient degree densities",
            std::max({ds.sup_norm(), sc.density_e.sup_norm(), dq.sup_norm()}), 1e-10,
            "slopes " + fmt(sc.mu_s) + ", " + fmt(sc.mu_e) + ", " + fmt(sc.mu_q));
    r.verdict("unit_beta_strict", "equality case", sc.equality_case == EqualityCase::Strict,
              to_string(sc.equality_case));
  }

  // Random constant β on the configured geometry, cross-checked pointwise.
  const int draws = r.p_int("random_betas", 10);
  std::mt19937_64 rng(r.seed("beta"));
  std::normal_distribution<double> normal;
  double worst_slack = 0.0, worst_trace = 0.0;
  int misclassified = 0;
  for (int k = 0; k <= draws; ++k) {
    const int s = 1 + k % 2, q = 1 + (k / 2) % 2;
    const bool zero = k == draws;
    MatrixPQForm beta0(q, s, n, 1, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < s; ++b)
        for (int j = 0; j < n; ++j) beta0(a, b)[j] = zero ? cplx{} : cplx(normal(rng), normal(rng));
    MatrixFormField beta(g, q, s, 1, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < s; ++b) beta(a, b) = FormField(g, beta0(a, b));
    const double lambda_e = zero ? 0.0 : normal(rng);
    const SlopeComparison sc = exact_sequence_synthetic(lambda_e, beta, geo);
    worst_slack = std::max(worst_slack, -sc.chain_slack);
    if ((sc.equality_case == EqualityCase::Split) != zero) ++misclassified;
    for (std::size_t i = 0; i < g.size(); i += 97) {
      const BetaTraces bt = beta_trace_densities(beta0, geo.omega.at(i), geo.omega_test.at(i), r.cfg().m);
      worst_trace = std::max({worst_trace, std::abs(sc.density_s[i].real() - s * lambda_e - bt.trace_s),
                              std::abs(sc.density_q[i].real() - q * lambda_e - bt.trace_q)});
    }
  }
  r.check("chain_slack", "pointwise slope chain", std::max(0.0, worst_slack), 1e-11);
  r.check("split_iff_beta_zero", "equality case", misclassified, 0.0);
  r.check("densities_match_pointwise_traces", "subquotient degree densities", worst_trace, 1e-10);

  // Metric mode.
  if (p.contains("split")) {
    const std::string name = p.at("split").get<std::string>();
    const SlopeComparison sc = exact_sequence_metric(r.bundle(name, g), geo);
    r.check("metric_split", "equality case",
            std::abs(sc.mu_s - sc.mu_e) + std::abs(sc.mu_q - sc.mu_e) +
                (sc.equality_case == EqualityCase::Split ? 0.0 : 1.0),
            1e-10, to_string(sc.equality_case));
  }
  if (p.contains("extension")) {
    const std::string name = p.at("extension").get<std::string>();
    const BundleConfig& bc = r.cfg().bundles.at(name);
    const BundleSpec ext = r.bundle(name, g);
    bool flagged = false;
    try {
      (void)exact_sequence_metric(ext, geo);
    } catch (const Error& e) {
      flagged = e.kind() == ErrorKind::AmbientNotHE;
    }
    r.verdict("metric_flags_non_he", "equality needs the HE hypothesis", flagged,
              flagged ? "AmbientNotHE" : "not flagged");

    // Curvature closed form and subquotients.
    const CurvatureField curv = chern_curvature(ext, g);
    const MatrixFormField i_theta = curv.i_theta();
    const MatrixPQForm bs0 = ext.beta_star->at(0);
    PQForm cls(n, 1, 1);
    if (!bc.sub.front().class_diagonal.empty())
      for (int j = 0; j < n; ++j) cls += bc.sub.front().class_diagonal[j] * i_dz_dzbar(n, j, j);
    const MatrixPQForm expected = predicted_extension_curvature(bs0, cls);
    double dist = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dist = std::max(dist, matrix_form_distance(i_theta.at(i), expected));
    r.check("extension_curvature_closed_form", "curvature of an extension", dist, 1e-10);

    const Subquotients sq = subquotient_curvatures(curv.theta, second_fundamental_form(ext));
    double sub_dist = 0.0;
    for (const MatrixFormField* m : {&sq.sub, &sq.quotient}) {
      MatrixFormField im = *m;
      im *= kI;
      for (std::size_t i = 0; i < g.size(); i += 7) {
        const MatrixPQForm v = im.at(i);
        for (int a = 0; a < v.rows(); ++a)
          for (int b = 0; b < v.cols(); ++b)
            sub_dist = std::max(sub_dist, (v(a, b) - (a == b ? cls : PQForm(n, 1, 1))).max_abs());
      }
    }
    r.check("subquotient_curvatures", "curvature of an extension", sub_dist, 1e-10);

    const double deg_e = degree(curv, geo).degree;
    const double deg_s = degree(CurvatureField{sq.sub, identity_matrix_field(g, sq.sub.rows())}, geo).degree;
    const double deg_q =
        degree(CurvatureField{sq.quotient, identity_matrix_field(g, sq.quotient.rows())}, geo).degree;
    r.check("degree_additivity", "degree additivity in exact sequences", std::abs(deg_e - deg_s - deg_q),
            1e-10 * std::max(1.0, std::abs(deg_e)));
  }
}

void classical_reduction(Runner& r) {
  const RunConfig& cfg = r.cfg();
  const TorusGrid g = r.grid();
  const int n = g.n;
  const GeometryContext geo = make_geometry(make_omega(cfg, g), n, TestFormSpec{}, make_geometry_tolerances(cfg));
  const POperatorContext ctx = POperatorContext::make(geo, r.solver());
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;

  double worst = 0.0;
  for (int k = 0; k < r.p_int("samples", 5); ++k) {
    const ScalarField phi = random_real(g, 2, 8, 1.0, r.seed("phi", k));
    const ScalarField p_phi = apply_P(ctx, phi);
    const FormField ddbar = spectral_derivative(phi, Derivative::i_ddbar);
    double scale = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const cplx classical = -fact * lambda_contract(ddbar.at(i), geo.omega.at(i));
      worst = std::max(worst, std::abs(p_phi[i] - classical));
      scale = std::max(scale, std::abs(classical));
    }
  }
  r.check("P_equals_trace_laplacian", "classical reduction", worst, 1e-10);

  int disagreements = 0;
  double worst_density = 0.0;
  std::string detail;
  for (const auto& name : r.p_names("bundles")) {
    const CurvatureField curv = chern_curvature(r.bundle(name, g), g);
    const EinsteinAnalysis ea = einstein_analysis(curv, geo);
    const int rank = curv.rank();
    const MatrixFormField it = curv.i_theta();
    // Classical test: Λ_ω(iΘ) = γ Id with γ constant, in an h-unitary frame.
    double dev = 0.0, lo = INFINITY, hi = -INFINITY, scale = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Eigen::MatrixXcd K(rank, rank);
      for (int a = 0; a < rank; ++a)
        for (int b = 0; b < rank; ++b) {
          K(a, b) = lambda_contract(it(a, b).at(i), geo.omega.at(i));
          worst_density = std::max(worst_density, std::abs(ea.matrix_field[a * rank + b][i] - fact * K(a, b)));
        }
      const Eigen::MatrixXcd H = scalar_matrix_at(curv.metric, i);
      const Eigen::MatrixXcd LH = Eigen::LLT<Eigen::MatrixXcd>(H).matrixL().adjoint();
      const Eigen::MatrixXcd Ku = LH * K * LH.inverse();
      const cplx gamma = Ku.trace() / static_cast<double>(rank);
      dev = std::max(dev, (Ku - gamma * Eigen::MatrixXcd::Identity(rank, rank)).norm());
      lo = std::min(lo, gamma.real());
      hi = std::max(hi, gamma.real());
      scale = std::max(scale, fact * Ku.norm());
    }
    const bool classical_he = dev * fact <= 1e-9 * scale && (hi - lo) * fact <= 1e-9 * scale;
    const bool he = ea.einstein_factor.has_value();
    if (classical_he != he) ++disagreements;
    detail += name + (he ? ":HE " : ":notHE ");
  }
  r.check("density_equals_trace", "classical reduction", worst_density, 1e-10);
  r.check("he_matches_classical", "classical reduction", disagreements, 0.0, detail);
}

void kl_demo_scenario(Runner& r) {
  for (const auto& d : kl_demo(r.ctx()))
    r.verdict(d.name, "semi-stability of HE bundles", d.passed, "expected " + d.expected + "; observed " + d.observed);
}

void pointwise_lemma_suite(Runner& r) {
  const auto& geo = r.ctx().geometry;
  const auto& closed = r.closed_ctx().geometry;
  const int n = geo.n(), m = r.cfg().m;
  const int draws = r.p_int("draws", 1000);
  std::mt19937_64 rng(r.seed("draws"));
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> point(0, geo.grid.size() - 1);
  auto gauss = [&] { return cplx(normal(rng), normal(rng)); };
  auto one_form = [&] {
    PQForm a(n, 1, 0);
    for (int j = 0; j < n; ++j) a[j] = gauss();
    return a;
  };
  auto random_metric = [&](int rank) {
    Eigen::MatrixXcd A(rank, rank);
    for (int a = 0; a < rank; ++a)
      for (int b = 0; b < rank; ++b) A(a, b) = gauss();
    return FibreMetric(A * A.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(rank, rank));
  };

  // η-positivity on the configured Ω; equality detection on the strictly positive closed Ω.
  double min_density = INFINITY;
  int eta_misclassified = 0;
  for (int k = 0; k < draws; ++k) {
    const int rank = 1 + k % 3;
    VectorOneForm eta;
    for (int a = 0; a < rank; ++a) eta.push_back(one_form());
    const FibreMetric h = random_metric(rank);
    const std::size_t i = point(rng);
    min_density = std::min(min_density, positivity_density(eta, h, geo.omega.at(i), geo.omega_test.at(i), m));

    const bool zero = k % 2 == 0;
    if (zero)
      for (auto& e : eta) e *= 0.0;
    const double d = positivity_density(eta, h, closed.omega.at(i), closed.omega_test.at(i), m);
    if ((std::abs(d) <= 1e-13) != zero) ++eta_misclassified;
  }
  r.check("eta_positivity", "positivity of the bracket density", std::max(0.0, -min_density), 1e-12,
          "min density " + fmt(min_density));
  r.check("eta_equality_iff_zero", "positivity of the bracket density", eta_misclassified, 0.0);

  double sign_violation = 0.0, trace_sum = 0.0;
  int beta_misclassified = 0;
  for (int k = 0; k < draws; ++k) {
    const int s = 1 + k % 2, q = 1 + (k / 2) % 2;
    const bool zero = k % 3 == 0;
    MatrixPQForm beta(q, s, n, 1, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < s; ++b) beta(a, b) = zero ? PQForm(n, 1, 0) : one_form();
    const std::size_t i = point(rng);
    const BetaTraces bt = beta_trace_densities(beta, geo.omega.at(i), geo.omega_test.at(i), m);
    sign_violation = std::max({sign_violation, -bt.trace_q, bt.trace_s});
    trace_sum = std::max(trace_sum, std::abs(bt.trace_q + bt.trace_s) / std::max(1.0, bt.trace_q));
    const BetaTraces bc = beta_trace_densities(beta, closed.omega.at(i), closed.omega_test.at(i), m);
    const bool detected_zero = bc.trace_q <= 1e-13 && -bc.trace_s <= 1e-13;
    if (detected_zero != zero) ++beta_misclassified;
  }
  r.check("beta_trace_signs", "signs of the second fundamental form traces", std::max(0.0, sign_violation), 1e-12);
  r.check("beta_trace_sum", "signs of the second fundamental form traces", trace_sum, 1e-12);
  r.check("beta_equality_iff_zero", "signs of the second fundamental form traces", beta_misclassified, 0.0);

  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    Eigen::MatrixXcd A(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) A(a, b) = gauss();
    const Eigen::MatrixXcd gmat = A * A.adjoint() + 0.5 * Eigen::MatrixXcd::Identity(n, n);
    const PQForm omega = kahler_form(gmat);
    const PQForm eta = one_form();
    const cplx lambda = lambda_contract(kI * wedge(eta, conjugate(eta)), omega);
    Eigen::VectorXcd e(n);
    for (int j = 0; j < n; ++j) e[j] = eta[j];
    const cplx norm2 = e.dot(gmat.inverse() * e);
    worst = std::max(worst, std::abs(lambda - norm2) / std::max(1.0, std::abs(norm2)));
  }
  r.check("lambda_formula", "trace of iη∧η̄", worst, 1e-12);
}

struct Tracked {
  std::string name;
  std::function<double(const POperatorContext&)> residual;
};

// ∂_j∂̄_k of a trigonometric series, evaluated analytically.
ScalarField analytic_ddbar(const TrigSeries& s, const TorusGrid& g, int j, int k) {
  ScalarField out(g);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (const auto& t : s.terms) {
    const cplx factor = -pi2 * cplx(t.wave[2 * j], -t.wave[2 * j + 1]) * cplx(t.wave[2 * k], t.wave[2 * k + 1]);
    TrigSeries single;
    single.terms.push_back(t);
    out += factor * single.sample(g);
  }
  return out;
}

void convergence_sweep(Runner& r) {
  const json& p = r.scenario().params;
  std::vector<int> grids = {4, 8, 16};
  if (p.contains("grids")) grids = p.at("grids").get<std::vector<int>>();
  const int band = r.p_int("bandwidth", 2);
  const int terms = r.p_int("terms", 8);
  const int n = r.cfg().n;
  const TrigSeries phi_s = random_trig_series(n, band, terms, 1.0, r.seed("phi"));
  const TrigSeries psi_s = random_trig_series(n, band, terms, 1.0, r.seed("psi"));
  const TrigSeries f_s = random_trig_series(n, band, terms, 0.5, r.seed("f"));

  const std::vector<Tracked> tracked = {
      {"apply_P",
       [&](const POperatorContext& ctx) {
         const TorusGrid& g = ctx.grid();
         const ScalarField phi = real_part(phi_s.sample(g));
         ScalarField exact(g);
         for (int j = 0; j < n; ++j)
           for (int k = 0; k < n; ++k) exact += -kI * (ctx.kernel[j * n + k] * analytic_ddbar(phi_s, g, j, k));
         return (apply_P(ctx, phi) - exact).sup_norm() / std::max(1.0, exact.sup_norm());
       }},
      {"adjoint_defect",
       [&](const POperatorContext& ctx) {
         const TorusGrid& g = ctx.grid();
         return adjoint_defect(ctx, real_part(phi_s.sample(g)), real_part(psi_s.sample(g))).residual;
       }},
      {"degree_gauge",
       [&](const POperatorContext& ctx) {
         const auto& geo = ctx.geometry;
         PQForm c(n, 1, 1);
         for (int j = 0; j < n; ++j) c += double(j + 1) * i_dz_dzbar(n, j, j);
         const GaugeCheck gc =
             gauge_invariance_check(BundleSpec::line({c, std::nullopt}), real_part(f_s.sample(geo.grid)), geo);
         return gc.residual / gc.scale;
       }},
  };

  std::vector<Sweep> sweeps(tracked.size());
  for (std::size_t t = 0; t < tracked.size(); ++t) sweeps[t].tracked = tracked[t].name;
  for (int N : grids) {
    const POperatorContext ctx = r.ctx_at(N);
    for (std::size_t t = 0; t < tracked.size(); ++t) {
      const auto start = Clock::now();
      const double res = tracked[t].residual(ctx);
      const double ms = r.cfg().record_timings
                            ? std::chrono::duration<double, std::milli>(Clock::now() - start).count()
                            : 0.0;
      sweeps[t].rows.push_back({"convergence_sweep", N, res, ms});
    }
  }

  const double floor = 1e-12;
  for (const auto& sw : sweeps) {
    double rise = 0.0, roundoff = 0.0;
    std::string detail;
    for (std::size_t i = 0; i < sw.rows.size(); ++i) {
      detail += "N=" + std::to_string(sw.rows[i].points_per_axis) + ":" + fmt(sw.rows[i].residual) + " ";
      if (i > 0) rise = std::max(rise, sw.rows[i].residual - std::max(sw.rows[i - 1].residual, floor));
      if (sw.rows[i].points_per_axis > 2 * band) roundoff = std::max(roundoff, sw.rows[i].residual);
      if (!std::isfinite(sw.rows[i].residual)) rise = INFINITY;
    }
    r.check(sw.tracked + "_monotone", "spectral convergence", rise, 0.0, detail);
    r.check(sw.tracked + "_roundoff", "spectral convergence", roundoff, 1e-11, detail);
    r.report().sweeps.push_back(sw);
  }
}

const std::map<std::string, std::function<void(Runner&)>>& registry() {
  static const std::map<std::string, std::function<void(Runner&)>> table = {
      {"adjoint_defect_suite", adjoint_defect_suite},
      {"kernel_and_decompose", kernel_and_decompose},
      {"he_rescale_line", he_rescale_line},
      {"slope_link", slope_link},
      {"vanishing_identity", vanishing_identity},
      {"bundle_factor_suite", bundle_factor_suite},
      {"degree_gauge_invariance", degree_gauge_invariance},
      {"exact_sequence_suite", exact_sequence_suite},
      {"classical_reduction", classical_reduction},
      {"kl_demo", kl_demo_scenario},
      {"pointwise_lemma_suite", pointwise_lemma_suite},
      {"convergence_sweep", convergence_sweep},
  };
  return table;
}

}  // namespace

VerificationReport run_scenarios(const RunConfig& cfg, const std::vector<std::string>& only) {
  validate_config(cfg);
  const auto& names = registered_scenarios();
  for (const auto& o : only)
    if (std::find(names.begin(), names.end(), o) == names.end())
      throw Error(ErrorKind::ConfigError, "--scenario: unknown scenario '" + o + "'");

  VerificationReport report;
  report.config = to_json(cfg);
  Runner runner(cfg, report);
  for (const auto& s : cfg.scenarios) {
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    runner.begin(s);
    try {
      registry().at(s.name)(runner);
    } catch (const std::exception& e) {
      runner.check("error", "scenario aborted", INFINITY, 0.0, e.what());
    }
  }
  report.order_failures_first();
  return report;
}

}  // namespace helab
