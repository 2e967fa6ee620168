// Runs the default configuration (n=2, m=1, N=16) once and prints one
// PASS/FAIL line per acceptance criterion. A criterion passes when every
// check it lists is present and within tolerance.
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "helab/config.hpp"
#include "helab/scenarios.hpp"

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* bounds;
  std::vector<std::string> checks;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "adjoint identity", "perturbed <= 1e-8 |phi||psi|, closed <= 1e-10 |phi||psi|, 20 pairs",
       {"adjoint_defect_suite/defect_configured", "adjoint_defect_suite/defect_closed"}},
      {2, "kernel and decomposition", "P(const) <= 1e-13, reconstruction <= 1e-8, <<Pf,1>> <= 1e-10",
       {"kernel_and_decompose/kernel_constant", "kernel_and_decompose/decompose_residual",
        "kernel_and_decompose/decompose_constant", "kernel_and_decompose/range_orthogonal_to_constants"}},
      {3, "HE rescaling", "post residual <= 1e-8, c within 1e-9",
       {"he_rescale_line/line_weighted_post_residual", "he_rescale_line/line_weighted_factor",
        "he_rescale_line/line_12_post_residual", "he_rescale_line/line_12_factor"}},
      {4, "slope link", "|lambda Vol - mu| <= 1e-8 scale on 5 HE specs; lambda=3, mu=12, Vol=4",
       {"slope_link/line_12", "slope_link/line_01", "slope_link/line_weighted", "slope_link/line_12_weighted",
        "slope_link/sum_12_21", "slope_link/closed_form"}},
      {5, "degree arithmetic and gauge invariance", "deg = 4(a+b) to 1e-10; gauge <= 1e-8, 10 rescalings",
       {"degree_gauge_invariance/line_12_quadrature", "degree_gauge_invariance/line_12_degree",
        "degree_gauge_invariance/line_01_quadrature", "degree_gauge_invariance/line_01_degree",
        "degree_gauge_invariance/gauge_configured", "degree_gauge_invariance/gauge_closed"}},
      {6, "pointwise lemmas", "1000 draws each; density >= -1e-12; zero detection 1e-13; Lambda 1e-12",
       {"pointwise_lemma_suite/eta_positivity", "pointwise_lemma_suite/eta_equality_iff_zero",
        "pointwise_lemma_suite/beta_trace_signs", "pointwise_lemma_suite/beta_trace_sum",
        "pointwise_lemma_suite/beta_equality_iff_zero", "pointwise_lemma_suite/lambda_formula"}},
      {7, "exact sequence, synthetic", "densities (-1,0,1) to 1e-10; slack >= -1e-11; Split iff beta = 0",
       {"exact_sequence_suite/unit_beta_densities", "exact_sequence_suite/unit_beta_strict",
        "exact_sequence_suite/chain_slack", "exact_sequence_suite/split_iff_beta_zero",
        "exact_sequence_suite/densities_match_pointwise_traces", "exact_sequence_suite/metric_split",
        "exact_sequence_suite/metric_flags_non_he", "exact_sequence_suite/degree_additivity"}},
      {8, "extension curvature closed form", "diag(|b|^2, -|b|^2) to 1e-10; subquotients vanish",
       {"exact_sequence_suite/extension_curvature_closed_form", "exact_sequence_suite/subquotient_curvatures"}},
      {9, "vanishing identity", "residual <= 1e-8 over 10 weights; flat case identically 0",
       {"vanishing_identity/identity_random_weights", "vanishing_identity/inequality_random_weights",
        "vanishing_identity/identity_flat"}},
      {10, "classical reduction (m = n)", "P = -(n-1)! Lambda(i ddbar) to 1e-10; HE conditions agree",
       {"classical_reduction/P_equals_trace_laplacian", "classical_reduction/density_equals_trace",
        "classical_reduction/he_matches_classical"}},
      {11, "Kobayashi-Luebke demo", "equal pass / unequal destabilized / extension NotWeaklyHE",
       {"kl_demo/equal_factors", "kl_demo/unequal_factors", "kl_demo/nonsplit_extension"}},
      {12, "convergence sweep", "N in {4,8,16}: monotone, round-off once N > 2 bandwidth",
       {"convergence_sweep/apply_P_monotone", "convergence_sweep/apply_P_roundoff",
        "convergence_sweep/adjoint_defect_monotone", "convergence_sweep/adjoint_defect_roundoff",
        "convergence_sweep/degree_gauge_monotone", "convergence_sweep/degree_gauge_roundoff"}},
  };
  return list;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  helab::RunConfig cfg = helab::default_config();
  cfg.record_timings = true;
  const helab::VerificationReport report = helab::run_scenarios(cfg);

  std::map<std::string, const helab::CheckRecord*> by_name;
  for (const auto& c : report.checks) by_name[c.name] = &c;

  int failed = 0;
  for (const auto& cr : criteria()) {
    bool ok = true;
    double worst = 0.0;
    std::string why;
    for (const auto& name : cr.checks) {
      const auto it = by_name.find(name);
      if (it == by_name.end()) {
        ok = false;
        why += " missing:" + name;
        continue;
      }
      const helab::CheckRecord& c = *it->second;
      worst = std::max(worst, c.tolerance > 0 ? c.residual / c.tolerance : c.residual);
      if (!c.passed) {
        ok = false;
        why += " failed:" + name;
      }
    }
    if (cr.id == 12) {
      for (const auto& s : report.sweeps)
        if (s.rows.size() != 3) {
          ok = false;
          why += " sweep_rows:" + s.tracked;
        }
      if (report.sweeps.size() != 3) {
        ok = false;
        why += " sweeps_missing";
      }
    }
    std::printf("criterion %2d  %s  %-40s worst residual/tol %.2e  [%s]%s\n", cr.id, ok ? "PASS" : "FAIL",
                cr.title, worst, cr.bounds, why.c_str());
    if (!ok) ++failed;
  }

  // Errors raised inside scenarios show up as checks named "<scenario>/error".
  for (const auto& c : report.checks)
    if (!c.passed && c.name.find("/error") != std::string::npos)
      std::printf("scenario error: %s %s\n", c.name.c_str(), c.detail.c_str());

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu criteria, %d failed; %d checks passed, %d failed; %.1f s\n", criteria().size(), failed,
              report.passed(), report.failed(), secs);
  return failed == 0 && report.failed() == 0 ? 0 : 1;
}
