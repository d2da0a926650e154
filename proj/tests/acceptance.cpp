// Acceptance run: one line per criterion, nonzero exit if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "exseq/calculus.hpp"
#include "exseq/poincare.hpp"
#include "exseq/projectors.hpp"
#include "exseq/spectra.hpp"
#include "exseq/studies.hpp"
#include "exseq/verify.hpp"

using namespace exseq;

namespace {

// pinned acceptance tolerances
namespace acc {
constexpr int dims_p_max = 8;
constexpr double composition = 1e-12;
constexpr int exact_p_max = 8;
constexpr int projection_p_max = 8;
constexpr int projection_samples = 200;
constexpr double projection = 1e-9;
constexpr double commuting_poly = 1e-9;
constexpr double commuting_entire = 1e-7;
constexpr double poincare = 1e-10;
constexpr double helmholtz = 1e-9;
constexpr double friedrichs_window = 2.0;
constexpr double ratio_bound = 10.0;
constexpr double curl_slope = -0.5;
constexpr double duality_slope = -0.5;
constexpr double p_stability = 0.05;
constexpr int duality_offset = 6;
constexpr double endpoint = 1e-12;
constexpr double ratio_1d = 5.0;
constexpr int p_max_1d = 16;
}  // namespace acc

int failures = 0;

void report(int n, bool pass, const std::string& what, const std::string& measured, double secs) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s  [%s]  (%.1fs)\n", n, pass ? "PASS" : "FAIL", what.c_str(), measured.c_str(), secs);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void criterion1() {
  Timer t;
  bool ok = true;
  int rows = 0;
  for (int p = 0; p <= acc::dims_p_max; ++p) {
    const int dimW = (p + 4) * (p + 3) * (p + 2) / 6;
    const int grad_count = p * (p - 1) * (p - 2) / 6 + 4 * p * (p - 1) / 2 + 6 * p + 4;
    const int div_count = (p + 2) * (p + 1) * p / 2 + 4 * (p + 1) * (p + 2) / 2;
    auto sum_unknowns = [&](ProjectorId id) {
      int s = 0;
      for (const auto& st : ProjectorPlan(id, p).stages()) s += st.unknowns;
      return s;
    };
    auto tet = Cell::reference(3);
    ok = ok && build_space(tet, SpaceKind::W, p)->dim() == dimW && grad_count == dimW &&
         sum_unknowns(ProjectorId::grad3d) == grad_count;
    ok = ok && build_space(tet, SpaceKind::V, p)->dim() == div_count && sum_unknowns(ProjectorId::div3d) == div_count;
    rows += 2;
  }
  for (const auto& r : dims_table(0, acc::dims_p_max)) {
    ok = ok && r.match;
    ++rows;
  }
  report(1, ok, "dimension and condition counts, p = 0..8", std::to_string(rows) + " integer identities", t.secs());
}

void criterion2() {
  Timer t;
  double worst = 0.0;
  int mismatches = 0, counts = 0;
  for (int d : {3, 2})
    for (int p = 0; p <= acc::exact_p_max; ++p)
      for (auto bc : {BoundaryCondition::none, BoundaryCondition::zero_trace})
        for (const auto& c : check_exact_sequence(Cell::reference(d), p, bc).checks) {
          if (c.count) {
            ++counts;
            if (!c.pass) ++mismatches;
          } else if (c.name == "curl_grad" || c.name == "div_curl") {
            worst = std::max(worst, c.value);
          } else if (!c.pass) {
            ++mismatches;
          }
        }
  const bool ok = worst <= acc::composition && mismatches == 0;
  report(2, ok, "exact sequences, p <= 8",
         "max composition " + sci(worst) + " <= " + sci(acc::composition) + ", " + std::to_string(counts) +
             " rank counts, " + std::to_string(mismatches) + " mismatches",
         t.secs());
}

void criterion3() {
  Timer t;
  VerifyOptions opt;
  opt.p_min = 0;
  opt.p_max = acc::projection_p_max;
  opt.projection_samples = acc::projection_samples;
  opt.sections = {"projection"};
  double worst = 0.0;
  int n = 0;
  bool ok = true;
  for (const auto& r : run_verification(opt)) {
    if (r.name.size() > 11 && r.name.substr(r.name.size() - 11) == "_idempotent") {
      worst = std::max(worst, r.value);
      ++n;
    }
    ok = ok && r.pass;
  }
  ok = ok && worst <= acc::projection && n > 0;
  report(3, ok, "projection property, all operators, 200 samples, p <= 8",
         "max relative error " + sci(worst) + " <= " + sci(acc::projection) + " over " + std::to_string(n) + " (operator, p)",
         t.secs());
}

void criterion4() {
  Timer t;
  double wp = 0.0, we = 0.0;
  for (int p = 0; p <= 8; ++p) {
    for (const auto& r : check_commuting(p, "poly", 1)) wp = std::max(wp, r.residual);
    for (const auto& r : check_commuting(p, "entire", 1)) we = std::max(we, r.residual);
  }
  const bool ok = wp <= acc::commuting_poly && we <= acc::commuting_entire;
  report(4, ok, "commuting diagrams, five identities, p <= 8",
         "poly " + sci(wp) + " <= " + sci(acc::commuting_poly) + ", entire " + sci(we) + " <= " + sci(acc::commuting_entire),
         t.secs());
}

void criterion5_6() {
  Timer t;
  double wpc = 0.0, wh = 0.0;
  for (int d : {3, 2})
    for (int p = 0; p <= 8; ++p) {
      for (const auto& c : poincare_identity_checks(d, p, 1)) wpc = std::max(wpc, c.value);
      for (const auto& c : helmholtz_checks(d, p, 1)) wh = std::max(wh, c.value);
    }
  const double secs = t.secs();
  report(5, wpc <= acc::poincare, "Poincare identities and space preservation, p <= 8",
         "max residual " + sci(wpc) + " <= " + sci(acc::poincare), secs);
  report(6, wh <= acc::helmholtz, "Helmholtz reconstructions, p <= 8",
         "max relative residual " + sci(wh) + " <= " + sci(acc::helmholtz), 0.0);
}

void criterion7() {
  Timer t;
  bool ok = true;
  double worst = 0.0;
  std::string worst_case;
  for (auto fc : all_friedrichs_cases()) {
    double lo = INFINITY, hi = 0.0;
    for (int p = 0; p <= 8; ++p) {
      auto r = friedrichs_constant(fc, p);
      if (r.empty) continue;
      ok = ok && r.constant > 0.0 && std::isfinite(r.constant);
      lo = std::min(lo, r.constant);
      hi = std::max(hi, r.constant);
    }
    if (hi / lo > worst) {
      worst = hi / lo;
      worst_case = to_string(fc);
    }
  }
  ok = ok && worst <= acc::friedrichs_window;
  report(7, ok, "discrete Friedrichs constants, six cases, p <= 8",
         "worst max/min " + sci(worst) + " (" + worst_case + ") <= " + sci(acc::friedrichs_window), t.secs());
}

void criterion8() {
  Timer t;
  StudyConfig cfg;
  cfg.operators = all_projectors();
  cfg.p_min = 2;
  cfg.p_max = 10;
  cfg.suite = "entire";
  ConvergenceResult res = run_convergence(cfg);
  double worst_ratio = 0.0;
  std::string worst_op;
  bool flags_ok = true;
  for (const auto& r : res.records) {
    if (!r.flag.empty() && r.flag != "exact") flags_ok = false;
    if (!std::isfinite(r.ratio)) flags_ok = false;
    if (r.ratio > worst_ratio) {
      worst_ratio = r.ratio;
      worst_op = r.op + "/" + r.field + "/p=" + std::to_string(r.p);
    }
  }
  double curl_slope = -INFINITY;
  for (const auto& s : res.slopes)
    if (s.op == "curl3d") curl_slope = std::max(curl_slope, s.ratio_slope);

  auto dual = run_duality(ProjectorId::grad3d, "phi3_entire", cfg.p_min, cfg.p_max, acc::duality_offset);
  std::vector<int> ps;
  std::vector<double> gaps;
  double stab = 0.0;
  for (const auto& d : dual) {
    ps.push_back(d.p);
    gaps.push_back(d.gap);
    stab = std::max(stab, d.p_stability);
  }
  const double gap_slope = upper_half_slope(ps, gaps);
  const bool ok = flags_ok && worst_ratio <= acc::ratio_bound && curl_slope <= acc::curl_slope &&
                  gap_slope <= acc::duality_slope && stab <= acc::p_stability;
  report(8, ok, "rate ratios, entire suite, s = 0, p = 2..10",
         "max ratio " + sci(worst_ratio) + " (" + worst_op + ") <= " + sci(acc::ratio_bound) + "; curl3d ratio slope " +
             sci(curl_slope) + " <= " + sci(acc::curl_slope) + "; grad3d duality gap slope " + sci(gap_slope) +
             " <= " + sci(acc::duality_slope) + "; P-stability " + sci(stab) + " <= " + sci(acc::p_stability),
         t.secs());
}

void criterion9() {
  Timer t;
  double worst_end = 0.0;
  Mat ends(2, 1);
  ends << -1.0, 1.0;
  for (const auto& f : study_fields(ProjectorId::grad1d, "mixed", 1.5)) {
    for (int p = 1; p <= acc::p_max_1d; ++p) {
      AnalyticField u = study_field(ProjectorId::grad1d, f, p);
      Poly v = reference_plan(ProjectorId::grad1d, p)->apply(u);
      worst_end = std::max(worst_end, (v.eval(ends) - u.values(ends)).cwiseAbs().maxCoeff());
    }
  }
  StudyConfig cfg;
  cfg.operators = {ProjectorId::grad1d};
  cfg.p_min = 1;
  cfg.p_max = acc::p_max_1d;
  cfg.suite = "mixed";
  double worst_ratio = 0.0;
  bool flags_ok = true;
  for (const auto& r : run_convergence(cfg).records) {
    if (!r.flag.empty() && r.flag != "exact") flags_ok = false;
    worst_ratio = std::max(worst_ratio, r.ratio);
  }
  const bool ok = flags_ok && worst_end <= acc::endpoint && worst_ratio <= acc::ratio_1d;
  report(9, ok, "1D interpolant, mixed suite, p <= 16",
         "endpoint error " + sci(worst_end) + " <= " + sci(acc::endpoint) + "; max ratio " + sci(worst_ratio) +
             " <= " + sci(acc::ratio_1d),
         t.secs());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10() {
  Timer t;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "exseq_acceptance";
  fs::create_directories(dir);
  const std::string cli = EXSEQ_CLI_PATH;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"verify", "verify --p-max 6 --seed 3"},
      {"convergence_csv", "convergence --operator curl3d,grad2d,grad1d --p-min 2 --p-max 6 --s 0,0.5 --seed 3"},
      {"convergence_json", "convergence --operator div3d --suite all --p-min 2 --p-max 5 --format json --seed 3"},
  };
  bool ok = true;
  std::size_t bytes = 0;
  for (const auto& [name, args] : runs) {
    std::string out[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path f = dir / (name + "_" + std::to_string(k) + ".out");
      fs::remove(f);
      const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + f.string() + "\" 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) ok = false;
      out[k] = slurp(f);
    }
    ok = ok && !out[0].empty() && out[0] == out[1];
    bytes += out[0].size();
  }
  fs::remove_all(dir);
  report(10, ok, "determinism of verify and convergence output",
         std::to_string(runs.size()) + " command pairs, " + std::to_string(bytes) + " bytes compared", t.secs());
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5_6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
