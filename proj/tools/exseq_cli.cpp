#include <cmath>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exseq/projectors.hpp"
#include "exseq/report.hpp"
#include "exseq/spectra.hpp"
#include "exseq/studies.hpp"
#include "exseq/verify.hpp"

using namespace exseq;

namespace {

// usage problems (bad values, invalid configs) exit with 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int p_min = 0;
  int p_max = 6;
  unsigned seed = 1;
  std::string out;
  std::string format = "csv";
  std::string config;
  CLI::Option* p_min_opt = nullptr;
  CLI::Option* p_max_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* format_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c) {
  c.p_min_opt = sub->add_option("--p-min", c.p_min, "smallest polynomial degree p");
  c.p_max_opt = sub->add_option("--p-max", c.p_max, "largest polynomial degree p");
  c.seed_opt = sub->add_option("--seed", c.seed, "random seed");
  c.out_opt = sub->add_option("--out", c.out, "output file (default stdout)");
  c.format_opt = sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--config", c.config, "key = value file mirroring the flags");
}

// Values from --config fill in whatever was not given on the command line.
StudyConfig merged_config(Common& c) {
  StudyConfig cfg;
  cfg.p_min = c.p_min;
  cfg.p_max = c.p_max;
  cfg.seed = c.seed;
  cfg.out = c.out;
  cfg.format = c.format;
  if (c.config.empty()) return cfg;
  StudyConfig file = cfg;
  try {
    apply_config_file(file, c.config);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (!c.p_min_opt->count()) c.p_min = file.p_min;
  if (!c.p_max_opt->count()) c.p_max = file.p_max;
  if (!c.seed_opt->count()) c.seed = file.seed;
  if (!c.out_opt->count()) c.out = file.out;
  if (!c.format_opt->count()) c.format = file.format;
  file.p_min = c.p_min;
  file.p_max = c.p_max;
  file.seed = c.seed;
  file.out = c.out;
  file.format = c.format;
  return file;
}

int run_verify(Common& c, int samples, const std::vector<std::string>& sections) {
  merged_config(c);
  VerifyOptions opt;
  opt.p_min = c.p_min;
  opt.p_max = c.p_max;
  opt.seed = c.seed;
  opt.projection_samples = samples;
  opt.sections = sections;
  std::vector<VerifyRow> rows;
  try {
    rows = run_verification(opt);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  write_text(render(verify_table(rows), c.format), c.out);
  int failed = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    if (!r.pass) ++failed;
    if (r.kind == "residual" && std::isfinite(r.value)) worst = std::max(worst, r.value);
  }
  std::cerr << "verify: " << rows.size() << " checks, " << failed << " failed, max residual " << format_double(worst)
            << "\n";
  return failed == 0 ? 0 : 1;
}

int run_dims(Common& c) {
  merged_config(c);
  auto rows = dims_table(c.p_min, c.p_max);
  write_text(render(dims_table_output(rows), c.format), c.out);
  for (const auto& r : rows)
    if (!r.match) return 1;
  return 0;
}

int run_convergence_cmd(Common& c, const std::string& ops, const std::string& suite, const std::string& s_list,
                        double alpha, int dual_offset, bool timing, bool duality, const std::string& field,
                        CLI::App* sub) {
  StudyConfig cfg = merged_config(c);
  try {
    if (sub->get_option("--operator")->count()) cfg.operators = parse_operators(ops);
    if (sub->get_option("--suite")->count()) cfg.suite = suite;
    if (sub->get_option("--s")->count()) cfg.s_values = parse_s_values(s_list);
    if (sub->get_option("--alpha")->count()) cfg.alpha = alpha;
    if (sub->get_option("--dual-offset")->count()) cfg.dual_offset = dual_offset;
    if (sub->get_option("--timing")->count()) cfg.timing = timing;
    validate(cfg);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  if (duality) {
    std::vector<DualityRecord> all;
    for (auto id : cfg.operators) {
      std::string f = field.empty() ? study_fields(id, "entire", cfg.alpha).front() : field;
      auto recs = run_duality(id, f, cfg.p_min, cfg.p_max, cfg.dual_offset);
      all.insert(all.end(), recs.begin(), recs.end());
    }
    write_text(render(duality_table(all), cfg.format), cfg.out);
    return 0;
  }
  ConvergenceResult res = run_convergence(cfg);
  if (cfg.format == "json")
    write_text(to_json({{"records", records_table(res.records, cfg.timing)}, {"slopes", slopes_table(res.slopes)}}), cfg.out);
  else
    write_text(to_csv(convergence_table(res, cfg.timing)), cfg.out);
  for (const auto& r : res.records)
    if (!r.flag.empty() && r.flag != "exact") return 1;
  return 0;
}

int run_friedrichs(Common& c, const std::string& cases) {
  merged_config(c);
  std::vector<FriedrichsCase> list;
  try {
    if (cases == "all") {
      list = all_friedrichs_cases();
    } else {
      std::stringstream ss(cases);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(friedrichs_case_from_string(item));
    }
    if (c.p_min < 0 || c.p_max < c.p_min || c.p_max > 10) throw std::runtime_error("friedrichs: p range must lie in 0..10");
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  std::vector<FriedrichsResult> rows;
  bool ok = true;
  for (auto fc : list) {
    double lo = INFINITY, hi = 0.0;
    for (int p = c.p_min; p <= c.p_max; ++p) {
      auto r = friedrichs_constant(fc, p);
      rows.push_back(r);
      if (r.empty) continue;
      ok = ok && r.constant > 0.0 && std::isfinite(r.constant);
      lo = std::min(lo, r.constant);
      hi = std::max(hi, r.constant);
    }
    if (hi > 0.0 && hi / lo > tol::friedrichs_window) ok = false;
  }
  write_text(render(friedrichs_table(rows), c.format), c.out);
  return ok ? 0 : 1;
}

int run_project(Common& c, const std::string& op, int p, const std::string& field, int samples, bool basis) {
  merged_config(c);
  ProjectorId id;
  AnalyticField u;
  try {
    id = projector_from_string(op);
    if (p < 0 || p > study_p_cap) throw std::runtime_error("project: --p must lie in 0.." + std::to_string(study_p_cap));
    if (!basis) u = study_field(id, field.empty() ? study_fields(id, "entire", 1.5).front() : field, p);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  auto plan = reference_plan(id, p);
  if (basis) {
    write_text(basis_json(*plan->target()), c.out);
    return 0;
  }
  Poly v = plan->apply(u);
  if (c.format == "json") {
    write_text(poly_json(v, to_string(id) + "(" + u.name() + "), p=" + std::to_string(p)), c.out);
    return 0;
  }
  // seeded sample points inside the cell
  const Cell& cell = *plan->cell();
  std::mt19937 rng(c.seed);
  std::gamma_distribution<double> g(1.0, 1.0);
  Mat bary(samples, cell.num_vertices());
  for (int i = 0; i < samples; ++i) {
    double sum = 0.0;
    for (int k = 0; k < cell.num_vertices(); ++k) sum += (bary(i, k) = g(rng));
    bary.row(i) /= sum;
  }
  Mat pts = bary * cell.vertices();
  write_text(to_csv(samples_table(pts, u.values(pts), v.eval(pts))), c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial de Rham complexes on simplices: projection-based interpolation toolkit", "exseq"};
  app.require_subcommand(1);

  Common verify_c, dims_c, conv_c, fr_c, proj_c;

  auto* verify = app.add_subcommand("verify", "dimension counts, exact sequences, projector and identity checks");
  add_common(verify, verify_c);
  int samples = 200;
  std::vector<std::string> sections;
  verify->add_option("--samples", samples, "random elements per projection check");
  verify->add_option("--section", sections, "restrict to sections")->check(CLI::IsMember(verify_sections()));

  auto* dims = app.add_subcommand("dims", "numerical dimensions against closed forms");
  add_common(dims, dims_c);
  dims_c.p_max = 8;

  auto* conv = app.add_subcommand("convergence", "p-convergence sweep of interpolation errors");
  add_common(conv, conv_c);
  conv_c.p_min = 2;
  conv_c.p_max = 8;
  std::string ops = "curl3d", suite = "entire", s_list = "0", field;
  double alpha = 1.5;
  int dual_offset = 6;
  bool timing = false, duality = false;
  conv->add_option("--operator", ops, "operators (comma list or all)");
  conv->add_option("--suite", suite, "entire, rpow, poly, all (1D: mixed)");
  conv->add_option("--s", s_list, "comma list of s values");
  conv->add_option("--alpha", alpha, "exponent of the r^alpha fields");
  conv->add_option("--dual-offset", dual_offset, "extra degree of the dual test space");
  conv->add_flag("--timing", timing, "add wall_time to records");
  conv->add_flag("--duality", duality, "L2 error of the grad interpolant by duality");
  conv->add_option("--field", field, "field for --duality");

  auto* fr = app.add_subcommand("friedrichs", "discrete Friedrichs constants");
  add_common(fr, fr_c);
  fr_c.p_max = 8;
  std::string cases = "all";
  fr->add_option("--case", cases, "case id or all");

  auto* proj = app.add_subcommand("project", "apply one interpolant and export it");
  add_common(proj, proj_c);
  std::string pop = "curl3d", pfield;
  int pp = 3, psamples = 20;
  bool basis = false;
  proj->add_option("--operator", pop, "operator id");
  proj->add_option("--p", pp, "polynomial degree p");
  proj->add_option("--field", pfield, "named field (default: the entire field)");
  proj->add_option("--samples", psamples, "sample points for csv output")->check(CLI::PositiveNumber);
  proj->add_flag("--basis", basis, "export the target basis as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*verify) return run_verify(verify_c, samples, sections);
    if (*dims) return run_dims(dims_c);
    if (*conv) return run_convergence_cmd(conv_c, ops, suite, s_list, alpha, dual_offset, timing, duality, field, conv);
    if (*fr) return run_friedrichs(fr_c, cases);
    if (*proj) return run_project(proj_c, pop, pp, pfield, psamples, basis);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
