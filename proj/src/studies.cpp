#include "exseq/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "exseq/poincare.hpp"

namespace exseq {

namespace {

const double nan_v = std::numeric_limits<double>::quiet_NaN();
const double exact_tol = 1e-9;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int x = 0;
  try {
    x = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::runtime_error("bad integer for " + key + ": " + v);
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x)) throw std::runtime_error("bad number for " + key + ": " + v);
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::runtime_error("bad flag value for " + key + ": " + v);
}

bool is_grad(ProjectorId id) {
  return id == ProjectorId::grad3d || id == ProjectorId::grad2d || id == ProjectorId::grad1d;
}
bool is_curl(ProjectorId id) { return id == ProjectorId::curl3d || id == ProjectorId::curl2d; }
bool is_l2(ProjectorId id) { return id == ProjectorId::l2_3d || id == ProjectorId::l2_2d; }

// ambient degree of the target polynomials
int target_degree(ProjectorId id, int p) { return id == ProjectorId::grad1d || is_l2(id) ? p : p + 1; }

bool fractional(const NormSpec& n) {
  return n.kind == NormKind::Hs || n.kind == NormKind::Hs_curl || n.kind == NormKind::Hs_div;
}

// deterministic compact formatting for norm labels
std::string fmt_s(double s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

Poly derived(ProjectorId id, const Poly& v) {
  if (id == ProjectorId::curl3d) return curl_poly(v);
  if (id == ProjectorId::curl2d) return curl2d_poly(v);
  return div_poly(v);
}

AnalyticField derived(ProjectorId id, const AnalyticField& u) {
  if (id == ProjectorId::curl3d) return curl_of(u);
  if (id == ProjectorId::curl2d) return curl2d_of(u);
  return div_of(u);
}

}  // namespace

std::vector<ProjectorId> parse_operators(const std::string& list) {
  std::vector<ProjectorId> out;
  for (const auto& item : split_list(list)) {
    if (item == "all") {
      auto all = all_projectors();
      out.insert(out.end(), all.begin(), all.end());
    } else {
      out.push_back(projector_from_string(item));
    }
  }
  if (out.empty()) throw std::runtime_error("empty operator list");
  std::vector<ProjectorId> uniq;
  for (auto id : out)
    if (std::find(uniq.begin(), uniq.end(), id) == uniq.end()) uniq.push_back(id);
  return uniq;
}

std::vector<double> parse_s_values(const std::string& list) {
  std::vector<double> out;
  for (const auto& item : split_list(list)) out.push_back(parse_double("s", item));
  if (out.empty()) throw std::runtime_error("empty s list");
  return out;
}

double s_limit(ProjectorId id) {
  switch (projector_dim(id)) {
    case 3: return 1.0;
    case 2: return std::min(2.0, Cell::reference(2)->s_hat());
    default: return 2.0;
  }
}

double theory_rate(ProjectorId id, double s) {
  switch (id) {
    case ProjectorId::grad3d:
    case ProjectorId::curl3d: return 1.0 + s;
    case ProjectorId::div3d:
    case ProjectorId::grad2d:
    case ProjectorId::curl2d: return 0.5 + s;
    case ProjectorId::l2_3d:
    case ProjectorId::l2_2d:
    case ProjectorId::grad1d: return s;
  }
  return 0.0;
}

NormSpec best_norm(ProjectorId id) {
  switch (id) {
    case ProjectorId::grad3d: return {NormKind::H2};
    case ProjectorId::grad2d: return {NormKind::Hs, 1.5};
    case ProjectorId::curl3d: return {NormKind::H1curl};
    case ProjectorId::curl2d: return {NormKind::Hs_curl, 0.5};
    case ProjectorId::div3d: return {NormKind::Hs_div, 0.5};
    case ProjectorId::grad1d: return {NormKind::H1};
    default: return {NormKind::L2};
  }
}

std::string error_norm_name(ProjectorId id, double s) {
  if (is_grad(id)) {
    if (s == 0.0) return "H1";
    if (s == 1.0) return "L2";
    if (s < 1.0) return "H^" + fmt_s(1.0 - s);
    return "H~^-" + fmt_s(s - 1.0);
  }
  if (is_curl(id)) return s == 0.0 ? "Hcurl" : "H~^-" + fmt_s(s) + "(curl)";
  if (id == ProjectorId::div3d) return s == 0.0 ? "Hdiv" : "H~^-" + fmt_s(s) + "(div)";
  return s == 0.0 ? "L2" : "H~^-" + fmt_s(s);
}

double interpolation_error(ProjectorId id, const AnalyticField& u, const Poly& v, double s, int dual_offset) {
  const int P = v.degree + dual_offset;
  if (is_grad(id)) {
    if (s == 0.0) return error_norm(u, v, {NormKind::H1});
    if (s == 1.0) return error_norm(u, v, {NormKind::L2});
    if (s < 1.0) return error_norm(u, v, {NormKind::Hs, 1.0 - s, dual_offset});
    return residual_dual_norm(u, v, s - 1.0, P);
  }
  if (is_curl(id) || id == ProjectorId::div3d) {
    if (s == 0.0) return error_norm(u, v, {is_curl(id) ? NormKind::Hcurl : NormKind::Hdiv});
    const double a = residual_dual_norm(u, v, s, P);
    const double b = residual_dual_norm(derived(id, u), derived(id, v), s, P);
    return std::sqrt(a * a + b * b);
  }
  if (s == 0.0) return error_norm(u, v, {NormKind::L2});
  return residual_dual_norm(u, v, s, P);
}

std::vector<std::string> study_fields(ProjectorId id, const std::string& suite, double alpha) {
  const int d = projector_dim(id);
  const int m = projector_input_dim(id);
  std::vector<std::string> out;
  auto alpha_tag = [&]() {
    std::ostringstream os;
    os << alpha;
    return os.str();
  };
  const bool all = suite == "all" || (d == 1 && suite == "mixed");
  if (suite == "entire" || all) {
    for (const auto& n : field_names(d, m))
      if (n.find("entire") != std::string::npos) out.push_back(n);
  }
  if (suite == "rpow" || all) {
    if (d == 1) {
      out.push_back(alpha == 1.5 ? "f1_abs15" : "f1_abs@" + alpha_tag());
      out.push_back("f1_smoothabs");
    } else {
      std::string base = (d == 3 ? (m == 1 ? "phi3_rpow" : "u3_rpow") : (m == 1 ? "phi2_rpow" : "u2_rpow"));
      out.push_back(alpha == 1.5 ? base : base + "@" + alpha_tag());
    }
  }
  if (suite == "poly" || all) out.push_back("poly");
  if (out.empty()) throw std::runtime_error("unknown suite: " + suite);
  return out;
}

AnalyticField study_field(ProjectorId id, const std::string& field, int p) {
  if (field.rfind("poly", 0) == 0) {
    // poly<seed>: random member of the target space, reproduced exactly by the projector
    unsigned seed = 1;
    if (field.size() > 4) seed = static_cast<unsigned>(parse_int("field", field.substr(4)));
    auto plan = reference_plan(id, p);
    std::mt19937 rng(seed * 7919u + static_cast<unsigned>(p));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const SpacePtr& t = plan->target();
    Vec c(t->dim());
    for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
    Poly q{t->cell, t->value_dim, t->degree, t->basis * c};
    return poly_field(q, field);
  }
  AnalyticField u = named_field(field);
  if (u.dim() != projector_dim(id) || u.value_dim() != projector_input_dim(id))
    throw std::runtime_error("field " + field + " does not match operator " + to_string(id));
  return u;
}

void validate(const StudyConfig& cfg) {
  if (cfg.operators.empty()) throw std::runtime_error("no operators selected");
  if (cfg.p_min < 0) throw std::runtime_error("p-min must be >= 0");
  if (cfg.p_max < cfg.p_min) throw std::runtime_error("p-max must be >= p-min");
  if (cfg.s_values.empty()) throw std::runtime_error("no s values");
  if (cfg.dual_offset < 1) throw std::runtime_error("dual-offset must be >= 1");
  if (!(cfg.alpha > 0.0)) throw std::runtime_error("alpha must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw std::runtime_error("format must be csv or json");
  for (auto id : cfg.operators) {
    const std::string name = to_string(id);
    const int cap = projector_dim(id) == 1 ? study_p_cap_1d : study_p_cap;
    if (cfg.p_max > cap) throw std::runtime_error("p-max above cap " + std::to_string(cap) + " for " + name);
    if (id == ProjectorId::grad1d && cfg.p_min < 1) throw std::runtime_error("grad1d needs p-min >= 1");
    const double lim = s_limit(id);
    bool rich = fractional(best_norm(id));
    for (double s : cfg.s_values) {
      if (s < 0.0) throw std::runtime_error("s must be >= 0");
      if (projector_dim(id) == 2 ? s >= lim : s > lim)
        throw std::runtime_error("s = " + fmt_s(s) + " outside the admissible range for " + name);
      if (s > 0.0) rich = true;
    }
    if (rich && target_degree(id, cfg.p_max) + cfg.dual_offset > OrthoBasis::max_degree)
      throw std::runtime_error("p-max + dual-offset exceeds the basis degree cap for " + name);
    study_fields(id, cfg.suite, cfg.alpha);
  }
}

void apply_config_text(StudyConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "operator" || key == "operators") cfg.operators = parse_operators(val);
    else if (key == "p-min") cfg.p_min = parse_int(key, val);
    else if (key == "p-max") cfg.p_max = parse_int(key, val);
    else if (key == "suite") cfg.suite = val;
    else if (key == "s") cfg.s_values = parse_s_values(val);
    else if (key == "alpha") cfg.alpha = parse_double(key, val);
    else if (key == "dual-offset") cfg.dual_offset = parse_int(key, val);
    else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_int(key, val));
    else if (key == "timing") cfg.timing = parse_bool(key, val);
    else if (key == "out") cfg.out = val;
    else if (key == "format") cfg.format = val;
    else throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key " + key);
  }
}

void apply_config_file(StudyConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

int upper_half_start(int p_min, int p_max) { return p_min + (p_max - p_min + 1) / 2; }

double upper_half_slope(const std::vector<int>& p, const std::vector<double>& y) {
  if (p.empty()) return nan_v;
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  const int start = upper_half_start(*lo, *hi);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= start && p[i] > 0 && std::isfinite(y[i]) && y[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(p[i])));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return nan_v;
  return fit_slope(lx, ly);
}

ConvergenceResult run_convergence(const StudyConfig& cfg) {
  validate(cfg);
  using clock = std::chrono::steady_clock;
  ConvergenceResult res;
  for (auto id : cfg.operators) {
    const NormSpec bn{best_norm(id).kind, best_norm(id).s, cfg.dual_offset};
    for (auto fname : study_fields(id, cfg.suite, cfg.alpha)) {
      const bool is_poly = fname == "poly";
      if (is_poly) fname = "poly" + std::to_string(cfg.seed);
      for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
        const auto t0 = clock::now();
        std::string failure;
        Poly v;
        double best = nan_v;
        AnalyticField u;
        try {
          u = study_field(id, fname, p);
          auto plan = reference_plan(id, p);
          v = plan->apply(u);
          best = best_approx(*plan->target(), u, bn).error;
        } catch (const std::exception& e) {
          failure = e.what();
        }
        const double shared = std::chrono::duration<double>(clock::now() - t0).count();
        for (double s : cfg.s_values) {
          const auto t1 = clock::now();
          StudyRecord r;
          r.op = to_string(id);
          r.field = fname;
          r.norm = error_norm_name(id, s);
          r.best_norm = to_string(bn);
          r.s = s;
          r.p = p;
          r.theory_rate = theory_rate(id, s);
          r.best = best;
          r.error = nan_v;
          r.ratio = nan_v;
          if (failure.empty()) {
            try {
              r.error = interpolation_error(id, u, v, s, cfg.dual_offset);
            } catch (const std::exception& e) {
              r.flag = e.what();
            }
          } else {
            r.flag = failure;
          }
          if (r.flag.empty()) {
            if (!std::isfinite(r.error) || !std::isfinite(r.best)) {
              r.flag = "nonfinite";
            } else if (is_poly) {
              // target-space input: the interpolant must reproduce it
              Poly zero{v.cell, v.value_dim, v.degree, Vec::Zero(v.coeffs.size())};
              const double scale = interpolation_error(id, u, zero, s, cfg.dual_offset);
              r.flag = r.error <= exact_tol * scale ? "exact" : "not_reproduced";
            } else if (r.best > 0.0) {
              r.ratio = r.error / r.best;
            } else {
              r.flag = "exact";
            }
          }
          if (cfg.timing) r.wall_time = shared + std::chrono::duration<double>(clock::now() - t1).count();
          res.records.push_back(std::move(r));
        }
      }
    }
  }
  auto order = all_projectors();
  auto op_rank = [&order](const std::string& op) {
    return std::find(order.begin(), order.end(), projector_from_string(op)) - order.begin();
  };
  std::stable_sort(res.records.begin(), res.records.end(), [&](const StudyRecord& a, const StudyRecord& b) {
    const auto ra = op_rank(a.op), rb = op_rank(b.op);
    if (ra != rb) return ra < rb;
    if (a.field != b.field) return a.field < b.field;
    if (a.s != b.s) return a.s < b.s;
    return a.p < b.p;
  });
  // slopes per (operator, field, s); records are already grouped
  for (std::size_t i = 0; i < res.records.size();) {
    std::size_t j = i;
    std::vector<int> ps;
    std::vector<double> ratio, err;
    while (j < res.records.size() && res.records[j].op == res.records[i].op &&
           res.records[j].field == res.records[i].field && res.records[j].s == res.records[i].s) {
      const auto& r = res.records[j];
      ps.push_back(r.p);
      ratio.push_back(r.flag.empty() ? r.ratio : nan_v);
      err.push_back(r.flag.empty() || r.flag == "exact" ? r.error : nan_v);
      ++j;
    }
    SlopeRecord sr;
    sr.op = res.records[i].op;
    sr.field = res.records[i].field;
    sr.s = res.records[i].s;
    sr.p_from = upper_half_start(ps.front(), ps.back());
    sr.p_to = ps.back();
    sr.points = sr.p_to - sr.p_from + 1;
    sr.ratio_slope = upper_half_slope(ps, ratio);
    sr.error_slope = upper_half_slope(ps, err);
    sr.theory_slope = 0.0 - res.records[i].theory_rate;
    res.slopes.push_back(sr);
    i = j;
  }
  return res;
}

std::vector<DualityRecord> run_duality(ProjectorId id, const std::string& field, int p_min, int p_max,
                                       int dual_offset) {
  if (id != ProjectorId::grad3d && id != ProjectorId::grad2d)
    throw std::runtime_error("duality study is defined for grad3d and grad2d");
  if (p_min < 0 || p_max < p_min) throw std::runtime_error("bad p range");
  if (p_max + 1 + dual_offset + 2 > OrthoBasis::max_degree)
    throw std::runtime_error("p-max + dual-offset exceeds the basis degree cap");
  std::vector<DualityRecord> out;
  for (int p = p_min; p <= p_max; ++p) {
    AnalyticField u = study_field(id, field, p);
    Poly v = reference_plan(id, p)->apply(u);
    AnalyticField gu = grad_of(u);
    Poly gv = grad_poly(v);
    DualityRecord r;
    r.op = to_string(id);
    r.field = field;
    r.p = p;
    r.grad_l2 = error_norm(gu, gv, {NormKind::L2});
    r.dual = residual_dual_norm(gu, gv, 1.0, v.degree + dual_offset);
    r.dual_alt = residual_dual_norm(gu, gv, 1.0, v.degree + dual_offset + 2);
    r.gap = r.dual / r.grad_l2;
    r.l2_gap = error_norm(u, v, {NormKind::L2}) / error_norm(u, v, {NormKind::H1});
    r.p_stability = std::abs(r.dual - r.dual_alt) / r.dual_alt;
    out.push_back(r);
  }
  return out;
}

}  // namespace exseq
