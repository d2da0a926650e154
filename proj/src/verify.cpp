#include "exseq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "exseq/calculus.hpp"
#include "exseq/poincare.hpp"
#include "exseq/projectors.hpp"
#include "exseq/spectra.hpp"

namespace exseq {

namespace {

VerifyRow residual_row(const std::string& section, const std::string& name, int p, double v, double t) {
  return {section, name, p, "residual", v, t, std::isfinite(v) && v <= t};
}

VerifyRow count_row(const std::string& section, const std::string& name, int p, int got, int expected) {
  return {section, name, p, "count", double(got), double(expected), got == expected};
}

void from_checks(std::vector<VerifyRow>& out, const std::string& section, const std::string& prefix, int p,
                 const std::vector<Check>& checks, double tol_override = -1.0) {
  for (const auto& c : checks) {
    if (c.count) {
      out.push_back(count_row(section, prefix + c.name, p, int(std::lround(c.value)), int(std::lround(c.tolerance))));
    } else {
      const double t = tol_override > 0 ? tol_override : c.tolerance;
      out.push_back(residual_row(section, prefix + c.name, p, c.value, t));
    }
  }
}

Mat random_matrix(int rows, int cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = dist(rng);
  return a;
}

int stage_unknowns(ProjectorId id, int p) {
  int n = 0;
  for (const auto& st : reference_plan(id, p)->stages()) n += st.unknowns;
  return n;
}

void dims_section(std::vector<VerifyRow>& out, int p_min, int p_max) {
  for (const auto& r : dims_table(p_min, p_max))
    out.push_back(count_row("dims", r.space, r.p, r.dim, r.closed_form));
}

void exact_section(std::vector<VerifyRow>& out, int p_min, int p_max) {
  for (int d : {3, 2})
    for (int p = p_min; p <= p_max; ++p)
      for (auto bc : {BoundaryCondition::none, BoundaryCondition::zero_trace}) {
        auto rep = check_exact_sequence(Cell::reference(d), p, bc);
        std::string prefix = std::to_string(d) + "d_" + (bc == BoundaryCondition::none ? "full_" : "bubble_");
        from_checks(out, "exact", prefix, p, rep.checks);
      }
}

void projection_section(std::vector<VerifyRow>& out, int p_min, int p_max, int samples, unsigned seed) {
  for (auto id : all_projectors()) {
    const int lo = id == ProjectorId::grad1d ? std::max(1, p_min) : p_min;
    for (int p = lo; p <= p_max; ++p) {
      std::mt19937 rng(seed * 1000003u + 31u * static_cast<unsigned>(id) + static_cast<unsigned>(p));
      auto plan = reference_plan(id, p);
      const SpacePtr& t = plan->target();
      Mat in = t->basis * random_matrix(t->dim(), samples, rng);
      Mat res = plan->apply(plan->loads(in, t->degree));
      double worst = 0.0;
      for (int j = 0; j < in.cols(); ++j) worst = std::max(worst, (res.col(j) - in.col(j)).norm() / in.col(j).norm());
      out.push_back(residual_row("projection", to_string(id) + "_idempotent", p, worst, tol::projection));

      // the staged conditions are met to rounding for an analytic input
      const AnalyticField u = named_field(field_names(projector_dim(id), projector_input_dim(id)).front());
      StageOutput so = plan->run(plan->loads(u));
      out.push_back(residual_row("projection", to_string(id) + "_stage_conditions", p, so.residual, tol::projection));

      // invariance under the choice of trace lifting
      ProjectorPlan alt(id, p, nullptr, PlanOptions{seed + 17u});
      Mat a = plan->apply(plan->loads(u)), b = alt.apply(alt.loads(u));
      out.push_back(residual_row("projection", to_string(id) + "_lifting_invariance", p,
                                 (a - b).norm() / std::max(a.norm(), 1e-300), tol::lift_invariance));
    }
  }
}

void commuting_section(std::vector<VerifyRow>& out, int p_min, int p_max, unsigned seed) {
  for (int p = p_min; p <= p_max; ++p) {
    for (const std::string suite : {"poly", "entire"}) {
      const double t = suite == "poly" ? tol::commuting_poly : tol::commuting_entire;
      // worst residual per identity
      std::map<std::string, double> worst;
      std::vector<std::string> order;
      for (const auto& r : check_commuting(p, suite, seed)) {
        if (!worst.count(r.identity)) order.push_back(r.identity);
        worst[r.identity] = std::max(worst[r.identity], r.residual);
      }
      for (const auto& id : order) out.push_back(residual_row("commuting", id + "_" + suite, p, worst[id], t));
    }
  }
}

void poincare_section(std::vector<VerifyRow>& out, int p_min, int p_max, unsigned seed) {
  for (int d : {3, 2})
    for (int p = p_min; p <= p_max; ++p) {
      from_checks(out, "poincare", "", p, poincare_identity_checks(d, p, seed), tol::poincare);
      from_checks(out, "helmholtz", "", p, helmholtz_checks(d, p, seed), tol::helmholtz);
    }
}

void friedrichs_section(std::vector<VerifyRow>& out, int p_min, int p_max) {
  for (auto fc : all_friedrichs_cases()) {
    double lo = INFINITY, hi = 0.0;
    for (int p = p_min; p <= p_max; ++p) {
      auto r = friedrichs_constant(fc, p);
      if (r.empty) continue;
      out.push_back({"friedrichs", to_string(fc) + "_constant", p, "positive", r.constant, 0.0,
                     std::isfinite(r.constant) && r.constant > 0.0});
      lo = std::min(lo, r.constant);
      hi = std::max(hi, r.constant);
    }
    if (hi > 0.0) {
      VerifyRow r = residual_row("friedrichs", to_string(fc) + "_max_over_min", p_max, hi / lo, tol::friedrichs_window);
      r.kind = "ratio";
      out.push_back(r);
    }
  }
}

void lifting_section(std::vector<VerifyRow>& out, int p_min, int p_max, unsigned seed) {
  auto cell = Cell::reference(3);
  for (int p = std::max(1, p_min); p <= p_max; ++p) {
    std::mt19937 rng(seed * 4099u + static_cast<unsigned>(p));
    for (auto kind : {SpaceKind::Q, SpaceKind::V}) {
      SpacePtr sp = build_space(cell, kind, p);
      Poly w{cell, 3, sp->degree, sp->basis * random_matrix(sp->dim(), 1, rng).col(0)};
      LiftingResult r = kind == SpaceKind::Q ? discrete_lifting_curl(p, w) : discrete_lifting_div(p, w);
      const std::string pre = kind == SpaceKind::Q ? "curl_" : "div_";
      out.push_back(residual_row("lifting", pre + "trace", p, r.trace_residual, tol::lifting));
      out.push_back(residual_row("lifting", pre + "orthogonality", p, r.orthogonality_residual, tol::lifting));
      out.push_back(residual_row("lifting", pre + "multiplier", p, r.multiplier_norm, tol::lifting));
    }
  }
}

void endpoint_section(std::vector<VerifyRow>& out, int p_min, int p_max) {
  Mat ends(2, 1);
  ends << -1.0, 1.0;
  for (int p = std::max(1, p_min); p <= p_max; ++p) {
    auto plan = reference_plan(ProjectorId::grad1d, p);
    for (const auto& name : field_names(1, 1)) {
      AnalyticField u = named_field(name);
      Poly v = plan->apply(u);
      Mat uv = u.values(ends), vv = v.eval(ends);
      const double err = (uv - vv).cwiseAbs().maxCoeff() / std::max(1.0, uv.cwiseAbs().maxCoeff());
      out.push_back(residual_row("endpoints", "grad1d_" + name, p, err, tol::endpoint));
    }
  }
}

}  // namespace

std::vector<std::string> verify_sections() {
  return {"dims", "exact", "projection", "commuting", "poincare", "friedrichs", "lifting", "endpoints"};
}

std::vector<VerifyRow> run_verification(const VerifyOptions& opt) {
  if (opt.p_min < 0 || opt.p_max < opt.p_min) throw std::runtime_error("verify: bad p range");
  if (opt.p_max > 10) throw std::runtime_error("verify: p-max above cap 10");
  if (opt.projection_samples < 1) throw std::runtime_error("verify: need at least one sample");
  auto known = verify_sections();
  for (const auto& s : opt.sections)
    if (std::find(known.begin(), known.end(), s) == known.end()) throw std::runtime_error("verify: unknown section " + s);
  auto want = [&](const std::string& s) {
    return opt.sections.empty() || std::find(opt.sections.begin(), opt.sections.end(), s) != opt.sections.end();
  };
  std::vector<VerifyRow> out;
  if (want("dims")) dims_section(out, opt.p_min, opt.p_max);
  if (want("exact")) exact_section(out, opt.p_min, opt.p_max);
  if (want("projection")) projection_section(out, opt.p_min, opt.p_max, opt.projection_samples, opt.seed);
  if (want("commuting")) commuting_section(out, opt.p_min, opt.p_max, opt.seed);
  if (want("poincare")) poincare_section(out, opt.p_min, opt.p_max, opt.seed);
  if (want("friedrichs")) friedrichs_section(out, opt.p_min, opt.p_max);
  if (want("lifting")) lifting_section(out, opt.p_min, opt.p_max, opt.seed);
  if (want("endpoints")) endpoint_section(out, opt.p_min, opt.p_max);
  return out;
}

bool all_pass(const std::vector<VerifyRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; });
}

std::vector<DimsRow> dims_table(int p_min, int p_max) {
  if (p_min < 0 || p_max < p_min) throw std::runtime_error("dims: bad p range");
  struct Entry {
    int d;
    SpaceKind k;
  };
  const std::vector<Entry> entries{
      {3, SpaceKind::W},      {3, SpaceKind::Q},      {3, SpaceKind::V},           {3, SpaceKind::L2},
      {3, SpaceKind::W_ring}, {3, SpaceKind::Q_ring}, {3, SpaceKind::V_ring},      {3, SpaceKind::W_aver},
      {3, SpaceKind::Q_perp_ring}, {3, SpaceKind::V_perp_ring},
      {2, SpaceKind::W},      {2, SpaceKind::Q},      {2, SpaceKind::L2},          {2, SpaceKind::W_ring},
      {2, SpaceKind::Q_ring}, {2, SpaceKind::V_ring}, {2, SpaceKind::W_aver},      {2, SpaceKind::Q_perp_ring},
      {1, SpaceKind::W},      {1, SpaceKind::Q},      {1, SpaceKind::W_ring},
  };
  std::vector<DimsRow> out;
  for (int p = p_min; p <= p_max; ++p) {
    for (const auto& e : entries) {
      DimsRow r;
      r.p = p;
      r.space = to_string(e.k) + "_" + std::to_string(e.d) + "d";
      r.dim = build_space(Cell::reference(e.d), e.k, p)->dim();
      r.closed_form = closed_form_dim(e.d, e.k, p);
      r.match = r.dim == r.closed_form;
      out.push_back(r);
    }
    // conditions imposed by the staged projectors
    const int grad_count = p * (p - 1) * (p - 2) / 6 + 4 * p * (p - 1) / 2 + 6 * p + 4;
    const int div_count = (p + 2) * (p + 1) * p / 2 + 4 * (p + 1) * (p + 2) / 2;
    const int dimW = closed_form_dim(3, SpaceKind::W, p), dimV = closed_form_dim(3, SpaceKind::V, p);
    out.push_back({p, "grad3d_conditions", stage_unknowns(ProjectorId::grad3d, p), grad_count,
                   stage_unknowns(ProjectorId::grad3d, p) == grad_count});
    out.push_back({p, "grad3d_count_vs_W", grad_count, dimW, grad_count == dimW});
    out.push_back({p, "div3d_conditions", stage_unknowns(ProjectorId::div3d, p), div_count,
                   stage_unknowns(ProjectorId::div3d, p) == div_count});
    out.push_back({p, "div3d_count_vs_V", div_count, dimV, div_count == dimV});
    for (auto id : {ProjectorId::curl3d, ProjectorId::grad2d, ProjectorId::curl2d}) {
      const SpacePtr& t = reference_plan(id, p)->target();
      out.push_back({p, to_string(id) + "_conditions", stage_unknowns(id, p), t->dim(), stage_unknowns(id, p) == t->dim()});
    }
  }
  return out;
}

}  // namespace exseq
