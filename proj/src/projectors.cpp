#include "exseq/projectors.hpp"

#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "exseq/complex.hpp"
#include "exseq/sobolev.hpp"

namespace exseq {

namespace {

enum class Family { grad, curl, div, l2 };

Family family(ProjectorId id) {
  switch (id) {
    case ProjectorId::grad3d:
    case ProjectorId::grad2d:
    case ProjectorId::grad1d: return Family::grad;
    case ProjectorId::curl3d:
    case ProjectorId::curl2d: return Family::curl;
    case ProjectorId::div3d: return Family::div;
    default: return Family::l2;
  }
}

const std::vector<std::pair<ProjectorId, std::string>>& id_names() {
  static const std::vector<std::pair<ProjectorId, std::string>> names = {
      {ProjectorId::grad3d, "grad3d"}, {ProjectorId::curl3d, "curl3d"}, {ProjectorId::div3d, "div3d"},
      {ProjectorId::l2_3d, "l2_3d"},   {ProjectorId::grad2d, "grad2d"}, {ProjectorId::curl2d, "curl2d"},
      {ProjectorId::l2_2d, "l2_2d"},   {ProjectorId::grad1d, "grad1d"},
  };
  return names;
}

Mat vstack(const std::vector<Mat>& parts) {
  int rows = 0, cols = 0;
  for (auto& m : parts) {
    rows += static_cast<int>(m.rows());
    cols = static_cast<int>(m.cols());
  }
  Mat out(rows, cols);
  int off = 0;
  for (auto& m : parts) {
    out.middleRows(off, m.rows()) = m;
    off += static_cast<int>(m.rows());
  }
  return out;
}

Mat blockdiag2(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Mat hcat(const Mat& a, const Mat& b) {
  Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Square stage system: find g = g0 + B beta with X^T (L - Y g) = 0.
struct Stage {
  std::string name;
  Mat B, X, Y;
  Eigen::FullPivLU<Mat> lu;
  double cond = 1.0;

  void factor() {
    if (B.cols() == 0) return;
    Mat S = X.transpose() * Y * B;
    if (S.rows() != S.cols()) throw std::runtime_error("stage " + name + ": system not square");
    lu.compute(S);
    if (lu.rank() < S.rows()) throw std::runtime_error("stage " + name + ": singular system");
    Eigen::JacobiSVD<Mat> svd(S);
    const Vec& sv = svd.singularValues();
    cond = sv(0) / sv(sv.size() - 1);
    if (!(cond < 1e12)) throw std::runtime_error("stage " + name + ": system singular beyond tolerance");
  }
  Mat solve(const Mat& L, const Mat& g0) const {
    if (B.cols() == 0) return g0;
    return g0 + B * lu.solve(X.transpose() * (L - Y * g0));
  }
  // relative to the local data, with floor for sub-cells where the data vanish
  double residual(const Mat& L, const Mat& g, double floor) const {
    if (X.cols() == 0) return 0.0;
    const double r = (X.transpose() * (L - Y * g)).norm();
    const double scale = X.norm() * std::max(L.norm() + (Y * g).norm(), floor);
    return scale > 0 ? r / scale : r;
  }
};

struct Lift {
  Mat T;  // stacked traces
  Mat R;  // right inverse restricted to the target space
  Mat apply(const Mat& c, const Mat& g) const { return c + R * (g - T * c); }
};

Lift make_lift(const Mat& T, const Mat& BT, unsigned seed) {
  Mat M = T * BT;
  Mat Ri = pinv(M);
  if (seed != 0) {
    Mat Z = null_space(M, static_cast<int>(BT.cols()));
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Mat K(Z.cols(), M.rows());
    for (int j = 0; j < K.cols(); ++j)
      for (int i = 0; i < K.rows(); ++i) K(i, j) = nd(gen);
    // comparable in size to the minimum-norm inverse
    Mat ZK = Z * K;
    const double a = ZK.norm(), b = Ri.norm();
    if (a > 0) Ri += (b / a) * ZK;
  }
  return {T, BT * Ri};
}

struct SubData {
  CellPtr sub;
  Mat pts;  // rule points in parent coordinates
  Vec w;
  Mat tab;  // sub-cell masters of degree N at the points
  Vec t, t1, t2, n;
  int order = 0;  // derivative order the loads need
};

struct Level {
  SubKind kind;
  std::vector<SubData> subs;
  std::vector<Stage> stages;
  std::vector<Mat> T;
  Lift lift;
};

}  // namespace

struct ProjectorPlan::Impl {
  ProjectorId id;
  Family fam;
  int p = 0, q = 0, N = 0, d = 0, m_in = 1;
  CellPtr cell;
  SpacePtr target;
  bool has_vertex = false;
  Lift vlift;
  std::vector<Level> levels;
  Stage interior;
  std::vector<StageInfo> info;

  Mat channels(SubKind kind, const SubData& sd, const FieldJets& J) const;
  Mat cell_channels(const FieldJets& J) const;
  Mat sub_ops(SubKind kind, int i, int n) const;
  Mat cell_ops(int n) const;
};

std::string to_string(ProjectorId id) {
  for (auto& [k, s] : id_names())
    if (k == id) return s;
  return "?";
}

ProjectorId projector_from_string(const std::string& s) {
  for (auto& [k, n] : id_names())
    if (n == s) return k;
  throw std::runtime_error("unknown operator: " + s);
}

std::vector<ProjectorId> all_projectors() {
  std::vector<ProjectorId> out;
  for (auto& [k, s] : id_names()) out.push_back(k);
  return out;
}

int projector_dim(ProjectorId id) {
  switch (id) {
    case ProjectorId::grad3d:
    case ProjectorId::curl3d:
    case ProjectorId::div3d:
    case ProjectorId::l2_3d: return 3;
    case ProjectorId::grad1d: return 1;
    default: return 2;
  }
}

int projector_input_dim(ProjectorId id) {
  switch (family(id)) {
    case Family::curl:
    case Family::div: return projector_dim(id);
    default: return 1;
  }
}

ProjectorPlan::ProjectorPlan(ProjectorId id, int p, CellPtr cell, PlanOptions opt) {
  auto im = std::make_shared<Impl>();
  im->id = id;
  im->fam = family(id);
  im->p = p;
  im->d = projector_dim(id);
  im->m_in = projector_input_dim(id);
  im->q = id == ProjectorId::grad1d ? p - 1 : p;
  if (im->q < 0) throw std::runtime_error("build_plan: degree out of range for " + to_string(id));
  if (!cell) cell = Cell::reference(im->d);
  if (cell->dim() != im->d) throw std::runtime_error("build_plan: cell dimension does not match operator");
  im->cell = cell;
  const Cell& c = *cell;
  const LocalComplex& lc = local_complex(cell, im->q);
  const int N = lc.N, d = im->d;
  im->N = N;
  switch (im->fam) {
    case Family::grad: im->target = lc.W; break;
    case Family::curl: im->target = lc.Q; break;
    case Family::div: im->target = lc.V; break;
    case Family::l2: im->target = lc.L2; break;
  }
  const Mat& BT = im->target->basis;
  const int s = c.basis().size(N);
  unsigned seed = opt.lift_seed;
  auto next_seed = [&]() { return seed == 0 ? 0u : seed++; };

  if (im->fam == Family::grad) {
    im->has_vertex = true;
    im->vlift = make_lift(ambient::vertex_eval(c, N), BT, next_seed());
    im->info.push_back({"vertex", c.num_vertices(), 1.0});
  }

  auto add_level = [&](SubKind kind) {
    Level lv;
    lv.kind = kind;
    const int nsub = ambient::num_sub(c, kind);
    for (int i = 0; i < nsub; ++i) {
      const Chart& ch = ambient::chart(c, kind, i);
      SubData sd;
      sd.sub = ch.sub;
      QuadratureRule r = ch.sub->quadrature(max_quadrature_degree);
      sd.pts = ch.to_parent_rows(r.points);
      sd.w = r.weights;
      sd.tab = ch.sub->basis().values(r.points, N);
      const LocalComplex& sc = local_complex(ch.sub, im->q);
      const int ss = ch.sub->basis().size(N);
      Stage st;
      Mat T;
      if (kind == SubKind::edge) {
        sd.t = c.edges()[i].tangent;
        const Mat& De = ch.sub->basis().deriv(0, N);
        if (im->fam == Family::grad) {
          st.name = "edge" + std::to_string(i) + ":grad";
          st.B = sc.W_ring->basis;
          st.Y = De;
          st.X = De * st.B;
          T = ambient::trace_scalar(c, kind, i, N);
          sd.order = 1;
        } else {
          st.name = "edge" + std::to_string(i) + ":tangential";
          const int sp = ch.sub->basis().size(im->q);
          st.B = Mat::Identity(ss, sp);
          st.Y = Mat::Identity(ss, ss);
          st.X = hcat(Mat::Identity(ss, 1), De * sc.W_ring->basis);
          T = ambient::trace_tangential(c, kind, i, N);
          sd.order = 0;
        }
      } else {
        const Face& f = c.faces()[i];
        sd.t1 = f.t1;
        sd.t2 = f.t2;
        sd.n = f.normal;
        if (im->fam == Family::grad) {
          st.name = "face" + std::to_string(i) + ":grad";
          st.B = sc.W_ring->basis;
          st.Y = sc.grad;
          st.X = sc.grad * st.B;
          T = ambient::trace_scalar(c, kind, i, N);
          sd.order = 1;
        } else if (im->fam == Family::curl) {
          st.name = "face" + std::to_string(i) + ":curl";
          st.B = sc.Q_ring->basis;
          st.Y = vstack({Mat::Identity(2 * ss, 2 * ss), sc.curl});
          st.X = blockdiag2(sc.grad * sc.W_ring->basis, sc.curl * sc.Q_perp->basis);
          T = ambient::trace_tangential(c, kind, i, N);
          sd.order = 1;
        } else {
          st.name = "face" + std::to_string(i) + ":normal";
          const int sp = ch.sub->basis().size(im->q);
          st.B = Mat::Identity(ss, sp);
          st.Y = Mat::Identity(ss, ss);
          st.X = hcat(Mat::Identity(ss, 1), sc.V_ring->basis);
          T = ambient::trace_normal(c, kind, i, N);
          sd.order = 0;
        }
      }
      st.factor();
      im->info.push_back({st.name, static_cast<int>(st.B.cols()), st.cond});
      lv.subs.push_back(std::move(sd));
      lv.stages.push_back(std::move(st));
      lv.T.push_back(std::move(T));
    }
    lv.lift = make_lift(vstack(lv.T), BT, next_seed());
    im->levels.push_back(std::move(lv));
  };

  if (im->fam == Family::grad || im->fam == Family::curl) {
    if (d >= 2) add_level(SubKind::edge);
  }
  if (d == 3 && im->fam != Family::l2) add_level(SubKind::face);

  Stage& in = im->interior;
  in.name = "interior";
  switch (im->fam) {
    case Family::grad:
      in.B = lc.W_ring->basis;
      in.Y = lc.grad;
      in.X = lc.grad * in.B;
      break;
    case Family::curl:
      in.B = lc.Q_ring->basis;
      in.Y = vstack({Mat::Identity(d * s, d * s), lc.curl});
      in.X = blockdiag2(lc.grad * lc.W_ring->basis, lc.curl * lc.Q_perp->basis);
      break;
    case Family::div:
      in.B = lc.V_ring->basis;
      in.Y = vstack({Mat::Identity(3 * s, 3 * s), lc.div});
      in.X = blockdiag2(lc.curl * lc.Q_perp->basis, lc.div * lc.V_perp->basis);
      break;
    case Family::l2:
      in.B = lc.L2->basis;
      in.Y = Mat::Identity(s, s);
      in.X = in.B;
      break;
  }
  in.factor();
  im->info.push_back({in.name, static_cast<int>(in.B.cols()), in.cond});
  impl_ = im;
}

ProjectorId ProjectorPlan::id() const { return impl_->id; }
int ProjectorPlan::p() const { return impl_->p; }
int ProjectorPlan::degree() const { return impl_->N; }
const CellPtr& ProjectorPlan::cell() const { return impl_->cell; }
const SpacePtr& ProjectorPlan::target() const { return impl_->target; }
const std::vector<StageInfo>& ProjectorPlan::stages() const { return impl_->info; }

// ---- loads ----

Mat ProjectorPlan::Impl::channels(SubKind kind, const SubData& sd, const FieldJets& J) const {
  const int np = static_cast<int>(J.val.rows());
  auto dot_val = [&](const Vec& t) {
    Vec r = Vec::Zero(np);
    for (int k = 0; k < d; ++k) r += t(k) * J.val.col(k);
    return r;
  };
  auto dot_grad = [&](const Vec& t) {
    Vec r = Vec::Zero(np);
    for (int k = 0; k < d; ++k) r += t(k) * J.jac.col(k);
    return r;
  };
  if (kind == SubKind::edge) {
    Mat ch(np, 1);
    ch.col(0) = fam == Family::grad ? dot_grad(sd.t) : dot_val(sd.t);
    return ch;
  }
  if (fam == Family::grad) {
    Mat ch(np, 2);
    ch.col(0) = dot_grad(sd.t1);
    ch.col(1) = dot_grad(sd.t2);
    return ch;
  }
  if (fam == Family::curl) {
    Mat ch(np, 3);
    ch.col(0) = dot_val(sd.t1);
    ch.col(1) = dot_val(sd.t2);
    Vec nc = Vec::Zero(np);
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      nc += sd.n(i) * (J.jac.col(k * 3 + j) - J.jac.col(j * 3 + k));
    }
    ch.col(2) = nc;
    return ch;
  }
  Mat ch(np, 1);
  ch.col(0) = dot_val(sd.n);
  return ch;
}

Mat ProjectorPlan::Impl::cell_channels(const FieldJets& J) const {
  const int np = static_cast<int>(J.val.rows());
  switch (fam) {
    case Family::grad: return J.jac.leftCols(d);
    case Family::l2: return J.val.leftCols(1);
    case Family::curl: {
      const int nc = d == 3 ? 3 : 1;
      Mat ch(np, d + nc);
      ch.leftCols(d) = J.val;
      if (d == 3) {
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, k = (i + 2) % 3;
          ch.col(3 + i) = J.jac.col(k * 3 + j) - J.jac.col(j * 3 + k);
        }
      } else {
        ch.col(2) = J.jac.col(1 * 2 + 0) - J.jac.col(0 * 2 + 1);
      }
      return ch;
    }
    case Family::div: {
      Mat ch(np, d + 1);
      ch.leftCols(d) = J.val;
      Vec dv = Vec::Zero(np);
      for (int l = 0; l < d; ++l) dv += J.jac.col(l * d + l);
      ch.col(d) = dv;
      return ch;
    }
  }
  return Mat();
}

namespace {

Mat flatten_cols(const Mat& m) {
  Mat out(m.size(), 1);
  out.col(0) = Eigen::Map<const Vec>(m.data(), m.size());
  return out;
}

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw std::runtime_error(std::string("non-finite ") + what + " samples");
}

}  // namespace

Loads ProjectorPlan::loads(const AnalyticField& u) const {
  const Impl& im = *impl_;
  if (u.dim() != im.d || u.value_dim() != im.m_in)
    throw std::runtime_error("projector " + to_string(im.id) + ": field shape mismatch for " + u.name());
  const Cell& c = *im.cell;
  Loads out;
  if (im.has_vertex) {
    out.vertex = u.values(c.vertices());
    check_finite(out.vertex, "vertex");
  }
  for (const Level& lv : im.levels) {
    auto& dst = lv.kind == SubKind::edge ? out.edge : out.face;
    for (const SubData& sd : lv.subs) {
      FieldJets J = u.eval(sd.pts, sd.order);
      Mat ch = im.channels(lv.kind, sd, J);
      check_finite(ch, "trace");
      Mat wch = sd.w.asDiagonal() * ch;
      dst.push_back(flatten_cols(sd.tab.transpose() * wch));
    }
  }
  const int order = im.fam == Family::l2 ? 0 : 1;
  FieldJets J = u.eval(field_rule(c).points, order);
  Mat ch = im.cell_channels(J);
  check_finite(ch, "interior");
  out.cell = flatten_cols(values_loads(ch, c, im.N));
  return out;
}

Mat ProjectorPlan::Impl::sub_ops(SubKind kind, int i, int n) const {
  const Cell& c = *cell;
  const auto& B = c.basis();
  const Chart& ch = ambient::chart(c, kind, i);
  const int sN = ch.sub->basis().size(N), sn = ch.sub->basis().size(n);
  const Mat& Tr = ambient::trace_scalar(c, kind, i, n);
  auto directional = [&](const Vec& t) {
    Mat D = Mat::Zero(B.size(n), B.size(n));
    for (int l = 0; l < d; ++l) D += t(l) * B.deriv(l, n);
    return Mat((Tr * D).topRows(sN));
  };
  if (kind == SubKind::edge) {
    const Vec& t = c.edges()[i].tangent;
    if (fam == Family::grad) return directional(t);
    return ambient::trace_tangential(c, kind, i, n).topRows(sN);
  }
  const Face& f = c.faces()[i];
  if (fam == Family::grad) return vstack({directional(f.t1), directional(f.t2)});
  if (fam == Family::curl) {
    Mat tt = ambient::trace_tangential(c, kind, i, n);
    const int s = B.size(n);
    Mat C = ambient::curl(c, n);
    Mat nc = Mat::Zero(s, 3 * s);
    for (int k = 0; k < 3; ++k) nc += f.normal(k) * C.middleRows(k * s, s);
    return vstack({tt.middleRows(0, sN), tt.middleRows(sn, sN), Mat((Tr * nc).topRows(sN))});
  }
  return ambient::trace_normal(c, kind, i, n).topRows(sN);
}

Mat ProjectorPlan::Impl::cell_ops(int n) const {
  const Cell& c = *cell;
  const auto& B = c.basis();
  const int sN = B.size(N);
  switch (fam) {
    case Family::grad: {
      std::vector<Mat> parts;
      for (int l = 0; l < d; ++l) parts.push_back(B.deriv(l, n).topRows(sN));
      return vstack(parts);
    }
    case Family::l2: return ambient::truncate(c, 1, n, N);
    case Family::curl: {
      Mat C = d == 3 ? ambient::curl(c, n) : ambient::curl2d(c, n);
      const int nc = d == 3 ? 3 : 1;
      return vstack({ambient::truncate(c, d, n, N), Mat(ambient::truncate(c, nc, n, N) * C)});
    }
    case Family::div:
      return vstack({ambient::truncate(c, d, n, N), Mat(ambient::truncate(c, 1, n, N) * ambient::div(c, n))});
  }
  return Mat();
}

Loads ProjectorPlan::loads(const Mat& coeffs, int n) const {
  const Impl& im = *impl_;
  const Cell& c = *im.cell;
  Mat U = coeffs;
  if (U.rows() != im.m_in * c.basis().size(n)) throw std::runtime_error("projector loads: coefficient size mismatch");
  if (n < im.N) {
    U = ambient::raise(c, im.m_in, n, im.N) * U;
    n = im.N;
  }
  Loads out;
  if (im.has_vertex) out.vertex = ambient::vertex_eval(c, n) * U;
  for (const Level& lv : im.levels) {
    auto& dst = lv.kind == SubKind::edge ? out.edge : out.face;
    for (int i = 0; i < static_cast<int>(lv.subs.size()); ++i) dst.push_back(im.sub_ops(lv.kind, i, n) * U);
  }
  out.cell = im.cell_ops(n) * U;
  return out;
}

Loads ProjectorPlan::loads(const Poly& u) const {
  if (u.cell != impl_->cell) throw std::runtime_error("projector loads: polynomial lives on another cell");
  if (u.value_dim != impl_->m_in) throw std::runtime_error("projector loads: value dimension mismatch");
  return loads(Mat(u.coeffs), u.degree);
}

// ---- staged solve ----

StageOutput ProjectorPlan::run(const Loads& l) const {
  const Impl& im = *impl_;
  const Cell& c = *im.cell;
  const int k = l.cols();
  const int A = static_cast<int>(im.target->basis.rows());
  StageOutput out;
  Mat cf = Mat::Zero(A, k);
  if (im.has_vertex) cf = im.vlift.apply(cf, l.vertex);
  for (const Level& lv : im.levels) {
    const auto& src = lv.kind == SubKind::edge ? l.edge : l.face;
    auto& dst = lv.kind == SubKind::edge ? out.edge : out.face;
    if (src.size() != lv.stages.size()) throw std::runtime_error("projector: loads do not match the plan");
    for (size_t i = 0; i < lv.stages.size(); ++i) dst.push_back(lv.stages[i].solve(src[i], lv.T[i] * cf));
    cf = lv.lift.apply(cf, vstack(dst));
  }
  cf = im.interior.solve(l.cell, cf);
  out.result = cf;

  // re-check every condition on the final interpolant
  double total = l.vertex.squaredNorm() + l.cell.squaredNorm();
  for (const auto& m : l.edge) total += m.squaredNorm();
  for (const auto& m : l.face) total += m.squaredNorm();
  const double floor = 1e-3 * std::sqrt(total);
  double res = 0.0;
  if (im.has_vertex) {
    Mat e = ambient::vertex_eval(c, im.N) * cf - l.vertex;
    const double sc = l.vertex.norm();
    res = std::max(res, sc > 0 ? e.norm() / sc : e.norm());
  }
  for (const Level& lv : im.levels) {
    const auto& src = lv.kind == SubKind::edge ? l.edge : l.face;
    const auto& fixed = lv.kind == SubKind::edge ? out.edge : out.face;
    for (size_t i = 0; i < lv.stages.size(); ++i) {
      Mat g = lv.T[i] * cf;
      res = std::max(res, lv.stages[i].residual(src[i], g, floor));
      const double sc = std::max(fixed[i].norm(), floor);
      const double mis = (g - fixed[i]).norm();
      res = std::max(res, sc > 0 ? mis / sc : mis);
    }
  }
  res = std::max(res, im.interior.residual(l.cell, cf, floor));
  out.residual = res;
  return out;
}

Poly ProjectorPlan::apply(const AnalyticField& u) const {
  Mat r = apply(loads(u));
  return Poly{impl_->cell, impl_->target->value_dim, impl_->N, r.col(0)};
}

Poly ProjectorPlan::apply(const Poly& u) const {
  Mat r = apply(loads(u));
  return Poly{impl_->cell, impl_->target->value_dim, impl_->N, r.col(0)};
}

Vec ProjectorPlan::coords(const Poly& v) const {
  const Impl& im = *impl_;
  Vec x = v.coeffs;
  if (v.degree < im.N) x = ambient::raise(*im.cell, v.value_dim, v.degree, im.N) * x;
  else if (v.degree > im.N) x = ambient::truncate(*im.cell, v.value_dim, v.degree, im.N) * x;
  return im.target->basis.transpose() * x;
}

std::shared_ptr<const ProjectorPlan> reference_plan(ProjectorId id, int p) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::shared_ptr<const ProjectorPlan>> cache;
  const auto key = std::make_pair(static_cast<int>(id), p);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto plan = std::make_shared<const ProjectorPlan>(id, p);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, plan).first->second;
}

// ---- commuting diagrams ----

namespace {

struct Identity {
  std::string name;
  ProjectorId first, second;  // D Pi_first u  vs  Pi_second D u
  Mat (*op)(const Cell&, int);
  const char* entire;
  AnalyticField (*dfield)(const AnalyticField&);
};

Mat op_grad(const Cell& c, int n) { return ambient::grad(c, n); }
Mat op_curl(const Cell& c, int n) { return ambient::curl(c, n); }
Mat op_div(const Cell& c, int n) { return ambient::div(c, n); }
Mat op_curl2d(const Cell& c, int n) { return ambient::curl2d(c, n); }

const std::vector<Identity>& identities() {
  static const std::vector<Identity> ids = {
      {"grad_curl_3d", ProjectorId::grad3d, ProjectorId::curl3d, op_grad, "phi3_entire", grad_of},
      {"curl_div_3d", ProjectorId::curl3d, ProjectorId::div3d, op_curl, "u3_entire", curl_of},
      {"div_l2_3d", ProjectorId::div3d, ProjectorId::l2_3d, op_div, "u3_entire", div_of},
      {"grad_curl_2d", ProjectorId::grad2d, ProjectorId::curl2d, op_grad, "phi2_entire", grad_of},
      {"curl_l2_2d", ProjectorId::curl2d, ProjectorId::l2_2d, op_curl2d, "u2_entire", curl2d_of},
  };
  return ids;
}

double column_discrepancy(const Mat& lhs, const Mat& rhs) {
  double worst = 0.0;
  for (int j = 0; j < lhs.cols(); ++j) {
    const double sc = std::max(rhs.col(j).norm(), lhs.col(j).norm());
    const double e = (lhs.col(j) - rhs.col(j)).norm();
    worst = std::max(worst, sc > 0 ? e / sc : e);
  }
  return worst;
}

}  // namespace

std::vector<CommutingResult> check_commuting(int p, const std::string& suite, unsigned seed) {
  if (suite != "poly" && suite != "entire") throw std::runtime_error("unknown commuting suite: " + suite);
  std::vector<CommutingResult> out;
  for (const Identity& idn : identities()) {
    auto P1 = reference_plan(idn.first, p);
    auto P2 = reference_plan(idn.second, p);
    const Cell& c = *P1->cell();
    const int N = P1->degree();
    CommutingResult r;
    r.identity = idn.name;
    r.p = p;
    if (suite == "poly") {
      const int n = p + 3, m = projector_input_dim(idn.first), k = 4;
      std::mt19937 gen(seed * 7919u + static_cast<unsigned>(p) * 31u + static_cast<unsigned>(out.size()));
      std::normal_distribution<double> nd;
      Mat U(m * c.basis().size(n), k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < U.rows(); ++i) U(i, j) = nd(gen);
      Mat lhs = idn.op(c, N) * P1->apply(P1->loads(U, n));
      Mat rhs = P2->apply(P2->loads(Mat(idn.op(c, n) * U), n));
      r.input = "random_degree_" + std::to_string(n);
      r.residual = column_discrepancy(lhs, rhs);
    } else {
      AnalyticField u = named_field(idn.entire);
      Mat lhs = idn.op(c, N) * P1->apply(P1->loads(u));
      Mat rhs = P2->apply(P2->loads(idn.dfield(u)));
      r.input = idn.entire;
      r.residual = column_discrepancy(lhs, rhs);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace exseq
