#include "exseq/calculus.hpp"

#include <stdexcept>

namespace exseq {

std::string to_string(DiffOp op) {
  switch (op) {
    case DiffOp::grad: return "grad";
    case DiffOp::curl: return "curl";
    case DiffOp::div: return "div";
    case DiffOp::curl2d_scalar: return "curl2d_scalar";
    case DiffOp::curl2d_vector: return "curl2d_vector";
  }
  return "?";
}

Mat ambient_op(DiffOp op, const Cell& cell, int n) {
  switch (op) {
    case DiffOp::grad: return ambient::grad(cell, n);
    case DiffOp::curl: return ambient::curl(cell, n);
    case DiffOp::div: return ambient::div(cell, n);
    case DiffOp::curl2d_scalar: return ambient::rot(cell, n);
    case DiffOp::curl2d_vector: return ambient::curl2d(cell, n);
  }
  throw std::runtime_error("ambient_op: unknown operator");
}

namespace {

SpacePtr vector_l2(const CellPtr& cell, int p, int m) {
  auto s = std::make_shared<PolySpace>();
  s->cell = cell;
  s->kind = SpaceKind::L2;
  s->p = p;
  s->value_dim = m;
  s->degree = p + 1;
  s->basis = embed_components(m, cell->basis().size(p), cell->basis().size(p + 1));
  return s;
}

double rel_outside(const Mat& image, const Mat& target_basis) {
  const double n = image.norm();
  if (n == 0.0) return 0.0;
  return (image - target_basis * (target_basis.transpose() * image)).norm() / n;
}

}  // namespace

LinearOpMatrix diff_op(DiffOp op, const SpacePtr& src) {
  const CellPtr& cell = src->cell;
  const int d = cell->dim(), p = src->p;
  SpacePtr target;
  switch (op) {
    case DiffOp::grad:
      if (src->value_dim != 1) throw std::runtime_error("diff_op grad: scalar space expected");
      target = build_space(cell, d == 1 ? SpaceKind::Q : SpaceKind::Q, p);
      break;
    case DiffOp::curl:
      if (d != 3 || src->value_dim != 3) throw std::runtime_error("diff_op curl: 3D vector space expected");
      target = build_space(cell, SpaceKind::V, p);
      break;
    case DiffOp::div:
      if (d != 3 || src->value_dim != 3) throw std::runtime_error("diff_op div: 3D vector space expected");
      target = build_space(cell, SpaceKind::L2, p);
      break;
    case DiffOp::curl2d_vector:
      if (d != 2 || src->value_dim != 2) throw std::runtime_error("diff_op curl2d_vector: 2D vector space expected");
      target = build_space(cell, SpaceKind::L2, p);
      break;
    case DiffOp::curl2d_scalar:
      if (d != 2 || src->value_dim != 1) throw std::runtime_error("diff_op curl2d_scalar: 2D scalar space expected");
      target = vector_l2(cell, p, 2);
      break;
  }
  Mat image = ambient_op(op, *cell, src->degree) * src->basis;
  LinearOpMatrix out;
  out.source = src;
  out.target = target;
  out.matrix = target->basis.transpose() * image;
  out.residual = rel_outside(image, target->basis);
  return out;
}

LinearOpMatrix trace_op(TraceKind kind, const SpacePtr& src, SubKind sub, int index) {
  const Cell& c = *src->cell;
  Mat T;
  switch (kind) {
    case TraceKind::scalar: T = ambient::trace_scalar(c, sub, index, src->degree); break;
    case TraceKind::tangential: T = ambient::trace_tangential(c, sub, index, src->degree); break;
    case TraceKind::normal: T = ambient::trace_normal(c, sub, index, src->degree); break;
    case TraceKind::gamma: T = ambient::trace_gamma(c, index, src->degree); break;
  }
  Mat image = T * src->basis;
  auto target = std::make_shared<PolySpace>();
  target->cell = ambient::chart(c, sub, index).sub;
  target->kind = kind == TraceKind::scalar ? SpaceKind::trace_W : (kind == TraceKind::normal ? SpaceKind::trace_V : SpaceKind::trace_Q);
  target->p = src->p;
  target->degree = src->degree;
  target->value_dim = static_cast<int>(T.rows()) / target->cell->basis().size(src->degree);
  target->basis = orthonormal_range(image);
  LinearOpMatrix out;
  out.source = src;
  out.target = target;
  out.matrix = target->basis.transpose() * image;
  out.residual = rel_outside(image, target->basis);
  return out;
}

bool ExactnessReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int range_dim(DiffOp op, const PolySpace& space) {
  if (space.dim() == 0) return 0;
  return numerical_rank(ambient_op(op, *space.cell, space.degree) * space.basis);
}

namespace {

void add_count(ExactnessReport& r, const std::string& name, int got, int expected) {
  Check c;
  c.name = name;
  c.value = got;
  c.tolerance = expected;
  c.pass = got == expected;
  c.count = true;
  r.checks.push_back(c);
}

void add_small(ExactnessReport& r, const std::string& name, double v, double tol) {
  Check c;
  c.name = name;
  c.value = v;
  c.tolerance = tol;
  c.pass = v <= tol;
  r.checks.push_back(c);
}

double composition(const Mat& second, const Mat& first_image) {
  const double scale = second.norm() * first_image.norm();
  if (scale == 0.0) return 0.0;
  return (second * first_image).norm() / scale;
}

}  // namespace

ExactnessReport check_exact_sequence(const CellPtr& cell, int p, BoundaryCondition bc) {
  ExactnessReport r;
  const Cell& c = *cell;
  const int d = c.dim(), N = p + 1;
  const double tol = 1e-12;
  const bool bub = bc == BoundaryCondition::zero_trace;
  auto sp = [&](SpaceKind k) { return build_space(cell, k, p); };
  if (d == 3) {
    auto W = sp(bub ? SpaceKind::W_ring : SpaceKind::W);
    auto Q = sp(bub ? SpaceKind::Q_ring : SpaceKind::Q);
    auto V = sp(bub ? SpaceKind::V_ring : SpaceKind::V);
    auto L = sp(SpaceKind::L2);
    Mat G = ambient::grad(c, N), C = ambient::curl(c, N), D = ambient::div(c, N);
    add_small(r, "curl_grad", composition(C, G * W->basis), tol);
    add_small(r, "div_curl", composition(D, C * Q->basis), tol);
    auto lg = diff_op(DiffOp::grad, W), lc = diff_op(DiffOp::curl, Q), ld = diff_op(DiffOp::div, V);
    // images must stay inside the (bubble) target spaces
    add_small(r, "grad_into_Q", bub ? rel_outside(G * W->basis, Q->basis) : lg.residual, 1e-10);
    add_small(r, "curl_into_V", bub ? rel_outside(C * Q->basis, V->basis) : lc.residual, 1e-10);
    add_small(r, "div_into_L2", ld.residual, 1e-10);
    const int rg = range_dim(DiffOp::grad, *W), rc = range_dim(DiffOp::curl, *Q), rd = range_dim(DiffOp::div, *V);
    add_count(r, "ker_grad", W->dim() - rg, bub ? 0 : 1);
    add_count(r, "range_grad_eq_ker_curl", rg, Q->dim() - rc);
    add_count(r, "range_curl_eq_ker_div", rc, V->dim() - rd);
    add_count(r, "range_div", rd, bub ? L->dim() - 1 : L->dim());
    if (bub) {
      add_count(r, "dim_Q_ring_split", Q->dim(), W->dim() + rc);
      add_count(r, "dim_V_ring_split", V->dim(), rc + rd);
      // faces: curl_f of the face bubbles is the mean-free face space
      for (int f = 0; f < 4; ++f) {
        CellPtr fc = c.face_chart(f).sub;
        auto Qf = build_space(fc, SpaceKind::Q_ring, p);
        auto Vf = build_space(fc, SpaceKind::V_ring, p);
        Mat img = ambient::curl2d(*fc, N) * Qf->basis;
        add_count(r, "face" + std::to_string(f) + "_curl_onto", numerical_rank(img), Vf->dim());
        add_small(r, "face" + std::to_string(f) + "_curl_into", rel_outside(img, Vf->basis), 1e-10);
      }
    }
  } else if (d == 2) {
    auto W = sp(bub ? SpaceKind::W_ring : SpaceKind::W);
    auto Q = sp(bub ? SpaceKind::Q_ring : SpaceKind::Q);
    auto L = sp(bub ? SpaceKind::V_ring : SpaceKind::L2);
    Mat G = ambient::grad(c, N), C = ambient::curl2d(c, N);
    add_small(r, "curl_grad", composition(C, G * W->basis), tol);
    add_small(r, "grad_into_Q", rel_outside(G * W->basis, Q->basis), 1e-10);
    add_small(r, "curl_into_L2", rel_outside(C * Q->basis, L->basis), 1e-10);
    const int rg = range_dim(DiffOp::grad, *W), rc = range_dim(DiffOp::curl2d_vector, *Q);
    add_count(r, "ker_grad", W->dim() - rg, bub ? 0 : 1);
    add_count(r, "range_grad_eq_ker_curl", rg, Q->dim() - rc);
    add_count(r, "range_curl", rc, L->dim());
  } else {
    auto W = sp(bub ? SpaceKind::W_ring : SpaceKind::W);
    auto Q = sp(bub ? SpaceKind::Q_ring : SpaceKind::Q);
    Mat G = ambient::grad(c, N);
    add_small(r, "grad_into_Q", rel_outside(G * W->basis, Q->basis), 1e-10);
    const int rg = range_dim(DiffOp::grad, *W);
    add_count(r, "ker_grad", W->dim() - rg, bub ? 0 : 1);
    add_count(r, "range_grad", rg, Q->dim());
  }
  return r;
}

}  // namespace exseq
