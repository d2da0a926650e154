#include "exseq/poincare.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "exseq/sobolev.hpp"

namespace exseq {

double PoincareBump::moment(const std::vector<int>& gamma) const {
  const int d = static_cast<int>(gamma.size());
  auto raw_log = [&](const std::vector<int>& g, bool& zero) {
    int tot = 0;
    double ls = std::log(2.0);
    zero = false;
    for (int gi : g) {
      if (gi % 2) zero = true;
      tot += gi;
      ls += std::lgamma(0.5 * (gi + 1));
    }
    const double h = 0.5 * (tot + d);
    ls -= std::lgamma(h);
    const double lr = (tot + d) * std::log(radius) + std::log(0.5) + std::lgamma(m + 1.0) + std::lgamma(h) -
                      std::lgamma(m + 1.0 + h);
    return ls + lr;
  };
  bool zero = false;
  const double lg = raw_log(gamma, zero);
  if (zero) return 0.0;
  bool z0 = false;
  const double l0 = raw_log(std::vector<int>(d, 0), z0);
  return std::exp(lg - l0);
}

PoincareBump default_bump(const Cell& cell) {
  PoincareBump b;
  b.center = cell.centroid();
  b.radius = 0.9 * cell.inradius();
  b.m = 6;
  return b;
}

Poly grad_poly(const Poly& u) {
  if (u.value_dim != 1) throw std::runtime_error("grad_poly: scalar expected");
  return Poly{u.cell, u.cell->dim(), u.degree, ambient::grad(*u.cell, u.degree) * u.coeffs};
}
Poly curl_poly(const Poly& u) { return Poly{u.cell, 3, u.degree, ambient::curl(*u.cell, u.degree) * u.coeffs}; }
Poly div_poly(const Poly& u) { return Poly{u.cell, 1, u.degree, ambient::div(*u.cell, u.degree) * u.coeffs}; }
Poly rot_poly(const Poly& u) { return Poly{u.cell, 2, u.degree, ambient::rot(*u.cell, u.degree) * u.coeffs}; }
Poly curl2d_poly(const Poly& u) { return Poly{u.cell, 1, u.degree, ambient::curl2d(*u.cell, u.degree) * u.coeffs}; }

namespace {

struct GammaTable {
  std::vector<std::vector<int>> ex;
  std::vector<int> parent;  // index of gamma - e_dir
  std::vector<int> dir;
  std::vector<double> inv_fact;
};

GammaTable gamma_table(int d, int n) {
  GammaTable g;
  g.ex = monomial_exponents(d, n);
  std::map<std::vector<int>, int> idx;
  for (int i = 0; i < static_cast<int>(g.ex.size()); ++i) idx[g.ex[i]] = i;
  for (auto& e : g.ex) {
    int l = -1;
    for (int k = 0; k < d; ++k)
      if (e[k] > 0) {
        l = k;
        break;
      }
    if (l < 0) {
      g.parent.push_back(-1);
      g.dir.push_back(-1);
    } else {
      auto q = e;
      q[l] -= 1;
      g.parent.push_back(idx.at(q));
      g.dir.push_back(l);
    }
    double f = 1.0;
    for (int k = 0; k < d; ++k)
      for (int j = 2; j <= e[k]; ++j) f *= j;
    g.inv_fact.push_back(1.0 / f);
  }
  return g;
}

// Values at y_q of  A[u_j] = int theta(b) u_j(y + s b) db  and  B_i[u_j] = int theta(b) b_i u_j(y + s b) db.
struct Averages {
  Mat A;               // npts x m
  std::vector<Mat> B;  // d entries, npts x m
};

Averages averages(const Poly& u, const PoincareBump& th, const Mat& y, const Vec& s) {
  const Cell& c = *u.cell;
  const int d = c.dim(), n = u.degree, sz = c.basis().size(n), m = u.value_dim;
  const int np = static_cast<int>(y.rows());
  GammaTable gt = gamma_table(d, n);
  const int ng = static_cast<int>(gt.ex.size());
  std::vector<const Mat*> D(d);
  for (int l = 0; l < d; ++l) D[l] = &c.basis().deriv(l, n);
  Mat tab = c.basis().values(y, n);
  // per gamma weights
  Vec wa(ng);
  Mat wb(ng, d);
  std::vector<int> deg(ng);
  for (int g = 0; g < ng; ++g) {
    wa(g) = th.moment(gt.ex[g]) * gt.inv_fact[g];
    for (int i = 0; i < d; ++i) {
      auto e = gt.ex[g];
      e[i] += 1;
      wb(g, i) = th.moment(e) * gt.inv_fact[g];
    }
    deg[g] = 0;
    for (int k = 0; k < d; ++k) deg[g] += gt.ex[g][k];
  }
  Mat spow(np, n + 1);
  for (int q = 0; q < np; ++q) {
    double v = 1.0;
    for (int k = 0; k <= n; ++k) {
      spow(q, k) = v;
      v *= s(q);
    }
  }
  Averages out;
  out.A = Mat::Zero(np, m);
  out.B.assign(d, Mat::Zero(np, m));
  for (int j = 0; j < m; ++j) {
    Mat DG(sz, ng);
    DG.col(0) = u.coeffs.segment(j * sz, sz);
    for (int g = 1; g < ng; ++g) DG.col(g) = (*D[gt.dir[g]]) * DG.col(gt.parent[g]);
    Mat V = tab * DG;  // np x ng
    for (int g = 0; g < ng; ++g) {
      const bool needA = wa(g) != 0.0;
      bool needB = false;
      for (int i = 0; i < d; ++i) needB = needB || wb(g, i) != 0.0;
      if (!needA && !needB) continue;
      Vec col = V.col(g).cwiseProduct(spow.col(deg[g]));
      if (needA) out.A.col(j) += wa(g) * col;
      for (int i = 0; i < d; ++i)
        if (wb(g, i) != 0.0) out.B[i].col(j) += wb(g, i) * col;
    }
  }
  return out;
}

}  // namespace

double bump_mean(const Poly& u, const PoincareBump& bump) {
  if (u.value_dim != 1) throw std::runtime_error("bump_mean: scalar expected");
  Mat y = bump.center.transpose();
  Vec s = Vec::Ones(1);
  return averages(u, bump, y, s).A(0, 0);
}

Poly apply_poincare(PoincareKind kind, const Poly& u, const PoincareBump& th) {
  const Cell& c = *u.cell;
  const int d = c.dim(), n = u.degree;
  int in_dim = 0, out_dim = 0, tpow = 0;
  switch (kind) {
    case PoincareKind::grad: in_dim = d; out_dim = 1; tpow = 0; break;
    case PoincareKind::curl:
      if (d != 3) throw std::runtime_error("apply_poincare curl: 3D only");
      in_dim = 3; out_dim = 3; tpow = 1; break;
    case PoincareKind::div: in_dim = 1; out_dim = d; tpow = 2; break;
    case PoincareKind::curl2d:
      if (d != 2) throw std::runtime_error("apply_poincare curl2d: 2D only");
      in_dim = 1; out_dim = 2; tpow = 1; break;
  }
  if (u.value_dim != in_dim) throw std::runtime_error("apply_poincare: input value dimension mismatch");
  const int nout = n + 1;
  QuadratureRule xr = c.quadrature(2 * nout);
  const int nx = static_cast<int>(xr.points.rows());
  Vec tn, tw;
  gauss_jacobi((n + tpow) / 2 + 1, 0, 0, tn, tw);
  const int nt = static_cast<int>(tn.size());
  Mat y(nx * nt, d);
  Vec s(nx * nt);
  Mat xi = xr.points;
  xi.rowwise() -= th.center.transpose();
  for (int k = 0; k < nt; ++k) {
    const double t = 0.5 * (1.0 + tn(k));
    y.middleRows(k * nx, nx) = (t * xi).rowwise() + th.center.transpose();
    s.segment(k * nx, nx).setConstant(1.0 - t);
  }
  Averages av = averages(u, th, y, s);
  Mat vals = Mat::Zero(nx, out_dim);
  for (int k = 0; k < nt; ++k) {
    const double t = 0.5 * (1.0 + tn(k));
    const double w = 0.5 * tw(k) * std::pow(t, tpow);
    auto A = av.A.middleRows(k * nx, nx);
    auto term = [&](int comp, int dirv) -> Vec {
      // component `comp` of u times (xi - b)_dirv, averaged
      return xi.col(dirv).cwiseProduct(A.col(comp)) - av.B[dirv].middleRows(k * nx, nx).col(comp);
    };
    switch (kind) {
      case PoincareKind::grad:
        for (int i = 0; i < d; ++i) vals.col(0) += w * term(i, i);
        break;
      case PoincareKind::curl:
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, l = (i + 2) % 3;
          // (u x v)_i = u_j v_l - u_l v_j
          vals.col(i) += w * (term(j, l) - term(l, j));
        }
        break;
      case PoincareKind::div:
        for (int i = 0; i < d; ++i) vals.col(i) += w * term(0, i);
        break;
      case PoincareKind::curl2d:
        vals.col(0) -= w * term(0, 1);
        vals.col(1) += w * term(0, 0);
        break;
    }
  }
  Mat tab = c.basis().values(xr.points, nout);
  Mat proj = tab.transpose() * xr.weights.asDiagonal() * vals;
  Poly out{u.cell, out_dim, nout, Eigen::Map<Vec>(proj.data(), proj.size())};
  return out;
}

Poly apply_poincare(PoincareKind kind, const Poly& u) { return apply_poincare(kind, u, default_bump(*u.cell)); }

double membership_residual(const Poly& v, const PolySpace& space, Vec* coeffs) {
  const Cell& c = *v.cell;
  const int m = v.value_dim;
  if (m != space.value_dim) throw std::runtime_error("membership_residual: value dimension mismatch");
  const int big = std::max(v.degree, space.degree);
  Vec x = v.raised(big).coeffs;
  Mat B = ambient::raise(c, m, space.degree, big) * space.basis;
  Vec a = B.transpose() * x;
  if (coeffs) *coeffs = a;
  const double nx = x.norm();
  return nx == 0.0 ? 0.0 : (x - B * a).norm() / nx;
}

namespace {

Poly at_degree(const Poly& v, int n) {
  if (v.degree == n) return v;
  if (v.degree < n) return v.raised(n);
  Poly w{v.cell, v.value_dim, n, ambient::truncate(*v.cell, v.value_dim, v.degree, n) * v.coeffs};
  return w;
}

double rel_diff(const Poly& a, const Poly& b) {
  const int n = std::max(a.degree, b.degree);
  Vec x = a.raised(n).coeffs, y = b.raised(n).coeffs;
  const double s = std::max(x.norm(), 1e-300);
  return (x - y).norm() / s;
}

}  // namespace

HelmholtzSplit helmholtz_curl(const Poly& u) {
  const int d = u.cell->dim();
  if (d < 2 || u.value_dim != d) throw std::runtime_error("helmholtz_curl: vector polynomial expected");
  HelmholtzSplit h;
  Poly z = d == 3 ? apply_poincare(PoincareKind::curl, curl_poly(u)) : apply_poincare(PoincareKind::curl2d, curl2d_poly(u));
  Poly rest{u.cell, d, z.degree, u.raised(z.degree).coeffs - z.coeffs};
  Poly phi = apply_poincare(PoincareKind::grad, rest);
  h.potential = phi;
  h.remainder = z;
  Poly g = grad_poly(phi);
  h.reconstruction = Poly{u.cell, d, g.degree, g.coeffs + z.raised(g.degree).coeffs};
  h.residual = rel_diff(h.reconstruction, u);
  return h;
}

HelmholtzSplit helmholtz_div(const Poly& u) {
  if (u.cell->dim() != 3 || u.value_dim != 3) throw std::runtime_error("helmholtz_div: 3D vector polynomial expected");
  HelmholtzSplit h;
  Poly z = apply_poincare(PoincareKind::div, div_poly(u));
  Poly rest{u.cell, 3, z.degree, u.raised(z.degree).coeffs - z.coeffs};
  Poly psi = apply_poincare(PoincareKind::curl, rest);
  h.potential = psi;
  h.remainder = z;
  Poly cpsi = curl_poly(psi);
  h.reconstruction = Poly{u.cell, 3, cpsi.degree, cpsi.coeffs + z.raised(cpsi.degree).coeffs};
  h.residual = rel_diff(h.reconstruction, u);
  return h;
}

namespace {

HelmholtzSplit approximate(const AnalyticField& u, const CellPtr& cell, int p, SpaceKind kind, bool curl) {
  auto sp = build_space(cell, kind, p);
  BestApprox ba = best_approx(*sp, u, NormSpec{NormKind::L2, 0.0, 6});
  HelmholtzSplit h = curl ? helmholtz_curl(ba.approx) : helmholtz_div(ba.approx);
  h.field_error = error_norm(u, at_degree(h.reconstruction, h.reconstruction.degree), NormSpec{NormKind::L2, 0.0, 6});
  return h;
}

}  // namespace

HelmholtzSplit helmholtz_curl(const AnalyticField& u, const CellPtr& cell, int p) {
  return approximate(u, cell, p, SpaceKind::Q, true);
}

HelmholtzSplit helmholtz_div(const AnalyticField& u, const CellPtr& cell, int p) {
  return approximate(u, cell, p, SpaceKind::V, false);
}

namespace {

Poly random_member(const PolySpace& sp, std::mt19937& gen) {
  std::normal_distribution<double> nd;
  Vec a(sp.dim());
  for (auto& x : a) x = nd(gen);
  return Poly{sp.cell, sp.value_dim, sp.degree, sp.basis * a};
}

Poly sum(const Poly& a, const Poly& b, double sb = 1.0) {
  const int n = std::max(a.degree, b.degree);
  return Poly{a.cell, a.value_dim, n, a.raised(n).coeffs + sb * b.raised(n).coeffs};
}

void push(std::vector<Check>& out, const std::string& name, double v, double tol) {
  out.push_back({name, v, tol, v <= tol});
}

}  // namespace

std::vector<Check> poincare_identity_checks(int dim, int p, unsigned seed, int samples) {
  if (dim != 2 && dim != 3) throw std::runtime_error("poincare_identity_checks: dimension 2 or 3");
  const double tol = 1e-10;
  auto c = Cell::reference(dim);
  std::mt19937 gen(seed * 104729u + static_cast<unsigned>(p * 10 + dim));
  auto W = build_space(c, SpaceKind::W, p), Q = build_space(c, SpaceKind::Q, p), L = build_space(c, SpaceKind::L2, p);
  const PoincareBump th = default_bump(*c);
  double e_grad = 0, e_top = 0, e_mid = 0, e_mean = 0, m_w = 0, m_q = 0, m_v = 0, e_const = 0;
  for (int k = 0; k < samples; ++k) {
    Poly u = random_member(*Q, gen);
    Poly rg = apply_poincare(PoincareKind::grad, u, th);
    Poly ru = dim == 3 ? apply_poincare(PoincareKind::curl, curl_poly(u), th) : apply_poincare(PoincareKind::curl2d, curl2d_poly(u), th);
    e_grad = std::max(e_grad, rel_diff(sum(grad_poly(rg), ru), u));
    m_w = std::max(m_w, membership_residual(rg, *W));
    m_q = std::max(m_q, membership_residual(ru, *Q));

    Poly phi = random_member(*W, gen);
    Poly back = apply_poincare(PoincareKind::grad, grad_poly(phi), th);
    Poly shifted{c, 1, phi.degree, phi.coeffs};
    shifted.coeffs(0) -= bump_mean(phi, th) * std::sqrt(c->measure());
    e_mean = std::max(e_mean, rel_diff(back, shifted));

    Poly w = random_member(*L, gen);
    if (dim == 3) {
      auto V = build_space(c, SpaceKind::V, p);
      Poly v = random_member(*V, gen);
      Poly a = curl_poly(apply_poincare(PoincareKind::curl, v, th));
      Poly b = apply_poincare(PoincareKind::div, div_poly(v), th);
      e_mid = std::max(e_mid, rel_diff(sum(a, b), v));
      m_q = std::max(m_q, membership_residual(apply_poincare(PoincareKind::curl, v, th), *Q));
      Poly rd = apply_poincare(PoincareKind::div, w, th);
      e_top = std::max(e_top, rel_diff(div_poly(rd), w));
      m_v = std::max(m_v, membership_residual(rd, *V));
    } else {
      Poly rc = apply_poincare(PoincareKind::curl2d, w, th);
      e_top = std::max(e_top, rel_diff(curl2d_poly(rc), w));
      m_q = std::max(m_q, membership_residual(rc, *Q));
    }
  }
  e_const = std::abs(bump_mean(Poly{c, 1, 0, Vec::Constant(1, std::sqrt(c->measure()))}, th) - 1.0);
  std::vector<Check> out;
  const std::string tag = dim == 3 ? "3d" : "2d";
  push(out, "grad_R_grad_plus_R_curl_curl_" + tag, e_grad, tol);
  push(out, "R_grad_of_gradient_" + tag, e_mean, tol);
  push(out, "bump_mean_of_constant_" + tag, e_const, tol);
  if (dim == 3) {
    push(out, "curl_R_curl_plus_R_div_div_3d", e_mid, tol);
    push(out, "div_R_div_3d", e_top, tol);
    push(out, "R_div_into_V_3d", m_v, tol);
  } else {
    push(out, "curl_R_curl_2d", e_top, tol);
  }
  push(out, "R_grad_into_W_" + tag, m_w, tol);
  push(out, "R_curl_into_Q_" + tag, m_q, tol);
  return out;
}

std::vector<Check> helmholtz_checks(int dim, int p, unsigned seed, int samples) {
  const double tol = 1e-9;
  auto c = Cell::reference(dim);
  std::mt19937 gen(seed * 130363u + static_cast<unsigned>(p * 10 + dim));
  auto Q = build_space(c, SpaceKind::Q, p);
  double ec = 0, ed = 0;
  for (int k = 0; k < samples; ++k) {
    ec = std::max(ec, helmholtz_curl(random_member(*Q, gen)).residual);
    if (dim == 3) ed = std::max(ed, helmholtz_div(random_member(*build_space(c, SpaceKind::V, p), gen)).residual);
  }
  std::vector<Check> out;
  const std::string tag = dim == 3 ? "3d" : "2d";
  push(out, "helmholtz_curl_" + tag, ec, tol);
  if (dim == 3) push(out, "helmholtz_div_3d", ed, tol);
  return out;
}

}  // namespace exseq
