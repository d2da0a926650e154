#include "exseq/spectra.hpp"

#include <limits>
#include <stdexcept>

#include "exseq/complex.hpp"

namespace exseq {

namespace {

const std::vector<std::pair<FriedrichsCase, std::string>>& case_names() {
  static const std::vector<std::pair<FriedrichsCase, std::string>> names = {
      {FriedrichsCase::curl2d_full, "curl2d_full"},     {FriedrichsCase::curl2d_bubble, "curl2d_bubble"},
      {FriedrichsCase::curl3d_full, "curl3d_full"},     {FriedrichsCase::curl3d_bubble, "curl3d_bubble"},
      {FriedrichsCase::div3d_full, "div3d_full"},       {FriedrichsCase::div3d_bubble, "div3d_bubble"},
  };
  return names;
}

Mat stacked_traces(const Cell& c, int n, bool normal) {
  std::vector<Mat> rows;
  int total = 0;
  for (int f = 0; f < 4; ++f) {
    rows.push_back(normal ? ambient::trace_normal(c, SubKind::face, f, n) : ambient::trace_tangential(c, SubKind::face, f, n));
    total += static_cast<int>(rows.back().rows());
  }
  Mat T(total, rows[0].cols());
  int off = 0;
  for (auto& r : rows) {
    T.middleRows(off, r.rows()) = r;
    off += static_cast<int>(r.rows());
  }
  return T;
}

Vec to_degree(const Poly& w, int m, int N) {
  if (w.value_dim != m) throw std::runtime_error("lifting: value dimension mismatch");
  if (w.degree > N) throw std::runtime_error("lifting: input degree exceeds the space");
  return ambient::raise(*w.cell, m, w.degree, N) * w.coeffs;
}

double rel(double a, double scale) { return scale > 0 ? a / scale : a; }

// smallest singular value of Mr^{-1/2} Bm Mc^{-1/2}
double inf_sup_value(const Mat& Bm, const Mat& Mrow, const Mat& Mcol) {
  if (Bm.rows() == 0 || Bm.cols() == 0) return 0.0;
  Mat S = inv_sqrt_spd(Mrow) * Bm * inv_sqrt_spd(Mcol);
  Eigen::JacobiSVD<Mat> svd(S);
  return svd.singularValues().minCoeff();
}

struct Saddle {
  Vec alpha, beta;
  double min_sv = 0.0;
};

// [A Bm^T; Bm 0] [alpha; beta] = [f; g]
Saddle solve_saddle(const Mat& A, const Mat& Bm, const Vec& f, const Vec& g) {
  const int n = static_cast<int>(A.rows()), m = static_cast<int>(Bm.rows());
  Saddle s;
  if (n == 0) {
    s.alpha = Vec(0);
    s.beta = Vec::Zero(m);
    return s;
  }
  Mat K = Mat::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = A;
  K.topRightCorner(n, m) = Bm.transpose();
  K.bottomLeftCorner(m, n) = Bm;
  Vec rhs(n + m);
  rhs << f, g;
  Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  s.min_sv = svd.singularValues().minCoeff();
  if (s.min_sv < 1e-12 * svd.singularValues()(0)) throw std::runtime_error("saddle point system singular");
  Vec x = svd.solve(rhs);
  s.alpha = x.head(n);
  s.beta = x.tail(m);
  return s;
}

}  // namespace

std::string to_string(FriedrichsCase c) {
  for (auto& [k, s] : case_names())
    if (k == c) return s;
  return "?";
}

FriedrichsCase friedrichs_case_from_string(const std::string& s) {
  for (auto& [k, n] : case_names())
    if (n == s) return k;
  throw std::runtime_error("unknown Friedrichs case: " + s);
}

std::vector<FriedrichsCase> all_friedrichs_cases() {
  std::vector<FriedrichsCase> out;
  for (auto& [k, s] : case_names()) out.push_back(k);
  return out;
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::grad_orthogonal_full: return "grad_orthogonal_full";
    case Constraint::grad_orthogonal_bubble: return "grad_orthogonal_bubble";
    case Constraint::curl_orthogonal_full: return "curl_orthogonal_full";
    case Constraint::curl_orthogonal_bubble_perp: return "curl_orthogonal_bubble_perp";
  }
  return "?";
}

double ConstrainedSubspace::residual(const Vec& coeffs) const {
  if (tests.cols() == 0) return 0.0;
  const double r = (tests.transpose() * coeffs).norm();
  const double sc = tests.norm() * coeffs.norm();
  return rel(r, sc);
}

double ConstrainedSubspace::basis_residual() const {
  double worst = 0.0;
  for (int j = 0; j < basis.cols(); ++j) worst = std::max(worst, residual(basis.col(j)));
  return worst;
}

ConstrainedSubspace constrained_subspace(FriedrichsCase fc, int p) {
  const int d = (fc == FriedrichsCase::curl2d_full || fc == FriedrichsCase::curl2d_bubble) ? 2 : 3;
  const LocalComplex& lc = local_complex(Cell::reference(d), p);
  ConstrainedSubspace cs;
  switch (fc) {
    case FriedrichsCase::curl2d_full:
    case FriedrichsCase::curl3d_full:
      cs.parent = lc.Q;
      cs.constraint = Constraint::grad_orthogonal_full;
      cs.tests = lc.grad * lc.W->basis;
      break;
    case FriedrichsCase::curl2d_bubble:
    case FriedrichsCase::curl3d_bubble:
      cs.parent = lc.Q_ring;
      cs.constraint = Constraint::grad_orthogonal_bubble;
      cs.tests = lc.grad * lc.W_ring->basis;
      break;
    case FriedrichsCase::div3d_full:
      cs.parent = lc.V;
      cs.constraint = Constraint::curl_orthogonal_full;
      cs.tests = lc.curl * lc.Q->basis;
      break;
    case FriedrichsCase::div3d_bubble:
      cs.parent = lc.V_ring;
      cs.constraint = Constraint::curl_orthogonal_bubble_perp;
      cs.tests = lc.curl * lc.Q_perp->basis;
      break;
  }
  const Mat& P = cs.parent->basis;
  if (P.cols() == 0) {
    cs.basis = Mat(P.rows(), 0);
  } else {
    Mat Z = null_space(cs.tests.transpose() * P, static_cast<int>(P.cols()));
    cs.basis = P * Z;
  }
  return cs;
}

FriedrichsResult friedrichs_constant(FriedrichsCase fc, int p) {
  ConstrainedSubspace cs = constrained_subspace(fc, p);
  const Cell& c = *cs.parent->cell;
  const int N = cs.parent->degree;
  FriedrichsResult r;
  r.fcase = fc;
  r.p = p;
  r.dim = cs.dim();
  if (r.dim == 0) {
    r.empty = true;
    r.min_ratio = std::numeric_limits<double>::infinity();
    r.constant = 0.0;
    return r;
  }
  Mat D;
  if (fc == FriedrichsCase::div3d_full || fc == FriedrichsCase::div3d_bubble) D = ambient::div(c, N);
  else if (c.dim() == 3) D = ambient::curl(c, N);
  else D = ambient::curl2d(c, N);
  Mat DZ = D * cs.basis;
  // basis is L2-orthonormal, so this is the generalized problem in reduced form
  Eigen::SelfAdjointEigenSolver<Mat> es(DZ.transpose() * DZ);
  const double lam = std::max(es.eigenvalues()(0), 0.0);
  r.min_ratio = std::sqrt(lam);
  r.constant = r.min_ratio > 0 ? 1.0 / r.min_ratio : std::numeric_limits<double>::infinity();
  return r;
}

LiftingResult discrete_lifting_curl(int p, const Poly& w) {
  auto cell = Cell::reference(3);
  if (w.cell != cell) throw std::runtime_error("lifting: reference tetrahedron expected");
  const LocalComplex& lc = local_complex(cell, p);
  const Cell& c = *cell;
  const int N = lc.N;
  const Mat& BQ = lc.Q->basis;
  Vec wc = to_degree(w, 3, N);
  Mat T = stacked_traces(c, N, false);
  Vec z = T * wc;
  Vec E = BQ * (pinv(T * BQ) * z);

  const Mat& Qr = lc.Q_ring->basis;
  const Mat GW = lc.grad * lc.W_ring->basis;
  const Mat CQ = lc.curl * Qr;
  Mat A = CQ.transpose() * CQ;
  Mat Bm = GW.transpose() * Qr;
  Vec f = CQ.transpose() * (lc.curl * E);
  Vec g = GW.transpose() * E;
  Saddle s = solve_saddle(A, Bm, f, g);
  Vec L = E - Qr * s.alpha;

  LiftingResult r;
  r.lifting = Poly{cell, 3, N, L};
  r.trace_residual = rel((T * L - z).norm(), z.norm());
  r.orthogonality_residual = GW.cols() ? rel((GW.transpose() * L).norm(), GW.norm() * L.norm()) : 0.0;
  r.multiplier_norm = rel(s.beta.norm(), f.norm() + g.norm());
  r.kkt_min_singular = s.min_sv;
  if (Qr.cols() && GW.cols()) {
    Mat Mq = Mat::Identity(Qr.cols(), Qr.cols()) + A;
    const Mat& Wr = lc.W_ring->basis;
    Mat Mw = Mat::Identity(Wr.cols(), Wr.cols()) + GW.transpose() * GW;
    r.inf_sup = inf_sup_value(Bm, Mw, Mq);
  }
  r.energy = (lc.curl * L).norm();
  r.source_energy = (lc.curl * wc).norm();
  return r;
}

LiftingResult discrete_lifting_div(int p, const Poly& w) {
  auto cell = Cell::reference(3);
  if (w.cell != cell) throw std::runtime_error("lifting: reference tetrahedron expected");
  const LocalComplex& lc = local_complex(cell, p);
  const Cell& c = *cell;
  const int N = lc.N;
  const Mat& BV = lc.V->basis;
  Vec wc = to_degree(w, 3, N);
  Mat T = stacked_traces(c, N, true);
  Vec z = T * wc;
  Vec E = BV * (pinv(T * BV) * z);

  const Mat& Vr = lc.V_ring->basis;
  const Mat CQp = lc.curl * lc.Q_perp->basis;
  const Mat DV = lc.div * Vr;
  Mat A = DV.transpose() * DV;
  Mat Bm = CQp.transpose() * Vr;
  Vec f = DV.transpose() * (lc.div * E);
  Vec g = CQp.transpose() * E;
  Saddle s = solve_saddle(A, Bm, f, g);
  Vec L = E - Vr * s.alpha;

  LiftingResult r;
  r.lifting = Poly{cell, 3, N, L};
  r.trace_residual = rel((T * L - z).norm(), z.norm());
  const Mat CQr = lc.curl * lc.Q_ring->basis;
  r.orthogonality_residual = CQr.cols() ? rel((CQr.transpose() * L).norm(), CQr.norm() * L.norm()) : 0.0;
  r.multiplier_norm = rel(s.beta.norm(), f.norm() + g.norm());
  r.kkt_min_singular = s.min_sv;
  if (Vr.cols() && CQp.cols()) {
    Mat Mv = Mat::Identity(Vr.cols(), Vr.cols()) + A;
    Mat Mq = Mat::Identity(CQp.cols(), CQp.cols()) + CQp.transpose() * CQp;
    r.inf_sup = inf_sup_value(Bm, Mq, Mv);
  }
  r.energy = (lc.div * L).norm();
  r.source_energy = (lc.div * wc).norm();
  return r;
}

double x_minus_half_norm(int p, const Poly& w, int lift_p) {
  if (lift_p < p) throw std::runtime_error("x_minus_half_norm: lifting degree below data degree");
  auto cell = Cell::reference(3);
  if (w.cell != cell) throw std::runtime_error("x_minus_half_norm: reference tetrahedron expected");
  const Cell& c = *cell;
  const int N = p + 1, N2 = lift_p + 1;
  Vec wc = to_degree(w, 3, N);
  // face traces at degree N, padded to the lifting degree (nested face bases)
  const Mat T = stacked_traces(c, N, false);
  Vec z0 = T * wc;
  if (z0.norm() == 0.0) return 0.0;
  std::vector<Vec> parts;
  int total = 0, off = 0;
  for (int f = 0; f < 4; ++f) {
    const auto& fb = c.face_chart(f).sub->basis();
    const int s1 = fb.size(N), s2 = fb.size(N2);
    Vec zf = Vec::Zero(2 * s2);
    zf.segment(0, s1) = z0.segment(off, s1);
    zf.segment(s2, s1) = z0.segment(off + s1, s1);
    off += 2 * s1;
    total += 2 * s2;
    parts.push_back(zf);
  }
  Vec z(total);
  off = 0;
  for (auto& v : parts) {
    z.segment(off, v.size()) = v;
    off += static_cast<int>(v.size());
  }
  const LocalComplex& lc = local_complex(cell, lift_p);
  const Mat& BQ = lc.Q->basis;
  Mat M = stacked_traces(c, N2, false) * BQ;
  Mat CB = lc.curl * BQ;
  Mat H = Mat::Identity(BQ.cols(), BQ.cols()) + CB.transpose() * CB;
  Vec a = pinv(M) * z;
  Mat Z = null_space(M, static_cast<int>(BQ.cols()));
  if (Z.cols() > 0) {
    Mat HZ = Z.transpose() * H * Z;
    Vec y = HZ.ldlt().solve(-(Z.transpose() * H * a));
    a += Z * y;
  }
  return std::sqrt(std::max(0.0, a.dot(H * a)));
}

}  // namespace exseq
