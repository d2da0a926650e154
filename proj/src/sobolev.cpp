#include "exseq/sobolev.hpp"

#include "exseq/cache.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace exseq {

QuadratureRule field_rule(const Cell& cell) {
  if (cell.dim() != 1) return cell.quadrature(max_quadrature_degree);
  const int panels = 32;
  QuadratureRule base = unit_simplex_rule(1, max_quadrature_degree);
  const int nb = static_cast<int>(base.weights.size());
  const double a = cell.vertex(0)(0), b = cell.vertex(1)(0), h = (b - a) / panels;
  QuadratureRule r;
  r.degree = base.degree;
  r.points.resize(panels * nb, 1);
  r.weights.resize(panels * nb);
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < nb; ++i) {
      r.points(k * nb + i, 0) = a + h * (k + base.points(i, 0));
      r.weights(k * nb + i) = h * base.weights(i);
    }
  return r;
}

namespace {

// Master values at the field rule; the widest tabulation seen is kept and sliced.
Mat rule_values(const Cell& cell, int n) {
  static std::mutex mtx;
  static std::map<const Cell*, std::pair<int, std::shared_ptr<Mat>>> cache;
  std::shared_ptr<Mat> tab;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(&cell);
    if (it != cache.end() && it->second.first >= n) tab = it->second.second;
  }
  if (!tab) {
    QuadratureRule r = field_rule(cell);
    tab = std::make_shared<Mat>(cell.basis().values(r.points, n));
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[&cell];
    if (slot.first < n || !slot.second) slot = {n, tab};
  }
  return tab->leftCols(cell.basis().size(n));
}

}  // namespace

SobolevGram::SobolevGram(CellPtr cell, int degree) : cell_(std::move(cell)), degree_(degree) {
  const int s = cell_->basis().size(degree);
  A1_ = Mat::Identity(s, s);
  for (int l = 0; l < cell_->dim(); ++l) {
    const Mat& D = cell_->basis().deriv(l, degree);
    A1_ += D.transpose() * D;
  }
  const std::string key = "gram1_" + cell_key(cell_->vertices()) + "_" + std::to_string(degree);
  std::vector<Mat> hit;
  if (cache_load(key, hit) && hit.size() == 2 && hit[0].rows() == s && hit[1].rows() == s) {
    V1_ = hit[0];
    lam1_ = hit[1].col(0);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(A1_);
  V1_ = es.eigenvectors();
  lam1_ = es.eigenvalues();
  cache_store(key, {V1_, Mat(lam1_)});
}

void SobolevGram::ensure_second() const {
  if (have2_) return;
  A2_ = A1_;
  const int d = cell_->dim();
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) {
      Mat DD = cell_->basis().deriv(l, degree_) * cell_->basis().deriv(k, degree_);
      A2_ += DD.transpose() * DD;
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A2_, A1_);
  X2_ = es.eigenvectors();
  mu2_ = es.eigenvalues().cwiseMax(1.0);
  have2_ = true;
}

const Mat& SobolevGram::A2() const {
  ensure_second();
  return A2_;
}

Mat SobolevGram::H(double s) const {
  if (s < 0.0 || s > 2.0) throw std::runtime_error("SobolevGram::H: s must lie in [0,2]");
  if (s <= 1.0) return V1_ * lam1_.array().pow(s).matrix().asDiagonal() * V1_.transpose();
  ensure_second();
  Mat AX = A1_ * X2_;
  return AX * mu2_.array().pow(s - 1.0).matrix().asDiagonal() * AX.transpose();
}

Mat SobolevGram::H_inv(double s) const {
  if (s < 0.0 || s > 2.0) throw std::runtime_error("SobolevGram::H_inv: s must lie in [0,2]");
  if (s <= 1.0) return V1_ * lam1_.array().pow(-s).matrix().asDiagonal() * V1_.transpose();
  ensure_second();
  return X2_ * mu2_.array().pow(-(s - 1.0)).matrix().asDiagonal() * X2_.transpose();
}

std::shared_ptr<const SobolevGram> sobolev_gram(const CellPtr& cell, int degree) {
  static std::mutex mtx;
  static std::map<std::pair<const Cell*, int>, std::shared_ptr<const SobolevGram>> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({cell.get(), degree});
    if (it != cache.end()) return it->second;
  }
  auto g = std::make_shared<const SobolevGram>(cell, degree);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(std::make_pair(cell.get(), degree), g).first->second;
}

double fractional_norm(const SobolevGram& g, const Vec& coeffs, double s) {
  const int n = g.size();
  if (coeffs.size() % n != 0) throw std::runtime_error("fractional_norm: size mismatch");
  Mat H = g.H(s);
  double acc = 0.0;
  for (int c = 0; c < coeffs.size() / n; ++c) {
    Vec x = coeffs.segment(c * n, n);
    acc += x.dot(H * x);
  }
  return std::sqrt(std::max(acc, 0.0));
}

double dual_norm(const SobolevGram& g, const Vec& loads, double s) {
  const int n = g.size();
  if (loads.size() % n != 0) throw std::runtime_error("dual_norm: size mismatch");
  Mat Hi = g.H_inv(s);
  double acc = 0.0;
  for (int c = 0; c < loads.size() / n; ++c) {
    Vec b = loads.segment(c * n, n);
    acc += b.dot(Hi * b);
  }
  return std::sqrt(std::max(acc, 0.0));
}

std::string to_string(const NormSpec& n) {
  std::ostringstream os;
  switch (n.kind) {
    case NormKind::L2: return "L2";
    case NormKind::H1: return "H1";
    case NormKind::H2: return "H2";
    case NormKind::Hcurl: return "Hcurl";
    case NormKind::Hdiv: return "Hdiv";
    case NormKind::H1curl: return "H1curl";
    case NormKind::Hs: os << "H^" << n.s; return os.str();
    case NormKind::Hs_curl: os << "H^" << n.s << "(curl)"; return os.str();
    case NormKind::Hs_div: os << "H^" << n.s << "(div)"; return os.str();
  }
  return "?";
}

Mat values_loads(const Mat& values, const Cell& cell, int n) {
  QuadratureRule r = field_rule(cell);
  Mat T = rule_values(cell, n);
  return T.transpose() * r.weights.asDiagonal() * values;
}

Mat field_loads(const AnalyticField& u, const Cell& cell, int n) {
  QuadratureRule r = field_rule(cell);
  return values_loads(u.values(r.points), cell, n);
}

namespace {

Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

// One term of an integer-order norm: operator on ambient coefficients and matching field data.
struct Term {
  int order;  // jets needed
  std::function<Mat(const Cell&, int m, int n)> op;
  std::function<Mat(const FieldJets&)> data;
};

Mat blockdiag(const Mat& A, int m) {
  Mat out = Mat::Zero(m * A.rows(), m * A.cols());
  for (int c = 0; c < m; ++c) out.block(c * A.rows(), c * A.cols(), A.rows(), A.cols()) = A;
  return out;
}

Mat grad_each(const Cell& c, int m, int n) {
  // rows ordered (component, direction)
  const int s = c.basis().size(n), d = c.dim();
  Mat G = Mat::Zero(m * d * s, m * s);
  for (int cc = 0; cc < m; ++cc)
    for (int l = 0; l < d; ++l) G.block((cc * d + l) * s, cc * s, s, s) = c.basis().deriv(l, n);
  return G;
}

Mat hess_each(const Cell& c, int m, int n) {
  const int s = c.basis().size(n), d = c.dim();
  Mat H = Mat::Zero(m * d * d * s, m * s);
  for (int cc = 0; cc < m; ++cc)
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k)
        H.block(((cc * d + l) * d + k) * s, cc * s, s, s) = c.basis().deriv(l, n) * c.basis().deriv(k, n);
  return H;
}

Mat curl_any(const Cell& c, int n) { return c.dim() == 3 ? ambient::curl(c, n) : ambient::curl2d(c, n); }

Mat curl_data(const FieldJets& a) {
  const int np = static_cast<int>(a.val.rows());
  if (a.dim == 2) {
    Mat o(np, 1);
    o.col(0) = a.jac.col(1 * 2 + 0) - a.jac.col(0 * 2 + 1);
    return o;
  }
  Mat o(np, 3);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    o.col(i) = a.jac.col(k * 3 + j) - a.jac.col(j * 3 + k);
  }
  return o;
}

Mat grad_curl_data(const FieldJets& a) {
  const int np = static_cast<int>(a.val.rows());
  if (a.dim == 2) {
    Mat o(np, 2);
    for (int l = 0; l < 2; ++l) o.col(l) = a.hess.col((1 * 2 + 0) * 2 + l) - a.hess.col((0 * 2 + 1) * 2 + l);
    return o;
  }
  Mat o(np, 9);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    for (int l = 0; l < 3; ++l) o.col(i * 3 + l) = a.hess.col((k * 3 + j) * 3 + l) - a.hess.col((j * 3 + k) * 3 + l);
  }
  return o;
}

Mat div_data(const FieldJets& a) {
  Mat o = Mat::Zero(a.val.rows(), 1);
  for (int c = 0; c < a.dim; ++c) o.col(0) += a.jac.col(c * a.dim + c);
  return o;
}

std::vector<Term> integer_terms(NormKind k) {
  Term id{0, [](const Cell& c, int m, int n) { return Mat(Mat::Identity(m * c.basis().size(n), m * c.basis().size(n))); },
          [](const FieldJets& a) { return a.val; }};
  Term gr{1, grad_each, [](const FieldJets& a) { return a.jac; }};
  Term he{2, hess_each, [](const FieldJets& a) { return a.hess; }};
  Term cu{1, [](const Cell& c, int, int n) { return curl_any(c, n); }, curl_data};
  Term gc{2, [](const Cell& c, int, int n) {
            Mat C = curl_any(c, n);
            const int mc = c.dim() == 3 ? 3 : 1;
            return Mat(grad_each(c, mc, n) * C);
          },
          grad_curl_data};
  Term dv{1, [](const Cell& c, int, int n) { return ambient::div(c, n); }, div_data};
  switch (k) {
    case NormKind::L2: return {id};
    case NormKind::H1: return {id, gr};
    case NormKind::H2: return {id, gr, he};
    case NormKind::Hcurl: return {id, cu};
    case NormKind::Hdiv: return {id, dv};
    case NormKind::H1curl: return {id, gr, cu, gc};
    default: break;
  }
  throw std::runtime_error("integer_terms: fractional norm");
}

bool fractional(NormKind k) { return k == NormKind::Hs || k == NormKind::Hs_curl || k == NormKind::Hs_div; }

int max_order(const std::vector<Term>& ts) {
  int o = 0;
  for (auto& t : ts) o = std::max(o, t.order);
  return o;
}

// Rich representative: L2 projection onto P_R, stacked coefficients.
Vec rich_coeffs(const AnalyticField& u, const Cell& cell, int R) { return flatten(field_loads(u, cell, R)); }

// Operators entering a fractional norm at degree R: identity, and curl or div.
std::vector<Mat> fractional_ops(const NormSpec& nm, const Cell& c, int m, int R) {
  const int s = c.basis().size(R);
  std::vector<Mat> ops{Mat::Identity(m * s, m * s)};
  if (nm.kind == NormKind::Hs_curl) ops.push_back(curl_any(c, R));
  if (nm.kind == NormKind::Hs_div) ops.push_back(ambient::div(c, R));
  return ops;
}

double fractional_quadratic(const SobolevGram& g, const std::vector<Mat>& ops, const Vec& x, double s) {
  double acc = 0.0;
  for (const Mat& A : ops) {
    double v = fractional_norm(g, A * x, s);
    acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace

double error_norm(const AnalyticField& u, const Poly& v, const NormSpec& norm) {
  const Cell& c = *v.cell;
  if (u.dim() != c.dim() || u.value_dim() != v.value_dim) throw std::runtime_error("error_norm: shape mismatch");
  if (fractional(norm.kind)) {
    const int R = v.degree + norm.rich_offset;
    auto g = sobolev_gram(v.cell, R);
    Vec diff = rich_coeffs(u, c, R) - v.raised(R).coeffs;
    return fractional_quadratic(*g, fractional_ops(norm, c, v.value_dim, R), diff, norm.s);
  }
  auto terms = integer_terms(norm.kind);
  QuadratureRule r = field_rule(c);
  FieldJets jets = u.eval(r.points, max_order(terms));
  Mat T = rule_values(c, v.degree);
  const int s = static_cast<int>(T.cols());
  double acc = 0.0;
  for (auto& t : terms) {
    Mat F = t.data(jets);
    Vec pc = t.op(c, v.value_dim, v.degree) * v.coeffs;
    for (int col = 0; col < F.cols(); ++col) {
      Vec e = F.col(col) - T * pc.segment(col * s, s);
      acc += e.dot(r.weights.cwiseProduct(e));
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

BestApprox best_approx(const PolySpace& space, const AnalyticField& u, const NormSpec& norm) {
  const Cell& c = *space.cell;
  const int N = space.degree, m = space.value_dim;
  BestApprox out;
  if (fractional(norm.kind)) {
    const int R = N + norm.rich_offset;
    auto g = sobolev_gram(space.cell, R);
    Vec ut = rich_coeffs(u, c, R);
    Mat BR = ambient::raise(c, m, N, R) * space.basis;
    Mat G = Mat::Zero(space.dim(), space.dim());
    std::vector<std::pair<Mat, Mat>> parts;  // (A, H A)
    for (const Mat& A : fractional_ops(norm, c, m, R)) {
      const int mm = static_cast<int>(A.rows()) / g->size();
      Mat HA = blockdiag(g->H(norm.s), mm) * A;
      G += (A * BR).transpose() * HA * BR;
      parts.emplace_back(A, HA);
    }
    auto ldlt = G.ldlt();
    // start from the L2 projection and correct with small residuals only
    out.coeffs = BR.transpose() * ut;
    for (int it = 0; it < 2; ++it) {
      Vec r = ut - BR * out.coeffs;
      Vec rhs = Vec::Zero(space.dim());
      for (auto& [A, HA] : parts) rhs += (A * BR).transpose() * (HA * r);
      out.coeffs += ldlt.solve(rhs);
    }
  } else {
    auto terms = integer_terms(norm.kind);
    QuadratureRule r = field_rule(c);
    FieldJets jets = u.eval(r.points, max_order(terms));
    Mat T = rule_values(c, N);
    Mat G = Mat::Zero(space.dim(), space.dim());
    Vec rhs = Vec::Zero(space.dim());
    for (auto& t : terms) {
      Mat AB = t.op(c, m, N) * space.basis;
      G += AB.transpose() * AB;
      Mat L = T.transpose() * r.weights.asDiagonal() * t.data(jets);
      rhs += AB.transpose() * flatten(L);
    }
    out.coeffs = G.ldlt().solve(rhs);
  }
  out.approx = Poly{space.cell, m, N, space.basis * out.coeffs};
  out.error = error_norm(u, out.approx, norm);
  return out;
}

double residual_dual_norm(const AnalyticField& u, const Poly& v, double s, int P) {
  const Cell& c = *v.cell;
  QuadratureRule r = field_rule(c);
  Mat T = rule_values(c, v.degree);
  const int s0 = static_cast<int>(T.cols());
  Mat vals = u.values(r.points);
  for (int k = 0; k < v.value_dim; ++k) vals.col(k) -= T * v.coeffs.segment(k * s0, s0);
  Mat L = values_loads(vals, c, P);
  auto g = sobolev_gram(v.cell, P);
  return dual_norm(*g, flatten(L), s);
}

}  // namespace exseq
