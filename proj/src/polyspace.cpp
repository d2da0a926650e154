#include "exseq/polyspace.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace exseq {

namespace {

const std::vector<std::pair<SpaceKind, std::string>>& kind_names() {
  static const std::vector<std::pair<SpaceKind, std::string>> names = {
      {SpaceKind::W, "W"},
      {SpaceKind::Q, "Q"},
      {SpaceKind::V, "V"},
      {SpaceKind::L2, "L2"},
      {SpaceKind::W_ring, "W_ring"},
      {SpaceKind::Q_ring, "Q_ring"},
      {SpaceKind::V_ring, "V_ring"},
      {SpaceKind::W_aver, "W_aver"},
      {SpaceKind::Q_perp_ring, "Q_perp_ring"},
      {SpaceKind::V_perp_ring, "V_perp_ring"},
      {SpaceKind::trace_W, "trace_W"},
      {SpaceKind::trace_Q, "trace_Q"},
      {SpaceKind::trace_V, "trace_V"},
      {SpaceKind::Q_ring_edgezero_2d, "Q_ring_edgezero_2d"},
  };
  return names;
}

}  // namespace

std::string to_string(SpaceKind k) {
  for (auto& [kk, s] : kind_names())
    if (kk == k) return s;
  return "?";
}

SpaceKind space_kind_from_string(const std::string& s) {
  for (auto& [kk, n] : kind_names())
    if (n == s) return kk;
  throw std::runtime_error("unknown space kind: " + s);
}

Mat Poly::eval(const Mat& pts) const {
  Mat V = cell->basis().values(pts, degree);
  const int s = static_cast<int>(V.cols());
  Mat out(pts.rows(), value_dim);
  for (int c = 0; c < value_dim; ++c) out.col(c) = V * coeffs.segment(c * s, s);
  return out;
}

Poly Poly::raised(int n) const {
  if (n < degree) throw std::runtime_error("Poly::raised: cannot lower degree");
  Poly q{cell, value_dim, n, ambient::raise(*cell, value_dim, degree, n) * coeffs};
  return q;
}

namespace ambient {

Mat grad(const Cell& c, int n) {
  const auto& B = c.basis();
  const int s = B.size(n), d = c.dim();
  Mat G(d * s, s);
  for (int l = 0; l < d; ++l) G.middleRows(l * s, s) = B.deriv(l, n);
  return G;
}

Mat curl(const Cell& c, int n) {
  if (c.dim() != 3) throw std::runtime_error("ambient::curl: 3D only");
  const auto& B = c.basis();
  const int s = B.size(n);
  Mat C = Mat::Zero(3 * s, 3 * s);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    // (curl u)_i = d_j u_k - d_k u_j
    C.block(i * s, k * s, s, s) += B.deriv(j, n);
    C.block(i * s, j * s, s, s) -= B.deriv(k, n);
  }
  return C;
}

Mat div(const Cell& c, int n) {
  const auto& B = c.basis();
  const int s = B.size(n), d = c.dim();
  Mat D(s, d * s);
  for (int l = 0; l < d; ++l) D.middleCols(l * s, s) = B.deriv(l, n);
  return D;
}

Mat rot(const Cell& c, int n) {
  if (c.dim() != 2) throw std::runtime_error("ambient::rot: 2D only");
  const auto& B = c.basis();
  const int s = B.size(n);
  Mat R(2 * s, s);
  R.topRows(s) = B.deriv(1, n);
  R.bottomRows(s) = -B.deriv(0, n);
  return R;
}

Mat curl2d(const Cell& c, int n) {
  if (c.dim() != 2) throw std::runtime_error("ambient::curl2d: 2D only");
  const auto& B = c.basis();
  const int s = B.size(n);
  Mat C(s, 2 * s);
  C.leftCols(s) = -B.deriv(1, n);
  C.rightCols(s) = B.deriv(0, n);
  return C;
}

Mat raise(const Cell& c, int m, int n, int big) {
  return embed_components(m, c.basis().size(n), c.basis().size(big));
}

Mat truncate(const Cell& c, int m, int big, int n) { return raise(c, m, n, big).transpose(); }

int num_sub(const Cell& c, SubKind sub) {
  return sub == SubKind::edge ? static_cast<int>(c.edges().size()) : static_cast<int>(c.faces().size());
}

const Chart& chart(const Cell& c, SubKind sub, int index) {
  return sub == SubKind::edge ? c.edge_chart(index) : c.face_chart(index);
}

Mat trace_scalar(const Cell& c, SubKind sub, int index, int n) {
  return c.basis().trace(chart(c, sub, index), n);
}

Mat trace_tangential(const Cell& c, SubKind sub, int index, int n) {
  const Mat& T = trace_scalar(c, sub, index, n);
  const int s = static_cast<int>(T.cols()), ss = static_cast<int>(T.rows()), d = c.dim();
  if (sub == SubKind::edge) {
    const Vec& t = c.edges()[index].tangent;
    Mat R(ss, d * s);
    for (int k = 0; k < d; ++k) R.middleCols(k * s, s) = t(k) * T;
    return R;
  }
  const Face& f = c.faces()[index];
  Mat R(2 * ss, 3 * s);
  for (int k = 0; k < 3; ++k) {
    R.block(0, k * s, ss, s) = f.t1(k) * T;
    R.block(ss, k * s, ss, s) = f.t2(k) * T;
  }
  return R;
}

Mat trace_normal(const Cell& c, SubKind sub, int index, int n) {
  const Mat& T = trace_scalar(c, sub, index, n);
  const int s = static_cast<int>(T.cols()), ss = static_cast<int>(T.rows()), d = c.dim();
  Vec nv;
  if (sub == SubKind::face) {
    nv = c.faces()[index].normal;
  } else {
    if (d != 2) throw std::runtime_error("trace_normal: edge normals only for 2D cells");
    const auto& e = c.edges()[index];
    nv = c.outward_normal(3 - e.v[0] - e.v[1]);
  }
  Mat R(ss, d * s);
  for (int k = 0; k < d; ++k) R.middleCols(k * s, s) = nv(k) * T;
  return R;
}

Mat trace_gamma(const Cell& c, int face, int n) {
  Mat P = trace_tangential(c, SubKind::face, face, n);
  const int ss = static_cast<int>(P.rows()) / 2;
  Mat G(P.rows(), P.cols());
  G.topRows(ss) = -P.bottomRows(ss);
  G.bottomRows(ss) = P.topRows(ss);
  return G;
}

Mat vertex_eval(const Cell& c, int n) { return c.basis().vertex_values(n); }

Mat integral_row(const Cell& c, int n) {
  Mat r = Mat::Zero(1, c.basis().size(n));
  r(0, 0) = std::sqrt(c.measure());
  return r;
}

}  // namespace ambient

namespace {

// Orthonormal basis of span(P_p^m) + span(gen), where gen lies in P_N^m, N = p + 1.
Mat prefix_plus(const Cell& c, int m, int p, const Mat& gen) {
  const int N = p + 1;
  const int s = c.basis().size(N), sp = c.basis().size(p), h = s - sp;
  Mat top = embed_components(m, sp, s);
  Mat tail(m * h, gen.cols());
  for (int k = 0; k < m; ++k) tail.middleRows(k * h, h) = gen.middleRows(k * s + sp, h);
  Mat U = orthonormal_range(tail);
  Mat out(m * s, top.cols() + U.cols());
  out.leftCols(top.cols()) = top;
  Mat ext = Mat::Zero(m * s, U.cols());
  for (int k = 0; k < m; ++k) ext.middleRows(k * s + sp, h) = U.middleRows(k * h, h);
  out.rightCols(U.cols()) = ext;
  return out;
}

// Columns of the degree-p block, multiplied by x_k, at degree N = p+1.
Mat block_times(const Cell& c, int k, int p) {
  const int sp = c.basis().size(p), sq = c.basis().size(p - 1);
  return c.basis().mult(k, p).rightCols(sp - sq);
}

Mat restrict_space(const Mat& basis, const Mat& constraint) {
  Mat Z = null_space(constraint * basis, static_cast<int>(basis.cols()));
  if (Z.cols() == 0) return Mat(basis.rows(), 0);
  return basis * Z;
}

Mat stacked(const Cell& c, SubKind sub, int n, Mat (*op)(const Cell&, SubKind, int, int)) {
  std::vector<Mat> rows;
  int total = 0, cols = 0;
  for (int i = 0; i < ambient::num_sub(c, sub); ++i) {
    rows.push_back(op(c, sub, i, n));
    total += static_cast<int>(rows.back().rows());
    cols = static_cast<int>(rows.back().cols());
  }
  Mat S(total, cols);
  int off = 0;
  for (auto& r : rows) {
    S.middleRows(off, r.rows()) = r;
    off += static_cast<int>(r.rows());
  }
  return S;
}

Mat endpoint_rows(const Cell& c, int n) { return ambient::vertex_eval(c, n); }

std::shared_ptr<PolySpace> make(const CellPtr& cell, SpaceKind kind, int p, int m, Mat basis) {
  auto s = std::make_shared<PolySpace>();
  s->cell = cell;
  s->kind = kind;
  s->p = p;
  s->value_dim = m;
  s->degree = p + 1;
  s->basis = std::move(basis);
  return s;
}

SpacePtr build_uncached(const CellPtr& cell, SpaceKind kind, int p) {
  const Cell& c = *cell;
  const int d = c.dim(), N = p + 1;
  const auto& B = c.basis();
  const int s = B.size(N);
  B.ensure(N);
  auto W = [&]() { return Mat(Mat::Identity(s, s)); };
  auto L2 = [&]() { return Mat(Mat::Identity(s, B.size(p))); };
  switch (kind) {
    case SpaceKind::W:
      return make(cell, kind, p, 1, W());
    case SpaceKind::L2:
      return make(cell, kind, p, 1, L2());
    case SpaceKind::W_aver:
      return make(cell, kind, p, 1, restrict_space(W(), ambient::integral_row(c, N)));
    case SpaceKind::W_ring: {
      Mat con = d == 1 ? endpoint_rows(c, N) : stacked(c, d == 3 ? SubKind::face : SubKind::edge, N, ambient::trace_scalar);
      return make(cell, kind, p, 1, restrict_space(W(), con));
    }
    case SpaceKind::Q: {
      if (d == 1) return make(cell, kind, p, 1, L2());
      if (d == 2) {
        const int h = B.size(p) - B.size(p - 1);
        Mat gen(2 * s, h);
        gen.topRows(s) = block_times(c, 1, p);
        gen.bottomRows(s) = -block_times(c, 0, p);
        return make(cell, kind, p, 2, prefix_plus(c, 2, p, gen));
      }
      const int h = B.size(p) - B.size(p - 1);
      Mat gen = Mat::Zero(3 * s, 3 * h);
      for (int j = 0; j < 3; ++j)
        for (int comp = 0; comp < 3; ++comp)
          for (int k = 0; k < 3; ++k) {
            // (x cross e_j)_comp = eps(comp,k,j) x_k
            int eps = 0;
            if (comp != k && k != j && comp != j) eps = ((k - comp + 3) % 3 == 1) ? 1 : -1;
            if (eps != 0) gen.block(comp * s, j * h, s, h) += eps * block_times(c, k, p);
          }
      return make(cell, kind, p, 3, prefix_plus(c, 3, p, gen));
    }
    case SpaceKind::V: {
      if (d == 2) return make(cell, kind, p, 1, L2());
      if (d != 3) break;
      const int h = B.size(p) - B.size(p - 1);
      Mat gen(3 * s, h);
      for (int k = 0; k < 3; ++k) gen.middleRows(k * s, s) = block_times(c, k, p);
      return make(cell, kind, p, 3, prefix_plus(c, 3, p, gen));
    }
    case SpaceKind::Q_ring:
    case SpaceKind::Q_ring_edgezero_2d: {
      if (kind == SpaceKind::Q_ring_edgezero_2d && d != 2) break;
      auto Q = build_space(cell, SpaceKind::Q, p);
      if (d == 1) return make(cell, kind, p, 1, restrict_space(Q->basis, ambient::integral_row(c, N)));
      Mat con = stacked(c, d == 3 ? SubKind::face : SubKind::edge, N, ambient::trace_tangential);
      return make(cell, kind, p, d, restrict_space(Q->basis, con));
    }
    case SpaceKind::V_ring: {
      if (d == 2) return make(cell, kind, p, 1, restrict_space(L2(), ambient::integral_row(c, N)));
      if (d != 3) break;
      auto V = build_space(cell, SpaceKind::V, p);
      return make(cell, kind, p, 3, restrict_space(V->basis, stacked(c, SubKind::face, N, ambient::trace_normal)));
    }
    case SpaceKind::Q_perp_ring: {
      if (d < 2) break;
      auto Qr = build_space(cell, SpaceKind::Q_ring, p);
      auto Wr = build_space(cell, SpaceKind::W_ring, p);
      Mat G = ambient::grad(c, N) * Wr->basis;
      return make(cell, kind, p, d, restrict_space(Qr->basis, G.transpose()));
    }
    case SpaceKind::V_perp_ring: {
      if (d != 3) break;
      auto Vr = build_space(cell, SpaceKind::V_ring, p);
      auto Qp = build_space(cell, SpaceKind::Q_perp_ring, p);
      Mat C = ambient::curl(c, N) * Qp->basis;
      return make(cell, kind, p, 3, restrict_space(Vr->basis, C.transpose()));
    }
    default:
      break;
  }
  throw std::runtime_error("build_space: kind " + to_string(kind) + " not defined on a " + std::to_string(d) + "D cell");
}

}  // namespace

SpacePtr build_space(const CellPtr& cell, SpaceKind kind, int p) {
  if (!cell) throw std::runtime_error("build_space: null cell");
  if (p < 0) throw std::runtime_error("build_space: degree must be nonnegative");
  if (p + 1 > OrthoBasis::max_degree) throw std::runtime_error("build_space: degree too large");
  if (kind == SpaceKind::trace_W || kind == SpaceKind::trace_Q || kind == SpaceKind::trace_V)
    throw std::runtime_error("build_space: trace kinds come from trace_space");
  static std::mutex mtx;
  static std::map<std::tuple<const Cell*, int, int>, SpacePtr> cache;
  auto key = std::make_tuple(cell.get(), static_cast<int>(kind), p);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  SpacePtr sp = build_uncached(cell, kind, p);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, sp).first->second;
}

SpacePtr trace_space(const PolySpace& space, SubKind sub, int index) {
  const Cell& c = *space.cell;
  const int N = space.degree;
  const Chart& ch = ambient::chart(c, sub, index);
  Mat T;
  int m = 1;
  SpaceKind kind;
  switch (space.kind) {
    case SpaceKind::W:
    case SpaceKind::W_ring:
    case SpaceKind::W_aver:
    case SpaceKind::L2:
      if (space.value_dim != 1) throw std::runtime_error("trace_space: scalar space expected");
      T = ambient::trace_scalar(c, sub, index, N);
      kind = SpaceKind::trace_W;
      break;
    case SpaceKind::Q:
    case SpaceKind::Q_ring:
    case SpaceKind::Q_perp_ring:
      T = ambient::trace_tangential(c, sub, index, N);
      m = sub == SubKind::face ? 2 : 1;
      kind = SpaceKind::trace_Q;
      break;
    case SpaceKind::V:
    case SpaceKind::V_ring:
    case SpaceKind::V_perp_ring:
      T = ambient::trace_normal(c, sub, index, N);
      kind = SpaceKind::trace_V;
      break;
    default:
      throw std::runtime_error("trace_space: unsupported kind");
  }
  auto out = std::make_shared<PolySpace>();
  out->cell = ch.sub;
  out->kind = kind;
  out->p = space.p;
  out->value_dim = m;
  out->degree = N;
  out->basis = orthonormal_range(T * space.basis);
  return out;
}

int closed_form_dim(int d, SpaceKind k, int p) {
  auto P = [](int dd, int n) { return poly_dim(dd, n); };
  if (d == 3) {
    switch (k) {
      case SpaceKind::W: return P(3, p + 1);
      case SpaceKind::L2: return P(3, p);
      case SpaceKind::Q: return (p + 1) * (p + 3) * (p + 4) / 2;
      case SpaceKind::V: return (p + 1) * (p + 2) * (p + 4) / 2;
      case SpaceKind::W_ring: return (p - 2) * (p - 1) * p / 6;
      case SpaceKind::Q_ring: return (p + 1) * p * (p - 1) / 2;
      case SpaceKind::V_ring: return p * (p + 1) * (p + 2) / 2;
      case SpaceKind::W_aver: return P(3, p + 1) - 1;
      case SpaceKind::Q_perp_ring: return (p + 1) * p * (p - 1) / 2 - (p - 2) * (p - 1) * p / 6;
      case SpaceKind::V_perp_ring: return P(3, p) - 1;
      default: break;
    }
  } else if (d == 2) {
    switch (k) {
      case SpaceKind::W:
      case SpaceKind::trace_W: return P(2, p + 1);
      case SpaceKind::L2:
      case SpaceKind::V:
      case SpaceKind::trace_V: return P(2, p);
      case SpaceKind::Q:
      case SpaceKind::trace_Q: return (p + 1) * (p + 3);
      case SpaceKind::W_ring: return p * (p - 1) / 2;
      case SpaceKind::Q_ring:
      case SpaceKind::Q_ring_edgezero_2d: return p * (p + 1);
      case SpaceKind::V_ring: return P(2, p) - 1;
      case SpaceKind::W_aver: return P(2, p + 1) - 1;
      case SpaceKind::Q_perp_ring: return p * (p + 1) - p * (p - 1) / 2;
      default: break;
    }
  } else if (d == 1) {
    switch (k) {
      case SpaceKind::W:
      case SpaceKind::trace_W: return p + 2;
      case SpaceKind::Q:
      case SpaceKind::L2:
      case SpaceKind::trace_Q: return p + 1;
      case SpaceKind::W_ring: return p;
      case SpaceKind::Q_ring: return p;
      case SpaceKind::W_aver: return p + 1;
      default: break;
    }
  }
  throw std::runtime_error("closed_form_dim: no formula for " + to_string(k));
}

}  // namespace exseq
