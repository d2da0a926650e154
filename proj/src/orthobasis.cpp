#include "exseq/orthobasis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace exseq {

int poly_dim(int d, int n) {
  if (n < 0) return 0;
  long r = 1;
  for (int i = 1; i <= d; ++i) r = r * (n + i) / i;
  return static_cast<int>(r);
}

int homogeneous_dim(int d, int n) { return poly_dim(d, n) - poly_dim(d, n - 1); }

std::vector<std::vector<int>> monomial_exponents(int d, int n) {
  std::vector<std::vector<int>> out;
  for (int deg = 0; deg <= n; ++deg) {
    if (d == 1) {
      out.push_back({deg});
    } else if (d == 2) {
      for (int a = deg; a >= 0; --a) out.push_back({a, deg - a});
    } else {
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b) out.push_back({a, b, deg - a - b});
    }
  }
  return out;
}

namespace {

struct BlockTab {
  Mat val;
  std::vector<Mat> d1, d2;
};

}  // namespace

OrthoBasis::OrthoBasis(const Cell& cell) : cell_(cell), d_(cell.dim()), center_(cell.centroid()) {
  c0_ = 1.0 / std::sqrt(cell.measure());
  auto b0 = std::make_shared<Block>();
  b0->h = 1;
  blocks_.push_back(b0);
}

std::vector<std::shared_ptr<const OrthoBasis::Block>> OrthoBasis::snapshot(int n) const {
  ensure(n);
  std::lock_guard<std::mutex> lock(mutex_);
  return std::vector<std::shared_ptr<const Block>>(blocks_.begin(), blocks_.begin() + n + 1);
}

void OrthoBasis::ensure(int n) const {
  if (n > max_degree) throw std::runtime_error("OrthoBasis: degree exceeds supported maximum");
  std::lock_guard<std::mutex> lock(mutex_);
  while (static_cast<int>(blocks_.size()) <= n) build_block(static_cast<int>(blocks_.size()));
}


// Shared evaluation kernel: values and derivatives of each degree block.
static std::vector<BlockTab> run_blocks(const Mat& pts, const Vec& center, double c0, int d, int n, int order,
                                        const std::vector<const Mat*>& Ts, const std::vector<const Mat*>& Hs,
                                        const std::vector<int>& hs) {
  const int np = static_cast<int>(pts.rows());
  std::vector<BlockTab> out(n + 1);
  Mat y = pts;
  y.rowwise() -= center.transpose();
  out[0].val = Mat::Constant(np, 1, c0);
  if (order >= 1) out[0].d1.assign(d, Mat::Zero(np, 1));
  if (order >= 2) out[0].d2.assign(d * d, Mat::Zero(np, 1));
  for (int j = 1; j <= n; ++j) {
    const BlockTab& p1 = out[j - 1];
    const int hp = hs[j - 1];
    const int hpp = j >= 2 ? hs[j - 2] : 0;
    auto cand = [&](const Mat& V) {
      Mat C(np, d * hp);
      for (int k = 0; k < d; ++k) C.middleCols(k * hp, hp) = y.col(k).asDiagonal() * V;
      return C;
    };
    auto prev = [&](auto get) {
      Mat P(np, hp + hpp);
      P.leftCols(hp) = get(out[j - 1]);
      if (hpp > 0) P.rightCols(hpp) = get(out[j - 2]);
      return P;
    };
    const Mat& T = *Ts[j];
    const Mat& H = *Hs[j];
    BlockTab& b = out[j];
    b.val = cand(p1.val) * T - prev([](const BlockTab& t) -> const Mat& { return t.val; }) * H;
    if (order >= 1) {
      b.d1.resize(d);
      for (int l = 0; l < d; ++l) {
        Mat C = cand(p1.d1[l]);
        C.middleCols(l * hp, hp) += p1.val;
        b.d1[l] = C * T - prev([l](const BlockTab& t) -> const Mat& { return t.d1[l]; }) * H;
      }
    }
    if (order >= 2) {
      b.d2.resize(d * d);
      for (int l = 0; l < d; ++l)
        for (int m = l; m < d; ++m) {
          Mat C = cand(p1.d2[l * d + m]);
          C.middleCols(l * hp, hp) += p1.d1[m];
          C.middleCols(m * hp, hp) += p1.d1[l];
          b.d2[l * d + m] = C * T - prev([l, m, d](const BlockTab& t) -> const Mat& { return t.d2[l * d + m]; }) * H;
          if (m != l) b.d2[m * d + l] = b.d2[l * d + m];
        }
    }
  }
  return out;
}

void OrthoBasis::build_block(int n) const {
  // caller holds the mutex
  std::vector<const Mat*> Ts(n), Hs(n);
  std::vector<int> hs(n);
  for (int j = 0; j < n; ++j) {
    Ts[j] = &blocks_[j]->T;
    Hs[j] = &blocks_[j]->H;
    hs[j] = blocks_[j]->h;
  }
  QuadratureRule rule = cell_.quadrature(2 * n);
  std::vector<BlockTab> tab = run_blocks(rule.points, center_, c0_, d_, n - 1, 0, Ts, Hs, hs);
  const Vec sw = rule.weights.cwiseSqrt();
  const int hp = hs[n - 1];
  const int hpp = n >= 2 ? hs[n - 2] : 0;
  const int np = static_cast<int>(rule.points.rows());
  Mat P(np, hp + hpp);
  P.leftCols(hp) = sw.asDiagonal() * tab[n - 1].val;
  if (hpp > 0) P.rightCols(hpp) = sw.asDiagonal() * tab[n - 2].val;
  Mat C(np, d_ * hp);
  for (int k = 0; k < d_; ++k)
    C.middleCols(k * hp, hp) = (rule.points.col(k).array() - center_(k)).matrix().asDiagonal() * P.leftCols(hp);
  Mat S1 = P.transpose() * C;
  C -= P * S1;
  Mat S2 = P.transpose() * C;
  C -= P * S2;
  Mat G = C.transpose() * C;
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  const int h = homogeneous_dim(d_, n);
  const int m = static_cast<int>(G.rows());
  const Vec& lam = es.eigenvalues();
  if (lam(m - h) <= 1e-14 * lam(m - 1)) throw std::runtime_error("OrthoBasis: degree block lost rank");
  Mat T1 = es.eigenvectors().rightCols(h) * lam.tail(h).cwiseSqrt().cwiseInverse().asDiagonal();
  Mat N1 = C * T1;
  Mat S3 = P.transpose() * N1;
  N1 -= P * S3;
  Mat F = inv_sqrt_spd(N1.transpose() * N1);
  auto b = std::make_shared<Block>();
  b->h = h;
  b->T = T1 * F;
  b->H = ((S1 + S2) * T1 + S3) * F;
  blocks_.push_back(b);
}

OrthoBasis::Tab OrthoBasis::tabulate(const Mat& pts, int n, int order) const {
  if (pts.cols() != d_) throw std::runtime_error("tabulate: point dimension mismatch");
  auto snap = snapshot(n);
  std::vector<const Mat*> Ts(n + 1), Hs(n + 1);
  std::vector<int> hs(n + 1);
  for (int j = 0; j <= n; ++j) {
    Ts[j] = &snap[j]->T;
    Hs[j] = &snap[j]->H;
    hs[j] = snap[j]->h;
  }
  std::vector<BlockTab> bt = run_blocks(pts, center_, c0_, d_, n, order, Ts, Hs, hs);
  const int np = static_cast<int>(pts.rows());
  const int sz = size(n);
  Tab t;
  t.val.resize(np, sz);
  if (order >= 1) t.d1.assign(d_, Mat(np, sz));
  if (order >= 2) t.d2.assign(d_ * d_, Mat(np, sz));
  int off = 0;
  for (int j = 0; j <= n; ++j) {
    const int h = hs[j];
    t.val.middleCols(off, h) = bt[j].val;
    for (int l = 0; l < d_ && order >= 1; ++l) t.d1[l].middleCols(off, h) = bt[j].d1[l];
    for (int l = 0; l < d_ * d_ && order >= 2; ++l) t.d2[l].middleCols(off, h) = bt[j].d2[l];
    off += h;
  }
  return t;
}

const Mat& OrthoBasis::deriv(int l, int n) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = deriv_cache_.find({l, n});
    if (it != deriv_cache_.end()) return it->second;
  }
  QuadratureRule rule = cell_.quadrature(std::max(2 * n - 1, 0));
  Tab t = tabulate(rule.points, n, 1);
  std::lock_guard<std::mutex> lock(mutex_);
  for (int k = 0; k < d_; ++k) {
    Mat D = t.val.transpose() * rule.weights.asDiagonal() * t.d1[k];
    deriv_cache_.emplace(std::make_pair(k, n), std::move(D));
  }
  return deriv_cache_.at({l, n});
}

const Mat& OrthoBasis::mult(int k, int n) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = mult_cache_.find({k, n});
    if (it != mult_cache_.end()) return it->second;
  }
  QuadratureRule rule = cell_.quadrature(2 * n + 2);
  Mat big = values(rule.points, n + 1);
  Mat small = big.leftCols(size(n));
  std::lock_guard<std::mutex> lock(mutex_);
  for (int j = 0; j < d_; ++j) {
    Mat X = big.transpose() * (rule.weights.array() * rule.points.col(j).array()).matrix().asDiagonal() * small;
    mult_cache_.emplace(std::make_pair(j, n), std::move(X));
  }
  return mult_cache_.at({k, n});
}

const Mat& OrthoBasis::trace(const Chart& chart, int n) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = trace_cache_.find({&chart, n});
    if (it != trace_cache_.end()) return it->second;
  }
  QuadratureRule rule = chart.sub->quadrature(2 * n);
  Mat sub_vals = chart.sub->basis().values(rule.points, n);
  Mat par_vals = values(chart.to_parent_rows(rule.points), n);
  Mat T = sub_vals.transpose() * rule.weights.asDiagonal() * par_vals;
  std::lock_guard<std::mutex> lock(mutex_);
  return trace_cache_.emplace(std::make_pair(&chart, n), std::move(T)).first->second;
}

const Mat& OrthoBasis::vertex_values(int n) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = vertex_cache_.find(n);
    if (it != vertex_cache_.end()) return it->second;
  }
  Mat V = values(cell_.vertices(), n);
  std::lock_guard<std::mutex> lock(mutex_);
  return vertex_cache_.emplace(n, std::move(V)).first->second;
}

LMat OrthoBasis::monomials(int n) const {
  auto snap = snapshot(n);
  const auto ex = monomial_exponents(d_, n);
  const int nm = static_cast<int>(ex.size());
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < nm; ++i) index[ex[i]] = i;
  // coefficients in centered monomials y = x - center
  std::vector<LMat> blocks(n + 1);
  blocks[0] = LMat::Zero(nm, 1);
  blocks[0](0, 0) = c0_;
  for (int j = 1; j <= n; ++j) {
    const int hp = snap[j - 1]->h;
    const int hpp = j >= 2 ? snap[j - 2]->h : 0;
    LMat cand = LMat::Zero(nm, d_ * hp);
    for (int k = 0; k < d_; ++k)
      for (int c = 0; c < hp; ++c)
        for (int r = 0; r < nm; ++r) {
          long double v = blocks[j - 1](r, c);
          if (v == 0) continue;
          std::vector<int> e = ex[r];
          e[k] += 1;
          cand(index.at(e), k * hp + c) += v;
        }
    LMat prev(nm, hp + hpp);
    prev.leftCols(hp) = blocks[j - 1];
    if (hpp > 0) prev.rightCols(hpp) = blocks[j - 2];
    blocks[j] = cand * snap[j]->T.cast<long double>() - prev * snap[j]->H.cast<long double>();
  }
  LMat Y(nm, size(n));
  int off = 0;
  for (int j = 0; j <= n; ++j) {
    Y.middleCols(off, snap[j]->h) = blocks[j];
    off += snap[j]->h;
  }
  // expand (x - c)^alpha into Cartesian monomials
  LMat S = LMat::Zero(nm, nm);
  for (int r = 0; r < nm; ++r) {
    std::vector<std::vector<std::pair<int, long double>>> factors(d_);
    for (int i = 0; i < d_; ++i) {
      const int a = ex[r][i];
      long double binom = 1;
      for (int jj = 0; jj <= a; ++jj) {
        // coefficient of x^jj in (x - c)^a
        long double coef = binom * std::pow(static_cast<long double>(-center_(i)), a - jj);
        factors[i].push_back({jj, coef});
        binom = binom * (a - jj) / (jj + 1);
      }
    }
    std::vector<int> e(d_, 0);
    std::function<void(int, long double)> rec = [&](int i, long double acc) {
      if (i == d_) {
        S(index.at(e), r) += acc;
        return;
      }
      for (auto& [jj, c] : factors[i]) {
        e[i] = jj;
        rec(i + 1, acc * c);
      }
    };
    rec(0, 1.0L);
  }
  return S * Y;
}

}  // namespace exseq
