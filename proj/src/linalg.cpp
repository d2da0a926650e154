#include "exseq/linalg.hpp"

#include <stdexcept>
#include <vector>

namespace exseq {

namespace {

double cutoff(const Vec& s, double tol) { return s.size() == 0 ? 0.0 : tol * s(0); }

}  // namespace

Mat orthonormal_range(const Mat& a, double tol) {
  if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  const double c = cutoff(s, tol);
  int r = 0;
  while (r < s.size() && s(r) > c && s(r) > 0.0) ++r;
  return svd.matrixU().leftCols(r);
}

Mat null_space(const Mat& a, int ncols, double tol) {
  if (a.cols() != ncols) throw std::runtime_error("null_space: column mismatch");
  if (ncols == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(ncols, ncols);
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double c = cutoff(s, tol);
  int r = 0;
  while (r < s.size() && s(r) > c && s(r) > 0.0) ++r;
  return svd.matrixV().rightCols(ncols - r);
}

Mat pinv(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return Mat::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double c = cutoff(s, tol);
  Vec sinv = Vec::Zero(s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > c && s(i) > 0.0) sinv(i) = 1.0 / s(i);
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(a);
  const Vec& s = svd.singularValues();
  const double c = cutoff(s, tol);
  int r = 0;
  while (r < s.size() && s(r) > c && s(r) > 0.0) ++r;
  return r;
}

Mat inv_sqrt_spd(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("inv_sqrt_spd: eigen solver failed");
  Vec ev = es.eigenvalues();
  if (ev.size() > 0 && ev(0) <= 0.0) throw std::runtime_error("inv_sqrt_spd: matrix not positive definite");
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::runtime_error("fit_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Mat embed_components(int m, int n_small, int n_big) {
  Mat e = Mat::Zero(m * n_big, m * n_small);
  for (int c = 0; c < m; ++c) e.block(c * n_big, c * n_small, n_small, n_small).setIdentity();
  return e;
}

}  // namespace exseq
