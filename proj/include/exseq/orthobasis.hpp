#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "exseq/linalg.hpp"
#include "exseq/refsimplex.hpp"

namespace exseq {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// dim P_n in d variables
int poly_dim(int d, int n);
// number of homogeneous monomials of degree n in d variables
int homogeneous_dim(int d, int n);
// Graded exponent list for degree <= n (degree blocks in increasing order).
std::vector<std::vector<int>> monomial_exponents(int d, int n);

// L2(K)-orthonormal, degree-graded basis of P_N(K), built block by block by
// multiplying the previous block by centered coordinates and re-orthogonalizing
// against the two preceding blocks. The first poly_dim(d, n) functions span P_n.
class OrthoBasis {
 public:
  static constexpr int max_degree = 20;

  explicit OrthoBasis(const Cell& cell);

  int dim() const { return d_; }
  int size(int n) const { return poly_dim(d_, n); }
  void ensure(int n) const;

  struct Tab {
    Mat val;               // npts x size(n)
    std::vector<Mat> d1;   // d entries
    std::vector<Mat> d2;   // d*d entries, index l*d+m
  };
  Tab tabulate(const Mat& pts, int n, int order) const;
  Mat values(const Mat& pts, int n) const { return tabulate(pts, n, 0).val; }

  // Exact operator matrices in basis coordinates.
  const Mat& deriv(int l, int n) const;  // size(n) x size(n)
  const Mat& mult(int k, int n) const;   // size(n+1) x size(n), multiplication by x_k
  // L2 projection onto the sub-cell basis of the restriction: sub.size(n) x size(n)
  const Mat& trace(const Chart& chart, int n) const;
  // values at the cell vertices: (dim+1) x size(n)
  const Mat& vertex_values(int n) const;

  // Cartesian monomial coefficients (rows follow monomial_exponents(d, n)).
  LMat monomials(int n) const;

 private:
  struct Block {
    int h = 0;
    Mat T;  // (d*h_{n-1}) x h
    Mat H;  // (h_{n-1} + h_{n-2}) x h
  };
  void build_block(int n) const;
  std::vector<std::shared_ptr<const Block>> snapshot(int n) const;

  const Cell& cell_;
  int d_;
  Vec center_;
  double c0_;
  mutable std::mutex mutex_;
  mutable std::vector<std::shared_ptr<const Block>> blocks_;
  mutable std::map<std::pair<int, int>, Mat> deriv_cache_, mult_cache_;
  mutable std::map<std::pair<const Chart*, int>, Mat> trace_cache_;
  mutable std::map<int, Mat> vertex_cache_;
};

}  // namespace exseq
