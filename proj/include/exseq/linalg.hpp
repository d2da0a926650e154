#pragma once

#include <Eigen/Dense>
#include <vector>

namespace exseq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Relative singular value cutoff used for every rank decision.
inline constexpr double rank_tol = 1e-10;

// Orthonormal basis (columns) of range(a).
Mat orthonormal_range(const Mat& a, double tol = rank_tol);

// Orthonormal basis (columns) of ker(a). A matrix with zero rows has the full identity as kernel.
Mat null_space(const Mat& a, int ncols, double tol = rank_tol);

// Moore-Penrose pseudo-inverse with relative cutoff.
Mat pinv(const Mat& a, double tol = rank_tol);

int numerical_rank(const Mat& a, double tol = rank_tol);

// Symmetric positive definite inverse square root, via eigen-decomposition.
Mat inv_sqrt_spd(const Mat& a);

// Least-squares fit slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Block of rows for a stacked vector polynomial: component c of m, each of length n.
inline Eigen::Block<Mat> comp_rows(Mat& a, int c, int n) { return a.middleRows(c * n, n); }

// Selection matrix of the first k entries of each of m components of length n, into components of length big.
Mat embed_components(int m, int n_small, int n_big);

}  // namespace exseq
