#pragma once

#include <memory>
#include <string>
#include <vector>

#include "exseq/field.hpp"
#include "exseq/polyspace.hpp"

namespace exseq {

enum class ProjectorId { grad3d, curl3d, div3d, l2_3d, grad2d, curl2d, l2_2d, grad1d };

std::string to_string(ProjectorId id);
ProjectorId projector_from_string(const std::string& s);
std::vector<ProjectorId> all_projectors();
int projector_dim(ProjectorId id);        // cell dimension
int projector_input_dim(ProjectorId id);  // value dimension of the input field

// Data consumed by a plan: vertex values and inner products of derived
// quantities of u against orthonormal masters of degree N on each sub-cell.
// Each matrix has one column per input.
//   grad : edge [d_t u], face [t1.grad u, t2.grad u], cell [d_l u]
//   curl : edge [t.u], face [t1.u, t2.u, n.curl u], cell [u_l, curl u]
//   div  : face [n.u], cell [u_l, div u]
//   L2   : cell [u]
struct Loads {
  Mat vertex;
  std::vector<Mat> edge;
  std::vector<Mat> face;
  Mat cell;
  int cols() const { return static_cast<int>(cell.cols()); }
};

struct StageInfo {
  std::string name;
  int unknowns = 0;
  double condition = 1.0;
};

struct StageOutput {
  std::vector<Mat> edge;  // traces fixed by the edge stage (edge ambient coordinates)
  std::vector<Mat> face;  // traces fixed by the face stage
  Mat result;             // ambient coefficients of the interpolant on the cell
  double residual = 0.0;  // largest relative violation of any stage condition
};

struct PlanOptions {
  // 0: minimum-norm lifting of fixed traces; otherwise a seeded random right inverse.
  unsigned lift_seed = 0;
};

// One of the projection-based interpolants as a staged solver on the reference cell
// (or any cell of the right dimension). For grad1d the target is P_p; otherwise
// the target is the degree-p member of the complex (W_{p+1}, Q_p, V_p, W_p).
class ProjectorPlan {
 public:
  ProjectorPlan(ProjectorId id, int p, CellPtr cell = nullptr, PlanOptions opt = {});

  ProjectorId id() const;
  int p() const;
  int degree() const;  // ambient degree of the target
  const CellPtr& cell() const;
  const SpacePtr& target() const;
  const std::vector<StageInfo>& stages() const;

  Loads loads(const AnalyticField& u) const;
  Loads loads(const Poly& u) const;
  // columns are input polynomials at ambient degree n
  Loads loads(const Mat& coeffs, int n) const;

  StageOutput run(const Loads& l) const;
  Mat apply(const Loads& l) const { return run(l).result; }
  Poly apply(const AnalyticField& u) const;
  Poly apply(const Poly& u) const;
  // coordinates in the orthonormal target basis
  Vec coords(const Poly& interpolant) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

// Shared plans for the reference cells.
std::shared_ptr<const ProjectorPlan> reference_plan(ProjectorId id, int p);

struct CommutingResult {
  std::string identity;
  std::string input;
  int p = 0;
  double residual = 0.0;  // L2 norm of the discrepancy relative to the field scale
};

// suite "poly": random polynomials of degree p+3 (seeded); suite "entire": named entire fields.
std::vector<CommutingResult> check_commuting(int p, const std::string& suite, unsigned seed = 1);

}  // namespace exseq
