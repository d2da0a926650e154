#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exseq/projectors.hpp"
#include "exseq/sobolev.hpp"

namespace exseq {

inline constexpr int study_p_cap = 12;
inline constexpr int study_p_cap_1d = 18;

struct StudyConfig {
  std::vector<ProjectorId> operators{ProjectorId::curl3d};
  int p_min = 2;
  int p_max = 8;
  // entire | rpow | poly | all ; in 1D "mixed" (= all) is accepted too
  std::string suite = "entire";
  std::vector<double> s_values{0.0};
  double alpha = 1.5;  // exponent of the r^alpha fields
  int dual_offset = 6;
  unsigned seed = 1;
  bool timing = false;  // adds wall_time to records (breaks byte-identical output)
  std::string out;      // empty or "-" writes to stdout
  std::string format = "csv";
};

// Throws std::runtime_error describing the first violated constraint.
void validate(const StudyConfig& cfg);

// Apply "key = value" lines (keys mirror the CLI flags) to cfg.
void apply_config_text(StudyConfig& cfg, const std::string& text);
void apply_config_file(StudyConfig& cfg, const std::string& path);

std::vector<ProjectorId> parse_operators(const std::string& list);
std::vector<double> parse_s_values(const std::string& list);

// Largest admissible s for an operator (exclusive for the 2D family).
double s_limit(ProjectorId id);
// Exponent r in  error <= C p^{-r} * best ; grows with s.
double theory_rate(ProjectorId id, double s);
// Norm of the best-approximation infimum on the right-hand side.
NormSpec best_norm(ProjectorId id);
// Name of the error norm at a given s.
std::string error_norm_name(ProjectorId id, double s);
// Error of the interpolant v of u in the operator's s-dependent norm.
// Dual parts use test polynomials of degree v.degree + dual_offset.
double interpolation_error(ProjectorId id, const AnalyticField& u, const Poly& v, double s, int dual_offset);

// Field ids used for an operator under a suite; "poly" entries are generated from the seed.
std::vector<std::string> study_fields(ProjectorId id, const std::string& suite, double alpha);
// Resolve a study field id (named field or "poly<seed>").
AnalyticField study_field(ProjectorId id, const std::string& field, int p);

struct StudyRecord {
  std::string op;
  std::string field;
  std::string norm;
  std::string best_norm;
  double s = 0.0;
  int p = 0;
  double error = 0.0;
  double best = 0.0;
  double ratio = 0.0;
  double theory_rate = 0.0;
  std::string flag;  // empty, "exact", "nonfinite", or an error message
  std::optional<double> wall_time;
};

struct SlopeRecord {
  std::string op;
  std::string field;
  double s = 0.0;
  int p_from = 0;
  int p_to = 0;
  int points = 0;
  double ratio_slope = 0.0;  // d log(ratio) / d log p
  double error_slope = 0.0;  // d log(error) / d log p
  double theory_slope = 0.0;
};

struct ConvergenceResult {
  std::vector<StudyRecord> records;
  std::vector<SlopeRecord> slopes;
};

ConvergenceResult run_convergence(const StudyConfig& cfg);

// First p of the fitting window for a range.
int upper_half_start(int p_min, int p_max);
// Least-squares slope of log y against log p over the upper half of the range;
// NaN when fewer than two finite positive points remain.
double upper_half_slope(const std::vector<int>& p, const std::vector<double>& y);

// L2 error of the gradient interpolant through its gradient, measured by discrete duality.
struct DualityRecord {
  std::string op;
  std::string field;
  int p = 0;
  double grad_l2 = 0.0;      // ||grad e||
  double dual = 0.0;         // ||grad e||_{H~^{-1}} at dual_offset
  double dual_alt = 0.0;     // same at dual_offset + 2
  double gap = 0.0;          // dual / grad_l2
  double l2_gap = 0.0;       // ||e||_{L2} / ||e||_{H1}
  double p_stability = 0.0;  // |dual - dual_alt| / dual_alt
};

std::vector<DualityRecord> run_duality(ProjectorId id, const std::string& field, int p_min, int p_max,
                                       int dual_offset);

}  // namespace exseq
