#pragma once

#include <string>
#include <vector>

namespace exseq {

struct VerifyRow {
  std::string section;
  std::string name;
  int p = 0;
  // "count": value must equal tolerance; "residual" and "ratio": value <= tolerance;
  // "positive": value > tolerance
  std::string kind;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  int p_min = 0;
  int p_max = 6;
  unsigned seed = 1;
  int projection_samples = 200;
  // sections to run; empty runs everything
  std::vector<std::string> sections;
};

std::vector<std::string> verify_sections();
std::vector<VerifyRow> run_verification(const VerifyOptions& opt);
bool all_pass(const std::vector<VerifyRow>& rows);

struct DimsRow {
  int p = 0;
  std::string space;
  int dim = 0;
  int closed_form = 0;
  bool match = false;
};

// Numerical dimensions of the discrete spaces against closed forms, plus the
// number of conditions imposed by the staged projectors.
std::vector<DimsRow> dims_table(int p_min, int p_max);

// Pinned tolerances shared by the report and the acceptance checks.
namespace tol {
inline constexpr double projection = 1e-9;
inline constexpr double commuting_poly = 1e-9;
inline constexpr double commuting_entire = 1e-7;
inline constexpr double poincare = 1e-10;
inline constexpr double helmholtz = 1e-9;
inline constexpr double friedrichs_window = 2.0;
inline constexpr double lifting = 1e-10;
inline constexpr double endpoint = 1e-12;
inline constexpr double lift_invariance = 1e-9;
}  // namespace tol

}  // namespace exseq
