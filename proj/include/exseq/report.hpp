#pragma once

#include <string>
#include <variant>
#include <vector>

#include "exseq/polyspace.hpp"
#include "exseq/spectra.hpp"
#include "exseq/studies.hpp"
#include "exseq/verify.hpp"

namespace exseq {

// Cell of an output table; monostate renders as an empty CSV field / JSON null.
using Value = std::variant<std::monostate, bool, long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

// Doubles use %.10e; non-finite values print as nan/inf in CSV and null in JSON.
std::string format_double(double v);
std::string to_csv(const Table& t);
// JSON array with one object per row, keys in column order.
std::string to_json(const Table& t);
std::string render(const Table& t, const std::string& format);
// JSON object {"name": array, ...} built from several tables.
std::string to_json(const std::vector<std::pair<std::string, Table>>& parts);

// Write to a file; empty path or "-" writes to stdout.
void write_text(const std::string& text, const std::string& path);

Table verify_table(const std::vector<VerifyRow>& rows);
Table dims_table_output(const std::vector<DimsRow>& rows);
Table records_table(const std::vector<StudyRecord>& recs, bool timing);
Table slopes_table(const std::vector<SlopeRecord>& slopes);
// records and slopes in one CSV table, distinguished by the "row" column
Table convergence_table(const ConvergenceResult& res, bool timing);
Table duality_table(const std::vector<DualityRecord>& recs);
// min_singular is the smallest singular value of D on the constrained subspace (= min_ratio)
Table friedrichs_table(const std::vector<FriedrichsResult>& rows);

// JSON documents with Cartesian monomial coefficients.
std::string basis_json(const PolySpace& space);
std::string poly_json(const Poly& v, const std::string& label);
// Sampled values of a field and an interpolant at points (rows), as CSV.
Table samples_table(const Mat& pts, const Mat& field, const Mat& interp);

}  // namespace exseq
