#include "exseq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"

namespace exseq {

using ojson = nlohmann::ordered_json;

namespace {

Value num(double v) { return v; }
Value opt_num(const std::optional<double>& v) { return v ? Value(*v) : Value(); }
Value integer(int v) { return static_cast<long long>(v); }

std::string csv_field(const Value& v) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + "\"";
    }
  } vis;
  return std::visit(vis, v);
}

ojson json_value(const Value& v) {
  struct {
    ojson operator()(std::monostate) const { return nullptr; }
    ojson operator()(bool b) const { return b; }
    ojson operator()(long long i) const { return i; }
    ojson operator()(double d) const {
      if (!std::isfinite(d)) return nullptr;
      // same digits as the CSV rendering
      return std::stod(format_double(d));
    }
    ojson operator()(const std::string& s) const { return s; }
  } vis;
  return std::visit(vis, v);
}

ojson table_json(const Table& t) {
  ojson arr = ojson::array();
  for (const auto& row : t.rows) {
    ojson obj = ojson::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = json_value(row.at(i));
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::vector<std::string> record_columns(bool timing) {
  std::vector<std::string> c{"op", "field", "norm", "best_norm", "s", "p", "error", "best", "ratio", "theory_rate", "flag"};
  if (timing) c.push_back("wall_time");
  return c;
}

std::vector<Value> record_row(const StudyRecord& r, bool timing) {
  std::vector<Value> row{r.op, r.field, r.norm, r.best_norm, num(r.s), integer(r.p), num(r.error), num(r.best),
                         num(r.ratio), num(r.theory_rate), r.flag};
  if (timing) row.push_back(opt_num(r.wall_time));
  return row;
}

const std::vector<std::string> slope_columns{"op", "field", "s", "p_from", "p_to", "points", "ratio_slope", "error_slope",
                                             "theory_slope"};

std::vector<Value> slope_row(const SlopeRecord& r) {
  return {r.op, r.field, num(r.s), integer(r.p_from), integer(r.p_to), integer(r.points), num(r.ratio_slope),
          num(r.error_slope), num(r.theory_slope)};
}

ojson poly_coeffs_json(const Cell& cell, int value_dim, int degree, const Vec& coeffs, const LMat& M) {
  const int s = cell.basis().size(degree);
  ojson comps = ojson::array();
  for (int c = 0; c < value_dim; ++c) {
    Eigen::Matrix<long double, Eigen::Dynamic, 1> x = coeffs.segment(c * s, s).cast<long double>();
    Eigen::Matrix<long double, Eigen::Dynamic, 1> m = M * x;
    ojson arr = ojson::array();
    for (int i = 0; i < m.size(); ++i) arr.push_back(std::stod(format_double(static_cast<double>(m(i)))));
    comps.push_back(std::move(arr));
  }
  return comps;
}

ojson exponents_json(int d, int n) {
  ojson ex = ojson::array();
  for (const auto& e : monomial_exponents(d, n)) ex.push_back(e);
  return ex;
}

ojson cell_json(const Cell& c) {
  ojson v = ojson::array();
  for (int i = 0; i < c.num_vertices(); ++i) {
    ojson row = ojson::array();
    for (int l = 0; l < c.dim(); ++l) row.push_back(c.vertices()(i, l));
    v.push_back(row);
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
  out += "\r\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw std::runtime_error("to_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\r\n";
  }
  return out;
}

std::string to_json(const Table& t) { return table_json(t).dump(2) + "\n"; }

std::string to_json(const std::vector<std::pair<std::string, Table>>& parts) {
  ojson obj = ojson::object();
  for (const auto& [name, t] : parts) obj[name] = table_json(t);
  return obj.dump(2) + "\n";
}

std::string render(const Table& t, const std::string& format) {
  if (format == "csv") return to_csv(t);
  if (format == "json") return to_json(t);
  throw std::runtime_error("unknown format: " + format);
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

Table verify_table(const std::vector<VerifyRow>& rows) {
  Table t{{"section", "name", "p", "kind", "value", "tolerance", "pass"}, {}};
  for (const auto& r : rows) {
    Value v = r.kind == "count" ? Value(static_cast<long long>(std::llround(r.value))) : num(r.value);
    Value tl = r.kind == "count" ? Value(static_cast<long long>(std::llround(r.tolerance))) : num(r.tolerance);
    t.rows.push_back({r.section, r.name, integer(r.p), r.kind, v, tl, r.pass});
  }
  return t;
}

Table dims_table_output(const std::vector<DimsRow>& rows) {
  Table t{{"p", "space", "dim", "closed_form", "match"}, {}};
  for (const auto& r : rows) t.rows.push_back({integer(r.p), r.space, integer(r.dim), integer(r.closed_form), r.match});
  return t;
}

Table records_table(const std::vector<StudyRecord>& recs, bool timing) {
  Table t{record_columns(timing), {}};
  for (const auto& r : recs) t.rows.push_back(record_row(r, timing));
  return t;
}

Table slopes_table(const std::vector<SlopeRecord>& slopes) {
  Table t{slope_columns, {}};
  for (const auto& r : slopes) t.rows.push_back(slope_row(r));
  return t;
}

Table convergence_table(const ConvergenceResult& res, bool timing) {
  Table t;
  t.columns = {"row"};
  auto rc = record_columns(timing);
  t.columns.insert(t.columns.end(), rc.begin(), rc.end());
  for (const auto& c : slope_columns)
    if (std::find(t.columns.begin(), t.columns.end(), c) == t.columns.end()) t.columns.push_back(c);
  auto index = [&t](const std::string& c) { return std::find(t.columns.begin(), t.columns.end(), c) - t.columns.begin(); };
  for (const auto& r : res.records) {
    std::vector<Value> row(t.columns.size());
    row[0] = std::string("record");
    auto vals = record_row(r, timing);
    for (std::size_t i = 0; i < rc.size(); ++i) row[index(rc[i])] = vals[i];
    t.rows.push_back(std::move(row));
  }
  for (const auto& s : res.slopes) {
    std::vector<Value> row(t.columns.size());
    row[0] = std::string("slope");
    auto vals = slope_row(s);
    for (std::size_t i = 0; i < slope_columns.size(); ++i) row[index(slope_columns[i])] = vals[i];
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table duality_table(const std::vector<DualityRecord>& recs) {
  Table t{{"op", "field", "p", "grad_l2", "dual", "dual_alt", "gap", "l2_gap", "p_stability"}, {}};
  for (const auto& r : recs)
    t.rows.push_back({r.op, r.field, integer(r.p), num(r.grad_l2), num(r.dual), num(r.dual_alt), num(r.gap),
                      num(r.l2_gap), num(r.p_stability)});
  return t;
}

Table friedrichs_table(const std::vector<FriedrichsResult>& rows) {
  Table t{{"case", "p", "dim", "constant", "min_singular", "empty"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({to_string(r.fcase), integer(r.p), integer(r.dim), num(r.constant), num(r.min_ratio), r.empty});
  return t;
}

std::string basis_json(const PolySpace& space) {
  const Cell& c = *space.cell;
  LMat M = c.basis().monomials(space.degree);
  ojson doc = ojson::object();
  doc["space"] = to_string(space.kind);
  doc["p"] = space.p;
  doc["cell"] = cell_json(c);
  doc["value_dim"] = space.value_dim;
  doc["degree"] = space.degree;
  doc["exponents"] = exponents_json(c.dim(), space.degree);
  ojson fns = ojson::array();
  for (int j = 0; j < space.dim(); ++j)
    fns.push_back(poly_coeffs_json(c, space.value_dim, space.degree, space.basis.col(j), M));
  doc["functions"] = std::move(fns);
  return doc.dump(2) + "\n";
}

std::string poly_json(const Poly& v, const std::string& label) {
  const Cell& c = *v.cell;
  ojson doc = ojson::object();
  doc["label"] = label;
  doc["cell"] = cell_json(c);
  doc["value_dim"] = v.value_dim;
  doc["degree"] = v.degree;
  doc["exponents"] = exponents_json(c.dim(), v.degree);
  doc["components"] = poly_coeffs_json(c, v.value_dim, v.degree, v.coeffs, c.basis().monomials(v.degree));
  return doc.dump(2) + "\n";
}

Table samples_table(const Mat& pts, const Mat& field, const Mat& interp) {
  Table t;
  const char* axes[] = {"x", "y", "z"};
  for (int l = 0; l < pts.cols(); ++l) t.columns.push_back(axes[l]);
  for (int c = 0; c < field.cols(); ++c) t.columns.push_back("u" + std::to_string(c));
  for (int c = 0; c < interp.cols(); ++c) t.columns.push_back("pi_u" + std::to_string(c));
  for (int i = 0; i < pts.rows(); ++i) {
    std::vector<Value> row;
    for (int l = 0; l < pts.cols(); ++l) row.push_back(num(pts(i, l)));
    for (int c = 0; c < field.cols(); ++c) row.push_back(num(field(i, c)));
    for (int c = 0; c < interp.cols(); ++c) row.push_back(num(interp(i, c)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace exseq
