#include "suffreduce/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "json.hpp"
#include "suffreduce/error.hpp"

namespace suffreduce {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, std::size_t line) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw InvalidArgument("csv line " + std::to_string(line) + ": not a finite number: '" +
                          std::string(cell) + "'");
  return v;
}

nlohmann::json matrix_json(const SymMatrix& m) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json input_json(const Input& x) {
  if (const auto* v = std::get_if<Vector>(&x)) return *v;
  return matrix_json(std::get<SymMatrix>(x));
}

} // namespace

Matrix read_csv(std::istream& in, bool header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    for (std::size_t start = 0;;) {
      const std::size_t comma = s.find(',', start);
      row.push_back(parse_cell(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start), lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("csv line " + std::to_string(lineno) + ": expected " +
                            std::to_string(rows.front().size()) + " cells, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("csv: no data rows");
  return Matrix::from_rows(rows);
}

Matrix read_csv_file(const std::filesystem::path& path, bool header) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_csv(in, header);
}

Matrix read_votes_csv(std::istream& in, bool header) {
  Matrix m = read_csv(in, header);
  for (double v : m.data())
    if (v != -1.0 && v != 0.0 && v != 1.0)
      throw InvalidArgument("votes csv: cells must be -1, 0 or +1 (use --general for real data)");
  return m;
}

std::string format_double(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const SymMatrix& m) { write_csv(out, m.to_dense()); }

void write_csv(std::ostream& out, const Vector& v) {
  for (double x : v) out << format_double(x) << '\n';
}

void write_csv_file(const std::filesystem::path& path, const SymMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_csv(out, m);
}

std::string to_json(const SolveReport& r, const EstimatorSpec& spec) {
  nlohmann::json j;
  j["estimator"] = to_string(spec.family);
  j["penalty"] = to_string(spec.penalty.kind);
  if (spec.penalty.scalar_weight()) j["lambda"] = spec.penalty.scalar();
  if (spec.family == Family::FantopeSPCA) j["k"] = spec.k;
  if (spec.family == Family::SparseCovariance) j["eps"] = spec.eps;
  j["objective"] = r.objective;
  j["kkt_residual"] = r.kkt_residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["wall_seconds"] = r.wall_seconds;
  j["support"] = input_json(r.support);
  auto blocks = nlohmann::json::array();
  for (const auto& b : r.blocks)
    blocks.push_back({{"indices", b.indices},
                      {"seconds", b.seconds},
                      {"iterations", b.iterations},
                      {"converged", b.converged},
                      {"kkt_residual", b.kkt_residual}});
  j["blocks"] = std::move(blocks);
  return j.dump(2);
}

std::string partition_to_json(const Partition& partition) {
  nlohmann::json j;
  j["labels"] = partition.labels();
  j["blocks"] = partition.blocks();
  return j.dump(2);
}

} // namespace suffreduce
