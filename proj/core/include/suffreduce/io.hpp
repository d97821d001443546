#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "suffreduce/estimators.hpp"
#include "suffreduce/linkage.hpp"
#include "suffreduce/symmat.hpp"

namespace suffreduce {

/// Comma-separated decimals, one row per line. Blank lines are skipped.
/// With header = true the first non-blank line is discarded. Throws
/// InvalidArgument on ragged rows, non-numeric cells or an empty table.
Matrix read_csv(std::istream& in, bool header = false);
Matrix read_csv_file(const std::filesystem::path& path, bool header = false);

/// Like read_csv, but every cell must be -1, 0 or +1.
Matrix read_votes_csv(std::istream& in, bool header = false);

/// 17 significant digits, so read_csv(write_csv(m)) == m bit for bit.
std::string format_double(double v);
void write_csv(std::ostream& out, const Matrix& m);
void write_csv(std::ostream& out, const SymMatrix& m);
void write_csv(std::ostream& out, const Vector& v);
void write_csv_file(const std::filesystem::path& path, const SymMatrix& m);

std::string to_json(const SolveReport& report, const EstimatorSpec& spec);
std::string partition_to_json(const Partition& partition);

} // namespace suffreduce
