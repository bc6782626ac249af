#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "amgm/counterex.hpp"
#include "amgm/inequality.hpp"
#include "amgm/permprod.hpp"
#include "amgm/sgdlab.hpp"

namespace amgm {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Ordered key/value pairs written ahead of every table.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Column-named rows. Cells are JSON scalars (number, string, bool, null).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

enum class Format { Csv, Json };
Format parse_format(std::string_view name);  ///< ParseError on anything else

/// Shortest decimal string that parses back to the same double; "inf",
/// "-inf", "nan" for the non-finite values.
std::string format_double(double v);

/// Strict full-string parse; ParseError on junk.
double parse_double(std::string_view s);

/// '#'-prefixed "key=value" metadata lines, then a header row, then rows.
void write_csv(std::ostream& os, const Metadata& meta, const Table& table);

/// Array whose first element is {"metadata": {...}} and whose remaining
/// elements are one object per row. Non-finite numbers are written as strings.
void write_json(std::ostream& os, const Metadata& meta, const Table& table);

void write_table(std::ostream& os, Format format, const Metadata& meta, const Table& table);

/// Inverse of write_csv. Cells come back as strings.
Table read_csv(std::istream& is, Metadata* meta = nullptr);
/// Inverse of write_json.
Table read_json(std::istream& is, Metadata* meta = nullptr);
Table read_table(std::istream& is, Format format, Metadata* meta = nullptr);

// ---- Matrix families -----------------------------------------------------

/// {"d": int, "matrices": [[[row], ...], ...]}
nlohmann::json family_to_json(const MatrixFamily& family);
MatrixFamily family_from_json(const nlohmann::json& j);
MatrixFamily read_family_file(const std::string& path);

// ---- Domain tables -------------------------------------------------------

Table reports_table(const std::vector<InequalityReport>& reports);
std::vector<InequalityReport> reports_from_table(const Table& table);

Table counterexample_table(const std::vector<CounterexampleReport>& reports);
Table sweep_table(const std::vector<SweepRow>& rows);

/// Columns (scheme, run, iter, loss, proj_norm).
void append_trajectory_rows(Table& table, const Trajectory& tr, std::uint64_t run);
Table trajectory_table();

}  // namespace amgm
