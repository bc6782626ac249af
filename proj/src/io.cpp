#include "amgm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "amgm/error.hpp"

namespace amgm {

using nlohmann::json;

namespace {

std::string cell_text(const json& c) {
  if (c.is_null()) return "";
  if (c.is_string()) return c.get<std::string>();
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_number_unsigned()) return std::to_string(c.get<std::uint64_t>());
  if (c.is_number_integer()) return std::to_string(c.get<std::int64_t>());
  if (c.is_number_float()) return format_double(c.get<double>());
  return c.dump();
}

json json_cell(const json& c) {
  if (c.is_number_float() && !std::isfinite(c.get<double>())) return format_double(c.get<double>());
  return c;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// Splits one CSV record; quoted fields may span lines.
bool read_record(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(is, line)) return false;
  std::string cur;
  bool quoted = false;
  for (;;) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    if (!quoted) break;
    if (!std::getline(is, line)) throw LabError(ErrorKind::ParseError, "unterminated quoted CSV field");
    cur += '\n';
  }
  fields.push_back(std::move(cur));
  return true;
}

std::size_t column(const Table& t, std::string_view name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  throw LabError(ErrorKind::ParseError, "missing column " + std::string(name));
}

double as_double(const json& c) {
  if (c.is_number()) return c.get<double>();
  if (c.is_string()) return parse_double(c.get<std::string>());
  throw LabError(ErrorKind::ParseError, "expected a number");
}

std::uint64_t as_uint(const json& c) {
  if (c.is_number_unsigned()) return c.get<std::uint64_t>();
  if (c.is_number_integer() && c.get<std::int64_t>() >= 0) return c.get<std::uint64_t>();
  if (c.is_string()) {
    const auto s = c.get<std::string>();
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  throw LabError(ErrorKind::ParseError, "expected a nonnegative integer");
}

bool as_bool(const json& c) {
  if (c.is_boolean()) return c.get<bool>();
  if (c.is_string()) {
    const auto s = c.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  throw LabError(ErrorKind::ParseError, "expected a boolean");
}

bool is_empty_cell(const json& c) {
  return c.is_null() || (c.is_string() && c.get<std::string>().empty());
}

json optional_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw LabError(ErrorKind::ParseError, "format must be csv or json");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(std::string_view s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw LabError(ErrorKind::ParseError, "not a number: '" + std::string(s) + "'");
  return v;
}

void write_csv(std::ostream& os, const Metadata& meta, const Table& table) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << csv_escape(table.columns[i]);
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i]));
    os << '\n';
  }
}

void write_json(std::ostream& os, const Metadata& meta, const Table& table) {
  json arr = json::array();
  json m = json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  arr.push_back({{"metadata", m}});
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < table.columns.size() && i < row.size(); ++i)
      obj[table.columns[i]] = json_cell(row[i]);
    arr.push_back(std::move(obj));
  }
  os << arr.dump(1) << '\n';
}

void write_table(std::ostream& os, Format format, const Metadata& meta, const Table& table) {
  if (format == Format::Csv)
    write_csv(os, meta, table);
  else
    write_json(os, meta, table);
}

Table read_csv(std::istream& is, Metadata* meta) {
  Table t;
  std::string line;
  while (is.peek() == '#') {
    std::getline(is, line);
    std::string body = line.substr(1);
    if (!body.empty() && body.front() == ' ') body.erase(0, 1);
    const auto eq = body.find('=');
    if (meta) {
      if (eq == std::string::npos)
        meta->emplace_back(body, "");
      else
        meta->emplace_back(body.substr(0, eq), body.substr(eq + 1));
    }
  }
  std::vector<std::string> fields;
  if (!read_record(is, fields)) throw LabError(ErrorKind::ParseError, "missing CSV header row");
  t.columns = fields;
  while (read_record(is, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != t.columns.size())
      throw LabError(ErrorKind::ParseError, "CSV row width differs from header");
    std::vector<json> row;
    for (auto& f : fields) row.emplace_back(std::move(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_json(std::istream& is, Metadata* meta) {
  json arr;
  try {
    arr = json::parse(is);
  } catch (const json::exception& e) {
    throw LabError(ErrorKind::ParseError, e.what());
  }
  if (!arr.is_array() || arr.empty() || !arr[0].contains("metadata"))
    throw LabError(ErrorKind::ParseError, "expected an array led by a metadata object");
  if (meta)
    for (const auto& [k, v] : arr[0]["metadata"].items())
      meta->emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
  Table t;
  for (std::size_t i = 1; i < arr.size(); ++i) {
    const auto& obj = arr[i];
    if (!obj.is_object()) throw LabError(ErrorKind::ParseError, "row is not an object");
    if (t.columns.empty())
      for (const auto& [k, v] : obj.items()) t.columns.push_back(k);
    std::vector<json> row;
    for (const auto& c : t.columns) {
      if (!obj.contains(c)) throw LabError(ErrorKind::ParseError, "row lacks column " + c);
      row.push_back(obj.at(c));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_table(std::istream& is, Format format, Metadata* meta) {
  return format == Format::Csv ? read_csv(is, meta) : read_json(is, meta);
}

json family_to_json(const MatrixFamily& family) {
  json mats = json::array();
  for (const auto& m : family.members()) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  return {{"d", family.dim()}, {"matrices", mats}};
}

MatrixFamily family_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("d") || !j.contains("matrices"))
      throw LabError(ErrorKind::ParseError, "family JSON needs \"d\" and \"matrices\"");
    const auto d = j.at("d").get<std::size_t>();
    std::vector<DenseMatrix> members;
    for (const auto& mj : j.at("matrices")) {
      const auto rows = mj.get<std::vector<std::vector<double>>>();
      if (rows.size() != d) throw LabError(ErrorKind::DimensionMismatch, "matrix row count differs from d");
      members.push_back(DenseMatrix::from_rows(rows));
    }
    return MatrixFamily::make(std::move(members));
  } catch (const json::exception& e) {
    throw LabError(ErrorKind::ParseError, e.what());
  }
}

MatrixFamily read_family_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LabError(ErrorKind::ParseError, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw LabError(ErrorKind::ParseError, e.what());
  }
  return family_from_json(j);
}

Table reports_table(const std::vector<InequalityReport>& reports) {
  Table t;
  t.columns = {"variant", "lhs", "rhs", "margin", "holds", "tie", "tolerance", "n", "K",
               "m", "d", "eta_window", "estimated", "stderr"};
  for (const auto& r : reports) {
    t.rows.push_back({std::string(variant_name(r.variant)), r.lhs, r.rhs, r.margin, r.holds, r.tie,
                      r.tolerance, r.n, r.K, r.m, r.d, optional_double(r.eta_window), r.estimated,
                      r.stderr_estimate});
  }
  return t;
}

std::vector<InequalityReport> reports_from_table(const Table& t) {
  const std::size_t cv = column(t, "variant"), cl = column(t, "lhs"), cr = column(t, "rhs"),
                    cm = column(t, "margin"), ch = column(t, "holds"), ct = column(t, "tie"),
                    ctol = column(t, "tolerance"), cn = column(t, "n"), ck = column(t, "K"),
                    cmm = column(t, "m"), cd = column(t, "d"), ce = column(t, "eta_window"),
                    cest = column(t, "estimated"), cse = column(t, "stderr");
  std::vector<InequalityReport> out;
  for (const auto& row : t.rows) {
    InequalityReport r;
    const auto name = row[cv].is_string() ? row[cv].get<std::string>() : std::string();
    const auto v = parse_variant(name);
    if (!v) throw LabError(ErrorKind::ParseError, "unknown variant '" + name + "'");
    r.variant = *v;
    r.lhs = as_double(row[cl]);
    r.rhs = as_double(row[cr]);
    r.margin = as_double(row[cm]);
    r.holds = as_bool(row[ch]);
    r.tie = as_bool(row[ct]);
    r.tolerance = as_double(row[ctol]);
    r.n = as_uint(row[cn]);
    r.K = as_uint(row[ck]);
    r.m = as_uint(row[cmm]);
    r.d = as_uint(row[cd]);
    if (!is_empty_cell(row[ce])) r.eta_window = as_double(row[ce]);
    r.estimated = as_bool(row[cest]);
    r.stderr_estimate = as_double(row[cse]);
    out.push_back(r);
  }
  return out;
}

Table counterexample_table(const std::vector<CounterexampleReport>& reports) {
  Table t;
  t.columns = {"source", "trial", "seed", "n", "K", "d", "eta", "variant", "margin", "family"};
  for (const auto& c : reports) {
    t.rows.push_back({std::string(source_name(c.source)),
                      c.trial_index ? json(*c.trial_index) : json(nullptr),
                      c.seed ? json(*c.seed) : json(nullptr), c.n, c.K, c.d, c.eta,
                      std::string(variant_name(c.violated_variant)), c.margin,
                      family_to_json(c.family).dump()});
  }
  return t;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t;
  t.columns = {"K", "eta", "norm_ss", "norm_rs", "ratio", "infinite_flag"};
  for (const auto& r : rows) t.rows.push_back({r.K, r.eta, r.norm_ss, r.norm_rs, r.ratio, r.infinite});
  return t;
}

Table trajectory_table() {
  Table t;
  t.columns = {"scheme", "run", "iter", "loss", "proj_norm"};
  return t;
}

void append_trajectory_rows(Table& t, const Trajectory& tr, std::uint64_t run) {
  for (std::size_t i = 0; i < tr.losses.size(); ++i) {
    const json proj = i < tr.proj_norms.size() ? json(tr.proj_norms[i]) : json(nullptr);
    t.rows.push_back({std::string(scheme_name(tr.scheme)), run, i, tr.losses[i], proj});
  }
}

}  // namespace amgm
