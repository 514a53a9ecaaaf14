#include "shrinkreg/panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

namespace {

void require_finite(double v, const std::string& what, const std::string& id) {
  if (!std::isfinite(v)) {
    throw DataError("non-finite " + what + " for unit '" + id + "'");
  }
}

}  // namespace

PanelData::PanelData(std::vector<Unit> units) : units_(std::move(units)) {
  if (units_.size() < 2) {
    throw DataError("panel needs at least 2 units, got " + std::to_string(units_.size()));
  }
  std::unordered_set<std::string> seen;
  const std::size_t k = units_.front().controls.size();
  const bool clustered = units_.front().cluster.has_value();
  for (const Unit& u : units_) {
    if (!seen.insert(u.id).second) throw DataError("duplicate unit_id '" + u.id + "'");
    if (u.measurements.empty()) throw DataError("unit without measurements: '" + u.id + "'");
    for (double x : u.measurements) require_finite(x, "measurement", u.id);
    require_finite(u.outcome, "outcome", u.id);
    if (u.controls.size() != k) {
      throw DataError("unit '" + u.id + "' has " + std::to_string(u.controls.size()) +
                      " controls, expected " + std::to_string(k));
    }
    for (double c : u.controls) require_finite(c, "control", u.id);
    if (u.cluster.has_value() != clustered) {
      throw DataError("cluster label missing for some units (first: '" + u.id + "')");
    }
  }
}

std::size_t PanelData::min_count() const noexcept {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const Unit& u : units_) m = std::min(m, u.count());
  return m;
}

std::vector<double> PanelData::outcomes() const {
  std::vector<double> y;
  y.reserve(units_.size());
  for (const Unit& u : units_) y.push_back(u.outcome);
  return y;
}

std::vector<std::string> PanelData::cluster_labels() const {
  std::vector<std::string> labels;
  if (!has_clusters()) return labels;
  labels.reserve(units_.size());
  for (const Unit& u : units_) labels.push_back(*u.cluster);
  return labels;
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::vector<double> unit_means(const PanelData& panel) {
  std::vector<double> means;
  means.reserve(panel.size());
  for (const Unit& u : panel.units()) means.push_back(mean(u.measurements));
  return means;
}

double grand_mean(const PanelData& panel) { return mean(unit_means(panel)); }

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& cell, const std::string& file, std::size_t line) {
  const std::string s = trim(cell);
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw DataError(file + ":" + std::to_string(line) + ": non-numeric cell '" + s + "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    for (auto& f : fields) f = trim(std::move(f));
    if (table.header.empty()) {
      if (lineno == 1 && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(lineno);
  }
  if (table.header.empty() || table.rows.empty()) throw DataError("empty file: " + path.string());
  return table;
}

}  // namespace

PanelData load_panel(const std::filesystem::path& measurements_path,
                     const std::filesystem::path& outcomes_path) {
  const CsvTable meas = read_csv(measurements_path);
  const CsvTable outc = read_csv(outcomes_path);
  const std::string mname = measurements_path.string();
  const std::string oname = outcomes_path.string();

  if (meas.header != std::vector<std::string>{"unit_id", "x"}) {
    throw DataError(mname + ": header must be 'unit_id,x'");
  }
  if (outc.header.size() < 2 || outc.header[0] != "unit_id" || outc.header[1] != "y") {
    throw DataError(oname + ": header must start with 'unit_id,y'");
  }
  std::size_t col = 2;
  const bool clustered = outc.header.size() > 2 && outc.header[2] == "cluster";
  if (clustered) ++col;
  const std::size_t first_control = col;
  for (; col < outc.header.size(); ++col) {
    const std::string& name = outc.header[col];
    if (name.size() < 2 || name[0] != 'c' || name == "cluster") {
      throw DataError(oname + ": unexpected column '" + name +
                      "' (controls must be contiguous and named c1, c2, ...)");
    }
  }

  std::vector<Unit> units;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < outc.rows.size(); ++r) {
    const auto& row = outc.rows[r];
    const std::size_t line = outc.line_numbers[r];
    if (row[0].empty()) throw DataError(oname + ":" + std::to_string(line) + ": missing unit_id");
    if (!index.emplace(row[0], units.size()).second) {
      throw DataError(oname + ":" + std::to_string(line) + ": duplicate unit_id '" + row[0] + "'");
    }
    Unit u;
    u.id = row[0];
    u.outcome = parse_number(row[1], oname, line);
    if (clustered) u.cluster = row[2];
    for (std::size_t c = first_control; c < row.size(); ++c) {
      u.controls.push_back(parse_number(row[c], oname, line));
    }
    units.push_back(std::move(u));
  }

  for (std::size_t r = 0; r < meas.rows.size(); ++r) {
    const auto& row = meas.rows[r];
    const std::size_t line = meas.line_numbers[r];
    auto it = index.find(row[0]);
    if (it == index.end()) {
      throw DataError(mname + ":" + std::to_string(line) + ": unit without outcome '" + row[0] + "'");
    }
    units[it->second].measurements.push_back(parse_number(row[1], mname, line));
  }
  for (const Unit& u : units) {
    if (u.measurements.empty()) throw DataError("unit without measurements: '" + u.id + "'");
  }
  return PanelData(std::move(units));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void save_panel(const PanelData& panel,
                const std::filesystem::path& measurements_path,
                const std::filesystem::path& outcomes_path) {
  std::ofstream m(measurements_path);
  std::ofstream o(outcomes_path);
  if (!m || !o) throw DataError("cannot open output files for panel");
  m << std::setprecision(17);
  o << std::setprecision(17);

  m << "unit_id,x\n";
  o << "unit_id,y";
  if (panel.has_clusters()) o << ",cluster";
  for (std::size_t c = 0; c < panel.num_controls(); ++c) o << ",c" << (c + 1);
  o << '\n';

  for (const Unit& u : panel.units()) {
    for (double x : u.measurements) m << csv_field(u.id) << ',' << x << '\n';
    o << csv_field(u.id) << ',' << u.outcome;
    if (u.cluster) o << ',' << csv_field(*u.cluster);
    for (double c : u.controls) o << ',' << c;
    o << '\n';
  }
}

}  // namespace shrinkreg
