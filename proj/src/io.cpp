#include "srrr/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srrr {
namespace io {

namespace {

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

double parse_double(const std::string& tok, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str())
    throw std::runtime_error("bad numeric field '" + tok + "' in " + path.string());
  return v;
}

} // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const Mat& m) {
  std::ofstream out = open_for_write(path);
  out << "ncols=" << m.cols() << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Mat read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("ncols=", 0) != 0)
    throw std::runtime_error("missing ncols= header in " + path.string());
  const long ncols = std::strtol(line.c_str() + 6, nullptr, 10);
  if (ncols < 1) throw std::runtime_error("bad ncols header in " + path.string());

  std::vector<double> values;
  Index nrows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    Index got = 0;
    while (std::getline(ss, tok, ',')) {
      values.push_back(parse_double(tok, path));
      ++got;
    }
    if (got != ncols)
      throw std::runtime_error("row with wrong number of fields in " + path.string());
    ++nrows;
  }
  if (nrows == 0) throw std::runtime_error("no data rows in " + path.string());

  Mat m(nrows, ncols);
  for (Index i = 0; i < nrows; ++i)
    for (Index j = 0; j < ncols; ++j) m(i, j) = values[static_cast<std::size_t>(i * ncols + j)];
  return m;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw std::runtime_error("matrix JSON must be a nonempty array of nonempty arrays");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[i].size()) != cols)
      throw std::runtime_error("matrix JSON rows have unequal lengths");
    for (Index jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
  }
  return m;
}

void write_dataset_json(const std::filesystem::path& path, const Dataset& d) {
  json j;
  j["X"] = matrix_to_json(d.X);
  j["Y"] = matrix_to_json(d.Y);
  write_json(path, j);
}

Dataset read_dataset_json(const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.contains("X") || !j.contains("Y"))
    throw std::runtime_error("dataset JSON needs \"X\" and \"Y\": " + path.string());
  return Dataset(matrix_from_json(j["X"]), matrix_from_json(j["Y"]));
}

json fit_result_to_json(const FitResult& r, bool include_timing) {
  json j;
  j["method"] = r.method;
  j["status"] = fit_status_name(r.status);
  j["iters"] = r.iters();
  json trace = json::array();
  for (const TraceEntry& e : r.trace)
    trace.push_back({e.iter, e.objective, include_timing ? e.seconds : 0.0});
  j["objective_trace"] = std::move(trace);
  j["A"] = matrix_to_json(r.A);
  j["B"] = matrix_to_json(r.B);
  json sel = json::array();
  for (Index i : r.selected_rows) sel.push_back(i);
  j["selected_rows"] = std::move(sel);
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

void write_fit_result_json(const std::filesystem::path& path, const FitResult& r,
                           bool include_timing) {
  write_json(path, fit_result_to_json(r, include_timing));
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace,
                     bool include_timing) {
  std::ofstream out = open_for_write(path);
  out << "iter,objective,seconds\n";
  for (const TraceEntry& e : trace)
    out << e.iter << "," << format_double(e.objective) << ","
        << format_double(include_timing ? e.seconds : 0.0) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_trials_csv(const std::filesystem::path& path, const McTable& table,
                      bool include_timing) {
  std::ofstream out = open_for_write(path);
  out << "trial,arm,angle,iters,seconds,recall,precision\n";
  for (const TrialRow& r : table.rows) {
    if (r.failed) {
      out << r.trial << "," << r.arm << ",nan,0,nan,nan,nan\n";
      continue;
    }
    out << r.trial << "," << r.arm << "," << format_double(r.angle) << "," << r.iters << ","
        << format_double(include_timing ? r.seconds : 0.0) << "," << format_double(r.recall)
        << "," << format_double(r.precision) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json summary_to_json(const McTable& table, bool include_timing, const json& meta) {
  json j;
  for (auto it = meta.begin(); it != meta.end(); ++it) j[it.key()] = it.value();
  json arms;
  for (const ArmSummary& s : table.summary) {
    json a;
    a["mean_angle"] = s.mean_angle;
    a["stderr_angle"] = s.stderr_angle;
    a["mean_recall"] = s.mean_recall;
    a["mean_precision"] = s.mean_precision;
    a["mean_iters"] = s.mean_iters;
    a["mean_seconds"] = include_timing ? s.mean_seconds : 0.0;
    a["included"] = s.included;
    a["exclusions"] = s.exclusions;
    arms[s.arm] = std::move(a);
  }
  j["arms"] = std::move(arms);
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("JSON parse error in " + path.string() + ": " + e.what());
  }
  return j;
}

} // namespace io
} // namespace srrr
