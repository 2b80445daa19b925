#pragma once

// CSV traces (RFC 4180, CRLF, header row) and small JSON helpers.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fpnet/error.hpp"
#include "fpnet/trace.hpp"

namespace fpnet {

/// Shortest round-trippable decimal for a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  bool has_oracle = false, has_objective = false;
  for (const auto& r : trace.records) {
    has_oracle = has_oracle || r.oracle_residual.has_value();
    has_objective = has_objective || r.objective.has_value();
  }
  os << "iter,normalized_iter,self_residual";
  if (has_oracle) os << ",oracle_residual";
  if (has_objective) os << ",objective";
  os << "\r\n";
  for (const auto& r : trace.records) {
    os << r.iter << ',' << format_double(r.normalized_iter) << ',' << format_double(r.self_residual);
    if (has_oracle) os << ',' << (r.oracle_residual ? format_double(*r.oracle_residual) : "");
    if (has_objective) os << ',' << (r.objective ? format_double(*r.objective) : "");
    os << "\r\n";
  }
}

inline std::string trace_to_csv(const RunTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  for (char ch : line) {
    if (ch == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(ch);
    }
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("trace csv: bad number in column " + what + ": '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("trace csv: trailing characters in column " + what);
  return v;
}

}  // namespace detail

/// Inverse of write_trace_csv. Accepts CRLF or LF line endings.
inline RunTrace read_trace_csv(std::istream& is) {
  std::string line;
  auto next_line = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw ConfigError("trace csv: missing header row");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "iter" || header[1] != "normalized_iter" || header[2] != "self_residual") {
    throw ConfigError("trace csv: unexpected header '" + line + "'");
  }
  int oracle_col = -1, objective_col = -1;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i] == "oracle_residual") {
      oracle_col = static_cast<int>(i);
    } else if (header[i] == "objective") {
      objective_col = static_cast<int>(i);
    } else {
      throw ConfigError("trace csv: unknown column '" + header[i] + "'");
    }
  }
  RunTrace trace;
  while (next_line()) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != header.size()) throw ConfigError("trace csv: row has " + std::to_string(f.size()) + " fields");
    TraceRecord r;
    try {
      std::size_t used = 0;
      r.iter = std::stoll(f[0], &used);
      if (used != f[0].size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("trace csv: bad iteration index '" + f[0] + "'");
    }
    r.normalized_iter = detail::parse_double(f[1], "normalized_iter");
    r.self_residual = detail::parse_double(f[2], "self_residual");
    if (oracle_col >= 0 && !f[static_cast<std::size_t>(oracle_col)].empty()) {
      r.oracle_residual = detail::parse_double(f[static_cast<std::size_t>(oracle_col)], "oracle_residual");
    }
    if (objective_col >= 0 && !f[static_cast<std::size_t>(objective_col)].empty()) {
      r.objective = detail::parse_double(f[static_cast<std::size_t>(objective_col)], "objective");
    }
    trace.records.push_back(r);
  }
  return trace;
}

inline RunTrace trace_from_csv(const std::string& text) {
  std::istringstream is(text);
  return read_trace_csv(is);
}

inline nlohmann::json to_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(field + "[" + std::to_string(i) + "]: expected a number");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(field + ": rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(field + ": ragged row " + std::to_string(r));
    m.row(static_cast<Index>(r)) = vector_from_json(j[r], field + "[" + std::to_string(r) + "]").transpose();
  }
  return m;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace fpnet
