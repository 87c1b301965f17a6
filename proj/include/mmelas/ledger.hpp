#pragma once

/**
 * @file ledger.hpp
 *
 * @brief Diagnostics ledger as CSV: one header line, one row per step, fixed
 * column order, floats printed with 17 significant digits ("%.17g") so that
 * every double reads back exactly. Non-finite values print as nan, inf, -inf.
 */

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmelas/stepper.hpp"

namespace mmelas {

class LedgerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct LedgerColumn {
  std::string name;
  bool integer = false;
  std::function<double(const DiagnosticsRow&)> get;
  std::function<void(DiagnosticsRow&, double)> set;
};

inline const std::vector<LedgerColumn>& ledger_columns() {
  static const std::vector<LedgerColumn> cols = [] {
    std::vector<LedgerColumn> c;
    auto real = [&c](std::string name, double DiagnosticsRow::*m) {
      c.push_back({std::move(name), false, [m](const DiagnosticsRow& r) { return r.*m; },
                   [m](DiagnosticsRow& r, double x) { r.*m = x; }});
    };
    c.push_back({"step", true, [](const DiagnosticsRow& r) { return static_cast<double>(r.step); },
                 [](DiagnosticsRow& r, double x) { r.step = static_cast<std::size_t>(x); }});
    real("time", &DiagnosticsRow::time);
    real("objective", &DiagnosticsRow::objective);
    real("energy", &DiagnosticsRow::energy);
    real("comparison_bound", &DiagnosticsRow::comparison_bound);
    for (std::size_t i = 0; i < 3; ++i)
      c.push_back({"mean_v" + std::to_string(i + 1), false, [i](const DiagnosticsRow& r) { return r.mean_v[i]; },
                   [i](DiagnosticsRow& r, double x) { r.mean_v[i] = x; }});
    for (std::size_t k = 0; k < 9; ++k)
      c.push_back({"mean_F" + std::to_string(k / 3 + 1) + std::to_string(k % 3 + 1), false,
                   [k](const DiagnosticsRow& r) { return r.mean_F[k]; },
                   [k](DiagnosticsRow& r, double x) { r.mean_F[k] = x; }});
    for (std::size_t k = 0; k < 9; ++k)
      c.push_back({"mean_Z" + std::to_string(k / 3 + 1) + std::to_string(k % 3 + 1), false,
                   [k](const DiagnosticsRow& r) { return r.mean_Z[k]; },
                   [k](DiagnosticsRow& r, double x) { r.mean_Z[k] = x; }});
    real("mean_w", &DiagnosticsRow::mean_w);
    real("drift_Z", &DiagnosticsRow::drift_Z);
    real("drift_w", &DiagnosticsRow::drift_w);
    real("max_K", &DiagnosticsRow::max_K);
    real("min_w", &DiagnosticsRow::min_w);
    real("min_slack", &DiagnosticsRow::min_slack);
    real("curl_F", &DiagnosticsRow::curl_F);
    real("curl_change", &DiagnosticsRow::curl_change);
    real("div_Z_change", &DiagnosticsRow::div_Z_change);
    real("el_residual", &DiagnosticsRow::el_residual);
    c.push_back({"kkt_flag", true, [](const DiagnosticsRow& r) { return static_cast<double>(r.kkt_flag); },
                 [](DiagnosticsRow& r, double x) { r.kkt_flag = static_cast<int>(x); }});
    real("residual", &DiagnosticsRow::residual);
    c.push_back({"iterations", true, [](const DiagnosticsRow& r) { return static_cast<double>(r.iterations); },
                 [](DiagnosticsRow& r, double x) { r.iterations = static_cast<std::size_t>(x); }});
    c.push_back({"converged", true, [](const DiagnosticsRow& r) { return static_cast<double>(r.converged); },
                 [](DiagnosticsRow& r, double x) { r.converged = static_cast<int>(x); }});
    return c;
  }();
  return cols;
}

inline std::string format_cell(double x, bool integer) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  if (integer)
    std::snprintf(buf, sizeof buf, "%.0f", x);
  else
    std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_cell(const std::string& s, std::size_t line, const std::string& col) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw LedgerError("ledger line " + std::to_string(line) + ", column " + col + ": bad number '" + s + "'");
  return x;
}

}  // namespace detail

inline std::vector<std::string> ledger_column_names() {
  std::vector<std::string> names;
  for (const auto& c : detail::ledger_columns()) names.push_back(c.name);
  return names;
}

inline std::string ledger_header() {
  std::string s;
  for (const auto& c : detail::ledger_columns()) s += (s.empty() ? "" : ",") + c.name;
  return s;
}

inline std::string format_ledger_row(const DiagnosticsRow& r) {
  std::string s;
  bool first = true;
  for (const auto& c : detail::ledger_columns()) {
    if (!first) s += ',';
    first = false;
    s += detail::format_cell(c.get(r), c.integer);
  }
  return s;
}

inline std::string format_ledger(const DiagnosticsLedger& ledger) {
  std::string s = ledger_header() + "\n";
  for (const auto& r : ledger) s += format_ledger_row(r) + "\n";
  return s;
}

inline DiagnosticsLedger parse_ledger(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != ledger_header()) throw LedgerError("ledger header does not match");
  const auto& cols = detail::ledger_columns();
  DiagnosticsLedger out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    DiagnosticsRow r;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto comma = line.find(',', pos);
      if ((comma == std::string::npos) != (k + 1 == cols.size()))
        throw LedgerError("ledger line " + std::to_string(line_no) + ": expected " + std::to_string(cols.size()) +
                          " columns");
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      cols[k].set(r, detail::parse_cell(cell, line_no, cols[k].name));
      pos = comma + 1;
    }
    out.push_back(r);
  }
  return out;
}

inline void write_ledger(const std::string& path, const DiagnosticsLedger& ledger) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LedgerError("cannot open " + path + " for writing");
  out << format_ledger(ledger);
  if (!out) throw LedgerError("write failed: " + path);
}

inline DiagnosticsLedger read_ledger(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LedgerError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ledger(ss.str());
}

/// Value of a named column of a row.
inline double ledger_value(const DiagnosticsRow& r, const std::string& column) {
  for (const auto& c : detail::ledger_columns())
    if (c.name == column) return c.get(r);
  throw LedgerError("unknown ledger column " + column);
}

}  // namespace mmelas
