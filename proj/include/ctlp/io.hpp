#ifndef CTLP_IO_HPP
#define CTLP_IO_HPP

// Instance JSON documents and trajectory CSV files.
//
// Instance schema:
//   { "T": 2, "m": 5, "n": 2, "sense": "primal" | "dual" (optional),
//     "breakpoints": ["0", "1", "2"],
//     "A": [[ <entry>, ... n ], ... m],  "b": [<entry> ... m],  "c": [<entry> ... n] }
// where <entry> is one coefficient array per breakpoint interval, each an
// ascending-degree list of decimal strings, e.g. [["0.25", "0.625"], ["1"]].
// An entry may instead be {"breakpoints": [...], "pieces": [...]} to use its
// own partition; all partitions are merged on load.
//
// Trajectory CSV: header "t,v1,...,vk", one row per node, 17 significant
// digits. A time repeated on two consecutive rows is a jump: the first row is
// the left limit, the second the value from the right.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ctlp/errors.hpp"
#include "ctlp/instance.hpp"
#include "ctlp/timefunc.hpp"

namespace ctlp {

using json = nlohmann::json;

enum class Sense { Primal, Dual };

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_decimal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_decimal(const json& node, const std::string& path) {
  if (node.is_number()) return node.get<double>();
  if (!node.is_string()) throw LoadError(path, "expected a decimal string");
  const std::string s = node.get<std::string>();
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw LoadError(path, "cannot parse \"" + s + "\" as a decimal");
  if (!std::isfinite(v)) throw LoadError(path, "non-finite coefficient");
  return v;
}

namespace detail {

inline Breakpoints parse_breakpoints(const json& node, const std::string& path) {
  if (!node.is_array()) throw LoadError(path, "expected an array");
  std::vector<double> pts;
  for (std::size_t k = 0; k < node.size(); ++k) pts.push_back(parse_decimal(node[k], path + "[" + std::to_string(k) + "]"));
  try {
    return Breakpoints(std::move(pts));
  } catch (const InputError& e) {
    throw LoadError(path, e.what());
  }
}

inline PiecewiseFn parse_entry(const json& node, const Breakpoints& shared, const std::string& path) {
  const Breakpoints bp =
      node.is_object() ? parse_breakpoints(node.value("breakpoints", json()), path + ".breakpoints") : shared;
  const json& pieces = node.is_object() ? node.value("pieces", json()) : node;
  const std::string ppath = node.is_object() ? path + ".pieces" : path;
  if (!pieces.is_array()) throw LoadError(ppath, "expected an array of pieces");
  if (pieces.size() != bp.intervals())
    throw LoadError(ppath, std::to_string(pieces.size()) + " pieces for " + std::to_string(bp.intervals()) +
                               " breakpoint intervals");
  std::vector<Polynomial> polys;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const std::string cpath = ppath + "[" + std::to_string(p) + "]";
    if (!pieces[p].is_array() || pieces[p].empty()) throw LoadError(cpath, "expected a non-empty coefficient array");
    if (pieces[p].size() > kMaxDataDegree + 1)
      throw LoadError(cpath, "degree above " + std::to_string(kMaxDataDegree));
    std::vector<double> coeffs;
    for (std::size_t k = 0; k < pieces[p].size(); ++k)
      coeffs.push_back(parse_decimal(pieces[p][k], cpath + "[" + std::to_string(k) + "]"));
    polys.emplace_back(std::move(coeffs));
  }
  return PiecewiseFn(bp, std::move(polys));
}

inline std::size_t require_count(const json& doc, const char* key) {
  if (!doc.contains(key)) throw LoadError(key, "missing");
  if (!doc[key].is_number_integer() || doc[key].get<long long>() < 0) throw LoadError(key, "expected a non-negative integer");
  return doc[key].get<std::size_t>();
}

inline json entry_to_json(const PiecewiseFn& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) {
    json coeffs = json::array();
    if (p.is_zero()) coeffs.push_back("0");
    for (double v : p.coeffs()) coeffs.push_back(format_decimal(v));
    pieces.push_back(std::move(coeffs));
  }
  return pieces;
}

}  // namespace detail

inline Sense read_sense(const json& doc) {
  if (!doc.is_object() || !doc.contains("sense")) return Sense::Primal;
  const json& s = doc["sense"];
  if (s == "primal") return Sense::Primal;
  if (s == "dual") return Sense::Dual;
  throw LoadError("sense", "expected \"primal\" or \"dual\"");
}

/// Parses and validates an instance document. Dual documents carry the same
/// primal data; use read_sense() to tell them apart.
inline CTLPInstance load_instance(const json& doc) {
  if (!doc.is_object()) throw LoadError("", "instance document must be a JSON object");
  read_sense(doc);
  if (!doc.contains("T") || !doc["T"].is_number()) throw LoadError("T", "missing or not a number");
  const double T = doc["T"].get<double>();
  if (!(T > 0.0) || !std::isfinite(T)) throw LoadError("T", "horizon must be positive and finite");
  const std::size_t m = detail::require_count(doc, "m");
  const std::size_t n = detail::require_count(doc, "n");
  if (!doc.contains("breakpoints")) throw LoadError("breakpoints", "missing");
  const Breakpoints bp = detail::parse_breakpoints(doc["breakpoints"], "breakpoints");
  if (bp.horizon() != T) throw LoadError("breakpoints", "last breakpoint must equal T");

  for (const char* key : {"A", "b", "c"})
    if (!doc.contains(key) || !doc[key].is_array()) throw LoadError(key, "missing or not an array");
  const json& jA = doc["A"];
  const json& jb = doc["b"];
  const json& jc = doc["c"];
  if (jA.size() != m) throw LoadError("A", "expected " + std::to_string(m) + " rows");
  if (jb.size() != m) throw LoadError("b", "expected " + std::to_string(m) + " entries");
  if (jc.size() != n) throw LoadError("c", "expected " + std::to_string(n) + " entries");

  std::vector<std::vector<PiecewiseFn>> A;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string rpath = "A[" + std::to_string(i) + "]";
    if (!jA[i].is_array() || jA[i].size() != n) throw LoadError(rpath, "expected " + std::to_string(n) + " entries");
    std::vector<PiecewiseFn> row;
    for (std::size_t j = 0; j < n; ++j)
      row.push_back(detail::parse_entry(jA[i][j], bp, rpath + "[" + std::to_string(j) + "]"));
    A.push_back(std::move(row));
  }
  std::vector<PiecewiseFn> b, c;
  for (std::size_t i = 0; i < m; ++i) b.push_back(detail::parse_entry(jb[i], bp, "b[" + std::to_string(i) + "]"));
  for (std::size_t j = 0; j < n; ++j) c.push_back(detail::parse_entry(jc[j], bp, "c[" + std::to_string(j) + "]"));
  try {
    return CTLPInstance(std::move(A), std::move(b), std::move(c));
  } catch (const LoadError&) {
    throw;
  } catch (const InputError& e) {
    throw LoadError("", e.what());
  }
}

inline CTLPInstance load_instance_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError("", std::string("malformed JSON: ") + e.what());
  }
  return load_instance(doc);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError("", std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

inline json save_instance(const CTLPInstance& inst, Sense sense = Sense::Primal) {
  json doc;
  doc["T"] = inst.horizon();
  doc["m"] = inst.m();
  doc["n"] = inst.n();
  if (sense == Sense::Dual) doc["sense"] = "dual";
  json bp = json::array();
  for (double t : inst.breakpoints().points()) bp.push_back(format_decimal(t));
  doc["breakpoints"] = bp;
  json A = json::array();
  for (std::size_t i = 0; i < inst.m(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < inst.n(); ++j) row.push_back(detail::entry_to_json(inst.a(i, j)));
    A.push_back(row);
  }
  doc["A"] = A;
  json b = json::array(), c = json::array();
  for (std::size_t i = 0; i < inst.m(); ++i) b.push_back(detail::entry_to_json(inst.b(i)));
  for (std::size_t j = 0; j < inst.n(); ++j) c.push_back(detail::entry_to_json(inst.c(j)));
  doc["b"] = b;
  doc["c"] = c;
  return doc;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (std::size_t j = 0; j < traj.dim(); ++j) out << ",v" << (j + 1);
  out << "\n";
  char buf[40];
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.grid()[k].t);
    out << buf;
    for (double v : traj[k]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
}

/// Reads a trajectory CSV, tagging nodes against the instance breakpoints.
inline Trajectory read_trajectory_csv(std::istream& in, const Breakpoints& bp,
                                      Interpolation interp = Interpolation::PiecewiseLinear) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError("csv", "empty file");
  std::size_t dim = 0;
  {
    std::stringstream hs(line);
    std::string cell;
    std::getline(hs, cell, ',');
    if (cell != "t") throw LoadError("csv:1", "header must start with \"t\"");
    while (std::getline(hs, cell, ',')) ++dim;
  }
  if (dim == 0) throw LoadError("csv:1", "no value columns");

  std::vector<double> times;
  std::vector<Vector> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(parse_decimal(json(cell), "csv:" + std::to_string(lineno)));
    if (row.size() != dim + 1)
      throw LoadError("csv:" + std::to_string(lineno), "expected " + std::to_string(dim + 1) + " columns");
    times.push_back(row[0]);
    values.emplace_back(row.begin() + 1, row.end());
  }
  if (times.empty()) throw LoadError("csv", "no data rows");

  std::vector<GridNode> nodes;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const std::string where = "csv:" + std::to_string(k + 2);
    if (!bp.contains(t)) throw LoadError(where, "time outside [0, T]");
    std::size_t interval = bp.locate(t);
    const bool repeated_next = k + 1 < times.size() && times[k + 1] == t;
    if (repeated_next) {
      if (interval == 0 || bp[interval] != t) throw LoadError(where, "repeated time is not an interior breakpoint");
      --interval;
    }
    nodes.push_back({t, interval});
  }
  try {
    return Trajectory(TimeGrid(std::move(nodes)), std::move(values), interp);
  } catch (const InputError& e) {
    throw LoadError("csv", e.what());
  }
}

inline Trajectory read_trajectory_file(const std::string& path, const Breakpoints& bp,
                                       Interpolation interp = Interpolation::PiecewiseLinear) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_trajectory_csv(in, bp, interp);
}

}  // namespace ctlp

#endif  // CTLP_IO_HPP
