#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aderdg/analysis.hpp"
#include "aderdg/integrator.hpp"
#include "aderdg/scheme_tables.hpp"
#include "aderdg/stability.hpp"

namespace aderdg {

/// Shortest decimal string that round-trips the binary64 value exactly.
inline std::string format_scalar(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <class S>
std::string format_scalar(S x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<S>::max_digits10);
  os << x;
  return os.str();
}

inline double parse_scalar(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

/// Long-format table dump: kind,i,j,value with j empty for vectors.
template <class S>
void write_tables_csv(std::ostream& os, const SchemeTables<S>& t) {
  os << "kind,i,j,value\n";
  const int n = t.degree + 1;
  for (int p = 0; p < n; ++p) os << "node," << p << ",," << format_scalar(t.nodes[p]) << "\n";
  for (int p = 0; p < n; ++p) os << "weight," << p << ",," << format_scalar(t.weights[p]) << "\n";
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) os << "K," << p << "," << q << "," << format_scalar(t.K(p, q)) << "\n";
  for (int p = 0; p < n; ++p) os << "M," << p << ",," << format_scalar(t.M[p]) << "\n";
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) os << "B," << p << "," << q << "," << format_scalar(t.B(p, q)) << "\n";
  for (int p = 0; p < n; ++p) os << "phi_at_0," << p << ",," << format_scalar(t.phi_at_0[p]) << "\n";
  for (int p = 0; p < n; ++p) os << "phi_at_1," << p << ",," << format_scalar(t.phi_at_1[p]) << "\n";
}

/// Solution CSV: t,u_1..u_K,kind with kind in {node, sub}. Rows are ordered
/// by time: the initial node, then per element its sub-rows followed by the
/// right node.
template <class S>
void write_solution_csv(std::ostream& os, const Trajectory<S>& traj, int subnodes,
                        bool include_endpoints = false) {
  const int dim = traj.dim();
  os << "t";
  for (int k = 1; k <= dim; ++k) os << ",u_" << k;
  os << ",kind\n";
  auto emit = [&](S t, std::span<const S> u, const char* kind) {
    os << format_scalar(t);
    for (int k = 0; k < dim; ++k) os << "," << format_scalar(u[k]);
    os << "," << kind << "\n";
  };
  emit(traj.mesh.nodes[0], traj.node_values.row(0), "node");
  SubgridTable<S> table;
  if (subnodes > 0) table = tabulate_subgrid(traj, subnodes, include_endpoints);
  for (int n = 0; n < traj.num_elements(); ++n) {
    for (int m = 0; m < subnodes; ++m) {
      const int row = n * subnodes + m;
      emit(table.t[row], table.values.row(row), "sub");
    }
    emit(traj.mesh.nodes[n + 1], traj.node_values.row(n + 1), "node");
  }
}

/// One row of a re-read solution file.
template <class S>
struct SolutionRow {
  S t{};
  std::vector<S> u;
  bool is_node = false;
};

template <class S>
std::vector<SolutionRow<S>> read_solution_csv(std::istream& is) {
  std::vector<SolutionRow<S>> rows;
  std::string line;
  if (!std::getline(is, line)) return rows;  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    SolutionRow<S> row;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 3) continue;
    row.t = S(parse_scalar(fields[0]));
    for (std::size_t i = 1; i + 1 < fields.size(); ++i) row.u.push_back(S(parse_scalar(fields[i])));
    row.is_node = fields.back() == "node";
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class S>
void write_raster_csv(std::ostream& os, const StabilityRaster<S>& r) {
  os << "re,im,absR\n";
  for (int j = 0; j < static_cast<int>(r.im.size()); ++j)
    for (int i = 0; i < static_cast<int>(r.re.size()); ++i)
      os << format_scalar(r.re[i]) << "," << format_scalar(r.im[j]) << ","
         << format_scalar(r.abs_R(j, i)) << "\n";
}

template <class S>
void write_ray_csv(std::ostream& os, const std::vector<S>& radii, const std::vector<S>& abs_R) {
  os << "r,absR\n";
  for (std::size_t i = 0; i < radii.size(); ++i)
    os << format_scalar(radii[i]) << "," << format_scalar(abs_R[i]) << "\n";
}

/// Convergence report serialized with full-precision numbers rendered as
/// JSON strings' numeric tokens (emitted manually to keep the format fixed).
template <class S>
std::string report_to_json(const ConvergenceReport<S>& report) {
  std::ostringstream os;
  auto triple = [&](const ErrorReport<S>& e) {
    os << "{\"L1\":" << format_scalar(e.l1) << ",\"L2\":" << format_scalar(e.l2)
       << ",\"Linf\":" << format_scalar(e.linf) << "}";
  };
  auto orders = [&](const OrderTriple<S>& o) {
    os << "{\"L1\":" << format_scalar(o.l1) << ",\"L2\":" << format_scalar(o.l2)
       << ",\"Linf\":" << format_scalar(o.linf) << "}";
  };
  os << "{\"degree\":" << report.degree << ",\"noise_floor\":" << format_scalar(report.noise_floor)
     << ",\"rows\":[";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (i) os << ",";
    os << "{\"dt\":" << format_scalar(report.rows[i].dt) << ",\"eG\":";
    triple(report.rows[i].node);
    os << ",\"eL\":";
    triple(report.rows[i].local);
    os << "}";
  }
  os << "],\"orders\":{\"node\":";
  orders(report.node_orders);
  os << ",\"local\":";
  orders(report.local_orders);
  os << "},\"theoretical\":{\"node\":" << format_scalar(report.theoretical_node)
     << ",\"local\":" << format_scalar(report.theoretical_local) << "}}";
  return os.str();
}

}  // namespace aderdg
