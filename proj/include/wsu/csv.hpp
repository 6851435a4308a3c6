#ifndef WSU_CSV_HPP
#define WSU_CSV_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <type_traits>
#include <vector>

#include "wsu/core.hpp"
#include "wsu/diagnostics.hpp"

namespace wsu {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("not a number: '" + s + "'");
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (std::size_t j = 0; j < table.header.size(); ++j)
    out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv '" + path.string() + "'");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
    if (row.size() != t.header.size())
      throw IoError("ragged row in '" + path.string() + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable energy_table(const std::vector<EnergyReport>& energy) {
  CsvTable t{{"t", "kinetic", "potential", "dissipation_accum", "total"}, {}};
  for (const auto& e : energy) t.rows.push_back({e.time, e.kinetic, e.potential, e.dissipation_accum, e.total});
  return t;
}

inline CsvTable stability_table(const StabilityReport& r) {
  CsvTable t{{"t", "H", "D", "lambda", "bound", "margin"}, {}};
  for (std::size_t k = 0; k < r.times.size(); ++k)
    t.rows.push_back({r.times[k], r.H[k], r.D[k], r.lambda[k], r.bound[k], r.margin[k]});
  return t;
}

inline CsvTable snapshot_table(const StateU& s, const Grid1D& grid, double floor) {
  CsvTable t{{"x", "rho", "u"}, {}};
  for (int i = 0; i < grid.cells; ++i)
    t.rows.push_back({grid.x(i), s.rho[i], recover_velocity(s.rho[i], s.mom[i], floor)});
  return t;
}

inline CsvTable snapshot_table(const StateV& s, const Grid1D& grid, double /*floor*/) {
  CsvTable t{{"x", "rho", "v"}, {}};
  for (int i = 0; i < grid.cells; ++i) t.rows.push_back({grid.x(i), s.rho[i], s.v[i]});
  return t;
}

template <FluidState State>
std::vector<EnergyReport> energy_series(const Trajectory<State>& traj, const Grid1D& grid,
                                        const FluidParams& p, double floor) {
  std::vector<EnergyReport> out;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if constexpr (std::is_same_v<State, StateU>)
      out.push_back(energy_of(traj.snapshots[k], traj.times[k], traj.dissipation_accum[k], grid, p, floor));
    else
      out.push_back(energy_of(traj.snapshots[k], traj.times[k], traj.dissipation_accum[k], grid, p));
  }
  return out;
}

/// Writes energy.csv, snapshot_<k>.csv and, when given, stability.csv.
template <FluidState State>
void write_timeseries(const Trajectory<State>& traj, const Grid1D& grid, const FluidParams& p,
                      const std::filesystem::path& dir, const StabilityReport* stability = nullptr,
                      double floor = 1e-12) {
  ensure_directory(dir);
  write_csv(dir / "energy.csv", energy_table(energy_series(traj, grid, p, floor)));
  for (std::size_t k = 0; k < traj.size(); ++k)
    write_csv(dir / ("snapshot_" + std::to_string(k) + ".csv"), snapshot_table(traj.snapshots[k], grid, floor));
  if (stability) write_csv(dir / "stability.csv", stability_table(*stability));
}

/// Reads a v-form snapshot back into a state.
inline StateV read_snapshot_v(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  if (t.header != std::vector<std::string>{"x", "rho", "v"})
    throw IoError("'" + path.string() + "' is not a v-form snapshot");
  StateV s;
  for (const auto& row : t.rows) {
    s.rho.push_back(row[1]);
    s.v.push_back(row[2]);
  }
  return s;
}

}  // namespace wsu

#endif  // WSU_CSV_HPP
