#pragma once

// Parameter sweeps over temperature, field, and pressure. Every row carries
// the closed-form coherence beside the exact-diagonalization value.

#include <dimerq/constants.hpp>
#include <dimerq/core.hpp>
#include <dimerq/error.hpp>
#include <dimerq/models.hpp>
#include <dimerq/quantifiers.hpp>
#include <dimerq/table.hpp>
#include <dimerq/version.hpp>

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace dimerq {

enum class SweepVariable { temperature, field_longitudinal, field_transverse, pressure };

inline std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::temperature: return "temperature";
    case SweepVariable::field_longitudinal: return "field_longitudinal";
    case SweepVariable::field_transverse: return "field_transverse";
    case SweepVariable::pressure: return "pressure";
  }
  return "unknown";
}

enum class Spacing { linear, logarithmic };

struct Range {
  double min = 0.0;
  double max = 1.0;
  int steps = 2;
  Spacing spacing = Spacing::linear;

  void validate(std::string_view what) const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
      throw UsageError(std::string(what) + " range requires min < max");
    if (steps < 2)
      throw UsageError(std::string(what) + " range requires at least 2 steps");
    if (spacing == Spacing::logarithmic && !(min > 0.0))
      throw UsageError(std::string(what) + " logarithmic range requires min > 0");
  }

  /// Grid points; endpoints are exact.
  std::vector<double> points() const {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
      const double t = static_cast<double>(i) / (steps - 1);
      out[static_cast<std::size_t>(i)] = spacing == Spacing::linear
        ? (1.0 - t) * min + t * max
        : std::exp((1.0 - t) * std::log(min) + t * std::log(max));
    }
    out.front() = min;
    out.back() = max;
    return out;
  }
};

struct PressureNode {
  double pressure = 0.0;  // GPa
  double j_over_kb = 0.0; // K
};

/// Tabulated J(P). Pressures strictly increasing, at least two nodes.
struct PressureTable {
  std::vector<PressureNode> rows;
  std::string source;

  void validate() const {
    if (rows.size() < 2)
      throw DataError("pressure table needs at least 2 rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!std::isfinite(rows[i].pressure) || !std::isfinite(rows[i].j_over_kb))
        throw DataError("pressure table row " + std::to_string(i + 1) + " is not finite");
      if (i > 0 && !(rows[i].pressure > rows[i - 1].pressure))
        throw DataError("pressure table: pressures not increasing at row " + std::to_string(i + 1));
    }
  }
};

inline constexpr std::string_view pressure_header = "P_GPa,J_kelvin";

/// Same CSV dialect as the susceptibility series, header `P_GPa,J_kelvin`.
inline PressureTable read_pressure_table(std::istream& is, std::string source = {}) {
  PressureTable table;
  table.source = std::move(source);
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line.front() == '#')
      continue;
    if (!have_header) {
      if (line != pressure_header)
        throw DataError("malformed pressure table header at row " + std::to_string(line_no) +
                        ": expected '" + std::string(pressure_header) + "'");
      have_header = true;
      continue;
    }
    const auto fields = detail::split_csv_line(line);
    double p = 0.0, j = 0.0;
    if (fields.size() != 2 || !detail::parse_number(fields[0], p) || !detail::parse_number(fields[1], j))
      throw DataError("pressure table row " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    table.rows.push_back({p, j});
  }
  if (!have_header)
    throw DataError("pressure table has no header");
  table.validate();
  return table;
}

inline PressureTable load_pressure_table(const std::string& path) {
  std::ifstream file(path);
  if (!file)
    throw DataError("cannot open '" + path + "'");
  return read_pressure_table(file, path);
}

/// Piecewise-linear J(P); exact at nodes, refuses to extrapolate.
inline double pressure_to_j(const PressureTable& table, double pressure) {
  table.validate();
  const auto& rows = table.rows;
  if (!(pressure >= rows.front().pressure && pressure <= rows.back().pressure))
    throw DataError("extrapolation refused: pressure " + std::to_string(pressure) +
                    " GPa outside table range [" + std::to_string(rows.front().pressure) + ", " +
                    std::to_string(rows.back().pressure) + "]");
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    if (pressure == a.pressure)
      return a.j_over_kb;
    if (pressure == b.pressure)
      return b.j_over_kb;
    if (pressure < b.pressure) {
      const double t = (pressure - a.pressure) / (b.pressure - a.pressure);
      return (1.0 - t) * a.j_over_kb + t * b.j_over_kb;
    }
  }
  return rows.back().j_over_kb;
}

/// Pressures where the interpolated J changes sign (roots of the linear segments).
inline std::vector<double> exchange_sign_changes(const PressureTable& table) {
  table.validate();
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    const auto& a = table.rows[i];
    const auto& b = table.rows[i + 1];
    if (a.j_over_kb == 0.0) {
      roots.push_back(a.pressure);
    } else if ((a.j_over_kb < 0.0) != (b.j_over_kb < 0.0) && b.j_over_kb != 0.0) {
      roots.push_back(a.pressure - a.j_over_kb * (b.pressure - a.pressure) / (b.j_over_kb - a.j_over_kb));
    }
  }
  if (table.rows.back().j_over_kb == 0.0)
    roots.push_back(table.rows.back().pressure);
  return roots;
}

inline std::string_view exchange_regime(double j_over_kb) {
  if (j_over_kb < 0.0)
    return "antiferromagnetic";
  if (j_over_kb > 0.0)
    return "ferromagnetic";
  return "uncoupled";
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::temperature;
  /// Swept range in K, T, or GPa. For pressure sweeps it may be omitted to
  /// use the table nodes.
  std::optional<Range> range;
  DimerParams fixed;
  Basis basis = Basis::Sz;
  std::optional<PressureTable> pressure_table;
  /// Temperatures evaluated at every pressure; defaults to fixed.temperature.
  std::optional<Range> pressure_temperatures;
};

inline constexpr double oracle_agreement_tol = 1e-10;

namespace detail {

struct SweepPoint {
  double c;
  double c_oracle;
  double log_z;
  GroundState ground;
};

inline SweepPoint evaluate_point(const DimerParams& params, Basis basis) {
  SweepPoint point;
  point.c = coherence(params, basis).value;
  point.c_oracle = coherence_oracle(params, basis).value;
  point.log_z = log_partition_function(params);
  point.ground = ground_state(build_hamiltonian(params));
  if (!(std::abs(point.c - point.c_oracle) < oracle_agreement_tol))
    throw NumericError("closed form and oracle coherence disagree at T = " +
                       std::to_string(params.temperature) + " K, B = " + std::to_string(params.b_field) + " T");
  return point;
}

} // namespace detail

/// Column layout: swept variable first, then J_kelvin, T_kelvin, B_tesla,
/// C, C_oracle, ln_Z; text column ground_state (plus regime for pressure).
inline SweepTable run_sweep(const SweepSpec& spec) {
  spec.fixed.validate();

  // A field sweep names its basis: longitudinal is Sz, transverse is Sx.
  Basis basis = spec.basis;
  if (spec.variable == SweepVariable::field_longitudinal)
    basis = Basis::Sz;
  else if (spec.variable == SweepVariable::field_transverse)
    basis = Basis::Sx;

  SweepTable table;
  table.metadata["variable"] = std::string(to_string(spec.variable));
  table.metadata["basis"] = std::string(to_string(basis));
  table.metadata["g"] = detail::format_number(spec.fixed.g);
  table.metadata["version"] = version;

  const auto base_columns = std::vector<std::string>{"J_kelvin", "T_kelvin", "B_tesla", "C", "C_oracle", "ln_Z"};
  auto emit_row = [&](std::vector<double> lead, const DimerParams& p, std::vector<std::string> extra_labels) {
    const auto pt = detail::evaluate_point(p, basis);
    lead.insert(lead.end(), {p.j_over_kb, p.temperature, p.b_field, pt.c, pt.c_oracle, pt.log_z});
    std::vector<std::string> labels{std::string(to_string(pt.ground))};
    labels.insert(labels.end(), extra_labels.begin(), extra_labels.end());
    table.add_row(std::move(lead), std::move(labels));
  };

  switch (spec.variable) {
    case SweepVariable::temperature: {
      if (!spec.range)
        throw UsageError("temperature sweep requires a range");
      spec.range->validate("temperature");
      if (!(spec.range->min > 0.0))
        throw UsageError("temperatures must be positive");
      table.columns = {"T_sweep_kelvin"};
      table.columns.insert(table.columns.end(), base_columns.begin(), base_columns.end());
      table.text_columns = {"ground_state"};
      table.metadata["j_over_kb"] = detail::format_number(spec.fixed.j_over_kb);
      table.metadata["b_tesla"] = detail::format_number(spec.fixed.b_field);
      for (double t : spec.range->points()) {
        DimerParams p = spec.fixed;
        p.temperature = t;
        emit_row({t}, p, {});
      }
      break;
    }
    case SweepVariable::field_longitudinal:
    case SweepVariable::field_transverse: {
      if (!spec.range)
        throw UsageError("field sweep requires a range");
      spec.range->validate("field");
      table.columns = {"B_sweep_tesla"};
      table.columns.insert(table.columns.end(), base_columns.begin(), base_columns.end());
      table.text_columns = {"ground_state"};
      table.metadata["j_over_kb"] = detail::format_number(spec.fixed.j_over_kb);
      table.metadata["t_kelvin"] = detail::format_number(spec.fixed.temperature);
      for (double b : spec.range->points()) {
        DimerParams p = spec.fixed;
        p.b_field = b;
        emit_row({b}, p, {});
      }
      break;
    }
    case SweepVariable::pressure: {
      if (!spec.pressure_table)
        throw UsageError("pressure sweep requires a pressure table");
      const PressureTable& pt = *spec.pressure_table;
      pt.validate();
      std::vector<double> pressures;
      if (spec.range) {
        spec.range->validate("pressure");
        pressures = spec.range->points();
      } else {
        for (const auto& node : pt.rows)
          pressures.push_back(node.pressure);
      }
      std::vector<double> temperatures{spec.fixed.temperature};
      if (spec.pressure_temperatures) {
        spec.pressure_temperatures->validate("temperature");
        if (!(spec.pressure_temperatures->min > 0.0))
          throw UsageError("temperatures must be positive");
        temperatures = spec.pressure_temperatures->points();
      }
      table.columns = {"P_GPa"};
      table.columns.insert(table.columns.end(), base_columns.begin(), base_columns.end());
      table.text_columns = {"ground_state", "regime"};
      table.metadata["b_tesla"] = detail::format_number(spec.fixed.b_field);
      if (!pt.source.empty())
        table.metadata["pressure_source"] = pt.source;
      for (double pressure : pressures) {
        const double j = pressure_to_j(pt, pressure);
        for (double t : temperatures) {
          DimerParams p = spec.fixed;
          p.j_over_kb = j;
          p.temperature = t;
          emit_row({pressure}, p, {std::string(exchange_regime(j))});
        }
      }
      break;
    }
  }
  return table;
}

} // namespace dimerq
