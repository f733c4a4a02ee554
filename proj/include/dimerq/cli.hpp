#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.
//
//   dimerq fit <csv> [--unit emu|si] [--j0 J --g0 g]
//   dimerq sweep temp|field|pressure [options]
//   dimerq critical-field --j-kelvin J --g g
//
// Exit status: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include <dimerq/constants.hpp>
#include <dimerq/error.hpp>
#include <dimerq/fitting.hpp>
#include <dimerq/models.hpp>
#include <dimerq/sweep.hpp>
#include <dimerq/table.hpp>
#include <dimerq/version.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dimerq::cli {

inline constexpr const char* output_dir_env = "DIMERQ_OUT_DIR";

inline std::string version_text() {
  std::ostringstream os;
  using dimerq::detail::format_number;
  os << "dimerq " << version << '\n'
     << "k_B   = " << format_number(constants::boltzmann) << " J/K\n"
     << "mu_B  = " << format_number(constants::bohr_magneton) << " J/T\n"
     << "N_A   = " << format_number(constants::avogadro) << " 1/mol\n"
     << "N_A mu_B^2 / k_B = " << format_number(constants::curie_cgs) << " emu K/mol\n"
     << "1 T   = " << format_number(constants::oersted_per_tesla) << " Oe";
  return os.str();
}

namespace detail {

/// ISO-8601 UTC time; SOURCE_DATE_EPOCH pins it for reproducible output.
inline std::string timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch)
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

struct OutputOptions {
  std::string format = "csv";
  std::string out;

  TableFormat table_format() const { return format == "json" ? TableFormat::json : TableFormat::csv; }
};

inline void add_output_options(CLI::App* app, OutputOptions& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", o.out, "Output path (default: $" + std::string(output_dir_env) + "/<name> or stdout)");
}

inline void write_output(SweepTable table, const OutputOptions& o, const std::string& default_stem, std::ostream& out) {
  table.metadata["timestamp"] = timestamp();
  const std::string ext = o.format == "json" ? ".json" : ".csv";
  std::string path = o.out;
  if (path.empty()) {
    if (const char* dir = std::getenv(output_dir_env); dir && *dir)
      path = (std::filesystem::path(dir) / (default_stem + ext)).string();
  }
  if (path.empty()) {
    write_table(table, o.table_format(), out);
    return;
  }
  emit(table, o.table_format(), path);
  out << "wrote " << table.row_count() << " rows to " << path << '\n';
}

struct DimerOptions {
  double j_kelvin = -2.86;
  double g = 2.0;
  std::string basis = "z";
  std::optional<double> b_tesla;
  std::optional<double> b_oe;
  double t_kelvin = 1.0;

  DimerParams params() const {
    DimerParams p{j_kelvin, g, t_kelvin, 0.0};
    if (b_tesla)
      p.b_field = *b_tesla;
    else if (b_oe)
      p.b_field = *b_oe / constants::oersted_per_tesla;
    return p;
  }
  Basis basis_enum() const { return basis == "x" ? Basis::Sx : Basis::Sz; }
};

inline void add_dimer_options(CLI::App* app, DimerOptions& d) {
  app->add_option("--j-kelvin", d.j_kelvin, "Exchange constant J/k_B in K (negative = antiferromagnetic)")
    ->capture_default_str();
  app->add_option("--g", d.g, "Lande g factor")->capture_default_str();
  app->add_option("--basis", d.basis, "Coherence reference basis")->check(CLI::IsMember({"z", "x"}))
    ->capture_default_str();
  auto* bt = app->add_option("--b-tesla", d.b_tesla, "Fixed field along z, tesla");
  auto* bo = app->add_option("--b-oe", d.b_oe, "Fixed field along z, oersted");
  bt->excludes(bo);
  app->add_option("--t-kelvin", d.t_kelvin, "Fixed temperature in K")->capture_default_str();
}

struct RangeOptions {
  std::optional<double> min, max;
  std::optional<int> steps;
  bool log = false;

  bool any() const { return min || max || steps; }
  Range resolve(double dmin, double dmax, int dsteps, double scale = 1.0) const {
    return Range{min.value_or(dmin) * scale, max.value_or(dmax) * scale, steps.value_or(dsteps),
                 log ? Spacing::logarithmic : Spacing::linear};
  }
};

inline void add_range_options(CLI::App* app, RangeOptions& r, const std::string& prefix, const std::string& unit) {
  app->add_option("--" + prefix + "-min", r.min, "Range start (" + unit + ")");
  app->add_option("--" + prefix + "-max", r.max, "Range end (" + unit + ")");
  app->add_option("--" + prefix + "-steps", r.steps, "Number of grid points (>= 2)");
  app->add_flag("--" + prefix + "-log", r.log, "Logarithmic spacing");
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal coherence and discord of a spin-1/2 Heisenberg dimer", "dimerq"};
  app.set_version_flag("--version", version_text());
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit chi(T) to Bleaney-Bowers and tabulate coherence");
  std::string fit_path;
  std::string fit_unit = "emu";
  std::optional<double> fit_j0, fit_g0;
  detail::OutputOptions fit_out;
  fit_cmd->add_option("csv", fit_path, "Susceptibility CSV (header T_kelvin,chi)")->required();
  fit_cmd->add_option("--unit", fit_unit, "chi unit: emu (emu/mol) or si (m^3/mol)")
    ->check(CLI::IsMember({"emu", "si"}))->capture_default_str();
  auto* j0_opt = fit_cmd->add_option("--j0", fit_j0, "Initial J/k_B in K");
  auto* g0_opt = fit_cmd->add_option("--g0", fit_g0, "Initial g");
  j0_opt->needs(g0_opt);
  g0_opt->needs(j0_opt);
  detail::add_output_options(fit_cmd, fit_out);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate coherence over a parameter grid");
  sweep_cmd->require_subcommand(1);
  detail::DimerOptions sweep_dimer;
  detail::OutputOptions sweep_out;
  detail::RangeOptions t_range, b_range, p_range;
  std::string field_unit = "tesla";
  std::string pressure_path;

  auto* temp_cmd = sweep_cmd->add_subcommand("temp", "Sweep temperature at fixed field");
  auto* field_cmd = sweep_cmd->add_subcommand("field", "Sweep the z field at fixed temperature");
  auto* pressure_cmd = sweep_cmd->add_subcommand("pressure", "Sweep pressure through a J(P) table");
  for (auto* cmd : {temp_cmd, field_cmd, pressure_cmd}) {
    detail::add_dimer_options(cmd, sweep_dimer);
    detail::add_output_options(cmd, sweep_out);
  }
  detail::add_range_options(temp_cmd, t_range, "t", "K");
  detail::add_range_options(pressure_cmd, t_range, "t", "K");
  detail::add_range_options(field_cmd, b_range, "b", "field unit");
  field_cmd->add_option("--field-unit", field_unit, "Unit of --b-min/--b-max")
    ->check(CLI::IsMember({"tesla", "oe"}))->capture_default_str();
  detail::add_range_options(pressure_cmd, p_range, "p", "GPa");
  pressure_cmd->add_option("--pressure-table", pressure_path, "CSV with header P_GPa,J_kelvin")->required();

  // critical-field
  auto* crit_cmd = app.add_subcommand("critical-field", "Singlet / |00> level-crossing field");
  double crit_j = -2.86;
  double crit_g = 2.0;
  crit_cmd->add_option("--j-kelvin", crit_j, "Exchange constant J/k_B in K")->capture_default_str();
  crit_cmd->add_option("--g", crit_g, "Lande g factor")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(Error::Category::usage);
  }

  try {
    if (*fit_cmd) {
      const auto unit = fit_unit == "si" ? SusceptibilityUnit::si_m3_per_mol : SusceptibilityUnit::emu_per_mol;
      const SusceptibilitySeries series = load_series(fit_path, unit);
      FitOptions options;
      if (fit_j0)
        options.init = std::make_pair(*fit_j0, *fit_g0);
      const FitResult fit = fit_bleaney_bowers(series, options);
      out << std::setprecision(10)
          << "j_over_kb: " << fit.j_over_kb << " +- " << fit.stderr_j << " K\n"
          << "g: " << fit.g << " +- " << fit.stderr_g << '\n'
          << "rss: " << fit.rss << '\n'
          << "iterations: " << fit.iterations << '\n'
          << "converged: " << (fit.converged ? "true" : "false") << '\n';
      if (!fit.converged) {
        err << "error: fit did not converge after " << fit.iterations << " iterations\n";
        return static_cast<int>(Error::Category::numeric);
      }
      SweepTable table = coherence_series(series, fit);
      table.metadata["stderr_j"] = dimerq::detail::format_number(fit.stderr_j);
      table.metadata["stderr_g"] = dimerq::detail::format_number(fit.stderr_g);
      table.metadata["version"] = version;
      detail::write_output(std::move(table), fit_out, "coherence_fit", out);
      return 0;
    }

    if (*sweep_cmd) {
      SweepSpec spec;
      spec.fixed = sweep_dimer.params();
      spec.basis = sweep_dimer.basis_enum();
      std::string stem;
      if (*temp_cmd) {
        spec.variable = SweepVariable::temperature;
        spec.range = t_range.resolve(2.0, 350.0, 100);
        stem = "sweep_temperature";
      } else if (*field_cmd) {
        spec.variable = spec.basis == Basis::Sz ? SweepVariable::field_longitudinal : SweepVariable::field_transverse;
        const double scale = field_unit == "oe" ? 1.0 / constants::oersted_per_tesla : 1.0;
        const double default_max = field_unit == "oe" ? 1.0e5 : 10.0;
        spec.range = b_range.resolve(0.0, default_max, 100, scale);
        stem = "sweep_field";
      } else {
        spec.variable = SweepVariable::pressure;
        spec.pressure_table = load_pressure_table(pressure_path);
        if (p_range.any()) {
          if (!(p_range.min && p_range.max && p_range.steps))
            throw UsageError("--p-min, --p-max and --p-steps must be given together");
          spec.range = p_range.resolve(0.0, 0.0, 0);
        }
        if (t_range.any())
          spec.pressure_temperatures = t_range.resolve(2.0, 350.0, 100);
        stem = "sweep_pressure";
      }
      detail::write_output(run_sweep(spec), sweep_out, stem, out);
      return 0;
    }

    if (*crit_cmd) {
      const CriticalField bc = critical_field(crit_j, crit_g);
      out << std::setprecision(12)
          << "critical_field_tesla: " << bc.tesla << '\n'
          << "critical_field_oersted: " << bc.oersted() << '\n'
          << "bisection_tesla: " << bc.tesla_bisection << '\n'
          << "agreement_tesla: " << std::abs(bc.tesla - bc.tesla_bisection) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(Error::Category::usage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(Error::Category::numeric);
  }
  return static_cast<int>(Error::Category::usage);
}

} // namespace dimerq::cli
