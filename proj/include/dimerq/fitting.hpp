#pragma once

// Bleaney-Bowers fit of molar susceptibility data for (J/k_B, g).

#include <dimerq/error.hpp>
#include <dimerq/models.hpp>
#include <dimerq/table.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dimerq {

struct SusceptibilitySeries {
  std::vector<SusceptibilityPoint> points;
  std::string sample_id;
  SusceptibilityUnit unit = SusceptibilityUnit::emu_per_mol;

  std::size_t size() const { return points.size(); }
};

inline constexpr std::size_t min_fit_points = 8;
inline constexpr std::string_view series_header = "T_kelvin,chi";

/// Parses the susceptibility CSV format: header `T_kelvin,chi` (exact),
/// then one `T,chi` record per line. Blank lines and `#` comments are
/// skipped. Row numbers in errors are 1-based file line numbers.
inline SusceptibilitySeries read_series(std::istream& is, SusceptibilityUnit unit,
                                        std::string sample_id = {}) {
  SusceptibilitySeries series;
  series.sample_id = std::move(sample_id);
  series.unit = unit;

  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line.front() == '#')
      continue;
    if (!have_header) {
      if (line != series_header)
        throw DataError("malformed header at row " + std::to_string(line_no) + ": expected '" +
                        std::string(series_header) + "', got '" + line + "'");
      have_header = true;
      continue;
    }

    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2)
      throw DataError("row " + std::to_string(line_no) + ": expected 2 fields, got " +
                      std::to_string(fields.size()));
    double t = 0.0, chi = 0.0;
    if (!detail::parse_number(fields[0], t) || !detail::parse_number(fields[1], chi))
      throw DataError("row " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    if (!std::isfinite(t) || !std::isfinite(chi))
      throw DataError("row " + std::to_string(line_no) + ": non-finite value");
    if (!(t > 0.0))
      throw DataError("row " + std::to_string(line_no) + ": temperature must be positive");
    if (!series.points.empty() && !(t > series.points.back().temperature))
      throw DataError("row " + std::to_string(line_no) + ": temperatures not increasing");
    series.points.push_back({t, chi, unit});
  }

  if (!have_header)
    throw DataError("malformed header: file has no '" + std::string(series_header) + "' line");
  if (series.points.size() < min_fit_points)
    throw DataError("series has " + std::to_string(series.points.size()) + " rows, need at least " +
                    std::to_string(min_fit_points));
  return series;
}

inline SusceptibilitySeries load_series(const std::string& path, SusceptibilityUnit unit) {
  std::ifstream file(path);
  if (!file)
    throw DataError("cannot open '" + path + "'");
  try {
    return read_series(file, unit, path);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void write_series(const SusceptibilitySeries& series, std::ostream& os) {
  if (!series.sample_id.empty())
    os << "# sample: " << series.sample_id << '\n';
  os << "# unit: " << to_string(series.unit) << '\n';
  os << series_header << '\n';
  for (const auto& p : series.points)
    os << detail::format_number(p.temperature) << ',' << detail::format_number(p.chi) << '\n';
}

struct FitOptions {
  std::optional<std::pair<double, double>> init; // (J0, g0)
  double model_scale = 1.0;                     // amplitude multiplier (moles of dimers)
  int max_iterations = 500;
  double step_tolerance = 1e-10;                // relative parameter step
  double gradient_tolerance = 1e-12;
};

struct FitResult {
  double j_over_kb = 0.0;
  double g = 0.0;
  double rss = 0.0;
  double stderr_j = 0.0;
  double stderr_g = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  double model_scale = 1.0;
  std::vector<double> rss_history; // after each accepted step, starting at the initial guess
};

namespace detail {

struct BleaneyBowersModel {
  const SusceptibilitySeries& series;
  double scale;

  double amplitude() const {
    return scale * 2.0 * constants::curie_cgs *
           (series.unit == SusceptibilityUnit::emu_per_mol ? 1.0 : constants::si_per_cgs_molar_susceptibility);
  }

  double value(double t, double j, double g) const {
    return amplitude() * g * g / t * bleaney_bowers_factor(j, t);
  }

  // df/dJ = f e/(T (3 + e)), e = exp(-J/T);  df/dg = 2 f / g
  Eigen::Vector2d gradient(double t, double j, double g) const {
    const double f = value(t, j, g);
    const double y = -j / t;
    const double share = y > 0.0 ? 1.0 / (3.0 * std::exp(-y) + 1.0) : std::exp(y) / (3.0 + std::exp(y));
    return {f * share / t, 2.0 * f / g};
  }

  void evaluate(const Eigen::Vector2d& p, Eigen::VectorXd& residual, Eigen::MatrixXd& jacobian) const {
    const auto n = static_cast<Eigen::Index>(series.size());
    residual.resize(n);
    jacobian.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& pt = series.points[static_cast<std::size_t>(i)];
      residual(i) = pt.chi - value(pt.temperature, p(0), p(1));
      jacobian.row(i) = gradient(pt.temperature, p(0), p(1)).transpose();
    }
  }

  double rss(const Eigen::Vector2d& p) const {
    double sum = 0.0;
    for (const auto& pt : series.points) {
      const double r = pt.chi - value(pt.temperature, p(0), p(1));
      sum += r * r;
    }
    return sum;
  }
};

/// g0 = 2. J0 inverts the Bleaney-Bowers correlation at the coldest point;
/// if that point is outside the physical range, only the sign is taken from
/// whether chi*T falls or rises on cooling.
inline std::pair<double, double> default_initial_guess(const SusceptibilitySeries& series, double scale) {
  const double g0 = 2.0;
  const auto& cold = series.points.front();
  const auto& hot = series.points.back();
  const double c = 2.0 * cold.temperature * cold.chi_cgs() / scale / (constants::curie_cgs * g0 * g0) - 1.0;
  if (c > -1.0 && c < 1.0 / 3.0) {
    const double j0 = -cold.temperature * std::log((1.0 - 3.0 * c) / (1.0 + c));
    if (std::isfinite(j0))
      return {j0, g0};
  }
  const bool falls_on_cooling = cold.chi * cold.temperature < hot.chi * hot.temperature;
  return {falls_on_cooling ? -1.0 : 1.0, g0};
}

/// Largest relative change of the model per kelvin of J over the series.
inline double exchange_sensitivity(const SusceptibilitySeries& series, double j) {
  double best = 0.0;
  for (const auto& pt : series.points) {
    const double y = -j / pt.temperature;
    const double share = y > 0.0 ? 1.0 / (3.0 * std::exp(-y) + 1.0) : std::exp(y) / (3.0 + std::exp(y));
    best = std::max(best, share / pt.temperature);
  }
  return best;
}

inline constexpr double min_exchange_sensitivity = 1e-6;

} // namespace detail

/// Levenberg-Marquardt fit of chi(T) to the Bleaney-Bowers form with an
/// analytic Jacobian. Stops when the relative parameter step drops below
/// step_tolerance or the gradient norm below gradient_tolerance. Steps
/// larger than max(|J|, T_min) in J or g/2 in g are rejected.
/// Data insensitive to J (relative change below 1e-6 per kelvin) raise NumericError("degenerate fit").
inline FitResult fit_bleaney_bowers(const SusceptibilitySeries& series, const FitOptions& options = {}) {
  if (series.size() < min_fit_points)
    throw DataError("need at least " + std::to_string(min_fit_points) + " points to fit");
  if (!(options.model_scale > 0.0))
    throw DataError("model scale must be positive");

  const detail::BleaneyBowersModel model{series, options.model_scale};
  const auto [j0, g0] = options.init.value_or(detail::default_initial_guess(series, options.model_scale));

  Eigen::Vector2d p(j0, g0);
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
  model.evaluate(p, residual, jacobian);
  double rss = residual.squaredNorm();

  FitResult result;
  result.model_scale = options.model_scale;
  result.rss_history.push_back(rss);

  const double j_scale = series.points.front().temperature;
  double damping = 1e-3;
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    const Eigen::Matrix2d normal = jacobian.transpose() * jacobian;
    const Eigen::Vector2d gradient = jacobian.transpose() * residual;
    if (gradient.norm() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::Matrix2d damped = normal;
    damped.diagonal() *= (1.0 + damping);
    const Eigen::Vector2d step = damped.ldlt().solve(gradient);
    const bool tiny = step.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance);

    const Eigen::Vector2d trial = p + step;
    const bool bounded = std::abs(step(0)) <= std::max(std::abs(p(0)), j_scale) && std::abs(step(1)) <= 0.5 * p(1);
    const double trial_rss = bounded ? model.rss(trial) : INFINITY;
    if (trial_rss < rss) {
      p = trial;
      model.evaluate(p, residual, jacobian);
      rss = residual.squaredNorm();
      result.rss_history.push_back(rss);
      damping = std::max(damping * 0.1, 1e-12);
    } else {
      damping *= 10.0;
    }
    if (tiny) {
      result.converged = true;
      ++iteration;
      break;
    }
  }

  if (detail::exchange_sensitivity(series, p(0)) < detail::min_exchange_sensitivity)
    throw NumericError("degenerate fit: data carry no information on J");

  const Eigen::Matrix2d normal = jacobian.transpose() * jacobian;
  const auto dof = static_cast<double>(series.size()) - 2.0;
  const Eigen::Matrix2d covariance = (rss / dof) * normal.inverse();

  result.j_over_kb = p(0);
  result.g = p(1);
  result.rss = rss;
  result.stderr_j = std::sqrt(std::max(0.0, covariance(0, 0)));
  result.stderr_g = std::sqrt(std::max(0.0, covariance(1, 1)));
  result.iterations = iteration;
  result.gradient_norm = (jacobian.transpose() * residual).norm();
  return result;
}

/// Synthetic Bleaney-Bowers series at the given temperatures.
inline SusceptibilitySeries synthetic_series(double j_over_kb, double g, const std::vector<double>& temperatures,
                                             SusceptibilityUnit unit = SusceptibilityUnit::emu_per_mol,
                                             double n_moles = 1.0) {
  SusceptibilitySeries series;
  series.unit = unit;
  series.sample_id = "synthetic";
  for (double t : temperatures)
    series.points.push_back(bleaney_bowers_chi(j_over_kb, g, t, n_moles, unit));
  return series;
}

/// Experimental coherence |c| from each raw point (fitted g) beside the
/// zero-field closed form at the fitted J. Points whose correlation is
/// unphysical are kept, with NaN coherence and flag "unphysical".
inline SweepTable coherence_series(const SusceptibilitySeries& series, const FitResult& fit) {
  if (!fit.converged)
    throw DataError("coherence series requires a converged fit");

  SweepTable table;
  table.columns = {"T_kelvin", "C_experimental", "C_theoretical", "residual"};
  table.text_columns = {"flag"};
  table.metadata["j_over_kb"] = detail::format_number(fit.j_over_kb);
  table.metadata["g"] = detail::format_number(fit.g);
  table.metadata["unit"] = std::string(to_string(series.unit));
  if (!series.sample_id.empty())
    table.metadata["sample"] = series.sample_id;

  for (const auto& point : series.points) {
    const double theory = coherence_longitudinal({fit.j_over_kb, fit.g, point.temperature, 0.0}).value;
    try {
      const double measured = coherence_from_chi(point, fit.g, fit.model_scale).value;
      table.add_row({point.temperature, measured, theory, measured - theory}, {"ok"});
    } catch (const DataError&) {
      const double nan = std::nan("");
      table.add_row({point.temperature, nan, theory, nan}, {"unphysical"});
    }
  }
  return table;
}

} // namespace dimerq
