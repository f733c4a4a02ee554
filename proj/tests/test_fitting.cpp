#include <dimerq/fitting.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

using namespace dimerq;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> linear_temperatures(int n = 50, double lo = 2.0, double hi = 350.0) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i)
    t.push_back(lo + (hi - lo) * i / (n - 1));
  return t;
}

SusceptibilitySeries noisy_series(double rel_noise, std::uint64_t seed) {
  auto series = synthetic_series(-2.86, 2.0, linear_temperatures());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& p : series.points)
    p.chi *= 1.0 + rel_noise * n(rng);
  return series;
}

SusceptibilitySeries parse(const std::string& text) {
  std::istringstream is(text);
  return read_series(is, SusceptibilityUnit::emu_per_mol);
}

} // namespace

TEST_CASE("read_series", "[fitting][io]") {
  SECTION("round trip of 50 synthetic rows") {
    const auto series = synthetic_series(-2.86, 2.0, linear_temperatures());
    std::ostringstream os;
    write_series(series, os);
    const auto back = parse(os.str());
    REQUIRE(back.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(back.points[i].temperature == series.points[i].temperature);
      CHECK(back.points[i].chi == series.points[i].chi);
    }
  }
  SECTION("comments, blank lines and CRLF are tolerated") {
    std::string text = "# KNaCuSi4O10 synthetic\r\nT_kelvin,chi\r\n\r\n";
    for (int i = 1; i <= 8; ++i)
      text += std::to_string(i) + ".5,0.01\r\n# interleaved comment\n";
    CHECK(parse(text).size() == 8);
  }
  SECTION("shuffled temperatures") {
    std::string text = "T_kelvin,chi\n";
    for (double t : {2.0, 3.0, 5.0, 4.0, 6.0, 7.0, 8.0, 9.0, 10.0})
      text += std::to_string(t) + ",0.01\n";
    CHECK_THROWS_WITH(parse(text), ContainsSubstring("temperatures not increasing"));
  }
  SECTION("unparseable row names its row index") {
    std::string text = "T_kelvin,chi\n2,0.1\nabc,1e-3\n";
    CHECK_THROWS_WITH(parse(text), ContainsSubstring("row 3"));
  }
  SECTION("malformed header") {
    CHECK_THROWS_WITH(parse("T,chi\n1,2\n"), ContainsSubstring("malformed header"));
    CHECK_THROWS_WITH(parse(""), ContainsSubstring("malformed header"));
  }
  SECTION("too few rows") {
    CHECK_THROWS_WITH(parse("T_kelvin,chi\n1,0.1\n2,0.1\n"), ContainsSubstring("at least 8"));
  }
  SECTION("non-finite and non-positive values") {
    CHECK_THROWS_WITH(parse("T_kelvin,chi\n1,0.1\n2,nan\n"), ContainsSubstring("row 3: non-finite"));
    CHECK_THROWS_WITH(parse("T_kelvin,chi\n0,0.1\n"), ContainsSubstring("row 2"));
    CHECK_THROWS_WITH(parse("T_kelvin,chi\n1,0.1,7\n"), ContainsSubstring("expected 2 fields"));
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_series("/nonexistent/chi.csv", SusceptibilityUnit::emu_per_mol), DataError);
  }
}

TEST_CASE("Bleaney-Bowers Jacobian matches central differences", "[fitting][jacobian][property]") {
  const auto series = synthetic_series(-2.86, 2.0, linear_temperatures());
  const detail::BleaneyBowersModel model{series, 1.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uj(-6.0, 6.0), ug(1.8, 2.4), ut(1.0, 350.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double j = uj(rng), g = ug(rng), t = ut(rng);
    const auto analytic = model.gradient(t, j, g);
    const double hj = 1e-6 * std::max(std::abs(j), 1.0);
    const double hg = 1e-6 * g;
    const double dj = (model.value(t, j + hj, g) - model.value(t, j - hj, g)) / (2.0 * hj);
    const double dg = (model.value(t, j, g + hg) - model.value(t, j, g - hg)) / (2.0 * hg);
    CHECK_THAT(analytic(0), WithinAbs(dj, 1e-6 * std::abs(dj) + 1e-15));
    CHECK_THAT(analytic(1), WithinAbs(dg, 1e-6 * std::abs(dg)));
  }
}

TEST_CASE("noiseless data refits exactly", "[fitting][lm]") {
  const auto series = synthetic_series(-2.86, 2.0, linear_temperatures());

  SECTION("default initial guess") {
    const auto fit = fit_bleaney_bowers(series);
    CHECK(fit.converged);
    CHECK_THAT(fit.j_over_kb, WithinAbs(-2.86, 1e-8));
    CHECK_THAT(fit.g, WithinAbs(2.0, 1e-8));
    CHECK(fit.stderr_j >= 0.0);
    CHECK(fit.stderr_g >= 0.0);
  }
  SECTION("distant initial guesses") {
    for (auto init : {std::pair{-10.0, 1.5}, std::pair{1.0, 2.5}, std::pair{-0.1, 2.0}}) {
      FitOptions options;
      options.init = init;
      const auto fit = fit_bleaney_bowers(series, options);
      CHECK(fit.converged);
      CHECK_THAT(fit.j_over_kb, WithinAbs(-2.86, 1e-8));
      CHECK_THAT(fit.g, WithinAbs(2.0, 1e-8));
    }
  }
  SECTION("SI units") {
    const auto si = synthetic_series(-2.86, 2.0, linear_temperatures(), SusceptibilityUnit::si_m3_per_mol);
    const auto fit = fit_bleaney_bowers(si);
    CHECK(fit.converged);
    CHECK_THAT(fit.j_over_kb, WithinAbs(-2.86, 1e-8));
    CHECK_THAT(fit.g, WithinAbs(2.0, 1e-8));
  }
  SECTION("ferromagnetic coupling") {
    const auto fm = synthetic_series(1.5, 2.1, linear_temperatures());
    const auto fit = fit_bleaney_bowers(fm);
    CHECK(fit.converged);
    CHECK_THAT(fit.j_over_kb, WithinAbs(1.5, 1e-8));
    CHECK_THAT(fit.g, WithinAbs(2.1, 1e-8));
  }
}

TEST_CASE("accepted LM steps never increase the objective", "[fitting][lm][property]") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    FitOptions options;
    options.init = std::pair{-8.0, 1.7};
    const auto fit = fit_bleaney_bowers(noisy_series(0.01, seed), options);
    REQUIRE(fit.rss_history.size() >= 2);
    for (std::size_t i = 1; i < fit.rss_history.size(); ++i)
      CHECK(fit.rss_history[i] <= fit.rss_history[i - 1]);
    CHECK(fit.converged);
    CHECK(fit.gradient_norm < 1e-10);
  }
}

TEST_CASE("fit error shrinks with the noise level", "[fitting][lm][property]") {
  std::vector<double> mean_error;
  for (double noise : {1e-2, 1e-4, 1e-6}) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto fit = fit_bleaney_bowers(noisy_series(noise, seed));
      REQUIRE(fit.converged);
      total += std::abs(fit.j_over_kb + 2.86) + std::abs(fit.g - 2.0);
    }
    mean_error.push_back(total / 10.0);
  }
  CHECK(mean_error[1] < mean_error[0]);
  CHECK(mean_error[2] < mean_error[1]);
  CHECK(mean_error[2] < 1e-5);
}

TEST_CASE("1% noise recovers J within the quoted uncertainty", "[fitting][lm]") {
  std::vector<double> dj, dg;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto fit = fit_bleaney_bowers(noisy_series(0.01, seed));
    REQUIRE(fit.converged);
    dj.push_back(std::abs(fit.j_over_kb + 2.86));
    dg.push_back(std::abs(fit.g - 2.0));
  }
  std::nth_element(dj.begin(), dj.begin() + 15, dj.end());
  std::nth_element(dg.begin(), dg.begin() + 15, dg.end());
  CHECK(dj[15] < 0.05);
  CHECK(dg[15] < 0.02);
}

TEST_CASE("fit is equivariant under amplitude scaling", "[fitting][lm][property]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto base = noisy_series(0.01, seed);
    auto scaled = base;
    for (auto& p : scaled.points)
      p.chi *= 3.7;
    FitOptions options;
    options.model_scale = 3.7;
    const auto a = fit_bleaney_bowers(base);
    const auto b = fit_bleaney_bowers(scaled, options);
    CHECK_THAT(b.j_over_kb, WithinAbs(a.j_over_kb, 1e-10));
    CHECK_THAT(b.g, WithinAbs(a.g, 1e-10));
  }
}

TEST_CASE("fit failure modes", "[fitting][lm]") {
  SECTION("iteration budget exhausted") {
    FitOptions options;
    options.init = std::pair{-40.0, 1.2};
    options.max_iterations = 2;
    const auto fit = fit_bleaney_bowers(noisy_series(0.01, 1), options);
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 2);
    CHECK(fit.rss <= fit.rss_history.front());
  }
  SECTION("temperatures far above |J| leave J unidentifiable") {
    std::vector<double> hot;
    for (int i = 0; i < 10; ++i)
      hot.push_back(1e6 * (1.0 + i));
    CHECK_THROWS_WITH(fit_bleaney_bowers(synthetic_series(-2.86, 2.0, hot)), ContainsSubstring("degenerate fit"));
  }
  SECTION("too few points") {
    auto series = synthetic_series(-2.86, 2.0, {2.0, 3.0, 4.0});
    CHECK_THROWS_AS(fit_bleaney_bowers(series), DataError);
  }
}

TEST_CASE("coherence_series", "[fitting][coherence]") {
  SECTION("noiseless data: experiment equals theory") {
    const auto series = synthetic_series(-2.86, 2.0, linear_temperatures());
    const auto fit = fit_bleaney_bowers(series);
    const auto table = coherence_series(series, fit);
    REQUIRE(table.row_count() == 50);
    const auto ce = table.column("C_experimental");
    const auto ct = table.column("C_theoretical");
    for (std::size_t i = 0; i < ce.size(); ++i)
      CHECK_THAT(ce[i], WithinAbs(ct[i], 1e-10));
    for (const auto& flag : table.text_column("flag"))
      CHECK(flag == "ok");
  }
  SECTION("a corrupted point is flagged, the rest intact") {
    auto series = synthetic_series(-2.86, 2.0, linear_temperatures());
    const auto fit = fit_bleaney_bowers(series);
    series.points[20].chi *= 10.0;
    const auto table = coherence_series(series, fit);
    const auto flags = table.text_column("flag");
    const auto ce = table.column("C_experimental");
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (i == 20) {
        CHECK(flags[i] == "unphysical");
        CHECK(std::isnan(ce[i]));
      } else {
        CHECK(flags[i] == "ok");
        CHECK(std::isfinite(ce[i]));
      }
    }
  }
  SECTION("2.43 K point") {
    std::vector<double> t{2.0, 2.2, 2.43, 3.0, 5.0, 10.0, 50.0, 100.0, 350.0};
    const auto series = synthetic_series(-2.86, 2.0, t);
    const auto table = coherence_series(series, fit_bleaney_bowers(series));
    CHECK_THAT(table.column("C_experimental")[2], WithinAbs(0.359, 5e-4));
  }
  SECTION("unconverged fit is refused") {
    FitResult fit;
    CHECK_THROWS_AS(coherence_series(synthetic_series(-2.86, 2.0, linear_temperatures()), fit), DataError);
  }
}
