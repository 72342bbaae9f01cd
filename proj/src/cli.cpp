#include "volspec/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>

#include "volspec/errors.hpp"
#include "volspec/estimators.hpp"
#include "volspec/fisher.hpp"
#include "volspec/io.hpp"
#include "volspec/mc.hpp"
#include "volspec/simulate.hpp"
#include "volspec/spectral.hpp"
#include "volspec/verify.hpp"

namespace volspec {
namespace {

struct EstimateOptions {
  std::string obs;
  double delta = 0.0;
  std::size_t blocks = 0;
  std::size_t J = 1;
  std::string weights = "adaptive";
  std::string bias = "paper";
  std::string kernel = "local-linear";
  double bandwidth = 0.25;
  std::string pilot = "all-frequencies";
  std::string curve;
};

void add_estimate_options(CLI::App& cmd, EstimateOptions& o, bool iv) {
  cmd.add_option("--obs", o.obs, "observation CSV (header i,y)")->required();
  cmd.add_option("--delta", o.delta, "noise standard deviation")->required();
  cmd.add_option("--blocks", o.blocks, "number of blocks 1/h")->required();
  cmd.add_option("--kernel", o.kernel, "spot smoother: box | local-linear");
  cmd.add_option("--bandwidth", o.bandwidth, "spot smoother bandwidth");
  if (iv) {
    cmd.add_option("--J", o.J, "spectral cutoff")->required();
    cmd.add_option("--weights", o.weights, "adaptive | oracle");
    cmd.add_option("--bias", o.bias, "noise correction: paper | exact");
    cmd.add_option("--pilot", o.pilot, "adaptive-weight pilot: all-frequencies | first-frequency");
    cmd.add_option("--curve", o.curve, "reference curve (oracle weights, asymptotic sd)");
  }
}

EstimatorConfig make_config(const EstimateOptions& o, std::size_t n) {
  EstimatorConfig c;
  c.grid = BlockGrid(n, o.blocks);
  c.J = o.J;
  c.delta = o.delta;
  c.weight_mode = parse_weight_mode(o.weights);
  c.bias_correction = parse_bias_correction(o.bias);
  c.spot_kernel = parse_spot_kernel(o.kernel);
  c.spot_bandwidth = o.bandwidth;
  c.pilot = parse_pilot_mode(o.pilot);
  c.validate();
  return c;
}

void print(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral volatility estimation under microstructure noise", "volspec"};
  app.require_subcommand(1);
  std::function<void()> action;

  // simulate
  std::string sim_curve, sim_out;
  std::size_t sim_n = 0;
  double sim_delta = 0.0;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "simulate noisy observations to CSV");
  simulate->add_option("--curve", sim_curve, "curve spec")->required();
  simulate->add_option("--n", sim_n, "number of observations")->required();
  simulate->add_option("--delta", sim_delta, "noise standard deviation")->required();
  simulate->add_option("--seed", sim_seed, "random seed");
  simulate->add_option("--out", sim_out, "output CSV path")->required();
  simulate->callback([&] {
    action = [&] {
      const auto curve = parse_curve_spec(sim_curve);
      const auto obs = simulate_observations(curve, sim_n, sim_delta, sim_seed);
      write_observations_csv(obs, sim_out);
      Json j;
      j["out"] = sim_out;
      j["curve"] = sim_curve;
      j["n"] = sim_n;
      j["delta"] = sim_delta;
      j["seed"] = sim_seed;
      j["integrated_variance"] = curve.integrated_variance(0.0, 1.0);
      print(out, j);
    };
  });

  // estimate iv | spot
  EstimateOptions iv_opts, spot_opts;
  auto* estimate = app.add_subcommand("estimate", "estimate from an observation CSV");
  estimate->require_subcommand(1);
  auto* est_iv = estimate->add_subcommand("iv", "integrated volatility");
  add_estimate_options(*est_iv, iv_opts, true);
  est_iv->callback([&] {
    action = [&] {
      const auto obs = read_observations_csv(iv_opts.obs, iv_opts.delta);
      const auto config = make_config(iv_opts, obs.n);
      std::optional<VolatilityCurve> reference;
      if (!iv_opts.curve.empty()) reference = parse_curve_spec(iv_opts.curve);
      if (config.weight_mode == WeightMode::oracle && !reference)
        throw ConfigError("estimate iv: --weights oracle requires --curve");
      const WeightTable table(config.grid, config.J);
      const auto stats = compute_spectral_stats(obs, table);
      const auto est = estimate_iv(stats, config, &table, reference ? &*reference : nullptr);
      print(out, to_json(est));
    };
  });
  auto* est_spot = estimate->add_subcommand("spot", "spot volatility on block centres");
  add_estimate_options(*est_spot, spot_opts, false);
  est_spot->callback([&] {
    action = [&] {
      const auto obs = read_observations_csv(spot_opts.obs, spot_opts.delta);
      const auto config = make_config(spot_opts, obs.n);
      const auto stats = compute_spectral_stats(obs, config.grid, 1);
      print(out, to_json(estimate_spot(stats, config)));
    };
  });

  // mc
  std::string mc_config_path, mc_samples;
  unsigned mc_threads = 0;
  std::size_t mc_reps = 0;
  bool mc_full = false, mc_paired = false;
  auto* mc = app.add_subcommand("mc", "Monte Carlo study from a JSON config");
  mc->add_option("--config", mc_config_path, "McConfig JSON")->required();
  mc->add_option("--samples-csv", mc_samples, "write per-replicate estimates (rep,iv_hat)");
  mc->add_option("--threads", mc_threads, "worker threads (default: VOLSPEC_THREADS or all cores)");
  auto* reps_opt = mc->add_option("--reps", mc_reps, "override replicate count");
  mc->add_flag("--full", mc_full, "10000 replicates")->excludes(reps_opt);
  mc->add_flag("--paired", mc_paired, "adaptive and oracle weights on the same paths");
  mc->callback([&] {
    action = [&] {
      auto config = read_mc_config(mc_config_path);
      if (mc_threads > 0) config.threads = mc_threads;
      if (mc_reps > 0) config.reps = mc_reps;
      if (mc_full) config.reps = 10000;
      config.validate();
      if (mc_paired) {
        const auto report = run_mc_paired(config);
        auto adaptive_cfg = config, oracle_cfg = config;
        adaptive_cfg.weight_mode = WeightMode::adaptive;
        oracle_cfg.weight_mode = WeightMode::oracle;
        Json j;
        j["adaptive"] = to_json(report.adaptive, adaptive_cfg);
        j["oracle"] = to_json(report.oracle, oracle_cfg);
        j["rmse_difference_se"] = report.rmse_difference_se;
        if (!mc_samples.empty()) write_samples_csv(report.adaptive, mc_samples);
        err << "wall time " << report.adaptive.wall_time << " s\n";
        print(out, j);
        return;
      }
      const auto report = run_mc(config);
      if (!mc_samples.empty()) write_samples_csv(report, mc_samples);
      err << "wall time " << report.wall_time << " s\n";
      print(out, to_json(report, config));
    };
  });

  // fisher
  double f_theta = 0.0, f_h0 = 0.0;
  std::size_t f_J = 0;
  auto* fisher = app.add_subcommand("fisher", "block Fisher information");
  fisher->add_option("--theta", f_theta, "block variance")->required();
  fisher->add_option("--h0", f_h0, "spectral scale h sqrt(n)/delta")->required();
  fisher->add_option("--J", f_J, "also sum the first J frequencies");
  fisher->callback([&] {
    action = [&] {
      print(out, to_json(fisher_report(f_theta, f_h0, f_J > 0 ? std::optional(f_J) : std::nullopt)));
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "numerical identities and bounds");
  verify->require_subcommand(1);

  double v_lambda = 1.0;
  std::size_t v_series_J = 1000000;
  auto* v_series = verify->add_subcommand("series", "partial sum + tail against the closed form");
  v_series->add_option("--lambda", v_lambda, "lambda > 0");
  v_series->add_option("--J", v_series_J, "number of summed terms");
  v_series->callback([&] { action = [&] { print(out, to_json(series_identity(v_lambda, v_series_J))); }; });

  double v_sigma0 = 1.0;
  auto* v_fisher = verify->add_subcommand("fisher", "single-frequency optimum and large-h0 limit");
  v_fisher->add_option("--sigma0", v_sigma0, "volatility level");
  v_fisher->callback([&] {
    action = [&] {
      const auto opt = single_freq_optimum(v_sigma0);
      // grid search over h0 for the single-frequency information
      double best_h0 = 0.0, best = -1.0;
      const double centre = opt.h0_star;
      for (int i = 0; i <= 200000; ++i) {
        const double h0 = centre * (0.5 + 1.0 * i / 200000.0);
        const double v = single_frequency_information(v_sigma0, h0);
        if (v > best) best = v, best_h0 = h0;
      }
      constexpr double kH0 = 1000.0;
      constexpr std::size_t kJ = 1000000;
      Json j;
      j["sigma0"] = v_sigma0;
      j["h0_star"] = opt.h0_star;
      j["info_star"] = opt.info_star;
      j["efficiency"] = opt.efficiency;
      j["grid_argmax_h0"] = best_h0;
      j["grid_max_info"] = best;
      j["limit"] = Json{{"theta", 1.0}, {"h0", kH0}, {"J", kJ},
                        {"normalized", 8.0 * fisher_partial(1.0, kH0, kJ) / kH0}};
      print(out, j);
    };
  });

  std::size_t v_pairs = 200, v_max_dim = 6, v_products = 50;
  std::uint64_t v_seed = 1;
  auto* v_hell = verify->add_subcommand("hellinger", "Gaussian Hellinger bounds on random instances");
  v_hell->add_option("--pairs", v_pairs, "random SPD pairs");
  v_hell->add_option("--max-dim", v_max_dim, "largest dimension");
  v_hell->add_option("--products", v_products, "block-diagonal product instances");
  v_hell->add_option("--seed", v_seed, "random seed");
  v_hell->callback([&] {
    action = [&] {
      const auto s = verify_hellinger(v_pairs, v_max_dim, v_products, v_seed);
      Json j;
      j["pairs"] = s.pairs;
      j["general_violations"] = s.general_violations;
      j["mean_only_violations"] = s.mean_only_violations;
      j["covariance_only_violations"] = s.covariance_only_violations;
      j["max_general_ratio"] = s.max_general_ratio;
      j["products"] = s.products;
      j["product_violations"] = s.product_violations;
      j["max_product_ratio"] = s.max_product_ratio;
      j["scale_quadrature_error"] = s.scale_quadrature_error;
      j["shift_quadrature_error"] = s.shift_quadrature_error;
      j["pass"] = s.passed();
      print(out, j);
    };
  });

  std::string v_reg_curve;
  double v_reg_delta = 1.0;
  std::vector<std::size_t> v_reg_ns = {8, 16, 32, 64};
  auto* v_reg = verify->add_subcommand("regression-bound",
                                       "Hellinger distance between observed and locally averaged laws");
  v_reg->add_option("--curve", v_reg_curve, "curve spec (default: sigma = 1 + 0.5 sin(2 pi t))");
  v_reg->add_option("--delta", v_reg_delta, "noise standard deviation");
  v_reg->add_option("--n", v_reg_ns, "sample sizes")->delimiter(',');
  v_reg->callback([&] {
    action = [&] {
      const auto curve = v_reg_curve.empty() ? sine_test_curve() : parse_curve_spec(v_reg_curve);
      const auto d = verify_regression_bound(curve, v_reg_delta, v_reg_ns);
      Json rows = Json::array();
      for (const auto& r : d.rows)
        rows.push_back(Json{{"n", r.n}, {"hellinger_sq", r.hellinger_sq}, {"hs_bound", r.hs_bound}});
      Json j;
      j["delta"] = v_reg_delta;
      j["rows"] = rows;
      j["slope"] = d.slope;
      j["strictly_decreasing"] = d.strictly_decreasing;
      print(out, j);
    };
  });

  std::vector<std::size_t> v_ce_ns = {10, 100};
  double v_ce_alpha = 0.5;
  auto* v_ce = verify->add_subcommand("counterexample", "grid-invisible volatility perturbation");
  v_ce->add_option("--n", v_ce_ns, "grid sizes")->delimiter(',');
  v_ce->add_option("--alpha", v_ce_alpha, "perturbation decay in (0,1)");
  v_ce->callback([&] {
    action = [&] {
      Json rows = Json::array();
      double worst = 0.0;
      for (const auto& r : verify_counterexample(v_ce_ns, v_ce_alpha)) {
        rows.push_back(Json{{"n", r.n}, {"max_abs_deviation", r.max_abs_deviation}});
        worst = std::max(worst, r.max_abs_deviation);
      }
      Json j;
      j["alpha"] = v_ce_alpha;
      j["rows"] = rows;
      j["max_abs_deviation"] = worst;
      print(out, j);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace volspec
