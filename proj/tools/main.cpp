// Command-line front end for the hBN spin-relaxometry toolkit: simulates
// F1/F2 decay curves, fits rates and power laws, converts DQ rates to
// electric-field noise spectra, and tabulates ODMR quantities.
//
// Exit codes: 0 success (including flagged non-convergence), 2 usage or
// input error, 1 internal failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaxo/csv.hpp"
#include "relaxo/errors.hpp"
#include "relaxo/inference.hpp"
#include "relaxo/noise_spectroscopy.hpp"
#include "relaxo/rate_dynamics.hpp"
#include "relaxo/report.hpp"
#include "relaxo/spin_model.hpp"
#include "relaxo/synth.hpp"

namespace {

using namespace relaxo;

struct SimulateOpts {
  std::string protocol = "pair";
  double omega_khz = 0.0;
  double gamma_khz = 0.0;
  double amplitude = 1.0;
  double baseline = 0.0;
  double fidelity = 1.0;
  double tau_min_us = 0.0;
  double tau_max_us = 0.0;
  int tau_points = 32;
  int shots = 1;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
  std::string out_prefix = "run";
};

std::vector<double> make_tau_grid(const SimulateOpts& opt, const rates::RateParams& rp) {
  if (opt.tau_min_us > 0.0 && opt.tau_max_us > 0.0) {
    if (opt.tau_max_us <= opt.tau_min_us)
      throw InvalidInput("tau_max_us must exceed tau_min_us");
    std::vector<double> grid(opt.tau_points);
    const double step = std::log(opt.tau_max_us / opt.tau_min_us) / (opt.tau_points - 1);
    for (int i = 0; i < opt.tau_points; ++i) grid[i] = opt.tau_min_us * std::exp(i * step);
    grid.back() = opt.tau_max_us;
    return grid;
  }
  return synth::default_tau_grid_us(rp, opt.tau_points);
}

void run_simulate(const SimulateOpts& opt) {
  const rates::RateParams rp{opt.omega_khz, opt.gamma_khz};
  const rates::ReadoutModel readout{opt.amplitude, opt.baseline, opt.fidelity};
  synth::AcquisitionConfig acq;
  acq.tau_grid_us = make_tau_grid(opt, rp);
  acq.shots = opt.shots;
  acq.noise_scale = opt.noise_scale;
  acq.seed = opt.seed;

  if (opt.protocol == "pair") {
    const auto [f1, f2] = synth::paired_f1_f2(rp, readout, acq);
    io::write_decay_curve(opt.out_prefix + "_f1.csv", f1);
    io::write_decay_curve(opt.out_prefix + "_f2.csv", f2);
    std::cout << opt.out_prefix << "_f1.csv\n" << opt.out_prefix << "_f2.csv\n";
  } else {
    const synth::CurveModel model =
        opt.protocol == "f1" ? synth::CurveModel::F1 : synth::CurveModel::F2;
    synth::DecayCurve curve = synth::generate_curve(model, rp, readout, acq);
    curve.meta = "protocol=" + opt.protocol;
    const std::string path = opt.out_prefix + "_" + opt.protocol + ".csv";
    io::write_decay_curve(path, curve);
    std::cout << path << "\n";
  }
}

void emit_fit(io::Report& report, const std::string& prefix, const fit::FitResult& fr) {
  for (Eigen::Index i = 0; i < fr.params.size(); ++i) {
    report.set(prefix + ".param." + fr.names[static_cast<std::size_t>(i)], fr.params(i));
    report.set(prefix + ".sigma." + fr.names[static_cast<std::size_t>(i)], fr.sigmas(i));
  }
  for (Eigen::Index i = 0; i < fr.covariance.rows(); ++i)
    for (Eigen::Index j = 0; j < fr.covariance.cols(); ++j)
      report.set(prefix + ".cov." + std::to_string(i) + "." + std::to_string(j),
                 fr.covariance(i, j));
  report.set(prefix + ".chi2_reduced", fr.chi2_reduced);
  report.set(prefix + ".iterations", fr.iterations);
  report.set(prefix + ".converged", fr.converged);
}

void finish_report(const io::Report& report, const std::string& out) {
  if (out.empty())
    std::cout << report.render();
  else
    report.write_atomic(out);
}

void run_fit_decay(const std::string& in, const std::string& model_name,
                   const std::string& out) {
  const synth::DecayCurve curve = io::read_decay_curve(in);
  const fit::DecayModel model = model_name == "exp-offset" ? fit::DecayModel::SingleExpOffset
                                                           : fit::DecayModel::SingleExp;
  const fit::FitResult result = fit::fit_decay(curve, model);

  io::Report report;
  report.add_input("decay", in);
  report.set("fit.model", model_name);
  emit_fit(report, "fit", result);
  finish_report(report, out);
}

void run_fit_pair(const std::string& f1_path, const std::string& f2_path,
                  const std::string& out) {
  const synth::DecayCurve f1 = io::read_decay_curve(f1_path);
  const synth::DecayCurve f2 = io::read_decay_curve(f2_path);
  const fit::RateEstimate est = fit::extract_rates(f1, f2);

  io::Report report;
  report.add_input("f1", f1_path);
  report.add_input("f2", f2_path);
  report.set("rates.omega_khz", est.omega_khz);
  report.set("rates.omega_sigma_khz", est.omega_sigma_khz);
  report.set("rates.gamma_khz", est.gamma_khz);
  report.set("rates.gamma_sigma_khz", est.gamma_sigma_khz);
  report.set("rates.gamma_raw_khz", est.gamma_raw_khz);
  report.set("rates.physical", est.physical);
  const rates::RateParams rp{est.omega_khz, est.gamma_khz};
  if (3.0 * rp.omega_khz + rp.gamma_khz > 0.0) {
    report.set("rates.t1_full_us", rates::t1_full_us(rp));
    if (rp.omega_khz > 0.0) report.set("rates.t1_conventional_us", rates::t1_conventional_us(rp));
  }
  emit_fit(report, "f1_fit", est.f1_fit);
  emit_fit(report, "f2_fit", est.f2_fit);
  finish_report(report, out);
}

void run_fit_powerlaw(const std::string& in, double e_mhz, const std::string& out) {
  const io::Table table = io::read_table(in, {"f_mhz", "gamma_khz", "gamma_err_khz"});
  std::vector<fit::PowerLawPoint> points;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (!(row[0] > 2.0 * e_mhz))
      throw io::CsvError("f_mhz must exceed 2E = " + io::format_double(2.0 * e_mhz), r + 2, 1);
    points.push_back({row[0], row[1], row[2]});
  }
  const fit::PowerLawFit result = fit::fit_power_law(points, e_mhz);

  io::Report report;
  report.add_input("spectrum", in);
  report.set("powerlaw.e_mhz", result.e_used_mhz);
  report.set("powerlaw.amplitude", result.amplitude);
  report.set("powerlaw.amplitude_sigma", result.amplitude_sigma);
  report.set("powerlaw.exponent", result.exponent);
  report.set("powerlaw.exponent_sigma", result.exponent_sigma);
  report.set("powerlaw.gamma_inf_khz", result.gamma_inf_khz);
  report.set("powerlaw.gamma_inf_sigma_khz", result.gamma_inf_sigma_khz);
  emit_fit(report, "powerlaw.fit", result.detail);
  finish_report(report, out);
}

void run_fit_templaw(const std::string& in, const std::string& out) {
  const io::Table table = io::read_table(in, {"t_kelvin", "inv_t1_khz"});
  std::vector<fit::TempPoint> points;
  for (const auto& row : table.rows) points.push_back({row[0], row[1]});
  const fit::TempLawFit result = fit::fit_temperature_law(points);

  io::Report report;
  report.add_input("temperatures", in);
  report.set("templaw.exponent", result.exponent);
  report.set("templaw.exponent_sigma", result.exponent_sigma);
  report.set("templaw.log_prefactor", result.log_prefactor);
  report.set("templaw.log_prefactor_sigma", result.log_prefactor_sigma);
  finish_report(report, out);
}

noise::NoiseSpectrum read_spectrum(const std::string& path) {
  const io::Table table = io::read_table(path, {"f_mhz", "s_e_perp", "sigma"});
  noise::NoiseSpectrum spectrum;
  for (const auto& row : table.rows) {
    noise::NoisePoint point;
    point.f_mhz = row[0];
    point.s_e_perp = row[1];
    point.sigma = row[2];
    point.unphysical = point.s_e_perp < 0.0;
    spectrum.points.push_back(point);
  }
  spectrum.validate();
  return spectrum;
}

void run_noise(const std::string& in, double gamma_inf_khz, double d_perp,
               const std::string& out) {
  const io::Table table = io::read_table(in, {"f_mhz", "gamma_khz", "gamma_err_khz"});
  if (table.rows.empty()) throw InvalidInput("empty gamma table");
  std::vector<noise::SpectrumEntry> entries;
  for (const auto& row : table.rows) entries.push_back({row[0], row[1], row[2]});
  const noise::NoiseSpectrum spectrum =
      noise::build_spectrum(std::move(entries), gamma_inf_khz, {d_perp});

  io::Table out_table;
  out_table.header = {"f_mhz", "s_e_perp", "sigma"};
  for (const auto& point : spectrum.points)
    out_table.rows.push_back({point.f_mhz, point.s_e_perp, point.sigma});
  io::write_table_atomic(out, out_table);
  std::cout << out << "\n";
}

void run_noise_compare(const std::string& raw_path, const std::string& coated_path,
                       const std::string& out) {
  const noise::NoiseSpectrum raw = read_spectrum(raw_path);
  const noise::NoiseSpectrum coated = read_spectrum(coated_path);
  const noise::SuppressionResult result = noise::suppression(raw, coated);

  io::Table out_table;
  out_table.header = {"f_mhz", "suppression_percent"};
  for (std::size_t i = 0; i < result.percent.size(); ++i)
    out_table.rows.push_back({raw.points[i].f_mhz, result.percent[i]});
  io::write_table_atomic(out, out_table);
  std::cout << "average_suppression_percent = " << io::format_double(result.average) << "\n";
}

struct OdmrOpts {
  double d_mhz = 3480.0;
  double e_mhz = 48.0;
  double g = 2.0;
  double b_gauss = 0.0;
  double polar_rad = 0.0;
  double azimuth_rad = 0.0;
};

void run_odmr(const OdmrOpts& opt) {
  const spin::DefectParams params{opt.d_mhz, opt.e_mhz, opt.g, std::nullopt, ""};
  const spin::FieldConfig field{opt.b_gauss, opt.polar_rad, opt.azimuth_rad};
  const spin::OdmrFrequencies nu = spin::odmr_frequencies(params, field);
  std::cout << "nu_minus_mhz = " << io::format_double(nu.nu_minus_mhz) << "\n"
            << "nu_plus_mhz = " << io::format_double(nu.nu_plus_mhz) << "\n"
            << "splitting_mhz = " << io::format_double(nu.nu_plus_mhz - nu.nu_minus_mhz)
            << "\n";
}

struct SweepOpts {
  OdmrOpts defect;
  double b_min_gauss = 0.0;
  double b_max_gauss = 200.0;
  int points = 50;
  std::string splitting = "odmr";  // or "zeeman": bare 2 g muB B
  double amplitude = 0.0;
  double exponent = 2.0;
  double gamma_inf_khz = 0.0;
  double d_perp = 0.0;  // > 0 adds an s_e_perp column
  std::string out = "sweep.csv";
};

void run_sweep(const SweepOpts& opt) {
  if (opt.b_max_gauss < opt.b_min_gauss) throw InvalidInput("b_max_gauss < b_min_gauss");
  const spin::DefectParams params{opt.defect.d_mhz, opt.defect.e_mhz, opt.defect.g,
                                  std::nullopt, ""};
  const bool with_noise = opt.d_perp > 0.0;

  io::Table table;
  table.header = {"b_gauss", "f_mhz", "gamma_khz"};
  if (with_noise) table.header.push_back("s_e_perp");

  for (int i = 0; i < opt.points; ++i) {
    const double b = opt.points == 1
                         ? opt.b_min_gauss
                         : opt.b_min_gauss +
                               i * (opt.b_max_gauss - opt.b_min_gauss) / (opt.points - 1);
    double f;
    if (opt.splitting == "zeeman")
      f = 2.0 * opt.defect.g * spin::PhysicalConstants::bohr_mhz_per_gauss * b;
    else
      f = spin::dq_splitting_mhz(params, {b, opt.defect.polar_rad, opt.defect.azimuth_rad});

    const double excess = f > 2.0 * opt.defect.e_mhz
                              ? opt.amplitude * std::pow(f - 2.0 * opt.defect.e_mhz,
                                                         -opt.exponent)
                              : std::numeric_limits<double>::quiet_NaN();
    const double gamma = excess + opt.gamma_inf_khz;
    std::vector<double> row{b, f, gamma};
    if (with_noise)
      row.push_back(noise::electric_noise(gamma, opt.gamma_inf_khz, {opt.d_perp}));
    table.rows.push_back(std::move(row));
  }
  io::write_table_atomic(opt.out, table);
  std::cout << opt.out << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"hBN spin-1 relaxometry toolkit"};
  app.require_subcommand(1);
  app.set_config("--config")->description("flat key = value config file; flags override");
  app.allow_config_extras(false);

  // simulate
  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate synthetic decay curves");
  simulate->add_option("--protocol", sim.protocol)
      ->check(CLI::IsMember({"f1", "f2", "pair"}));
  simulate->add_option("--omega-khz", sim.omega_khz)->required()->check(CLI::NonNegativeNumber);
  simulate->add_option("--gamma-khz", sim.gamma_khz)->required()->check(CLI::NonNegativeNumber);
  simulate->add_option("--amplitude", sim.amplitude)->check(CLI::PositiveNumber);
  simulate->add_option("--baseline", sim.baseline);
  simulate->add_option("--fidelity", sim.fidelity)->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--tau-min-us", sim.tau_min_us)->check(CLI::NonNegativeNumber);
  simulate->add_option("--tau-max-us", sim.tau_max_us)->check(CLI::NonNegativeNumber);
  simulate->add_option("--tau-points", sim.tau_points)->check(CLI::Range(2, 100000));
  simulate->add_option("--shots", sim.shots)->check(CLI::PositiveNumber);
  simulate->add_option("--noise-scale", sim.noise_scale)->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed)->required();
  simulate->add_option("--out-prefix", sim.out_prefix);
  simulate->callback([&] { run_simulate(sim); });

  // fit
  CLI::App* fit_cmd = app.add_subcommand("fit", "weighted nonlinear least squares");
  fit_cmd->require_subcommand(1);

  std::string fit_in, fit_out, fit_model = "exp";
  CLI::App* fit_decay_cmd = fit_cmd->add_subcommand("decay", "single exponential decay fit");
  fit_decay_cmd->add_option("--in", fit_in)->required()->check(CLI::ExistingFile);
  fit_decay_cmd->add_option("--model", fit_model)->check(CLI::IsMember({"exp", "exp-offset"}));
  fit_decay_cmd->add_option("--out", fit_out);
  fit_decay_cmd->callback([&] { run_fit_decay(fit_in, fit_model, fit_out); });

  std::string pair_f1, pair_f2, pair_out;
  CLI::App* fit_pair_cmd = fit_cmd->add_subcommand("pair", "joint omega/gamma extraction");
  fit_pair_cmd->add_option("--f1", pair_f1)->required()->check(CLI::ExistingFile);
  fit_pair_cmd->add_option("--f2", pair_f2)->required()->check(CLI::ExistingFile);
  fit_pair_cmd->add_option("--out", pair_out);
  fit_pair_cmd->callback([&] { run_fit_pair(pair_f1, pair_f2, pair_out); });

  std::string pl_in, pl_out;
  double pl_e_mhz = 48.0;
  CLI::App* fit_pl_cmd = fit_cmd->add_subcommand("powerlaw", "gamma(f) power-law fit");
  fit_pl_cmd->add_option("--in", pl_in)->required()->check(CLI::ExistingFile);
  fit_pl_cmd->add_option("--e-mhz", pl_e_mhz)->check(CLI::NonNegativeNumber);
  fit_pl_cmd->add_option("--out", pl_out);
  fit_pl_cmd->callback([&] { run_fit_powerlaw(pl_in, pl_e_mhz, pl_out); });

  std::string tl_in, tl_out;
  CLI::App* fit_tl_cmd = fit_cmd->add_subcommand("templaw", "log-log temperature power law");
  fit_tl_cmd->add_option("--in", tl_in)->required()->check(CLI::ExistingFile);
  fit_tl_cmd->add_option("--out", tl_out);
  fit_tl_cmd->callback([&] { run_fit_templaw(tl_in, tl_out); });

  // noise
  std::string noise_in, noise_out = "spectrum.csv";
  std::vector<std::string> compare_paths;
  double noise_gamma_inf = 0.0, noise_d_perp = 0.4;
  CLI::App* noise_cmd = app.add_subcommand("noise", "electric-field noise spectra");
  noise_cmd->add_option("--in", noise_in)->check(CLI::ExistingFile);
  noise_cmd->add_option("--gamma-inf-khz", noise_gamma_inf)->check(CLI::NonNegativeNumber);
  noise_cmd->add_option("--d-perp-over-h", noise_d_perp)->check(CLI::PositiveNumber);
  noise_cmd->add_option("--compare", compare_paths)
      ->expected(2)
      ->check(CLI::ExistingFile)
      ->description("raw and coated spectrum CSVs");
  noise_cmd->add_option("--out", noise_out);
  noise_cmd->callback([&] {
    if (!compare_paths.empty())
      run_noise_compare(compare_paths[0], compare_paths[1], noise_out);
    else if (!noise_in.empty())
      run_noise(noise_in, noise_gamma_inf, noise_d_perp, noise_out);
    else
      throw InvalidInput("noise needs --in or --compare");
  });

  // odmr
  OdmrOpts odmr;
  CLI::App* odmr_cmd = app.add_subcommand("odmr", "print ODMR frequencies and splitting");
  odmr_cmd->add_option("--d-mhz", odmr.d_mhz)->check(CLI::PositiveNumber);
  odmr_cmd->add_option("--e-mhz", odmr.e_mhz)->check(CLI::NonNegativeNumber);
  odmr_cmd->add_option("--g", odmr.g)->check(CLI::PositiveNumber);
  odmr_cmd->add_option("--b-gauss", odmr.b_gauss)->check(CLI::NonNegativeNumber);
  odmr_cmd->add_option("--polar-rad", odmr.polar_rad);
  odmr_cmd->add_option("--azimuth-rad", odmr.azimuth_rad);
  odmr_cmd->callback([&] { run_odmr(odmr); });

  // sweep
  SweepOpts sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "tabulate gamma(f) or S(f) over a B grid");
  sweep_cmd->add_option("--d-mhz", sweep.defect.d_mhz)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--e-mhz", sweep.defect.e_mhz)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--g", sweep.defect.g)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--polar-rad", sweep.defect.polar_rad);
  sweep_cmd->add_option("--azimuth-rad", sweep.defect.azimuth_rad);
  sweep_cmd->add_option("--b-min-gauss", sweep.b_min_gauss)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--b-max-gauss", sweep.b_max_gauss)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--points", sweep.points)->check(CLI::Range(1, 1000000));
  sweep_cmd->add_option("--splitting", sweep.splitting)
      ->check(CLI::IsMember({"odmr", "zeeman"}));
  sweep_cmd->add_option("--amplitude", sweep.amplitude)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--exponent", sweep.exponent);
  sweep_cmd->add_option("--gamma-inf-khz", sweep.gamma_inf_khz)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--d-perp-over-h", sweep.d_perp)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--out", sweep.out);
  sweep_cmd->callback([&] { run_sweep(sweep); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const io::CsvError& e) {
    std::cerr << "error: row=" << e.row() << " col=" << e.column() << " " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
