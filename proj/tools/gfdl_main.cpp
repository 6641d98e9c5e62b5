#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gfdl/errors.hpp"
#include "gfdl/io.hpp"
#include "gfdl/runner.hpp"

namespace {

int report(const gfdl::cli::RunManifest& manifest) {
  for (const std::string& w : manifest.warnings) std::cerr << "warning: " << w << '\n';
  for (const std::string& f : manifest.outputs) std::cout << f << '\n';
  std::cout << manifest.summary.dump() << '\n';
  return manifest.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven Glauber-Fock lattice simulator"};
  app.set_version_flag("--version", gfdl::cli::kVersion);
  app.require_subcommand(1);

  std::string config;
  auto* simulate = app.add_subcommand("simulate", "Evolve one configuration");
  simulate->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over F0/omega and/or omega/rho");
  sweep->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  auto* spectra = app.add_subcommand("spectra", "Quasienergy or Wannier-Stark spectrum");
  spectra->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  std::string family = "sinusoidal";
  double omega = 1.0;
  int count = 1;
  auto* roots = app.add_subcommand("dl-roots", "Localisation amplitudes of a drive family");
  roots->add_option("--family", family, "sinusoidal or square")->check(CLI::IsMember({"sinusoidal", "square"}));
  roots->add_option("--omega", omega, "Drive frequency")->required();
  roots->add_option("--count", count, "Number of roots")->default_val(1);

  std::string csv;
  std::string image;
  auto* heatmap = app.add_subcommand("heatmap", "Render a trajectory CSV as SVG");
  heatmap->add_option("csv", csv, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  heatmap->add_option("-o,--output", image, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return report(gfdl::cli::run_simulate(config));
    if (*sweep) return report(gfdl::cli::run_sweep(config));
    if (*spectra) return report(gfdl::cli::run_spectra(config));
    if (*roots) {
      const auto fam = family == "square" ? gfdl::DriveFamily::Square : gfdl::DriveFamily::Sinusoidal;
      std::cout << "index,F0_over_omega,F0,residual\n";
      for (const gfdl::DlRoot& r : gfdl::cli::dl_roots(fam, omega, count)) {
        std::cout << r.index << ',' << gfdl::io::format_double(r.ratio) << ',' << gfdl::io::format_double(r.amplitude)
                  << ',' << gfdl::io::format_double(r.residual) << '\n';
      }
      return 0;
    }
    if (*heatmap) {
      gfdl::cli::emit_heatmap(csv, image);
      std::cout << image << '\n';
      return 0;
    }
  } catch (const gfdl::NumericalValidityError& e) {
    std::cerr << "numerical validity error: " << e.what() << '\n';
    return 2;
  } catch (const gfdl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const gfdl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
