#include "gfdl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <optional>
#include <thread>

#include "gfdl/errors.hpp"
#include "gfdl/exact.hpp"
#include "gfdl/observables.hpp"
#include "gfdl/propagate.hpp"
#include "gfdl/spectra.hpp"
#include "gfdl/svg.hpp"

namespace gfdl::cli {

namespace {

using io::ConfigFile;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxSweepPoints = 100000;
constexpr int kDefaultStepsPerPeriod = 2000;
constexpr int kSamplesPerPeriod = 100;
constexpr int kDefaultSites = 60;

std::optional<double> optional_double(const ConfigFile& cfg, const std::string& section, const std::string& key) {
  if (!cfg.has(section, key)) return std::nullopt;
  return cfg.get_double(section, key);
}

int count_set(std::initializer_list<bool> flags) {
  return static_cast<int>(std::count(flags.begin(), flags.end(), true));
}

HoppingProfile load_profile(const ConfigFile& cfg) {
  const std::string kind = cfg.get_string("profile", "kind", "glauber_fock");
  const cplx rho(cfg.get_double("profile", "rho", 1.0), cfg.get_double("profile", "rho_imag", 0.0));
  const int sites = cfg.get_int("profile", "sites", kDefaultSites);
  if (rho == 0.0) throw ConfigError("profile.rho", "must be nonzero");
  if (sites < 0) throw ConfigError("profile.sites", "must be >= 0");
  if (kind == "glauber_fock") return HoppingProfile::glauber_fock(rho, sites);
  if (kind == "uniform") return HoppingProfile::uniform(rho, sites);
  if (kind == "custom") {
    std::vector<double> table = cfg.get_doubles("profile", "table");
    if (table.size() < static_cast<std::size_t>(sites)) {
      throw ConfigError("profile.table", "needs " + std::to_string(sites) + " entries, has " +
                                             std::to_string(table.size()));
    }
    return HoppingProfile::custom(rho, std::move(table), sites);
  }
  throw ConfigError("profile.kind", "unknown kind '" + kind + "'");
}

// Drive keys as written; sweeps substitute one parameter at a time.
struct DriveSpec {
  DriveKind kind = DriveKind::None;
  std::optional<double> omega;
  std::optional<double> omega_over_rho;
  std::optional<double> f0;
  std::optional<double> f0_over_omega;
  std::optional<double> f0_over_rho;
  std::optional<int> dl_root;
  std::vector<double> samples;
  double t0 = 0.0;

  bool periodic() const {
    return kind == DriveKind::Sinusoidal || kind == DriveKind::Square || kind == DriveKind::Sampled;
  }

  DriveWaveform build(double rho_abs) const {
    if (kind == DriveKind::None) return DriveWaveform::none();
    if (kind == DriveKind::Dc) {
      if (count_set({f0.has_value(), f0_over_rho.has_value()}) != 1) {
        throw ConfigError("drive.F0", "dc drive needs exactly one of F0, F0_over_rho");
      }
      return DriveWaveform::dc(f0 ? *f0 : *f0_over_rho * rho_abs);
    }
    if (count_set({omega.has_value(), omega_over_rho.has_value()}) != 1) {
      throw ConfigError("drive.omega", "needs exactly one of omega, omega_over_rho");
    }
    const double w = omega ? *omega : *omega_over_rho * rho_abs;
    if (!(w > 0.0)) throw ConfigError(omega ? "drive.omega" : "drive.omega_over_rho", "must be > 0");
    if (kind == DriveKind::Sampled) {
      if (samples.empty()) throw ConfigError("drive.samples", "missing");
      return DriveWaveform::sampled(samples, w, t0);
    }
    const int given = count_set({f0.has_value(), f0_over_omega.has_value(), f0_over_rho.has_value(),
                                 dl_root.has_value()});
    if (given != 1) {
      throw ConfigError("drive.F0", "needs exactly one of F0, F0_over_omega, F0_over_rho, dl_root");
    }
    double amp = 0.0;
    if (f0) amp = *f0;
    if (f0_over_omega) amp = *f0_over_omega * w;
    if (f0_over_rho) amp = *f0_over_rho * rho_abs;
    const DriveFamily family = kind == DriveKind::Sinusoidal ? DriveFamily::Sinusoidal : DriveFamily::Square;
    if (dl_root) {
      if (*dl_root < 1) throw ConfigError("drive.dl_root", "must be >= 1");
      amp = find_dl_amplitude(family, w, *dl_root).amplitude;
    }
    return kind == DriveKind::Sinusoidal ? DriveWaveform::sinusoidal(amp, w, t0) : DriveWaveform::square(amp, w, t0);
  }
};

DriveSpec load_drive(const ConfigFile& cfg) {
  DriveSpec spec;
  const std::string kind = cfg.get_string("drive", "kind", "none");
  if (kind == "none") {
    spec.kind = DriveKind::None;
  } else if (kind == "dc") {
    spec.kind = DriveKind::Dc;
  } else if (kind == "sinusoidal") {
    spec.kind = DriveKind::Sinusoidal;
  } else if (kind == "square") {
    spec.kind = DriveKind::Square;
  } else if (kind == "sampled") {
    spec.kind = DriveKind::Sampled;
  } else {
    throw ConfigError("drive.kind", "unknown kind '" + kind + "'");
  }
  spec.omega = optional_double(cfg, "drive", "omega");
  spec.omega_over_rho = optional_double(cfg, "drive", "omega_over_rho");
  spec.f0 = optional_double(cfg, "drive", "F0");
  spec.f0_over_omega = optional_double(cfg, "drive", "F0_over_omega");
  spec.f0_over_rho = optional_double(cfg, "drive", "F0_over_rho");
  if (cfg.has("drive", "dl_root")) spec.dl_root = cfg.get_int("drive", "dl_root");
  if (cfg.has("drive", "samples")) spec.samples = cfg.get_doubles("drive", "samples");
  spec.t0 = cfg.get_double("drive", "t0", 0.0);

  if (!spec.periodic() && (spec.omega || spec.omega_over_rho)) {
    throw ConfigError("drive.omega", "not used by drive kind '" + kind + "'");
  }
  if (spec.kind == DriveKind::None && (spec.f0 || spec.f0_over_rho)) {
    throw ConfigError("drive.F0", "not used by drive kind 'none'");
  }
  if (spec.kind != DriveKind::Sampled && !spec.samples.empty()) {
    throw ConfigError("drive.samples", "only used by drive kind 'sampled'");
  }
  if ((spec.kind == DriveKind::Dc || spec.kind == DriveKind::Sampled) && (spec.f0_over_omega || spec.dl_root)) {
    throw ConfigError(spec.dl_root ? "drive.dl_root" : "drive.F0_over_omega", "not used by drive kind '" + kind + "'");
  }
  return spec;
}

struct RunSpec {
  InitialExcitation initial = 0;
  std::optional<double> dt;
  std::optional<int> steps_per_period;
  std::optional<double> t_end;
  std::optional<int> periods;
  std::optional<int> record_stride;
  Frame frame = Frame::Lab;
  Integrator integrator = Integrator::Split;

  SimulationConfig build(const HoppingProfile& profile, const DriveWaveform& drive) const {
    SimulationConfig sim;
    sim.profile = profile;
    sim.drive = drive;
    sim.initial = initial;
    sim.frame = frame;
    sim.integrator = integrator;

    const bool periodic = drive.periodic();
    if (!periodic && steps_per_period) throw ConfigError("run.steps_per_period", "needs a periodic drive");
    if (!periodic && periods) throw ConfigError("run.periods", "needs a periodic drive");
    if (dt && steps_per_period) throw ConfigError("run.dt", "give only one of dt, steps_per_period");
    if (t_end && periods) throw ConfigError("run.t_end", "give only one of t_end, periods");
    if (steps_per_period && *steps_per_period < 1) throw ConfigError("run.steps_per_period", "must be >= 1");
    if (periods && *periods < 0) throw ConfigError("run.periods", "must be >= 0");

    long long spp = 0;
    if (periodic) {
      const double period = drive.period();
      if (dt) {
        sim.dt = *dt;
        const double ratio = period / *dt;
        if (std::abs(ratio - std::round(ratio)) < 1e-9 * ratio) spp = std::llround(ratio);
      } else {
        spp = steps_per_period.value_or(kDefaultStepsPerPeriod);
        sim.dt = period / static_cast<double>(spp);
      }
      if (t_end) {
        sim.t_end = *t_end;
      } else {
        sim.t_end = periods.value_or(1) * period;
      }
    } else {
      sim.dt = dt.value_or(1e-3 / std::abs(profile.rho()));
      if (!t_end) throw ConfigError("run.t_end", "missing (required for a non-periodic drive)");
      sim.t_end = *t_end;
    }

    if (record_stride) {
      sim.record_stride = *record_stride;
    } else if (spp > 0) {
      const long long stride = std::max(1LL, spp / kSamplesPerPeriod);
      sim.record_stride = static_cast<int>(spp % stride == 0 ? stride : 1);
    } else if (sim.dt > 0.0) {
      const long long steps = std::llround(sim.t_end / sim.dt);
      sim.record_stride = static_cast<int>(std::max(1LL, steps / 500));
    }
    sim.validate();
    return sim;
  }
};

RunSpec load_run(const ConfigFile& cfg) {
  RunSpec spec;
  if (cfg.has("run", "initial_site") && cfg.has("run", "initial_amplitudes")) {
    throw ConfigError("run.initial_site", "give only one of initial_site, initial_amplitudes");
  }
  if (cfg.has("run", "initial_amplitudes")) {
    spec.initial = cfg.get_complexes("run", "initial_amplitudes");
  } else {
    spec.initial = cfg.get_int("run", "initial_site", 0);
  }
  spec.dt = optional_double(cfg, "run", "dt");
  if (cfg.has("run", "steps_per_period")) spec.steps_per_period = cfg.get_int("run", "steps_per_period");
  spec.t_end = optional_double(cfg, "run", "t_end");
  if (cfg.has("run", "periods")) spec.periods = cfg.get_int("run", "periods");
  if (cfg.has("run", "record_stride")) spec.record_stride = cfg.get_int("run", "record_stride");

  const std::string frame = cfg.get_string("run", "frame", "lab");
  if (frame == "lab") {
    spec.frame = Frame::Lab;
  } else if (frame == "gauge") {
    spec.frame = Frame::Gauge;
  } else {
    throw ConfigError("run.frame", "expected lab or gauge, got '" + frame + "'");
  }
  const std::string integrator = cfg.get_string("run", "integrator", "split");
  if (integrator == "split") {
    spec.integrator = Integrator::Split;
  } else if (integrator == "cayley") {
    spec.integrator = Integrator::Cayley;
  } else {
    throw ConfigError("run.integrator", "expected split or cayley, got '" + integrator + "'");
  }
  return spec;
}

struct OutputSpec {
  std::filesystem::path directory;
  std::string prefix;
  bool trajectory = true;

  std::filesystem::path file(const std::string& suffix) const { return directory / (prefix + suffix); }
};

OutputSpec load_output(const ConfigFile& cfg, const std::filesystem::path& config_path) {
  OutputSpec out;
  out.directory = cfg.get_string("output", "directory", ".");
  out.prefix = cfg.get_string("output", "prefix", config_path.stem().string());
  out.trajectory = cfg.get_bool("output", "trajectory", true);
  if (out.prefix.empty()) throw ConfigError("output.prefix", "must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(out.directory, ec);
  if (ec) throw ConfigError("output.directory", "cannot create " + out.directory.string() + ": " + ec.message());
  return out;
}

nlohmann::json echo(const ConfigFile& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, body] : cfg.sections()) {
    for (const auto& [key, value] : body) j[section][key] = value;
  }
  return j;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output.directory", "cannot write " + path.string());
  return out;
}

void finish(RunManifest& manifest, const OutputSpec& out, Clock::time_point start) {
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::ofstream file = open_output(out.file("_manifest.json"));
  file << manifest.to_json().dump(2) << '\n';
}

double max_norm_drift(const Trajectory& traj) {
  double drift = 0.0;
  for (double n : traj.norms) drift = std::max(drift, std::abs(n - 1.0));
  return drift;
}

int whole_periods(const Trajectory& traj) {
  if (!traj.config.drive.periodic()) return 0;
  const double period = traj.config.drive.period();
  return static_cast<int>(std::floor(traj.times.back() / period + 1e-9));
}

PointScalars scalars_from(const Trajectory& traj, const std::vector<double>& revival) {
  PointScalars s;
  s.max_leakage = traj.max_leakage;
  const int periods = whole_periods(traj);
  if (periods == 0) {
    s.revival_T = s.self_imaging_error = s.min_revival = s.max_self_imaging_error = std::nan("");
    return s;
  }
  const double period = traj.config.drive.period();
  s.min_revival = 1.0;
  for (int k = 1; k <= periods; ++k) {
    const double p = revival[nearest_sample(traj, k * period)];
    const double e = self_imaging_error(traj, k).error;
    if (k == 1) {
      s.revival_T = p;
      s.self_imaging_error = e;
    }
    s.min_revival = std::min(s.min_revival, p);
    s.max_self_imaging_error = std::max(s.max_self_imaging_error, e);
  }
  return s;
}

std::vector<double> linspace(double start, double stop, int points) {
  std::vector<double> v;
  for (int i = 0; i < points; ++i) {
    v.push_back(points == 1 ? start : start + (stop - start) * i / (points - 1));
  }
  return v;
}

void apply_parameter(DriveSpec& spec, const std::string& name, double value) {
  if (name == "F0_over_omega") {
    spec.f0.reset();
    spec.f0_over_rho.reset();
    spec.dl_root.reset();
    spec.f0_over_omega = value;
  } else {
    spec.omega.reset();
    spec.omega_over_rho = value;
  }
}

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

SweepAxis load_axis(const ConfigFile& cfg, const std::string& suffix) {
  SweepAxis axis;
  const std::string key = "parameter" + suffix;
  axis.name = cfg.get_string("sweep", key);
  if (axis.name != "F0_over_omega" && axis.name != "omega_over_rho") {
    throw ConfigError("sweep." + key, "expected F0_over_omega or omega_over_rho, got '" + axis.name + "'");
  }
  const int points = cfg.get_int("sweep", "points" + suffix);
  if (points < 1) throw ConfigError("sweep.points" + suffix, "must be >= 1");
  if (static_cast<std::size_t>(points) > kMaxSweepPoints) {
    throw ConfigError("sweep.points" + suffix, "grid exceeds 100000 points");
  }
  axis.values = linspace(cfg.get_double("sweep", "start" + suffix), cfg.get_double("sweep", "stop" + suffix), points);
  return axis;
}

}  // namespace

// ---------------------------------------------------------------------------

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"command", command},           {"version", version},   {"config", config},
                        {"duration_seconds", duration_seconds}, {"warnings", warnings}, {"outputs", outputs},
                        {"summary", summary},           {"exit_code", exit_code}};
}

SimulationConfig load_simulation(const ConfigFile& config) {
  const HoppingProfile profile = load_profile(config);
  const DriveSpec drive = load_drive(config);
  return load_run(config).build(profile, drive.build(std::abs(profile.rho())));
}

PointScalars evaluate_point(SimulationConfig sim, int periods, bool spread) {
  if (!sim.drive.periodic()) throw std::domain_error("evaluate_point: drive is not periodic");
  if (periods < 1) throw std::invalid_argument("evaluate_point: periods must be >= 1");
  const double period = sim.drive.period();
  const long long spp = std::llround(period / sim.dt);
  sim.t_end = periods * period;
  sim.record_stride = std::abs(spp * sim.dt - period) <= 1e-9 * period ? static_cast<int>(spp) : 1;
  const Trajectory traj = evolve(sim);
  PointScalars s = scalars_from(traj, revival_probability(traj, Frame::Lab));
  if (spread) {
    MonodromyOptions opts;
    opts.steps_per_period = static_cast<int>(std::max(1LL, spp));
    s.quasienergy_spread = quasienergy_spread(quasienergy_spectrum(sim.profile, sim.drive, opts), true);
  }
  return s;
}

RunManifest run_simulate(const std::filesystem::path& config_path) {
  const auto start = Clock::now();
  const ConfigFile cfg = ConfigFile::load(config_path);
  const SimulationConfig sim = load_simulation(cfg);
  const bool exact_oracle = cfg.get_bool("run", "exact_oracle", false);
  const bool fail_on_leakage = cfg.get_bool("run", "fail_on_leakage", false);
  const OutputSpec out = load_output(cfg, config_path);
  cfg.check_unused();

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = echo(cfg);

  const Trajectory traj = evolve(sim);
  manifest.warnings = traj.warnings;

  ObservableSeries series = observables(traj, Frame::Lab);
  double max_deviation = std::nan("");
  if (exact_oracle) {
    const LatticeState init = to_frame(sim.initial_state(), sim.drive, Frame::Gauge);
    const auto props = sigma_and_phase_series(sim.drive, sim.profile.rho(), traj.times);
    std::vector<double> deviation;
    max_deviation = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const LatticeState ex = exact_state(init, props[i]);
      const LatticeState num = to_frame(traj.states[i], sim.drive, Frame::Gauge);
      double d = 0.0;
      for (std::size_t n = 0; n < ex.amplitudes.size(); ++n) d = std::max(d, std::abs(ex.amplitudes[n] - num.amplitudes[n]));
      deviation.push_back(d);
      max_deviation = std::max(max_deviation, d);
    }
    series.add("exact_deviation", std::move(deviation));
  }

  if (out.trajectory) {
    Trajectory lab = traj;
    for (LatticeState& s : lab.states) s = to_frame(s, sim.drive, Frame::Lab);
    const auto path = out.file("_trajectory.csv");
    std::ofstream file = open_output(path);
    io::write_trajectory_csv(file, lab);
    manifest.outputs.push_back(path.generic_string());
  }
  {
    const auto path = out.file("_observables.csv");
    std::ofstream file = open_output(path);
    io::write_observables_csv(file, series);
    manifest.outputs.push_back(path.generic_string());
  }

  const PointScalars s = scalars_from(traj, series.channel("revival"));
  const double drift = max_norm_drift(traj);
  auto& sum = manifest.summary;
  sum["sites"] = sim.profile.size();
  sum["dt"] = sim.dt;
  sum["t_end"] = sim.t_end;
  sum["samples"] = traj.size();
  sum["max_norm_drift"] = drift;
  sum["max_leakage"] = traj.max_leakage;
  sum["periods"] = whole_periods(traj);
  sum["revival_T"] = s.revival_T;
  sum["self_imaging_error"] = s.self_imaging_error;
  sum["min_revival"] = s.min_revival;
  sum["max_self_imaging_error"] = s.max_self_imaging_error;
  if (exact_oracle) sum["max_exact_deviation"] = max_deviation;

  if (drift > kNormTolerance) {
    manifest.warnings.push_back("norm drift " + io::format_double(drift) + " exceeds tolerance");
    manifest.exit_code = 2;
  }
  if (fail_on_leakage && traj.max_leakage > kLeakageThreshold) manifest.exit_code = 2;
  finish(manifest, out, start);
  return manifest;
}

RunManifest run_sweep(const std::filesystem::path& config_path) {
  const auto start = Clock::now();
  const ConfigFile cfg = ConfigFile::load(config_path);
  const HoppingProfile profile = load_profile(cfg);
  const DriveSpec drive = load_drive(cfg);
  const RunSpec run = load_run(cfg);
  std::vector<SweepAxis> axes{load_axis(cfg, "")};
  if (cfg.has("sweep", "parameter2")) axes.push_back(load_axis(cfg, "2"));
  const int periods = cfg.get_int("sweep", "periods", 1);
  const int threads_req = cfg.get_int("sweep", "threads", 0);
  const bool spread = cfg.get_bool("sweep", "quasienergy_spread", false);
  const OutputSpec out = load_output(cfg, config_path);
  cfg.check_unused();

  if (!drive.periodic()) throw ConfigError("drive.kind", "sweeps need a periodic drive");
  if (periods < 1) throw ConfigError("sweep.periods", "must be >= 1");
  if (threads_req < 0) throw ConfigError("sweep.threads", "must be >= 0");
  if (axes.size() == 2 && axes[0].name == axes[1].name) {
    throw ConfigError("sweep.parameter2", "must differ from sweep.parameter");
  }
  const std::size_t inner = axes.size() == 2 ? axes[1].values.size() : 1;
  const std::size_t total = axes[0].values.size() * inner;
  if (total > kMaxSweepPoints) throw ConfigError("sweep.points", "grid exceeds 100000 points");

  // Validate the configuration once on the first point before fanning out.
  {
    DriveSpec first = drive;
    for (const SweepAxis& a : axes) apply_parameter(first, a.name, a.values.front());
    run.build(profile, first.build(std::abs(profile.rho())));
  }

  struct Result {
    std::vector<double> params;
    PointScalars scalars;
    std::string status = "ok";
    std::vector<std::string> warnings;
  };
  std::vector<Result> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      Result& r = results[i];
      DriveSpec spec = drive;
      const std::size_t idx[2] = {i / inner, i % inner};
      for (std::size_t a = 0; a < axes.size(); ++a) {
        r.params.push_back(axes[a].values[idx[a]]);
        apply_parameter(spec, axes[a].name, axes[a].values[idx[a]]);
      }
      try {
        const SimulationConfig sim = run.build(profile, spec.build(std::abs(profile.rho())));
        r.scalars = evaluate_point(sim, periods, spread);
        if (r.scalars.max_leakage > kLeakageThreshold) {
          r.status = "leakage";
          r.warnings.push_back("point " + std::to_string(i) + ": boundary weight " +
                               io::format_double(r.scalars.max_leakage));
        }
      } catch (const std::exception& e) {
        r.scalars = PointScalars{};
        r.scalars.revival_T = r.scalars.self_imaging_error = r.scalars.min_revival =
            r.scalars.max_self_imaging_error = std::nan("");
        r.status = std::string("error: ") + e.what();
        r.warnings.push_back("point " + std::to_string(i) + " failed: " + e.what());
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(total, threads_req > 0 ? threads_req : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.config = echo(cfg);
  const auto path = out.file("_sweep.csv");
  {
    std::ofstream file = open_output(path);
    file << "index";
    for (const SweepAxis& a : axes) file << ',' << a.name;
    file << ",revival_T,self_imaging_error,min_revival,max_self_imaging_error,quasienergy_spread,max_leakage,status\n";
    for (std::size_t i = 0; i < total; ++i) {
      const Result& r = results[i];
      file << i;
      for (double p : r.params) file << ',' << io::format_double(p);
      const PointScalars& s = r.scalars;
      std::string status = r.status;
      std::replace(status.begin(), status.end(), ',', ';');
      std::replace(status.begin(), status.end(), '\n', ' ');
      file << ',' << io::format_double(s.revival_T) << ',' << io::format_double(s.self_imaging_error) << ','
           << io::format_double(s.min_revival) << ',' << io::format_double(s.max_self_imaging_error) << ','
           << io::format_double(s.quasienergy_spread) << ',' << io::format_double(s.max_leakage) << ',' << status
           << '\n';
    }
  }
  manifest.outputs.push_back(path.generic_string());

  std::size_t failed = 0;
  std::size_t best = total;
  for (std::size_t i = 0; i < total; ++i) {
    const Result& r = results[i];
    manifest.warnings.insert(manifest.warnings.end(), r.warnings.begin(), r.warnings.end());
    if (r.status.rfind("error", 0) == 0) {
      ++failed;
      continue;
    }
    if (best == total || r.scalars.self_imaging_error < results[best].scalars.self_imaging_error) best = i;
  }
  manifest.summary["points"] = total;
  manifest.summary["failed_points"] = failed;
  manifest.summary["threads"] = nthreads;
  if (best < total) {
    manifest.summary["best_index"] = best;
    manifest.summary["best_self_imaging_error"] = results[best].scalars.self_imaging_error;
  }
  finish(manifest, out, start);
  return manifest;
}

RunManifest run_spectra(const std::filesystem::path& config_path) {
  const auto start = Clock::now();
  const ConfigFile cfg = ConfigFile::load(config_path);
  const HoppingProfile profile = load_profile(cfg);
  const DriveSpec drive_spec = load_drive(cfg);
  const std::string mode = cfg.get_string("spectra", "mode");
  const int steps = cfg.get_int("spectra", "steps_per_period", 4000);
  const auto f0 = optional_double(cfg, "spectra", "F0");
  const auto f0_over_rho = optional_double(cfg, "spectra", "F0_over_rho");
  const OutputSpec out = load_output(cfg, config_path);
  cfg.check_unused();

  RunManifest manifest;
  manifest.command = "spectra";
  manifest.config = echo(cfg);
  const double rho_abs = std::abs(profile.rho());

  if (mode == "monodromy") {
    if (f0 || f0_over_rho) throw ConfigError("spectra.F0", "only used in stark mode");
    if (steps < 1) throw ConfigError("spectra.steps_per_period", "must be >= 1");
    const DriveWaveform drive = drive_spec.build(rho_abs);
    if (!drive.periodic()) throw ConfigError("drive.kind", "monodromy mode needs a periodic drive");
    MonodromyOptions opts;
    opts.steps_per_period = steps;
    const QuasienergySpectrum spec = quasienergy_spectrum(profile, drive, opts);
    const auto path = out.file("_quasienergies.csv");
    std::ofstream file = open_output(path);
    io::write_quasienergy_csv(file, spec);
    manifest.outputs.push_back(path.generic_string());
    manifest.summary["omega"] = spec.omega;
    manifest.summary["levels"] = spec.values.size();
    manifest.summary["converged_levels"] = converged_count(spec);
    manifest.summary["spread_converged"] = quasienergy_spread(spec, true);
    manifest.summary["spread_all"] = quasienergy_spread(spec, false);
    if (converged_count(spec) == 0) manifest.warnings.push_back("no quasienergy converged against N + 10");
  } else if (mode == "stark") {
    if (count_set({f0.has_value(), f0_over_rho.has_value()}) > 1) {
      throw ConfigError("spectra.F0", "give only one of F0, F0_over_rho");
    }
    double force = 0.0;
    if (f0) {
      force = *f0;
    } else if (f0_over_rho) {
      force = *f0_over_rho * rho_abs;
    } else if (drive_spec.kind == DriveKind::Dc) {
      force = drive_spec.build(rho_abs).amplitude();
    } else {
      throw ConfigError("spectra.F0", "missing (or a dc [drive])");
    }
    if (!(force > 0.0)) throw ConfigError("spectra.F0", "must be > 0");
    const StarkLadder ladder = stark_ladder(profile, force);
    const auto path = out.file("_stark.csv");
    std::ofstream file = open_output(path);
    io::write_stark_csv(file, ladder);
    manifest.outputs.push_back(path.generic_string());
    manifest.summary["F0"] = force;
    manifest.summary["levels"] = ladder.values.size();
    manifest.summary["converged_levels"] = std::count(ladder.converged.begin(), ladder.converged.end(), true);
    manifest.summary["longest_uniform_run"] = longest_uniform_spacing_run(ladder, force, 1e-6);
  } else {
    throw ConfigError("spectra.mode", "expected monodromy or stark, got '" + mode + "'");
  }
  finish(manifest, out, start);
  return manifest;
}

std::vector<DlRoot> dl_roots(DriveFamily family, double omega, int count) {
  if (!(omega > 0.0)) throw ConfigError("omega", "must be > 0");
  if (count < 1) throw ConfigError("count", "must be >= 1");
  std::vector<DlRoot> roots;
  for (int k = 1; k <= count; ++k) roots.push_back(find_dl_amplitude(family, omega, k));
  return roots;
}

void emit_heatmap(const std::filesystem::path& csv, const std::filesystem::path& image) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("csv", "cannot open " + csv.string());
  const io::TrajectoryTable table = io::read_trajectory_csv(in);
  std::ofstream out(image, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write " + image.string());
  out << render_heatmap_svg(table);
}

}  // namespace gfdl::cli
