#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spicelab/engine.hpp"
#include "spicelab/io.hpp"
#include "spicelab/measure.hpp"
#include "spicelab/netlist.hpp"
#include "spicelab/snm.hpp"
#include "spicelab/sram.hpp"

namespace spicelab::cli {

namespace fs = std::filesystem;

inline std::string default_out_dir() {
  if (const char* env = std::getenv("SPICELAB_OUT")) return env;
  return "out";
}

// Plain key=value experiment config; '#' starts a comment. Returns nullopt
// when the file does not exist (callers fall back to defaults and note it).
inline std::optional<std::map<std::string, std::string>> load_config_map(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      const size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = val;
  }
  return out;
}

struct CellOpts {
  double vdd = 1.8;
  double driver_wl = 4.0;
  double access_wl = 2.0;
  double load_wl = 2.0;
  double bitline_c = 10e-15;
  std::string config_file;

  sram::SramCellParams params() const {
    sram::SramCellParams p;
    p.vdd = vdd;
    p.driver_wl = driver_wl;
    p.access_wl = access_wl;
    p.load_wl = load_wl;
    p.bitline_c = bitline_c;
    return p;
  }

  // Config file values fill any field the command line left at its default.
  // `extras` lets callers expose further numeric plan fields (timing etc.).
  bool apply_config(std::vector<std::string>& notes,
                    std::vector<std::pair<const char*, double*>> extras = {}) {
    if (config_file.empty()) return false;
    auto cfgmap = load_config_map(config_file);
    if (!cfgmap) {
      notes.push_back("config file '" + config_file + "' not found; using documented defaults");
      return false;
    }
    auto num = [&](const char* key, double& field) {
      auto it = cfgmap->find(key);
      if (it == cfgmap->end()) return;
      if (auto v = parse_engineering(it->second)) field = *v;
    };
    num("vdd", vdd);
    num("driver-wl", driver_wl);
    num("access-wl", access_wl);
    num("load-wl", load_wl);
    num("bitline-c", bitline_c);
    for (auto& [key, field] : extras) num(key, *field);
    notes.push_back("config file '" + config_file + "' applied");
    return true;
  }
};

inline io::ordered_json power_report_json(const PowerReport& r) {
  io::ordered_json j;
  j["window_t0_s"] = format_sci(r.t0);
  j["window_t1_s"] = format_sci(r.t1);
  j["supply_energy_j"] = format_sci(r.supply_energy);
  j["stored_delta_j"] = format_sci(r.stored_delta);
  j["dissipated_j"] = format_sci(r.dissipated);
  j["avg_power_w"] = format_sci(r.avg_power);
  io::ordered_json per = io::ordered_json::object();
  for (const auto& [name, e] : r.per_source_energy) per[name] = format_sci(e);
  j["per_source_energy_j"] = per;
  if (!r.leakage.empty()) {
    io::ordered_json leak = io::ordered_json::object();
    for (const auto& [name, i] : r.leakage) leak[name] = format_sci(i);
    j["leakage_a"] = leak;
  }
  return j;
}

// ---------------------------------------------------------------------------
// run: execute the analyses of a netlist file.

struct RunOpts {
  std::string netlist_path;
  std::string out = default_out_dir();
  SimConfig sim;
};

inline io::RunManifest cmd_run(const RunOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "run";

  const std::string text = io::read_file(opts.netlist_path);
  manifest.input_digests[opts.netlist_path] = io::fnv1a64(text);
  Netlist n = parse_netlist(text);
  manifest.config["netlist"] = opts.netlist_path;
  manifest.config["title"] = n.title();

  const fs::path out_dir(opts.out);
  fs::create_directories(out_dir);

  if (n.analyses().empty()) {
    manifest.notes.push_back("no analyses in netlist; nothing to run");
    std::cerr << "warning: no analyses in " << opts.netlist_path << "\n";
  }

  int index = 0;
  for (const auto& a : n.analyses()) {
    ++index;
    if (std::holds_alternative<OpDirective>(a)) {
      Solution s = dc_operating_point(n, opts.sim);
      std::ostringstream csv;
      csv << "signal,value\n";
      for (int i = 1; i < n.node_count(); ++i)
        csv << "v(" << n.node_name(i) << ")," << format_sci(s.node_voltages[size_t(i)]) << "\n";
      size_t k = 0;
      for (const auto& dev : n.devices()) {
        if (dev.kind != DeviceKind::VoltageSource) continue;
        csv << "i(" << dev.name << ")," << format_sci(s.source_currents[k++]) << "\n";
      }
      const fs::path path = out_dir / ("op" + std::to_string(index) + ".csv");
      io::write_file(path, csv.str());
      manifest.outputs.push_back(path.string());
      std::cout << "op -> " << path.string() << "\n";
    } else if (const auto* d = std::get_if<DcDirective>(&a)) {
      SweepResult sw = dc_sweep(n, d->source, d->start, d->stop, d->step, opts.sim);
      std::vector<std::string> header = {d->source};
      for (const auto& name : sw.node_names) header.push_back("v(" + name + ")");
      std::vector<std::vector<double>> rows;
      for (size_t i = 0; i < sw.inputs.size(); ++i) {
        std::vector<double> row = {sw.inputs[i]};
        for (const auto& col : sw.node_voltages) row.push_back(col[i]);
        rows.push_back(std::move(row));
      }
      const fs::path path = out_dir / ("dc" + std::to_string(index) + ".csv");
      io::write_csv(path, header, rows);
      manifest.outputs.push_back(path.string());
      std::cout << "dc sweep of " << d->source << " -> " << path.string() << "\n";
    } else {
      const auto& t = std::get<TranDirective>(a);
      Waveform w = transient(n, opts.sim, t.dt, t.tstop);
      const fs::path path = out_dir / ("tran" + std::to_string(index) + ".csv");
      io::write_waveform_csv(path, w);
      manifest.outputs.push_back(path.string());
      std::cout << "transient to " << format_shortest(t.tstop) << "s -> " << path.string() << "\n";
    }
  }

  manifest.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path mpath = out_dir / "run_manifest.json";
  io::write_manifest(mpath, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// sram: conventional vs adiabatic comparison experiments.

struct SramOpts {
  std::string mode = "write01";  // write01 | write-hold | write-read
  std::string supply = "ramp";   // ramp | sine
  std::string scope = "both";    // both | rail-only
  double ramp_period = 4e-9;     // phase length = adiabatic supply period
  double dt = 2.5e-12;
  double driver_r = 1e3;
  CellOpts cell;
  std::string out = default_out_dir();
  SimConfig sim;
};

inline sram::ExperimentMode parse_mode(const std::string& mode) {
  if (mode == "write01") return sram::ExperimentMode::Write01;
  if (mode == "write-hold") return sram::ExperimentMode::WriteHold;
  if (mode == "write-read") return sram::ExperimentMode::WriteRead;
  throw SimError(SimErrorKind::BadPlan, "unknown sram mode " + mode);
}

inline io::RunManifest cmd_sram(SramOpts opts) {
  const auto start = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "sram";
  opts.cell.apply_config(manifest.notes, {{"ramp-period", &opts.ramp_period},
                                          {"dt", &opts.dt},
                                          {"driver-r", &opts.driver_r}});

  sram::SramCellParams p = opts.cell.params();
  sram::ExperimentTiming timing;
  timing.phase_time = opts.ramp_period;
  timing.dt = opts.dt;
  timing.driver_r = opts.driver_r;
  timing.scope = opts.scope == "rail-only" ? sram::AdiabaticScope::RailOnly
                                           : sram::AdiabaticScope::RailsAndDrivers;
  const sram::SupplyKind adia = opts.supply == "sine" ? sram::SupplyKind::adiabatic_sine()
                                                      : sram::SupplyKind::adiabatic_ramp();

  sram::ExperimentReport rep = run_experiment(p, parse_mode(opts.mode), adia, timing, opts.sim);

  const fs::path out_dir(opts.out);
  fs::create_directories(out_dir);

  // Comparison table mirroring the conventional/adiabatic/decrease layout.
  std::ostringstream csv;
  csv << "metric,conventional,adiabatic,decrease_pct\n";
  auto row = [&](const std::string& metric, double c, double a) {
    const double pct = c != 0.0 ? (c - a) / c * 100.0 : 0.0;
    csv << metric << ',' << format_sci(c) << ',' << format_sci(a) << ',' << format_sci(pct)
        << "\n";
  };
  row("avg_power_w", rep.conventional.avg_power, rep.adiabatic.avg_power);
  row("dissipated_j", rep.conventional.dissipated, rep.adiabatic.dissipated);
  row("supply_energy_j", rep.conventional.supply_energy, rep.adiabatic.supply_energy);
  for (const auto& [dev, conv_i] : rep.conventional.leakage) {
    row("leakage_a:" + dev, conv_i, rep.adiabatic.leakage.at(dev));
  }
  const fs::path cpath = out_dir / "comparison.csv";
  io::write_file(cpath, csv.str());
  manifest.outputs.push_back(cpath.string());

  io::ordered_json j;
  j["mode"] = opts.mode;
  j["supply"] = opts.supply;
  j["scope"] = opts.scope;
  j["phase_time_s"] = format_sci(opts.ramp_period);
  j["estimated_node_rc_s"] = format_sci(sram::estimated_node_rc(p, timing));
  j["conventional"] = power_report_json(rep.conventional);
  j["adiabatic"] = power_report_json(rep.adiabatic);
  j["reduction_pct"] = format_sci(rep.reduction * 100.0);
  const fs::path jpath = out_dir / "comparison.json";
  io::write_file(jpath, j.dump(2) + "\n");
  manifest.outputs.push_back(jpath.string());

  const fs::path wc = out_dir / "conventional_waveform.csv";
  const fs::path wa = out_dir / "adiabatic_waveform.csv";
  io::write_waveform_csv(wc, rep.conv_run.wave);
  io::write_waveform_csv(wa, rep.adia_run.wave);
  manifest.outputs.push_back(wc.string());
  manifest.outputs.push_back(wa.string());

  manifest.config["mode"] = opts.mode;
  manifest.config["supply"] = opts.supply;
  manifest.config["ramp_period_s"] = format_sci(opts.ramp_period);
  manifest.config["dt_s"] = format_sci(opts.dt);
  manifest.config["vdd_v"] = format_sci(p.vdd);
  manifest.config["cell_ratio"] = format_sci(p.cell_ratio());

  std::cout << "sram " << opts.mode << ": reduction " << format_sci(rep.reduction * 100.0)
            << " % -> " << cpath.string() << "\n";

  manifest.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_manifest(out_dir / "run_manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// snm: butterfly curves and maximum-square noise margins.

struct SnmOpts {
  std::string mode = "hold";  // hold | read
  double supply_sample = -1.0;  // adiabatic sample level; default vdd/2
  bool compare = false;
  double step = 5e-3;
  CellOpts cell;
  std::string out = default_out_dir();
  SimConfig sim;
};

inline void write_butterfly_csv(const fs::path& path, const snm::SnmResult& r) {
  // mirrored curve resampled onto the forward curve's grid for plotting
  std::ostringstream out;
  out << "x,y_curve1,y_curve2_mirrored\n";
  for (const auto& pt : r.curve_fwd.pts) {
    double lo, hi;
    bool any;
    snm::detail::crossings_at(r.curve_mir, pt.x, lo, hi, any);
    const double mir = any ? 0.5 * (lo + hi) : 0.0;
    out << format_sci(pt.x) << ',' << format_sci(pt.y) << ',' << format_sci(mir) << "\n";
  }
  io::write_file(path, out.str());
}

inline io::ordered_json snm_json(const snm::SnmResult& r) {
  io::ordered_json j;
  j["supply_level_v"] = format_sci(r.supply_level);
  j["snm_v"] = format_sci(r.snm);
  j["snm_lobe_high_v"] = format_sci(r.snm_lobe_high);
  j["snm_lobe_low_v"] = format_sci(r.snm_lobe_low);
  j["degenerate"] = r.degenerate;
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  auto sq = [](const snm::SquareAnchor& s) {
    io::ordered_json o;
    o["x0"] = format_sci(s.x0);
    o["y0"] = format_sci(s.y0);
    o["side"] = format_sci(s.side);
    return o;
  };
  j["square_high"] = sq(r.square_high);
  j["square_low"] = sq(r.square_low);
  return j;
}

inline io::RunManifest cmd_snm(SnmOpts opts) {
  const auto start = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "snm";
  opts.cell.apply_config(manifest.notes,
                         {{"supply-sample", &opts.supply_sample}, {"step", &opts.step}});

  sram::SramCellParams p = opts.cell.params();
  const snm::SnmMode mode = opts.mode == "read" ? snm::SnmMode::Read : snm::SnmMode::Hold;
  const double sample = opts.supply_sample > 0.0 ? opts.supply_sample : p.vdd / 2.0;

  const fs::path out_dir(opts.out);
  fs::create_directories(out_dir);

  manifest.config["mode"] = opts.mode;
  manifest.config["vdd_v"] = format_sci(p.vdd);
  manifest.config["supply_sample_v"] = format_sci(sample);
  manifest.config["step_v"] = format_sci(opts.step);

  if (opts.compare) {
    snm::SnmResult conv = snm::snm_experiment(p, mode, p.vdd, opts.step, opts.sim);
    snm::SnmResult adia = snm::snm_experiment(p, mode, sample, opts.step, opts.sim);
    const fs::path bc = out_dir / "butterfly_conventional.csv";
    const fs::path ba = out_dir / "butterfly_adiabatic.csv";
    write_butterfly_csv(bc, conv);
    write_butterfly_csv(ba, adia);
    io::ordered_json j;
    j["mode"] = opts.mode;
    j["conventional"] = snm_json(conv);
    j["adiabatic"] = snm_json(adia);
    const fs::path jpath = out_dir / "snm_comparison.json";
    io::write_file(jpath, j.dump(2) + "\n");
    manifest.outputs = {bc.string(), ba.string(), jpath.string()};
    std::cout << "snm " << opts.mode << ": conventional " << format_sci(conv.snm)
              << " V, adiabatic " << format_sci(adia.snm) << " V\n";
  } else {
    snm::SnmResult res = snm::snm_experiment(p, mode, opts.supply_sample > 0.0 ? sample : p.vdd,
                                             opts.step, opts.sim);
    const fs::path bpath = out_dir / "butterfly.csv";
    write_butterfly_csv(bpath, res);
    const fs::path jpath = out_dir / "snm.json";
    io::write_file(jpath, snm_json(res).dump(2) + "\n");
    manifest.outputs = {bpath.string(), jpath.string()};
    std::cout << "snm " << opts.mode << ": " << format_sci(res.snm) << " V -> "
              << jpath.string() << "\n";
  }

  manifest.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_manifest(out_dir / "run_manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// sweep: parameter sweeps over sram or snm experiments.

struct SweepOpts {
  std::string param;  // ramp-period | vdd | cell-ratio | bitline-c
  std::vector<double> values;
  std::string target = "sram";  // sram | snm
  SramOpts sram_opts;
  SnmOpts snm_opts;
  std::string out = default_out_dir();
};

inline io::RunManifest cmd_sweep(SweepOpts opts) {
  const auto start = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "sweep";
  if (opts.values.empty()) throw SimError(SimErrorKind::BadPlan, "empty sweep range");

  std::vector<double> values = opts.values;
  std::sort(values.begin(), values.end());

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  for (double v : values) {
    SramOpts so = opts.sram_opts;
    SnmOpts no = opts.snm_opts;
    if (opts.param == "ramp-period") {
      so.ramp_period = v;
      so.dt = v / 1600.0;
    } else if (opts.param == "vdd") {
      so.cell.vdd = v;
      no.cell.vdd = v;
      no.supply_sample = v;  // SNM evaluated at the swept supply level
    } else if (opts.param == "cell-ratio") {
      so.cell.driver_wl = v * so.cell.access_wl;
      no.cell.driver_wl = v * no.cell.access_wl;
    } else if (opts.param == "bitline-c") {
      so.cell.bitline_c = v;
      no.cell.bitline_c = v;
    } else {
      throw SimError(SimErrorKind::BadPlan, "unknown sweep parameter " + opts.param);
    }

    if (opts.target == "sram") {
      sram::SramCellParams p = so.cell.params();
      sram::ExperimentTiming timing;
      timing.phase_time = so.ramp_period;
      timing.dt = so.dt;
      timing.driver_r = so.driver_r;
      const sram::SupplyKind adia = so.supply == "sine" ? sram::SupplyKind::adiabatic_sine()
                                                        : sram::SupplyKind::adiabatic_ramp();
      sram::ExperimentReport rep =
          run_experiment(p, parse_mode(so.mode), adia, timing, so.sim);
      header = {opts.param,
                "conventional_avg_power_w",
                "adiabatic_avg_power_w",
                "conventional_dissipated_j",
                "adiabatic_dissipated_j",
                "reduction_pct"};
      rows.push_back({v, rep.conventional.avg_power, rep.adiabatic.avg_power,
                      rep.conventional.dissipated, rep.adiabatic.dissipated,
                      rep.reduction * 100.0});
    } else if (opts.target == "snm") {
      sram::SramCellParams p = no.cell.params();
      const snm::SnmMode mode = no.mode == "read" ? snm::SnmMode::Read : snm::SnmMode::Hold;
      const double sample = no.supply_sample > 0.0 ? no.supply_sample : p.vdd;
      snm::SnmResult res = snm::snm_experiment(p, mode, sample, no.step, no.sim);
      header = {opts.param, "snm_v", "snm_lobe_high_v", "snm_lobe_low_v"};
      rows.push_back({v, res.snm, res.snm_lobe_high, res.snm_lobe_low});
    } else {
      throw SimError(SimErrorKind::BadPlan, "unknown sweep target " + opts.target);
    }
  }

  const fs::path out_dir(opts.out);
  fs::create_directories(out_dir);
  const fs::path spath = out_dir / "sweep.csv";
  io::write_csv(spath, header, rows);
  manifest.outputs.push_back(spath.string());
  manifest.config["param"] = opts.param;
  manifest.config["target"] = opts.target;
  std::cout << "sweep " << opts.param << " over " << values.size() << " points -> "
            << spath.string() << "\n";

  manifest.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_manifest(out_dir / "sweep_manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// argv wiring. Exit codes: 0 success, 1 simulation/parse error, 2 usage.

// accepts engineering suffixes on numeric flags (500n, 10f, 1meg)
inline CLI::Validator engineering_number() {
  return CLI::Validator(
      [](std::string& input) -> std::string {
        auto v = parse_engineering(input);
        if (!v) return "'" + input + "' is not a number";
        input = format_shortest(*v);
        return {};
      },
      "NUM");
}

inline void add_cell_flags(CLI::App* app, CellOpts& cell) {
  const auto eng = engineering_number();
  app->add_option("--vdd", cell.vdd, "supply voltage, V")->transform(eng);
  app->add_option("--driver-wl", cell.driver_wl, "pull-down W/L ratio")->transform(eng);
  app->add_option("--access-wl", cell.access_wl, "access W/L ratio")->transform(eng);
  app->add_option("--load-wl", cell.load_wl, "PMOS load W/L ratio")->transform(eng);
  app->add_option("--bitline-c", cell.bitline_c, "lumped bitline capacitance, F")->transform(eng);
  app->add_option("--config", cell.config_file, "key=value experiment config file");
}

inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"spicelab: SPICE-subset circuit simulator and 6T SRAM energy laboratory"};
  app.require_subcommand(1);

  RunOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "run the analyses of a netlist file");
  run->add_option("netlist", run_opts.netlist_path, "netlist file")->required();
  run->add_option("--out", run_opts.out, "output directory");

  SramOpts sram_opts;
  CLI::App* sramc = app.add_subcommand("sram", "conventional vs adiabatic SRAM experiment");
  sramc->add_option("--mode", sram_opts.mode, "experiment mode")
      ->check(CLI::IsMember({"write01", "write-hold", "write-read"}));
  sramc->add_option("--supply", sram_opts.supply, "adiabatic supply shape")
      ->check(CLI::IsMember({"ramp", "sine"}));
  sramc->add_option("--scope", sram_opts.scope, "which sources are ramped in the adiabatic arm")
      ->check(CLI::IsMember({"both", "rail-only"}));
  sramc->add_option("--ramp-period", sram_opts.ramp_period, "phase length / supply period, s")
      ->transform(engineering_number());
  sramc->add_option("--dt", sram_opts.dt, "timestep, s")
      ->transform(engineering_number());
  sramc->add_option("--driver-r", sram_opts.driver_r, "driver series resistance, ohm")
      ->transform(engineering_number());
  sramc->add_option("--out", sram_opts.out, "output directory");
  add_cell_flags(sramc, sram_opts.cell);

  SnmOpts snm_opts;
  CLI::App* snmc = app.add_subcommand("snm", "butterfly curves and static noise margin");
  snmc->add_option("--mode", snm_opts.mode, "hold or read")
      ->check(CLI::IsMember({"hold", "read"}));
  snmc->add_option("--supply-sample", snm_opts.supply_sample,
                   "supply level for the adiabatic arm, V (default vdd/2)")
      ->transform(engineering_number());
  snmc->add_flag("--compare", snm_opts.compare, "run both arms and emit a comparison");
  snmc->add_option("--step", snm_opts.step, "sweep step, V")
      ->transform(engineering_number());
  snmc->add_option("--out", snm_opts.out, "output directory");
  add_cell_flags(snmc, snm_opts.cell);

  SweepOpts sweep_opts;
  CLI::App* sweepc = app.add_subcommand("sweep", "sweep a parameter across experiments");
  sweepc->add_option("--param", sweep_opts.param, "parameter to sweep")
      ->required()
      ->check(CLI::IsMember({"ramp-period", "vdd", "cell-ratio", "bitline-c"}));
  sweepc->add_option("--values", sweep_opts.values, "comma-separated sweep values")
      ->required()
      ->delimiter(',')
      ->transform(engineering_number());
  sweepc->add_option("--target", sweep_opts.target, "experiment to run per point")
      ->check(CLI::IsMember({"sram", "snm"}));
  sweepc->add_option("--mode", sweep_opts.sram_opts.mode, "sram mode for sram targets")
      ->check(CLI::IsMember({"write01", "write-hold", "write-read"}));
  sweepc->add_option("--snm-mode", sweep_opts.snm_opts.mode, "snm mode for snm targets")
      ->check(CLI::IsMember({"hold", "read"}));
  sweepc->add_option("--ramp-period", sweep_opts.sram_opts.ramp_period, "baseline phase, s")
      ->transform(engineering_number());
  sweepc->add_option("--out", sweep_opts.out, "output directory");
  add_cell_flags(sweepc, sweep_opts.sram_opts.cell);

  std::vector<const char*> argv;
  argv.push_back("spicelab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      cmd_run(run_opts);
    } else if (sramc->parsed()) {
      cmd_sram(sram_opts);
    } else if (snmc->parsed()) {
      cmd_snm(snm_opts);
    } else if (sweepc->parsed()) {
      sweep_opts.snm_opts.cell = sweep_opts.sram_opts.cell;
      sweep_opts.sram_opts.out = sweep_opts.out;
      sweep_opts.snm_opts.out = sweep_opts.out;
      cmd_sweep(sweep_opts);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << (run->parsed() ? run_opts.netlist_path : "input") << ": "
              << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(std::move(args));
}

}  // namespace spicelab::cli
