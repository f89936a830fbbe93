#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spicelab/engine.hpp"
#include "spicelab/errors.hpp"
#include "spicelab/measure.hpp"
#include "spicelab/netlist.hpp"

namespace spicelab::sram {

// Cell geometry is given as W/L ratios at a common channel length. The
// cell ratio (driver strength over access strength) governs read stability.
struct SramCellParams {
  ModelCard nmos_card = default_nmos_card();
  ModelCard pmos_card = default_pmos_card();
  double driver_wl = 4.0;
  double access_wl = 2.0;
  double load_wl = 2.0;
  double channel_l = 180e-9;  // m
  double vdd = 1.8;           // V
  double bitline_c = 10e-15;  // F, lumped per bitline

  double cell_ratio() const { return driver_wl / access_wl; }
};

// Cross-coupled inverter pair (MPL/MNL driving A, MPR/MNR driving B) with
// access transistors MAL (A to BL) and MAR (B to BLB) gated by WL, plus
// lumped bitline capacitors. Supplies and drivers are added by the
// stimulus builders.
inline Netlist build_6t_cell(const SramCellParams& p) {
  Netlist n;
  n.set_title("6t sram cell");
  n.add_model(p.nmos_card);
  n.add_model(p.pmos_card);
  const double L = p.channel_l;
  const std::string nm = p.nmos_card.name, pm = p.pmos_card.name;
  n.add_mosfet("MPL", "A", "B", "VDD", "VDD", pm, p.load_wl * L, L);
  n.add_mosfet("MNL", "A", "B", "0", "0", nm, p.driver_wl * L, L);
  n.add_mosfet("MPR", "B", "A", "VDD", "VDD", pm, p.load_wl * L, L);
  n.add_mosfet("MNR", "B", "A", "0", "0", nm, p.driver_wl * L, L);
  n.add_mosfet("MAL", "BL", "WL", "A", "0", nm, p.access_wl * L, L);
  n.add_mosfet("MAR", "BLB", "WL", "B", "0", nm, p.access_wl * L, L);
  n.add_capacitor("CBL", "BL", "0", p.bitline_c);
  n.add_capacitor("CBLB", "BLB", "0", p.bitline_c);
  return n;
}

enum class AdiabaticShape { Ramp, Sine };
enum class AdiabaticScope { RailsAndDrivers, RailOnly };

struct SupplyKind {
  bool adiabatic = false;
  AdiabaticShape shape = AdiabaticShape::Ramp;

  static SupplyKind conventional() { return SupplyKind{false, AdiabaticShape::Ramp}; }
  static SupplyKind adiabatic_ramp() { return SupplyKind{true, AdiabaticShape::Ramp}; }
  static SupplyKind adiabatic_sine() { return SupplyKind{true, AdiabaticShape::Sine}; }
};

enum class ExperimentMode { Write01, WriteHold, WriteRead };

struct ExperimentTiming {
  double phase_time = 4e-9;  // s, one experiment phase = one supply period
  double dt = 2.5e-12;       // s
  double driver_r = 1e3;     // ohm, series resistance of WL/BL drivers
  double read_tie_r = 10e6;  // ohm, weak bitline tie for released reads
  AdiabaticScope scope = AdiabaticScope::RailsAndDrivers;
};

// Lumped estimate of the slowest driven-node time constant; adiabatic ramps
// should be long against this for the 1/T dissipation law to apply.
inline double estimated_node_rc(const SramCellParams& p, const ExperimentTiming& t) {
  return t.driver_r * p.bitline_c;
}

enum class PhaseKind { Write0, Write1, Hold, ReadDriven, ReadReleased, Settle, Tail };

struct Phase {
  PhaseKind kind = PhaseKind::Hold;
  std::string label;
  double t0 = 0.0;
  double t1 = 0.0;
  double probe = 0.0;       // time at which logical state is evaluated
  double win0 = 0.0;        // measurement window (differential, disturb)
  double win1 = 0.0;
};

// A fully specified stimulus: netlist with sources, phases, initial
// condition preload, and the energy-accounting window.
struct Experiment {
  Netlist netlist;
  double dt = 0.0;
  double tstop = 0.0;
  std::vector<Phase> phases;
  std::map<std::string, double> preload;
  bool use_preload = false;
  std::vector<std::string> leak_devices;
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  double vdd = 0.0;
  SupplyKind supply;
};

namespace detail {

class PwlBuilder {
 public:
  void to(double t, double v) {
    if (!pts_.empty() && t <= pts_.back().first) {
      if (v == pts_.back().second) return;
      t = pts_.back().first + 1e-15;
    }
    pts_.emplace_back(t, v);
  }
  PwlSpec done() && { return PwlSpec{std::move(pts_)}; }

 private:
  std::vector<std::pair<double, double>> pts_;
};

struct StimulusShape {
  // fractions of a phase
  static constexpr double adiab_edge = 0.25;
  static constexpr double wl_on_conv = 0.20, wl_off_conv = 0.80;
  static constexpr double probe_conv = 0.97, probe_adiab = 0.72;
};

// Per-phase target levels for a driven signal.
inline PwlSpec driven_levels(const std::vector<double>& targets, double phase, bool adiabatic,
                             double conv_edge) {
  PwlBuilder b;
  if (!adiabatic) {
    b.to(0.0, targets[0]);
    for (size_t k = 1; k < targets.size(); ++k) {
      if (targets[k] == targets[k - 1]) continue;
      b.to(double(k) * phase, targets[k - 1]);
      b.to(double(k) * phase + conv_edge, targets[k]);
    }
  } else {
    const double e = StimulusShape::adiab_edge * phase;
    b.to(0.0, 0.0);
    for (size_t k = 0; k < targets.size(); ++k) {
      const double t0 = double(k) * phase;
      b.to(t0 + e, targets[k]);
      b.to(t0 + phase - e, targets[k]);
      b.to(t0 + phase, 0.0);
    }
  }
  return std::move(b).done();
}

// Full-swing word-line pulse inside selected phases (conventional arm).
inline PwlSpec wl_pulses(const std::vector<bool>& pulsed, double phase, double level,
                         double conv_edge) {
  PwlBuilder b;
  b.to(0.0, 0.0);
  using S = StimulusShape;
  for (size_t k = 0; k < pulsed.size(); ++k) {
    if (!pulsed[k]) continue;
    const double t0 = double(k) * phase;
    b.to(t0 + S::wl_on_conv * phase, 0.0);
    b.to(t0 + S::wl_on_conv * phase + conv_edge, level);
    b.to(t0 + S::wl_off_conv * phase, level);
    b.to(t0 + S::wl_off_conv * phase + conv_edge, 0.0);
  }
  return std::move(b).done();
}

inline SourceSpec rail_source(const SupplyKind& supply, double vdd, double period,
                              bool start_on_plateau) {
  if (!supply.adiabatic) return DcSpec{vdd};
  if (supply.shape == AdiabaticShape::Sine) {
    // vdd/2 * (1 - cos(2 pi t / P)): zero at phase boundaries, peak mid-phase.
    return SineSpec{vdd / 2.0, vdd / 2.0, 1.0 / period,
                    start_on_plateau ? -period / 2.0 + period / 4.0 : period / 4.0};
  }
  RampSpec r;
  r.v_start = 0.0;
  r.v_end = vdd;
  r.rise = StimulusShape::adiab_edge * period;
  r.hold = (1.0 - 2.0 * StimulusShape::adiab_edge) * period;
  r.fall = StimulusShape::adiab_edge * period;
  r.period = period;
  r.delay = start_on_plateau ? -r.rise - r.hold / 2.0 : 0.0;
  return r;
}

inline void add_driver(Netlist& n, const std::string& tag, const std::string& target,
                       SourceSpec spec, double series_r) {
  n.add_vsource("V" + tag, tag + "D", "0", std::move(spec));
  n.add_resistor("R" + tag, tag + "D", target, series_r);
}

}  // namespace detail

// Builds a driven-cell experiment for the table-style comparison modes.
// Phase semantics:
//   Write01:   write '0' then write '1'
//   WriteHold: write '1' then hold with both bitlines at vdd
//   WriteRead: write '1' then read with bitlines and wordline at vdd
inline Experiment build_mode_experiment(const SramCellParams& p, ExperimentMode mode,
                                        const SupplyKind& supply,
                                        const ExperimentTiming& t = {}) {
  using detail::StimulusShape;
  Experiment e;
  e.netlist = build_6t_cell(p);
  e.dt = t.dt;
  e.vdd = p.vdd;
  e.supply = supply;
  const double P = t.phase_time;
  const double conv_edge = 10.0 * t.dt;
  const bool drivers_adiabatic =
      supply.adiabatic && t.scope == AdiabaticScope::RailsAndDrivers;

  std::vector<double> bl, blb;
  std::vector<bool> wl;
  std::vector<PhaseKind> kinds;
  switch (mode) {
    case ExperimentMode::Write01:
      kinds = {PhaseKind::Write0, PhaseKind::Write1};
      bl = {0.0, p.vdd};
      blb = {p.vdd, 0.0};
      wl = {true, true};
      e.preload = {{"A", p.vdd}, {"B", 0.0}};  // start holding '1' so write '0' flips it
      break;
    case ExperimentMode::WriteHold:
      kinds = {PhaseKind::Write1, PhaseKind::Hold};
      bl = {p.vdd, p.vdd};
      blb = {0.0, p.vdd};
      wl = {true, false};
      e.preload = {{"A", 0.0}, {"B", p.vdd}};
      break;
    case ExperimentMode::WriteRead:
      kinds = {PhaseKind::Write1, PhaseKind::ReadDriven};
      bl = {p.vdd, p.vdd};
      blb = {0.0, p.vdd};
      wl = {true, true};
      e.preload = {{"A", 0.0}, {"B", p.vdd}};
      break;
  }
  e.use_preload = !supply.adiabatic;  // the adiabatic arm starts with the rail at zero

  e.netlist.add_vsource("VRAIL", "VDD", "0", detail::rail_source(supply, p.vdd, P, false));
  // In the adiabatic arm the wordline rides the supply trapezoid during its
  // active phases, so the access gates track the rail and the bitlines steer
  // the latch from the start of each ramp instead of racing it.
  SourceSpec wl_spec;
  if (drivers_adiabatic) {
    std::vector<double> wl_levels;
    for (bool on : wl) wl_levels.push_back(on ? p.vdd : 0.0);
    wl_spec = detail::driven_levels(wl_levels, P, true, conv_edge);
  } else {
    wl_spec = detail::wl_pulses(wl, P, p.vdd, conv_edge);
  }
  detail::add_driver(e.netlist, "WL", "WL", std::move(wl_spec), t.driver_r);
  detail::add_driver(e.netlist, "BL", "BL",
                     detail::driven_levels(bl, P, drivers_adiabatic, conv_edge), t.driver_r);
  detail::add_driver(e.netlist, "BLB", "BLB",
                     detail::driven_levels(blb, P, drivers_adiabatic, conv_edge), t.driver_r);

  const double probe_frac = supply.adiabatic ? StimulusShape::probe_adiab : StimulusShape::probe_conv;
  for (size_t k = 0; k < kinds.size(); ++k) {
    Phase ph;
    ph.kind = kinds[k];
    ph.label = (kinds[k] == PhaseKind::Write0)     ? "write0"
               : (kinds[k] == PhaseKind::Write1)   ? "write1"
               : (kinds[k] == PhaseKind::Hold)     ? "hold"
                                                   : "read";
    ph.t0 = double(k) * P;
    ph.t1 = double(k + 1) * P;
    ph.probe = ph.t0 + probe_frac * P;
    // state/disturb checks look at the supply plateau in the adiabatic arm
    ph.win0 = supply.adiabatic ? ph.t0 + 0.26 * P : ph.t0;
    ph.win1 = supply.adiabatic ? ph.t0 + 0.74 * P : ph.t1;
    e.phases.push_back(ph);
  }
  e.window_t0 = 0.0;
  e.window_t1 = double(kinds.size()) * P;
  e.tstop = e.window_t1;
  e.leak_devices = {"MAL", "MAR"};
  return e;
}

// Single write followed by a hold tail: drives BL/BLB to the bit value,
// pulses WL, then holds with bitlines at vdd.
inline Experiment write_sequence(const SramCellParams& p, int bit, const SupplyKind& supply,
                                 const ExperimentTiming& t = {}, bool force_wl_low = false) {
  Experiment e;
  e.netlist = build_6t_cell(p);
  e.dt = t.dt;
  e.vdd = p.vdd;
  e.supply = supply;
  const double P = t.phase_time;
  const double conv_edge = 10.0 * t.dt;
  const bool drivers_adiabatic =
      supply.adiabatic && t.scope == AdiabaticScope::RailsAndDrivers;

  std::vector<double> bl = {bit ? p.vdd : 0.0, p.vdd};
  std::vector<double> blb = {bit ? 0.0 : p.vdd, p.vdd};
  std::vector<bool> wl = {!force_wl_low, false};
  e.preload = bit ? std::map<std::string, double>{{"A", 0.0}, {"B", p.vdd}}
                  : std::map<std::string, double>{{"A", p.vdd}, {"B", 0.0}};
  e.use_preload = !supply.adiabatic;

  e.netlist.add_vsource("VRAIL", "VDD", "0", detail::rail_source(supply, p.vdd, P, false));
  SourceSpec wl_spec;
  if (drivers_adiabatic) {
    std::vector<double> wl_levels;
    for (bool on : wl) wl_levels.push_back(on ? p.vdd : 0.0);
    wl_spec = detail::driven_levels(wl_levels, P, true, conv_edge);
  } else {
    wl_spec = detail::wl_pulses(wl, P, p.vdd, conv_edge);
  }
  detail::add_driver(e.netlist, "WL", "WL", std::move(wl_spec), t.driver_r);
  detail::add_driver(e.netlist, "BL", "BL",
                     detail::driven_levels(bl, P, drivers_adiabatic, conv_edge), t.driver_r);
  detail::add_driver(e.netlist, "BLB", "BLB",
                     detail::driven_levels(blb, P, drivers_adiabatic, conv_edge), t.driver_r);

  const double probe_frac =
      supply.adiabatic ? detail::StimulusShape::probe_adiab : detail::StimulusShape::probe_conv;
  Phase w;
  w.kind = bit ? PhaseKind::Write1 : PhaseKind::Write0;
  w.label = bit ? "write1" : "write0";
  w.t0 = 0.0;
  w.t1 = P;
  w.probe = probe_frac * P;
  w.win0 = 0.0;
  w.win1 = P;
  Phase h;
  h.kind = PhaseKind::Hold;
  h.label = "hold";
  h.t0 = P;
  h.t1 = 2.0 * P;
  h.probe = P + probe_frac * P;
  h.win0 = P;
  h.win1 = 2.0 * P;
  e.phases = {w, h};
  e.window_t0 = 0.0;
  e.window_t1 = 2.0 * P;
  e.tstop = 2.0 * P;
  e.leak_devices = {"MAL", "MAR"};
  return e;
}

// Released-bitline read: bitlines precharged to vdd (initial condition plus
// a weak resistive tie), wordline pulsed, stored state left to develop a
// differential on the bitlines.
inline Experiment read_sequence(const SramCellParams& p, int stored_bit, const SupplyKind& supply,
                                const ExperimentTiming& t = {}, bool wl_stuck_low = false) {
  using detail::PwlBuilder;
  Experiment e;
  e.netlist = build_6t_cell(p);
  e.dt = t.dt;
  e.vdd = p.vdd;
  e.supply = supply;
  const double P = t.phase_time;
  const double conv_edge = 10.0 * t.dt;

  // Supply: held on its plateau across the read so the preloaded state is a
  // valid initial condition in both arms.
  if (!supply.adiabatic) {
    e.netlist.add_vsource("VRAIL", "VDD", "0", DcSpec{p.vdd});
  } else if (supply.shape == AdiabaticShape::Sine) {
    // slow sine peaking at t = 0 so the supply stays near vdd across the read
    e.netlist.add_vsource("VRAIL", "VDD", "0",
                          SineSpec{p.vdd / 2.0, p.vdd / 2.0, 1.0 / (8.0 * P), -2.0 * P});
  } else {
    RampSpec r;
    r.v_start = 0.0;
    r.v_end = p.vdd;
    r.rise = 0.25 * P;
    r.hold = 1.25 * P;
    r.fall = 0.25 * P;
    r.period = 2.5 * P;
    r.delay = -0.25 * P;  // plateau covers [0, 1.25 P]
    e.netlist.add_vsource("VRAIL", "VDD", "0", r);
  }

  // Weak precharge ties keep the released bitlines defined.
  e.netlist.add_vsource("VPC", "PC", "0", DcSpec{p.vdd});
  e.netlist.add_resistor("RPCL", "PC", "BL", t.read_tie_r);
  e.netlist.add_resistor("RPCR", "PC", "BLB", t.read_tie_r);

  PwlBuilder wl;
  wl.to(0.0, 0.0);
  if (!wl_stuck_low) {
    if (!supply.adiabatic) {
      wl.to(0.35 * P, 0.0);
      wl.to(0.35 * P + conv_edge, p.vdd);
      wl.to(1.15 * P, p.vdd);
      wl.to(1.15 * P + conv_edge, 0.0);
    } else {
      wl.to(0.30 * P, 0.0);
      wl.to(0.35 * P, p.vdd);
      wl.to(1.05 * P, p.vdd);
      wl.to(1.10 * P, 0.0);
    }
  }
  detail::add_driver(e.netlist, "WL", "WL", std::move(wl).done(), t.driver_r);

  e.preload = stored_bit ? std::map<std::string, double>{{"A", p.vdd}, {"B", 0.0}}
                         : std::map<std::string, double>{{"A", 0.0}, {"B", p.vdd}};
  e.preload["BL"] = p.vdd;
  e.preload["BLB"] = p.vdd;
  e.use_preload = true;

  Phase settle{PhaseKind::Settle, "settle", 0.0, 0.3 * P, 0.28 * P, 0.0, 0.3 * P};
  Phase read;
  read.kind = PhaseKind::ReadReleased;
  read.label = "read";
  read.t0 = 0.3 * P;
  read.t1 = supply.adiabatic ? 1.2 * P : 1.3 * P;
  read.probe = supply.adiabatic ? 1.2 * P : 1.3 * P;
  // the disturb peaks right at the wordline rise, before the bitline decays
  read.win0 = supply.adiabatic ? 0.30 * P : 0.35 * P;
  read.win1 = 1.0 * P;
  Phase tail{PhaseKind::Tail, "tail", read.t1, 2.0 * P, supply.adiabatic ? 1.24 * P : 1.9 * P,
             read.t1, 2.0 * P};
  e.phases = {settle, read, tail};
  e.window_t0 = 0.0;
  e.window_t1 = 2.0 * P;
  e.tstop = 2.0 * P;
  e.leak_devices = {"MAL", "MAR"};
  return e;
}

// Retention: wordline low for the whole run, bitlines held at vdd.
inline Experiment hold_sequence(const SramCellParams& p, int stored_bit, const SupplyKind& supply,
                                const ExperimentTiming& t = {}, int phases = 2) {
  Experiment e;
  e.netlist = build_6t_cell(p);
  e.dt = t.dt;
  e.vdd = p.vdd;
  e.supply = supply;
  const double P = t.phase_time;
  const bool drivers_adiabatic =
      supply.adiabatic && t.scope == AdiabaticScope::RailsAndDrivers;

  e.netlist.add_vsource("VRAIL", "VDD", "0", detail::rail_source(supply, p.vdd, P, true));
  detail::add_driver(e.netlist, "WL", "WL", PwlSpec{{{0.0, 0.0}}}, t.driver_r);

  // Bitlines at vdd; in the adiabatic arm they dip in step with the supply,
  // whose plateau-start shape is high on [kP - 0.25P, kP + 0.25P].
  detail::PwlBuilder bl;
  bl.to(0.0, p.vdd);
  if (drivers_adiabatic) {
    for (int k = 0; k < phases; ++k) {
      const double t0 = double(k) * P;
      bl.to(t0 + 0.25 * P, p.vdd);
      bl.to(t0 + 0.5 * P, 0.0);
      bl.to(t0 + 0.75 * P, p.vdd);
    }
  }
  PwlSpec blspec = std::move(bl).done();
  detail::add_driver(e.netlist, "BL", "BL", blspec, t.driver_r);
  detail::add_driver(e.netlist, "BLB", "BLB", blspec, t.driver_r);

  e.preload = stored_bit ? std::map<std::string, double>{{"A", p.vdd}, {"B", 0.0}}
                         : std::map<std::string, double>{{"A", 0.0}, {"B", p.vdd}};
  e.preload["BL"] = p.vdd;
  e.preload["BLB"] = p.vdd;
  e.use_preload = true;

  for (int k = 0; k < phases; ++k) {
    Phase ph;
    ph.kind = PhaseKind::Hold;
    ph.label = "hold" + std::to_string(k);
    ph.t0 = double(k) * P;
    ph.t1 = double(k + 1) * P;
    // The adiabatic rail plateau is centered on each phase start.
    ph.probe = supply.adiabatic ? ph.t0 + 0.05 * P : ph.t1 - 2.0 * t.dt;
    ph.win0 = ph.t0;
    ph.win1 = ph.t1;
    e.phases.push_back(ph);
  }
  e.window_t0 = 0.0;
  e.window_t1 = double(phases) * P;
  e.tstop = e.window_t1;
  e.leak_devices = {"MAL", "MAR"};
  return e;
}

// ---------------------------------------------------------------------------
// Execution and checks.

struct SequenceResult {
  Waveform wave;
  std::vector<Phase> phases;
  // logical state (A high = '1') at each phase probe
  std::vector<int> probe_bits;
  bool state_flipped = false;
  bool read_upset = false;
  double max_disturb = 0.0;       // peak of the internal '0' node during read
  double min_separation = 0.0;    // worst internal-node split during read
  double read_differential = 0.0; // bitline split achieved in the read window
  int read_bit = -1;              // bit inferred from the bitline differential
  double droop = 0.0;             // worst high-node sag across hold probes
};

namespace detail {

inline int bit_at(const Waveform& w, double t) {
  return w.value_at("v(A)", t) > w.value_at("v(B)", t) ? 1 : 0;
}

}  // namespace detail

// Runs an experiment and applies the per-phase checks. The read-disturb
// threshold follows the classic cell-ratio criterion: a read is flagged as
// an upset when the internal '0' node is pulled above the driver threshold
// voltage (the point where the opposite driver starts to conduct), or when
// the stored state actually flips.
inline SequenceResult run_sequence(const Experiment& e, const SimConfig& cfg = {}) {
  SequenceResult res;
  res.phases = e.phases;
  res.wave = transient(e.netlist, cfg, e.dt, e.tstop, nullptr,
                       e.use_preload ? &e.preload : nullptr);
  const Waveform& w = res.wave;

  const double disturb_threshold = e.netlist.model(
      e.netlist.find_device("MNL")->geom.model).vt0;

  int prev_bit = -1;
  for (const auto& ph : e.phases) {
    const int bit = detail::bit_at(w, ph.probe);
    res.probe_bits.push_back(bit);
    switch (ph.kind) {
      case PhaseKind::Write0:
      case PhaseKind::Write1: {
        const int want = ph.kind == PhaseKind::Write1 ? 1 : 0;
        const std::string hi = want ? "v(A)" : "v(B)";
        const std::string lo = want ? "v(B)" : "v(A)";
        if (!(w.value_at(hi, ph.probe) > e.vdd / 2.0) ||
            !(w.value_at(lo, ph.probe) < e.vdd / 2.0)) {
          throw SimError(SimErrorKind::WriteFailed,
                         ph.label + ": destination node failed to cross vdd/2 by " +
                             format_shortest(ph.probe));
        }
        break;
      }
      case PhaseKind::Hold: {
        if (prev_bit >= 0 && bit != prev_bit) res.state_flipped = true;
        break;
      }
      case PhaseKind::ReadReleased:
      case PhaseKind::ReadDriven: {
        const int stored = prev_bit >= 0 ? prev_bit : bit;
        const auto& va = w.column("v(A)");
        const auto& vb = w.column("v(B)");
        const auto& vbl = w.column("v(BL)");
        const auto& vblb = w.column("v(BLB)");
        double max_zero = 0.0, max_diff = 0.0;
        double min_sep = e.vdd;
        for (size_t k = 0; k < w.samples(); ++k) {
          const double t = w.time_at(k);
          if (t < ph.win0 || t > ph.win1) continue;
          max_zero = std::max(max_zero, stored ? vb[k] : va[k]);
          min_sep = std::min(min_sep, stored ? va[k] - vb[k] : vb[k] - va[k]);
          const double diff = stored ? vbl[k] - vblb[k] : vblb[k] - vbl[k];
          max_diff = std::max(max_diff, diff);
        }
        res.max_disturb = max_zero;
        res.min_separation = min_sep;
        if (ph.kind == PhaseKind::ReadReleased) {
          res.read_differential = max_diff;
          res.read_bit = max_diff > 0.0 ? stored : 1 - stored;
        }
        if (bit != stored) res.state_flipped = true;
        res.read_upset = res.state_flipped || max_zero > disturb_threshold;
        break;
      }
      case PhaseKind::Settle:
      case PhaseKind::Tail:
        break;
    }
    prev_bit = bit;
  }

  // Retention droop across hold probes: worst sag of the high node.
  double droop = 0.0;
  const Phase* first_hold = nullptr;
  for (const auto& ph : e.phases) {
    if (ph.kind != PhaseKind::Hold) continue;
    if (!first_hold) {
      first_hold = &ph;
      continue;
    }
    const int bit = detail::bit_at(w, first_hold->probe);
    const std::string hi = bit ? "v(A)" : "v(B)";
    droop = std::max(droop, w.value_at(hi, first_hold->probe) - w.value_at(hi, ph.probe));
  }
  res.droop = droop;
  return res;
}

struct ExperimentReport {
  PowerReport conventional;
  PowerReport adiabatic;
  double reduction = 0.0;  // (P_conv - P_adia) / P_conv
  SequenceResult conv_run;
  SequenceResult adia_run;
  Experiment conv_exp;
  Experiment adia_exp;
};

// Runs the same stimulus under the conventional supply and the given
// comparison supply (normally adiabatic) and reports both power figures
// plus the fractional reduction.
inline ExperimentReport run_experiment(const SramCellParams& p, ExperimentMode mode,
                                       const SupplyKind& alt_supply,
                                       const ExperimentTiming& t = {}, const SimConfig& cfg = {}) {
  ExperimentReport rep;
  rep.conv_exp = build_mode_experiment(p, mode, SupplyKind::conventional(), t);
  rep.adia_exp = build_mode_experiment(p, mode, alt_supply, t);
  rep.conv_run = run_sequence(rep.conv_exp, cfg);
  rep.adia_run = run_sequence(rep.adia_exp, cfg);

  const bool leak = mode == ExperimentMode::WriteHold;
  const auto& leak_devs = rep.conv_exp.leak_devices;
  auto window_report = [&](const Experiment& e, const SequenceResult& r) {
    PowerReport pr = make_power_report(r.wave, e.netlist, e.window_t0, e.window_t1);
    if (leak) {
      // Leakage is averaged over the hold phase only (access devices off).
      for (const auto& ph : e.phases) {
        if (ph.kind == PhaseKind::Hold) {
          pr.leakage = leakage_currents(r.wave, leak_devs, ph.t0, ph.t1);
          break;
        }
      }
    }
    return pr;
  };
  rep.conventional = window_report(rep.conv_exp, rep.conv_run);
  rep.adiabatic = window_report(rep.adia_exp, rep.adia_run);
  rep.reduction = (rep.conventional.avg_power - rep.adiabatic.avg_power) /
                  rep.conventional.avg_power;
  return rep;
}

}  // namespace spicelab::sram
