#include <doctest.h>

#include <cmath>

#include "spicelab/sram.hpp"

using namespace spicelab;
using namespace spicelab::sram;

TEST_SUITE_BEGIN("sram");

namespace {

ExperimentTiming fast_timing() {
  ExperimentTiming t;
  t.phase_time = 4e-9;
  t.dt = 2.5e-12;
  return t;
}

}  // namespace

TEST_CASE("6T cell topology") {
  SramCellParams p;
  Netlist n = build_6t_cell(p);
  int mosfets = 0, caps = 0;
  for (const auto& d : n.devices()) {
    if (d.kind == DeviceKind::Mosfet) ++mosfets;
    if (d.kind == DeviceKind::Capacitor) ++caps;
  }
  CHECK(mosfets == 6);
  CHECK(caps == 2);
  CHECK(p.cell_ratio() == doctest::Approx(2.0));

  // cross-coupling: each inverter's gate is the other inverter's output
  auto terminal_name = [&](const char* dev, int k) {
    return n.node_name(n.find_device(dev)->terminals[size_t(k)]);
  };
  CHECK(terminal_name("MPL", 0) == "A");   // drain
  CHECK(terminal_name("MPL", 1) == "B");   // gate
  CHECK(terminal_name("MPL", 2) == "VDD"); // source
  CHECK(terminal_name("MNL", 0) == "A");
  CHECK(terminal_name("MNL", 1) == "B");
  CHECK(terminal_name("MNL", 2) == "0");
  CHECK(terminal_name("MPR", 1) == "A");
  CHECK(terminal_name("MAL", 0) == "BL");
  CHECK(terminal_name("MAL", 1) == "WL");
  CHECK(terminal_name("MAL", 2) == "A");
  CHECK(terminal_name("MAR", 0) == "BLB");
  CHECK(terminal_name("MAR", 2) == "B");
}

TEST_CASE("the isolated cell is bistable and a midpoint preload resolves") {
  SramCellParams p;
  Experiment hold = hold_sequence(p, 1, SupplyKind::conventional(), fast_timing());
  const Netlist& n = hold.netlist;

  std::map<std::string, double> hi{{"A", p.vdd}, {"B", 0.0}};
  std::map<std::string, double> lo{{"A", 0.0}, {"B", p.vdd}};
  Solution s1 = dc_operating_point(n, {}, &hi);
  Solution s2 = dc_operating_point(n, {}, &lo);
  const size_t ia = size_t(*n.find_node("A")), ib = size_t(*n.find_node("B"));
  CHECK(s1.node_voltages[ia] > 0.9 * p.vdd);
  CHECK(s1.node_voltages[ib] < 0.1 * p.vdd);
  CHECK(s2.node_voltages[ia] < 0.1 * p.vdd);
  CHECK(s2.node_voltages[ib] > 0.9 * p.vdd);

  // A near-midpoint start must decay into one of the two stable states, not
  // a third one. The DC solve may land on the metastable point, so the
  // latch dynamics settle it: any residual asymmetry is amplified away.
  std::map<std::string, double> mid{{"A", 0.55 * p.vdd}, {"B", 0.45 * p.vdd}};
  Solution s3 = dc_operating_point(n, {}, &mid);
  Waveform w = transient(n, {}, 2.5e-12, 2e-9, &s3);
  const double va = w.value_at("v(A)", 2e-9), vb = w.value_at("v(B)", 2e-9);
  const bool state1 = va > 0.9 * p.vdd && vb < 0.1 * p.vdd;
  const bool state0 = va < 0.1 * p.vdd && vb > 0.9 * p.vdd;
  CHECK((state1 || state0));
}

TEST_CASE("write 0 then hold settles the internal nodes at the rails") {
  SramCellParams p;
  Experiment e = write_sequence(p, 0, SupplyKind::conventional(), fast_timing());
  SequenceResult r = run_sequence(e);
  const double probe = e.phases.back().probe;
  CHECK(r.wave.value_at("v(A)", probe) <= 0.1 * p.vdd);
  CHECK(r.wave.value_at("v(B)", probe) >= 0.9 * p.vdd);
  CHECK_FALSE(r.state_flipped);
}

TEST_CASE("write 1 into a cell holding 0 flips the state") {
  SramCellParams p;
  for (auto supply : {SupplyKind::conventional(), SupplyKind::adiabatic_ramp()}) {
    Experiment e = write_sequence(p, 1, supply, fast_timing());
    SequenceResult r = run_sequence(e);
    const double probe = e.phases.back().probe;
    CHECK(r.wave.value_at("v(A)", probe) >= 0.9 * p.vdd);
    CHECK(r.wave.value_at("v(B)", probe) <= 0.1 * p.vdd);
  }
}

TEST_CASE("write with the wordline stuck low fails") {
  SramCellParams p;
  Experiment e = write_sequence(p, 1, SupplyKind::conventional(), fast_timing(),
                                /*force_wl_low=*/true);
  CHECK_THROWS_AS(run_sequence(e), SimError);
  try {
    run_sequence(e);
  } catch (const SimError& err) {
    CHECK(err.kind() == SimErrorKind::WriteFailed);
  }
}

TEST_CASE("default-ratio read develops a differential and preserves state") {
  SramCellParams p;  // cell_ratio = 2
  for (int bit : {0, 1}) {
    for (auto supply : {SupplyKind::conventional(), SupplyKind::adiabatic_ramp()}) {
      Experiment e = read_sequence(p, bit, supply, fast_timing());
      SequenceResult r = run_sequence(e);
      CHECK(r.read_differential >= 0.1);
      CHECK(r.read_bit == bit);
      CHECK_FALSE(r.state_flipped);
      CHECK_FALSE(r.read_upset);
    }
  }
}

TEST_CASE("weak-driver read trips the disturb criterion") {
  // cell_ratio = 0.5: the '0' node is pulled above the driver threshold
  SramCellParams p;
  p.driver_wl = 1.0;
  p.access_wl = 2.0;
  Experiment e = read_sequence(p, 1, SupplyKind::conventional(), fast_timing());
  SequenceResult r = run_sequence(e);
  CHECK(r.max_disturb > p.nmos_card.vt0);
  CHECK(r.read_upset);
}

TEST_CASE("severely skewed cell actually flips during a driven read") {
  // weak driver and weak load: with both bitlines held at vdd the
  // read-accessed latch loses its second stable state and the stored value
  // is destroyed
  SramCellParams p;
  p.driver_wl = 0.4;
  p.access_wl = 2.0;
  p.load_wl = 1.0;
  Experiment e = build_mode_experiment(p, ExperimentMode::WriteRead,
                                       SupplyKind::conventional(), fast_timing());
  SequenceResult r = run_sequence(e);
  CHECK(r.read_upset);
  // the stored information is destroyed: the internal nodes collapse toward
  // the single read-mode equilibrium instead of staying a latch apart
  CHECK(r.min_separation < 0.1 * p.vdd);
  CHECK(r.max_disturb > 1.0);

  // sanity: the default-ratio cell keeps a wide separation in the same mode
  SramCellParams ok;
  Experiment e2 = build_mode_experiment(ok, ExperimentMode::WriteRead,
                                        SupplyKind::conventional(), fast_timing());
  SequenceResult r2 = run_sequence(e2);
  CHECK(r2.min_separation > 0.8 * ok.vdd);
  CHECK_FALSE(r2.read_upset);
}

TEST_CASE("read with the wordline low leaves the bitlines precharged") {
  SramCellParams p;
  Experiment e = read_sequence(p, 1, SupplyKind::conventional(), fast_timing(),
                               /*wl_stuck_low=*/true);
  SequenceResult r = run_sequence(e);
  CHECK(std::fabs(r.read_differential) < 0.01);
}

TEST_CASE("hold retains both states with negligible droop") {
  SramCellParams p;
  for (int bit : {0, 1}) {
    Experiment e = hold_sequence(p, bit, SupplyKind::conventional(), fast_timing(), 10);
    SequenceResult r = run_sequence(e);
    for (int b : r.probe_bits) CHECK(b == bit);
    CHECK(r.droop <= 0.01 * p.vdd);
  }
}

TEST_CASE("hold under the adiabatic supply keeps state across supply dips") {
  SramCellParams p;
  for (int bit : {0, 1}) {
    Experiment e = hold_sequence(p, bit, SupplyKind::adiabatic_ramp(), fast_timing(), 4);
    SequenceResult r = run_sequence(e);
    for (int b : r.probe_bits) CHECK(b == bit);
  }
}

TEST_CASE("write-then-read round trip recovers the written bit") {
  SramCellParams p;
  for (int bit : {0, 1}) {
    Experiment w = write_sequence(p, bit, SupplyKind::conventional(), fast_timing());
    SequenceResult wr = run_sequence(w);
    CHECK(wr.probe_bits.back() == bit);
    Experiment rd = read_sequence(p, bit, SupplyKind::conventional(), fast_timing());
    SequenceResult rr = run_sequence(rd);
    CHECK(rr.read_bit == bit);
  }
}

TEST_CASE("adiabatic write01 dissipates less than conventional") {
  SramCellParams p;
  ExperimentTiming t = fast_timing();
  // ramp period well beyond 50x the estimated driven-node RC
  CHECK(t.phase_time >= 50.0 * estimated_node_rc(p, t));
  ExperimentReport rep = run_experiment(p, ExperimentMode::Write01,
                                        SupplyKind::adiabatic_ramp(), t);
  CHECK(rep.reduction > 0.0);
  CHECK(rep.adiabatic.avg_power < rep.conventional.avg_power);
}

TEST_CASE("self-comparison reports zero reduction") {
  SramCellParams p;
  ExperimentReport rep = run_experiment(p, ExperimentMode::Write01,
                                        SupplyKind::conventional(), fast_timing());
  CHECK(std::fabs(rep.reduction) <= 1e-3);
}

TEST_CASE("adiabatic power falls monotonically with ramp period") {
  SramCellParams p;
  double prev = 1e9;
  for (double mult : {1.0, 2.0, 4.0}) {
    ExperimentTiming t = fast_timing();
    t.phase_time *= mult;
    t.dt *= mult;
    ExperimentReport rep = run_experiment(p, ExperimentMode::Write01,
                                          SupplyKind::adiabatic_ramp(), t);
    CHECK(rep.adiabatic.avg_power < prev);
    prev = rep.adiabatic.avg_power;
  }
}

TEST_CASE("supply kind does not change the logical outcome") {
  SramCellParams p;
  for (auto mode : {ExperimentMode::Write01, ExperimentMode::WriteHold,
                    ExperimentMode::WriteRead}) {
    ExperimentReport rep =
        run_experiment(p, mode, SupplyKind::adiabatic_ramp(), fast_timing());
    REQUIRE(rep.conv_run.probe_bits.size() == rep.adia_run.probe_bits.size());
    for (size_t i = 0; i < rep.conv_run.probe_bits.size(); ++i)
      CHECK(rep.conv_run.probe_bits[i] == rep.adia_run.probe_bits[i]);
  }
}

TEST_CASE("write-hold comparison reports access-transistor leakage") {
  SramCellParams p;
  ExperimentReport rep = run_experiment(p, ExperimentMode::WriteHold,
                                        SupplyKind::adiabatic_ramp(), fast_timing());
  REQUIRE(rep.conventional.leakage.count("MAL") == 1);
  REQUIRE(rep.conventional.leakage.count("MAR") == 1);
  REQUIRE(rep.adiabatic.leakage.count("MAL") == 1);
  // the off access transistor with full vds across it dominates the rows
  CHECK(rep.conventional.leakage.at("MAR") > 1e-20);
  CHECK(rep.conventional.leakage.at("MAR") > rep.conventional.leakage.at("MAL"));
  // Supply cycling collapses vds across the off device for part of each
  // period, but gate-drain coupling also dips the floating '0' node below
  // ground, which boosts the subthreshold term; at cell level the two
  // effects are the same order, so only the same-order bound is asserted
  // here. The clean single-device direction is covered in the measure suite.
  CHECK(rep.adiabatic.leakage.at("MAR") < 3.0 * rep.conventional.leakage.at("MAR"));
}

TEST_CASE("sine supply works as the adiabatic arm") {
  SramCellParams p;
  ExperimentReport rep = run_experiment(p, ExperimentMode::Write01,
                                        SupplyKind::adiabatic_sine(), fast_timing());
  CHECK(rep.reduction > 0.0);
}

TEST_SUITE_END();
