#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "spicelab/engine.hpp"
#include "spicelab/errors.hpp"
#include "spicelab/netlist.hpp"

namespace spicelab {

struct PowerReport {
  double t0 = 0.0;
  double t1 = 0.0;
  std::map<std::string, double> per_source_energy;  // J, positive = delivered
  double supply_energy = 0.0;                       // J, sum over sources
  double stored_delta = 0.0;                        // J, capacitive energy change
  double dissipated = 0.0;                          // J, supply - stored_delta
  double avg_power = 0.0;                           // W, dissipated / window
  std::map<std::string, double> leakage;            // A, time-averaged |id| per device
};

// Analytic dissipation of a ramp charge through R onto C: (RC/T) C Vdd^2.
// The transient result approaches this as T/RC grows.
struct ChargingLaw {
  double r = 0.0;
  double c = 0.0;
  double vdd = 0.0;
  double t_ramp = 0.0;
};

inline double adiabatic_energy_law(const ChargingLaw& law) {
  return (law.r * law.c / law.t_ramp) * law.c * law.vdd * law.vdd;
}

inline double conventional_supply_energy(double c, double vdd) { return c * vdd * vdd; }
inline double conventional_dissipation(double c, double vdd) { return 0.5 * c * vdd * vdd; }

namespace detail {

inline void check_window(const Waveform& w, double t0, double t1) {
  const double eps = w.dt() * 1e-6;
  if (t0 < w.t0() - eps || t1 > w.t_end() + eps || t1 <= t0)
    throw SimError(SimErrorKind::WindowOutOfRange,
                   "[" + format_shortest(t0) + ", " + format_shortest(t1) + "] outside waveform");
}

// Trapezoidal quadrature of fn(sample k) over [t0, t1] with linear
// interpolation at fractional window edges.
template <typename F>
double integrate(const Waveform& w, double t0, double t1, F&& fn) {
  check_window(w, t0, t1);
  const double dt = w.dt();
  const double p0 = (t0 - w.t0()) / dt;
  const double p1 = (t1 - w.t0()) / dt;
  const size_t k0 = static_cast<size_t>(std::ceil(p0 - 1e-9));
  const size_t k1 = static_cast<size_t>(std::floor(p1 + 1e-9));
  double acc = 0.0;
  for (size_t k = k0; k + 1 <= k1; ++k) acc += 0.5 * (fn(k) + fn(k + 1)) * dt;
  // fractional leading/trailing pieces
  if (double(k0) > p0) {
    const double frac = double(k0) - p0;
    const size_t a = k0 == 0 ? 0 : k0 - 1;
    const double f_lo = fn(a) + (fn(k0) - fn(a)) * (1.0 - frac);
    acc += 0.5 * (f_lo + fn(k0)) * frac * dt;
  }
  if (p1 > double(k1)) {
    const double frac = p1 - double(k1);
    const size_t b = std::min(k1 + 1, w.samples() - 1);
    const double f_hi = fn(k1) + (fn(b) - fn(k1)) * frac;
    acc += 0.5 * (fn(k1) + f_hi) * frac * dt;
  }
  return acc;
}

inline const DeviceInstance& find_vsource(const Netlist& n, const std::string& name) {
  const DeviceInstance* dev = n.find_device(name);
  if (!dev || dev->kind != DeviceKind::VoltageSource)
    throw SimError(SimErrorKind::UnknownSignal, "voltage source " + name);
  return *dev;
}

}  // namespace detail

// Net energy delivered by a voltage source over [t0, t1]: the trapezoidal
// integral of v(t)*i(t) with i positive out of the + terminal. Energy taken
// back during an adiabatic ramp-down subtracts.
inline double supply_energy(const Waveform& w, const Netlist& n, const std::string& source,
                            double t0, double t1) {
  const DeviceInstance& dev = detail::find_vsource(n, source);
  const auto& ib = w.column("i(" + dev.name + ")");
  const int na = dev.terminals[0], nb = dev.terminals[1];
  const std::vector<double>* va = na > 0 ? &w.column("v(" + n.node_name(na) + ")") : nullptr;
  const std::vector<double>* vb = nb > 0 ? &w.column("v(" + n.node_name(nb) + ")") : nullptr;
  return detail::integrate(w, t0, t1, [&](size_t k) {
    const double v = (va ? (*va)[k] : 0.0) - (vb ? (*vb)[k] : 0.0);
    return v * ib[k];
  });
}

// Capacitive stored-energy change sum(1/2 C u^2) between window edges.
inline double stored_energy_delta(const Waveform& w, const Netlist& n, double t0, double t1) {
  detail::check_window(w, t0, t1);
  double delta = 0.0;
  for (const auto& cap : capacitive_elements(n)) {
    auto u_at = [&](double t) {
      const double va = cap.node_a > 0 ? w.value_at("v(" + n.node_name(cap.node_a) + ")", t) : 0.0;
      const double vb = cap.node_b > 0 ? w.value_at("v(" + n.node_name(cap.node_b) + ")", t) : 0.0;
      return va - vb;
    };
    const double u0 = u_at(t0), u1 = u_at(t1);
    delta += 0.5 * cap.farads * (u1 * u1 - u0 * u0);
  }
  return delta;
}

// Dissipated energy = total supply energy - stored energy change.
inline double dissipated_energy(const Waveform& w, const Netlist& n, double t0, double t1) {
  double supply = 0.0;
  for (const auto& dev : n.devices()) {
    if (dev.kind == DeviceKind::VoltageSource) supply += supply_energy(w, n, dev.name, t0, t1);
  }
  return supply - stored_energy_delta(w, n, t0, t1);
}

// Independent cross-check for linear circuits: sum of integral(i^2 R) over
// all resistors.
inline double resistor_ohmic_energy(const Waveform& w, const Netlist& n, double t0, double t1) {
  double total = 0.0;
  for (const auto& dev : n.devices()) {
    if (dev.kind != DeviceKind::Resistor) continue;
    const int na = dev.terminals[0], nb = dev.terminals[1];
    const std::vector<double>* va = na > 0 ? &w.column("v(" + n.node_name(na) + ")") : nullptr;
    const std::vector<double>* vb = nb > 0 ? &w.column("v(" + n.node_name(nb) + ")") : nullptr;
    total += detail::integrate(w, t0, t1, [&](size_t k) {
      const double u = (va ? (*va)[k] : 0.0) - (vb ? (*vb)[k] : 0.0);
      return u * u / dev.value;
    });
  }
  return total;
}

// Time-averaged channel-current magnitude per named MOSFET over [t0, t1].
inline std::map<std::string, double> leakage_currents(const Waveform& w,
                                                      const std::vector<std::string>& devices,
                                                      double t0, double t1) {
  std::map<std::string, double> out;
  for (const auto& name : devices) {
    const auto& col = w.column("id(" + name + ")");
    const double integral =
        detail::integrate(w, t0, t1, [&](size_t k) { return std::fabs(col[k]); });
    out[name] = integral / (t1 - t0);
  }
  return out;
}

inline PowerReport make_power_report(const Waveform& w, const Netlist& n, double t0, double t1,
                                     const std::vector<std::string>& leakage_devices = {}) {
  PowerReport r;
  r.t0 = t0;
  r.t1 = t1;
  for (const auto& dev : n.devices()) {
    if (dev.kind != DeviceKind::VoltageSource) continue;
    const double e = supply_energy(w, n, dev.name, t0, t1);
    r.per_source_energy[dev.name] = e;
    r.supply_energy += e;
  }
  r.stored_delta = stored_energy_delta(w, n, t0, t1);
  r.dissipated = r.supply_energy - r.stored_delta;
  r.avg_power = r.dissipated / (t1 - t0);
  if (!leakage_devices.empty()) r.leakage = leakage_currents(w, leakage_devices, t0, t1);
  return r;
}

}  // namespace spicelab
