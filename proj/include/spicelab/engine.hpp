#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "spicelab/devices.hpp"
#include "spicelab/errors.hpp"
#include "spicelab/linalg.hpp"
#include "spicelab/netlist.hpp"

namespace spicelab {

enum class Integrator { Trapezoidal, BackwardEuler };

struct SimConfig {
  double reltol = 1e-3;
  double vntol = 1e-6;   // V
  double abstol = 1e-12; // A
  double gmin = 1e-12;   // S, from every node to ground
  int max_newton_iters = 100;
  int source_steps = 10;
  Integrator integrator = Integrator::Trapezoidal;
  double max_voltage_step = 0.5;  // Newton damping clamp per iteration, V
};

struct Solution {
  std::vector<double> node_voltages;   // per netlist node, ground included at [0]
  std::vector<double> source_currents; // per voltage source, netlist device order
};

// Uniformly sampled signals: v(<node>) for every non-ground node,
// i(<vsource>) branch currents (positive = delivered into the + node),
// id(<mosfet>) drain currents.
class Waveform {
 public:
  Waveform() = default;
  Waveform(double t0, double dt, std::vector<std::string> names)
      : t0_(t0), dt_(dt), names_(std::move(names)) {
    for (size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
    data_.resize(names_.size());
  }

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  size_t samples() const { return data_.empty() ? 0 : data_[0].size(); }
  double t_end() const { return samples() == 0 ? t0_ : t0_ + dt_ * double(samples() - 1); }
  const std::vector<std::string>& names() const { return names_; }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  const std::vector<double>& column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw SimError(SimErrorKind::UnknownSignal, name);
    return data_[it->second];
  }

  void append_row(const std::vector<double>& row) {
    for (size_t i = 0; i < row.size(); ++i) data_[i].push_back(row[i]);
  }

  double time_at(size_t k) const { return t0_ + dt_ * double(k); }

  // Linear interpolation between samples.
  double value_at(const std::string& name, double t) const {
    const auto& col = column(name);
    if (col.empty()) throw SimError(SimErrorKind::WindowOutOfRange, "empty waveform");
    double pos = (t - t0_) / dt_;
    if (pos <= 0.0) return col.front();
    if (pos >= double(col.size() - 1)) return col.back();
    size_t k = static_cast<size_t>(pos);
    double frac = pos - double(k);
    return col[k] * (1.0 - frac) + col[k + 1] * frac;
  }

 private:
  double t0_ = 0.0;
  double dt_ = 0.0;
  std::vector<std::string> names_;
  std::unordered_map<std::string, size_t> index_;
  std::vector<std::vector<double>> data_;
};

// Capacitive elements of a netlist: explicit capacitors plus the constant
// MOSFET gate capacitances. Used for transient companion models and for
// stored-energy bookkeeping.
struct CapElement {
  std::string name;
  int node_a = 0;
  int node_b = 0;
  double farads = 0.0;
};

inline std::vector<CapElement> capacitive_elements(const Netlist& n) {
  std::vector<CapElement> caps;
  for (const auto& dev : n.devices()) {
    if (dev.kind == DeviceKind::Capacitor) {
      caps.push_back({dev.name, dev.terminals[0], dev.terminals[1], dev.value});
    } else if (dev.kind == DeviceKind::Mosfet) {
      const ModelCard& card = n.card_for(dev);
      const double area = dev.geom.w * dev.geom.l;
      const double cgs = card.cgs_per_area * area;
      const double cgd = card.cgd_per_area * area;
      if (cgs > 0.0) caps.push_back({dev.name + ":cgs", dev.terminals[1], dev.terminals[2], cgs});
      if (cgd > 0.0) caps.push_back({dev.name + ":cgd", dev.terminals[1], dev.terminals[0], cgd});
    }
  }
  return caps;
}

namespace detail {

// MNA workspace. Unknowns: node voltages 1..N-1 followed by one branch
// current per voltage source. A single analysis owns its workspace;
// independent analyses never share state.
class MnaSystem {
 public:
  MnaSystem(const Netlist& n, const SimConfig& cfg) : n_(n), cfg_(cfg) {
    for (size_t i = 0; i < n.devices().size(); ++i) {
      const auto& dev = n.devices()[i];
      if (dev.kind == DeviceKind::VoltageSource) vsrc_index_.push_back(static_cast<int>(i));
      if (dev.kind == DeviceKind::Mosfet) mos_index_.push_back(static_cast<int>(i));
    }
    nodes_ = n.node_count();
    unknowns_ = static_cast<size_t>(nodes_ - 1) + vsrc_index_.size();
    caps_ = capacitive_elements(n);
    x_.assign(unknowns_, 0.0);
    jac_ = DenseMatrix(unknowns_);
    f_.assign(unknowns_, 0.0);
    imax_.assign(static_cast<size_t>(nodes_), 0.0);
  }

  int vsource_count() const { return static_cast<int>(vsrc_index_.size()); }
  const std::vector<int>& vsource_devices() const { return vsrc_index_; }
  const std::vector<int>& mosfet_devices() const { return mos_index_; }
  const std::vector<CapElement>& caps() const { return caps_; }

  double node_v(int node) const { return node == 0 ? 0.0 : x_[static_cast<size_t>(node - 1)]; }
  double branch_i(int k) const { return x_[static_cast<size_t>(nodes_ - 1 + k)]; }

  void set_state(const Solution& s) {
    for (int i = 1; i < nodes_; ++i) x_[static_cast<size_t>(i - 1)] = s.node_voltages[static_cast<size_t>(i)];
    for (size_t k = 0; k < vsrc_index_.size(); ++k)
      x_[static_cast<size_t>(nodes_ - 1) + k] = s.source_currents[k];
  }

  void preload(const std::map<std::string, double>& guess) {
    for (const auto& [name, v] : guess) {
      auto idx = n_.find_node(name);
      if (idx && *idx > 0) x_[static_cast<size_t>(*idx - 1)] = v;
    }
  }

  Solution solution() const {
    Solution s;
    s.node_voltages.assign(static_cast<size_t>(nodes_), 0.0);
    for (int i = 1; i < nodes_; ++i) s.node_voltages[static_cast<size_t>(i)] = node_v(i);
    s.source_currents.assign(vsrc_index_.size(), 0.0);
    for (size_t k = 0; k < vsrc_index_.size(); ++k) s.source_currents[k] = branch_i(static_cast<int>(k));
    return s;
  }

  // Transient companion state for capacitors.
  void init_cap_state() {
    cap_v_.assign(caps_.size(), 0.0);
    cap_i_.assign(caps_.size(), 0.0);
    for (size_t c = 0; c < caps_.size(); ++c)
      cap_v_[c] = node_v(caps_[c].node_a) - node_v(caps_[c].node_b);
  }

  void advance_cap_state(double dt) {
    for (size_t c = 0; c < caps_.size(); ++c) {
      const double u = node_v(caps_[c].node_a) - node_v(caps_[c].node_b);
      const double geq = companion_g(caps_[c].farads, dt);
      double i_new;
      if (cfg_.integrator == Integrator::Trapezoidal) {
        i_new = geq * (u - cap_v_[c]) - cap_i_[c];
      } else {
        i_new = geq * (u - cap_v_[c]);
      }
      cap_v_[c] = u;
      cap_i_[c] = i_new;
    }
  }

  double companion_g(double farads, double dt) const {
    return (cfg_.integrator == Integrator::Trapezoidal) ? 2.0 * farads / dt : farads / dt;
  }

  // Newton-Raphson at time t. transient_dt == 0 means DC (capacitors open).
  // source_scale ramps independent sources for source stepping.
  // Returns iterations used; throws on failure.
  int solve(double t, double transient_dt, double source_scale) {
    bool step_ok = false;
    for (int iter = 0; iter < cfg_.max_newton_iters; ++iter) {
      assemble(t, transient_dt, source_scale);
      if (iter > 0 && step_ok && residual_converged()) return iter;

      DenseMatrix j = jac_;
      std::vector<double> rhs(unknowns_);
      for (size_t i = 0; i < unknowns_; ++i) rhs[i] = -f_[i];
      if (auto bad = lu_solve(j, rhs)) {
        throw SimError(SimErrorKind::SingularMatrix,
                       "singular MNA matrix at unknown " + unknown_name(*bad));
      }
      step_ok = true;
      for (size_t i = 0; i < static_cast<size_t>(nodes_ - 1); ++i) {
        double d = std::clamp(rhs[i], -cfg_.max_voltage_step, cfg_.max_voltage_step);
        x_[i] += d;
        if (std::fabs(d) > cfg_.vntol + cfg_.reltol * std::fabs(x_[i])) step_ok = false;
      }
      for (size_t i = static_cast<size_t>(nodes_ - 1); i < unknowns_; ++i) x_[i] += rhs[i];
    }
    throw SimError(SimErrorKind::NonConvergence,
                   "no convergence after " + std::to_string(cfg_.max_newton_iters) +
                       " iterations (worst node " + worst_node_name() + ", t=" +
                       format_shortest(t) + ")");
  }

  // DC solve with source stepping fallback.
  int solve_dc(double t, const std::map<std::string, double>* guess) {
    x_.assign(unknowns_, 0.0);
    if (guess) preload(*guess);
    std::vector<double> x_start = x_;
    try {
      return solve(t, 0.0, 1.0);
    } catch (const SimError& e) {
      if (e.kind() != SimErrorKind::NonConvergence) throw;
    }
    // Ramp all sources from zero, reusing each converged point.
    x_ = x_start;
    for (int s = 1; s <= cfg_.source_steps; ++s) {
      const double scale = double(s) / double(cfg_.source_steps);
      try {
        solve(t, 0.0, scale);
      } catch (const SimError& e) {
        if (e.kind() != SimErrorKind::NonConvergence) throw;
        throw SimError(SimErrorKind::NonConvergence,
                       "source stepping failed at scale " + format_shortest(scale) + ": " +
                           e.what());
      }
    }
    return cfg_.source_steps;
  }

  double device_drain_current(const DeviceInstance& dev) const {
    const ModelCard& card = n_.card_for(dev);
    DeviceEval e = mosfet_stamp(card, dev.geom.w, dev.geom.l, node_v(dev.terminals[0]),
                                node_v(dev.terminals[1]), node_v(dev.terminals[2]));
    return e.ids;
  }

 private:
  void stamp_conductance(int a, int b, double g) {
    if (a > 0) jac_.at(static_cast<size_t>(a - 1), static_cast<size_t>(a - 1)) += g;
    if (b > 0) jac_.at(static_cast<size_t>(b - 1), static_cast<size_t>(b - 1)) += g;
    if (a > 0 && b > 0) {
      jac_.at(static_cast<size_t>(a - 1), static_cast<size_t>(b - 1)) -= g;
      jac_.at(static_cast<size_t>(b - 1), static_cast<size_t>(a - 1)) -= g;
    }
  }

  void add_current(int node, double i) {
    if (node > 0) f_[static_cast<size_t>(node - 1)] += i;
    imax_[static_cast<size_t>(node)] = std::max(imax_[static_cast<size_t>(node)], std::fabs(i));
  }

  void add_jacobian(int row_node, int col_node, double didv) {
    if (row_node > 0 && col_node > 0)
      jac_.at(static_cast<size_t>(row_node - 1), static_cast<size_t>(col_node - 1)) += didv;
  }

  void assemble(double t, double transient_dt, double source_scale) {
    jac_.clear();
    std::fill(f_.begin(), f_.end(), 0.0);
    std::fill(imax_.begin(), imax_.end(), 0.0);

    // gmin from every node to ground keeps the matrix non-singular.
    for (int node = 1; node < nodes_; ++node) {
      add_current(node, cfg_.gmin * node_v(node));
      add_jacobian(node, node, cfg_.gmin);
    }

    int branch = 0;
    for (const auto& dev : n_.devices()) {
      switch (dev.kind) {
        case DeviceKind::Resistor: {
          const int a = dev.terminals[0], b = dev.terminals[1];
          const double g = 1.0 / dev.value;
          const double i = g * (node_v(a) - node_v(b));
          add_current(a, i);
          add_current(b, -i);
          stamp_conductance(a, b, g);
          break;
        }
        case DeviceKind::Capacitor:
          break;  // handled by the shared companion pass below
        case DeviceKind::VoltageSource: {
          const int a = dev.terminals[0], b = dev.terminals[1];
          const size_t row = static_cast<size_t>(nodes_ - 1 + branch);
          const double ib = x_[row];
          // Branch current is delivered out of the + terminal.
          add_current(a, -ib);
          add_current(b, ib);
          if (a > 0) jac_.at(static_cast<size_t>(a - 1), row) -= 1.0;
          if (b > 0) jac_.at(static_cast<size_t>(b - 1), row) += 1.0;
          const double target = source_scale * source_value(dev.source, t);
          f_[row] = node_v(a) - node_v(b) - target;
          if (a > 0) jac_.at(row, static_cast<size_t>(a - 1)) += 1.0;
          if (b > 0) jac_.at(row, static_cast<size_t>(b - 1)) -= 1.0;
          ++branch;
          break;
        }
        case DeviceKind::Mosfet: {
          const ModelCard& card = n_.card_for(dev);
          const int d = dev.terminals[0], g = dev.terminals[1], s = dev.terminals[2];
          DeviceEval e =
              mosfet_stamp(card, dev.geom.w, dev.geom.l, node_v(d), node_v(g), node_v(s));
          add_current(d, e.ids);
          add_current(s, -e.ids);
          add_jacobian(d, d, e.di_dvd);
          add_jacobian(d, g, e.di_dvg);
          add_jacobian(d, s, e.di_dvs);
          add_jacobian(s, d, -e.di_dvd);
          add_jacobian(s, g, -e.di_dvg);
          add_jacobian(s, s, -e.di_dvs);
          break;
        }
      }
    }

    if (transient_dt > 0.0) {
      for (size_t c = 0; c < caps_.size(); ++c) {
        const auto& cap = caps_[c];
        const double geq = companion_g(cap.farads, transient_dt);
        const double u = node_v(cap.node_a) - node_v(cap.node_b);
        double hist;
        if (cfg_.integrator == Integrator::Trapezoidal) {
          hist = -geq * cap_v_[c] - cap_i_[c];
        } else {
          hist = -geq * cap_v_[c];
        }
        const double i = geq * u + hist;
        add_current(cap.node_a, i);
        add_current(cap.node_b, -i);
        stamp_conductance(cap.node_a, cap.node_b, geq);
      }
    }
  }

  bool residual_converged() const {
    for (int node = 1; node < nodes_; ++node) {
      const double lim = cfg_.abstol + cfg_.reltol * imax_[static_cast<size_t>(node)];
      if (std::fabs(f_[static_cast<size_t>(node - 1)]) > lim) return false;
    }
    for (size_t i = static_cast<size_t>(nodes_ - 1); i < unknowns_; ++i) {
      if (std::fabs(f_[i]) > cfg_.vntol) return false;
    }
    return true;
  }

  std::string unknown_name(size_t idx) const {
    if (idx < static_cast<size_t>(nodes_ - 1)) return "node " + n_.node_name(static_cast<int>(idx) + 1);
    const size_t k = idx - static_cast<size_t>(nodes_ - 1);
    return "branch " + n_.devices()[static_cast<size_t>(vsrc_index_[k])].name;
  }

  std::string worst_node_name() const {
    size_t worst = 0;
    double worst_v = -1.0;
    for (size_t i = 0; i < static_cast<size_t>(nodes_ - 1); ++i) {
      if (std::fabs(f_[i]) > worst_v) {
        worst_v = std::fabs(f_[i]);
        worst = i;
      }
    }
    return n_.node_name(static_cast<int>(worst) + 1);
  }

  const Netlist& n_;
  SimConfig cfg_;
  int nodes_ = 0;
  size_t unknowns_ = 0;
  std::vector<int> vsrc_index_;
  std::vector<int> mos_index_;
  std::vector<CapElement> caps_;
  std::vector<double> x_;
  DenseMatrix jac_{0};
  std::vector<double> f_;
  std::vector<double> imax_;
  std::vector<double> cap_v_;
  std::vector<double> cap_i_;
};

}  // namespace detail

// DC operating point. An optional preload seeds the Newton iteration so
// bistable circuits converge to the intended state; source stepping is the
// fallback when the plain iteration fails.
inline Solution dc_operating_point(const Netlist& n, const SimConfig& cfg = {},
                                   const std::map<std::string, double>* preload = nullptr,
                                   double t = 0.0) {
  detail::MnaSystem sys(n, cfg);
  sys.solve_dc(t, preload);
  return sys.solution();
}

struct SweepResult {
  std::vector<double> inputs;
  std::vector<std::string> node_names;            // column order, ground excluded
  std::vector<std::vector<double>> node_voltages; // [column][point]

  const std::vector<double>& column(const std::string& node) const {
    for (size_t i = 0; i < node_names.size(); ++i)
      if (node_names[i] == node) return node_voltages[i];
    throw SimError(SimErrorKind::UnknownSignal, "node " + node);
  }
};

// DC sweep of a named source with continuation (each solution seeds the next
// point). Results are independent of direction for single-solution circuits.
inline SweepResult dc_sweep(const Netlist& n, const std::string& source_name, double start,
                            double stop, double step, const SimConfig& cfg = {},
                            const std::map<std::string, double>* preload = nullptr) {
  if (step == 0.0 || (stop - start) * step < 0.0)
    throw SimError(SimErrorKind::InvalidSweep, "step must be nonzero and directed toward stop");
  const DeviceInstance* src = n.find_device(source_name);
  if (!src || src->kind != DeviceKind::VoltageSource)
    throw SimError(SimErrorKind::UnknownSource, source_name);

  Netlist local = n;  // sweeping mutates a private copy
  DeviceInstance* dev = local.find_device(source_name);

  SweepResult out;
  for (int i = 1; i < local.node_count(); ++i) out.node_names.push_back(local.node_name(i));
  out.node_voltages.resize(out.node_names.size());

  const int npts = static_cast<int>(std::floor((stop - start) / step + 0.5)) + 1;
  detail::MnaSystem sys(local, cfg);
  bool first = true;
  for (int k = 0; k < npts; ++k) {
    const double x = start + step * k;
    dev->source = DcSpec{x};
    try {
      if (first) {
        sys.solve_dc(0.0, preload);
        first = false;
      } else {
        sys.solve(0.0, 0.0, 1.0);  // continuation from the previous point
      }
    } catch (const SimError& e) {
      if (e.kind() == SimErrorKind::NonConvergence) {
        throw SimError(SimErrorKind::NonConvergence,
                       "sweep value " + format_shortest(x) + ": " + e.what());
      }
      throw;
    }
    out.inputs.push_back(x);
    for (int node = 1; node < local.node_count(); ++node)
      out.node_voltages[static_cast<size_t>(node - 1)].push_back(sys.node_v(node));
  }
  return out;
}

// Fixed-step transient analysis. If no initial solution is given, the DC
// operating point at t=0 (with sources at their t=0 values) is used.
inline Waveform transient(const Netlist& n, const SimConfig& cfg, double dt, double tstop,
                          const Solution* initial = nullptr,
                          const std::map<std::string, double>* preload = nullptr) {
  if (!(dt > 0.0) || tstop < dt)
    throw SimError(SimErrorKind::InvalidSweep, "transient requires dt > 0 and tstop >= dt");

  detail::MnaSystem sys(n, cfg);

  std::vector<std::string> names;
  for (int i = 1; i < n.node_count(); ++i) names.push_back("v(" + n.node_name(i) + ")");
  for (int di : sys.vsource_devices()) names.push_back("i(" + n.devices()[static_cast<size_t>(di)].name + ")");
  for (int di : sys.mosfet_devices()) names.push_back("id(" + n.devices()[static_cast<size_t>(di)].name + ")");

  Waveform w(0.0, dt, names);

  if (initial) {
    sys.set_state(*initial);
  } else {
    sys.solve_dc(0.0, preload);
  }
  sys.init_cap_state();

  auto record = [&]() {
    std::vector<double> row;
    row.reserve(names.size());
    for (int i = 1; i < n.node_count(); ++i) row.push_back(sys.node_v(i));
    for (int k = 0; k < sys.vsource_count(); ++k) row.push_back(sys.branch_i(k));
    for (int di : sys.mosfet_devices())
      row.push_back(sys.device_drain_current(n.devices()[static_cast<size_t>(di)]));
    w.append_row(row);
  };
  record();

  const long steps = std::lround(tstop / dt);
  for (long k = 1; k <= steps; ++k) {
    const double t = dt * double(k);
    try {
      sys.solve(t, dt, 1.0);
    } catch (const SimError& e) {
      if (e.kind() == SimErrorKind::NonConvergence)
        throw SimError(SimErrorKind::NonConvergence,
                       "transient step at t=" + format_shortest(t) + ": " + e.what());
      throw;
    }
    sys.advance_cap_state(dt);
    record();
  }
  return w;
}

}  // namespace spicelab
