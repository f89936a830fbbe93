#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spicelab/errors.hpp"

namespace spicelab {

enum class MosKind { Nmos, Pmos };

// Level-1 (square-law) card with channel-length modulation, an optional
// exponential subthreshold term and constant per-area gate capacitances.
// vt0 is stored as a magnitude for both polarities.
struct ModelCard {
  std::string name;
  MosKind kind = MosKind::Nmos;
  double vt0 = 0.45;          // V
  double kp = 170e-6;         // A/V^2
  double lambda = 0.0;        // 1/V
  double cgs_per_area = 0.0;  // F/m^2
  double cgd_per_area = 0.0;  // F/m^2
  double leak_i0 = 0.0;       // A per unit W/L at vgs = vt0
  double leak_n = 1.5;        // subthreshold slope factor
  double temp_vt = 0.02585;   // thermal voltage, V

  bool operator==(const ModelCard&) const = default;
};

// ---------------------------------------------------------------------------
// Independent source shapes.

struct DcSpec {
  double volts = 0.0;
  bool operator==(const DcSpec&) const = default;
};

struct PwlSpec {
  std::vector<std::pair<double, double>> points;  // (time, volts), strictly increasing times
  bool operator==(const PwlSpec&) const = default;
};

// Periodic trapezoid: after `delay`, each period runs v_start -> v_end over
// `rise`, holds for `hold`, falls back over `fall`, and stays at v_start for
// the remainder of `period`. A negative delay phase-advances the waveform.
struct RampSpec {
  double v_start = 0.0;
  double v_end = 0.0;
  double delay = 0.0;
  double rise = 0.0;
  double hold = 0.0;
  double fall = 0.0;
  double period = 0.0;
  bool operator==(const RampSpec&) const = default;
};

struct SineSpec {
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
  double delay = 0.0;
  bool operator==(const SineSpec&) const = default;
};

using SourceSpec = std::variant<DcSpec, PwlSpec, RampSpec, SineSpec>;

inline double source_value(const SourceSpec& spec, double t) {
  if (const auto* dc = std::get_if<DcSpec>(&spec)) return dc->volts;
  if (const auto* pwl = std::get_if<PwlSpec>(&spec)) {
    const auto& pts = pwl->points;
    if (pts.empty()) return 0.0;
    if (t <= pts.front().first) return pts.front().second;
    if (t >= pts.back().first) return pts.back().second;
    for (size_t i = 1; i < pts.size(); ++i) {
      if (t <= pts[i].first) {
        const double t0 = pts[i - 1].first, v0 = pts[i - 1].second;
        const double t1 = pts[i].first, v1 = pts[i].second;
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
      }
    }
    return pts.back().second;
  }
  if (const auto* r = std::get_if<RampSpec>(&spec)) {
    double local = t - r->delay;
    if (r->period > 0.0) {
      local = std::fmod(local, r->period);
      if (local < 0.0) local += r->period;
    } else if (local < 0.0) {
      return r->v_start;
    }
    if (local < r->rise) return r->v_start + (r->v_end - r->v_start) * local / r->rise;
    local -= r->rise;
    if (local < r->hold) return r->v_end;
    local -= r->hold;
    if (local < r->fall) return r->v_end + (r->v_start - r->v_end) * local / r->fall;
    return r->v_start;
  }
  const auto& s = std::get<SineSpec>(spec);
  if (t < s.delay) return s.offset;
  return s.offset + s.amplitude * std::sin(2.0 * M_PI * s.frequency * (t - s.delay));
}

// ---------------------------------------------------------------------------
// MOSFET evaluation.

namespace detail {

struct NormEval {
  double i = 0.0;   // drain current, source-referenced frame, vds >= 0
  double gg = 0.0;  // dI/dvgs
  double gd = 0.0;  // dI/dvds
};

// Square-law regions for an NMOS-normalized device with vds >= 0.
inline NormEval mos_normalized(const ModelCard& m, double wl, double vgs, double vds) {
  NormEval e;
  const double vov = vgs - m.vt0;
  if (vov <= 0.0) {
    if (m.leak_i0 > 0.0) {
      const double nvt = m.leak_n * m.temp_vt;
      const double pre = m.leak_i0 * wl * std::exp(vov / nvt);
      const double drain_fac = 1.0 - std::exp(-vds / m.temp_vt);
      e.i = pre * drain_fac;
      e.gg = e.i / nvt;
      e.gd = pre * std::exp(-vds / m.temp_vt) / m.temp_vt;
    }
    return e;
  }
  const double k = m.kp * wl;
  if (vds < vov) {
    const double core = vov * vds - 0.5 * vds * vds;
    e.i = k * core * (1.0 + m.lambda * vds);
    e.gg = k * vds * (1.0 + m.lambda * vds);
    e.gd = k * ((vov - vds) * (1.0 + m.lambda * vds) + core * m.lambda);
  } else {
    e.i = 0.5 * k * vov * vov * (1.0 + m.lambda * vds);
    e.gg = k * vov * (1.0 + m.lambda * vds);
    e.gd = 0.5 * k * vov * vov * m.lambda;
  }
  return e;
}

// Source/drain swap for vds < 0 (still NMOS-normalized).
inline NormEval mos_bidirectional(const ModelCard& m, double wl, double vgs, double vds) {
  if (vds >= 0.0) return mos_normalized(m, wl, vgs, vds);
  NormEval sw = mos_normalized(m, wl, vgs - vds, -vds);
  NormEval e;
  e.i = -sw.i;
  e.gg = -sw.gg;
  e.gd = sw.gg + sw.gd;  // d(-I(vgs-vds,-vds))/dvds
  return e;
}

}  // namespace detail

// Drain current as a function of gate-source and drain-source voltage.
// PMOS devices are handled by polarity reflection of the NMOS equations;
// vds < 0 is handled by an internal source/drain swap.
inline double mosfet_ids(const ModelCard& m, double w, double l, double vgs, double vds) {
  const double wl = w / l;
  if (m.kind == MosKind::Pmos) return -detail::mos_bidirectional(m, wl, -vgs, -vds).i;
  return detail::mos_bidirectional(m, wl, vgs, vds).i;
}

// Linearization of a MOSFET at a terminal-voltage operating point.
// Currents: drain carries +ids, source -ids; gate and body carry no DC
// current. Partials are with respect to the terminal voltages, so the
// companion linear model is exact at the evaluation point.
struct DeviceEval {
  double ids = 0.0;    // current into drain terminal
  double di_dvd = 0.0;
  double di_dvg = 0.0;
  double di_dvs = 0.0;
  double gm = 0.0;     // dIds/dvgs in the source-referenced frame
  double gds = 0.0;    // dIds/dvds in the source-referenced frame
  double cgs = 0.0;    // F, constant
  double cgd = 0.0;    // F, constant
};

inline DeviceEval mosfet_stamp(const ModelCard& m, double w, double l, double vd, double vg,
                               double vs) {
  const double wl = w / l;
  DeviceEval out;
  out.cgs = m.cgs_per_area * w * l;
  out.cgd = m.cgd_per_area * w * l;

  const double sign = (m.kind == MosKind::Pmos) ? -1.0 : 1.0;
  const double nvd = sign * vd, nvg = sign * vg, nvs = sign * vs;

  double i, dvd, dvg, dvs;
  if (nvd >= nvs) {
    detail::NormEval e = detail::mos_normalized(m, wl, nvg - nvs, nvd - nvs);
    i = e.i;
    dvd = e.gd;
    dvg = e.gg;
    dvs = -e.gg - e.gd;
    out.gm = e.gg;
    out.gds = e.gd;
  } else {
    detail::NormEval e = detail::mos_normalized(m, wl, nvg - nvd, nvs - nvd);
    i = -e.i;
    dvd = e.gg + e.gd;
    dvg = -e.gg;
    dvs = -e.gd;
    out.gm = e.gg;
    out.gds = e.gd;
  }
  // Polarity reflection: I -> -I, terminal partials are unchanged because
  // both the current and the voltages flip sign.
  out.ids = sign * i;
  out.di_dvd = dvd;
  out.di_dvg = dvg;
  out.di_dvs = dvs;
  return out;
}

// Representative 180nm-like cards used by the SRAM laboratory defaults.
// These are documented config defaults, not foundry data.
inline ModelCard default_nmos_card(const std::string& name = "nmos180") {
  ModelCard m;
  m.name = name;
  m.kind = MosKind::Nmos;
  m.vt0 = 0.45;
  m.kp = 170e-6;
  m.lambda = 0.05;
  m.cgs_per_area = 4e-3;
  m.cgd_per_area = 4e-3;
  m.leak_i0 = 1e-12;
  m.leak_n = 1.5;
  return m;
}

inline ModelCard default_pmos_card(const std::string& name = "pmos180") {
  ModelCard m = default_nmos_card(name);
  m.kind = MosKind::Pmos;
  m.kp = 60e-6;
  return m;
}

}  // namespace spicelab
