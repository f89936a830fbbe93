#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spicelab/engine.hpp"
#include "spicelab/errors.hpp"
#include "spicelab/sram.hpp"

namespace spicelab::snm {

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

// Sampled transfer curve. VTCs produced by sweeps have strictly increasing
// x; mirrored curves are path-ordered polylines that may contain vertical
// runs, which the geometry below handles explicitly.
struct Curve {
  std::vector<CurvePoint> pts;

  bool empty() const { return pts.empty(); }
  double x_min() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) m = std::min(m, p.x);
    return m;
  }
  double x_max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) m = std::max(m, p.x);
    return m;
  }
};

// Reflection across the x = y diagonal, preserving path order.
inline Curve mirror_curve(const Curve& c) {
  Curve out;
  out.pts.reserve(c.pts.size());
  for (auto it = c.pts.rbegin(); it != c.pts.rend(); ++it) out.pts.push_back({it->y, it->x});
  return out;
}

namespace detail {

// All y values where the polyline crosses the vertical line x = x0.
inline void crossings_at(const Curve& c, double x0, double& ymin, double& ymax, bool& any) {
  any = false;
  ymin = std::numeric_limits<double>::infinity();
  ymax = -std::numeric_limits<double>::infinity();
  auto take = [&](double y) {
    any = true;
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (size_t i = 0; i + 1 < c.pts.size(); ++i) {
    const auto& a = c.pts[i];
    const auto& b = c.pts[i + 1];
    const double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
    if (x0 < lo || x0 > hi) continue;
    if (a.x == b.x) {
      take(std::min(a.y, b.y));
      take(std::max(a.y, b.y));
    } else {
      take(a.y + (b.y - a.y) * (x0 - a.x) / (b.x - a.x));
    }
  }
}

struct SampledPair {
  std::vector<double> x;
  std::vector<double> y1_lo, y1_hi;  // curve 1 band at each grid point
  std::vector<double> y2_lo, y2_hi;  // curve 2 band
};

inline SampledPair resample_common(const Curve& c1, const Curve& c2, double step) {
  const double lo = std::max(c1.x_min(), c2.x_min());
  const double hi = std::min(c1.x_max(), c2.x_max());
  SampledPair s;
  if (!(hi > lo)) return s;
  const int n = std::max(2, static_cast<int>(std::round((hi - lo) / step)) + 1);
  double prev1 = 0.0, prev2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(n - 1);
    double a_lo, a_hi, b_lo, b_hi;
    bool any;
    crossings_at(c1, x, a_lo, a_hi, any);
    if (!any) a_lo = a_hi = prev1;
    crossings_at(c2, x, b_lo, b_hi, any);
    if (!any) b_lo = b_hi = prev2;
    s.x.push_back(x);
    s.y1_lo.push_back(a_lo);
    s.y1_hi.push_back(a_hi);
    s.y2_lo.push_back(b_lo);
    s.y2_hi.push_back(b_hi);
    prev1 = 0.5 * (a_lo + a_hi);
    prev2 = 0.5 * (b_lo + b_hi);
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classic noise margins from unity-gain points of a single VTC.

struct NoiseMargins {
  double v_oh = 0.0, v_ol = 0.0, v_ih = 0.0, v_il = 0.0;
  double nm_h = 0.0, nm_l = 0.0;
};

// Locates |dy/dx| = 1 by centered finite differences with linear
// interpolation between samples. v_il is the first unity-gain input,
// v_ih the last; margins follow NM_H = V_OH - V_IH, NM_L = V_IL - V_OL.
inline NoiseMargins noise_margins(const Curve& c) {
  const auto& p = c.pts;
  if (p.size() < 3) throw SimError(SimErrorKind::NoUnityGainPoint, "curve too short");

  auto y_at = [&](double x) {
    if (x <= p.front().x) return p.front().y;
    if (x >= p.back().x) return p.back().y;
    for (size_t i = 1; i < p.size(); ++i) {
      if (x <= p[i].x) {
        const double f = (x - p[i - 1].x) / (p[i].x - p[i - 1].x);
        return p[i - 1].y + (p[i].y - p[i - 1].y) * f;
      }
    }
    return p.back().y;
  };

  std::vector<double> slope(p.size(), 0.0);
  for (size_t i = 0; i < p.size(); ++i) {
    const size_t a = i == 0 ? 0 : i - 1;
    const size_t b = i + 1 == p.size() ? i : i + 1;
    slope[i] = (p[b].y - p[a].y) / (p[b].x - p[a].x);
  }

  // gain magnitude crossings of 1
  std::vector<double> xs;
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    const double g0 = std::fabs(slope[i]) - 1.0;
    const double g1 = std::fabs(slope[i + 1]) - 1.0;
    if ((g0 <= 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 <= 0.0)) {
      const double f = (g0 == g1) ? 0.0 : -g0 / (g1 - g0);
      xs.push_back(p[i].x + (p[i + 1].x - p[i].x) * f);
    }
  }
  if (xs.empty()) {
    double max_gain = 0.0;
    for (double s : slope) max_gain = std::max(max_gain, std::fabs(s));
    if (max_gain <= 1.0 + 1e-9) {
      // unity gain (or less) everywhere: zero margins by convention
      NoiseMargins nm;
      nm.v_il = nm.v_ih = 0.5 * (p.front().x + p.back().x);
      nm.v_oh = nm.v_ol = y_at(nm.v_il);
      nm.nm_h = nm.nm_l = 0.0;
      return nm;
    }
    throw SimError(SimErrorKind::NoUnityGainPoint, "no unity-gain crossing on sampled curve");
  }

  NoiseMargins nm;
  nm.v_il = xs.front();
  nm.v_ih = xs.back();
  nm.v_oh = y_at(nm.v_il);
  nm.v_ol = y_at(nm.v_ih);
  nm.nm_h = nm.v_oh - nm.v_ih;
  nm.nm_l = nm.v_il - nm.v_ol;
  return nm;
}

// ---------------------------------------------------------------------------
// Maximum embedded square between butterfly curves.

struct SquareAnchor {
  double x0 = 0.0, y0 = 0.0;  // lower-left corner
  double side = 0.0;
};

struct SnmResult {
  Curve curve_fwd;
  Curve curve_mir;
  double snm_lobe_high = 0.0;
  double snm_lobe_low = 0.0;
  double snm = 0.0;
  SquareAnchor square_high;
  SquareAnchor square_low;
  bool degenerate = false;
  std::string diagnostic;
  double supply_level = 0.0;
};

// Rotate-by-45-degrees formulation: in u = (x+y)/sqrt(2), v = (y-x)/sqrt(2)
// coordinates the embedded square side equals the vertical curve separation
// divided by sqrt(2). Equivalently, scanning 45-degree chords between the
// lobe's lower and upper boundaries: a chord of x-extent s anchors an
// axis-aligned s-by-s square that fits between monotone curves.
inline SnmResult max_square_snm(const Curve& c1, const Curve& c2_mirrored, double grid = 1e-3) {
  SnmResult res;
  res.curve_fwd = c1;
  res.curve_mir = c2_mirrored;

  detail::SampledPair s = detail::resample_common(c1, c2_mirrored, grid);
  const size_t n = s.x.size();
  if (n < 3) {
    res.degenerate = true;
    res.diagnostic = "curves share no x-range";
    return res;
  }

  // Lobe delimitation: sign regions of the curve separation, ignoring
  // regions that never separate beyond twice the grid.
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i)
    d[i] = 0.5 * (s.y1_lo[i] + s.y1_hi[i]) - 0.5 * (s.y2_lo[i] + s.y2_hi[i]);

  struct Lobe {
    size_t a = 0, b = 0;
    int sign = 0;
    double peak = 0.0;
  };
  std::vector<Lobe> lobes;
  size_t start = 0;
  int sign = d[0] >= 0.0 ? 1 : -1;
  double peak = 0.0;
  for (size_t i = 0; i <= n; ++i) {
    const int si = (i < n) ? (d[i] >= 0.0 ? 1 : -1) : 0;
    if (i == n || si != sign) {
      lobes.push_back({start, i - 1, sign, peak});
      if (i == n) break;
      start = i;
      sign = si;
      peak = 0.0;
    }
    peak = std::max(peak, std::fabs(d[i]));
  }
  const double noise_floor = 2.0 * grid;
  std::erase_if(lobes, [&](const Lobe& l) { return l.peak < noise_floor || l.b <= l.a + 1; });
  if (lobes.size() < 2) {
    res.degenerate = true;
    res.diagnostic = "fewer than two lobes between the curves";
    return res;
  }

  auto lobe_square = [&](const Lobe& l) {
    // conservative band selection: the upper boundary uses the band minimum,
    // the lower boundary the band maximum
    std::vector<double> upper(l.b - l.a + 1), lower(l.b - l.a + 1);
    for (size_t i = l.a; i <= l.b; ++i) {
      const size_t k = i - l.a;
      if (l.sign > 0) {
        upper[k] = s.y1_lo[i];
        lower[k] = s.y2_hi[i];
      } else {
        upper[k] = s.y2_lo[i];
        lower[k] = s.y1_hi[i];
      }
    }
    SquareAnchor best;
    const size_t m = upper.size();
    for (size_t i = 0; i < m; ++i) {
      const double y0 = lower[i];
      // walk the 45-degree chord from (x[i], y0) until it meets the upper
      // boundary; the x-extent of the chord is the square side
      for (size_t j = i; j < m; ++j) {
        const double line = y0 + (s.x[l.a + j] - s.x[l.a + i]);
        if (upper[j] <= line) {
          double side;
          if (j == i) {
            side = 0.0;
          } else {
            const double g0 = upper[j - 1] - (y0 + (s.x[l.a + j - 1] - s.x[l.a + i]));
            const double g1 = upper[j] - line;
            const double f = (g0 == g1) ? 0.0 : g0 / (g0 - g1);
            side = (s.x[l.a + j - 1] - s.x[l.a + i]) + f * (s.x[l.a + j] - s.x[l.a + j - 1]);
          }
          if (side > best.side) best = {s.x[l.a + i], y0, side};
          break;
        }
        if (j + 1 == m) {
          const double side = s.x[l.a + j] - s.x[l.a + i];
          if (upper[j] > line && side > best.side) best = {s.x[l.a + i], y0, side};
        }
      }
    }
    return best;
  };

  // The butterfly lobes are the two enclosed regions admitting the largest
  // squares; smaller corner wedges (open-ended curves) are ignored.
  std::vector<SquareAnchor> squares;
  for (const auto& l : lobes) squares.push_back(lobe_square(l));
  std::sort(squares.begin(), squares.end(),
            [](const SquareAnchor& a, const SquareAnchor& b) { return a.side > b.side; });
  const SquareAnchor sq_first = squares[0];
  const SquareAnchor sq_second = squares[1];

  // classify: the lobe above the x = y diagonal is the "high" lobe
  auto square_is_high = [](const SquareAnchor& sq) {
    return sq.y0 + sq.side / 2.0 > sq.x0 + sq.side / 2.0;
  };
  if (square_is_high(sq_first)) {
    res.square_high = sq_first;
    res.square_low = sq_second;
  } else {
    res.square_high = sq_second;
    res.square_low = sq_first;
  }
  res.snm_lobe_high = res.square_high.side;
  res.snm_lobe_low = res.square_low.side;
  res.snm = std::min(res.snm_lobe_high, res.snm_lobe_low);
  if (res.snm <= 0.0) {
    res.degenerate = true;
    res.diagnostic = "zero-area lobe";
    res.snm = 0.0;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Half-cell transfer curves.

enum class SnmMode { Hold, Read };
enum class CellSide { A, B };

// Breaks the cross-coupling loop: the swept source drives the measured
// inverter's input (the noise-insertion point) and the opposite internal
// node is recorded. In READ mode the wordline and both bitlines sit at the
// supply level; in HOLD mode the wordline is grounded.
inline Curve half_cell_vtc(const sram::SramCellParams& p, SnmMode mode, CellSide side,
                           double supply, double step = 5e-3, const SimConfig& cfg = {}) {
  Netlist n;
  n.set_title("sram half cell");
  n.add_model(p.nmos_card);
  n.add_model(p.pmos_card);
  const double L = p.channel_l;
  const std::string nm = p.nmos_card.name, pm = p.pmos_card.name;
  // side A measures the inverter that drives node A (input = node B role)
  n.add_mosfet("MP", "OUT", "IN", "VDD", "VDD", pm, p.load_wl * L, L);
  n.add_mosfet("MN", "OUT", "IN", "0", "0", nm, p.driver_wl * L, L);
  n.add_mosfet("MA", "BL", "WL", "OUT", "0", nm, p.access_wl * L, L);
  (void)side;  // the cell is geometrically symmetric; both sides share sizing
  n.add_vsource("VDDS", "VDD", "0", DcSpec{supply});
  n.add_vsource("VWL", "WL", "0", DcSpec{mode == SnmMode::Read ? supply : 0.0});
  n.add_vsource("VBL", "BL", "0", DcSpec{supply});
  n.add_vsource("VIN", "IN", "0", DcSpec{0.0});

  SweepResult sweep = dc_sweep(n, "VIN", 0.0, supply, step, cfg);
  const auto& out = sweep.column("OUT");
  Curve c;
  c.pts.reserve(sweep.inputs.size());
  for (size_t i = 0; i < sweep.inputs.size(); ++i) c.pts.push_back({sweep.inputs[i], out[i]});
  return c;
}

// Butterfly measurement at a fixed supply level. For the adiabatic arm the
// SNM of the time-varying supply is evaluated at a sampled level
// (conventionally vdd/2), reported alongside the result.
inline SnmResult snm_experiment(const sram::SramCellParams& p, SnmMode mode, double supply_sample,
                                double step = 5e-3, const SimConfig& cfg = {}) {
  Curve c1 = half_cell_vtc(p, mode, CellSide::A, supply_sample, step, cfg);
  Curve c2 = half_cell_vtc(p, mode, CellSide::B, supply_sample, step, cfg);
  SnmResult res = max_square_snm(c1, mirror_curve(c2), std::min(step, 2e-3));
  res.supply_level = supply_sample;
  return res;
}

}  // namespace spicelab::snm
