#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "spicelab/devices.hpp"
#include "spicelab/errors.hpp"
#include "spicelab/units.hpp"

namespace spicelab {

enum class DeviceKind { Resistor, Capacitor, VoltageSource, Mosfet };

struct MosfetGeom {
  std::string model;
  double w = 0.0;  // m
  double l = 0.0;  // m
  bool operator==(const MosfetGeom&) const = default;
};

struct DeviceInstance {
  std::string name;
  DeviceKind kind = DeviceKind::Resistor;
  std::vector<int> terminals;  // node indices; 2 for R/C/V, 4 for M (d g s b)
  double value = 0.0;          // ohms or farads
  SourceSpec source = DcSpec{};
  MosfetGeom geom;
};

struct OpDirective {
  bool operator==(const OpDirective&) const = default;
};
struct DcDirective {
  std::string source;
  double start = 0.0, stop = 0.0, step = 0.0;
  bool operator==(const DcDirective&) const = default;
};
struct TranDirective {
  double dt = 0.0, tstop = 0.0;
  bool operator==(const TranDirective&) const = default;
};
using AnalysisDirective = std::variant<OpDirective, DcDirective, TranDirective>;

// Circuit data model. Node 0 is ground ("0", with "gnd" accepted as an
// alias); nodes are created on first reference and immutable afterwards.
// Values are safe to share across concurrent analyses once built.
class Netlist {
 public:
  Netlist() { add_node_internal("0"); }

  const std::string& title() const { return title_; }
  void set_title(std::string t) { title_ = std::move(t); }

  int node_count() const { return static_cast<int>(node_names_.size()); }
  const std::string& node_name(int i) const { return node_names_.at(static_cast<size_t>(i)); }
  const std::vector<std::string>& node_names() const { return node_names_; }

  int add_node(std::string_view name) { return add_node_internal(name); }

  std::optional<int> find_node(std::string_view name) const {
    auto it = node_index_.find(canon_node(name));
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<DeviceInstance>& devices() const { return devices_; }
  const std::map<std::string, ModelCard>& models() const { return models_; }
  const std::vector<AnalysisDirective>& analyses() const { return analyses_; }
  std::vector<AnalysisDirective>& analyses() { return analyses_; }

  const ModelCard& model(const std::string& name) const {
    auto it = models_.find(to_upper(name));
    if (it == models_.end()) throw SimError(SimErrorKind::UnknownSource, "no model card " + name);
    return it->second;
  }

  void add_model(const ModelCard& card) { models_[to_upper(card.name)] = card; }

  void add_resistor(const std::string& name, std::string_view a, std::string_view b, double ohms) {
    if (!(ohms > 0.0)) throw std::invalid_argument("resistance must be > 0: " + name);
    add_two_terminal(name, DeviceKind::Resistor, a, b).value = ohms;
  }

  void add_capacitor(const std::string& name, std::string_view a, std::string_view b,
                     double farads) {
    if (!(farads > 0.0)) throw std::invalid_argument("capacitance must be > 0: " + name);
    add_two_terminal(name, DeviceKind::Capacitor, a, b).value = farads;
  }

  void add_vsource(const std::string& name, std::string_view pos, std::string_view neg,
                   SourceSpec spec) {
    validate_source(spec);
    add_two_terminal(name, DeviceKind::VoltageSource, pos, neg).source = std::move(spec);
  }

  void add_mosfet(const std::string& name, std::string_view d, std::string_view g,
                  std::string_view s, std::string_view b, const std::string& model, double w,
                  double l) {
    if (!(w > 0.0) || !(l > 0.0)) throw std::invalid_argument("W and L must be > 0: " + name);
    DeviceInstance dev;
    dev.name = name;
    dev.kind = DeviceKind::Mosfet;
    dev.terminals = {add_node_internal(d), add_node_internal(g), add_node_internal(s),
                     add_node_internal(b)};
    dev.geom = MosfetGeom{model, w, l};
    push_device(std::move(dev));
  }

  const DeviceInstance* find_device(std::string_view name) const {
    auto it = device_index_.find(to_upper(name));
    if (it == device_index_.end()) return nullptr;
    return &devices_[it->second];
  }

  DeviceInstance* find_device(std::string_view name) {
    auto it = device_index_.find(to_upper(name));
    if (it == device_index_.end()) return nullptr;
    return &devices_[it->second];
  }

  const ModelCard& card_for(const DeviceInstance& dev) const {
    auto it = models_.find(to_upper(dev.geom.model));
    if (it == models_.end())
      throw SimError(SimErrorKind::UnknownSource, "missing model card " + dev.geom.model);
    return it->second;
  }

  // Structural equality: titles, devices (terminals compared by node name),
  // model cards and analyses. Node numbering is not significant.
  friend bool operator==(const Netlist& a, const Netlist& b) {
    if (a.title_ != b.title_) return false;
    if (a.models_ != b.models_) return false;
    if (a.analyses_ != b.analyses_) return false;
    if (a.devices_.size() != b.devices_.size()) return false;
    for (size_t i = 0; i < a.devices_.size(); ++i) {
      const auto& da = a.devices_[i];
      const auto& db = b.devices_[i];
      if (da.name != db.name || da.kind != db.kind) return false;
      if (da.terminals.size() != db.terminals.size()) return false;
      for (size_t t = 0; t < da.terminals.size(); ++t) {
        if (a.node_name(da.terminals[t]) != b.node_name(db.terminals[t])) return false;
      }
      if (da.value != db.value || da.source != db.source || da.geom != db.geom) return false;
    }
    return true;
  }

  static void validate_source(const SourceSpec& spec) {
    if (const auto* pwl = std::get_if<PwlSpec>(&spec)) {
      for (size_t i = 1; i < pwl->points.size(); ++i) {
        if (!(pwl->points[i].first > pwl->points[i - 1].first))
          throw std::invalid_argument("PWL times must be strictly increasing");
      }
    } else if (const auto* r = std::get_if<RampSpec>(&spec)) {
      if (!(r->rise > 0.0) || !(r->fall > 0.0))
        throw std::invalid_argument("RAMP rise and fall must be > 0");
      if (r->period > 0.0 && r->period < r->rise + r->hold + r->fall)
        throw std::invalid_argument("RAMP period shorter than rise+hold+fall");
    } else if (const auto* s = std::get_if<SineSpec>(&spec)) {
      if (!(s->frequency > 0.0)) throw std::invalid_argument("SINE frequency must be > 0");
    }
  }

 private:
  static std::string canon_node(std::string_view name) {
    std::string up = to_upper(name);
    if (up == "GND") return "0";
    return up;
  }

  int add_node_internal(std::string_view name) {
    std::string key = canon_node(name);
    auto it = node_index_.find(key);
    if (it != node_index_.end()) return it->second;
    int idx = static_cast<int>(node_names_.size());
    node_names_.push_back(key == "0" ? std::string("0") : std::string(name));
    node_index_.emplace(std::move(key), idx);
    return idx;
  }

  DeviceInstance& add_two_terminal(const std::string& name, DeviceKind kind, std::string_view a,
                                   std::string_view b) {
    DeviceInstance dev;
    dev.name = name;
    dev.kind = kind;
    dev.terminals = {add_node_internal(a), add_node_internal(b)};
    push_device(std::move(dev));
    return devices_.back();
  }

  void push_device(DeviceInstance dev) {
    std::string key = to_upper(dev.name);
    if (device_index_.count(key))
      throw std::invalid_argument("duplicate device name " + dev.name);
    device_index_.emplace(std::move(key), devices_.size());
    devices_.push_back(std::move(dev));
  }

  std::string title_;
  std::vector<std::string> node_names_;
  std::unordered_map<std::string, int> node_index_;
  std::vector<DeviceInstance> devices_;
  std::unordered_map<std::string, size_t> device_index_;
  std::map<std::string, ModelCard> models_;  // keyed by uppercase name
  std::vector<AnalysisDirective> analyses_;
};

// ---------------------------------------------------------------------------
// Parser.

namespace detail {

struct Statement {
  int line = 0;  // line number of the first physical line
  std::vector<std::string> tokens;
};

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double need_number(const Statement& st, const std::string& token) {
  auto v = parse_engineering(token);
  if (!v) throw ParseError(ParseErrorCode::MalformedNumber, st.line, "bad number '" + token + "'");
  return *v;
}

// "key=value" split; returns empty key for plain tokens.
inline std::pair<std::string, std::string> split_assignment(const std::string& tok) {
  auto pos = tok.find('=');
  if (pos == std::string::npos) return {"", tok};
  return {to_lower(tok.substr(0, pos)), tok.substr(pos + 1)};
}

}  // namespace detail

// Parses the SPICE-dialect netlist format documented in docs/netlist_format.md.
// First line is the title, '*' starts a comment line, '+' continues the
// previous statement, and the file must finish with '.end'. Every failure is
// a ParseError carrying a line number.
inline Netlist parse_netlist(const std::string& text) {
  using detail::Statement;

  // Split into physical lines, then join continuations.
  std::vector<std::pair<int, std::string>> lines;
  {
    int lineno = 1;
    std::string cur;
    for (size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == '\n') {
        lines.emplace_back(lineno, cur);
        cur.clear();
        ++lineno;
      } else if (text[i] != '\r') {
        cur.push_back(text[i]);
      }
    }
  }
  if (lines.empty()) throw ParseError(ParseErrorCode::MissingEnd, 1, "empty input");

  Netlist n;
  n.set_title(lines.front().second);

  std::vector<Statement> statements;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto& [lineno, raw] = lines[i];
    std::string trimmed = raw;
    // leading whitespace
    size_t start = trimmed.find_first_not_of(" \t");
    trimmed = (start == std::string::npos) ? "" : trimmed.substr(start);
    if (trimmed.empty() || trimmed[0] == '*') continue;
    if (trimmed[0] == '+') {
      if (statements.empty())
        throw ParseError(ParseErrorCode::SyntaxError, lineno, "continuation without a statement");
      auto extra = detail::tokenize(trimmed.substr(1));
      auto& toks = statements.back().tokens;
      toks.insert(toks.end(), extra.begin(), extra.end());
      continue;
    }
    Statement st;
    st.line = lineno;
    st.tokens = detail::tokenize(trimmed);
    if (!st.tokens.empty()) statements.push_back(std::move(st));
  }

  bool saw_end = false;
  struct PendingMos {
    int line;
    std::string model;
  };
  std::vector<PendingMos> pending_models;
  std::vector<std::pair<int, DcDirective>> pending_dc;

  for (const auto& st : statements) {
    const std::string head = to_upper(st.tokens[0]);
    if (saw_end) break;

    auto wrap_invalid = [&](auto&& fn) {
      try {
        fn();
      } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        if (msg.rfind("duplicate device name", 0) == 0)
          throw ParseError(ParseErrorCode::DuplicateDeviceName, st.line, msg);
        throw ParseError(ParseErrorCode::InvalidValue, st.line, msg);
      }
    };

    if (head[0] == '.') {
      if (head == ".END") {
        saw_end = true;
      } else if (head == ".MODEL") {
        if (st.tokens.size() < 3)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, ".model needs name and type");
        ModelCard card;
        card.name = st.tokens[1];
        std::string type = to_upper(st.tokens[2]);
        if (type == "NMOS")
          card.kind = MosKind::Nmos;
        else if (type == "PMOS")
          card.kind = MosKind::Pmos;
        else
          throw ParseError(ParseErrorCode::SyntaxError, st.line, "model type must be NMOS or PMOS");
        for (size_t i = 3; i < st.tokens.size(); ++i) {
          auto [key, val] = detail::split_assignment(st.tokens[i]);
          if (key.empty())
            throw ParseError(ParseErrorCode::SyntaxError, st.line,
                             "expected key=value in .model, got '" + st.tokens[i] + "'");
          double v = detail::need_number(st, val);
          if (key == "vt0") card.vt0 = v;
          else if (key == "kp") card.kp = v;
          else if (key == "lambda") card.lambda = v;
          else if (key == "leak_i0") card.leak_i0 = v;
          else if (key == "leak_n") card.leak_n = v;
          else if (key == "cgs") card.cgs_per_area = v;
          else if (key == "cgd") card.cgd_per_area = v;
          else if (key == "tempvt") card.temp_vt = v;
          else
            throw ParseError(ParseErrorCode::SyntaxError, st.line, "unknown model key '" + key + "'");
        }
        if (!(card.kp > 0.0) || card.lambda < 0.0 || card.leak_i0 < 0.0 || card.leak_n < 1.0 ||
            !(card.vt0 > 0.0))
          throw ParseError(ParseErrorCode::InvalidValue, st.line, "model parameter out of range");
        n.add_model(card);
      } else if (head == ".OP") {
        n.analyses().push_back(OpDirective{});
      } else if (head == ".DC") {
        if (st.tokens.size() != 5)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, ".dc needs source start stop step");
        DcDirective d;
        d.source = st.tokens[1];
        d.start = detail::need_number(st, st.tokens[2]);
        d.stop = detail::need_number(st, st.tokens[3]);
        d.step = detail::need_number(st, st.tokens[4]);
        if (d.step == 0.0 || (d.stop - d.start) * d.step < 0.0)
          throw ParseError(ParseErrorCode::InvalidValue, st.line,
                           ".dc step must be nonzero and directed from start to stop");
        pending_dc.emplace_back(st.line, d);
        n.analyses().push_back(d);
      } else if (head == ".TRAN") {
        if (st.tokens.size() != 3)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, ".tran needs dt tstop");
        TranDirective d;
        d.dt = detail::need_number(st, st.tokens[1]);
        d.tstop = detail::need_number(st, st.tokens[2]);
        if (!(d.dt > 0.0) || d.tstop < d.dt)
          throw ParseError(ParseErrorCode::InvalidValue, st.line, ".tran requires dt > 0, tstop >= dt");
        n.analyses().push_back(d);
      } else {
        throw ParseError(ParseErrorCode::SyntaxError, st.line, "unknown directive " + st.tokens[0]);
      }
      continue;
    }

    const char prefix = static_cast<char>(std::toupper(static_cast<unsigned char>(head[0])));
    const std::string& name = st.tokens[0];
    switch (prefix) {
      case 'R': {
        if (st.tokens.size() != 4)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, "R line: name n+ n- value");
        double v = detail::need_number(st, st.tokens[3]);
        wrap_invalid([&] { n.add_resistor(name, st.tokens[1], st.tokens[2], v); });
        break;
      }
      case 'C': {
        if (st.tokens.size() != 4)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, "C line: name n+ n- value");
        double v = detail::need_number(st, st.tokens[3]);
        wrap_invalid([&] { n.add_capacitor(name, st.tokens[1], st.tokens[2], v); });
        break;
      }
      case 'V': {
        if (st.tokens.size() < 4)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, "V line: name n+ n- spec");
        SourceSpec spec;
        const std::string shape = to_upper(st.tokens[3]);
        size_t arg0 = 4;
        if (shape == "DC") {
          if (st.tokens.size() != 5)
            throw ParseError(ParseErrorCode::SyntaxError, st.line, "DC takes one value");
          spec = DcSpec{detail::need_number(st, st.tokens[4])};
        } else if (shape == "PWL") {
          PwlSpec pwl;
          if ((st.tokens.size() - arg0) < 2 || (st.tokens.size() - arg0) % 2 != 0)
            throw ParseError(ParseErrorCode::SyntaxError, st.line, "PWL needs time/value pairs");
          for (size_t i = arg0; i + 1 < st.tokens.size(); i += 2) {
            pwl.points.emplace_back(detail::need_number(st, st.tokens[i]),
                                    detail::need_number(st, st.tokens[i + 1]));
          }
          spec = std::move(pwl);
        } else if (shape == "RAMP") {
          if (st.tokens.size() - arg0 != 7)
            throw ParseError(ParseErrorCode::SyntaxError, st.line,
                             "RAMP needs v_start v_end delay rise hold fall period");
          RampSpec r;
          r.v_start = detail::need_number(st, st.tokens[arg0 + 0]);
          r.v_end = detail::need_number(st, st.tokens[arg0 + 1]);
          r.delay = detail::need_number(st, st.tokens[arg0 + 2]);
          r.rise = detail::need_number(st, st.tokens[arg0 + 3]);
          r.hold = detail::need_number(st, st.tokens[arg0 + 4]);
          r.fall = detail::need_number(st, st.tokens[arg0 + 5]);
          r.period = detail::need_number(st, st.tokens[arg0 + 6]);
          spec = r;
        } else if (shape == "SIN" || shape == "SINE") {
          if (st.tokens.size() - arg0 != 3 && st.tokens.size() - arg0 != 4)
            throw ParseError(ParseErrorCode::SyntaxError, st.line,
                             "SIN needs offset amplitude frequency [delay]");
          SineSpec s;
          s.offset = detail::need_number(st, st.tokens[arg0 + 0]);
          s.amplitude = detail::need_number(st, st.tokens[arg0 + 1]);
          s.frequency = detail::need_number(st, st.tokens[arg0 + 2]);
          if (st.tokens.size() - arg0 == 4) s.delay = detail::need_number(st, st.tokens[arg0 + 3]);
          spec = s;
        } else {
          // bare value means DC
          if (st.tokens.size() != 4)
            throw ParseError(ParseErrorCode::SyntaxError, st.line, "V line: name n+ n- value");
          spec = DcSpec{detail::need_number(st, st.tokens[3])};
        }
        wrap_invalid([&] { n.add_vsource(name, st.tokens[1], st.tokens[2], std::move(spec)); });
        break;
      }
      case 'M': {
        if (st.tokens.size() != 8)
          throw ParseError(ParseErrorCode::SyntaxError, st.line,
                           "M line: name nd ng ns nb model W=val L=val");
        double w = 0.0, l = 0.0;
        bool got_w = false, got_l = false;
        for (size_t i = 6; i < 8; ++i) {
          auto [key, val] = detail::split_assignment(st.tokens[i]);
          if (key == "w") {
            w = detail::need_number(st, val);
            got_w = true;
          } else if (key == "l") {
            l = detail::need_number(st, val);
            got_l = true;
          } else {
            throw ParseError(ParseErrorCode::SyntaxError, st.line, "expected W= and L=");
          }
        }
        if (!got_w || !got_l)
          throw ParseError(ParseErrorCode::SyntaxError, st.line, "expected both W= and L=");
        wrap_invalid([&] {
          n.add_mosfet(name, st.tokens[1], st.tokens[2], st.tokens[3], st.tokens[4], st.tokens[5],
                       w, l);
        });
        pending_models.push_back({st.line, st.tokens[5]});
        break;
      }
      default:
        throw ParseError(ParseErrorCode::UnknownDevicePrefix, st.line,
                         "unknown device prefix '" + std::string(1, head[0]) + "'");
    }
  }

  if (!saw_end) {
    throw ParseError(ParseErrorCode::MissingEnd, lines.back().first, "missing .end directive");
  }
  // Model cards may appear after the devices that use them.
  for (const auto& pm : pending_models) {
    if (n.models().find(to_upper(pm.model)) == n.models().end())
      throw ParseError(ParseErrorCode::UndefinedModel, pm.line, "model '" + pm.model + "' not defined");
  }
  for (const auto& [line, d] : pending_dc) {
    if (!n.find_device(d.source))
      throw ParseError(ParseErrorCode::SyntaxError, line, ".dc sweeps unknown source " + d.source);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Serializer. parse_netlist(serialize_netlist(n)) is structurally equal to n.

inline std::string serialize_netlist(const Netlist& n) {
  std::ostringstream out;
  out << n.title() << "\n";
  for (const auto& [key, card] : n.models()) {
    out << ".model " << card.name << ' ' << (card.kind == MosKind::Nmos ? "NMOS" : "PMOS")
        << " vt0=" << format_shortest(card.vt0) << " kp=" << format_shortest(card.kp)
        << " lambda=" << format_shortest(card.lambda)
        << " leak_i0=" << format_shortest(card.leak_i0)
        << " leak_n=" << format_shortest(card.leak_n)
        << " cgs=" << format_shortest(card.cgs_per_area)
        << " cgd=" << format_shortest(card.cgd_per_area)
        << " tempvt=" << format_shortest(card.temp_vt) << "\n";
  }
  for (const auto& dev : n.devices()) {
    switch (dev.kind) {
      case DeviceKind::Resistor:
      case DeviceKind::Capacitor:
        out << dev.name << ' ' << n.node_name(dev.terminals[0]) << ' '
            << n.node_name(dev.terminals[1]) << ' ' << format_shortest(dev.value) << "\n";
        break;
      case DeviceKind::VoltageSource: {
        out << dev.name << ' ' << n.node_name(dev.terminals[0]) << ' '
            << n.node_name(dev.terminals[1]) << ' ';
        if (const auto* dc = std::get_if<DcSpec>(&dev.source)) {
          out << "DC " << format_shortest(dc->volts);
        } else if (const auto* pwl = std::get_if<PwlSpec>(&dev.source)) {
          out << "PWL(";
          for (size_t i = 0; i < pwl->points.size(); ++i) {
            out << (i ? " " : "") << format_shortest(pwl->points[i].first) << ' '
                << format_shortest(pwl->points[i].second);
          }
          out << ")";
        } else if (const auto* r = std::get_if<RampSpec>(&dev.source)) {
          out << "RAMP(" << format_shortest(r->v_start) << ' ' << format_shortest(r->v_end) << ' '
              << format_shortest(r->delay) << ' ' << format_shortest(r->rise) << ' '
              << format_shortest(r->hold) << ' ' << format_shortest(r->fall) << ' '
              << format_shortest(r->period) << ")";
        } else {
          const auto& s = std::get<SineSpec>(dev.source);
          out << "SIN(" << format_shortest(s.offset) << ' ' << format_shortest(s.amplitude) << ' '
              << format_shortest(s.frequency) << ' ' << format_shortest(s.delay) << ")";
        }
        out << "\n";
        break;
      }
      case DeviceKind::Mosfet:
        out << dev.name << ' ' << n.node_name(dev.terminals[0]) << ' '
            << n.node_name(dev.terminals[1]) << ' ' << n.node_name(dev.terminals[2]) << ' '
            << n.node_name(dev.terminals[3]) << ' ' << dev.geom.model
            << " W=" << format_shortest(dev.geom.w) << " L=" << format_shortest(dev.geom.l) << "\n";
        break;
    }
  }
  for (const auto& a : n.analyses()) {
    if (std::holds_alternative<OpDirective>(a)) {
      out << ".op\n";
    } else if (const auto* d = std::get_if<DcDirective>(&a)) {
      out << ".dc " << d->source << ' ' << format_shortest(d->start) << ' '
          << format_shortest(d->stop) << ' ' << format_shortest(d->step) << "\n";
    } else {
      const auto& t = std::get<TranDirective>(a);
      out << ".tran " << format_shortest(t.dt) << ' ' << format_shortest(t.tstop) << "\n";
    }
  }
  out << ".end\n";
  return out.str();
}

}  // namespace spicelab
