#include "resalloc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "resalloc/errors.hpp"

namespace resalloc {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == ',')) ++pos;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != ',') ++end;
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Parser {
 public:
  Parser(std::string_view text, std::string_view source) : source_(source) { read(text); }

  ScenarioConfig build();

 private:
  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw Error(ErrorKind::ConfigError, std::string(source_) + ":" + std::to_string(line) + ": " + what);
  }

  void read(std::string_view text);

  bool has(const std::string& key) const { return scalars_.count(key) != 0; }
  const Entry& entry(const std::string& key) const { return scalars_.at(key); }

  double number(std::string_view word, std::size_t line, const std::string& key) const {
    double v = 0.0;
    const auto* first = word.data();
    const auto* last = word.data() + word.size();
    if (!word.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      fail(line, key + ": expected a finite number, got '" + std::string(word) + "'");
    }
    return v;
  }

  std::uint64_t integer(std::string_view word, std::size_t line, const std::string& key) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
      fail(line, key + ": expected a nonnegative integer, got '" + std::string(word) + "'");
    }
    return v;
  }

  void get(const std::string& key, double& out) const {
    if (has(key)) out = number(entry(key).value, entry(key).line, key);
  }
  void get(const std::string& key, std::size_t& out) const {
    if (has(key)) out = static_cast<std::size_t>(integer(entry(key).value, entry(key).line, key));
  }
  void get(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const std::string& v = entry(key).value;
    if (v == "true" || v == "yes" || v == "on" || v == "1") {
      out = true;
    } else if (v == "false" || v == "no" || v == "off" || v == "0") {
      out = false;
    } else {
      fail(entry(key).line, key + ": expected true or false, got '" + v + "'");
    }
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (std::string_view w : words(entry(key).value)) out.push_back(number(w, entry(key).line, key));
    return out;
  }

  std::string_view source_;
  std::map<std::string, Entry> scalars_;  // "section.key"
  std::vector<std::pair<std::optional<double>, std::vector<Entry>>> segments_;
  std::size_t first_segment_line_ = 0;
  std::vector<Entry> agents_;
};

const std::set<std::string> kScalarKeys = {
    "scenario.name", "scenario.seed", "scenario.n", "scenario.dim", "scenario.K",
    "graph.type", "graph.cyclic", "graph.normalize", "graph.weight_low", "graph.weight_high", "graph.attach",
    "graph.snapshots", "graph.segment_length", "graph.keep_probability", "graph.require_disconnected",
    "costs.family", "costs.mode", "costs.floor",
    "costs.b_low", "costs.b_high", "costs.a_low", "costs.a_high", "costs.c_low", "costs.c_high",
    "costs.d_low", "costs.d_high", "costs.p_low", "costs.p_high", "costs.q_low", "costs.q_high",
    "protocol.kind", "protocol.eta1", "protocol.eta2", "protocol.v1", "protocol.v2",
    "integration.h", "integration.t_end", "integration.sample_every", "integration.stop_tol",
    "integration.stop_patience", "integration.init", "integration.init_low", "integration.init_high",
    "integration.x0", "integration.kernel",
    "output.dir",
};

const std::set<std::string> kSections = {"scenario", "graph", "costs", "protocol", "integration", "output"};

void Parser::read(std::string_view text) {
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(section)) fail(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(lineno, "expected 'key = value'");
    if (section.empty()) fail(lineno, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(lineno, "empty key");

    if (section == "graph" && key == "segment") {
      if (segments_.empty()) first_segment_line_ = lineno;
      segments_.push_back({number(value, lineno, "graph.segment"), {}});
      continue;
    }
    if (section == "graph" && key == "edge") {
      if (segments_.empty()) {
        first_segment_line_ = lineno;
        segments_.push_back({std::nullopt, {}});
      }
      segments_.back().second.push_back({value, lineno});
      continue;
    }
    if (section == "costs" && key == "agent") {
      agents_.push_back({value, lineno});
      continue;
    }

    const std::string full = section + "." + key;
    if (!kScalarKeys.count(full)) fail(lineno, "unknown key '" + key + "' in [" + section + "]");
    if (has(full)) fail(lineno, "duplicate key '" + key + "' (first set on line " +
                                    std::to_string(entry(full).line) + ")");
    scalars_[full] = {value, lineno};
  }
}

// Parameter names in the order CostRanges stores them (lead, p2, p3, p4).
std::vector<std::string> param_names(CostFamily family) {
  switch (family) {
    case CostFamily::Quartic: return {"b", "a"};
    case CostFamily::QuadLse: return {"a", "b", "c", "d"};
    case CostFamily::Quadratic: return {"p", "q"};
  }
  return {};
}

ScenarioConfig Parser::build() {
  ScenarioConfig c;

  // [scenario]
  if (has("scenario.name")) c.name = entry("scenario.name").value;
  if (!has("scenario.seed")) {
    throw Error(ErrorKind::ConfigError, std::string(source_) + ": [scenario] seed is required");
  }
  c.seed = integer(entry("scenario.seed").value, entry("scenario.seed").line, "seed");
  get("scenario.n", c.n);
  get("scenario.dim", c.dim);
  if (c.n == 0) {
    throw Error(ErrorKind::ConfigError, std::string(source_) + ": [scenario] n must be given and >= 1");
  }
  if (c.dim == 0) fail(entry("scenario.dim").line, "dim must be >= 1");
  if (has("scenario.K")) c.K = list("scenario.K");
  else c.K.assign(c.dim, 0.0);
  if (c.K.size() != c.dim) {
    fail(entry("scenario.K").line, "K needs " + std::to_string(c.dim) + " value(s), got " + std::to_string(c.K.size()));
  }

  // [graph]
  GraphConfig& g = c.graph;
  if (has("graph.type")) {
    const Entry& e = entry("graph.type");
    if (e.value == "cycle") g.kind = GraphKind::Cycle;
    else if (e.value == "scale-free") g.kind = GraphKind::ScaleFree;
    else if (e.value == "explicit") g.kind = GraphKind::Explicit;
    else fail(e.line, "graph type must be cycle, scale-free or explicit, got '" + e.value + "'");
  }
  get("graph.cyclic", g.cyclic);
  get("graph.normalize", g.normalize);
  get("graph.weight_low", g.weight_lo);
  get("graph.weight_high", g.weight_hi);
  get("graph.attach", g.attach);
  get("graph.snapshots", g.snapshots);
  get("graph.segment_length", g.segment_length);
  get("graph.keep_probability", g.keep_probability);
  get("graph.require_disconnected", g.require_disconnected);
  if (g.weight_hi < g.weight_lo) fail(entry("graph.weight_high").line, "weight_high < weight_low");
  if (g.weight_lo < 0.0) fail(entry("graph.weight_low").line, "weights must be nonnegative");
  if (g.kind == GraphKind::Explicit) {
    if (segments_.empty()) {
      throw Error(ErrorKind::ConfigError, std::string(source_) + ": explicit graph needs at least one edge");
    }
    for (const auto& [duration, edges] : segments_) {
      ExplicitSegment seg;
      seg.duration = duration.value_or(1.0);
      for (const Entry& e : edges) {
        const auto w = words(e.value);
        if (w.size() != 3) fail(e.line, "edge needs 'i j w'");
        const std::size_t i = integer(w[0], e.line, "edge");
        const std::size_t j = integer(w[1], e.line, "edge");
        const double weight = number(w[2], e.line, "edge");
        if (i >= c.n || j >= c.n) fail(e.line, "edge endpoint out of range (n = " + std::to_string(c.n) + ")");
        if (i == j) fail(e.line, "self loop on agent " + std::to_string(i));
        if (weight < 0.0) fail(e.line, "NegativeWeight: edge weight must be >= 0");
        seg.edges.push_back({i, j, weight});
      }
      g.segments.push_back(std::move(seg));
    }
  } else if (!segments_.empty()) {
    fail(first_segment_line_, "segment/edge lines require type = explicit");
  }

  // [costs]
  CostConfig& cc = c.costs;
  if (has("costs.family")) {
    const Entry& e = entry("costs.family");
    const auto f = parse_cost_family(e.value);
    if (!f) fail(e.line, "cost family must be quartic, quadlse or quadratic, got '" + e.value + "'");
    cc.family = *f;
  }
  cc.ranges = CostRanges::defaults(cc.family);
  if (has("costs.mode")) {
    const Entry& e = entry("costs.mode");
    if (e.value == "random") cc.explicit_params = false;
    else if (e.value == "explicit") cc.explicit_params = true;
    else fail(e.line, "cost mode must be random or explicit, got '" + e.value + "'");
  }
  get("costs.floor", cc.ranges.floor);
  const auto names = param_names(cc.family);
  for (const std::string p : {"a", "b", "c", "d", "p", "q"}) {
    if (std::find(names.begin(), names.end(), p) != names.end()) continue;
    for (const char* side : {"_low", "_high"}) {
      const std::string key = "costs." + p + side;
      if (has(key)) {
        fail(entry(key).line, "'" + p + side + "' is not a parameter of the " +
                                   std::string(family_name(cc.family)) + " family");
      }
    }
  }
  double* slots[4][2] = {{&cc.ranges.lead_lo, &cc.ranges.lead_hi},
                         {&cc.ranges.p2_lo, &cc.ranges.p2_hi},
                         {&cc.ranges.p3_lo, &cc.ranges.p3_hi},
                         {&cc.ranges.p4_lo, &cc.ranges.p4_hi}};
  for (std::size_t k = 0; k < names.size(); ++k) {
    get("costs." + names[k] + "_low", *slots[k][0]);
    get("costs." + names[k] + "_high", *slots[k][1]);
    if (*slots[k][1] < *slots[k][0]) {
      const std::string key = "costs." + names[k] + (has("costs." + names[k] + "_high") ? "_high" : "_low");
      fail(entry(key).line, names[k] + "_high < " + names[k] + "_low");
    }
  }
  if (cc.explicit_params) {
    if (agents_.size() != c.n * c.dim) {
      throw Error(ErrorKind::ConfigError, std::string(source_) + ": explicit costs need n * dim = " +
                                              std::to_string(c.n * c.dim) + " agent lines, got " +
                                              std::to_string(agents_.size()));
    }
    for (const Entry& e : agents_) {
      const auto w = words(e.value);
      if (w.size() != names.size()) {
        fail(e.line, std::string(family_name(cc.family)) + " agent needs " + std::to_string(names.size()) +
                         " parameters");
      }
      std::vector<double> p;
      for (std::string_view x : w) p.push_back(number(x, e.line, "agent"));
      CostFunction f;
      switch (cc.family) {
        case CostFamily::Quartic: f = Quartic{p[0], p[1]}; break;
        case CostFamily::QuadLse: f = QuadLse{p[0], p[1], p[2], p[3]}; break;
        case CostFamily::Quadratic: f = Quadratic{p[0], p[1]}; break;
      }
      try {
        check_strictly_convex(f);
      } catch (const Error& err) {
        fail(e.line, err.detail());
      }
      cc.costs.push_back(f);
    }
  } else if (!agents_.empty()) {
    fail(agents_.front().line, "agent lines require mode = explicit");
  }

  // [protocol]
  ProtocolSpec& s = c.protocol;
  if (has("protocol.kind")) {
    const Entry& e = entry("protocol.kind");
    const auto k = parse_protocol_kind(e.value);
    if (!k) fail(e.line, "protocol kind must be linear, sign-power, combined or combined-vector");
    s.kind = *k;
  }
  // Baselines default to a single gain.
  if (s.kind == ProtocolKind::Linear) s.v1 = s.v2 = 1.0;
  if (s.kind == ProtocolKind::SignPower) s.v2 = 1.0;
  if (s.kind == ProtocolKind::Linear || s.kind == ProtocolKind::SignPower) s.eta2 = 0.0;
  get("protocol.eta1", s.eta1);
  get("protocol.eta2", s.eta2);
  get("protocol.v1", s.v1);
  get("protocol.v2", s.v2);
  s.dim = c.dim;

  // [integration]
  IntegrationConfig& in = c.integration;
  get("integration.h", in.h);
  get("integration.t_end", in.t_end);
  get("integration.sample_every", in.sample_every);
  get("integration.stop_tol", in.stop_tol);
  get("integration.stop_patience", in.stop_patience);
  get("integration.init_low", in.init_lo);
  get("integration.init_high", in.init_hi);
  if (has("integration.h") && !(in.h > 0.0)) fail(entry("integration.h").line, "h must be > 0");
  if (has("integration.t_end") && !(in.t_end > 0.0)) fail(entry("integration.t_end").line, "t_end must be > 0");
  if (has("integration.sample_every") && in.sample_every == 0) {
    fail(entry("integration.sample_every").line, "sample_every must be >= 1");
  }
  if (has("integration.init")) {
    const Entry& e = entry("integration.init");
    if (e.value == "uniform") in.init = InitPolicy::Uniform;
    else if (e.value == "random") in.init = InitPolicy::Random;
    else if (e.value == "explicit") in.init = InitPolicy::Explicit;
    else fail(e.line, "init must be uniform, random or explicit, got '" + e.value + "'");
  }
  if (has("integration.x0")) {
    if (in.init != InitPolicy::Explicit) fail(entry("integration.x0").line, "x0 requires init = explicit");
    in.x0 = list("integration.x0");
    if (in.x0.size() != c.n * c.dim) {
      fail(entry("integration.x0").line, "x0 needs n * dim = " + std::to_string(c.n * c.dim) + " values, got " +
                                             std::to_string(in.x0.size()));
    }
  } else if (in.init == InitPolicy::Explicit) {
    fail(entry("integration.init").line, "init = explicit needs an x0 line");
  }
  if (has("integration.kernel")) {
    const Entry& e = entry("integration.kernel");
    if (e.value == "serial") in.kernel = Kernel::Serial;
    else if (e.value == "parallel") in.kernel = Kernel::Parallel;
    else fail(e.line, "kernel must be serial or parallel, got '" + e.value + "'");
  }

  if (has("output.dir")) c.output_dir = entry("output.dir").value;
  return c;
}

}  // namespace

std::optional<ProtocolKind> parse_protocol_kind(std::string_view word) {
  if (word == "linear") return ProtocolKind::Linear;
  if (word == "sign-power" || word == "signpower") return ProtocolKind::SignPower;
  if (word == "combined") return ProtocolKind::Combined;
  if (word == "combined-vector") return ProtocolKind::CombinedVector;
  return std::nullopt;
}

std::optional<CostFamily> parse_cost_family(std::string_view word) {
  if (word == "quartic") return CostFamily::Quartic;
  if (word == "quadlse") return CostFamily::QuadLse;
  if (word == "quadratic") return CostFamily::Quadratic;
  return std::nullopt;
}

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  return Parser(text, source).build();
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace resalloc
