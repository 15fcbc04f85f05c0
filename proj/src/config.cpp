#include "dnstrip/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "dnstrip/errors.hpp"

namespace dnstrip {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::validate:
      return "validate";
    case ScenarioKind::spectrum:
      return "spectrum";
    case ScenarioKind::sweep:
      return "sweep";
    case ScenarioKind::hardy:
      return "hardy";
    case ScenarioKind::transverse:
      return "transverse";
    case ScenarioKind::appendix:
      return "appendix";
    case ScenarioKind::resolvent:
      return "resolvent";
    case ScenarioKind::embed:
      return "embed";
  }
  return "?";
}

ScenarioKind kind_from_string(const std::string& name) {
  for (ScenarioKind k : {ScenarioKind::validate, ScenarioKind::spectrum, ScenarioKind::sweep, ScenarioKind::hardy,
                         ScenarioKind::transverse, ScenarioKind::appendix, ScenarioKind::resolvent,
                         ScenarioKind::embed}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInput("unknown scenario kind '" + name + "'");
}

namespace {

using Value = std::variant<std::string, double, bool, std::vector<double>>;

struct Parser {
  std::string origin;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput(origin + ":" + std::to_string(line) + ": " + msg);
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  // Removes a trailing comment that is not inside a string.
  static std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && in_string) {
        ++i;
      } else if (s[i] == '"') {
        in_string = !in_string;
      } else if (s[i] == '#' && !in_string) {
        return s.substr(0, i);
      }
    }
    return s;
  }

  double number(const std::string& tok) const {
    std::string t = tok;
    t.erase(std::remove(t.begin(), t.end(), '_'), t.end());
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) fail("invalid number '" + tok + "'");
    if (!std::isfinite(v)) fail("non-finite number '" + tok + "'");
    return v;
  }

  Value value(const std::string& raw) const {
    const std::string v = trim(raw);
    if (v.empty()) fail("missing value");
    if (v.front() == '"') {
      if (v.size() < 2 || v.back() != '"') fail("unterminated string");
      std::string out;
      for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] == '\\') {
          if (i + 2 >= v.size()) fail("bad escape");
          const char c = v[++i];
          if (c == 'n') {
            out += '\n';
          } else if (c == 't') {
            out += '\t';
          } else if (c == '"' || c == '\\') {
            out += c;
          } else {
            fail(std::string("unsupported escape \\") + c);
          }
        } else if (v[i] == '"') {
          fail("unexpected quote inside string");
        } else {
          out += v[i];
        }
      }
      return out;
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '[') {
      if (v.back() != ']') fail("unterminated array");
      std::vector<double> arr;
      const std::string body = trim(v.substr(1, v.size() - 2));
      if (body.empty()) return arr;
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) {
          // a single trailing comma is allowed
          if (ss.eof()) break;
          fail("empty array element");
        }
        arr.push_back(number(t));
      }
      return arr;
    }
    return number(v);
  }
};

struct Scratch {
  ScenarioConfig cfg;
  std::set<std::string> seen;  // "section.key"
  bool has_id = false;
};

double as_number(const Parser& p, const Value& v, const std::string& key) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  p.fail("'" + key + "' must be a number");
}

int as_int(const Parser& p, const Value& v, const std::string& key) {
  const double d = as_number(p, v, key);
  if (d != std::floor(d) || std::abs(d) > 2e9) p.fail("'" + key + "' must be an integer");
  return static_cast<int>(d);
}

std::string as_string(const Parser& p, const Value& v, const std::string& key) {
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  p.fail("'" + key + "' must be a string");
}

bool as_bool(const Parser& p, const Value& v, const std::string& key) {
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  p.fail("'" + key + "' must be true or false");
}

std::vector<double> as_list(const Parser& p, const Value& v, const std::string& key) {
  if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
  if (const double* d = std::get_if<double>(&v)) return {*d};
  p.fail("'" + key + "' must be a list of numbers");
}

void positive(const Parser& p, double x, const std::string& key) {
  if (!(x > 0.0)) p.fail("'" + key + "' must be positive");
}

void set_family_key(const Parser& p, ProfileFamily& f, const std::string& key, const Value& v) {
  if (key == "family") {
    try {
      f.family = family_from_string(as_string(p, v, key));
    } catch (const InvalidInput& e) {
      p.fail(e.what());
    }
  } else if (key == "amplitude") {
    f.amplitude = as_number(p, v, key);
  } else if (key == "width") {
    f.width = as_number(p, v, key);
    positive(p, f.width, key);
  } else if (key == "center") {
    f.center = as_number(p, v, key);
  } else if (key == "radius") {
    f.radius = as_number(p, v, key);
    positive(p, f.radius, key);
  } else if (key == "delta") {
    f.delta = as_number(p, v, key);
  } else {
    p.fail("unknown key '" + key + "'");
  }
}

void set_policy_key(const Parser& p, GridPolicy& g, const std::string& key, const Value& v) {
  if (key == "h_s") {
    g.h_s = as_number(p, v, key);
    positive(p, g.h_s, key);
  } else if (key == "nt_scale") {
    g.nt_scale = as_number(p, v, key);
    positive(p, g.nt_scale, key);
  } else if (key == "nt_min") {
    g.nt_min = as_int(p, v, key);
    if (g.nt_min < 8) p.fail("'nt_min' must be at least 8");
  } else if (key == "nt_max") {
    g.nt_max = as_int(p, v, key);
    if (g.nt_max < 8) p.fail("'nt_max' must be at least 8");
  } else if (key == "discrete_threshold") {
    g.discrete_threshold = as_bool(p, v, key);
  } else {
    p.fail("unknown key '" + key + "'");
  }
}

void set_scenario_key(const Parser& p, Scratch& s, const std::string& key, const Value& v) {
  ScenarioConfig& c = s.cfg;
  if (key == "id") {
    c.id = as_string(p, v, key);
    if (c.id.empty()) p.fail("'id' must not be empty");
    for (char ch : c.id) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
        p.fail("'id' may contain only letters, digits, '_' and '-'");
      }
    }
    s.has_id = true;
  } else if (key == "kind") {
    try {
      c.kind = kind_from_string(as_string(p, v, key));
    } catch (const InvalidInput& e) {
      p.fail(e.what());
    }
  } else if (key == "theorem") {
    static const std::set<std::string> tags = {"T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8", "LA1", "TA2"};
    c.theorem = as_string(p, v, key);
    if (!tags.count(c.theorem)) p.fail("unknown theorem tag '" + c.theorem + "'");
  } else if (key == "epsilon") {
    c.epsilons = as_list(p, v, key);
    if (c.epsilons.empty()) p.fail("'epsilon' must not be empty");
    for (double e : c.epsilons) positive(p, e, key);
  } else if (key == "L") {
    c.grid.half_length = as_number(p, v, key);
    positive(p, c.grid.half_length, key);
  } else if (key == "n_s") {
    c.grid.n_s = as_int(p, v, key);
    if (c.grid.n_s < 8) p.fail("'n_s' must be at least 8");
  } else if (key == "n_t") {
    c.grid.n_t = as_int(p, v, key);
    if (c.grid.n_t < 8) p.fail("'n_t' must be at least 8");
  } else if (key == "tol") {
    c.tol = as_number(p, v, key);
    if (!(c.tol > 0.0 && c.tol < 1e-2)) p.fail("'tol' must lie in (0, 1e-2)");
  } else if (key == "j_max") {
    c.j_max = as_int(p, v, key);
    if (c.j_max < 1 || c.j_max > 4) p.fail("'j_max' must lie in 1..4");
  } else if (key == "kappa") {
    c.kappa = as_number(p, v, key);
    positive(p, c.kappa, key);
  } else if (key == "n_max") {
    c.n_max = as_int(p, v, key);
    if (c.n_max < 1) p.fail("'n_max' must be at least 1");
  } else if (key == "samples") {
    c.samples = as_int(p, v, key);
    if (c.samples < 1) p.fail("'samples' must be at least 1");
  } else if (key == "resolution") {
    c.resolution = as_int(p, v, key);
    if (c.resolution < 16) p.fail("'resolution' must be at least 16");
  } else if (key == "instances") {
    c.instances = as_int(p, v, key);
    if (c.instances < 1) p.fail("'instances' must be at least 1");
  } else if (key == "seed") {
    const int sd = as_int(p, v, key);
    if (sd < 0) p.fail("'seed' must be nonnegative");
    c.seed = static_cast<std::uint64_t>(sd);
  } else if (key == "mu") {
    c.mu = as_list(p, v, key);
    if (c.mu.empty()) p.fail("'mu' must not be empty");
    for (double m : c.mu) positive(p, m, key);
  } else if (key == "expect_discrete") {
    c.expect_discrete = as_bool(p, v, key);
  } else if (key == "output") {
    c.output = as_string(p, v, key);
    if (c.output.find("..") != std::string::npos || (!c.output.empty() && c.output.front() == '/')) {
      p.fail("'output' must be a relative path inside the output directory");
    }
  } else {
    p.fail("unknown key '" + key + "'");
  }
}

bool kind_accepts(ScenarioKind kind, const std::string& tag) {
  switch (kind) {
    case ScenarioKind::validate:
    case ScenarioKind::embed:
      return true;
    case ScenarioKind::spectrum:
      return tag == "T1" || tag == "T2" || tag == "T3";
    case ScenarioKind::sweep:
      return tag == "T1" || tag == "T5" || tag == "T6" || tag == "T8";
    case ScenarioKind::hardy:
      return tag == "T3" || tag == "T4";
    case ScenarioKind::transverse:
      return tag == "T3" || tag == "T4";
    case ScenarioKind::appendix:
      return tag == "LA1" || tag == "TA2";
    case ScenarioKind::resolvent:
      return tag == "T6" || tag == "T7";
  }
  return false;
}

void finish(const Parser& p, Scratch& s, std::vector<ScenarioConfig>& out) {
  ScenarioConfig& c = s.cfg;
  if (!s.has_id) p.fail("scenario is missing 'id'");
  for (const auto& prev : out) {
    if (prev.id == c.id) p.fail("duplicate scenario id '" + c.id + "'");
  }
  if (!kind_accepts(c.kind, c.theorem)) {
    p.fail("theorem tag '" + c.theorem + "' is not valid for kind '" + to_string(c.kind) + "'");
  }
  if (c.policy.nt_min > c.policy.nt_max) p.fail("'nt_min' exceeds 'nt_max'");
  try {
    (void)c.profile();
  } catch (const InvalidInput& e) {
    p.fail(std::string("invalid profile: ") + e.what());
  }
  c.policy.half_length = c.grid.half_length;
  c.policy.tol = c.tol;
  out.push_back(c);
}

}  // namespace

std::vector<ScenarioConfig> parse_config_text(const std::string& text, const std::string& origin) {
  Parser p{origin, 0};
  std::vector<ScenarioConfig> out;
  std::optional<Scratch> cur;
  std::string section;  // "", "scenario", "curvature", "twist", "policy"
  int header_line = 0;
  std::stringstream in(text);
  std::string raw;
  auto close = [&] {
    if (!cur) return;
    const int keep = p.line;
    p.line = header_line;
    finish(p, *cur, out);
    p.line = keep;
    cur.reset();
  };
  while (std::getline(in, raw)) {
    ++p.line;
    const std::string l = Parser::trim(Parser::strip_comment(raw));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l == "[[scenario]]") {
        close();
        cur.emplace();
        cur->cfg.line = p.line;
        header_line = p.line;
        section = "scenario";
        continue;
      }
      if (l.size() < 3 || l.back() != ']' || l[1] == '[') p.fail("malformed table header '" + l + "'");
      const std::string name = Parser::trim(l.substr(1, l.size() - 2));
      if (name != "scenario.curvature" && name != "scenario.twist" && name != "scenario.policy") {
        p.fail("unknown table '" + name + "'");
      }
      if (!cur) p.fail("table '" + name + "' before any [[scenario]]");
      section = name.substr(std::string("scenario.").size());
      if (!cur->seen.insert("[" + section + "]").second) p.fail("duplicate table '" + name + "'");
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = Parser::trim(l.substr(0, eq));
    if (key.empty()) p.fail("missing key");
    for (char ch : key) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) p.fail("invalid key '" + key + "'");
    }
    if (!cur) p.fail("key '" + key + "' outside a [[scenario]] table");
    if (!cur->seen.insert(section + "." + key).second) p.fail("duplicate key '" + key + "'");
    const Value v = p.value(l.substr(eq + 1));
    if (section == "scenario") {
      set_scenario_key(p, *cur, key, v);
    } else if (section == "curvature") {
      set_family_key(p, cur->cfg.curvature, key, v);
    } else if (section == "twist") {
      set_family_key(p, cur->cfg.twist, key, v);
    } else {
      set_policy_key(p, cur->cfg.policy, key, v);
    }
  }
  close();
  if (out.empty()) {
    p.line = std::max(p.line, 1);
    p.fail("no [[scenario]] tables");
  }
  return out;
}

std::vector<ScenarioConfig> parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read configuration '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace dnstrip
