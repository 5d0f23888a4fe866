#include "cli/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli/scenarios.hpp"
#include "conullity/errors.hpp"
#include "conullity/expr.hpp"

namespace conullity::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(where + ": expected a number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ConfigError(where + ": '" + t + "' is not a number");
  return v;
}

long long parse_int(const std::string& text, const std::string& where) {
  const double v = parse_number(text, where);
  const long long n = static_cast<long long>(v);
  if (static_cast<double>(n) != v) throw ConfigError(where + ": expected an integer");
  return n;
}

// splits "name(a, b, c)" into the name and its numeric arguments
bool split_call(const std::string& text, std::string& name, std::vector<double>& args) {
  if (text.empty() || text.back() != ')') return false;
  const std::size_t open = text.find('(');
  if (open == std::string::npos) return false;
  name = trim(text.substr(0, open));
  args.clear();
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  if (!trim(inner).empty()) {
    std::stringstream ss(inner);
    std::string piece;
    while (std::getline(ss, piece, ',')) args.push_back(parse_number(piece, "'" + text + "'"));
  }
  return true;
}

void need_arity(const std::vector<double>& args, std::size_t want, const std::string& text) {
  if (args.size() != want)
    throw ConfigError("'" + text + "': expected " + std::to_string(want) + " arguments, got " +
                      std::to_string(args.size()));
}

// f1, f2, ... -> 1, 2, ...; 0 when the key is not a profile key
int profile_index(const std::string& key) {
  if (key.size() < 2 || key[0] != 'f') return 0;
  for (std::size_t i = 1; i < key.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(key[i]))) return 0;
  const int idx = std::atoi(key.c_str() + 1);
  return idx >= 1 ? idx : 0;
}

Field1 field_for(const std::string& value, const std::string& where) {
  try {
    return make_field1(value);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Field2 eta_for(const std::string& value, const std::string& where) {
  try {
    return make_eta(value);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ModelSpec build_model(const std::map<std::string, std::string>& kv) {
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("[model] is missing '" + key + "'");
    return it->second;
  };

  ModelSpec m;
  m.n = static_cast<int>(parse_int(need("n"), "[model] n"));
  if (m.n < 1 || m.n > 16) throw ConfigError("[model] n: must be in 1..16");
  m.f.resize(static_cast<std::size_t>(m.n));
  for (const auto& [key, value] : kv) {
    const int idx = profile_index(key);
    if (idx == 0) continue;
    if (idx > m.n)
      throw ConfigError("[model] " + key + ": only f1..f" + std::to_string(m.n) +
                        " are allowed when n = " + std::to_string(m.n));
    m.f[static_cast<std::size_t>(idx - 1)] = field_for(value, "[model] " + key);
  }
  for (int i = 1; i <= m.n; ++i)
    if (!m.f[static_cast<std::size_t>(i - 1)])
      throw ConfigError("[model] is missing 'f" + std::to_string(i) + "'");
  m.eta = eta_for(need("eta"), "[model] eta");
  if (kv.count("x_lo")) m.x_domain.lo = parse_number(kv.at("x_lo"), "[model] x_lo");
  if (kv.count("x_hi")) m.x_domain.hi = parse_number(kv.at("x_hi"), "[model] x_hi");
  try {
    validate_spec(m);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[model] rejected: ") + e.what());
  }
  return m;
}

std::vector<Interval> parse_pieces(const std::string& text, const std::string& where) {
  std::vector<Interval> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find('(', pos);
    if (open == std::string::npos) break;
    const std::size_t close = text.find(')', open);
    if (close == std::string::npos) throw ConfigError(where + ": unbalanced parentheses");
    const std::string inner = text.substr(open + 1, close - open - 1);
    const std::size_t comma = inner.find(',');
    if (comma == std::string::npos)
      throw ConfigError(where + ": each piece needs the form (lo, hi)");
    out.push_back({parse_number(inner.substr(0, comma), where),
                   parse_number(inner.substr(comma + 1), where)});
    pos = close + 1;
  }
  if (out.empty()) throw ConfigError(where + ": no (lo, hi) pieces found");
  return out;
}

GlueSpec build_glue(const std::map<std::string, std::string>& kv) {
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("[glue] is missing '" + key + "'");
    return it->second;
  };

  GlueSpec g;
  g.S = parse_pieces(need("pieces"), "[glue] pieces");
  int n = 0;
  for (const auto& [key, value] : kv) n = std::max(n, profile_index(key));
  if (n == 0) throw ConfigError("[glue] is missing 'f1'");
  g.n = n;
  g.f.resize(static_cast<std::size_t>(n));
  for (const auto& [key, value] : kv) {
    const int idx = profile_index(key);
    if (idx > 0) g.f[static_cast<std::size_t>(idx - 1)] = field_for(value, "[glue] " + key);
  }
  for (int i = 1; i <= n; ++i)
    if (!g.f[static_cast<std::size_t>(i - 1)])
      throw ConfigError("[glue] is missing 'f" + std::to_string(i) + "'");
  g.H = field_for(need("H"), "[glue] H");
  g.eta = eta_for(need("eta"), "[glue] eta");
  try {
    validate_glue(g);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[glue] rejected: ") + e.what());
  }
  return g;
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table = {
      {"scal_rel", 1e-5},    {"nullity", 1e-6},        {"inverse", 1e-10},
      {"frame", 1e-10},      {"christoffel", 1e-9},    {"zero_block", 1e-12},
      {"curvature", 1e-6},   {"frenet", 1e-12},        {"recursion", 1e-9},
      {"one_over_a1", 1e-8}, {"plane", 1e-6},          {"plane_null", 1e-10},
      {"expmap", 1e-7},      {"dphi", 1e-6},           {"inner", 1e-8},
      {"speed_drift", 1e-9}, {"rotation_drift", 1e-8}, {"warp", 1e-7},
      {"matexp", 1e-7},      {"jacobi", 1e-6},         {"margin_slack", 1e-3},
      {"leaf_spread", 1e-8}, {"leaf_match", 1e-8},     {"leaf_zero", 1e-12},
  };
  return table;
}

RunConfig::RunConfig() : tol(default_tolerances()) {}

double RunConfig::tolerance(const std::string& key) const {
  const auto it = tol.find(key);
  if (it == tol.end()) throw ConfigError("unknown tolerance '" + key + "'");
  return it->second;
}

Field1 make_field1(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.rfind("expr:", 0) == 0) return parse_field1(trim(text.substr(5)));
  std::string name;
  std::vector<double> args;
  if (split_call(text, name, args)) {
    if (name == "const") {
      need_arity(args, 1, text);
      return constant_field(args[0]);
    }
    if (name == "flat_bump") {
      need_arity(args, 3, text);
      return flat_bump(args[0], args[1], args[2]);
    }
    if (name == "poly_bump") {
      need_arity(args, 3, text);
      return poly_bump(args[0], args[1], args[2]);
    }
    if (name == "pow_ramp") {
      need_arity(args, 3, text);
      return pow_ramp(args[0], args[1], args[2]);
    }
    if (name == "ramp_turn") {
      need_arity(args, 4, text);
      return ramp_turn(args[0], args[1], args[2], args[3]);
    }
  }
  throw ConfigError("unknown field constructor '" + text + "'");
}

Field2 make_eta(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.rfind("expr2:", 0) == 0) return parse_field2(trim(text.substr(6)));
  if (text.rfind("ch_eta", 0) == 0) {
    const std::size_t open = text.find('(');
    // the argument is itself a call, so the closer is the last ')'
    if (open == std::string::npos || text.back() != ')' || !trim(text.substr(6, open - 6)).empty())
      throw ConfigError("unknown conformal factor '" + text + "'");
    return ch_eta(make_field1(text.substr(open + 1, text.size() - open - 2)));
  }
  std::string name;
  std::vector<double> args;
  if (split_call(text, name, args) && name == "const") {
    need_arity(args, 1, text);
    return constant_eta(args[0]);
  }
  throw ConfigError("unknown conformal factor '" + text + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");

  RunConfig cfg;
  std::string section;
  std::map<std::string, std::string> model_kv, glue_kv;
  bool saw_model = false, saw_glue = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;

    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section != "run" && section != "model" && section != "glue" &&
          section != "foliation" && section != "tolerances")
        throw ConfigError("unknown section [" + section + "]");
      if (section == "model") saw_model = true;
      if (section == "glue") saw_glue = true;
      continue;
    }

    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("key '" + key + "' appears before any [section] header");
    const std::string where = "[" + section + "] " + key;

    if (section == "run") {
      if (key == "scenario") {
        if (!scenario_exists(value)) throw ConfigError(where + ": unknown scenario '" + value + "'");
        cfg.scenario = value;
      } else if (key == "seed") {
        const long long s = parse_int(value, where);
        if (s < 0) throw ConfigError(where + ": seed must be nonnegative");
        cfg.seed = static_cast<unsigned long long>(s);
      } else if (key == "output_dir") {
        if (value.empty()) throw ConfigError(where + ": must not be empty");
        cfg.output_dir = value;
      } else if (key == "workers") {
        const long long w = parse_int(value, where);
        if (w < 1 || w > 64) throw ConfigError(where + ": workers must be in 1..64");
        cfg.workers = static_cast<int>(w);
      } else if (key == "samples") {
        const long long c = parse_int(value, where);
        if (c < 1 || c > 1000000) throw ConfigError(where + ": samples must be in 1..1000000");
        cfg.samples = static_cast<int>(c);
      } else {
        throw ConfigError("unknown key " + where);
      }
    } else if (section == "model") {
      if (key != "n" && key != "eta" && key != "x_lo" && key != "x_hi" && profile_index(key) == 0)
        throw ConfigError("unknown key " + where);
      if (!model_kv.emplace(key, value).second) throw ConfigError(where + " given twice");
    } else if (section == "glue") {
      if (key != "pieces" && key != "H" && key != "eta" && profile_index(key) == 0)
        throw ConfigError("unknown key " + where);
      if (!glue_kv.emplace(key, value).second) throw ConfigError(where + " given twice");
    } else if (section == "foliation") {
      if (key == "H") {
        cfg.foliation_H = field_for(value, where);
      } else if (key == "window") {
        const std::size_t comma = value.find(',');
        if (comma == std::string::npos) throw ConfigError(where + ": expected 'lo, hi'");
        cfg.foliation_window = {parse_number(value.substr(0, comma), where),
                                parse_number(value.substr(comma + 1), where)};
        if (!(cfg.foliation_window.lo < cfg.foliation_window.hi))
          throw ConfigError(where + ": window must be increasing");
      } else if (key == "samples") {
        const long long c = parse_int(value, where);
        if (c < 1 || c > 100000) throw ConfigError(where + ": samples must be in 1..100000");
        cfg.foliation_samples = static_cast<int>(c);
      } else {
        throw ConfigError("unknown key " + where);
      }
    } else {  // tolerances
      if (!default_tolerances().count(key)) throw ConfigError("unknown key " + where);
      cfg.tol[key] = parse_number(value, where);
    }
  }

  if (saw_model) cfg.model = build_model(model_kv);
  if (saw_glue) cfg.glue = build_glue(glue_kv);
  return cfg;
}

}  // namespace conullity::cli
