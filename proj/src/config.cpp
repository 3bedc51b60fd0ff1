#include "kslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kslab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Kv {
  std::string key, value;
  int line;
};

[[noreturn]] void fail(const std::string& name, int line,
                       const std::string& what) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + what);
}

std::vector<Kv> tokenize(const std::string& text, const std::string& name) {
  std::vector<Kv> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(name, line, "unterminated section header");
      continue;  // sections only organize the file
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(name, line, "expected key = value, got '" + s + "'");
    Kv kv;
    kv.key = trim(s.substr(0, eq));
    kv.value = trim(s.substr(eq + 1));
    kv.line = line;
    if (kv.key.empty()) fail(name, line, "empty key");
    if (kv.value.empty()) fail(name, line, "empty value for '" + kv.key + "'");
    out.push_back(std::move(kv));
  }
  return out;
}

double num(const Kv& kv, const std::string& name) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing text");
    return x;
  } catch (const std::exception&) {
    fail(name, kv.line, "'" + kv.key + "' needs a number, got '" + kv.value + "'");
  }
}

long integer(const Kv& kv, const std::string& name) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing text");
    return x;
  } catch (const std::exception&) {
    fail(name, kv.line, "'" + kv.key + "' needs an integer, got '" + kv.value + "'");
  }
}

bool boolean(const Kv& kv, const std::string& name) {
  std::string v = kv.value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  fail(name, kv.line, "'" + kv.key + "' needs true/false, got '" + kv.value + "'");
}

std::vector<double> num_list(const Kv& kv, const std::string& name) {
  std::vector<double> out;
  std::stringstream ss(kv.value);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) fail(name, kv.line, "empty list entry in '" + kv.key + "'");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(part, &pos));
      if (pos != part.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      fail(name, kv.line, "'" + kv.key + "' has a non-numeric entry '" + part + "'");
    }
  }
  if (out.empty()) fail(name, kv.line, "'" + kv.key + "' needs at least one entry");
  return out;
}

// points separated by ';', coordinates by ','
std::vector<std::vector<double>> point_list(const Kv& kv,
                                            const std::string& name) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(kv.value);
  std::string pt;
  while (std::getline(ss, pt, ';')) {
    Kv sub{kv.key, trim(pt), kv.line};
    out.push_back(num_list(sub, name));
  }
  return out;
}

InitialData::Kind parse_kind(const Kv& kv, const std::string& name) {
  if (kv.value == "constant") return InitialData::Kind::constant;
  if (kv.value == "gaussian") return InitialData::Kind::gaussian;
  if (kv.value == "random_bumps") return InitialData::Kind::random_bumps;
  if (kv.value == "file") return InitialData::Kind::file;
  fail(name, kv.line,
       "'" + kv.key + "' must be constant, gaussian, random_bumps, or file");
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& name) {
  ParsedConfig pc;
  SimConfig& c = pc.sim;

  bool extents_set = false, lengths_set = false;
  std::string family = "exponential";
  int family_line = 0;
  double mk = 1.0, mchi = 1.0, mbeta = 1.0;
  std::string motility_csv;

  for (const Kv& kv : tokenize(text, name)) {
    const std::string& k = kv.key;
    if (k == "dim") c.dim = static_cast<int>(integer(kv, name));
    else if (k == "extents") {
      c.extents.clear();
      for (double x : num_list(kv, name))
        c.extents.push_back(static_cast<int>(x));
      extents_set = true;
    } else if (k == "lengths") {
      c.lengths = num_list(kv, name);
      lengths_set = true;
    } else if (k == "epsilon") c.eps = num(kv, name);
    else if (k == "motility") { family = kv.value; family_line = kv.line; }
    else if (k == "k") mk = num(kv, name);
    else if (k == "chi") mchi = num(kv, name);
    else if (k == "beta") mbeta = num(kv, name);
    else if (k == "motility_csv") motility_csv = kv.value;
    else if (k == "u0_kind") c.u0.kind = parse_kind(kv, name);
    else if (k == "u0_value") c.u0.value = num(kv, name);
    else if (k == "u0_mass") c.u0.mass = num(kv, name);
    else if (k == "u0_width") c.u0.width = num(kv, name);
    else if (k == "u0_floor") c.u0.floor = num(kv, name);
    else if (k == "u0_centers") c.u0.centers = point_list(kv, name);
    else if (k == "u0_bumps") c.u0.bumps = static_cast<int>(integer(kv, name));
    else if (k == "u0_path") c.u0.path = kv.value;
    else if (k == "v0_kind") c.v0.kind = parse_kind(kv, name);
    else if (k == "v0_value") c.v0.value = num(kv, name);
    else if (k == "v0_mass") c.v0.mass = num(kv, name);
    else if (k == "v0_width") c.v0.width = num(kv, name);
    else if (k == "v0_floor") c.v0.floor = num(kv, name);
    else if (k == "v0_centers") c.v0.centers = point_list(kv, name);
    else if (k == "v0_bumps") c.v0.bumps = static_cast<int>(integer(kv, name));
    else if (k == "v0_path") c.v0.path = kv.value;
    else if (k == "dt0") c.time.dt0 = num(kv, name);
    else if (k == "dt_min") c.time.dt_min = num(kv, name);
    else if (k == "dt_max") c.time.dt_max = num(kv, name);
    else if (k == "dt_growth") c.time.growth = num(kv, name);
    else if (k == "dt_grow_after") c.time.grow_after = static_cast<int>(integer(kv, name));
    else if (k == "cfl_cap") c.time.cfl_cap = boolean(kv, name);
    else if (k == "t_final") c.t_final = num(kv, name);
    else if (k == "max_steps") c.max_steps = integer(kv, name);
    else if (k == "m_blow") c.m_blow = num(kv, name);
    else if (k == "growth_window") c.growth_window = static_cast<int>(integer(kv, name));
    else if (k == "helmholtz_tol") c.helmholtz_tol = num(kv, name);
    else if (k == "update_tol") c.update_tol = num(kv, name);
    else if (k == "diag_every") c.diag_every = static_cast<int>(integer(kv, name));
    else if (k == "snapshot_every") c.snapshot_every = static_cast<int>(integer(kv, name));
    else if (k == "snapshot_images") pc.snapshot_images = boolean(kv, name);
    else if (k == "comparison_ctilde") c.comparison_ctilde = num(kv, name);
    else if (k == "comparison_k") c.comparison_K = num(kv, name);
    else if (k == "exp_moment_a") c.exp_moment_A = num(kv, name);
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(integer(kv, name));
    else fail(name, kv.line, "unknown key '" + k + "'");
    pc.entries.emplace_back(kv.key, kv.value);
  }

  if (!extents_set) c.extents.assign(c.dim, 64);
  if (!lengths_set) c.lengths.assign(c.dim, 1.0);

  try {
    if (family == "power") c.motility = Motility::power(mk);
    else if (family == "exponential") c.motility = Motility::exponential(mchi);
    else if (family == "stretched_exponential")
      c.motility = Motility::stretched_exponential(mchi, mbeta);
    else if (family == "power_log") c.motility = Motility::power_log(mk);
    else if (family == "tabulated") {
      if (motility_csv.empty())
        fail(name, family_line ? family_line : 1,
             "tabulated motility needs motility_csv");
      c.motility = Motility::tabulated_from_csv(motility_csv);
    } else
      fail(name, family_line ? family_line : 1,
           "unknown motility family '" + family + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(name, family_line ? family_line : 1,
         std::string("bad motility parameters: ") + e.what());
  }

  return pc;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace kslab
