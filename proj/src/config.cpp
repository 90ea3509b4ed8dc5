#include "kpz/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kpz/curve.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not a number: '" + v + "'");
  }
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "rho", "t_max", "t_list", "ring_size", "n_runs", "seed", "w_list", "s_grid", "s_min", "s_max", "s_step",
      "n_quad", "map_scale", "contour_points", "suite", "record_runs", "n_frames", "w_min", "w_max", "w_step"};
  return keys;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto& keys = known_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (c.kv_.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
    c.kv_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::get(const std::string& key, const std::string& def) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  return has(key) ? to_double(key, get(key)) : def;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t def) const {
  if (!has(key)) return def;
  const double x = to_double(key, get(key));
  if (x != std::floor(x) || std::fabs(x) > 9.0e15) throw ConfigError("config: " + key + " must be an integer");
  return static_cast<std::int64_t>(x);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
  if (!has(key)) return def;
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long x = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " must be a non-negative integer");
  }
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& def) const {
  if (!has(key)) return def;
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : kv_) s += k + "=" + v + "\n";
  return s;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<double> s_grid_from(const Config& c, double lo, double hi, double step) {
  if (c.has("s_grid")) {
    auto g = c.get_list("s_grid");
    if (g.empty()) throw ConfigError("config: s_grid is empty");
    if (!std::is_sorted(g.begin(), g.end())) throw ConfigError("config: s_grid must be increasing");
    return g;
  }
  lo = c.get_double("s_min", lo);
  hi = c.get_double("s_max", hi);
  step = c.get_double("s_step", step);
  if (!(step > 0) || !(hi >= lo)) throw ConfigError("config: bad s range");
  return uniform_grid(lo, hi, step);
}

SimConfig sim_config_from(const Config& c) {
  SimConfig s;
  s.rho = c.get_double("rho", s.rho);
  s.t_max = c.get_double("t_max", s.t_max);
  s.ring_size = c.get_int("ring_size", 0);
  s.n_runs = c.get_int("n_runs", s.n_runs);
  s.seed = c.get_u64("seed", s.seed);
  s.w_list = c.get_list("w_list", {0.0, 0.3});
  s.s_grid = s_grid_from(c, -6.0, 6.0, 0.05);
  validate(s);
  return s;
}

std::string fmt15(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace kpz
