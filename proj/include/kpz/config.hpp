#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kpz/tasep_sim.hpp"

namespace kpz {

// flat "key = value" text; '#' starts a comment; lists are comma separated
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& def = "") const;
  double get_double(const std::string& key, double def) const;
  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& def = {}) const;
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  // sorted key=value lines
  std::string canonical() const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

const std::vector<std::string>& known_config_keys();

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// s_grid list, or s_min / s_max / s_step, or the given default range
std::vector<double> s_grid_from(const Config& c, double lo, double hi, double step);
SimConfig sim_config_from(const Config& c);

// %.15g with "-0" folded to "0"
std::string fmt15(double v);

}  // namespace kpz
