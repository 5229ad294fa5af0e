#pragma once

// Experiment configuration. Settings come from three layers, later layers
// replacing earlier ones key by key: built-in defaults, a `key = value`
// settings file, and command-line flags. Both the file and the CLI use the
// same key names (the long flag without dashes).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/txchain.hpp"

namespace pofdma::harness {

inline constexpr const char* kToolVersion = "pofdma-sim 1.0.0";

struct SnrGrid {
  double lo = 0.0;
  double hi = 40.0;
  double step = 4.0;

  std::vector<double> points() const {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
  }
};

struct ExperimentConfig {
  std::size_t n = 256;
  std::vector<std::size_t> k_values = {16, 32, 64, 128};
  std::vector<Scheme> schemes = {kAllSchemes.begin(), kAllSchemes.end()};
  std::vector<int> modulations = {16, 64};
  SnrGrid snr;
  std::vector<double> delay_spreads_ns = {50, 100, 200, 300, 500, 750, 1000, 1500, 2000, 2500, 3000, 3500};

  std::optional<std::size_t> blocks;  // overrides every per-experiment default below
  std::size_t papr_blocks = 500;
  std::size_t ber_blocks = 2000;
  std::size_t psd_blocks = 200;

  std::uint64_t seed = 1;
  std::optional<std::size_t> cp_len;  // default N/4
  std::size_t oversample = 1;
  bool papr_include_cp = false;

  // BER: SNR sweep at ber_delay_ns, delay sweep at ber_snr_db, both at K = ber_k
  std::size_t ber_k = 64;
  double ber_delay_ns = 300.0;
  double ber_snr_db = 32.0;

  std::size_t psd_n = 1024;
  std::size_t psd_k = 64;
  std::vector<std::size_t> psd_users = {1, 32};

  double sample_period_ns = 50.0;
  double decay_floor_db = -20.0;

  std::filesystem::path out_dir = "results";
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

  std::size_t cp_for(std::size_t n_sub) const { return cp_len.value_or(n_sub / 4); }
  std::size_t papr_block_count() const { return blocks.value_or(papr_blocks); }
  std::size_t ber_block_count() const { return blocks.value_or(ber_blocks); }
  std::size_t psd_block_count() const { return blocks.value_or(psd_blocks); }

  void validate() const {
    if (!is_power_of_two(n)) throw ConfigError("N", "must be a power of two, got " + std::to_string(n));
    if (k_values.empty()) throw ConfigError("K", "at least one user count is required");
    for (std::size_t k : k_values) {
      if (k == 0 || n % k != 0) {
        throw ConfigError("K", std::to_string(k) + " does not divide N=" + std::to_string(n));
      }
    }
    if (ber_k == 0 || n % ber_k != 0) throw ConfigError("ber-k", "does not divide N=" + std::to_string(n));
    if (schemes.empty()) throw ConfigError("scheme", "at least one scheme is required");
    if (modulations.empty()) throw ConfigError("mod", "at least one modulation is required");
    for (int mod : modulations) {
      if (mod != 16 && mod != 64) throw ConfigError("mod", "must be 16 or 64, got " + std::to_string(mod));
    }
    if (!(snr.step > 0.0) || snr.hi < snr.lo) throw ConfigError("snr", "grid must be lo..hi:step with step > 0");
    for (double d : delay_spreads_ns) {
      if (!(d >= 0.0)) throw ConfigError("delay-ns", "delay spreads must be non-negative");
    }
    if (!(ber_delay_ns >= 0.0)) throw ConfigError("ber-delay-ns", "must be non-negative");
    if (papr_block_count() == 0 || ber_block_count() == 0 || psd_block_count() == 0) {
      throw ConfigError("blocks", "must be positive");
    }
    const std::size_t cp = cp_for(n);
    if (cp < 1 || cp >= n) throw ConfigError("cp-len", "must be in [1, N)");
    if (oversample < 1) throw ConfigError("oversample", "must be at least 1");
    if (!is_power_of_two(psd_n)) throw ConfigError("psd-N", "must be a power of two");
    if (psd_k == 0 || psd_n % psd_k != 0) throw ConfigError("psd-K", "does not divide psd-N");
    if (cp_for(psd_n) >= psd_n) throw ConfigError("cp-len", "must be below psd-N");
    for (std::size_t u : psd_users) {
      if (u >= psd_k) throw ConfigError("psd-user", "user " + std::to_string(u) + " >= psd-K");
    }
    if (!(sample_period_ns > 0.0)) throw ConfigError("sample-period-ns", "must be positive");
    if (threads == 0) throw ConfigError("threads", "must be at least 1");
  }
};

inline SnrGrid parse_snr_grid(const std::string& key, const std::string& text);

// Raw key -> values as read from a file or the command line.
using RawSettings = std::map<std::string, std::vector<std::string>>;

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, "malformed value '" + text + "'");
  return value;
}

inline const std::string& single(const std::string& key, const std::vector<std::string>& values) {
  if (values.size() != 1) throw ConfigError(key, "expects exactly one value");
  return values.front();
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(key, "malformed boolean '" + text + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::vector<std::string>&)>;

template <class T>
std::vector<T> parse_list(const std::string& key, const std::vector<std::string>& values) {
  std::vector<T> out;
  for (const auto& v : values) {
    for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
  }
  if (out.empty()) throw ConfigError(key, "expects at least one value");
  return out;
}

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"N", [](auto& c, auto& k, auto& v) { c.n = parse_number<std::size_t>(k, single(k, v)); }},
      {"K", [](auto& c, auto& k, auto& v) { c.k_values = parse_list<std::size_t>(k, v); }},
      {"scheme",
       [](auto& c, auto& k, auto& v) {
         c.schemes.clear();
         for (const auto& raw : v) {
           for (const auto& name : split_list(raw)) {
             const auto s = parse_scheme(name);
             if (!s) throw ConfigError(k, "unknown scheme '" + name + "'");
             c.schemes.push_back(*s);
           }
         }
       }},
      {"mod", [](auto& c, auto& k, auto& v) { c.modulations = parse_list<int>(k, v); }},
      {"snr", [](auto& c, auto& k, auto& v) { c.snr = parse_snr_grid(k, single(k, v)); }},
      {"delay-ns", [](auto& c, auto& k, auto& v) { c.delay_spreads_ns = parse_list<double>(k, v); }},
      {"blocks", [](auto& c, auto& k, auto& v) { c.blocks = parse_number<std::size_t>(k, single(k, v)); }},
      {"papr-blocks", [](auto& c, auto& k, auto& v) { c.papr_blocks = parse_number<std::size_t>(k, single(k, v)); }},
      {"ber-blocks", [](auto& c, auto& k, auto& v) { c.ber_blocks = parse_number<std::size_t>(k, single(k, v)); }},
      {"psd-blocks", [](auto& c, auto& k, auto& v) { c.psd_blocks = parse_number<std::size_t>(k, single(k, v)); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, single(k, v)); }},
      {"cp-len", [](auto& c, auto& k, auto& v) { c.cp_len = parse_number<std::size_t>(k, single(k, v)); }},
      {"oversample", [](auto& c, auto& k, auto& v) { c.oversample = parse_number<std::size_t>(k, single(k, v)); }},
      {"papr-include-cp", [](auto& c, auto& k, auto& v) { c.papr_include_cp = parse_bool(k, single(k, v)); }},
      {"ber-k", [](auto& c, auto& k, auto& v) { c.ber_k = parse_number<std::size_t>(k, single(k, v)); }},
      {"ber-delay-ns", [](auto& c, auto& k, auto& v) { c.ber_delay_ns = parse_number<double>(k, single(k, v)); }},
      {"ber-snr", [](auto& c, auto& k, auto& v) { c.ber_snr_db = parse_number<double>(k, single(k, v)); }},
      {"psd-N", [](auto& c, auto& k, auto& v) { c.psd_n = parse_number<std::size_t>(k, single(k, v)); }},
      {"psd-K", [](auto& c, auto& k, auto& v) { c.psd_k = parse_number<std::size_t>(k, single(k, v)); }},
      {"psd-user", [](auto& c, auto& k, auto& v) { c.psd_users = parse_list<std::size_t>(k, v); }},
      {"sample-period-ns",
       [](auto& c, auto& k, auto& v) { c.sample_period_ns = parse_number<double>(k, single(k, v)); }},
      {"decay-floor-db", [](auto& c, auto& k, auto& v) { c.decay_floor_db = parse_number<double>(k, single(k, v)); }},
      {"out", [](auto& c, auto& k, auto& v) { c.out_dir = single(k, v); }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = parse_number<std::size_t>(k, single(k, v)); }},
  };
  return table;
}

}  // namespace detail

// "lo..hi:step", e.g. "0..40:4"; a bare number is a one-point grid.
inline SnrGrid parse_snr_grid(const std::string& key, const std::string& text) {
  SnrGrid g;
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    g.lo = g.hi = detail::parse_number<double>(key, detail::trim(text));
    g.step = 1.0;
    return g;
  }
  const auto colon = text.find(':', dots);
  g.lo = detail::parse_number<double>(key, detail::trim(text.substr(0, dots)));
  if (colon == std::string::npos) {
    g.hi = detail::parse_number<double>(key, detail::trim(text.substr(dots + 2)));
    g.step = 1.0;
  } else {
    g.hi = detail::parse_number<double>(key, detail::trim(text.substr(dots + 2, colon - dots - 2)));
    g.step = detail::parse_number<double>(key, detail::trim(text.substr(colon + 1)));
  }
  if (!(g.step > 0.0) || g.hi < g.lo) throw ConfigError(key, "grid must be lo..hi:step with step > 0");
  return g;
}

inline std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : detail::setters()) keys.push_back(k);
  return keys;
}

// `key = value[, value...]` lines; `#` starts a comment; repeated keys append.
inline RawSettings read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read settings file " + path.string());
  RawSettings raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    raw[detail::trim(line.substr(0, eq))].push_back(detail::trim(line.substr(eq + 1)));
  }
  return raw;
}

inline void apply_settings(ExperimentConfig& cfg, const RawSettings& raw) {
  const auto& table = detail::setters();
  for (const auto& [key, values] : raw) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown setting");
    it->second(cfg, key, values);
  }
}

// Defaults, then file settings, then CLI settings; validated.
inline ExperimentConfig build_config(const RawSettings& file_settings, const RawSettings& cli_settings) {
  ExperimentConfig cfg;
  apply_settings(cfg, file_settings);
  apply_settings(cfg, cli_settings);
  cfg.validate();
  return cfg;
}

}  // namespace pofdma::harness
