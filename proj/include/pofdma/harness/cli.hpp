#pragma once

// Command-line front end: `pofdma-sim <papr|ber|psd|complexity|all> [flags]`.
// Every settings key is also a long flag; repeated flags and comma lists both
// accumulate values.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pofdma/error.hpp"
#include "pofdma/harness/config.hpp"
#include "pofdma/harness/experiments.hpp"

namespace pofdma::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"papr", "ber", "psd", "complexity", "all"};
  return names;
}

struct CommandLine {
  std::string command;
  ExperimentConfig config;
  std::optional<std::string> help;  // set when --help was requested
};

namespace detail {

inline const char* flag_description(const std::string& key) {
  static const std::map<std::string, const char*> text = {
      {"N", "number of subcarriers (power of two)"},
      {"K", "number of users; repeatable"},
      {"scheme", "OFDMA, SC-FDMA, P-OFDMA, P-OFDMA-DCT, P-OFDMA-DFT; repeatable"},
      {"mod", "QAM order, 16 or 64; repeatable"},
      {"snr", "SNR grid in dB as lo..hi:step"},
      {"delay-ns", "channel delay spread in ns; repeatable"},
      {"blocks", "blocks per point for every experiment"},
      {"papr-blocks", "blocks per PAPR point"},
      {"ber-blocks", "blocks per BER point"},
      {"psd-blocks", "blocks in each PSD stream"},
      {"seed", "master seed"},
      {"cp-len", "cyclic prefix length (default N/4)"},
      {"oversample", "PAPR oversampling factor"},
      {"papr-include-cp", "measure PAPR over the cyclic prefix too"},
      {"ber-k", "users in BER runs"},
      {"ber-delay-ns", "delay spread of the BER SNR sweep"},
      {"ber-snr", "SNR of the BER delay-spread sweep"},
      {"psd-N", "subcarriers for the PSD run"},
      {"psd-K", "users for the PSD run"},
      {"psd-user", "user offsets to report in psd.csv; repeatable"},
      {"sample-period-ns", "channel tap spacing in ns"},
      {"decay-floor-db", "last-tap power relative to the first, dB"},
      {"out", "output directory"},
      {"threads", "worker threads (does not affect results)"},
  };
  const auto it = text.find(key);
  return it == text.end() ? "" : it->second;
}

}  // namespace detail

// Throws ConfigError on any invalid input.
inline CommandLine parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"Link-level simulator for periodic and localized uplink multiple access", "pofdma-sim"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "settings file with key = value lines");

  std::map<std::string, std::vector<std::string>> values;
  for (const auto& key : known_keys()) {
    app.add_option("--" + key, values[key], detail::flag_description(key))
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  }
  for (const auto& name : subcommands()) {
    app.add_subcommand(name, name == "all" ? "run every experiment" : "run the " + name + " experiment")
        ->fallthrough();
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  CommandLine out;
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out.help = app.help();
    return out;
  } catch (const CLI::CallForAllHelp&) {
    out.help = app.help("", CLI::AppFormatMode::All);
    return out;
  } catch (const CLI::CallForVersion&) {
    out.help = std::string(kToolVersion) + "\n";
    return out;
  } catch (const CLI::ParseError& e) {
    throw ConfigError("command line", e.what());
  }
  for (const auto* sub : app.get_subcommands()) out.command = sub->get_name();

  RawSettings cli;
  for (auto& [key, v] : values) {
    if (!v.empty()) cli[key] = v;
  }
  const RawSettings file = config_file.empty() ? RawSettings{} : read_settings_file(config_file);
  out.config = build_config(file, cli);
  return out;
}

inline void run_command(const std::string& command, const ExperimentConfig& cfg) {
  ensure_output_dir(cfg.out_dir);
  const bool all = command == "all";
  if (all || command == "complexity") run_complexity_report(cfg);
  if (all || command == "papr") run_papr_experiment(cfg);
  if (all || command == "psd") run_psd_experiment(cfg);
  if (all || command == "ber") run_ber_experiment(cfg);
}

// Full CLI: parse, run, map failures to exit codes.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const CommandLine cl = parse_command_line(args);
    if (cl.help) {
      out << *cl.help;
      return kExitOk;
    }
    run_command(cl.command, cl.config);
    out << "wrote " << cl.command << " results to " << cl.config.out_dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pofdma::harness
