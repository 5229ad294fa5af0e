#pragma once

// Monte Carlo drivers. Work is split by block; every block draws from its own
// counter-keyed substreams and writes into its own result slot, and slots are
// reduced in block order, so outputs do not depend on the worker count.
//
// Payload, channel and noise streams are keyed without the scheme, so all
// schemes at a point see the same data, channels and noise.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "pofdma/channel.hpp"
#include "pofdma/complexity.hpp"
#include "pofdma/error.hpp"
#include "pofdma/harness/config.hpp"
#include "pofdma/mapping.hpp"
#include "pofdma/metrics.hpp"
#include "pofdma/rng.hpp"
#include "pofdma/rxchain.hpp"
#include "pofdma/txchain.hpp"

namespace pofdma::harness {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::uint64_t key_of(double v) noexcept { return std::bit_cast<std::uint64_t>(v); }

inline ComplexVector user_payload(std::uint64_t seed, std::size_t n, std::size_t k, int order, std::size_t block,
                                  std::size_t user, BitVector* bits_out = nullptr) {
  Rng rng = substream(seed, {static_cast<std::uint64_t>(Stream::Payload), n, k,
                             static_cast<std::uint64_t>(order), block, user});
  const Constellation c(order);
  BitVector bits = random_bits(rng, (n / k) * c.bits_per_symbol());
  ComplexVector symbols = qam_modulate(bits, order);
  if (bits_out) *bits_out = std::move(bits);
  return symbols;
}

inline ChannelRealization user_channel(std::uint64_t seed, std::size_t n, std::size_t k, const ChannelProfile& profile,
                                       std::size_t block, std::size_t user) {
  Rng rng = substream(seed, {static_cast<std::uint64_t>(Stream::Channel), n, k, key_of(profile.delay_spread_ns),
                             key_of(profile.sample_period_ns), key_of(profile.decay_floor_db), block, user});
  return draw_channel(profile, n, rng);
}

// ---------------------------------------------------------------------------
// Output plumbing

inline void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

inline std::string join_sizes(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

// Settings that determine the numbers; worker count and output path are
// deliberately absent so that they cannot change file bytes.
inline std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "N=" << cfg.n << " K=" << join_sizes(cfg.k_values) << " scheme=";
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) os << (i ? "," : "") << to_string(cfg.schemes[i]);
  os << " mod=";
  for (std::size_t i = 0; i < cfg.modulations.size(); ++i) os << (i ? "," : "") << cfg.modulations[i];
  os << " snr=" << cfg.snr.lo << ".." << cfg.snr.hi << ":" << cfg.snr.step << " delay-ns=";
  for (std::size_t i = 0; i < cfg.delay_spreads_ns.size(); ++i) os << (i ? "," : "") << cfg.delay_spreads_ns[i];
  os << " cp-len=" << (cfg.cp_len ? std::to_string(*cfg.cp_len) : std::string("N/4")) << " oversample=" << cfg.oversample
     << " papr-include-cp=" << (cfg.papr_include_cp ? "true" : "false") << " sample-period-ns=" << cfg.sample_period_ns
     << " decay-floor-db=" << cfg.decay_floor_db;
  return os.str();
}

inline void write_metadata(std::ostream& os, const ExperimentConfig& cfg, const std::string& experiment,
                           const std::vector<std::string>& extra) {
  os << "# tool: " << kToolVersion << '\n';
  os << "# experiment: " << experiment << '\n';
  os << "# seed: " << cfg.seed << '\n';
  os << "# config: " << config_echo(cfg) << '\n';
  for (const auto& line : extra) os << "# " << line << '\n';
}

// ---------------------------------------------------------------------------
// PAPR

struct PaprResult {
  Scheme scheme = Scheme::Ofdma;
  std::size_t n = 0;
  std::size_t k = 0;
  int order = 16;
  PaprSampleSet samples;
};

inline double measured_papr(const TxBlock& block, std::size_t oversample_factor, bool include_cp) {
  if (oversample_factor == 1) {
    return include_cp ? papr_db(block.samples) : papr_db(block.body());
  }
  const ComplexVector up = oversample(block.body(), oversample_factor);
  if (!include_cp) return papr_db(up);
  return papr_db(add_cp(up, block.cp_len * oversample_factor));
}

// One result per (K, modulation, scheme), each holding blocks * K samples
// ordered by (block, user).
inline std::vector<PaprResult> compute_papr(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t blocks = cfg.papr_block_count();
  std::vector<PaprResult> results;
  for (std::size_t k : cfg.k_values) {
    for (int order : cfg.modulations) {
      const std::size_t first = results.size();
      for (Scheme s : cfg.schemes) {
        PaprResult r;
        r.scheme = s;
        r.n = cfg.n;
        r.k = k;
        r.order = order;
        r.samples.samples_db.assign(blocks * k, 0.0);
        results.push_back(std::move(r));
      }
      parallel_for(blocks, cfg.threads, [&](std::size_t b) {
        for (std::size_t m = 0; m < k; ++m) {
          const ComplexVector symbols = user_payload(cfg.seed, cfg.n, k, order, b, m);
          for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
            SchemeConfig sc{cfg.schemes[si], cfg.n, k, cfg.cp_for(cfg.n), order};
            const TxBlock block = transmit(symbols, m, sc);
            results[first + si].samples.samples_db[b * k + m] =
                measured_papr(block, cfg.oversample, cfg.papr_include_cp);
          }
        }
      });
    }
  }
  return results;
}

// 0.0 .. 14.0 dB in 0.1 dB steps.
inline std::vector<double> ccdf_thresholds() {
  std::vector<double> z;
  for (int i = 0; i <= 140; ++i) z.push_back(0.1 * i);
  return z;
}

inline std::vector<std::string> papr_conventions(const ExperimentConfig& cfg) {
  return {"papr: 10log10(max|x|^2/mean|x|^2) per user per block, " +
              std::string(cfg.papr_include_cp ? "including" : "excluding") + " the cyclic prefix, oversample=" +
              std::to_string(cfg.oversample),
          "blocks: " + std::to_string(cfg.papr_block_count()) + " per point; samples = blocks x K",
          "avg_papr_db: arithmetic mean of per-block dB values",
          "ccdf: fraction of samples strictly above threshold_db"};
}

inline void write_papr_csv(const ExperimentConfig& cfg, const std::vector<PaprResult>& results) {
  const auto conventions = papr_conventions(cfg);
  {
    auto out = open_output(cfg.out_dir / "ccdf.csv");
    write_metadata(out, cfg, "papr", conventions);
    out << "scheme,N,K,modulation,threshold_db,ccdf\n";
    const auto z = ccdf_thresholds();
    for (const auto& r : results) {
      const auto p = ccdf(r.samples, z);
      for (std::size_t i = 0; i < z.size(); ++i) {
        out << to_string(r.scheme) << ',' << r.n << ',' << r.k << ',' << r.order << ',' << std::fixed
            << std::setprecision(1) << z[i] << ',' << std::defaultfloat << std::setprecision(10) << p[i] << '\n';
      }
    }
  }
  auto out = open_output(cfg.out_dir / "avg_papr.csv");
  write_metadata(out, cfg, "papr", conventions);
  out << "scheme,N,K,modulation,avg_papr_db,samples\n";
  for (const auto& r : results) {
    out << to_string(r.scheme) << ',' << r.n << ',' << r.k << ',' << r.order << ',' << average_papr(r.samples) << ','
        << r.samples.size() << '\n';
  }
}

inline std::vector<PaprResult> run_papr_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_output_dir(cfg.out_dir);
  auto results = compute_papr(cfg);
  write_papr_csv(cfg, results);
  return results;
}

// ---------------------------------------------------------------------------
// BER

struct BerPointSpec {
  std::size_t n = 256;
  std::size_t k = 64;
  std::size_t cp_len = 64;
  int order = 16;
  double snr_db = 20.0;
  ChannelProfile profile;
  std::size_t blocks = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::vector<Scheme> schemes = {kAllSchemes.begin(), kAllSchemes.end()};
};

// Mean received power per sample: K users, each with ||body||^2 = M E|s|^2
// = M, through unit-mean-power channels.
inline double reference_signal_power(std::size_t n, std::size_t k) {
  return static_cast<double>(k * (n / k)) / static_cast<double>(n);
}

// Full link for one block and one scheme: tx -> per-user channel -> sum ->
// CP removal -> AWGN -> per-user rx -> bit errors.
inline std::uint64_t simulate_block_errors(const SchemeConfig& sc, std::span<const ComplexVector> payloads,
                                           std::span<const BitVector> bits, std::span<const ChannelRealization> channels,
                                           double snr_db, Rng& noise_rng) {
  ComplexVector received(sc.n + sc.cp_len);
  for (std::size_t m = 0; m < sc.k; ++m) {
    const TxBlock block = transmit(payloads[m], m, sc);
    const ComplexVector y = apply_channel(block.samples, channels[m]);
    for (std::size_t i = 0; i < y.size(); ++i) received[i] += y[i];
  }
  const ComplexVector r = add_awgn(remove_cp(received, sc.cp_len), snr_db, reference_signal_power(sc.n, sc.k), noise_rng);
  const auto estimates = receive_all(r, sc, channels);
  std::uint64_t errors = 0;
  for (std::size_t m = 0; m < sc.k; ++m) errors += ber_update({}, bits[m], estimates[m].bits).bit_errors;
  return errors;
}

// One counter per spec.schemes entry.
inline std::vector<BerCounter> simulate_ber_point(const BerPointSpec& spec) {
  SchemeConfig base{Scheme::Ofdma, spec.n, spec.k, spec.cp_len, spec.order};
  base.validate();
  spec.profile.validate();
  const std::size_t ns = spec.schemes.size();
  std::vector<std::uint64_t> errors(spec.blocks * ns, 0);

  parallel_for(spec.blocks, spec.threads, [&](std::size_t b) {
    std::vector<ComplexVector> payloads(spec.k);
    std::vector<BitVector> bits(spec.k);
    std::vector<ChannelRealization> channels(spec.k);
    for (std::size_t m = 0; m < spec.k; ++m) {
      payloads[m] = user_payload(spec.seed, spec.n, spec.k, spec.order, b, m, &bits[m]);
      channels[m] = user_channel(spec.seed, spec.n, spec.k, spec.profile, b, m);
    }
    for (std::size_t si = 0; si < ns; ++si) {
      SchemeConfig sc = base;
      sc.scheme = spec.schemes[si];
      Rng noise = substream(spec.seed, {static_cast<std::uint64_t>(Stream::Noise), spec.n, spec.k,
                                        static_cast<std::uint64_t>(spec.order), key_of(spec.snr_db),
                                        key_of(spec.profile.delay_spread_ns), b});
      errors[b * ns + si] = simulate_block_errors(sc, payloads, bits, channels, spec.snr_db, noise);
    }
  });

  const Constellation c(spec.order);
  const std::uint64_t bits_per_block = spec.k * (spec.n / spec.k) * c.bits_per_symbol();
  std::vector<BerCounter> out(ns);
  for (std::size_t b = 0; b < spec.blocks; ++b) {
    for (std::size_t si = 0; si < ns; ++si) {
      out[si].bit_errors += errors[b * ns + si];
      out[si].bits_total += bits_per_block;
    }
  }
  return out;
}

struct BerResult {
  Scheme scheme = Scheme::Ofdma;
  std::size_t n = 0;
  std::size_t k = 0;
  int order = 16;
  double snr_db = 0.0;
  double delay_ns = 0.0;
  BerCounter counter;
};

// (modulation, snr, delay) points: the SNR grid at ber_delay_ns followed by
// the delay list at ber_snr_db, without duplicates.
inline std::vector<std::tuple<int, double, double>> ber_points(const ExperimentConfig& cfg) {
  std::vector<std::tuple<int, double, double>> points;
  std::set<std::tuple<int, double, double>> seen;
  for (int order : cfg.modulations) {
    auto push = [&](double snr, double delay) {
      const auto p = std::make_tuple(order, snr, delay);
      if (seen.insert(p).second) points.push_back(p);
    };
    for (double snr : cfg.snr.points()) push(snr, cfg.ber_delay_ns);
    for (double delay : cfg.delay_spreads_ns) push(cfg.ber_snr_db, delay);
  }
  return points;
}

inline std::vector<BerResult> compute_ber(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<BerResult> results;
  for (const auto& [order, snr, delay] : ber_points(cfg)) {
    BerPointSpec spec;
    spec.n = cfg.n;
    spec.k = cfg.ber_k;
    spec.cp_len = cfg.cp_for(cfg.n);
    spec.order = order;
    spec.snr_db = snr;
    spec.profile = ChannelProfile{delay, cfg.sample_period_ns, cfg.decay_floor_db};
    spec.blocks = cfg.ber_block_count();
    spec.seed = cfg.seed;
    spec.threads = cfg.threads;
    spec.schemes = cfg.schemes;
    const auto counters = simulate_ber_point(spec);
    for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
      results.push_back({cfg.schemes[si], cfg.n, cfg.ber_k, order, snr, delay, counters[si]});
    }
  }
  return results;
}

inline void write_ber_csv(const ExperimentConfig& cfg, const std::vector<BerResult>& results) {
  auto out = open_output(cfg.out_dir / "ber.csv");
  std::ostringstream profile;
  profile << std::setprecision(10) << "channel: exponential tapped delay line, sample period " << cfg.sample_period_ns
          << " ns, last tap " << cfg.decay_floor_db << " dB, fresh realization per user per block";
  write_metadata(out, cfg, "ber",
                 {"K=" + std::to_string(cfg.ber_k) + ", blocks=" + std::to_string(cfg.ber_block_count()) +
                      " per point; bits = blocks x K x M x log2(modulation)",
                  profile.str(), "receiver: zero-forcing single-tap equalization with perfect channel knowledge",
                  "snr: per-sample noise variance = mean received signal power / 10^(snr_db/10)"});
  out << "scheme,N,K,modulation,snr_db,delay_ns,ber,bits\n";
  for (const auto& r : results) {
    out << to_string(r.scheme) << ',' << r.n << ',' << r.k << ',' << r.order << ',' << r.snr_db << ',' << r.delay_ns
        << ',' << r.counter.value() << ',' << r.counter.bits_total << '\n';
  }
}

inline std::vector<BerResult> run_ber_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_output_dir(cfg.out_dir);
  auto results = compute_ber(cfg);
  write_ber_csv(cfg, results);
  return results;
}

// ---------------------------------------------------------------------------
// PSD

struct PsdResult {
  std::string stream_id;
  PsdEstimate psd;
};

// Transmit-side P-OFDMA streams (CP included) at psd_n / psd_k: one per
// selected user plus the superposition of all users.
inline std::vector<PsdResult> compute_psd(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.psd_n;
  const std::size_t k = cfg.psd_k;
  const std::size_t cp = cfg.cp_for(n);
  const std::size_t block_len = n + cp;
  const std::size_t blocks = cfg.psd_block_count();
  const int order = cfg.modulations.front();
  const SchemeConfig sc{Scheme::POfdma, n, k, cp, order};

  std::vector<ComplexVector> user_streams(cfg.psd_users.size(), ComplexVector(blocks * block_len));
  ComplexVector aggregate(blocks * block_len);
  parallel_for(blocks, cfg.threads, [&](std::size_t b) {
    for (std::size_t m = 0; m < k; ++m) {
      const TxBlock block = pofdma_tx(user_payload(cfg.seed, n, k, order, b, m), m, sc);
      for (std::size_t i = 0; i < block_len; ++i) aggregate[b * block_len + i] += block.samples[i];
      for (std::size_t u = 0; u < cfg.psd_users.size(); ++u) {
        if (cfg.psd_users[u] == m) {
          std::copy(block.samples.begin(), block.samples.end(),
                    user_streams[u].begin() + static_cast<std::ptrdiff_t>(b * block_len));
        }
      }
    }
  });

  std::vector<PsdResult> out;
  for (std::size_t u = 0; u < cfg.psd_users.size(); ++u) {
    out.push_back({"user" + std::to_string(cfg.psd_users[u]), welch_psd(user_streams[u], n, 0.5)});
  }
  out.push_back({"aggregate", welch_psd(aggregate, n, 0.5)});
  return out;
}

inline void write_psd_csv(const ExperimentConfig& cfg, const std::vector<PsdResult>& results) {
  auto out = open_output(cfg.out_dir / "psd.csv");
  std::vector<std::string> extra = {
      "scheme: P-OFDMA, N=" + std::to_string(cfg.psd_n) + ", K=" + std::to_string(cfg.psd_k) + ", modulation=" +
          std::to_string(cfg.modulations.front()) + ", blocks=" + std::to_string(cfg.psd_block_count()) +
          ", cyclic prefix included",
      "welch: hann window, segment=" + std::to_string(cfg.psd_n) + ", overlap=0.5",
      "psd_db: 10log10 of mean power per bin; bins sum to the mean sample power; bin is the FFT-shifted position",
      "streams: userX is the user with offset X; aggregate is the sum over all users"};
  write_metadata(out, cfg, "psd", extra);
  out << "stream_id,bin,freq_norm,psd_db\n";
  for (const auto& r : results) {
    for (std::size_t j = 0; j < r.psd.bins(); ++j) {
      out << r.stream_id << ',' << j << ',' << r.psd.freq_norm[j] << ',' << r.psd.power_db(j) << '\n';
    }
  }
}

inline std::vector<PsdResult> run_psd_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_output_dir(cfg.out_dir);
  auto results = compute_psd(cfg);
  write_psd_csv(cfg, results);
  return results;
}

// ---------------------------------------------------------------------------
// Complexity

inline std::vector<ComplexityReport> run_complexity_report(const ExperimentConfig& cfg) {
  ensure_output_dir(cfg.out_dir);
  const auto rows = reference_table_rows();
  const auto table = complexity_table(rows);
  {
    auto out = open_output(cfg.out_dir / "complexity.csv");
    out << "# tool: " << kToolVersion << '\n'
        << "# experiment: complexity\n"
        << "# counts: complex operations for radix-2 FFTs; tx per user, rx total at the base station, tot = K*tx + rx\n";
    write_complexity_csv(out, table);
  }
  auto out = open_output(cfg.out_dir / "complexity.txt");
  out << "Complex multiplications (Tx per user, Rx total at base station)\n\n";
  out << format_multiplication_table(rows) << '\n';
  out << "Closed-form totals vs K*tx + rx aggregation\n";
  out << std::setw(6) << "N" << std::setw(6) << "M" << std::setw(10) << "scheme" << std::setw(12) << "closed_mult"
      << std::setw(12) << "agg_mult" << std::setw(12) << "closed_add" << std::setw(12) << "agg_add" << std::setw(7)
      << "match" << '\n';
  for (const auto& [n, k] : rows) {
    for (Scheme s : {Scheme::Ofdma, Scheme::POfdma}) {
      const auto [cm, ca] = total_counts(s, n, n / k);
      const auto agg = op_counts(s, n, k);
      out << std::setw(6) << n << std::setw(6) << n / k << std::setw(10) << to_string(s) << std::setw(12) << cm
          << std::setw(12) << agg.tot_mult << std::setw(12) << ca << std::setw(12) << agg.tot_add << std::setw(7)
          << (cm == agg.tot_mult && ca == agg.tot_add ? "yes" : "NO") << '\n';
    }
  }
  const auto [om, oa] = total_counts(Scheme::Ofdma, 1024, 16);
  const auto [pm, pa] = total_counts(Scheme::POfdma, 1024, 16);
  out << "\nN=1024, M=16: OFDMA/P-OFDMA total multiplications " << static_cast<double>(om) / static_cast<double>(pm)
      << "x, additions " << static_cast<double>(oa) / static_cast<double>(pa) << "x\n";
  return table;
}

}  // namespace pofdma::harness
