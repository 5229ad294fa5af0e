#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pofdma/harness/cli.hpp"
#include "pofdma/harness/config.hpp"
#include "pofdma/harness/experiments.hpp"

namespace pofdma::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pofdma_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::istringstream is(slurp(p));
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

TEST(Config, DefaultsMatchReferenceSetup) {
  const ExperimentConfig c = build_config({}, {});
  EXPECT_EQ(c.n, 256u);
  EXPECT_EQ(c.k_values, (std::vector<std::size_t>{16, 32, 64, 128}));
  EXPECT_EQ(c.schemes.size(), 5u);
  EXPECT_EQ(c.modulations, (std::vector<int>{16, 64}));
  EXPECT_EQ(c.snr.points().size(), 11u);
  EXPECT_EQ(c.snr.points().back(), 40.0);
  EXPECT_EQ(c.delay_spreads_ns.size(), 12u);
  EXPECT_EQ(c.ber_k, 64u);
  EXPECT_EQ(c.ber_delay_ns, 300.0);
  EXPECT_EQ(c.cp_for(256), 64u);
  EXPECT_EQ(c.papr_block_count(), 500u);
}

TEST(Config, SnrGridParsing) {
  EXPECT_EQ(parse_snr_grid("snr", "0..40:4").points().size(), 11u);
  EXPECT_EQ(parse_snr_grid("snr", "20").points(), (std::vector<double>{20.0}));
  EXPECT_THROW(parse_snr_grid("snr", "0..40:0"), ConfigError);
  EXPECT_THROW(parse_snr_grid("snr", "a..b:1"), ConfigError);
}

TEST(Config, RejectsNonDividingK) {
  try {
    build_config({}, {{"K", {"17"}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "K");
  }
}

TEST(Config, RejectsUnknownKeyAndMalformedValue) {
  EXPECT_THROW(build_config({{"colour", {"blue"}}}, {}), ConfigError);
  try {
    build_config({}, {{"seed", {"12x"}}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "seed");
  }
  EXPECT_THROW(build_config({}, {{"scheme", {"OFDM"}}}), ConfigError);
  EXPECT_THROW(build_config({}, {{"mod", {"32"}}}), ConfigError);
}

TEST(Config, FileThenCliLayering) {
  const fs::path dir = scratch("layering");
  fs::create_directories(dir);
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "# comment\nsnr = 0..40:4\nseed = 9\nK = 32, 64\nmod = 64\n";
  const auto from_file = read_settings_file(file);
  const auto c = build_config(from_file, {{"seed", {"11"}}});
  EXPECT_EQ(c.snr.points().size(), 11u);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.k_values, (std::vector<std::size_t>{32, 64}));
  EXPECT_EQ(c.modulations, (std::vector<int>{64}));
  EXPECT_THROW(read_settings_file(dir / "missing.cfg"), ConfigError);
}

TEST(Cli, ParsesRepeatableFlags) {
  const auto cl = parse_command_line({"papr", "--K", "16", "--K", "64", "--scheme", "P-OFDMA", "--scheme", "OFDMA",
                                      "--mod", "16", "--snr", "0..8:4", "--delay-ns", "50", "--delay-ns", "300",
                                      "--blocks", "7", "--seed", "5", "--cp-len", "32", "--oversample", "4", "--out",
                                      "x", "--N", "256"});
  EXPECT_EQ(cl.command, "papr");
  EXPECT_EQ(cl.config.k_values, (std::vector<std::size_t>{16, 64}));
  EXPECT_EQ(cl.config.schemes, (std::vector<Scheme>{Scheme::POfdma, Scheme::Ofdma}));
  EXPECT_EQ(cl.config.snr.points().size(), 3u);
  EXPECT_EQ(cl.config.delay_spreads_ns, (std::vector<double>{50, 300}));
  EXPECT_EQ(cl.config.papr_block_count(), 7u);
  EXPECT_EQ(cl.config.seed, 5u);
  EXPECT_EQ(cl.config.cp_for(256), 32u);
  EXPECT_EQ(cl.config.oversample, 4u);
  EXPECT_EQ(cl.config.out_dir, fs::path("x"));
}

TEST(Cli, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"papr", "--K", "17"}, out, err), kExitConfig);
  EXPECT_EQ(run_cli({"papr", "--unknown", "1"}, out, err), kExitConfig);
  EXPECT_EQ(run_cli({}, out, err), kExitConfig);
  EXPECT_EQ(run_cli({"--help"}, out, err), kExitOk);
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "file, not a directory";
  EXPECT_EQ(run_cli({"complexity", "--out", (blocker / "sub").string()}, out, err), kExitIo);
  const fs::path dir = scratch("cli_ok");
  EXPECT_EQ(run_cli({"complexity", "--out", dir.string()}, out, err), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "complexity.csv"));
  EXPECT_TRUE(fs::exists(dir / "complexity.txt"));
}

TEST(Papr, SampleCountIsBlocksTimesUsers) {
  ExperimentConfig cfg;
  cfg.k_values = {64};
  cfg.modulations = {16};
  cfg.schemes = {Scheme::POfdma, Scheme::POfdmaDft};
  cfg.blocks = 500;
  cfg.threads = 2;
  const auto results = compute_papr(cfg);
  ASSERT_EQ(results.size(), 2u);
  for (const auto& r : results) EXPECT_EQ(r.samples.size(), 32000u);
}

TEST(Papr, UnwritableOutputFailsBeforeCompute) {
  ExperimentConfig cfg;
  const fs::path blocker = scratch("papr_blocker");
  std::ofstream(blocker) << "x";
  cfg.out_dir = blocker / "out";
  EXPECT_THROW(run_papr_experiment(cfg), IoError);
}

TEST(Papr, CsvSchemaAndDeterminism) {
  ExperimentConfig cfg;
  cfg.k_values = {64, 128};
  cfg.modulations = {16};
  cfg.blocks = 20;
  cfg.out_dir = scratch("papr_a");
  cfg.threads = 1;
  run_papr_experiment(cfg);
  const auto a = data_lines(cfg.out_dir / "avg_papr.csv");
  ASSERT_EQ(a.size(), 1u + 10u);
  EXPECT_EQ(a[0], "scheme,N,K,modulation,avg_papr_db,samples");
  const auto c = data_lines(cfg.out_dir / "ccdf.csv");
  EXPECT_EQ(c[0], "scheme,N,K,modulation,threshold_db,ccdf");
  EXPECT_EQ(c.size(), 1u + 10u * 141u);
  const auto first_run = slurp(cfg.out_dir / "ccdf.csv") + slurp(cfg.out_dir / "avg_papr.csv");
  cfg.out_dir = scratch("papr_b");
  cfg.threads = 3;
  run_papr_experiment(cfg);
  EXPECT_EQ(first_run, slurp(cfg.out_dir / "ccdf.csv") + slurp(cfg.out_dir / "avg_papr.csv"));
  const auto header = slurp(cfg.out_dir / "avg_papr.csv");
  EXPECT_NE(header.find("# seed: 1"), std::string::npos);
  EXPECT_NE(header.find("# tool: "), std::string::npos);
  EXPECT_NE(header.find("mean of per-block dB"), std::string::npos);
}

TEST(Ber, NoNoiseNoDelayIsErrorFree) {
  BerPointSpec spec;
  spec.snr_db = std::numeric_limits<double>::infinity();
  spec.profile = ChannelProfile{0, 50, -20};
  spec.blocks = 5;
  for (int order : {16, 64}) {
    spec.order = order;
    for (const auto& c : simulate_ber_point(spec)) {
      EXPECT_EQ(c.bit_errors, 0u);
      EXPECT_EQ(c.bits_total, 5u * 64u * 4u * (order == 16 ? 4u : 6u));
    }
  }
}

TEST(Ber, IndependentOfWorkerCount) {
  BerPointSpec spec;
  spec.snr_db = 12;
  spec.blocks = 6;
  spec.threads = 1;
  const auto a = simulate_ber_point(spec);
  spec.threads = 4;
  const auto b = simulate_ber_point(spec);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].bit_errors, b[i].bit_errors);
    EXPECT_GT(a[i].bit_errors, 0u);
  }
}

TEST(Ber, PointsCoverSnrSweepAndDelaySweep) {
  ExperimentConfig cfg;
  cfg.modulations = {16};
  cfg.snr = parse_snr_grid("snr", "0..8:4");
  cfg.delay_spreads_ns = {300, 2000};
  const auto pts = ber_points(cfg);
  EXPECT_EQ(pts.size(), 3u + 2u);
}

TEST(Ber, CsvSchema) {
  ExperimentConfig cfg;
  cfg.modulations = {16};
  cfg.snr = parse_snr_grid("snr", "20");
  cfg.delay_spreads_ns = {300};
  cfg.ber_snr_db = 20;
  cfg.blocks = 2;
  cfg.out_dir = scratch("ber");
  run_ber_experiment(cfg);
  const auto lines = data_lines(cfg.out_dir / "ber.csv");
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "scheme,N,K,modulation,snr_db,delay_ns,ber,bits");
  EXPECT_EQ(lines[1].rfind("OFDMA,256,64,16,20,300,", 0), 0u);
  EXPECT_NE(lines[1].find(",2048"), std::string::npos);
}

TEST(Psd, StreamsAndSupport) {
  ExperimentConfig cfg;
  cfg.psd_blocks = 30;
  cfg.threads = 2;
  const auto res = compute_psd(cfg);
  ASSERT_EQ(res.size(), 3u);
  EXPECT_EQ(res[0].stream_id, "user1");
  EXPECT_EQ(res[1].stream_id, "user32");
  EXPECT_EQ(res[2].stream_id, "aggregate");
  const auto p1 = spectral_peaks(res[0].psd, 15);
  const auto p32 = spectral_peaks(res[1].psd, 15);
  ASSERT_EQ(p1.size(), 16u);
  ASSERT_EQ(p32.size(), 16u);
  for (std::size_t b : p1) EXPECT_EQ(std::count(p32.begin(), p32.end(), b), 0);
  EXPECT_EQ(occupied_bins(res[2].psd, 15).size(), 1024u);
}

TEST(Psd, CsvSchema) {
  ExperimentConfig cfg;
  cfg.psd_blocks = 4;
  cfg.out_dir = scratch("psd");
  run_psd_experiment(cfg);
  const auto lines = data_lines(cfg.out_dir / "psd.csv");
  ASSERT_EQ(lines.size(), 1u + 3u * 1024u);
  EXPECT_EQ(lines[0], "stream_id,bin,freq_norm,psd_db");
  EXPECT_EQ(lines[1].rfind("user1,0,-0.5,", 0), 0u);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw DomainError("boom");
                            }),
               DomainError);
}

}  // namespace
}  // namespace pofdma::harness
