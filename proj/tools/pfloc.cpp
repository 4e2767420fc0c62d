// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0
//
// pfloc command-line tool: pfaffians, XY-chain correlators, decay-bound
// fuzzing, and disorder-ensemble runs, all from JSON configs with seeded
// determinism.
//
// Exit codes (stable API):
//   0 ok, 2 parse error, 3 structural error, 4 route disagreement,
//   5 bound violation, 6 skip overflow, 1 anything else.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfloc/bounds.hpp"
#include "pfloc/ensemble.hpp"
#include "pfloc/io.hpp"
#include "pfloc/quasifree.hpp"
#include "pfloc/rng.hpp"
#include "pfloc/skewlin.hpp"
#include "pfloc/version.hpp"
#include "pfloc/xychain.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pfloc;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitStructure = 3;
constexpr int kExitRoute = 4;
constexpr int kExitViolation = 5;
constexpr int kExitSkip = 6;

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest_sidecar(const fs::path& dir, const io::Manifest& m) {
  fs::create_directories(dir);
  io::write_file((dir / "manifest.json").string(), m.to_json(true, now_utc()).dump(2) + "\n");
}

int run_pf(const std::string& matrix_file) {
  const std::string text = io::read_file(matrix_file);
  const json j = io::parse_json(text, "matrix file");
  const skewlin::Matrix m = io::matrix_from_json(j);
  if (m.rows() % 2 != 0)
    throw structural_error(
        "odd dimension: the pfaffian of an odd-dimensional skew matrix is 0 by convention; "
        "this tool rejects odd input rather than returning the conventional value");
  const auto skew = skewlin::SkewMatrix::from_dense(m);
  const skewlin::Complex pf = skewlin::pfaffian_elimination(skew);
  std::cout << json{{"re", pf.real()}, {"im", pf.imag()}}.dump() << "\n";
  return kExitOk;
}

struct ChainCorrConfig {
  xychain::ChainParams chain;
  xychain::StateSpec state;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> times;
  std::vector<std::pair<int, int>> observables;
};

ChainCorrConfig parse_chain_corr(const json& j) {
  ChainCorrConfig c;
  c.chain = io::chain_params_from_json(j.at("chain"));
  c.state = io::state_spec_from_json(j.at("state"));
  for (const auto& p : j.at("pairs")) c.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  c.times = j.at("times").get<std::vector<double>>();
  if (j.contains("observables")) {
    for (const auto& o : j.at("observables"))
      c.observables.emplace_back(o.at(0).get<int>(), o.at(1).get<int>());
  } else {
    for (int w = 1; w <= 3; ++w)
      for (int wp = 1; wp <= 3; ++wp) c.observables.emplace_back(w, wp);
  }
  if (c.pairs.empty() || c.times.empty()) throw io_error("chain-corr config: pairs and times required");
  return c;
}

int run_chain_corr(const std::string& config_file, const std::string& route,
                   const std::optional<std::string>& out_dir) {
  const std::string text = io::read_file(config_file);
  const ChainCorrConfig cfg = parse_chain_corr(io::parse_json(text, "chain-corr config"));
  const auto kernel = quasifree::Kernel::make(cfg.chain, cfg.state);

  std::vector<io::CorrelatorRow> rows;
  double worst_route_gap = 0.0;
  for (double t : cfg.times) {
    const auto slice = quasifree::CorrelationSlice::make(kernel, t);
    for (auto [xi, eta] : cfg.pairs) {
      for (auto [w, wp] : cfg.observables) {
        skewlin::Complex v;
        if (wp == 0) {
          // single-site expectation <sigma^w_xi>; eta and t are ignored
          v = (w == 3) ? skewlin::Complex(quasifree::sigma3_expectation(kernel, xi), 0.0)
                       : quasifree::sigma12_expectation(kernel, xi, w);
        } else if (w == 3 || wp == 3) {
          v = quasifree::truncated_correlation(slice, xi, eta, w, wp);
        } else {
          const bool want_direct = route == "direct" || route == "both";
          const bool want_twisted = route == "twisted" || route == "both";
          skewlin::Complex direct, twisted;
          if (want_direct) direct = quasifree::sigma12_correlation_direct(kernel, xi, eta, t, w, wp);
          if (want_twisted)
            twisted = quasifree::sigma12_correlation_twisted(kernel, xi, eta, t, w, wp);
          if (route == "both") worst_route_gap = std::max(worst_route_gap, std::abs(direct - twisted));
          v = want_direct ? direct : twisted;
        }
        rows.push_back({xi, eta, t, w, wp, v.real(), v.imag()});
      }
    }
  }
  if (route == "both" && worst_route_gap > 1e-9) {
    std::cerr << "route disagreement: |direct - twisted| = " << worst_route_gap
              << " exceeds 1e-9; this is a correctness alarm, not a usage error\n";
    return kExitRoute;
  }

  const auto manifest = io::make_manifest("chain-corr", text, 0);
  const std::string csv = io::correlators_csv(rows, manifest);
  if (out_dir) {
    write_manifest_sidecar(*out_dir, manifest);
    io::write_file((fs::path(*out_dir) / "correlators.csv").string(), csv);
  } else {
    std::cout << csv;
  }
  return kExitOk;
}

// Bound fuzzers. Trial 0 is a fixed equality sanity case; later trials draw
// random inputs from seeded substreams.
bounds::BoundReport det_trial(std::uint64_t seed, std::uint64_t trial) {
  using skewlin::Complex;
  using skewlin::Matrix;
  if (trial == 0) {
    Matrix m = Matrix::Identity(7, 7);
    const auto blocks = bounds::split_det_blocks(m, 3);
    return bounds::BoundReport::make(1.0, bounds::bordered_det_rhs(blocks),
                                     json{{"kind", "det"}, {"trial", 0}, {"case", "identity"}});
  }
  rng::Stream s(seed, trial, 0x646574ULL);  // "det"
  const int m_dim = 2 + static_cast<int>(s.below(59));
  Matrix m(m_dim, m_dim);
  for (int i = 0; i < m_dim; ++i)
    for (int j = 0; j < m_dim; ++j) m(i, j) = Complex(s.gaussian(), s.gaussian());
  m /= skewlin::spectral_norm(m);
  const int p = static_cast<int>(s.below(static_cast<std::uint64_t>(m_dim)));
  const auto blocks = bounds::split_det_blocks(m, p);
  const double lhs = std::abs(Eigen::PartialPivLU<Matrix>(m).determinant());
  const double rhs = bounds::bordered_det_rhs(blocks);
  return bounds::BoundReport::make(
      lhs, rhs, json{{"kind", "det"}, {"trial", trial}, {"dim", m_dim}, {"p", p}});
}

struct PfTrialOutcome {
  bounds::BoundReport report;
  bool applicable = true;
};

PfTrialOutcome pf_trial(std::uint64_t seed, std::uint64_t trial) {
  using skewlin::Complex;
  using skewlin::Matrix;
  PfTrialOutcome out;
  if (trial == 0) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    const auto blocks = bounds::split_pf_blocks(m, 0);
    out.report = bounds::BoundReport::make(1.0, bounds::pfaffian_bound_rhs(1.0, blocks),
                                           json{{"kind", "pf"}, {"trial", 0}, {"case", "alpha-only"}});
    return out;
  }
  rng::Stream s(seed, trial, 0x7066ULL);  // "pf"
  skewlin::SkewMatrix wick(0);
  if (trial % 10 == 9) {
    // Deliberately non-quasi-free input: random skew matrix with large
    // entries. It is expected to fail certification and count as
    // inapplicable; if it happens to certify, the bound applies to it too.
    const int dim = 2 * (2 + static_cast<int>(s.below(6)));
    skewlin::SkewMatrix m(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) m.set(i, j, Complex(3 * s.gaussian(), 3 * s.gaussian()));
    wick = m;
  } else {
    // Wick matrix of a random chain/state over a random Majorana string.
    const int n = 2 + static_cast<int>(s.below(7));  // sites
    xychain::ChainParams p;
    p.N = n;
    for (int i = 0; i + 1 < n; ++i) {
      p.mu.push_back(s.uniform(0.5, 1.5));
      p.gamma.push_back(s.uniform(-0.8, 0.8));
    }
    for (int i = 0; i < n; ++i) p.nu.push_back(s.uniform(0.4, 1.6));
    const auto state = (trial % 2 == 0) ? xychain::StateSpec::thermal(s.uniform(0.5, 2.0))
                                        : xychain::StateSpec::ground_state();
    const auto kernel = quasifree::Kernel::make(p, state);
    const int half = std::min(n + 1, 2 + static_cast<int>(s.below(7)));
    const double t = s.uniform(0.0, 2.0);
    std::vector<quasifree::MajoranaEvent> events;
    std::vector<char> used(static_cast<std::size_t>(4 * n), 0);
    while (static_cast<int>(events.size()) < 2 * half) {
      const int site = 1 + static_cast<int>(s.below(static_cast<std::uint64_t>(n)));
      const auto flavor = s.bit() ? quasifree::Flavor::plus : quasifree::Flavor::minus;
      const int slot = s.bit();  // time slot: 0 or t
      const int key = ((site - 1) * 2 + (flavor == quasifree::Flavor::minus)) * 2 + slot;
      if (used[static_cast<std::size_t>(key)]) continue;
      used[static_cast<std::size_t>(key)] = 1;
      events.push_back({site, flavor, slot == 0 ? 0.0 : t});
    }
    const int dim = static_cast<int>(events.size());
    skewlin::SkewMatrix m(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        m.set(i, j, quasifree::two_point(kernel, events[static_cast<std::size_t>(i)],
                                         events[static_cast<std::size_t>(j)]));
    wick = m;
  }

  const double m0 = 1.0;
  if (!bounds::correlation_depth_check(wick, 2, m0)) {
    out.applicable = false;
    out.report = bounds::BoundReport::make(
        0.0, 0.0, json{{"kind", "pf"}, {"trial", trial}, {"inapplicable", true}});
    return out;
  }
  const int p_split = static_cast<int>(s.below(static_cast<std::uint64_t>(wick.dim() / 2)));
  const auto blocks = bounds::split_pf_blocks(wick.entries(), p_split);
  const double lhs = std::abs(skewlin::pfaffian_elimination(wick));
  const double rhs = bounds::pfaffian_bound_rhs(m0, blocks);
  out.report = bounds::BoundReport::make(
      lhs, rhs, json{{"kind", "pf"}, {"trial", trial}, {"dim", wick.dim()}, {"p", p_split}});
  return out;
}

int run_verify_bounds(const std::string& kind, int trials, std::uint64_t seed,
                      const std::optional<std::string>& out_dir) {
  if (trials < 1) throw parameter_error("verify-bounds: trials must be >= 1");
  if (kind != "det" && kind != "pf") throw parameter_error("verify-bounds: kind must be det or pf");

  std::ostringstream lines;
  int violations = 0;
  int inapplicable = 0;
  for (int i = 0; i < trials; ++i) {
    bounds::BoundReport rep;
    if (kind == "det") {
      rep = det_trial(seed, static_cast<std::uint64_t>(i));
    } else {
      const auto outcome = pf_trial(seed, static_cast<std::uint64_t>(i));
      if (!outcome.applicable) {
        ++inapplicable;
        lines << io::bound_report_to_json(outcome.report).dump() << "\n";
        continue;
      }
      rep = outcome.report;
    }
    if (!rep.satisfied) ++violations;
    lines << io::bound_report_to_json(rep).dump() << "\n";
  }
  const json summary{{"kind", kind},
                     {"trials", trials},
                     {"violations", violations},
                     {"inapplicable", inapplicable},
                     {"seed", seed}};
  const std::string payload = lines.str() + summary.dump() + "\n";
  if (out_dir) {
    const auto manifest = io::make_manifest("verify-bounds", kind + ":" + std::to_string(trials), seed);
    write_manifest_sidecar(*out_dir, manifest);
    io::write_file((fs::path(*out_dir) / "reports.jsonl").string(), payload);
  } else {
    std::cout << payload;
  }
  if (violations > 0) {
    std::cerr << violations << " bound violation(s); the inequalities are proven, so this "
              << "indicates a bug\n";
    return kExitViolation;
  }
  return kExitOk;
}

int run_ensemble_cmd(const std::string& config_file, std::optional<std::uint64_t> seed_override,
                     const std::optional<std::string>& out_dir, std::optional<int> workers) {
  const std::string text = io::read_file(config_file);
  auto cfg = io::ensemble_config_from_json(io::parse_json(text, "ensemble config"));
  if (seed_override) cfg.seed = *seed_override;
  if (workers) cfg.workers = *workers;

  const auto result = ensemble::run_ensemble(cfg);
  const auto manifest = io::make_manifest("ensemble", io::ensemble_config_to_json(cfg).dump(), cfg.seed);
  const std::string csv = io::ensemble_csv(result, manifest);

  // Decay fits per observable over the pair distances, where enough strictly
  // positive means exist.
  json fits = json::array();
  for (auto [w, wp] : cfg.observables) {
    std::vector<int> distances;
    std::vector<double> means;
    for (const auto& s : result.stats) {
      if (s.w != w || s.wp != wp) continue;
      distances.push_back(s.distance);
      means.push_back(s.mean);
    }
    json entry{{"w", w}, {"w2", wp}};
    try {
      const auto fit = ensemble::fit_decay(distances, means);
      entry["fit"] = io::decay_fit_to_json(fit);
    } catch (const error& e) {
      entry["fit"] = nullptr;
      entry["fit_error"] = e.what();
    }
    fits.push_back(std::move(entry));
  }
  const json summary{{"manifest", manifest.to_json(false)},
                     {"config", io::ensemble_config_to_json(cfg)},
                     {"requested", result.requested},
                     {"skipped", result.skipped},
                     {"fits", fits}};

  if (out_dir) {
    write_manifest_sidecar(*out_dir, manifest);
    io::write_file((fs::path(*out_dir) / "ensemble.csv").string(), csv);
    io::write_file((fs::path(*out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  } else {
    std::cout << csv;
    std::cout << summary.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfloc: pfaffian correlators and decay bounds for disordered XY chains"};
  app.set_version_flag("--version", std::string(pfloc::kVersion));
  app.require_subcommand(1);

  std::string matrix_file;
  auto* pf_cmd = app.add_subcommand("pf", "pfaffian of a skew matrix from a JSON file");
  pf_cmd->add_option("matrix", matrix_file, "matrix JSON file")->required();

  std::string corr_config;
  std::string route = "direct";
  std::string corr_out;
  auto* corr_cmd = app.add_subcommand("chain-corr", "spin correlators of one chain");
  corr_cmd->add_option("--config", corr_config, "config JSON file")->required();
  corr_cmd->add_option("--route", route, "correlator route for the 12-plane")
      ->check(CLI::IsMember({"direct", "twisted", "both"}));
  corr_cmd->add_option("--out", corr_out, "output directory (default: stdout)");

  std::string kind = "det";
  int trials = 1000;
  std::uint64_t vb_seed = 1;
  std::string vb_out;
  auto* vb_cmd = app.add_subcommand("verify-bounds", "fuzz the determinant/pfaffian bounds");
  vb_cmd->add_option("--kind", kind, "det or pf")->check(CLI::IsMember({"det", "pf"}));
  vb_cmd->add_option("--trials", trials, "number of trials");
  vb_cmd->add_option("--seed", vb_seed, "RNG seed");
  vb_cmd->add_option("--out", vb_out, "output directory (default: stdout)");

  std::string ens_config;
  std::string ens_out;
  std::uint64_t ens_seed = 0;
  bool ens_seed_set = false;
  int ens_workers = 0;
  auto* ens_cmd = app.add_subcommand("ensemble", "disorder Monte Carlo over chains");
  ens_cmd->add_option("--config", ens_config, "EnsembleConfig JSON file")->required();
  ens_cmd->add_option("--out", ens_out, "output directory (default: stdout)");
  ens_cmd->add_option("--seed", ens_seed, "override the config seed")
      ->each([&](const std::string&) { ens_seed_set = true; });
  ens_cmd->add_option("--workers", ens_workers, "worker threads (results are unaffected)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pf_cmd->parsed()) return run_pf(matrix_file);
    if (corr_cmd->parsed())
      return run_chain_corr(corr_config, route,
                            corr_out.empty() ? std::nullopt : std::optional(corr_out));
    if (vb_cmd->parsed())
      return run_verify_bounds(kind, trials, vb_seed,
                               vb_out.empty() ? std::nullopt : std::optional(vb_out));
    if (ens_cmd->parsed())
      return run_ensemble_cmd(ens_config, ens_seed_set ? std::optional(ens_seed) : std::nullopt,
                              ens_out.empty() ? std::nullopt : std::optional(ens_out),
                              ens_workers > 0 ? std::optional(ens_workers) : std::nullopt);
  } catch (const pfloc::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const pfloc::structural_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStructure;
  } catch (const pfloc::skip_overflow_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSkip;
  } catch (const pfloc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
