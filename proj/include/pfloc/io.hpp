// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pfloc/bounds.hpp"
#include "pfloc/ensemble.hpp"
#include "pfloc/errors.hpp"
#include "pfloc/skewlin.hpp"
#include "pfloc/version.hpp"
#include "pfloc/xychain.hpp"

namespace pfloc::io {

using nlohmann::json;
using skewlin::Complex;
using skewlin::Matrix;

/// 17 significant digits: lossless round trip for finite doubles in CSV.
inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Matrix exchange format: {"dim": n, "entries": [[re, im], ...]} row-major.
// nlohmann serializes doubles with shortest-round-trip precision, so finite
// values survive a write/read cycle bit for bit.

inline json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw io_error("matrix json: expected an object with 'dim' and 'entries'");
  const auto dim = j.at("dim").get<Eigen::Index>();
  if (dim < 0) throw io_error("matrix json: negative dimension");
  const auto& entries = j.at("entries");
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != dim * dim)
    throw io_error("matrix json: 'entries' must hold dim*dim [re, im] pairs");
  Matrix m(dim, dim);
  Eigen::Index k = 0;
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 2) throw io_error("matrix json: entry is not [re, im]");
    m(k / dim, k % dim) = Complex(e[0].get<double>(), e[1].get<double>());
    ++k;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Chain / state / disorder / ensemble configs

inline json chain_params_to_json(const xychain::ChainParams& p) {
  return json{{"N", p.N}, {"mu", p.mu}, {"gamma", p.gamma}, {"nu", p.nu}};
}

inline xychain::ChainParams chain_params_from_json(const json& j) {
  xychain::ChainParams p;
  try {
    p.N = j.at("N").get<int>();
    p.mu = j.at("mu").get<std::vector<double>>();
    p.gamma = j.at("gamma").get<std::vector<double>>();
    p.nu = j.at("nu").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw io_error(std::string("chain params json: ") + e.what());
  }
  p.validate();
  return p;
}

inline json field_distribution_to_json(const xychain::FieldDistribution& f) {
  using K = xychain::FieldDistribution::Kind;
  switch (f.kind) {
    case K::uniform: return json{{"kind", "uniform"}, {"a", f.p1}, {"b", f.p2}};
    case K::gaussian: return json{{"kind", "gaussian"}, {"mean", f.p1}, {"stddev", f.p2}};
    case K::constant: return json{{"kind", "constant"}, {"c", f.p1}};
  }
  throw io_error("field distribution: unknown kind");
}

inline xychain::FieldDistribution field_distribution_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform")
    return xychain::FieldDistribution::uniform(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "gaussian")
    return xychain::FieldDistribution::gaussian(j.at("mean").get<double>(),
                                                j.at("stddev").get<double>());
  if (kind == "constant") return xychain::FieldDistribution::constant(j.at("c").get<double>());
  throw io_error("field distribution json: unknown kind '" + kind + "'");
}

inline json disorder_spec_to_json(const xychain::DisorderSpec& d) {
  return json{{"field_distribution", field_distribution_to_json(d.field_distribution)},
              {"mu_value", d.mu_value},
              {"gamma_value", d.gamma_value},
              {"seed", d.seed}};
}

inline xychain::DisorderSpec disorder_spec_from_json(const json& j) {
  xychain::DisorderSpec d;
  try {
    d.field_distribution = field_distribution_from_json(j.at("field_distribution"));
    d.mu_value = j.at("mu_value").get<double>();
    d.gamma_value = j.at("gamma_value").get<double>();
    d.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw io_error(std::string("disorder spec json: ") + e.what());
  }
  return d;
}

inline json state_spec_to_json(const xychain::StateSpec& s) {
  using K = xychain::StateSpec::Kind;
  switch (s.kind) {
    case K::thermal: return json{{"kind", "thermal"}, {"beta", s.beta}};
    case K::ground_state: return json{{"kind", "ground_state"}};
    case K::eigenstate: {
      json out{{"kind", "eigenstate"}};
      if (!s.alpha.empty()) out["alpha"] = s.alpha;
      return out;
    }
    case K::twisted_thermal: return json{{"kind", "twisted_thermal"}, {"beta", s.beta}};
  }
  throw io_error("state spec: unknown kind");
}

inline xychain::StateSpec state_spec_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "thermal") return xychain::StateSpec::thermal(j.at("beta").get<double>());
    if (kind == "ground_state") return xychain::StateSpec::ground_state();
    if (kind == "eigenstate") {
      std::vector<int> alpha;
      if (j.contains("alpha")) alpha = j.at("alpha").get<std::vector<int>>();
      // An absent alpha means "resample per realization" for ensembles.
      return xychain::StateSpec::eigenstate(std::move(alpha));
    }
    if (kind == "twisted_thermal")
      return xychain::StateSpec::twisted_thermal(j.at("beta").get<double>());
  } catch (const json::exception& e) {
    throw io_error(std::string("state spec json: ") + e.what());
  }
  throw io_error("state spec json: unknown kind '" + kind + "'");
}

inline json ensemble_config_to_json(const ensemble::EnsembleConfig& c) {
  json pairs = json::array();
  for (auto [a, b] : c.pairs) pairs.push_back({a, b});
  json obs = json::array();
  for (auto [a, b] : c.observables) obs.push_back({a, b});
  return json{{"N", c.N},
              {"realizations", c.realizations},
              {"disorder", disorder_spec_to_json(c.disorder)},
              {"state", state_spec_to_json(c.state)},
              {"time_grid", c.time_grid},
              {"pairs", std::move(pairs)},
              {"observables", std::move(obs)},
              {"seed", c.seed}};
}

inline ensemble::EnsembleConfig ensemble_config_from_json(const json& j) {
  ensemble::EnsembleConfig c;
  try {
    c.N = j.at("N").get<int>();
    c.realizations = j.at("realizations").get<int>();
    c.disorder = disorder_spec_from_json(j.at("disorder"));
    c.state = state_spec_from_json(j.at("state"));
    c.time_grid = j.at("time_grid").get<std::vector<double>>();
    for (const auto& p : j.at("pairs"))
      c.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    for (const auto& o : j.at("observables"))
      c.observables.emplace_back(o.at(0).get<int>(), o.at(1).get<int>());
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
  } catch (const json::exception& e) {
    throw io_error(std::string("ensemble config json: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Reports and results

inline json bound_report_to_json(const bounds::BoundReport& r) {
  return json{{"lhs", r.lhs},
              {"rhs", r.rhs},
              {"satisfied", r.satisfied},
              {"margin", r.margin},
              {"context", r.context}};
}

inline json decay_fit_to_json(const ensemble::DecayFit& f) {
  return json{{"rate", f.rate},
              {"log_prefactor", f.log_prefactor},
              {"r_squared", f.r_squared},
              {"distances", f.distances},
              {"means", f.means}};
}

// ---------------------------------------------------------------------------
// Run manifest. The timestamp lives only in the sidecar manifest file so that
// primary outputs are byte-identical across reruns of an identical config.

struct Manifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string tool_version = kVersion;

  json to_json(bool with_timestamp, const std::string& timestamp = {}) const {
    json j{{"command", command},
           {"config_digest", config_digest},
           {"seed", seed},
           {"tool_version", tool_version}};
    if (with_timestamp) j["timestamp"] = timestamp;
    return j;
  }

  /// '#'-prefixed header lines embedded at the top of CSV outputs.
  std::string csv_header() const {
    std::ostringstream os;
    os << "# command=" << command << " config_digest=" << config_digest << " seed=" << seed
       << " tool_version=" << tool_version << "\n";
    return os.str();
  }
};

inline Manifest make_manifest(const std::string& command, const std::string& config_text,
                              std::uint64_t seed) {
  Manifest m;
  m.command = command;
  m.config_digest = hex64(fnv1a64(config_text));
  m.seed = seed;
  return m;
}

// ---------------------------------------------------------------------------
// CSV writers

struct CorrelatorRow {
  int xi = 0, eta = 0;
  double t = 0.0;
  int w = 0, wp = 0;
  double re = 0.0, im = 0.0;
};

inline std::string correlators_csv(const std::vector<CorrelatorRow>& rows, const Manifest& m) {
  std::ostringstream os;
  os << m.csv_header();
  os << "xi,eta,t,w,w2,re,im\n";
  for (const auto& r : rows)
    os << r.xi << ',' << r.eta << ',' << g17(r.t) << ',' << r.w << ',' << r.wp << ','
       << g17(r.re) << ',' << g17(r.im) << '\n';
  return os.str();
}

inline std::string ensemble_csv(const ensemble::EnsembleResult& res, const Manifest& m) {
  std::ostringstream os;
  os << m.csv_header();
  os << "pair_xi,pair_eta,w,w2,distance,mean,stderr,n_effective\n";
  for (const auto& s : res.stats)
    os << s.xi << ',' << s.eta << ',' << s.w << ',' << s.wp << ',' << s.distance << ','
       << g17(s.mean) << ',' << g17(s.stderr_) << ',' << s.n_effective << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("write to '" + path + "' failed");
}

inline json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw io_error(what + ": malformed JSON");
  return j;
}

}  // namespace pfloc::io
