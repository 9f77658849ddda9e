// Copyright 2026 The Footprint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: classifier privacy audits, obfuscation sweeps,
// risk-gap verification and artifact emission.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "footprint/harness.hpp"
#include "footprint/shiftlab.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

namespace {

using footprint::ExperimentConfig;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<double> threshold;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "experiment config (JSON)");
  cmd->add_option("--seed", opts->seed, "single seed overriding the config seed list");
  cmd->add_option("--out", opts->out_dir, "output directory");
  cmd->add_option("--format", opts->format, "csv|json|svg (repeatable as comma list)")
      ->check(CLI::IsMember({"csv", "json", "svg", "csv,json", "csv,svg", "json,svg", "csv,json,svg"}));
  cmd->add_option("--threshold", opts->threshold, "vulnerability flag threshold");
}

ExperimentConfig load_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (opts.config_path.empty()) {
    cfg = footprint::default_config();
  } else {
    std::ifstream in(opts.config_path);
    if (!in) throw footprint::Error("cannot open config " + opts.config_path);
    json j;
    in >> j;
    cfg = footprint::config_from_json(j);
  }
  if (opts.seed) cfg.seeds = {*opts.seed};
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  if (opts.threshold) cfg.threshold = *opts.threshold;
  if (opts.format) {
    cfg.formats.clear();
    std::stringstream ss(*opts.format);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.formats.push_back(item);
  }
  return cfg;
}

int emit_and_summarize(const footprint::AuditReport& report, const ExperimentConfig& cfg) {
  const auto written = footprint::emit_report(report, cfg.out_dir, cfg.formats);
  int failures = 0;
  for (const auto& c : report.cells) failures += !c.ok;
  for (const auto& p : report.sweep) failures += !p.ok;
  std::cout << "cells: " << report.cells.size() << ", sweep points: " << report.sweep.size()
            << ", failed: " << failures << "\n";
  for (const auto& f : written) std::cout << "wrote " << f << "\n";
  return 0;
}

void print_exp1_summary(const footprint::AuditReport& report) {
  for (const auto& d : report.dataset_order) {
    std::cout << d << ":\n";
    for (const auto& c : report.classifier_order) {
      const auto agg = report.aggregate(d, c, "none");
      if (!agg) {
        std::cout << "  " << c << ": failed\n";
        continue;
      }
      std::cout << "  " << c << ": vul=" << footprint::format_fixed(agg->mean_vul, 3)
                << (footprint::classify_vulnerable(agg->mean_vul, report.threshold)
                        ? "  [vulnerable]"
                        : "")
                << "\n";
    }
  }
}

ExperimentConfig without_codecs(ExperimentConfig cfg) {
  cfg.codecs = {"none"};
  return cfg;
}

// SHA-256 hex digest via OpenSSL.
std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string https_get(const std::string& host, const std::string& path) {
  httplib::SSLClient client(host);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  auto res = client.Get(path);
  if (!res) throw footprint::Error("download failed: " + host + path + " (" +
                                   httplib::to_string(res.error()) + ")");
  if (res->status != 200) {
    throw footprint::Error("download failed: " + host + path + " (HTTP " +
                           std::to_string(res->status) + ")");
  }
  return res->body;
}

// Fetches the UCI optical-digits train+test sections, verifies structure and
// optional pinned checksums, and merges them into one CSV.
int fetch_optdigits(const std::string& out_dir, const std::string& sha_tra,
                    const std::string& sha_tes) {
  const std::string host = "archive.ics.uci.edu";
  const std::string base = "/ml/machine-learning-databases/optdigits/";
  const std::string tra = https_get(host, base + "optdigits.tra");
  const std::string tes = https_get(host, base + "optdigits.tes");

  auto verify = [](const std::string& body, const std::string& expected, const std::string& name) {
    const std::string actual = sha256_hex(body);
    std::cout << name << " sha256=" << actual << "\n";
    if (!expected.empty() && expected != actual) {
      throw footprint::Error(name + ": checksum mismatch (expected " + expected + ")");
    }
  };
  verify(tra, sha_tra, "optdigits.tra");
  verify(tes, sha_tes, "optdigits.tes");

  std::filesystem::create_directories(out_dir);
  const std::string merged_path = out_dir + "/optdigits.csv";
  {
    std::ofstream out(merged_path, std::ios::binary);
    out << tra << tes;
  }
  footprint::LoadCsvOptions opts;
  opts.has_header = false;
  const footprint::Dataset d = footprint::load_csv(merged_path, "last", opts);
  if (d.n_points() != 5620 || d.n_features() != 64 || d.n_classes != 10) {
    throw footprint::Error("optdigits: unexpected shape after merge: " +
                           std::to_string(d.n_points()) + "x" + std::to_string(d.n_features()) +
                           ", " + std::to_string(d.n_classes) + " classes");
  }
  std::cout << "wrote " << merged_path << " (" << d.n_points() << " points, " << d.n_features()
            << " features, " << d.n_classes << " classes)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"footprint: classifier privacy audit toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* audit = app.add_subcommand("audit", "vulnerability matrix across datasets and classifiers");
  add_common(audit, &opts);

  auto* sweep = app.add_subcommand("sweep", "MLP depth/width vulnerability sweeps");
  add_common(sweep, &opts);

  auto* obf = app.add_subcommand("obfuscate-audit", "vulnerability change under LSH/Hamming codecs");
  add_common(obf, &opts);
  bool emit_codecs = false;
  obf->add_flag("--emit-codecs", emit_codecs, "write fitted codec JSON per (dataset, seed)");

  auto* tradeoff = app.add_subcommand("tradeoff", "privacy-performance trade-off tables");
  add_common(tradeoff, &opts);

  auto* verify = app.add_subcommand("verify-shift", "risk-gap decompositions vs direct differences");
  int trials = 1000;
  std::uint64_t verify_seed = 1;
  std::string instance_path, dump_dir;
  verify->add_option("--trials", trials, "random instances per shift kind");
  verify->add_option("--seed", verify_seed, "seed");
  verify->add_option("--instance", instance_path, "verify one instance file instead");
  verify->add_option("--out", dump_dir, "directory for example instance files");

  auto* rep = app.add_subcommand("report", "re-emit artifacts from a saved audit.json bundle");
  std::string bundle_path;
  rep->add_option("--bundle", bundle_path, "audit.json produced by a previous run")->required();
  add_common(rep, &opts);

  auto* fetch = app.add_subcommand("fetch-optdigits", "download the UCI optical digits dataset");
  std::string fetch_out = "data";
  std::string sha_tra, sha_tes;
  fetch->add_option("--out", fetch_out, "output directory");
  fetch->add_option("--sha256-tra", sha_tra, "pinned checksum for optdigits.tra");
  fetch->add_option("--sha256-tes", sha_tes, "pinned checksum for optdigits.tes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (audit->parsed()) {
      const ExperimentConfig cfg = without_codecs(load_config(opts));
      const auto report = footprint::run_audit(cfg, /*with_sweep=*/false);
      print_exp1_summary(report);
      return emit_and_summarize(report, cfg);
    }
    if (sweep->parsed()) {
      ExperimentConfig cfg = without_codecs(load_config(opts));
      const auto report = footprint::run_audit(cfg, /*with_sweep=*/true);
      for (const auto& d : report.dataset_order) {
        for (const std::string axis : {"layers", "neurons"}) {
          const double rho = footprint::sweep_spearman(report, d, axis);
          std::cout << d << " vul-vs-" << axis << " spearman="
                    << (std::isnan(rho) ? "undefined" : footprint::format_fixed(rho, 3)) << "\n";
        }
      }
      return emit_and_summarize(report, cfg);
    }
    if (obf->parsed() || tradeoff->parsed()) {
      const ExperimentConfig cfg = load_config(opts);
      bool any_codec = false;
      for (const auto& c : cfg.codecs) any_codec |= (c != "none");
      if (!any_codec) throw footprint::Error("config: obfuscation runs need lsh and/or hamming codecs");
      const auto report = footprint::run_audit(cfg, /*with_sweep=*/false);
      if (emit_codecs) {
        std::filesystem::create_directories(cfg.out_dir);
        for (const auto& dc : cfg.datasets) {
          for (const auto seed : cfg.seeds) {
            const auto prep = footprint::prepare_dataset(dc, seed);
            const int planes = cfg.lsh_planes > 0 ? cfg.lsh_planes
                                                  : static_cast<int>(prep.train.n_features());
            const std::uint64_t codec_seed =
                footprint::Rng(seed).split("codec").split(prep.dataset).next_u64();
            const auto lsh = footprint::fit_lsh(prep.train.features, planes, codec_seed,
                                                cfg.lsh_origin_anchored);
            const auto ham = footprint::fit_hamming(prep.train.features);
            json codecs{{"lsh", footprint::lsh_to_json(lsh)},
                        {"hamming", footprint::hamming_to_json(ham)}};
            std::ofstream out(cfg.out_dir + "/codecs_" + dc.name + "_" + std::to_string(seed) +
                              ".json");
            out << codecs.dump(2) << "\n";
          }
        }
      }
      return emit_and_summarize(report, cfg);
    }
    if (verify->parsed()) {
      if (!instance_path.empty()) {
        std::ifstream in(instance_path);
        if (!in) throw footprint::Error("cannot open " + instance_path);
        json j;
        in >> j;
        const auto inst = footprint::shiftlab::instance_from_json(j);
        const double analytic = footprint::shiftlab::analytic_gap(inst);
        const double direct =
            footprint::shiftlab::exact_risk(inst.classifier, inst.p_test, inst.loss) -
            footprint::shiftlab::exact_risk(inst.classifier, inst.p_train, inst.loss);
        std::cout << "kind=" << inst.kind << " analytic=" << analytic << " direct=" << direct
                  << " residual=" << std::abs(analytic - direct) << "\n";
        return std::abs(analytic - direct) <= 1e-10 ? 0 : 1;
      }
      const auto report = footprint::shiftlab::verify_prop1(trials, verify_seed);
      for (const auto& c : report.cases) {
        std::cout << c.kind << ": " << c.matches << "/" << c.trials
                  << " analytic-vs-direct matches, worst residual " << c.worst_residual
                  << ", nonzero gaps " << c.nonzero_gaps << "/" << (c.trials - c.degenerate)
                  << ", degenerate-construction gap " << c.degenerate_construction_gap
                  << ", r_test>=r_train in " << c.overfit_direction << "/" << c.trials << "\n";
      }
      std::cout << (report.all_matched ? "PASS" : "FAIL")
                << " worst residual " << report.worst_residual << "\n";
      if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        for (const std::string kind : {"prior", "covariate", "concept"}) {
          footprint::Rng rng = footprint::Rng(verify_seed).split("example").split(kind);
          const auto inst = footprint::shiftlab::random_instance(kind, rng);
          std::ofstream out(dump_dir + "/instance_" + kind + ".json");
          out << footprint::shiftlab::instance_to_json(inst).dump(2) << "\n";
          std::cout << "wrote " << dump_dir << "/instance_" << kind << ".json\n";
        }
      }
      return report.all_matched ? 0 : 1;
    }
    if (rep->parsed()) {
      std::ifstream in(bundle_path);
      if (!in) throw footprint::Error("cannot open bundle " + bundle_path);
      json j;
      in >> j;
      const auto report = footprint::report_from_json(j);
      const std::string out_dir = opts.out_dir.value_or("out");
      std::vector<std::string> formats{"csv", "svg"};
      if (opts.format) {
        formats.clear();
        std::stringstream ss(*opts.format);
        std::string item;
        while (std::getline(ss, item, ',')) formats.push_back(item);
      }
      for (const auto& f : footprint::emit_report(report, out_dir, formats)) {
        std::cout << "wrote " << f << "\n";
      }
      return 0;
    }
    if (fetch->parsed()) {
      return fetch_optdigits(fetch_out, sha_tra, sha_tes);
    }
  } catch (const std::exception& e) {
    const json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
