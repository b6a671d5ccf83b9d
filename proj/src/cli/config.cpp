// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pwssim/algos/algos.hpp"
#include "pwssim/cli/experiment.hpp"

namespace pwssim::cli {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("--" + key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("--" + key + ": expected a boolean, got '" + v + "'");
}

std::string canonical(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  return k;
}

const std::vector<std::string>& sweepable() {
  static const std::vector<std::string> v = {"alg",       "sched",      "n",         "p",
                                             "M",         "B",          "hit-cost",  "miss-cost",
                                             "steal-cost", "sched-interval", "padded", "gapped",
                                             "stress",    "seed"};
  return v;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  run.M = 1u << 15;
  run.B = 64;
}

void set_option(ExperimentConfig& c, const std::string& key_in, const std::string& value) {
  std::string key = canonical(key_in);
  std::string v = trim(value);
  auto& r = c.run;
  if (key == "alg") r.alg = v;
  else if (key == "sched") r.sched = sched::parse_sched(v);
  else if (key == "n") r.n = parse_u64(key, v);
  else if (key == "p") {
    std::uint64_t p = parse_u64(key, v);
    if (p < 1 || p > 64) throw ConfigError("--p must be in [1, 64]");
    r.p = static_cast<int>(p);
  } else if (key == "M") r.M = parse_u64(key, v);
  else if (key == "B") r.B = parse_u64(key, v);
  else if (key == "hit-cost") r.cost.hit_cost = static_cast<Tick>(parse_u64(key, v));
  else if (key == "miss-cost") r.cost.miss_cost = static_cast<Tick>(parse_u64(key, v));
  else if (key == "steal-cost") r.cost.steal_cost = static_cast<Tick>(parse_u64(key, v));
  else if (key == "sched-interval") r.cost.sched_interval = static_cast<Tick>(parse_u64(key, v));
  else if (key == "padded") r.padded = parse_bool(key, v);
  else if (key == "gapped") r.gapped = parse_bool(key, v);
  else if (key == "stress") r.stress = parse_bool(key, v);
  else if (key == "seed") {
    r.seed = parse_u64(key, v);
    c.seed_set = true;
  } else if (key == "trace") c.trace = parse_bool(key, v);
  else if (key == "out-dir") c.out_dir = v;
  else if (key == "sweep") add_sweep_axis(c, v);
  else if (key == "sweep-cap") c.sweep_cap = parse_u64(key, v);
  else throw ConfigError("unknown option '" + key_in + "'");
}

void add_sweep_axis(ExperimentConfig& c, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("--sweep expects axis=v1,v2,... got '" + spec + "'");
  std::string axis = canonical(trim(spec.substr(0, eq)));
  if (std::find(sweepable().begin(), sweepable().end(), axis) == sweepable().end())
    throw ConfigError("cannot sweep over '" + axis + "'");
  std::vector<std::string> vals;
  std::stringstream ss(spec.substr(eq + 1));
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) throw ConfigError("--sweep " + axis + ": empty value");
    vals.push_back(item);
  }
  if (vals.empty()) throw ConfigError("--sweep " + axis + ": no values");
  for (const auto& [a, v] : c.sweep)
    if (a == axis) throw ConfigError("--sweep " + axis + " given twice");
  c.sweep.emplace_back(axis, std::move(vals));
}

void load_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (canonical(key) == "sweep") {
      add_sweep_axis(c, val);
      continue;
    }
    try {
      set_option(c, key, val);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void validate(const ExperimentConfig& c) {
  const auto& r = c.run;
  if (r.alg.empty()) throw ConfigError("--alg is required");
  const auto& spec = algos::find(r.alg);
  if (r.n == 0) throw ConfigError("--n is required and must be >= 1");
  if (!is_pow2(r.n)) throw ConfigError("--n must be a power of two");
  algos::validate_size(spec, r.n);
  if (!c.seed_set) throw ConfigError("--seed is required");
  mem::MachineConfig mc;
  mc.p = r.p;
  mc.M = r.M;
  mc.B = r.B;
  mc.cost = r.cost;
  mc.validate();
  if (r.gapped && spec.alg != algos::Alg::BiToRmDirect && spec.alg != algos::Alg::BiToRmGapped)
    throw ConfigError("--gapped applies only to bi_to_rm_direct / bi_to_rm_gapped");
  if (r.sched == sched::SchedKind::Seq && r.p != 1) throw ConfigError("--sched seq needs --p 1");
}

}  // namespace pwssim::cli
