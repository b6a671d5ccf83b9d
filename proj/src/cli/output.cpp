// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "pwssim/algos/algos.hpp"
#include "pwssim/cli/experiment.hpp"

namespace pwssim::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s + '\n';
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

std::string counters_csv(const std::vector<RunOutput>& runs) {
  std::string s = join(csv_columns());
  for (const auto& r : runs) s += join(csv_row(r));
  return s;
}

using Series = std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>;

void write_run_trace(const RunOutput& r, const fs::path& dir) {
  std::ostringstream ev;
  ev << "tick,core,task,event\n";
  for (const auto& e : r.events) ev << e.tick << ',' << e.core << ',' << e.task << ',' << sched::to_string(e.event) << '\n';
  write_file(dir / "events.csv", ev.str());
  std::ostringstream st;
  st << "round,priority,thief,victim,task,kind,tick\n";
  for (const auto& e : r.steals)
    st << e.round << ',' << e.priority << ',' << e.thief << ',' << e.victim << ',' << e.task << ','
       << (e.kind == sched::StealKind::Stolen ? "stolen" : "pseudo") << ',' << e.tick << '\n';
  write_file(dir / "steals.csv", st.str());
  std::ostringstream tk;
  tk << "id,parent,forked,stolen,kind,priority,size,core,start,finish,frame,frame_words,stack\n";
  for (const auto& t : r.tasks)
    tk << t.id << ',' << t.parent << ',' << int(t.forked) << ',' << int(t.stolen) << ','
       << compute::to_string(t.kind) << ',' << t.priority << ',' << t.size << ',' << t.core << ','
       << t.start << ',' << t.finish << ',' << t.frame << ',' << t.frame_words << ',' << t.stack << '\n';
  write_file(dir / "tasks.csv", tk.str());
  std::ostringstream tr;
  tr << "tick,core,block,kind,latency\n";
  for (const auto& t : r.transfers)
    tr << t.tick << ',' << t.core << ',' << t.block << ',' << mem::to_string(t.kind) << ',' << t.latency << '\n';
  write_file(dir / "transfers.csv", tr.str());
}

auto sort_key(const metrics::RunParams& r) {
  return std::make_tuple(r.alg, static_cast<int>(r.sched), r.n, r.p, r.M, r.B, r.cost.hit_cost,
                         r.cost.miss_cost, r.cost.steal_cost, r.cost.sched_interval, r.padded, r.gapped,
                         r.stress, r.seed);
}

struct Metric {
  const char* name;
  double (*get)(const RunOutput&);
};

const std::vector<Metric>& sweep_metrics() {
  static const std::vector<Metric> v = {
      {"misses", [](const RunOutput& r) { return double(r.summary.totals.misses()); }},
      {"cache_excess", [](const RunOutput& r) { return double(r.excess.cache_excess); }},
      {"block_wait", [](const RunOutput& r) { return r.excess.block_wait_total; }},
      {"invalidation", [](const RunOutput& r) { return double(r.summary.totals.invalidation); }},
      {"makespan", [](const RunOutput& r) { return double(r.summary.stats.makespan); }},
      {"steals", [](const RunOutput& r) { return double(r.summary.stats.steals); }},
  };
  return v;
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const Series& series) {
  const double W = 640, H = 400, L = 70, R = 150, T = 40, Bm = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& [name, pts] : series)
    for (auto [x, y] : pts) {
      if (first) {
        x0 = x1 = x;
        y1 = y;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - Bm - (y - y0) / (y1 - y0) * (H - T - Bm); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                 "#e377c2", "#7f7f7f"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - Bm << "\" x2=\"" << W - R << "\" y2=\"" << H - Bm
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - Bm
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - Bm + 15 << "\" text-anchor=\"middle\" font-size=\"10\">"
      << num(xv) << "</text>\n";
    o << "<text x=\"" << L - 5 << "\" y=\"" << py(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
      << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << xml_escape(xlabel) << "</text>\n"
    << "<text x=\"15\" y=\"" << (T + H - Bm) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
    << (T + H - Bm) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 8];
    auto pts = series[s].second;
    std::sort(pts.begin(), pts.end());
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
    for (auto [x, y] : pts) o << px(x) << ',' << py(y) << ' ';
    o << "\"/>\n";
    for (auto [x, y] : pts) o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 15 * s + 10 << "\" font-size=\"10\" fill=\"" << c << "\">"
      << xml_escape(series[s].first) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_outputs(const RunOutput& r, const std::string& dir) {
  ensure_dir(dir);
  fs::path d(dir);
  write_file(d / "report.json", report_json(r).dump(2) + "\n");
  write_file(d / "counters.csv", counters_csv({r}));
  Series s(3);
  s[0].first = "cold";
  s[1].first = "capacity";
  s[2].first = "invalidation";
  for (std::size_t c = 0; c < r.per_core.size(); ++c) {
    s[0].second.emplace_back(double(c), double(r.per_core[c].cold));
    s[1].second.emplace_back(double(c), double(r.per_core[c].capacity));
    s[2].second.emplace_back(double(c), double(r.per_core[c].invalidation));
  }
  write_file(d / "plot_misses.svg", svg_line_plot("misses per core", "core", "misses", s));
  if (!r.tasks.empty() || !r.events.empty()) write_run_trace(r, d);
}

SweepOutput run_sweep(const ExperimentConfig& c) {
  if (c.sweep.empty()) throw ConfigError("sweep needs at least one axis");
  std::uint64_t total = 1;
  for (const auto& [axis, vals] : c.sweep) {
    total *= vals.size();
    if (total > c.sweep_cap)
      throw ConfigError("sweep has more than " + std::to_string(c.sweep_cap) + " configurations");
  }
  std::vector<ExperimentConfig> configs;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    ExperimentConfig e = c;
    e.sweep.clear();
    std::uint64_t rem = idx;
    for (auto it = c.sweep.rbegin(); it != c.sweep.rend(); ++it) {
      set_option(e, it->first, it->second[rem % it->second.size()]);
      rem /= it->second.size();
    }
    validate(e);
    configs.push_back(std::move(e));
  }
  SweepOutput out;
  out.axis = c.sweep.front().first;
  for (const auto& e : configs) {
    out.runs.push_back(run_experiment(e));
    out.invariants_ok = out.invariants_ok && out.runs.back().invariants_ok;
  }
  std::stable_sort(out.runs.begin(), out.runs.end(), [](const RunOutput& a, const RunOutput& b) {
    return sort_key(a.summary.params) < sort_key(b.summary.params);
  });
  // runs differing only in p are adjacent after sorting, in increasing p
  for (std::size_t i = 1; i < out.runs.size(); ++i) {
    const auto& a = out.runs[i - 1];
    const auto& b = out.runs[i];
    auto pa = a.summary.params, pb = b.summary.params;
    pa.p = pb.p = 0;
    if (sort_key(pa) != sort_key(pb)) continue;
    if (b.excess.cache_excess < a.excess.cache_excess)
      out.warnings.push_back("cache excess decreases from p=" + std::to_string(a.summary.params.p) + " (" +
                             std::to_string(a.excess.cache_excess) + ") to p=" +
                             std::to_string(b.summary.params.p) + " (" + std::to_string(b.excess.cache_excess) +
                             ") for " + b.summary.params.alg + " seed " + std::to_string(b.summary.params.seed));
  }
  return out;
}

namespace {

std::string axis_value(const metrics::RunParams& r, const std::string& axis) {
  if (axis == "alg") return r.alg;
  if (axis == "sched") return sched::to_string(r.sched);
  if (axis == "n") return std::to_string(r.n);
  if (axis == "p") return std::to_string(r.p);
  if (axis == "M") return std::to_string(r.M);
  if (axis == "B") return std::to_string(r.B);
  if (axis == "hit-cost") return std::to_string(r.cost.hit_cost);
  if (axis == "miss-cost") return std::to_string(r.cost.miss_cost);
  if (axis == "steal-cost") return std::to_string(r.cost.steal_cost);
  if (axis == "sched-interval") return std::to_string(r.cost.sched_interval);
  if (axis == "padded") return r.padded ? "1" : "0";
  if (axis == "gapped") return r.gapped ? "1" : "0";
  if (axis == "stress") return r.stress ? "1" : "0";
  return std::to_string(r.seed);
}

}  // namespace

void write_sweep_outputs(const SweepOutput& s, const std::string& dir) {
  ensure_dir(dir);
  fs::path d(dir);
  nlohmann::json j;
  j["axis"] = s.axis;
  j["invariants_ok"] = s.invariants_ok;
  j["warnings"] = s.warnings;
  j["runs"] = nlohmann::json::array();
  for (const auto& r : s.runs) j["runs"].push_back(report_json(r));
  write_file(d / "report.json", j.dump(2) + "\n");
  write_file(d / "counters.csv", counters_csv(s.runs));

  // x position: numeric value of the first axis, or its index for words
  std::vector<std::string> xs;
  for (const auto& r : s.runs) {
    auto v = axis_value(r.summary.params, s.axis);
    if (std::find(xs.begin(), xs.end(), v) == xs.end()) xs.push_back(v);
  }
  bool numeric = std::all_of(xs.begin(), xs.end(), [](const std::string& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
  });
  bool log_x = numeric && (s.axis == "n" || s.axis == "M" || s.axis == "B");
  auto xpos = [&](const std::string& v) {
    if (!numeric) return double(std::find(xs.begin(), xs.end(), v) - xs.begin());
    double x = std::stod(v);
    return log_x ? std::log2(std::max(x, 1.0)) : x;
  };
  std::string xlabel = log_x ? "log2 " + s.axis : s.axis;
  if (!numeric) {
    xlabel += " (";
    for (std::size_t i = 0; i < xs.size(); ++i) xlabel += (i ? " " : "") + std::to_string(i) + "=" + xs[i];
    xlabel += ")";
  }
  static const std::vector<std::string> axes = {"alg", "sched", "n", "p", "M", "B", "hit-cost", "miss-cost",
                                                "steal-cost", "sched-interval", "padded", "gapped",
                                                "stress", "seed"};
  for (const auto& m : sweep_metrics()) {
    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    for (const auto& r : s.runs) {
      std::string label;
      for (const auto& a : axes) {
        if (a == s.axis) continue;
        bool varies = false;
        for (const auto& o : s.runs)
          if (axis_value(o.summary.params, a) != axis_value(r.summary.params, a)) varies = true;
        if (varies) label += (label.empty() ? "" : " ") + a + "=" + axis_value(r.summary.params, a);
      }
      if (label.empty()) label = m.name;
      groups[label].emplace_back(xpos(axis_value(r.summary.params, s.axis)), m.get(r));
    }
    Series series(groups.begin(), groups.end());
    write_file(d / (std::string("plot_") + m.name + ".svg"),
               svg_line_plot(std::string(m.name) + " vs " + s.axis, xlabel, m.name, series));
  }
}

}  // namespace pwssim::cli
