#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "idio/sim.hpp"
#include "idio/stats.hpp"

namespace idio {

// Runs setups[i] -> results[i] on up to `jobs` threads. Result order is
// fixed by index, so parallelism never changes output.
inline std::vector<RunResult> run_many(const std::vector<RunSetup>& setups, int jobs) {
  std::vector<RunResult> results(setups.size());
  if (jobs < 1) jobs = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= setups.size()) return;
      results[i] = simulate(setups[i]);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

struct ExperimentConfig {
  World world;
  IdiotopeMatrix idiotope;
  ImmuneParams params;
  ReinforcementConfig reinforcement;
  SensorConfig sensors;
  double timeout = 1200.0;
  double phi = 9.08;
  std::uint64_t paratope_seed_base = 1000;
  int num_paratopes = 5;
  int runs_per_paratope = 6;
  std::uint64_t run_seed_base = 5000;
  int jobs = 1;
  std::string world_id = "maze";
};

inline RunSetup make_setup(const ExperimentConfig& cfg, const ParatopeMatrix& paratope,
                           std::uint64_t seed, const std::string& paratope_id) {
  RunSetup s{cfg.world, paratope, cfg.idiotope, cfg.params, cfg.reinforcement, cfg.sensors};
  s.seed = seed;
  s.timeout = cfg.timeout;
  s.phi = cfg.phi;
  s.world_id = cfg.world_id;
  s.paratope_id = paratope_id;
  return s;
}

enum class SweepAxis { K1, B };

struct SweepRow {
  double value = 0.0;
  double mean_score = 0.0;
  double mean_difference_rate = 0.0;
};

// Parameter sweep over k1 or b, seeded runs from paratope P1 per point.
inline std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                   const std::vector<double>& values, int runs_per_point) {
  ParatopeMatrix p1 = init_paratope(cfg.paratope_seed_base);
  std::vector<RunSetup> setups;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (int r = 0; r < runs_per_point; ++r) {
      ExperimentConfig c = cfg;
      if (axis == SweepAxis::K1) c.params.k1 = values[vi];
      else c.params.b = values[vi];
      RunSetup s = make_setup(c, p1, cfg.run_seed_base + vi * 1000 + r, "P1");
      setups.push_back(std::move(s));
    }
  }
  auto results = run_many(setups, cfg.jobs);
  std::vector<SweepRow> rows;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    SweepRow row;
    row.value = values[vi];
    std::vector<double> scores, rates;
    for (int r = 0; r < runs_per_point; ++r) {
      const RunRecord& rec = results[vi * runs_per_point + r].record;
      scores.push_back(rec.score);
      rates.push_back(rec.overall.idiotypic_difference);
    }
    row.mean_score = mean(scores);
    row.mean_difference_rate = mean(rates);
    rows.push_back(row);
  }
  return rows;
}

struct SystemStats {
  int runs = 0;
  double mean_s = 0, sd_s = 0, min_s = 0, max_s = 0;
  double mean_t = 0, sd_t = 0, min_t = 0, max_t = 0;
  double mean_ns = 0, sd_ns = 0, min_ns = 0, max_ns = 0;
  double pct_good = 0, pct_bad = 0;
  double ci95_s = 0;
  double mean_reinf_success = 0, mean_change = 0, mean_diff = 0, mean_idio_success = 0;
  double stall_reinf_success = 0, stall_change = 0, stall_diff = 0, stall_idio_success = 0;
  double long_stall_mean_length = 0, long_stall_change_rate = 0;
};

inline SystemStats summarize(const std::vector<RunRecord>& recs) {
  SystemStats st;
  st.runs = static_cast<int>(recs.size());
  if (recs.empty()) return st;
  std::vector<double> s, t, ns;
  double good = 0, bad = 0;
  std::vector<double> rs, ch, df, is, srs, sch, sdf, sis;
  std::vector<double> lsl, lscr;
  for (const auto& r : recs) {
    s.push_back(r.score);
    t.push_back(r.t);
    ns.push_back(r.n_s);
    if (r.score < 200.0) ++good;
    if (r.score > 400.0) ++bad;
    rs.push_back(r.overall.reinforcement_success);
    ch.push_back(r.overall.antibody_change);
    df.push_back(r.overall.idiotypic_difference);
    is.push_back(r.overall.idiotypic_success);
    srs.push_back(r.in_stall.reinforcement_success);
    sch.push_back(r.in_stall.antibody_change);
    sdf.push_back(r.in_stall.idiotypic_difference);
    sis.push_back(r.in_stall.idiotypic_success);
    if (r.long_stall_count > 0) {
      lsl.push_back(r.long_stall_mean_length);
      lscr.push_back(r.long_stall_change_rate);
    }
  }
  st.mean_s = mean(s); st.sd_s = stddev(s); st.min_s = minimum(s); st.max_s = maximum(s);
  st.mean_t = mean(t); st.sd_t = stddev(t); st.min_t = minimum(t); st.max_t = maximum(t);
  st.mean_ns = mean(ns); st.sd_ns = stddev(ns); st.min_ns = minimum(ns); st.max_ns = maximum(ns);
  st.pct_good = 100.0 * good / recs.size();
  st.pct_bad = 100.0 * bad / recs.size();
  st.ci95_s = confidence_half_width(s);
  st.mean_reinf_success = mean(rs);
  st.mean_change = mean(ch);
  st.mean_diff = mean(df);
  st.mean_idio_success = mean(is);
  st.stall_reinf_success = mean(srs);
  st.stall_change = mean(sch);
  st.stall_diff = mean(sdf);
  st.stall_idio_success = mean(sis);
  st.long_stall_mean_length = lsl.empty() ? 0.0 : mean(lsl);
  st.long_stall_change_rate = lscr.empty() ? 0.0 : mean(lscr);
  return st;
}

struct SuiteSummary {
  std::map<std::string, SystemStats> maze;
  std::map<std::string, SystemStats> mirror;
  std::map<std::string, SystemStats> combined;
  // p-values keyed "A<B/metric/world"
  std::map<std::string, double> p_values;
  nlohmann::json provenance;
};

struct ProtocolResult {
  SuiteSummary summary;
  std::vector<RunRecord> maze_records;
  std::vector<RunRecord> mirror_records;
};

// The 30+30 run comparison: each system runs runs_per_paratope times with
// each of num_paratopes random paratopes in the base world, then repeats
// in the mirrored world starting from the paratope each run saved.
inline ProtocolResult compare_protocol(const ExperimentConfig& cfg,
                                       const std::vector<SelectionMode>& systems,
                                       bool with_mirror = true) {
  ProtocolResult out;
  World mirrored = mirror_world(cfg.world);

  std::vector<ParatopeMatrix> paratopes;
  for (int p = 0; p < cfg.num_paratopes; ++p)
    paratopes.push_back(init_paratope(cfg.paratope_seed_base + p));

  struct Key { SelectionMode mode; int p; int r; };
  std::vector<Key> keys;
  std::vector<RunSetup> setups;
  for (std::size_t si = 0; si < systems.size(); ++si)
    for (int p = 0; p < cfg.num_paratopes; ++p)
      for (int r = 0; r < cfg.runs_per_paratope; ++r) {
        ExperimentConfig c = cfg;
        c.params.mode = systems[si];
        std::uint64_t seed = cfg.run_seed_base + si * 100000 + p * 1000 + r;
        RunSetup s = make_setup(c, paratopes[p], seed, "P" + std::to_string(p + 1));
        keys.push_back({systems[si], p, r});
        setups.push_back(std::move(s));
      }
  auto maze_results = run_many(setups, cfg.jobs);

  std::map<std::string, std::vector<RunRecord>> maze_by, mirror_by;
  for (std::size_t i = 0; i < maze_results.size(); ++i) {
    out.maze_records.push_back(maze_results[i].record);
    maze_by[maze_results[i].record.system].push_back(maze_results[i].record);
  }

  if (with_mirror) {
    std::vector<RunSetup> msetups;
    for (std::size_t i = 0; i < maze_results.size(); ++i) {
      ExperimentConfig c = cfg;
      c.params.mode = keys[i].mode;
      c.world = mirrored;
      c.world_id = cfg.world_id + "-mirror";
      RunSetup s = make_setup(c, maze_results[i].trained, setups[i].seed,
                              setups[i].paratope_id + "-trained");
      msetups.push_back(std::move(s));
    }
    auto mirror_results = run_many(msetups, cfg.jobs);
    for (std::size_t i = 0; i < mirror_results.size(); ++i) {
      out.mirror_records.push_back(mirror_results[i].record);
      mirror_by[mirror_results[i].record.system].push_back(mirror_results[i].record);
    }
  }

  auto metric = [](const RunRecord& r, int m) {
    return m == 0 ? r.score : (m == 1 ? r.t : static_cast<double>(r.n_s));
  };
  const char* metric_name[3] = {"S", "t", "ns"};

  for (auto& [sys, recs] : maze_by) out.summary.maze[sys] = summarize(recs);
  for (auto& [sys, recs] : mirror_by) out.summary.mirror[sys] = summarize(recs);

  // combined: per-run mean of the two worlds
  std::map<std::string, std::vector<RunRecord>> combined_by;
  if (with_mirror) {
    for (std::size_t i = 0; i < out.maze_records.size(); ++i) {
      RunRecord c = out.maze_records[i];
      const RunRecord& m = out.mirror_records[i];
      c.score = (c.score + m.score) / 2.0;
      c.t = (c.t + m.t) / 2.0;
      c.n_s = static_cast<int>(std::round((c.n_s + m.n_s) / 2.0));
      combined_by[c.system].push_back(c);
    }
    for (auto& [sys, recs] : combined_by) out.summary.combined[sys] = summarize(recs);
  }

  auto add_tests = [&](const std::map<std::string, std::vector<RunRecord>>& by,
                       const std::string& world_tag) {
    for (const auto& [sa, ra] : by)
      for (const auto& [sb, rb] : by) {
        if (sa == sb || ra.size() < 2 || rb.size() < 2) continue;
        for (int m = 0; m < 3; ++m) {
          std::vector<double> va, vb;
          for (const auto& r : ra) va.push_back(metric(r, m));
          for (const auto& r : rb) vb.push_back(metric(r, m));
          out.summary.p_values[sa + "<" + sb + "/" + metric_name[m] + "/" + world_tag] =
              one_tailed_t_test(va, vb);
        }
      }
  };
  add_tests(maze_by, cfg.world_id);
  if (with_mirror) {
    add_tests(mirror_by, cfg.world_id + "-mirror");
    add_tests(combined_by, "combined");
  }
  return out;
}

// ---- machine-readable output ----

inline void write_records_csv(std::ostream& os, const std::vector<RunRecord>& recs) {
  os << "system,strategy,k1,k2,b,world,paratope,seed,t,n_s,score,completed,"
        "reinf_success,ab_change,idio_diff,idio_success,"
        "stall_reinf_success,stall_ab_change,stall_idio_diff,stall_idio_success,"
        "long_stall_count,long_stall_mean_len,long_stall_change_rate,decision_ticks\n";
  for (const auto& r : recs) {
    os << r.system << "," << to_string(r.strategy) << "," << r.params.k1 << "," << r.params.k2
       << "," << r.params.b << "," << r.world_id << "," << r.paratope_id << "," << r.seed << ","
       << r.t << "," << r.n_s << "," << r.score << "," << (r.completed ? 1 : 0) << ","
       << r.overall.reinforcement_success << "," << r.overall.antibody_change << ","
       << r.overall.idiotypic_difference << "," << r.overall.idiotypic_success << ","
       << r.in_stall.reinforcement_success << "," << r.in_stall.antibody_change << ","
       << r.in_stall.idiotypic_difference << "," << r.in_stall.idiotypic_success << ","
       << r.long_stall_count << "," << r.long_stall_mean_length << ","
       << r.long_stall_change_rate << "," << r.decision_ticks << "\n";
  }
}

inline nlohmann::json stats_to_json(const SystemStats& s) {
  return {
      {"runs", s.runs},
      {"score", {{"mean", s.mean_s}, {"sd", s.sd_s}, {"min", s.min_s}, {"max", s.max_s},
                 {"ci95_half_width", s.ci95_s}}},
      {"time", {{"mean", s.mean_t}, {"sd", s.sd_t}, {"min", s.min_t}, {"max", s.max_t}}},
      {"stalls", {{"mean", s.mean_ns}, {"sd", s.sd_ns}, {"min", s.min_ns}, {"max", s.max_ns}}},
      {"pct_good", s.pct_good},
      {"pct_bad", s.pct_bad},
      {"rates", {{"reinforcement_success", s.mean_reinf_success},
                 {"antibody_change", s.mean_change},
                 {"idiotypic_difference", s.mean_diff},
                 {"idiotypic_success", s.mean_idio_success}}},
      {"stall_rates", {{"reinforcement_success", s.stall_reinf_success},
                       {"antibody_change", s.stall_change},
                       {"idiotypic_difference", s.stall_diff},
                       {"idiotypic_success", s.stall_idio_success}}},
      {"long_stalls", {{"mean_length", s.long_stall_mean_length},
                       {"change_rate", s.long_stall_change_rate}}},
  };
}

inline nlohmann::json summary_to_json(const SuiteSummary& s) {
  nlohmann::json j;
  for (const auto& [sys, st] : s.maze) j["maze"][sys] = stats_to_json(st);
  for (const auto& [sys, st] : s.mirror) j["mirror"][sys] = stats_to_json(st);
  for (const auto& [sys, st] : s.combined) j["combined"][sys] = stats_to_json(st);
  for (const auto& [k, v] : s.p_values) j["p_values"][k] = v;
  if (!s.provenance.is_null()) j["config"] = s.provenance;
  return j;
}

inline void write_sweep_csv(std::ostream& os, const std::string& axis,
                            const std::vector<SweepRow>& rows) {
  os << axis << ",mean_score,mean_idiotypic_difference_rate\n";
  for (const auto& r : rows)
    os << r.value << "," << r.mean_score << "," << r.mean_difference_rate << "\n";
}

}  // namespace idio
