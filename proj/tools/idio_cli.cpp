#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "idio/config.hpp"
#include "idio/experiment.hpp"
#include "idio/idiotope.hpp"
#include "idio/sim.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("IDIO_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

nlohmann::json record_to_json(const idio::RunRecord& r) {
  return {
      {"system", r.system},
      {"strategy", idio::to_string(r.strategy)},
      {"k1", r.params.k1},
      {"k2", r.params.k2},
      {"b", r.params.b},
      {"world", r.world_id},
      {"paratope", r.paratope_id},
      {"seed", r.seed},
      {"t", r.t},
      {"n_s", r.n_s},
      {"S", r.score},
      {"completed", r.completed},
      {"rates",
       {{"reinforcement_success", r.overall.reinforcement_success},
        {"antibody_change", r.overall.antibody_change},
        {"idiotypic_difference", r.overall.idiotypic_difference},
        {"idiotypic_success", r.overall.idiotypic_success}}},
      {"stall_rates",
       {{"reinforcement_success", r.in_stall.reinforcement_success},
        {"antibody_change", r.in_stall.antibody_change},
        {"idiotypic_difference", r.in_stall.idiotypic_difference},
        {"idiotypic_success", r.in_stall.idiotypic_success}}},
      {"long_stalls",
       {{"count", r.long_stall_count},
        {"mean_length", r.long_stall_mean_length},
        {"change_rate", r.long_stall_change_rate}}},
      {"decision_ticks", r.decision_ticks},
  };
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs from flags

  idio::RunConfig resolve() const {
    idio::RunConfig cfg;
    if (!config_path.empty()) cfg.apply(idio::parse_kv_file(config_path));
    for (const auto& ov : overrides) {
      auto eq = ov.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("override must be key=value: " + ov);
      cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "run-config file (key = value lines)");
  cmd->add_option("-s,--set", opts.overrides, "override a config key (key=value); flags win");
}

idio::ExperimentConfig to_experiment(const idio::RunConfig& rc, int jobs) {
  idio::ExperimentConfig ec{rc.load_world(), idio::default_idiotope(), rc.params,
                            rc.reinforcement, rc.sensors};
  ec.params.mode = rc.mode;
  ec.timeout = rc.timeout;
  ec.phi = rc.phi;
  ec.paratope_seed_base = rc.paratope_seed;
  ec.run_seed_base = rc.seed;
  ec.jobs = jobs;
  ec.world_id = rc.world_path.empty() ? "maze" : rc.world_path;
  return ec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Idiotypic immune-network action selection: runs, sweeps, comparisons"};
  app.require_subcommand(1);
  int jobs = default_jobs();
  app.add_option("-j,--jobs", jobs, "parallel runs (env IDIO_JOBS)");

  // gen-paratope
  auto* gen = app.add_subcommand("gen-paratope", "generate a random paratope matrix file");
  std::uint64_t gen_seed = 1000;
  std::string gen_out = "paratope.txt";
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("-o,--out", gen_out, "output matrix file")->required();

  // run
  auto* run = app.add_subcommand("run", "execute a single run, RunRecord JSON on stdout");
  CommonOpts run_opts;
  add_common(run, run_opts);
  std::string trace_path, traj_path, save_paratope;
  run->add_option("--trace", trace_path, "write SelectionTrace JSON-lines to file");
  run->add_option("--trajectory", traj_path, "write trajectory CSV to file");
  run->add_option("--save-paratope", save_paratope, "save the trained paratope matrix");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep, CSV output");
  CommonOpts sweep_opts;
  add_common(sweep_cmd, sweep_opts);
  std::string sweep_axis;
  std::string sweep_values;
  int sweep_runs = 6;
  std::string sweep_out;
  sweep_cmd->add_option("--axis", sweep_axis, "k1 or b")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated axis values")->required();
  sweep_cmd->add_option("--runs", sweep_runs, "runs per point");
  sweep_cmd->add_option("-o,--out", sweep_out, "CSV file (default stdout)");

  // compare
  auto* cmp = app.add_subcommand("compare", "S1/S2/S3 comparison protocol");
  CommonOpts cmp_opts;
  add_common(cmp, cmp_opts);
  int cmp_paratopes = 5, cmp_runs = 6;
  bool cmp_no_mirror = false;
  std::string cmp_records, cmp_summary;
  std::vector<std::string> cmp_systems = {"S1", "S2", "S3"};
  cmp->add_option("--paratopes", cmp_paratopes, "number of random paratope matrices");
  cmp->add_option("--runs-per-paratope", cmp_runs, "runs per paratope per system");
  cmp->add_option("--systems", cmp_systems, "systems to compare")->delimiter(',');
  cmp->add_flag("--no-mirror", cmp_no_mirror, "skip the trained mirror-world phase");
  cmp->add_option("--records", cmp_records, "RunRecord CSV file");
  cmp->add_option("--summary", cmp_summary, "SuiteSummary JSON file (default stdout)");

  // mirror-world
  auto* mir = app.add_subcommand("mirror-world", "reflect a world file about its vertical mid-axis");
  std::string mir_in, mir_out;
  mir->add_option("-i,--in", mir_in, "input world JSON (default built-in maze)");
  mir->add_option("-o,--out", mir_out, "output world JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      idio::ParatopeMatrix p = idio::init_paratope(gen_seed);
      idio::save_matrix_file(gen_out, p.raw(), "paratope seed " + std::to_string(gen_seed));
      return 0;
    }

    if (*run) {
      idio::RunConfig cfg = run_opts.resolve();
      idio::RunSetup setup{cfg.load_world(), cfg.load_paratope(), idio::default_idiotope(),
                           cfg.params, cfg.reinforcement, cfg.sensors};
      setup.params.mode = cfg.mode;
      setup.seed = cfg.seed;
      setup.timeout = cfg.timeout;
      setup.phi = cfg.phi;
      setup.world_id = cfg.world_path.empty() ? "maze" : cfg.world_path;
      setup.paratope_id = cfg.paratope_path.empty()
                              ? "seed:" + std::to_string(cfg.paratope_seed)
                              : cfg.paratope_path;
      std::ofstream trace_file, traj_file;
      if (!trace_path.empty()) {
        trace_file.open(trace_path);
        if (!trace_file) throw std::runtime_error("cannot write trace file: " + trace_path);
        setup.trace_out = &trace_file;
      }
      if (!traj_path.empty()) {
        traj_file.open(traj_path);
        if (!traj_file) throw std::runtime_error("cannot write trajectory file: " + traj_path);
        traj_file << "tick,x,y,theta,dominant,winner,stalled\n";
        setup.trajectory_out = &traj_file;
      }
      idio::RunResult res = idio::simulate(setup);
      if (!save_paratope.empty())
        idio::save_matrix_file(save_paratope, res.trained.raw(),
                               "trained, seed " + std::to_string(cfg.seed));
      nlohmann::json out = record_to_json(res.record);
      out["config"] = cfg.to_json();
      std::cout << out.dump(2) << "\n";
      return res.record.completed ? 0 : 2;
    }

    if (*sweep_cmd) {
      if (sweep_axis != "k1" && sweep_axis != "b")
        throw std::runtime_error("--axis must be k1 or b");
      std::vector<double> values = parse_values(sweep_values);
      if (values.empty()) throw std::runtime_error("--values must be a non-empty list");
      idio::RunConfig cfg = sweep_opts.resolve();
      idio::ExperimentConfig ec = to_experiment(cfg, jobs);
      auto rows = idio::sweep(ec, sweep_axis == "k1" ? idio::SweepAxis::K1 : idio::SweepAxis::B,
                              values, sweep_runs);
      if (sweep_out.empty()) {
        idio::write_sweep_csv(std::cout, sweep_axis, rows);
      } else {
        std::ofstream f(sweep_out);
        if (!f) throw std::runtime_error("cannot write " + sweep_out);
        idio::write_sweep_csv(f, sweep_axis, rows);
      }
      return 0;
    }

    if (*cmp) {
      idio::RunConfig cfg = cmp_opts.resolve();
      idio::ExperimentConfig ec = to_experiment(cfg, jobs);
      ec.num_paratopes = cmp_paratopes;
      ec.runs_per_paratope = cmp_runs;
      std::vector<idio::SelectionMode> systems;
      for (const auto& s : cmp_systems) {
        if (s == "S1") systems.push_back(idio::SelectionMode::S1);
        else if (s == "S2") systems.push_back(idio::SelectionMode::S2);
        else if (s == "S3") systems.push_back(idio::SelectionMode::S3);
        else throw std::runtime_error("unknown system: " + s);
      }
      idio::ProtocolResult res = idio::compare_protocol(ec, systems, !cmp_no_mirror);
      res.summary.provenance = cfg.to_json();
      nlohmann::json j = summary_to_json(res.summary);
      if (cmp_summary.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream f(cmp_summary);
        if (!f) throw std::runtime_error("cannot write " + cmp_summary);
        f << j.dump(2) << "\n";
      }
      if (!cmp_records.empty()) {
        std::ofstream f(cmp_records);
        if (!f) throw std::runtime_error("cannot write " + cmp_records);
        std::vector<idio::RunRecord> all = res.maze_records;
        all.insert(all.end(), res.mirror_records.begin(), res.mirror_records.end());
        idio::write_records_csv(f, all);
      }
      return 0;
    }

    if (*mir) {
      idio::World w = mir_in.empty() ? idio::make_maze_world() : idio::load_world_file(mir_in);
      idio::save_world_file(mir_out, idio::mirror_world(w));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
