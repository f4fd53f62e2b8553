#include <string>

#include "CLI11.hpp"
#include "rta/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rta - resilient multi-robot task allocation"};
  app.require_subcommand(1);
  rta::CommandSpec spec;

  auto* run = app.add_subcommand(
      "run", "Run a scenario (or randomized trials) and write trace files");
  run->add_option("--scenario", spec.scenario,
                  "builtin scenario name or scenario file path")
      ->required();
  run->add_option("--out", spec.out_dir, "output directory (default: out)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = run->add_option("--seed", seed_value, "seed override");
  double chi = 0, dvt = 0, l = 0, dmax = 0, dt = 0, duration = 0;
  auto* chi_opt = run->add_option("--chi", chi, "trigger threshold override");
  auto* dvt_opt =
      run->add_option("--dv-thresh", dvt, "discrepancy threshold override");
  auto* l_opt = run->add_option("--l", l, "margin weight override");
  auto* dmax_opt = run->add_option("--delta-max", dmax, "relaxation bound");
  auto* dt_opt = run->add_option("--dt", dt, "tick length override");
  auto* dur_opt = run->add_option("--duration", duration, "duration override");
  run->add_flag("--no-trigger", spec.no_trigger,
                "disable the event trigger (allocate-once baseline)");
  run->add_option("--trials", spec.trials, "run this many randomized trials");
  run->add_option("--randomize", spec.randomize,
                  "trial randomization: env | params (default env)");

  auto* solve_cmd =
      app.add_subcommand("solve", "Solve a standalone allocation problem");
  solve_cmd->add_option("--problem", spec.problem_file, "problem JSON file")
      ->required();
  solve_cmd->add_option("--out", spec.solution_out,
                        "solution JSON path (default: stdout)");
  solve_cmd->add_option("--gap-tol", spec.gap_tol, "optimality gap tolerance");
  solve_cmd->add_option("--node-limit", spec.node_limit,
                        "branch-and-bound node limit");

  auto* oracle = app.add_subcommand(
      "oracle-check",
      "Cross-check the solver against exhaustive enumeration");
  oracle->add_option("--instances", spec.instances, "number of instances");
  oracle->add_option("--seed", spec.oracle_seed, "instance generator seed");
  oracle->add_option("--corrupt-bound", spec.corrupt_bound,
                     "test hook: inflate node bounds by this amount");

  auto* bench = app.add_subcommand(
      "bench", "Time the allocation solver over scaled team sizes");
  bench->add_option("--sizes", spec.sizes, "team sizes, e.g. --sizes 8 16 40")
      ->required();
  bench->add_option("--reps", spec.repetitions, "repetitions per size");
  bench->add_option("--out", spec.out_dir, "output directory for bench.csv");
  bench->add_option("--gap-tol", spec.gap_tol, "optimality gap tolerance");
  bench->add_option("--node-limit", spec.node_limit, "node limit per solve");

  app.add_subcommand("scenarios", "List builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  if (seed_opt->count()) spec.seed = seed_value;
  if (chi_opt->count()) spec.chi = chi;
  if (dvt_opt->count()) spec.dv_thresh = dvt;
  if (l_opt->count()) spec.margin_weight = l;
  if (dmax_opt->count()) spec.delta_max = dmax;
  if (dt_opt->count()) spec.dt = dt;
  if (dur_opt->count()) spec.duration = duration;
  spec.subcommand = app.get_subcommands().front()->get_name();
  return rta::dispatch(spec);
}
