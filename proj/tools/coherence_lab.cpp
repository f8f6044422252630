// coherence_lab: command-line runner for the coherence concentration
// experiments. Exit status: 0 on success (including no-go verdicts and
// non-convergence warnings), 1 on invalid input, 2 on unsupported
// parameters, 3 on internal failures.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coherence/error.hpp"
#include "coherence/experiments.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::optional<std::string> state;
  std::optional<int> j;
  std::optional<std::string> nx;
  std::optional<std::string> nz;
  std::optional<std::size_t> steps;
  std::optional<double> eps;
  std::optional<std::size_t> dim;
  std::optional<std::string> ranks;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> grid;
  std::optional<std::string> p;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> max_iters;
  bool optimize = false;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "Base seed (falls back to $COHERENCE_LAB_SEED, then 0)");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--config", f.config, "JSON parameter file or a manifest.json from an earlier run");
}

void add_search(CLI::App* cmd, Flags& f) {
  cmd->add_option("--restarts", f.restarts, "Optimizer restarts");
  cmd->add_option("--max-iters", f.max_iters, "Optimizer sweeps per restart");
}

template <class T>
void put(json& params, const char* key, const std::optional<T>& value) {
  if (value) params[key] = *value;
}

json grid_params(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw coherence::ValidationError("--grid expects RADIALxANGULAR, e.g. 20x20");
  const auto radial = coherence::parse_count_list(text.substr(0, x));
  const auto angular = coherence::parse_count_list(text.substr(x + 1));
  if (radial.size() != 1 || angular.size() != 1) throw coherence::ValidationError("--grid expects RADIALxANGULAR");
  return {{"radial", radial.front()}, {"angular", angular.front()}};
}

json collect_params(const Flags& f, json params) {
  if (f.state) {
    params.erase("state_data");
    params["state"] = *f.state;
  }
  put(params, "j", f.j);
  if (f.nx) params["nx"] = coherence::parse_real_list(*f.nx);
  if (f.nz) params["nz"] = coherence::parse_real_list(*f.nz);
  put(params, "steps", f.steps);
  put(params, "eps", f.eps);
  put(params, "dim", f.dim);
  if (f.ranks) params["ranks"] = coherence::parse_count_list(*f.ranks);
  put(params, "samples", f.samples);
  if (f.grid) params.update(grid_params(*f.grid));
  if (f.p) params["p"] = coherence::parse_real_list(*f.p);
  put(params, "restarts", f.restarts);
  put(params, "max_iters", f.max_iters);
  if (f.optimize) params["optimize"] = true;
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unspeakable-coherence concentration experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", coherence::kArtifactVersion);
  Flags f;

  auto* concentrate = app.add_subcommand("concentrate", "Optimal concentration, search and bounds for one state");
  concentrate->add_option("--state", f.state, "State JSON file");
  concentrate->add_option("--j", f.j, "Mode index (default: every mode 1..d-1)");
  add_search(concentrate, f);

  auto* concat = app.add_subcommand("concat", "Concatenation trajectories in the Bloch ball");
  concat->add_option("--nx", f.nx, "Start n_x, or a comma-separated list");
  concat->add_option("--nz", f.nz, "Start n_z, or a comma-separated list");
  concat->add_option("--steps", f.steps, "Step cap (default 1000000)");
  concat->add_option("--eps", f.eps, "Convergence threshold on |n_z| (default 0.001)");

  auto* field = app.add_subcommand("field", "Vector field of one recurrence step");
  field->add_option("--grid", f.grid, "Polar grid RADIALxANGULAR (default 20x20)");

  auto* compare = app.add_subcommand("bound-compare", "Compare the two upper bounds on random states");
  compare->add_option("--dim", f.dim, "Local dimension, 3 or 4 (default 3)");
  compare->add_option("--ranks", f.ranks, "Comma-separated ranks (default 1..dim)");
  compare->add_option("--samples", f.samples, "Samples per rank (default 100)");
  compare->add_flag("--optimize", f.optimize, "Also run the unitary search and record the achieved gain");
  add_search(compare, f);

  auto* nogo = app.add_subcommand("nogo", "No-go verdict and random-unitary confirmation");
  nogo->add_option("--state", f.state, "State JSON file (default: isotropic states)");
  nogo->add_option("--p", f.p, "Isotropic weights (default 0.1,0.5,1.0)");
  nogo->add_option("--dim", f.dim, "Local dimension of the isotropic state (default 2)");
  nogo->add_option("--samples", f.samples, "Random allowed unitaries per case (default 500)");

  auto* amplify = app.add_subcommand("amplify", "Coherence ratio amplification over N rounds");
  amplify->add_option("--steps", f.steps, "Number of rounds N (default 10)");
  amplify->add_option("--eps", f.eps, "Slack epsilon in the ratio bound (default 0.1)");

  for (auto* cmd : {concentrate, concat, field, compare, nogo, amplify}) add_common(cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    json params = json::object();
    std::optional<std::uint64_t> config_seed;
    if (f.config) params = coherence::load_config_file(*f.config, command, &config_seed);

    coherence::ExperimentConfig cfg;
    cfg.command = command;
    cfg.seed = coherence::resolve_seed(f.seed, config_seed);
    cfg.out_dir = f.out;
    cfg.params = collect_params(f, std::move(params));

    const auto result = coherence::run_command(cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << result.summary.dump(2) << '\n';
    return 0;
  } catch (const coherence::UnsupportedParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const coherence::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
