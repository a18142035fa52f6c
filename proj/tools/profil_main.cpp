#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "profil/config.hpp"
#include "profil/experiment.hpp"

namespace {

modchain::ExperimentConfig build_config(const std::string& config_path,
                                      const std::vector<std::string>& overrides) {
  modchain::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = modchain::load_config_file(config_path);
  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + kv + "'");
    modchain::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  modchain::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ModChain pipeline: plant reasoning padding by imitation, train an "
               "activation probe, remove the padding with probe-filtered GRPO, and "
               "report the before/after metrics."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "run";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "Config file (dotted key=value lines)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Artifact directory");
  app.add_option("--set", overrides, "Override one config key, e.g. --set grpo.steps=50")
      ->take_all();

  std::string condition = "profil";
  CLI::App* pretrain = app.add_subcommand("pretrain", "Generate demos and imitate them");
  CLI::App* train_probe =
      app.add_subcommand("train-probe", "Train the frozen-base step scorer");
  CLI::App* grpo = app.add_subcommand("grpo", "Train one condition with GRPO");
  grpo->add_option("--condition", condition, "baseline | length_penalty | profil");
  CLI::App* eval = app.add_subcommand("eval", "Sample evaluation rollout caches");
  eval->add_option("--condition", condition, "baseline | length_penalty | profil");
  CLI::App* audit =
      app.add_subcommand("audit", "Score checkpoints with the frozen probe");
  CLI::App* sweep =
      app.add_subcommand("sweep-theta", "Probe-threshold sensitivity table");
  CLI::App* steer = app.add_subcommand("steer", "Student probe and steering sweep");
  CLI::App* report = app.add_subcommand("report", "Emit metrics tables from caches");
  CLI::App* run = app.add_subcommand("run", "Full pipeline, all stages");

  // Let --out/--set/--config appear after the subcommand as well.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    modchain::Experiment exp(build_config(config_path, overrides), out_dir);
    if (pretrain->parsed()) exp.run_pretrain();
    if (train_probe->parsed()) exp.run_train_probe();
    if (grpo->parsed()) exp.run_grpo(condition);
    if (eval->parsed()) exp.run_eval(condition);
    if (audit->parsed()) exp.run_audit();
    if (sweep->parsed()) exp.run_sweep_theta();
    if (steer->parsed()) exp.run_steer();
    if (report->parsed()) exp.run_report();
    if (run->parsed()) exp.run_all();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
