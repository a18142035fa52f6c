#include "profil/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace modchain {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v +
                                "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v +
                                "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    // stoull would wrap a leading minus around instead of failing.
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("");
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' expects an unsigned integer, got '" + v + "'");
  }
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_real(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config: key '" + key + "' expects a comma list, got '" + v +
                                "'");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_u64(k, v); }},
      {"train_task_count",
       [](auto& c, auto& k, auto& v) { c.train_task_count = parse_int(k, v); }},
      {"env.n_min", [](auto& c, auto& k, auto& v) { c.env.n_min = parse_int(k, v); }},
      {"env.n_max", [](auto& c, auto& k, auto& v) { c.env.n_max = parse_int(k, v); }},
      {"env.m_min", [](auto& c, auto& k, auto& v) { c.env.m_min = parse_int(k, v); }},
      {"env.m_max", [](auto& c, auto& k, auto& v) { c.env.m_max = parse_int(k, v); }},
      {"env.max_len", [](auto& c, auto& k, auto& v) { c.env.max_len = parse_int(k, v); }},
      {"policy.hidden", [](auto& c, auto& k, auto& v) { c.policy.hidden = parse_int(k, v); }},
      {"policy.temperature",
       [](auto& c, auto& k, auto& v) { c.policy.temperature = parse_real(k, v); }},
      {"bc.epochs", [](auto& c, auto& k, auto& v) { c.bc.epochs = parse_int(k, v); }},
      {"bc.lr", [](auto& c, auto& k, auto& v) { c.bc.lr = parse_real(k, v); }},
      {"bc.demo_count", [](auto& c, auto& k, auto& v) { c.bc.demo_count = parse_int(k, v); }},
      {"bc.theater_p", [](auto& c, auto& k, auto& v) { c.bc.theater_p = parse_real(k, v); }},
      {"probe.heads", [](auto& c, auto& k, auto& v) { c.probe.heads = parse_int(k, v); }},
      {"probe.head_dim",
       [](auto& c, auto& k, auto& v) { c.probe.head_dim = parse_int(k, v); }},
      {"probe.lr", [](auto& c, auto& k, auto& v) { c.probe.lr = parse_real(k, v); }},
      {"probe.epochs", [](auto& c, auto& k, auto& v) { c.probe.epochs = parse_int(k, v); }},
      {"probe.holdout_frac",
       [](auto& c, auto& k, auto& v) { c.probe.holdout_frac = parse_real(k, v); }},
      {"probe.rollouts",
       [](auto& c, auto& k, auto& v) { c.probe.rollouts = parse_int(k, v); }},
      {"grpo.steps", [](auto& c, auto& k, auto& v) { c.grpo.steps = parse_int(k, v); }},
      {"grpo.group_size",
       [](auto& c, auto& k, auto& v) { c.grpo.group_size = parse_int(k, v); }},
      {"grpo.tasks_per_step",
       [](auto& c, auto& k, auto& v) { c.grpo.tasks_per_step = parse_int(k, v); }},
      {"grpo.lr", [](auto& c, auto& k, auto& v) { c.grpo.lr = parse_real(k, v); }},
      {"grpo.condition", [](auto& c, auto&, auto& v) { c.grpo.condition = v; }},
      {"grpo.tau_mode", [](auto& c, auto&, auto& v) { c.grpo.tau_mode = v; }},
      {"grpo.tau_fixed",
       [](auto& c, auto& k, auto& v) { c.grpo.tau_fixed = parse_real(k, v); }},
      {"grpo.lambda", [](auto& c, auto& k, auto& v) { c.grpo.lambda = parse_real(k, v); }},
      {"grpo.group_stats_mode",
       [](auto& c, auto&, auto& v) { c.grpo.group_stats_mode = v; }},
      {"eval.task_count",
       [](auto& c, auto& k, auto& v) { c.eval.task_count = parse_int(k, v); }},
      {"eval.delta_faithful",
       [](auto& c, auto& k, auto& v) { c.eval.delta_faithful = parse_real(k, v); }},
      {"eval.theta_probe",
       [](auto& c, auto& k, auto& v) { c.eval.theta_probe = parse_real(k, v); }},
      {"eval.thresholds_sweep",
       [](auto& c, auto& k, auto& v) { c.eval.thresholds_sweep = parse_real_list(k, v); }},
  };
  return table;
}

void check(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw std::invalid_argument("config: key '" + key + "' " + why);
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end())
    throw std::invalid_argument("config: unknown key '" + key + "'");
  it->second(cfg, key, value);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has no '=': '" + line + "'");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  check(cfg.env.n_min >= 2 && cfg.env.n_min <= cfg.env.n_max && cfg.env.n_max <= 8,
        "env.n_min/env.n_max", "must satisfy 2 <= n_min <= n_max <= 8");
  check(cfg.env.m_min >= 5 && cfg.env.m_min <= cfg.env.m_max && cfg.env.m_max <= 13,
        "env.m_min/env.m_max", "must satisfy 5 <= m_min <= m_max <= 13");
  check(cfg.env.max_len > cfg.env.n_max, "env.max_len", "must exceed env.n_max");
  check(cfg.policy.hidden >= 1, "policy.hidden", "must be positive");
  check(cfg.policy.temperature >= 0.0, "policy.temperature", "must be >= 0");
  check(cfg.bc.epochs >= 0, "bc.epochs", "must be >= 0");
  check(cfg.bc.lr > 0.0, "bc.lr", "must be > 0");
  check(cfg.bc.demo_count >= 1, "bc.demo_count", "must be positive");
  check(cfg.bc.theater_p >= 0.0 && cfg.bc.theater_p < 1.0, "bc.theater_p",
        "must be in [0,1)");
  check(cfg.probe.heads >= 1, "probe.heads", "must be positive");
  check(cfg.probe.head_dim >= 1, "probe.head_dim", "must be positive");
  check(cfg.probe.lr > 0.0, "probe.lr", "must be > 0");
  check(cfg.probe.epochs >= 0, "probe.epochs", "must be >= 0");
  check(cfg.probe.holdout_frac > 0.0 && cfg.probe.holdout_frac < 1.0, "probe.holdout_frac",
        "must be in (0,1)");
  check(cfg.probe.rollouts >= 2, "probe.rollouts", "must be >= 2");
  check(cfg.grpo.steps >= 0, "grpo.steps", "must be >= 0");
  check(cfg.grpo.group_size >= 2, "grpo.group_size", "must be >= 2");
  check(cfg.grpo.tasks_per_step >= 1, "grpo.tasks_per_step", "must be positive");
  check(cfg.grpo.lr > 0.0, "grpo.lr", "must be > 0");
  check(cfg.grpo.condition == "baseline" || cfg.grpo.condition == "length_penalty" ||
            cfg.grpo.condition == "profil",
        "grpo.condition", "must be baseline, length_penalty, or profil");
  check(cfg.grpo.tau_mode == "fixed" || cfg.grpo.tau_mode == "adaptive", "grpo.tau_mode",
        "must be fixed or adaptive");
  check(cfg.grpo.tau_fixed >= 0.0 && cfg.grpo.tau_fixed <= 1.0, "grpo.tau_fixed",
        "must be in [0,1]");
  check(cfg.grpo.lambda >= 0.0, "grpo.lambda", "must be >= 0");
  check(cfg.grpo.group_stats_mode == "all" || cfg.grpo.group_stats_mode == "unfiltered",
        "grpo.group_stats_mode", "must be all or unfiltered");
  check(cfg.eval.task_count >= 1, "eval.task_count", "must be positive");
  check(cfg.eval.delta_faithful >= 0.0 && cfg.eval.delta_faithful <= 1.0,
        "eval.delta_faithful", "must be in [0,1]");
  check(cfg.eval.theta_probe >= 0.0 && cfg.eval.theta_probe <= 1.0, "eval.theta_probe",
        "must be in [0,1]");
  check(!cfg.eval.thresholds_sweep.empty(), "eval.thresholds_sweep", "must be non-empty");
  check(cfg.train_task_count >= 1, "train_task_count", "must be positive");
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "seed=" << c.seed << "\n";
  out << "train_task_count=" << c.train_task_count << "\n";
  out << "env.n_min=" << c.env.n_min << "\n";
  out << "env.n_max=" << c.env.n_max << "\n";
  out << "env.m_min=" << c.env.m_min << "\n";
  out << "env.m_max=" << c.env.m_max << "\n";
  out << "env.max_len=" << c.env.max_len << "\n";
  out << "policy.hidden=" << c.policy.hidden << "\n";
  out << "policy.temperature=" << c.policy.temperature << "\n";
  out << "bc.epochs=" << c.bc.epochs << "\n";
  out << "bc.lr=" << c.bc.lr << "\n";
  out << "bc.demo_count=" << c.bc.demo_count << "\n";
  out << "bc.theater_p=" << c.bc.theater_p << "\n";
  out << "probe.heads=" << c.probe.heads << "\n";
  out << "probe.head_dim=" << c.probe.head_dim << "\n";
  out << "probe.lr=" << c.probe.lr << "\n";
  out << "probe.epochs=" << c.probe.epochs << "\n";
  out << "probe.holdout_frac=" << c.probe.holdout_frac << "\n";
  out << "probe.rollouts=" << c.probe.rollouts << "\n";
  out << "grpo.steps=" << c.grpo.steps << "\n";
  out << "grpo.group_size=" << c.grpo.group_size << "\n";
  out << "grpo.tasks_per_step=" << c.grpo.tasks_per_step << "\n";
  out << "grpo.lr=" << c.grpo.lr << "\n";
  out << "grpo.condition=" << c.grpo.condition << "\n";
  out << "grpo.tau_mode=" << c.grpo.tau_mode << "\n";
  out << "grpo.tau_fixed=" << c.grpo.tau_fixed << "\n";
  out << "grpo.lambda=" << c.grpo.lambda << "\n";
  out << "grpo.group_stats_mode=" << c.grpo.group_stats_mode << "\n";
  out << "eval.task_count=" << c.eval.task_count << "\n";
  out << "eval.delta_faithful=" << c.eval.delta_faithful << "\n";
  out << "eval.theta_probe=" << c.eval.theta_probe << "\n";
  out << "eval.thresholds_sweep=";
  for (std::size_t i = 0; i < c.eval.thresholds_sweep.size(); ++i) {
    if (i) out << ",";
    out << c.eval.thresholds_sweep[i];
  }
  out << "\n";
  return out.str();
}

}  // namespace modchain
