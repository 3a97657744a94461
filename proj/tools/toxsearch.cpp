// Command-line front end: evolve / analyze / transfer / report /
// validate-config. Exit codes: 0 ok, 2 bad config, 3 backend failure,
// 4 empty input.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "toxsearch/analytics.hpp"
#include "toxsearch/run.hpp"
#include "toxsearch/runlog.hpp"
#include "toxsearch/transfer.hpp"
#include "toxsearch/validity.hpp"

using nlohmann::json;
using namespace toxsearch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitEmptyInput = 4;

struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << content;
}

int cmd_evolve(const std::string& config_file, bool resume) {
  RunConfig config = load_run_config(config_file);
  if (config.seed_files.empty() && !resume)
    throw EmptyInputError("no seed_files in config");
  RunResult result = run_evolution(config, resume);
  std::cout << "generations: " << result.generations_completed
            << "\nbest_score: " << result.best_score
            << "\nelites: " << result.elites.size() << "\noutput: "
            << config.output_dir.string() << "\n";
  return kExitOk;
}

std::vector<ChildRecord> load_children(const std::filesystem::path& log_file) {
  RunLog log = read_run_log(log_file);
  std::vector<ChildRecord> children;
  for (auto& c : log.children) {
    if (c.op != kSeedOperatorName) children.push_back(std::move(c));
  }
  return children;
}

int cmd_analyze(const std::vector<std::string>& log_files,
                const std::string& output_dir, int bootstrap_iterations,
                std::uint64_t seed) {
  if (log_files.empty()) throw EmptyInputError("no run logs given");
  std::vector<std::vector<OperatorMetrics>> runs;
  for (const auto& file : log_files) {
    auto children = load_children(file);
    if (children.empty()) throw EmptyInputError("run log has no children: " + file);
    runs.push_back(compute_all_operator_metrics(children));
  }
  std::filesystem::create_directories(output_dir);
  const std::filesystem::path out(output_dir);
  for (size_t i = 0; i < runs.size(); ++i) {
    const std::string stem = "operator_metrics_run" + std::to_string(i);
    write_text(out / (stem + ".csv"), metrics_to_csv(runs[i]));
    write_text(out / (stem + ".json"), metrics_to_json(runs[i]).dump(2) + "\n");
  }
  auto batteries = run_statistical_battery(runs, 0.05, bootstrap_iterations, seed);
  write_text(out / "statistical_battery.json", battery_to_json(batteries).dump(2) + "\n");
  std::cout << "runs analyzed: " << runs.size() << "\nmetric batteries: "
            << batteries.size() << "\noutput: " << output_dir << "\n";
  return kExitOk;
}

int cmd_transfer(const std::string& config_file, const std::string& elites_file,
                 double quantile, const std::string& output_dir) {
  RunConfig config = load_run_config(config_file);
  if (config.transfer_targets.empty())
    throw ConfigError("config has no transfer_targets");

  std::ifstream in(elites_file);
  if (!in) throw std::runtime_error("cannot open elites file: " + elites_file);
  json j;
  in >> j;
  std::vector<TransferEntry> entries;
  for (const auto& g : j) {
    entries.push_back({g.at("text").get<std::string>(),
                       g.at("toxicity").get<double>()});
  }
  if (entries.empty()) throw EmptyInputError("elites file is empty");

  TransferSet set = build_transfer_set(entries, quantile);
  std::vector<TargetModel> targets;
  for (const auto& spec : config.transfer_targets) {
    targets.push_back({spec.name,
                       build_responder(spec.responder, config.requests_per_second),
                       build_moderation(spec.moderation, config.requests_per_second)});
  }
  std::vector<std::string> patterns =
      config.refusal_patterns_file
          ? load_refusal_patterns(*config.refusal_patterns_file)
          : default_refusal_patterns();
  TransferReport report = evaluate_transfer(set, targets, patterns);

  std::filesystem::create_directories(output_dir);
  const std::filesystem::path out(output_dir);
  write_text(out / "transfer_report.json", transfer_report_to_json(report).dump(2) + "\n");
  write_text(out / "transfer_report.csv", transfer_report_to_csv(report));
  write_text(out / "transfer_plot_data.json", transfer_plot_data(report).dump(2) + "\n");
  std::cout << "transfer set size: " << set.entries.size() << "\ntargets: "
            << report.targets.size() << "\noutput: " << output_dir << "\n";
  for (const auto& t : report.targets) {
    if (!t.complete) {
      std::cerr << "target incomplete (backend failure): " << t.model << "\n";
      return kExitBackend;
    }
  }
  return kExitOk;
}

int cmd_report(const std::string& log_file) {
  RunLog log = read_run_log(log_file);
  if (log.generations.empty()) throw EmptyInputError("run log has no generations");
  const auto& last = log.generations.back();
  std::cout << "generations completed: " << last.generation
            << "\nbest score: " << last.best_score
            << "\nfinal mean fitness: " << last.mean_fitness << "\n\nmode counts:\n";
  std::map<std::string, int> modes;
  for (const auto& g : log.generations) ++modes[g.mode];
  for (const auto& [mode, count] : modes)
    std::cout << "  " << mode << ": " << count << "\n";
  auto children = load_children(log_file);
  std::cout << "\n" << metrics_to_csv(compute_all_operator_metrics(children));
  return kExitOk;
}

int cmd_validate(const std::string& config_file) {
  RunConfig config = load_run_config(config_file);
  std::cout << run_config_to_json(config).dump(2) << "\n";
  if (!config.backends.empty()) {
    check_backend_health(build_backend_suite(config));
    std::cout << "backends healthy\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolutionary search over adversarial text prompts"};
  app.require_subcommand(1);

  std::string config_file, elites_file, log_file, output_dir = "out";
  std::vector<std::string> log_files;
  bool resume = false;
  double quantile = 0.25;
  int bootstrap_iterations = 1000;
  std::uint64_t seed = 42;

  auto* evolve = app.add_subcommand("evolve", "run the evolutionary search");
  evolve->add_option("--config", config_file, "JSON run config")->required();
  evolve->add_flag("--resume", resume, "resume from checkpoint.json");

  auto* analyze = app.add_subcommand("analyze", "operator analytics over run logs");
  analyze->add_option("--log", log_files, "run_log.jsonl (repeat per run)")->required();
  analyze->add_option("--output", output_dir, "output directory");
  analyze->add_option("--bootstrap", bootstrap_iterations, "bootstrap iterations");
  analyze->add_option("--seed", seed, "analytics rng seed");

  auto* transfer = app.add_subcommand("transfer", "evaluate elites on target models");
  transfer->add_option("--config", config_file, "JSON run config")->required();
  transfer->add_option("--elites", elites_file, "elites.json from a run")->required();
  transfer->add_option("--quantile", quantile, "top fraction to carry over");
  transfer->add_option("--output", output_dir, "output directory");

  auto* report = app.add_subcommand("report", "summarize a run log");
  report->add_option("--log", log_file, "run_log.jsonl")->required();

  auto* validate = app.add_subcommand("validate-config", "parse and echo a config");
  validate->add_option("--config", config_file, "JSON run config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve->parsed()) return cmd_evolve(config_file, resume);
    if (analyze->parsed())
      return cmd_analyze(log_files, output_dir, bootstrap_iterations, seed);
    if (transfer->parsed())
      return cmd_transfer(config_file, elites_file, quantile, output_dir);
    if (report->parsed()) return cmd_report(log_file);
    if (validate->parsed()) return cmd_validate(config_file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EmptyInputError& e) {
    std::cerr << "empty input: " << e.what() << "\n";
    return kExitEmptyInput;
  } catch (const BackendError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
