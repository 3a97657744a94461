#include "toxsearch/runlog.hpp"

#include <fstream>
#include <stdexcept>

namespace toxsearch {

using nlohmann::json;

json to_json(const ChildRecord& r) {
  json j{{"type", "child"},
         {"gen", r.generation},
         {"id", r.id},
         {"operator", r.op},
         {"parent_ids", r.parent_ids},
         {"parent_baseline", r.parent_baseline},
         {"text", r.text},
         {"status", r.status},
         {"cause", r.cause},
         {"removed", r.removed},
         {"fallback_sampling", r.fallback_sampling},
         {"mode", r.mode}};
  j["toxicity"] = r.toxicity ? json(*r.toxicity) : json(nullptr);
  j["tier"] = r.tier ? json(*r.tier) : json(nullptr);
  return j;
}

json to_json(const GenerationRecord& r) {
  json j{{"type", "generation"},
         {"gen", r.generation},
         {"mode", r.mode},
         {"mean_fitness", r.mean_fitness},
         {"best_score", r.best_score},
         {"attempted", r.attempted},
         {"skipped", r.skipped},
         {"window_means", r.window_means},
         {"window_bests", r.window_bests}};
  j["slope"] = r.slope ? json(*r.slope) : json(nullptr);
  return j;
}

ChildRecord child_record_from_json(const json& j) {
  ChildRecord r;
  r.generation = j.at("gen").get<int>();
  r.id = j.at("id").get<std::uint64_t>();
  r.op = j.at("operator").get<std::string>();
  r.parent_ids = j.at("parent_ids").get<std::vector<std::uint64_t>>();
  r.parent_baseline = j.at("parent_baseline").get<double>();
  r.text = j.at("text").get<std::string>();
  if (!j.at("toxicity").is_null()) r.toxicity = j.at("toxicity").get<double>();
  r.status = j.at("status").get<std::string>();
  r.cause = j.value("cause", "");
  if (!j.at("tier").is_null()) r.tier = j.at("tier").get<std::string>();
  r.removed = j.value("removed", false);
  r.fallback_sampling = j.value("fallback_sampling", false);
  r.mode = j.value("mode", "");
  return r;
}

GenerationRecord generation_record_from_json(const json& j) {
  GenerationRecord r;
  r.generation = j.at("gen").get<int>();
  r.mode = j.at("mode").get<std::string>();
  if (!j.at("slope").is_null()) r.slope = j.at("slope").get<double>();
  r.mean_fitness = j.at("mean_fitness").get<double>();
  r.best_score = j.at("best_score").get<double>();
  r.attempted = j.value("attempted", 0);
  r.skipped = j.value("skipped", 0);
  r.window_means = j.value("window_means", std::vector<double>{});
  r.window_bests = j.value("window_bests", std::vector<double>{});
  return r;
}

struct RunLogWriter::Impl {
  std::ofstream out;
};

RunLogWriter::RunLogWriter(const std::filesystem::path& file, bool append)
    : impl_(std::make_unique<Impl>()) {
  impl_->out.open(file, append ? std::ios::app : std::ios::trunc);
  if (!impl_->out)
    throw std::runtime_error("cannot open run log for writing: " + file.string());
}

RunLogWriter::~RunLogWriter() = default;

void RunLogWriter::write(const ChildRecord& r) {
  impl_->out << to_json(r).dump() << '\n';
}

void RunLogWriter::write(const GenerationRecord& r) {
  impl_->out << to_json(r).dump() << '\n';
}

void RunLogWriter::flush() { impl_->out.flush(); }

RunLog read_run_log(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open run log: " + file.string());
  RunLog log;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("run log " + file.string() + " line " +
                               std::to_string(lineno) + ": " + e.what());
    }
    std::string type = j.value("type", "child");
    if (type == "child")
      log.children.push_back(child_record_from_json(j));
    else if (type == "generation")
      log.generations.push_back(generation_record_from_json(j));
  }
  return log;
}

}  // namespace toxsearch
