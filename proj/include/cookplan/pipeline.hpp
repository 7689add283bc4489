#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cookplan/converter/backend.hpp"
#include "cookplan/error.hpp"
#include "cookplan/funcseq/funcseq.hpp"
#include "cookplan/goals/compiler.hpp"
#include "cookplan/goals/recipe_plan.hpp"
#include "cookplan/kitchen/domain.hpp"
#include "cookplan/kitchen/scenario.hpp"
#include "cookplan/pddl/grounding.hpp"
#include "cookplan/sim/execute.hpp"
#include "cookplan/sim/validator.hpp"

namespace cookplan::pipeline {

/// A required input file is missing or unreadable.
class FileError : public Error {
 public:
  using Error::Error;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FileError("cannot read '" + p.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, std::string_view text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw FileError("cannot write '" + p.string() + "'");
}

/// Scenario plus everything derived from it for planning and replay.
struct Kitchen {
  kitchen::ScenarioConfig scenario;
  pddl::DomainModel domain;
  pddl::ProblemModel problem;
  pddl::GroundedTask task;

  explicit Kitchen(kitchen::ScenarioConfig s)
      : scenario(std::move(s)),
        domain(kitchen::build_domain(scenario.ignition_level)),
        problem(kitchen::build_problem(scenario)),
        task(pddl::ground(domain, problem)) {}

  sim::Replayer replayer() const { return sim::Replayer(domain, problem); }
};

inline Kitchen load_kitchen(const std::filesystem::path& scenario_path) {
  return Kitchen(kitchen::parse_scenario(read_text(scenario_path)));
}

/// compile stage: sequence text -> goals text, with diagnostics when a
/// scenario is known.
struct CompileOutput {
  goals::CompiledGoals goals;
  std::vector<funcseq::Diagnostic> diagnostics;
};

inline CompileOutput compile_stage(std::string_view sequence_text, const kitchen::ScenarioConfig* scenario) {
  const auto fs = funcseq::parse_sequence(sequence_text);
  CompileOutput out;
  if (scenario != nullptr) {
    out.diagnostics = funcseq::validate_sequence(fs, funcseq::KnownObjects::from_scenario(*scenario));
    const auto symbols = goals::scenario_symbols(*scenario);
    out.goals = goals::compile_sequence(fs, &symbols);
  } else {
    out.goals = goals::compile_sequence(fs);
  }
  return out;
}

/// Parses a `[schema=]immediate|delay:N|detector` policy list into an oracle.
/// `probe` and `stream` back every `detector` entry.
inline sim::StateChangeOracle parse_oracle(const std::vector<std::string>& specs,
                                           const staterec::LinearProbe* probe,
                                           const staterec::FeatureSeries* stream, double timeout) {
  sim::StateChangeOracle oracle;
  oracle.timeout = timeout;
  for (const auto& spec : specs) {
    std::string schema, policy = spec;
    if (const auto eq = spec.find('='); eq != std::string::npos) {
      schema = spec.substr(0, eq);
      policy = spec.substr(eq + 1);
      if (!sim::waits_for_state(schema)) {
        throw ModelError("'" + schema + "' does not wait for a state change");
      }
    }
    sim::WaitPolicy p;
    if (policy == "immediate") {
      p = sim::WaitPolicy::immediate();
    } else if (policy.rfind("delay:", 0) == 0) {
      const auto n = policy.substr(6);
      if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos) {
        throw ModelError("delay needs a frame count, e.g. delay:30");
      }
      p = sim::WaitPolicy::delay(std::stoul(n));
    } else if (policy == "detector") {
      if (probe == nullptr || stream == nullptr) {
        throw ModelError("the detector policy needs a probe and a feature stream");
      }
      p = sim::WaitPolicy::detector(*probe, *stream);
    } else {
      throw ModelError("unknown oracle policy '" + policy + "'");
    }
    if (schema.empty()) oracle.fallback = p;
    else oracle.per_schema[schema] = p;
  }
  return oracle;
}

/// Stages of `pipeline`, in order.
inline const std::vector<std::string>& stages() {
  static const std::vector<std::string> s = {"convert", "compile", "plan", "validate", "simulate"};
  return s;
}

/// Artifact file names inside a run directory.
struct Artifacts {
  static constexpr const char* prompt = "prompt.txt";
  static constexpr const char* response = "response.txt";
  static constexpr const char* transcript = "transcript.jsonl";
  static constexpr const char* sequence = "sequence.txt";
  static constexpr const char* diagnostics = "diagnostics.txt";
  static constexpr const char* goals = "goals.txt";
  static constexpr const char* plan = "plan.txt";
  static constexpr const char* validation = "validation.txt";
  static constexpr const char* trace = "trace.txt";
  static constexpr const char* manifest = "manifest.txt";
};

/// `<stage> <relative path> <sha256>` per artifact, in stage order.
inline std::string manifest_text(const std::filesystem::path& dir) {
  const std::vector<std::pair<std::string, std::string>> entries = {
      {"convert", Artifacts::prompt},     {"convert", Artifacts::response},
      {"convert", Artifacts::transcript}, {"convert", Artifacts::sequence},
      {"compile", Artifacts::diagnostics}, {"compile", Artifacts::goals},
      {"plan", Artifacts::plan},          {"validate", Artifacts::validation},
      {"simulate", Artifacts::trace},
  };
  std::string out;
  for (const auto& [stage, name] : entries) {
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) continue;
    out += stage + " " + name + " " + converter::sha256_hex(read_text(p)) + "\n";
  }
  return out;
}

}  // namespace cookplan::pipeline
