// cookplan: recipe text -> function sequence -> step goals -> plan -> trace.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cookplan/converter/backend.hpp"
#include "cookplan/funcseq/funcseq.hpp"
#include "cookplan/goals/compiler.hpp"
#include "cookplan/goals/recipe_plan.hpp"
#include "cookplan/pddl/printer.hpp"
#include "cookplan/pipeline.hpp"
#include "cookplan/sim/execute.hpp"
#include "cookplan/sim/validator.hpp"
#include "cookplan/staterec/probe.hpp"
#include "cookplan/staterec/series.hpp"

namespace fs = std::filesystem;
using namespace cookplan;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kUnsolvable = 3,
  kBackend = 4,
  kValidation = 5,
  kDetection = 6,
};

/// Writes to `path`, or to stdout when `path` is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    pipeline::write_text(path, text);
  }
}

// --- stages shared by the subcommands and `pipeline` -----------------------

struct BackendOptions {
  std::string mode = "fixture";
  std::string fixtures = "data/fixtures";
  std::string endpoint;
  std::string model = "gpt-4-0613";
  double timeout = 60.0;

  converter::BackendConfig config() const {
    converter::BackendConfig c;
    c.mode = mode == "live" ? converter::BackendConfig::Mode::live : converter::BackendConfig::Mode::fixture;
    c.fixture_dir = fixtures;
    c.endpoint = endpoint;
    c.model = model;
    c.timeout_seconds = timeout;
    return c;
  }
};

struct ConvertPaths {
  std::string sequence;
  std::string prompt;
  std::string response;
  std::string transcript;
};

int convert_stage(const std::string& recipe_path, const BackendOptions& backend, const ConvertPaths& out) {
  const auto recipe = pipeline::read_text(recipe_path);
  const auto prompt = converter::build_prompt(converter::known_recipes(), recipe);
  if (!out.prompt.empty()) pipeline::write_text(out.prompt, prompt);
  std::optional<fs::path> transcript;
  if (!out.transcript.empty()) transcript = out.transcript;
  const auto c = converter::convert(recipe, backend.config(), converter::known_recipes(), transcript);
  if (!out.response.empty()) pipeline::write_text(out.response, c.response);
  emit(out.sequence, funcseq::print_sequence(c.sequence));
  return kOk;
}

int compile_stage(const std::string& sequence_path, const std::string& scenario_path,
                  const std::string& goals_out, const std::string& diagnostics_out) {
  const auto text = pipeline::read_text(sequence_path);
  std::optional<kitchen::ScenarioConfig> scenario;
  if (!scenario_path.empty()) scenario = kitchen::parse_scenario(pipeline::read_text(scenario_path));
  const auto result = pipeline::compile_stage(text, scenario ? &*scenario : nullptr);
  const auto diag = funcseq::format_diagnostics(result.diagnostics);
  std::cerr << diag;
  if (!diagnostics_out.empty()) pipeline::write_text(diagnostics_out, diag);
  emit(goals_out, goals::print_goals(result.goals));
  return kOk;
}

int plan_stage(const std::string& scenario_path, const std::string& goals_path, const std::string& plan_out,
               std::size_t budget) {
  const auto k = pipeline::load_kitchen(scenario_path);
  const auto goals = goals::parse_goals(pipeline::read_text(goals_path));
  planner::PlannerOptions opts;
  opts.node_budget = budget;
  const auto r = goals::plan_recipe(k.task, goals, opts);
  if (!r.solved()) {
    std::cerr << "cookplan: " << r.report << "\n";
    return kUnsolvable;
  }
  emit(plan_out, goals::print_plan(k.task, r.plan));
  return kOk;
}

int validate_stage(const std::string& scenario_path, const std::string& goals_path, const std::string& plan_path,
                   const std::string& report_out) {
  const auto k = pipeline::load_kitchen(scenario_path);
  const auto goals = goals::parse_goals(pipeline::read_text(goals_path));
  const auto plan = goals::parse_plan_file(pipeline::read_text(plan_path));
  const auto report = sim::validate(k.replayer(), plan, goals);
  emit(report_out, report.text());
  return report.ok() ? kOk : kValidation;
}

struct OracleOptions {
  std::vector<std::string> policies;
  std::string probe;
  std::string features;
  double timeout = 600.0;
};

int simulate_stage(const std::string& scenario_path, const std::string& plan_path, const OracleOptions& o,
                   const std::string& trace_out) {
  const auto k = pipeline::load_kitchen(scenario_path);
  const auto plan = goals::parse_plan_file(pipeline::read_text(plan_path));
  std::optional<staterec::LinearProbe> probe;
  std::optional<staterec::FeatureSeries> stream;
  if (!o.probe.empty()) probe = staterec::load_probe(pipeline::read_text(o.probe));
  if (!o.features.empty()) stream = staterec::parse_feature_csv(pipeline::read_text(o.features));
  const auto oracle = pipeline::parse_oracle(o.policies, probe ? &*probe : nullptr,
                                             stream ? &*stream : nullptr, o.timeout);
  const auto trace = sim::execute(k.replayer(), plan, oracle);
  emit(trace_out, sim::print_trace(trace));
  if (!trace.complete()) {
    std::cerr << "cookplan: state change not observed within " << o.timeout << " s at "
              << trace.timeout->action << "\n";
    return kDetection;
  }
  return kOk;
}

// --- staterec ----------------------------------------------------------------

std::vector<staterec::AnnotatedSeries> load_annotated(const std::vector<std::string>& features,
                                                      const std::vector<std::string>& annotations) {
  if (features.size() != annotations.size()) {
    throw ModelError("give one --annotation per --features file");
  }
  std::vector<staterec::AnnotatedSeries> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    staterec::AnnotatedSeries a;
    a.series = staterec::parse_feature_csv(pipeline::read_text(features[i]));
    a.annotation = staterec::parse_annotation(pipeline::read_text(annotations[i]));
    out.push_back(std::move(a));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Recipe-to-plan compiler and kitchen simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cookplan 0.1.0");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert a recipe into a function sequence");
  std::string recipe, scenario, sequence, goals_path, plan_path, out;
  BackendOptions backend;
  ConvertPaths convert_paths;
  convert->add_option("--recipe", recipe, "Recipe text file")->required()->check(CLI::ExistingFile);
  convert->add_option("--backend", backend.mode, "fixture or live")->check(CLI::IsMember({"fixture", "live"}));
  convert->add_option("--fixtures", backend.fixtures, "Fixture response directory");
  convert->add_option("--endpoint", backend.endpoint, "Chat-completion URL (live)");
  convert->add_option("--model", backend.model, "Model identifier (live)");
  convert->add_option("--timeout", backend.timeout, "Request timeout in seconds")->check(CLI::PositiveNumber);
  convert->add_option("--out", convert_paths.sequence, "Sequence output (default stdout)");
  convert->add_option("--prompt-out", convert_paths.prompt, "Write the prompt here");
  convert->add_option("--response-out", convert_paths.response, "Write the raw response here");
  convert->add_option("--transcript", convert_paths.transcript, "Append a JSON transcript line here");

  // compile
  auto* compile = app.add_subcommand("compile", "Compile a function sequence into step goals");
  std::string diagnostics_out;
  compile->add_option("--sequence", sequence, "Function sequence file")->required()->check(CLI::ExistingFile);
  compile->add_option("--scenario", scenario, "Scenario file; enables object checks")->check(CLI::ExistingFile);
  compile->add_option("--out", out, "Goals output (default stdout)");
  compile->add_option("--diagnostics-out", diagnostics_out, "Write sequence diagnostics here");

  // plan
  auto* plan = app.add_subcommand("plan", "Plan every step of compiled goals");
  std::size_t budget = planner::PlannerOptions{}.node_budget;
  plan->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--goals", goals_path, "Compiled goals file")->required()->check(CLI::ExistingFile);
  plan->add_option("--out", out, "Plan output (default stdout)");
  plan->add_option("--budget", budget, "Node expansion budget per step")->check(CLI::PositiveNumber);

  // validate
  auto* validate = app.add_subcommand("validate", "Replay a plan and check every condition");
  validate->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  validate->add_option("--goals", goals_path, "Compiled goals file")->required()->check(CLI::ExistingFile);
  validate->add_option("--plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  validate->add_option("--out", out, "Report output (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Execute a plan and write a trace");
  OracleOptions oracle;
  simulate->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--oracle", oracle.policies,
                       "[schema=]immediate|delay:N|detector (repeatable; default immediate)");
  simulate->add_option("--probe", oracle.probe, "Probe file for the detector policy")->check(CLI::ExistingFile);
  simulate->add_option("--features", oracle.features, "Feature CSV streamed to the detector")
      ->check(CLI::ExistingFile);
  simulate->add_option("--wait-timeout", oracle.timeout, "Longest wait in seconds")->check(CLI::PositiveNumber);
  simulate->add_option("--out", out, "Trace output (default stdout)");

  // emit-domain
  auto* emit_domain = app.add_subcommand("emit-domain", "Print the kitchen domain in PDDL");
  std::string problem_out, ignition = std::string(kitchen::kDefaultIgnitionLevel);
  bool report = false;
  emit_domain->add_option("--out", out, "Domain output (default stdout)");
  emit_domain->add_option("--scenario", scenario, "Also build this scenario's problem")->check(CLI::ExistingFile);
  emit_domain->add_option("--problem-out", problem_out, "Problem output (needs --scenario)");
  emit_domain->add_flag("--report", report, "Print a grounding report (needs --scenario)");
  emit_domain->add_option("--ignition-level", ignition, "Stove level after ignition (without --scenario)");

  // staterec
  auto* staterec_cmd = app.add_subcommand("staterec", "Train and run the state-change probe");
  staterec_cmd->require_subcommand(1);
  std::vector<std::string> features, annotations;
  std::string probe_path, annotation_out;
  staterec::TrainConfig train_cfg;
  auto* train = staterec_cmd->add_subcommand("train", "Train a probe on annotated series");
  train->add_option("--features", features, "Feature CSV (repeatable)")->required()->check(CLI::ExistingFile);
  train->add_option("--annotation", annotations, "Annotation file per series")->required()->check(CLI::ExistingFile);
  train->add_option("--l2", train_cfg.l2, "L2 strength")->check(CLI::PositiveNumber);
  train->add_option("--epochs", train_cfg.max_epochs, "Maximum iterations")->check(CLI::PositiveNumber);
  train->add_option("--tol", train_cfg.tol, "Stop when the loss drops less than this")->check(CLI::PositiveNumber);
  train->add_option("--seed", train_cfg.seed, "Seed echoed into the probe file");
  train->add_option("--out", out, "Probe output (default stdout)");

  auto* detect = staterec_cmd->add_subcommand("detect", "Find the change point in a series");
  std::string feature_file;
  detect->add_option("--probe", probe_path, "Probe file")->required()->check(CLI::ExistingFile);
  detect->add_option("--features", feature_file, "Feature CSV")->required()->check(CLI::ExistingFile);
  detect->add_option("--out", out, "Per-frame scores output");

  auto* eval = staterec_cmd->add_subcommand("eval", "Detected minus annotated time");
  std::string annotation_file;
  eval->add_option("--probe", probe_path, "Probe file")->required()->check(CLI::ExistingFile);
  eval->add_option("--features", feature_file, "Feature CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--annotation", annotation_file, "Annotation file")->required()->check(CLI::ExistingFile);

  auto* synth = staterec_cmd->add_subcommand("synth", "Generate a synthetic step-change series");
  std::size_t dim = 8, frames = 600, change = 300;
  double separation = 4.0;
  std::uint64_t seed = 1;
  synth->add_option("--dim", dim, "Feature dimension")->check(CLI::PositiveNumber);
  synth->add_option("--frames", frames, "Number of frames at 10 Hz");
  synth->add_option("--change", change, "First post-change frame");
  synth->add_option("--separation", separation, "Mean distance in noise standard deviations");
  synth->add_option("--seed", seed, "Noise seed");
  synth->add_option("--out", out, "Feature CSV output (default stdout)");
  synth->add_option("--annotation-out", annotation_out, "Annotation output");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run every stage and record a manifest");
  std::string run_dir, from = "convert";
  pipe->add_option("--recipe", recipe, "Recipe text file")->required()->check(CLI::ExistingFile);
  pipe->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  pipe->add_option("--backend", backend.mode, "fixture or live")->check(CLI::IsMember({"fixture", "live"}));
  pipe->add_option("--fixtures", backend.fixtures, "Fixture response directory");
  pipe->add_option("--endpoint", backend.endpoint, "Chat-completion URL (live)");
  pipe->add_option("--model", backend.model, "Model identifier (live)");
  pipe->add_option("--timeout", backend.timeout, "Request timeout in seconds")->check(CLI::PositiveNumber);
  pipe->add_option("--out", run_dir, "Run directory")->required();
  pipe->add_option("--from", from, "Resume from this stage using the artifacts already in --out")
      ->check(CLI::IsMember(pipeline::stages()));
  pipe->add_option("--budget", budget, "Node expansion budget per step")->check(CLI::PositiveNumber);
  pipe->add_option("--oracle", oracle.policies, "Simulation oracle policy (repeatable)");
  pipe->add_option("--probe", oracle.probe, "Probe file for the detector policy")->check(CLI::ExistingFile);
  pipe->add_option("--features", oracle.features, "Feature CSV for the detector")->check(CLI::ExistingFile);
  pipe->add_option("--wait-timeout", oracle.timeout, "Longest wait in seconds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (convert->parsed()) return convert_stage(recipe, backend, convert_paths);
  if (compile->parsed()) return compile_stage(sequence, scenario, out, diagnostics_out);
  if (plan->parsed()) return plan_stage(scenario, goals_path, out, budget);
  if (validate->parsed()) return validate_stage(scenario, goals_path, plan_path, out);
  if (simulate->parsed()) return simulate_stage(scenario, plan_path, oracle, out);

  if (emit_domain->parsed()) {
    if ((report || !problem_out.empty()) && scenario.empty()) {
      std::cerr << "cookplan: --report and --problem-out need --scenario\n";
      return kUsage;
    }
    if (scenario.empty()) {
      emit(out, pddl::print_domain(kitchen::build_domain(ignition)));
      return kOk;
    }
    const auto k = pipeline::load_kitchen(scenario);
    emit(out, pddl::print_domain(k.domain));
    if (!problem_out.empty()) emit(problem_out, pddl::print_problem(k.problem));
    if (report) std::cerr << pddl::grounding_report(k.domain, k.task);
    return kOk;
  }

  if (train->parsed()) {
    const auto data = load_annotated(features, annotations);
    const auto probe = staterec::train_probe(data, train_cfg);
    emit(out, staterec::save_probe(probe));
    return kOk;
  }
  if (detect->parsed()) {
    const auto probe = staterec::load_probe(pipeline::read_text(probe_path));
    const auto series = staterec::parse_feature_csv(pipeline::read_text(feature_file));
    const auto r = staterec::detect_change(probe, series);
    if (!out.empty()) {
      std::string scores = "t,score,label\n";
      for (std::size_t i = 0; i < series.size(); ++i) {
        scores += staterec::format_double(series.timestamps[i]) + "," + staterec::format_double(r.scores[i]) +
                  "," + std::to_string(r.labels[i]) + "\n";
      }
      pipeline::write_text(out, scores);
    }
    if (!r.time) {
      std::cout << "detected none\n";
      return kDetection;
    }
    std::cout << "detected " << staterec::format_double(*r.time) << " frame " << *r.frame << "\n";
    return kOk;
  }
  if (eval->parsed()) {
    const auto probe = staterec::load_probe(pipeline::read_text(probe_path));
    staterec::AnnotatedSeries a;
    a.series = staterec::parse_feature_csv(pipeline::read_text(feature_file));
    a.annotation = staterec::parse_annotation(pipeline::read_text(annotation_file));
    const auto diff = staterec::evaluate(probe, a);
    if (!diff) {
      std::cout << "miss\n";
      return kDetection;
    }
    std::cout << "difference " << staterec::format_double(*diff) << "\n";
    return kOk;
  }
  if (synth->parsed()) {
    const auto a = staterec::synthesize_series(dim, frames, change, separation, seed);
    emit(out, staterec::write_feature_csv(a.series));
    if (!annotation_out.empty()) pipeline::write_text(annotation_out, staterec::write_annotation(a.annotation));
    return kOk;
  }

  if (pipe->parsed()) {
    using A = pipeline::Artifacts;
    const fs::path dir = run_dir;
    fs::create_directories(dir);
    auto at = [&](const char* name) { return (dir / name).string(); };
    const auto& names = pipeline::stages();
    const auto first = static_cast<std::size_t>(std::find(names.begin(), names.end(), from) - names.begin());
    auto finish = [&](int code) {
      pipeline::write_text(dir / A::manifest, pipeline::manifest_text(dir));
      return code;
    };
    int code = kOk;
    try {
      for (std::size_t s = first; s < names.size() && code == kOk; ++s) {
        const auto& stage = names[s];
        if (stage == "convert") {
          fs::remove(dir / A::transcript);
          code = convert_stage(recipe, backend,
                               ConvertPaths{at(A::sequence), at(A::prompt), at(A::response), at(A::transcript)});
        } else if (stage == "compile") {
          code = compile_stage(at(A::sequence), scenario, at(A::goals), at(A::diagnostics));
        } else if (stage == "plan") {
          code = plan_stage(scenario, at(A::goals), at(A::plan), budget);
        } else if (stage == "validate") {
          code = validate_stage(scenario, at(A::goals), at(A::plan), at(A::validation));
        } else {
          code = simulate_stage(scenario, at(A::plan), oracle, at(A::trace));
        }
      }
    } catch (...) {
      finish(code);
      throw;
    }
    return finish(code);
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pipeline::FileError& e) {
    std::cerr << "cookplan: " << e.what() << "\n";
    return kUsage;
  } catch (const converter::BackendError& e) {
    std::cerr << "cookplan: backend error (" << converter::to_string(e.kind()) << "): " << e.what() << "\n";
    return kBackend;
  } catch (const converter::ExtractionError& e) {
    std::cerr << "cookplan: extraction failed: " << e.what() << "\n";
    return kParse;
  } catch (const ParseError& e) {
    std::cerr << "cookplan: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ModelError& e) {
    std::cerr << "cookplan: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "cookplan: " << e.what() << "\n";
    return kUsage;
  }
}
