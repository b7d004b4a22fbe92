#include "lm/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lm/adequacy.hpp"
#include "lm/error.hpp"
#include "lm/format.hpp"
#include "lm/machining.hpp"
#include "lm/parser.hpp"
#include "lm/reducer.hpp"
#include "lm/solver.hpp"

namespace lm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Defaults read from --config or $LMTOOL_CONFIG; command-line flags win.
struct Config {
  SolveConfig solve;
  std::string format = "text";
  std::size_t count = 10;
  std::uint64_t seed = 42;
};

Config load_config(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SyntaxError, "config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SyntaxError, "config '" + path + "' is not a JSON object");
  try {
    if (doc.contains("max_candidates")) c.solve.max_candidates = doc["max_candidates"].get<std::uint64_t>();
    if (doc.contains("time_budget")) c.solve.time_budget_seconds = doc["time_budget"].get<double>();
    if (doc.contains("workers")) c.solve.workers = doc["workers"].get<unsigned>();
    if (doc.contains("format")) c.format = doc["format"].get<std::string>();
    if (doc.contains("count")) c.count = doc["count"].get<std::size_t>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SyntaxError, "config '" + path + "': " + e.what());
  }
  return c;
}

// A pack directory or a single .lm file.
LogicalModel load_model_arg(const std::string& arg) {
  const fs::path p(arg);
  if (fs::is_directory(p)) return load_pack(p).model;
  return load_model_file(p);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  f << text;
  if (!f.flush()) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
}

std::string value_text(const MaybeValue& v) { return v ? to_text(*v) : "undefined"; }

int cmd_check(const std::string& model_file, std::ostream& out) {
  const LogicalModel m = load_model_arg(model_file);
  const int n = m.order();
  out << "order " << n << ", |Σ" << n << "|=" << m.signature.level(n).size() << ", |Φ|="
      << m.formulas.size() << "\n";
  out << "levels:";
  for (int i = 0; i <= n; ++i) {
    std::size_t user = 0;
    for (const auto& s : m.signature.level(i)) user += !s.builtin;
    out << " Σ" << i << "=" << user;
  }
  out << "\n";
  out << "variables: " << m.variables.size() << ", fact tables:";
  std::size_t tables = 0;
  for (const auto& a : m.facts) tables += a.tables.size();
  out << " " << tables << "\n";
  return kOk;
}

json solve_json(const TaskSpec& task, const TaskResult& r) {
  json doc;
  doc["format"] = "lm-task-result";
  doc["version"] = 1;
  doc["task"] = task.name;
  doc["status"] = std::string(to_string(r.status));
  if (r.status == SolveStatus::Truncated) doc["truncation"] = r.truncation;
  doc["solutions"] = json::array();
  for (const auto& s : r.solutions) {
    json sol;
    sol["outputs"] = json::array();
    for (const auto& [term, v] : s.outputs)
      sol["outputs"].push_back({{"term", term}, {"value", v ? json(to_text(*v)) : json(nullptr)}});
    json objects = json::object();
    for (const auto& [name, v] : s.system.objects) objects[name] = to_text(v);
    sol["objects"] = std::move(objects);
    json relations = json::object();
    for (const auto& [name, t] : s.system.relations) relations[name] = format_table_literal(t);
    sol["relations"] = std::move(relations);
    doc["solutions"].push_back(std::move(sol));
  }
  doc["stats"] = {{"candidates", r.stats.candidates},
                  {"nodes", r.stats.nodes},
                  {"solutions_before_psi", r.stats.solutions_before_psi},
                  {"steps", r.stats.steps.total()},
                  {"setup_steps", r.stats.setup.total()}};
  return doc;
}

int cmd_solve(const std::string& model_file, const std::string& task_file, const SolveConfig& config,
              const std::string& format_name, std::ostream& out) {
  const LogicalModel m = load_model_arg(model_file);
  const TaskSpec task = load_task_file(task_file, m);
  const TaskResult r = solve(m, task, config);
  if (format_name == "structured") {
    out << solve_json(task, r).dump(2) << "\n";
  } else {
    const std::string name = task.name.empty() ? task_file : task.name;
    if (r.status == SolveStatus::NoSolutions) {
      out << "task " << name << ": no solutions\n";
    } else {
      if (r.status == SolveStatus::Truncated)
        out << "task " << name << ": truncated (" << r.truncation << "), partial results\n";
      out << "task " << name << ": " << r.solutions.size()
          << (r.solutions.size() == 1 ? " solution\n" : " solutions\n");
      for (std::size_t i = 0; i < r.solutions.size(); ++i) {
        out << "solution " << i + 1 << ":\n";
        for (const auto& [term, v] : r.solutions[i].outputs) out << "  " << term << " = " << value_text(v) << "\n";
      }
    }
    out << "candidates examined: " << r.stats.candidates << ", steps: " << r.stats.steps.total()
        << " (setup " << r.stats.setup.total() << ")\n";
  }
  if (r.status == SolveStatus::Truncated) return kUsage;
  return r.status == SolveStatus::NoSolutions ? kDomainFailure : kOk;
}

int cmd_reduce(const std::string& model_file, const std::string& out_file, const std::string& report_file,
               std::ostream& out) {
  const LogicalModel m = load_model_arg(model_file);
  if (m.order() < 2)
    throw Error(ErrorCode::OrderTooLow, "model is already first-order; nothing to reduce");
  auto [reduced, chain] = reduce_to_first_order(m);
  write_file(out_file, format(reduced));
  for (const auto& r : chain) out << report_text(r);
  if (!report_file.empty()) write_file(report_file, report_json(chain));
  out << "wrote " << out_file << " (order " << reduced.order() << ")\n";
  return kOk;
}

int cmd_validate(const std::string& model_file, const std::string& corpus_file,
                 const std::string& format_name, std::ostream& out) {
  const LogicalModel m = load_model_arg(model_file);
  ParseOptions opts;
  opts.file_name = corpus_file;
  const auto corpus = parse_corpus(read_file(corpus_file), m, opts);
  const AdequacyReport r = validate_corpus(m, corpus);
  out << (format_name == "structured" ? report_json(r) : report_text(r));
  return r.model_adequate ? kOk : kDomainFailure;
}

int cmd_gen_tests(const std::string& model_file, std::size_t count, std::uint64_t seed,
                  const std::string& out_file, std::ostream& out) {
  const LogicalModel m = load_model_arg(model_file);
  const GeneratedTests g = generate_tests(m, count, seed);
  if (g.situations.empty())
    throw Error(ErrorCode::EmptyCorpus, "no situation could be generated from the model's facts");
  write_file(out_file, format_corpus(g.situations, m));
  out << "generated " << g.adequate << " adequate, " << g.mutants << " mutants";
  if (g.adequate < count) out << " (requested " << count << ")";
  out << "; discarded " << g.underdetermined << " underdetermined, " << g.inconsistent << " inconsistent\n";
  return kOk;
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::OrderTooLow ? kDomainFailure : kUsage; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilevel logical model tool"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON defaults file (else $LMTOOL_CONFIG)");

  std::string model_file, task_file, out_file, report_file, corpus_file, format_name;
  std::uint64_t max_candidates = 0, seed = 0;
  double time_budget = 0;
  unsigned workers = 0;
  std::size_t count = 0;

  auto* check = app.add_subcommand("check", "parse and validate a model, print its signature summary");
  check->add_option("model", model_file, "model file or pack directory")->required();

  auto* solve_cmd = app.add_subcommand("solve", "solve a task against a model");
  solve_cmd->add_option("model", model_file, "model file or pack directory")->required();
  solve_cmd->add_option("task", task_file, "task file")->required();
  auto* o_max = solve_cmd->add_option("--max-candidates", max_candidates, "complete candidates to examine");
  auto* o_time = solve_cmd->add_option("--time-budget", time_budget, "seconds");
  auto* o_workers = solve_cmd->add_option("--workers", workers, "search workers")->check(CLI::PositiveNumber);
  auto* o_fmt = solve_cmd->add_option("--format", format_name, "text or structured")
                    ->check(CLI::IsMember({"text", "structured"}));

  auto* reduce = app.add_subcommand("reduce", "reduce a model to first order");
  reduce->add_option("model", model_file, "model file or pack directory")->required();
  reduce->add_option("out", out_file, "output model file")->required();
  reduce->add_option("--report", report_file, "write the JSON reduction report here");

  auto* validate = app.add_subcommand("validate", "check a model against a labelled corpus");
  validate->add_option("model", model_file, "model file or pack directory")->required();
  validate->add_option("corpus", corpus_file, "corpus file")->required();
  auto* o_vfmt = validate->add_option("--format", format_name, "text or structured")
                     ->check(CLI::IsMember({"text", "structured"}));

  auto* gen = app.add_subcommand("gen-tests", "generate a labelled corpus from the fact tables");
  gen->add_option("model", model_file, "model file or pack directory")->required();
  gen->add_option("out", out_file, "output corpus file")->required();
  auto* o_count = gen->add_option("--count", count, "adequate situations to generate");
  auto* o_seed = gen->add_option("--seed", seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (config_file.empty())
      if (const char* env = std::getenv("LMTOOL_CONFIG")) config_file = env;
    Config cfg = load_config(config_file);
    if (o_max->count()) cfg.solve.max_candidates = max_candidates;
    if (o_time->count()) cfg.solve.time_budget_seconds = time_budget;
    if (o_workers->count()) cfg.solve.workers = workers;
    if (o_fmt->count() || o_vfmt->count()) cfg.format = format_name;
    if (o_count->count()) cfg.count = count;
    if (o_seed->count()) cfg.seed = seed;
    if (cfg.format != "text" && cfg.format != "structured") {
      err << "error: unknown format '" << cfg.format << "'\n";
      return kUsage;
    }
    if (cfg.solve.workers == 0) {
      err << "error: --workers must be positive\n";
      return kUsage;
    }

    if (*check) return cmd_check(model_file, out);
    if (*solve_cmd) return cmd_solve(model_file, task_file, cfg.solve, cfg.format, out);
    if (*reduce) return cmd_reduce(model_file, out_file, report_file, out);
    if (*validate) return cmd_validate(model_file, corpus_file, cfg.format, out);
    if (*gen) {
      if (cfg.count == 0) {
        err << "error: --count must be at least 1\n";
        return kUsage;
      }
      return cmd_gen_tests(model_file, cfg.count, cfg.seed, out_file, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace lm::cli
