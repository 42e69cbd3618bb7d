// qlint command-line interface: rule-based and LLM-based linting, knowledge
// base tooling, corpus mutation, and metric evaluation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlint/eval.hpp"
#include "qlint/http_providers.hpp"
#include "qlint/inject.hpp"
#include "qlint/obfuscate.hpp"
#include "qlint/pipeline.hpp"
#include "qlint/rag.hpp"
#include "qlint/rules.hpp"

namespace {

using namespace qlint;

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

struct ToolConfig {
  ProviderConfig chat;
  ProviderConfig embed;
  PipelineConfig pipeline;
};

ProviderConfig provider_from_json(const nlohmann::json& j, ProviderConfig base) {
  if (j.contains("endpoint")) base.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("model")) base.model = j["model"].get<std::string>();
  if (j.contains("key_env")) base.key_env = j["key_env"].get<std::string>();
  if (j.contains("timeout_seconds"))
    base.timeout_seconds = j["timeout_seconds"].get<int>();
  if (j.contains("max_retries")) base.max_retries = j["max_retries"].get<int>();
  if (j.contains("max_concurrency"))
    base.max_concurrency = j["max_concurrency"].get<int>();
  if (j.contains("dimension")) base.embed_dimension = j["dimension"].get<int>();
  return base;
}

/// Load tool configuration from --config, falling back to $QLINT_CONFIG.
/// The credential itself is never part of the file; only the name of the
/// environment variable holding it is.
ToolConfig load_config(const std::string& config_flag) {
  ToolConfig cfg;
  std::string path = config_flag;
  if (path.empty()) {
    if (const char* env = std::getenv("QLINT_CONFIG")) path = env;
  }
  if (path.empty()) return cfg;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::runtime_error("config file " + path + " is not a JSON object");
  if (j.contains("chat")) cfg.chat = provider_from_json(j["chat"], cfg.chat);
  if (j.contains("embed")) cfg.embed = provider_from_json(j["embed"], cfg.embed);
  if (j.contains("context_limit"))
    cfg.pipeline.context_limit = j["context_limit"].get<int>();
  if (j.contains("max_concurrency"))
    cfg.pipeline.max_concurrency = j["max_concurrency"].get<int>();
  return cfg;
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

std::string read_file(const std::string& path) {
  return SourceFile::load(path).text;
}

std::vector<ProblemType> parse_problem_list(const std::string& csv) {
  std::vector<ProblemType> problems;
  std::stringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    problems.push_back(require_problem(name));
  }
  if (problems.empty()) throw std::runtime_error("empty problem list");
  return problems;
}

std::string sanitize_component(std::string_view name) {
  std::string out;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  return out.empty() ? "file" : out;
}

/// Write prompts, raw replies, and diagnostics for one analyzed file.
void archive_run(const std::filesystem::path& dir, const std::string& file_path,
                 const std::vector<Exchange>& exchanges,
                 const PipelineResult& result) {
  std::filesystem::path fdir =
      dir / sanitize_component(std::filesystem::path(file_path).stem().string());
  std::filesystem::create_directories(fdir);
  for (const Exchange& ex : exchanges) {
    // The strategy prompt names exactly one problem; recover it for naming.
    std::string problem = "unknown";
    for (ProblemType p : kAllProblems) {
      if (ex.bundle.user_strategy.find(std::string("Problem name: ") +
                                       std::string(problem_name(p))) !=
          std::string::npos) {
        problem = std::string(problem_name(p));
        break;
      }
    }
    std::ofstream prompts(fdir / (problem + "_prompts.txt"), std::ios::binary);
    prompts << render_bundle(ex.bundle);
    std::ofstream replies(fdir / (problem + "_replies.txt"), std::ios::binary);
    replies << "=== STRATEGY REPLY ===\n"
            << ex.reply_strategy << "\n=== FINDINGS REPLY ===\n"
            << ex.reply_findings << "\n";
  }
  std::ofstream notes(fdir / "diagnostics.txt", std::ios::binary);
  for (const std::string& d : result.diagnostics) notes << d << "\n";
  for (const std::string& e : result.errors) notes << "error: " << e << "\n";
}

// ---------------------------------------------------------------------------

int cmd_rules(const std::vector<std::string>& paths, const std::string& problems_csv,
              const std::string& out_path) {
  std::vector<ProblemType> problems(kAllProblems.begin(), kAllProblems.end());
  if (!problems_csv.empty()) problems = parse_problem_list(problems_csv);

  std::vector<Warning> warnings;
  bool had_errors = false;
  for (const std::string& path : paths) {
    try {
      ProgramModel model = model_from_file(SourceFile::load(path));
      std::vector<Warning> file_warnings = run_detectors(model, problems);
      warnings.insert(warnings.end(), file_warnings.begin(), file_warnings.end());
    } catch (const SyntaxError& e) {
      std::cerr << "qlint: " << path << ": " << e.what() << "\n";
      had_errors = true;
    } catch (const std::runtime_error& e) {
      std::cerr << "qlint: " << e.what() << "\n";
      had_errors = true;
    }
  }
  write_output(out_path, warnings_to_jsonl(warnings));
  if (had_errors) return kExitError;
  return warnings.empty() ? kExitClean : kExitFindings;
}

int cmd_llm(const std::vector<std::string>& paths, const std::string& mode_name,
            const std::string& kb_dir, const std::string& mock_dir,
            const std::string& out_path, const std::string& archive_dir,
            const ToolConfig& cfg) {
  AnalysisMode mode =
      mode_name == "rag" ? AnalysisMode::rag : AnalysisMode::cot;

  std::unique_ptr<ChatProvider> provider;
  if (!mock_dir.empty()) {
    provider = std::make_unique<MockChatProvider>(
        mock_dir, cfg.chat.model.empty() ? "mock" : cfg.chat.model);
  } else {
    if (cfg.chat.endpoint.empty()) {
      throw std::runtime_error(
          "llm requires --mock DIR or a chat endpoint in the config file");
    }
    provider = std::make_unique<HttpChatProvider>(cfg.chat);
  }

  std::optional<RagStore> store;
  std::unique_ptr<Embedder> embedder;
  if (mode == AnalysisMode::rag) {
    if (kb_dir.empty())
      throw std::runtime_error("--mode rag requires --kb DIR");
    store = load_store(kb_dir);
    if (!mock_dir.empty() || cfg.embed.endpoint.empty()) {
      embedder = std::make_unique<DeterministicEmbedder>(store->dimension);
    } else {
      ProviderConfig embed_cfg = cfg.embed;
      if (embed_cfg.embed_dimension == 0)
        embed_cfg.embed_dimension = store->dimension;
      embedder = std::make_unique<HttpEmbedder>(embed_cfg);
    }
  }

  std::vector<Warning> warnings;
  std::vector<std::string> errors;
  for (const std::string& path : paths) {
    SourceFile source = SourceFile::load(path);
    std::vector<Exchange> exchanges;
    PipelineResult result = run_all_problems(
        *provider, source, mode, store ? &*store : nullptr, embedder.get(),
        cfg.pipeline, archive_dir.empty() ? nullptr : &exchanges);
    warnings.insert(warnings.end(), result.warnings.begin(),
                    result.warnings.end());
    errors.insert(errors.end(), result.errors.begin(), result.errors.end());
    for (const std::string& d : result.diagnostics)
      std::cerr << "qlint: note: " << d << "\n";
    if (!archive_dir.empty())
      archive_run(archive_dir, path, exchanges, result);
  }

  write_output(out_path, warnings_to_jsonl(warnings));
  for (const std::string& e : errors) std::cerr << "qlint: error: " << e << "\n";
  if (!errors.empty()) return kExitError;
  return warnings.empty() ? kExitClean : kExitFindings;
}

int cmd_kb_build(const std::string& truth_path, const std::string& src_dir,
                 const std::string& out_dir, int dimension, std::uint64_t seed,
                 bool live, const ToolConfig& cfg) {
  std::vector<GroundTruthEntry> truth = truth_from_jsonl(read_file(truth_path));

  std::vector<KbCandidate> candidates;
  for (const GroundTruthEntry& e : truth) {
    std::filesystem::path path = std::filesystem::path(src_dir) / e.file;
    KbCandidate cand;
    cand.source = read_file(path.string());
    cand.problem = e.problem;
    cand.lines = e.lines;
    cand.source_path = e.file;
    candidates.push_back(std::move(cand));
  }

  std::unique_ptr<Embedder> embedder;
  if (live) {
    if (cfg.embed.endpoint.empty())
      throw std::runtime_error("--live requires an embed endpoint in the config");
    embedder = std::make_unique<HttpEmbedder>(cfg.embed);
  } else {
    embedder = std::make_unique<DeterministicEmbedder>(dimension, seed);
  }

  RagStore store = build_index(candidates, *embedder);
  save_store(store, out_dir);
  std::cout << store.manifest;
  return kExitClean;
}

int cmd_kb_retrieve(const std::string& problem_name_arg, const std::string& file,
                    const std::string& kb_dir, bool live, const ToolConfig& cfg) {
  ProblemType problem = require_problem(problem_name_arg);
  RagStore store = load_store(kb_dir);

  std::unique_ptr<Embedder> embedder;
  if (live) {
    if (cfg.embed.endpoint.empty())
      throw std::runtime_error("--live requires an embed endpoint in the config");
    embedder = std::make_unique<HttpEmbedder>(cfg.embed);
  } else {
    embedder = std::make_unique<DeterministicEmbedder>(store.dimension);
  }

  std::vector<std::string> log;
  std::string example =
      retrieve_example_for(problem, read_file(file), *embedder, store, &log);
  for (const std::string& entry : log) std::cerr << "qlint: note: " << entry << "\n";
  std::cout << example;
  return kExitClean;
}

int cmd_obfuscate(const std::string& path, std::uint64_t seed,
                  const std::string& out_path, const std::string& map_path) {
  auto [text, map] = obfuscate(read_file(path), seed);
  write_output(out_path, text);
  if (!map_path.empty()) {
    write_output(map_path, obfuscation_map_to_json(map).dump(2) + "\n");
  }
  return kExitClean;
}

int cmd_inject(const std::string& path, const std::string& problem_name_arg,
               std::uint64_t seed, const std::string& out_path,
               const std::string& truth_out) {
  ProblemType problem = require_problem(problem_name_arg);
  InjectionResult result = inject(problem, read_file(path), seed);

  write_output(out_path, result.text);

  GroundTruthEntry entry;
  entry.file = out_path.empty() || out_path == "-" ? path : out_path;
  entry.problem = result.problem;
  entry.lines = result.lines;
  std::string record = truth_to_jsonl({entry});
  if (!truth_out.empty()) write_output(truth_out, record);
  std::cerr << "qlint: truth: " << record;
  for (const std::string& note : result.side_effects)
    std::cerr << "qlint: note: " << note << "\n";
  return kExitClean;
}

int cmd_eval(const std::string& truth_path, const std::string& pred_path,
             bool per_problem, const std::string& format, bool show_ledger) {
  std::vector<GroundTruthEntry> truth = truth_from_jsonl(read_file(truth_path));
  std::vector<Warning> predictions = warnings_from_jsonl(read_file(pred_path));

  MatchResult match = match_warnings(predictions, truth);
  MetricsReport report = build_report(match);
  ReportFormat fmt =
      format == "json" ? ReportFormat::structured : ReportFormat::text;
  std::cout << render_report(report, fmt, per_problem);
  if (show_ledger) {
    for (const std::string& line : match.ledger)
      std::cerr << "qlint: match: " << line << "\n";
  }
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlint: quantum-program linter and evaluation toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file (default: $QLINT_CONFIG)");

  // rules
  auto* rules = app.add_subcommand("rules", "Run the deterministic rule engine");
  std::vector<std::string> rules_paths;
  std::string rules_problems, rules_out;
  rules->add_option("paths", rules_paths, "Python source files")->required();
  rules->add_option("--problems", rules_problems,
                    "comma-separated problem names (default: all)");
  rules->add_option("--out", rules_out, "prediction file (default: stdout)");

  // llm
  auto* llm = app.add_subcommand("llm", "Run the LLM analysis pipeline");
  std::vector<std::string> llm_paths;
  std::string llm_mode, llm_kb, llm_mock, llm_out, llm_archive;
  llm->add_option("paths", llm_paths, "Python source files")->required();
  llm->add_option("--mode", llm_mode, "analysis mode: cot or rag")
      ->required()
      ->check(CLI::IsMember({"cot", "rag"}));
  llm->add_option("--kb", llm_kb, "knowledge base directory (rag mode)");
  llm->add_option("--mock", llm_mock, "replay directory of scripted responses");
  llm->add_option("--out", llm_out, "prediction file (default: stdout)");
  llm->add_option("--archive", llm_archive,
                  "directory for prompt/reply/diagnostic artifacts");

  // kb build / kb retrieve
  auto* kb = app.add_subcommand("kb", "Knowledge base tooling");
  kb->require_subcommand(1);
  auto* kb_build = kb->add_subcommand("build", "Build the annotated KB");
  std::string kbb_truth, kbb_src, kbb_out;
  int kbb_dimension = 8;
  std::uint64_t kbb_seed = 0;
  bool kbb_live = false;
  kb_build->add_option("--truth", kbb_truth, "ground truth record file")
      ->required();
  kb_build->add_option("--src", kbb_src, "directory of source files")->required();
  kb_build->add_option("--out", kbb_out, "output KB directory")->required();
  kb_build->add_option("--dimension", kbb_dimension,
                       "embedding dimension for the offline embedder");
  kb_build->add_option("--embed-seed", kbb_seed, "offline embedder seed");
  kb_build->add_flag("--live", kbb_live, "embed via the configured provider");

  auto* kb_retrieve = kb->add_subcommand("retrieve", "Query the KB (k=1)");
  std::string kbr_problem, kbr_file, kbr_dir;
  bool kbr_live = false;
  kb_retrieve->add_option("--problem", kbr_problem, "problem name")->required();
  kb_retrieve->add_option("--file", kbr_file, "query source file")->required();
  kb_retrieve->add_option("--kb", kbr_dir, "knowledge base directory")->required();
  kb_retrieve->add_flag("--live", kbr_live, "embed via the configured provider");

  // obfuscate
  auto* obf = app.add_subcommand("obfuscate", "Rename user identifiers");
  std::string obf_path, obf_out, obf_map;
  std::uint64_t obf_seed = 0;
  obf->add_option("file", obf_path, "Python source file")->required();
  obf->add_option("--seed", obf_seed, "rename seed")->required();
  obf->add_option("--out", obf_out, "output file (default: stdout)");
  obf->add_option("--map", obf_map, "write the rename map as JSON");

  // inject
  auto* inj = app.add_subcommand("inject", "Plant one problem into a clean file");
  std::string inj_path, inj_problem, inj_out, inj_truth;
  std::uint64_t inj_seed = 0;
  inj->add_option("file", inj_path, "Python source file")->required();
  inj->add_option("--problem", inj_problem, "problem name")->required();
  inj->add_option("--seed", inj_seed, "site selection seed")->required();
  inj->add_option("--out", inj_out, "output file (default: stdout)");
  inj->add_option("--truth-out", inj_truth, "write the ground truth record");

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  std::string ev_truth, ev_pred, ev_format = "text";
  bool ev_per_problem = false, ev_ledger = false;
  ev->add_option("--truth", ev_truth, "ground truth record file")->required();
  ev->add_option("--pred", ev_pred, "prediction record file")->required();
  ev->add_flag("--per-problem", ev_per_problem, "include per-problem rows");
  ev->add_option("--format", ev_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  ev->add_flag("--ledger", ev_ledger, "print per-decision match ledger to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return kExitError;
  }

  try {
    ToolConfig cfg = load_config(config_path);
    if (rules->parsed()) return cmd_rules(rules_paths, rules_problems, rules_out);
    if (llm->parsed())
      return cmd_llm(llm_paths, llm_mode, llm_kb, llm_mock, llm_out, llm_archive,
                     cfg);
    if (kb_build->parsed())
      return cmd_kb_build(kbb_truth, kbb_src, kbb_out, kbb_dimension, kbb_seed,
                          kbb_live, cfg);
    if (kb_retrieve->parsed())
      return cmd_kb_retrieve(kbr_problem, kbr_file, kbr_dir, kbr_live, cfg);
    if (obf->parsed()) return cmd_obfuscate(obf_path, obf_seed, obf_out, obf_map);
    if (inj->parsed())
      return cmd_inject(inj_path, inj_problem, inj_seed, inj_out, inj_truth);
    if (ev->parsed())
      return cmd_eval(ev_truth, ev_pred, ev_per_problem, ev_format, ev_ledger);
  } catch (const std::exception& e) {
    std::cerr << "qlint: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
