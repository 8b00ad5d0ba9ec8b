// ppstop: stopping-criteria evaluation over TREC/CLEF-TAR runs and qrels.
//
//   ppstop evaluate  --runs a.txt b.txt --qrels qrels.txt --out-dir out
//   ppstop stratify  --runs runs/* --qrels qrels.txt --out-dir out
//   ppstop plot-data --runs a.txt --qrels qrels.txt --topic CD010775
//   ppstop simulate  --family exponential --d 0.5 --k -0.005 --n 2000
//   ppstop generate  --family uniform --p 0.05 --n 500 --topics 30
//   ppstop validate  --runs runs/* --qrels qrels.txt
//
// Exit codes: 0 success, 1 usage, 2 parse/validation, 3 computation error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppstop/ppstop.hpp"

namespace fs = std::filesystem;
using namespace ppstop;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCompute = 3;

/// Input files could not be read or output files written.
class IoError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ParamFlags {
  std::optional<double> recall, confidence, alpha, beta, delta;
  std::optional<std::int64_t> gamma, epsilon, target_count;
  std::optional<std::uint64_t> seed;
  std::string config;

  void attach(CLI::App& app) {
    app.add_option("--recall", recall, "Target recall T (default 0.7)");
    app.add_option("--confidence", confidence, "Poisson CDF probability (default 0.95)");
    app.add_option("--alpha", alpha, "Initial sample fraction (default 0.3)");
    app.add_option("--beta", beta, "Batch fraction (default 0.05)");
    app.add_option("--gamma", gamma, "Minimum relevant in initial sample (default 20)");
    app.add_option("--delta", delta, "Fit-accuracy gate (default 0.7)");
    app.add_option("--epsilon", epsilon, "Knee method epsilon for 'km' (default 150)");
    app.add_option("--target-count", target_count, "Target method count (default 10)");
    app.add_option("--seed", seed, "Random seed (default 0)");
    app.add_option("--config", config, "key = value parameter file")
        ->check(CLI::ExistingFile);
  }

  /// Defaults, then config file, then explicit flags.
  std::pair<MethodParams, std::uint64_t> resolve(
      std::optional<std::string>* methods = nullptr) const {
    MethodParams p;
    std::uint64_t s = 0;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw IoError("cannot read config '" + config + "'");
      const auto cfg = parse_config(in);
      apply_config(cfg, p, {"seed", "methods"});
      if (auto it = cfg.find("seed"); it != cfg.end())
        if (!detail::parse_number(it->second, s))
          throw UsageError("config 'seed': not an integer");
      if (auto it = cfg.find("methods"); it != cfg.end() && methods && !*methods)
        *methods = it->second;
    }
    if (recall) p.target_recall = *recall;
    if (confidence) p.confidence = *confidence;
    if (alpha) p.alpha_frac = *alpha;
    if (beta) p.beta_frac = *beta;
    if (delta) p.delta = *delta;
    if (gamma) p.gamma = *gamma;
    if (epsilon) p.epsilon = *epsilon;
    if (target_count) p.target_count = *target_count;
    if (seed) s = *seed;
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return {p, s};
  }
};

struct FamilyFlags {
  std::string family = "exponential";
  double d = 0.5, k = -0.005, p = 0.05, p1 = 0.1, p2 = 0.01;
  std::int64_t cutoff = 0;

  void attach(CLI::App& app) {
    app.add_option("--family", family, "exponential | uniform | step | bimodal")
        ->check(CLI::IsMember({"exponential", "uniform", "step", "bimodal"}));
    app.add_option("--d", d, "exponential amplitude");
    app.add_option("--k", k, "exponential exponent per rank");
    app.add_option("--p", p, "uniform/step probability");
    app.add_option("--p1", p1, "bimodal probability up to cutoff");
    app.add_option("--p2", p2, "bimodal probability after cutoff");
    app.add_option("--cutoff", cutoff, "step/bimodal cutoff rank");
  }

  RateFamily resolve() const {
    RateFamily f;
    if (family == "exponential") f = ExponentialRate{d, k};
    else if (family == "uniform") f = UniformRate{p};
    else if (family == "step") f = StepRate{p, cutoff};
    else f = BimodalRate{p1, p2, cutoff};
    try {
      validate_family(f);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return f;
  }
};

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw IoError("cannot write '" + (dir / name).string() + "'");
  return out;
}

void print_warnings(const Diagnostics& diag) {
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << '\n';
}

Qrels load_qrels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read qrels '" + path + "'");
  try {
    return parse_qrels(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

Run load_run(const std::string& path, Diagnostics& diag) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read run '" + path + "'");
  try {
    return parse_run(in, &diag);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

std::vector<Run> load_joined(const std::vector<std::string>& paths,
                             const Qrels& qrels) {
  std::vector<Run> runs;
  Diagnostics diag;
  for (const auto& p : paths) runs.push_back(join(load_run(p, diag), qrels, &diag));
  print_warnings(diag);
  return runs;
}

std::vector<std::string> tags_of(const std::vector<RankedRun>& group) {
  std::vector<std::string> out;
  for (const auto& r : group) out.push_back(r.run_tag);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_evaluate(const std::vector<std::string>& run_paths,
                 const std::string& qrels_path, std::optional<std::string> methods,
                 const ParamFlags& flags, const fs::path& out_dir,
                 unsigned threads) {
  const auto [params, seed] = flags.resolve(&methods);
  const auto specs = parse_methods(methods.value_or("pp,tm,km-default,km-tuned,or"), params);
  const auto runs = load_joined(run_paths, load_qrels(qrels_path));
  const auto reports = evaluate(runs, specs, seed, threads);

  const auto all = group_table("all " + std::to_string(runs.size()) + " runs",
                               reports, specs);
  auto records = report_records(reports);
  for (const auto& row : all.rows) records.push_back(summary_record("all", row));
  json header = {{"type", "config"},
                 {"seed", seed},
                 {"params", params_record(params)},
                 {"runs", runs.size()}};
  records.insert(records.begin(), header);

  auto jsonl = open_out(out_dir, "report.jsonl");
  write_jsonl(jsonl, records);
  auto txt = open_out(out_dir, "report.txt");
  write_table(txt, {all});
  write_table(std::cout, {all});
  return 0;
}

int cmd_stratify(const std::vector<std::string>& run_paths,
                 const std::string& qrels_path, std::optional<std::string> methods,
                 const ParamFlags& flags, const fs::path& out_dir,
                 unsigned threads, std::size_t group,
                 std::optional<std::size_t> middle_start) {
  const auto [params, seed] = flags.resolve(&methods);
  const auto specs = parse_methods(methods.value_or("pp,tm,km-default,km-tuned,or"), params);
  const auto runs = load_joined(run_paths, load_qrels(qrels_path));
  if (runs.size() < 3 * group)
    throw UsageError("stratify needs at least " + std::to_string(3 * group) +
                     " runs");
  const auto strat = stratify_runs(runs, group, middle_start);
  const auto reports = evaluate(runs, specs, seed, threads);

  std::vector<GroupTable> tables{
      group_table("all " + std::to_string(runs.size()) + " runs", reports, specs),
      group_table("top " + std::to_string(group), reports, specs, tags_of(strat.top)),
      group_table("middle " + std::to_string(group), reports, specs, tags_of(strat.middle)),
      group_table("bottom " + std::to_string(group), reports, specs, tags_of(strat.bottom))};
  const char* keys[] = {"all", "top", "middle", "bottom"};

  // Reference AURC bands for the CLEF 2017 runs (pass/warn only).
  struct Band {
    const char* group;
    const std::vector<RankedRun>* runs;
    double lo, hi;
  };
  const Band bands[] = {{"top", &strat.top, 0.92 - 0.01, 0.93 + 0.01},
                        {"bottom", &strat.bottom, 0.48 - 0.02, 0.60 + 0.02}};

  std::vector<json> records;
  for (std::size_t i = 0; i < strat.ranked.size(); ++i)
    records.push_back({{"type", "aurc"},
                       {"position", i + 1},
                       {"run", strat.ranked[i].run_tag},
                       {"aurc", strat.ranked[i].aurc}});
  for (const auto& b : bands) {
    bool ok = true;
    for (const auto& r : *b.runs) ok = ok && r.aurc >= b.lo && r.aurc <= b.hi;
    records.push_back({{"type", "band"},
                       {"group", b.group},
                       {"lo", b.lo},
                       {"hi", b.hi},
                       {"status", ok ? "pass" : "warn"}});
  }
  for (std::size_t g = 0; g < tables.size(); ++g)
    for (const auto& row : tables[g].rows)
      records.push_back(summary_record(keys[g], row));

  auto jsonl = open_out(out_dir, "stratify.jsonl");
  write_jsonl(jsonl, records);
  auto txt = open_out(out_dir, "stratify.txt");
  for (auto* os : {static_cast<std::ostream*>(&txt), static_cast<std::ostream*>(&std::cout)}) {
    *os << "Runs by mean AURC:\n";
    for (std::size_t i = 0; i < strat.ranked.size(); ++i)
      *os << std::setw(4) << i + 1 << "  " << fixed(strat.ranked[i].aurc, 4)
          << "  " << strat.ranked[i].run_tag << '\n';
    for (const auto& rec : records)
      if (rec["type"] == "band")
        *os << "AURC band " << rec["group"].get<std::string>() << " ["
            << fixed(rec["lo"].get<double>(), 2) << ", "
            << fixed(rec["hi"].get<double>(), 2)
            << "]: " << rec["status"].get<std::string>() << '\n';
    *os << '\n';
    write_table(*os, tables);
  }
  return 0;
}

int cmd_plot_data(const std::vector<std::string>& run_paths,
                  const std::string& qrels_path, const std::string& topic_id,
                  const ParamFlags& flags, const fs::path& out_dir) {
  const auto [params, seed] = flags.resolve();
  (void)seed;
  const auto runs = load_joined(run_paths, load_qrels(qrels_path));
  const Topic* topic = runs.front().find(topic_id);
  if (!topic)
    throw ValidationError("topic '" + topic_id + "' not in run '" +
                          runs.front().run_tag + "'");

  const auto model = plotting_model(*topic, params);
  const auto rows = gain_series(*topic, model);
  const std::string stem = "gain_" + runs.front().run_tag + "_" + topic_id;
  auto csv = open_out(out_dir, stem + ".csv");
  write_gain_csv(csv, rows);
  Series actual{"actual", "#1f77b4", {}, false};
  Series estimated{"estimated (sum of lambda)", "#d62728", {}, false};
  for (const auto& r : rows) {
    actual.points.emplace_back(static_cast<double>(r.rank), static_cast<double>(r.actual));
    if (r.estimated)
      estimated.points.emplace_back(static_cast<double>(r.rank), *r.estimated);
  }
  auto svg = open_out(out_dir, stem + ".svg");
  write_svg(svg, "Gain curve: " + runs.front().run_tag + " / " + topic_id, "rank",
            "relevant documents", {actual, estimated});

  std::vector<EffortAurcRow> effort;
  const auto specs = parse_methods("pp,or", params);
  for (const auto& run : runs) {
    EffortAurcRow row{run.run_tag, mean_aurc(run), 0, 0};
    row.pp_effort = evaluate_run(specs[0], run, seed).total_effort;
    row.oracle_effort = evaluate_run(specs[1], run, seed).total_effort;
    effort.push_back(row);
  }
  std::sort(effort.begin(), effort.end(), [](const auto& a, const auto& b) {
    return a.run_tag < b.run_tag;
  });
  auto ecsv = open_out(out_dir, "effort_vs_aurc.csv");
  write_effort_csv(ecsv, effort);
  Series orc{"OR", "#2ca02c", {}, true}, pp{"PP", "#ff7f0e", {}, true};
  for (const auto& r : effort) {
    orc.points.emplace_back(r.aurc, static_cast<double>(r.oracle_effort));
    pp.points.emplace_back(r.aurc, static_cast<double>(r.pp_effort));
  }
  auto esvg = open_out(out_dir, "effort_vs_aurc.svg");
  write_svg(esvg, "Oracle and Poisson process effort versus AURC", "AURC",
            "effort", {orc, pp});

  if (model)
    std::cout << "model d=" << model->d << " k=" << model->k << '\n';
  else
    std::cout << "no rate model could be fitted for this topic\n";
  std::cout << "wrote " << (out_dir / (stem + ".csv")).string() << ", "
            << (out_dir / "effort_vs_aurc.csv").string() << " and SVGs\n";
  return 0;
}

int cmd_simulate(const FamilyFlags& fam, std::int64_t n, std::int64_t trials,
                 std::optional<std::string> methods, const ParamFlags& flags,
                 const fs::path& out_dir) {
  if (trials < 1) throw UsageError("--trials must be >= 1");
  if (n < 1) throw UsageError("--n must be >= 1");
  const auto [params, seed] = flags.resolve(&methods);
  const auto specs = parse_methods(methods.value_or("pp,tm,km-default,km-tuned,or"), params);
  const auto summary = simulate(fam.resolve(), n, trials, specs, params, seed);
  auto jsonl = open_out(out_dir, "summary.jsonl");
  write_jsonl(jsonl, {simulation_record(summary, params)});
  auto txt = open_out(out_dir, "summary.txt");
  write_simulation_text(txt, summary);
  write_simulation_text(std::cout, summary);
  return 0;
}

int cmd_generate(const FamilyFlags& fam, std::int64_t n, std::int64_t topics,
                 std::uint64_t seed, const std::string& run_tag,
                 const fs::path& out_dir) {
  if (n < 1 || topics < 1) throw UsageError("--n and --topics must be >= 1");
  const auto family = fam.resolve();
  Run run{run_tag, {}};
  for (std::int64_t t = 0; t < topics; ++t) {
    const std::string id = "S" + std::to_string(t + 1);
    run.topics.push_back(gen_topic(n, family, topic_seed(seed, run_tag, id), id));
  }
  auto rf = open_out(out_dir, run_tag + ".run");
  write_run(rf, run);
  auto qf = open_out(out_dir, run_tag + ".qrels");
  write_qrels(qf, run);
  std::cout << "wrote " << (out_dir / (run_tag + ".run")).string() << " and "
            << (out_dir / (run_tag + ".qrels")).string() << '\n';
  return 0;
}

int cmd_validate(const std::vector<std::string>& run_paths,
                 const std::string& qrels_path, const fs::path& out_dir) {
  const auto qrels = load_qrels(qrels_path);
  std::vector<Run> runs;
  Diagnostics diag;
  for (const auto& p : run_paths) runs.push_back(load_run(p, diag));
  print_warnings(diag);
  const auto summary = validate_dataset(runs, qrels);
  auto js = open_out(out_dir, "validation.json");
  js << validation_record(summary).dump(2) << '\n';
  auto txt = open_out(out_dir, "validation.txt");
  write_validation_text(txt, summary);
  write_validation_text(std::cout, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stopping criteria for ranked document review"};
  app.require_subcommand(1);

  std::vector<std::string> runs;
  std::string qrels, topic, run_tag = "synthetic";
  std::optional<std::string> methods;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::size_t group = 5;
  std::optional<std::size_t> middle_start;
  std::int64_t n = 2000, trials = 1000, topics = 30;
  ParamFlags flags;
  FamilyFlags fam;

  const auto common = [&](CLI::App* sub, bool with_methods) {
    sub->add_option("--runs", runs, "Run files")->required()->check(CLI::ExistingFile);
    sub->add_option("--qrels", qrels, "Qrels file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "Output directory");
    if (with_methods) {
      sub->add_option("--methods", methods,
                      "Comma list of pp,tm,km,km-default,km-tuned,or");
      sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    }
    flags.attach(*sub);
  };

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate methods over runs");
  common(evaluate_cmd, true);

  auto* stratify_cmd =
      app.add_subcommand("stratify", "Rank runs by AURC and report top/middle/bottom groups");
  common(stratify_cmd, true);
  stratify_cmd->add_option("--group-size", group, "Runs per group")->check(CLI::PositiveNumber);
  stratify_cmd->add_option("--middle-start", middle_start,
                           "Zero-based start of the middle group");

  auto* plot_cmd = app.add_subcommand("plot-data", "Gain-curve and effort-vs-AURC series");
  common(plot_cmd, false);
  plot_cmd->add_option("--topic", topic, "Topic id in the first run")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo coverage and reliability");
  fam.attach(*sim_cmd);
  sim_cmd->add_option("--n", n, "Documents per topic");
  sim_cmd->add_option("--trials", trials, "Number of generated topics");
  sim_cmd->add_option("--methods", methods, "Comma list of methods");
  sim_cmd->add_option("--out-dir", out_dir, "Output directory");
  flags.attach(*sim_cmd);

  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic run and qrels");
  fam.attach(*gen_cmd);
  std::uint64_t gen_seed = 0;
  gen_cmd->add_option("--n", n, "Documents per topic");
  gen_cmd->add_option("--topics", topics, "Number of topics");
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  gen_cmd->add_option("--run-tag", run_tag, "Run tag and file stem");
  gen_cmd->add_option("--out-dir", out_dir, "Output directory");

  auto* val_cmd = app.add_subcommand("validate", "Dataset statistics and sanity checks");
  val_cmd->add_option("--runs", runs, "Run files")->check(CLI::ExistingFile);
  val_cmd->add_option("--qrels", qrels, "Qrels file")->required()->check(CLI::ExistingFile);
  val_cmd->add_option("--out-dir", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*evaluate_cmd)
      return cmd_evaluate(runs, qrels, methods, flags, out_dir, threads);
    if (*stratify_cmd)
      return cmd_stratify(runs, qrels, methods, flags, out_dir, threads, group,
                          middle_start);
    if (*plot_cmd) return cmd_plot_data(runs, qrels, topic, flags, out_dir);
    if (*sim_cmd) return cmd_simulate(fam, n, trials, methods, flags, out_dir);
    if (*gen_cmd) return cmd_generate(fam, n, topics, gen_seed, run_tag, out_dir);
    if (*val_cmd) return cmd_validate(runs, qrels, out_dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitData;
  } catch (const ComputationError& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return kExitCompute;
  } catch (const DomainError& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return kExitCompute;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
