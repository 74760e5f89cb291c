#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbimpact/aggregation.hpp"
#include "pbimpact/batch.hpp"
#include "pbimpact/errors.hpp"
#include "pbimpact/pabulib_io.hpp"
#include "pbimpact/report_io.hpp"

namespace fs = std::filesystem;
using namespace pbimpact;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string rule = "greedy";
  std::string rules = "UG,ES";
  std::string es_variant = "add1u";
  std::string increment = "1";
  bool lenient = false;
  std::string out;
  std::string format = "csv";
  unsigned jobs = 0;
  std::size_t top_n = 20;
};

RuleId parse_variant(const std::string& text) {
  const auto rule = rule_from_string(text);
  if (!rule || !is_equal_shares(*rule)) throw UsageError("unknown equal-shares variant '" + text + "'");
  return *rule;
}

AnalysisConfig make_config(const Options& o) {
  AnalysisConfig config;
  config.es_variant = parse_variant(o.es_variant);
  try {
    config.increment = parse_decimal(o.increment);
  } catch (const Error&) {
    throw UsageError("--increment must be a number, got '" + o.increment + "'");
  }
  if (config.increment <= 0) throw UsageError("--increment must be positive");
  if (o.top_n < 1) throw UsageError("--n must be at least 1");
  config.parse_mode = o.lenient ? ParseMode::Lenient : ParseMode::Strict;
  config.top_n = o.top_n;
  config.jobs = o.jobs;
  return config;
}

ExportFormat export_format(const std::string& text) {
  if (text == "csv") return ExportFormat::Csv;
  if (text == "json") return ExportFormat::Json;
  throw UsageError("--format must be csv or json");
}

// --out wins; otherwise PBIMPACT_OUT_DIR; otherwise results go to stdout.
std::optional<fs::path> output_dir(const Options& o) {
  if (!o.out.empty()) return fs::path(o.out);
  if (const char* env = std::getenv("PBIMPACT_OUT_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

void print_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << f.string() << "\n";
}

void print_warnings(const std::vector<std::string>& warnings, const std::string& source) {
  for (const auto& w : warnings) std::cerr << "warning: " << source << ": " << w << "\n";
}

int cmd_validate(const Options& o) {
  const auto config = make_config(o);
  const auto inst = load_instance(o.input, config.parse_mode);
  print_warnings(inst.warnings(), o.input);
  std::cout << o.input << ": ok, " << inst.projects().size() << " projects, " << inst.ballots().size()
            << " voters, budget " << to_decimal_string(inst.budget()) << ", " << to_string(inst.vote_type())
            << (inst.has_area_labels() ? ", impact areas labeled" : ", no impact areas") << "\n";
  return kOk;
}

int cmd_outcome(const Options& o) {
  const auto config = make_config(o);
  auto rule = rule_from_string(o.rule);
  if (!rule) throw UsageError("unknown rule '" + o.rule + "'");
  const auto inst = load_instance(o.input, config.parse_mode);
  print_warnings(inst.warnings(), o.input);
  const auto out = compute_outcome(inst, *rule, config.increment);

  std::string winners;
  for (const auto& id : out.winners) winners += (winners.empty() ? "" : ",") + id;
  std::cout << "rule: " << to_string(out.rule) << "\n"
            << "winners: " << winners << "\n"
            << "total_cost: " << to_decimal_string(out.total_cost) << "\n"
            << "leftover: " << to_decimal_string(out.leftover) << "\n"
            << "utilization: " << to_decimal_string(budget_utilization(out, inst)) << "\n";
  if (out.endowment_used) std::cout << "endowment: " << to_decimal_string(*out.endowment_used) << "\n";
  return kOk;
}

int cmd_metrics(const Options& o) {
  auto config = make_config(o);
  const auto format = export_format(o.format);
  bool want_ug = false, want_es = false;
  std::stringstream list(o.rules);
  for (std::string item; std::getline(list, item, ',');) {
    const auto rule = rule_from_string(item);
    if (!rule) throw UsageError("unknown rule '" + item + "' in --rules");
    if (*rule == RuleId::Greedy) {
      want_ug = true;
    } else {
      want_es = true;
      if (item != "ES" && item != "es" && item != "equal_shares") config.es_variant = *rule;
    }
  }
  if (!want_ug) throw UsageError("--rules must include UG; losses are measured against greedy");

  const auto inst = load_instance(o.input, config.parse_mode);
  const auto id = fs::path(o.input).stem().string();
  InstanceReport report;
  if (want_es) {
    report = run_instance(inst, config, id);
  } else {
    report = run_instance_with_outcomes(inst, utilitarian_greedy(inst), std::nullopt, config, id);
  }
  print_warnings(report.warnings, o.input);

  std::vector<InstanceReport> reports{std::move(report)};
  if (const auto dir = output_dir(o)) {
    print_written(export_report(reports, format, *dir));
  } else if (format == ExportFormat::Json) {
    std::cout << to_json(reports.front()).dump(2) << "\n";
  } else {
    std::cout << metrics_csv(reports);
  }
  return kOk;
}

CorpusReport corpus_report(const Options& o, const AnalysisConfig& config, std::vector<InstanceReport>* keep) {
  auto run = run_instances(o.input, config);
  for (const auto& e : run.errors) std::cerr << "error: " << e.instance_id << ": " << e.message << "\n";
  if (run.reports.empty()) throw Error(ErrorCode::EmptyCorpus, "no instance in " + o.input + " could be analysed");
  if (keep) *keep = run.reports;
  return aggregate_reports(std::move(run.reports), config, std::move(run.errors));
}

int cmd_corpus(const Options& o) {
  const auto config = make_config(o);
  const auto format = export_format(o.format);
  std::vector<InstanceReport> reports;
  const auto report = corpus_report(o, config, &reports);
  std::sort(reports.begin(), reports.end(),
            [](const InstanceReport& a, const InstanceReport& b) { return a.instance_id < b.instance_id; });

  std::cerr << report.instance_count << " instances analysed, " << report.labeled_count << " with impact areas, "
            << report.errors.size() << " skipped\n";
  if (const auto dir = output_dir(o)) {
    print_written(export_report(report, format, *dir));
    if (format == ExportFormat::Csv) {
      write_text_file(*dir / "losses.csv", losses_csv(reports));
      write_text_file(*dir / "outcomes.csv", outcomes_csv(reports));
      print_written({*dir / "losses.csv", *dir / "outcomes.csv"});
    }
  } else if (format == ExportFormat::Json) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << summary_csv(report);
  }
  return kOk;
}

int cmd_single_table(const Options& o, const std::string& file, std::string (*render)(const CorpusReport&)) {
  const auto config = make_config(o);
  const auto report = corpus_report(o, config, nullptr);
  const auto text = render(report);
  if (const auto dir = output_dir(o)) {
    write_text_file(*dir / file, text);
    print_written({*dir / file});
  } else {
    std::cout << text;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Participatory budgeting outcome and impact analysis"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--es-variant", o.es_variant, "Equal-shares variant: core, add1 or add1u")->capture_default_str();
    sub->add_option("--increment", o.increment, "Endowment step for add1/add1u")->capture_default_str();
    sub->add_flag("--lenient", o.lenient, "Drop dirty ballot entries with a warning instead of failing");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory (default: $PBIMPACT_OUT_DIR, else standard output)");
    sub->add_option("--format", o.format, "csv or json")->capture_default_str();
  };
  auto add_corpus = [&](CLI::App* sub) {
    sub->add_option("--jobs", o.jobs, "Worker threads (0: all cores)")->capture_default_str();
    sub->add_option("--n", o.top_n, "Popularity ranks in the selection-rate curve")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "Parse and check one .pb file");
  validate->add_option("file", o.input, "Pabulib file")->required();
  validate->add_flag("--lenient", o.lenient, "Drop dirty ballot entries with a warning instead of failing");

  auto* outcome = app.add_subcommand("outcome", "Compute the winners of one election");
  outcome->add_option("file", o.input, "Pabulib file")->required();
  outcome->add_option("--rule", o.rule, "greedy, mes_core, mes_add1 or mes_add1u")->capture_default_str();
  add_common(outcome);

  auto* metrics = app.add_subcommand("metrics", "Impact and novelty metrics for one election");
  metrics->add_option("file", o.input, "Pabulib file")->required();
  metrics->add_option("--rules", o.rules, "Comma-separated rules, e.g. UG,ES")->capture_default_str();
  add_common(metrics);
  add_output(metrics);

  auto* corpus = app.add_subcommand("corpus", "Analyse every .pb file under a directory");
  corpus->add_option("dir", o.input, "Corpus directory")->required();
  add_common(corpus);
  add_output(corpus);
  add_corpus(corpus);

  auto* conjoint = app.add_subcommand("conjoint", "Budget-utilization regression on area combinations");
  conjoint->add_option("dir", o.input, "Corpus directory")->required();
  add_common(conjoint);
  conjoint->add_option("--out", o.out, "Output directory (default: $PBIMPACT_OUT_DIR, else standard output)");
  add_corpus(conjoint);

  auto* selection = app.add_subcommand("selection-rate", "Selection rate by popularity rank");
  selection->add_option("dir", o.input, "Corpus directory")->required();
  add_common(selection);
  selection->add_option("--out", o.out, "Output directory (default: $PBIMPACT_OUT_DIR, else standard output)");
  add_corpus(selection);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*outcome) return cmd_outcome(o);
    if (*metrics) return cmd_metrics(o);
    if (*corpus) return cmd_corpus(o);
    if (*conjoint) return cmd_single_table(o, "conjoint.csv", conjoint_csv);
    if (*selection) return cmd_single_table(o, "selection_rate.csv", selection_rate_csv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
