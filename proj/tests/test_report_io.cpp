#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pbimpact/errors.hpp"
#include "pbimpact/report_io.hpp"
#include "support.hpp"

using namespace pbimpact;
using testsupport::toy_instance;
namespace fs = std::filesystem;

namespace {

InstanceReport toy_report() {
  const auto toy = toy_instance();
  const auto ug = make_outcome(toy, RuleId::Greedy, {"A", "B"});
  const auto es = make_outcome(toy, RuleId::MesAdd1u, {"A", "D", "E"});
  return run_instance_with_outcomes(toy, ug, es, {}, "toy");
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("metrics csv rows") {
  const auto csv = metrics_csv({toy_report()});
  CHECK(csv.rfind("instance,area,level,calc,unit,rule,value_rational,value_float,defined\n", 0) == 0);
  CHECK(csv.find("\ntoy,education,outcome,share,cost,equal_shares,1000/1000,1.0,true\n") != std::string::npos);
  CHECK(csv.find("\ntoy,welfare,outcome,share,popularity,greedy,6/13,") != std::string::npos);
  CHECK(csv.find("\ntoy,education,outcome,within_novelty,cost,equal_shares,300/1000,0.3,true\n") != std::string::npos);
  CHECK(csv.find("\ntoy,sport,outcome,representation,cost,greedy,0/0,,false\n") != std::string::npos);
  CHECK(count_lines(csv) == 1 + 9 * 2 * all_metric_keys().size());
}

TEST_CASE("other instance csvs") {
  const auto r = toy_report();
  const auto losses = losses_csv({r});
  CHECK(losses.rfind("instance,area,level,calc,unit,loss_float,relative_loss_float\n", 0) == 0);
  const auto outcomes = outcomes_csv({r});
  CHECK(outcomes.find("toy,greedy,1,A,700,1100,1.1,\n") != std::string::npos);
  CHECK(outcomes.find("toy,mes_add1u,3,E,100,1000,1.0,\n") != std::string::npos);
  const auto ballots = ballot_metrics_csv({r});
  CHECK(ballots.find("\ntoy,1,education,share,cost,equal_shares,700/1000,0.7,true\n") != std::string::npos);
}

TEST_CASE("empty corpus report gives header-only files") {
  const CorpusReport empty;
  for (const auto& text : {summary_csv(empty), relative_loss_csv(empty), selection_rate_csv(empty), conjoint_csv(empty),
                           correlations_csv(empty), ttests_csv(empty), beneficiaries_csv(empty), errors_csv(empty)})
    CHECK(count_lines(text) == 1);
  CHECK(summary_csv(empty) == "area,level,calc,unit,n,pct_positive,mean,mean_pos,mean_neg\n");
  CHECK(selection_rate_csv(empty) == "rule,rank,n,rate\n");
  CHECK(conjoint_csv(empty) == "rule,predictor,coefficient,p_value,relative_importance,r_squared\n");
}

TEST_CASE("csv quoting") {
  CorpusReport c;
  c.errors.push_back({"dir/odd,name", ErrorCode::MalformedRow, "bad \"quote\""});
  CHECK(errors_csv(c) == "instance,code,message\n\"dir/odd,name\",MalformedRow,\"bad \"\"quote\"\"\"\n");
}

TEST_CASE("instance json round trip") {
  auto r = toy_report();
  r.warnings.push_back("note");
  const auto j = to_json(r);
  CHECK(j["outcomes"][1]["winners"] == nlohmann::json::array({"A", "D", "E"}));
  CHECK(instance_report_from_json(j) == r);
  CHECK(instance_report_from_json(nlohmann::json::parse(j.dump())) == r);

  const auto computed = run_instance(toy_instance().with_budget(Rational(1000, 3)), {}, "third");
  CHECK(instance_report_from_json(nlohmann::json::parse(to_json(computed).dump())) == computed);
}

TEST_CASE("corpus json round trip") {
  const auto a = run_instance(toy_instance(), {}, "a");
  auto b = run_instance(toy_instance().with_budget(1200), {}, "b");
  auto c = run_instance(toy_instance().with_budget(800), {}, "c");
  const auto corpus = aggregate_reports({a, b, c}, {}, {{"zz", ErrorCode::MissingSection, "no META section"}});
  const auto back = corpus_report_from_json(nlohmann::json::parse(to_json(corpus).dump()));
  CHECK(back == corpus);
}

TEST_CASE("export writes byte-stable files") {
  const auto dir = fs::temp_directory_path() / "pbimpact_export";
  fs::remove_all(dir);
  const auto written = export_report(std::vector<InstanceReport>{toy_report()}, ExportFormat::Csv, dir);
  CHECK(written.size() == 4);
  const auto first = read_file(dir / "metrics.csv");
  export_report(std::vector<InstanceReport>{toy_report()}, ExportFormat::Csv, dir);
  CHECK(read_file(dir / "metrics.csv") == first);

  const auto corpus = aggregate_reports({toy_report()}, {});
  CHECK(export_report(corpus, ExportFormat::Csv, dir).size() == 8);
  CHECK(export_report(corpus, ExportFormat::Json, dir).front().filename() == "corpus.json");
  CHECK(corpus_report_from_json(nlohmann::json::parse(read_file(dir / "corpus.json"))) == corpus);
  fs::remove_all(dir);

  try {
    write_text_file("/proc/definitely/not/here.csv", "x");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}
