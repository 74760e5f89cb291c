#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pbimpact/aggregation.hpp"
#include "pbimpact/election.hpp"
#include "pbimpact/metrics.hpp"
#include "pbimpact/pabulib_io.hpp"
#include "pbimpact/stats.hpp"

namespace pbimpact {

/// The four most frequent mutually-exclusive area combinations.
std::vector<AreaSet> default_conjoint_combos();

struct AnalysisConfig {
  RuleId es_variant = RuleId::MesAdd1u;
  Rational increment = 1;
  ParseMode parse_mode = ParseMode::Strict;
  std::size_t top_n = 20;
  /// Keep one cell per voter; otherwise only voter means are stored.
  bool keep_ballot_cells = true;
  /// Worker threads for corpus runs; 0 means hardware concurrency.
  unsigned jobs = 0;
  std::vector<AreaSet> conjoint_combos = default_conjoint_combos();
};

struct CellKey {
  MetricKey key;
  ImpactArea area = ImpactArea::Other;
  RuleId rule = RuleId::Greedy;
  auto operator<=>(const CellKey&) const = default;
};

struct BallotCellKey {
  CellKey cell;
  std::string voter;
  auto operator<=>(const BallotCellKey&) const = default;
};

struct LossKey {
  MetricKey key;
  ImpactArea area = ImpactArea::Other;
  auto operator<=>(const LossKey&) const = default;
};

struct LossEntry {
  Rational loss = 0;
  std::optional<Rational> relative;
  bool operator==(const LossEntry&) const = default;
};

struct ProjectSummary {
  std::string id;
  Rational cost;
  AreaSet areas;
  BeneficiarySet beneficiaries;
  std::optional<Rational> popularity;
  bool operator==(const ProjectSummary&) const = default;
};

struct InstanceReport {
  std::string instance_id;
  VoteType vote_type = VoteType::Approval;
  Rational budget = 0;
  std::size_t voter_count = 0;
  /// Greedy first, then the configured equal-shares variant when available.
  std::vector<Outcome> outcomes;
  /// Outcome-level cells, plus ballot-level cells averaged over voters.
  std::map<CellKey, MetricValue> cells;
  /// Per-voter ballot cells (empty unless requested).
  std::map<BallotCellKey, MetricValue> ballot_cells;
  /// UG − ES, present only where both values are defined. Ballot-level
  /// entries are voter means.
  std::map<LossKey, LossEntry> losses;
  std::map<std::string, QuartileLabel> cost_quartiles;
  std::map<std::string, QuartileLabel> popularity_quartiles;
  std::map<RuleId, Rational> utilization;
  std::vector<ProjectSummary> projects;
  /// Project ids by popularity desc, id asc.
  std::vector<std::string> popularity_ranking;
  std::set<ImpactArea> proposed_areas;
  bool labeled = false;
  std::vector<std::string> warnings;

  const Outcome* outcome_for(RuleId role) const;
  const MetricValue* cell(const MetricKey& key, ImpactArea area, RuleId rule) const;

  bool operator==(const InstanceReport&) const = default;
};

/// Full analysis with freshly computed outcomes. Non-approval instances get a
/// greedy-only report with a warning.
InstanceReport run_instance(const Instance& instance, const AnalysisConfig& config = {},
                            std::string instance_id = "instance");

/// Analysis over caller-supplied outcomes (e.g. published winner sets).
InstanceReport run_instance_with_outcomes(const Instance& instance, const Outcome& greedy,
                                          const std::optional<Outcome>& equal_shares,
                                          const AnalysisConfig& config = {}, std::string instance_id = "instance");

struct StatCell {
  std::optional<stats::TestResult> result;
  std::optional<ErrorCode> error;
  std::size_t n = 0;
  bool operator==(const StatCell&) const = default;
};

struct SummaryCell {
  std::optional<stats::LossSummary> summary;
  std::size_t n = 0;
  double mean_ug = 0;
  double mean_es = 0;
  /// (mean UG − mean ES) / mean UG over the same instances.
  std::optional<double> relative_loss;
  bool operator==(const SummaryCell&) const = default;
};

struct ConjointDataset {
  RuleId rule = RuleId::Greedy;
  std::vector<std::string> predictor_names;
  std::vector<std::string> instance_ids;
  std::vector<std::vector<double>> indicators;
  std::vector<double> utilization;
};

struct ConjointCell {
  RuleId rule = RuleId::Greedy;
  std::vector<std::string> predictor_names;
  std::optional<stats::OlsFit> fit;
  std::optional<ErrorCode> error;
  std::size_t n = 0;
  bool operator==(const ConjointCell&) const = default;
};

struct BeneficiaryAggregate {
  unsigned long proposed = 0;
  unsigned long won = 0;
  bool operator==(const BeneficiaryAggregate&) const = default;
};

struct FileError {
  std::string instance_id;
  ErrorCode code;
  std::string message;
  bool operator==(const FileError&) const = default;
};

struct CorpusReport {
  std::size_t instance_count = 0;
  std::size_t labeled_count = 0;
  RuleId es_variant = RuleId::MesAdd1u;
  std::vector<FileError> errors;
  std::map<LossKey, SummaryCell> loss_summaries;
  /// Keyed by role (Greedy, or the equal-shares variant).
  std::map<RuleId, std::vector<SelectionRatePoint>> selection_rates;
  std::map<std::pair<ImpactArea, RuleId>, StatCell> pearson;
  std::map<LossKey, StatCell> t_tests;
  std::vector<ConjointCell> conjoint;
  std::map<std::pair<Beneficiary, RuleId>, BeneficiaryAggregate> beneficiaries;

  bool operator==(const CorpusReport&) const = default;
};

/// Exact median of the project costs.
Rational median_cost(const std::vector<ProjectSummary>& projects);

/// One row per labeled report that carries an outcome for `rule`'s role.
/// Throws NoUsableRows.
ConjointDataset build_conjoint_dataset(const std::vector<InstanceReport>& reports, const std::vector<AreaSet>& combos,
                                       RuleId rule);

/// Deterministic fold over reports sorted by instance id.
CorpusReport aggregate_reports(std::vector<InstanceReport> reports, const AnalysisConfig& config,
                               std::vector<FileError> errors = {});

struct CorpusRun {
  std::vector<InstanceReport> reports;
  std::vector<FileError> errors;
};

/// Parses and analyses every `.pb` file under `directory` on `config.jobs`
/// threads. Ballot cells are reduced to voter means. Throws DirectoryUnreadable.
CorpusRun run_instances(const std::filesystem::path& directory, const AnalysisConfig& config);

/// run_instances + aggregate_reports. Throws EmptyCorpus when nothing parsed.
CorpusReport run_corpus(const std::filesystem::path& directory, const AnalysisConfig& config);

}  // namespace pbimpact
