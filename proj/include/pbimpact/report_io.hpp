#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "pbimpact/batch.hpp"

namespace pbimpact {

enum class ExportFormat { Csv, Json };

// CSV renderers. Each returns the full file text including its header row.

/// instance,area,level,calc,unit,rule,value_rational,value_float,defined
std::string metrics_csv(const std::vector<InstanceReport>& reports);
/// instance,voter,area,calc,unit,rule,value_rational,value_float,defined
std::string ballot_metrics_csv(const std::vector<InstanceReport>& reports);
/// instance,area,level,calc,unit,loss_float,relative_loss_float
std::string losses_csv(const std::vector<InstanceReport>& reports);
/// instance,rule,rank,project,cost,total_cost,utilization,endowment
std::string outcomes_csv(const std::vector<InstanceReport>& reports);

/// area,level,calc,unit,n,pct_positive,mean,mean_pos,mean_neg
std::string summary_csv(const CorpusReport& report);
/// area,level,calc,unit,n,mean_ug,mean_es,relative_loss
std::string relative_loss_csv(const CorpusReport& report);
/// rule,rank,n,rate
std::string selection_rate_csv(const CorpusReport& report);
/// rule,predictor,coefficient,p_value,relative_importance,r_squared
std::string conjoint_csv(const CorpusReport& report);
/// area,rule,n,r,p_value,error
std::string correlations_csv(const CorpusReport& report);
/// area,level,calc,unit,n,t_statistic,p_value,error
std::string ttests_csv(const CorpusReport& report);
/// beneficiary,total_projects,ug_representation,es_representation,relative_loss
std::string beneficiaries_csv(const CorpusReport& report);
/// instance,code,message
std::string errors_csv(const CorpusReport& report);

nlohmann::json to_json(const InstanceReport& report);
nlohmann::json to_json(const CorpusReport& report);
InstanceReport instance_report_from_json(const nlohmann::json& j);
CorpusReport corpus_report_from_json(const nlohmann::json& j);

/// Writes metrics/losses/outcomes (and ballot_metrics when present) CSVs, or a
/// single report.json. Returns the files written. Throws IoError.
std::vector<std::filesystem::path> export_report(const std::vector<InstanceReport>& reports, ExportFormat format,
                                                 const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> export_report(const CorpusReport& report, ExportFormat format,
                                                 const std::filesystem::path& out_dir);

/// Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pbimpact
