#include "pbimpact/report_io.hpp"

#include <fstream>

#include "pbimpact/errors.hpp"

namespace pbimpact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string key_columns(const MetricKey& key) {
  return std::string(to_string(key.level)) + "," + std::string(key.calc_name()) + "," + std::string(to_string(key.unit));
}

std::string rational_text(const Rational& r) { return to_decimal_string(r); }

Rational rational_from(const json& j) { return parse_decimal(j.get<std::string>()); }

Level level_from(const std::string& s) {
  if (s == "outcome") return Level::Outcome;
  if (s == "ballot") return Level::Ballot;
  throw Error(ErrorCode::InvalidKey, "unknown level " + s);
}

Unit unit_from(const std::string& s) {
  for (auto u : {Unit::Cost, Unit::Projects, Unit::Popularity})
    if (to_string(u) == s) return u;
  throw Error(ErrorCode::InvalidKey, "unknown unit " + s);
}

MetricKey key_from(const json& j) {
  MetricKey key;
  key.level = level_from(j.at("level").get<std::string>());
  key.unit = unit_from(j.at("unit").get<std::string>());
  const auto calc = j.at("calc").get<std::string>();
  bool found = false;
  for (auto scope : {Scope::Impact, Scope::WithinNovelty, Scope::BetweenNovelty})
    for (auto c : {Calc::Share, Calc::Representation, Calc::Proportionality})
      if (!found && calc_column(c, scope) == calc && MetricKey{key.level, c, key.unit, scope}.valid()) {
        key.calc = c;
        key.scope = scope;
        found = true;
      }
  if (!found) throw Error(ErrorCode::InvalidKey, "unknown calc " + calc);
  return key;
}

void put_key(json& j, const MetricKey& key) {
  j["level"] = to_string(key.level);
  j["calc"] = key.calc_name();
  j["unit"] = to_string(key.unit);
}

ImpactArea area_from(const json& j) {
  const auto s = j.get<std::string>();
  if (auto a = area_from_string(s)) return *a;
  throw Error(ErrorCode::InvalidKey, "unknown area " + s);
}

RuleId rule_from(const json& j) {
  const auto s = j.get<std::string>();
  if (auto r = rule_from_string(s)) return *r;
  throw Error(ErrorCode::InvalidKey, "unknown rule " + s);
}

std::optional<double> opt_double_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const MetricValue& v) {
  return {{"numerator", rational_text(v.numerator)}, {"denominator", rational_text(v.denominator)}, {"defined", v.defined}};
}

MetricValue metric_from(const json& j) {
  MetricValue v;
  v.numerator = rational_from(j.at("numerator"));
  v.denominator = rational_from(j.at("denominator"));
  v.defined = j.at("defined").get<bool>();
  return v;
}

json to_json(const Outcome& o) {
  json payments = json::object();
  for (const auto& [voter, row] : o.payments) {
    json r = json::object();
    for (const auto& [pid, amount] : row) r[pid] = rational_text(amount);
    payments[voter] = r;
  }
  json completion = json::object();
  for (const auto& [pid, amount] : o.completion_payments) completion[pid] = rational_text(amount);
  return {{"rule", to_string(o.rule)},
          {"winners", o.winners},
          {"payments", payments},
          {"completion", completion},
          {"endowment_used", o.endowment_used ? json(rational_text(*o.endowment_used)) : json(nullptr)},
          {"total_cost", rational_text(o.total_cost)},
          {"leftover", rational_text(o.leftover)},
          {"fingerprint", o.instance_fingerprint}};
}

Outcome outcome_from(const json& j) {
  Outcome o;
  o.rule = rule_from(j.at("rule"));
  o.winners = j.at("winners").get<std::vector<std::string>>();
  for (const auto& [voter, row] : j.at("payments").items())
    for (const auto& [pid, amount] : row.items()) o.payments[voter][pid] = rational_from(amount);
  for (const auto& [pid, amount] : j.at("completion").items()) o.completion_payments[pid] = rational_from(amount);
  if (!j.at("endowment_used").is_null()) o.endowment_used = rational_from(j.at("endowment_used"));
  o.total_cost = rational_from(j.at("total_cost"));
  o.leftover = rational_from(j.at("leftover"));
  o.instance_fingerprint = j.at("fingerprint").get<std::string>();
  return o;
}

json to_json(const stats::TestResult& t) {
  return {{"statistic", t.statistic}, {"p_value", t.p_value}, {"df", t.df}, {"n", t.n}};
}

stats::TestResult test_from(const json& j) {
  return {j.at("statistic").get<double>(), j.at("p_value").get<double>(), j.at("df").get<double>(),
          j.at("n").get<std::size_t>()};
}

json to_json(const StatCell& c) {
  return {{"n", c.n},
          {"result", c.result ? to_json(*c.result) : json(nullptr)},
          {"error", c.error ? json(to_string(*c.error)) : json(nullptr)}};
}

StatCell stat_from(const json& j) {
  StatCell c;
  c.n = j.at("n").get<std::size_t>();
  if (!j.at("result").is_null()) c.result = test_from(j.at("result"));
  if (!j.at("error").is_null()) c.error = error_code_from_string(j.at("error").get<std::string>());
  return c;
}

json quartiles_json(const std::map<std::string, QuartileLabel>& labels) {
  json j = json::object();
  for (const auto& [id, label] : labels) j[id] = label.level;
  return j;
}

std::map<std::string, QuartileLabel> quartiles_from(const json& j, QuartileKind kind) {
  std::map<std::string, QuartileLabel> out;
  for (const auto& [id, level] : j.items()) out.emplace(id, QuartileLabel{kind, level.get<int>()});
  return out;
}

}  // namespace

std::string metrics_csv(const std::vector<InstanceReport>& reports) {
  std::string out = "instance,area,level,calc,unit,rule,value_rational,value_float,defined\n";
  for (const auto& r : reports) {
    for (const auto area : kNamedAreas)
      for (const auto& key : all_metric_keys())
        for (const auto& o : r.outcomes) {
          auto it = r.cells.find(CellKey{key, area, o.rule});
          if (it == r.cells.end()) continue;
          const auto& v = it->second;
          out += csv_field(r.instance_id) + "," + std::string(to_string(area)) + "," + key_columns(key) + "," +
                 std::string(rule_role(o.rule)) + "," + csv_field(v.to_string()) + "," +
                 (v.defined ? format_double(v.as_double()) : "") + "," + (v.defined ? "true" : "false") + "\n";
        }
  }
  return out;
}

std::string ballot_metrics_csv(const std::vector<InstanceReport>& reports) {
  std::string out = "instance,voter,area,calc,unit,rule,value_rational,value_float,defined\n";
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.ballot_cells) {
      out += csv_field(r.instance_id) + "," + csv_field(k.voter) + "," + std::string(to_string(k.cell.area)) + "," +
             std::string(k.cell.key.calc_name()) + "," + std::string(to_string(k.cell.key.unit)) + "," +
             std::string(rule_role(k.cell.rule)) + "," + csv_field(v.to_string()) + "," +
             (v.defined ? format_double(v.as_double()) : "") + "," + (v.defined ? "true" : "false") + "\n";
    }
  }
  return out;
}

std::string losses_csv(const std::vector<InstanceReport>& reports) {
  std::string out = "instance,area,level,calc,unit,loss_float,relative_loss_float\n";
  for (const auto& r : reports)
    for (const auto area : kNamedAreas)
      for (const auto& key : all_metric_keys()) {
        auto it = r.losses.find({key, area});
        if (it == r.losses.end()) continue;
        out += csv_field(r.instance_id) + "," + std::string(to_string(area)) + "," + key_columns(key) + "," +
               format_double(to_double(it->second.loss)) + "," +
               (it->second.relative ? format_double(to_double(*it->second.relative)) : "") + "\n";
      }
  return out;
}

std::string outcomes_csv(const std::vector<InstanceReport>& reports) {
  std::string out = "instance,rule,rank,project,cost,total_cost,utilization,endowment\n";
  for (const auto& r : reports)
    for (const auto& o : r.outcomes) {
      const auto util = r.utilization.count(o.rule) ? format_double(to_double(r.utilization.at(o.rule))) : "";
      for (std::size_t k = 0; k < o.winners.size(); ++k) {
        const auto& id = o.winners[k];
        std::string cost;
        for (const auto& p : r.projects)
          if (p.id == id) cost = to_decimal_string(p.cost);
        out += csv_field(r.instance_id) + "," + std::string(to_string(o.rule)) + "," + std::to_string(k + 1) + "," +
               csv_field(id) + "," + cost + "," + to_decimal_string(o.total_cost) + "," + util + "," +
               (o.endowment_used ? to_decimal_string(*o.endowment_used) : "") + "\n";
      }
    }
  return out;
}

std::string summary_csv(const CorpusReport& report) {
  std::string out = "area,level,calc,unit,n,pct_positive,mean,mean_pos,mean_neg\n";
  for (const auto area : kNamedAreas)
    for (const auto& key : all_metric_keys()) {
      auto it = report.loss_summaries.find({key, area});
      if (it == report.loss_summaries.end()) continue;
      const auto& s = it->second.summary;
      out += std::string(to_string(area)) + "," + key_columns(key) + "," + std::to_string(it->second.n) + "," +
             (s ? format_double(to_double(s->pct_positive)) : "") + "," + (s ? format_double(s->mean) : "") + "," +
             (s ? opt_double(s->mean_positive) : "") + "," + (s ? opt_double(s->mean_negative) : "") + "\n";
    }
  return out;
}

std::string relative_loss_csv(const CorpusReport& report) {
  std::string out = "area,level,calc,unit,n,mean_ug,mean_es,relative_loss\n";
  for (const auto area : kNamedAreas)
    for (const auto& key : all_metric_keys()) {
      auto it = report.loss_summaries.find({key, area});
      if (it == report.loss_summaries.end() || it->second.n == 0) continue;
      const auto& c = it->second;
      out += std::string(to_string(area)) + "," + key_columns(key) + "," + std::to_string(c.n) + "," +
             format_double(c.mean_ug) + "," + format_double(c.mean_es) + "," + opt_double(c.relative_loss) + "\n";
    }
  return out;
}

std::string selection_rate_csv(const CorpusReport& report) {
  std::string out = "rule,rank,n,rate\n";
  for (const auto& [rule, points] : report.selection_rates)
    for (std::size_t k = 0; k < points.size(); ++k)
      out += std::string(rule_role(rule)) + "," + std::to_string(k + 1) + "," + std::to_string(points[k].n) + "," +
             (points[k].n ? format_double(to_double(points[k].rate)) : "") + "\n";
  return out;
}

std::string conjoint_csv(const CorpusReport& report) {
  std::string out = "rule,predictor,coefficient,p_value,relative_importance,r_squared\n";
  for (const auto& cell : report.conjoint) {
    if (!cell.fit) continue;
    const auto& fit = *cell.fit;
    for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
      const std::string name = j == 0 ? "intercept" : cell.predictor_names[j - 1];
      out += std::string(rule_role(cell.rule)) + "," + csv_field(name) + "," + format_double(fit.coefficients[j]) + "," +
             format_double(fit.p_values[j]) + "," + format_double(fit.relative_importance[j]) + "," +
             format_double(fit.r_squared) + "\n";
    }
  }
  return out;
}

std::string correlations_csv(const CorpusReport& report) {
  std::string out = "area,rule,n,r,p_value,error\n";
  for (const auto& [key, cell] : report.pearson) {
    out += std::string(to_string(key.first)) + "," + std::string(rule_role(key.second)) + "," + std::to_string(cell.n) +
           "," + (cell.result ? format_double(cell.result->statistic) : "") + "," +
           (cell.result ? format_double(cell.result->p_value) : "") + "," +
           (cell.error ? std::string(to_string(*cell.error)) : "") + "\n";
  }
  return out;
}

std::string ttests_csv(const CorpusReport& report) {
  std::string out = "area,level,calc,unit,n,t_statistic,p_value,error\n";
  for (const auto area : kNamedAreas)
    for (const auto& key : all_metric_keys()) {
      auto it = report.t_tests.find({key, area});
      if (it == report.t_tests.end()) continue;
      const auto& cell = it->second;
      out += std::string(to_string(area)) + "," + key_columns(key) + "," + std::to_string(cell.n) + "," +
             (cell.result ? format_double(cell.result->statistic) : "") + "," +
             (cell.result ? format_double(cell.result->p_value) : "") + "," +
             (cell.error ? std::string(to_string(*cell.error)) : "") + "\n";
    }
  return out;
}

std::string beneficiaries_csv(const CorpusReport& report) {
  std::string out = "beneficiary,total_projects,ug_representation,es_representation,relative_loss\n";
  for (const auto b : kNamedBeneficiaries) {
    auto ug = report.beneficiaries.find({b, RuleId::Greedy});
    auto es = report.beneficiaries.find({b, report.es_variant});
    if (ug == report.beneficiaries.end() || es == report.beneficiaries.end()) continue;
    const auto rep = [](const BeneficiaryAggregate& a) {
      return a.proposed ? std::optional<double>(static_cast<double>(a.won) / static_cast<double>(a.proposed))
                        : std::nullopt;
    };
    const auto u = rep(ug->second), e = rep(es->second);
    std::optional<double> rel;
    if (u && e && *u != 0) rel = (*u - *e) / *u;
    out += std::string(to_string(b)) + "," + std::to_string(ug->second.proposed) + "," + opt_double(u) + "," +
           opt_double(e) + "," + opt_double(rel) + "\n";
  }
  return out;
}

std::string errors_csv(const CorpusReport& report) {
  std::string out = "instance,code,message\n";
  for (const auto& e : report.errors)
    out += csv_field(e.instance_id) + "," + std::string(to_string(e.code)) + "," + csv_field(e.message) + "\n";
  return out;
}

json to_json(const InstanceReport& r) {
  json j;
  j["instance"] = r.instance_id;
  j["vote_type"] = to_string(r.vote_type);
  j["budget"] = rational_text(r.budget);
  j["voter_count"] = r.voter_count;
  j["outcomes"] = json::array();
  for (const auto& o : r.outcomes) j["outcomes"].push_back(to_json(o));

  j["cells"] = json::array();
  for (const auto& [k, v] : r.cells) {
    json c = to_json(v);
    put_key(c, k.key);
    c["area"] = to_string(k.area);
    c["rule"] = to_string(k.rule);
    j["cells"].push_back(std::move(c));
  }
  j["ballot_cells"] = json::array();
  for (const auto& [k, v] : r.ballot_cells) {
    json c = to_json(v);
    put_key(c, k.cell.key);
    c["area"] = to_string(k.cell.area);
    c["rule"] = to_string(k.cell.rule);
    c["voter"] = k.voter;
    j["ballot_cells"].push_back(std::move(c));
  }
  j["losses"] = json::array();
  for (const auto& [k, v] : r.losses) {
    json c;
    put_key(c, k.key);
    c["area"] = to_string(k.area);
    c["loss"] = rational_text(v.loss);
    c["relative"] = v.relative ? json(rational_text(*v.relative)) : json(nullptr);
    j["losses"].push_back(std::move(c));
  }
  j["cost_quartiles"] = quartiles_json(r.cost_quartiles);
  j["popularity_quartiles"] = quartiles_json(r.popularity_quartiles);
  j["utilization"] = json::object();
  for (const auto& [rule, u] : r.utilization) j["utilization"][std::string(to_string(rule))] = rational_text(u);
  j["projects"] = json::array();
  for (const auto& p : r.projects) {
    json areas = json::array(), who = json::array();
    for (auto a : p.areas) areas.push_back(to_string(a));
    for (auto b : p.beneficiaries) who.push_back(to_string(b));
    j["projects"].push_back({{"id", p.id},
                             {"cost", rational_text(p.cost)},
                             {"areas", areas},
                             {"beneficiaries", who},
                             {"popularity", p.popularity ? json(rational_text(*p.popularity)) : json(nullptr)}});
  }
  j["popularity_ranking"] = r.popularity_ranking;
  j["proposed_areas"] = json::array();
  for (auto a : r.proposed_areas) j["proposed_areas"].push_back(to_string(a));
  j["labeled"] = r.labeled;
  j["warnings"] = r.warnings;
  return j;
}

InstanceReport instance_report_from_json(const json& j) {
  InstanceReport r;
  r.instance_id = j.at("instance").get<std::string>();
  const auto vt = vote_type_from_string(j.at("vote_type").get<std::string>());
  if (!vt) throw Error(ErrorCode::UnsupportedVoteType, "unknown vote_type in report");
  r.vote_type = *vt;
  r.budget = rational_from(j.at("budget"));
  r.voter_count = j.at("voter_count").get<std::size_t>();
  for (const auto& o : j.at("outcomes")) r.outcomes.push_back(outcome_from(o));
  for (const auto& c : j.at("cells"))
    r.cells.emplace(CellKey{key_from(c), area_from(c.at("area")), rule_from(c.at("rule"))}, metric_from(c));
  for (const auto& c : j.at("ballot_cells"))
    r.ballot_cells.emplace(
        BallotCellKey{CellKey{key_from(c), area_from(c.at("area")), rule_from(c.at("rule"))}, c.at("voter").get<std::string>()},
        metric_from(c));
  for (const auto& c : j.at("losses")) {
    LossEntry e{rational_from(c.at("loss")), std::nullopt};
    if (!c.at("relative").is_null()) e.relative = rational_from(c.at("relative"));
    r.losses.emplace(LossKey{key_from(c), area_from(c.at("area"))}, std::move(e));
  }
  r.cost_quartiles = quartiles_from(j.at("cost_quartiles"), QuartileKind::Cost);
  r.popularity_quartiles = quartiles_from(j.at("popularity_quartiles"), QuartileKind::Popularity);
  for (const auto& [rule, u] : j.at("utilization").items()) r.utilization[rule_from(json(rule))] = rational_from(u);
  for (const auto& p : j.at("projects")) {
    ProjectSummary s;
    s.id = p.at("id").get<std::string>();
    s.cost = rational_from(p.at("cost"));
    for (const auto& a : p.at("areas")) s.areas.insert(area_from(a));
    for (const auto& b : p.at("beneficiaries")) {
      const auto who = beneficiary_from_string(b.get<std::string>());
      if (!who) throw Error(ErrorCode::InvalidKey, "unknown beneficiary in report");
      s.beneficiaries.insert(*who);
    }
    if (!p.at("popularity").is_null()) s.popularity = rational_from(p.at("popularity"));
    r.projects.push_back(std::move(s));
  }
  r.popularity_ranking = j.at("popularity_ranking").get<std::vector<std::string>>();
  for (const auto& a : j.at("proposed_areas")) r.proposed_areas.insert(area_from(a));
  r.labeled = j.at("labeled").get<bool>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

json to_json(const CorpusReport& r) {
  json j;
  j["instance_count"] = r.instance_count;
  j["labeled_count"] = r.labeled_count;
  j["es_variant"] = to_string(r.es_variant);
  j["errors"] = json::array();
  for (const auto& e : r.errors)
    j["errors"].push_back({{"instance", e.instance_id}, {"code", to_string(e.code)}, {"message", e.message}});

  j["loss_summaries"] = json::array();
  for (const auto& [k, c] : r.loss_summaries) {
    json s;
    put_key(s, k.key);
    s["area"] = to_string(k.area);
    s["n"] = c.n;
    s["mean_ug"] = c.mean_ug;
    s["mean_es"] = c.mean_es;
    s["relative_loss"] = opt_json(c.relative_loss);
    if (c.summary) {
      s["summary"] = {{"pct_positive", rational_text(c.summary->pct_positive)},
                      {"mean", c.summary->mean},
                      {"mean_positive", opt_json(c.summary->mean_positive)},
                      {"mean_negative", opt_json(c.summary->mean_negative)},
                      {"n", c.summary->n}};
    } else {
      s["summary"] = nullptr;
    }
    j["loss_summaries"].push_back(std::move(s));
  }

  j["selection_rates"] = json::object();
  for (const auto& [rule, points] : r.selection_rates) {
    json arr = json::array();
    for (const auto& p : points) arr.push_back({{"rate", rational_text(p.rate)}, {"n", p.n}});
    j["selection_rates"][std::string(to_string(rule))] = arr;
  }

  j["pearson"] = json::array();
  for (const auto& [k, c] : r.pearson) {
    json s = to_json(c);
    s["area"] = to_string(k.first);
    s["rule"] = to_string(k.second);
    j["pearson"].push_back(std::move(s));
  }
  j["t_tests"] = json::array();
  for (const auto& [k, c] : r.t_tests) {
    json s = to_json(c);
    put_key(s, k.key);
    s["area"] = to_string(k.area);
    j["t_tests"].push_back(std::move(s));
  }

  j["conjoint"] = json::array();
  for (const auto& c : r.conjoint) {
    json s;
    s["rule"] = to_string(c.rule);
    s["predictors"] = c.predictor_names;
    s["n"] = c.n;
    s["error"] = c.error ? json(to_string(*c.error)) : json(nullptr);
    if (c.fit) {
      s["fit"] = {{"coefficients", c.fit->coefficients},
                  {"std_errors", c.fit->std_errors},
                  {"p_values", c.fit->p_values},
                  {"relative_importance", c.fit->relative_importance},
                  {"r_squared", c.fit->r_squared},
                  {"df_residual", c.fit->df_residual},
                  {"n", c.fit->n}};
    } else {
      s["fit"] = nullptr;
    }
    j["conjoint"].push_back(std::move(s));
  }

  j["beneficiaries"] = json::array();
  for (const auto& [k, a] : r.beneficiaries)
    j["beneficiaries"].push_back({{"beneficiary", to_string(k.first)},
                                  {"rule", to_string(k.second)},
                                  {"proposed", a.proposed},
                                  {"won", a.won}});
  return j;
}

CorpusReport corpus_report_from_json(const json& j) {
  CorpusReport r;
  r.instance_count = j.at("instance_count").get<std::size_t>();
  r.labeled_count = j.at("labeled_count").get<std::size_t>();
  r.es_variant = rule_from(j.at("es_variant"));
  for (const auto& e : j.at("errors")) {
    const auto code = error_code_from_string(e.at("code").get<std::string>());
    if (!code) throw Error(ErrorCode::InvalidKey, "unknown error code in report");
    r.errors.push_back({e.at("instance").get<std::string>(), *code, e.at("message").get<std::string>()});
  }
  for (const auto& s : j.at("loss_summaries")) {
    SummaryCell c;
    c.n = s.at("n").get<std::size_t>();
    c.mean_ug = s.at("mean_ug").get<double>();
    c.mean_es = s.at("mean_es").get<double>();
    c.relative_loss = opt_double_from(s.at("relative_loss"));
    if (!s.at("summary").is_null()) {
      const auto& m = s.at("summary");
      stats::LossSummary ls;
      ls.pct_positive = rational_from(m.at("pct_positive"));
      ls.mean = m.at("mean").get<double>();
      ls.mean_positive = opt_double_from(m.at("mean_positive"));
      ls.mean_negative = opt_double_from(m.at("mean_negative"));
      ls.n = m.at("n").get<std::size_t>();
      c.summary = ls;
    }
    r.loss_summaries.emplace(LossKey{key_from(s), area_from(s.at("area"))}, std::move(c));
  }
  for (const auto& [rule, arr] : j.at("selection_rates").items()) {
    std::vector<SelectionRatePoint> points;
    for (const auto& p : arr) points.push_back({rational_from(p.at("rate")), p.at("n").get<std::size_t>()});
    r.selection_rates.emplace(rule_from(json(rule)), std::move(points));
  }
  for (const auto& s : j.at("pearson"))
    r.pearson.emplace(std::make_pair(area_from(s.at("area")), rule_from(s.at("rule"))), stat_from(s));
  for (const auto& s : j.at("t_tests")) r.t_tests.emplace(LossKey{key_from(s), area_from(s.at("area"))}, stat_from(s));
  for (const auto& s : j.at("conjoint")) {
    ConjointCell c;
    c.rule = rule_from(s.at("rule"));
    c.predictor_names = s.at("predictors").get<std::vector<std::string>>();
    c.n = s.at("n").get<std::size_t>();
    if (!s.at("error").is_null()) c.error = error_code_from_string(s.at("error").get<std::string>());
    if (!s.at("fit").is_null()) {
      const auto& f = s.at("fit");
      stats::OlsFit fit;
      fit.coefficients = f.at("coefficients").get<std::vector<double>>();
      fit.std_errors = f.at("std_errors").get<std::vector<double>>();
      fit.p_values = f.at("p_values").get<std::vector<double>>();
      fit.relative_importance = f.at("relative_importance").get<std::vector<double>>();
      fit.r_squared = f.at("r_squared").get<double>();
      fit.df_residual = f.at("df_residual").get<double>();
      fit.n = f.at("n").get<std::size_t>();
      c.fit = std::move(fit);
    }
    r.conjoint.push_back(std::move(c));
  }
  for (const auto& b : j.at("beneficiaries")) {
    const auto who = beneficiary_from_string(b.at("beneficiary").get<std::string>());
    if (!who) throw Error(ErrorCode::InvalidKey, "unknown beneficiary in report");
    r.beneficiaries.emplace(std::make_pair(*who, rule_from(b.at("rule"))),
                            BeneficiaryAggregate{b.at("proposed").get<unsigned long>(), b.at("won").get<unsigned long>()});
  }
  return r;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<fs::path> export_report(const std::vector<InstanceReport>& reports, ExportFormat format,
                                    const fs::path& out_dir) {
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  if (format == ExportFormat::Json) {
    json j = {{"instances", json::array()}};
    for (const auto& r : reports) j["instances"].push_back(to_json(r));
    emit("report.json", j.dump(2) + "\n");
    return written;
  }
  emit("metrics.csv", metrics_csv(reports));
  emit("losses.csv", losses_csv(reports));
  emit("outcomes.csv", outcomes_csv(reports));
  const bool any_ballots =
      std::any_of(reports.begin(), reports.end(), [](const InstanceReport& r) { return !r.ballot_cells.empty(); });
  if (any_ballots) emit("ballot_metrics.csv", ballot_metrics_csv(reports));
  return written;
}

std::vector<fs::path> export_report(const CorpusReport& report, ExportFormat format, const fs::path& out_dir) {
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  if (format == ExportFormat::Json) {
    emit("corpus.json", to_json(report).dump(2) + "\n");
    return written;
  }
  emit("summary.csv", summary_csv(report));
  emit("relative_loss.csv", relative_loss_csv(report));
  emit("selection_rate.csv", selection_rate_csv(report));
  emit("conjoint.csv", conjoint_csv(report));
  emit("correlations.csv", correlations_csv(report));
  emit("ttests.csv", ttests_csv(report));
  emit("beneficiaries.csv", beneficiaries_csv(report));
  emit("errors.csv", errors_csv(report));
  return written;
}

}  // namespace pbimpact
