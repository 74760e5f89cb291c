#include "pbimpact/batch.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "pbimpact/errors.hpp"

namespace pbimpact {

namespace fs = std::filesystem;

std::vector<AreaSet> default_conjoint_combos() {
  using A = ImpactArea;
  return {
      {A::Culture, A::Education},
      {A::EnvironmentalProtection, A::PublicSpace, A::UrbanGreenery},
      {A::PublicSpace, A::PublicTransit},
      {A::Health, A::PublicSpace, A::Sport},
  };
}

const Outcome* InstanceReport::outcome_for(RuleId role) const {
  for (const auto& o : outcomes)
    if (is_equal_shares(o.rule) == is_equal_shares(role)) return &o;
  return nullptr;
}

const MetricValue* InstanceReport::cell(const MetricKey& key, ImpactArea area, RuleId rule) const {
  const auto* o = outcome_for(rule);
  if (!o) return nullptr;
  auto it = cells.find(CellKey{key, area, o->rule});
  return it == cells.end() ? nullptr : &it->second;
}

namespace {

// Per-area, per-rule quantities shared by every voter of one instance.
struct AreaRuleBase {
  Rational winners_cost, winners_count;        // W_f
  Rational exclusive_cost, exclusive_count;    // Ŵ_f
  Rational proposed_cost, proposed_count;      // P_l
  Rational area_winners_cost, area_winners_count;  // W_{l,f}
  ProposalRatios ratios;
};

struct BallotTally {
  Rational winners_cost = 0, winners_count = 0;      // W_{l,v,f}
  Rational exclusive_cost = 0, exclusive_count = 0;  // Ŵ_{l,v,f}
};

MetricValue ballot_value(const MetricKey& key, const AreaRuleBase& base, const BallotTally& tally) {
  const bool cost = key.unit == Unit::Cost;
  const Rational& won = cost ? tally.winners_cost : tally.winners_count;
  const Rational& novel = cost ? tally.exclusive_cost : tally.exclusive_count;
  const Rational& all_won = cost ? base.winners_cost : base.winners_count;
  switch (key.scope) {
    case Scope::WithinNovelty:
      return MetricValue::ratio(novel, cost ? base.area_winners_cost : base.area_winners_count);
    case Scope::BetweenNovelty:
      return MetricValue::ratio(novel, cost ? base.exclusive_cost : base.exclusive_count);
    case Scope::Impact:
      break;
  }
  switch (key.calc) {
    case Calc::Share:
      return MetricValue::ratio(won, all_won);
    case Calc::Representation:
      return MetricValue::ratio(won, cost ? base.proposed_cost : base.proposed_count);
    case Calc::Proportionality: {
      if (all_won == 0) return MetricValue::ratio(0, 0);
      Rational share = won / all_won;
      share.canonicalize();
      return MetricValue::ratio(share, cost ? base.ratios.r_cost : base.ratios.r_projects);
    }
  }
  return {};
}

void add_losses(InstanceReport& report) {
  const auto* ug = report.outcome_for(RuleId::Greedy);
  const Outcome* es = nullptr;
  for (const auto& o : report.outcomes)
    if (is_equal_shares(o.rule)) es = &o;
  if (!ug || !es) return;
  for (const auto& key : all_metric_keys()) {
    for (const auto area : kNamedAreas) {
      auto a = report.cells.find({key, area, ug->rule});
      auto b = report.cells.find({key, area, es->rule});
      if (a == report.cells.end() || b == report.cells.end()) continue;
      if (!a->second.defined || !b->second.defined) continue;
      LossEntry entry{loss(a->second, b->second), std::nullopt};
      if (a->second.value() != 0) entry.relative = relative_loss(a->second, b->second);
      report.losses.emplace(LossKey{key, area}, std::move(entry));
    }
  }
}

}  // namespace

InstanceReport run_instance_with_outcomes(const Instance& instance, const Outcome& greedy,
                                          const std::optional<Outcome>& equal_shares, const AnalysisConfig& config,
                                          std::string instance_id) {
  const auto fingerprint = instance_fingerprint(instance);
  if (greedy.instance_fingerprint != fingerprint || (equal_shares && equal_shares->instance_fingerprint != fingerprint))
    throw Error(ErrorCode::InstanceMismatch, "outcomes do not belong to instance " + instance_id);

  InstanceReport report;
  report.instance_id = std::move(instance_id);
  report.vote_type = instance.vote_type();
  report.budget = instance.budget();
  report.voter_count = instance.ballots().size();
  report.warnings = instance.warnings();
  report.outcomes.push_back(greedy);
  if (equal_shares) report.outcomes.push_back(*equal_shares);
  for (const auto& o : report.outcomes) report.utilization[o.rule] = budget_utilization(o, instance);

  const bool has_popularity = instance.vote_type() != VoteType::Ordinal;
  for (std::size_t i = 0; i < instance.projects().size(); ++i) {
    const auto& p = instance.projects()[i];
    ProjectSummary s{p.id, p.cost, p.areas, p.beneficiaries, std::nullopt};
    if (has_popularity) s.popularity = instance.popularity_vector()[i];
    report.projects.push_back(std::move(s));
    for (auto a : p.areas)
      if (a != ImpactArea::Other) report.proposed_areas.insert(a);
  }
  report.labeled = !report.proposed_areas.empty();
  if (instance.projects().empty()) {
    report.warnings.push_back("instance has no projects; metrics skipped");
    return report;
  }
  report.cost_quartiles = assign_quartile_labels(instance, QuartileKind::Cost);
  if (has_popularity) {
    report.popularity_quartiles = assign_quartile_labels(instance, QuartileKind::Popularity);
    report.popularity_ranking = popularity_ranking(instance);
  }

  std::vector<IdSet> exclusive(report.outcomes.size());
  const bool novelty = report.outcomes.size() == 2;
  if (novelty) {
    auto pair = exclusive_winners(report.outcomes[0], report.outcomes[1]);
    exclusive[0] = std::move(pair.only_a);
    exclusive[1] = std::move(pair.only_b);
  }

  // Outcome level, straight from the slices.
  for (const auto area : kNamedAreas) {
    const auto ratios = proposal_ratios(instance, area);
    for (std::size_t f = 0; f < report.outcomes.size(); ++f) {
      const auto& outcome = report.outcomes[f];
      const auto slice = area_slice(instance, outcome, exclusive[f], area);
      for (const auto& key : all_metric_keys()) {
        if (key.level != Level::Outcome) continue;
        if (key.scope != Scope::Impact && !novelty) continue;
        if (key.unit == Unit::Popularity && !has_popularity) continue;
        report.cells.emplace(CellKey{key, area, outcome.rule}, metric_value(key, slice, ratios, instance));
      }
    }
  }

  // Ballot level: per-voter tallies over the voter's approved projects.
  const auto& ballots = instance.ballots();
  if (!ballots.empty()) {
    const std::size_t rules = report.outcomes.size();
    const std::size_t areas = kNamedAreas.size();
    auto area_pos = [](ImpactArea a) { return static_cast<std::size_t>(a); };

    std::vector<std::vector<char>> is_winner(rules), is_exclusive(rules);
    std::vector<std::vector<AreaRuleBase>> base(rules, std::vector<AreaRuleBase>(areas));
    for (std::size_t f = 0; f < rules; ++f) {
      const auto winners = report.outcomes[f].winner_set();
      is_winner[f].assign(instance.projects().size(), 0);
      is_exclusive[f].assign(instance.projects().size(), 0);
      for (std::size_t i = 0; i < instance.projects().size(); ++i) {
        is_winner[f][i] = winners.count(instance.projects()[i].id) ? 1 : 0;
        is_exclusive[f][i] = exclusive[f].count(instance.projects()[i].id) ? 1 : 0;
      }
      for (std::size_t l = 0; l < areas; ++l) {
        auto& b = base[f][l];
        const auto area = kNamedAreas[l];
        b.ratios = proposal_ratios(instance, area);
        b.winners_cost = measure(instance, winners, Unit::Cost);
        b.winners_count = measure(instance, winners, Unit::Projects);
        b.exclusive_cost = measure(instance, exclusive[f], Unit::Cost);
        b.exclusive_count = measure(instance, exclusive[f], Unit::Projects);
        b.proposed_cost = b.proposed_count = b.area_winners_cost = b.area_winners_count = 0;
        for (std::size_t i = 0; i < instance.projects().size(); ++i) {
          const auto& p = instance.projects()[i];
          if (!p.areas.count(area)) continue;
          b.proposed_cost += p.cost;
          b.proposed_count += 1;
          if (is_winner[f][i]) {
            b.area_winners_cost += p.cost;
            b.area_winners_count += 1;
          }
        }
      }
    }

    std::vector<MetricKey> ballot_keys;
    for (const auto& key : all_metric_keys())
      if (key.level == Level::Ballot && (key.scope == Scope::Impact || novelty)) ballot_keys.push_back(key);

    // Voter means: numerators are linear in the voter tallies and every
    // denominator is voter-independent, so summing per project weighted by
    // its approver count gives the total over voters.
    const Rational voters(static_cast<unsigned long>(ballots.size()));
    for (std::size_t f = 0; f < rules; ++f) {
      std::vector<BallotTally> total(areas);
      for (std::size_t i = 0; i < instance.projects().size(); ++i) {
        if (!is_winner[f][i]) continue;
        const auto& p = instance.projects()[i];
        const Rational weight(static_cast<unsigned long>(instance.approvers()[i].size()));
        for (const auto a : p.areas) {
          if (a == ImpactArea::Other) continue;
          auto& t = total[area_pos(a)];
          t.winners_cost += p.cost * weight;
          t.winners_count += weight;
          if (is_exclusive[f][i]) {
            t.exclusive_cost += p.cost * weight;
            t.exclusive_count += weight;
          }
        }
      }
      for (std::size_t l = 0; l < areas; ++l) {
        for (const auto& key : ballot_keys) {
          auto mean = ballot_value(key, base[f][l], total[l]);
          mean.numerator /= voters;
          mean.numerator.canonicalize();
          report.cells.emplace(CellKey{key, kNamedAreas[l], report.outcomes[f].rule}, std::move(mean));
        }
      }
    }

    if (config.keep_ballot_cells) {
      std::vector<BallotTally> tally(areas);
      for (const auto& ballot : ballots) {
        for (std::size_t f = 0; f < rules; ++f) {
          std::fill(tally.begin(), tally.end(), BallotTally{});
          for (const auto& pid : ballot.approved) {
            const auto i = *instance.find_project(pid);
            if (!is_winner[f][i]) continue;
            const auto& p = instance.projects()[i];
            for (const auto a : p.areas) {
              if (a == ImpactArea::Other) continue;
              auto& t = tally[area_pos(a)];
              t.winners_cost += p.cost;
              t.winners_count += 1;
              if (is_exclusive[f][i]) {
                t.exclusive_cost += p.cost;
                t.exclusive_count += 1;
              }
            }
          }
          for (std::size_t l = 0; l < areas; ++l)
            for (const auto& key : ballot_keys)
              report.ballot_cells.emplace(
                  BallotCellKey{CellKey{key, kNamedAreas[l], report.outcomes[f].rule}, ballot.voter_id},
                  ballot_value(key, base[f][l], tally[l]));
        }
      }
    }
  }

  add_losses(report);
  return report;
}

InstanceReport run_instance(const Instance& instance, const AnalysisConfig& config, std::string instance_id) {
  const Outcome greedy = utilitarian_greedy(instance);
  std::optional<Outcome> es;
  std::vector<std::string> notes;
  if (instance.vote_type() != VoteType::Approval) {
    notes.push_back("equal shares skipped: " + std::string(to_string(instance.vote_type())) + " ballots");
  } else if (instance.ballots().empty()) {
    notes.push_back("equal shares skipped: no voters");
  } else {
    es = compute_outcome(instance, config.es_variant, config.increment);
  }
  auto report = run_instance_with_outcomes(instance, greedy, es, config, std::move(instance_id));
  report.warnings.insert(report.warnings.end(), notes.begin(), notes.end());
  return report;
}

Rational median_cost(const std::vector<ProjectSummary>& projects) {
  if (projects.empty()) throw Error(ErrorCode::EmptyInstance, "no projects for a median");
  std::vector<Rational> costs;
  for (const auto& p : projects) costs.push_back(p.cost);
  std::sort(costs.begin(), costs.end());
  const auto n = costs.size();
  if (n % 2 == 1) return costs[n / 2];
  Rational m = (costs[n / 2 - 1] + costs[n / 2]) / 2;
  m.canonicalize();
  return m;
}

ConjointDataset build_conjoint_dataset(const std::vector<InstanceReport>& reports, const std::vector<AreaSet>& combos,
                                       RuleId rule) {
  ConjointDataset data;
  data.rule = rule;
  for (const auto& combo : combos) {
    std::vector<std::string> labels;
    for (auto a : combo) labels.emplace_back(to_string(a));
    std::sort(labels.begin(), labels.end());
    std::string name;
    for (const auto& l : labels) name += (name.empty() ? "" : "+") + l;
    data.predictor_names.push_back(name + ":low");
    data.predictor_names.push_back(name + ":high");
  }

  for (const auto& report : reports) {
    const auto* outcome = report.outcome_for(rule);
    if (!outcome || !report.labeled || report.projects.empty()) continue;
    const Rational median = median_cost(report.projects);
    std::vector<double> row(2 * combos.size(), 0.0);
    for (const auto& id : outcome->winners) {
      const auto it = std::find_if(report.projects.begin(), report.projects.end(),
                                   [&](const ProjectSummary& p) { return p.id == id; });
      if (it == report.projects.end()) continue;
      for (std::size_t c = 0; c < combos.size(); ++c) {
        if (it->areas != combos[c]) continue;
        row[2 * c + (it->cost < median ? 0 : 1)] = 1.0;
      }
    }
    data.instance_ids.push_back(report.instance_id);
    data.indicators.push_back(std::move(row));
    data.utilization.push_back(to_double(report.utilization.at(outcome->rule)));
  }
  if (data.indicators.empty())
    throw Error(ErrorCode::NoUsableRows, "no labeled instance has an outcome for " + std::string(rule_role(rule)));
  return data;
}

namespace {

struct Paired {
  std::vector<double> ug, es;
};

Paired paired_values(const std::vector<InstanceReport>& reports, const MetricKey& key, ImpactArea area,
                     RuleId es_rule) {
  Paired out;
  for (const auto& r : reports) {
    if (!r.labeled || !r.proposed_areas.count(area)) continue;
    const auto* a = r.cell(key, area, RuleId::Greedy);
    const auto* b = r.cell(key, area, es_rule);
    if (!a || !b || !a->defined || !b->defined) continue;
    out.ug.push_back(a->as_double());
    out.es.push_back(b->as_double());
  }
  return out;
}

template <typename Fn>
StatCell stat_cell(std::size_t n, Fn&& fn) {
  StatCell cell;
  cell.n = n;
  try {
    cell.result = fn();
  } catch (const Error& e) {
    cell.error = e.code();
  }
  return cell;
}

}  // namespace

CorpusReport aggregate_reports(std::vector<InstanceReport> reports, const AnalysisConfig& config,
                               std::vector<FileError> errors) {
  std::sort(reports.begin(), reports.end(),
            [](const InstanceReport& a, const InstanceReport& b) { return a.instance_id < b.instance_id; });
  std::sort(errors.begin(), errors.end(),
            [](const FileError& a, const FileError& b) { return a.instance_id < b.instance_id; });

  CorpusReport corpus;
  corpus.instance_count = reports.size();
  corpus.es_variant = config.es_variant;
  corpus.errors = std::move(errors);
  for (const auto& r : reports) corpus.labeled_count += r.labeled ? 1 : 0;

  const RuleId es_rule = config.es_variant;
  for (const auto& key : all_metric_keys()) {
    for (const auto area : kNamedAreas) {
      const auto pairs = paired_values(reports, key, area, es_rule);
      const std::size_t n = pairs.ug.size();
      SummaryCell summary;
      summary.n = n;
      if (n > 0) {
        std::vector<double> losses;
        for (const auto& r : reports) {
          if (!r.labeled || !r.proposed_areas.count(area)) continue;
          if (auto it = r.losses.find({key, area}); it != r.losses.end()) losses.push_back(to_double(it->second.loss));
        }
        summary.summary = stats::summarize_losses(losses);
        for (std::size_t i = 0; i < n; ++i) {
          summary.mean_ug += pairs.ug[i];
          summary.mean_es += pairs.es[i];
        }
        summary.mean_ug /= static_cast<double>(n);
        summary.mean_es /= static_cast<double>(n);
        if (summary.mean_ug != 0) summary.relative_loss = (summary.mean_ug - summary.mean_es) / summary.mean_ug;
      }
      corpus.loss_summaries.emplace(LossKey{key, area}, std::move(summary));
      corpus.t_tests.emplace(LossKey{key, area},
                             stat_cell(n, [&] { return stats::paired_t_test(pairs.ug, pairs.es); }));
    }
  }

  const std::vector<RuleId> roles = {RuleId::Greedy, es_rule};
  for (const auto role : roles) {
    std::vector<RankedSelection> ranked;
    for (const auto& r : reports) {
      const auto* o = r.outcome_for(role);
      if (!o || r.popularity_ranking.empty()) continue;
      ranked.push_back({r.popularity_ranking, o->winner_set()});
    }
    if (!ranked.empty()) corpus.selection_rates.emplace(role, top_n_selection_rate(ranked, config.top_n));

    const MetricKey cost_share{Level::Outcome, Calc::Share, Unit::Cost, Scope::Impact};
    const MetricKey pop_share{Level::Outcome, Calc::Share, Unit::Popularity, Scope::Impact};
    for (const auto area : kNamedAreas) {
      std::vector<double> x, y;
      for (const auto& r : reports) {
        if (!r.labeled || !r.proposed_areas.count(area)) continue;
        const auto* a = r.cell(cost_share, area, role);
        const auto* b = r.cell(pop_share, area, role);
        if (!a || !b || !a->defined || !b->defined) continue;
        x.push_back(a->as_double());
        y.push_back(b->as_double());
      }
      corpus.pearson.emplace(std::make_pair(area, role), stat_cell(x.size(), [&] { return stats::pearson(x, y); }));
    }

    ConjointCell cell;
    cell.rule = role;
    try {
      const auto data = build_conjoint_dataset(reports, config.conjoint_combos, role);
      cell.predictor_names = data.predictor_names;
      cell.n = data.indicators.size();
      cell.fit = stats::ols_fit(data.indicators, data.utilization);
    } catch (const Error& e) {
      cell.error = e.code();
    }
    corpus.conjoint.push_back(std::move(cell));

    for (const auto b : kNamedBeneficiaries) {
      BeneficiaryAggregate agg;
      for (const auto& r : reports) {
        const auto* o = r.outcome_for(role);
        if (!o || !r.labeled) continue;
        const auto winners = o->winner_set();
        for (const auto& p : r.projects) {
          if (!p.beneficiaries.count(b)) continue;
          ++agg.proposed;
          if (winners.count(p.id)) ++agg.won;
        }
      }
      corpus.beneficiaries.emplace(std::make_pair(b, role), agg);
    }
  }
  return corpus;
}

CorpusRun run_instances(const fs::path& directory, const AnalysisConfig& config) {
  const auto files = discover_pb_files(directory);
  std::vector<std::optional<InstanceReport>> reports(files.size());
  std::vector<std::optional<FileError>> errors(files.size());

  AnalysisConfig local = config;
  local.keep_ballot_cells = false;

  auto id_for = [&](const fs::path& path) {
    auto rel = path.lexically_relative(directory);
    rel.replace_extension();
    return rel.generic_string();
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const auto id = id_for(files[i]);
      try {
        reports[i] = run_instance(load_instance(files[i], local.parse_mode), local, id);
      } catch (const Error& e) {
        errors[i] = FileError{id, e.code(), e.what()};
      } catch (const std::exception& e) {
        errors[i] = FileError{id, ErrorCode::IoError, e.what()};
      }
    }
  };

  unsigned jobs = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(files.size(), 1)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  CorpusRun run;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (reports[i]) run.reports.push_back(std::move(*reports[i]));
    if (errors[i]) run.errors.push_back(std::move(*errors[i]));
  }
  return run;
}

CorpusReport run_corpus(const fs::path& directory, const AnalysisConfig& config) {
  auto run = run_instances(directory, config);
  if (run.reports.empty()) throw Error(ErrorCode::EmptyCorpus, "no analysable .pb files under " + directory.string());
  return aggregate_reports(std::move(run.reports), config, std::move(run.errors));
}

}  // namespace pbimpact
