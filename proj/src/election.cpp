#include "pbimpact/election.hpp"

#include <algorithm>
#include <cctype>

#include "pbimpact/errors.hpp"

namespace pbimpact {

namespace {

std::string normalize_label(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_' || c == '-') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(uc));
  }
  return out;
}

struct AreaAlias {
  std::string_view label;
  ImpactArea area;
};

constexpr AreaAlias kAreaAliases[] = {
    {"education", ImpactArea::Education},
    {"health", ImpactArea::Health},
    {"healthcare", ImpactArea::Health},
    {"welfare", ImpactArea::Welfare},
    {"social welfare", ImpactArea::Welfare},
    {"culture", ImpactArea::Culture},
    {"public transit and roads", ImpactArea::PublicTransit},
    {"public transit", ImpactArea::PublicTransit},
    {"public transport", ImpactArea::PublicTransit},
    {"transit", ImpactArea::PublicTransit},
    {"roads", ImpactArea::PublicTransit},
    {"public space", ImpactArea::PublicSpace},
    {"urban greenery", ImpactArea::UrbanGreenery},
    {"greenery", ImpactArea::UrbanGreenery},
    {"environmental protection", ImpactArea::EnvironmentalProtection},
    {"environment", ImpactArea::EnvironmentalProtection},
    {"sport", ImpactArea::Sport},
    {"sports", ImpactArea::Sport},
    {"other", ImpactArea::Other},
};

struct BeneficiaryAlias {
  std::string_view label;
  Beneficiary beneficiary;
};

constexpr BeneficiaryAlias kBeneficiaryAliases[] = {
    {"families with children", Beneficiary::FamiliesWithChildren},
    {"families", Beneficiary::FamiliesWithChildren},
    {"students", Beneficiary::Students},
    {"disabled people", Beneficiary::DisabledPeople},
    {"people with disabilities", Beneficiary::DisabledPeople},
    {"disabled", Beneficiary::DisabledPeople},
    {"children", Beneficiary::Children},
    {"adults", Beneficiary::Adults},
    {"animals", Beneficiary::Animals},
    {"youth", Beneficiary::Youth},
    {"elderly", Beneficiary::Elderly},
    {"seniors", Beneficiary::Elderly},
    {"other", Beneficiary::Other},
};

}  // namespace

std::string_view to_string(ImpactArea area) {
  switch (area) {
    case ImpactArea::Education: return "education";
    case ImpactArea::Health: return "health";
    case ImpactArea::Welfare: return "welfare";
    case ImpactArea::Culture: return "culture";
    case ImpactArea::PublicTransit: return "public_transit";
    case ImpactArea::PublicSpace: return "public_space";
    case ImpactArea::UrbanGreenery: return "urban_greenery";
    case ImpactArea::EnvironmentalProtection: return "environmental_protection";
    case ImpactArea::Sport: return "sport";
    case ImpactArea::Other: return "other";
  }
  return "other";
}

std::string_view display_name(ImpactArea area) {
  switch (area) {
    case ImpactArea::PublicTransit: return "public transit and roads";
    case ImpactArea::PublicSpace: return "public space";
    case ImpactArea::UrbanGreenery: return "urban greenery";
    case ImpactArea::EnvironmentalProtection: return "environmental protection";
    default: return to_string(area);
  }
}

std::string_view to_string(Beneficiary beneficiary) {
  switch (beneficiary) {
    case Beneficiary::FamiliesWithChildren: return "families_with_children";
    case Beneficiary::Students: return "students";
    case Beneficiary::DisabledPeople: return "disabled_people";
    case Beneficiary::Children: return "children";
    case Beneficiary::Adults: return "adults";
    case Beneficiary::Animals: return "animals";
    case Beneficiary::Youth: return "youth";
    case Beneficiary::Elderly: return "elderly";
    case Beneficiary::Other: return "other";
  }
  return "other";
}

std::string_view display_name(Beneficiary beneficiary) {
  switch (beneficiary) {
    case Beneficiary::FamiliesWithChildren: return "families with children";
    case Beneficiary::DisabledPeople: return "disabled people";
    default: return to_string(beneficiary);
  }
}

std::string_view to_string(VoteType type) {
  switch (type) {
    case VoteType::Approval: return "approval";
    case VoteType::Cumulative: return "cumulative";
    case VoteType::Scoring: return "scoring";
    case VoteType::Ordinal: return "ordinal";
  }
  return "approval";
}

std::optional<ImpactArea> area_from_string(std::string_view name) {
  const auto label = normalize_label(name);
  for (const auto& alias : kAreaAliases)
    if (alias.label == label) return alias.area;
  return std::nullopt;
}

std::optional<Beneficiary> beneficiary_from_string(std::string_view name) {
  const auto label = normalize_label(name);
  for (const auto& alias : kBeneficiaryAliases)
    if (alias.label == label) return alias.beneficiary;
  return std::nullopt;
}

std::optional<VoteType> vote_type_from_string(std::string_view name) {
  const auto label = normalize_label(name);
  for (auto t : {VoteType::Approval, VoteType::Cumulative, VoteType::Scoring, VoteType::Ordinal})
    if (to_string(t) == label) return t;
  return std::nullopt;
}

Instance::Instance(Rational budget, std::vector<Project> projects, std::vector<Ballot> ballots,
                   VoteType vote_type, Meta meta, std::vector<std::string> warnings)
    : budget_(std::move(budget)),
      projects_(std::move(projects)),
      ballots_(std::move(ballots)),
      vote_type_(vote_type),
      meta_(std::move(meta)),
      warnings_(std::move(warnings)) {
  if (budget_ < 0) throw Error(ErrorCode::InvalidInstance, "negative budget");

  for (std::size_t i = 0; i < projects_.size(); ++i) {
    const auto& p = projects_[i];
    if (p.id.empty()) throw Error(ErrorCode::InvalidInstance, "empty project id");
    if (p.cost <= 0) throw Error(ErrorCode::InvalidInstance, "project " + p.id + " has non-positive cost");
    if (!project_index_.emplace(p.id, i).second)
      throw Error(ErrorCode::DuplicateProjectId, "duplicate project id " + p.id);
  }

  auto set_meta = [this](const std::string& key, std::string value) {
    for (auto& [k, v] : meta_)
      if (k == key) {
        v = std::move(value);
        return;
      }
    meta_.emplace_back(key, std::move(value));
  };
  set_meta("budget", to_decimal_string(budget_));
  set_meta("vote_type", std::string(to_string(vote_type_)));
  set_meta("num_projects", std::to_string(projects_.size()));
  set_meta("num_votes", std::to_string(ballots_.size()));

  approvers_.assign(projects_.size(), {});
  const bool scored = vote_type_ == VoteType::Cumulative || vote_type_ == VoteType::Scoring;
  if (!(vote_type_ == VoteType::Ordinal)) popularity_.assign(projects_.size(), Rational(0));

  for (std::size_t v = 0; v < ballots_.size(); ++v) {
    const auto& b = ballots_[v];
    if (!voter_index_.emplace(b.voter_id, v).second)
      throw Error(ErrorCode::DuplicateVoterId, "duplicate voter id " + b.voter_id);
    if (b.approved.empty())
      throw Error(ErrorCode::InvalidInstance, "voter " + b.voter_id + " has an empty ballot");
    if (scored && b.scores.size() != b.approved.size())
      throw Error(ErrorCode::InvalidInstance, "voter " + b.voter_id + " has misaligned points");
    if (!scored && !b.scores.empty())
      throw Error(ErrorCode::InvalidInstance, "voter " + b.voter_id + " carries points on a " +
                                                  std::string(to_string(vote_type_)) + " ballot");
    std::set<std::string_view> seen;
    for (std::size_t k = 0; k < b.approved.size(); ++k) {
      const auto& pid = b.approved[k];
      auto it = project_index_.find(pid);
      if (it == project_index_.end())
        throw Error(ErrorCode::UnknownProjectRef, "voter " + b.voter_id + " references unknown project " + pid);
      if (!seen.insert(pid).second)
        throw Error(ErrorCode::InvalidInstance, "voter " + b.voter_id + " lists project " + pid + " twice");
      approvers_[it->second].push_back(v);
      if (scored) {
        if (b.scores[k] < 0)
          throw Error(ErrorCode::InvalidInstance, "voter " + b.voter_id + " has a negative score");
        popularity_[it->second] += b.scores[k];
      } else if (vote_type_ == VoteType::Approval) {
        popularity_[it->second] += 1;
      }
    }
  }
}

std::optional<std::string> Instance::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta_)
    if (k == key) return v;
  return std::nullopt;
}

std::optional<std::size_t> Instance::find_project(std::string_view id) const {
  auto it = project_index_.find(std::string(id));
  if (it == project_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::find_voter(std::string_view voter_id) const {
  auto it = voter_index_.find(std::string(voter_id));
  if (it == voter_index_.end()) return std::nullopt;
  return it->second;
}

const Project& Instance::project(std::string_view id) const {
  const auto idx = find_project(id);
  if (!idx) throw Error(ErrorCode::UnknownProjectRef, "unknown project " + std::string(id));
  return projects_[*idx];
}

const std::vector<Rational>& Instance::popularity_vector() const {
  if (vote_type_ == VoteType::Ordinal)
    throw Error(ErrorCode::OrdinalUnsupported, "popularity is not defined for ordinal ballots");
  return popularity_;
}

Rational Instance::total_cost() const {
  Rational sum = 0;
  for (const auto& p : projects_) sum += p.cost;
  return sum;
}

bool Instance::has_area_labels() const {
  return std::any_of(projects_.begin(), projects_.end(), [](const Project& p) {
    return std::any_of(p.areas.begin(), p.areas.end(), [](ImpactArea a) { return a != ImpactArea::Other; });
  });
}

Instance Instance::with_budget(Rational budget) const {
  return Instance(std::move(budget), projects_, ballots_, vote_type_, meta_, warnings_);
}

bool operator==(const Instance& a, const Instance& b) {
  return a.budget_ == b.budget_ && a.vote_type_ == b.vote_type_ && a.projects_ == b.projects_ &&
         a.ballots_ == b.ballots_ && a.meta_ == b.meta_;
}

Rational popularity(const Instance& instance, std::string_view project_id) {
  const auto idx = instance.find_project(project_id);
  if (!idx) throw Error(ErrorCode::UnknownProjectRef, "unknown project " + std::string(project_id));
  return instance.popularity_vector()[*idx];
}

ProposalRatios proposal_ratios(const Instance& instance, ImpactArea area) {
  const auto& projects = instance.projects();
  if (projects.empty()) throw Error(ErrorCode::EmptyInstance, "instance has no projects");

  const bool has_popularity = instance.vote_type() != VoteType::Ordinal;
  Rational cost_all = 0, cost_area = 0, votes_all = 0, votes_area = 0;
  std::size_t count_area = 0;
  for (std::size_t i = 0; i < projects.size(); ++i) {
    const bool in_area = projects[i].areas.count(area) > 0;
    cost_all += projects[i].cost;
    if (in_area) {
      cost_area += projects[i].cost;
      ++count_area;
    }
    if (has_popularity) {
      const auto& v = instance.popularity_vector()[i];
      votes_all += v;
      if (in_area) votes_area += v;
    }
  }

  ProposalRatios r{area, cost_area / cost_all, Rational(count_area, projects.size()), 0};
  r.r_projects.canonicalize();
  if (votes_all != 0) r.r_popularity = votes_area / votes_all;
  return r;
}

std::string_view QuartileLabel::name() const {
  static constexpr std::string_view cost_names[] = {"very cheap", "cheap", "expensive", "very expensive"};
  static constexpr std::string_view popularity_names[] = {"unpopular", "quite popular", "popular",
                                                          "very popular"};
  return kind == QuartileKind::Cost ? cost_names[level] : popularity_names[level];
}

std::array<Rational, 3> nearest_rank_quartiles(std::vector<Rational> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInstance, "no values to rank");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  auto at = [&](std::size_t quarters) {
    // ceil(quarters * n / 4), 1-based
    const std::size_t rank = (quarters * n + 3) / 4;
    return values[std::max<std::size_t>(rank, 1) - 1];
  };
  return {at(1), at(2), at(3)};
}

std::map<std::string, QuartileLabel> assign_quartile_labels(const Instance& instance, QuartileKind kind) {
  const auto& projects = instance.projects();
  if (projects.empty()) throw Error(ErrorCode::EmptyInstance, "instance has no projects");

  std::vector<Rational> values;
  values.reserve(projects.size());
  if (kind == QuartileKind::Cost) {
    for (const auto& p : projects) values.push_back(p.cost);
  } else {
    values = instance.popularity_vector();
  }

  const auto q = nearest_rank_quartiles(values);
  std::map<std::string, QuartileLabel> labels;
  for (std::size_t i = 0; i < projects.size(); ++i) {
    const auto& v = values[i];
    const int level = v <= q[0] ? 0 : v <= q[1] ? 1 : v <= q[2] ? 2 : 3;
    labels.emplace(projects[i].id, QuartileLabel{kind, level});
  }
  return labels;
}

}  // namespace pbimpact
