#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pbimpact/rational.hpp"

namespace pbimpact {

enum class ImpactArea {
  Education,
  Health,
  Welfare,
  Culture,
  PublicTransit,
  PublicSpace,
  UrbanGreenery,
  EnvironmentalProtection,
  Sport,
  Other,
};

/// The nine named areas, in a fixed reporting order (`Other` excluded).
inline constexpr std::array<ImpactArea, 9> kNamedAreas = {
    ImpactArea::Education,     ImpactArea::Health,      ImpactArea::Welfare,
    ImpactArea::Culture,       ImpactArea::PublicTransit, ImpactArea::PublicSpace,
    ImpactArea::UrbanGreenery, ImpactArea::EnvironmentalProtection, ImpactArea::Sport,
};

enum class Beneficiary {
  FamiliesWithChildren,
  Students,
  DisabledPeople,
  Children,
  Adults,
  Animals,
  Youth,
  Elderly,
  Other,
};

inline constexpr std::array<Beneficiary, 8> kNamedBeneficiaries = {
    Beneficiary::FamiliesWithChildren, Beneficiary::Students, Beneficiary::DisabledPeople,
    Beneficiary::Children,             Beneficiary::Adults,   Beneficiary::Animals,
    Beneficiary::Youth,                Beneficiary::Elderly,
};

enum class VoteType { Approval, Cumulative, Scoring, Ordinal };

/// Canonical snake_case names used in files and reports ("public_transit").
std::string_view to_string(ImpactArea area);
std::string_view to_string(Beneficiary beneficiary);
std::string_view to_string(VoteType type);

/// Human-readable label as written in `.pb` files ("public transit and roads").
std::string_view display_name(ImpactArea area);
std::string_view display_name(Beneficiary beneficiary);

std::optional<ImpactArea> area_from_string(std::string_view name);
std::optional<Beneficiary> beneficiary_from_string(std::string_view name);
std::optional<VoteType> vote_type_from_string(std::string_view name);

using AreaSet = std::set<ImpactArea>;
using BeneficiarySet = std::set<Beneficiary>;

struct Project {
  std::string id;
  Rational cost;
  AreaSet areas;
  BeneficiarySet beneficiaries;
  std::string name;

  bool operator==(const Project&) const = default;
};

struct Ballot {
  std::string voter_id;
  /// Project ids in file order (preference order for ordinal ballots).
  std::vector<std::string> approved;
  /// Points aligned with `approved`; empty for approval and ordinal ballots.
  std::vector<Rational> scores;

  bool operator==(const Ballot&) const = default;
};

/// Ordered key/value pairs of the META section.
using Meta = std::vector<std::pair<std::string, std::string>>;

/// One participatory-budgeting election. Immutable once constructed; the
/// constructor enforces id uniqueness, ballot references and cost positivity.
class Instance {
 public:
  Instance(Rational budget, std::vector<Project> projects, std::vector<Ballot> ballots,
           VoteType vote_type, Meta meta = {}, std::vector<std::string> warnings = {});

  const Rational& budget() const { return budget_; }
  const std::vector<Project>& projects() const { return projects_; }
  const std::vector<Ballot>& ballots() const { return ballots_; }
  VoteType vote_type() const { return vote_type_; }
  const Meta& meta() const { return meta_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::optional<std::string> meta_value(std::string_view key) const;

  std::optional<std::size_t> find_project(std::string_view id) const;
  std::optional<std::size_t> find_voter(std::string_view voter_id) const;
  /// Throws Error(UnknownProjectRef).
  const Project& project(std::string_view id) const;

  /// Per-project popularity in project order. Throws OrdinalUnsupported.
  const std::vector<Rational>& popularity_vector() const;

  /// Approver (voter) indices per project, in ballot order.
  const std::vector<std::vector<std::size_t>>& approvers() const { return approvers_; }

  Rational total_cost() const;
  /// True when at least one project carries a named impact area.
  bool has_area_labels() const;

  /// Copy with a different budget (used for what-if analyses and tests).
  Instance with_budget(Rational budget) const;

  /// Structural equality; warnings are ignored.
  friend bool operator==(const Instance& a, const Instance& b);

 private:
  Rational budget_;
  std::vector<Project> projects_;
  std::vector<Ballot> ballots_;
  VoteType vote_type_;
  Meta meta_;
  std::vector<std::string> warnings_;

  std::unordered_map<std::string, std::size_t> project_index_;
  std::unordered_map<std::string, std::size_t> voter_index_;
  std::vector<std::vector<std::size_t>> approvers_;
  std::vector<Rational> popularity_;
};

/// v_p: approval count, or summed points for cumulative/scoring ballots.
/// Throws OrdinalUnsupported for ordinal instances and UnknownProjectRef.
Rational popularity(const Instance& instance, std::string_view project_id);

struct ProposalRatios {
  ImpactArea area;
  Rational r_cost;
  Rational r_projects;
  Rational r_popularity;
};

/// Throws EmptyInstance when there are no projects. For ordinal instances the
/// popularity ratio is left at zero.
ProposalRatios proposal_ratios(const Instance& instance, ImpactArea area);

enum class QuartileKind { Cost, Popularity };

struct QuartileLabel {
  QuartileKind kind;
  int level;  // 0..3

  std::string_view name() const;
  bool operator==(const QuartileLabel&) const = default;
};

/// Nearest-rank quartile thresholds (index ceil(q*n), 1-based) at q = 1/4, 1/2, 3/4.
std::array<Rational, 3> nearest_rank_quartiles(std::vector<Rational> values);

std::map<std::string, QuartileLabel> assign_quartile_labels(const Instance& instance,
                                                            QuartileKind kind);

}  // namespace pbimpact
