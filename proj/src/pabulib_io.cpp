#include "pbimpact/pabulib_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

namespace pbimpact {

namespace fs = std::filesystem;

namespace {

enum class Section { None, Meta, Projects, Votes };

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Splits one line on ';', honouring double-quoted fields with "" escapes.
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && trim(current).empty()) {
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ';') {
      fields.push_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current += c;
    }
  }
  if (quoted)
    throw Error(ErrorCode::MalformedRow, "unterminated quote on line " + std::to_string(line_no));
  fields.push_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

std::vector<std::string> split_list(std::string_view field) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= field.size()) {
    const auto comma = field.find(',', start);
    const auto end = comma == std::string_view::npos ? field.size() : comma;
    const auto item = trim(field.substr(start, end - start));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

const std::string* find_field(const PbRow& row, std::string_view column) {
  for (const auto& [k, v] : row)
    if (k == column) return &v;
  return nullptr;
}

std::string quote_if_needed(std::string_view value) {
  const bool needs = value.find_first_of(";\"") != std::string_view::npos ||
                     (!value.empty() && (std::isspace(static_cast<unsigned char>(value.front())) ||
                                         std::isspace(static_cast<unsigned char>(value.back()))));
  if (!needs) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

template <typename Range, typename Fn>
std::string join(const Range& range, Fn&& render) {
  std::string out;
  bool first = true;
  for (const auto& item : range) {
    if (!first) out += ',';
    out += render(item);
    first = false;
  }
  return out;
}

}  // namespace

std::optional<std::string> RawPbFile::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

RawPbFile parse_raw(std::string_view text, std::string source_name) {
  if (trim(text).empty()) throw Error(ErrorCode::EmptyInput, "empty input " + source_name);

  RawPbFile raw;
  raw.source_name = std::move(source_name);
  Section section = Section::None;
  std::vector<std::string> header;
  bool expecting_header = false;
  bool seen_meta = false, seen_projects = false, seen_votes = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (trim(line).empty()) {
      if (eol == text.size()) break;
      continue;
    }

    const auto tag = upper(trim(line));
    if (tag == "META" || tag == "PROJECTS" || tag == "VOTES") {
      section = tag == "META" ? Section::Meta : tag == "PROJECTS" ? Section::Projects : Section::Votes;
      bool& seen = section == Section::Meta ? seen_meta : section == Section::Projects ? seen_projects : seen_votes;
      if (seen) throw Error(ErrorCode::MalformedRow, "section " + tag + " repeated on line " + std::to_string(line_no));
      seen = true;
      expecting_header = true;
      continue;
    }
    if (section == Section::None)
      throw Error(ErrorCode::MissingSection, "data before the first section header on line " + std::to_string(line_no));

    auto fields = split_fields(line, line_no);
    if (expecting_header) {
      header = std::move(fields);
      expecting_header = false;
      continue;
    }
    while (fields.size() > header.size() && fields.back().empty()) fields.pop_back();
    if (fields.size() > header.size())
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + " has " +
                                               std::to_string(fields.size()) + " fields, header has " +
                                               std::to_string(header.size()));
    fields.resize(header.size());

    if (section == Section::Meta) {
      if (fields.size() < 2)
        throw Error(ErrorCode::MalformedRow, "META row on line " + std::to_string(line_no) + " needs key and value");
      raw.meta.emplace_back(fields[0], fields[1]);
    } else {
      PbRow row;
      row.reserve(header.size());
      for (std::size_t i = 0; i < header.size(); ++i) row.emplace_back(header[i], std::move(fields[i]));
      (section == Section::Projects ? raw.project_rows : raw.vote_rows).push_back(std::move(row));
    }
    if (eol == text.size()) break;
  }

  if (!seen_meta) throw Error(ErrorCode::MissingSection, "no META section");
  if (!seen_projects) throw Error(ErrorCode::MissingSection, "no PROJECTS section");
  if (!seen_votes) throw Error(ErrorCode::MissingSection, "no VOTES section");
  return raw;
}

Instance build_instance(const RawPbFile& raw, ParseMode mode) {
  const bool strict = mode == ParseMode::Strict;
  std::vector<std::string> warnings;
  auto warn = [&](std::string message) { warnings.push_back(std::move(message)); };

  const auto budget_text = raw.meta_value("budget");
  if (!budget_text) throw Error(ErrorCode::MissingKey, "META lacks 'budget'");
  const auto vote_type_text = raw.meta_value("vote_type");
  if (!vote_type_text) throw Error(ErrorCode::MissingKey, "META lacks 'vote_type'");
  for (const char* key : {"num_projects", "num_votes"}) {
    if (raw.meta_value(key)) continue;
    if (strict) throw Error(ErrorCode::MissingKey, std::string("META lacks '") + key + "'");
    warn(std::string("META lacks '") + key + "'");
  }

  if (budget_text->find(',') != std::string::npos)
    throw Error(ErrorCode::UnsupportedLayout, "multi-budget files are not supported: budget '" + *budget_text + "'");
  const Rational budget = parse_decimal(*budget_text);
  if (budget <= 0) throw Error(ErrorCode::MalformedNumber, "budget must be positive: '" + *budget_text + "'");

  const auto vote_type = vote_type_from_string(*vote_type_text);
  if (!vote_type) throw Error(ErrorCode::UnsupportedVoteType, "vote_type '" + *vote_type_text + "'");
  const bool scored = *vote_type == VoteType::Cumulative || *vote_type == VoteType::Scoring;

  // PROJECTS
  std::vector<Project> projects;
  std::vector<std::optional<Rational>> declared_votes;
  std::set<std::string> project_ids;
  for (std::size_t r = 0; r < raw.project_rows.size(); ++r) {
    const auto& row = raw.project_rows[r];
    const auto* id = find_field(row, "project_id");
    const auto* cost = find_field(row, "cost");
    if (!id) throw Error(ErrorCode::MissingColumn, "PROJECTS lacks 'project_id'");
    if (!cost) throw Error(ErrorCode::MissingColumn, "PROJECTS lacks 'cost'");
    if (id->empty()) {
      if (strict) throw Error(ErrorCode::MalformedRow, "project row " + std::to_string(r + 1) + " has no id");
      warn("dropped project row " + std::to_string(r + 1) + " without id");
      continue;
    }

    Project p;
    p.id = *id;
    try {
      p.cost = parse_decimal(*cost);
      if (p.cost <= 0) throw Error(ErrorCode::MalformedNumber, "cost must be positive: '" + *cost + "'");
    } catch (const Error& e) {
      if (strict) throw Error(ErrorCode::MalformedNumber, "project " + p.id + ": " + e.what());
      warn("dropped project " + p.id + ": " + e.what());
      continue;
    }
    if (!project_ids.insert(p.id).second)
      throw Error(ErrorCode::DuplicateProjectId, "duplicate project id " + p.id);

    if (const auto* name = find_field(row, "name")) p.name = *name;
    if (const auto* category = find_field(row, "category")) {
      for (const auto& label : split_list(*category)) {
        if (auto area = area_from_string(label)) {
          p.areas.insert(*area);
        } else {
          p.areas.insert(ImpactArea::Other);
          warn("project " + p.id + ": unknown category '" + label + "' mapped to other");
        }
      }
    }
    if (const auto* target = find_field(row, "target")) {
      for (const auto& label : split_list(*target)) {
        if (auto who = beneficiary_from_string(label)) {
          p.beneficiaries.insert(*who);
        } else {
          p.beneficiaries.insert(Beneficiary::Other);
          warn("project " + p.id + ": unknown target '" + label + "' mapped to other");
        }
      }
    }
    std::optional<Rational> votes;
    if (const auto* v = find_field(row, "votes"); v && !v->empty()) {
      try {
        votes = parse_decimal(*v);
      } catch (const Error&) {
        warn("project " + p.id + ": unreadable votes column '" + *v + "' ignored");
      }
    }
    declared_votes.push_back(votes);
    projects.push_back(std::move(p));
  }

  if (const auto declared = raw.meta_value("num_projects")) {
    const auto matches = [&] {
      try {
        return parse_decimal(*declared) == static_cast<unsigned long>(projects.size());
      } catch (const Error&) {
        return false;
      }
    }();
    if (!matches) {
      const auto msg = "num_projects is '" + *declared + "' but " + std::to_string(projects.size()) + " projects were read";
      if (strict) throw Error(ErrorCode::CountMismatch, msg);
      warn(msg);
    }
  }

  // VOTES
  std::vector<Ballot> ballots;
  std::set<std::string> voter_ids;
  for (std::size_t r = 0; r < raw.vote_rows.size(); ++r) {
    const auto& row = raw.vote_rows[r];
    const auto* voter = find_field(row, "voter_id");
    const auto* vote = find_field(row, "vote");
    if (!voter) throw Error(ErrorCode::MissingColumn, "VOTES lacks 'voter_id'");
    if (!vote) throw Error(ErrorCode::MissingColumn, "VOTES lacks 'vote'");
    if (!voter_ids.insert(*voter).second)
      throw Error(ErrorCode::DuplicateVoterId, "duplicate voter id '" + *voter + "'");

    Ballot b;
    b.voter_id = *voter;
    auto items = split_list(*vote);
    std::vector<Rational> points;
    if (scored) {
      const auto* pts = find_field(row, "points");
      const auto values = pts ? split_list(*pts) : std::vector<std::string>{};
      if (values.size() != items.size())
        throw Error(ErrorCode::MalformedNumber, "voter " + b.voter_id + ": points do not align with vote list");
      for (const auto& v : values) {
        points.push_back(parse_decimal(v));
        if (points.back() < 0) throw Error(ErrorCode::MalformedNumber, "voter " + b.voter_id + ": negative points");
      }
    }

    std::set<std::string> seen;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const auto& pid = items[k];
      if (!project_ids.count(pid)) {
        if (strict)
          throw Error(ErrorCode::UnknownProjectRef, "voter " + b.voter_id + " references unknown project " + pid);
        warn("voter " + b.voter_id + ": dropped reference to unknown project " + pid);
        continue;
      }
      if (!seen.insert(pid).second) {
        if (strict) throw Error(ErrorCode::MalformedRow, "voter " + b.voter_id + " lists project " + pid + " twice");
        warn("voter " + b.voter_id + ": dropped repeated project " + pid);
        continue;
      }
      b.approved.push_back(pid);
      if (scored) b.scores.push_back(points[k]);
    }
    if (b.approved.empty()) {
      if (strict) throw Error(ErrorCode::MalformedRow, "voter " + b.voter_id + " has an empty ballot");
      warn("dropped empty ballot of voter " + b.voter_id);
      continue;
    }
    ballots.push_back(std::move(b));
  }

  if (const auto declared = raw.meta_value("num_votes")) {
    bool matches = false;
    try {
      matches = parse_decimal(*declared) == static_cast<unsigned long>(ballots.size());
    } catch (const Error&) {
    }
    if (!matches)
      warn("num_votes is '" + *declared + "' but " + std::to_string(ballots.size()) + " ballots were kept");
  }

  if (*vote_type != VoteType::Ordinal) {
    std::map<std::string, Rational> tally;
    for (const auto& b : ballots)
      for (std::size_t k = 0; k < b.approved.size(); ++k) tally[b.approved[k]] += scored ? b.scores[k] : Rational(1);
    for (std::size_t i = 0; i < projects.size(); ++i) {
      const Rational counted = tally[projects[i].id];
      if (declared_votes[i] && *declared_votes[i] != counted)
        warn("project " + projects[i].id + ": votes column says " + to_decimal_string(*declared_votes[i]) +
             ", ballots give " + to_decimal_string(counted));
    }
  }

  return Instance(budget, std::move(projects), std::move(ballots), *vote_type, raw.meta, std::move(warnings));
}

Instance parse_instance(std::string_view text, ParseMode mode, std::string source_name) {
  return build_instance(parse_raw(text, std::move(source_name)), mode);
}

Instance load_instance(const fs::path& path, ParseMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return parse_instance(buffer.str(), mode, path.string());
}

std::string serialize_instance(const Instance& instance) {
  std::string out = "META\nkey;value\n";
  for (const auto& [k, v] : instance.meta()) out += quote_if_needed(k) + ";" + quote_if_needed(v) + "\n";

  const bool with_votes = instance.vote_type() != VoteType::Ordinal;
  out += "PROJECTS\n";
  out += with_votes ? "project_id;cost;votes;name;category;target\n" : "project_id;cost;name;category;target\n";
  for (std::size_t i = 0; i < instance.projects().size(); ++i) {
    const auto& p = instance.projects()[i];
    out += quote_if_needed(p.id) + ";" + to_decimal_string(p.cost) + ";";
    if (with_votes) out += to_decimal_string(instance.popularity_vector()[i]) + ";";
    out += quote_if_needed(p.name) + ";";
    out += join(p.areas, [](ImpactArea a) { return std::string(display_name(a)); }) + ";";
    out += join(p.beneficiaries, [](Beneficiary b) { return std::string(display_name(b)); }) + "\n";
  }

  const bool scored = instance.vote_type() == VoteType::Cumulative || instance.vote_type() == VoteType::Scoring;
  out += "VOTES\n";
  out += scored ? "voter_id;vote;points\n" : "voter_id;vote\n";
  for (const auto& b : instance.ballots()) {
    out += quote_if_needed(b.voter_id) + ";" + quote_if_needed(join(b.approved, [](const std::string& s) { return s; }));
    if (scored) out += ";" + join(b.scores, [](const Rational& r) { return to_decimal_string(r); });
    out += "\n";
  }
  return out;
}

std::vector<fs::path> discover_pb_files(const fs::path& directory) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec))
    throw Error(ErrorCode::DirectoryUnreadable, "not a readable directory: " + directory.string());

  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(directory, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorCode::DirectoryUnreadable, directory.string() + ": " + ec.message());
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) throw Error(ErrorCode::DirectoryUnreadable, directory.string() + ": " + ec.message());
    if (it->is_regular_file(ec) && it->path().extension() == ".pb") files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<CorpusEntry> scan_corpus(const fs::path& directory, ParseMode mode) {
  std::vector<CorpusEntry> entries;
  for (const auto& path : discover_pb_files(directory)) {
    try {
      entries.push_back({path, load_instance(path, mode)});
    } catch (const Error& e) {
      entries.push_back({path, ErrorRecord{e.code(), e.what()}});
    }
  }
  return entries;
}

}  // namespace pbimpact
