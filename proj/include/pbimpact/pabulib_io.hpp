#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pbimpact/election.hpp"
#include "pbimpact/errors.hpp"

namespace pbimpact {

/// Ordered column -> value pairs of one data row.
using PbRow = std::vector<std::pair<std::string, std::string>>;

/// Section-level view of a `.pb` file before any validation. Unknown columns
/// are kept verbatim.
struct RawPbFile {
  Meta meta;
  std::vector<PbRow> project_rows;
  std::vector<PbRow> vote_rows;
  std::string source_name;

  std::optional<std::string> meta_value(std::string_view key) const;
};

enum class ParseMode { Strict, Lenient };

/// Splits text into META/PROJECTS/VOTES sections. Accepts LF and CRLF.
/// Throws MissingSection, MalformedRow.
RawPbFile parse_raw(std::string_view text, std::string source_name = {});

/// Builds a validated Instance from raw sections.
Instance build_instance(const RawPbFile& raw, ParseMode mode);

/// parse_raw followed by build_instance.
Instance parse_instance(std::string_view text, ParseMode mode = ParseMode::Strict,
                        std::string source_name = {});

/// Reads and parses one file. Throws IoError when the file cannot be read.
Instance load_instance(const std::filesystem::path& path, ParseMode mode = ParseMode::Strict);

/// Canonical `.pb` rendering; parse_instance(serialize_instance(x)) == x.
std::string serialize_instance(const Instance& instance);

struct ErrorRecord {
  ErrorCode code;
  std::string message;
};

struct CorpusEntry {
  std::filesystem::path path;
  std::variant<Instance, ErrorRecord> result;

  bool ok() const { return std::holds_alternative<Instance>(result); }
};

/// All `*.pb` files below `directory`, recursively, in lexicographic path
/// order. Throws DirectoryUnreadable.
std::vector<std::filesystem::path> discover_pb_files(const std::filesystem::path& directory);

/// Parses every discovered file; per-file failures become ErrorRecords.
std::vector<CorpusEntry> scan_corpus(const std::filesystem::path& directory,
                                     ParseMode mode = ParseMode::Strict);

}  // namespace pbimpact
