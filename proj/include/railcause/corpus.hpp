#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "railcause/errors.hpp"

/// Accident report ingestion, cause-code label schemes, and dataset splits.
namespace railcause::corpus {

/// One accident report: assembled narrative plus its coded primary cause.
struct AccidentRecord {
  std::string id;
  int year = 0;
  std::string narrative;
  std::string cause_code;

  bool operator==(const AccidentRecord&) const = default;
};

/// Maps CSV header names onto record fields. `narratives` lists the
/// continuation columns in reading order. An empty `id` or `year` name means
/// the field is not read.
struct ColumnMap {
  std::string id;
  std::string year;
  std::string cause;
  std::vector<std::string> narratives;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t accepted = 0;
  std::size_t missing_cause = 0;
  std::size_t empty_narrative = 0;
  std::size_t malformed_code = 0;
  std::size_t short_rows = 0;
  /// Accepted records whose id was already seen (kept, not deduplicated).
  std::size_t duplicate_ids = 0;

  IngestReport& operator+=(const IngestReport& other);
};

struct IngestResult {
  std::vector<AccidentRecord> records;
  IngestReport report;
};

/// Reads a header row followed by data rows. Throws DataError when a mapped
/// column is missing from the header; bad rows are skipped and counted.
IngestResult load_records(std::istream& source, const ColumnMap& columns);

/// True when `code` matches [EHMST][0-9]+.
bool is_valid_cause_code(std::string_view code);

class InvalidCauseCode : public DataError {
 public:
  explicit InvalidCauseCode(std::string_view code);
};

enum class GeneralCause { E, H, M, S, T };

enum class SpecificCategory { H306_7, T110, H702, T220_207, T314, M405, H704, H503 };

GeneralCause general_label(std::string_view cause_code);
std::optional<SpecificCategory> specific_label(std::string_view cause_code);

std::string_view name(GeneralCause cause);
std::string_view name(SpecificCategory category);

enum class LabelScheme { general, specific };

LabelScheme parse_scheme(std::string_view text);
std::string_view name(LabelScheme scheme);

/// Class names in label-index order: E,H,M,S,T or the eight merged codes.
const std::vector<std::string>& class_names(LabelScheme scheme);

/// Label index of a cause code under `scheme`, or nullopt when the code
/// falls outside the scheme (only possible for the specific scheme).
std::optional<std::size_t> label_index(LabelScheme scheme, std::string_view cause_code);

struct LabeledRecord {
  AccidentRecord record;
  std::size_t label = 0;

  bool operator==(const LabeledRecord&) const = default;
};

/// Labels every record under `scheme`, dropping records outside it.
std::vector<LabeledRecord> apply_scheme(std::span<const AccidentRecord> records,
                                        LabelScheme scheme);

struct DatasetSplit {
  std::vector<LabeledRecord> train;
  std::vector<LabeledRecord> test;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

/// Index-level stratified split. Each class contributes round(f * n_c)
/// items to the second list, clamped so both sides keep at least one.
/// Both lists are returned in ascending index order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_indices(
    std::span<const std::size_t> labels, double test_fraction, std::uint64_t seed);

/// Throws DataError when a class present in `records` has fewer than two
/// members, or when the fraction is outside (0, 1).
DatasetSplit stratified_split(std::span<const LabeledRecord> records, double test_fraction,
                              std::uint64_t seed);

/// Per-class counts in label-index order.
std::vector<std::size_t> label_distribution(std::span<const LabeledRecord> records,
                                            std::size_t num_classes);

/// Dataset file: one JSON object per line, {id, year, narrative, cause_code}.
void write_dataset(std::ostream& out, std::span<const AccidentRecord> records);
std::vector<AccidentRecord> read_dataset(std::istream& in);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_space(std::string_view text);

}  // namespace railcause::corpus
