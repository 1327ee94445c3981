#include "railcause/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <charconv>
#include <map>
#include <unordered_set>

#include "json.hpp"

#include "railcause/csv.hpp"
#include "railcause/rng.hpp"

namespace railcause::corpus {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::size_t require_column(const std::vector<std::string>& header, const std::string& name,
                           std::string_view role) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw DataError("column_map " + std::string(role) + " column '" + name +
                  "' is not present in the CSV header");
}

struct SpecificEntry {
  std::string_view code;
  SpecificCategory category;
};

constexpr std::array<SpecificEntry, 10> kSpecificCodes{{
    {"H306", SpecificCategory::H306_7},
    {"H307", SpecificCategory::H306_7},
    {"T110", SpecificCategory::T110},
    {"H702", SpecificCategory::H702},
    {"T220", SpecificCategory::T220_207},
    {"T207", SpecificCategory::T220_207},
    {"T314", SpecificCategory::T314},
    {"M405", SpecificCategory::M405},
    {"H704", SpecificCategory::H704},
    {"H503", SpecificCategory::H503},
}};

}  // namespace

IngestReport& IngestReport::operator+=(const IngestReport& other) {
  rows_read += other.rows_read;
  accepted += other.accepted;
  missing_cause += other.missing_cause;
  empty_narrative += other.empty_narrative;
  malformed_code += other.malformed_code;
  short_rows += other.short_rows;
  duplicate_ids += other.duplicate_ids;
  return *this;
}

std::string normalize_space(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(ch);
    }
  }
  return out;
}

IngestResult load_records(std::istream& source, const ColumnMap& columns) {
  IngestResult result;
  csv::Reader reader(source);
  std::vector<std::string> header;
  if (!reader.next(header)) return result;

  const std::size_t cause_col = require_column(header, columns.cause, "cause");
  std::vector<std::size_t> narrative_cols;
  if (columns.narratives.empty()) throw DataError("column_map lists no narrative columns");
  for (const auto& n : columns.narratives) {
    narrative_cols.push_back(require_column(header, n, "narrative"));
  }
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> year_col;
  if (!columns.id.empty()) id_col = require_column(header, columns.id, "id");
  if (!columns.year.empty()) year_col = require_column(header, columns.year, "year");

  std::unordered_set<std::string> seen_ids;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;  // blank line
    ++result.report.rows_read;
    auto field = [&](std::size_t col) -> std::string_view {
      return col < row.size() ? std::string_view(row[col]) : std::string_view{};
    };
    if (row.size() < header.size()) ++result.report.short_rows;

    std::string code = trim(field(cause_col));
    std::transform(code.begin(), code.end(), code.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (code.empty()) {
      ++result.report.missing_cause;
      continue;
    }
    if (!is_valid_cause_code(code)) {
      ++result.report.malformed_code;
      continue;
    }
    std::string joined;
    for (std::size_t col : narrative_cols) {
      joined += field(col);
      joined.push_back(' ');
    }
    std::string narrative = normalize_space(joined);
    if (narrative.empty()) {
      ++result.report.empty_narrative;
      continue;
    }

    AccidentRecord rec;
    rec.cause_code = std::move(code);
    rec.narrative = std::move(narrative);
    if (id_col) rec.id = trim(field(*id_col));
    if (year_col) {
      const std::string y = trim(field(*year_col));
      int value = 0;
      auto [ptr, ec] = std::from_chars(y.data(), y.data() + y.size(), value);
      rec.year = (ec == std::errc{} && ptr == y.data() + y.size()) ? value : 0;
    }
    if (!rec.id.empty() && !seen_ids.insert(rec.id).second) ++result.report.duplicate_ids;
    result.records.push_back(std::move(rec));
    ++result.report.accepted;
  }
  return result;
}

bool is_valid_cause_code(std::string_view code) {
  if (code.size() < 2) return false;
  if (std::string_view("EHMST").find(code[0]) == std::string_view::npos) return false;
  return std::all_of(code.begin() + 1, code.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

InvalidCauseCode::InvalidCauseCode(std::string_view code)
    : DataError("invalid cause code '" + std::string(code) + "'") {}

GeneralCause general_label(std::string_view cause_code) {
  if (cause_code.empty()) throw InvalidCauseCode(cause_code);
  switch (cause_code[0]) {
    case 'E': return GeneralCause::E;
    case 'H': return GeneralCause::H;
    case 'M': return GeneralCause::M;
    case 'S': return GeneralCause::S;
    case 'T': return GeneralCause::T;
    default: throw InvalidCauseCode(cause_code);
  }
}

std::optional<SpecificCategory> specific_label(std::string_view cause_code) {
  general_label(cause_code);
  for (const auto& entry : kSpecificCodes) {
    if (entry.code == cause_code) return entry.category;
  }
  return std::nullopt;
}

std::string_view name(GeneralCause cause) {
  static constexpr std::array<std::string_view, 5> names{"E", "H", "M", "S", "T"};
  return names[static_cast<std::size_t>(cause)];
}

std::string_view name(SpecificCategory category) {
  static constexpr std::array<std::string_view, 8> names{
      "H306-7", "T110", "H702", "T220-207", "T314", "M405", "H704", "H503"};
  return names[static_cast<std::size_t>(category)];
}

LabelScheme parse_scheme(std::string_view text) {
  if (text == "general") return LabelScheme::general;
  if (text == "specific") return LabelScheme::specific;
  throw ConfigError("unknown label scheme '" + std::string(text) +
                    "' (expected general or specific)");
}

std::string_view name(LabelScheme scheme) {
  return scheme == LabelScheme::general ? "general" : "specific";
}

const std::vector<std::string>& class_names(LabelScheme scheme) {
  static const std::vector<std::string> general{"E", "H", "M", "S", "T"};
  static const std::vector<std::string> specific{"H306-7", "T110", "H702", "T220-207",
                                                 "T314",   "M405", "H704", "H503"};
  return scheme == LabelScheme::general ? general : specific;
}

std::optional<std::size_t> label_index(LabelScheme scheme, std::string_view cause_code) {
  if (scheme == LabelScheme::general) {
    return static_cast<std::size_t>(general_label(cause_code));
  }
  auto cat = specific_label(cause_code);
  if (!cat) return std::nullopt;
  return static_cast<std::size_t>(*cat);
}

std::vector<LabeledRecord> apply_scheme(std::span<const AccidentRecord> records,
                                        LabelScheme scheme) {
  std::vector<LabeledRecord> out;
  for (const auto& rec : records) {
    if (auto label = label_index(scheme, rec.cause_code)) out.push_back({rec, *label});
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_indices(
    std::span<const std::size_t> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie in (0, 1)");
  }
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  for (auto& [label, members] : by_class) {
    const std::size_t n = members.size();
    if (n < 2) {
      throw DataError("class " + std::to_string(label) + " has " + std::to_string(n) +
                      " record(s); at least 2 are needed to split");
    }
    std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    Rng rng(mix_seed(seed, label));
    rng.shuffle(members);
    second.insert(second.end(), members.begin(), members.begin() + n_test);
    first.insert(first.end(), members.begin() + n_test, members.end());
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {std::move(first), std::move(second)};
}

DatasetSplit stratified_split(std::span<const LabeledRecord> records, double test_fraction,
                              std::uint64_t seed) {
  std::vector<std::size_t> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  auto [train_idx, test_idx] = stratified_indices(labels, test_fraction, seed);
  DatasetSplit split;
  split.seed = seed;
  split.test_fraction = test_fraction;
  for (std::size_t i : train_idx) split.train.push_back(records[i]);
  for (std::size_t i : test_idx) split.test.push_back(records[i]);
  return split;
}

std::vector<std::size_t> label_distribution(std::span<const LabeledRecord> records,
                                            std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& r : records) {
    if (r.label < num_classes) ++counts[r.label];
  }
  return counts;
}

void write_dataset(std::ostream& out, std::span<const AccidentRecord> records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["year"] = r.year;
    j["narrative"] = r.narrative;
    j["cause_code"] = r.cause_code;
    out << j.dump() << '\n';
  }
}

std::vector<AccidentRecord> read_dataset(std::istream& in) {
  std::vector<AccidentRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AccidentRecord r;
      r.id = j.at("id").get<std::string>();
      r.year = j.at("year").get<int>();
      r.narrative = j.at("narrative").get<std::string>();
      r.cause_code = j.at("cause_code").get<std::string>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace railcause::corpus
