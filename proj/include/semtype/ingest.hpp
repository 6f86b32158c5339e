#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semtype/series.hpp"

namespace semtype {

// Column layout of an input CSV. Columns may be addressed by header name or
// by 0-based index; name addressing requires a header row. Timestamps are
// either integer epoch seconds or ISO-8601 datetimes (treated as UTC).
struct FormatSpec {
  std::string time_column = "t";
  std::string value_column = "v";
  bool has_header = true;

  static FormatSpec by_index(int time_idx, int value_idx, bool header = false);
};

struct ParseStats {
  std::size_t rows_seen = 0;
  std::size_t rows_skipped = 0;  // unparseable timestamp or value
  std::size_t duplicates_merged = 0;
};

// Parses a CSV byte stream into a RawSeries: bad rows are counted and
// skipped, duplicate timestamps are averaged, points come out sorted.
RawSeries parse_series(const std::string& file_bytes, const FormatSpec& spec,
                       ParseStats* stats = nullptr);

// Epoch-second ISO-8601 parser ("YYYY-MM-DD[T ]HH:MM:SS[.frac][Z]", UTC).
std::optional<std::int64_t> parse_timestamp(const std::string& token);

// Buckets raw points into left-closed hourly slots [h*3600, (h+1)*3600) and
// averages within each slot. Empty slots are NaN.
HourlySeries resample_hourly(const RawSeries& raw);

bool is_missing(double v);

// Fills interior gaps by the straight line between the nearest non-missing
// neighbours; leading/trailing gaps take the nearest value.
RegularSeries interpolate_gaps(const HourlySeries& slots);

// Maps a corpus file to its label string. Either a sidecar CSV
// `filename,label` or a regex whose first capture group on the filename is
// the label.
class LabelRule {
public:
  static LabelRule from_sidecar(const std::filesystem::path& sidecar_csv);
  static LabelRule from_regex(const std::string& pattern);

  // Empty optional when the rule has no answer for this file.
  std::optional<std::string> label_for(const std::string& filename) const;

  // True for the sidecar file itself when it lives inside the corpus
  // directory; such files are not data.
  bool excludes(const std::string& filename) const { return filename == excluded_; }

private:
  std::function<std::optional<std::string>(const std::string&)> fn_;
  std::string excluded_;
};

struct Corpus {
  std::vector<RegularSeries> series;
  LabelTable labels;
  std::size_t files_seen = 0;
  std::size_t files_skipped = 0;
  std::vector<std::string> skip_log;  // one line per skipped file
};

// Loads every *.csv under `dir` (non-recursive, sorted by filename),
// running parse -> resample -> interpolate per file. Per-file failures are
// logged and skipped. File processing may run on `jobs` workers; the result
// is schedule-independent.
Corpus load_corpus(const std::filesystem::path& dir, const FormatSpec& spec,
                   const LabelRule& rule, int jobs = 1);

// Verifies `dir` against a manifest of `sha256  filename` lines. Returns the
// list of mismatched or missing files (empty means verified).
std::vector<std::string> verify_manifest(const std::filesystem::path& dir,
                                         const std::filesystem::path& manifest);

}  // namespace semtype
