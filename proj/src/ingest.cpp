#include "semtype/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <regex>
#include <sstream>

#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/parallel.hpp"
#include "semtype/sha256.hpp"

namespace semtype {

LabelTable::LabelTable(std::vector<std::string> sorted_names) : names_(std::move(sorted_names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) lookup_[names_[i]] = static_cast<int>(i);
}

int LabelTable::id_of(const std::string& name) const {
  const auto it = lookup_.find(name);
  return it == lookup_.end() ? -1 : it->second;
}

const std::string& LabelTable::name_of(int id) const {
  if (id < 0 || id >= size()) raise(Err::LabelOutOfRange, "label id out of range");
  return names_[static_cast<std::size_t>(id)];
}

LabelTable LabelTable::from_names(const std::vector<std::string>& names) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return LabelTable(std::move(sorted));
}

FormatSpec FormatSpec::by_index(int time_idx, int value_idx, bool header) {
  FormatSpec s;
  s.time_column = "#" + std::to_string(time_idx);
  s.value_column = "#" + std::to_string(value_idx);
  s.has_header = header;
  return s;
}

namespace {

// "#3" -> column index 3; otherwise resolved against the header row.
std::optional<int> fixed_index(const std::string& col) {
  if (col.size() > 1 && col[0] == '#') {
    if (auto v = parse_int(col.substr(1)); v && *v >= 0) return static_cast<int>(*v);
  }
  return std::nullopt;
}

int resolve_column(const std::string& col, const std::vector<std::string>& header) {
  if (auto idx = fixed_index(col)) return *idx;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == col) return static_cast<int>(i);
  }
  raise(Err::MalformedHeader, "column '" + col + "' not found in header");
}

bool civil_to_epoch(int y, int m, int d, int hh, int mm, int ss, std::int64_t& out) {
  if (m < 1 || m > 12 || d < 1 || d > 31 || hh > 23 || mm > 59 || ss > 60) return false;
  // Days-from-civil (Howard Hinnant's algorithm), UTC only.
  const int yy = y - (m <= 2);
  const std::int64_t era = (yy >= 0 ? yy : yy - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(yy - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const std::int64_t days = era * 146097 + static_cast<std::int64_t>(doe) - 719468;
  out = days * 86400 + hh * 3600 + mm * 60 + ss;
  return true;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) return std::nullopt;
  if (auto v = parse_int(t)) return *v;  // integer epoch seconds
  int y, mo, d, hh, mm;
  double sec;
  char sep;
  if (std::sscanf(t.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &hh, &mm, &sec) == 7 &&
      (sep == 'T' || sep == ' ')) {
    std::int64_t epoch;
    if (civil_to_epoch(y, mo, d, hh, mm, static_cast<int>(sec), epoch)) return epoch;
  }
  return std::nullopt;
}

RawSeries parse_series(const std::string& file_bytes, const FormatSpec& spec, ParseStats* stats) {
  std::istringstream in(file_bytes);
  std::string line;
  int time_idx = -1;
  int value_idx = -1;

  if (spec.has_header) {
    if (!std::getline(in, line)) raise(Err::EmptyFile, "no rows");
    const auto header = split_csv_line(line);
    time_idx = resolve_column(spec.time_column, header);
    value_idx = resolve_column(spec.value_column, header);
  } else {
    const auto t = fixed_index(spec.time_column);
    const auto v = fixed_index(spec.value_column);
    if (!t || !v) raise(Err::MalformedHeader, "headerless input needs #index columns");
    time_idx = *t;
    value_idx = *v;
  }

  ParseStats local;
  std::map<std::int64_t, std::pair<double, std::size_t>> buckets;  // t -> (sum, count)
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++local.rows_seen;
    const auto cols = split_csv_line(line);
    const int needed = std::max(time_idx, value_idx);
    if (static_cast<int>(cols.size()) <= needed) {
      ++local.rows_skipped;
      continue;
    }
    const auto ts = parse_timestamp(cols[static_cast<std::size_t>(time_idx)]);
    const auto val = parse_double(cols[static_cast<std::size_t>(value_idx)]);
    if (!ts || !val || !std::isfinite(*val)) {
      ++local.rows_skipped;
      continue;
    }
    auto [it, inserted] = buckets.try_emplace(*ts, std::pair<double, std::size_t>{0.0, 0});
    if (!inserted) ++local.duplicates_merged;
    it->second.first += *val;
    it->second.second += 1;
  }
  if (buckets.empty()) raise(Err::EmptyFile, "no valid rows");

  RawSeries out;
  out.points.reserve(buckets.size());
  for (const auto& [t, agg] : buckets) {
    out.points.emplace_back(t, agg.first / static_cast<double>(agg.second));
  }
  if (stats) *stats = local;
  return out;
}

bool is_missing(double v) { return std::isnan(v); }

HourlySeries resample_hourly(const RawSeries& raw) {
  if (raw.points.empty()) raise(Err::EmptyFile, "raw series has no points");
  const auto hour_of = [](std::int64_t t) {
    // Left-closed bucket [h*3600, (h+1)*3600), correct for negative epochs too.
    std::int64_t h = t / 3600;
    if (t < 0 && t % 3600 != 0) --h;
    return h;
  };
  const std::int64_t first = hour_of(raw.points.front().first);
  const std::int64_t last = hour_of(raw.points.back().first);
  const std::size_t n = static_cast<std::size_t>(last - first + 1);

  std::vector<double> sums(n, 0.0);
  std::vector<std::size_t> counts(n, 0);
  for (const auto& [t, v] : raw.points) {
    const std::size_t slot = static_cast<std::size_t>(hour_of(t) - first);
    sums[slot] += v;
    counts[slot] += 1;
  }

  HourlySeries out;
  out.device_id = raw.device_id;
  out.label_name = raw.label_name;
  out.start_hour = first;
  out.values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.values[static_cast<Eigen::Index>(i)] =
        counts[i] ? sums[i] / static_cast<double>(counts[i]) : std::nan("");
  }
  return out;
}

RegularSeries interpolate_gaps(const HourlySeries& slots) {
  const Eigen::Index n = slots.values.size();
  std::vector<Eigen::Index> known;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_missing(slots.values[i])) known.push_back(i);
  }
  if (known.empty()) raise(Err::AllMissing, "every hourly slot is missing");

  RegularSeries out;
  out.device_id = slots.device_id;
  out.start_hour = slots.start_hour;
  out.values = slots.values;

  // Edge extension.
  for (Eigen::Index i = 0; i < known.front(); ++i) out.values[i] = slots.values[known.front()];
  for (Eigen::Index i = known.back() + 1; i < n; ++i) out.values[i] = slots.values[known.back()];
  // Interior gaps: straight line between neighbouring known slots.
  for (std::size_t g = 0; g + 1 < known.size(); ++g) {
    const Eigen::Index i = known[g];
    const Eigen::Index j = known[g + 1];
    if (j == i + 1) continue;
    const double a = slots.values[i];
    const double b = slots.values[j];
    for (Eigen::Index k = i + 1; k < j; ++k) {
      out.values[k] = a + (b - a) * static_cast<double>(k - i) / static_cast<double>(j - i);
    }
  }
  return out;
}

LabelRule LabelRule::from_sidecar(const std::filesystem::path& sidecar_csv) {
  auto table = std::make_shared<std::map<std::string, std::string>>();
  std::istringstream in(read_file(sidecar_csv));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() < 2) continue;
    const std::string key = trim(cols[0]);
    const std::string val = trim(cols[1]);
    if (first && key == "filename" && val == "label") {
      first = false;
      continue;  // header row
    }
    first = false;
    (*table)[key] = val;
  }
  LabelRule rule;
  rule.excluded_ = sidecar_csv.filename().string();
  rule.fn_ = [table](const std::string& filename) -> std::optional<std::string> {
    const auto it = table->find(filename);
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
  return rule;
}

LabelRule LabelRule::from_regex(const std::string& pattern) {
  auto re = std::make_shared<std::regex>(pattern);
  LabelRule rule;
  rule.fn_ = [re](const std::string& filename) -> std::optional<std::string> {
    std::smatch m;
    if (std::regex_search(filename, m, *re) && m.size() >= 2) return m[1].str();
    return std::nullopt;
  };
  return rule;
}

std::optional<std::string> LabelRule::label_for(const std::string& filename) const {
  return fn_(filename);
}

Corpus load_corpus(const std::filesystem::path& dir, const FormatSpec& spec, const LabelRule& rule,
                   int jobs) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv" &&
        !rule.excludes(entry.path().filename().string())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) raise(Err::NoFiles, "no .csv files under " + dir.string());

  struct Slot {
    std::optional<RegularSeries> series;
    std::string label;
    std::string error;
  };
  std::vector<Slot> slots(files.size());

  parallel_for(files.size(), jobs, [&](std::size_t i) {
    const std::string fname = files[i].filename().string();
    Slot& slot = slots[i];
    const auto label = rule.label_for(fname);
    if (!label) {
      slot.error = fname + ": no label";
      return;
    }
    try {
      RawSeries raw = parse_series(read_file(files[i]), spec);
      raw.device_id = fname;
      RegularSeries reg = interpolate_gaps(resample_hourly(raw));
      reg.device_id = fname;
      slot.series = std::move(reg);
      slot.label = *label;
    } catch (const std::exception& e) {
      slot.error = fname + ": " + e.what();
    }
  });

  Corpus corpus;
  corpus.files_seen = files.size();
  std::vector<std::string> label_names;
  for (const auto& slot : slots) {
    if (slot.series) label_names.push_back(slot.label);
  }
  if (label_names.empty()) raise(Err::NoFiles, "every file under " + dir.string() + " failed");
  corpus.labels = LabelTable::from_names(label_names);
  for (auto& slot : slots) {
    if (slot.series) {
      slot.series->label_id = corpus.labels.id_of(slot.label);
      corpus.series.push_back(std::move(*slot.series));
    } else {
      ++corpus.files_skipped;
      corpus.skip_log.push_back(slot.error);
    }
  }
  return corpus;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir,
                                         const std::filesystem::path& manifest) {
  std::vector<std::string> problems;
  std::istringstream in(read_file(manifest));
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto space = t.find_first_of(" \t");
    if (space == std::string::npos) {
      problems.push_back("malformed manifest line: " + t);
      continue;
    }
    const std::string digest = t.substr(0, space);
    const std::string fname = trim(t.substr(space));
    const std::filesystem::path p = dir / fname;
    if (!std::filesystem::exists(p)) {
      problems.push_back(fname + ": missing");
      continue;
    }
    if (sha256_hex(read_file(p)) != digest) problems.push_back(fname + ": checksum mismatch");
  }
  return problems;
}

}  // namespace semtype
