#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace semtype {

// One raw device recording: (epoch second, value) points sorted ascending,
// duplicate timestamps already averaged away at parse time.
struct RawSeries {
  std::string device_id;
  std::string label_name;
  std::vector<std::pair<std::int64_t, double>> points;
};

// Hourly grid with possible holes. NaN marks a missing slot; start_hour is
// the epoch-hour index of values[0].
struct HourlySeries {
  std::string device_id;
  std::string label_name;
  std::int64_t start_hour = 0;
  Eigen::VectorXd values;
};

// Gap-free hourly series, the unit the feature modules operate on.
struct RegularSeries {
  std::string device_id;
  int label_id = -1;
  std::int64_t start_hour = 0;
  Eigen::VectorXd values;
};

// Bijection between label names and contiguous ids 0..K-1, assigned in
// lexicographic name order so runs are reproducible.
class LabelTable {
public:
  LabelTable() = default;
  explicit LabelTable(std::vector<std::string> sorted_names);

  int id_of(const std::string& name) const;          // -1 if unknown
  const std::string& name_of(int id) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  // Builds the table from an unordered bag of names (duplicates fine).
  static LabelTable from_names(const std::vector<std::string>& names);

private:
  std::vector<std::string> names_;
  std::map<std::string, int> lookup_;
};

}  // namespace semtype
