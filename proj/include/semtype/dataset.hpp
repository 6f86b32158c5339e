#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "semtype/ingest.hpp"
#include "semtype/recurrence.hpp"
#include "semtype/stats.hpp"

namespace semtype {

// Row-major feature matrix with aligned integer labels and the class-name
// table they decode through.
struct Dataset {
  Eigen::MatrixXd X;
  std::vector<int> y;
  std::vector<std::string> class_names;
  std::vector<std::string> instance_ids;
  std::string family;  // "df", "cd", "iets8", "iets16", ...

  int num_classes() const { return static_cast<int>(class_names.size()); }
  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
  void validate() const;  // shape and label-range invariants
};

// DF family: one six-statistic row per series.
Dataset df_dataset(const Corpus& corpus, const StationarityParams& params = {});

struct IetsDataset {
  Dataset data;
  std::size_t eligible = 0;  // series long enough for the encoding window
  std::size_t excluded = 0;
};

// IETS family: series shorter than the window are excluded, not padded.
// Encoding runs on up to `jobs` workers, bounding peak memory to one full
// recurrence image per worker.
IetsDataset iets_dataset(const Corpus& corpus, const IetsParams& params, int jobs = 1);

// CD family: cosine similarities of each instance's DF vector to the
// per-label signature vectors. Optional z-scoring of the DF vectors before
// the cosine (off by default; the raw mixed-unit vectors mirror the method
// as described).
Dataset cd_dataset(const Dataset& df, std::uint64_t seed, int samples_per_label = 20,
                   bool standardize = false);

// Feature CSV: header `instance_id,label,f0..f{d-1}`, full float precision.
std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& csv, const std::string& family = "");

}  // namespace semtype
