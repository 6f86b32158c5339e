#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semtype/classify.hpp"
#include "semtype/dataset.hpp"
#include "semtype/ingest.hpp"
#include "semtype/recurrence.hpp"

namespace semtype {

// A study run: which corpus, which feature families and algorithms, which
// train fractions, how many repeats, and the master seed everything derives
// from.
struct RunConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path label_sidecar;  // used when label_regex is empty
  std::string label_regex;
  std::string time_column = "t";
  std::string value_column = "v";

  std::vector<std::string> families;  // df | cd | iets8 | iets16 | iets32 | iets48
  std::vector<Algorithm> algorithms;
  std::vector<double> fractions = {0.5, 0.2, 0.4, 0.7, 0.8};
  int repeats = 5;
  std::uint64_t seed = 0;
  std::string grid_preset = "default";  // default | small | fixed
  int cv_folds = 5;

  RecurrenceMode iets_mode = RecurrenceMode::Grayscale;
  int iets_tau = 1;
  double iets_eps_quantile = 0.1;
  int iets_window_offset = 0;

  int cd_samples = 20;
  bool cd_standardize = false;

  bool cluster_study = true;
  bool cluster_standardize = true;
  int pgm_samples = 4;

  std::filesystem::path out_dir;
  int jobs = 0;  // 0 = hardware concurrency

  std::string echo() const;  // resolved key=value form, printed and reported
};

// `key = value` lines, '#' comments; relative paths resolve against
// base_dir. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

struct FeatureCell {
  std::string family;
  Algorithm algorithm = Algorithm::Knn;
  double fraction = 0.5;
  std::vector<double> accuracies;  // one per repeat
  std::vector<double> macro_fs;
  std::vector<std::string> chosen_specs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_macro_f = 0.0;
  double std_macro_f = 0.0;
};

struct ClusterCell {
  std::string algorithm;
  double purity = 0.0;
  double entropy = 0.0;
};

struct StudyReport {
  std::uint64_t seed = 0;
  std::string config_echo;
  std::size_t instances = 0;
  std::size_t iets_eligible = 0;
  std::size_t iets_excluded = 0;
  std::vector<FeatureCell> feature_cells;
  std::vector<ClusterCell> cluster_cells;
};

// Per repeat: balance -> stratified split -> grid search by CV on the train
// half -> fit best -> score the test half. Cells run on the worker budget;
// the outcome is schedule-independent.
std::vector<FeatureCell> run_feature_study(const RunConfig& config, const Corpus& corpus,
                                           std::size_t* iets_eligible = nullptr,
                                           std::size_t* iets_excluded = nullptr);

// DF features, k = number of ground-truth labels, spectral / k-medoids /
// k-means scored by purity and entropy.
std::vector<ClusterCell> run_cluster_study(const RunConfig& config, const Corpus& corpus);

// Loads the corpus, runs the configured studies and writes the report files
// (JSON, CSV tables, sample PGMs) into config.out_dir.
StudyReport run_study(const RunConfig& config);

std::string study_report_json(const StudyReport& report);
std::string feature_cells_csv(const std::vector<FeatureCell>& cells);
// Table-4 style: one row per family, one mean±std column per fraction; the
// per-fraction best carries '*' when significantly above the second best.
std::string methods_table_csv(const std::vector<FeatureCell>& cells,
                              const std::vector<double>& fractions);
// Table-3 style: macro F at the 50/50 split, algorithms x families.
std::string macro_f_table_csv(const std::vector<FeatureCell>& cells);
std::string cluster_table_csv(const std::vector<ClusterCell>& cells);

}  // namespace semtype
