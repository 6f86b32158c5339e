#include "semtype/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semtype/cluster.hpp"
#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/metrics.hpp"
#include "semtype/parallel.hpp"
#include "semtype/rng.hpp"
#include "semtype/ttest.hpp"

namespace semtype {

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& piece : split_csv_line(value)) {
    const std::string t = trim(piece);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  raise(Err::BadConfig, "expected a boolean, got '" + value + "'");
}

int iets_dim_of(const std::string& family) {
  if (family.rfind("iets", 0) != 0) return 0;
  const auto dim = parse_int(family.substr(4));
  if (!dim || (*dim != 8 && *dim != 16 && *dim != 32 && *dim != 48)) {
    raise(Err::BadConfig, "IETS family must be one of iets8/iets16/iets32/iets48");
  }
  return static_cast<int>(*dim);
}

void check_family(const std::string& family) {
  if (family == "df" || family == "cd") return;
  iets_dim_of(family);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (const char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

}  // namespace

std::string RunConfig::echo() const {
  std::ostringstream out;
  out << "corpus = " << corpus_dir.string() << "\n";
  if (!label_regex.empty()) {
    out << "label_regex = " << label_regex << "\n";
  } else {
    out << "labels = " << label_sidecar.string() << "\n";
  }
  out << "time_column = " << time_column << "\n";
  out << "value_column = " << value_column << "\n";
  out << "families = ";
  for (std::size_t i = 0; i < families.size(); ++i) out << (i ? "," : "") << families[i];
  out << "\nalgorithms = ";
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    out << (i ? "," : "") << to_string(algorithms[i]);
  }
  out << "\nfractions = ";
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    out << (i ? "," : "") << format_double(fractions[i], 6);
  }
  out << "\nrepeats = " << repeats << "\n";
  out << "seed = " << seed << "\n";
  out << "grid = " << grid_preset << "\n";
  out << "folds = " << cv_folds << "\n";
  out << "iets_mode = " << to_string(iets_mode) << "\n";
  out << "iets_tau = " << iets_tau << "\n";
  out << "iets_eps_quantile = " << format_double(iets_eps_quantile, 6) << "\n";
  out << "iets_window_offset = " << iets_window_offset << "\n";
  out << "cd_samples = " << cd_samples << "\n";
  out << "cd_standardize = " << (cd_standardize ? "true" : "false") << "\n";
  out << "cluster_study = " << (cluster_study ? "true" : "false") << "\n";
  out << "cluster_standardize = " << (cluster_standardize ? "true" : "false") << "\n";
  out << "pgm_samples = " << pgm_samples << "\n";
  // Output directory and worker budget are execution details: results are
  // schedule-free and location-free, so they stay out of the reported
  // configuration.
  return out.str();
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig config;
  config.algorithms = all_algorithms();
  bool saw_labels = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      raise(Err::BadConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto resolve = [&](const std::string& p) {
      const std::filesystem::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };

    if (key == "corpus") {
      config.corpus_dir = resolve(value);
    } else if (key == "labels") {
      config.label_sidecar = resolve(value);
      saw_labels = true;
    } else if (key == "label_regex") {
      config.label_regex = value;
      saw_labels = true;
    } else if (key == "time_column") {
      config.time_column = value;
    } else if (key == "value_column") {
      config.value_column = value;
    } else if (key == "families") {
      config.families = split_list(value);
      for (const auto& family : config.families) check_family(family);
    } else if (key == "algorithms") {
      config.algorithms.clear();
      for (const auto& name : split_list(value)) config.algorithms.push_back(parse_algorithm(name));
    } else if (key == "fractions") {
      config.fractions.clear();
      for (const auto& token : split_list(value)) {
        const auto f = parse_double(token);
        if (!f || !(*f > 0.0 && *f < 1.0)) {
          raise(Err::BadConfig, "fractions must lie in (0, 1)");
        }
        config.fractions.push_back(*f);
      }
    } else if (key == "repeats") {
      const auto v = parse_int(value);
      if (!v || *v < 1) raise(Err::BadConfig, "repeats must be at least 1");
      config.repeats = static_cast<int>(*v);
    } else if (key == "seed") {
      const auto v = parse_int(value);
      if (!v) raise(Err::BadConfig, "seed must be an integer");
      config.seed = static_cast<std::uint64_t>(*v);
    } else if (key == "grid") {
      if (value != "default" && value != "small" && value != "fixed") {
        raise(Err::BadConfig, "grid must be default, small, or fixed");
      }
      config.grid_preset = value;
    } else if (key == "folds") {
      const auto v = parse_int(value);
      if (!v || *v < 2) raise(Err::BadConfig, "folds must be at least 2");
      config.cv_folds = static_cast<int>(*v);
    } else if (key == "iets_mode") {
      config.iets_mode = parse_recurrence_mode(value);
    } else if (key == "iets_tau") {
      const auto v = parse_int(value);
      if (!v || *v < 1) raise(Err::BadConfig, "iets_tau must be positive");
      config.iets_tau = static_cast<int>(*v);
    } else if (key == "iets_eps_quantile") {
      const auto v = parse_double(value);
      if (!v || !(*v > 0.0 && *v < 1.0)) raise(Err::BadConfig, "eps quantile must lie in (0,1)");
      config.iets_eps_quantile = *v;
    } else if (key == "iets_window_offset") {
      const auto v = parse_int(value);
      if (!v || *v < 0) raise(Err::BadConfig, "window offset must be non-negative");
      config.iets_window_offset = static_cast<int>(*v);
    } else if (key == "cd_samples") {
      const auto v = parse_int(value);
      if (!v || *v < 1) raise(Err::BadConfig, "cd_samples must be positive");
      config.cd_samples = static_cast<int>(*v);
    } else if (key == "cd_standardize") {
      config.cd_standardize = parse_bool(value);
    } else if (key == "cluster_study") {
      config.cluster_study = parse_bool(value);
    } else if (key == "cluster_standardize") {
      config.cluster_standardize = parse_bool(value);
    } else if (key == "pgm_samples") {
      const auto v = parse_int(value);
      if (!v || *v < 0) raise(Err::BadConfig, "pgm_samples must be non-negative");
      config.pgm_samples = static_cast<int>(*v);
    } else if (key == "out") {
      config.out_dir = resolve(value);
    } else if (key == "jobs") {
      const auto v = parse_int(value);
      if (!v || *v < 0) raise(Err::BadConfig, "jobs must be non-negative");
      config.jobs = static_cast<int>(*v);
    } else {
      raise(Err::BadConfig, "unknown config key '" + key + "'");
    }
  }

  if (config.corpus_dir.empty()) raise(Err::BadConfig, "config needs a corpus path");
  if (config.out_dir.empty()) raise(Err::BadConfig, "config needs an output path");
  if (!saw_labels) config.label_sidecar = config.corpus_dir / "labels.csv";
  return config;
}

namespace {

Dataset family_dataset(const RunConfig& config, const Corpus& corpus, const Dataset& df,
                       const std::string& family, int jobs, std::size_t* eligible,
                       std::size_t* excluded) {
  if (family == "df") return df;
  if (family == "cd") {
    return cd_dataset(df, derive_seed(config.seed, hash_str("cd-signatures")),
                      config.cd_samples, config.cd_standardize);
  }
  IetsParams params;
  params.dim = iets_dim_of(family);
  params.mode = config.iets_mode;
  params.delay = config.iets_tau;
  params.eps_quantile = config.iets_eps_quantile;
  params.window_offset = config.iets_window_offset;
  IetsDataset result = iets_dataset(corpus, params, jobs);
  if (eligible) *eligible = result.eligible;
  if (excluded) *excluded = result.excluded;
  return std::move(result.data);
}

std::vector<ModelSpec> preset_grid(const std::string& preset, Algorithm algorithm) {
  if (preset == "small") return small_grid(algorithm);
  if (preset == "fixed") return {fixed_spec(algorithm)};
  return default_grid(algorithm);
}

struct RepeatOutcome {
  double accuracy = 0.0;
  double macro_f = 0.0;
  std::string chosen;
};

RepeatOutcome run_repeat(const RunConfig& config, const Dataset& data, Algorithm algorithm,
                         double fraction, std::uint64_t repeat_seed) {
  const Dataset balanced = balance_downsample(data, derive_seed(repeat_seed, 1));
  const SplitResult halves = split_dataset(balanced, fraction, derive_seed(repeat_seed, 2));
  const auto grid = preset_grid(config.grid_preset, algorithm);
  GridSearchResult search =
      grid_search(grid, halves.train, config.cv_folds, derive_seed(repeat_seed, 3));
  search.best.seed = derive_seed(repeat_seed, 4);
  const TrainedModel model = train(search.best, halves.train);
  const std::vector<int> preds = predict(model, halves.test.X);
  const MetricReport rep =
      f_scores(confusion(halves.test.y, preds, halves.test.num_classes()));

  RepeatOutcome outcome;
  outcome.accuracy = rep.accuracy;
  outcome.macro_f = rep.macro_f;
  outcome.chosen = search.best.brief();
  return outcome;
}

}  // namespace

std::vector<FeatureCell> run_feature_study(const RunConfig& config, const Corpus& corpus,
                                           std::size_t* iets_eligible,
                                           std::size_t* iets_excluded) {
  if (config.families.empty()) raise(Err::BadConfig, "empty study: no feature families");
  if (config.algorithms.empty()) raise(Err::BadConfig, "empty study: no algorithms");
  const int jobs = config.jobs > 0 ? config.jobs : default_jobs();
  const Dataset df = df_dataset(corpus);

  std::vector<FeatureCell> cells;
  for (const auto& family : config.families) {
    const Dataset data =
        family_dataset(config, corpus, df, family, jobs, iets_eligible, iets_excluded);
    const std::uint64_t family_seed = derive_seed(config.seed, hash_str(family));

    // One flat job per (algorithm, fraction, repeat); slots keep the result
    // deterministic under any schedule.
    struct Job {
      std::size_t cell;
      int repeat;
      Algorithm algorithm;
      double fraction;
      std::uint64_t seed;
    };
    std::vector<Job> todo;
    const std::size_t cell_base = cells.size();
    for (const Algorithm algorithm : config.algorithms) {
      for (const double fraction : config.fractions) {
        FeatureCell cell;
        cell.family = family;
        cell.algorithm = algorithm;
        cell.fraction = fraction;
        cell.accuracies.resize(static_cast<std::size_t>(config.repeats));
        cell.macro_fs.resize(static_cast<std::size_t>(config.repeats));
        cell.chosen_specs.resize(static_cast<std::size_t>(config.repeats));
        const std::uint64_t cell_seed =
            derive_seed(family_seed, hash_str(to_string(algorithm)),
                        static_cast<std::uint64_t>(std::llround(fraction * 1e6)));
        for (int r = 0; r < config.repeats; ++r) {
          todo.push_back({cells.size(), r, algorithm, fraction,
                          derive_seed(cell_seed, static_cast<std::uint64_t>(r))});
        }
        cells.push_back(std::move(cell));
      }
    }

    parallel_for(todo.size(), jobs, [&](std::size_t j) {
      const Job& job = todo[j];
      const RepeatOutcome outcome =
          run_repeat(config, data, job.algorithm, job.fraction, job.seed);
      FeatureCell& cell = cells[job.cell];
      cell.accuracies[static_cast<std::size_t>(job.repeat)] = outcome.accuracy;
      cell.macro_fs[static_cast<std::size_t>(job.repeat)] = outcome.macro_f;
      cell.chosen_specs[static_cast<std::size_t>(job.repeat)] = outcome.chosen;
    });

    for (std::size_t c = cell_base; c < cells.size(); ++c) {
      cells[c].mean_accuracy = mean_of(cells[c].accuracies);
      cells[c].std_accuracy = sample_std(cells[c].accuracies);
      cells[c].mean_macro_f = mean_of(cells[c].macro_fs);
      cells[c].std_macro_f = sample_std(cells[c].macro_fs);
    }
  }
  return cells;
}

std::vector<ClusterCell> run_cluster_study(const RunConfig& config, const Corpus& corpus) {
  Dataset df = df_dataset(corpus);
  Eigen::MatrixXd x = df.X;
  if (config.cluster_standardize) {
    const Standardizer s = Standardizer::fit(x);
    x = s.transform(x);
  }
  const int k = df.num_classes();

  std::vector<ClusterCell> cells;
  const auto add = [&](const std::string& name, const ClusterAssignment& assignment) {
    ClusterCell cell;
    cell.algorithm = name;
    cell.purity = purity(assignment.assignments, df.y);
    cell.entropy = entropy(assignment.assignments, df.y);
    cells.push_back(cell);
  };
  add("spectral", spectral(x, k, derive_seed(config.seed, hash_str("spectral"))));
  add("kmedoids", kmedoids(x, k, derive_seed(config.seed, hash_str("kmedoids"))));
  add("kmeans", kmeans(x, k, derive_seed(config.seed, hash_str("kmeans"))));
  return cells;
}

namespace {

void write_pgm_samples(const RunConfig& config, const Corpus& corpus) {
  if (config.pgm_samples <= 0) return;
  // Round-robin over classes through the eligible series, deterministic.
  const Eigen::Index min_len =
      static_cast<Eigen::Index>(config.iets_window_offset) + kIetsWindow;
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < corpus.series.size(); ++i) {
    if (corpus.series[i].values.size() >= min_len) {
      by_label[corpus.series[i].label_id].push_back(i);
    }
  }
  int written = 0;
  for (std::size_t round = 0; written < config.pgm_samples; ++round) {
    bool any = false;
    for (const auto& [label, members] : by_label) {
      if (round >= members.size() || written >= config.pgm_samples) continue;
      any = true;
      const RegularSeries& series = corpus.series[members[round]];
      const Eigen::VectorXd window =
          select_window(series, kIetsWindow, config.iets_window_offset);
      const RecurrenceImage img =
          recurrence(embed(window, config.iets_tau), config.iets_mode, config.iets_eps_quantile);
      const std::string name = "rp_" + sanitize(corpus.labels.name_of(label)) + "_" +
                               sanitize(series.device_id) + ".pgm";
      atomic_write_file(config.out_dir / name, render_pgm(img.cells));
      ++written;
    }
    if (!any) break;
  }
}

}  // namespace

StudyReport run_study(const RunConfig& config) {
  const int jobs = config.jobs > 0 ? config.jobs : default_jobs();
  FormatSpec format;
  format.time_column = config.time_column;
  format.value_column = config.value_column;
  const LabelRule rule = config.label_regex.empty()
                             ? LabelRule::from_sidecar(config.label_sidecar)
                             : LabelRule::from_regex(config.label_regex);
  const Corpus corpus = load_corpus(config.corpus_dir, format, rule, jobs);

  StudyReport report;
  report.seed = config.seed;
  report.config_echo = config.echo();
  report.instances = corpus.series.size();

  report.feature_cells =
      run_feature_study(config, corpus, &report.iets_eligible, &report.iets_excluded);
  if (config.cluster_study) report.cluster_cells = run_cluster_study(config, corpus);

  std::filesystem::create_directories(config.out_dir);
  atomic_write_file(config.out_dir / "report.json", study_report_json(report));
  atomic_write_file(config.out_dir / "feature_cells.csv", feature_cells_csv(report.feature_cells));
  atomic_write_file(config.out_dir / "methods_table.csv",
                    methods_table_csv(report.feature_cells, config.fractions));
  atomic_write_file(config.out_dir / "macro_f_table.csv", macro_f_table_csv(report.feature_cells));
  if (!report.cluster_cells.empty()) {
    atomic_write_file(config.out_dir / "cluster_table.csv", cluster_table_csv(report.cluster_cells));
  }
  write_pgm_samples(config, corpus);
  return report;
}

std::string study_report_json(const StudyReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["config"] = report.config_echo;
  j["instances"] = report.instances;
  j["iets_eligible"] = report.iets_eligible;
  j["iets_excluded"] = report.iets_excluded;

  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& cell : report.feature_cells) {
    nlohmann::ordered_json c;
    c["family"] = cell.family;
    c["algorithm"] = to_string(cell.algorithm);
    c["fraction"] = cell.fraction;
    c["accuracies"] = cell.accuracies;
    c["macro_fs"] = cell.macro_fs;
    c["chosen_specs"] = cell.chosen_specs;
    c["mean_accuracy"] = cell.mean_accuracy;
    c["std_accuracy"] = cell.std_accuracy;
    c["mean_macro_f"] = cell.mean_macro_f;
    c["std_macro_f"] = cell.std_macro_f;
    cells.push_back(std::move(c));
  }
  j["feature_cells"] = std::move(cells);

  nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
  for (const auto& cell : report.cluster_cells) {
    nlohmann::ordered_json c;
    c["algorithm"] = cell.algorithm;
    c["purity"] = cell.purity;
    c["entropy"] = cell.entropy;
    clusters.push_back(std::move(c));
  }
  j["cluster_cells"] = std::move(clusters);
  return j.dump(2) + "\n";
}

std::string feature_cells_csv(const std::vector<FeatureCell>& cells) {
  std::string out =
      "family,algorithm,fraction,repeats,mean_accuracy,std_accuracy,mean_macro_f,std_macro_f\n";
  for (const auto& cell : cells) {
    out += cell.family + "," + to_string(cell.algorithm) + "," + format_double(cell.fraction, 6) +
           "," + std::to_string(cell.accuracies.size()) + "," +
           format_double(cell.mean_accuracy, 10) + "," + format_double(cell.std_accuracy, 10) +
           "," + format_double(cell.mean_macro_f, 10) + "," + format_double(cell.std_macro_f, 10) +
           "\n";
  }
  return out;
}

namespace {

// Best cell (by mean accuracy) per family at one fraction.
const FeatureCell* best_cell(const std::vector<FeatureCell>& cells, const std::string& family,
                             double fraction) {
  const FeatureCell* best = nullptr;
  for (const auto& cell : cells) {
    if (cell.family != family || cell.fraction != fraction) continue;
    if (!best || cell.mean_accuracy > best->mean_accuracy) best = &cell;
  }
  return best;
}

std::vector<std::string> family_order(const std::vector<FeatureCell>& cells) {
  std::vector<std::string> out;
  for (const auto& cell : cells) {
    if (std::find(out.begin(), out.end(), cell.family) == out.end()) out.push_back(cell.family);
  }
  return out;
}

}  // namespace

std::string methods_table_csv(const std::vector<FeatureCell>& cells,
                              const std::vector<double>& fractions) {
  const auto families = family_order(cells);
  std::string out = "method";
  for (const double f : fractions) out += ",train_" + format_double(f, 6);
  out += "\n";

  for (const auto& family : families) {
    out += family;
    for (const double fraction : fractions) {
      const FeatureCell* mine = best_cell(cells, family, fraction);
      if (!mine) {
        out += ",";
        continue;
      }
      // Significance of the per-fraction winner against the runner-up.
      const FeatureCell* top = nullptr;
      const FeatureCell* second = nullptr;
      for (const auto& other : families) {
        const FeatureCell* cell = best_cell(cells, other, fraction);
        if (!cell) continue;
        if (!top || cell->mean_accuracy > top->mean_accuracy) {
          second = top;
          top = cell;
        } else if (!second || cell->mean_accuracy > second->mean_accuracy) {
          second = cell;
        }
      }
      std::string mark;
      if (mine == top && second && mine->accuracies.size() >= 2 &&
          second->accuracies.size() >= 2 &&
          significance_mark(mine->accuracies, second->accuracies)) {
        mark = "*";
      }
      out += "," + format_double(mine->mean_accuracy, 4) + "+-" +
             format_double(mine->std_accuracy, 4) + mark;
    }
    out += "\n";
  }
  return out;
}

std::string macro_f_table_csv(const std::vector<FeatureCell>& cells) {
  const auto families = family_order(cells);
  std::set<std::string> algorithms;
  for (const auto& cell : cells) algorithms.insert(to_string(cell.algorithm));

  std::string out = "algorithm";
  for (const auto& family : families) out += "," + family;
  out += "\n";
  for (const auto& algorithm : algorithms) {
    out += algorithm;
    for (const auto& family : families) {
      const FeatureCell* found = nullptr;
      for (const auto& cell : cells) {
        if (cell.family == family && to_string(cell.algorithm) == algorithm &&
            cell.fraction == 0.5) {
          found = &cell;
          break;
        }
      }
      out += ",";
      if (found) out += format_double(found->mean_macro_f, 6);
    }
    out += "\n";
  }
  return out;
}

std::string cluster_table_csv(const std::vector<ClusterCell>& cells) {
  std::string out = "algorithm,purity_percent,entropy\n";
  for (const auto& cell : cells) {
    out += cell.algorithm + "," + format_double(100.0 * cell.purity, 6) + "," +
           format_double(cell.entropy, 6) + "\n";
  }
  return out;
}

}  // namespace semtype
