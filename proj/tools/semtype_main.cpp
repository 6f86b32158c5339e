#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>

#include "semtype/classify.hpp"
#include "semtype/cluster.hpp"
#include "semtype/csv.hpp"
#include "semtype/dataset.hpp"
#include "semtype/error.hpp"
#include "semtype/experiment.hpp"
#include "semtype/ingest.hpp"
#include "semtype/metrics.hpp"
#include "semtype/parallel.hpp"
#include "semtype/recurrence.hpp"
#include "semtype/rng.hpp"
#include "semtype/synth.hpp"

namespace {

// Exit code contract: 0 success, 1 usage error, 2 data error, 3 internal.
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kInternalError = 3;

struct CorpusFlags {
  std::string corpus;
  std::string labels;
  std::string label_regex;
  std::string time_column = "t";
  std::string value_column = "v";

  void attach(CLI::App* cmd) {
    cmd->add_option("--corpus", corpus, "corpus directory of per-device CSV files")->required();
    cmd->add_option("--labels", labels, "label sidecar CSV (filename,label)");
    cmd->add_option("--label-regex", label_regex,
                    "regex whose first capture group on the filename is the label");
    cmd->add_option("--time-col", time_column, "timestamp column (name or #index)");
    cmd->add_option("--value-col", value_column, "value column (name or #index)");
  }

  semtype::FormatSpec format() const {
    semtype::FormatSpec spec;
    spec.time_column = time_column;
    spec.value_column = value_column;
    return spec;
  }

  semtype::LabelRule rule() const {
    if (!label_regex.empty()) return semtype::LabelRule::from_regex(label_regex);
    const std::string sidecar = labels.empty()
                                    ? (std::filesystem::path(corpus) / "labels.csv").string()
                                    : labels;
    return semtype::LabelRule::from_sidecar(sidecar);
  }
};

void print_header(const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cout << "semtype " << command << "\n";
  for (const auto& [key, value] : kv) std::cout << "  " << key << " = " << value << "\n";
}

int exit_code_for(const semtype::Error& e) {
  switch (e.code()) {
    case semtype::Err::BadConfig:
    case semtype::Err::BadSpec:
      return kUsageError;
    default:
      return kDataError;
  }
}

int cmd_synth(const std::string& out_dir, int types, int files, int length, std::uint64_t seed,
              double gap_prob) {
  const auto& known = semtype::synth_type_names();
  if (types < 1 || types > static_cast<int>(known.size())) {
    std::cerr << "error: --types must lie in [1, " << known.size() << "]\n";
    return kUsageError;
  }
  semtype::SynthSpec spec;
  spec.types.assign(known.begin(), known.begin() + types);
  spec.files_per_type = files;
  spec.length_hours = length;
  spec.seed = seed;
  spec.gap_probability = gap_prob;

  print_header("synth", {{"out", out_dir},
                         {"types", std::to_string(types)},
                         {"files_per_type", std::to_string(files)},
                         {"length", std::to_string(length)},
                         {"seed", std::to_string(seed)},
                         {"gap_prob", semtype::format_double(gap_prob, 6)}});
  const auto result = semtype::generate_synthetic_corpus(spec, out_dir);
  std::cout << "wrote " << result.files_written << " files + " << result.sidecar.string() << "\n";
  return 0;
}

int cmd_ingest(const CorpusFlags& flags, const std::string& manifest, const std::string& out,
               int jobs) {
  print_header("ingest", {{"corpus", flags.corpus},
                          {"labels", flags.label_regex.empty() ? flags.labels : flags.label_regex},
                          {"jobs", std::to_string(jobs)}});
  if (!manifest.empty()) {
    const auto problems = semtype::verify_manifest(flags.corpus, manifest);
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "manifest: " << p << "\n";
      semtype::raise(semtype::Err::IoFailure, "manifest verification failed");
    }
    std::cout << "manifest verified\n";
  }
  const semtype::Corpus corpus = semtype::load_corpus(flags.corpus, flags.format(), flags.rule(), jobs);

  std::string summary = "filename,label,label_id,hours,start_hour\n";
  for (const auto& series : corpus.series) {
    summary += series.device_id + "," + corpus.labels.name_of(series.label_id) + "," +
               std::to_string(series.label_id) + "," + std::to_string(series.values.size()) + "," +
               std::to_string(series.start_hour) + "\n";
  }
  semtype::atomic_write_file(out, summary);
  std::cout << "loaded " << corpus.series.size() << " of " << corpus.files_seen << " files ("
            << corpus.files_skipped << " skipped), " << corpus.labels.size() << " labels\n";
  for (const auto& line : corpus.skip_log) std::cout << "  skipped: " << line << "\n";
  return 0;
}

int cmd_featurize(const CorpusFlags& flags, const std::string& family, const std::string& out,
                  int dim, const std::string& mode, int tau, double eps_quantile,
                  int window_offset, std::uint64_t seed, int cd_samples, bool cd_standardize,
                  int jobs) {
  print_header("featurize", {{"corpus", flags.corpus},
                             {"family", family},
                             {"dim", std::to_string(dim)},
                             {"mode", mode},
                             {"tau", std::to_string(tau)},
                             {"eps_quantile", semtype::format_double(eps_quantile, 6)},
                             {"seed", std::to_string(seed)},
                             {"jobs", std::to_string(jobs)}});
  const semtype::Corpus corpus = semtype::load_corpus(flags.corpus, flags.format(), flags.rule(), jobs);

  semtype::Dataset data;
  if (family == "df") {
    data = semtype::df_dataset(corpus);
  } else if (family == "cd") {
    data = semtype::cd_dataset(semtype::df_dataset(corpus), seed, cd_samples, cd_standardize);
  } else if (family == "iets") {
    semtype::IetsParams params;
    params.dim = dim;
    params.mode = semtype::parse_recurrence_mode(mode);
    params.delay = tau;
    params.eps_quantile = eps_quantile;
    params.window_offset = window_offset;
    const semtype::IetsDataset result = semtype::iets_dataset(corpus, params, jobs);
    std::cout << "iets-eligible series: " << result.eligible << " (excluded " << result.excluded
              << ")\n";
    data = result.data;
  } else {
    semtype::raise(semtype::Err::BadSpec, "family must be df, iets, or cd");
  }
  semtype::atomic_write_file(out, semtype::dataset_to_csv(data));
  std::cout << "wrote " << data.rows() << " x " << data.cols() << " features to " << out << "\n";
  return 0;
}

int cmd_encode(const std::string& input, const std::string& out, const std::string& time_col,
               const std::string& value_col, int dim, const std::string& mode, int tau,
               double eps_quantile, int window_offset) {
  print_header("encode", {{"input", input},
                          {"out", out},
                          {"dim", std::to_string(dim)},
                          {"mode", mode},
                          {"tau", std::to_string(tau)}});
  semtype::FormatSpec format;
  format.time_column = time_col;
  format.value_column = value_col;
  semtype::RawSeries raw = semtype::parse_series(semtype::read_file(input), format);
  raw.device_id = std::filesystem::path(input).filename().string();
  const semtype::RegularSeries series =
      semtype::interpolate_gaps(semtype::resample_hourly(raw));
  const Eigen::VectorXd window =
      semtype::select_window(series, semtype::kIetsWindow, window_offset);
  const semtype::RecurrenceImage img = semtype::recurrence(
      semtype::embed(window, tau), semtype::parse_recurrence_mode(mode), eps_quantile);
  const Eigen::MatrixXd matrix = dim > 0 ? semtype::downsample(img.cells, dim) : img.cells;
  semtype::atomic_write_file(out, semtype::render_pgm(matrix));
  std::cout << "wrote " << matrix.rows() << "x" << matrix.cols() << " PGM to " << out << "\n";
  return 0;
}

int cmd_cluster(const std::string& features, const std::string& algo, int k, std::uint64_t seed,
                const std::string& sigma, bool standardize, const std::string& out) {
  print_header("cluster", {{"features", features},
                           {"algo", algo},
                           {"k", std::to_string(k)},
                           {"seed", std::to_string(seed)},
                           {"sigma", sigma},
                           {"standardize", standardize ? "true" : "false"}});
  const semtype::Dataset data = semtype::dataset_from_csv(semtype::read_file(features));
  Eigen::MatrixXd x = data.X;
  if (standardize) x = semtype::Standardizer::fit(x).transform(x);
  const int clusters = k > 0 ? k : data.num_classes();

  semtype::ClusterAssignment result;
  if (algo == "kmeans") {
    result = semtype::kmeans(x, clusters, seed);
  } else if (algo == "kmedoids") {
    result = semtype::kmedoids(x, clusters, seed);
  } else if (algo == "spectral") {
    std::optional<double> s;
    if (sigma != "median") {
      const auto v = semtype::parse_double(sigma);
      if (!v || !(*v > 0)) semtype::raise(semtype::Err::BadSpec, "--sigma must be median or > 0");
      s = *v;
    }
    result = semtype::spectral(x, clusters, seed, s);
  } else {
    semtype::raise(semtype::Err::BadSpec, "algo must be kmeans, kmedoids, or spectral");
  }
  semtype::atomic_write_file(out, semtype::assignments_csv(result));
  std::cout << "k = " << clusters << ", objective = " << result.objective << ", iterations = "
            << result.iterations << "\n";
  std::cout << "purity = " << semtype::purity(result.assignments, data.y)
            << ", entropy = " << semtype::entropy(result.assignments, data.y) << "\n";
  return 0;
}

int cmd_train(const std::string& features, const std::string& algo, const std::string& out,
              std::uint64_t seed, const std::string& grid, int folds, int jobs,
              const semtype::ModelSpec& overrides) {
  print_header("train", {{"features", features},
                         {"algo", algo},
                         {"grid", grid},
                         {"folds", std::to_string(folds)},
                         {"seed", std::to_string(seed)},
                         {"jobs", std::to_string(jobs)}});
  const semtype::Dataset data = semtype::dataset_from_csv(semtype::read_file(features));
  const semtype::Algorithm algorithm = semtype::parse_algorithm(algo);

  semtype::ModelSpec spec;
  if (grid == "none") {
    spec = overrides;
    spec.algorithm = algorithm;
  } else {
    const auto cells = grid == "small" ? semtype::small_grid(algorithm)
                                       : semtype::default_grid(algorithm);
    const auto search = semtype::grid_search(cells, data, folds, seed, jobs);
    spec = search.best;
    std::cout << "grid best: " << spec.brief() << " (cv accuracy "
              << semtype::format_double(search.best_score, 6) << ")\n";
  }
  spec.seed = seed;
  const semtype::TrainedModel model = semtype::train(spec, data, jobs);
  semtype::atomic_write_file(out, semtype::save_model(model));
  std::cout << "wrote model to " << out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& features,
                 const std::string& out, const std::string& per_class) {
  print_header("evaluate", {{"model", model_path}, {"features", features}, {"out", out}});
  const semtype::TrainedModel model = semtype::load_model(semtype::read_file(model_path));
  const semtype::Dataset data = semtype::dataset_from_csv(semtype::read_file(features));
  if (data.num_classes() != model.num_classes) {
    semtype::raise(semtype::Err::DimensionMismatch,
                   "feature file classes do not match the model");
  }
  const std::vector<int> preds = semtype::predict(model, data.X);
  const semtype::MetricReport rep =
      semtype::f_scores(semtype::confusion(data.y, preds, model.num_classes));
  semtype::atomic_write_file(out, semtype::metric_report_json(rep, data.class_names));
  if (!per_class.empty()) {
    semtype::atomic_write_file(per_class, semtype::metric_report_csv(rep, data.class_names));
  }
  std::cout << "accuracy = " << semtype::format_double(rep.accuracy, 6)
            << ", macro_f = " << semtype::format_double(rep.macro_f, 6)
            << ", micro_f = " << semtype::format_double(rep.micro_f, 6) << "\n";
  return 0;
}

int cmd_study(const std::string& config_path, const std::string& out_override, int jobs_override) {
  if (!std::filesystem::exists(config_path)) {
    std::cerr << "error: config file not found: " << config_path << "\n"
              << "usage: semtype study --config FILE [--out DIR] [--jobs N]\n";
    return kUsageError;
  }
  semtype::RunConfig config = semtype::parse_run_config(
      semtype::read_file(config_path), std::filesystem::path(config_path).parent_path());
  if (!out_override.empty()) config.out_dir = out_override;
  if (jobs_override > 0) config.jobs = jobs_override;
  if (config.families.empty()) {
    std::cerr << "error: empty study: the config selects no feature families\n";
    return kUsageError;
  }

  std::cout << "semtype study\n" << config.echo();
  const semtype::StudyReport report = semtype::run_study(config);

  std::cout << "\ninstances: " << report.instances << " (iets-eligible " << report.iets_eligible
            << ")\n";
  std::cout << "family      algorithm            train  accuracy        macro_f\n";
  for (const auto& cell : report.feature_cells) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-11s %-20s %5.2f  %.3f +- %.3f  %.3f +- %.3f",
                  cell.family.c_str(), semtype::to_string(cell.algorithm).c_str(), cell.fraction,
                  cell.mean_accuracy, cell.std_accuracy, cell.mean_macro_f, cell.std_macro_f);
    std::cout << line << "\n";
  }
  for (const auto& cell : report.cluster_cells) {
    char line[120];
    std::snprintf(line, sizeof(line), "cluster %-10s purity %.1f%%  entropy %.3f",
                  cell.algorithm.c_str(), 100.0 * cell.purity, cell.entropy);
    std::cout << line << "\n";
  }
  std::cout << "report written to " << config.out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semtype: semantic type inference for IoT device time series"};
  app.require_subcommand(1);
  int jobs = semtype::default_jobs();
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker budget for parallel stages");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic labelled corpus");
  std::string synth_out;
  int synth_types = 5;
  int synth_files = 40;
  int synth_length = 800;
  std::uint64_t synth_seed = 0;
  double synth_gap = 0.01;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--types", synth_types, "number of generator types (max 5)");
  synth->add_option("--files", synth_files, "files per type");
  synth->add_option("--length", synth_length, "hours per series (>= 720)");
  synth->add_option("--seed", synth_seed, "master seed");
  synth->add_option("--gap-prob", synth_gap, "probability an interior row is dropped");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load, regularize and summarize a corpus");
  CorpusFlags ingest_flags;
  ingest_flags.attach(ingest);
  std::string ingest_manifest;
  std::string ingest_out = "corpus_summary.csv";
  ingest->add_option("--manifest", ingest_manifest, "sha256 manifest to verify first");
  ingest->add_option("--out", ingest_out, "summary CSV path");

  // featurize
  auto* feat = app.add_subcommand("featurize", "emit a feature CSV for one family");
  CorpusFlags feat_flags;
  feat_flags.attach(feat);
  std::string feat_family;
  std::string feat_out;
  int feat_dim = 8;
  std::string feat_mode = "gray";
  int feat_tau = 1;
  double feat_eps = 0.1;
  int feat_offset = 0;
  std::uint64_t feat_seed = 0;
  int feat_cd_samples = 20;
  bool feat_cd_standardize = false;
  feat->add_option("--family", feat_family, "df | iets | cd")->required();
  feat->add_option("--out", feat_out, "feature CSV path")->required();
  feat->add_option("--dim", feat_dim, "IETS dimension (8|16|32|48)")
      ->check(CLI::IsMember({8, 16, 32, 48}));
  feat->add_option("--mode", feat_mode, "IETS mode: gray | binary");
  feat->add_option("--tau", feat_tau, "embedding delay in hours");
  feat->add_option("--eps-quantile", feat_eps, "binary threshold quantile");
  feat->add_option("--window-offset", feat_offset, "window start offset in hours");
  feat->add_option("--seed", feat_seed, "seed (CD signature sampling)");
  feat->add_option("--cd-samples", feat_cd_samples, "instances averaged per signature");
  feat->add_flag("--cd-standardize", feat_cd_standardize, "z-score DF vectors before cosine");

  // encode
  auto* encode = app.add_subcommand("encode", "render one series as a recurrence PGM");
  std::string enc_input;
  std::string enc_out;
  std::string enc_time = "t";
  std::string enc_value = "v";
  int enc_dim = 0;
  std::string enc_mode = "gray";
  int enc_tau = 1;
  double enc_eps = 0.1;
  int enc_offset = 0;
  encode->add_option("--input", enc_input, "input CSV")->required();
  encode->add_option("--out", enc_out, "output PGM path")->required();
  encode->add_option("--time-col", enc_time, "timestamp column");
  encode->add_option("--value-col", enc_value, "value column");
  encode->add_option("--dim", enc_dim, "downsample to d x d (0 = full size)");
  encode->add_option("--mode", enc_mode, "gray | binary");
  encode->add_option("--tau", enc_tau, "embedding delay");
  encode->add_option("--eps-quantile", enc_eps, "binary threshold quantile");
  encode->add_option("--window-offset", enc_offset, "window start offset");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "cluster a feature file");
  std::string clu_features;
  std::string clu_algo;
  int clu_k = 0;
  std::uint64_t clu_seed = 0;
  std::string clu_sigma = "median";
  bool clu_standardize = false;
  std::string clu_out;
  cluster->add_option("--features", clu_features, "feature CSV")->required();
  cluster->add_option("--algo", clu_algo, "kmeans | kmedoids | spectral")->required();
  cluster->add_option("--k", clu_k, "cluster count (0 = number of labels)");
  cluster->add_option("--seed", clu_seed, "seed");
  cluster->add_option("--sigma", clu_sigma, "RBF sigma or 'median'");
  cluster->add_flag("--standardize", clu_standardize, "z-score features first");
  cluster->add_option("--out", clu_out, "assignments CSV path")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "fit a classifier on a feature file");
  std::string tr_features;
  std::string tr_algo;
  std::string tr_out;
  std::uint64_t tr_seed = 0;
  std::string tr_grid = "default";
  int tr_folds = 5;
  semtype::ModelSpec tr_overrides;
  train_cmd->add_option("--features", tr_features, "feature CSV")->required();
  train_cmd->add_option("--algo", tr_algo,
                        "logistic_regression | knn | decision_tree | random_forest | adaboost | svm")
      ->required();
  train_cmd->add_option("--out", tr_out, "model JSON path")->required();
  train_cmd->add_option("--seed", tr_seed, "seed");
  train_cmd->add_option("--grid", tr_grid, "default | small | none (use explicit flags)")
      ->check(CLI::IsMember({"default", "small", "none"}));
  train_cmd->add_option("--folds", tr_folds, "CV folds for the grid search");
  train_cmd->add_option("--knn-k", tr_overrides.knn_k, "KNN neighbours");
  train_cmd->add_option("--max-depth", tr_overrides.max_depth, "tree depth cap (0 = none)");
  train_cmd->add_option("--min-leaf", tr_overrides.min_leaf, "minimum samples per leaf");
  train_cmd->add_option("--trees", tr_overrides.n_trees, "forest size");
  train_cmd->add_option("--rounds", tr_overrides.n_rounds, "boosting rounds");
  train_cmd->add_option("--stump-depth", tr_overrides.stump_depth, "boosting weak-learner depth");
  train_cmd->add_option("--rate", tr_overrides.learning_rate, "learning rate");
  train_cmd->add_option("--epochs", tr_overrides.epochs, "epochs (lr/svm)");
  train_cmd->add_option("--lambda", tr_overrides.l2_lambda, "L2 strength");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a model on a feature file");
  std::string ev_model;
  std::string ev_features;
  std::string ev_out;
  std::string ev_per_class;
  eval_cmd->add_option("--model", ev_model, "model JSON")->required();
  eval_cmd->add_option("--features", ev_features, "feature CSV")->required();
  eval_cmd->add_option("--out", ev_out, "report JSON path")->required();
  eval_cmd->add_option("--per-class", ev_per_class, "optional per-class CSV path");

  // study
  auto* study = app.add_subcommand("study", "run the full comparative study from a config");
  std::string study_config;
  std::string study_out;
  study->add_option("--config", study_config, "run config file")->required();
  study->add_option("--out", study_out, "override the config's output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nrun with --help for usage\n";
    return kUsageError;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_out, synth_types, synth_files, synth_length, synth_seed, synth_gap);
    }
    if (ingest->parsed()) return cmd_ingest(ingest_flags, ingest_manifest, ingest_out, jobs);
    if (feat->parsed()) {
      return cmd_featurize(feat_flags, feat_family, feat_out, feat_dim, feat_mode, feat_tau,
                           feat_eps, feat_offset, feat_seed, feat_cd_samples, feat_cd_standardize,
                           jobs);
    }
    if (encode->parsed()) {
      return cmd_encode(enc_input, enc_out, enc_time, enc_value, enc_dim, enc_mode, enc_tau,
                        enc_eps, enc_offset);
    }
    if (cluster->parsed()) {
      return cmd_cluster(clu_features, clu_algo, clu_k, clu_seed, clu_sigma, clu_standardize,
                         clu_out);
    }
    if (train_cmd->parsed()) {
      return cmd_train(tr_features, tr_algo, tr_out, tr_seed, tr_grid, tr_folds, jobs,
                       tr_overrides);
    }
    if (eval_cmd->parsed()) return cmd_evaluate(ev_model, ev_features, ev_out, ev_per_class);
    if (study->parsed()) {
      return cmd_study(study_config, study_out, jobs_opt->count() > 0 ? jobs : 0);
    }
    std::cerr << "no subcommand selected\n";
    return kUsageError;
  } catch (const semtype::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
