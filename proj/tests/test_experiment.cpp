#include <doctest.h>

#include <filesystem>
#include <vector>

#include "oracles.hpp"
#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/experiment.hpp"
#include "semtype/rng.hpp"
#include "semtype/synth.hpp"
#include "semtype/ttest.hpp"

using namespace semtype;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("semtype_exp_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + "\n" + read_file(f);
  return all;
}

}  // namespace

TEST_CASE("welch t-test") {
  SUBCASE("identical samples are never significant") {
    const std::vector<double> s = {0.7, 0.7, 0.7, 0.7, 0.7};
    CHECK_FALSE(significance_mark(s, s));
  }
  SUBCASE("extreme separation with jitter is significant") {
    std::vector<double> a;
    std::vector<double> b;
    Rng rng(1);
    for (int i = 0; i < 5; ++i) {
      a.push_back(0.9 + 1e-6 * rng.normal());
      b.push_back(0.5 + 1e-6 * rng.normal());
    }
    CHECK(significance_mark(a, b));
    CHECK_FALSE(significance_mark(b, a));  // direction matters
  }
  SUBCASE("p-values match the Simpson-integrated t CDF") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> a;
      std::vector<double> b;
      const int na = 4 + static_cast<int>(rng.uniform_int(8));
      const int nb = 4 + static_cast<int>(rng.uniform_int(8));
      for (int i = 0; i < na; ++i) a.push_back(rng.normal());
      for (int i = 0; i < nb; ++i) b.push_back(0.4 + 1.3 * rng.normal());
      const WelchResult r = welch_t_test(a, b);
      const double oracle_p = 2.0 * (1.0 - oracles::t_cdf_simpson(std::abs(r.t), r.df));
      REQUIRE(std::abs(r.p - oracle_p) <= 1e-3);
    }
  }
  SUBCASE("t cdf sanity") {
    CHECK(student_t_cdf(0.0, 7.0) == doctest::Approx(0.5));
    CHECK(student_t_cdf(100.0, 5.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(student_t_cdf(-2.0, 9.0) ==
          doctest::Approx(oracles::t_cdf_simpson(-2.0, 9.0)).epsilon(1e-6));
  }
  SUBCASE("too few samples") {
    CHECK_THROWS_AS(welch_t_test({1.0}, {1.0, 2.0}), Error);
  }
}

TEST_CASE("synthetic corpus generation") {
  SUBCASE("counts and sidecar") {
    const fs::path dir = fresh_dir("counts");
    SynthSpec spec;
    spec.types = synth_type_names();
    spec.files_per_type = 4;
    spec.length_hours = 720;
    spec.seed = 5;
    const SynthResult result = generate_synthetic_corpus(spec, dir);
    CHECK(result.files_written == 20);
    CHECK(fs::exists(result.sidecar));

    const Corpus corpus = load_corpus(dir, FormatSpec{}, LabelRule::from_sidecar(result.sidecar));
    CHECK(corpus.series.size() == 20);
    CHECK(corpus.labels.size() == 5);
    for (const auto& series : corpus.series) CHECK(series.values.size() == 720);
  }
  SUBCASE("same seed twice is byte-identical") {
    SynthSpec spec;
    spec.types = {"temperature", "motion"};
    spec.files_per_type = 3;
    spec.length_hours = 725;
    spec.seed = 77;
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    generate_synthetic_corpus(spec, a);
    generate_synthetic_corpus(spec, b);
    CHECK(slurp_dir(a) == slurp_dir(b));
  }
  SUBCASE("temperature autocorrelation peaks at lag 24") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Eigen::VectorXd series = synth_series("temperature", 960, seed);
      std::vector<double> v(series.data(), series.data() + series.size());
      int best_lag = 2;
      double best = -2.0;
      for (int lag = 2; lag <= 48; ++lag) {
        const double ac = oracles::autocorrelation(v, lag);
        if (ac > best) {
          best = ac;
          best_lag = lag;
        }
      }
      CHECK(best_lag == 24);
    }
  }
  SUBCASE("length below the window is rejected") {
    SynthSpec spec;
    spec.types = {"power"};
    spec.length_hours = 500;
    try {
      generate_synthetic_corpus(spec, fresh_dir("short"));
      FAIL("expected BadSpec");
    } catch (const Error& e) {
      CHECK(e.code() == Err::BadSpec);
    }
  }
}

TEST_CASE("run config parsing") {
  SUBCASE("round trip of a full config") {
    const std::string text =
        "# demo\n"
        "corpus = data\n"
        "labels = data/labels.csv\n"
        "families = df,iets8\n"
        "algorithms = knn,adaboost\n"
        "fractions = 0.5,0.2\n"
        "repeats = 3\n"
        "seed = 9\n"
        "grid = small\n"
        "out = out\n"
        "jobs = 2\n";
    const RunConfig config = parse_run_config(text, "/base");
    CHECK(config.corpus_dir == fs::path("/base/data"));
    CHECK(config.families == std::vector<std::string>{"df", "iets8"});
    CHECK(config.algorithms.size() == 2);
    CHECK(config.fractions == std::vector<double>{0.5, 0.2});
    CHECK(config.repeats == 3);
    CHECK(config.seed == 9);
    CHECK(config.grid_preset == "small");
    CHECK(config.jobs == 2);
    CHECK(!config.echo().empty());
  }
  SUBCASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(parse_run_config("corpus = a\nout = b\nbogus = 1\n", "."), Error);
    CHECK_THROWS_AS(parse_run_config("corpus = a\nout = b\nfractions = 1.5\n", "."), Error);
    CHECK_THROWS_AS(parse_run_config("corpus = a\nout = b\nfamilies = iets9\n", "."), Error);
    CHECK_THROWS_AS(parse_run_config("out = b\n", "."), Error);
  }
}

TEST_CASE("feature study on a small corpus") {
  const fs::path corpus_dir = fresh_dir("study_corpus");
  SynthSpec synth;
  synth.types = synth_type_names();
  synth.files_per_type = 12;
  synth.length_hours = 730;
  synth.seed = 3;
  generate_synthetic_corpus(synth, corpus_dir);

  RunConfig config;
  config.corpus_dir = corpus_dir;
  config.label_sidecar = corpus_dir / "labels.csv";
  config.families = {"df"};
  config.algorithms = {Algorithm::Knn, Algorithm::DecisionTree};
  config.fractions = {0.5};
  config.repeats = 2;
  config.seed = 31;
  config.grid_preset = "fixed";
  config.cv_folds = 3;
  config.jobs = 2;
  config.out_dir = fresh_dir("study_out");

  const Corpus corpus =
      load_corpus(corpus_dir, FormatSpec{}, LabelRule::from_sidecar(config.label_sidecar), 2);

  SUBCASE("cells carry per-repeat samples and aggregates") {
    const auto cells = run_feature_study(config, corpus);
    REQUIRE(cells.size() == 2);
    for (const auto& cell : cells) {
      CHECK(cell.accuracies.size() == 2);
      CHECK(cell.mean_accuracy >= 0.0);
      CHECK(cell.mean_accuracy <= 1.0);
      CHECK(cell.mean_accuracy > 0.5);  // the corpus is learnable
    }
  }
  SUBCASE("repeats = 1 reports zero stdev") {
    RunConfig one = config;
    one.repeats = 1;
    const auto cells = run_feature_study(one, corpus);
    for (const auto& cell : cells) CHECK(cell.std_accuracy == 0.0);
  }
  SUBCASE("same master seed twice gives identical cells, any job count") {
    const auto a = run_feature_study(config, corpus);
    RunConfig serial = config;
    serial.jobs = 1;
    const auto b = run_feature_study(serial, corpus);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].accuracies == b[i].accuracies);
      CHECK(a[i].macro_fs == b[i].macro_fs);
      CHECK(a[i].chosen_specs == b[i].chosen_specs);
    }
  }
  SUBCASE("cluster study produces the three algorithms") {
    const auto cells = run_cluster_study(config, corpus);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].algorithm == "spectral");
    for (const auto& cell : cells) {
      CHECK(cell.purity > 0.2);
      CHECK(cell.purity <= 1.0);
      CHECK(cell.entropy >= 0.0);
    }
  }
  SUBCASE("full run_study writes a reproducible report") {
    RunConfig run_a = config;
    run_a.out_dir = fresh_dir("report_a");
    run_a.pgm_samples = 2;
    RunConfig run_b = config;
    run_b.out_dir = fresh_dir("report_b");
    run_b.pgm_samples = 2;
    run_b.jobs = 1;

    const StudyReport rep_a = run_study(run_a);
    const StudyReport rep_b = run_study(run_b);
    CHECK(rep_a.instances == 60);
    CHECK(read_file(run_a.out_dir / "report.json") == read_file(run_b.out_dir / "report.json"));
    CHECK(slurp_dir(run_a.out_dir) == slurp_dir(run_b.out_dir));
    CHECK(fs::exists(run_a.out_dir / "methods_table.csv"));
    CHECK(fs::exists(run_a.out_dir / "macro_f_table.csv"));
    CHECK(fs::exists(run_a.out_dir / "cluster_table.csv"));
  }
}
