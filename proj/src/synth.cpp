#include "semtype/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/rng.hpp"

namespace semtype {

const std::vector<std::string>& synth_type_names() {
  static const std::vector<std::string> names = {"temperature", "humidity", "brightness",
                                                 "motion", "power"};
  return names;
}

namespace {

Eigen::VectorXd gen_temperature(int n, Rng& rng) {
  const double base = rng.uniform(12.0, 26.0);
  const double amp = rng.uniform(2.0, 8.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double noise = rng.uniform(0.1, 0.5);
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) {
    v[t] = base + amp * std::sin(2.0 * std::numbers::pi * (t % 24) / 24.0 + phase) +
           noise * rng.normal();
  }
  return v;
}

Eigen::VectorXd gen_humidity(int n, Rng& rng) {
  const double mid = rng.uniform(45.0, 65.0);
  const double pull = rng.uniform(0.02, 0.08);
  const double step = rng.uniform(0.5, 2.0);
  double level = rng.uniform(40.0, 70.0);
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) {
    level += pull * (mid - level) + step * rng.normal();
    level = std::clamp(level, 20.0, 95.0);
    v[t] = level;
  }
  return v;
}

Eigen::VectorXd gen_brightness(int n, Rng& rng) {
  const double high = rng.uniform(150.0, 400.0);
  const double low = rng.uniform(0.0, 5.0);
  const double noise = rng.uniform(0.02, 0.08);
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) {
    const int hour = t % 24;
    const bool day = hour >= 8 && hour < 18;
    const double base = day ? high : low;
    v[t] = std::max(0.0, base * (1.0 + noise * rng.normal()) + (day ? 0.0 : std::abs(rng.normal())));
  }
  return v;
}

Eigen::VectorXd gen_motion(int n, Rng& rng) {
  const double rate = rng.uniform(0.02, 0.10);
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) {
    v[t] = rng.uniform01() < rate ? rng.uniform(0.5, 1.5) : 0.0;
  }
  return v;
}

Eigen::VectorXd gen_power(int n, Rng& rng) {
  const double base = rng.uniform(0.1, 1.0);
  const double peak = rng.uniform(1.0, 5.0);
  const double noise = rng.uniform(0.02, 0.10);
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) {
    const double ramp = static_cast<double>(t % 24) / 24.0;
    v[t] = base + peak * ramp + noise * peak * rng.normal();
  }
  return v;
}

}  // namespace

Eigen::VectorXd synth_series(const std::string& type, int length_hours, std::uint64_t seed) {
  Rng rng(seed);
  if (type == "temperature") return gen_temperature(length_hours, rng);
  if (type == "humidity") return gen_humidity(length_hours, rng);
  if (type == "brightness") return gen_brightness(length_hours, rng);
  if (type == "motion") return gen_motion(length_hours, rng);
  if (type == "power") return gen_power(length_hours, rng);
  raise(Err::BadSpec, "unknown generator type '" + type + "'");
}

SynthResult generate_synthetic_corpus(const SynthSpec& spec,
                                      const std::filesystem::path& out_dir) {
  if (spec.length_hours < 720) {
    raise(Err::BadSpec, "series length must be at least 720 hours");
  }
  if (spec.files_per_type < 1) raise(Err::BadSpec, "files per type must be positive");
  if (spec.types.empty()) raise(Err::BadSpec, "no generator types selected");
  for (const auto& type : spec.types) {
    const auto& known = synth_type_names();
    if (std::find(known.begin(), known.end(), type) == known.end()) {
      raise(Err::BadSpec, "unknown generator type '" + type + "'");
    }
  }
  std::filesystem::create_directories(out_dir);

  std::string sidecar = "filename,label\n";
  SynthResult result;
  for (const auto& type : spec.types) {
    for (int file = 0; file < spec.files_per_type; ++file) {
      const std::uint64_t file_seed =
          derive_seed(spec.seed, hash_str(type), static_cast<std::uint64_t>(file));
      const Eigen::VectorXd values = synth_series(type, spec.length_hours, file_seed);

      // Drop a few interior rows so ingest has real gaps to interpolate;
      // first and last rows always stay so the hourly grid keeps its span.
      Rng gap_rng(derive_seed(file_seed, 0x9a9));
      std::string body = "t,v\n";
      for (int t = 0; t < spec.length_hours; ++t) {
        const bool interior = t > 0 && t + 1 < spec.length_hours;
        if (interior && gap_rng.uniform01() < spec.gap_probability) continue;
        body += std::to_string(static_cast<long long>(t) * 3600) + "," +
                format_double(values[t], 10) + "\n";
      }

      char name[64];
      std::snprintf(name, sizeof(name), "%s_%03d.csv", type.c_str(), file);
      atomic_write_file(out_dir / name, body);
      sidecar += std::string(name) + "," + type + "\n";
      ++result.files_written;
    }
  }
  result.sidecar = out_dir / "labels.csv";
  atomic_write_file(result.sidecar, sidecar);
  return result;
}

}  // namespace semtype
