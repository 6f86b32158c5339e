#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace semtype {

// The five built-in generator types, each imitating a BMS device family
// with per-file parameters drawn from the seeded stream.
//   temperature - daily sinusoid plus noise
//   humidity    - mean-reverting bounded random walk
//   brightness  - day/night square wave plus noise
//   motion      - sparse random spikes on a zero baseline
//   power       - daily sawtooth load profile plus noise
const std::vector<std::string>& synth_type_names();

struct SynthSpec {
  std::vector<std::string> types;  // subset of synth_type_names()
  int files_per_type = 40;
  int length_hours = 800;
  std::uint64_t seed = 0;
  double gap_probability = 0.01;  // chance an interior hourly row is dropped
};

// One generated series (hourly values before any row-dropping).
Eigen::VectorXd synth_series(const std::string& type, int length_hours, std::uint64_t seed);

struct SynthResult {
  std::size_t files_written = 0;
  std::filesystem::path sidecar;  // labels.csv
};

// Writes `files_per_type` CSVs per type plus a `labels.csv` sidecar into
// out_dir. Byte-identical for identical specs.
SynthResult generate_synthetic_corpus(const SynthSpec& spec,
                                      const std::filesystem::path& out_dir);

}  // namespace semtype
