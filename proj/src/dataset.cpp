#include "semtype/dataset.hpp"

#include <sstream>

#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/parallel.hpp"
#include "semtype/similarity.hpp"

namespace semtype {

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
    raise(Err::LengthMismatch, "label count does not match feature rows");
  }
  for (const int label : y) {
    if (label < 0 || label >= num_classes()) raise(Err::LabelOutOfRange, "label id out of range");
  }
}

Dataset df_dataset(const Corpus& corpus, const StationarityParams& params) {
  Dataset out;
  out.family = "df";
  out.class_names = corpus.labels.names();
  out.X.resize(static_cast<Eigen::Index>(corpus.series.size()), DfVector::kDim);
  for (std::size_t i = 0; i < corpus.series.size(); ++i) {
    const auto& series = corpus.series[i];
    out.X.row(static_cast<Eigen::Index>(i)) = describe(series, params).as_vector().transpose();
    out.y.push_back(series.label_id);
    out.instance_ids.push_back(series.device_id);
  }
  return out;
}

IetsDataset iets_dataset(const Corpus& corpus, const IetsParams& params, int jobs) {
  const Eigen::Index min_len =
      static_cast<Eigen::Index>(params.window_offset) + params.window_length;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.series.size(); ++i) {
    if (corpus.series[i].values.size() >= min_len) eligible.push_back(i);
  }

  IetsDataset out;
  out.eligible = eligible.size();
  out.excluded = corpus.series.size() - eligible.size();
  out.data.family = "iets" + std::to_string(params.dim);
  out.data.class_names = corpus.labels.names();
  const Eigen::Index dim2 = static_cast<Eigen::Index>(params.dim) * params.dim;
  out.data.X.resize(static_cast<Eigen::Index>(eligible.size()), dim2);
  out.data.y.resize(eligible.size());
  out.data.instance_ids.resize(eligible.size());

  parallel_for(eligible.size(), jobs, [&](std::size_t slot) {
    const auto& series = corpus.series[eligible[slot]];
    out.data.X.row(static_cast<Eigen::Index>(slot)) =
        iets_vector(series, params).values.transpose();
    out.data.y[slot] = series.label_id;
    out.data.instance_ids[slot] = series.device_id;
  });
  return out;
}

Dataset cd_dataset(const Dataset& df, std::uint64_t seed, int samples_per_label,
                   bool standardize) {
  df.validate();
  Eigen::MatrixXd base = df.X;
  if (standardize) {
    for (Eigen::Index c = 0; c < base.cols(); ++c) {
      const double mean = base.col(c).mean();
      const double sd = std::sqrt((base.col(c).array() - mean).square().mean());
      if (sd > 0.0) base.col(c) = (base.col(c).array() - mean) / sd;
    }
  }
  const SignatureSet sigs =
      build_signatures(base, df.y, df.num_classes(), samples_per_label, seed);
  Dataset out;
  out.family = "cd";
  out.class_names = df.class_names;
  out.y = df.y;
  out.instance_ids = df.instance_ids;
  out.X = cd_features(base, sigs);
  return out;
}

std::string dataset_to_csv(const Dataset& data) {
  data.validate();
  std::string out = "instance_id,label";
  for (Eigen::Index c = 0; c < data.cols(); ++c) out += ",f" + std::to_string(c);
  out += "\n";
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const std::size_t i = static_cast<std::size_t>(r);
    const std::string id =
        i < data.instance_ids.size() ? data.instance_ids[i] : std::to_string(i);
    out += id + "," + data.class_names[static_cast<std::size_t>(data.y[i])];
    for (Eigen::Index c = 0; c < data.cols(); ++c) out += "," + format_double(data.X(r, c));
    out += "\n";
  }
  return out;
}

Dataset dataset_from_csv(const std::string& csv, const std::string& family) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) raise(Err::EmptyFile, "feature file has no header");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "instance_id" || trim(header[1]) != "label") {
    raise(Err::MalformedHeader, "expected header instance_id,label,f0,...");
  }
  const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 2;

  std::vector<std::string> ids;
  std::vector<std::string> label_names;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split_csv_line(line);
    if (static_cast<Eigen::Index>(cols.size()) != d + 2) {
      raise(Err::LengthMismatch, "feature row has wrong column count");
    }
    std::vector<double> row(static_cast<std::size_t>(d));
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto v = parse_double(cols[static_cast<std::size_t>(c) + 2]);
      if (!v) raise(Err::LengthMismatch, "unparseable feature value");
      row[static_cast<std::size_t>(c)] = *v;
    }
    ids.push_back(trim(cols[0]));
    label_names.push_back(trim(cols[1]));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(Err::EmptyFile, "feature file has no rows");

  const LabelTable table = LabelTable::from_names(label_names);
  Dataset out;
  out.family = family;
  out.class_names = table.names();
  out.instance_ids = std::move(ids);
  out.X.resize(static_cast<Eigen::Index>(rows.size()), d);
  out.y.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      out.X(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
    out.y[r] = table.id_of(label_names[r]);
  }
  return out;
}

}  // namespace semtype
