#include "semtype/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "semtype/error.hpp"

namespace semtype {

RecurrenceMode parse_recurrence_mode(const std::string& name) {
  if (name == "gray" || name == "grayscale") return RecurrenceMode::Grayscale;
  if (name == "binary") return RecurrenceMode::Binary;
  raise(Err::BadSpec, "unknown recurrence mode '" + name + "'");
}

std::string to_string(RecurrenceMode mode) {
  return mode == RecurrenceMode::Grayscale ? "gray" : "binary";
}

Eigen::VectorXd select_window(const RegularSeries& series, int length, int offset) {
  if (length < 2) raise(Err::BadSpec, "window length must be at least 2");
  if (offset < 0) raise(Err::BadSpec, "window offset must be non-negative");
  if (series.values.size() < static_cast<Eigen::Index>(offset) + length) {
    raise(Err::SeriesTooShort, series.device_id + ": " + std::to_string(series.values.size()) +
                                   " points, window needs " + std::to_string(offset + length));
  }
  return series.values.segment(offset, length);
}

Trajectory embed(const Eigen::VectorXd& window, int delay) {
  if (delay < 1) raise(Err::BadSpec, "embedding delay must be positive");
  const Eigen::Index len = window.size();
  if (len <= delay) raise(Err::WindowTooShort, "window shorter than embedding delay");
  const Eigen::Index n = len - delay;
  Trajectory traj;
  traj.delay = delay;
  traj.points.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    traj.points(i, 0) = window[i];
    traj.points(i, 1) = window[i + delay];
  }
  return traj;
}

RecurrenceImage recurrence(const Trajectory& traj, RecurrenceMode mode, double eps_quantile) {
  const Eigen::Index n = traj.points.rows();
  if (n < 2) raise(Err::DegenerateTrajectory, "trajectory needs at least 2 points");

  RecurrenceImage img;
  img.mode = mode;
  img.cells.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    img.cells(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = traj.points(i, 0) - traj.points(j, 0);
      const double dy = traj.points(i, 1) - traj.points(j, 1);
      const double dist = std::sqrt(dx * dx + dy * dy);
      img.cells(i, j) = dist;
      img.cells(j, i) = dist;
    }
  }
  if (mode == RecurrenceMode::Binary) {
    if (!(eps_quantile > 0.0 && eps_quantile < 1.0)) {
      raise(Err::BadSpec, "eps quantile must lie in (0, 1)");
    }
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) dists.push_back(img.cells(i, j));
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t idx = std::min(
        dists.size() - 1,
        static_cast<std::size_t>(std::floor(eps_quantile * static_cast<double>(dists.size()))));
    img.epsilon = dists[idx];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        // theta(eps - d) with theta(0) = 1
        img.cells(i, j) = img.cells(i, j) <= img.epsilon ? 1.0 : 0.0;
      }
    }
  }
  return img;
}

Eigen::MatrixXd downsample(const Eigen::MatrixXd& image, int d) {
  const Eigen::Index n = image.rows();
  if (image.cols() != n) raise(Err::BadDimension, "image must be square");
  if (d < 2 || static_cast<Eigen::Index>(d) > n) {
    raise(Err::BadDimension, "target dimension must lie in [2, N]");
  }
  const Eigen::Index base = n / d;
  const Eigen::Index extra = n % d;  // first `extra` blocks take base + 1

  std::vector<Eigen::Index> starts(static_cast<std::size_t>(d) + 1, 0);
  for (Eigen::Index b = 0; b < d; ++b) {
    starts[static_cast<std::size_t>(b) + 1] =
        starts[static_cast<std::size_t>(b)] + base + (b < extra ? 1 : 0);
  }

  Eigen::MatrixXd out(d, d);
  for (Eigen::Index br = 0; br < d; ++br) {
    for (Eigen::Index bc = 0; bc < d; ++bc) {
      const Eigen::Index r0 = starts[static_cast<std::size_t>(br)];
      const Eigen::Index c0 = starts[static_cast<std::size_t>(bc)];
      const Eigen::Index rows = starts[static_cast<std::size_t>(br) + 1] - r0;
      const Eigen::Index cols = starts[static_cast<std::size_t>(bc) + 1] - c0;
      out(br, bc) = image.block(r0, c0, rows, cols).mean();
    }
  }
  return out;
}

IetsVector iets_vector(const RegularSeries& series, const IetsParams& params) {
  const Eigen::VectorXd window =
      select_window(series, params.window_length, params.window_offset);
  const Trajectory traj = embed(window, params.delay);
  const RecurrenceImage img = recurrence(traj, params.mode, params.eps_quantile);
  const Eigen::MatrixXd small = downsample(img.cells, params.dim);

  IetsVector out;
  out.dim = params.dim;
  out.mode = params.mode;
  out.delay = params.delay;
  out.window_offset = params.window_offset;
  out.values.resize(static_cast<Eigen::Index>(params.dim) * params.dim);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < small.rows(); ++r) {
    for (Eigen::Index c = 0; c < small.cols(); ++c) out.values[k++] = small(r, c);
  }
  return out;
}

std::string render_pgm(const Eigen::MatrixXd& matrix) {
  const Eigen::Index rows = matrix.rows();
  const Eigen::Index cols = matrix.cols();
  if (rows == 0 || cols == 0) raise(Err::EmptyMatrix, "cannot render an empty matrix");

  const double lo = matrix.minCoeff();
  const double hi = matrix.maxCoeff();
  const double range = hi - lo;

  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(rows * cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      // min -> 255 (white), max -> 0 (large distances dark)
      const double px =
          range > 0.0 ? 255.0 * (hi - matrix(r, c)) / range : 255.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(px))));
    }
  }
  return out;
}

}  // namespace semtype
