#pragma once

#include <Eigen/Core>
#include <string>

#include "semtype/series.hpp"

namespace semtype {

constexpr int kIetsWindow = 720;  // one month of hourly observations

// 2-D delay embedding of a window: point i is (w_i, w_{i+tau}).
struct Trajectory {
  Eigen::MatrixX2d points;
  int delay = 1;
  static constexpr int kEmbeddingDim = 2;
};

enum class RecurrenceMode { Grayscale, Binary };

RecurrenceMode parse_recurrence_mode(const std::string& name);  // "gray" | "binary"
std::string to_string(RecurrenceMode mode);

// Square matrix of pairwise trajectory distances, either raw (grayscale) or
// thresholded to {0,1} with a quantile-chosen epsilon.
struct RecurrenceImage {
  Eigen::MatrixXd cells;
  RecurrenceMode mode = RecurrenceMode::Grayscale;
  double epsilon = 0.0;  // meaningful in binary mode only
};

struct IetsVector {
  int dim = 0;  // side length d; vector length is d*d
  Eigen::VectorXd values;
  RecurrenceMode mode = RecurrenceMode::Grayscale;
  int delay = 1;
  int window_offset = 0;
};

struct IetsParams {
  int dim = 8;  // one of 8, 16, 32, 48
  RecurrenceMode mode = RecurrenceMode::Grayscale;
  int delay = 1;
  double eps_quantile = 0.1;
  int window_offset = 0;
  int window_length = kIetsWindow;
};

// The fixed-length window an encoding is computed from: values
// [offset, offset + length). Shorter series are rejected so they can be
// excluded from IETS experiments rather than padded.
Eigen::VectorXd select_window(const RegularSeries& series, int length = kIetsWindow,
                              int offset = 0);

Trajectory embed(const Eigen::VectorXd& window, int delay = 1);

// Pairwise Euclidean distances between trajectory points. Binary mode
// thresholds at the eps_quantile-quantile of the off-diagonal distances,
// with the Heaviside boundary fixed at theta(0) = 1.
RecurrenceImage recurrence(const Trajectory& traj, RecurrenceMode mode = RecurrenceMode::Grayscale,
                           double eps_quantile = 0.1);

// Mean-pools the image into d x d near-equal contiguous blocks: the first
// (N mod d) blocks along each axis take the extra element.
Eigen::MatrixXd downsample(const Eigen::MatrixXd& image, int d);

// Full pipeline window -> embed -> recurrence -> downsample -> row-major
// flatten.
IetsVector iets_vector(const RegularSeries& series, const IetsParams& params = {});

// Binary PGM (P5), maxval 255, min-max normalized with small values white
// and large distances dark. A constant matrix renders all-white.
std::string render_pgm(const Eigen::MatrixXd& matrix);

}  // namespace semtype
