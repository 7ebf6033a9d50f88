#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cbert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Named view of one parameter tensor, used by the optimizer, the serializer
// and the gradient checker. `data` is the Eigen-owned column-major storage.
struct ParamView {
  std::string name;
  double* data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline double gelu_derivative(double x) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * 3.14159265358979323846);
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * std::exp(-0.5 * x * x) * inv_sqrt_2pi;
}

// Numerically stable softmax of a vector (max-shifted).
inline Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp();
  return e / e.sum();
}

// In-place row-wise softmax of a matrix.
inline void softmax_rows(Matrix& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp();
    z.row(r) /= z.row(r).sum();
  }
}

// Inverted dropout: keeps each entry with probability 1-rate and scales by
// 1/(1-rate), so the expectation is unchanged. A null rng means "identity"
// (evaluation mode, or gradient checking).
inline Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                           std::mt19937_64* rng) {
  if (rng == nullptr || rate <= 0.0) return Matrix::Ones(rows, cols);
  const double keep = 1.0 - rate;
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double u =
          static_cast<double>((*rng)() >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
      m(r, c) = u < keep ? 1.0 / keep : 0.0;
    }
  return m;
}

}  // namespace cbert
