#include "ictrl/semigroup.hpp"

#include <cmath>

namespace ictrl {

namespace {

double one_norm(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Matrix matrix_exponential(const Matrix& a) {
  require(a.rows() == a.cols(), "matrix_exponential: matrix must be square");
  require(a.allFinite(), "matrix_exponential: non-finite entries");
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);

  // Scaling threshold for the degree-13 approximant.
  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  Matrix as = a;
  const double nrm = one_norm(a);
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    as = a / std::ldexp(1.0, squarings);
  }

  static const double b[14] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix f = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) f = f * f;
  return f;
}

SemigroupModel SemigroupModel::dense(Matrix generator) {
  require(generator.rows() == generator.cols() && generator.rows() > 0,
          "SemigroupModel::dense: generator must be square and non-empty");
  require(generator.allFinite(), "SemigroupModel::dense: non-finite generator");
  SemigroupModel m;
  m.kind_ = SemigroupKind::dense;
  m.dim_ = static_cast<int>(generator.rows());
  m.generator_ = std::move(generator);
  m.metric_sqrt_ = Vector::Ones(m.dim_);
  return m;
}

SemigroupModel SemigroupModel::spectral(Vector eigenvalues) {
  require(eigenvalues.size() > 0, "SemigroupModel::spectral: empty spectrum");
  require(eigenvalues.allFinite(),
          "SemigroupModel::spectral: non-finite eigenvalues");
  SemigroupModel m;
  m.kind_ = SemigroupKind::spectral;
  m.dim_ = static_cast<int>(eigenvalues.size());
  m.eigenvalues_ = std::move(eigenvalues);
  m.metric_sqrt_ = Vector::Ones(m.dim_);
  return m;
}

SemigroupModel SemigroupModel::wave(int modes) {
  require(modes >= 1, "SemigroupModel::wave: need at least one mode");
  SemigroupModel m;
  m.kind_ = SemigroupKind::wave;
  m.modes_ = modes;
  m.dim_ = 2 * modes;
  m.metric_sqrt_ = Vector::Ones(m.dim_);
  for (int k = 0; k < modes; ++k) m.metric_sqrt_[2 * k] = k + 1.0;
  return m;
}

const Matrix& SemigroupModel::generator() const {
  require(kind_ == SemigroupKind::dense,
          "SemigroupModel::generator: not a dense model");
  return generator_;
}

const Vector& SemigroupModel::eigenvalues() const {
  require(kind_ == SemigroupKind::spectral,
          "SemigroupModel::eigenvalues: not a spectral model");
  return eigenvalues_;
}

int SemigroupModel::mode_count() const {
  require(kind_ == SemigroupKind::wave,
          "SemigroupModel::mode_count: not a wave model");
  return modes_;
}

double SemigroupModel::inner(const Vector& x, const Vector& y) const {
  require(x.size() == dim_ && y.size() == dim_,
          "SemigroupModel::inner: dimension mismatch");
  return (metric_sqrt_.array().square() * x.array() * y.array()).sum();
}

double SemigroupModel::norm(const Vector& x) const {
  require(x.size() == dim_, "SemigroupModel::norm: dimension mismatch");
  return (metric_sqrt_.array() * x.array()).matrix().norm();
}

namespace {

void check_evolve_args(int dim, double dt, const Vector& x) {
  require(dt >= 0.0 && std::isfinite(dt),
          "evolve: dt must be finite and nonnegative");
  require(x.size() == dim, "evolve: dimension mismatch");
  require(x.allFinite(), "evolve: non-finite input");
}

}  // namespace

Vector SemigroupModel::evolve(double dt, const Vector& x) const {
  check_evolve_args(dim_, dt, x);
  switch (kind_) {
    case SemigroupKind::dense:
      return matrix_exponential(generator_ * dt) * x;
    case SemigroupKind::spectral:
      return ((eigenvalues_.array() * dt).exp() * x.array()).matrix();
    case SemigroupKind::wave: {
      Vector y(dim_);
      for (int k = 0; k < modes_; ++k) {
        const double m = k + 1.0;
        const double c = std::cos(m * dt);
        const double s = std::sin(m * dt);
        const double alpha = x[2 * k];
        const double beta = x[2 * k + 1];
        y[2 * k] = c * alpha + (s / m) * beta;
        y[2 * k + 1] = -m * s * alpha + c * beta;
      }
      return y;
    }
  }
  throw std::logic_error("unreachable");
}

Vector SemigroupModel::evolve_adjoint(double dt, const Vector& x) const {
  check_evolve_args(dim_, dt, x);
  switch (kind_) {
    case SemigroupKind::dense:
      return matrix_exponential(generator_.transpose() * dt) * x;
    case SemigroupKind::spectral:
      return ((eigenvalues_.array() * dt).exp() * x.array()).matrix();
    case SemigroupKind::wave: {
      // G^{-1} S(t)^T G = S(-t): the weighted adjoint is the inverse
      // rotation of each mode block.
      Vector y(dim_);
      for (int k = 0; k < modes_; ++k) {
        const double m = k + 1.0;
        const double c = std::cos(m * dt);
        const double s = std::sin(m * dt);
        const double alpha = x[2 * k];
        const double beta = x[2 * k + 1];
        y[2 * k] = c * alpha - (s / m) * beta;
        y[2 * k + 1] = m * s * alpha + c * beta;
      }
      return y;
    }
  }
  throw std::logic_error("unreachable");
}

Matrix SemigroupModel::evolve_matrix(double dt) const {
  require(dt >= 0.0 && std::isfinite(dt),
          "evolve_matrix: dt must be finite and nonnegative");
  switch (kind_) {
    case SemigroupKind::dense:
      return matrix_exponential(generator_ * dt);
    case SemigroupKind::spectral:
      return (eigenvalues_.array() * dt).exp().matrix().asDiagonal();
    case SemigroupKind::wave: {
      Matrix s = Matrix::Zero(dim_, dim_);
      for (int k = 0; k < modes_; ++k) {
        const double m = k + 1.0;
        const double c = std::cos(m * dt);
        const double sn = std::sin(m * dt);
        s(2 * k, 2 * k) = c;
        s(2 * k, 2 * k + 1) = sn / m;
        s(2 * k + 1, 2 * k) = -m * sn;
        s(2 * k + 1, 2 * k + 1) = c;
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

Matrix SemigroupModel::evolve_adjoint_matrix(double dt) const {
  switch (kind_) {
    case SemigroupKind::dense:
      return evolve_matrix(dt).transpose();
    case SemigroupKind::spectral:
      return evolve_matrix(dt);
    case SemigroupKind::wave: {
      Matrix s = Matrix::Zero(dim_, dim_);
      for (int k = 0; k < modes_; ++k) {
        const double m = k + 1.0;
        const double c = std::cos(m * dt);
        const double sn = std::sin(m * dt);
        s(2 * k, 2 * k) = c;
        s(2 * k, 2 * k + 1) = -sn / m;
        s(2 * k + 1, 2 * k) = m * sn;
        s(2 * k + 1, 2 * k + 1) = c;
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

Vector SemigroupModel::apply_generator(const Vector& x) const {
  require(x.size() == dim_, "apply_generator: dimension mismatch");
  switch (kind_) {
    case SemigroupKind::dense:
      return generator_ * x;
    case SemigroupKind::spectral:
      return (eigenvalues_.array() * x.array()).matrix();
    case SemigroupKind::wave: {
      // Per mode: a' = b, b' = -m^2 a.
      Vector y(dim_);
      for (int k = 0; k < modes_; ++k) {
        const double m = k + 1.0;
        y[2 * k] = x[2 * k + 1];
        y[2 * k + 1] = -m * m * x[2 * k];
      }
      return y;
    }
  }
  throw std::logic_error("unreachable");
}

Matrix SemigroupModel::adjoint_of(const Matrix& m) const {
  require(m.rows() == dim_ && m.cols() == dim_,
          "adjoint_of: dimension mismatch");
  const Vector g2 = metric_sqrt_.array().square().matrix();
  return g2.cwiseInverse().asDiagonal() * m.transpose() * g2.asDiagonal();
}

}  // namespace ictrl
