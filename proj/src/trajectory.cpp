#include "ictrl/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace ictrl {

Trajectory::Trajectory(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty())
    throw std::invalid_argument("Trajectory: no pieces");
  for (const Piece& piece : pieces_) {
    if (piece.times.size() != piece.states.size() || piece.times.empty())
      throw std::invalid_argument("Trajectory: malformed piece");
  }
}

const Vector& Trajectory::left_limit(int k) const {
  if (k < 1 || k >= piece_count())
    throw std::invalid_argument("Trajectory::left_limit: index out of range");
  return pieces_[k - 1].states.back();
}

const Vector& Trajectory::right_limit(int k) const {
  if (k < 1 || k >= piece_count())
    throw std::invalid_argument("Trajectory::right_limit: index out of range");
  return pieces_[k].states.front();
}

namespace {

// Barycentric-form Lagrange evaluation through the given window.
Vector lagrange_eval(const std::vector<double>& times,
                     const std::vector<Vector>& states, int lo, int hi,
                     double t) {
  Vector acc = Vector::Zero(states[lo].size());
  for (int i = lo; i <= hi; ++i) {
    double w = 1.0;
    for (int j = lo; j <= hi; ++j) {
      if (j == i) continue;
      w *= (t - times[j]) / (times[i] - times[j]);
    }
    acc += w * states[i];
  }
  return acc;
}

}  // namespace

Vector Trajectory::value(double t) const {
  const double t0 = pieces_.front().t_begin;
  const double tb = pieces_.back().t_end;
  const double slack = 1e-12 * std::max(1.0, std::abs(tb));
  if (t < t0 - slack || t > tb + slack)
    throw std::invalid_argument("Trajectory::value: time out of range");
  t = std::clamp(t, t0, tb);

  // Left-limit convention: t in (t_k, t_{k+1}] belongs to piece k.
  int pk = 0;
  while (pk + 1 < piece_count() && t > pieces_[pk].t_end) ++pk;
  const Piece& piece = pieces_[pk];
  const std::vector<double>& times = piece.times;

  // Exact node hit (keeps emitted samples reproducible bit for bit).
  const double teps = 1e-13 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(times.begin(), times.end(), t - teps);
  if (it != times.end() && std::abs(*it - t) <= teps)
    return piece.states[static_cast<int>(it - times.begin())];

  int lo = 0, hi = static_cast<int>(times.size()) - 1;
  if (!piece.panel_edges.empty()) {
    // Quadrature piece: interpolate within the panel that contains t.
    // Stored nodes per panel: edge, interior Gauss nodes, next edge.
    const std::vector<double>& edges = piece.panel_edges;
    int j = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), t) -
                             edges.begin()) -
            1;
    j = std::clamp(j, 0, static_cast<int>(edges.size()) - 2);
    const int per_panel =
        (static_cast<int>(times.size()) - 1) / (static_cast<int>(edges.size()) - 1);
    lo = j * per_panel;
    hi = lo + per_panel;
  } else {
    // Uniform-step piece: centered window of up to 6 nodes.
    int idx = static_cast<int>(
        std::upper_bound(times.begin(), times.end(), t) - times.begin());
    lo = std::max(0, idx - 3);
    hi = std::min(static_cast<int>(times.size()) - 1, lo + 5);
    lo = std::max(0, hi - 5);
  }
  return lagrange_eval(times, piece.states, lo, hi, t);
}

double Trajectory::sup_distance(const Trajectory& other) const {
  if (piece_count() != other.piece_count())
    throw std::invalid_argument("sup_distance: piece layouts differ");
  double sup = 0.0;
  for (int k = 0; k < piece_count(); ++k) {
    const Piece& a = pieces_[k];
    const Piece& b = other.pieces_[k];
    if (a.states.size() != b.states.size())
      throw std::invalid_argument("sup_distance: node layouts differ");
    for (std::size_t i = 0; i < a.states.size(); ++i)
      sup = std::max(sup,
                     (a.states[i] - b.states[i]).lpNorm<Eigen::Infinity>());
  }
  return sup;
}

double Trajectory::sup_norm() const {
  double sup = 0.0;
  for (const Piece& piece : pieces_)
    for (const Vector& x : piece.states)
      sup = std::max(sup, x.lpNorm<Eigen::Infinity>());
  return sup;
}

bool Trajectory::all_finite() const {
  for (const Piece& piece : pieces_)
    for (const Vector& x : piece.states)
      if (!x.allFinite()) return false;
  return true;
}

Trajectory Trajectory::blend(const Trajectory& other, double theta) const {
  if (theta == 1.0) return other;
  std::vector<Piece> mixed = other.pieces_;
  for (int k = 0; k < piece_count(); ++k)
    for (std::size_t i = 0; i < mixed[k].states.size(); ++i)
      mixed[k].states[i] =
          (1.0 - theta) * pieces_[k].states[i] + theta * mixed[k].states[i];
  return Trajectory(std::move(mixed));
}

}  // namespace ictrl
