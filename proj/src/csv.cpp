#include "ictrl/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ictrl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void write_state_row(std::ofstream& out, double t, const char* side,
                     const Vector& x) {
  out << format_double(t) << ',' << side;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out << ',' << format_double(x[i]);
  out << '\n';
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  const int d = static_cast<int>(traj.initial().size());
  out << "t,side";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  out << '\n';
  const int pieces = traj.piece_count();
  for (int k = 0; k < pieces; ++k) {
    const Trajectory::Piece& piece = traj.pieces()[k];
    const std::size_t n = piece.times.size();
    for (std::size_t i = 0; i < n; ++i) {
      const bool first = i == 0;
      const bool last = i + 1 == n;
      if (first && k > 0) {
        write_state_row(out, piece.times[i], "right", piece.states[i]);
      } else if (last && k + 1 < pieces) {
        write_state_row(out, piece.times[i], "left", piece.states[i]);
      } else {
        write_state_row(out, piece.times[i], "cont", piece.states[i]);
      }
    }
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_vector_csv(const std::string& path, const std::string& header,
                      const Vector& v) {
  std::ofstream out = open_out(path);
  out << header << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << format_double(v[i]) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  std::ofstream out = open_out(path);
  out << "alpha,measured_error,predicted_error,outer_iters,status\n";
  for (const SweepRow& row : sweep.rows) {
    out << format_double(row.alpha) << ','
        << format_double(row.measured_error) << ','
        << format_double(row.predicted_error) << ',' << row.outer_iters << ','
        << row.status << '\n';
  }
}

void write_decay_csv(const std::string& path, const DecayTable& table) {
  std::ofstream out = open_out(path);
  out << "alpha,probe,ratio,status\n";
  for (std::size_t a = 0; a < table.alphas.size(); ++a) {
    for (std::size_t p = 0; p < table.ratios[a].size(); ++p) {
      const double r = table.ratios[a][p];
      out << format_double(table.alphas[a]) << ',' << p << ','
          << format_double(r) << ','
          << (r <= table.threshold ? "satisfied" : "violated") << '\n';
    }
  }
}

void write_verify_csv(const std::string& path,
                      const std::vector<VerifyReport>& reports) {
  std::ofstream out = open_out(path);
  out << "alpha,residual_abs,residual_rel,measured_defect,predicted_defect\n";
  for (const VerifyReport& r : reports) {
    out << format_double(r.alpha) << ',' << format_double(r.residual_abs)
        << ',' << format_double(r.residual_rel) << ','
        << format_double(r.measured_defect) << ','
        << format_double(r.predicted_defect) << '\n';
  }
}

void write_control_csv(const std::string& path, const ControlLaw& law,
                       const std::vector<double>& sample_times) {
  std::ofstream out = open_out(path);
  const int m = static_cast<int>(law.input_map_adjoint.rows());
  out << "t";
  for (int i = 0; i < m; ++i) out << ",u" << i;
  out << '\n';
  for (double t : sample_times) {
    const Vector u = law.continuous(t);
    out << format_double(t);
    for (Eigen::Index i = 0; i < u.size(); ++i)
      out << ',' << format_double(u[i]);
    out << '\n';
  }
}

void write_impulse_controls_csv(const std::string& path,
                                const ControlLaw& law) {
  std::ofstream out = open_out(path);
  out << "k,t_k,v\n";
  for (std::size_t k = 0; k < law.impulse_controls.size(); ++k) {
    out << (k + 1) << ',' << format_double(law.boundaries[k + 1]);
    for (Eigen::Index i = 0; i < law.impulse_controls[k].size(); ++i)
      out << ',' << format_double(law.impulse_controls[k][i]);
    out << '\n';
  }
}

int TabulatedTrajectory::dimension() const {
  return rows_.empty() ? 0 : static_cast<int>(rows_.front().x.size());
}

TabulatedTrajectory TabulatedTrajectory::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trajectory file: " + path);
  TabulatedTrajectory tab;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Row row;
    if (!std::getline(ss, field, ','))
      throw std::runtime_error("malformed trajectory row: " + line);
    row.t = std::stod(field);
    if (!std::getline(ss, row.side, ','))
      throw std::runtime_error("malformed trajectory row: " + line);
    std::vector<double> xs;
    while (std::getline(ss, field, ',')) xs.push_back(std::stod(field));
    row.x = Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    tab.rows_.push_back(std::move(row));
  }
  if (tab.rows_.empty())
    throw std::runtime_error("trajectory file has no samples: " + path);
  tab.build_segments();
  return tab;
}

void TabulatedTrajectory::build_segments() {
  segments_.clear();
  Segment current;
  for (const Row& row : rows_) {
    if (row.side == "right" && !current.times.empty()) {
      segments_.push_back(std::move(current));
      current = Segment{};
    }
    current.times.push_back(row.t);
    current.values.push_back(row.x);
  }
  if (!current.times.empty()) segments_.push_back(std::move(current));
}

Vector TabulatedTrajectory::value(double t) const {
  // Left-limit convention: pick the last segment that starts at or before
  // t, preferring the earlier one when t sits on a boundary.
  const Segment* seg = &segments_.front();
  for (const Segment& s : segments_) {
    if (s.times.front() < t) seg = &s;
  }
  const std::vector<double>& ts = seg->times;
  const double teps = 1e-13 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(ts.begin(), ts.end(), t - teps);
  if (it != ts.end() && std::abs(*it - t) <= teps)
    return seg->values[static_cast<std::size_t>(it - ts.begin())];
  if (t < ts.front() || t > ts.back())
    throw std::invalid_argument("TabulatedTrajectory: time out of range");
  int idx = static_cast<int>(std::upper_bound(ts.begin(), ts.end(), t) -
                             ts.begin());
  int lo = std::max(0, idx - 3);
  int hi = std::min(static_cast<int>(ts.size()) - 1, lo + 5);
  lo = std::max(0, hi - 5);
  Vector acc = Vector::Zero(seg->values.front().size());
  for (int i = lo; i <= hi; ++i) {
    double w = 1.0;
    for (int j = lo; j <= hi; ++j) {
      if (j == i) continue;
      w *= (t - ts[j]) / (ts[i] - ts[j]);
    }
    acc += w * seg->values[i];
  }
  return acc;
}

ForcingFn TabulatedTrajectory::as_forcing() const {
  return [tab = *this](double t) { return tab.value(t); };
}

void TabulatedTrajectory::write(const std::string& path) const {
  std::ofstream out = open_out(path);
  out << "t,side";
  for (int i = 0; i < dimension(); ++i) out << ",x" << i;
  out << '\n';
  for (const Row& row : rows_)
    write_state_row(out, row.t, row.side.c_str(), row.x);
}

}  // namespace ictrl
