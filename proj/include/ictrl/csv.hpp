#pragma once

#include <string>
#include <vector>

#include "ictrl/gramian.hpp"
#include "ictrl/synthesis.hpp"
#include "ictrl/trajectory.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

/// Trajectory rows: header `t,side,x0,...,x{d-1}`, side in {cont,left,right};
/// impulse times produce one `left` and one `right` row each.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

void write_matrix_csv(const std::string& path, const Matrix& m);
void write_vector_csv(const std::string& path, const std::string& header,
                      const Vector& v);

/// Sweep rows: `alpha,measured_error,predicted_error,outer_iters,status`.
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

/// Decay-table rows: `alpha,probe,ratio,status`.
void write_decay_csv(const std::string& path, const DecayTable& table);

/// Verification rows: one per alpha.
void write_verify_csv(const std::string& path,
                      const std::vector<VerifyReport>& reports);

/// Control-law emission: u sampled at the given times (`t,u0,...`),
/// impulse controls (`k,t_k,v0,...`), and the resolvent image as a
/// single-row CSV.
void write_control_csv(const std::string& path, const ControlLaw& law,
                       const std::vector<double>& sample_times);
void write_impulse_controls_csv(const std::string& path, const ControlLaw& law);

/// A trajectory file read back verbatim: evaluable as a forcing (left
/// limits at impulse times) and re-emittable byte for byte.
class TabulatedTrajectory {
 public:
  struct Row {
    double t;
    std::string side;
    Vector x;
  };

  static TabulatedTrajectory read(const std::string& path);

  const std::vector<Row>& rows() const { return rows_; }
  int dimension() const;

  /// Interpolated value; exact at stored times.
  Vector value(double t) const;
  ForcingFn as_forcing() const;

  void write(const std::string& path) const;

 private:
  std::vector<Row> rows_;
  // Continuous segments (split at left/right pairs) for interpolation.
  struct Segment {
    std::vector<double> times;
    std::vector<Vector> values;
  };
  std::vector<Segment> segments_;
  void build_segments();
};

}  // namespace ictrl
