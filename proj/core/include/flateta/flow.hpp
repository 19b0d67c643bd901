#pragma once

// Eigenvalue tracking along paths of (possibly non-normal) operators and the
// spectral flow through the imaginary axis.
//
// Consecutive spectra are matched by a minimal-total-distance assignment. An
// interval is bisected when a matched pair moves by at least half the local
// gap, or when a track changes the sign of its real part (to localize the
// crossing). The count
//
//   sf = #{Re >= 0 -> Re < 0} - #{Re < 0 -> Re >= 0}
//
// is taken over tracks, start to end.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "flateta/forms.hpp"
#include "flateta/geometry.hpp"
#include "flateta/spectral.hpp"

namespace flateta {

struct TrackOptions {
  int max_depth = 20;
  /// Axis-proximity trigger, relative to the spectral scale max(1, max|lambda(t_0)|).
  double delta_rel = 1e-3;
  /// Endpoint eigenvalues with |Re| <= axis_tol are rejected by spectral_flow.
  double axis_tol = 1e-9;
  /// Extra bisection levels spent localizing a sign change of Re.
  int axis_refine_depth = 6;
  /// Eigenvalues closer than cluster_rel * scale are treated as one cluster
  /// when measuring gaps.
  double cluster_rel = 1e-9;
  bool reject_axis_endpoints = true;
};

struct RefinementEvent {
  double t0 = 0.0;
  double t1 = 0.0;
  int depth = 0;
  std::string reason;
};

struct EigenvalueTrack {
  std::vector<double> ts;
  /// values[i][k]: track k at ts[i].
  std::vector<std::vector<Complex>> values;
  std::vector<RefinementEvent> log;
  TrackOptions options;

  std::size_t tracks() const { return values.empty() ? 0 : values.front().size(); }
};

using SpectrumPath = std::function<std::vector<Complex>(double)>;
using OperatorPath = std::function<OperatorTruncation(double)>;

/// Tracks the spectrum of path(t) over [t_begin, t_end] starting from a
/// uniform grid of m0 intervals. Throws GuardError when two candidates on
/// opposite sides of the imaginary axis stay indistinguishable at max_depth,
/// and ShapeError when the spectrum size changes along the path.
EigenvalueTrack track_path(const SpectrumPath& path, int m0, const TrackOptions& opt = {},
                           double t_begin = 0.0, double t_end = 1.0);
EigenvalueTrack track_operator_path(const OperatorPath& path, int m0, const TrackOptions& opt = {},
                                    double t_begin = 0.0, double t_end = 1.0);

struct FlowCounts {
  /// Tracks starting with Re >= 0 and ending with Re < 0.
  int to_negative = 0;
  /// Tracks starting with Re < 0 and ending with Re >= 0.
  int to_nonnegative = 0;

  int value() const { return to_negative - to_nonnegative; }
};

FlowCounts flow_counts(const EigenvalueTrack& tr);
/// to_negative - to_nonnegative. Throws GuardError if an endpoint eigenvalue
/// lies within axis_tol of the imaginary axis (unless the track options allow it).
int spectral_flow(const EigenvalueTrack& tr);

/// Sign relating the count above to the variation of the reduced eta:
///   eta(1) - eta(0) = kFlowOrientation * spectral_flow + int CS.
/// Fixed once by the unitary circle calibration (mu = 1/4 sliding to 5/4).
inline constexpr int kFlowOrientation = -1;

/// diag(exp(2 pi i w x_1), 1, ..., 1).
TrigPolyForm winding_gauge(int dim, int rank, int w);

/// Linear path from c to its gauge transform by winding_gauge(c.rank(), w).
Connection gauge_path(const Connection& c, int w, double t);

/// Minimal-total-cost perfect assignment for a square cost matrix;
/// result[i] is the column assigned to row i.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

/// CSV with header "t,re,im,track".
void write_track_csv(std::ostream& out, const EigenvalueTrack& tr);

}  // namespace flateta
