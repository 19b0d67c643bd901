#include "flateta/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "flateta/errors.hpp"

namespace flateta {

namespace {

bool nonnegative(Complex v) { return v.real() >= 0.0; }

class Tracker {
 public:
  Tracker(const SpectrumPath& path, const TrackOptions& opt) : path_(path), opt_(opt) {}

  EigenvalueTrack run(int m0, double t_begin, double t_end) {
    if (m0 < 1) throw DomainError("track_path: m0 must be >= 1");
    if (!(t_end > t_begin)) throw DomainError("track_path: empty parameter interval");
    EigenvalueTrack tr;
    tr.options = opt_;
    std::vector<Complex> start = path_(t_begin);
    std::sort(start.begin(), start.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    double scale = 1.0;
    for (Complex v : start) scale = std::max(scale, std::abs(v));
    delta_ = opt_.delta_rel * scale;
    cluster_ = opt_.cluster_rel * scale;
    tr.ts.push_back(t_begin);
    tr.values.push_back(start);
    for (int i = 1; i <= m0; ++i) {
      const double tb = t_begin + (t_end - t_begin) * double(i) / double(m0);
      refine(tr, tb, sample(tb, start.size()), 0, 0);
    }
    return tr;
  }

 private:
  std::vector<Complex> sample(double t, std::size_t expected) const {
    std::vector<Complex> s = path_(t);
    if (s.size() != expected) throw ShapeError("track_path: spectrum size changes along the path");
    return s;
  }

  double gap_of(const std::vector<Complex>& v, std::size_t i) const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double d = std::abs(v[j] - v[i]);
      if (j != i && d > cluster_) gap = std::min(gap, d);
    }
    return gap;
  }

  void refine(EigenvalueTrack& tr, double tb, const std::vector<Complex>& raw, int depth, int axis_depth) {
    const double ta = tr.ts.back();
    const std::vector<Complex> va = tr.values.back();
    const std::size_t n = va.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::abs(va[i] - raw[j]);
    }
    const std::vector<int> perm = n ? min_cost_assignment(cost) : std::vector<int>{};
    std::vector<Complex> vb(n);
    for (std::size_t i = 0; i < n; ++i) vb[i] = raw[perm[i]];

    std::vector<std::size_t> ambiguous;
    bool axis_event = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(va[i] - vb[i]);
      const double gap = std::min(gap_of(va, i), gap_of(vb, i));
      if (d > cluster_ && d >= 0.5 * gap) ambiguous.push_back(i);
      const bool near_a = std::abs(va[i].real()) < delta_;
      const bool near_b = std::abs(vb[i].real()) < delta_;
      if (nonnegative(va[i]) != nonnegative(vb[i]) || near_a != near_b) axis_event = true;
    }

    if (!ambiguous.empty()) {
      if (depth < opt_.max_depth) {
        bisect(tr, ta, tb, raw, depth, axis_depth, "ambiguous matching");
        return;
      }
      for (std::size_t i : ambiguous) {
        const double d = std::abs(va[i] - vb[i]);
        for (Complex cand : raw) {
          if (std::abs(cand - vb[i]) > 2.0 * d) continue;
          if (std::abs(cand.real()) <= opt_.axis_tol || std::abs(vb[i].real()) <= opt_.axis_tol) continue;
          if (nonnegative(cand) != nonnegative(vb[i])) {
            throw GuardError("track_path: eigenvalue matching near t = " + std::to_string(tb) +
                             " is unresolved at max depth and the candidates lie on opposite sides"
                             " of the imaginary axis");
          }
        }
      }
      tr.log.push_back({ta, tb, depth, "accepted at max depth"});
    } else if (axis_event && axis_depth < opt_.axis_refine_depth && depth < opt_.max_depth) {
      bisect(tr, ta, tb, raw, depth, axis_depth + 1, "axis crossing");
      return;
    }
    tr.ts.push_back(tb);
    tr.values.push_back(std::move(vb));
  }

  void bisect(EigenvalueTrack& tr, double ta, double tb, const std::vector<Complex>& raw, int depth,
              int axis_depth, const char* reason) {
    tr.log.push_back({ta, tb, depth + 1, reason});
    const double tm = 0.5 * (ta + tb);
    refine(tr, tm, sample(tm, raw.size()), depth + 1, axis_depth);
    refine(tr, tb, raw, depth + 1, axis_depth);
  }

  const SpectrumPath& path_;
  TrackOptions opt_;
  double delta_ = 0.0;
  double cluster_ = 0.0;
};

}  // namespace

EigenvalueTrack track_path(const SpectrumPath& path, int m0, const TrackOptions& opt, double t_begin,
                           double t_end) {
  return Tracker(path, opt).run(m0, t_begin, t_end);
}

EigenvalueTrack track_operator_path(const OperatorPath& path, int m0, const TrackOptions& opt,
                                    double t_begin, double t_end) {
  const SpectrumPath spec = [&path](double t) { return spectrum(path(t)); };
  return track_path(spec, m0, opt, t_begin, t_end);
}

FlowCounts flow_counts(const EigenvalueTrack& tr) {
  FlowCounts out;
  if (tr.values.empty()) return out;
  const auto& first = tr.values.front();
  const auto& last = tr.values.back();
  if (tr.options.reject_axis_endpoints) {
    for (const auto* end : {&first, &last}) {
      for (Complex v : *end) {
        if (std::abs(v.real()) <= tr.options.axis_tol) {
          throw GuardError("spectral_flow: an endpoint eigenvalue lies on the imaginary axis; perturb the endpoint");
        }
      }
    }
  }
  for (std::size_t k = 0; k < first.size(); ++k) {
    const bool s = nonnegative(first[k]);
    const bool e = nonnegative(last[k]);
    if (s && !e) ++out.to_negative;
    if (!s && e) ++out.to_nonnegative;
  }
  return out;
}

int spectral_flow(const EigenvalueTrack& tr) { return flow_counts(tr).value(); }

TrigPolyForm winding_gauge(int dim, int rank, int w) {
  TrigPolyForm g(dim, rank);
  Frequency k(static_cast<std::size_t>(dim), 0);
  if (rank > 1) {
    CMatrix rest = CMatrix::Identity(rank, rank);
    rest(0, 0) = 0.0;
    g.add_term(k, IndexSet(), rest);
  }
  CMatrix e = CMatrix::Zero(rank, rank);
  e(0, 0) = 1.0;
  k[0] = w;
  g.add_term(k, IndexSet(), e);
  return g;
}

Connection gauge_path(const Connection& c, int w, double t) {
  const Connection end = gauge_transform(c, winding_gauge(c.dim(), c.rank(), w));
  return c.with_form(Complex(1.0 - t) * c.form() + Complex(t) * end.form());
}

std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  // Hungarian method with potentials, O(n^3); rows and columns 1-based inside.
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    if (static_cast<int>(cost[i - 1].size()) != n) throw ShapeError("min_cost_assignment: cost matrix not square");
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(n);
  for (int j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

void write_track_csv(std::ostream& out, const EigenvalueTrack& tr) {
  out << "t,re,im,track\n";
  out.precision(17);
  for (std::size_t i = 0; i < tr.ts.size(); ++i) {
    for (std::size_t k = 0; k < tr.values[i].size(); ++k) {
      out << tr.ts[i] << ',' << tr.values[i][k].real() << ',' << tr.values[i][k].imag() << ',' << k << '\n';
    }
  }
}

}  // namespace flateta
