//
// Copyright 2026 The cdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cdp/quadrature.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace cdp {
namespace {

// 15-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 7-point Gauss weights on the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class PieceKind { kFinite, kUpperTail, kLowerTail };

struct Piece {
  PieceKind kind;
  double anchor;  // finite end of a tail piece
};

struct Interval {
  int piece;
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

class OneDimIntegrator {
 public:
  OneDimIntegrator(const std::function<double(double)>& f, double scale)
      : f_(f), scale_(scale) {}

  double Eval(const Piece& p, double x) {
    ++evaluations_;
    switch (p.kind) {
      case PieceKind::kFinite:
        return f_(x);
      case PieceKind::kUpperTail: {
        const double s = 1.0 - x;
        const double v = f_(p.anchor + scale_ * x / s);
        return v == 0.0 ? 0.0 : v * scale_ / (s * s);
      }
      case PieceKind::kLowerTail: {
        const double s = 1.0 - x;
        const double v = f_(p.anchor - scale_ * x / s);
        return v == 0.0 ? 0.0 : v * scale_ / (s * s);
      }
    }
    return 0.0;
  }

  Interval Rule(int piece_index, const Piece& p, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = Eval(p, center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      const double sum = Eval(p, center - dx) + Eval(p, center + dx);
      kronrod += kWgk[j] * sum;
      if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {piece_index, a, b, kronrod, std::abs(kronrod - gauss)};
  }

  long evaluations() const { return evaluations_; }

 private:
  const std::function<double(double)>& f_;
  double scale_;
  long evaluations_ = 0;
};

absl::Status QuadratureFailure(absl::string_view why) {
  return absl::InternalError(absl::StrCat("QuadratureFailure: ", why));
}

}  // namespace

absl::StatusOr<QuadratureResult> Integrate1D(
    const std::function<double(double)>& f, double lo, double hi,
    std::vector<double> breakpoints, const QuadratureOptions& options) {
  if (!(lo < hi)) {
    if (lo == hi) return QuadratureResult{};
    return absl::InvalidArgumentError(
        absl::StrCat("integration range [", lo, ", ", hi, "] is reversed"));
  }
  std::vector<double> cuts;
  for (double t : breakpoints) {
    if (std::isfinite(t) && t > lo && t < hi) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) {
                           return std::abs(x - y) <=
                                  1e-13 * (1.0 + std::abs(x));
                         }),
             cuts.end());
  if (cuts.empty() && (std::isinf(lo) || std::isinf(hi))) {
    cuts.push_back(std::isinf(lo) && std::isinf(hi) ? 0.0
                   : std::isinf(lo)                 ? hi - options.length_scale
                                                    : lo + options.length_scale);
  }

  std::vector<Piece> pieces;
  std::vector<std::pair<double, double>> ranges;
  std::vector<double> nodes;
  nodes.push_back(lo);
  nodes.insert(nodes.end(), cuts.begin(), cuts.end());
  nodes.push_back(hi);
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    if (std::isinf(a)) {
      pieces.push_back({PieceKind::kLowerTail, b});
    } else if (std::isinf(b)) {
      pieces.push_back({PieceKind::kUpperTail, a});
    } else {
      pieces.push_back({PieceKind::kFinite, 0.0});
      ranges.emplace_back(a, b);
      continue;
    }
    ranges.emplace_back(0.0, 1.0);
  }

  OneDimIntegrator integrator(f, options.length_scale);
  std::priority_queue<Interval> queue;
  double total = 0.0;
  double total_error = 0.0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    Interval iv = integrator.Rule(static_cast<int>(i), pieces[i],
                                  ranges[i].first, ranges[i].second);
    total += iv.value;
    total_error += iv.error;
    queue.push(iv);
  }
  int intervals = static_cast<int>(queue.size());
  const auto target = [&] {
    return std::max(options.abs_tol, options.rel_tol * std::abs(total));
  };
  while (total_error > target()) {
    if (!std::isfinite(total)) return QuadratureFailure("non-finite integrand");
    if (intervals >= options.max_intervals) {
      return QuadratureFailure(absl::StrCat(
          "error estimate ", total_error, " above target ", target(),
          " after ", intervals, " intervals"));
    }
    const Interval worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      return QuadratureFailure("interval cannot be subdivided further");
    }
    const Piece& piece = pieces[worst.piece];
    Interval left = integrator.Rule(worst.piece, piece, worst.a, mid);
    Interval right = integrator.Rule(worst.piece, piece, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++intervals;
  }
  // Recompute the sums to shed the drift of the running updates.
  double value = 0.0;
  double error = 0.0;
  while (!queue.empty()) {
    value += queue.top().value;
    error += queue.top().error;
    queue.pop();
  }
  return QuadratureResult{value, error, integrator.evaluations()};
}

namespace {

// Breakpoint of the level-k partial integral as an affine function of the
// already-fixed coordinates: t = constant + coef . prefix.
struct Breakpoint {
  Vector coef;
  double constant;
};

void ForEachSubset(int n, int max_size,
                   const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> current;
  std::function<void(int)> rec = [&](int start) {
    if (!current.empty()) visit(current);
    if (static_cast<int>(current.size()) == max_size) return;
    for (int i = start; i < n; ++i) {
      current.push_back(i);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
}

class NestedIntegrator {
 public:
  NestedIntegrator(const std::function<double(const Vector&)>& f, int dim,
                   const KinkSet& kinks, const QuadratureOptions& options,
                   std::vector<std::pair<double, double>> bounds)
      : f_(f), dim_(dim), options_(options), bounds_(std::move(bounds)) {
    if (bounds_.empty()) {
      const double inf = std::numeric_limits<double>::infinity();
      bounds_.assign(dim_, {-inf, inf});
    }
    // Drop hyperplanes that do not depend on w at all.
    std::vector<int> keep;
    for (Eigen::Index j = 0; j < kinks.normals.rows(); ++j) {
      if (kinks.normals.row(j).cwiseAbs().maxCoeff() > 0.0) keep.push_back(j);
    }
    normals_.resize(keep.size(), dim_);
    offsets_.resize(keep.size());
    for (size_t j = 0; j < keep.size(); ++j) {
      normals_.row(j) = kinks.normals.row(keep[j]);
      offsets_[j] = kinks.offsets[keep[j]];
    }
    for (int k = 0; k < dim_; ++k) breakpoints_.push_back(LevelBreakpoints(k));
  }

  absl::StatusOr<QuadratureResult> Run() {
    Vector w = Vector::Zero(dim_);
    const double value = Level(0, w);
    if (!status_.ok()) return status_;
    return QuadratureResult{value, top_error_, evaluations_};
  }

 private:
  std::vector<Breakpoint> LevelBreakpoints(int k) const {
    std::vector<Breakpoint> out;
    const int rest = dim_ - k - 1;
    const int forms = static_cast<int>(normals_.rows());
    ForEachSubset(forms, rest + 1, [&](const std::vector<int>& subset) {
      const int s = static_cast<int>(subset.size());
      Matrix tail(s, rest);
      Vector column(s);
      for (int i = 0; i < s; ++i) {
        if (rest > 0) tail.row(i) = normals_.row(subset[i]).tail(rest);
        column[i] = normals_(subset[i], k);
      }
      Vector left_null;
      if (rest == 0) {
        if (s != 1) return;
        left_null = Vector::Ones(1);
      } else {
        Eigen::FullPivLU<Matrix> lu(tail.transpose());
        lu.setThreshold(1e-12);
        if (lu.rank() != s - 1) return;
        left_null = lu.kernel().col(0);
        // A zero weight means a smaller subset already produces this event.
        if (left_null.cwiseAbs().minCoeff() <=
            1e-12 * left_null.cwiseAbs().maxCoeff()) {
          return;
        }
      }
      const double denom = left_null.dot(column);
      if (std::abs(denom) <= 1e-12 * left_null.cwiseAbs().maxCoeff()) return;
      Breakpoint bp;
      bp.coef = Vector::Zero(k);
      bp.constant = 0.0;
      for (int i = 0; i < s; ++i) {
        bp.constant -= left_null[i] * offsets_[subset[i]] / denom;
        if (k > 0) {
          bp.coef -= left_null[i] * normals_.row(subset[i]).head(k).transpose() /
                     denom;
        }
      }
      out.push_back(std::move(bp));
    });
    return out;
  }

  double Level(int k, Vector& w) {
    if (!status_.ok()) return 0.0;
    std::vector<double> cuts;
    cuts.reserve(breakpoints_[k].size());
    for (const Breakpoint& bp : breakpoints_[k]) {
      cuts.push_back(bp.constant + (k > 0 ? bp.coef.dot(w.head(k)) : 0.0));
    }
    QuadratureOptions level_options = options_;
    const double shrink = std::pow(0.1, k);
    level_options.rel_tol *= shrink;
    level_options.abs_tol *= shrink;
    const std::function<double(double)> g = [&](double t) {
      w[k] = t;
      if (k == dim_ - 1) {
        ++evaluations_;
        return f_(w);
      }
      return Level(k + 1, w);
    };
    absl::StatusOr<QuadratureResult> r =
        Integrate1D(g, bounds_[k].first, bounds_[k].second, std::move(cuts),
                    level_options);
    if (!r.ok()) {
      if (status_.ok()) status_ = r.status();
      return 0.0;
    }
    if (k == 0) top_error_ = r->error;
    return r->value;
  }

  const std::function<double(const Vector&)>& f_;
  int dim_;
  QuadratureOptions options_;
  std::vector<std::pair<double, double>> bounds_;
  Matrix normals_;
  Vector offsets_;
  std::vector<std::vector<Breakpoint>> breakpoints_;
  absl::Status status_;
  double top_error_ = 0.0;
  long evaluations_ = 0;
};

}  // namespace

absl::StatusOr<QuadratureResult> IntegrateNd(
    const std::function<double(const Vector&)>& f, int dim,
    const KinkSet& kinks, const QuadratureOptions& options,
    std::vector<std::pair<double, double>> bounds) {
  if (dim < 1) {
    return absl::InvalidArgumentError("integration dimension must be >= 1");
  }
  if (!bounds.empty() && static_cast<int>(bounds.size()) != dim) {
    return absl::InvalidArgumentError("need one (lo, hi) pair per axis");
  }
  if (kinks.normals.rows() > 0 &&
      (kinks.normals.cols() != dim ||
       kinks.offsets.size() != kinks.normals.rows())) {
    return absl::InvalidArgumentError("kink set shape does not match dim");
  }
  NestedIntegrator integrator(f, dim, kinks, options, std::move(bounds));
  return integrator.Run();
}

}  // namespace cdp
