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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion with
// the measured value, the tolerance and the wall time against its budget.
// Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cdp/belief.h"
#include "cdp/bench.h"
#include "cdp/composition.h"
#include "cdp/hierarchy.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/revision.h"
#include "cdp/rng.h"
#include "cdp/update.h"
#include "cdp/verify.h"

namespace cdp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(const absl::Status& s) { return {false, std::string(s.message())}; }

#define ACC_ASSIGN_OR_FAIL(lhs, expr)      \
  auto lhs##_or = (expr);                  \
  if (!lhs##_or.ok()) return Fail(lhs##_or.status()); \
  auto& lhs = *lhs##_or

std::vector<double> Column(const std::vector<Vector>& draws, int c) {
  std::vector<double> out;
  out.reserve(draws.size());
  for (const Vector& v : draws) out.push_back(v[c]);
  return out;
}

double SampleVariance(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / (x.size() - 1);
}

// Histogram TV distance on Freedman-Diaconis edges of the pooled sample.
double HistogramTv(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> edges = FreedmanDiaconisEdges(pooled);
  return TotalVariation(BinFractions(a, edges), BinFractions(b, edges));
}

std::vector<double> RandomProbs(Rng& rng, int n, double zero_rate) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) {
    v = rng.Uniform() < zero_rate ? 0.0 : -std::log(rng.Uniform());
    total += v;
  }
  if (total == 0.0) p[0] = total = 1.0;
  for (double& v : p) v /= total;
  return p;
}

std::vector<std::string> Worlds(int n) {
  std::vector<std::string> w;
  for (int i = 0; i < n; ++i) w.push_back(absl::StrCat("w", i));
  return w;
}

// 1. Worked four-world example.
Outcome FiniteExample() {
  ACC_ASSIGN_OR_FAIL(p, FiniteBeliefState::Create({"w1", "w2", "w3", "w4"},
                                                  {0, 0.7, 0.3, 0}));
  const Event c({"w3", "w4"});
  ACC_ASSIGN_OR_FAIL(cond, ConditionFinite(p, c));
  ACC_ASSIGN_OR_FAIL(image, ImageFinite(p, c, {{"w1", "w3"}, {"w2", "w4"}}));
  const double want_cond[] = {0, 0, 1, 0};
  const double want_image[] = {0, 0, 0.3, 0.7};
  double err = 0.0;
  for (int i = 0; i < 4; ++i) {
    err = std::max(err, std::abs(cond.probs()[i] - want_cond[i]));
    err = std::max(err, std::abs(image.probs()[i] - want_image[i]));
  }
  return {err <= 1e-12, absl::StrFormat("max deviation %.3g (tol 1e-12)", err)};
}

// 2. Sum-zero constants: K, conditioned variance by quadrature and by MH.
Outcome SumZeroConstants() {
  double worst_k = 0.0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    ACC_ASSIGN_OR_FAIL(noise, NoiseSpec::Laplace(lambda, 3));
    ACC_ASSIGN_OR_FAIL(k, NormalizingConstant(noise, AffineEquality::SumEquals(3, 0.0)));
    const double unnormalized = k.value * std::pow(2 * lambda, 3);
    worst_k = std::max(worst_k, std::abs(unnormalized / (1.5 * lambda * lambda) - 1));
  }
  const double lambda = 1.0;
  ACC_ASSIGN_OR_FAIL(noise, NoiseSpec::Laplace(lambda, 3));
  ACC_ASSIGN_OR_FAIL(d, ConditionalDensity::Create(
                            Vector::Zero(3), noise,
                            Invariant(AffineEquality::SumEquals(3, 0.0))));
  QuadratureOptions q;
  q.rel_tol = 1e-7;
  ACC_ASSIGN_OR_FAIL(var_q, ChartExpectation(
                                d, [](const Vector& v) { return v[0] * v[0]; }, q));
  const double target = 5.0 / 6.0;
  const double err_q = std::abs(var_q / target - 1);

  MhConfig cfg;
  cfg.n_samples = 1000000;
  cfg.seed = 20260601;
  ACC_ASSIGN_OR_FAIL(s, MhSampleAffine(Vector::Zero(3), noise,
                                       AffineEquality::SumEquals(3, 0.0),
                                       std::nullopt, cfg));
  const Vector col = s.draws.col(0);
  const double var_mh = SampleVariance({col.data(), static_cast<size_t>(col.size())});
  const double err_mh = std::abs(var_mh / target - 1);
  const bool pass = worst_k <= 1e-4 && err_q <= 0.005 && err_mh <= 0.02;
  return {pass, absl::StrFormat(
                    "K rel err %.2g (tol 1e-4); var quad %.6f rel err %.2g (tol "
                    "0.005); var MH %.4f rel err %.3g (tol 0.02, acc %.2f, ESS %.0f)",
                    worst_k, var_q, err_q, var_mh, err_mh, s.acceptance_rate, s.ess)};
}

// 3. Variance of imaged Laplace noise.
Outcome ImagingVariance() {
  const double lambda = 1.0;
  std::string detail;
  bool pass = true;
  for (int n : {2, 3, 10}) {
    ACC_ASSIGN_OR_FAIL(noise, NoiseSpec::Laplace(lambda, n));
    ACC_ASSIGN_OR_FAIL(p, Projector::Create(Invariant(AffineEquality::SumEquals(n, 0.0))));
    Rng rng(DeriveSeed(31, n));
    std::vector<double> x;
    x.reserve(1000000);
    for (int i = 0; i < 1000000; ++i) {
      ACC_ASSIGN_OR_FAIL(v, ImagedDraw(Vector::Zero(n), noise, p, rng));
      x.push_back(v[0]);
    }
    const double var = SampleVariance(x);
    const double want = 2 * lambda * lambda * (1 - 1.0 / n);
    const double err = std::abs(var / want - 1);
    pass = pass && err <= 0.02;
    absl::StrAppendFormat(&detail, "%sn=%d %.4f vs %.4f", n == 2 ? "" : "; ", n,
                          var, want);
  }
  return {pass, detail + " (tol 2%)"};
}

// 4. Privacy audit of the conditioned density on a grid over C.
Outcome Audit() {
  bool pass = true;
  std::string detail;
  // Two neighbours inside C = {sum = 0}: a unit L1 shift calibrated with
  // lambda = 1/eps, and a moved record (+1, -1, 0) calibrated with L1
  // sensitivity 2.
  struct Case {
    const char* name;
    double shift_a, shift_b, sensitivity;
  };
  for (const Case& k : {Case{"unit", 0.5, -0.5, 1.0}, Case{"move", 1.0, -1.0, 2.0}}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      const double lambda = k.sensitivity / eps;
      ACC_ASSIGN_OR_FAIL(noise, NoiseSpec::Laplace(lambda, 3));
      const Invariant c(AffineEquality::SumEquals(3, 0.0));
      Vector f2(3);
      f2 << k.shift_a, k.shift_b, 0.0;
      ACC_ASSIGN_OR_FAIL(d1, ConditionalDensity::Create(Vector::Zero(3), noise, c));
      ACC_ASSIGN_OR_FAIL(d2, ConditionalDensity::Create(f2, noise, c));
      const AuditGrid grid = AuditGrid::Regular(2, -6 * lambda, 6 * lambda, 121);
      ACC_ASSIGN_OR_FAIL(
          r, PrivacyAudit([&](const Vector& w) { return d1.EvaluateChart(w); },
                          [&](const Vector& w) { return d2.EvaluateChart(w); }, eps,
                          grid, 1e-6));
      pass = pass && r.max_log_ratio <= eps + 1e-6;
      absl::StrAppendFormat(&detail, "%s%s eps=%g max %.6f", detail.empty() ? "" : "; ",
                            k.name, eps, r.max_log_ratio);
    }
  }
  return {pass, detail + " (bound eps + 1e-6, 121x121 grid)"};
}

// 5. Disjoint-union composition, finite and continuous.
Outcome DisjointUnionCheck() {
  Rng rng(55);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 4 + static_cast<int>(rng.NextU64() % 8);
    const std::vector<std::string> w = Worlds(n);
    ACC_ASSIGN_OR_FAIL(p, FiniteBeliefState::Create(w, RandomProbs(rng, n, 0.2)));
    std::vector<std::string> a, b;
    for (const std::string& x : w) {
      const double u = rng.Uniform();
      if (u < 0.35) a.push_back(x);
      else if (u < 0.7) b.push_back(x);
    }
    const Event ca(a), cb(b);
    std::vector<std::string> both = a;
    both.insert(both.end(), b.begin(), b.end());
    auto pa = p.Probability(ca), pb = p.Probability(cb);
    if (!pa.ok() || !pb.ok() || *pa == 0.0 || *pb == 0.0) continue;
    ACC_ASSIGN_OR_FAIL(union_cond, ConditionFinite(p, Event(both)));
    ACC_ASSIGN_OR_FAIL(cond_a, ConditionFinite(p, ca));
    ACC_ASSIGN_OR_FAIL(cond_b, ConditionFinite(p, cb));
    const double lam = *pa / (*pa + *pb);
    const std::vector<FiniteBeliefState> parts = {cond_a, cond_b};
    const std::vector<double> weights = {lam, 1 - lam};
    ACC_ASSIGN_OR_FAIL(mix, MixFinite(parts, weights));
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(mix.probs()[i] - union_cond.probs()[i]));
    }
  }

  // Continuous: 1-D Laplace around f, C = [0.5, inf), C' = (-inf, -1].
  const double f = 0.3;
  ACC_ASSIGN_OR_FAIL(noise, NoiseSpec::Laplace(1.0, 1));
  ACC_ASSIGN_OR_FAIL(budget, PrivacyParams::Create(1.0));
  const MechanismHandle m = MakeAdditive(noise, budget);
  ACC_ASSIGN_OR_FAIL(ge, AffineInequality::Create(Matrix::Constant(1, 1, 1.0),
                                                  Vector::Constant(1, 0.5)));
  ACC_ASSIGN_OR_FAIL(le, AffineInequality::Create(Matrix::Constant(1, 1, -1.0),
                                                  Vector::Constant(1, 1.0)));
  ACC_ASSIGN_OR_FAIL(u, DisjointUnion::Create(m, Vector::Constant(1, f), Invariant(ge),
                                              Invariant(le), 56));
  Rng draw_rng(57);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) {
    ACC_ASSIGN_OR_FAIL(d, u.Draw(draw_rng));
    xs.push_back(d.sample[0]);
  }
  std::vector<double> edges;
  for (int i = 0; i <= 48; ++i) edges.push_back(-6.0 + 12.0 * i / 48);
  auto cdf = [&](double x) { return noise.Cdf1D(x - f); };
  const double pc = 1 - cdf(0.5), pcp = cdf(-1.0);
  const double lam = pc / (pc + pcp);
  auto mass_c = [&](double lo, double hi) {  // conditional mass of C on [lo, hi]
    lo = std::max(lo, 0.5);
    return hi > lo ? (cdf(hi) - cdf(lo)) / pc : 0.0;
  };
  auto mass_cp = [&](double lo, double hi) {
    hi = std::min(hi, -1.0);
    return hi > lo ? (cdf(hi) - cdf(lo)) / pcp : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> want(edges.size() + 1);
  for (size_t b = 0; b < want.size(); ++b) {
    const double lo = b == 0 ? -inf : edges[b - 1];
    const double hi = b == edges.size() ? inf : edges[b];
    want[b] = lam * mass_c(lo, hi) + (1 - lam) * mass_cp(lo, hi);
  }
  const double tv = TotalVariation(BinFractions(xs, edges), want);
  return {worst <= 1e-12 && tv < 0.02,
          absl::StrFormat("finite max deviation %.3g (tol 1e-12); sampler TV %.4f "
                          "(tol 0.02, lambda %.4f, 1e5 draws)",
                          worst, tv, lam)};
}

// 6. Imaging commutes with mixtures.
Outcome ImagingMixture() {
  Rng rng(66);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 3 + static_cast<int>(rng.NextU64() % 8);
    const std::vector<std::string> w = Worlds(n);
    std::vector<double> pos(n);
    for (double& x : pos) x = rng.Uniform();
    std::vector<std::string> members;
    for (const std::string& x : w) if (rng.Uniform() < 0.4) members.push_back(x);
    if (members.empty()) members.push_back(w[0]);
    const Event c(members);
    const ClosestWorldMap closest = ClosestWorldsByDistance(
        w, c, [&](const std::string& a, const std::string& b) {
          return std::abs(pos[std::stoi(a.substr(1))] - pos[std::stoi(b.substr(1))]);
        });
    ACC_ASSIGN_OR_FAIL(p1, FiniteBeliefState::Create(w, RandomProbs(rng, n, 0.2)));
    ACC_ASSIGN_OR_FAIL(p2, FiniteBeliefState::Create(w, RandomProbs(rng, n, 0.2)));
    const double a = rng.Uniform();
    const std::vector<FiniteBeliefState> states = {p1, p2};
    const std::vector<double> weights = {a, 1 - a};
    ACC_ASSIGN_OR_FAIL(mix, MixFinite(states, weights));
    ACC_ASSIGN_OR_FAIL(lhs, ImageFinite(mix, c, closest));
    ACC_ASSIGN_OR_FAIL(i1, ImageFinite(p1, c, closest));
    ACC_ASSIGN_OR_FAIL(i2, ImageFinite(p2, c, closest));
    const std::vector<FiniteBeliefState> images = {i1, i2};
    ACC_ASSIGN_OR_FAIL(rhs, MixFinite(images, weights));
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(lhs.probs()[i] - rhs.probs()[i]));
    }
  }

  // Continuous: mixture of Laplace(1) and Laplace(2.5) noise, weights .4/.6,
  // imaged onto {sum = 0}. Image of the mixture vs mixture of the images.
  const int n = 3;
  const Invariant c(AffineEquality::SumEquals(n, 0.0));
  ACC_ASSIGN_OR_FAIL(budget, PrivacyParams::Create(1.0));
  ACC_ASSIGN_OR_FAIL(n1, NoiseSpec::Laplace(1.0, n));
  ACC_ASSIGN_OR_FAIL(n2, NoiseSpec::Laplace(2.5, n));
  const std::vector<double> weights = {0.4, 0.6};
  const std::vector<MechanismHandle> raw = {MakeAdditive(n1, budget),
                                            MakeAdditive(n2, budget)};
  ACC_ASSIGN_OR_FAIL(raw_mix, MixtureMechanism(raw, weights));
  ACC_ASSIGN_OR_FAIL(proj, Projector::Create(c));
  const MechanismHandle image_of_mix = Postprocess(
      raw_mix, [&proj](const Vector& v) { return *proj.Apply(v); }, n, c);
  ACC_ASSIGN_OR_FAIL(im1, MakeImaged(n1, budget, c));
  ACC_ASSIGN_OR_FAIL(im2, MakeImaged(n2, budget, c));
  const std::vector<MechanismHandle> imaged = {im1, im2};
  ACC_ASSIGN_OR_FAIL(mix_of_images, MixtureMechanism(imaged, weights));
  Vector f(n);
  f << 2, -1, -1;
  std::vector<Vector> a, b;
  for (int i = 0; i < 1000000; ++i) {
    ACC_ASSIGN_OR_FAIL(x, image_of_mix.sampler(f, DeriveSeed(61, i)));
    ACC_ASSIGN_OR_FAIL(y, mix_of_images.sampler(f, DeriveSeed(62, i)));
    a.push_back(std::move(x));
    b.push_back(std::move(y));
  }
  double tv = 0.0;
  for (int col = 0; col < n; ++col) {
    tv = std::max(tv, HistogramTv(Column(a, col), Column(b, col)));
  }
  return {worst <= 1e-12 && tv < 0.02,
          absl::StrFormat("finite max deviation %.3g (tol 1e-12); worst marginal "
                          "TV %.4f (tol 0.02, 1e6 draws)",
                          worst, tv)};
}

// 7. Gaussian noise: conditioning and imaging agree.
Outcome GaussianEquivalence() {
  const int n = 3;
  ACC_ASSIGN_OR_FAIL(noise, NoiseSpec::Gaussian(1.0, n));
  const Matrix a = (Matrix(1, n) << 1, 2, -1).finished();
  ACC_ASSIGN_OR_FAIL(eq, AffineEquality::Create(a, Vector::Constant(1, 3.0)));
  const Invariant c(eq);
  Vector f(n);
  f << 1, 1, 0;
  ACC_ASSIGN_OR_FAIL(sampler, ConditionalSampler::Create(f, noise, c));
  ACC_ASSIGN_OR_FAIL(proj, Projector::Create(c));
  Rng r1(71), r2(72);
  std::vector<Vector> cond, img;
  for (int i = 0; i < 1000000; ++i) {
    ACC_ASSIGN_OR_FAIL(x, sampler.Draw(r1));
    ACC_ASSIGN_OR_FAIL(y, ImagedDraw(f, noise, proj, r2));
    cond.push_back(std::move(x));
    img.push_back(std::move(y));
  }
  double tv = 0.0;
  for (int col = 0; col < n; ++col) {
    tv = std::max(tv, HistogramTv(Column(cond, col), Column(img, col)));
  }
  return {tv < 0.02, absl::StrFormat("worst marginal TV %.4f (tol 0.02, 1e6 draws, "
                                     "rejection acceptance %.3f)",
                                     tv, sampler.acceptance_rate())};
}

// Exact projection of y onto a 2-D polygon {G z >= l}: enumerate the
// candidates of every possible active set (none, one line, one vertex).
Vector BruteForcePolygon(const Vector& y, const Matrix& g, const Vector& l) {
  auto feasible = [&](const Vector& z) {
    return ((g * z - l).array() >= -1e-9).all();
  };
  std::vector<Vector> candidates;
  if (feasible(y)) return y;
  for (int i = 0; i < g.rows(); ++i) {
    const Vector gi = g.row(i).transpose();
    candidates.push_back(y - gi * ((gi.dot(y) - l[i]) / gi.squaredNorm()));
    for (int j = i + 1; j < g.rows(); ++j) {
      Matrix m(2, 2);
      m << g.row(i), g.row(j);
      if (std::abs(m.determinant()) < 1e-12) continue;
      candidates.push_back(m.lu().solve(Eigen::Vector2d(l[i], l[j])));
    }
  }
  Vector best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Vector& z : candidates) {
    if (!feasible(z)) continue;
    const double d = (z - y).squaredNorm();
    if (d < best_d) best_d = d, best = z;
  }
  return best;
}

// 8. Projection contract.
Outcome ProjectionContract() {
  Rng rng(88);
  auto gauss = [&](int n, double s) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = s * rng.Gaussian();
    return v;
  };
  // Optimality and idempotence of the affine projection.
  double worst_gap = 0.0, worst_idem = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int n = 4 + t;
    const int rows = 1 + t % 3;
    Matrix a(rows, n);
    for (int r = 0; r < rows; ++r) a.row(r) = gauss(n, 1).transpose();
    ACC_ASSIGN_OR_FAIL(eq, AffineEquality::Create(a, gauss(rows, 1)));
    ACC_ASSIGN_OR_FAIL(chart, SolveFreeParametrization(eq));
    const Vector y = gauss(n, 5);
    ACC_ASSIGN_OR_FAIL(z, ProjectAffine(y, eq));
    ACC_ASSIGN_OR_FAIL(zz, ProjectAffine(z, eq));
    worst_idem = std::max(worst_idem, (zz - z).lpNorm<Eigen::Infinity>());
    const double dz = (y - z).norm();
    for (int i = 0; i < 1000; ++i) {
      const Vector w = chart.Solve(gauss(chart.free_dim(), 5));
      worst_gap = std::max(worst_gap, dz - (y - w).norm());
    }
  }
  // Hierarchy with nonnegativity: Dykstra against 10^4 feasible points.
  ACC_ASSIGN_OR_FAIL(h, Hierarchy::Balanced({4, 3}));
  ACC_ASSIGN_OR_FAIL(heq, HierarchyToEqualities(h));
  const AffineInequality nonneg = AffineInequality::NonNegative(h.size());
  const Vector y = gauss(h.size(), 4);
  ACC_ASSIGN_OR_FAIL(z, ProjectConvex(y, heq, nonneg));
  ACC_ASSIGN_OR_FAIL(zz, ProjectConvex(z, heq, nonneg));
  worst_idem = std::max(worst_idem, (zz - z).lpNorm<Eigen::Infinity>());
  for (int i = 0; i < 10000; ++i) {
    Vector leaves(h.num_leaves());
    for (int j = 0; j < leaves.size(); ++j) {
      leaves[j] = rng.Uniform() < 0.3 ? 0.0 : 3 * rng.Uniform();
    }
    worst_gap = std::max(worst_gap, (y - z).norm() - (y - h.Aggregate(leaves)).norm());
  }
  // 2-D instances against the brute-force oracle.
  double worst_qp = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int k = 3 + t % 4;
    const Vector center = gauss(2, 1);
    Matrix g(k, 2);
    Vector l(k);
    for (int i = 0; i < k; ++i) {
      g.row(i) = gauss(2, 1).transpose();
      l[i] = g.row(i).dot(center) - 0.1 - rng.Uniform();
    }
    ACC_ASSIGN_OR_FAIL(ineq, AffineInequality::Create(g, l));
    const Vector q = gauss(2, 4);
    ACC_ASSIGN_OR_FAIL(zq, ProjectConvex(q, AffineEquality::None(2), ineq));
    worst_qp = std::max(worst_qp,
                        (zq - BruteForcePolygon(q, g, l)).lpNorm<Eigen::Infinity>());
  }
  // Segment {z1 + z2 = 1, z >= 0}: closed-form clamp along the line.
  for (int t = 0; t < 200; ++t) {
    const Vector q = gauss(2, 3);
    ACC_ASSIGN_OR_FAIL(zq, ProjectConvex(q, AffineEquality::SumEquals(2, 1.0),
                                         AffineInequality::NonNegative(2)));
    const double s = std::clamp((q[0] - q[1] + 1) / 2, 0.0, 1.0);
    worst_qp = std::max(worst_qp, (zq - Eigen::Vector2d(s, 1 - s)).lpNorm<Eigen::Infinity>());
  }
  const bool pass = worst_gap <= 1e-9 && worst_idem <= 1e-9 && worst_qp <= 1e-6;
  return {pass, absl::StrFormat("optimality gap %.3g (tol 1e-9); idempotence %.3g "
                                "(tol 1e-9); 2-D QP deviation %.3g (tol 1e-6)",
                                worst_gap, worst_idem, worst_qp)};
}

// 9. Benchmark sweep properties.
Outcome BenchmarkProperties() {
  ExperimentConfig cfg;
  cfg.epsilons = {0.5, 1.0, 2.0};
  cfg.mechanisms = {BenchMechanism::kMh, BenchMechanism::kTopDown,
                    BenchMechanism::kImage, BenchMechanism::kRejection};
  cfg.repetitions = 20;
  cfg.seed = 2026;
  cfg.synth = SynthSpec{};
  ACC_ASSIGN_OR_FAIL(r, RunBenchmark(cfg));
  const std::vector<std::string> levels = {"1", "2", "3", "all"};
  bool layout = r.table.rows.size() == 3 * levels.size() * 4;
  size_t i = 0;
  for (double eps : cfg.epsilons) {
    for (const std::string& level : levels) {
      for (BenchMechanism m : cfg.mechanisms) {
        if (!layout) break;
        const ResultRow& row = r.table.rows[i++];
        layout = row.epsilon == eps && row.level == level &&
                 row.mechanism == MechanismName(m);
      }
    }
  }
  bool decreasing = layout;
  const size_t stride = levels.size() * 4;
  for (size_t k = 0; layout && k < stride; ++k) {
    const double a = r.table.rows[k].mean_l1;
    const double b = r.table.rows[stride + k].mean_l1;
    const double c = r.table.rows[2 * stride + k].mean_l1;
    decreasing = decreasing && a > b && b > c;
  }
  auto csv = EmitTable(r.table, TableFormat::kCsv);
  layout = layout && csv.ok() &&
           csv->rfind("epsilon,level,mechanism,mean_l1,std_l1\n", 0) == 0;
  const bool pass = !r.partial_failure() && layout && decreasing &&
                    r.max_equality_residual <= 1e-9;
  return {pass, absl::StrFormat("%d releases, %d failed cells; strictly decreasing "
                                "%s; max residual %.3g (tol 1e-9); layout %s",
                                r.releases, r.failed_cells, decreasing ? "yes" : "no",
                                r.max_equality_residual, layout ? "ok" : "bad")};
}

// 10. Conditioning minimizes KL among distributions supported on C.
Outcome KlMinimality() {
  Rng rng(1010);
  int violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  int states = 0;
  while (states < 100) {
    const int n = 3 + static_cast<int>(rng.NextU64() % 10);
    const std::vector<std::string> w = Worlds(n);
    ACC_ASSIGN_OR_FAIL(p, FiniteBeliefState::Create(w, RandomProbs(rng, n, 0.15)));
    std::vector<std::string> members;
    for (const std::string& x : w) if (rng.Uniform() < 0.5) members.push_back(x);
    if (members.empty()) continue;
    const Event c(members);
    auto pc = p.Probability(c);
    if (!pc.ok() || *pc == 0.0) continue;
    ++states;
    ACC_ASSIGN_OR_FAIL(cond, ConditionFinite(p, c));
    ACC_ASSIGN_OR_FAIL(best, KlDivergence(cond, p));
    for (int t = 0; t < 1000; ++t) {
      // Random competitor supported on C (and on the support of p).
      std::vector<double> q(n, 0.0);
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!c.Contains(w[i]) || p.probs()[i] == 0.0) continue;
        q[i] = -std::log(rng.Uniform());
        total += q[i];
      }
      for (double& v : q) v /= total;
      ACC_ASSIGN_OR_FAIL(qs, FiniteBeliefState::Create(w, q));
      ACC_ASSIGN_OR_FAIL(kl, KlDivergence(qs, p));
      min_margin = std::min(min_margin, kl - best);
      if (kl < best - 1e-12) ++violations;
    }
  }
  return {violations == 0,
          absl::StrFormat("%d violations over 100 states x 1000 competitors; "
                          "smallest excess KL %.3g",
                          violations, min_margin)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

int Main() {
  const std::vector<Criterion> criteria = {
      {1, "finite example", 1e-3, FiniteExample},
      {2, "sum-zero constants", 120, SumZeroConstants},
      {3, "imaging variance", 120, ImagingVariance},
      {4, "conditioned privacy audit", 30, Audit},
      {5, "disjoint-union composition", 60, DisjointUnionCheck},
      {6, "imaging commutes with mixtures", 120, ImagingMixture},
      {7, "gaussian equivalence", 120, GaussianEquivalence},
      {8, "projection contract", 1e300, ProjectionContract},
      {9, "benchmark properties", 300, BenchmarkProperties},
      {10, "KL minimality", 30, KlMinimality},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string budget = c.budget_seconds > 1e100
                             ? std::string("no limit")
                             : absl::StrFormat("limit %gs", c.budget_seconds);
    std::printf("AC%-2d %s  %s: %s [%.3fs, %s%s]\n", c.id, pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str(), secs, budget.c_str(),
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace cdp

int main() { return cdp::Main(); }
