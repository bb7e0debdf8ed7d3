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

#include "cdp/claims.h"

#include <cmath>
#include <functional>

#include "absl/strings/str_cat.h"
#include "cdp/belief.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/revision.h"
#include "cdp/update.h"
#include "cdp/verify.h"
#include "json.hpp"

namespace cdp {
namespace {

ClaimResult Relative(std::string id, std::string description, double value,
                     double target, double tolerance) {
  ClaimResult c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.value = value;
  c.target = target;
  c.tolerance = tolerance;
  c.pass = std::abs(value - target) <= tolerance * std::abs(target);
  return c;
}

ClaimResult Failed(std::string id, std::string description,
                   const absl::Status& status) {
  ClaimResult c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.value = std::nan("");
  c.detail = std::string(status.message());
  return c;
}

ClaimResult FiniteExample() {
  const std::string id = "finite.banana_box";
  const std::string what =
      "conditioning and imaging of (0,.7,.3,0) on {w3,w4}";
  absl::StatusOr<FiniteBeliefState> p =
      FiniteBeliefState::Create({"w1", "w2", "w3", "w4"}, {0, 0.7, 0.3, 0});
  if (!p.ok()) return Failed(id, what, p.status());
  const Event c({"w3", "w4"});
  absl::StatusOr<FiniteBeliefState> cond = ConditionFinite(*p, c);
  absl::StatusOr<FiniteBeliefState> image =
      ImageFinite(*p, c, {{"w1", "w3"}, {"w2", "w4"}});
  if (!cond.ok()) return Failed(id, what, cond.status());
  if (!image.ok()) return Failed(id, what, image.status());
  const std::vector<double> want_cond = {0, 0, 1, 0};
  const std::vector<double> want_image = {0, 0, 0.3, 0.7};
  double err = 0.0;
  for (size_t i = 0; i < 4; ++i) {
    err = std::max(err, std::abs(cond->probs()[i] - want_cond[i]));
    err = std::max(err, std::abs(image->probs()[i] - want_image[i]));
  }
  ClaimResult r;
  r.id = id;
  r.description = what;
  r.value = err;
  r.tolerance = 1e-12;
  r.pass = err <= 1e-12;
  r.detail = "max abs deviation from (0,0,1,0) and (0,0,.3,.7)";
  absl::StatusOr<double> kl = KlDivergence(*cond, *p);
  if (kl.ok()) absl::StrAppend(&r.detail, "; KL(cond||p) = ", *kl);
  return r;
}

std::vector<ClaimResult> SumZeroConstants() {
  std::vector<ClaimResult> out;
  const double lambda = 1.0;
  absl::StatusOr<NoiseSpec> noise = NoiseSpec::Laplace(lambda, 3);
  const AffineEquality eq = AffineEquality::SumEquals(3, 0.0);
  absl::StatusOr<Estimate> k = NormalizingConstant(*noise, eq);
  if (!k.ok()) {
    out.push_back(Failed("conditioning.k_n3", "", k.status()));
    return out;
  }
  // Strip the (1 / 2 lambda)^3 prefactor of the product density.
  out.push_back(Relative("conditioning.k_n3",
                         "unnormalized chart integral for n=3, lambda=1",
                         k->value * 8.0, 1.5, 1e-4));
  absl::StatusOr<ConditionalDensity> d =
      ConditionalDensity::Create(Vector::Zero(3), *noise, Invariant(eq));
  if (!d.ok()) {
    out.push_back(Failed("conditioning.variance_n3", "", d.status()));
    return out;
  }
  QuadratureOptions q;
  q.rel_tol = 1e-7;
  absl::StatusOr<double> var = ChartExpectation(
      *d, [](const Vector& v) { return v[0] * v[0]; }, q);
  if (!var.ok()) {
    out.push_back(Failed("conditioning.variance_n3", "", var.status()));
    return out;
  }
  out.push_back(Relative("conditioning.variance_n3",
                         "conditioned marginal variance by quadrature, lambda=1",
                         *var, 5.0 / 6.0, 5e-3));
  return out;
}

std::vector<ClaimResult> ImagingVariances(const ClaimSuiteOptions& o) {
  std::vector<ClaimResult> out;
  for (int n : {2, 3, 10}) {
    const std::string id = absl::StrCat("imaging.variance_n", n);
    absl::StatusOr<NoiseSpec> noise = NoiseSpec::Laplace(1.0, n);
    absl::StatusOr<Projector> proj =
        Projector::Create(Invariant(AffineEquality::SumEquals(n, 0.0)));
    if (!proj.ok()) {
      out.push_back(Failed(id, "", proj.status()));
      continue;
    }
    Rng rng = Rng(o.seed).Split(100 + n);
    double sum = 0.0, sq = 0.0;
    const Vector zero = Vector::Zero(n);
    for (int64_t i = 0; i < o.draws; ++i) {
      absl::StatusOr<Vector> v = ImagedDraw(zero, *noise, *proj, rng);
      sum += (*v)[0];
      sq += (*v)[0] * (*v)[0];
    }
    const double m = static_cast<double>(o.draws);
    const double var = (sq - sum * sum / m) / (m - 1.0);
    out.push_back(Relative(id, "imaged Laplace marginal variance, lambda=1",
                           var, *AnalyticImagingVariance(1.0, n), 0.03));
  }
  return out;
}

std::vector<ClaimResult> PrivacyAudits() {
  std::vector<ClaimResult> out;
  for (double eps : {0.5, 1.0, 2.0}) {
    const std::string id = absl::StrCat("conditioning.audit_eps", eps);
    const double lambda = 1.0 / eps;
    absl::StatusOr<NoiseSpec> noise = NoiseSpec::Laplace(lambda, 3);
    const Invariant c(AffineEquality::SumEquals(3, 0.0));
    Vector f1 = Vector::Zero(3);
    Vector f2(3);
    f2 << 0.5, -0.5, 0.0;  // neighbour inside C at L1 distance 1
    absl::StatusOr<ConditionalDensity> d1 =
        ConditionalDensity::Create(f1, *noise, c);
    absl::StatusOr<ConditionalDensity> d2 =
        ConditionalDensity::Create(f2, *noise, c);
    if (!d1.ok() || !d2.ok()) {
      out.push_back(Failed(id, "", d1.ok() ? d2.status() : d1.status()));
      continue;
    }
    const AuditGrid grid = AuditGrid::Regular(2, -4.0 * lambda, 4.0 * lambda, 81);
    absl::StatusOr<AuditReport> report = PrivacyAudit(
        [&](const Vector& w) { return d1->EvaluateChart(w); },
        [&](const Vector& w) { return d2->EvaluateChart(w); }, eps, grid);
    if (!report.ok()) {
      out.push_back(Failed(id, "", report.status()));
      continue;
    }
    ClaimResult r;
    r.id = id;
    r.description = "max log density ratio of conditioned neighbours on C";
    r.value = report->max_log_ratio;
    r.target = eps;
    r.tolerance = 1e-6;
    r.pass = report->pass;
    r.detail = report->grid_spec;
    out.push_back(r);
  }
  return out;
}

std::vector<ClaimResult> Comparison(const ClaimSuiteOptions& o) {
  std::vector<ClaimResult> out;
  const int64_t draws = std::max<int64_t>(o.draws / 4, 1000);
  absl::StatusOr<ConditioningVsImaging> n3 =
      CompareConditioningImaging(3, 1.0, draws, o.seed);
  if (!n3.ok()) {
    out.push_back(Failed("comparison.sandwich_n3", "", n3.status()));
    return out;
  }
  ClaimResult s;
  s.id = "comparison.sandwich_n3";
  s.description = "conditioned < imaged < unconstrained variance, n=3";
  s.value = n3->conditioned_variance;
  s.target = n3->imaged_variance;
  s.pass = n3->conditioned_variance < n3->imaged_variance &&
           n3->imaged_variance < 2.0;
  s.detail = absl::StrCat("MC conditioned ", n3->conditioned_variance,
                          ", MC imaged ", n3->imaged_variance,
                          ", analytic 5/6 < 4/3 < 2");
  out.push_back(s);

  ClaimResult c;
  c.id = "comparison.conjecture_n2_to_10";
  c.description = "conditioning variance below imaging for n = 2..10";
  c.reported_only = true;
  int holds = 0;
  for (int n = 2; n <= 10; ++n) {
    absl::StatusOr<ConditioningVsImaging> r =
        CompareConditioningImaging(n, 1.0, draws, o.seed + n);
    if (!r.ok()) continue;
    holds += r->conditioning_smaller ? 1 : 0;
    absl::StrAppend(&c.detail, n == 2 ? "" : "; ", "n=", n, ": ",
                    r->conditioned_variance, " vs ", r->imaged_variance);
  }
  c.value = holds;
  c.target = 9;
  c.pass = holds == 9;
  out.push_back(c);
  return out;
}

ClaimResult MhStationarity(const ClaimSuiteOptions& o) {
  const std::string id = "mh.stationary_variance_n3";
  absl::StatusOr<NoiseSpec> noise = NoiseSpec::Laplace(1.0, 3);
  MhConfig cfg;
  cfg.n_samples = o.draws;
  cfg.seed = o.seed;
  cfg.proposal_scale = 1.5;
  absl::StatusOr<SampleSet> s =
      MhSampleAffine(Vector::Zero(3), *noise,
                     AffineEquality::SumEquals(3, 0.0), std::nullopt, cfg);
  if (!s.ok()) return Failed(id, "", s.status());
  const Vector col = s->draws.col(0);
  const double var = (col.array() - col.mean()).square().sum() / (col.size() - 1);
  ClaimResult r = Relative(id, "MH marginal variance of u1 under sum zero", var,
                           5.0 / 6.0, 0.05);
  r.detail = absl::StrCat("acceptance ", s->acceptance_rate, ", ESS ", s->ess);
  return r;
}

}  // namespace

std::vector<ClaimResult> RunClaimSuite(const ClaimSuiteOptions& options) {
  std::vector<ClaimResult> claims;
  claims.push_back(FiniteExample());
  absl::StatusOr<double> lambda = CalibrateLaplace(1.0, 0.5);
  claims.push_back(Relative("calibration.laplace", "lambda for unit L1, eps=0.5",
                            lambda.ok() ? *lambda : std::nan(""), 2.0, 1e-15));
  for (ClaimResult& c : SumZeroConstants()) claims.push_back(std::move(c));
  for (ClaimResult& c : ImagingVariances(options)) claims.push_back(std::move(c));
  for (ClaimResult& c : PrivacyAudits()) claims.push_back(std::move(c));
  for (ClaimResult& c : Comparison(options)) claims.push_back(std::move(c));
  claims.push_back(MhStationarity(options));
  return claims;
}

std::string ClaimsToJson(const std::vector<ClaimResult>& claims) {
  nlohmann::json out = nlohmann::json::object();
  bool all_pass = true;
  for (const ClaimResult& c : claims) {
    auto num = [](double v) {
      return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
    };
    out["claims"][c.id] = {{"description", c.description},
                           {"value", num(c.value)},
                           {"target", num(c.target)},
                           {"tolerance", num(c.tolerance)},
                           {"pass", c.pass},
                           {"reported_only", c.reported_only},
                           {"detail", c.detail}};
    if (!c.reported_only) all_pass = all_pass && c.pass;
  }
  out["all_pass"] = all_pass;
  return out.dump(2) + "\n";
}

}  // namespace cdp
