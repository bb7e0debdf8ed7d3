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

// cdp: command-line front end for the constrained privacy toolkit.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cdp/belief.h"
#include "cdp/bench.h"
#include "cdp/claims.h"
#include "cdp/csv.h"
#include "cdp/hierarchy.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/revision.h"
#include "cdp/rng.h"
#include "cdp/update.h"
#include "json.hpp"

namespace cdp {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

int Report(const absl::Status& s) {
  std::cerr << "cdp: " << s.message() << "\n";
  return kExitError;
}

absl::Status WriteFile(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(path);
  if (!out) return absl::InternalError(absl::StrCat("IOError: cannot write ", path));
  out << text;
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("IOError: write failed for ", path));
}

std::string Number(double v) { return absl::StrFormat("%.17g", v); }

// Labelled values from a CSV with an id column (node or id) and a value
// column (count or value).
struct Labelled {
  std::vector<std::string> ids;
  Vector values;
};

absl::StatusOr<Labelled> ReadLabelled(const std::string& path) {
  absl::StatusOr<CsvTable> t = ReadCsvFile(path);
  if (!t.ok()) return t.status();
  int id = t->Column("node");
  if (id < 0) id = t->Column("id");
  int val = t->Column("count");
  if (val < 0) val = t->Column("value");
  if (id < 0 || val < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ParseError: ", path, " needs an id column (node or id) and a value "
                              "column (count or value)"));
  }
  Labelled out;
  out.values.resize(t->rows.size());
  for (size_t r = 0; r < t->rows.size(); ++r) {
    out.ids.push_back(t->rows[r][id]);
    absl::StatusOr<double> v = ParseDouble(t->rows[r][val]);
    if (!v.ok()) return v.status();
    out.values[r] = *v;
  }
  return out;
}

// Values for every node of the hierarchy, in coordinate order.
absl::StatusOr<Vector> ReadNodeValues(const std::string& path, const Hierarchy& h) {
  absl::StatusOr<Labelled> l = ReadLabelled(path);
  if (!l.ok()) return l.status();
  Vector x = Vector::Constant(h.size(), std::nan(""));
  for (size_t i = 0; i < l->ids.size(); ++i) {
    const std::optional<int> at = h.IndexOf(l->ids[i]);
    if (!at) {
      return absl::InvalidArgumentError(
          absl::StrCat("HierarchyMismatch: unknown node '", l->ids[i], "'"));
    }
    x[*at] = l->values[i];
  }
  for (int i = 0; i < h.size(); ++i) {
    if (std::isnan(x[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("HierarchyMismatch: no value for node '", h.id(i), "'"));
    }
  }
  return x;
}

std::string LabelledCsv(const std::vector<std::string>& ids, const Vector& v) {
  std::string out = "id,value\n";
  for (size_t i = 0; i < ids.size(); ++i) {
    absl::StrAppend(&out, ids[i], ",", Number(v[i]), "\n");
  }
  return out;
}

std::string DrawsCsv(const std::vector<std::string>& ids, const Matrix& draws) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) absl::StrAppend(&out, i ? "," : "", ids[i]);
  out += "\n";
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws.cols(); ++c) {
      absl::StrAppend(&out, c ? "," : "", Number(draws(r, c)));
    }
    out += "\n";
  }
  return out;
}

std::string DiagnosticsPath(const std::string& output, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (output.empty() || output == "-") return "diagnostics.json";
  return (std::filesystem::path(output).parent_path() / "diagnostics.json").string();
}

// ---- oracle ---------------------------------------------------------------

absl::StatusOr<json> RunOracle(const json& s) {
  const auto worlds = s.at("worlds").get<std::vector<std::string>>();
  const auto probs = s.at("probs").get<std::vector<double>>();
  absl::StatusOr<FiniteBeliefState> p = FiniteBeliefState::Create(worlds, probs);
  if (!p.ok()) return p.status();
  auto as_object = [&](const FiniteBeliefState& q) {
    json o = json::object();
    for (size_t i = 0; i < q.worlds().size(); ++i) o[q.worlds()[i]] = q.probs()[i];
    return o;
  };
  json out = {{"prior", as_object(*p)}, {"events", json::object()}};
  if (!s.contains("events")) return out;
  for (const auto& [name, members] : s.at("events").items()) {
    const Event e(members.get<std::vector<std::string>>());
    json r = json::object();
    absl::StatusOr<double> mass = p->Probability(e);
    if (!mass.ok()) return mass.status();
    r["probability"] = *mass;
    absl::StatusOr<FiniteBeliefState> cond = ConditionFinite(*p, e);
    r["condition"] = cond.ok() ? as_object(*cond) : json(std::string(cond.status().message()));
    if (s.contains("closest") && s["closest"].contains(name)) {
      ClosestWorldMap closest;
      for (const auto& [w, c] : s["closest"][name].items()) closest[w] = c.get<std::string>();
      absl::StatusOr<FiniteBeliefState> image = ImageFinite(*p, e, closest);
      r["image"] = image.ok() ? as_object(*image) : json(std::string(image.status().message()));
    }
    out["events"][name] = r;
  }
  return out;
}

}  // namespace
}  // namespace cdp

int main(int argc, char** argv) {
  using namespace cdp;
  CLI::App app{"Constrained differential privacy: conditioning, imaging and benchmarks"};
  app.require_subcommand(1);

  // oracle
  std::string scenario, oracle_out;
  CLI::App* oracle = app.add_subcommand("oracle", "Condition and image a finite belief state");
  oracle->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("-o,--output", oracle_out, "Output JSON (default stdout)");

  // perturb
  std::string p_in, p_out, p_mech = "laplace";
  double p_eps = 1.0, p_delta = 0.0, p_sens = 1.0;
  uint64_t p_seed = 0;
  CLI::App* perturb = app.add_subcommand("perturb", "Add calibrated noise to a vector of counts");
  perturb->add_option("--input", p_in, "CSV with id and count columns")->required()->check(CLI::ExistingFile);
  perturb->add_option("--mechanism", p_mech, "laplace or gaussian")
      ->check(CLI::IsMember({"laplace", "gaussian"}));
  perturb->add_option("--epsilon", p_eps, "Privacy budget")->required();
  perturb->add_option("--delta", p_delta, "Failure probability (gaussian only)");
  perturb->add_option("--sensitivity", p_sens, "L1 (laplace) or L2 (gaussian) sensitivity");
  perturb->add_option("--seed", p_seed, "Random seed");
  perturb->add_option("--output", p_out, "Output CSV (default stdout)");

  // condition / image share their flags
  struct SamplingFlags {
    std::string counts, hierarchy, output, diagnostics, init = "random";
    double epsilon = 1.0, proposal = 0.0;
    int64_t samples = 1000, burnin = 10000;
    uint64_t seed = 0;
    bool nonneg = false;
  };
  SamplingFlags cf, imf;
  auto add_sampling = [](CLI::App* sub, SamplingFlags& f) {
    sub->add_option("--counts", f.counts, "Leaf counts CSV (node,count)")->required()->check(CLI::ExistingFile);
    sub->add_option("--hierarchy", f.hierarchy, "Hierarchy CSV (node,parent,level)")->required()->check(CLI::ExistingFile);
    sub->add_option("--epsilon", f.epsilon, "Privacy budget")->required();
    sub->add_option("--samples", f.samples, "Number of draws");
    sub->add_option("--burnin", f.burnin, "MH burn-in steps");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_flag("--nonneg", f.nonneg, "Add the constraint x >= 0");
    sub->add_option("--output", f.output, "Draws CSV, one per row (default stdout)");
  };
  CLI::App* condition = app.add_subcommand("condition", "Sample the conditioned mechanism by MH");
  add_sampling(condition, cf);
  condition->add_option("--diagnostics", cf.diagnostics, "Diagnostics JSON (default next to --output)");
  condition->add_option("--proposal-scale", cf.proposal, "Random-walk step per leaf (default: lambda)");
  condition->add_option("--init", cf.init, "random or query")->check(CLI::IsMember({"random", "query"}));
  CLI::App* image = app.add_subcommand("image", "Draw imaged (projected) releases");
  add_sampling(image, imf);

  // project
  std::string pr_counts, pr_hier, pr_out, pr_method = "projection";
  bool pr_nonneg = false;
  CLI::App* project = app.add_subcommand("project", "Make noisy node values consistent");
  project->add_option("--counts", pr_counts, "Noisy values for every node (node,count)")->required()->check(CLI::ExistingFile);
  project->add_option("--hierarchy", pr_hier, "Hierarchy CSV")->required()->check(CLI::ExistingFile);
  project->add_flag("--nonneg", pr_nonneg, "Add the constraint x >= 0");
  project->add_option("--method", pr_method, "projection or topdown")
      ->check(CLI::IsMember({"projection", "topdown"}));
  project->add_option("--output", pr_out, "Output CSV (default stdout)");

  // verify
  std::string v_out;
  ClaimSuiteOptions v_opts;
  CLI::App* verify = app.add_subcommand("verify", "Run the claim suite and print a JSON report");
  verify->add_option("--seed", v_opts.seed, "Random seed");
  verify->add_option("--draws", v_opts.draws, "Monte Carlo draws per sampling check");
  verify->add_option("--output", v_out, "Report JSON (default stdout)");

  // bench
  std::string b_config, b_out, b_format = "csv";
  CLI::App* bench = app.add_subcommand("bench", "Run the hierarchy benchmark sweep");
  bench->add_option("--config", b_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", b_out, "Results file (default stdout)");
  bench->add_option("--format", b_format, "csv, json, gnuplot or wide")
      ->check(CLI::IsMember({"csv", "json", "gnuplot", "wide"}));

  CLI11_PARSE(app, argc, argv);

  if (*oracle) {
    std::ifstream in(scenario);
    json s;
    try {
      in >> s;
      absl::StatusOr<json> r = RunOracle(s);
      if (!r.ok()) return Report(r.status());
      absl::Status w = WriteFile(oracle_out, r->dump(2) + "\n");
      return w.ok() ? kExitOk : Report(w);
    } catch (const json::exception& e) {
      return Report(absl::InvalidArgumentError(absl::StrCat("ParseError: ", e.what())));
    }
  }

  if (*perturb) {
    absl::StatusOr<Labelled> l = ReadLabelled(p_in);
    if (!l.ok()) return Report(l.status());
    const int n = static_cast<int>(l->values.size());
    absl::StatusOr<PrivacyParams> params = PrivacyParams::Create(p_eps, p_delta);
    if (!params.ok()) return Report(params.status());
    absl::StatusOr<NoiseSpec> noise = absl::InvalidArgumentError("unset");
    if (p_mech == "laplace") {
      absl::StatusOr<double> lambda = CalibrateLaplace(p_sens, p_eps);
      if (!lambda.ok()) return Report(lambda.status());
      noise = NoiseSpec::Laplace(*lambda, n);
    } else {
      absl::StatusOr<double> sigma = CalibrateGaussian(p_sens, *params);
      if (!sigma.ok()) return Report(sigma.status());
      noise = NoiseSpec::Gaussian(*sigma, n);
    }
    if (!noise.ok()) return Report(noise.status());
    absl::StatusOr<Vector> v = SampleAdditive(l->values, *noise, p_seed);
    if (!v.ok()) return Report(v.status());
    absl::Status w = WriteFile(p_out, LabelledCsv(l->ids, *v));
    return w.ok() ? kExitOk : Report(w);
  }

  if (*condition || *image) {
    const SamplingFlags& f = *condition ? cf : imf;
    absl::StatusOr<HierarchicalData> data = LoadCounts(f.counts, f.hierarchy);
    if (!data.ok()) return Report(data.status());
    const Hierarchy& h = data->hierarchy;
    absl::StatusOr<double> lambda = CalibrateLaplace(1.0, f.epsilon);
    if (!lambda.ok()) return Report(lambda.status());
    absl::StatusOr<NoiseSpec> noise = NoiseSpec::Laplace(*lambda, h.size());
    if (!noise.ok()) return Report(noise.status());
    std::optional<AffineInequality> nonneg;
    if (f.nonneg) nonneg = AffineInequality::NonNegative(h.size());

    if (*condition) {
      MhConfig mc;
      mc.n_samples = f.samples;
      mc.burn_in = f.burnin;
      mc.seed = f.seed;
      mc.proposal_scale = f.proposal;
      mc.init = f.init == "query" ? MhInit::kAtQueryValue : MhInit::kRandomFeasible;
      absl::StatusOr<SampleSet> s = MhSample(data->x, *noise, h, nonneg, mc);
      if (!s.ok()) return Report(s.status());
      for (const std::string& warning : s->warnings) std::cerr << "cdp: " << warning << "\n";
      absl::Status w = WriteFile(f.output, DrawsCsv(h.order(), s->draws));
      if (!w.ok()) return Report(w);
      const json diag = {{"acceptance_rate", s->acceptance_rate},
                         {"ess", s->ess},
                         {"proposed", s->proposed},
                         {"accepted", s->accepted},
                         {"seed", s->seed},
                         {"warnings", s->warnings}};
      w = WriteFile(DiagnosticsPath(f.output, f.diagnostics), diag.dump(2) + "\n");
      return w.ok() ? kExitOk : Report(w);
    }

    absl::StatusOr<AffineEquality> eq = HierarchyToEqualities(h);
    if (!eq.ok()) return Report(eq.status());
    absl::StatusOr<Invariant> inv = Invariant(*eq);
    if (nonneg) inv = Invariant::Intersection(*eq, *nonneg);
    if (!inv.ok()) return Report(inv.status());
    absl::StatusOr<Projector> proj = Projector::Create(*inv);
    if (!proj.ok()) return Report(proj.status());
    Rng rng(f.seed);
    Matrix draws(f.samples, h.size());
    for (int64_t i = 0; i < f.samples; ++i) {
      absl::StatusOr<Vector> v = ImagedDraw(data->x, *noise, *proj, rng);
      if (!v.ok()) return Report(v.status());
      draws.row(i) = v->transpose();
    }
    absl::Status w = WriteFile(f.output, DrawsCsv(h.order(), draws));
    return w.ok() ? kExitOk : Report(w);
  }

  if (*project) {
    absl::StatusOr<Hierarchy> h = Hierarchy::LoadCsv(pr_hier);
    if (!h.ok()) return Report(h.status());
    absl::StatusOr<Vector> y = ReadNodeValues(pr_counts, *h);
    if (!y.ok()) return Report(y.status());
    absl::StatusOr<Vector> z = absl::InternalError("unset");
    if (pr_method == "topdown") {
      if (pr_nonneg) return Report(absl::InvalidArgumentError("--nonneg is not supported by topdown"));
      z = TopDown(*h, *y);
    } else {
      absl::StatusOr<AffineEquality> eq = HierarchyToEqualities(*h);
      if (!eq.ok()) return Report(eq.status());
      absl::StatusOr<Invariant> inv = Invariant(*eq);
      if (pr_nonneg) {
        inv = Invariant::Intersection(*eq, AffineInequality::NonNegative(h->size()));
      }
      if (!inv.ok()) return Report(inv.status());
      absl::StatusOr<Projector> proj = Projector::Create(*inv);
      if (!proj.ok()) return Report(proj.status());
      z = proj->Apply(*y);
    }
    if (!z.ok()) return Report(z.status());
    absl::Status w = WriteFile(pr_out, LabelledCsv(h->order(), *z));
    return w.ok() ? kExitOk : Report(w);
  }

  if (*verify) {
    const std::vector<ClaimResult> claims = RunClaimSuite(v_opts);
    absl::Status w = WriteFile(v_out, ClaimsToJson(claims));
    if (!w.ok()) return Report(w);
    bool all = true;
    for (const ClaimResult& c : claims) all = all && (c.pass || c.reported_only);
    return all ? kExitOk : kExitError;
  }

  if (*bench) {
    absl::StatusOr<ExperimentConfig> cfg = ExperimentConfig::Load(b_config);
    if (!cfg.ok()) return Report(cfg.status());
    absl::StatusOr<BenchResult> r = RunBenchmark(*cfg);
    if (!r.ok()) return Report(r.status());
    const TableFormat format = b_format == "json"      ? TableFormat::kJson
                               : b_format == "gnuplot" ? TableFormat::kGnuplot
                               : b_format == "wide"    ? TableFormat::kWide
                                                       : TableFormat::kCsv;
    absl::Status w = b_out.empty() ? absl::OkStatus() : WriteTable(r->table, format, b_out);
    if (b_out.empty()) {
      absl::StatusOr<std::string> text = EmitTable(r->table, format);
      if (!text.ok()) return Report(text.status());
      std::cout << *text;
    }
    if (!w.ok()) return Report(w);
    std::cerr << absl::StrFormat("cdp: %d releases, %d failed cells, max residual %.3g\n",
                                 r->releases, r->failed_cells, r->max_equality_residual);
    for (const std::string& e : r->errors) std::cerr << "cdp: " << e << "\n";
    return r->partial_failure() ? kExitPartial : kExitOk;
  }
  return kExitOk;
}
