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

#include "cdp/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cdp/csv.h"
#include "cdp/mechanisms.h"
#include "cdp/rng.h"
#include "cdp/update.h"
#include "json.hpp"

namespace cdp {
namespace {

using nlohmann::json;

constexpr BenchMechanism kAllMechanisms[] = {
    BenchMechanism::kMh, BenchMechanism::kTopDown, BenchMechanism::kImage,
    BenchMechanism::kRejection};

absl::Status InvalidConfig(std::string_view why) {
  return absl::InvalidArgumentError(
      absl::StrCat("InvalidConfig: ", std::string(why)));
}

std::string ResolvePath(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

// Inverse-CDF Poisson sampler over a window of +-12 standard deviations,
// which holds all but a negligible tail of the mass.
class PoissonTable {
 public:
  explicit PoissonTable(double mean) {
    const double sd = std::sqrt(mean);
    first_ = static_cast<int64_t>(std::max(0.0, std::floor(mean - 12 * sd - 10)));
    const int64_t last = static_cast<int64_t>(std::ceil(mean + 12 * sd + 10));
    double total = 0.0;
    for (int64_t k = first_; k <= last; ++k) {
      total += std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
      cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
  }

  int64_t Draw(Rng& rng) const {
    const double u = rng.Uniform();
    const size_t k =
        std::lower_bound(cumulative_.begin(), cumulative_.end(), u) -
        cumulative_.begin();
    return first_ + static_cast<int64_t>(std::min(k, cumulative_.size() - 1));
  }

 private:
  int64_t first_ = 0;
  std::vector<double> cumulative_;
};

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  return absl::StrFormat("%.17g", v);
}

int WorkerCount(int requested, size_t jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("CDP_THREADS"); cap != nullptr) {
    const int limit = std::atoi(cap);
    if (limit > 0) n = std::min(n, limit);
  }
  n = std::max(1, n);
  return static_cast<int>(std::min<size_t>(n, std::max<size_t>(jobs, 1)));
}

// Everything a release needs that does not depend on epsilon or the seed.
struct SweepContext {
  const ExperimentConfig* config;
  const HierarchicalData* data;
  AffineEquality equalities = AffineEquality::None(0);
  Invariant invariant = Invariant::Unconstrained(0);
  std::optional<AffineInequality> nonneg;
  std::unique_ptr<Projector> projector;
};

absl::StatusOr<Vector> Release(const SweepContext& ctx, BenchMechanism mech,
                               double epsilon, uint64_t seed) {
  const Vector& x = ctx.data->x;
  if (ctx.config->zero_noise) return x;
  absl::StatusOr<double> lambda = CalibrateLaplace(1.0, epsilon);
  if (!lambda.ok()) return lambda.status();
  absl::StatusOr<NoiseSpec> noise =
      NoiseSpec::Laplace(*lambda, static_cast<int>(x.size()));
  if (!noise.ok()) return noise.status();
  Rng rng(seed);
  switch (mech) {
    case BenchMechanism::kTopDown:
      return TopDown(ctx.data->hierarchy, x + DrawNoise(*noise, rng));
    case BenchMechanism::kImage:
      return ImagedDraw(x, *noise, *ctx.projector, rng);
    case BenchMechanism::kRejection: {
      absl::StatusOr<ConditionalSampler> sampler = ConditionalSampler::Create(
          x, *noise, ctx.invariant, ctx.config->rejection_max_tries);
      if (!sampler.ok()) return sampler.status();
      return sampler->Draw(rng);
    }
    case BenchMechanism::kMh: {
      const MhBenchOptions& o = ctx.config->mh;
      MhConfig mc;
      const double factor =
          o.proposal_scale_factor > 0.0
              ? o.proposal_scale_factor
              : 2.38 / std::sqrt(static_cast<double>(
                           std::max(1, ctx.data->hierarchy.num_leaves())));
      mc.proposal_scale = factor * *lambda;
      mc.init = o.init;
      mc.burn_in = o.burn_in;
      mc.n_samples = o.release == MhRelease::kDraw ? 1 : o.chain_mean_samples;
      mc.seed = seed;
      mc.target = o.target;
      absl::StatusOr<SampleSet> s =
          MhSample(x, *noise, ctx.data->hierarchy, ctx.nonneg, mc);
      if (!s.ok()) return s.status();
      if (o.release == MhRelease::kDraw) return Vector(s->draws.row(0).transpose());
      return Vector(s->draws.colwise().mean().transpose());
    }
  }
  return absl::InternalError("unknown mechanism");
}

}  // namespace

std::string MechanismName(BenchMechanism m) {
  switch (m) {
    case BenchMechanism::kMh:
      return "mh";
    case BenchMechanism::kTopDown:
      return "topdown";
    case BenchMechanism::kImage:
      return "image";
    case BenchMechanism::kRejection:
      return "rejection";
  }
  return "unknown";
}

absl::StatusOr<BenchMechanism> ParseMechanism(std::string_view name) {
  for (BenchMechanism m : kAllMechanisms) {
    if (MechanismName(m) == name) return m;
  }
  return InvalidConfig(absl::StrCat("unknown mechanism '", std::string(name),
                                    "' (expected mh, topdown, image or "
                                    "rejection)"));
}

absl::Status ExperimentConfig::Validate() const {
  if (epsilons.empty()) return InvalidConfig("epsilons must be nonempty");
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      return InvalidConfig(absl::StrCat("epsilon ", e, " is not positive"));
    }
  }
  if (repetitions < 1) return InvalidConfig("repetitions must be at least 1");
  const bool files = !hierarchy_path.empty() || !counts_path.empty();
  if (files == synth.has_value()) {
    return InvalidConfig(
        "give either hierarchy_path and counts_path, or a synth spec");
  }
  if (files && (hierarchy_path.empty() || counts_path.empty())) {
    return InvalidConfig("hierarchy_path and counts_path go together");
  }
  if (mh.burn_in < 0 || mh.chain_mean_samples < 1 ||
      !(mh.proposal_scale_factor >= 0.0)) {
    return InvalidConfig("mh options out of range");
  }
  if (rejection_max_tries < 1) {
    return InvalidConfig("rejection_max_tries must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::FromJson(
    std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("ParseError: ", e.what()));
  }
  if (!j.is_object()) return InvalidConfig("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "epsilons", "mechanisms",  "repetitions", "seed",
      "hierarchy_path", "counts_path", "synth", "nonneg",
      "zero_noise", "mh", "rejection_max_tries", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) return InvalidConfig(absl::StrCat("unknown key ", key));
  }
  ExperimentConfig c;
  c.epsilons = {0.5, 1.0, 2.0};
  c.mechanisms.assign(std::begin(kAllMechanisms), std::end(kAllMechanisms));
  try {
    if (j.contains("epsilons")) c.epsilons = j["epsilons"].get<std::vector<double>>();
    if (j.contains("mechanisms")) {
      c.mechanisms.clear();
      for (const std::string& name : j["mechanisms"].get<std::vector<std::string>>()) {
        absl::StatusOr<BenchMechanism> m = ParseMechanism(name);
        if (!m.ok()) return m.status();
        c.mechanisms.push_back(*m);
      }
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    c.seed = j.value("seed", c.seed);
    c.hierarchy_path = ResolvePath(base_dir, j.value("hierarchy_path", ""));
    c.counts_path = ResolvePath(base_dir, j.value("counts_path", ""));
    if (j.contains("synth")) {
      const json& s = j["synth"];
      SynthSpec spec;
      spec.branching = s.value("branching", spec.branching);
      spec.levels = s.value("levels", static_cast<int>(spec.branching.size()) + 1);
      spec.leaf_mean = s.value("leaf_mean", spec.leaf_mean);
      c.synth = spec;
    }
    c.nonneg = j.value("nonneg", c.nonneg);
    c.zero_noise = j.value("zero_noise", c.zero_noise);
    if (j.contains("mh")) {
      const json& m = j["mh"];
      c.mh.burn_in = m.value("burn_in", c.mh.burn_in);
      c.mh.chain_mean_samples =
          m.value("chain_mean_samples", c.mh.chain_mean_samples);
      c.mh.proposal_scale_factor =
          m.value("proposal_scale_factor", c.mh.proposal_scale_factor);
      const std::string release = m.value("release", "draw");
      if (release == "draw") {
        c.mh.release = MhRelease::kDraw;
      } else if (release == "chain_mean") {
        c.mh.release = MhRelease::kChainMean;
      } else {
        return InvalidConfig(absl::StrCat("unknown mh.release ", release));
      }
      const std::string init = m.value("init", "random");
      if (init == "random") {
        c.mh.init = MhInit::kRandomFeasible;
      } else if (init == "query") {
        c.mh.init = MhInit::kAtQueryValue;
      } else {
        return InvalidConfig(absl::StrCat("unknown mh.init ", init));
      }
      const std::string target = m.value("target", "full");
      if (target == "full") {
        c.mh.target = MhTarget::kFullProduct;
      } else if (target == "leaf") {
        c.mh.target = MhTarget::kLeafOnly;
      } else {
        return InvalidConfig(absl::StrCat("unknown mh.target ", target));
      }
    }
    c.rejection_max_tries = j.value("rejection_max_tries", c.rejection_max_tries);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    return InvalidConfig(e.what());
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("IOError: cannot open ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str(),
                  std::filesystem::path(path).parent_path().string());
}

absl::StatusOr<HierarchicalData> CountsFromCsv(std::istream& counts,
                                               Hierarchy hierarchy) {
  absl::StatusOr<CsvTable> table = ReadCsv(counts);
  if (!table.ok()) return table.status();
  int id_col = table->Column("node");
  if (id_col < 0) id_col = table->Column("id");
  const int count_col = table->Column("count");
  if (id_col < 0 || count_col < 0) {
    return absl::InvalidArgumentError(
        "ParseError: counts CSV needs columns node,count");
  }
  const int leaves = hierarchy.num_leaves();
  Vector leaf_values = Vector::Constant(leaves, std::nan(""));
  for (const std::vector<std::string>& row : table->rows) {
    const std::string& id = row[id_col];
    const std::optional<int> index = hierarchy.IndexOf(id);
    if (!index || !hierarchy.is_leaf(*index)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "HierarchyMismatch: '", id, "' is not a leaf of the hierarchy"));
    }
    if (!std::isnan(leaf_values[*index])) {
      return absl::InvalidArgumentError(
          absl::StrCat("HierarchyMismatch: leaf '", id, "' listed twice"));
    }
    absl::StatusOr<double> v = ParseDouble(row[count_col]);
    if (!v.ok()) return v.status();
    if (!std::isfinite(*v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("ParseError: count for '", id, "' is not finite"));
    }
    if (*v < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("NegativeCount: leaf '", id, "' has count ", *v));
    }
    leaf_values[*index] = *v;
  }
  for (int i = 0; i < leaves; ++i) {
    if (std::isnan(leaf_values[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "HierarchyMismatch: no count for leaf '", hierarchy.id(i), "'"));
    }
  }
  Vector x = hierarchy.Aggregate(leaf_values);
  return HierarchicalData{std::move(x), std::move(hierarchy)};
}

absl::StatusOr<HierarchicalData> LoadCounts(const std::string& counts_path,
                                            const std::string& hierarchy_path) {
  absl::StatusOr<Hierarchy> h = Hierarchy::LoadCsv(hierarchy_path);
  if (!h.ok()) return h.status();
  std::ifstream in(counts_path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("ParseError: cannot open ", counts_path));
  }
  return CountsFromCsv(in, *std::move(h));
}

absl::StatusOr<HierarchicalData> SynthData(const SynthSpec& spec,
                                           uint64_t seed) {
  if (spec.levels < 1 ||
      static_cast<int>(spec.branching.size()) != spec.levels - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "InvalidSpec: ", spec.levels, " levels need ", spec.levels - 1,
        " branching factors, got ", spec.branching.size()));
  }
  if (!(spec.leaf_mean > 0.0) || !std::isfinite(spec.leaf_mean)) {
    return absl::InvalidArgumentError("InvalidSpec: leaf_mean must be positive");
  }
  for (int b : spec.branching) {
    if (b < 1) return absl::InvalidArgumentError("InvalidSpec: branching < 1");
  }
  absl::StatusOr<Hierarchy> h = Hierarchy::Balanced(spec.branching);
  if (!h.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidSpec: ", h.status().message()));
  }
  const PoissonTable poisson(spec.leaf_mean);
  Rng rng(seed);
  Vector leaves(h->num_leaves());
  for (Eigen::Index i = 0; i < leaves.size(); ++i) {
    leaves[i] = static_cast<double>(poisson.Draw(rng));
  }
  Vector x = h->Aggregate(leaves);
  return HierarchicalData{std::move(x), *std::move(h)};
}

double NormalizedL1(const Vector& x, const Vector& y,
                    const std::vector<int>& indices) {
  if (indices.empty()) return 0.0;
  double sum = 0.0;
  for (int i : indices) sum += std::abs(x[i] - y[i]);
  return sum / static_cast<double>(indices.size());
}

absl::StatusOr<HierarchicalData> LoadExperimentData(
    const ExperimentConfig& config) {
  if (config.synth) return SynthData(*config.synth, config.seed);
  return LoadCounts(config.counts_path, config.hierarchy_path);
}

absl::StatusOr<BenchResult> RunBenchmark(const ExperimentConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<HierarchicalData> data = LoadExperimentData(config);
  if (!data.ok()) return data.status();
  return RunBenchmark(config, *data);
}

absl::StatusOr<BenchResult> RunBenchmark(const ExperimentConfig& config,
                                         const HierarchicalData& data) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const Hierarchy& h = data.hierarchy;
  const int m = h.size();
  if (data.x.size() != m) {
    return absl::InvalidArgumentError("HierarchyMismatch: data length");
  }

  SweepContext ctx;
  ctx.config = &config;
  ctx.data = &data;
  absl::StatusOr<AffineEquality> eq = HierarchyToEqualities(h);
  if (!eq.ok()) return eq.status();
  ctx.equalities = *eq;
  if (config.nonneg) {
    ctx.nonneg = AffineInequality::NonNegative(m);
    absl::StatusOr<Invariant> inv = Invariant::Intersection(*eq, *ctx.nonneg);
    if (!inv.ok()) return inv.status();
    ctx.invariant = *std::move(inv);
  } else {
    ctx.invariant = Invariant(*eq);
  }
  absl::StatusOr<Projector> projector = Projector::Create(ctx.invariant);
  if (!projector.ok()) return projector.status();
  ctx.projector = std::make_unique<Projector>(*std::move(projector));

  // Level index sets; slot num_levels is "all".
  std::vector<std::vector<int>> groups;
  for (int level = 1; level <= h.num_levels(); ++level) {
    groups.push_back(h.LevelIndices(level));
  }
  std::vector<int> all(m);
  for (int i = 0; i < m; ++i) all[i] = i;
  groups.push_back(all);

  const size_t n_eps = config.epsilons.size();
  const size_t n_mech = config.mechanisms.size();
  const size_t reps = config.repetitions;
  const size_t jobs = n_eps * n_mech * reps;

  struct Cell {
    std::vector<double> l1;
    double residual = 0.0;
    absl::Status status;
  };
  std::vector<Cell> cells(jobs);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t job = next++; job < jobs; job = next++) {
      const size_t e = job / (n_mech * reps);
      const size_t k = (job / reps) % n_mech;
      const size_t r = job % reps;
      const BenchMechanism mech = config.mechanisms[k];
      // The seed ignores epsilon, so every budget sees the same underlying
      // random numbers and the comparison across budgets is paired.
      const uint64_t seed = DeriveSeed(DeriveSeed(config.seed, r + 1),
                                       static_cast<uint64_t>(mech) + 1);
      Cell& cell = cells[job];
      absl::StatusOr<Vector> release =
          Release(ctx, mech, config.epsilons[e], seed);
      if (!release.ok()) {
        cell.status = release.status();
        continue;
      }
      cell.residual = ctx.equalities.rows() == 0
                          ? 0.0
                          : ctx.equalities.Residual(*release)
                                .lpNorm<Eigen::Infinity>();
      if (!(cell.residual <= kMembershipTolerance)) {
        cell.status = absl::InternalError(absl::StrCat(
            "InvariantViolation: release residual ", cell.residual));
        continue;
      }
      for (const std::vector<int>& g : groups) {
        cell.l1.push_back(NormalizedL1(data.x, *release, g));
      }
    }
  };
  const int threads = WorkerCount(config.threads, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  BenchResult result;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t e = 0; e < n_eps; ++e) {
    for (size_t g = 0; g < groups.size(); ++g) {
      const std::string level =
          g + 1 == groups.size() ? "all" : std::to_string(g + 1);
      for (size_t k = 0; k < n_mech; ++k) {
        ResultRow row;
        row.epsilon = config.epsilons[e];
        row.level = level;
        row.mechanism = MechanismName(config.mechanisms[k]);
        const Cell* failed = nullptr;
        double sum = 0.0;
        for (size_t r = 0; r < reps; ++r) {
          const Cell& c = cells[(e * n_mech + k) * reps + r];
          if (!c.status.ok()) {
            failed = &c;
            break;
          }
          sum += c.l1[g];
        }
        if (failed != nullptr) {
          row.mean_l1 = nan;
          row.std_l1 = nan;
          row.note = std::string(failed->status.message());
        } else {
          row.mean_l1 = sum / reps;
          double ss = 0.0;
          for (size_t r = 0; r < reps; ++r) {
            const double d =
                cells[(e * n_mech + k) * reps + r].l1[g] - row.mean_l1;
            ss += d * d;
          }
          row.std_l1 = reps > 1 ? std::sqrt(ss / (reps - 1)) : 0.0;
        }
        result.table.rows.push_back(std::move(row));
      }
    }
  }
  for (size_t job = 0; job < jobs; ++job) {
    const Cell& c = cells[job];
    if (c.status.ok()) {
      ++result.releases;
      result.max_equality_residual =
          std::max(result.max_equality_residual, c.residual);
    } else {
      ++result.failed_cells;
      result.errors.push_back(std::string(c.status.message()));
    }
  }
  return result;
}

absl::StatusOr<std::string> EmitTable(const ResultTable& table,
                                      TableFormat format) {
  if (table.rows.empty()) {
    return absl::InvalidArgumentError("EmptyTable: nothing to emit");
  }
  std::string out;
  switch (format) {
    case TableFormat::kCsv:
      out = "epsilon,level,mechanism,mean_l1,std_l1\n";
      for (const ResultRow& r : table.rows) {
        absl::StrAppend(&out, FormatDouble(r.epsilon), ",", r.level, ",",
                        r.mechanism, ",", FormatDouble(r.mean_l1), ",",
                        FormatDouble(r.std_l1), "\n");
      }
      return out;
    case TableFormat::kJson: {
      json rows = json::array();
      for (const ResultRow& r : table.rows) {
        json j = {{"epsilon", r.epsilon},
                  {"level", r.level},
                  {"mechanism", r.mechanism},
                  {"mean_l1", std::isnan(r.mean_l1) ? json() : json(r.mean_l1)},
                  {"std_l1", std::isnan(r.std_l1) ? json() : json(r.std_l1)}};
        if (!r.note.empty()) j["note"] = r.note;
        rows.push_back(std::move(j));
      }
      return json{{"rows", rows}}.dump(2) + "\n";
    }
    case TableFormat::kGnuplot: {
      std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>>
          blocks;
      std::vector<std::pair<std::string, std::string>> order;
      for (const ResultRow& r : table.rows) {
        auto key = std::make_pair(r.level, r.mechanism);
        if (!blocks.count(key)) order.push_back(key);
        blocks[key].push_back(&r);
      }
      for (const auto& key : order) {
        absl::StrAppend(&out, "# level ", key.first, " mechanism ", key.second,
                        "\n# epsilon mean_l1 std_l1\n");
        for (const ResultRow* r : blocks[key]) {
          absl::StrAppend(&out, FormatDouble(r->epsilon), " ",
                          FormatDouble(r->mean_l1), " ",
                          FormatDouble(r->std_l1), "\n");
        }
        out += "\n\n";
      }
      return out;
    }
    case TableFormat::kWide: {
      std::vector<std::string> mechs;
      for (const ResultRow& r : table.rows) {
        if (std::find(mechs.begin(), mechs.end(), r.mechanism) == mechs.end()) {
          mechs.push_back(r.mechanism);
        }
      }
      out = "epsilon,level";
      for (const std::string& m : mechs) absl::StrAppend(&out, ",", m);
      out += "\n";
      size_t i = 0;
      while (i < table.rows.size()) {
        const ResultRow& head = table.rows[i];
        std::map<std::string, const ResultRow*> line;
        while (i < table.rows.size() && table.rows[i].epsilon == head.epsilon &&
               table.rows[i].level == head.level) {
          line[table.rows[i].mechanism] = &table.rows[i];
          ++i;
        }
        absl::StrAppend(&out, absl::StrFormat("%g", head.epsilon), ",",
                        head.level);
        for (const std::string& m : mechs) {
          const auto it = line.find(m);
          if (it == line.end()) {
            out += ",";
          } else {
            absl::StrAppend(&out, absl::StrFormat(",%.6f (%.6f)",
                                                  it->second->mean_l1,
                                                  it->second->std_l1));
          }
        }
        out += "\n";
      }
      return out;
    }
  }
  return absl::InvalidArgumentError("unknown table format");
}

absl::Status WriteTable(const ResultTable& table, TableFormat format,
                        const std::string& path) {
  absl::StatusOr<std::string> text = EmitTable(table, format);
  if (!text.ok()) return text.status();
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("IOError: cannot open ", path));
  out << *text;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("IOError: write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<ResultTable> ParseTableCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  absl::StatusOr<CsvTable> csv = ReadCsv(in);
  if (!csv.ok()) return csv.status();
  const int eps = csv->Column("epsilon");
  const int level = csv->Column("level");
  const int mech = csv->Column("mechanism");
  const int mean = csv->Column("mean_l1");
  const int sd = csv->Column("std_l1");
  if (eps < 0 || level < 0 || mech < 0 || mean < 0 || sd < 0) {
    return absl::InvalidArgumentError(
        "ParseError: table CSV needs epsilon,level,mechanism,mean_l1,std_l1");
  }
  ResultTable table;
  for (const std::vector<std::string>& row : csv->rows) {
    ResultRow r;
    absl::StatusOr<double> e = ParseDouble(row[eps]);
    absl::StatusOr<double> m = ParseDouble(row[mean]);
    absl::StatusOr<double> s = ParseDouble(row[sd]);
    if (!e.ok()) return e.status();
    if (!m.ok()) return m.status();
    if (!s.ok()) return s.status();
    r.epsilon = *e;
    r.level = row[level];
    r.mechanism = row[mech];
    r.mean_l1 = *m;
    r.std_l1 = *s;
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace cdp
