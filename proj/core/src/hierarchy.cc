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

#include "cdp/hierarchy.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "cdp/csv.h"
#include "json.hpp"

namespace cdp {
namespace {

absl::Status Malformed(absl::string_view why) {
  return absl::InvalidArgumentError(absl::StrCat("MalformedHierarchy: ", why));
}

}  // namespace

absl::StatusOr<Hierarchy> Hierarchy::Create(std::vector<HierarchyNode> nodes) {
  if (nodes.empty()) return Malformed("no nodes");
  std::map<std::string, int, std::less<>> input_index;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) return Malformed("empty node id");
    if (!input_index.emplace(nodes[i].id, static_cast<int>(i)).second) {
      return Malformed(absl::StrCat("duplicate node '", nodes[i].id, "'"));
    }
  }
  int roots = 0;
  std::vector<int> child_count(nodes.size(), 0);
  for (const HierarchyNode& node : nodes) {
    if (node.parent.empty()) {
      ++roots;
      if (node.level != 1) {
        return Malformed(absl::StrCat("root '", node.id, "' has level ",
                                      node.level, ", expected 1"));
      }
      continue;
    }
    const auto it = input_index.find(node.parent);
    if (it == input_index.end()) {
      return Malformed(absl::StrCat("node '", node.id, "' has unknown parent '",
                                    node.parent, "'"));
    }
    const HierarchyNode& parent = nodes[it->second];
    if (node.level != parent.level + 1) {
      return Malformed(absl::StrCat("node '", node.id, "' at level ",
                                    node.level, " under '", parent.id,
                                    "' at level ", parent.level));
    }
    ++child_count[it->second];
  }
  if (roots != 1) {
    return Malformed(absl::StrCat("expected exactly one root, found ", roots));
  }

  // Leaves first, then internal nodes; each group deepest level first.
  std::vector<int> perm(nodes.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int x, int y) {
    const bool leaf_x = child_count[x] == 0;
    const bool leaf_y = child_count[y] == 0;
    if (leaf_x != leaf_y) return leaf_x;
    return nodes[x].level > nodes[y].level;
  });
  std::vector<int> position(nodes.size());
  for (size_t k = 0; k < perm.size(); ++k) position[perm[k]] = k;

  Hierarchy h;
  const size_t m = nodes.size();
  h.ids_.resize(m);
  h.parent_.assign(m, -1);
  h.level_.resize(m);
  h.children_.assign(m, {});
  for (size_t k = 0; k < m; ++k) {
    const HierarchyNode& node = nodes[perm[k]];
    h.ids_[k] = node.id;
    h.level_[k] = node.level;
    h.num_levels_ = std::max(h.num_levels_, node.level);
    if (child_count[perm[k]] == 0) ++h.num_leaves_;
    if (!node.parent.empty()) {
      const int p = position[input_index.find(node.parent)->second];
      h.parent_[k] = p;
    }
  }
  for (size_t k = 0; k < m; ++k) {
    if (h.parent_[k] >= 0) h.children_[h.parent_[k]].push_back(k);
  }
  return h;
}

absl::StatusOr<Hierarchy> Hierarchy::FromCsv(std::istream& in) {
  absl::StatusOr<CsvTable> table = ReadCsv(in);
  if (!table.ok()) return table.status();
  const int node_col = table->Column("node");
  const int parent_col = table->Column("parent");
  const int level_col = table->Column("level");
  if (node_col < 0 || parent_col < 0 || level_col < 0) {
    return absl::InvalidArgumentError(
        "ParseError: hierarchy CSV needs columns node,parent,level");
  }
  std::vector<HierarchyNode> nodes;
  for (const auto& row : table->rows) {
    absl::StatusOr<double> level = ParseDouble(row[level_col]);
    if (!level.ok()) return level.status();
    nodes.push_back({row[node_col], row[parent_col], static_cast<int>(*level)});
  }
  return Create(std::move(nodes));
}

absl::StatusOr<Hierarchy> Hierarchy::LoadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  return FromCsv(in);
}

absl::StatusOr<Hierarchy> Hierarchy::Balanced(
    const std::vector<int>& branching) {
  std::vector<HierarchyNode> nodes = {{"root", "", 1}};
  std::vector<std::string> frontier = {"root"};
  for (size_t k = 0; k < branching.size(); ++k) {
    if (branching[k] < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("branching factor must be >= 1, got ", branching[k]));
    }
    std::vector<std::string> next;
    const int level = static_cast<int>(k) + 2;
    for (const std::string& parent : frontier) {
      for (int c = 0; c < branching[k]; ++c) {
        std::string id = absl::StrCat("n", level, "_", next.size());
        nodes.push_back({id, parent, level});
        next.push_back(std::move(id));
      }
    }
    frontier = std::move(next);
  }
  return Create(std::move(nodes));
}

std::optional<int> Hierarchy::IndexOf(std::string_view id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<int>(it - ids_.begin());
}

std::vector<int> Hierarchy::LevelIndices(int level) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (level_[i] == level) out.push_back(i);
  }
  return out;
}

void Hierarchy::FillInternal(Vector& z) const {
  for (int i = num_leaves_; i < size(); ++i) {
    double total = 0.0;
    for (int c : children_[i]) total += z[c];
    z[i] = total;
  }
}

Vector Hierarchy::Aggregate(const Vector& leaf_values) const {
  Vector z = Vector::Zero(size());
  z.head(num_leaves_) = leaf_values;
  FillInternal(z);
  return z;
}

std::string Hierarchy::ToCsv() const {
  std::ostringstream out;
  out << "node,parent,level\n";
  // Level by level, coordinate order within a level, so reading the file
  // back reproduces the same order.
  for (int level = 1; level <= num_levels_; ++level) {
    for (int i = 0; i < size(); ++i) {
      if (level_[i] != level) continue;
      out << ids_[i] << ',' << (parent_[i] >= 0 ? ids_[parent_[i]] : "")
          << ',' << level_[i] << '\n';
    }
  }
  return out.str();
}

absl::StatusOr<AffineEquality> HierarchyToEqualities(const Hierarchy& h) {
  const int internal = h.size() - h.num_leaves();
  if (internal == 0) return AffineEquality::None(h.size());
  Matrix a = Matrix::Zero(internal, h.size());
  for (int r = 0; r < internal; ++r) {
    const int node = h.num_leaves() + r;
    for (int c : h.children(node)) a(r, c) = 1.0;
    a(r, node) = -1.0;
  }
  return AffineEquality::Create(std::move(a), Vector::Zero(internal));
}

std::string ConstraintDumpJson(const AffineEquality& eq,
                               const std::vector<std::string>& order) {
  nlohmann::json j;
  j["A"] = nlohmann::json::array();
  for (int r = 0; r < eq.rows(); ++r) {
    std::vector<double> row(eq.a().row(r).begin(), eq.a().row(r).end());
    j["A"].push_back(row);
  }
  j["b"] = std::vector<double>(eq.b().begin(), eq.b().end());
  j["order"] = order;
  return j.dump();
}

}  // namespace cdp
