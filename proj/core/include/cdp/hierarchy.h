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

#ifndef CDP_CORE_HIERARCHY_H_
#define CDP_CORE_HIERARCHY_H_

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/invariants.h"
#include "cdp/types.h"

namespace cdp {

struct HierarchyNode {
  std::string id;
  std::string parent;  // empty for the root
  int level = 1;       // root is level 1
};

// A rooted tree of counts, e.g. city > borough > zone. Coordinates are laid
// out leaves first, then internal nodes level by level from the deepest
// upwards, root last; within a group, input order is kept.
class Hierarchy {
 public:
  // InvalidArgument ("MalformedHierarchy") for duplicate ids, unknown parents,
  // zero or several roots, or a child whose level is not its parent's + 1
  // (which also rules out cycles).
  static absl::StatusOr<Hierarchy> Create(std::vector<HierarchyNode> nodes);
  // CSV with header `node,parent,level`; the root has an empty parent.
  static absl::StatusOr<Hierarchy> FromCsv(std::istream& in);
  static absl::StatusOr<Hierarchy> LoadCsv(const std::string& path);
  // Complete tree: branching[k] children under every level-(k+1) node. Ids
  // are "root", then "n<level>_<index>".
  static absl::StatusOr<Hierarchy> Balanced(const std::vector<int>& branching);

  int size() const { return static_cast<int>(ids_.size()); }
  int num_levels() const { return num_levels_; }
  int num_leaves() const { return num_leaves_; }
  int root() const { return size() - 1; }

  const std::vector<std::string>& order() const { return ids_; }
  const std::string& id(int index) const { return ids_[index]; }
  std::optional<int> IndexOf(std::string_view id) const;
  int parent(int index) const { return parent_[index]; }
  int level(int index) const { return level_[index]; }
  const std::vector<int>& children(int index) const {
    return children_[index];
  }
  bool is_leaf(int index) const { return index < num_leaves_; }
  // Coordinates at a level (1 = root), in coordinate order.
  std::vector<int> LevelIndices(int level) const;

  // Recomputes every internal coordinate of z as the sum of its children,
  // bottom-up, leaving the leaves untouched.
  void FillInternal(Vector& z) const;
  // Consistent vector from leaf values (length num_leaves()).
  Vector Aggregate(const Vector& leaf_values) const;

  std::string ToCsv() const;

 private:
  std::vector<std::string> ids_;
  std::vector<int> parent_;
  std::vector<int> level_;
  std::vector<std::vector<int>> children_;
  int num_leaves_ = 0;
  int num_levels_ = 0;
};

// One row per internal node: (sum of children) - node = 0.
absl::StatusOr<AffineEquality> HierarchyToEqualities(const Hierarchy& h);

// JSON {"A": [[...]], "b": [...], "order": [...]}.
std::string ConstraintDumpJson(const AffineEquality& eq,
                               const std::vector<std::string>& order);

}  // namespace cdp

#endif  // CDP_CORE_HIERARCHY_H_
