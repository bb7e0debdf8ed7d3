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

#ifndef CDP_CORE_BELIEF_H_
#define CDP_CORE_BELIEF_H_

// Finite possible-worlds belief change: Bayesian conditioning (revision) and
// imaging (update). These are exact and serve as the reference oracle for the
// continuous mechanisms elsewhere in the library.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace cdp {

// Absolute tolerance for every probability identity in this module.
inline constexpr double kBeliefTolerance = 1e-12;

// A set of world labels. Stored sorted and deduplicated.
class Event {
 public:
  Event() = default;
  explicit Event(std::vector<std::string> members);

  bool Contains(std::string_view world) const;
  const std::vector<std::string>& members() const { return members_; }
  bool empty() const { return members_.empty(); }

  Event Union(const Event& other) const;
  bool IsDisjointFrom(const Event& other) const;

  friend bool operator==(const Event&, const Event&) = default;

 private:
  std::vector<std::string> members_;
};

// world -> closest world inside one particular event.
using ClosestWorldMap = std::map<std::string, std::string, std::less<>>;

// A probability vector over an ordered list of labelled worlds.
class FiniteBeliefState {
 public:
  // Fails with InvalidArgument when labels repeat, sizes differ, any entry is
  // negative, or the entries do not sum to 1 within kBeliefTolerance.
  static absl::StatusOr<FiniteBeliefState> Create(
      std::vector<std::string> worlds, std::vector<double> probs);

  static absl::StatusOr<FiniteBeliefState> Uniform(
      std::vector<std::string> worlds);
  static absl::StatusOr<FiniteBeliefState> PointMass(
      std::vector<std::string> worlds, std::string_view at);

  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::vector<double>& probs() const { return probs_; }
  size_t size() const { return worlds_.size(); }

  std::optional<size_t> IndexOf(std::string_view world) const;
  // Probability of a single world; 0 for unknown labels.
  double Prob(std::string_view world) const;
  // Fails when the event names a world that is not in this state.
  absl::StatusOr<double> Probability(const Event& event) const;

  bool SameWorlds(const FiniteBeliefState& other) const {
    return worlds_ == other.worlds_;
  }

 private:
  FiniteBeliefState(std::vector<std::string> worlds, std::vector<double> probs)
      : worlds_(std::move(worlds)), probs_(std::move(probs)) {}

  std::vector<std::string> worlds_;
  std::vector<double> probs_;
};

// P(. | event). FailedPrecondition ("ZeroProbabilityEvent") when
// P(event) = 0: conditioning on a null event needs the measure-zero
// machinery in revision.h instead.
absl::StatusOr<FiniteBeliefState> ConditionFinite(
    const FiniteBeliefState& state, const Event& event);

// Imaging: every world's mass moves to its closest world in `event`.
// `closest` must cover every positive-probability world outside the event;
// worlds inside the event default to themselves. FailedPrecondition
// ("MissingClosestWorld") when a required assignment is absent, and
// InvalidArgument when an assignment points outside the event.
absl::StatusOr<FiniteBeliefState> ImageFinite(const FiniteBeliefState& state,
                                              const Event& event,
                                              const ClosestWorldMap& closest);

// Pointwise convex combination. InvalidArgument ("WeightError") when a weight
// is negative or the weights do not sum to 1 within 1e-9.
absl::StatusOr<FiniteBeliefState> MixFinite(
    std::span<const FiniteBeliefState> states, std::span<const double> weights);

// Derives a closest-world map for `event` from a distance function. Ties are
// broken by the lexicographically smallest world label, so the map is
// deterministic even where the minimiser is not unique.
ClosestWorldMap ClosestWorldsByDistance(
    std::span<const std::string> worlds, const Event& event,
    const std::function<double(const std::string&, const std::string&)>&
        distance);

}  // namespace cdp

#endif  // CDP_CORE_BELIEF_H_
