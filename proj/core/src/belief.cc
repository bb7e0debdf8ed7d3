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

#include "cdp/belief.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace cdp {

Event::Event(std::vector<std::string> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()),
                 members_.end());
}

bool Event::Contains(std::string_view world) const {
  return std::binary_search(members_.begin(), members_.end(), world);
}

Event Event::Union(const Event& other) const {
  std::vector<std::string> merged;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                 other.members_.end(), std::back_inserter(merged));
  return Event(std::move(merged));
}

bool Event::IsDisjointFrom(const Event& other) const {
  return std::none_of(members_.begin(), members_.end(),
                      [&](const std::string& w) { return other.Contains(w); });
}

absl::StatusOr<FiniteBeliefState> FiniteBeliefState::Create(
    std::vector<std::string> worlds, std::vector<double> probs) {
  if (worlds.size() != probs.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", worlds.size(), " worlds but ", probs.size(),
                     " probabilities"));
  }
  if (worlds.empty()) {
    return absl::InvalidArgumentError("a belief state needs at least one world");
  }
  std::set<std::string, std::less<>> seen;
  for (const std::string& w : worlds) {
    if (!seen.insert(w).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("world label '", w, "' appears twice"));
    }
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      return absl::InvalidArgumentError(
          absl::StrCat("probability ", p, " is not a nonnegative real"));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kBeliefTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", not 1"));
  }
  return FiniteBeliefState(std::move(worlds), std::move(probs));
}

absl::StatusOr<FiniteBeliefState> FiniteBeliefState::Uniform(
    std::vector<std::string> worlds) {
  const size_t n = worlds.size();
  if (n == 0) {
    return absl::InvalidArgumentError("a belief state needs at least one world");
  }
  return Create(std::move(worlds), std::vector<double>(n, 1.0 / n));
}

absl::StatusOr<FiniteBeliefState> FiniteBeliefState::PointMass(
    std::vector<std::string> worlds, std::string_view at) {
  std::vector<double> probs(worlds.size(), 0.0);
  const auto it = std::find(worlds.begin(), worlds.end(), at);
  if (it == worlds.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("point mass target '", std::string(at), "' is not a world"));
  }
  probs[it - worlds.begin()] = 1.0;
  return Create(std::move(worlds), std::move(probs));
}

std::optional<size_t> FiniteBeliefState::IndexOf(std::string_view world) const {
  const auto it = std::find(worlds_.begin(), worlds_.end(), world);
  if (it == worlds_.end()) return std::nullopt;
  return static_cast<size_t>(it - worlds_.begin());
}

double FiniteBeliefState::Prob(std::string_view world) const {
  const std::optional<size_t> i = IndexOf(world);
  return i ? probs_[*i] : 0.0;
}

absl::StatusOr<double> FiniteBeliefState::Probability(const Event& event) const {
  double total = 0.0;
  for (const std::string& w : event.members()) {
    const std::optional<size_t> i = IndexOf(w);
    if (!i) {
      return absl::InvalidArgumentError(
          absl::StrCat("event member '", w, "' is not a world of the state"));
    }
    total += probs_[*i];
  }
  return total;
}

absl::StatusOr<FiniteBeliefState> ConditionFinite(
    const FiniteBeliefState& state, const Event& event) {
  absl::StatusOr<double> mass = state.Probability(event);
  if (!mass.ok()) return mass.status();
  if (*mass <= 0.0) {
    return absl::FailedPreconditionError(
        "ZeroProbabilityEvent: conditioning on an event of probability 0 is "
        "undefined");
  }
  std::vector<double> probs(state.size(), 0.0);
  for (size_t i = 0; i < state.size(); ++i) {
    if (event.Contains(state.worlds()[i])) probs[i] = state.probs()[i] / *mass;
  }
  return FiniteBeliefState::Create(state.worlds(), std::move(probs));
}

absl::StatusOr<FiniteBeliefState> ImageFinite(const FiniteBeliefState& state,
                                              const Event& event,
                                              const ClosestWorldMap& closest) {
  if (absl::StatusOr<double> mass = state.Probability(event); !mass.ok()) {
    return mass.status();
  }
  if (event.empty()) {
    return absl::InvalidArgumentError("cannot image onto an empty event");
  }
  std::vector<double> probs(state.size(), 0.0);
  for (size_t i = 0; i < state.size(); ++i) {
    const std::string& world = state.worlds()[i];
    const double p = state.probs()[i];
    std::string_view target = world;
    if (const auto it = closest.find(world); it != closest.end()) {
      target = it->second;
    } else if (!event.Contains(world)) {
      if (p == 0.0) continue;
      return absl::FailedPreconditionError(
          absl::StrCat("MissingClosestWorld: world '", world,
                       "' has positive probability but no closest world in "
                       "the event"));
    }
    if (!event.Contains(target)) {
      return absl::InvalidArgumentError(
          absl::StrCat("closest world '", std::string(target), "' for '", world,
                       "' lies outside the event"));
    }
    const std::optional<size_t> j = state.IndexOf(target);
    probs[*j] += p;
  }
  return FiniteBeliefState::Create(state.worlds(), std::move(probs));
}

absl::StatusOr<FiniteBeliefState> MixFinite(
    std::span<const FiniteBeliefState> states,
    std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size()) {
    return absl::InvalidArgumentError(
        "WeightError: need one weight per state and at least one state");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("WeightError: negative weight ", w));
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("WeightError: weights sum to ", total));
  }
  std::vector<double> probs(states.front().size(), 0.0);
  for (size_t k = 0; k < states.size(); ++k) {
    if (!states[k].SameWorlds(states.front())) {
      return absl::InvalidArgumentError(
          "mixture components must share the same world list");
    }
    for (size_t i = 0; i < probs.size(); ++i) {
      probs[i] += weights[k] * states[k].probs()[i];
    }
  }
  // Weights within 1e-9 of a unit sum can leave the mixture slightly off 1.
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= sum;
  return FiniteBeliefState::Create(states.front().worlds(), std::move(probs));
}

ClosestWorldMap ClosestWorldsByDistance(
    std::span<const std::string> worlds, const Event& event,
    const std::function<double(const std::string&, const std::string&)>&
        distance) {
  ClosestWorldMap closest;
  for (const std::string& w : worlds) {
    const std::string* best = nullptr;
    double best_distance = std::numeric_limits<double>::infinity();
    // members() is sorted, so strict < keeps the smallest label on ties.
    for (const std::string& c : event.members()) {
      const double d = distance(w, c);
      if (best == nullptr || d < best_distance) {
        best = &c;
        best_distance = d;
      }
    }
    if (best != nullptr) closest.emplace(w, *best);
  }
  return closest;
}

}  // namespace cdp
