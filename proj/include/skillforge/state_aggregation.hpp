#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "skillforge/errors.hpp"
#include "skillforge/model.hpp"

namespace skillforge::model {

struct StateSpaceExceededError : Error {
    explicit StateSpaceExceededError(std::size_t cap)
        : Error("StateSpaceExceeded",
                "reachable composite state set exceeds the cap of " + std::to_string(cap)) {}
};

/// One system-group state: a local state per participating role, aligned
/// with `roles` as returned by aggregate_states.
struct CompositeState {
    std::vector<std::string> local_states;

    bool operator==(const CompositeState&) const = default;
    bool operator<(const CompositeState& other) const { return local_states < other.local_states; }
};

struct StateAggregation {
    std::vector<std::string> roles; // participating roles, declaration order
    std::vector<CompositeState> states; // breadth-first discovery order

    bool contains_local_state(const std::string& role, const std::string& state) const;
};

/// Reachable composite states under synchronized-product semantics.
/// Participating roles are those with a state model. Internal transitions
/// (no trigger) fire independently; a receiving transition ("sig") fires only
/// in rendezvous with another role's sending transition ("!sig"), both roles
/// advancing together. Discovery is breadth-first from the tuple of initial
/// states; exceeding `cap` raises StateSpaceExceeded.
StateAggregation aggregate_states(const SystemGroupModel& model, std::size_t cap = 10000);

} // namespace skillforge::model
