#pragma once

#include <string>
#include <vector>

#include "skillforge/model.hpp"

namespace skillforge::model {

enum class Severity { Error, Warning };

struct Finding {
    std::string rule_id; // "R1".."R10"
    Severity severity = Severity::Error;
    std::string location; // slash-separated path into the model
    std::string message;

    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool valid() const { return findings.empty(); }
    bool has_errors() const;
    /// Findings whose rule_id equals `rule`.
    std::vector<Finding> by_rule(const std::string& rule) const;
};

/// Checks the consistency rules of the six-step methodology:
///   R1  every goal is satisfied by >=1 existing SG blackbox function
///       (Warning instead of Error for goals marked aspirational)
///   R2  every leaf SG blackbox function references exactly one existing activity
///   R3  every Action node sits in a declared partition
///   R4  every functionRef resolves to a whitebox function of its partition's role
///   R5  ObjectFlow endpoint content types match the flow's content type
///   R6  SendSignal/AcceptSignal port references resolve with matching
///       direction and content type (nodes without a portRef are not checked)
///   R7  state references resolve: boundStates, stateModel initial/transition
///       endpoints, collaboration function signals
///   R8  every deployment binding resolves and is complete
///   R9  activity graph sanity: one Initial, >=1 Final, edge endpoints exist,
///       all nodes reachable from the Initial node
///   R10 name uniqueness and basic reference integrity (goal ids, goal
///       refines, function refinement targets, role/function/port/node names)
/// Problems are findings, never exceptions; an empty report means valid.
ValidationReport validate_model(const SystemGroupModel& model);

const char* to_string(Severity severity);

} // namespace skillforge::model
