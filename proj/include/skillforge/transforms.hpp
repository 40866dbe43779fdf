#pragma once

#include "skillforge/errors.hpp"
#include "skillforge/model.hpp"

namespace skillforge::model {

struct UnresolvedNodeError : Error {
    explicit UnresolvedNodeError(const std::string& message) : Error("UnresolvedNode", message) {}
};

struct MissingPortError : Error {
    explicit MissingPortError(const std::string& message) : Error("MissingPort", message) {}
};

/// Object flows whose source and target nodes lie in different partitions,
/// in document order. Throws UnresolvedNode for dangling edge endpoints.
std::vector<Edge> cross_role_flows(const ActivityModel& activity);

/// For each distinct (source role, target role, content type) among all
/// cross-role object flows, ensures an Out port on the source role and an In
/// port on the target role, named out_/in_<camelCased content type>. A port
/// with matching direction and content type counts as present regardless of
/// its name. Idempotent; returns a new model.
SystemGroupModel derive_ports(const SystemGroupModel& model);

/// Replaces every cross-partition object flow with a SendSignal node in the
/// source partition and an AcceptSignal node in the target partition, both
/// bound to the ports created by derive_ports (signal name = content type).
/// The new nodes are spliced into the control flow next to the actions they
/// serve so graph reachability and execution order are preserved. Idempotent;
/// throws MissingPort when a required port is absent.
SystemGroupModel signalize(const SystemGroupModel& model);

} // namespace skillforge::model
