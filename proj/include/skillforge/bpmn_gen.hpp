#pragma once

#include "skillforge/bpmn.hpp"
#include "skillforge/errors.hpp"
#include "skillforge/model.hpp"

namespace skillforge::bpmn {

struct UnknownActivityError : Error {
    explicit UnknownActivityError(const std::string& name)
        : Error("UnknownActivity", "model contains no activity \"" + name + "\"") {}
};

struct UnmappableNodeError : Error {
    explicit UnmappableNodeError(const std::string& message) : Error("UnmappableNode", message) {}
};

/// Maps one activity onto a BPMN process, node by node:
///   Initial -> StartEvent, Final -> EndEvent,
///   Action  -> ServiceTask when a deployment binding exists, else AbstractTask,
///   Decision/Merge -> ExclusiveGateway, Fork/Join -> ParallelGateway,
///   SendSignal -> SignalThrowEvent, AcceptSignal -> SignalCatchEvent,
///   ControlFlow -> SequenceFlow (guards become conditions),
///   partitions -> lanes, intra-partition object flows -> variable bindings.
/// Service task inputs bind to the variable produced by the pin's incoming
/// object source (followed through send/accept signal pairs); pins without a
/// source stay unbound for manual completion. Outputs bind to
/// `<actionId>_<pin>`. Element ids are sanitized names plus an ordinal.
BpmnDocument generate_bpmn(const model::SystemGroupModel& model, const std::string& activity_name);

/// Deterministic BPMN 2.0 XML: one `definitions` document in the OMG model
/// namespace with a single executable process, a laneSet, and skill bindings
/// as `sf:` extension elements (urn:skillforge:bpmn:1). No diagram section.
std::string serialize_bpmn(const BpmnDocument& doc);

} // namespace skillforge::bpmn
