#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace skillforge::bpmn {

enum class ElementKind {
    StartEvent,
    EndEvent,
    ServiceTask,
    AbstractTask,
    ExclusiveGateway,
    ParallelGateway,
    SignalThrowEvent,
    SignalCatchEvent,
    BoundaryErrorEvent,
};

struct SkillRef {
    std::string module;
    std::string name;

    bool operator==(const SkillRef&) const = default;
};

/// A service task input: either a reference to a process variable or an
/// inline literal value.
struct ParameterBinding {
    std::string name; // pin name
    std::optional<std::string> variable;
    std::optional<nlohmann::json> literal;

    bool operator==(const ParameterBinding&) const = default;
};

struct OutputBinding {
    std::string name;     // pin name
    std::string variable; // process variable written on completion

    bool operator==(const OutputBinding&) const = default;
};

struct BpmnElement {
    std::string id;
    ElementKind kind = ElementKind::AbstractTask;
    std::string name;

    // ServiceTask
    SkillRef skill;
    std::vector<ParameterBinding> parameters;
    std::vector<OutputBinding> outputs;

    // Signal events
    std::string signal_name;

    // BoundaryErrorEvent
    std::string attached_to;
    std::optional<std::string> error_code; // unset matches any code

    bool operator==(const BpmnElement&) const = default;
};

struct SequenceFlow {
    std::string id;
    std::string source;
    std::string target;
    std::optional<std::string> condition; // `<identifier> <op> <literal>`
    bool is_default = false;

    bool operator==(const SequenceFlow&) const = default;
};

struct Lane {
    std::string id;
    std::string role;
    std::vector<std::string> members; // element ids

    bool operator==(const Lane&) const = default;
};

struct BpmnDocument {
    std::string process_id;
    std::vector<Lane> lanes;
    std::vector<BpmnElement> elements; // document order
    std::vector<SequenceFlow> flows;   // document order

    const BpmnElement* find_element(const std::string& id) const;

    bool operator==(const BpmnDocument&) const = default;
};

const char* to_string(ElementKind kind);

} // namespace skillforge::bpmn
