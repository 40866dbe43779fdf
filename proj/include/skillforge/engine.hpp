#pragma once

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "skillforge/bpmn.hpp"
#include "skillforge/errors.hpp"
#include "skillforge/skill_port.hpp"

namespace skillforge::engine {

struct UnsupportedElementError : Error {
    explicit UnsupportedElementError(const std::vector<std::string>& names);
    std::vector<std::string> names;
};

struct StructuralError : Error {
    explicit StructuralError(const std::string& message) : Error("StructuralError", message) {}
};

struct UnresolvedSkillError : Error {
    UnresolvedSkillError(const std::string& module, const std::string& name)
        : Error("UnresolvedSkill", "no registered skill " + module + "/" + name) {}
};

struct MissingVariableError : Error {
    explicit MissingVariableError(const std::string& name)
        : Error("MissingVariable", "process variable \"" + name + "\" is undefined") {}
};

/// A BPMN error raised at an element, handled by boundary events.
struct BpmnError {
    std::string error_code;
    std::string source_element;
    std::string message;
};

enum class ConditionOp { Eq, Ne, Lt, Le, Gt, Ge };

/// `<identifier> <op> <literal>` with op in {==, !=, <, <=, >, >=} and a
/// JSON number/string/boolean literal.
struct CompiledCondition {
    std::string variable;
    ConditionOp op = ConditionOp::Eq;
    nlohmann::json literal;
};

CompiledCondition parse_condition(const std::string& text); // throws StructuralError
bool evaluate_condition(const CompiledCondition& condition,
                        const std::map<std::string, nlohmann::json>& variables);

/// Loaded, checked and indexed process.
struct ProcessDefinition {
    bpmn::BpmnDocument document;

    std::map<std::string, std::size_t> element_index;      // id -> elements index
    std::map<std::string, std::vector<std::size_t>> outgoing; // element id -> flow indices
    std::map<std::string, std::vector<std::size_t>> incoming;
    std::map<std::string, std::vector<std::size_t>> boundaries; // host id -> element indices
    std::map<std::string, CompiledCondition> conditions;       // flow id -> compiled
    std::string start_event_id;

    const bpmn::BpmnElement& element(const std::string& id) const {
        return document.elements[element_index.at(id)];
    }
};

/// Parses the BPMN subset emitted by the generator plus hand-edited
/// equivalents; rejects anything else by name. Structural invariants
/// (unique NCName ids, resolvable flows, one start event, reachability,
/// parseable conditions) are re-checked here.
std::shared_ptr<const ProcessDefinition> load_process(const std::string& xml_text);

/// Builds a definition from an in-memory document, running the same checks.
std::shared_ptr<const ProcessDefinition> compile_document(bpmn::BpmnDocument document);

enum class InstanceStatus { Running, Completed, Failed };

struct TraceEvent {
    std::uint64_t seq = 0;
    std::int64_t timestamp_ms = 0;
    std::string element_id;
    std::string kind; // element kind, or "error"
    nlohmann::json detail;
};

nlohmann::json to_json(const TraceEvent& event);

struct ProcessInstance {
    std::string instance_id;
    std::shared_ptr<const ProcessDefinition> definition;

    std::map<std::string, int> tokens; // element id -> token count
    std::map<std::string, std::map<std::string, int>> gateway_arrivals; // gateway id -> flow id -> count
    std::map<std::string, int> signal_latches;   // latched throw marks per signal
    std::map<std::string, int> satisfied_catches; // catch element id -> satisfied count
    std::map<std::string, nlohmann::json> variables;
    InstanceStatus status = InstanceStatus::Running;
    std::string error_code;
    std::vector<TraceEvent> trace;

    bool running() const { return status == InstanceStatus::Running; }
    /// Skill names of completed-or-failed ServiceTask firings, trace order.
    std::vector<std::string> service_task_sequence() const;
};

const char* to_string(InstanceStatus status);

/// Token-based executor for loaded definitions. Scheduling is deterministic:
/// among simultaneously enabled elements the one with the smallest id fires.
class Engine {
public:
    explicit Engine(SkillPort& port) : port_(port) {}

    /// Places a token on the start event and runs to quiescence. Throws
    /// UnresolvedSkill before any token moves when a service task's skill is
    /// not registered.
    std::shared_ptr<ProcessInstance> start_instance(std::shared_ptr<const ProcessDefinition> definition,
                                                    std::map<std::string, nlohmann::json> variables);

    /// Fires one enabled element; false when nothing is enabled.
    bool step(ProcessInstance& instance);

    /// Steps until Completed, Failed, or no element is enabled (which fails
    /// the instance with DEADLOCK).
    void run_to_quiescence(ProcessInstance& instance);

private:
    void fire(ProcessInstance& instance, const bpmn::BpmnElement& element);
    void deliver_token(ProcessInstance& instance, const bpmn::SequenceFlow& flow);
    void emit_tokens(ProcessInstance& instance, const std::string& element_id);
    void execute_service_task(ProcessInstance& instance, const bpmn::BpmnElement& task);
    void handle_error(ProcessInstance& instance, const BpmnError& error);
    void fail(ProcessInstance& instance, const std::string& code, const std::string& message);
    TraceEvent& push_event(ProcessInstance& instance, const std::string& element_id,
                           const std::string& kind);

    SkillPort& port_;
    std::mutex mutex_;
    int next_instance_ = 1;
};

} // namespace skillforge::engine
