#include "skillforge/engine.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <thread>

#include "skillforge/identifiers.hpp"
#include "skillforge/xml.hpp"

namespace skillforge::engine {

using bpmn::BpmnDocument;
using bpmn::BpmnElement;
using bpmn::ElementKind;
using bpmn::SequenceFlow;
using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty())
            out += ", ";
        out += n;
    }
    return out;
}

} // namespace

UnsupportedElementError::UnsupportedElementError(const std::vector<std::string>& element_names)
    : Error("UnsupportedElement", "unsupported BPMN elements: " + join(element_names)),
      names(element_names) {}

// ---------------------------------------------------------------------------
// Condition expressions
// ---------------------------------------------------------------------------

CompiledCondition parse_condition(const std::string& text) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
    std::string ident = text.substr(start, pos - start);
    if (!is_valid_identifier(ident))
        throw StructuralError("condition \"" + text + "\": expected an identifier");
    skip_ws();

    CompiledCondition condition;
    condition.variable = ident;
    static const std::pair<const char*, ConditionOp> ops[] = {
        {"==", ConditionOp::Eq}, {"!=", ConditionOp::Ne}, {"<=", ConditionOp::Le},
        {">=", ConditionOp::Ge}, {"<", ConditionOp::Lt},  {">", ConditionOp::Gt},
    };
    bool matched = false;
    for (const auto& [token, op] : ops) {
        std::size_t len = std::char_traits<char>::length(token);
        if (text.compare(pos, len, token) == 0) {
            condition.op = op;
            pos += len;
            matched = true;
            break;
        }
    }
    if (!matched)
        throw StructuralError("condition \"" + text + "\": expected a comparison operator");

    std::string literal_text = text.substr(pos);
    json literal = json::parse(literal_text, nullptr, false);
    if (literal.is_discarded() ||
        !(literal.is_number() || literal.is_string() || literal.is_boolean()))
        throw StructuralError("condition \"" + text + "\": expected a number, string or boolean literal");
    condition.literal = std::move(literal);
    return condition;
}

bool evaluate_condition(const CompiledCondition& condition,
                        const std::map<std::string, json>& variables) {
    auto it = variables.find(condition.variable);
    if (it == variables.end())
        return false;
    const json& value = it->second;
    const json& literal = condition.literal;

    int comparison = 0;
    if (value.is_number() && literal.is_number()) {
        double a = value.get<double>();
        double b = literal.get<double>();
        comparison = a < b ? -1 : (a > b ? 1 : 0);
    } else if (value.is_string() && literal.is_string()) {
        comparison = value.get<std::string>().compare(literal.get<std::string>());
        comparison = comparison < 0 ? -1 : (comparison > 0 ? 1 : 0);
    } else if (value.is_boolean() && literal.is_boolean()) {
        if (condition.op == ConditionOp::Eq)
            return value == literal;
        if (condition.op == ConditionOp::Ne)
            return value != literal;
        return false; // ordering booleans is a type mismatch
    } else {
        return false; // type mismatch evaluates false
    }

    switch (condition.op) {
    case ConditionOp::Eq: return comparison == 0;
    case ConditionOp::Ne: return comparison != 0;
    case ConditionOp::Lt: return comparison < 0;
    case ConditionOp::Le: return comparison <= 0;
    case ConditionOp::Gt: return comparison > 0;
    case ConditionOp::Ge: return comparison >= 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Loader
// ---------------------------------------------------------------------------

namespace {

struct LoadContext {
    std::vector<std::string> unsupported;
    std::map<std::string, std::string> signal_names; // declaration id -> name
    std::map<std::string, std::string> error_codes;  // declaration id -> code
    std::map<std::string, std::string> gateway_defaults; // gateway id -> flow id

    void unsupported_element(const std::string& name) {
        if (std::find(unsupported.begin(), unsupported.end(), name) == unsupported.end())
            unsupported.push_back(name);
    }
};

std::string required_attribute(const xml::Element& element, const std::string& name) {
    const std::string* value = element.attribute(name);
    if (!value)
        throw StructuralError("<" + element.name + "> is missing the \"" + name + "\" attribute");
    return *value;
}

void read_extension_elements(LoadContext& ctx, const xml::Element& ext, BpmnElement& task) {
    for (const auto& child : ext.children) {
        std::string local = child.local_name();
        if (local == "skill") {
            task.skill.module = required_attribute(child, "module");
            task.skill.name = required_attribute(child, "name");
        } else if (local == "parameter") {
            bpmn::ParameterBinding binding;
            binding.name = required_attribute(child, "name");
            const std::string* variable = child.attribute("variable");
            const std::string* value = child.attribute("value");
            if (variable && !value) {
                binding.variable = *variable;
            } else if (value && !variable) {
                json literal = json::parse(*value, nullptr, false);
                binding.literal = literal.is_discarded() ? json(*value) : literal;
            } else {
                throw StructuralError("sf:parameter \"" + binding.name +
                                      "\" needs exactly one of variable= or value=");
            }
            task.parameters.push_back(std::move(binding));
        } else if (local == "output") {
            task.outputs.push_back(
                {required_attribute(child, "name"), required_attribute(child, "variable")});
        } else {
            ctx.unsupported_element(child.name);
        }
    }
}

// The single event definition child of a signal/error event; anything else
// (timer, message, ...) lands in the unsupported list by name.
const xml::Element* event_definition(LoadContext& ctx, const xml::Element& event,
                                     const std::string& expected_local) {
    const xml::Element* found = nullptr;
    for (const auto& child : event.children) {
        std::string local = child.local_name();
        if (local == "documentation" || local == "extensionElements")
            continue;
        if (local == expected_local) {
            found = &child;
            continue;
        }
        ctx.unsupported_element(child.name);
    }
    return found;
}

BpmnElement read_flow_node(LoadContext& ctx, const xml::Element& node) {
    BpmnElement element;
    element.id = required_attribute(node, "id");
    if (const std::string* name = node.attribute("name"))
        element.name = *name;

    std::string local = node.local_name();
    if (local == "startEvent") {
        element.kind = ElementKind::StartEvent;
    } else if (local == "endEvent") {
        element.kind = ElementKind::EndEvent;
    } else if (local == "task") {
        element.kind = ElementKind::AbstractTask;
    } else if (local == "serviceTask") {
        element.kind = ElementKind::ServiceTask;
        const xml::Element* ext = node.first_child("extensionElements");
        if (!ext)
            throw StructuralError("serviceTask \"" + element.id + "\" has no extensionElements");
        read_extension_elements(ctx, *ext, element);
        if (element.skill.module.empty() || element.skill.name.empty())
            throw StructuralError("serviceTask \"" + element.id + "\" has no sf:skill binding");
    } else if (local == "exclusiveGateway") {
        element.kind = ElementKind::ExclusiveGateway;
        if (const std::string* flow = node.attribute("default"))
            ctx.gateway_defaults[element.id] = *flow;
    } else if (local == "parallelGateway") {
        element.kind = ElementKind::ParallelGateway;
    } else if (local == "intermediateThrowEvent" || local == "intermediateCatchEvent") {
        element.kind = local == "intermediateThrowEvent" ? ElementKind::SignalThrowEvent
                                                         : ElementKind::SignalCatchEvent;
        std::size_t unsupported_before = ctx.unsupported.size();
        const xml::Element* def = event_definition(ctx, node, "signalEventDefinition");
        if (!def && ctx.unsupported.size() > unsupported_before)
            return element; // a foreign event definition; reported by name later
        if (!def)
            throw StructuralError("event \"" + element.id + "\" has no signalEventDefinition");
        std::string ref = required_attribute(*def, "signalRef");
        auto it = ctx.signal_names.find(ref);
        if (it == ctx.signal_names.end())
            throw StructuralError("event \"" + element.id + "\" references undeclared signal \"" + ref +
                                  "\"");
        element.signal_name = it->second;
    } else if (local == "boundaryEvent") {
        element.kind = ElementKind::BoundaryErrorEvent;
        element.attached_to = required_attribute(node, "attachedToRef");
        const xml::Element* def = event_definition(ctx, node, "errorEventDefinition");
        if (!def)
            throw StructuralError("boundaryEvent \"" + element.id + "\" has no errorEventDefinition");
        if (const std::string* ref = def->attribute("errorRef")) {
            auto it = ctx.error_codes.find(*ref);
            if (it == ctx.error_codes.end())
                throw StructuralError("boundaryEvent \"" + element.id +
                                      "\" references undeclared error \"" + *ref + "\"");
            element.error_code = it->second;
        }
    }
    return element;
}

} // namespace

std::shared_ptr<const ProcessDefinition> load_process(const std::string& xml_text) {
    xml::Element root = xml::parse_document(xml_text);
    if (root.local_name() != "definitions")
        throw StructuralError("document element must be <definitions>, found <" + root.name + ">");

    LoadContext ctx;
    const xml::Element* process = nullptr;
    for (const auto& child : root.children) {
        std::string local = child.local_name();
        if (local == "signal") {
            ctx.signal_names[required_attribute(child, "id")] = required_attribute(child, "name");
        } else if (local == "error") {
            ctx.error_codes[required_attribute(child, "id")] = required_attribute(child, "errorCode");
        } else if (local == "process") {
            if (process)
                throw StructuralError("more than one <process> in the document");
            process = &child;
        } else if (local != "documentation") {
            ctx.unsupported_element(child.name);
        }
    }
    if (!process)
        throw StructuralError("document contains no <process>");

    BpmnDocument doc;
    doc.process_id = required_attribute(*process, "id");

    for (const auto& child : process->children) {
        std::string local = child.local_name();
        if (local == "laneSet") {
            for (const auto* lane : child.children_named("lane")) {
                bpmn::Lane l;
                l.id = required_attribute(*lane, "id");
                if (const std::string* name = lane->attribute("name"))
                    l.role = *name;
                for (const auto* ref : lane->children_named("flowNodeRef"))
                    l.members.push_back(ref->text);
                doc.lanes.push_back(std::move(l));
            }
        } else if (local == "sequenceFlow") {
            SequenceFlow flow;
            flow.id = required_attribute(child, "id");
            flow.source = required_attribute(child, "sourceRef");
            flow.target = required_attribute(child, "targetRef");
            if (const xml::Element* cond = child.first_child("conditionExpression"))
                flow.condition = cond->text;
            doc.flows.push_back(std::move(flow));
        } else if (local == "startEvent" || local == "endEvent" || local == "task" ||
                   local == "serviceTask" || local == "exclusiveGateway" ||
                   local == "parallelGateway" || local == "intermediateThrowEvent" ||
                   local == "intermediateCatchEvent" || local == "boundaryEvent") {
            doc.elements.push_back(read_flow_node(ctx, child));
        } else if (local != "documentation") {
            ctx.unsupported_element(child.name);
        }
    }
    if (!ctx.unsupported.empty())
        throw UnsupportedElementError(ctx.unsupported);

    // Attach default-flow flags recorded on gateways.
    for (const auto& [gateway, flow_id] : ctx.gateway_defaults) {
        bool found = false;
        for (auto& flow : doc.flows) {
            if (flow.id == flow_id) {
                if (flow.source != gateway)
                    throw StructuralError("default flow \"" + flow_id + "\" does not leave gateway \"" +
                                          gateway + "\"");
                flow.is_default = true;
                found = true;
            }
        }
        if (!found)
            throw StructuralError("gateway \"" + gateway + "\" declares unknown default flow \"" +
                                  flow_id + "\"");
    }
    return compile_document(std::move(doc));
}

std::shared_ptr<const ProcessDefinition> compile_document(BpmnDocument document) {
    auto def = std::make_shared<ProcessDefinition>();
    def->document = std::move(document);
    const BpmnDocument& doc = def->document;

    std::set<std::string> ids;
    auto claim_id = [&](const std::string& id, const std::string& what) {
        if (!is_valid_ncname(id))
            throw StructuralError(what + " id \"" + id + "\" is not a valid NCName");
        if (!ids.insert(id).second)
            throw StructuralError("duplicate id \"" + id + "\"");
    };

    for (std::size_t i = 0; i < doc.elements.size(); ++i) {
        const BpmnElement& e = doc.elements[i];
        claim_id(e.id, "element");
        def->element_index[e.id] = i;
        if (e.kind == ElementKind::StartEvent) {
            if (!def->start_event_id.empty())
                throw StructuralError("process has more than one start event");
            def->start_event_id = e.id;
        }
    }
    if (def->start_event_id.empty())
        throw StructuralError("process has no start event");

    for (std::size_t i = 0; i < doc.flows.size(); ++i) {
        const SequenceFlow& flow = doc.flows[i];
        claim_id(flow.id, "flow");
        if (!def->element_index.contains(flow.source))
            throw StructuralError("flow \"" + flow.id + "\" leaves unknown element \"" + flow.source +
                                  "\"");
        if (!def->element_index.contains(flow.target))
            throw StructuralError("flow \"" + flow.id + "\" enters unknown element \"" + flow.target +
                                  "\"");
        def->outgoing[flow.source].push_back(i);
        def->incoming[flow.target].push_back(i);
        const BpmnElement& source = def->element(flow.source);
        if (flow.condition) {
            if (source.kind != ElementKind::ExclusiveGateway)
                throw StructuralError("flow \"" + flow.id +
                                      "\" carries a condition but does not leave an exclusive gateway");
            def->conditions[flow.id] = parse_condition(*flow.condition);
        }
        if (flow.is_default && source.kind != ElementKind::ExclusiveGateway)
            throw StructuralError("flow \"" + flow.id +
                                  "\" is marked default but does not leave an exclusive gateway");
    }

    std::map<std::string, int> defaults_per_gateway;
    for (const auto& flow : doc.flows)
        if (flow.is_default && ++defaults_per_gateway[flow.source] > 1)
            throw StructuralError("gateway \"" + flow.source + "\" has more than one default flow");

    for (std::size_t i = 0; i < doc.elements.size(); ++i) {
        const BpmnElement& e = doc.elements[i];
        if (e.kind != ElementKind::BoundaryErrorEvent)
            continue;
        auto host = def->element_index.find(e.attached_to);
        if (host == def->element_index.end())
            throw StructuralError("boundary event \"" + e.id + "\" is attached to unknown element \"" +
                                  e.attached_to + "\"");
        ElementKind host_kind = doc.elements[host->second].kind;
        if (host_kind != ElementKind::ServiceTask && host_kind != ElementKind::AbstractTask)
            throw StructuralError("boundary event \"" + e.id + "\" must be attached to a task");
        def->boundaries[e.attached_to].push_back(i);
    }

    // Reachability from the start event over sequence flows; a reachable host
    // makes its boundary events' outgoing flows reachable too. Boundary
    // events themselves are exempt from the requirement.
    std::set<std::string> reached{def->start_event_id};
    std::vector<std::string> stack{def->start_event_id};
    auto visit = [&](const std::string& id) {
        if (reached.insert(id).second)
            stack.push_back(id);
    };
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        if (auto it = def->outgoing.find(id); it != def->outgoing.end())
            for (std::size_t flow_index : it->second)
                visit(doc.flows[flow_index].target);
        if (auto it = def->boundaries.find(id); it != def->boundaries.end())
            for (std::size_t element_index : it->second)
                visit(doc.elements[element_index].id);
    }
    for (const auto& e : doc.elements) {
        if (e.kind == ElementKind::BoundaryErrorEvent)
            continue;
        if (!reached.contains(e.id))
            throw StructuralError("element \"" + e.id + "\" is not reachable from the start event");
    }
    return def;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

json to_json(const TraceEvent& event) {
    json out{{"seq", event.seq},
             {"ts", event.timestamp_ms},
             {"element", event.element_id},
             {"kind", event.kind}};
    if (!event.detail.is_null())
        out["detail"] = event.detail;
    return out;
}

const char* to_string(InstanceStatus status) {
    switch (status) {
    case InstanceStatus::Running: return "Running";
    case InstanceStatus::Completed: return "Completed";
    case InstanceStatus::Failed: return "Failed";
    }
    return "?";
}

std::vector<std::string> ProcessInstance::service_task_sequence() const {
    std::vector<std::string> out;
    for (const auto& event : trace)
        if (event.kind == "serviceTask" && event.detail.contains("skill"))
            out.push_back(event.detail["skill"].get<std::string>());
    return out;
}

TraceEvent& Engine::push_event(ProcessInstance& instance, const std::string& element_id,
                               const std::string& kind) {
    TraceEvent event;
    event.seq = instance.trace.size();
    event.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
    event.element_id = element_id;
    event.kind = kind;
    instance.trace.push_back(std::move(event));
    return instance.trace.back();
}

std::shared_ptr<ProcessInstance> Engine::start_instance(
    std::shared_ptr<const ProcessDefinition> definition, std::map<std::string, json> variables) {
    for (const auto& element : definition->document.elements) {
        if (element.kind == ElementKind::ServiceTask &&
            !port_.resolve(element.skill.module, element.skill.name))
            throw UnresolvedSkillError(element.skill.module, element.skill.name);
    }
    auto instance = std::make_shared<ProcessInstance>();
    {
        std::lock_guard lock(mutex_);
        instance->instance_id = "inst-" + std::to_string(next_instance_++);
    }
    instance->definition = std::move(definition);
    instance->variables = std::move(variables);
    instance->tokens[instance->definition->start_event_id] = 1;
    run_to_quiescence(*instance);
    return instance;
}

void Engine::deliver_token(ProcessInstance& instance, const SequenceFlow& flow) {
    const ProcessDefinition& def = *instance.definition;
    const BpmnElement& target = def.element(flow.target);
    instance.tokens[flow.target] += 1;
    if (target.kind == ElementKind::ParallelGateway)
        instance.gateway_arrivals[flow.target][flow.id] += 1;
    if (target.kind == ElementKind::SignalCatchEvent) {
        // A latched throw mark is consumed on arrival.
        auto latch = instance.signal_latches.find(target.signal_name);
        if (instance.satisfied_catches[target.id] == 0 && latch != instance.signal_latches.end() &&
            latch->second > 0) {
            latch->second -= 1;
            instance.satisfied_catches[target.id] += 1;
        }
    }
}

void Engine::emit_tokens(ProcessInstance& instance, const std::string& element_id) {
    const ProcessDefinition& def = *instance.definition;
    auto it = def.outgoing.find(element_id);
    if (it == def.outgoing.end())
        return;
    for (std::size_t flow_index : it->second)
        deliver_token(instance, def.document.flows[flow_index]);
}

void Engine::fail(ProcessInstance& instance, const std::string& code, const std::string& message) {
    TraceEvent& event = push_event(instance, "", "error");
    event.detail = json{{"code", code}, {"message", message}};
    instance.status = InstanceStatus::Failed;
    instance.error_code = code;
    instance.tokens.clear();
}

void Engine::handle_error(ProcessInstance& instance, const BpmnError& error) {
    const ProcessDefinition& def = *instance.definition;
    TraceEvent& event = push_event(instance, error.source_element, "error");
    event.detail = json{{"code", error.error_code}, {"message", error.message}};

    auto it = def.boundaries.find(error.source_element);
    if (it != def.boundaries.end()) {
        for (std::size_t element_index : it->second) {
            const BpmnElement& boundary = def.document.elements[element_index];
            if (!boundary.error_code || *boundary.error_code == error.error_code) {
                TraceEvent& fired = push_event(instance, boundary.id, "boundaryEvent");
                fired.detail = json{{"code", error.error_code}};
                emit_tokens(instance, boundary.id);
                return;
            }
        }
    }
    instance.status = InstanceStatus::Failed;
    instance.error_code = error.error_code;
    instance.tokens.clear();
}

void Engine::execute_service_task(ProcessInstance& instance, const BpmnElement& task) {
    const std::string& module = task.skill.module;
    const std::string& name = task.skill.name;

    // Arm and start. Another instance may grab the same skill between the
    // state read and the command, so contention retries for a grace window
    // before surfacing as a BPMN error.
    runtime::SkillState settled{};
    for (int attempt = 0;; ++attempt) {
        try {
            // Bring the skill back to Idle if an earlier run left it settled
            // elsewhere; Completed -> Reset is the nominal re-arm.
            runtime::SkillState state = port_.state(module, name);
            if (state == runtime::SkillState::Aborted)
                state = port_.command(module, name, runtime::Command::Clear);
            if (state == runtime::SkillState::Completed || state == runtime::SkillState::Stopped)
                state = port_.command(module, name, runtime::Command::Reset);
            if (state != runtime::SkillState::Idle)
                throw runtime::WrongStateError("skill " + module + "/" + name + " is in state " +
                                               runtime::to_string(state));

            for (const auto& parameter : task.parameters) {
                json value;
                if (parameter.variable) {
                    auto it = instance.variables.find(*parameter.variable);
                    if (it == instance.variables.end())
                        throw MissingVariableError(*parameter.variable);
                    value = it->second;
                } else if (parameter.literal) {
                    value = *parameter.literal;
                }
                port_.set_parameter(module, name, parameter.name, value);
            }

            settled = port_.command(module, name, runtime::Command::Start);
            break;
        } catch (const runtime::CommandRejectedError&) {
            if (attempt >= 20)
                throw BpmnError{"SKILL_BUSY", task.id,
                                "skill " + module + "/" + name + " stayed contended"};
        } catch (const runtime::WrongStateError&) {
            if (attempt >= 20)
                throw BpmnError{"SKILL_BUSY", task.id,
                                "skill " + module + "/" + name + " stayed contended"};
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5 * (attempt + 1)));
    }

    TraceEvent& event = push_event(instance, task.id, "serviceTask");
    event.detail = json{{"module", module}, {"skill", name}, {"settled", runtime::to_string(settled)}};

    if (settled == runtime::SkillState::Completed) {
        for (const auto& output : task.outputs)
            instance.variables[output.variable] = port_.get_output(module, name, output.name);
        emit_tokens(instance, task.id);
        return;
    }
    std::string code = settled == runtime::SkillState::Stopped ? "SKILL_STOPPED" : "SKILL_ABORTED";
    throw BpmnError{code, task.id, "skill " + module + "/" + name + " settled in " +
                                       std::string(runtime::to_string(settled))};
}

void Engine::fire(ProcessInstance& instance, const BpmnElement& element) {
    instance.tokens[element.id] -= 1;
    if (instance.tokens[element.id] == 0)
        instance.tokens.erase(element.id);

    switch (element.kind) {
    case ElementKind::StartEvent:
        push_event(instance, element.id, "startEvent");
        emit_tokens(instance, element.id);
        break;
    case ElementKind::EndEvent: {
        push_event(instance, element.id, "endEvent");
        bool tokens_left = false;
        for (const auto& [id, count] : instance.tokens)
            tokens_left |= count > 0;
        if (!tokens_left)
            instance.status = InstanceStatus::Completed;
        break;
    }
    case ElementKind::AbstractTask:
        push_event(instance, element.id, "task").detail = json{{"name", element.name}};
        emit_tokens(instance, element.id);
        break;
    case ElementKind::ServiceTask:
        execute_service_task(instance, element);
        break;
    case ElementKind::ExclusiveGateway: {
        push_event(instance, element.id, "exclusiveGateway");
        const ProcessDefinition& def = *instance.definition;
        auto it = def.outgoing.find(element.id);
        const SequenceFlow* chosen = nullptr;
        const SequenceFlow* fallback = nullptr;
        if (it != def.outgoing.end()) {
            for (std::size_t flow_index : it->second) {
                const SequenceFlow& flow = def.document.flows[flow_index];
                if (flow.is_default) {
                    fallback = &flow;
                    continue;
                }
                if (!flow.condition || evaluate_condition(def.conditions.at(flow.id),
                                                          instance.variables)) {
                    chosen = &flow;
                    break;
                }
            }
        }
        if (!chosen)
            chosen = fallback;
        if (!chosen)
            throw BpmnError{"DEADLOCK", element.id,
                            "no outgoing condition of gateway \"" + element.id + "\" is satisfied"};
        deliver_token(instance, *chosen);
        break;
    }
    case ElementKind::ParallelGateway: {
        push_event(instance, element.id, "parallelGateway");
        const ProcessDefinition& def = *instance.definition;
        auto incoming = def.incoming.find(element.id);
        if (incoming != def.incoming.end()) {
            auto& arrivals = instance.gateway_arrivals[element.id];
            for (std::size_t flow_index : incoming->second)
                arrivals[def.document.flows[flow_index].id] -= 1;
            // One token per incoming flow was merged; the first was consumed
            // on entry to fire().
            int extra = static_cast<int>(incoming->second.size()) - 1;
            if (extra > 0) {
                instance.tokens[element.id] -= extra;
                if (instance.tokens[element.id] <= 0)
                    instance.tokens.erase(element.id);
            }
        }
        emit_tokens(instance, element.id);
        break;
    }
    case ElementKind::SignalThrowEvent: {
        push_event(instance, element.id, "signalThrow").detail = json{{"signal", element.signal_name}};
        const ProcessDefinition& def = *instance.definition;
        bool satisfied_waiting = false;
        for (const auto& catcher : def.document.elements) {
            if (catcher.kind != ElementKind::SignalCatchEvent ||
                catcher.signal_name != element.signal_name)
                continue;
            auto waiting = instance.tokens.find(catcher.id);
            if (waiting != instance.tokens.end() && waiting->second > 0) {
                instance.satisfied_catches[catcher.id] += 1;
                satisfied_waiting = true;
            }
        }
        if (!satisfied_waiting)
            instance.signal_latches[element.signal_name] += 1;
        emit_tokens(instance, element.id);
        break;
    }
    case ElementKind::SignalCatchEvent: {
        push_event(instance, element.id, "signalCatch").detail = json{{"signal", element.signal_name}};
        instance.satisfied_catches[element.id] -= 1;
        emit_tokens(instance, element.id);
        break;
    }
    case ElementKind::BoundaryErrorEvent:
        // fired only through handle_error
        break;
    }
}

bool Engine::step(ProcessInstance& instance) {
    if (!instance.running())
        return false;
    const ProcessDefinition& def = *instance.definition;

    const BpmnElement* enabled = nullptr;
    for (const auto& [id, count] : instance.tokens) { // std::map: ascending id order
        if (count <= 0)
            continue;
        const BpmnElement& element = def.element(id);
        if (element.kind == ElementKind::ParallelGateway) {
            auto incoming = def.incoming.find(id);
            bool all_arrived = true;
            if (incoming != def.incoming.end()) {
                for (std::size_t flow_index : incoming->second)
                    all_arrived &=
                        instance.gateway_arrivals[id][def.document.flows[flow_index].id] > 0;
            }
            if (!all_arrived)
                continue;
        } else if (element.kind == ElementKind::SignalCatchEvent) {
            if (instance.satisfied_catches[id] <= 0)
                continue;
        }
        enabled = &element;
        break;
    }
    if (!enabled)
        return false;

    try {
        fire(instance, *enabled);
    } catch (const BpmnError& error) {
        handle_error(instance, error);
    } catch (const MissingVariableError& e) {
        fail(instance, "MISSING_VARIABLE", e.what());
    } catch (const Error& e) {
        fail(instance, e.code(), e.what());
    }
    return true;
}

void Engine::run_to_quiescence(ProcessInstance& instance) {
    while (instance.running()) {
        if (!step(instance)) {
            fail(instance, "DEADLOCK", "instance is running but no element is enabled");
            return;
        }
    }
}

} // namespace skillforge::engine
