#include "skillforge/bpmn_gen.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "skillforge/identifiers.hpp"
#include "skillforge/xml.hpp"

namespace skillforge::bpmn {

using namespace skillforge::model;

const BpmnElement* BpmnDocument::find_element(const std::string& id) const {
    for (const auto& e : elements)
        if (e.id == id)
            return &e;
    return nullptr;
}

const char* to_string(ElementKind kind) {
    switch (kind) {
    case ElementKind::StartEvent: return "startEvent";
    case ElementKind::EndEvent: return "endEvent";
    case ElementKind::ServiceTask: return "serviceTask";
    case ElementKind::AbstractTask: return "task";
    case ElementKind::ExclusiveGateway: return "exclusiveGateway";
    case ElementKind::ParallelGateway: return "parallelGateway";
    case ElementKind::SignalThrowEvent: return "intermediateThrowEvent";
    case ElementKind::SignalCatchEvent: return "intermediateCatchEvent";
    case ElementKind::BoundaryErrorEvent: return "boundaryEvent";
    }
    return "?";
}

namespace {

class IdFactory {
public:
    std::string make(const std::string& base_text) {
        std::string base = sanitize_camel(base_text);
        if (base.empty())
            base = "n";
        int n = ++counters_[base];
        return base + "_" + std::to_string(n);
    }

private:
    std::map<std::string, int> counters_;
};

// Follows an input pin's incoming object flow back to the producing action
// output, stepping through send/accept signal pairs, and returns the process
// variable that will hold the value. Empty when the pin has no source.
std::optional<std::string> variable_source(const ActivityModel& activity, const std::string& node_id,
                                           const std::string& pin) {
    std::string target = node_id + "." + pin;
    std::set<std::string> visited;
    std::string current_target = target;
    for (;;) {
        const Edge* incoming = nullptr;
        for (const auto& edge : activity.edges) {
            if (edge.kind == EdgeKind::ObjectFlow && edge.target == current_target) {
                incoming = &edge;
                break;
            }
        }
        if (!incoming)
            return std::nullopt;
        auto src = parse_endpoint(incoming->source);
        if (src.pin) {
            const Node* src_node = activity.find_node(src.node);
            if (src_node && src_node->kind == NodeKind::Action)
                return src.node + "_" + *src.pin;
            return std::nullopt;
        }
        const Node* src_node = activity.find_node(src.node);
        if (!src_node || src_node->kind != NodeKind::AcceptSignal || !src_node->signal_name)
            return std::nullopt;
        if (!visited.insert(src.node).second)
            return std::nullopt; // cyclic wiring
        // Hop to the matching send node's incoming flow (first match in
        // document order keeps this deterministic).
        const Node* send = nullptr;
        for (const auto& node : activity.nodes) {
            if (node.kind == NodeKind::SendSignal && node.signal_name == src_node->signal_name) {
                bool fed = std::any_of(activity.edges.begin(), activity.edges.end(), [&](const Edge& e) {
                    return e.kind == EdgeKind::ObjectFlow && parse_endpoint(e.target).node == node.id;
                });
                if (fed) {
                    send = &node;
                    break;
                }
            }
        }
        if (!send)
            return std::nullopt;
        current_target = send->id;
    }
}

} // namespace

BpmnDocument generate_bpmn(const SystemGroupModel& m, const std::string& activity_name) {
    const ActivityModel* activity = m.find_activity(activity_name);
    if (!activity)
        throw UnknownActivityError(activity_name);

    BpmnDocument doc;
    IdFactory ids;
    doc.process_id = ids.make("process " + activity->name);

    auto binding_for = [&](const FunctionRef& ref) -> const DeploymentBinding* {
        for (const auto& b : m.deployment)
            if (b.role == ref.role && b.function == ref.function)
                return &b;
        return nullptr;
    };

    std::map<std::string, std::string> element_id_of; // node id -> element id
    std::set<std::string> decision_nodes;

    for (const auto& node : activity->nodes) {
        BpmnElement element;
        switch (node.kind) {
        case NodeKind::Initial:
            element.kind = ElementKind::StartEvent;
            element.id = ids.make("start");
            break;
        case NodeKind::Final:
            element.kind = ElementKind::EndEvent;
            element.id = ids.make("end");
            break;
        case NodeKind::Decision:
            element.kind = ElementKind::ExclusiveGateway;
            element.id = ids.make("decision");
            decision_nodes.insert(node.id);
            break;
        case NodeKind::Merge:
            element.kind = ElementKind::ExclusiveGateway;
            element.id = ids.make("merge");
            break;
        case NodeKind::Fork:
            element.kind = ElementKind::ParallelGateway;
            element.id = ids.make("fork");
            break;
        case NodeKind::Join:
            element.kind = ElementKind::ParallelGateway;
            element.id = ids.make("join");
            break;
        case NodeKind::SendSignal:
            element.kind = ElementKind::SignalThrowEvent;
            element.id = ids.make("throw " + node.signal_name.value_or(""));
            element.name = node.signal_name.value_or("");
            element.signal_name = node.signal_name.value_or("");
            break;
        case NodeKind::AcceptSignal:
            element.kind = ElementKind::SignalCatchEvent;
            element.id = ids.make("catch " + node.signal_name.value_or(""));
            element.name = node.signal_name.value_or("");
            element.signal_name = node.signal_name.value_or("");
            break;
        case NodeKind::Action: {
            if (!node.function_ref)
                throw UnmappableNodeError("action node \"" + node.id + "\" has no functionRef");
            const DeploymentBinding* binding = binding_for(*node.function_ref);
            element.id = ids.make(node.function_ref->function);
            element.name = node.function_ref->function;
            if (!binding) {
                element.kind = ElementKind::AbstractTask;
                break;
            }
            element.kind = ElementKind::ServiceTask;
            element.skill = {binding->module_name, binding->skill_interface_name};
            const Role* role = m.find_role(node.function_ref->role);
            const RoleWhiteboxFunction* fn = role ? role->find_function(node.function_ref->function) : nullptr;
            if (fn) {
                for (const auto& pin : fn->inputs) {
                    ParameterBinding pb;
                    pb.name = pin.name;
                    pb.variable = variable_source(*activity, node.id, pin.name);
                    if (pb.variable)
                        element.parameters.push_back(std::move(pb));
                    // pins without a source stay unbound for manual completion
                }
                for (const auto& pin : fn->outputs)
                    element.outputs.push_back({pin.name, node.id + "_" + pin.name});
            }
            break;
        }
        }
        element_id_of[node.id] = element.id;
        doc.elements.push_back(std::move(element));
    }

    // Lanes mirror the activity partitions.
    for (const auto& partition : activity->partitions) {
        Lane lane;
        lane.id = ids.make("lane " + partition);
        lane.role = partition;
        for (const auto& node : activity->nodes)
            if (node.partition == partition)
                lane.members.push_back(element_id_of[node.id]);
        doc.lanes.push_back(std::move(lane));
    }

    std::map<std::string, bool> has_default;
    for (const auto& edge : activity->edges) {
        if (edge.kind != EdgeKind::ControlFlow)
            continue;
        auto src = parse_endpoint(edge.source);
        auto dst = parse_endpoint(edge.target);
        if (!element_id_of.contains(src.node) || !element_id_of.contains(dst.node))
            throw UnmappableNodeError("control flow endpoint \"" + edge.source + "\" -> \"" + edge.target +
                                      "\" does not resolve");
        SequenceFlow flow;
        flow.id = ids.make("flow");
        flow.source = element_id_of[src.node];
        flow.target = element_id_of[dst.node];
        bool from_decision = decision_nodes.contains(src.node);
        if (edge.guard) {
            if (!from_decision)
                throw UnmappableNodeError("guard on control flow leaving non-decision node \"" + src.node +
                                          "\"");
            flow.condition = *edge.guard;
        } else if (from_decision && !has_default[src.node]) {
            flow.is_default = true;
            has_default[src.node] = true;
        }
        doc.flows.push_back(std::move(flow));
    }
    return doc;
}

namespace {

constexpr const char* kBpmnNamespace = "http://www.omg.org/spec/BPMN/20100524/MODEL";
constexpr const char* kSkillNamespace = "urn:skillforge:bpmn:1";

} // namespace

std::string serialize_bpmn(const BpmnDocument& doc) {
    using xml::Element;

    Element definitions;
    definitions.name = "definitions";
    definitions.attributes = {{"xmlns", kBpmnNamespace},
                              {"xmlns:sf", kSkillNamespace},
                              {"id", doc.process_id + "_definitions"},
                              {"targetNamespace", kSkillNamespace}};

    // Signal and error declarations referenced by events.
    std::vector<std::string> signal_names;
    for (const auto& e : doc.elements) {
        if ((e.kind == ElementKind::SignalThrowEvent || e.kind == ElementKind::SignalCatchEvent) &&
            std::find(signal_names.begin(), signal_names.end(), e.signal_name) == signal_names.end())
            signal_names.push_back(e.signal_name);
    }
    IdFactory signal_ids;
    std::map<std::string, std::string> signal_id_of;
    for (const auto& name : signal_names) {
        std::string id = signal_ids.make("signal " + name);
        signal_id_of[name] = id;
        Element sig;
        sig.name = "signal";
        sig.attributes = {{"id", id}, {"name", name}};
        definitions.children.push_back(std::move(sig));
    }
    std::vector<std::string> error_codes;
    for (const auto& e : doc.elements)
        if (e.kind == ElementKind::BoundaryErrorEvent && e.error_code &&
            std::find(error_codes.begin(), error_codes.end(), *e.error_code) == error_codes.end())
            error_codes.push_back(*e.error_code);
    for (const auto& code : error_codes) {
        Element err;
        err.name = "error";
        err.attributes = {{"id", "error_" + sanitize_camel(code)}, {"errorCode", code}};
        definitions.children.push_back(std::move(err));
    }

    Element process;
    process.name = "process";
    process.attributes = {{"id", doc.process_id}, {"isExecutable", "true"}};

    if (!doc.lanes.empty()) {
        Element lane_set;
        lane_set.name = "laneSet";
        lane_set.attributes = {{"id", doc.process_id + "_lanes"}};
        for (const auto& lane : doc.lanes) {
            Element l;
            l.name = "lane";
            l.attributes = {{"id", lane.id}, {"name", lane.role}};
            for (const auto& member : lane.members) {
                Element ref;
                ref.name = "flowNodeRef";
                ref.text = member;
                l.children.push_back(std::move(ref));
            }
            lane_set.children.push_back(std::move(l));
        }
        process.children.push_back(std::move(lane_set));
    }

    // Flows with is_default become the `default` attribute of their gateway.
    std::map<std::string, std::string> default_of;
    for (const auto& flow : doc.flows)
        if (flow.is_default)
            default_of[flow.source] = flow.id;

    for (const auto& e : doc.elements) {
        Element el;
        el.name = to_string(e.kind);
        el.attributes.emplace_back("id", e.id);
        if (!e.name.empty())
            el.attributes.emplace_back("name", e.name);
        switch (e.kind) {
        case ElementKind::ServiceTask: {
            Element ext;
            ext.name = "extensionElements";
            Element skill;
            skill.name = "sf:skill";
            skill.attributes = {{"module", e.skill.module}, {"name", e.skill.name}};
            ext.children.push_back(std::move(skill));
            for (const auto& p : e.parameters) {
                Element param;
                param.name = "sf:parameter";
                param.attributes.emplace_back("name", p.name);
                if (p.variable)
                    param.attributes.emplace_back("variable", *p.variable);
                else if (p.literal)
                    param.attributes.emplace_back("value", p.literal->dump());
                ext.children.push_back(std::move(param));
            }
            for (const auto& o : e.outputs) {
                Element out;
                out.name = "sf:output";
                out.attributes = {{"name", o.name}, {"variable", o.variable}};
                ext.children.push_back(std::move(out));
            }
            el.children.push_back(std::move(ext));
            break;
        }
        case ElementKind::SignalThrowEvent:
        case ElementKind::SignalCatchEvent: {
            Element def;
            def.name = "signalEventDefinition";
            def.attributes = {{"id", e.id + "_def"}, {"signalRef", signal_id_of[e.signal_name]}};
            el.children.push_back(std::move(def));
            break;
        }
        case ElementKind::BoundaryErrorEvent: {
            el.attributes.emplace_back("attachedToRef", e.attached_to);
            Element def;
            def.name = "errorEventDefinition";
            def.attributes.emplace_back("id", e.id + "_def");
            if (e.error_code)
                def.attributes.emplace_back("errorRef", "error_" + sanitize_camel(*e.error_code));
            el.children.push_back(std::move(def));
            break;
        }
        case ElementKind::ExclusiveGateway:
            if (auto it = default_of.find(e.id); it != default_of.end())
                el.attributes.emplace_back("default", it->second);
            break;
        default:
            break;
        }
        process.children.push_back(std::move(el));
    }

    for (const auto& flow : doc.flows) {
        Element el;
        el.name = "sequenceFlow";
        el.attributes = {{"id", flow.id}, {"sourceRef", flow.source}, {"targetRef", flow.target}};
        if (flow.condition) {
            Element cond;
            cond.name = "conditionExpression";
            cond.text = *flow.condition;
            el.children.push_back(std::move(cond));
        }
        process.children.push_back(std::move(el));
    }

    definitions.children.push_back(std::move(process));
    return xml::write_document(definitions);
}

} // namespace skillforge::bpmn
