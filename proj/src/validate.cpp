#include "skillforge/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "skillforge/identifiers.hpp"

namespace skillforge::model {

namespace {

class RuleContext {
public:
    explicit RuleContext(ValidationReport& report) : report_(report) {}

    void add(std::string rule, Severity severity, std::string location, std::string message) {
        report_.findings.push_back({std::move(rule), severity, std::move(location), std::move(message)});
    }

private:
    ValidationReport& report_;
};

std::string activity_loc(const ActivityModel& activity, const std::string& tail) {
    return "activities/" + activity.name + "/" + tail;
}

void check_r1_goals(const SystemGroupModel& m, RuleContext& ctx) {
    for (const auto& goal : m.goals) {
        Severity sev = goal.aspirational ? Severity::Warning : Severity::Error;
        std::string loc = "goals/" + std::to_string(goal.id);
        if (goal.satisfied_by.empty()) {
            ctx.add("R1", sev, loc,
                    "goal " + std::to_string(goal.id) + " \"" + goal.name +
                        "\" is not satisfied by any SG blackbox function");
            continue;
        }
        for (const auto& fn : goal.satisfied_by) {
            if (!m.find_blackbox(fn))
                ctx.add("R1", sev, loc,
                        "goal " + std::to_string(goal.id) + " references unknown SG blackbox function \"" +
                            fn + "\"");
        }
    }
}

void check_r2_activities_linked(const SystemGroupModel& m, RuleContext& ctx) {
    std::set<std::string> refined;
    for (const auto& fn : m.blackbox_functions)
        if (fn.refines_function)
            refined.insert(*fn.refines_function);

    for (const auto& fn : m.blackbox_functions) {
        std::string loc = "blackboxFunctions/" + fn.name;
        bool leaf = !refined.contains(fn.name);
        if (fn.activity) {
            if (!m.find_activity(*fn.activity))
                ctx.add("R2", Severity::Error, loc,
                        "function \"" + fn.name + "\" references unknown activity \"" + *fn.activity + "\"");
        } else if (leaf) {
            ctx.add("R2", Severity::Error, loc,
                    "leaf SG blackbox function \"" + fn.name + "\" has no activity");
        }
    }
}

void check_r3_r4_actions(const SystemGroupModel& m, RuleContext& ctx) {
    for (const auto& activity : m.activities) {
        for (const auto& node : activity.nodes) {
            if (node.kind != NodeKind::Action)
                continue;
            std::string loc = activity_loc(activity, "nodes/" + node.id);
            if (!node.partition ||
                std::find(activity.partitions.begin(), activity.partitions.end(), *node.partition) ==
                    activity.partitions.end()) {
                ctx.add("R3", Severity::Error, loc,
                        "action node \"" + node.id + "\" is not placed in a declared partition");
                continue; // R4 needs a resolved partition
            }
            if (!node.function_ref) {
                ctx.add("R4", Severity::Error, loc, "action node \"" + node.id + "\" has no functionRef");
                continue;
            }
            const Role* role = m.find_role(*node.partition);
            if (!role) {
                ctx.add("R4", Severity::Error, loc,
                        "partition \"" + *node.partition + "\" does not name a role");
                continue;
            }
            if (node.function_ref->role != role->name) {
                ctx.add("R4", Severity::Error, loc,
                        "functionRef role \"" + node.function_ref->role + "\" differs from partition role \"" +
                            role->name + "\"");
                continue;
            }
            if (!role->find_function(node.function_ref->function))
                ctx.add("R4", Severity::Error, loc,
                        "role \"" + role->name + "\" owns no whitebox function \"" +
                            node.function_ref->function + "\"");
        }
    }
}

// Content type of an object-flow endpoint. Skipped means the node itself
// does not resolve (R3/R4/R9 territory) or the endpoint carries no pin;
// PinMissing is R5's own failure: the function resolves but has no such pin.
struct EndpointType {
    enum Status { Skipped, PinMissing, Ok } status = Skipped;
    std::string type;
};

EndpointType endpoint_content_type(const SystemGroupModel& m, const ActivityModel& activity,
                                   const EdgeEndpoint& ep, bool source) {
    const Node* node = activity.find_node(ep.node);
    if (!node || !ep.pin)
        return {};
    if (node->kind != NodeKind::Action || !node->function_ref || !node->partition)
        return {};
    const Role* role = m.find_role(*node->partition);
    if (!role)
        return {};
    const RoleWhiteboxFunction* fn = role->find_function(node->function_ref->function);
    if (!fn)
        return {};
    const auto& pins = source ? fn->outputs : fn->inputs;
    for (const auto& pin : pins)
        if (pin.name == *ep.pin)
            return {EndpointType::Ok, pin.content_type};
    return {EndpointType::PinMissing, ""};
}

void check_r5_object_flows(const SystemGroupModel& m, RuleContext& ctx) {
    for (const auto& activity : m.activities) {
        int index = 0;
        for (const auto& edge : activity.edges) {
            int i = index++;
            if (edge.kind != EdgeKind::ObjectFlow)
                continue;
            std::string loc = activity_loc(activity, "edges[" + std::to_string(i) + "]");
            if (!edge.content_type || edge.content_type->empty()) {
                ctx.add("R5", Severity::Error, loc, "object flow has no content type");
                continue;
            }
            auto check_endpoint = [&](const std::string& address, bool source, const char* direction) {
                EndpointType result =
                    endpoint_content_type(m, activity, parse_endpoint(address), source);
                if (result.status == EndpointType::PinMissing)
                    ctx.add("R5", Severity::Error, loc,
                            std::string(direction) + " pin \"" + address + "\" does not resolve to " +
                                (source ? "an output pin" : "an input pin"));
                else if (result.status == EndpointType::Ok && result.type != *edge.content_type)
                    ctx.add("R5", Severity::Error, loc,
                            std::string(direction) + " pin type \"" + result.type +
                                "\" does not match flow type \"" + *edge.content_type + "\"");
            };
            check_endpoint(edge.source, true, "source");
            check_endpoint(edge.target, false, "target");
        }
    }
}

void check_r6_signals(const SystemGroupModel& m, RuleContext& ctx) {
    for (const auto& activity : m.activities) {
        for (const auto& node : activity.nodes) {
            if (node.kind != NodeKind::SendSignal && node.kind != NodeKind::AcceptSignal)
                continue;
            std::string loc = activity_loc(activity, "nodes/" + node.id);
            if (!node.signal_name || node.signal_name->empty()) {
                ctx.add("R6", Severity::Error, loc, "signal node \"" + node.id + "\" has no signal name");
                continue;
            }
            if (!node.port_ref)
                continue; // unbound signal nodes are legal in hand-written models
            if (!node.partition) {
                ctx.add("R6", Severity::Error, loc,
                        "signal node \"" + node.id + "\" references a port but has no partition");
                continue;
            }
            const Role* role = m.find_role(*node.partition);
            const Port* port = role ? role->find_port(*node.port_ref) : nullptr;
            if (!port) {
                ctx.add("R6", Severity::Error, loc,
                        "signal node \"" + node.id + "\" references unknown port \"" + *node.port_ref +
                            "\" on role \"" + (node.partition ? *node.partition : "") + "\"");
                continue;
            }
            PortDirection expected =
                node.kind == NodeKind::SendSignal ? PortDirection::Out : PortDirection::In;
            if (port->direction != expected)
                ctx.add("R6", Severity::Error, loc,
                        std::string("port \"") + port->name + "\" has direction " +
                            to_string(port->direction) + ", expected " + to_string(expected));
            if (port->content_type != *node.signal_name)
                ctx.add("R6", Severity::Error, loc,
                        "port content type \"" + port->content_type + "\" does not match signal \"" +
                            *node.signal_name + "\"");
        }
    }
}

void check_r7_states(const SystemGroupModel& m, RuleContext& ctx) {
    for (const auto& role : m.roles) {
        std::set<std::string> states;
        std::set<std::string> trigger_signals;
        if (role.state_model) {
            const auto& sm = *role.state_model;
            states.insert(sm.states.begin(), sm.states.end());
            std::string loc = "roles/" + role.name + "/stateModel";
            if (!states.contains(sm.initial))
                ctx.add("R7", Severity::Error, loc,
                        "initial state \"" + sm.initial + "\" is not a declared state");
            for (const auto& t : sm.transitions) {
                if (!states.contains(t.from) || !states.contains(t.to))
                    ctx.add("R7", Severity::Error, loc,
                            "transition " + t.from + " -> " + t.to + " references undeclared states");
                if (t.trigger && !t.trigger->empty()) {
                    std::string sig = *t.trigger;
                    if (sig.front() == '!')
                        sig.erase(sig.begin());
                    trigger_signals.insert(sig);
                }
            }
            for (const auto& cf : sm.collaboration_functions) {
                auto check_sigs = [&](const std::vector<std::string>& sigs, const char* kind) {
                    for (const auto& s : sigs)
                        if (!trigger_signals.contains(s))
                            ctx.add("R7", Severity::Error, loc + "/collaborationFunctions/" + cf.name,
                                    std::string(kind) + " signal \"" + s +
                                        "\" does not appear in any transition trigger of role \"" +
                                        role.name + "\"");
                };
                check_sigs(cf.sent_signals, "sent");
                check_sigs(cf.received_signals, "received");
            }
        }
        for (const auto& fn : role.whitebox_functions) {
            for (const auto& bound : fn.bound_states) {
                if (!states.contains(bound))
                    ctx.add("R7", Severity::Error,
                            "roles/" + role.name + "/whiteboxFunctions/" + fn.name,
                            "bound state \"" + bound + "\" is not declared by role \"" + role.name + "\"");
            }
        }
    }
}

void check_r8_deployment(const SystemGroupModel& m, RuleContext& ctx) {
    int index = 0;
    for (const auto& binding : m.deployment) {
        std::string loc = "deployment[" + std::to_string(index++) + "]";
        const Role* role = m.find_role(binding.role);
        if (!role) {
            ctx.add("R8", Severity::Error, loc, "binding references unknown role \"" + binding.role + "\"");
            continue;
        }
        if (!role->find_function(binding.function))
            ctx.add("R8", Severity::Error, loc,
                    "binding references unknown whitebox function \"" + binding.function + "\" of role \"" +
                        binding.role + "\"");
        if (!is_valid_identifier(binding.skill_interface_name))
            ctx.add("R8", Severity::Error, loc,
                    "skillInterfaceName \"" + binding.skill_interface_name + "\" is not a valid identifier");
        if (binding.module_name.empty())
            ctx.add("R8", Severity::Error, loc, "binding has an empty moduleName");
        if (binding.description.empty())
            ctx.add("R8", Severity::Error, loc, "binding has an empty description");
    }
}

void check_r9_graph(const SystemGroupModel& m, RuleContext& ctx) {
    for (const auto& activity : m.activities) {
        std::vector<const Node*> initials;
        bool has_final = false;
        for (const auto& node : activity.nodes) {
            if (node.kind == NodeKind::Initial)
                initials.push_back(&node);
            if (node.kind == NodeKind::Final)
                has_final = true;
        }
        if (initials.size() != 1)
            ctx.add("R9", Severity::Error, activity_loc(activity, "nodes"),
                    "activity has " + std::to_string(initials.size()) + " Initial nodes, expected exactly 1");
        if (!has_final)
            ctx.add("R9", Severity::Error, activity_loc(activity, "nodes"), "activity has no Final node");

        // Adjacency over both edge kinds, at node granularity.
        std::map<std::string, std::vector<std::string>> next;
        int index = 0;
        for (const auto& edge : activity.edges) {
            int i = index++;
            auto src = parse_endpoint(edge.source);
            auto dst = parse_endpoint(edge.target);
            bool ok = true;
            if (!activity.find_node(src.node)) {
                ctx.add("R9", Severity::Error, activity_loc(activity, "edges[" + std::to_string(i) + "]"),
                        "edge source \"" + edge.source + "\" does not name a node");
                ok = false;
            }
            if (!activity.find_node(dst.node)) {
                ctx.add("R9", Severity::Error, activity_loc(activity, "edges[" + std::to_string(i) + "]"),
                        "edge target \"" + edge.target + "\" does not name a node");
                ok = false;
            }
            if (ok)
                next[src.node].push_back(dst.node);
        }

        std::set<std::string> reached;
        std::vector<std::string> stack;
        for (const Node* init : initials) {
            reached.insert(init->id);
            stack.push_back(init->id);
        }
        while (!stack.empty()) {
            std::string id = stack.back();
            stack.pop_back();
            for (const auto& succ : next[id])
                if (reached.insert(succ).second)
                    stack.push_back(succ);
        }
        for (const auto& node : activity.nodes) {
            if (!reached.contains(node.id))
                ctx.add("R9", Severity::Error, activity_loc(activity, "nodes/" + node.id),
                        "node \"" + node.id + "\" is not reachable from the Initial node");
        }
    }
}

void check_r10_names(const SystemGroupModel& m, RuleContext& ctx) {
    auto dup = [&](const std::string& loc, const std::string& what, const std::string& name) {
        ctx.add("R10", Severity::Error, loc, "duplicate " + what + " \"" + name + "\"");
    };

    std::set<int> goal_ids;
    std::set<std::string> fn_names, role_names, activity_names;
    for (const auto& goal : m.goals) {
        std::string loc = "goals/" + std::to_string(goal.id);
        if (goal.id <= 0)
            ctx.add("R10", Severity::Error, loc, "goal id must be a positive integer");
        if (goal.name.empty())
            ctx.add("R10", Severity::Error, loc, "goal name must not be empty");
        if (!goal_ids.insert(goal.id).second)
            dup(loc, "goal id", std::to_string(goal.id));
        if (goal.refines && !goal_ids.contains(*goal.refines) &&
            std::none_of(m.goals.begin(), m.goals.end(),
                         [&](const Goal& g) { return g.id == *goal.refines; }))
            ctx.add("R10", Severity::Error, loc,
                    "refines target " + std::to_string(*goal.refines) + " does not exist");
    }
    for (const auto& fn : m.blackbox_functions) {
        std::string loc = "blackboxFunctions/" + fn.name;
        if (fn.name.empty())
            ctx.add("R10", Severity::Error, "blackboxFunctions", "blackbox function name must not be empty");
        if (!fn_names.insert(fn.name).second)
            dup(loc, "blackbox function", fn.name);
        if (fn.refines_function && !m.find_blackbox(*fn.refines_function))
            ctx.add("R10", Severity::Error, loc,
                    "refinesFunction target \"" + *fn.refines_function + "\" does not exist");
    }
    for (const auto& role : m.roles) {
        std::string rloc = "roles/" + role.name;
        if (!role_names.insert(role.name).second)
            dup(rloc, "role", role.name);
        std::set<std::string> wbf_names, port_names;
        for (const auto& fn : role.whitebox_functions) {
            if (!wbf_names.insert(fn.name).second)
                dup(rloc + "/whiteboxFunctions/" + fn.name, "whitebox function", fn.name);
            std::set<std::string> in_pins, out_pins;
            for (const auto& pin : fn.inputs)
                if (!in_pins.insert(pin.name).second)
                    dup(rloc + "/whiteboxFunctions/" + fn.name, "input pin", pin.name);
            for (const auto& pin : fn.outputs)
                if (!out_pins.insert(pin.name).second)
                    dup(rloc + "/whiteboxFunctions/" + fn.name, "output pin", pin.name);
        }
        for (const auto& port : role.ports) {
            if (!port_names.insert(port.name).second)
                dup(rloc + "/ports/" + port.name, "port", port.name);
            if (port.content_type.empty())
                ctx.add("R10", Severity::Error, rloc + "/ports/" + port.name,
                        "port content type must not be empty");
        }
        if (role.state_model) {
            std::set<std::string> states;
            for (const auto& s : role.state_model->states)
                if (!states.insert(s).second)
                    dup(rloc + "/stateModel", "state", s);
        }
    }
    for (const auto& activity : m.activities) {
        if (!activity_names.insert(activity.name).second)
            dup("activities/" + activity.name, "activity", activity.name);
        std::set<std::string> node_ids;
        for (const auto& node : activity.nodes)
            if (!node_ids.insert(node.id).second)
                dup(activity_loc(activity, "nodes/" + node.id), "node id", node.id);
    }
}

} // namespace

bool ValidationReport::has_errors() const {
    return std::any_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity == Severity::Error; });
}

std::vector<Finding> ValidationReport::by_rule(const std::string& rule) const {
    std::vector<Finding> out;
    for (const auto& f : findings)
        if (f.rule_id == rule)
            out.push_back(f);
    return out;
}

ValidationReport validate_model(const SystemGroupModel& model) {
    ValidationReport report;
    RuleContext ctx(report);
    check_r1_goals(model, ctx);
    check_r2_activities_linked(model, ctx);
    check_r3_r4_actions(model, ctx);
    check_r5_object_flows(model, ctx);
    check_r6_signals(model, ctx);
    check_r7_states(model, ctx);
    check_r8_deployment(model, ctx);
    check_r9_graph(model, ctx);
    check_r10_names(model, ctx);
    return report;
}

const char* to_string(Severity severity) {
    return severity == Severity::Error ? "Error" : "Warning";
}

} // namespace skillforge::model
