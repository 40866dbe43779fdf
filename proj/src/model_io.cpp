#include "skillforge/model_io.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace skillforge::io {

using nlohmann::json;
using namespace skillforge::model;

namespace {

std::string render_diagnostics(const std::vector<ParseDiagnostic>& diagnostics) {
    std::ostringstream out;
    out << diagnostics.size() << " schema problem" << (diagnostics.size() == 1 ? "" : "s");
    for (const auto& d : diagnostics)
        out << "\n  " << d.path << ": " << d.message;
    return out.str();
}

// Collects diagnostics while walking the document; parsing continues past
// recoverable problems so one pass reports them all.
class Reader {
public:
    std::vector<ParseDiagnostic> diagnostics;

    void fail(const std::string& path, const std::string& message) {
        diagnostics.push_back({path, message});
    }

    void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.contains(it.key()))
                fail(path + "/" + it.key(), "unknown field");
        }
    }

    const json* object(const json& parent, const std::string& path) {
        if (!parent.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        return &parent;
    }

    std::string string_field(const json& obj, const std::string& path, const std::string& key,
                             bool required = true) {
        if (!obj.contains(key)) {
            if (required)
                fail(path + "/" + key, "missing required field");
            return "";
        }
        if (!obj[key].is_string()) {
            fail(path + "/" + key, "expected a string");
            return "";
        }
        return obj[key].get<std::string>();
    }

    std::optional<std::string> optional_string(const json& obj, const std::string& path,
                                               const std::string& key) {
        if (!obj.contains(key))
            return std::nullopt;
        if (!obj[key].is_string()) {
            fail(path + "/" + key, "expected a string");
            return std::nullopt;
        }
        return obj[key].get<std::string>();
    }

    std::vector<std::string> string_array(const json& obj, const std::string& path, const std::string& key,
                                          bool required = true) {
        std::vector<std::string> out;
        if (!obj.contains(key)) {
            if (required)
                fail(path + "/" + key, "missing required field");
            return out;
        }
        if (!obj[key].is_array()) {
            fail(path + "/" + key, "expected an array of strings");
            return out;
        }
        int i = 0;
        for (const auto& item : obj[key]) {
            if (!item.is_string())
                fail(path + "/" + key + "[" + std::to_string(i) + "]", "expected a string");
            else
                out.push_back(item.get<std::string>());
            ++i;
        }
        return out;
    }

    const json* array_field(const json& obj, const std::string& path, const std::string& key,
                            bool required = true) {
        if (!obj.contains(key)) {
            if (required)
                fail(path + "/" + key, "missing required field");
            return nullptr;
        }
        if (!obj[key].is_array()) {
            fail(path + "/" + key, "expected an array");
            return nullptr;
        }
        return &obj[key];
    }
};

std::vector<Pin> read_pins(Reader& r, const json& obj, const std::string& path, const std::string& key) {
    std::vector<Pin> pins;
    const json* arr = r.array_field(obj, path, key);
    if (!arr)
        return pins;
    int i = 0;
    for (const auto& item : *arr) {
        std::string p = path + "/" + key + "[" + std::to_string(i++) + "]";
        if (!r.object(item, p))
            continue;
        r.check_keys(item, p, {"name", "contentType"});
        pins.push_back({r.string_field(item, p, "name"), r.string_field(item, p, "contentType")});
    }
    return pins;
}

Goal read_goal(Reader& r, const json& obj, const std::string& path) {
    Goal goal;
    r.check_keys(obj, path, {"id", "name", "refines", "satisfiedBy", "aspirational"});
    if (!obj.contains("id") || !obj["id"].is_number_integer())
        r.fail(path + "/id", "expected an integer id");
    else
        goal.id = obj["id"].get<int>();
    goal.name = r.string_field(obj, path, "name");
    if (obj.contains("refines")) {
        if (!obj["refines"].is_number_integer())
            r.fail(path + "/refines", "expected an integer goal id");
        else
            goal.refines = obj["refines"].get<int>();
    }
    goal.satisfied_by = r.string_array(obj, path, "satisfiedBy");
    if (obj.contains("aspirational")) {
        if (!obj["aspirational"].is_boolean())
            r.fail(path + "/aspirational", "expected a boolean");
        else
            goal.aspirational = obj["aspirational"].get<bool>();
    }
    return goal;
}

StateModel read_state_model(Reader& r, const json& obj, const std::string& path,
                            const std::string& role_name) {
    StateModel sm;
    sm.owner = role_name;
    r.check_keys(obj, path, {"states", "initial", "transitions", "collaborationFunctions"});
    sm.states = r.string_array(obj, path, "states");
    sm.initial = r.string_field(obj, path, "initial");
    if (const json* arr = r.array_field(obj, path, "transitions")) {
        int i = 0;
        for (const auto& item : *arr) {
            std::string p = path + "/transitions[" + std::to_string(i++) + "]";
            if (!r.object(item, p))
                continue;
            r.check_keys(item, p, {"from", "to", "trigger"});
            StateTransition t;
            t.from = r.string_field(item, p, "from");
            t.to = r.string_field(item, p, "to");
            t.trigger = r.optional_string(item, p, "trigger");
            sm.transitions.push_back(std::move(t));
        }
    }
    if (const json* arr = r.array_field(obj, path, "collaborationFunctions")) {
        int i = 0;
        for (const auto& item : *arr) {
            std::string p = path + "/collaborationFunctions[" + std::to_string(i++) + "]";
            if (!r.object(item, p))
                continue;
            r.check_keys(item, p, {"name", "sentSignals", "receivedSignals"});
            CollaborationFunction cf;
            cf.name = r.string_field(item, p, "name");
            cf.sent_signals = r.string_array(item, p, "sentSignals");
            cf.received_signals = r.string_array(item, p, "receivedSignals");
            sm.collaboration_functions.push_back(std::move(cf));
        }
    }
    return sm;
}

Role read_role(Reader& r, const json& obj, const std::string& path) {
    Role role;
    r.check_keys(obj, path, {"name", "whiteboxFunctions", "ports", "stateModel"});
    role.name = r.string_field(obj, path, "name");
    if (const json* arr = r.array_field(obj, path, "whiteboxFunctions")) {
        int i = 0;
        for (const auto& item : *arr) {
            std::string p = path + "/whiteboxFunctions[" + std::to_string(i++) + "]";
            if (!r.object(item, p))
                continue;
            r.check_keys(item, p, {"name", "inputs", "outputs", "boundStates"});
            RoleWhiteboxFunction fn;
            fn.name = r.string_field(item, p, "name");
            fn.inputs = read_pins(r, item, p, "inputs");
            fn.outputs = read_pins(r, item, p, "outputs");
            fn.bound_states = r.string_array(item, p, "boundStates");
            role.whitebox_functions.push_back(std::move(fn));
        }
    }
    if (const json* arr = r.array_field(obj, path, "ports")) {
        int i = 0;
        for (const auto& item : *arr) {
            std::string p = path + "/ports[" + std::to_string(i++) + "]";
            if (!r.object(item, p))
                continue;
            r.check_keys(item, p, {"name", "direction", "contentType"});
            Port port;
            port.name = r.string_field(item, p, "name");
            port.content_type = r.string_field(item, p, "contentType");
            port.owner = role.name;
            std::string dir = r.string_field(item, p, "direction");
            if (dir == "In")
                port.direction = PortDirection::In;
            else if (dir == "Out")
                port.direction = PortDirection::Out;
            else
                r.fail(p + "/direction", "expected \"In\" or \"Out\"");
            role.ports.push_back(std::move(port));
        }
    }
    if (obj.contains("stateModel")) {
        std::string p = path + "/stateModel";
        if (r.object(obj["stateModel"], p))
            role.state_model = read_state_model(r, obj["stateModel"], p, role.name);
    }
    return role;
}

NodeKind parse_node_kind(Reader& r, const std::string& text, const std::string& path) {
    if (text == "Initial") return NodeKind::Initial;
    if (text == "Final") return NodeKind::Final;
    if (text == "Action") return NodeKind::Action;
    if (text == "Decision") return NodeKind::Decision;
    if (text == "Merge") return NodeKind::Merge;
    if (text == "Fork") return NodeKind::Fork;
    if (text == "Join") return NodeKind::Join;
    if (text == "SendSignal") return NodeKind::SendSignal;
    if (text == "AcceptSignal") return NodeKind::AcceptSignal;
    r.fail(path, "unknown node kind \"" + text + "\"");
    return NodeKind::Action;
}

ActivityModel read_activity(Reader& r, const json& obj, const std::string& path) {
    ActivityModel activity;
    r.check_keys(obj, path, {"name", "partitions", "nodes", "edges"});
    activity.name = r.string_field(obj, path, "name");
    activity.partitions = r.string_array(obj, path, "partitions");
    if (const json* arr = r.array_field(obj, path, "nodes")) {
        int i = 0;
        for (const auto& item : *arr) {
            std::string p = path + "/nodes[" + std::to_string(i++) + "]";
            if (!r.object(item, p))
                continue;
            r.check_keys(item, p, {"id", "kind", "partition", "functionRef", "signalName", "portRef"});
            Node node;
            node.id = r.string_field(item, p, "id");
            node.kind = parse_node_kind(r, r.string_field(item, p, "kind"), p + "/kind");
            node.partition = r.optional_string(item, p, "partition");
            if (item.contains("functionRef")) {
                std::string fp = p + "/functionRef";
                if (r.object(item["functionRef"], fp)) {
                    r.check_keys(item["functionRef"], fp, {"role", "function"});
                    node.function_ref = FunctionRef{r.string_field(item["functionRef"], fp, "role"),
                                                    r.string_field(item["functionRef"], fp, "function")};
                }
            }
            node.signal_name = r.optional_string(item, p, "signalName");
            node.port_ref = r.optional_string(item, p, "portRef");
            activity.nodes.push_back(std::move(node));
        }
    }
    if (const json* arr = r.array_field(obj, path, "edges")) {
        int i = 0;
        for (const auto& item : *arr) {
            std::string p = path + "/edges[" + std::to_string(i++) + "]";
            if (!r.object(item, p))
                continue;
            r.check_keys(item, p, {"kind", "source", "target", "guard", "contentType"});
            Edge edge;
            std::string kind = r.string_field(item, p, "kind");
            if (kind == "ControlFlow")
                edge.kind = EdgeKind::ControlFlow;
            else if (kind == "ObjectFlow")
                edge.kind = EdgeKind::ObjectFlow;
            else
                r.fail(p + "/kind", "expected \"ControlFlow\" or \"ObjectFlow\"");
            edge.source = r.string_field(item, p, "source");
            edge.target = r.string_field(item, p, "target");
            edge.guard = r.optional_string(item, p, "guard");
            edge.content_type = r.optional_string(item, p, "contentType");
            activity.edges.push_back(std::move(edge));
        }
    }
    return activity;
}

DeploymentBinding read_binding(Reader& r, const json& obj, const std::string& path) {
    DeploymentBinding binding;
    r.check_keys(obj, path,
                 {"role", "function", "skillInterfaceName", "moduleName", "commType", "description"});
    binding.role = r.string_field(obj, path, "role");
    binding.function = r.string_field(obj, path, "function");
    binding.skill_interface_name = r.string_field(obj, path, "skillInterfaceName");
    binding.module_name = r.string_field(obj, path, "moduleName");
    binding.description = r.string_field(obj, path, "description");
    std::string comm = r.string_field(obj, path, "commType");
    if (comm == "OpcUa")
        binding.comm_type = CommType::OpcUa;
    else if (comm == "WebService")
        binding.comm_type = CommType::WebService;
    else
        r.fail(path + "/commType", "expected \"OpcUa\" or \"WebService\"");
    return binding;
}

// Duplicate detection at parse level mirrors validator rule R10 so malformed
// files are rejected before any semantic pass sees them.
void check_duplicates(Reader& r, const SystemGroupModel& m) {
    std::set<int> goal_ids;
    for (std::size_t i = 0; i < m.goals.size(); ++i)
        if (!goal_ids.insert(m.goals[i].id).second)
            r.fail("systemGroup/goals[" + std::to_string(i) + "]/id",
                   "duplicate goal id " + std::to_string(m.goals[i].id));
    std::set<std::string> fn_names;
    for (std::size_t i = 0; i < m.blackbox_functions.size(); ++i)
        if (!fn_names.insert(m.blackbox_functions[i].name).second)
            r.fail("systemGroup/blackboxFunctions[" + std::to_string(i) + "]/name",
                   "duplicate blackbox function name \"" + m.blackbox_functions[i].name + "\"");
    std::set<std::string> role_names;
    for (std::size_t i = 0; i < m.roles.size(); ++i)
        if (!role_names.insert(m.roles[i].name).second)
            r.fail("systemGroup/roles[" + std::to_string(i) + "]/name",
                   "duplicate role name \"" + m.roles[i].name + "\"");
    std::set<std::string> activity_names;
    for (std::size_t i = 0; i < m.activities.size(); ++i) {
        if (!activity_names.insert(m.activities[i].name).second)
            r.fail("systemGroup/activities[" + std::to_string(i) + "]/name",
                   "duplicate activity name \"" + m.activities[i].name + "\"");
        std::set<std::string> node_ids;
        for (std::size_t n = 0; n < m.activities[i].nodes.size(); ++n)
            if (!node_ids.insert(m.activities[i].nodes[n].id).second)
                r.fail("systemGroup/activities[" + std::to_string(i) + "]/nodes[" + std::to_string(n) +
                           "]/id",
                       "duplicate node id \"" + m.activities[i].nodes[n].id + "\"");
    }
}

void line_column_of(const std::string& text, std::size_t byte, int& line, int& column) {
    line = 1;
    column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

} // namespace

SchemaError::SchemaError(std::vector<ParseDiagnostic> diags)
    : Error("SchemaError", render_diagnostics(diags)), diagnostics(std::move(diags)) {}

SystemGroupModel parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1, column = 1;
        line_column_of(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
        throw SyntaxError(line, column, e.what());
    }

    Reader r;
    SystemGroupModel m;
    if (!doc.is_object())
        throw SchemaError(std::vector<ParseDiagnostic>{{"", "top-level value must be an object"}});
    r.check_keys(doc, "", {"formatVersion", "systemGroup"});
    std::string version = r.string_field(doc, "", "formatVersion");
    if (r.diagnostics.empty() && version != "1.0")
        throw VersionError(version);

    if (!doc.contains("systemGroup") || !doc["systemGroup"].is_object()) {
        r.fail("systemGroup", "missing or non-object systemGroup");
        throw SchemaError(std::move(r.diagnostics));
    }
    const json& sg = doc["systemGroup"];
    r.check_keys(sg, "systemGroup",
                 {"name", "goals", "blackboxFunctions", "roles", "activities", "deployment"});
    m.name = r.string_field(sg, "systemGroup", "name");

    auto read_array = [&](const std::string& key, auto reader, auto& out) {
        if (const json* arr = r.array_field(sg, "systemGroup", key)) {
            int i = 0;
            for (const auto& item : *arr) {
                std::string p = "systemGroup/" + key + "[" + std::to_string(i++) + "]";
                if (r.object(item, p))
                    out.push_back(reader(r, item, p));
            }
        }
    };
    read_array("goals", read_goal, m.goals);
    read_array("blackboxFunctions",
               [](Reader& rr, const json& obj, const std::string& path) {
                   SgBlackboxFunction fn;
                   rr.check_keys(obj, path, {"name", "refinesFunction", "activity"});
                   fn.name = rr.string_field(obj, path, "name");
                   fn.refines_function = rr.optional_string(obj, path, "refinesFunction");
                   fn.activity = rr.optional_string(obj, path, "activity");
                   return fn;
               },
               m.blackbox_functions);
    read_array("roles", read_role, m.roles);
    read_array("activities", read_activity, m.activities);
    read_array("deployment", read_binding, m.deployment);

    check_duplicates(r, m);
    if (!r.diagnostics.empty())
        throw SchemaError(std::move(r.diagnostics));
    return m;
}

namespace {

json pins_to_json(const std::vector<Pin>& pins) {
    json arr = json::array();
    for (const auto& pin : pins)
        arr.push_back({{"name", pin.name}, {"contentType", pin.content_type}});
    return arr;
}

} // namespace

std::string serialize_model(const SystemGroupModel& m) {
    json sg;
    sg["name"] = m.name;
    sg["goals"] = json::array();
    for (const auto& goal : m.goals) {
        json g{{"id", goal.id}, {"name", goal.name}, {"satisfiedBy", goal.satisfied_by}};
        if (goal.refines)
            g["refines"] = *goal.refines;
        if (goal.aspirational)
            g["aspirational"] = true;
        sg["goals"].push_back(std::move(g));
    }
    sg["blackboxFunctions"] = json::array();
    for (const auto& fn : m.blackbox_functions) {
        json f{{"name", fn.name}};
        if (fn.refines_function)
            f["refinesFunction"] = *fn.refines_function;
        if (fn.activity)
            f["activity"] = *fn.activity;
        sg["blackboxFunctions"].push_back(std::move(f));
    }
    sg["roles"] = json::array();
    for (const auto& role : m.roles) {
        json jr{{"name", role.name}};
        jr["whiteboxFunctions"] = json::array();
        for (const auto& fn : role.whitebox_functions)
            jr["whiteboxFunctions"].push_back({{"name", fn.name},
                                               {"inputs", pins_to_json(fn.inputs)},
                                               {"outputs", pins_to_json(fn.outputs)},
                                               {"boundStates", fn.bound_states}});
        jr["ports"] = json::array();
        for (const auto& port : role.ports)
            jr["ports"].push_back({{"name", port.name},
                                   {"direction", to_string(port.direction)},
                                   {"contentType", port.content_type}});
        if (role.state_model) {
            const auto& sm = *role.state_model;
            json jsm{{"states", sm.states}, {"initial", sm.initial}};
            jsm["transitions"] = json::array();
            for (const auto& t : sm.transitions) {
                json jt{{"from", t.from}, {"to", t.to}};
                if (t.trigger)
                    jt["trigger"] = *t.trigger;
                jsm["transitions"].push_back(std::move(jt));
            }
            jsm["collaborationFunctions"] = json::array();
            for (const auto& cf : sm.collaboration_functions)
                jsm["collaborationFunctions"].push_back({{"name", cf.name},
                                                         {"sentSignals", cf.sent_signals},
                                                         {"receivedSignals", cf.received_signals}});
            jr["stateModel"] = std::move(jsm);
        }
        sg["roles"].push_back(std::move(jr));
    }
    sg["activities"] = json::array();
    for (const auto& activity : m.activities) {
        json ja{{"name", activity.name}, {"partitions", activity.partitions}};
        ja["nodes"] = json::array();
        for (const auto& node : activity.nodes) {
            json jn{{"id", node.id}, {"kind", to_string(node.kind)}};
            if (node.partition)
                jn["partition"] = *node.partition;
            if (node.function_ref)
                jn["functionRef"] = {{"role", node.function_ref->role},
                                     {"function", node.function_ref->function}};
            if (node.signal_name)
                jn["signalName"] = *node.signal_name;
            if (node.port_ref)
                jn["portRef"] = *node.port_ref;
            ja["nodes"].push_back(std::move(jn));
        }
        ja["edges"] = json::array();
        for (const auto& edge : activity.edges) {
            json je{{"kind", to_string(edge.kind)}, {"source", edge.source}, {"target", edge.target}};
            if (edge.guard)
                je["guard"] = *edge.guard;
            if (edge.content_type)
                je["contentType"] = *edge.content_type;
            ja["edges"].push_back(std::move(je));
        }
        sg["activities"].push_back(std::move(ja));
    }
    sg["deployment"] = json::array();
    for (const auto& binding : m.deployment)
        sg["deployment"].push_back({{"role", binding.role},
                                    {"function", binding.function},
                                    {"skillInterfaceName", binding.skill_interface_name},
                                    {"moduleName", binding.module_name},
                                    {"commType", to_string(binding.comm_type)},
                                    {"description", binding.description}});

    json doc{{"formatVersion", "1.0"}, {"systemGroup", std::move(sg)}};
    return doc.dump(2) + "\n";
}

} // namespace skillforge::io
