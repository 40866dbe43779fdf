#include "skillforge/model.hpp"

#include <algorithm>

namespace skillforge::model {

const RoleWhiteboxFunction* Role::find_function(const std::string& fn) const {
    for (const auto& f : whitebox_functions)
        if (f.name == fn)
            return &f;
    return nullptr;
}

const Port* Role::find_port(const std::string& port_name) const {
    for (const auto& p : ports)
        if (p.name == port_name)
            return &p;
    return nullptr;
}

const Port* Role::find_port(PortDirection dir, const std::string& content_type) const {
    for (const auto& p : ports)
        if (p.direction == dir && p.content_type == content_type)
            return &p;
    return nullptr;
}

EdgeEndpoint parse_endpoint(const std::string& address) {
    auto dot = address.find('.');
    if (dot == std::string::npos)
        return {address, std::nullopt};
    return {address.substr(0, dot), address.substr(dot + 1)};
}

const Node* ActivityModel::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id)
            return &n;
    return nullptr;
}

const Role* SystemGroupModel::find_role(const std::string& role_name) const {
    for (const auto& r : roles)
        if (r.name == role_name)
            return &r;
    return nullptr;
}

const ActivityModel* SystemGroupModel::find_activity(const std::string& activity_name) const {
    for (const auto& a : activities)
        if (a.name == activity_name)
            return &a;
    return nullptr;
}

const SgBlackboxFunction* SystemGroupModel::find_blackbox(const std::string& fn_name) const {
    for (const auto& f : blackbox_functions)
        if (f.name == fn_name)
            return &f;
    return nullptr;
}

const char* to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::Initial: return "Initial";
    case NodeKind::Final: return "Final";
    case NodeKind::Action: return "Action";
    case NodeKind::Decision: return "Decision";
    case NodeKind::Merge: return "Merge";
    case NodeKind::Fork: return "Fork";
    case NodeKind::Join: return "Join";
    case NodeKind::SendSignal: return "SendSignal";
    case NodeKind::AcceptSignal: return "AcceptSignal";
    }
    return "?";
}

const char* to_string(EdgeKind kind) {
    return kind == EdgeKind::ControlFlow ? "ControlFlow" : "ObjectFlow";
}

const char* to_string(PortDirection dir) {
    return dir == PortDirection::In ? "In" : "Out";
}

const char* to_string(CommType type) {
    return type == CommType::OpcUa ? "OpcUa" : "WebService";
}

} // namespace skillforge::model
