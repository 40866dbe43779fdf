#include "skillforge/transforms.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "skillforge/identifiers.hpp"

namespace skillforge::model {

namespace {

const Node& resolve_node(const ActivityModel& activity, const std::string& address) {
    auto ep = parse_endpoint(address);
    const Node* node = activity.find_node(ep.node);
    if (!node)
        throw UnresolvedNodeError("activity \"" + activity.name + "\": edge endpoint \"" + address +
                                  "\" does not name a node");
    return *node;
}

std::optional<std::string> node_partition(const Node& node) {
    return node.partition;
}

std::string fresh_node_id(const ActivityModel& activity, const std::string& base) {
    if (!activity.find_node(base))
        return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!activity.find_node(candidate))
            return candidate;
    }
}

// Reroute the first control flow leaving `after` through `inserted`.
void splice_after(ActivityModel& activity, const std::string& after, const std::string& inserted) {
    for (auto& edge : activity.edges) {
        if (edge.kind == EdgeKind::ControlFlow && edge.source == after) {
            edge.source = inserted;
            activity.edges.push_back({EdgeKind::ControlFlow, after, inserted, std::nullopt, std::nullopt});
            return;
        }
    }
}

// Reroute the first control flow entering `before` through `inserted`.
void splice_before(ActivityModel& activity, const std::string& before, const std::string& inserted) {
    for (auto& edge : activity.edges) {
        if (edge.kind == EdgeKind::ControlFlow && edge.target == before) {
            edge.target = inserted;
            activity.edges.push_back({EdgeKind::ControlFlow, inserted, before, std::nullopt, std::nullopt});
            return;
        }
    }
}

} // namespace

std::vector<Edge> cross_role_flows(const ActivityModel& activity) {
    std::vector<Edge> out;
    for (const auto& edge : activity.edges) {
        if (edge.kind != EdgeKind::ObjectFlow)
            continue;
        const Node& src = resolve_node(activity, edge.source);
        const Node& dst = resolve_node(activity, edge.target);
        auto src_part = node_partition(src);
        auto dst_part = node_partition(dst);
        if (src_part && dst_part && *src_part != *dst_part)
            out.push_back(edge);
    }
    return out;
}

SystemGroupModel derive_ports(const SystemGroupModel& model) {
    SystemGroupModel result = model;
    for (const auto& activity : result.activities) {
        for (const auto& flow : cross_role_flows(activity)) {
            if (!flow.content_type || flow.content_type->empty())
                continue;
            const Node& src = *activity.find_node(parse_endpoint(flow.source).node);
            const Node& dst = *activity.find_node(parse_endpoint(flow.target).node);
            const std::string& type = *flow.content_type;
            auto ensure_port = [&](const std::string& role_name, PortDirection dir) {
                auto it = std::find_if(result.roles.begin(), result.roles.end(),
                                       [&](const Role& r) { return r.name == role_name; });
                if (it == result.roles.end())
                    return;
                if (it->find_port(dir, type))
                    return;
                std::string prefix = dir == PortDirection::Out ? "out_" : "in_";
                it->ports.push_back({prefix + sanitize_camel(type), dir, type, role_name});
            };
            ensure_port(*src.partition, PortDirection::Out);
            ensure_port(*dst.partition, PortDirection::In);
        }
    }
    return result;
}

SystemGroupModel signalize(const SystemGroupModel& model) {
    SystemGroupModel result = model;
    for (auto& activity : result.activities) {
        std::vector<Edge> crossing = cross_role_flows(activity);
        if (crossing.empty())
            continue;

        for (const auto& flow : crossing) {
            auto src_ep = parse_endpoint(flow.source);
            auto dst_ep = parse_endpoint(flow.target);
            const Node src = *activity.find_node(src_ep.node);
            const Node dst = *activity.find_node(dst_ep.node);
            const std::string type = flow.content_type.value_or("");
            const std::string token = sanitize_camel(type);

            const Role* src_role = result.find_role(*src.partition);
            const Role* dst_role = result.find_role(*dst.partition);
            const Port* out_port = src_role ? src_role->find_port(PortDirection::Out, type) : nullptr;
            const Port* in_port = dst_role ? dst_role->find_port(PortDirection::In, type) : nullptr;
            if (!out_port)
                throw MissingPortError("role \"" + *src.partition + "\" has no Out port for content type \"" +
                                       type + "\" (run derive_ports first)");
            if (!in_port)
                throw MissingPortError("role \"" + *dst.partition + "\" has no In port for content type \"" +
                                       type + "\" (run derive_ports first)");

            // Drop the crossing flow itself.
            auto removed = std::find(activity.edges.begin(), activity.edges.end(), flow);
            activity.edges.erase(removed);

            Node send;
            send.id = fresh_node_id(activity, "send_" + token);
            send.kind = NodeKind::SendSignal;
            send.partition = src.partition;
            send.signal_name = type;
            send.port_ref = out_port->name;
            activity.nodes.push_back(send);

            Node accept;
            accept.id = fresh_node_id(activity, "accept_" + token);
            accept.kind = NodeKind::AcceptSignal;
            accept.partition = dst.partition;
            accept.signal_name = type;
            accept.port_ref = in_port->name;
            activity.nodes.push_back(accept);

            // Keep the data path: source pin feeds the send node, the accept
            // node feeds the target pin.
            activity.edges.push_back({EdgeKind::ObjectFlow, flow.source, send.id, std::nullopt, type});
            activity.edges.push_back({EdgeKind::ObjectFlow, accept.id, flow.target, std::nullopt, type});

            splice_after(activity, src.id, send.id);
            splice_before(activity, dst.id, accept.id);
        }
    }
    return result;
}

} // namespace skillforge::model
