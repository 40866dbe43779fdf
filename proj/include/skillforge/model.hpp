#pragma once

#include <optional>
#include <string>
#include <vector>

namespace skillforge::model {

// ---------------------------------------------------------------------------
// System group domain model. All values are immutable after construction in
// the sense that operations never mutate their inputs; transforms return new
// models. Plain structs with value semantics keep that cheap to enforce.
// ---------------------------------------------------------------------------

struct Goal {
    int id = 0;
    std::string name;
    std::optional<int> refines;
    std::vector<std::string> satisfied_by; // SG blackbox function names
    bool aspirational = false;

    bool operator==(const Goal&) const = default;
};

struct SgBlackboxFunction {
    std::string name;
    std::optional<std::string> refines_function;
    std::optional<std::string> activity;

    bool operator==(const SgBlackboxFunction&) const = default;
};

struct Pin {
    std::string name;
    std::string content_type;

    bool operator==(const Pin&) const = default;
};

struct RoleWhiteboxFunction {
    std::string name;
    std::vector<Pin> inputs;
    std::vector<Pin> outputs;
    std::vector<std::string> bound_states;

    bool operator==(const RoleWhiteboxFunction&) const = default;
};

enum class PortDirection { In, Out };

struct Port {
    std::string name;
    PortDirection direction = PortDirection::In;
    std::string content_type;
    std::string owner; // role name, filled from containment

    bool operator==(const Port&) const = default;
};

/// Transition trigger convention: absent -> internal transition; "sig" ->
/// fires on receiving `sig`; "!sig" -> fires while sending `sig`.
struct StateTransition {
    std::string from;
    std::string to;
    std::optional<std::string> trigger;

    bool operator==(const StateTransition&) const = default;
};

struct CollaborationFunction {
    std::string name;
    std::vector<std::string> sent_signals;
    std::vector<std::string> received_signals;

    bool operator==(const CollaborationFunction&) const = default;
};

struct StateModel {
    std::string owner; // role name, filled from containment
    std::vector<std::string> states;
    std::string initial;
    std::vector<StateTransition> transitions;
    std::vector<CollaborationFunction> collaboration_functions;

    bool operator==(const StateModel&) const = default;
};

struct Role {
    std::string name;
    std::vector<RoleWhiteboxFunction> whitebox_functions;
    std::vector<Port> ports;
    std::optional<StateModel> state_model;

    const RoleWhiteboxFunction* find_function(const std::string& fn) const;
    const Port* find_port(const std::string& port_name) const;
    const Port* find_port(PortDirection dir, const std::string& content_type) const;

    bool operator==(const Role&) const = default;
};

enum class NodeKind { Initial, Final, Action, Decision, Merge, Fork, Join, SendSignal, AcceptSignal };

struct FunctionRef {
    std::string role;
    std::string function;

    bool operator==(const FunctionRef&) const = default;
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Action;
    std::optional<std::string> partition;    // role name; Initial/Final may be partitionless
    std::optional<FunctionRef> function_ref; // Action only
    std::optional<std::string> signal_name;  // SendSignal / AcceptSignal
    std::optional<std::string> port_ref;     // SendSignal / AcceptSignal

    bool operator==(const Node&) const = default;
};

enum class EdgeKind { ControlFlow, ObjectFlow };

/// Edge endpoints are node ids; an ObjectFlow endpoint may address a pin as
/// "<nodeId>.<pinName>". Signal nodes are addressed by bare node id.
struct Edge {
    EdgeKind kind = EdgeKind::ControlFlow;
    std::string source;
    std::string target;
    std::optional<std::string> guard;        // ControlFlow only
    std::optional<std::string> content_type; // ObjectFlow only

    bool operator==(const Edge&) const = default;
};

/// Split endpoint address into node id and optional pin name.
struct EdgeEndpoint {
    std::string node;
    std::optional<std::string> pin;
};
EdgeEndpoint parse_endpoint(const std::string& address);

struct ActivityModel {
    std::string name;
    std::vector<std::string> partitions; // role names
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    const Node* find_node(const std::string& id) const;

    bool operator==(const ActivityModel&) const = default;
};

enum class CommType { OpcUa, WebService };

struct DeploymentBinding {
    std::string role;
    std::string function;
    std::string skill_interface_name;
    std::string module_name;
    CommType comm_type = CommType::WebService;
    std::string description;

    bool operator==(const DeploymentBinding&) const = default;
};

struct SystemGroupModel {
    std::string name;
    std::vector<Goal> goals;
    std::vector<SgBlackboxFunction> blackbox_functions;
    std::vector<Role> roles;
    std::vector<ActivityModel> activities;
    std::vector<DeploymentBinding> deployment;

    const Role* find_role(const std::string& name) const;
    const ActivityModel* find_activity(const std::string& name) const;
    const SgBlackboxFunction* find_blackbox(const std::string& name) const;

    bool operator==(const SystemGroupModel&) const = default;
};

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);
const char* to_string(PortDirection dir);
const char* to_string(CommType type);

} // namespace skillforge::model
