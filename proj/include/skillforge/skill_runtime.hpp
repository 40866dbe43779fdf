#pragma once

#include <json.hpp>

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "skillforge/errors.hpp"

namespace skillforge::runtime {

enum class SkillState {
    Stopped, Resetting, Idle, Starting, Execute, Completing, Completed,
    Holding, Held, Unholding, Suspending, Suspended, Unsuspending,
    Stopping, Aborting, Aborted, Clearing,
};

enum class Command { Reset, Start, Hold, Unhold, Suspend, Unsuspend, Stop, Abort, Clear };

inline constexpr int kSkillStateCount = 17;

const char* to_string(SkillState state);
const char* to_string(Command command);
std::optional<SkillState> skill_state_from_string(const std::string& text);
std::optional<Command> command_from_string(const std::string& text);

/// Acting states run behavior and auto-advance; the rest are rest states.
bool is_acting(SkillState state);

/// The fixed transition table. command_target yields the acting state a
/// command moves to (nullopt = command rejected in that state); auto_next
/// yields the successor an acting state settles into when its behavior
/// completes.
std::optional<SkillState> command_target(SkillState current, Command command);
SkillState auto_next(SkillState acting);

struct DuplicateSkillError : Error {
    DuplicateSkillError(const std::string& module, const std::string& name)
        : Error("DuplicateSkill", "skill " + module + "/" + name + " is already registered") {}
};

struct CommandRejectedError : Error {
    CommandRejectedError(SkillState current, Command command)
        : Error("CommandRejected", std::string("command ") + to_string(command) +
                                       " is not allowed in state " + to_string(current)),
          state(current), command(command) {}
    SkillState state;
    Command command;
};

struct UnknownNameError : Error {
    explicit UnknownNameError(const std::string& name)
        : Error("UnknownName", "no parameter or output named \"" + name + "\"") {}
};

struct WrongStateError : Error {
    explicit WrongStateError(const std::string& message) : Error("WrongState", message) {}
};

struct TypeMismatchError : Error {
    explicit TypeMismatchError(const std::string& message) : Error("TypeMismatch", message) {}
};

struct UnknownSkillError : Error {
    UnknownSkillError(const std::string& module, const std::string& name)
        : Error("UnknownSkill", "no skill registered as " + module + "/" + name) {}
};

struct TypedValue {
    std::string name;
    std::string type; // number | integer | boolean | string

    bool operator==(const TypedValue&) const = default;
};

enum class CommInterface { OpcUa, WebService };

struct SkillDescriptor {
    std::string module_name;
    std::string skill_name;
    CommInterface comm_type = CommInterface::WebService; // metadata only
    std::vector<TypedValue> parameters;
    std::vector<TypedValue> outputs;
    std::string description;

    bool operator==(const SkillDescriptor&) const = default;
};

/// Raised by a behavior to drive its skill into Aborting.
struct BehaviorAbort : std::runtime_error {
    explicit BehaviorAbort(const std::string& reason) : std::runtime_error(reason) {}
};

/// What a behavior sees while its acting state runs.
class SkillContext {
public:
    virtual ~SkillContext() = default;
    virtual nlohmann::json parameter(const std::string& name) const = 0; // null when unset
    virtual void set_output(const std::string& name, nlohmann::json value) = 0;
    virtual bool abort_requested() const = 0;
};

using Behavior = std::function<void(SkillContext&)>;
using BehaviorMap = std::map<SkillState, Behavior>;

/// One hosted skill: descriptor + state machine + values + behaviors.
/// Commands settle synchronously on the calling thread; a second thread may
/// inject an eligible command (typically Abort) while a chain is running and
/// blocks until the machine settles.
class SkillInstance {
public:
    SkillInstance(SkillDescriptor descriptor, BehaviorMap behaviors);

    const SkillDescriptor& descriptor() const { return descriptor_; }

    SkillState state() const;
    SkillState command(Command cmd);

    void set_parameter(const std::string& name, nlohmann::json value);
    nlohmann::json get_output(const std::string& name) const;
    std::map<std::string, nlohmann::json> outputs() const;

    std::string last_error() const;

    /// Every state entered since construction or the last clear_history().
    std::vector<SkillState> history() const;
    void clear_history();

private:
    class Context;

    void run_chain(SkillState acting, std::unique_lock<std::mutex>& lock);
    const TypedValue* find_declared(const std::vector<TypedValue>& list, const std::string& name) const;
    void enter(SkillState state);

    SkillDescriptor descriptor_;
    BehaviorMap behaviors_;

    mutable std::mutex mutex_;
    std::condition_variable settled_;
    SkillState current_ = SkillState::Idle;
    std::optional<Command> pending_;
    bool chain_active_ = false;
    std::map<std::string, nlohmann::json> parameters_;
    std::map<std::string, nlohmann::json> outputs_;
    std::string last_error_;
    std::vector<SkillState> history_;
};

struct SkillId {
    std::string module;
    std::string name;

    bool operator==(const SkillId&) const = default;
    bool operator<(const SkillId& other) const {
        return std::tie(module, name) < std::tie(other.module, other.name);
    }
};

/// Thread-safe skill registry; lookups return stable shared instances.
class SkillRegistry {
public:
    SkillId register_skill(const SkillDescriptor& descriptor, BehaviorMap behaviors = {});

    std::shared_ptr<SkillInstance> find(const std::string& module, const std::string& name) const;
    std::shared_ptr<SkillInstance> require(const std::string& module, const std::string& name) const;
    std::vector<std::shared_ptr<SkillInstance>> list() const; // registration order

private:
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<SkillInstance>> instances_;
    std::map<SkillId, std::shared_ptr<SkillInstance>> by_id_;
};

/// Checks a value against a declared wire type; unknown type names accept
/// any value.
bool value_matches_type(const nlohmann::json& value, const std::string& type);

} // namespace skillforge::runtime
