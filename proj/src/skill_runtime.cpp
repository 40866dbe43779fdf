#include "skillforge/skill_runtime.hpp"

#include <algorithm>

namespace skillforge::runtime {

using nlohmann::json;

const char* to_string(SkillState state) {
    switch (state) {
    case SkillState::Stopped: return "Stopped";
    case SkillState::Resetting: return "Resetting";
    case SkillState::Idle: return "Idle";
    case SkillState::Starting: return "Starting";
    case SkillState::Execute: return "Execute";
    case SkillState::Completing: return "Completing";
    case SkillState::Completed: return "Completed";
    case SkillState::Holding: return "Holding";
    case SkillState::Held: return "Held";
    case SkillState::Unholding: return "Unholding";
    case SkillState::Suspending: return "Suspending";
    case SkillState::Suspended: return "Suspended";
    case SkillState::Unsuspending: return "Unsuspending";
    case SkillState::Stopping: return "Stopping";
    case SkillState::Aborting: return "Aborting";
    case SkillState::Aborted: return "Aborted";
    case SkillState::Clearing: return "Clearing";
    }
    return "?";
}

const char* to_string(Command command) {
    switch (command) {
    case Command::Reset: return "Reset";
    case Command::Start: return "Start";
    case Command::Hold: return "Hold";
    case Command::Unhold: return "Unhold";
    case Command::Suspend: return "Suspend";
    case Command::Unsuspend: return "Unsuspend";
    case Command::Stop: return "Stop";
    case Command::Abort: return "Abort";
    case Command::Clear: return "Clear";
    }
    return "?";
}

std::optional<SkillState> skill_state_from_string(const std::string& text) {
    for (int i = 0; i < kSkillStateCount; ++i) {
        auto s = static_cast<SkillState>(i);
        if (text == to_string(s))
            return s;
    }
    return std::nullopt;
}

std::optional<Command> command_from_string(const std::string& text) {
    for (int i = 0; i <= static_cast<int>(Command::Clear); ++i) {
        auto c = static_cast<Command>(i);
        if (text == to_string(c))
            return c;
    }
    return std::nullopt;
}

bool is_acting(SkillState state) {
    switch (state) {
    case SkillState::Resetting:
    case SkillState::Starting:
    case SkillState::Execute:
    case SkillState::Completing:
    case SkillState::Holding:
    case SkillState::Unholding:
    case SkillState::Suspending:
    case SkillState::Unsuspending:
    case SkillState::Stopping:
    case SkillState::Aborting:
    case SkillState::Clearing:
        return true;
    default:
        return false;
    }
}

std::optional<SkillState> command_target(SkillState current, Command command) {
    switch (command) {
    case Command::Abort:
        switch (current) {
        case SkillState::Aborting:
        case SkillState::Aborted:
        case SkillState::Clearing:
            return std::nullopt;
        default:
            return SkillState::Aborting;
        }
    case Command::Stop:
        switch (current) {
        case SkillState::Stopping:
        case SkillState::Stopped:
        case SkillState::Aborting:
        case SkillState::Aborted:
        case SkillState::Clearing:
            return std::nullopt;
        default:
            return SkillState::Stopping;
        }
    case Command::Start:
        return current == SkillState::Idle ? std::optional(SkillState::Starting) : std::nullopt;
    case Command::Reset:
        return current == SkillState::Completed || current == SkillState::Stopped
                   ? std::optional(SkillState::Resetting)
                   : std::nullopt;
    case Command::Hold:
        return current == SkillState::Execute ? std::optional(SkillState::Holding) : std::nullopt;
    case Command::Unhold:
        return current == SkillState::Held ? std::optional(SkillState::Unholding) : std::nullopt;
    case Command::Suspend:
        return current == SkillState::Execute ? std::optional(SkillState::Suspending) : std::nullopt;
    case Command::Unsuspend:
        return current == SkillState::Suspended ? std::optional(SkillState::Unsuspending) : std::nullopt;
    case Command::Clear:
        return current == SkillState::Aborted ? std::optional(SkillState::Clearing) : std::nullopt;
    }
    return std::nullopt;
}

SkillState auto_next(SkillState acting) {
    switch (acting) {
    case SkillState::Resetting: return SkillState::Idle;
    case SkillState::Starting: return SkillState::Execute;
    case SkillState::Execute: return SkillState::Completing;
    case SkillState::Completing: return SkillState::Completed;
    case SkillState::Holding: return SkillState::Held;
    case SkillState::Unholding: return SkillState::Execute;
    case SkillState::Suspending: return SkillState::Suspended;
    case SkillState::Unsuspending: return SkillState::Execute;
    case SkillState::Stopping: return SkillState::Stopped;
    case SkillState::Aborting: return SkillState::Aborted;
    case SkillState::Clearing: return SkillState::Stopped;
    default: return acting; // rest states have no auto successor
    }
}

bool value_matches_type(const json& value, const std::string& type) {
    if (type == "number")
        return value.is_number();
    if (type == "integer")
        return value.is_number_integer();
    if (type == "boolean")
        return value.is_boolean();
    if (type == "string")
        return value.is_string();
    return true;
}

// ---------------------------------------------------------------------------

class SkillInstance::Context final : public SkillContext {
public:
    Context(std::map<std::string, json> params, SkillInstance& owner)
        : params_(std::move(params)), owner_(owner) {}

    json parameter(const std::string& name) const override {
        auto it = params_.find(name);
        return it == params_.end() ? json() : it->second;
    }

    void set_output(const std::string& name, json value) override {
        std::lock_guard lock(owner_.mutex_);
        if (!owner_.find_declared(owner_.descriptor_.outputs, name))
            throw UnknownNameError(name);
        owner_.outputs_[name] = std::move(value);
    }

    bool abort_requested() const override {
        std::lock_guard lock(owner_.mutex_);
        return owner_.pending_ == Command::Abort;
    }

private:
    std::map<std::string, json> params_;
    SkillInstance& owner_;
};

SkillInstance::SkillInstance(SkillDescriptor descriptor, BehaviorMap behaviors)
    : descriptor_(std::move(descriptor)), behaviors_(std::move(behaviors)) {
    history_.push_back(current_);
}

SkillState SkillInstance::state() const {
    std::lock_guard lock(mutex_);
    return current_;
}

void SkillInstance::enter(SkillState state) {
    current_ = state;
    history_.push_back(state);
}

SkillState SkillInstance::command(Command cmd) {
    std::unique_lock lock(mutex_);
    if (chain_active_) {
        // Another thread is settling the machine; queue an eligible command
        // and wait for the settled state.
        if (!command_target(current_, cmd))
            throw CommandRejectedError(current_, cmd);
        if (pending_ && *pending_ != cmd)
            throw CommandRejectedError(current_, cmd);
        pending_ = cmd;
        settled_.wait(lock, [&] { return !chain_active_; });
        return current_;
    }
    auto target = command_target(current_, cmd);
    if (!target)
        throw CommandRejectedError(current_, cmd);
    chain_active_ = true;
    if (*target == SkillState::Starting) {
        outputs_.clear();
        last_error_.clear();
    }
    run_chain(*target, lock);
    chain_active_ = false;
    settled_.notify_all();
    return current_;
}

void SkillInstance::run_chain(SkillState acting, std::unique_lock<std::mutex>& lock) {
    enter(acting);
    for (;;) {
        Behavior behavior;
        if (auto it = behaviors_.find(current_); it != behaviors_.end())
            behavior = it->second;
        bool aborted = false;
        std::string error;
        if (behavior) {
            Context ctx(parameters_, *this);
            lock.unlock();
            try {
                behavior(ctx);
            } catch (const BehaviorAbort& e) {
                aborted = true;
                error = e.what();
            } catch (const std::exception& e) {
                aborted = true;
                error = e.what();
            }
            lock.lock();
        }
        if (aborted) {
            last_error_ = error;
            if (auto target = command_target(current_, Command::Abort)) {
                enter(*target);
                continue;
            }
            if (current_ == SkillState::Aborting) {
                enter(SkillState::Aborted);
                return;
            }
            // Clearing cannot abort; fall through to its normal successor.
        }
        if (pending_) {
            Command cmd = *pending_;
            pending_.reset();
            if (auto target = command_target(current_, cmd)) {
                enter(*target);
                continue;
            }
        }
        SkillState next = auto_next(current_);
        enter(next);
        if (!is_acting(next))
            return;
    }
}

const TypedValue* SkillInstance::find_declared(const std::vector<TypedValue>& list,
                                               const std::string& name) const {
    for (const auto& item : list)
        if (item.name == name)
            return &item;
    return nullptr;
}

void SkillInstance::set_parameter(const std::string& name, json value) {
    std::lock_guard lock(mutex_);
    const TypedValue* declared = find_declared(descriptor_.parameters, name);
    if (!declared)
        throw UnknownNameError(name);
    if (current_ != SkillState::Idle && current_ != SkillState::Completed)
        throw WrongStateError(std::string("parameters may only be set in Idle or Completed, not ") +
                              to_string(current_));
    if (!value_matches_type(value, declared->type))
        throw TypeMismatchError("parameter \"" + name + "\" expects type " + declared->type + ", got " +
                                std::string(value.type_name()));
    parameters_[name] = std::move(value);
}

json SkillInstance::get_output(const std::string& name) const {
    std::lock_guard lock(mutex_);
    const TypedValue* declared = find_declared(descriptor_.outputs, name);
    if (!declared)
        throw UnknownNameError(name);
    if (current_ != SkillState::Completing && current_ != SkillState::Completed)
        throw WrongStateError(std::string("outputs are readable in Completing or Completed, not ") +
                              to_string(current_));
    auto it = outputs_.find(name);
    if (it != outputs_.end())
        return it->second;
    // Declared but never set: the type's neutral value.
    if (declared->type == "number")
        return 0.0;
    if (declared->type == "integer")
        return 0;
    if (declared->type == "boolean")
        return false;
    if (declared->type == "string")
        return "";
    return json();
}

std::map<std::string, json> SkillInstance::outputs() const {
    std::map<std::string, json> out;
    for (const auto& declared : descriptor_.outputs)
        out[declared.name] = get_output(declared.name);
    return out;
}

std::string SkillInstance::last_error() const {
    std::lock_guard lock(mutex_);
    return last_error_;
}

std::vector<SkillState> SkillInstance::history() const {
    std::lock_guard lock(mutex_);
    return history_;
}

void SkillInstance::clear_history() {
    std::lock_guard lock(mutex_);
    history_.clear();
    history_.push_back(current_);
}

// ---------------------------------------------------------------------------

SkillId SkillRegistry::register_skill(const SkillDescriptor& descriptor, BehaviorMap behaviors) {
    std::lock_guard lock(mutex_);
    SkillId id{descriptor.module_name, descriptor.skill_name};
    if (by_id_.contains(id))
        throw DuplicateSkillError(id.module, id.name);
    auto instance = std::make_shared<SkillInstance>(descriptor, std::move(behaviors));
    instances_.push_back(instance);
    by_id_[id] = std::move(instance);
    return id;
}

std::shared_ptr<SkillInstance> SkillRegistry::find(const std::string& module,
                                                   const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = by_id_.find(SkillId{module, name});
    return it == by_id_.end() ? nullptr : it->second;
}

std::shared_ptr<SkillInstance> SkillRegistry::require(const std::string& module,
                                                      const std::string& name) const {
    auto instance = find(module, name);
    if (!instance)
        throw UnknownSkillError(module, name);
    return instance;
}

std::vector<std::shared_ptr<SkillInstance>> SkillRegistry::list() const {
    std::lock_guard lock(mutex_);
    return instances_;
}

} // namespace skillforge::runtime
