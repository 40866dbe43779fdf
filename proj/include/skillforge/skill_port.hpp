#pragma once

#include <json.hpp>

#include <string>

#include "skillforge/skill_runtime.hpp"

namespace skillforge::engine {

/// What the process engine needs from a skill host. The embedded adapter
/// drives an in-process registry; the remote adapter (see remote_port.hpp)
/// speaks the HTTP wire protocol to another host.
class SkillPort {
public:
    virtual ~SkillPort() = default;

    virtual bool resolve(const std::string& module, const std::string& name) = 0;
    virtual runtime::SkillState state(const std::string& module, const std::string& name) = 0;
    /// Issues a command and returns the settled state.
    virtual runtime::SkillState command(const std::string& module, const std::string& name,
                                        runtime::Command cmd) = 0;
    virtual void set_parameter(const std::string& module, const std::string& name,
                               const std::string& parameter, const nlohmann::json& value) = 0;
    virtual nlohmann::json get_output(const std::string& module, const std::string& name,
                                      const std::string& output) = 0;
};

class EmbeddedSkillPort final : public SkillPort {
public:
    explicit EmbeddedSkillPort(runtime::SkillRegistry& registry) : registry_(registry) {}

    bool resolve(const std::string& module, const std::string& name) override {
        return registry_.find(module, name) != nullptr;
    }
    runtime::SkillState state(const std::string& module, const std::string& name) override {
        return registry_.require(module, name)->state();
    }
    runtime::SkillState command(const std::string& module, const std::string& name,
                                runtime::Command cmd) override {
        return registry_.require(module, name)->command(cmd);
    }
    void set_parameter(const std::string& module, const std::string& name, const std::string& parameter,
                       const nlohmann::json& value) override {
        registry_.require(module, name)->set_parameter(parameter, value);
    }
    nlohmann::json get_output(const std::string& module, const std::string& name,
                              const std::string& output) override {
        return registry_.require(module, name)->get_output(output);
    }

private:
    runtime::SkillRegistry& registry_;
};

} // namespace skillforge::engine
