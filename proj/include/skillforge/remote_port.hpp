#pragma once

#include <memory>
#include <string>

#include "skillforge/skill_port.hpp"

namespace skillforge::engine {

/// SkillPort backed by another host's HTTP skill endpoints (the wire
/// protocol served by skillforge::service::Service).
class RemoteSkillPort final : public SkillPort {
public:
    explicit RemoteSkillPort(const std::string& base_url);
    ~RemoteSkillPort() override;

    bool resolve(const std::string& module, const std::string& name) override;
    runtime::SkillState state(const std::string& module, const std::string& name) override;
    runtime::SkillState command(const std::string& module, const std::string& name,
                                runtime::Command cmd) override;
    void set_parameter(const std::string& module, const std::string& name, const std::string& parameter,
                       const nlohmann::json& value) override;
    nlohmann::json get_output(const std::string& module, const std::string& name,
                              const std::string& output) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace skillforge::engine
