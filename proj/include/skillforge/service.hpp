#pragma once

#include <memory>
#include <string>

#include "skillforge/engine.hpp"
#include "skillforge/plant.hpp"
#include "skillforge/skill_runtime.hpp"

namespace skillforge::service {

/// HTTP host for the skill registry and the process engine. A thin adapter:
/// every route delegates to the same library calls the CLI uses.
///
/// Routes:
///   POST /skills                                 register a descriptor
///   GET  /skills                                 list skills with state
///   GET  /skills/{module}/{name}/state
///   PUT  /skills/{module}/{name}/parameters      body: name -> value map
///   POST /skills/{module}/{name}/commands        body: {"command": "Start"}
///   GET  /skills/{module}/{name}/outputs
///   POST /processes                              BPMN XML body -> {"id"}
///   POST /processes/{id}/instances               variables JSON -> instance
///   GET  /instances/{iid}                        status + variables
///   GET  /instances/{iid}/trace                  JSON array of trace events
/// Errors are {"error": code, "message": text} with 400/404/409.
class Service {
public:
    struct Config {
        int port = 8080;
        std::string host = "0.0.0.0";
        std::string plant; // "", "labplant" or "labplant:empty"
    };

    explicit Service(Config config);
    ~Service();

    runtime::SkillRegistry& registry();
    std::shared_ptr<runtime::SharedPlant> plant() const;

    /// Serves on config.host:config.port; blocks until stop(). False when
    /// the port cannot be bound.
    bool run();

    /// Binds an ephemeral port and serves on a background thread; returns
    /// the bound port. Used by tests and embedding code.
    int start_background(const std::string& host = "127.0.0.1");

    /// Stops accepting, drains in-flight handlers, then aborts any skill
    /// still in an acting state.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace skillforge::service
