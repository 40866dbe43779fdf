#include "skillforge/service.hpp"

#include <httplib.h>

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "skillforge/log.hpp"

namespace skillforge::service {

using engine::Engine;
using engine::EmbeddedSkillPort;
using engine::ProcessDefinition;
using engine::ProcessInstance;
using nlohmann::json;

namespace {

int status_for(const std::string& code) {
    if (code == "UnknownSkill" || code == "UnknownDefinition" || code == "UnknownInstance")
        return 404;
    if (code == "DuplicateSkill" || code == "WrongState" || code == "CommandRejected")
        return 409;
    return 400;
}

void reply_error(httplib::Response& res, const std::string& code, const std::string& message) {
    res.status = status_for(code);
    res.set_content(json{{"error", code}, {"message", message}}.dump(), "application/json");
}

void reply_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json descriptor_to_json(const runtime::SkillDescriptor& descriptor) {
    json params = json::array();
    for (const auto& p : descriptor.parameters)
        params.push_back({{"name", p.name}, {"type", p.type}});
    json outputs = json::array();
    for (const auto& o : descriptor.outputs)
        outputs.push_back({{"name", o.name}, {"type", o.type}});
    return json{{"module", descriptor.module_name},
                {"name", descriptor.skill_name},
                {"commType", descriptor.comm_type == runtime::CommInterface::OpcUa ? "OpcUa" : "WebService"},
                {"parameters", params},
                {"outputs", outputs},
                {"description", descriptor.description}};
}

runtime::SkillDescriptor descriptor_from_json(const json& body) {
    if (!body.is_object() || !body.contains("module") || !body.contains("name"))
        throw Error("SchemaError", "descriptor needs \"module\" and \"name\"");
    runtime::SkillDescriptor descriptor;
    descriptor.module_name = body["module"].get<std::string>();
    descriptor.skill_name = body["name"].get<std::string>();
    descriptor.comm_type = body.value("commType", "WebService") == "OpcUa"
                               ? runtime::CommInterface::OpcUa
                               : runtime::CommInterface::WebService;
    descriptor.description = body.value("description", "");
    auto read_values = [&](const char* key, std::vector<runtime::TypedValue>& out) {
        if (!body.contains(key))
            return;
        for (const auto& item : body[key])
            out.push_back({item.value("name", ""), item.value("type", "string")});
    };
    read_values("parameters", descriptor.parameters);
    read_values("outputs", descriptor.outputs);
    return descriptor;
}

} // namespace

struct Service::Impl {
    explicit Impl(Config cfg) : config(std::move(cfg)), port(registry), engine(port) {
        if (!config.plant.empty()) {
            int inventory = config.plant == "labplant:empty" ? 0 : 3;
            plant = runtime::make_lab_plant(inventory);
            runtime::register_plant_skills(registry, plant);
        }
        wire_routes();
    }

    Config config;
    runtime::SkillRegistry registry;
    std::shared_ptr<runtime::SharedPlant> plant;
    EmbeddedSkillPort port;
    Engine engine;

    httplib::Server server;
    std::thread serve_thread;
    std::atomic<bool> running{false};

    std::mutex store_mutex;
    int next_definition = 1;
    std::map<std::string, std::shared_ptr<const ProcessDefinition>> definitions;
    std::map<std::string, std::shared_ptr<ProcessInstance>> instances;

    template <typename Fn>
    void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            reply_error(res, e.code(), e.what());
        } catch (const json::exception& e) {
            reply_error(res, "SchemaError", e.what());
        } catch (const std::exception& e) {
            reply_error(res, "InternalError", e.what());
        }
    }

    std::shared_ptr<runtime::SkillInstance> skill_or_404(const httplib::Request& req) {
        auto instance = registry.find(req.path_params.at("module"), req.path_params.at("name"));
        if (!instance)
            throw runtime::UnknownSkillError(req.path_params.at("module"), req.path_params.at("name"));
        return instance;
    }

    void wire_routes() {
        server.Post("/skills", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto descriptor = descriptor_from_json(json::parse(req.body));
                registry.register_skill(descriptor);
                reply_json(res, descriptor_to_json(descriptor), 201);
            });
        });
        server.Get("/skills", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                json out = json::array();
                for (const auto& skill : registry.list()) {
                    json entry = descriptor_to_json(skill->descriptor());
                    entry["state"] = runtime::to_string(skill->state());
                    out.push_back(std::move(entry));
                }
                reply_json(res, out);
            });
        });
        server.Get("/skills/:module/:name/state",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] {
                           const char* state = runtime::to_string(skill_or_404(req)->state());
                           reply_json(res, {{"state", state}});
                       });
                   });
        server.Put("/skills/:module/:name/parameters",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] {
                           auto skill = skill_or_404(req);
                           json body = json::parse(req.body);
                           if (!body.is_object())
                               throw Error("SchemaError", "expected a name -> value object");
                           for (auto it = body.begin(); it != body.end(); ++it)
                               skill->set_parameter(it.key(), it.value());
                           reply_json(res, json::object());
                       });
                   });
        server.Post("/skills/:module/:name/commands",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            auto skill = skill_or_404(req);
                            json body = json::parse(req.body);
                            auto command = runtime::command_from_string(body.value("command", ""));
                            if (!command)
                                throw Error("SchemaError", "unknown command");
                            const char* settled = runtime::to_string(skill->command(*command));
                            reply_json(res, {{"state", settled}});
                        });
                    });
        server.Get("/skills/:module/:name/outputs",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] {
                           auto skill = skill_or_404(req);
                           json out = json::object();
                           for (const auto& [name, value] : skill->outputs())
                               out[name] = value;
                           reply_json(res, out);
                       });
                   });

        server.Post("/processes", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto definition = engine::load_process(req.body);
                std::lock_guard lock(store_mutex);
                std::string id = "def-" + std::to_string(next_definition++);
                definitions[id] = std::move(definition);
                reply_json(res, {{"id", id}}, 201);
            });
        });
        server.Post("/processes/:id/instances",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            std::shared_ptr<const ProcessDefinition> definition;
                            {
                                std::lock_guard lock(store_mutex);
                                auto it = definitions.find(req.path_params.at("id"));
                                if (it == definitions.end())
                                    throw Error("UnknownDefinition",
                                                "no process \"" + req.path_params.at("id") + "\"");
                                definition = it->second;
                            }
                            std::map<std::string, json> variables;
                            if (!req.body.empty()) {
                                json body = json::parse(req.body);
                                if (!body.is_object())
                                    throw Error("SchemaError", "expected a variables object");
                                for (auto it = body.begin(); it != body.end(); ++it)
                                    variables[it.key()] = it.value();
                            }
                            auto instance = engine.start_instance(definition, std::move(variables));
                            {
                                std::lock_guard lock(store_mutex);
                                instances[instance->instance_id] = instance;
                            }
                            reply_json(res,
                                       {{"instanceId", instance->instance_id},
                                        {"status", engine::to_string(instance->status)}},
                                       201);
                        });
                    });
        server.Get("/instances/:iid", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto instance = instance_or_404(req);
                json variables = json::object();
                for (const auto& [name, value] : instance->variables)
                    variables[name] = value;
                json out{{"instanceId", instance->instance_id},
                         {"status", engine::to_string(instance->status)},
                         {"variables", variables}};
                if (!instance->error_code.empty())
                    out["errorCode"] = instance->error_code;
                reply_json(res, out);
            });
        });
        server.Get("/instances/:iid/trace", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto instance = instance_or_404(req);
                json out = json::array();
                for (const auto& event : instance->trace)
                    out.push_back(engine::to_json(event));
                reply_json(res, out);
            });
        });
    }

    std::shared_ptr<ProcessInstance> instance_or_404(const httplib::Request& req) {
        std::lock_guard lock(store_mutex);
        auto it = instances.find(req.path_params.at("iid"));
        if (it == instances.end())
            throw Error("UnknownInstance", "no instance \"" + req.path_params.at("iid") + "\"");
        return it->second;
    }

    void abort_acting_skills() {
        for (const auto& skill : registry.list()) {
            if (runtime::is_acting(skill->state())) {
                try {
                    skill->command(runtime::Command::Abort);
                } catch (const Error&) {
                    // settled in the meantime
                }
            }
        }
    }
};

Service::Service(Config config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() {
    stop();
}

runtime::SkillRegistry& Service::registry() {
    return impl_->registry;
}

std::shared_ptr<runtime::SharedPlant> Service::plant() const {
    return impl_->plant;
}

bool Service::run() {
    impl_->running = true;
    log::info("serving on " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    bool ok = impl_->server.listen(impl_->config.host, impl_->config.port);
    impl_->running = false;
    return ok;
}

int Service::start_background(const std::string& host) {
    int port = impl_->server.bind_to_any_port(host);
    if (port <= 0)
        return port;
    impl_->running = true;
    impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void Service::stop() {
    if (!impl_)
        return;
    if (impl_->running.exchange(false)) {
        impl_->server.stop();
        if (impl_->serve_thread.joinable())
            impl_->serve_thread.join();
        impl_->abort_acting_skills();
    }
}

} // namespace skillforge::service
