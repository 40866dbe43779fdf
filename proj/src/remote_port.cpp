#include "skillforge/remote_port.hpp"

#include <httplib.h>
#include <json.hpp>

namespace skillforge::engine {

using nlohmann::json;

struct RemoteSkillPort::Impl {
    explicit Impl(const std::string& base_url) : client(base_url) {
        client.set_connection_timeout(5);
        client.set_read_timeout(30);
    }

    httplib::Client client;

    static std::string skill_path(const std::string& module, const std::string& name,
                                  const std::string& tail) {
        return "/skills/" + module + "/" + name + tail;
    }

    [[noreturn]] static void raise(const std::string& context, const httplib::Result& result) {
        if (!result)
            throw Error("RemoteUnreachable", context + ": transport error");
        json body = json::parse(result->body, nullptr, false);
        std::string code = "RemoteError";
        std::string message = context + ": HTTP " + std::to_string(result->status);
        if (body.is_object()) {
            if (body.contains("error"))
                code = body["error"].get<std::string>();
            if (body.contains("message"))
                message = body["message"].get<std::string>();
        }
        throw Error(code, message);
    }

    json get_json(const std::string& path, const std::string& context) {
        auto result = client.Get(path);
        if (!result || result->status != 200)
            raise(context, result);
        return json::parse(result->body);
    }
};

RemoteSkillPort::RemoteSkillPort(const std::string& base_url)
    : impl_(std::make_unique<Impl>(base_url)) {}

RemoteSkillPort::~RemoteSkillPort() = default;

bool RemoteSkillPort::resolve(const std::string& module, const std::string& name) {
    auto result = impl_->client.Get(Impl::skill_path(module, name, "/state"));
    return result && result->status == 200;
}

runtime::SkillState RemoteSkillPort::state(const std::string& module, const std::string& name) {
    json body = impl_->get_json(Impl::skill_path(module, name, "/state"), "get state");
    auto parsed = runtime::skill_state_from_string(body.value("state", ""));
    if (!parsed)
        throw Error("RemoteError", "remote returned unknown state");
    return *parsed;
}

runtime::SkillState RemoteSkillPort::command(const std::string& module, const std::string& name,
                                             runtime::Command cmd) {
    json body{{"command", runtime::to_string(cmd)}};
    auto result = impl_->client.Post(Impl::skill_path(module, name, "/commands"), body.dump(),
                                     "application/json");
    if (!result || result->status != 200)
        Impl::raise("command " + std::string(runtime::to_string(cmd)), result);
    json response = json::parse(result->body);
    auto parsed = runtime::skill_state_from_string(response.value("state", ""));
    if (!parsed)
        throw Error("RemoteError", "remote returned unknown state");
    return *parsed;
}

void RemoteSkillPort::set_parameter(const std::string& module, const std::string& name,
                                    const std::string& parameter, const json& value) {
    json body{{parameter, value}};
    auto result = impl_->client.Put(Impl::skill_path(module, name, "/parameters"), body.dump(),
                                    "application/json");
    if (!result || result->status != 200)
        Impl::raise("set parameter " + parameter, result);
}

json RemoteSkillPort::get_output(const std::string& module, const std::string& name,
                                 const std::string& output) {
    json outputs = impl_->get_json(Impl::skill_path(module, name, "/outputs"), "get outputs");
    if (!outputs.contains(output))
        throw runtime::UnknownNameError(output);
    return outputs[output];
}

} // namespace skillforge::engine
