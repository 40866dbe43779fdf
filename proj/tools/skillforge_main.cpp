#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "skillforge/bpmn_gen.hpp"
#include "skillforge/engine.hpp"
#include "skillforge/log.hpp"
#include "skillforge/model_io.hpp"
#include "skillforge/plant.hpp"
#include "skillforge/remote_port.hpp"
#include "skillforge/service.hpp"
#include "skillforge/skill_template.hpp"
#include "skillforge/transforms.hpp"
#include "skillforge/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skillforge;

// Exit codes are a stable contract:
//   0 success / process Completed
//   1 validation errors
//   2 unreadable or unparseable input
//   3 refused to overwrite without --force
//   4 process Failed (or could not start)
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParse = 2;
constexpr int kExitOverwrite = 3;
constexpr int kExitRunFailed = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileError", "cannot read \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

model::SystemGroupModel load_model_or_exit(const std::string& path, int& exit_code) {
    exit_code = kExitOk;
    try {
        return io::parse_model(read_file(path));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = kExitParse;
        return {};
    }
}

void print_findings(const model::ValidationReport& report, bool as_json) {
    if (as_json) {
        json findings = json::array();
        for (const auto& f : report.findings)
            findings.push_back({{"rule", f.rule_id},
                                {"severity", model::to_string(f.severity)},
                                {"location", f.location},
                                {"message", f.message}});
        std::cout << json{{"valid", !report.has_errors()}, {"findings", findings}}.dump(2) << "\n";
        return;
    }
    for (const auto& f : report.findings)
        std::cout << f.rule_id << " " << model::to_string(f.severity) << " " << f.location << ": "
                  << f.message << "\n";
    if (report.findings.empty())
        std::cout << "model is valid\n";
}

int cmd_validate(const std::string& model_path, const std::string& format) {
    int exit_code = 0;
    model::SystemGroupModel m = load_model_or_exit(model_path, exit_code);
    if (exit_code != kExitOk)
        return exit_code;
    model::ValidationReport report = model::validate_model(m);
    print_findings(report, format == "json");
    return report.has_errors() ? kExitValidation : kExitOk;
}

int write_artifact(const fs::path& path, const std::string& content, bool force) {
    if (fs::exists(path) && !force) {
        std::cerr << "error: refusing to overwrite " << path.string() << " (use --force)\n";
        return kExitOverwrite;
    }
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        std::cerr << "error: cannot write " << path.string() << "\n";
        return kExitParse;
    }
    std::cout << path.string() << "\n";
    return kExitOk;
}

int cmd_generate(const std::string& model_path, const std::string& kind, const std::string& activity,
                 const std::string& binding_filter, const std::string& out_dir, bool force) {
    int exit_code = 0;
    model::SystemGroupModel m = load_model_or_exit(model_path, exit_code);
    if (exit_code != kExitOk)
        return exit_code;
    model::ValidationReport report = model::validate_model(m);
    if (report.has_errors()) {
        std::cerr << "error: model has validation errors, run `skillforge validate` for details\n";
        return kExitValidation;
    }

    try {
        if (kind == "skills") {
            std::vector<std::string> warnings;
            auto profile = codegen::StateMachineProfile::standard();
            auto templates = codegen::generate_all(m, profile, &warnings);
            for (const auto& w : warnings)
                log::warn(w);
            bool wrote_any = false;
            for (const auto& t : templates) {
                if (!binding_filter.empty() && t.unit_name != binding_filter)
                    continue;
                int rc = write_artifact(fs::path(out_dir) / t.target_path, t.source_text, force);
                if (rc != kExitOk)
                    return rc;
                wrote_any = true;
            }
            if (!binding_filter.empty() && !wrote_any) {
                std::cerr << "error: no deployment binding named \"" << binding_filter << "\"\n";
                return kExitParse;
            }
            return kExitOk;
        }
        // kind == "bpmn": the methodology transforms run first so signal
        // pairs and ports exist before the mapping.
        model::SystemGroupModel prepared = model::signalize(model::derive_ports(m));
        bpmn::BpmnDocument doc = bpmn::generate_bpmn(prepared, activity);
        std::string file_name = doc.process_id + ".bpmn";
        return write_artifact(fs::path(out_dir) / file_name, bpmn::serialize_bpmn(doc), force);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}

int cmd_run(const std::string& bpmn_path, const std::vector<std::string>& var_args,
            const std::string& plant_arg, const std::string& registry_url) {
    std::shared_ptr<const engine::ProcessDefinition> definition;
    try {
        definition = engine::load_process(read_file(bpmn_path));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    std::map<std::string, json> variables;
    for (const auto& arg : var_args) {
        auto eq = arg.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --var expects key=value, got \"" << arg << "\"\n";
            return kExitParse;
        }
        std::string key = arg.substr(0, eq);
        std::string raw = arg.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        variables[key] = value.is_discarded() ? json(raw) : value;
    }

    runtime::SkillRegistry registry;
    std::shared_ptr<runtime::SharedPlant> plant;
    std::unique_ptr<engine::SkillPort> port;
    if (!registry_url.empty()) {
        port = std::make_unique<engine::RemoteSkillPort>(registry_url);
    } else {
        if (!plant_arg.empty()) {
            plant = runtime::make_lab_plant(plant_arg == "labplant:empty" ? 0 : 3);
            runtime::register_plant_skills(registry, plant);
        }
        port = std::make_unique<engine::EmbeddedSkillPort>(registry);
    }

    engine::Engine eng(*port);
    std::shared_ptr<engine::ProcessInstance> instance;
    try {
        instance = eng.start_instance(definition, std::move(variables));
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitRunFailed;
    }

    for (const auto& event : instance->trace)
        std::cout << engine::to_json(event).dump() << "\n";
    std::cout << "status: " << engine::to_string(instance->status);
    if (!instance->error_code.empty())
        std::cout << " (" << instance->error_code << ")";
    std::cout << "\n";
    return instance->status == engine::InstanceStatus::Completed ? kExitOk : kExitRunFailed;
}

service::Service* g_service = nullptr;

void handle_signal(int) {
    if (g_service)
        g_service->stop();
}

int cmd_serve(int server_port, const std::string& plant_arg) {
    service::Service::Config config;
    config.port = server_port;
    config.plant = plant_arg;
    service::Service svc(config);
    g_service = &svc;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    bool ok = svc.run();
    g_service = nullptr;
    if (!ok) {
        std::cerr << "error: cannot bind port " << server_port << "\n";
        return kExitParse;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"skillforge - system group models to skills and executable BPMN processes"};
    app.require_subcommand(1);

    std::string model_path, format = "text";
    auto* validate = app.add_subcommand("validate", "Check a .sgm.json model against rules R1-R10");
    validate->add_option("model", model_path, "path to a .sgm.json model")->required();
    validate->add_option("--format", format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));

    std::string gen_model, gen_kind, gen_activity, gen_binding, gen_out = "out";
    bool gen_force = false;
    auto* generate = app.add_subcommand("generate", "Generate skill templates or a BPMN process");
    generate->add_option("model", gen_model, "path to a .sgm.json model")->required();
    generate->add_option("--kind", gen_kind, "skills|bpmn")
        ->required()
        ->check(CLI::IsMember({"skills", "bpmn"}));
    generate->add_option("--activity", gen_activity, "activity to map (required for --kind bpmn)");
    generate->add_option("--binding", gen_binding, "only emit the template for this skill interface");
    generate->add_option("--out", gen_out, "output directory");
    generate->add_flag("--force", gen_force, "overwrite existing files");

    std::string run_bpmn, run_plant = "labplant", run_registry_url;
    std::vector<std::string> run_vars;
    auto* run = app.add_subcommand("run", "Execute a .bpmn process to quiescence");
    run->add_option("process", run_bpmn, "path to a .bpmn file")->required();
    run->add_option("--var", run_vars, "initial variable, key=value (JSON values recognized)");
    run->add_option("--plant", run_plant,
                    "embedded plant skills: labplant|labplant:empty|none");
    run->add_option("--registry-url", run_registry_url, "use a remote skill registry instead");

    int serve_port = 8080;
    std::string serve_plant;
    auto* serve = app.add_subcommand("serve", "Host the skill registry and process engine over HTTP");
    serve->add_option("--port", serve_port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("--plant", serve_plant, "preload simulated plant skills: labplant|labplant:empty");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed())
            return cmd_validate(model_path, format);
        if (generate->parsed()) {
            if (gen_kind == "bpmn" && gen_activity.empty()) {
                std::cerr << "error: --kind bpmn requires --activity\n";
                return kExitParse;
            }
            return cmd_generate(gen_model, gen_kind, gen_activity, gen_binding, gen_out, gen_force);
        }
        if (run->parsed())
            return cmd_run(run_bpmn, run_vars, run_plant == "none" ? "" : run_plant, run_registry_url);
        if (serve->parsed())
            return cmd_serve(serve_port, serve_plant);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}
