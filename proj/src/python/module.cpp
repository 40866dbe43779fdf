#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "skillforge/bpmn_gen.hpp"
#include "skillforge/engine.hpp"
#include "skillforge/model_io.hpp"
#include "skillforge/plant.hpp"
#include "skillforge/skill_template.hpp"
#include "skillforge/state_aggregation.hpp"
#include "skillforge/transforms.hpp"
#include "skillforge/validate.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace skillforge;

namespace {

// Values cross the boundary as JSON text; python callers see dicts/lists.
py::object json_to_py(const json& value) {
    py::module_ pyjson = py::module_::import("json");
    return pyjson.attr("loads")(value.dump());
}

json py_to_json(const py::object& value) {
    py::module_ pyjson = py::module_::import("json");
    std::string text = py::cast<std::string>(pyjson.attr("dumps")(value));
    return json::parse(text);
}

py::list validate_model_text(const std::string& text) {
    auto m = io::parse_model(text);
    auto report = model::validate_model(m);
    py::list out;
    for (const auto& f : report.findings) {
        py::dict entry;
        entry["rule"] = f.rule_id;
        entry["severity"] = model::to_string(f.severity);
        entry["location"] = f.location;
        entry["message"] = f.message;
        out.append(entry);
    }
    return out;
}

std::string canonicalize_model(const std::string& text) {
    return io::serialize_model(io::parse_model(text));
}

std::string derive_ports_text(const std::string& text) {
    return io::serialize_model(model::derive_ports(io::parse_model(text)));
}

std::string signalize_text(const std::string& text) {
    return io::serialize_model(model::signalize(io::parse_model(text)));
}

py::list aggregate_states_text(const std::string& text, std::size_t cap) {
    auto aggregation = model::aggregate_states(io::parse_model(text), cap);
    py::list out;
    for (const auto& composite : aggregation.states) {
        py::dict entry;
        for (std::size_t i = 0; i < aggregation.roles.size(); ++i)
            entry[py::str(aggregation.roles[i])] = composite.local_states[i];
        out.append(entry);
    }
    return out;
}

py::list generate_skill_templates(const std::string& text) {
    auto m = io::parse_model(text);
    auto templates = codegen::generate_all(m, codegen::StateMachineProfile::standard());
    py::list out;
    for (const auto& t : templates) {
        py::dict entry;
        entry["unit_name"] = t.unit_name;
        entry["target_path"] = t.target_path;
        entry["source_text"] = t.source_text;
        out.append(entry);
    }
    return out;
}

std::string generate_bpmn_xml(const std::string& text, const std::string& activity) {
    auto prepared = model::signalize(model::derive_ports(io::parse_model(text)));
    return bpmn::serialize_bpmn(bpmn::generate_bpmn(prepared, activity));
}

py::dict run_process(const std::string& bpmn_xml, const py::dict& variables, const std::string& plant) {
    auto definition = engine::load_process(bpmn_xml);
    runtime::SkillRegistry registry;
    std::shared_ptr<runtime::SharedPlant> shared_plant;
    if (!plant.empty()) {
        shared_plant = runtime::make_lab_plant(plant == "labplant:empty" ? 0 : 3);
        runtime::register_plant_skills(registry, shared_plant);
    }
    engine::EmbeddedSkillPort port(registry);
    engine::Engine eng(port);

    std::map<std::string, json> vars;
    for (auto item : variables)
        vars[py::cast<std::string>(item.first)] = py_to_json(py::reinterpret_borrow<py::object>(item.second));

    auto instance = eng.start_instance(definition, std::move(vars));

    py::dict out;
    out["status"] = engine::to_string(instance->status);
    if (!instance->error_code.empty())
        out["error_code"] = instance->error_code;
    py::dict out_vars;
    for (const auto& [name, value] : instance->variables)
        out_vars[py::str(name)] = json_to_py(value);
    out["variables"] = out_vars;
    py::list trace;
    for (const auto& event : instance->trace)
        trace.append(json_to_py(engine::to_json(event)));
    out["trace"] = trace;
    if (shared_plant) {
        auto snapshot = shared_plant->snapshot();
        py::dict plant_state;
        py::dict inventory;
        for (const auto& [material, count] : snapshot.storage_inventory)
            inventory[py::str(material)] = count;
        plant_state["inventory"] = inventory;
        plant_state["carrier_at"] = snapshot.carrier_at;
        py::dict workpieces;
        for (const auto& [id, wp] : snapshot.workpieces) {
            py::dict entry;
            entry["location"] = wp.location;
            entry["processed"] = wp.processed;
            workpieces[py::str(id)] = entry;
        }
        plant_state["workpieces"] = workpieces;
        out["plant"] = plant_state;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "skillforge core operations: model validation, methodology transforms, "
              "skill template and BPMN generation, process execution";

    static py::exception<Error> error_type(m, "SkillforgeError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            error_type(e.what());
        }
    });

    m.def("validate_model", &validate_model_text, py::arg("model_text"),
          "Validate a .sgm.json document; returns a list of finding dicts.");
    m.def("canonicalize", &canonicalize_model, py::arg("model_text"),
          "Parse and re-serialize a model into its canonical byte form.");
    m.def("derive_ports", &derive_ports_text, py::arg("model_text"),
          "Add cross-role exchange ports; returns the canonical serialized model.");
    m.def("signalize", &signalize_text, py::arg("model_text"),
          "Replace cross-partition object flows with signal pairs.");
    m.def("aggregate_states", &aggregate_states_text, py::arg("model_text"), py::arg("cap") = 10000,
          "Reachable composite states as role -> local state dicts.");
    m.def("generate_skill_templates", &generate_skill_templates, py::arg("model_text"),
          "Generate annotated skill class templates for every deployment binding.");
    m.def("generate_bpmn", &generate_bpmn_xml, py::arg("model_text"), py::arg("activity"),
          "Map one activity onto BPMN 2.0 XML (ports derived and signals inserted first).");
    m.def("run_process", &run_process, py::arg("bpmn_xml"), py::arg("variables") = py::dict(),
          py::arg("plant") = "labplant",
          "Load and execute a BPMN process; plant is 'labplant', 'labplant:empty' or ''.");
}
