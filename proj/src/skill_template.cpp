#include "skillforge/skill_template.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "skillforge/identifiers.hpp"

namespace skillforge::codegen {

using namespace skillforge::model;

StateMachineProfile StateMachineProfile::standard() {
    StateMachineProfile profile;
    profile.state_names = {"Starting",  "Execute",      "Completing", "Holding",
                           "Unholding", "Suspending",   "Unsuspending", "Stopping",
                           "Aborting",  "Clearing",     "Resetting"};
    profile.acting_states = profile.state_names;
    return profile;
}

TypeMapping type_map(const std::string& content_type) {
    if (content_type == "number")
        return {"double", false};
    if (content_type == "integer")
        return {"int", false};
    if (content_type == "boolean")
        return {"boolean", false};
    if (content_type == "string")
        return {"String", false};
    return {"String", true};
}

namespace {

std::string field_identifier(const std::string& pin_name, std::set<std::string>& taken,
                             const std::string& context) {
    std::string ident = is_valid_identifier(pin_name) ? pin_name : sanitize_camel(pin_name);
    if (!is_valid_identifier(ident))
        throw InvalidIdentifierError("pin \"" + pin_name + "\" of " + context +
                                     " cannot be sanitized to a legal identifier");
    if (!taken.insert(ident).second)
        throw InvalidIdentifierError("pin \"" + pin_name + "\" of " + context +
                                     " collides with another member named \"" + ident + "\"");
    return ident;
}

} // namespace

SkillTemplate generate_skill_template(const SystemGroupModel& model, const DeploymentBinding& binding,
                                      const StateMachineProfile& profile,
                                      std::vector<std::string>* warnings) {
    const Role* role = model.find_role(binding.role);
    const RoleWhiteboxFunction* fn = role ? role->find_function(binding.function) : nullptr;
    if (!fn)
        throw Error("UnresolvedBinding", "binding for skill \"" + binding.skill_interface_name +
                                             "\" does not resolve to a whitebox function");
    if (!is_valid_identifier(binding.skill_interface_name))
        throw InvalidIdentifierError("skill interface name \"" + binding.skill_interface_name +
                                     "\" is not a legal identifier");

    std::ostringstream out;
    const std::string comm = binding.comm_type == CommType::OpcUa ? "opcUa" : "webService";
    out << "@Skill(commType = \"" << comm << "\", module = \"" << binding.module_name
        << "\", description = \"" << binding.description << "\")\n";
    out << "public class " << binding.skill_interface_name << " {\n";

    std::set<std::string> members{"stateMachine"};
    auto emit_field = [&](const Pin& pin, const char* annotation) {
        TypeMapping mapping = type_map(pin.content_type);
        if (mapping.fallback && warnings)
            warnings->push_back("skill \"" + binding.skill_interface_name + "\": content type \"" +
                                pin.content_type + "\" of pin \"" + pin.name +
                                "\" has no type mapping, using String");
        std::string ident = field_identifier(pin.name, members, "skill \"" + binding.skill_interface_name + "\"");
        out << "\n    @" << annotation << "(name = \"" << pin.name << "\")\n";
        out << "    private " << mapping.token << " " << ident << ";\n";
    };
    for (const auto& pin : fn->inputs)
        emit_field(pin, "SkillParameter");
    for (const auto& pin : fn->outputs)
        emit_field(pin, "SkillOutput");

    out << "\n    @StateMachine\n    private SkillStateMachine stateMachine;\n";

    for (const auto& state : profile.acting_states) {
        out << "\n    @" << state << "\n";
        out << "    public void on" << state << "() {\n";
        out << "        // TODO implement\n";
        out << "    }\n";
    }
    out << "}\n";

    SkillTemplate result;
    result.unit_name = binding.skill_interface_name;
    result.source_text = out.str();
    result.target_path = binding.module_name + "/" + binding.skill_interface_name + ".java";
    return result;
}

std::vector<SkillTemplate> generate_all(const SystemGroupModel& model, const StateMachineProfile& profile,
                                        std::vector<std::string>* warnings) {
    std::vector<SkillTemplate> templates;
    std::set<std::string> paths;
    for (const auto& binding : model.deployment) {
        SkillTemplate t = generate_skill_template(model, binding, profile, warnings);
        if (!paths.insert(t.target_path).second)
            throw DuplicateTargetError(t.target_path);
        templates.push_back(std::move(t));
    }
    return templates;
}

} // namespace skillforge::codegen
