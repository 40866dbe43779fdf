#pragma once

#include <string>
#include <vector>

#include "skillforge/errors.hpp"
#include "skillforge/model.hpp"

namespace skillforge::codegen {

struct InvalidIdentifierError : Error {
    explicit InvalidIdentifierError(const std::string& message) : Error("InvalidIdentifier", message) {}
};

struct DuplicateTargetError : Error {
    explicit DuplicateTargetError(const std::string& path)
        : Error("DuplicateTarget", "two bindings generate the same target path \"" + path + "\"") {}
};

/// The lifecycle states a generated skill class carries stub methods for.
struct StateMachineProfile {
    std::vector<std::string> state_names;
    std::vector<std::string> acting_states; // subset of state_names

    static StateMachineProfile standard();
};

struct SkillTemplate {
    std::string unit_name;   // equals the binding's skillInterfaceName
    std::string source_text; // annotated class, method bodies left empty
    std::string target_path; // <moduleName>/<unitName>.java
};

struct TypeMapping {
    std::string token;
    bool fallback = false; // true when the content type defaulted to String
};

/// number -> double, integer -> int, boolean -> boolean, string -> String;
/// anything else falls back to String (flagged in the result).
TypeMapping type_map(const std::string& content_type);

/// Emits one annotated skill class for `binding`: @Skill header, one
/// @SkillParameter field per function input, one @SkillOutput field per
/// output, a @StateMachine field, and an empty on<State> method per acting
/// state. Deterministic: identical inputs yield byte-identical text.
/// `warnings`, when given, collects type fallback notices.
SkillTemplate generate_skill_template(const model::SystemGroupModel& model,
                                      const model::DeploymentBinding& binding,
                                      const StateMachineProfile& profile,
                                      std::vector<std::string>* warnings = nullptr);

/// One template per deployment binding, in declaration order.
std::vector<SkillTemplate> generate_all(const model::SystemGroupModel& model,
                                        const StateMachineProfile& profile,
                                        std::vector<std::string>* warnings = nullptr);

} // namespace skillforge::codegen
