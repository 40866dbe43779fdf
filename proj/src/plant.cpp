#include "skillforge/plant.hpp"

#include <algorithm>

namespace skillforge::runtime {

using nlohmann::json;

namespace {

std::string string_param(const SkillContext& ctx, const std::string& name) {
    json value = ctx.parameter(name);
    return value.is_string() ? value.get<std::string>() : std::string();
}

void require_position(const PlantState& plant, const std::string& position) {
    if (std::find(plant.positions.begin(), plant.positions.end(), position) == plant.positions.end())
        throw BehaviorAbort("UnknownPosition: \"" + position + "\" is not a module position");
}

} // namespace

std::shared_ptr<SharedPlant> make_lab_plant(int thermometer_bases) {
    auto plant = std::make_shared<SharedPlant>();
    plant->state.positions = {"OrderManagement", "RawMaterialStorage", "Manufacturing",
                              "QualityInspection", "Assembly", "ProductStorage"};
    plant->state.storage_inventory["thermometerBase"] = thermometer_bases;
    plant->state.carrier_at = "RawMaterialStorage";
    return plant;
}

std::vector<SimulatedSkill> simulated_plant_skills(std::shared_ptr<SharedPlant> plant) {
    std::vector<SimulatedSkill> skills;

    {
        SimulatedSkill skill;
        skill.descriptor = {"OrderManagement",
                            "ReleaseOrder",
                            CommInterface::OpcUa,
                            {{"orderId", "string"}},
                            {{"material", "string"}, {"processingSpec", "string"}},
                            "Releases a customer order and publishes its material requirements"};
        skill.behaviors[SkillState::Execute] = [](SkillContext& ctx) {
            // The demo order book holds one product: a thermometer whose base
            // body gets drilled by the manufacturing module.
            ctx.set_output("material", "thermometerBase");
            ctx.set_output("processingSpec", "drill");
        };
        skills.push_back(std::move(skill));
    }
    {
        SimulatedSkill skill;
        skill.descriptor = {"RawMaterialStorage",
                            "HandOutMaterial",
                            CommInterface::OpcUa,
                            {{"material", "string"}},
                            {{"workpieceId", "string"}},
                            "Hands one raw part out of the storage module"};
        skill.behaviors[SkillState::Execute] = [plant](SkillContext& ctx) {
            std::string material = string_param(ctx, "material");
            if (material.empty())
                throw BehaviorAbort("MissingMaterial: parameter \"material\" is not set");
            std::lock_guard lock(plant->mutex);
            auto it = plant->state.storage_inventory.find(material);
            if (it == plant->state.storage_inventory.end() || it->second <= 0)
                throw BehaviorAbort("OutOfStock: no \"" + material + "\" left in storage");
            --it->second;
            std::string id = "wp-" + std::to_string(plant->state.next_workpiece_id++);
            plant->state.workpieces[id] = {"RawMaterialStorage", false};
            ctx.set_output("workpieceId", id);
        };
        skills.push_back(std::move(skill));
    }
    {
        SimulatedSkill skill;
        skill.descriptor = {"Transportation",
                            "RequestCarrier",
                            CommInterface::OpcUa,
                            {{"target", "string"}},
                            {{"carrierId", "string"}},
                            "Calls a workpiece carrier to a module position"};
        skill.behaviors[SkillState::Execute] = [plant](SkillContext& ctx) {
            std::string target = string_param(ctx, "target");
            if (target.empty())
                target = "RawMaterialStorage";
            std::lock_guard lock(plant->mutex);
            require_position(plant->state, target);
            plant->state.carrier_at = target;
            ctx.set_output("carrierId", "carrier-1");
        };
        skills.push_back(std::move(skill));
    }
    {
        SimulatedSkill skill;
        skill.descriptor = {"Transportation",
                            "Transport",
                            CommInterface::OpcUa,
                            {{"workpieceId", "string"}, {"from", "string"}, {"to", "string"}},
                            {},
                            "Moves a workpiece on the conveyor between module positions"};
        skill.behaviors[SkillState::Execute] = [plant](SkillContext& ctx) {
            std::string id = string_param(ctx, "workpieceId");
            std::lock_guard lock(plant->mutex);
            auto it = plant->state.workpieces.find(id);
            if (it == plant->state.workpieces.end())
                throw BehaviorAbort("UnknownWorkpiece: \"" + id + "\"");
            std::string from = string_param(ctx, "from");
            if (from.empty())
                from = it->second.location;
            std::string to = string_param(ctx, "to");
            if (to.empty())
                to = "Manufacturing";
            require_position(plant->state, from);
            require_position(plant->state, to);
            it->second.location = to;
            plant->state.carrier_at = to;
        };
        skills.push_back(std::move(skill));
    }
    {
        SimulatedSkill skill;
        skill.descriptor = {"Manufacturing",
                            "Manufacture",
                            CommInterface::OpcUa,
                            {{"workpieceId", "string"}, {"processingSpec", "string"}},
                            {{"processedWorkpieceId", "string"}},
                            "Processes a raw workpiece according to the processing specification"};
        skill.behaviors[SkillState::Execute] = [plant](SkillContext& ctx) {
            std::string id = string_param(ctx, "workpieceId");
            std::lock_guard lock(plant->mutex);
            auto it = plant->state.workpieces.find(id);
            if (it == plant->state.workpieces.end())
                throw BehaviorAbort("UnknownWorkpiece: \"" + id + "\"");
            it->second.processed = true;
            ctx.set_output("processedWorkpieceId", id);
        };
        skills.push_back(std::move(skill));
    }
    return skills;
}

void register_plant_skills(SkillRegistry& registry, std::shared_ptr<SharedPlant> plant) {
    for (auto& skill : simulated_plant_skills(std::move(plant)))
        registry.register_skill(skill.descriptor, std::move(skill.behaviors));
}

} // namespace skillforge::runtime
