#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "skillforge/skill_runtime.hpp"

namespace skillforge::runtime {

/// Bookkeeping state of the simulated modular lab plant.
struct PlantState {
    std::vector<std::string> positions; // declared module positions
    std::map<std::string, int> storage_inventory;
    std::string carrier_at;
    struct Workpiece {
        std::string location;
        bool processed = false;

        bool operator==(const Workpiece&) const = default;
    };
    std::map<std::string, Workpiece> workpieces;
    int next_workpiece_id = 1;
};

/// Plant state shared between concurrently executing skills.
struct SharedPlant {
    mutable std::mutex mutex;
    PlantState state;

    PlantState snapshot() const {
        std::lock_guard lock(mutex);
        return state;
    }
};

/// Six-module lab plant with `thermometer_bases` raw parts in storage.
std::shared_ptr<SharedPlant> make_lab_plant(int thermometer_bases = 3);

struct SimulatedSkill {
    SkillDescriptor descriptor;
    BehaviorMap behaviors;
};

/// The five §IV skills: ReleaseOrder, HandOutMaterial, RequestCarrier,
/// Transport and Manufacture. Behaviors mutate the shared plant and abort
/// their skill on OutOfStock / UnknownWorkpiece conditions.
std::vector<SimulatedSkill> simulated_plant_skills(std::shared_ptr<SharedPlant> plant);

/// Registers all simulated skills into `registry`.
void register_plant_skills(SkillRegistry& registry, std::shared_ptr<SharedPlant> plant);

} // namespace skillforge::runtime
