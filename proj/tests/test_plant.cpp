#include <doctest.h>

#include <random>

#include "skillforge/plant.hpp"

using namespace skillforge;
using namespace skillforge::runtime;
using nlohmann::json;

namespace {

struct PlantHarness {
    std::shared_ptr<SharedPlant> plant;
    SkillRegistry registry;

    explicit PlantHarness(int inventory = 1) : plant(make_lab_plant(inventory)) {
        register_plant_skills(registry, plant);
    }

    SkillState run(const std::string& module, const std::string& name,
                   const std::map<std::string, json>& params) {
        auto skill = registry.require(module, name);
        SkillState state = skill->state();
        if (state == SkillState::Aborted) {
            skill->command(Command::Clear);
            state = SkillState::Stopped;
        }
        if (state == SkillState::Completed || state == SkillState::Stopped)
            skill->command(Command::Reset);
        for (const auto& [key, value] : params)
            skill->set_parameter(key, value);
        return skill->command(Command::Start);
    }

    json output(const std::string& module, const std::string& name, const std::string& out) {
        return registry.require(module, name)->get_output(out);
    }
};

} // namespace

TEST_CASE("five skills register in order") {
    PlantHarness h;
    auto skills = h.registry.list();
    REQUIRE(skills.size() == 5);
    CHECK(skills[0]->descriptor().skill_name == "ReleaseOrder");
    CHECK(skills[1]->descriptor().skill_name == "HandOutMaterial");
    CHECK(skills[2]->descriptor().skill_name == "RequestCarrier");
    CHECK(skills[3]->descriptor().skill_name == "Transport");
    CHECK(skills[4]->descriptor().skill_name == "Manufacture");
}

TEST_CASE("hand out decrements inventory and creates a workpiece") {
    PlantHarness h(1);
    CHECK(h.run("RawMaterialStorage", "HandOutMaterial", {{"material", "thermometerBase"}}) ==
          SkillState::Completed);
    json id = h.output("RawMaterialStorage", "HandOutMaterial", "workpieceId");
    CHECK(id == json("wp-1"));
    auto state = h.plant->snapshot();
    CHECK(state.storage_inventory.at("thermometerBase") == 0);
    REQUIRE(state.workpieces.contains("wp-1"));
    CHECK(state.workpieces.at("wp-1").location == "RawMaterialStorage");
    CHECK_FALSE(state.workpieces.at("wp-1").processed);
}

TEST_CASE("hand out on empty inventory settles in Aborted") {
    PlantHarness h(0);
    CHECK(h.run("RawMaterialStorage", "HandOutMaterial", {{"material", "thermometerBase"}}) ==
          SkillState::Aborted);
    auto skill = h.registry.require("RawMaterialStorage", "HandOutMaterial");
    CHECK(skill->last_error().find("OutOfStock") != std::string::npos);
    CHECK(h.plant->snapshot().workpieces.empty());
}

TEST_CASE("transport of an unknown workpiece aborts") {
    PlantHarness h;
    CHECK(h.run("Transportation", "Transport", {{"workpieceId", "wp-99"}}) == SkillState::Aborted);
}

TEST_CASE("request carrier moves the carrier") {
    PlantHarness h;
    CHECK(h.run("Transportation", "RequestCarrier", {{"target", "Manufacturing"}}) ==
          SkillState::Completed);
    CHECK(h.plant->snapshot().carrier_at == "Manufacturing");
    CHECK(h.output("Transportation", "RequestCarrier", "carrierId") == json("carrier-1"));
    // unknown positions abort
    CHECK(h.run("Transportation", "RequestCarrier", {{"target", "Narnia"}}) == SkillState::Aborted);
}

TEST_CASE("full happy path processes one workpiece") {
    PlantHarness h(3);
    CHECK(h.run("OrderManagement", "ReleaseOrder", {{"orderId", "order-1"}}) == SkillState::Completed);
    std::string material = h.output("OrderManagement", "ReleaseOrder", "material").get<std::string>();
    std::string spec = h.output("OrderManagement", "ReleaseOrder", "processingSpec").get<std::string>();
    CHECK(material == "thermometerBase");

    CHECK(h.run("RawMaterialStorage", "HandOutMaterial", {{"material", material}}) ==
          SkillState::Completed);
    std::string wp = h.output("RawMaterialStorage", "HandOutMaterial", "workpieceId").get<std::string>();

    CHECK(h.run("Transportation", "RequestCarrier", {}) == SkillState::Completed);
    CHECK(h.run("Transportation", "Transport",
                {{"workpieceId", wp}, {"from", "RawMaterialStorage"}, {"to", "Manufacturing"}}) ==
          SkillState::Completed);
    CHECK(h.run("Manufacturing", "Manufacture", {{"workpieceId", wp}, {"processingSpec", spec}}) ==
          SkillState::Completed);
    CHECK(h.output("Manufacturing", "Manufacture", "processedWorkpieceId") == json(wp));

    auto state = h.plant->snapshot();
    CHECK(state.storage_inventory.at("thermometerBase") == 2);
    CHECK(state.workpieces.at(wp).location == "Manufacturing");
    CHECK(state.workpieces.at(wp).processed);
    CHECK(state.carrier_at == "Manufacturing");
}

TEST_CASE("conservation: inventory decrements equal workpieces created") {
    std::mt19937 rng(5);
    PlantHarness h(4);
    int initial_inventory = 4;
    for (int i = 0; i < 60; ++i) {
        switch (rng() % 4) {
        case 0:
            h.run("RawMaterialStorage", "HandOutMaterial", {{"material", "thermometerBase"}});
            break;
        case 1:
            h.run("Transportation", "RequestCarrier", {});
            break;
        case 2: {
            std::string wp = "wp-" + std::to_string(1 + rng() % 6);
            h.run("Transportation", "Transport", {{"workpieceId", wp}});
            break;
        }
        default: {
            std::string wp = "wp-" + std::to_string(1 + rng() % 6);
            h.run("Manufacturing", "Manufacture", {{"workpieceId", wp}});
            break;
        }
        }
        auto state = h.plant->snapshot();
        int inventory = state.storage_inventory.at("thermometerBase");
        CHECK(inventory >= 0);
        CHECK(initial_inventory - inventory == static_cast<int>(state.workpieces.size()));
        for (const auto& [id, wp] : state.workpieces) {
            bool known_position =
                std::find(state.positions.begin(), state.positions.end(), wp.location) !=
                state.positions.end();
            CHECK(known_position);
        }
    }
}
