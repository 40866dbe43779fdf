#include <doctest.h>

#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "skillforge/skill_runtime.hpp"

using namespace skillforge;
using namespace skillforge::runtime;
using nlohmann::json;

namespace {

SkillDescriptor add_descriptor() {
    return {"MathModule",
            "AddSkill",
            CommInterface::OpcUa,
            {{"a", "number"}, {"b", "number"}},
            {{"sum", "number"}},
            "Adds two numbers and returns the sum"};
}

BehaviorMap add_behaviors() {
    BehaviorMap behaviors;
    behaviors[SkillState::Execute] = [](SkillContext& ctx) {
        double a = ctx.parameter("a").is_number() ? ctx.parameter("a").get<double>() : 0.0;
        double b = ctx.parameter("b").is_number() ? ctx.parameter("b").get<double>() : 0.0;
        ctx.set_output("sum", a + b);
    };
    return behaviors;
}

// Checks an observed state sequence against the transition table: every hop
// is either a legal command target or the acting state's auto successor.
void check_table_conformance(const std::vector<SkillState>& history) {
    for (std::size_t i = 0; i + 1 < history.size(); ++i) {
        SkillState from = history[i];
        SkillState to = history[i + 1];
        bool legal = is_acting(from) && auto_next(from) == to;
        for (int c = 0; !legal && c <= static_cast<int>(Command::Clear); ++c)
            legal = command_target(from, static_cast<Command>(c)) == to;
        CHECK_MESSAGE(legal, "illegal transition " << to_string(from) << " -> " << to_string(to));
    }
}

} // namespace

TEST_CASE("nominal walk: Idle -> ... -> Completed -> Reset -> Idle") {
    SkillInstance skill(add_descriptor(), add_behaviors());
    CHECK(skill.state() == SkillState::Idle);
    CHECK(skill.command(Command::Start) == SkillState::Completed);
    CHECK(skill.history() == std::vector<SkillState>{SkillState::Idle, SkillState::Starting,
                                                     SkillState::Execute, SkillState::Completing,
                                                     SkillState::Completed});
    CHECK(skill.command(Command::Reset) == SkillState::Idle);
}

TEST_CASE("illegal commands are rejected with state and command") {
    SkillInstance skill(add_descriptor(), {});
    try {
        skill.command(Command::Unhold);
        FAIL("expected CommandRejected");
    } catch (const CommandRejectedError& e) {
        CHECK(e.state == SkillState::Idle);
        CHECK(e.command == Command::Unhold);
    }
    CHECK(skill.command(Command::Start) == SkillState::Completed);
    CHECK_THROWS_AS(skill.command(Command::Start), CommandRejectedError);
}

TEST_CASE("parameters and outputs around the AddSkill lifecycle") {
    SkillInstance skill(add_descriptor(), add_behaviors());
    skill.set_parameter("a", 2);
    skill.set_parameter("b", 3);
    CHECK_THROWS_AS(skill.get_output("sum"), WrongStateError); // Idle: not readable yet
    CHECK(skill.command(Command::Start) == SkillState::Completed);
    CHECK(skill.get_output("sum") == json(5.0));

    CHECK_THROWS_AS(skill.set_parameter("c", 1), UnknownNameError);
    CHECK_THROWS_AS(skill.get_output("total"), UnknownNameError);
    CHECK_THROWS_AS(skill.set_parameter("a", "text"), TypeMismatchError);
    // Completed is a legal state for re-parameterization
    skill.set_parameter("a", 10.5);
}

TEST_CASE("declared but unset outputs read as the type's neutral value") {
    SkillInstance skill(add_descriptor(), {});
    skill.command(Command::Start);
    CHECK(skill.get_output("sum") == json(0.0));
}

TEST_CASE("stop and abort paths settle and recover") {
    SkillInstance skill(add_descriptor(), {});
    CHECK(skill.command(Command::Stop) == SkillState::Stopped);
    CHECK(skill.command(Command::Reset) == SkillState::Idle);
    CHECK(skill.command(Command::Abort) == SkillState::Aborted);
    CHECK(skill.command(Command::Clear) == SkillState::Stopped);
    CHECK(skill.command(Command::Reset) == SkillState::Idle);
}

TEST_CASE("behavior exception is equivalent to self-abort") {
    BehaviorMap behaviors;
    behaviors[SkillState::Execute] = [](SkillContext&) { throw std::runtime_error("boom"); };
    SkillInstance skill(add_descriptor(), behaviors);
    CHECK(skill.command(Command::Start) == SkillState::Aborted);
    CHECK(skill.last_error() == "boom");
    check_table_conformance(skill.history());
}

TEST_CASE("BehaviorAbort drives the machine to Aborted with the reason recorded") {
    BehaviorMap behaviors;
    behaviors[SkillState::Execute] = [](SkillContext&) { throw BehaviorAbort("OutOfStock"); };
    SkillInstance skill(add_descriptor(), behaviors);
    CHECK(skill.command(Command::Start) == SkillState::Aborted);
    CHECK(skill.last_error() == "OutOfStock");
}

TEST_CASE("an exception while aborting still settles in Aborted") {
    BehaviorMap behaviors;
    behaviors[SkillState::Execute] = [](SkillContext&) { throw BehaviorAbort("first"); };
    behaviors[SkillState::Aborting] = [](SkillContext&) { throw std::runtime_error("second"); };
    SkillInstance skill(add_descriptor(), behaviors);
    CHECK(skill.command(Command::Start) == SkillState::Aborted);
}

TEST_CASE("a command injected mid-execute intercepts the chain") {
    std::atomic<bool> entered{false};
    std::atomic<bool> release{false};
    BehaviorMap behaviors;
    behaviors[SkillState::Execute] = [&](SkillContext&) {
        entered = true;
        while (!release)
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
    };
    SkillInstance skill(add_descriptor(), behaviors);

    std::thread starter([&] { skill.command(Command::Start); });
    while (!entered)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    CHECK(skill.state() == SkillState::Execute);
    CHECK_THROWS_AS(skill.get_output("sum"), WrongStateError);
    CHECK_THROWS_AS(skill.set_parameter("a", 1), WrongStateError);

    std::thread aborter([&] { CHECK(skill.command(Command::Abort) == SkillState::Aborted); });
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    release = true;
    starter.join();
    aborter.join();
    CHECK(skill.state() == SkillState::Aborted);
    check_table_conformance(skill.history());
}

TEST_CASE("hold request during execute settles in Held, unhold resumes") {
    std::atomic<int> runs{0};
    std::atomic<bool> release{false};
    BehaviorMap behaviors;
    behaviors[SkillState::Execute] = [&](SkillContext& ctx) {
        if (runs++ == 0) {
            while (!release && !ctx.abort_requested())
                std::this_thread::sleep_for(std::chrono::milliseconds(1));
        }
    };
    SkillInstance skill(add_descriptor(), behaviors);
    std::thread starter([&] { skill.command(Command::Start); });
    while (runs == 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    std::thread holder([&] { CHECK(skill.command(Command::Hold) == SkillState::Held); });
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    release = true;
    starter.join();
    holder.join();
    CHECK(skill.state() == SkillState::Held);
    // resume: Unholding re-enters Execute, which completes on the second run
    CHECK(skill.command(Command::Unhold) == SkillState::Completed);
    check_table_conformance(skill.history());
}

TEST_CASE("fuzz: random command sequences stay inside the table") {
    std::mt19937 rng(2024);
    SkillInstance skill(add_descriptor(), add_behaviors());
    int accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        auto cmd = static_cast<Command>(rng() % 9);
        try {
            SkillState settled = skill.command(cmd);
            CHECK(!is_acting(settled));
            ++accepted;
        } catch (const CommandRejectedError&) {
        }
    }
    CHECK(accepted > 0);
    auto history = skill.history();
    for (SkillState s : history)
        CHECK(static_cast<int>(s) < kSkillStateCount);
    check_table_conformance(history);
}

TEST_CASE("abort dominance from every eligible state") {
    for (int i = 0; i < kSkillStateCount; ++i) {
        auto state = static_cast<SkillState>(i);
        auto target = command_target(state, Command::Abort);
        if (state == SkillState::Aborting || state == SkillState::Aborted ||
            state == SkillState::Clearing) {
            CHECK(!target.has_value());
        } else {
            REQUIRE(target.has_value());
            CHECK(*target == SkillState::Aborting);
            CHECK(auto_next(*target) == SkillState::Aborted);
        }
    }
}

TEST_CASE("registry: registration order, duplicates, lookup") {
    SkillRegistry registry;
    registry.register_skill(add_descriptor(), add_behaviors());
    CHECK_THROWS_AS(registry.register_skill(add_descriptor()), DuplicateSkillError);

    for (int i = 0; i < 4; ++i) {
        SkillDescriptor d = add_descriptor();
        d.skill_name = "Skill" + std::to_string(i);
        registry.register_skill(d);
    }
    auto skills = registry.list();
    REQUIRE(skills.size() == 5);
    CHECK(skills[0]->descriptor().skill_name == "AddSkill");
    CHECK(skills[4]->descriptor().skill_name == "Skill3");
    CHECK(skills[0]->descriptor().parameters.size() == 2);
    CHECK(skills[0]->descriptor().outputs.size() == 1);

    CHECK(registry.find("MathModule", "AddSkill") != nullptr);
    CHECK(registry.find("MathModule", "Missing") == nullptr);
    CHECK_THROWS_AS(registry.require("MathModule", "Missing"), UnknownSkillError);
}
