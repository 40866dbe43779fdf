#pragma once

#include <random>
#include <string>
#include <vector>

#include "skillforge/model.hpp"

namespace testutil {

// Structured random activities for generator/loader property tests: a chain
// of blocks (actions, signal pairs, parallel and exclusive sections) between
// Initial and Final, over names drawn from a hostile pool (unicode, spaces,
// punctuation). Every produced activity is structurally valid BPMN input.
class RandomActivityBuilder {
public:
    explicit RandomActivityBuilder(unsigned seed) : rng_(seed) {}

    // The model owns one role "R" with pinless functions fn0..fn(n-1); even
    // ones are deployment-bound so both ServiceTask and AbstractTask appear.
    skillforge::model::SystemGroupModel build_model(int function_count = 10) {
        using namespace skillforge::model;
        SystemGroupModel m;
        m.name = "Random";
        Role role;
        role.name = "R";
        for (int i = 0; i < function_count; ++i) {
            std::string name = weird_name("fn" + std::to_string(i));
            role.whitebox_functions.push_back({name, {}, {}, {}});
            if (i % 2 == 0)
                m.deployment.push_back({"R", name, "Skill" + std::to_string(i), "Mod",
                                        CommType::WebService, "generated test skill"});
        }
        m.roles.push_back(std::move(role));
        m.activities.push_back(build_activity(m));
        m.blackbox_functions.push_back({"F", std::nullopt, m.activities[0].name});
        m.goals.push_back({1, "G", std::nullopt, {"F"}, false});
        return m;
    }

private:
    std::mt19937 rng_;
    int next_id_ = 0;

    unsigned pick(unsigned bound) { return rng_() % bound; }

    std::string weird_name(const std::string& base) {
        static const char* decorations[] = {
            "",        " ",           "  zwei teile", " mit Umlaut \xc3\xa4\xc3\xb6",
            "-dash-",  ".dotted.",    "!bang",        " \xe6\xa9\x9f\xe6\xa2\xb0",
            "123",     "(parens)",    "+plus",        " a & b <c>",
            " \"quoted\"",
        };
        return base + decorations[pick(sizeof(decorations) / sizeof(decorations[0]))];
    }

    std::string fresh(const std::string& base) { return base + "_" + std::to_string(next_id_++); }

    skillforge::model::ActivityModel build_activity(const skillforge::model::SystemGroupModel& m) {
        using namespace skillforge::model;
        ActivityModel activity;
        activity.name = weird_name("activity");
        activity.partitions = {"R"};

        std::vector<Node>& nodes = activity.nodes;
        std::vector<Edge>& edges = activity.edges;
        nodes.push_back({fresh("init"), NodeKind::Initial, std::nullopt, std::nullopt, std::nullopt,
                         std::nullopt});
        std::string tail = nodes.back().id;
        auto link = [&](const std::string& from, const std::string& to,
                        std::optional<std::string> guard = std::nullopt) {
            edges.push_back({EdgeKind::ControlFlow, from, to, std::move(guard), std::nullopt});
        };
        auto add_action = [&]() {
            const auto& fns = m.roles[0].whitebox_functions;
            const std::string& fn = fns[pick(static_cast<unsigned>(fns.size()))].name;
            nodes.push_back({fresh("a"), NodeKind::Action, "R", FunctionRef{"R", fn}, std::nullopt,
                             std::nullopt});
            link(tail, nodes.back().id);
            tail = nodes.back().id;
        };

        int blocks = 1 + static_cast<int>(pick(5));
        for (int b = 0; b < blocks; ++b) {
            switch (pick(4)) {
            case 0:
                add_action();
                break;
            case 1: { // throw then catch of the same signal on the chain
                std::string signal = weird_name("sig");
                nodes.push_back({fresh("send"), NodeKind::SendSignal, "R", std::nullopt, signal,
                                 std::nullopt});
                link(tail, nodes.back().id);
                tail = nodes.back().id;
                nodes.push_back({fresh("accept"), NodeKind::AcceptSignal, "R", std::nullopt, signal,
                                 std::nullopt});
                link(tail, nodes.back().id);
                tail = nodes.back().id;
                break;
            }
            case 2: { // fork / two branches / join
                nodes.push_back({fresh("fork"), NodeKind::Fork, "R", std::nullopt, std::nullopt,
                                 std::nullopt});
                std::string fork = nodes.back().id;
                link(tail, fork);
                nodes.push_back({fresh("join"), NodeKind::Join, "R", std::nullopt, std::nullopt,
                                 std::nullopt});
                std::string join = nodes.back().id;
                for (int branch = 0; branch < 2; ++branch) {
                    const auto& fns = m.roles[0].whitebox_functions;
                    const std::string& fn = fns[pick(static_cast<unsigned>(fns.size()))].name;
                    nodes.push_back({fresh("b"), NodeKind::Action, "R", FunctionRef{"R", fn},
                                     std::nullopt, std::nullopt});
                    link(fork, nodes.back().id);
                    link(nodes.back().id, join);
                }
                tail = join;
                break;
            }
            default: { // decision with a guarded and a default path to a merge
                nodes.push_back({fresh("dec"), NodeKind::Decision, "R", std::nullopt, std::nullopt,
                                 std::nullopt});
                std::string decision = nodes.back().id;
                link(tail, decision);
                nodes.push_back({fresh("mrg"), NodeKind::Merge, "R", std::nullopt, std::nullopt,
                                 std::nullopt});
                std::string merge = nodes.back().id;
                link(decision, merge, "x > " + std::to_string(pick(10)));
                link(decision, merge);
                tail = merge;
                break;
            }
            }
        }
        nodes.push_back({fresh("fin"), NodeKind::Final, std::nullopt, std::nullopt, std::nullopt,
                         std::nullopt});
        link(tail, nodes.back().id);
        return activity;
    }
};

} // namespace testutil
