#include <doctest.h>

#include <algorithm>
#include <random>

#include "skillforge/bpmn_gen.hpp"
#include "skillforge/engine.hpp"
#include "skillforge/plant.hpp"
#include "skillforge/transforms.hpp"
#include "skillforge/xml.hpp"
#include "test_util.hpp"

using namespace skillforge;
using namespace skillforge::bpmn;
using namespace skillforge::engine;
using nlohmann::json;

namespace {

runtime::SkillDescriptor add_descriptor() {
    return {"MathModule",
            "AddSkill",
            runtime::CommInterface::WebService,
            {{"a", "number"}, {"b", "number"}},
            {{"sum", "number"}},
            "Adds two numbers and returns the sum"};
}

runtime::BehaviorMap add_behaviors() {
    runtime::BehaviorMap behaviors;
    behaviors[runtime::SkillState::Execute] = [](runtime::SkillContext& ctx) {
        double a = ctx.parameter("a").is_number() ? ctx.parameter("a").get<double>() : 0.0;
        double b = ctx.parameter("b").is_number() ? ctx.parameter("b").get<double>() : 0.0;
        ctx.set_output("sum", a + b);
    };
    return behaviors;
}

struct AddHarness {
    runtime::SkillRegistry registry;
    EmbeddedSkillPort port{registry};
    Engine engine{port};

    AddHarness() { registry.register_skill(add_descriptor(), add_behaviors()); }
};

struct PlantHarness {
    std::shared_ptr<runtime::SharedPlant> plant;
    runtime::SkillRegistry registry;
    EmbeddedSkillPort port{registry};
    Engine engine{port};

    explicit PlantHarness(int inventory) : plant(runtime::make_lab_plant(inventory)) {
        runtime::register_plant_skills(registry, plant);
    }
};

std::string labplant_xml() {
    auto m = model::signalize(model::derive_ports(testutil::load_labplant()));
    return serialize_bpmn(generate_bpmn(m, "Manufacture Product"));
}

BpmnElement event(const std::string& id, ElementKind kind) {
    BpmnElement e;
    e.id = id;
    e.kind = kind;
    return e;
}

SequenceFlow flow(const std::string& id, const std::string& source, const std::string& target) {
    SequenceFlow f;
    f.id = id;
    f.source = source;
    f.target = target;
    return f;
}

} // namespace

TEST_CASE("condition grammar: parse and evaluate") {
    CompiledCondition c = parse_condition("x > 3");
    CHECK(c.variable == "x");
    CHECK(evaluate_condition(c, {{"x", json(5)}}));
    CHECK_FALSE(evaluate_condition(c, {{"x", json(2)}}));
    CHECK_FALSE(evaluate_condition(c, {{"x", json("five")}})); // type mismatch is false
    CHECK_FALSE(evaluate_condition(c, {}));                    // undefined variable is false

    CHECK(evaluate_condition(parse_condition("name == \"carrier\""), {{"name", json("carrier")}}));
    CHECK(evaluate_condition(parse_condition("ok != false"), {{"ok", json(true)}}));
    CHECK(evaluate_condition(parse_condition("n <= 2.5"), {{"n", json(2.5)}}));
    CHECK_FALSE(evaluate_condition(parse_condition("ok < true"), {{"ok", json(false)}}));

    CHECK_THROWS_AS(parse_condition("x >"), StructuralError);
    CHECK_THROWS_AS(parse_condition("> 3"), StructuralError);
    CHECK_THROWS_AS(parse_condition("x is 3"), StructuralError);
    CHECK_THROWS_AS(parse_condition("x == [1]"), StructuralError);
}

TEST_CASE("loads the generator's minimal chain output") {
    auto doc = generate_bpmn(testutil::load_addskill(), "Add Numbers");
    auto definition = load_process(serialize_bpmn(doc));
    CHECK(definition->document.elements.size() == 3);
    CHECK(definition->document == doc);
}

TEST_CASE("hand-edited chain: run with variables, outputs land in variables") {
    AddHarness h;
    auto definition = load_process(testutil::read_file(testutil::fixture_path("addskill_chain.bpmn")));
    auto instance = h.engine.start_instance(definition, {{"a", json(2)}, {"b", json(3)}});
    CHECK(instance->status == InstanceStatus::Completed);
    CHECK(instance->variables.at("add_sum") == json(5.0));

    REQUIRE(instance->trace.size() == 3);
    CHECK(instance->trace[0].kind == "startEvent");
    CHECK(instance->trace[1].kind == "serviceTask");
    CHECK(instance->trace[1].detail["skill"] == "AddSkill");
    CHECK(instance->trace[1].detail["settled"] == "Completed");
    CHECK(instance->trace[2].kind == "endEvent");
}

TEST_CASE("unsupported BPMN elements are rejected by name") {
    std::string xml = R"(<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d" targetNamespace="urn:x">
  <process id="p" isExecutable="true">
    <startEvent id="s"/>
    <intermediateCatchEvent id="t"><timerEventDefinition id="td"/></intermediateCatchEvent>
    <userTask id="u"/>
    <endEvent id="e"/>
    <sequenceFlow id="f1" sourceRef="s" targetRef="t"/>
    <sequenceFlow id="f2" sourceRef="t" targetRef="u"/>
    <sequenceFlow id="f3" sourceRef="u" targetRef="e"/>
  </process>
</definitions>
)";
    try {
        load_process(xml);
        FAIL("expected UnsupportedElement");
    } catch (const UnsupportedElementError& e) {
        CHECK(std::find(e.names.begin(), e.names.end(), "timerEventDefinition") != e.names.end());
        CHECK(std::find(e.names.begin(), e.names.end(), "userTask") != e.names.end());
    }
}

TEST_CASE("malformed XML raises XmlError") {
    CHECK_THROWS_AS(load_process("<definitions><process id="), skillforge::xml::XmlError);
}

TEST_CASE("structural checks") {
    BpmnDocument doc;
    doc.process_id = "p";

    SUBCASE("no start event") {
        doc.elements = {event("e", ElementKind::EndEvent)};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
    SUBCASE("two start events") {
        doc.elements = {event("s1", ElementKind::StartEvent), event("s2", ElementKind::StartEvent)};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
    SUBCASE("dangling flow") {
        doc.elements = {event("s", ElementKind::StartEvent), event("e", ElementKind::EndEvent)};
        doc.flows = {flow("f", "s", "ghost")};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
    SUBCASE("duplicate id") {
        doc.elements = {event("s", ElementKind::StartEvent), event("s", ElementKind::EndEvent)};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
    SUBCASE("invalid NCName id") {
        doc.elements = {event("1bad", ElementKind::StartEvent)};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
    SUBCASE("unreachable element") {
        doc.elements = {event("s", ElementKind::StartEvent), event("e", ElementKind::EndEvent),
                        event("island", ElementKind::AbstractTask)};
        doc.flows = {flow("f", "s", "e")};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
    SUBCASE("condition on a non-gateway flow") {
        doc.elements = {event("s", ElementKind::StartEvent), event("e", ElementKind::EndEvent)};
        SequenceFlow f = flow("f", "s", "e");
        f.condition = "x > 1";
        doc.flows = {f};
        CHECK_THROWS_AS(compile_document(doc), StructuralError);
    }
}

TEST_CASE("labplant process loads with 4 lanes") {
    auto definition = load_process(labplant_xml());
    CHECK(definition->document.lanes.size() == 4);
}

TEST_CASE("parallel fork and join: join fires exactly once") {
    AddHarness h;
    BpmnDocument doc;
    doc.process_id = "p";
    doc.elements = {event("a_start", ElementKind::StartEvent),
                    event("fork", ElementKind::ParallelGateway),
                    event("t1", ElementKind::AbstractTask),
                    event("t2", ElementKind::AbstractTask),
                    event("join", ElementKind::ParallelGateway),
                    event("z_end", ElementKind::EndEvent)};
    doc.flows = {flow("f1", "a_start", "fork"), flow("f2", "fork", "t1"), flow("f3", "fork", "t2"),
                 flow("f4", "t1", "join"),      flow("f5", "t2", "join"), flow("f6", "join", "z_end")};
    auto instance = h.engine.start_instance(compile_document(doc), {});
    CHECK(instance->status == InstanceStatus::Completed);
    int joins = 0, ends = 0;
    for (const auto& e : instance->trace) {
        joins += e.element_id == "join";
        ends += e.kind == "endEvent";
    }
    CHECK(joins == 1);
    CHECK(ends == 1);
}

TEST_CASE("exclusive gateway takes the first true condition, else default") {
    AddHarness h;
    BpmnDocument doc;
    doc.process_id = "p";
    doc.elements = {event("a_start", ElementKind::StartEvent),
                    event("gate", ElementKind::ExclusiveGateway),
                    event("high", ElementKind::AbstractTask),
                    event("low", ElementKind::AbstractTask),
                    event("merge", ElementKind::ExclusiveGateway),
                    event("z_end", ElementKind::EndEvent)};
    SequenceFlow guarded = flow("g1", "gate", "high");
    guarded.condition = "x > 3";
    SequenceFlow fallback = flow("g2", "gate", "low");
    fallback.is_default = true;
    doc.flows = {flow("f1", "a_start", "gate"), guarded, fallback,
                 flow("f2", "high", "merge"),   flow("f3", "low", "merge"),
                 flow("f4", "merge", "z_end")};

    auto run_with = [&](json x) {
        auto instance = h.engine.start_instance(compile_document(doc), {{"x", std::move(x)}});
        REQUIRE(instance->status == InstanceStatus::Completed);
        for (const auto& e : instance->trace)
            if (e.kind == "task")
                return e.element_id;
        return std::string();
    };
    CHECK(run_with(json(5)) == "high");
    CHECK(run_with(json(1)) == "low");
    CHECK(run_with(json("not a number")) == "low");
}

TEST_CASE("exclusive gateway with no satisfied condition and no default fails with DEADLOCK") {
    AddHarness h;
    BpmnDocument doc;
    doc.process_id = "p";
    doc.elements = {event("a_start", ElementKind::StartEvent),
                    event("gate", ElementKind::ExclusiveGateway),
                    event("t", ElementKind::AbstractTask), event("z_end", ElementKind::EndEvent)};
    SequenceFlow guarded = flow("g1", "gate", "t");
    guarded.condition = "x > 3";
    doc.flows = {flow("f1", "a_start", "gate"), guarded, flow("f2", "t", "z_end")};
    auto instance = h.engine.start_instance(compile_document(doc), {{"x", json(0)}});
    CHECK(instance->status == InstanceStatus::Failed);
    CHECK(instance->error_code == "DEADLOCK");
}

TEST_CASE("signal catch waits for its throw on the other branch") {
    AddHarness h;
    // fork -> (catch || task -> throw) -> join; ids force the catch to be
    // scheduled first, so it must wait for the throw.
    model::SystemGroupModel m = testutil::load_addskill();
    model::ActivityModel activity;
    activity.name = "Signals";
    activity.partitions = {"Calculator"};
    auto n = [&](const char* id, model::NodeKind kind) {
        model::Node node;
        node.id = id;
        node.kind = kind;
        node.partition = "Calculator";
        return node;
    };
    model::Node initial = n("initial", model::NodeKind::Initial);
    model::Node fin = n("final", model::NodeKind::Final);
    model::Node catch_node = n("aa_catch", model::NodeKind::AcceptSignal);
    catch_node.signal_name = "go";
    model::Node throw_node = n("zz_throw", model::NodeKind::SendSignal);
    throw_node.signal_name = "go";
    model::Node task = n("zz_task", model::NodeKind::Action);
    task.function_ref = model::FunctionRef{"Calculator", "Add"};
    activity.nodes = {initial, n("fork", model::NodeKind::Fork), catch_node, throw_node,
                      task,    n("join", model::NodeKind::Join), fin};
    auto cf = [](const char* s, const char* t) {
        return model::Edge{model::EdgeKind::ControlFlow, s, t, std::nullopt, std::nullopt};
    };
    activity.edges = {cf("initial", "fork"), cf("fork", "aa_catch"), cf("fork", "zz_task"),
                      cf("zz_task", "zz_throw"), cf("aa_catch", "join"), cf("zz_throw", "join"),
                      cf("join", "final")};
    m.activities.push_back(activity);

    auto definition = load_process(serialize_bpmn(generate_bpmn(m, "Signals")));
    auto instance = h.engine.start_instance(definition, {});
    REQUIRE(instance->status == InstanceStatus::Completed);

    // the catch fires strictly after the throw
    std::size_t catch_seq = 0, throw_seq = 0;
    for (const auto& e : instance->trace) {
        if (e.kind == "signalCatch")
            catch_seq = e.seq;
        if (e.kind == "signalThrow")
            throw_seq = e.seq;
    }
    CHECK(throw_seq < catch_seq);
}

TEST_CASE("service task re-arms a Completed skill with Reset") {
    AddHarness h;
    auto definition = load_process(testutil::read_file(testutil::fixture_path("addskill_chain.bpmn")));
    auto first = h.engine.start_instance(definition, {{"a", json(1)}, {"b", json(1)}});
    CHECK(first->status == InstanceStatus::Completed);
    // skill is now Completed; the second instance must reset it first
    auto second = h.engine.start_instance(definition, {{"a", json(2)}, {"b", json(5)}});
    CHECK(second->status == InstanceStatus::Completed);
    CHECK(second->variables.at("add_sum") == json(7.0));
}

TEST_CASE("unresolved skill fails before any token moves") {
    runtime::SkillRegistry registry;
    EmbeddedSkillPort port(registry);
    Engine engine(port);
    auto definition = load_process(testutil::read_file(testutil::fixture_path("addskill_chain.bpmn")));
    CHECK_THROWS_AS(engine.start_instance(definition, {}), UnresolvedSkillError);
}

TEST_CASE("undefined variable reference fails the instance") {
    AddHarness h;
    auto definition = load_process(testutil::read_file(testutil::fixture_path("addskill_chain.bpmn")));
    auto instance = h.engine.start_instance(definition, {{"a", json(2)}}); // b missing
    CHECK(instance->status == InstanceStatus::Failed);
    CHECK(instance->error_code == "MISSING_VARIABLE");
}

TEST_CASE("skill abort without a boundary event fails the instance") {
    PlantHarness h(0); // empty inventory
    auto instance = h.engine.start_instance(load_process(labplant_xml()), {});
    CHECK(instance->status == InstanceStatus::Failed);
    CHECK(instance->error_code == "SKILL_ABORTED");
    REQUIRE(!instance->trace.empty());
    CHECK(instance->trace.back().kind == "error"); // last event is the error raise
    CHECK(instance->trace.back().detail["code"] == "SKILL_ABORTED");
}

TEST_CASE("boundary error event routes to the recovery branch") {
    PlantHarness h(0);
    BpmnDocument doc = generate_bpmn(
        model::signalize(model::derive_ports(testutil::load_labplant())), "Manufacture Product");

    std::string task_id;
    for (const auto& e : doc.elements)
        if (e.skill.name == "HandOutMaterial")
            task_id = e.id;
    REQUIRE(!task_id.empty());

    BpmnElement boundary = event("onShortage", ElementKind::BoundaryErrorEvent);
    boundary.attached_to = task_id;

    SUBCASE("matching error code completes via the recovery branch") {
        boundary.error_code = "SKILL_ABORTED";
        doc.elements.push_back(boundary);
        doc.elements.push_back(event("recovered", ElementKind::EndEvent));
        doc.flows.push_back(flow("recover", "onShortage", "recovered"));
        auto instance = h.engine.start_instance(load_process(serialize_bpmn(doc)), {});
        CHECK(instance->status == InstanceStatus::Completed);
        bool boundary_fired = false;
        for (const auto& e : instance->trace)
            boundary_fired |= e.element_id == "onShortage";
        CHECK(boundary_fired);
    }
    SUBCASE("unset error code matches any error") {
        doc.elements.push_back(boundary);
        doc.elements.push_back(event("recovered", ElementKind::EndEvent));
        doc.flows.push_back(flow("recover", "onShortage", "recovered"));
        auto instance = h.engine.start_instance(load_process(serialize_bpmn(doc)), {});
        CHECK(instance->status == InstanceStatus::Completed);
    }
    SUBCASE("mismatched error code does not match") {
        boundary.error_code = "OTHER";
        doc.elements.push_back(boundary);
        doc.elements.push_back(event("recovered", ElementKind::EndEvent));
        doc.flows.push_back(flow("recover", "onShortage", "recovered"));
        auto instance = h.engine.start_instance(load_process(serialize_bpmn(doc)), {});
        CHECK(instance->status == InstanceStatus::Failed);
        CHECK(instance->error_code == "SKILL_ABORTED");
    }
}

TEST_CASE("labplant end-to-end: five service tasks in order, plant updated") {
    PlantHarness h(3);
    auto instance = h.engine.start_instance(load_process(labplant_xml()), {});
    REQUIRE(instance->status == InstanceStatus::Completed);
    CHECK(instance->service_task_sequence() ==
          std::vector<std::string>{"ReleaseOrder", "HandOutMaterial", "RequestCarrier", "Transport",
                                   "Manufacture"});
    auto plant = h.plant->snapshot();
    CHECK(plant.storage_inventory.at("thermometerBase") == 2);
    REQUIRE(plant.workpieces.contains("wp-1"));
    CHECK(plant.workpieces.at("wp-1").processed);

    // deterministic scheduling: a second run yields the same element order
    PlantHarness h2(3);
    auto second = h2.engine.start_instance(load_process(labplant_xml()), {});
    REQUIRE(second->trace.size() == instance->trace.size());
    for (std::size_t i = 0; i < second->trace.size(); ++i) {
        CHECK(second->trace[i].element_id == instance->trace[i].element_id);
        CHECK(second->trace[i].kind == instance->trace[i].kind);
    }
    // trace completeness: every element id in the trace exists
    for (const auto& e : instance->trace)
        if (!e.element_id.empty())
            CHECK(instance->definition->element_index.contains(e.element_id));
}

TEST_CASE("literal parameter bindings round-trip and execute") {
    AddHarness h;
    BpmnDocument doc;
    doc.process_id = "p";
    BpmnElement task = event("m_add", ElementKind::ServiceTask);
    task.skill = {"MathModule", "AddSkill"};
    task.parameters.push_back({"a", std::nullopt, json(40)});
    task.parameters.push_back({"b", std::nullopt, json(2.5)});
    task.outputs.push_back({"sum", "total"});
    doc.elements = {event("a_start", ElementKind::StartEvent), task,
                    event("z_end", ElementKind::EndEvent)};
    doc.flows = {flow("f1", "a_start", "m_add"), flow("f2", "m_add", "z_end")};

    std::string xml_text = serialize_bpmn(doc);
    auto definition = load_process(xml_text);
    CHECK(definition->document == doc); // literals survive serialization

    auto instance = h.engine.start_instance(definition, {});
    REQUIRE(instance->status == InstanceStatus::Completed);
    CHECK(instance->variables.at("total") == json(42.5));
}

TEST_CASE("string literal values keep their JSON encoding") {
    BpmnDocument doc;
    doc.process_id = "p";
    BpmnElement task = event("m_task", ElementKind::ServiceTask);
    task.skill = {"Mod", "Skill"};
    task.parameters.push_back({"text", std::nullopt, json("with \"quotes\" & <brackets>")});
    doc.elements = {event("a_start", ElementKind::StartEvent), task,
                    event("z_end", ElementKind::EndEvent)};
    doc.flows = {flow("f1", "a_start", "m_task"), flow("f2", "m_task", "z_end")};
    auto definition = load_process(serialize_bpmn(doc));
    CHECK(definition->document == doc);
}

TEST_CASE("loader survives mutilated documents with structured errors") {
    std::string intact = labplant_xml();
    std::mt19937 rng(31);
    for (int round = 0; round < 200; ++round) {
        std::string mutated = intact;
        switch (rng() % 3) {
        case 0: // truncate
            mutated.resize(rng() % mutated.size());
            break;
        case 1: // flip a byte
            mutated[rng() % mutated.size()] = static_cast<char>(rng() % 256);
            break;
        default: // splice a chunk out
        {
            std::size_t at = rng() % mutated.size();
            std::size_t len = rng() % 64;
            mutated.erase(at, len);
            break;
        }
        }
        try {
            (void)load_process(mutated);
        } catch (const Error&) {
            // structured diagnostics only; anything else fails the test
        }
    }
}

TEST_CASE("trace events serialize as JSON lines") {
    AddHarness h;
    auto definition = load_process(testutil::read_file(testutil::fixture_path("addskill_chain.bpmn")));
    auto instance = h.engine.start_instance(definition, {{"a", json(2)}, {"b", json(3)}});
    for (const auto& event : instance->trace) {
        json line = to_json(event);
        CHECK(line.contains("seq"));
        CHECK(line.contains("element"));
        CHECK(line.contains("kind"));
    }
}
