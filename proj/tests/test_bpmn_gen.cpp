#include <doctest.h>

#include <map>
#include <set>

#include "skillforge/bpmn_gen.hpp"
#include "skillforge/engine.hpp"
#include "skillforge/identifiers.hpp"
#include "skillforge/transforms.hpp"
#include "random_activity.hpp"
#include "test_util.hpp"

using namespace skillforge;
using namespace skillforge::bpmn;
using namespace skillforge::model;

namespace {

std::map<ElementKind, int> kind_counts(const BpmnDocument& doc) {
    std::map<ElementKind, int> counts;
    for (const auto& e : doc.elements)
        counts[e.kind] += 1;
    return counts;
}

BpmnDocument labplant_doc() {
    SystemGroupModel m = signalize(derive_ports(testutil::load_labplant()));
    return generate_bpmn(m, "Manufacture Product");
}

// Every node kind exactly once, forming a single valid flow.
SystemGroupModel all_kinds_model() {
    SystemGroupModel m = testutil::load_addskill();
    ActivityModel activity;
    activity.name = "AllKinds";
    activity.partitions = {"Calculator"};
    auto node = [&](const char* id, NodeKind kind) {
        Node n;
        n.id = id;
        n.kind = kind;
        n.partition = "Calculator";
        return n;
    };
    Node action = node("add", NodeKind::Action);
    action.function_ref = FunctionRef{"Calculator", "Add"};
    Node send = node("send", NodeKind::SendSignal);
    send.signal_name = "ping";
    Node accept = node("accept", NodeKind::AcceptSignal);
    accept.signal_name = "ping";
    Node initial = node("initial", NodeKind::Initial);
    initial.partition.reset();
    Node fin = node("final", NodeKind::Final);
    fin.partition.reset();
    activity.nodes = {initial,
                      action,
                      node("fork", NodeKind::Fork),
                      send,
                      accept,
                      node("join", NodeKind::Join),
                      node("decision", NodeKind::Decision),
                      node("merge", NodeKind::Merge),
                      fin};
    auto cf = [](const char* s, const char* t, std::optional<std::string> guard = std::nullopt) {
        return Edge{EdgeKind::ControlFlow, s, t, std::move(guard), std::nullopt};
    };
    activity.edges = {cf("initial", "add"),
                      cf("add", "fork"),
                      cf("fork", "send"),
                      cf("fork", "accept"),
                      cf("send", "join"),
                      cf("accept", "join"),
                      cf("join", "decision"),
                      cf("decision", "merge", "x > 3"),
                      cf("decision", "merge"),
                      cf("merge", "final")};
    m.activities.push_back(std::move(activity));
    return m;
}

} // namespace

TEST_CASE("minimal chain maps to start, one service task, end") {
    BpmnDocument doc = generate_bpmn(testutil::load_addskill(), "Add Numbers");
    REQUIRE(doc.elements.size() == 3);
    CHECK(doc.elements[0].kind == ElementKind::StartEvent);
    CHECK(doc.elements[1].kind == ElementKind::ServiceTask);
    CHECK(doc.elements[1].skill == SkillRef{"MathModule", "AddSkill"});
    CHECK(doc.elements[2].kind == ElementKind::EndEvent);
    CHECK(doc.flows.size() == 2);
    // unconnected input pins stay unbound; outputs always bind
    CHECK(doc.elements[1].parameters.empty());
    REQUIRE(doc.elements[1].outputs.size() == 1);
    CHECK(doc.elements[1].outputs[0].variable == "add_sum");
}

TEST_CASE("unknown activity raises UnknownActivity") {
    CHECK_THROWS_AS(generate_bpmn(testutil::load_addskill(), "Nope"), UnknownActivityError);
}

TEST_CASE("labplant process: lanes, task order and bindings") {
    BpmnDocument doc = labplant_doc();

    REQUIRE(doc.lanes.size() == 4);
    CHECK(doc.lanes[0].role == "OrderManagement");
    CHECK(doc.lanes[1].role == "RawMaterialStation");
    CHECK(doc.lanes[2].role == "Transportation");
    CHECK(doc.lanes[3].role == "Manufacturing");

    std::vector<std::string> service_tasks;
    for (const auto& e : doc.elements)
        if (e.kind == ElementKind::ServiceTask)
            service_tasks.push_back(e.skill.name);
    CHECK(service_tasks == std::vector<std::string>{"ReleaseOrder", "HandOutMaterial", "RequestCarrier",
                                                    "Transport", "Manufacture"});
    CHECK(kind_counts(doc)[ElementKind::AbstractTask] == 2);

    // data wiring: HandOutMaterial.material comes from ReleaseOrder's output
    const BpmnElement* hand_out = nullptr;
    for (const auto& e : doc.elements)
        if (e.skill.name == "HandOutMaterial")
            hand_out = &e;
    REQUIRE(hand_out != nullptr);
    REQUIRE(hand_out->parameters.size() == 1);
    CHECK(hand_out->parameters[0].name == "material");
    CHECK(hand_out->parameters[0].variable == "releaseOrder_material");

    const BpmnElement* manufacture = nullptr;
    for (const auto& e : doc.elements)
        if (e.skill.name == "Manufacture")
            manufacture = &e;
    REQUIRE(manufacture != nullptr);
    std::map<std::string, std::string> params;
    for (const auto& p : manufacture->parameters)
        params[p.name] = p.variable.value_or("");
    CHECK(params["workpieceId"] == "handOutMaterial_workpieceId");
    CHECK(params["processingSpec"] == "releaseOrder_processingSpec");
}

TEST_CASE("every service task's skillRef resolves against the deployment") {
    SystemGroupModel m = signalize(derive_ports(testutil::load_labplant()));
    BpmnDocument doc = generate_bpmn(m, "Manufacture Product");
    for (const auto& e : doc.elements) {
        if (e.kind != ElementKind::ServiceTask)
            continue;
        bool resolves = false;
        for (const auto& b : m.deployment)
            resolves |= b.module_name == e.skill.module && b.skill_interface_name == e.skill.name;
        CHECK_MESSAGE(resolves, "unresolved skillRef " << e.skill.module << "/" << e.skill.name);
    }
}

TEST_CASE("element-count conservation") {
    SystemGroupModel m = signalize(derive_ports(testutil::load_labplant()));
    const ActivityModel& activity = *m.find_activity("Manufacture Product");
    BpmnDocument doc = generate_bpmn(m, "Manufacture Product");
    CHECK(doc.elements.size() == activity.nodes.size());
    std::size_t control_flows = 0;
    for (const auto& edge : activity.edges)
        control_flows += edge.kind == EdgeKind::ControlFlow;
    CHECK(doc.flows.size() == control_flows);
}

TEST_CASE("mapping table covers every node kind") {
    BpmnDocument doc = generate_bpmn(all_kinds_model(), "AllKinds");
    auto counts = kind_counts(doc);
    CHECK(counts[ElementKind::StartEvent] == 1);
    CHECK(counts[ElementKind::EndEvent] == 1);
    CHECK(counts[ElementKind::ServiceTask] == 1);
    CHECK(counts[ElementKind::ParallelGateway] == 2); // Fork and Join
    CHECK(counts[ElementKind::ExclusiveGateway] == 2); // Decision and Merge
    CHECK(counts[ElementKind::SignalThrowEvent] == 1);
    CHECK(counts[ElementKind::SignalCatchEvent] == 1);
    CHECK(doc.elements.size() == 9);

    // guards become conditions; the unguarded decision flow becomes default
    const SequenceFlow* guarded = nullptr;
    const SequenceFlow* fallback = nullptr;
    for (const auto& flow : doc.flows) {
        if (flow.condition)
            guarded = &flow;
        if (flow.is_default)
            fallback = &flow;
    }
    REQUIRE(guarded != nullptr);
    CHECK(*guarded->condition == "x > 3");
    REQUIRE(fallback != nullptr);
    CHECK(fallback->source == guarded->source);
}

TEST_CASE("an action without a binding becomes an abstract task") {
    SystemGroupModel m = testutil::load_addskill();
    m.deployment.clear();
    BpmnDocument doc = generate_bpmn(m, "Add Numbers");
    CHECK(doc.elements[1].kind == ElementKind::AbstractTask);
    CHECK(doc.elements[1].name == "Add");
}

TEST_CASE("guard on a flow that does not leave a decision is rejected") {
    SystemGroupModel m = testutil::load_addskill();
    m.activities[0].edges[0].guard = "x > 1";
    CHECK_THROWS_AS(generate_bpmn(m, "Add Numbers"), UnmappableNodeError);
}

TEST_CASE("serialization is deterministic and the chain has exactly one serviceTask") {
    BpmnDocument doc = generate_bpmn(testutil::load_addskill(), "Add Numbers");
    std::string xml = serialize_bpmn(doc);
    CHECK(serialize_bpmn(doc) == xml);
    CHECK(xml.find("<serviceTask") != std::string::npos);
    CHECK(xml.find("<serviceTask", xml.find("<serviceTask") + 1) == std::string::npos);
    CHECK(xml.find("http://www.omg.org/spec/BPMN/20100524/MODEL") != std::string::npos);
    CHECK(xml.find("urn:skillforge:bpmn:1") != std::string::npos);
    CHECK(xml.find("isExecutable=\"true\"") != std::string::npos);
}

TEST_CASE("generator output reloads structurally equal (labplant)") {
    BpmnDocument doc = labplant_doc();
    auto definition = engine::load_process(serialize_bpmn(doc));
    CHECK(definition->document == doc);
}

TEST_CASE("labplant process XML matches the frozen golden file") {
    CHECK(serialize_bpmn(labplant_doc()) ==
          testutil::read_file(testutil::golden_path("manufacture_product.bpmn")));
}

TEST_CASE("generated ids are NCNames and globally unique under hostile names") {
    for (unsigned seed = 1; seed <= 25; ++seed) {
        testutil::RandomActivityBuilder builder(seed);
        SystemGroupModel m = builder.build_model();
        BpmnDocument doc = generate_bpmn(m, m.activities[0].name);
        std::set<std::string> seen;
        for (const auto& e : doc.elements) {
            CHECK_MESSAGE(is_valid_ncname(e.id), "bad id: " << e.id);
            CHECK_MESSAGE(seen.insert(e.id).second, "duplicate id: " << e.id);
        }
        for (const auto& f : doc.flows) {
            CHECK(is_valid_ncname(f.id));
            CHECK_MESSAGE(seen.insert(f.id).second, "duplicate id: " << f.id);
        }
        for (const auto& lane : doc.lanes)
            CHECK(is_valid_ncname(lane.id));
    }
}

TEST_CASE("generator/loader duality on random activities") {
    for (unsigned seed = 100; seed < 140; ++seed) {
        testutil::RandomActivityBuilder builder(seed);
        SystemGroupModel m = builder.build_model();
        BpmnDocument doc = generate_bpmn(m, m.activities[0].name);
        std::string xml = serialize_bpmn(doc);
        auto definition = engine::load_process(xml);
        CHECK_MESSAGE(definition->document == doc, "round trip diverged for seed " << seed);
    }
}
