#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "ri/instance.hpp"

using namespace ri;
using nlohmann::json;

namespace {

json minimal() {
    return json::parse(R"({
        "source": {"masses": [1.0], "p0": 1, "U0": [1.0], "p1": "inf", "U1": [2.0]},
        "a": [1.0],
        "phi": {"kind": "power", "theta": 0.5}
    })");
}

}  // namespace

TEST_CASE("minimal instance fills defaults") {
    Instance inst = parse_instance(minimal());
    CHECK(inst.source.p0.value() == 1.0);
    CHECK(inst.source.p1.is_inf());
    CHECK(inst.config.q == 2.0);
    CHECK(inst.config.tol == 1e-8);
    CHECK(inst.config.epsilon == 0.25);
    CHECK(inst.config.truncation == 20);
    CHECK(inst.config.seed == 0);
    CHECK_FALSE(inst.target.has_value());
    Couple c = inst.source.build();
    CHECK(c.atoms() == 1);
}

TEST_CASE("errors name the offending field") {
    json j = minimal();
    j["source"]["U0"][0] = 0.0;
    CHECK_THROWS_WITH(parse_instance(j), Catch::Matchers::ContainsSubstring("U0[0]"));

    j = minimal();
    j["phi"]["kind"] = "mystery";
    CHECK_THROWS_WITH(parse_instance(j), Catch::Matchers::ContainsSubstring("power"));

    j = minimal();
    j["b"] = {1.0};
    CHECK_THROWS_WITH(parse_instance(j), Catch::Matchers::ContainsSubstring("target"));

    j = minimal();
    j["source"].erase("p1");
    CHECK_THROWS_WITH(parse_instance(j), Catch::Matchers::ContainsSubstring("p1"));

    j = minimal();
    j["a"] = {1.0, 2.0};
    CHECK_THROWS_AS(parse_instance(j), ValidationError);

    j = minimal();
    j["source"]["p0"] = 0.5;
    CHECK_THROWS_AS(parse_instance(j), ValidationError);

    j = minimal();
    j["config"] = {{"epsilon", 0.9}};
    CHECK_THROWS_AS(parse_instance(j), ValidationError);
}

TEST_CASE("sampled and k-derived function kinds") {
    json j = minimal();
    j["phi"] = {{"kind", "samples"}, {"t", {1.0, 2.0}}, {"v", {1.0, 1.4}}};
    Instance inst = parse_instance(j);
    InterpFunction f = inst.build_phi();
    CHECK(f.rho(2.0) == Catch::Approx(1.4).epsilon(1e-12));

    j["phi"] = {{"kind", "k_of_a"}};
    Instance inst2 = parse_instance(j);
    InterpFunction g = inst2.build_phi();
    Couple c = inst2.source.build();
    CHECK(g.rho(1.0) == Catch::Approx(k_at(c, inst2.a, 1.0, 1.0).value).epsilon(1e-4));
}

TEST_CASE("full instance round trip") {
    json j = json::parse(R"({
        "source": {"masses": [1.0, 2.0], "p0": 1.5, "U0": [1.0, 0.5], "p1": "inf", "U1": [2.0, 1.0]},
        "target": {"masses": [1.0], "q0": 2, "V0": [1.0], "q1": 1, "V1": [3.0]},
        "a": [1.0, -0.5],
        "b": [0.7],
        "phi": {"kind": "power", "theta": 0.25},
        "config": {"q": 3.0, "tol": 1e-6, "epsilon": 0.125, "truncation": 10, "seed": 99}
    })");
    Instance inst = parse_instance(j);
    json back = instance_to_json(inst);
    Instance again = parse_instance(back);
    CHECK(instance_to_json(again) == back);
    CHECK(again.config.seed == 99);
    CHECK(again.target->p1.value() == 1.0);
    CHECK(again.b->at(0) == 0.7);
}

TEST_CASE("load from disk") {
    std::string path = "test_instance_roundtrip.json";
    {
        std::ofstream out(path);
        out << minimal().dump(2);
    }
    Instance inst = load_instance(path);
    CHECK(inst.a.size() == 1);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_instance("does_not_exist.json"), ValidationError);
}

TEST_CASE("seventeen digit formatting round trips") {
    for (double v : {1.0 / 3.0, 2.2360679774997898, 1e-300, 123456.789}) {
        CHECK(std::stod(fmt17(v)) == v);
    }
}
