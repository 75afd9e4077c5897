#ifndef RI_INSTANCE_HPP
#define RI_INSTANCE_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/phifn.hpp"
#include "ri/space.hpp"

namespace ri {

/// %.17g: shortest formatting that round-trips a double exactly.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CoupleSpec {
    std::vector<double> masses;
    Exponent p0{1.0}, p1{1.0};
    std::vector<double> w0, w1;

    Couple build() const {
        return Couple(WeightedSpace(masses, p0, w0), WeightedSpace(masses, p1, w1));
    }
};

struct PhiSpec {
    std::string kind;  // "power" | "samples" | "k_of_a"
    double theta = 0.5;
    std::vector<double> t, v;
};

struct SolverConfig {
    double q = 2.0;
    double tol = 1e-8;
    double epsilon = 0.25;
    int truncation = 20;
    std::uint64_t seed = 0;
};

struct Instance {
    CoupleSpec source;
    std::optional<CoupleSpec> target;
    Element a;
    std::optional<Element> b;
    PhiSpec phi;
    SolverConfig config;

    InterpFunction build_phi() const {
        if (phi.kind == "power") return InterpFunction::power(phi.theta);
        if (phi.kind == "samples") return InterpFunction::from_samples(phi.t, phi.v);
        return InterpFunction::k_derived(source.build(), a, 1e-6);
    }
};

namespace detail {

inline Exponent parse_exponent(const nlohmann::json& j, const std::string& field) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Exponent::infinity();
        throw ValidationError(field + ": exponent must be a number >= 1 or \"inf\"");
    }
    if (!j.is_number()) throw ValidationError(field + ": exponent must be a number or \"inf\"");
    double v = j.get<double>();
    if (!(v >= 1.0)) throw ValidationError(field + ": exponent must be >= 1");
    return Exponent(v);
}

inline std::vector<double> parse_positive_array(const nlohmann::json& j,
                                                const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ValidationError(field + ": expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number() || !(j[i].get<double>() > 0.0))
            throw ValidationError(field + "[" + std::to_string(i) + "]: must be > 0");
        out.push_back(j[i].get<double>());
    }
    return out;
}

inline std::vector<double> parse_array(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ValidationError(field + ": expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ValidationError(field + "[" + std::to_string(i) + "]: must be a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

inline CoupleSpec parse_couple(const nlohmann::json& j, const std::string& field,
                               const char* pkey0, const char* pkey1, const char* wkey0,
                               const char* wkey1) {
    if (!j.is_object()) throw ValidationError(field + ": expected an object");
    CoupleSpec spec;
    if (!j.contains("masses")) throw ValidationError(field + ".masses: required");
    spec.masses = parse_positive_array(j.at("masses"), field + ".masses");
    for (const char* key : {pkey0, pkey1, wkey0, wkey1})
        if (!j.contains(key)) throw ValidationError(field + "." + key + ": required");
    spec.p0 = parse_exponent(j.at(pkey0), field + "." + pkey0);
    spec.p1 = parse_exponent(j.at(pkey1), field + "." + pkey1);
    spec.w0 = parse_positive_array(j.at(wkey0), field + "." + wkey0);
    spec.w1 = parse_positive_array(j.at(wkey1), field + "." + wkey1);
    if (spec.w0.size() != spec.masses.size())
        throw ValidationError(field + "." + wkey0 + ": length must match masses");
    if (spec.w1.size() != spec.masses.size())
        throw ValidationError(field + "." + wkey1 + ": length must match masses");
    return spec;
}

}  // namespace detail

inline Instance parse_instance(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("instance: expected a JSON object");
    Instance inst;
    if (!j.contains("source")) throw ValidationError("source: required");
    inst.source = detail::parse_couple(j.at("source"), "source", "p0", "p1", "U0", "U1");
    if (j.contains("target"))
        inst.target = detail::parse_couple(j.at("target"), "target", "q0", "q1", "V0", "V1");

    if (!j.contains("a")) throw ValidationError("a: required");
    inst.a = detail::parse_array(j.at("a"), "a");
    if (inst.a.size() != inst.source.masses.size())
        throw ValidationError("a: length must match source.masses");
    if (j.contains("b")) {
        inst.b = detail::parse_array(j.at("b"), "b");
        if (!inst.target) throw ValidationError("b: requires a target couple");
        if (inst.b->size() != inst.target->masses.size())
            throw ValidationError("b: length must match target.masses");
    }

    if (!j.contains("phi")) throw ValidationError("phi: required");
    const auto& p = j.at("phi");
    if (!p.is_object() || !p.contains("kind") || !p.at("kind").is_string())
        throw ValidationError("phi.kind: required string");
    inst.phi.kind = p.at("kind").get<std::string>();
    if (inst.phi.kind == "power") {
        if (!p.contains("theta") || !p.at("theta").is_number())
            throw ValidationError("phi.theta: required number in [0,1]");
        inst.phi.theta = p.at("theta").get<double>();
        if (inst.phi.theta < 0.0 || inst.phi.theta > 1.0)
            throw ValidationError("phi.theta: must lie in [0,1]");
    } else if (inst.phi.kind == "samples") {
        if (!p.contains("t") || !p.contains("v"))
            throw ValidationError("phi: samples kind needs arrays t and v");
        inst.phi.t = detail::parse_positive_array(p.at("t"), "phi.t");
        inst.phi.v = detail::parse_positive_array(p.at("v"), "phi.v");
    } else if (inst.phi.kind != "k_of_a") {
        throw ValidationError("phi.kind: must be one of power, samples, k_of_a");
    }

    if (j.contains("config")) {
        const auto& c = j.at("config");
        if (!c.is_object()) throw ValidationError("config: expected an object");
        if (c.contains("q")) {
            inst.config.q = c.at("q").get<double>();
            if (!(inst.config.q > 1.0)) throw ValidationError("config.q: must be > 1");
        }
        if (c.contains("tol")) {
            inst.config.tol = c.at("tol").get<double>();
            if (!(inst.config.tol > 0.0)) throw ValidationError("config.tol: must be > 0");
        }
        if (c.contains("epsilon")) {
            inst.config.epsilon = c.at("epsilon").get<double>();
            if (!(inst.config.epsilon > 0.0) || inst.config.epsilon > 0.5)
                throw ValidationError("config.epsilon: must lie in (0, 1/2]");
        }
        if (c.contains("truncation")) {
            inst.config.truncation = c.at("truncation").get<int>();
            if (inst.config.truncation < 1)
                throw ValidationError("config.truncation: must be >= 1");
        }
        if (c.contains("seed")) inst.config.seed = c.at("seed").get<std::uint64_t>();
    }
    return inst;
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instance file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("instance parse error: ") + e.what());
    }
    return parse_instance(j);
}

namespace detail {

inline nlohmann::json exponent_to_json(const Exponent& e) {
    if (e.is_inf()) return "inf";
    return e.value();
}

inline nlohmann::json couple_to_json(const CoupleSpec& c, const char* pkey0, const char* pkey1,
                                     const char* wkey0, const char* wkey1) {
    nlohmann::json j;
    j["masses"] = c.masses;
    j[pkey0] = exponent_to_json(c.p0);
    j[pkey1] = exponent_to_json(c.p1);
    j[wkey0] = c.w0;
    j[wkey1] = c.w1;
    return j;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["source"] = detail::couple_to_json(inst.source, "p0", "p1", "U0", "U1");
    if (inst.target)
        j["target"] = detail::couple_to_json(*inst.target, "q0", "q1", "V0", "V1");
    j["a"] = inst.a;
    if (inst.b) j["b"] = *inst.b;
    nlohmann::json p;
    p["kind"] = inst.phi.kind;
    if (inst.phi.kind == "power") p["theta"] = inst.phi.theta;
    if (inst.phi.kind == "samples") {
        p["t"] = inst.phi.t;
        p["v"] = inst.phi.v;
    }
    j["phi"] = p;
    nlohmann::json c;
    c["q"] = inst.config.q;
    c["tol"] = inst.config.tol;
    c["epsilon"] = inst.config.epsilon;
    c["truncation"] = inst.config.truncation;
    c["seed"] = inst.config.seed;
    j["config"] = c;
    return j;
}

}  // namespace ri

#endif
