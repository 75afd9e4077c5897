// Batch front end: loads a JSON instance, runs one computation, writes a
// deterministic CSV/JSON artifact (17 significant digits, sorted keys).
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ri/acceptance.hpp"
#include "ri/instance.hpp"

namespace {

using nlohmann::json;

// nlohmann's dump() prints shortest-round-trip doubles; we want a fixed
// 17-significant-digit rendering so artifacts are byte-stable by construction.
void dump17(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump17(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump17(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (std::isfinite(v))
                out += ri::fmt17(v);
            else
                out += "null";
            break;
        }
        default:
            out += j.dump();
    }
}

std::string dump17(const json& j) {
    std::string out;
    dump17(j, out);
    out += '\n';
    return out;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ri::ValidationError("cannot open output file: " + out_path);
    f << content;
}

json exponent_json(const ri::Exponent& e) {
    if (e.is_inf()) return "inf";
    return e.value();
}

json cl_json(const ri::CLResult& r) {
    json j;
    j["value"] = r.value;
    j["witness0"] = r.witness0;
    j["witness1"] = r.witness1;
    j["residual"] = r.residual;
    return j;
}

const char* degenerate_name(ri::DegenerateCase c) {
    switch (c) {
        case ri::DegenerateCase::intersection: return "intersection";
        case ri::DegenerateCase::one_sided_left: return "one_sided_left";
        case ri::DegenerateCase::one_sided_right: return "one_sided_right";
        case ri::DegenerateCase::sum_space: return "sum_space";
        default: return "none";
    }
}

json sequence_json(const ri::BalancedSequence& u) {
    json j;
    j["first_index"] = u.first_index;
    j["q"] = u.q;
    j["t"] = u.t;
    switch (u.side) {
        case ri::SequenceSide::two_sided: j["side"] = "two_sided"; break;
        case ri::SequenceSide::left_only: j["side"] = "left_only"; break;
        case ri::SequenceSide::right_only: j["side"] = "right_only"; break;
        default: j["side"] = "empty";
    }
    return j;
}

int cmd_k_eval(const ri::Instance& inst, double lo, double hi, int steps,
               const std::string& out) {
    if (steps < 1) throw ri::ValidationError("--steps: must be >= 1");
    if (steps > 1 && !(hi > lo))
        throw ri::ValidationError("--grid-log2-max: must exceed --grid-log2-min");
    ri::Couple c = inst.source.build();
    std::string csv = "s,t,K\n";
    for (int i = 0; i < steps; ++i) {
        double e = (steps == 1) ? lo : lo + (hi - lo) * i / (steps - 1);
        double t = std::exp2(e);
        double k = ri::k_at(c, inst.a, 1.0, t, inst.config.tol).value;
        csv += "1," + ri::fmt17(t) + "," + ri::fmt17(k) + "\n";
    }
    emit(out, csv);
    return 0;
}

int cmd_balance(const ri::Instance& inst, double q, const std::string& out) {
    ri::InterpFunction phi = inst.build_phi();
    ri::BalancedSequence seq = ri::balanced_sequence(phi, q);
    std::string csv = "n,t_n\n";
    for (int n = seq.first_index; n <= seq.last_index(); ++n)
        csv += std::to_string(n) + "," + ri::fmt17(seq.at(n)) + "\n";
    emit(out, csv);
    return 0;
}

int cmd_cl_norm(const ri::Instance& inst, const std::string& out) {
    ri::CLResult r = ri::cl_norm(inst.build_phi(), inst.source.build(), inst.a,
                                 inst.config.tol);
    emit(out, dump17(cl_json(r)));
    return 0;
}

int cmd_means_norm(const ri::Instance& inst, const std::string& out) {
    ri::Couple c = inst.source.build();
    ri::MeansResult r = ri::means_norm(inst.build_phi(), c, inst.source.p0, inst.source.p1,
                                       inst.a, inst.config.q);
    json j;
    j["value"] = r.value;
    j["path"] = (r.path == ri::MeansPath::direct) ? "direct" : "characterization";
    j["degenerate_case"] = degenerate_name(r.degenerate_case);
    j["k_char_value"] = r.k_char_value;
    j["balanced_u"] = sequence_json(r.balanced_u);
    j["k_seq"] = r.k_seq;
    if (r.cl) j["cl"] = cl_json(*r.cl);
    emit(out, dump17(j));
    return 0;
}

int cmd_orbit_check(const ri::Instance& inst, const std::string& out) {
    if (!inst.target) throw ri::ValidationError("orbit-check: instance needs a target couple");
    if (!inst.b) throw ri::ValidationError("orbit-check: instance needs an element b");
    ri::OrbitProblem prob{inst.source.build(), inst.target->build(), inst.a, *inst.b};
    ri::OrbitReport rep = ri::orbit_norm(prob, inst.config.q);
    json j;
    j["r0"] = exponent_json(rep.r0);
    j["r1"] = exponent_json(rep.r1);
    j["admissible"] = rep.phi_in_phi0;
    j["orbit_norm"] = rep.orbit_norm_value;
    j["u"] = sequence_json(rep.u);
    j["k_seq"] = rep.k_seq;
    if (rep.cl) j["cl"] = cl_json(*rep.cl);
    emit(out, dump17(j));
    return 0;
}

int cmd_harness(std::uint64_t seed, int trials, const std::string& out) {
    if (trials < 1) throw ri::ValidationError("--trials: must be >= 1");
    ri::HarnessReport rep = ri::inclusion_harness(seed, trials);
    std::string lines;
    for (const ri::TrialReport& t : rep.trials) {
        json j;
        j["trial"] = t.trial;
        j["seed"] = t.seed;
        json e;
        e["p0"] = t.p0;
        e["p1"] = t.p1;
        e["q0"] = t.q0;
        e["q1"] = t.q1;
        j["exponents"] = e;
        j["measured_constant"] = t.measured_constant;
        j["pass"] = t.pass;
        if (!t.error.empty()) j["error"] = t.error;
        lines += dump17(j);
    }
    emit(out, lines);
    return rep.failures == 0 ? 0 : 2;
}

int cmd_verify_all(std::uint64_t seed, const std::string& out) {
    std::string table;
    bool all_pass = true;
    for (const ri::CriterionResult& r : ri::acceptance::run_all(seed)) {
        table += "criterion " + std::to_string(r.id) + " [" + r.name + "]: " +
                 (r.pass ? "PASS" : "FAIL") + " -- " + r.detail + "\n";
        all_pass = all_pass && r.pass;
    }
    emit(out, table);
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for K-functionals, balanced sequences, and orbit norms "
                 "on finite weighted couples"};
    app.require_subcommand(1);

    std::string instance_path, out_path;
    double grid_lo = -10.0, grid_hi = 10.0, q_flag = 0.0;
    int steps = 21, trials = 100;
    std::uint64_t seed = 42;

    auto add_instance = [&](CLI::App* sub) {
        sub->add_option("instance", instance_path, "instance JSON file")->required();
        sub->add_option("--out", out_path, "write the artifact here instead of stdout");
    };

    CLI::App* keval = app.add_subcommand("k-eval", "K(1,t) profile over a dyadic t grid (CSV)");
    add_instance(keval);
    keval->add_option("--grid-log2-min", grid_lo, "log2 of the smallest t");
    keval->add_option("--grid-log2-max", grid_hi, "log2 of the largest t");
    keval->add_option("--steps", steps, "number of grid points");

    CLI::App* balance = app.add_subcommand("balance", "balanced sequence of the instance's "
                                                      "function (CSV)");
    add_instance(balance);
    balance->add_option("--q", q_flag, "balance ratio (default: config.q)");

    CLI::App* cln = app.add_subcommand("cl-norm", "lattice construction norm with witnesses "
                                                  "(JSON)");
    add_instance(cln);

    CLI::App* mns = app.add_subcommand("means-norm", "means-space norm with the "
                                                     "characterization artifacts (JSON)");
    add_instance(mns);

    CLI::App* orb = app.add_subcommand("orbit-check", "orbit norm of b relative to a (JSON)");
    add_instance(orb);

    CLI::App* har = app.add_subcommand("harness", "random bounded-operator inclusion trials "
                                                  "(JSON lines)");
    har->add_option("--trials", trials, "number of trials");
    har->add_option("--seed", seed, "master seed");
    har->add_option("--out", out_path, "write the artifact here instead of stdout");

    CLI::App* ver = app.add_subcommand("verify-all", "run the full acceptance suite");
    ver->add_option("--seed", seed, "master seed");
    ver->add_option("--out", out_path, "write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (har->parsed()) return cmd_harness(seed, trials, out_path);
        if (ver->parsed()) return cmd_verify_all(seed, out_path);

        ri::Instance inst = ri::load_instance(instance_path);
        if (keval->parsed()) return cmd_k_eval(inst, grid_lo, grid_hi, steps, out_path);
        if (balance->parsed()) {
            double q = (q_flag > 0.0) ? q_flag : inst.config.q;
            return cmd_balance(inst, q, out_path);
        }
        if (cln->parsed()) return cmd_cl_norm(inst, out_path);
        if (mns->parsed()) return cmd_means_norm(inst, out_path);
        if (orb->parsed()) return cmd_orbit_check(inst, out_path);
    } catch (const ri::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
