#include <CLI11.hpp>

#include <jlim/jlim.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace jlim;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string input_path;
    std::string set_name{"J"};
    std::string vector_arg;
    std::string target_arg;
    std::string mode{"pullback"};
    std::string out_dir;
    long long steps{1000};
    long long max_iter{10000000};
    unsigned precision_bits{192};
    double tol{1e-3};
    double delta{1e-2};
    double epsilon{1e-2};
    long long block{0};
    bool strict{false};
};

struct Document {
    JordanFormSpec spec;
    ExactVector x;
    std::optional<ExactVector> target;
    json echo;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open input file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("input is not valid JSON: ") + e.what());
    }
    return j;
}

ExactVector parse_vector_arg(const std::string& text, const char* what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string(what) + " is not a JSON array: " + e.what());
    }
    return vector_from_json(j);
}

Document load_document(const Options& o) {
    if (o.input_path.empty()) throw InvalidInput("--input is required");
    json j = read_json_file(o.input_path);
    Document doc;
    doc.spec = form_from_json(j);
    long long dim = doc.spec.dimension();

    std::optional<ExactVector> x;
    if (j.contains("vector") && !j["vector"].is_null()) x = vector_from_json(j["vector"]);
    if (!o.vector_arg.empty()) x = parse_vector_arg(o.vector_arg, "--vector");
    doc.x = x ? *x : ExactVector(static_cast<size_t>(dim));
    if (static_cast<long long>(doc.x.size()) != dim)
        throw DimensionMismatch("vector length does not match the form dimension");

    if (j.contains("target") && !j["target"].is_null()) doc.target = vector_from_json(j["target"]);
    if (!o.target_arg.empty()) doc.target = parse_vector_arg(o.target_arg, "--target");
    if (doc.target && static_cast<long long>(doc.target->size()) != dim)
        throw DimensionMismatch("target length does not match the form dimension");

    doc.echo = form_to_json(doc.spec);
    doc.echo["vector"] = vector_to_json(doc.x);
    if (doc.target) doc.echo["target"] = vector_to_json(*doc.target);
    return doc;
}

SetKind parse_set_kind(const std::string& name) {
    if (name == "L") return SetKind::L;
    if (name == "J") return SetKind::J;
    if (name == "Jmix") return SetKind::Jmix;
    throw InvalidInput("--set must be L, J, or Jmix");
}

const ExactVector& require_target(const Document& doc) {
    if (!doc.target) throw InvalidInput("a target vector is required (document \"target\" or --target)");
    return *doc.target;
}

// warnings carried by every report: outer approximations name the undecided
// eigenvalue pair, odd unit blocks get a note about the sign-corrected
// rotation coordinate
json collect_warnings(const JordanFormSpec& spec, const SymbolicLimitSet* set, bool* outer) {
    json w = json::array();
    if (set && !set->is_empty && set->exactness == Exactness::OuterApprox) {
        if (outer) *outer = true;
        std::string pair;
        for (const auto& g : set->groups) {
            if (g.exactness != Exactness::OuterApprox) continue;
            for (size_t a = 0; a < g.slots.size() && pair.empty(); ++a) {
                if (g.slots[a].circle_class < 0) continue;
                for (size_t b = a + 1; b < g.slots.size(); ++b) {
                    if (g.slots[b].circle_class < 0 ||
                        g.slots[b].circle_class == g.slots[a].circle_class)
                        continue;
                    pair = format_complex(g.slots[a].lambda) + ", " + format_complex(g.slots[b].lambda);
                    break;
                }
            }
        }
        std::string msg = "the joint rotation closure is only bounded from outside";
        if (!pair.empty()) msg += "; the undecided eigenvalue pair is (" + pair + ")";
        msg += "; boundary membership may be undecided";
        w.push_back(msg);
    }
    for (size_t i = 0; i < spec.blocks.size(); ++i) {
        const auto& b = spec.blocks[i];
        if (modulus_class(b.lambda) != ModulusClass::EqualOne || b.size % 2 == 0 || b.size < 3)
            continue;
        long long r = (b.size + 1) / 2;
        w.push_back("block " + std::to_string(i) + " is a unit block of odd size " +
                    std::to_string(b.size) + ": its middle coordinate " + std::to_string(r) +
                    " carries a rotation circle whose coefficient is the start coordinate " +
                    std::to_string(r) + " times (-1)^" + std::to_string(r - 1));
    }
    return w;
}

std::ofstream open_artifact(const std::string& dir, const std::string& name, std::string* path_out) {
    fs::path p = fs::path(dir) / name;
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw InvalidInput("cannot write artifact: " + p.string());
    *path_out = p.string();
    return out;
}

int emit(const json& report, bool strict, bool outer) {
    std::cout << report.dump() << "\n";
    return (strict && outer) ? 2 : 0;
}

int cmd_classify(const Options& o) {
    Document doc = load_document(o);
    SetKind kind = parse_set_kind(o.set_name);
    SymbolicLimitSet set = classify(doc.spec, doc.x, kind);
    bool outer = false;
    json warnings = collect_warnings(doc.spec, &set, &outer);
    json report{{"operation", "classify"},
                {"set_kind", o.set_name},
                {"input", doc.echo},
                {"result", set_to_json(set)},
                {"display", format_set(set)},
                {"warnings", std::move(warnings)}};
    return emit(report, o.strict, outer);
}

long long last_power_index(const Witness& w, long long N) {
    switch (w.schedule.kind) {
        case ScheduleKind::FullSequence: return N;
        case ScheduleKind::ArithmeticProgression:
            return w.schedule.offset + (N - 1) * w.schedule.stride;
        case ScheduleKind::SearchedSubsequence:
            w.schedule.search->ensure(static_cast<size_t>(N));
            return w.schedule.search->ks[static_cast<size_t>(N - 1)];
    }
    return N;
}

int cmd_witness(const Options& o) {
    Document doc = load_document(o);
    SetKind kind = parse_set_kind(o.set_name);
    if (kind == SetKind::L)
        throw InvalidInput("witnesses are only constructed for the extended sets (J or Jmix)");
    const ExactVector& y = require_target(doc);

    SymbolicLimitSet set = classify(doc.spec, doc.x, kind);
    Witness w = assemble_witness(doc.spec, doc.x, y, o.steps);
    if (last_power_index(w, o.steps) > o.max_iter)
        throw InvalidInput("the schedule needs power indices beyond --max-iter");

    PrecisionGuard pg(std::max(64u, o.precision_bits));
    WitnessReport rep = verify_witness(doc.spec, doc.x, y, w, o.steps, o.tol);

    json artifacts = json::object();
    if (!o.out_dir.empty()) {
        std::string path;
        auto out = open_artifact(o.out_dir, "witness.csv", &path);
        write_witness_csv(doc.spec, doc.x, y, w, o.steps, out);
        artifacts["witness_csv"] = path;
    }

    bool outer = false;
    json warnings = collect_warnings(doc.spec, &set, &outer);
    json report{{"operation", "witness"},
                {"set_kind", o.set_name},
                {"input", doc.echo},
                {"set", set_to_json(set)},
                {"witness", witness_to_json(w)},
                {"verification",
                 json{{"pass", rep.pass},
                      {"n_from", rep.n_from},
                      {"n_to", rep.n_to},
                      {"max_dist_x", real_to_string(rep.max_dist_x, 18)},
                      {"max_dist_y", real_to_string(rep.max_dist_y, 18)},
                      {"err_bound", real_to_string(rep.err_bound, 6)},
                      {"tol", o.tol},
                      {"precision_bits", rep.precision_bits}}},
                {"warnings", std::move(warnings)},
                {"artifacts", std::move(artifacts)}};
    if (!rep.pass) {
        std::cout << report.dump() << "\n";
        return 1;
    }
    return emit(report, o.strict, outer);
}

OracleConfig oracle_config(const Options& o) {
    OracleConfig cfg;
    cfg.steps = o.steps;
    cfg.tol = o.tol;
    cfg.precision_bits = std::max(53u, o.precision_bits);
    cfg.validate();
    return cfg;
}

int cmd_oracle(const Options& o) {
    Document doc = load_document(o);
    if (o.steps > o.max_iter) throw InvalidInput("--steps exceeds --max-iter");
    OracleConfig cfg = oracle_config(o);

    json artifacts = json::object();
    json body;
    bool outer = false;
    json warnings;

    if (o.mode == "pullback") {
        const ExactVector& y = require_target(doc);
        SymbolicLimitSet set = classify(doc.spec, doc.x, SetKind::J);
        warnings = collect_warnings(doc.spec, &set, &outer);
        OracleReport rep;
        if (!o.out_dir.empty()) {
            std::string path;
            auto out = open_artifact(o.out_dir, "scan.csv", &path);
            rep = pullback_scan(doc.spec, doc.x, y, cfg, &out);
            artifacts["scan_csv"] = path;
        } else {
            rep = pullback_scan(doc.spec, doc.x, y, cfg);
        }
        body = oracle_report_to_json(rep);
        if (rep.verdict == OracleVerdict::EvidenceYes) {
            try {
                ExactVector pt = oracle_witness_point(doc.spec, doc.x, y, rep.tail_k);
                body["witness_point"] = json{{"k", rep.tail_k}, {"x_k", vector_to_json(pt)}};
            } catch (const NotRepresentable&) {
            } catch (const NilpotentEigenvalue&) {
            }
        }
    } else if (o.mode == "forward") {
        warnings = collect_warnings(doc.spec, nullptr, nullptr);
        ForwardReport rep;
        if (!o.out_dir.empty()) {
            std::string path;
            auto out = open_artifact(o.out_dir, "orbit.csv", &path);
            rep = forward_orbit(doc.spec, doc.x, cfg, &out);
            artifacts["orbit_csv"] = path;
        } else {
            rep = forward_orbit(doc.spec, doc.x, cfg);
        }
        body = forward_report_to_json(rep);
    } else if (o.mode == "dset") {
        if (o.block < 0 || o.block >= static_cast<long long>(doc.spec.blocks.size()))
            throw InvalidInput("--block is out of range");
        warnings = collect_warnings(doc.spec, nullptr, nullptr);
        const ExactComplex& lam = doc.spec.blocks[static_cast<size_t>(o.block)].lambda;
        DsetReport rep = dset_coverage(lam, cfg);
        body = dset_report_to_json(rep);
        body["block"] = o.block;
        body["lambda"] = complex_to_json(lam);
    } else if (o.mode == "ball") {
        const ExactVector& y = require_target(doc);
        SymbolicLimitSet set = classify(doc.spec, doc.x, SetKind::J);
        warnings = collect_warnings(doc.spec, &set, &outer);
        BallReport rep = ball_transitivity_check(doc.spec, doc.x, y, o.delta, o.epsilon, cfg);
        body = ball_report_to_json(rep);
    } else {
        throw InvalidInput("--mode must be pullback, forward, dset, or ball");
    }

    json report{{"operation", "oracle"},
                {"mode", o.mode},
                {"input", doc.echo},
                {"result", std::move(body)},
                {"warnings", std::move(warnings)},
                {"artifacts", std::move(artifacts)}};
    return emit(report, o.strict, outer);
}

int cmd_selftest(const Options& o) {
    SelfTestReport r = run_selftest();
    json report{{"operation", "selftest"}, {"result", selftest_to_json(r)}};
    if (!o.out_dir.empty()) {
        std::string path;
        auto out = open_artifact(o.out_dir, "selftest.json", &path);
        out << report.dump(2) << "\n";
    }
    std::cout << report.dump() << "\n";
    return r.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact limit sets of vectors under Jordan forms"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--input", o.input_path, "path to the JSON input document")->required();
        c->add_option("--vector", o.vector_arg, "start vector as a JSON array, overrides the document");
        c->add_flag("--strict", o.strict, "exit 2 when the result is an outer approximation");
        c->add_option("--out", o.out_dir, "directory for CSV artifacts");
    };

    CLI::App* c_classify = app.add_subcommand("classify", "compute the symbolic limit set");
    add_common(c_classify);
    c_classify->add_option("--set", o.set_name, "which set to compute: L, J, or Jmix")
        ->check(CLI::IsMember({"L", "J", "Jmix"}));

    CLI::App* c_witness = app.add_subcommand("witness", "build and verify an approximating sequence");
    add_common(c_witness);
    c_witness->add_option("--set", o.set_name, "J or Jmix")->check(CLI::IsMember({"J", "Jmix", "L"}));
    c_witness->add_option("--target", o.target_arg, "target vector as a JSON array");
    c_witness->add_option("--steps", o.steps, "number of witness terms");
    c_witness->add_option("--max-iter", o.max_iter, "largest admissible power index");
    c_witness->add_option("--tol", o.tol, "verification tolerance");
    c_witness->add_option("--precision-bits", o.precision_bits, "working precision in bits");

    CLI::App* c_oracle = app.add_subcommand("oracle", "numerical evidence scans");
    add_common(c_oracle);
    c_oracle->add_option("--mode", o.mode, "pullback, forward, dset, or ball")
        ->check(CLI::IsMember({"pullback", "forward", "dset", "ball"}));
    c_oracle->add_option("--target", o.target_arg, "target vector as a JSON array");
    c_oracle->add_option("--steps", o.steps, "scan length");
    c_oracle->add_option("--max-iter", o.max_iter, "largest admissible power index");
    c_oracle->add_option("--tol", o.tol, "evidence tolerance");
    c_oracle->add_option("--precision-bits", o.precision_bits, "starting precision in bits");
    c_oracle->add_option("--delta", o.delta, "ball radius around the start vector");
    c_oracle->add_option("--epsilon", o.epsilon, "ball radius around the target");
    c_oracle->add_option("--block", o.block, "block index for dset mode");

    CLI::App* c_selftest = app.add_subcommand("selftest", "run the bundled invariant suite");
    c_selftest->add_option("--out", o.out_dir, "directory for the report artifact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (c_oracle->parsed() && c_oracle->count("--precision-bits") == 0) o.precision_bits = 64;

    try {
        if (c_classify->parsed()) return cmd_classify(o);
        if (c_witness->parsed()) return cmd_witness(o);
        if (c_oracle->parsed()) return cmd_oracle(o);
        return cmd_selftest(o);
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
