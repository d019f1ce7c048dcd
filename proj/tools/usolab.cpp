// usolab: generate, solve, duel, verify, count and bench Matousek-type USOs.
//
// Exit codes: 0 success, 1 verification or audit failure, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uso/harness.hpp"
#include "uso/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        uso::write_text_file(out, text);
    }
}

/// "A..B" inclusive; A > B is an empty range.
std::vector<std::size_t> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw uso::UsageError("--n-range expects A..B");
    std::size_t a = 0;
    std::size_t b = 0;
    try {
        std::size_t used = 0;
        a = std::stoul(s.substr(0, dots), &used);
        if (used != dots) throw std::invalid_argument(s);
        const std::string tail = s.substr(dots + 2);
        b = std::stoul(tail, &used);
        if (used != tail.size()) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
        throw uso::UsageError("bad --n-range '" + s + "'");
    }
    std::vector<std::size_t> ns;
    for (std::size_t n = a; n <= b; ++n) ns.push_back(n);
    return ns;
}

bool is_realizable_class(const std::string& cls) {
    if (cls == "realizable") return true;
    if (cls == "general") return false;
    throw uso::UsageError("unknown class '" + cls + "'");
}

struct Options {
    std::size_t n = 0;
    std::vector<std::size_t> ns;
    std::string n_range;
    std::string cls = "general";
    std::string solver = "jump-antipodal";
    std::string adversary;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    std::string input;
    std::size_t exhaustive = 0;
    bool transcript = false;
};

int cmd_gen(const Options& o) {
    if (o.n == 0) throw uso::UsageError("--n must be positive");
    const bool realizable = is_realizable_class(o.cls);
    const uso::MatousekUso u = uso::random_instance(o.n, realizable, o.seed);
    std::optional<uso::Branching> b;
    if (realizable) b = uso::branching_of(u.graph());
    emit(uso::dump(uso::to_json(uso::make_instance_file(u, b))), o.out);
    return kOk;
}

int cmd_solve(const Options& o) {
    if (o.input.empty()) throw uso::UsageError("solve needs an instance file");
    const uso::SolverId id = uso::parse_solver(o.solver);
    const uso::InstanceFile file = uso::load_instance(o.input);
    const uso::MatousekUso u = file.to_uso();
    if (id == uso::SolverId::RealizableLog2 && !uso::is_realizable_dig(u.matrix())) {
        throw uso::UsageError("realizable-log2 needs a realizable instance");
    }
    uso::UsoVertexOracle oracle(u);
    uso::SolveReport rep;
    std::optional<std::string> error;
    try {
        rep = uso::run_sink_finder(uso::sink_finder_for(id), oracle);
    } catch (const uso::OracleMismatch& e) {
        error = e.what();
    }
    const std::size_t bound = uso::vertex_bound(id, u.dimension());
    const bool verified = !error && uso::outmap(u, rep.answer).none();
    uso::Json j;
    j["solver"] = o.solver;
    j["n"] = u.dimension();
    j["queries"] = oracle.query_count();
    j["bound"] = bound;
    j["verified"] = verified;
    if (error) {
        j["error"] = *error;
    } else {
        j["answer"] = rep.answer.to_string();
    }
    if (o.transcript) j["transcript"] = uso::to_json(oracle.transcript());
    emit(uso::dump(j), o.out);
    return verified && oracle.query_count() <= bound ? kOk : kFailed;
}

int cmd_duel(const Options& o) {
    if (o.n == 0) throw uso::UsageError("--n must be positive");
    if (o.trials == 0) throw uso::UsageError("--trials must be positive");
    const uso::SolverId solver = uso::parse_solver(o.solver);
    const uso::AdversaryId adversary = uso::parse_adversary(o.adversary.empty() ? "general" : o.adversary);
    if (adversary == uso::AdversaryId::None) throw uso::UsageError("duel needs an adversary");
    uso::Json results = uso::Json::array();
    bool all_passed = true;
    for (std::size_t t = 0; t < o.trials; ++t) {
        const std::uint64_t seed = o.trials == 1 ? o.seed : uso::derive_seed(o.seed, o.n, t);
        const uso::DuelResult r = uso::run_duel({o.n, solver, adversary, seed});
        all_passed = all_passed && r.passed();
        results.push_back(uso::to_json(r));
    }
    if (o.trials == 1) {
        emit(uso::dump(results.front()), o.out);
    } else {
        emit(uso::dump({{"trials", o.trials}, {"all_passed", all_passed}, {"results", results}}), o.out);
    }
    return all_passed ? kOk : kFailed;
}

int cmd_verify(const Options& o) {
    uso::VerifyReport rep;
    if (o.exhaustive > 0) {
        if (!o.input.empty()) throw uso::UsageError("give either an instance file or --exhaustive");
        rep = uso::verify_exhaustive(o.exhaustive);
    } else {
        if (o.input.empty()) throw uso::UsageError("verify needs an instance file or --exhaustive N");
        rep = uso::verify_instance(uso::load_instance(o.input));
    }
    emit(uso::dump(uso::to_json(rep)), o.out);
    return rep.ok() ? kOk : kFailed;
}

int cmd_count(const Options& o) {
    const uso::CountReport c = uso::count_instances(o.n);
    emit(uso::dump(uso::to_json(c)), o.out);
    return c.matches() ? kOk : kFailed;
}

int cmd_bench(const Options& o) {
    uso::BenchConfig cfg;
    cfg.solver = uso::parse_solver(o.solver);
    cfg.realizable = is_realizable_class(o.cls);
    cfg.adversary = uso::parse_adversary(o.adversary);
    cfg.ns = o.ns;
    if (!o.n_range.empty()) {
        const auto r = parse_range(o.n_range);
        cfg.ns.insert(cfg.ns.end(), r.begin(), r.end());
    }
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    const auto rows = uso::run_bench(cfg);
    const std::string format = o.format.empty() ? "csv" : o.format;
    if (format == "csv") {
        emit(uso::to_csv(rows), o.out);
    } else if (format == "json") {
        uso::Json j = uso::Json::array();
        for (const auto& r : rows) j.push_back(uso::to_json(r));
        emit(uso::dump(j), o.out);
    } else {
        throw uso::UsageError("unknown format '" + format + "'");
    }
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.bound_respected && r.verified;
    return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sink finding in Matousek-type unique sink orientations"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "Write a random instance file");
    gen->add_option("--n", o.n, "Dimension")->required();
    gen->add_option("--class", o.cls, "general | realizable");
    gen->add_option("--seed", o.seed, "RNG seed");
    gen->add_option("--out", o.out, "Output path (default stdout)");

    auto* solve = app.add_subcommand("solve", "Find the sink of an instance file");
    solve->add_option("instance", o.input, "Instance file")->required();
    solve->add_option("--solver", o.solver, "jump-antipodal | naive-recover | realizable-log2");
    solve->add_flag("--transcript", o.transcript, "Include the query transcript");
    solve->add_option("--out", o.out, "Output path (default stdout)");

    auto* duel = app.add_subcommand("duel", "Run a solver against an adaptive adversary");
    duel->add_option("--n", o.n, "Dimension")->required();
    duel->add_option("--solver", o.solver, "jump-antipodal | naive-recover | realizable-log2 | random");
    duel->add_option("--adversary", o.adversary, "general | goodpaths");
    duel->add_option("--trials", o.trials, "Number of seeded runs");
    duel->add_option("--seed", o.seed, "RNG seed");
    duel->add_option("--out", o.out, "Output path (default stdout)");

    auto* verify = app.add_subcommand("verify", "Check the structural laws of instances");
    verify->add_option("instance", o.input, "Instance file");
    verify->add_option("--exhaustive", o.exhaustive, "Check every legal DIG and sink for this n (<= 4)");
    verify->add_option("--out", o.out, "Output path (default stdout)");

    auto* count = app.add_subcommand("count", "Count instances by enumeration (n <= 4)");
    count->add_option("--n", o.n, "Dimension")->required();
    count->add_option("--out", o.out, "Output path (default stdout)");

    auto* bench = app.add_subcommand("bench", "Tabulate query counts over a range of n");
    bench->add_option("--n", o.ns, "Dimension (repeatable)");
    bench->add_option("--n-range", o.n_range, "Inclusive range A..B");
    bench->add_option("--class", o.cls, "general | realizable");
    bench->add_option("--solver", o.solver, "jump-antipodal | naive-recover | realizable-log2");
    bench->add_option("--adversary", o.adversary, "none | general | goodpaths");
    bench->add_option("--trials", o.trials, "Trials per n");
    bench->add_option("--seed", o.seed, "RNG seed");
    bench->add_option("--format", o.format, "csv | json");
    bench->add_option("--out", o.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(o);
        if (solve->parsed()) return cmd_solve(o);
        if (duel->parsed()) return cmd_duel(o);
        if (verify->parsed()) return cmd_verify(o);
        if (count->parsed()) return cmd_count(o);
        if (bench->parsed()) return cmd_bench(o);
    } catch (const std::exception& e) {
        // Bad flags, unreadable or malformed files, out-of-range sizes.
        std::cerr << "usolab: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
