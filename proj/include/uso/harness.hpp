#pragma once

// Experiment drivers behind the command-line tool: solver/adversary duels,
// query-count benchmarks, instance verification and counting.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uso/adversaries.hpp"
#include "uso/gf2.hpp"
#include "uso/influence_graph.hpp"
#include "uso/io.hpp"
#include "uso/matousek.hpp"
#include "uso/solvers.hpp"

namespace uso {

/// Bad command-line configuration (exit code 2).
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class SolverId { JumpAntipodal, NaiveRecover, RealizableLog2, Random };
enum class AdversaryId { None, General, GoodPaths };

inline SolverId parse_solver(const std::string& s) {
    if (s == "jump-antipodal") return SolverId::JumpAntipodal;
    if (s == "naive-recover") return SolverId::NaiveRecover;
    if (s == "realizable-log2") return SolverId::RealizableLog2;
    if (s == "random") return SolverId::Random;
    throw UsageError("unknown solver '" + s + "'");
}

inline std::string to_string(SolverId id) {
    switch (id) {
        case SolverId::JumpAntipodal: return "jump-antipodal";
        case SolverId::NaiveRecover: return "naive-recover";
        case SolverId::RealizableLog2: return "realizable-log2";
        case SolverId::Random: return "random";
    }
    return "?";
}

inline AdversaryId parse_adversary(const std::string& s) {
    if (s.empty() || s == "none") return AdversaryId::None;
    if (s == "general" || s == "general-adversary") return AdversaryId::General;
    if (s == "goodpaths" || s == "goodpaths-adversary") return AdversaryId::GoodPaths;
    throw UsageError("unknown adversary '" + s + "'");
}

inline std::string to_string(AdversaryId id) {
    switch (id) {
        case AdversaryId::None: return "none";
        case AdversaryId::General: return "general";
        case AdversaryId::GoodPaths: return "goodpaths";
    }
    return "?";
}

/// Mixes a base seed with per-trial coordinates (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline BitVector random_vector(std::size_t n, std::mt19937_64& rng) {
    BitVector v(n);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < n; ++i) v.set(i, coin(rng));
    return v;
}

/// Worst-case vertex evaluations of a sink finder on n dimensions.
inline std::size_t vertex_bound(SolverId id, std::size_t n) {
    switch (id) {
        case SolverId::JumpAntipodal: return n;
        case SolverId::NaiveRecover: return n + 1;
        case SolverId::RealizableLog2: return realizable_query_bound(n);
        case SolverId::Random: break;
    }
    throw UsageError("solver has no query bound");
}

inline SinkFinder sink_finder_for(SolverId id, std::optional<BitVector> start = std::nullopt) {
    switch (id) {
        case SolverId::JumpAntipodal: return jump_antipodal_finder(std::move(start));
        case SolverId::NaiveRecover: return sink_finder_from_mxy_solver(naive_mxy_solve);
        case SolverId::RealizableLog2: return sink_finder_from_mxy_solver(realizable_mxy_solve);
        case SolverId::Random: break;
    }
    throw UsageError("random is a query strategy, not a sink finder");
}

inline MxySolver mxy_solver_for(SolverId id, std::optional<BitVector> start = std::nullopt) {
    switch (id) {
        case SolverId::JumpAntipodal: return mxy_solver_from_sink_finder(jump_antipodal_finder(std::move(start)));
        case SolverId::NaiveRecover: return naive_mxy_solve;
        case SolverId::RealizableLog2: return realizable_mxy_solve;
        case SolverId::Random: break;
    }
    throw UsageError("random is a query strategy, not a solver");
}

/// Forwards queries and runs a callback after every reply.
class ObservedMxyOracle final : public MxyOracle {
  public:
    ObservedMxyOracle(MxyOracle& inner, std::function<void()> after) : inner_(inner), after_(std::move(after)) {}
    std::size_t dimension() const override { return inner_.dimension(); }
    const BitVector& target() const override { return inner_.target(); }

  protected:
    BitVector answer(const BitVector& q) override {
        BitVector r = inner_.query(q);
        after_();
        return r;
    }

  private:
    MxyOracle& inner_;
    std::function<void()> after_;
};

/// The good-paths alternative matrix is realizable, reproduces every reply
/// and has a different solution for y = 1.
inline bool goodpaths_witness_ok(const GoodPathsState& st) {
    const auto alt = goodpaths_alternative(st);
    if (!alt) return false;
    if (!is_legal_dig(*alt) || !is_realizable_dig(*alt)) return false;
    for (std::size_t i = 0; i < st.queries.size(); ++i) {
        if (mat_vec_mul(*alt, st.queries[i]) != st.replies[i]) return false;
    }
    return solve(*alt, st.target()) != solve(st.m, st.target());
}

// ---------------------------------------------------------------------------
// Duels

struct DuelConfig {
    std::size_t n = 0;
    SolverId solver = SolverId::JumpAntipodal;
    AdversaryId adversary = AdversaryId::General;
    std::uint64_t seed = 0;
};

struct DuelResult {
    DuelConfig config;
    Transcript transcript;
    std::optional<BitVector> answer;
    bool answer_correct = false;
    std::optional<std::string> solver_error;
    /// Matrix-vector queries the adversary answered.
    std::size_t queries = 0;
    std::size_t lower_bound = 0;
    std::size_t audits_run = 0;
    std::vector<std::string> audit_failures;
    /// Good-paths only: queries after which no alternative remained.
    std::optional<std::size_t> settled_after;
    BitMatrix final_matrix;
    Json changes = Json::array();

    bool audits_passed() const { return audit_failures.empty(); }
    bool bound_respected() const {
        if (queries < lower_bound && answer) return false;
        return !settled_after || *settled_after >= lower_bound;
    }
    bool passed() const {
        return audits_passed() && !solver_error && bound_respected() && (!answer || answer_correct);
    }
};

namespace detail {

inline std::size_t random_strategy_cap(std::size_t n) { return 4 * n + 64; }

inline void run_strategy(MxyOracle& oracle, const DuelConfig& cfg, DuelResult& out,
                         const std::function<bool()>& done) {
    std::mt19937_64 rng(derive_seed(cfg.seed, cfg.n, 17));
    if (cfg.solver == SolverId::Random) {
        for (std::size_t t = 0; t < random_strategy_cap(cfg.n) && !done(); ++t) {
            BitVector q = random_vector(cfg.n, rng);
            if (q.none()) continue;
            oracle.query(q);
        }
        return;
    }
    const BitVector start = random_vector(cfg.n, rng);
    try {
        out.answer = mxy_solver_for(cfg.solver, start)(oracle);
    } catch (const OracleMismatch& e) {
        out.solver_error = e.what();
    }
}

}  // namespace detail

/// Solver (in the matrix-vector model) against the general adversary with
/// y = 1. Legality/consistency and the uncertainty audit run after every
/// reply while fewer than n - 1 queries have been accepted.
inline DuelResult run_general_duel(const DuelConfig& cfg) {
    if (cfg.n < 1) throw UsageError("n must be positive");
    if (cfg.solver == SolverId::RealizableLog2) throw UsageError("realizable-log2 cannot face the general adversary");
    DuelResult out;
    out.config = cfg;
    out.lower_bound = cfg.n - 1;
    GeneralAdversary adv(cfg.n);

    auto audit = [&] {
        const auto& st = adv.state();
        ++out.audits_run;
        const std::string when = " after " + std::to_string(adv.query_count()) + " queries";
        if (!general_adversary_audit(st)) out.audit_failures.push_back("legality/consistency" + when);
        if (!st.frozen() && !uncertainty_audit(st)) out.audit_failures.push_back("uncertainty" + when);
    };
    audit();
    ObservedMxyOracle observed(adv, audit);
    detail::run_strategy(observed, cfg, out, [&] { return adv.state().frozen(); });

    const auto& st = adv.state();
    out.transcript = adv.transcript();
    out.queries = adv.query_count();
    out.final_matrix = st.m;
    if (out.answer) out.answer_correct = mat_vec_mul(st.m, *out.answer) == st.y;
    for (const auto& c : st.changes) {
        out.changes.push_back({{"after_query", c.query_index}, {"row", c.row}, {"added", c.z.to_string()}});
    }
    return out;
}

/// Solver against the good-paths adversary (y = 1). After every reply the
/// state audit runs, and while unsettled the explicit alternative matrix
/// must be consistent and have a different solution.
inline DuelResult run_goodpaths_duel(const DuelConfig& cfg) {
    if (cfg.n < 1) throw UsageError("n must be positive");
    DuelResult out;
    out.config = cfg;
    out.lower_bound = floor_log2(cfg.n);
    GoodPathsAdversary adv(cfg.n);

    auto audit = [&] {
        const auto& st = adv.state();
        ++out.audits_run;
        const std::string when = " after " + std::to_string(adv.query_count()) + " queries";
        if (!goodpaths_audit(st)) out.audit_failures.push_back("good-paths state" + when);
        if (st.settled()) {
            if (!out.settled_after) out.settled_after = adv.query_count();
        } else if (!goodpaths_witness_ok(st)) {
            out.audit_failures.push_back("alternative witness" + when);
        }
    };
    audit();
    ObservedMxyOracle observed(adv, audit);
    detail::run_strategy(observed, cfg, out, [&] { return adv.state().settled(); });

    const auto& st = adv.state();
    out.transcript = adv.transcript();
    out.queries = adv.query_count();
    out.final_matrix = st.m;
    if (out.answer) {
        out.answer_correct = mat_vec_mul(st.m, *out.answer) == st.target();
        // A correct answer certifies only a settled state.
        if (out.answer_correct && !st.settled()) out.audit_failures.push_back("answer accepted while unsettled");
    }
    for (const auto& j : st.joins) {
        out.changes.push_back({{"after_query", j.query_index}, {"first", j.first}, {"second", j.second}});
    }
    return out;
}

inline DuelResult run_duel(const DuelConfig& cfg) {
    switch (cfg.adversary) {
        case AdversaryId::General: return run_general_duel(cfg);
        case AdversaryId::GoodPaths: return run_goodpaths_duel(cfg);
        case AdversaryId::None: break;
    }
    throw UsageError("duel needs an adversary");
}

inline Json to_json(const DuelResult& r) {
    Json j;
    j["n"] = r.config.n;
    j["solver"] = to_string(r.config.solver);
    j["adversary"] = to_string(r.config.adversary);
    j["seed"] = r.config.seed;
    j["transcript"] = to_json(r.transcript);
    j["changes"] = r.changes;
    j["final_matrix"] = r.final_matrix.to_strings();
    j["queries"] = r.queries;
    j["lower_bound"] = r.lower_bound;
    j["answer"] = r.answer ? Json(r.answer->to_string()) : Json(nullptr);
    j["answer_correct"] = r.answer_correct;
    if (r.solver_error) j["solver_error"] = *r.solver_error;
    if (r.settled_after) j["settled_after"] = *r.settled_after;
    j["audits_run"] = r.audits_run;
    j["audit_failures"] = r.audit_failures;
    j["verdict"] = r.passed() ? "pass" : "fail";
    return j;
}

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchConfig {
    SolverId solver = SolverId::JumpAntipodal;
    bool realizable = false;
    AdversaryId adversary = AdversaryId::None;
    std::vector<std::size_t> ns;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
};

/// One row per n. Query counts are vertex evaluations; duel runs add the
/// anchor evaluation to the matrix-vector count.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    if (cfg.solver == SolverId::Random) throw UsageError("bench needs a sink-finding solver");
    if (cfg.trials == 0) throw UsageError("trials must be positive");
    if (cfg.solver == SolverId::RealizableLog2 && cfg.adversary == AdversaryId::None && !cfg.realizable) {
        throw UsageError("realizable-log2 needs --class realizable");
    }
    std::vector<std::size_t> ns = cfg.ns;
    std::sort(ns.begin(), ns.end());
    std::vector<BenchRow> rows;
    for (std::size_t n : ns) {
        if (n == 0) throw UsageError("n must be positive");
        BenchRow row;
        row.n = n;
        row.solver = to_string(cfg.solver);
        row.instance_class = cfg.adversary == AdversaryId::None ? (cfg.realizable ? "realizable" : "general")
                                                                : "adversary:" + to_string(cfg.adversary);
        row.trials = cfg.trials;
        row.bound = vertex_bound(cfg.solver, n);
        row.verified = true;
        std::size_t lo = std::numeric_limits<std::size_t>::max();
        std::size_t hi = 0;
        double sum = 0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const std::uint64_t trial_seed = derive_seed(cfg.seed, n, t);
            std::size_t used = 0;
            bool ok = false;
            if (cfg.adversary == AdversaryId::None) {
                UsoVertexOracle oracle(random_instance(n, cfg.realizable, trial_seed));
                std::mt19937_64 rng(trial_seed);
                try {
                    const auto rep = run_sink_finder(sink_finder_for(cfg.solver, random_vector(n, rng)), oracle);
                    ok = rep.answer == oracle.instance().sink();
                } catch (const OracleMismatch&) {
                    ok = false;
                }
                used = oracle.query_count();
            } else {
                const DuelResult d = run_duel({n, cfg.solver, cfg.adversary, trial_seed});
                used = d.queries + 1;
                ok = d.passed();
            }
            lo = std::min(lo, used);
            hi = std::max(hi, used);
            sum += static_cast<double>(used);
            row.verified = row.verified && ok;
        }
        row.min_queries = lo;
        row.max_queries = hi;
        row.mean_queries = sum / static_cast<double>(cfg.trials);
        row.bound_respected = row.max_queries <= row.bound;
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Verification and counting

struct VerifyReport {
    std::size_t instances = 0;
    std::size_t realizable = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

namespace detail {
inline std::string face_description(const FaceViolation& f, std::size_t n) {
    std::string free;
    std::string fixed(n, '*');
    for (std::size_t i = 0; i < n; ++i) {
        if ((f.free_mask >> i) & 1U) {
            free += (free.empty() ? "" : ",") + std::to_string(i + 1);
        } else {
            fixed[i] = ((f.anchor >> i) & 1U) ? '1' : '0';
        }
    }
    return "face " + fixed + " (free dimensions {" + free + "}) has " + std::to_string(f.sinks) + " sinks";
}
}  // namespace detail

/// Structural checks on one instance. Legality, the edge rule, unique sinks
/// in every face, the parallel law and the stored branching are all checked;
/// realizability is counted, not required.
inline VerifyReport verify_instance(const InstanceFile& f) {
    VerifyReport rep;
    rep.instances = 1;
    const std::size_t n = f.n;
    if (n > kMaxUsoCheckDim) throw UsageError("verify supports n <= 8");
    const bool legal = is_legal_dig(f.matrix);
    if (!legal) rep.failures.push_back("matrix is not a legal dimension influence graph");
    const BitMatrix m = f.matrix;
    const std::uint64_t s = f.sink.to_integer();
    const OutmapFn o = [&m, s, n](std::uint64_t v) {
        return mat_vec_mul(m, BitVector::from_integer(n, v ^ s)).to_integer();
    };
    if (const auto c = find_edge_conflict(o, n)) {
        rep.failures.push_back("edge of dimension " + std::to_string(c->dim + 1) + " at vertex " +
                               BitVector::from_integer(n, c->vertex).to_string() + " is claimed by both ends");
    } else if (const auto face = find_face_violation(o, n)) {
        rep.failures.push_back(detail::face_description(*face, n));
    }
    if (const auto p = find_parallel_violation(o, m)) {
        rep.failures.push_back("parallel law fails for " + BitVector::from_integer(n, p->x).to_string() + " and " +
                               BitVector::from_integer(n, p->y).to_string());
    }
    if (legal && is_realizable_dig(m)) ++rep.realizable;
    if (f.branching && closure_of_branching(*f.branching).adjacency() != m) {
        rep.failures.push_back("stored branching does not generate the matrix");
    }
    return rep;
}

/// Every legal DIG on n <= 4 vertices with every sink.
inline VerifyReport verify_exhaustive(std::size_t n) {
    if (n == 0 || n > kMaxEnumeratedDigs) throw UsageError("exhaustive verification supports 1 <= n <= 4");
    VerifyReport rep;
    for (const auto& g : enumerate_legal_digs(n)) {
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
            const MatousekUso u(g, BitVector::from_integer(n, s));
            const VerifyReport one = verify_instance(make_instance_file(u));
            rep.instances += one.instances;
            rep.realizable += one.realizable;
            for (const auto& f : one.failures) {
                rep.failures.push_back(u.matrix().to_strings().front() + "... sink " + u.sink().to_string() + ": " + f);
            }
        }
    }
    return rep;
}

inline Json to_json(const VerifyReport& r) {
    return {{"instances", r.instances}, {"realizable", r.realizable}, {"failures", r.failures}, {"ok", r.ok()}};
}

struct CountReport {
    std::size_t n = 0;
    std::size_t branchings = 0;
    std::size_t legal_digs = 0;
    std::size_t realizable_digs = 0;
    std::size_t realizable_usos = 0;
    std::size_t total_usos = 0;
    /// 2^n (n+1)^(n-1)
    std::size_t formula = 0;
    bool matches() const { return realizable_usos == formula && branchings * (std::size_t{1} << n) == formula; }
};

inline std::size_t realizable_count_formula(std::size_t n) {
    std::size_t f = std::size_t{1} << n;
    for (std::size_t i = 1; i < n; ++i) f *= n + 1;
    return f;
}

inline CountReport count_instances(std::size_t n) {
    if (n == 0 || n > kMaxEnumeratedDigs) throw UsageError("count supports 1 <= n <= 4");
    CountReport c;
    c.n = n;
    c.branchings = enumerate_branchings(n).size();
    const auto digs = enumerate_legal_digs(n);
    c.legal_digs = digs.size();
    c.realizable_digs = static_cast<std::size_t>(
        std::count_if(digs.begin(), digs.end(), [](const auto& g) { return is_realizable_dig(g.adjacency()); }));
    c.realizable_usos = c.realizable_digs << n;
    c.total_usos = c.legal_digs << n;
    c.formula = realizable_count_formula(n);
    return c;
}

inline Json to_json(const CountReport& c) {
    return {{"n", c.n},
            {"branchings", c.branchings},
            {"legal_digs", c.legal_digs},
            {"realizable_digs", c.realizable_digs},
            {"realizable_usos", c.realizable_usos},
            {"total_usos", c.total_usos},
            {"formula_realizable_usos", c.formula},
            {"matches_formula", c.matches()}};
}

}  // namespace uso
