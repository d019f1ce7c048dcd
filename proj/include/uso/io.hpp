#pragma once

// File formats: instance files and reports as JSON, benchmark tables as CSV.
//
// Instance file:
//   { "branching": [parent labels, 0 = root]   (optional),
//     "matrix": ["row bits", ...],
//     "n": int,
//     "sink": "bits" }
// Bit strings list dimension 1 first.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "uso/gf2.hpp"
#include "uso/influence_graph.hpp"
#include "uso/matousek.hpp"
#include "uso/solvers.hpp"

namespace uso {

using Json = nlohmann::json;

/// Contents of an instance file, not yet checked for legality.
struct InstanceFile {
    std::size_t n = 0;
    BitMatrix matrix;
    BitVector sink;
    std::optional<Branching> branching;

    /// Throws std::invalid_argument if the matrix is not a legal DIG.
    MatousekUso to_uso() const { return MatousekUso(matrix, sink); }

    bool operator==(const InstanceFile&) const = default;
};

inline InstanceFile make_instance_file(const MatousekUso& u, std::optional<Branching> b = std::nullopt) {
    return {u.dimension(), u.matrix(), u.sink(), std::move(b)};
}

inline Json to_json(const InstanceFile& f) {
    Json j;
    j["n"] = f.n;
    j["matrix"] = f.matrix.to_strings();
    j["sink"] = f.sink.to_string();
    if (f.branching) j["branching"] = f.branching->parents();
    return j;
}

/// Shape errors (wrong lengths, bad characters, missing keys) throw
/// std::invalid_argument.
inline InstanceFile instance_from_json(const Json& j) {
    try {
        InstanceFile f;
        f.n = j.at("n").get<std::size_t>();
        if (f.n == 0) throw std::invalid_argument("n must be positive");
        const auto rows = j.at("matrix").get<std::vector<std::string>>();
        if (rows.size() != f.n) throw std::invalid_argument("matrix must have n rows");
        for (const auto& r : rows) {
            if (r.size() != f.n) throw std::invalid_argument("matrix rows must have n entries");
        }
        f.matrix = BitMatrix::parse(rows);
        f.sink = BitVector::parse(j.at("sink").get<std::string>());
        if (f.sink.size() != f.n) throw std::invalid_argument("sink must have n entries");
        if (j.contains("branching")) {
            auto parents = j.at("branching").get<std::vector<Dim>>();
            if (parents.size() != f.n) throw std::invalid_argument("branching must have n entries");
            f.branching = Branching(std::move(parents));
        }
        return f;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed instance: ") + e.what());
    }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline InstanceFile load_instance(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return instance_from_json(j);
}

inline Json to_json(const Transcript& t) {
    Json arr = Json::array();
    for (const auto& rec : t) arr.push_back({{"query", rec.query.to_string()}, {"reply", rec.reply.to_string()}});
    return arr;
}

inline Json to_json(const SolveReport& r, bool with_transcript) {
    Json j;
    j["answer"] = r.answer.to_string();
    j["queries"] = r.queries_used;
    if (with_transcript) j["transcript"] = to_json(r.transcript);
    return j;
}

// ---------------------------------------------------------------------------
// Benchmark rows

struct BenchRow {
    std::size_t n = 0;
    std::string solver;
    std::string instance_class;
    std::size_t trials = 0;
    std::size_t min_queries = 0;
    double mean_queries = 0.0;
    std::size_t max_queries = 0;
    std::size_t bound = 0;
    bool bound_respected = false;
    bool verified = false;

    bool operator==(const BenchRow&) const = default;
};

inline constexpr std::string_view kBenchHeader =
    "n,solver,class,trials,min_queries,mean_queries,max_queries,bound,bound_respected,verified";

namespace detail {
/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view s) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad number '" + std::string(s) + "'");
    }
    return v;
}

inline bool parse_bool(std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument("bad boolean '" + std::string(s) + "'");
}
}  // namespace detail

inline std::string to_csv(const std::vector<BenchRow>& rows) {
    std::string out(kBenchHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.n) + ',' + r.solver + ',' + r.instance_class + ',' + std::to_string(r.trials) + ',' +
               std::to_string(r.min_queries) + ',' + detail::format_double(r.mean_queries) + ',' +
               std::to_string(r.max_queries) + ',' + std::to_string(r.bound) + ',' +
               (r.bound_respected ? "true" : "false") + ',' + (r.verified ? "true" : "false") + '\n';
    }
    return out;
}

inline std::vector<BenchRow> parse_bench_csv(std::string_view text) {
    std::vector<BenchRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kBenchHeader) throw std::invalid_argument("missing bench CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 10) throw std::invalid_argument("bench CSV row needs 10 fields: " + line);
        BenchRow r;
        r.n = detail::parse_number<std::size_t>(f[0]);
        r.solver = f[1];
        r.instance_class = f[2];
        r.trials = detail::parse_number<std::size_t>(f[3]);
        r.min_queries = detail::parse_number<std::size_t>(f[4]);
        r.mean_queries = detail::parse_number<double>(f[5]);
        r.max_queries = detail::parse_number<std::size_t>(f[6]);
        r.bound = detail::parse_number<std::size_t>(f[7]);
        r.bound_respected = detail::parse_bool(f[8]);
        r.verified = detail::parse_bool(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Json to_json(const BenchRow& r) {
    return {{"n", r.n},
            {"solver", r.solver},
            {"class", r.instance_class},
            {"trials", r.trials},
            {"min_queries", r.min_queries},
            {"mean_queries", r.mean_queries},
            {"max_queries", r.max_queries},
            {"bound", r.bound},
            {"bound_respected", r.bound_respected},
            {"verified", r.verified}};
}

}  // namespace uso
