#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nestlr/design.hpp"
#include "nestlr/estimators.hpp"

namespace nestlr {

using json = nlohmann::json;

// Shortest round-trip decimal rendering; keeps output files byte-stable.
inline std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

// ---------------------------------------------------------------------------
// Design solution JSON
// ---------------------------------------------------------------------------

inline json design_to_json(const DesignSolution& d) {
    json j;
    j["c_star"] = d.base_allocation;
    j["N_star"] = d.real_allocation;
    j["integer_allocation"] = d.integer_allocation;
    j["target_N"] = d.target_n;
    j["delta"] = d.delta;
    j["budget"] = d.budget;
    json gamma = json::array();
    std::size_t m = d.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t jj = 0; jj < m; ++jj) {
            double g = d.gamma_at(i, jj);
            if (g > 0.0) gamma.push_back({i, jj, g});
        }
    }
    j["gamma"] = std::move(gamma);
    return j;
}

inline DesignSolution design_from_json(const json& j) {
    reject_unknown_keys(j, {"c_star", "N_star", "integer_allocation", "target_N", "delta",
                            "budget", "gamma"},
                        "design");
    DesignSolution d;
    d.base_allocation = j.at("c_star").get<std::vector<double>>();
    d.real_allocation = j.at("N_star").get<std::vector<double>>();
    d.integer_allocation = j.at("integer_allocation").get<std::vector<std::size_t>>();
    d.target_n = j.at("target_N").get<double>();
    d.delta = j.at("delta").get<double>();
    d.budget = j.at("budget").get<std::size_t>();
    std::size_t m = d.base_allocation.size();
    d.gamma.assign(m * m, 0.0);
    for (const auto& e : j.at("gamma")) {
        d.gamma[e.at(0).get<std::size_t>() * m + e.at(1).get<std::size_t>()] =
            e.at(2).get<double>();
    }
    return d;
}

// ---------------------------------------------------------------------------
// Replication pool CSV (scenario id, replication id, inputs..., output)
// ---------------------------------------------------------------------------

inline void pool_to_csv(const ReplicationPool& pool, std::ostream& os) {
    os << "scenario,replication";
    for (std::size_t l = 0; l < pool.dim; ++l) os << ",x" << l;
    os << ",output\n";
    for (std::size_t j = 0; j < pool.pools.size(); ++j) {
        const auto& sp = pool.pools[j];
        for (std::size_t k = 0; k < sp.n_reps; ++k) {
            os << j << ',' << k;
            for (std::size_t l = 0; l < pool.dim; ++l) os << ',' << fmt(sp.inputs[k * pool.dim + l]);
            os << ',' << fmt(sp.outputs[k]) << '\n';
        }
    }
}

inline ReplicationPool pool_from_csv(std::istream& is, std::size_t n_scenarios,
                                     std::size_t dim) {
    ReplicationPool pool;
    pool.dim = dim;
    pool.pools.resize(n_scenarios);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("pool_from_csv: empty stream");
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != dim + 3) throw std::runtime_error("pool_from_csv: bad row");
        auto j = static_cast<std::size_t>(vals[0]);
        if (j >= n_scenarios) throw std::runtime_error("pool_from_csv: scenario out of range");
        auto& sp = pool.pools[j];
        for (std::size_t l = 0; l < dim; ++l) sp.inputs.push_back(vals[2 + l]);
        sp.outputs.push_back(vals[2 + dim]);
        sp.n_reps += 1;
    }
    return pool;
}

// ---------------------------------------------------------------------------
// CSV writer with a provenance comment line
// ---------------------------------------------------------------------------

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header, std::uint64_t config_hash,
              std::uint64_t seed)
        : os_(path) {
        if (!os_) throw std::runtime_error("cannot open " + path);
        os_ << "# config_hash=" << config_hash << " seed=" << seed << "\n";
        os_ << header << "\n";
    }

    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ","), first = false, write_field(fields)), ...);
        os_ << "\n";
    }

  private:
    void write_field(double v) { os_ << fmt(v); }
    void write_field(const std::string& s) { os_ << s; }
    void write_field(const char* s) { os_ << s; }
    template <typename T>
    void write_field(const T& v) {
        os_ << v;
    }
    std::ofstream os_;
};

}  // namespace nestlr
