#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpp/errors.hpp"
#include "lpp/field.hpp"
#include "lpp/lab.hpp"
#include "lpp/profile.hpp"
#include "lpp/scaled.hpp"

namespace lpp {

using json = nlohmann::json;

// 17 significant digits: enough for a bit-exact double round trip.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail(ErrorKind::io, "not a number: '" + s + "'");
    }
    if (used != s.size()) fail(ErrorKind::io, "trailing characters in number: '" + s + "'");
    return v;
}

// NaN and infinities have no JSON literal; they become null.
inline json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    return out;
}

inline std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
    return in;
}

// ---------------------------------------------------------------------------
// Regions and fields

inline json region_to_json(const Region& r) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Rectangle>) {
                return {{"kind", "rectangle"}, {"a_lo", s.a_lo}, {"a_hi", s.a_hi}, {"b_lo", s.b_lo}, {"b_hi", s.b_hi}};
            } else {
                json j{{"kind", "diagonal_strip"}, {"sum_lo", s.sum_lo}, {"sum_hi", s.sum_hi},
                       {"diff_lo", s.diff_lo}, {"diff_hi", s.diff_hi}};
                j["clip"] = {json_number(s.clip.a_lo), json_number(s.clip.a_hi), json_number(s.clip.b_lo),
                             json_number(s.clip.b_hi)};
                return j;
            }
        },
        r.shape());
}

inline Region region_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind");
        if (kind == "rectangle") {
            return Region::rectangle(j.at("a_lo"), j.at("a_hi"), j.at("b_lo"), j.at("b_hi"));
        }
        if (kind == "diagonal_strip") {
            Rectangle clip = DiagonalStrip{}.clip;
            if (j.contains("clip")) {
                const auto& c = j.at("clip");
                auto get = [&](std::size_t i, double dflt) { return c.at(i).is_null() ? dflt : c.at(i).get<double>(); };
                const double inf = std::numeric_limits<double>::infinity();
                clip = Rectangle{get(0, -inf), get(1, inf), get(2, -inf), get(3, inf)};
            }
            return Region::clipped_band(j.at("sum_lo"), j.at("sum_hi"), j.at("diff_lo"), j.at("diff_hi"), clip);
        }
        fail(ErrorKind::io, "unknown region kind '" + kind + "'");
    } catch (const json::exception& e) {
        fail(ErrorKind::io, std::string("malformed region: ") + e.what());
    }
}

inline std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

// CSV rows "a,b" plus a JSON sidecar {region, rate, seed, count}. Keys of
// `extra` are merged into the sidecar.
inline void write_field(const PointField& field, const std::string& csv_path, const json& extra = json::object()) {
    auto out = open_for_write(csv_path);
    out << "a,b\n";
    for (const auto& p : field.points()) out << format_double(p.a) << ',' << format_double(p.b) << '\n';
    if (!out) fail(ErrorKind::io, "write failed: " + csv_path);
    json meta{{"region", region_to_json(field.region())},
              {"rate", field.rate()},
              {"seed", field.seed()},
              {"count", field.size()},
              {"version", version}};
    meta.update(extra);
    auto side = open_for_write(sidecar_path(csv_path));
    side << meta.dump(2) << '\n';
}

// Loads a field written by write_field. Coordinate collisions are rejected.
inline PointField read_field(const std::string& csv_path) {
    json meta;
    try {
        auto side = open_for_read(sidecar_path(csv_path));
        meta = json::parse(side);
    } catch (const json::exception& e) {
        fail(ErrorKind::io, std::string("malformed field sidecar: ") + e.what());
    }
    auto in = open_for_read(csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "a,b") fail(ErrorKind::io, "field CSV must start with header 'a,b'");
    std::vector<PlanePoint> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) fail(ErrorKind::io, "bad field row: '" + line + "'");
        pts.push_back({parse_double(line.substr(0, comma)), parse_double(line.substr(comma + 1))});
    }
    const std::size_t count = meta.value("count", pts.size());
    if (count != pts.size()) fail(ErrorKind::io, "field sidecar count does not match CSV rows");
    return PointField::from_points(std::move(pts), region_from_json(meta.at("region")),
                                   meta.value("seed", std::uint64_t{0}), meta.value("rate", 1.0));
}

// ---------------------------------------------------------------------------
// Polymers and profiles

inline void write_polymer_csv(const Polymer& p, std::ostream& out) {
    out << "t,x\n";
    for (const auto& q : p.vertices()) out << format_double(q.t) << ',' << format_double(q.x) << '\n';
}

// Rows "d_i,X_i" for the interpolation nodes, d_0 = 1 through d_m = 2.
inline void write_profile_csv(const WeightProfile& profile, std::ostream& out) {
    out << "d_i,X_i\n";
    for (const auto& [d, x] : profile.nodes()) out << format_double(d) << ',' << format_double(x) << '\n';
}

inline json profile_header(const WeightProfile& profile, double k_trunc) {
    return {{"n", profile.n}, {"seed", profile.field_seed}, {"k_trunc", k_trunc}, {"version", version}};
}

// ---------------------------------------------------------------------------
// Configs

inline std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["n_values"] = c.n_values;
    j["t_values"] = c.t_values;
    j["s_or_k_values"] = c.s_or_k_values;
    j["replicas"] = c.replicas;
    j["base_seed"] = c.base_seed;
    j["k_trunc"] = c.k_trunc;
    j["psi"] = c.psi;
    j["refine"] = c.refine;
    j["grid"] = c.grid;
    j["rate"] = c.rate;
    j["max_points"] = c.max_points;
    j["tw_dim"] = c.tw_dim;
    return j;
}

// Plain "key = value" lines; '#' starts a comment. Later keys win.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::invalid_argument, origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) fail(ErrorKind::invalid_argument, origin + ":" + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::map<std::string, std::string> read_key_values(const std::string& path) {
    auto in = open_for_read(path);
    return parse_key_values(in, path);
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) continue;
        out.push_back(parse_double(item.substr(b, e - b + 1)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Campaign results

namespace detail {

inline std::vector<std::string> union_keys(const std::vector<ReplicaResult>& results, bool params) {
    std::set<std::string> keys;
    for (const auto& r : results) {
        for (const auto& [k, v] : params ? r.params : r.statistics) keys.insert(k);
    }
    return {keys.begin(), keys.end()};
}

} // namespace detail

// One row per replica; columns param_index, replica_index, derived_seed,
// parameters (sorted), statistics (sorted). A missing value is an empty
// cell. With no statistics at all only the header is written.
inline void emit_results_csv(const std::vector<ReplicaResult>& results, std::ostream& out) {
    const auto pkeys = detail::union_keys(results, true);
    const auto skeys = detail::union_keys(results, false);
    out << "param_index,replica_index,derived_seed";
    for (const auto& k : pkeys) out << ',' << k;
    for (const auto& k : skeys) out << ',' << k;
    out << '\n';
    if (skeys.empty()) return;
    for (const auto& r : results) {
        out << r.param_index << ',' << r.replica_index << ',' << r.derived_seed;
        for (const auto& k : pkeys) {
            out << ',';
            if (auto it = r.params.find(k); it != r.params.end()) out << format_double(it->second);
        }
        for (const auto& k : skeys) {
            out << ',';
            if (auto it = r.statistics.find(k); it != r.statistics.end()) out << format_double(it->second);
        }
        out << '\n';
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

// Inverse of emit_results_csv. Columns other than the three index columns
// are split into parameters ("n", "t") and statistics.
inline std::vector<ReplicaResult> parse_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::io, "results CSV is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "param_index" || header[1] != "replica_index" || header[2] != "derived_seed") {
        fail(ErrorKind::io, "results CSV header must start with param_index,replica_index,derived_seed");
    }
    std::vector<ReplicaResult> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) fail(ErrorKind::io, "results CSV row has the wrong number of cells");
        ReplicaResult r;
        r.param_index = std::stoull(cells[0]);
        r.replica_index = std::stoull(cells[1]);
        r.derived_seed = std::stoull(cells[2]);
        for (std::size_t i = 3; i < cells.size(); ++i) {
            if (cells[i].empty()) continue;
            const double v = parse_double(cells[i]);
            if (header[i] == "n" || header[i] == "t") r.params[header[i]] = v;
            else r.statistics[header[i]] = v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline json results_to_json(const std::vector<ReplicaResult>& results) {
    json arr = json::array();
    for (const auto& r : results) {
        json stats = json::object();
        for (const auto& [k, v] : r.statistics) stats[k] = json_number(v);
        arr.push_back({{"param_index", r.param_index},
                       {"replica_index", r.replica_index},
                       {"derived_seed", r.derived_seed},
                       {"params", r.params},
                       {"statistics", stats}});
    }
    return arr;
}

inline json fit_to_json(const ExponentFit& f) {
    json pts = json::array();
    for (auto [x, y] : f.points) pts.push_back({json_number(x), json_number(y)});
    return {{"slope", json_number(f.slope)},
            {"intercept", json_number(f.intercept)},
            {"stderr", json_number(f.stderr_slope)},
            {"r_squared", json_number(f.r_squared)},
            {"points", pts}};
}

inline json summary_to_json(const Summary& s, const ExperimentConfig& c) {
    json j;
    j["experiment"] = s.experiment;
    j["version"] = version;
    j["config"] = config_to_json(c);
    j["fits"] = json::array();
    for (const auto& f : s.fits) {
        json e = fit_to_json(f.fit);
        e["name"] = f.name;
        j["fits"].push_back(e);
    }
    j["tails"] = json::array();
    for (const auto& t : s.tails) {
        json e{{"name", t.name}, {"sample_size", t.estimate.sample_size}};
        e["thresholds"] = t.estimate.thresholds;
        e["survival_probs"] = t.estimate.survival_probs;
        e["exponent"] = t.fit ? json_number(t.fit->exponent) : json(nullptr);
        j["tails"].push_back(e);
    }
    j["checks"] = json::array();
    for (const auto& ch : s.checks) {
        j["checks"].push_back({{"name", ch.name},
                               {"value", json_number(ch.value)},
                               {"lo", json_number(ch.lo)},
                               {"hi", json_number(ch.hi)},
                               {"pass", ch.pass},
                               {"note", ch.note}});
    }
    j["all_pass"] = s.all_pass();
    j["warnings"] = s.warnings;
    json series = json::object();
    for (const auto& [name, rows] : s.series) {
        json arr = json::array();
        for (auto [x, y] : rows) arr.push_back({json_number(x), json_number(y)});
        series[name] = arr;
    }
    j["series"] = series;
    return j;
}

// Structural check of a summary document; returns the problems found.
inline std::vector<std::string> summary_schema_errors(const json& j) {
    std::vector<std::string> errs;
    auto need = [&](const json& obj, const char* key, auto pred, const char* what) {
        if (!obj.is_object() || !obj.contains(key) || !pred(obj.at(key))) {
            errs.push_back(std::string("field '") + key + "' missing or not " + what);
            return false;
        }
        return true;
    };
    auto is_str = [](const json& v) { return v.is_string(); };
    auto is_arr = [](const json& v) { return v.is_array(); };
    auto is_obj = [](const json& v) { return v.is_object(); };
    auto is_bool = [](const json& v) { return v.is_boolean(); };
    auto is_num_or_null = [](const json& v) { return v.is_number() || v.is_null(); };
    need(j, "experiment", is_str, "a string");
    need(j, "version", is_str, "a string");
    if (need(j, "config", is_obj, "an object")) {
        const auto& c = j.at("config");
        need(c, "experiment", is_str, "a string");
        need(c, "n_values", is_arr, "an array");
        need(c, "t_values", is_arr, "an array");
        need(c, "s_or_k_values", is_arr, "an array");
        need(c, "replicas", [](const json& v) { return v.is_number_unsigned() && v.get<std::uint64_t>() >= 1; },
             "a positive integer");
        need(c, "base_seed", [](const json& v) { return v.is_number_unsigned(); }, "an unsigned integer");
        for (const char* k : {"k_trunc", "psi", "rate", "max_points"}) need(c, k, is_num_or_null, "a number");
    }
    if (need(j, "fits", is_arr, "an array")) {
        for (const auto& f : j.at("fits")) {
            need(f, "name", is_str, "a string");
            for (const char* k : {"slope", "intercept", "stderr", "r_squared"}) need(f, k, is_num_or_null, "a number");
            if (need(f, "points", is_arr, "an array") && f.at("points").size() < 3) errs.push_back("fit with < 3 points");
        }
    }
    if (need(j, "tails", is_arr, "an array")) {
        for (const auto& t : j.at("tails")) {
            need(t, "name", is_str, "a string");
            need(t, "thresholds", is_arr, "an array");
            need(t, "survival_probs", is_arr, "an array");
            need(t, "exponent", is_num_or_null, "a number");
        }
    }
    if (need(j, "checks", is_arr, "an array")) {
        for (const auto& ch : j.at("checks")) {
            need(ch, "name", is_str, "a string");
            need(ch, "value", is_num_or_null, "a number");
            need(ch, "lo", is_num_or_null, "a number");
            need(ch, "hi", is_num_or_null, "a number");
            need(ch, "pass", is_bool, "a boolean");
        }
    }
    need(j, "all_pass", is_bool, "a boolean");
    need(j, "warnings", is_arr, "an array");
    need(j, "series", is_obj, "an object");
    return errs;
}

} // namespace lpp
