#pragma once

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpp/chains.hpp"
#include "lpp/errors.hpp"
#include "lpp/field.hpp"
#include "lpp/io.hpp"
#include "lpp/lab.hpp"
#include "lpp/profile.hpp"
#include "lpp/scaled.hpp"
#include "lpp/suites.hpp"

namespace lpp::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_infeasible = 2;
inline constexpr int exit_selftest_failed = 3;

inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_region:
    case ErrorKind::io: return exit_usage;
    default: return exit_infeasible;
    }
}

struct OptionSpec {
    const char* name;
    const char* fallback; // "" means unset
    const char* help;
};

struct CommandSpec {
    const char* name;
    const char* help;
    const char* default_format;
    std::vector<OptionSpec> options;
};

inline const std::vector<OptionSpec>& common_options() {
    static const std::vector<OptionSpec> opts{
        {"out", "", "output file (default: stdout)"},
        {"format", "", "csv or json"},
        {"workers", "", "worker threads (fallback: LPP_WORKERS, then 1)"},
    };
    return opts;
}

inline const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> cmds{
        {"sample", "sample a Poisson field and write it as CSV plus a JSON sidecar", "csv",
         {{"region", "", "rectangle a_lo,a_hi,b_lo,b_hi"},
          {"strip", "", "diagonal strip n,t_max,half_width"},
          {"rate", "1", "intensity"},
          {"seed", "0", "64-bit seed"}}},
        {"energy", "last passage value between two unscaled points", "json",
         {{"field", "", "field CSV written by sample"},
          {"u", "", "start a,b"},
          {"v", "", "end a,b"},
          {"allowed", "", "optional rectangle a_lo,a_hi,b_lo,b_hi restricting the path"}}},
        {"geodesic", "uppermost and lowermost geodesics between unscaled points", "json",
         {{"field", "", "field CSV"}, {"u", "", "start a,b"}, {"v", "", "end a,b"},
          {"side", "both", "uppermost, lowermost or both"}}},
        {"polymer", "extremal polymer between scaled points", "csv",
         {{"field", "", "field CSV (default: sample a truncated window)"},
          {"n", "", "scaling parameter"},
          {"u", "", "start x,t"},
          {"v", "", "end x,t"},
          {"side", "leftmost", "leftmost or rightmost"},
          {"seed", "0", "seed when sampling"},
          {"k-trunc", "12", "window half-width in units of lifetime^(2/3)"},
          {"rate", "1", "intensity when sampling"}}},
        {"profile", "jump structure of X_n(t) on [1, 2]", "csv",
         {{"field", "", "field CSV (default: sample a truncated window)"},
          {"n", "", "scaling parameter"},
          {"seed", "0", "seed when sampling"},
          {"k-trunc", "12", "window half-width in units of lifetime^(2/3)"},
          {"rate", "1", "intensity when sampling"}}},
        {"mtf", "mesh lower bound for the maximum transversal fluctuation", "json",
         {{"field", "", "field CSV (default: sample a truncated window)"},
          {"n", "", "scaling parameter"},
          {"t", "", "maximal lifetime in (0, 1]"},
          {"psi", "4", "inverse slope bound"},
          {"refine", "4", "mesh refinement"},
          {"seed", "0", "seed when sampling"},
          {"k-trunc", "12", "window half-width in units of t^(2/3)"},
          {"rate", "1", "intensity when sampling"}}},
        {"campaign", "run a Monte Carlo campaign", "csv",
         {{"experiment", "", "modulus, weight_increment, mtf_scaling, tf_tail, weight_tail, curvature, "
                             "tw_convergence, scaling_principle or min_tf_lower"},
          {"n", "", "comma-separated n values"},
          {"t", "1", "comma-separated t values"},
          {"s", "", "comma-separated thresholds, half-widths or offsets"},
          {"replicas", "1", "replicas per parameter point"},
          {"seed", "0", "base seed"},
          {"k-trunc", "12", "sampling window half-width in units of lifetime^(2/3)"},
          {"psi", "4", "inverse slope bound"},
          {"refine", "4", "mtf mesh refinement"},
          {"grid", "1000", "modulus grid"},
          {"rate", "1", "intensity"},
          {"max-points", "5e7", "refuse fields expected to exceed this many points"},
          {"tw-dim", "400", "matrix size of the Tracy-Widom reference"},
          {"summary", "", "summary JSON path (default: <out>.summary.json)"}}},
        {"selftest", "exact invariant suites on random small instances", "json",
         {{"instances", "200", "instances per suite"}, {"seed", "1", "seed"}}},
    };
    return cmds;
}

namespace detail {

inline std::vector<double> numbers(const std::string& key, const std::string& text, std::size_t count) {
    std::vector<double> v;
    try {
        v = parse_double_list(text);
    } catch (const Error&) {
        fail(ErrorKind::invalid_argument, "--" + key + ": expected numbers, got '" + text + "'");
    }
    if (count != 0 && v.size() != count) {
        fail(ErrorKind::invalid_argument, "--" + key + " expects " + std::to_string(count) + " comma-separated numbers");
    }
    return v;
}

struct Args {
    std::map<std::string, std::string> values;

    bool has(const std::string& k) const {
        auto it = values.find(k);
        return it != values.end() && !it->second.empty();
    }
    const std::string& str(const std::string& k) const {
        if (!has(k)) fail(ErrorKind::invalid_argument, "missing required option --" + k);
        return values.at(k);
    }
    double real(const std::string& k) const { return numbers(k, str(k), 1)[0]; }
    std::uint64_t u64(const std::string& k) const {
        const auto& s = str(k);
        if (s.find_first_not_of("0123456789") != std::string::npos) {
            fail(ErrorKind::invalid_argument, "--" + k + ": expected a non-negative integer");
        }
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_argument, "--" + k + ": integer out of range");
        }
    }
    PlanePoint plane(const std::string& k) const {
        const auto v = numbers(k, str(k), 2);
        return {v[0], v[1]};
    }
    ScaledPoint scaled(const std::string& k) const {
        const auto v = numbers(k, str(k), 2);
        return {v[0], v[1]};
    }
};

// Everything except the worker count, which never changes results.
inline json echo(const std::string& command, const Args& a) {
    json cfg = json::object();
    for (const auto& [k, v] : a.values) {
        if (k != "workers" && k != "out") cfg[k] = v;
    }
    return {{"command", command}, {"version", version}, {"config", cfg}};
}

class Output {
public:
    Output(const Args& a, std::ostream& stdout_stream) : stdout_(stdout_stream) {
        if (a.has("out")) {
            path_ = a.str("out");
            file_.emplace(open_for_write(*path_));
        }
    }
    std::ostream& stream() { return file_ ? static_cast<std::ostream&>(*file_) : stdout_; }
    const std::optional<std::string>& path() const { return path_; }
    void finish() {
        if (file_) {
            file_->flush();
            if (!*file_) fail(ErrorKind::io, "write failed: " + *path_);
        }
    }

private:
    std::ostream& stdout_;
    std::optional<std::string> path_;
    std::optional<std::ofstream> file_;
};

inline std::string format_of(const Args& a, const CommandSpec& spec) {
    const std::string f = a.has("format") ? a.str("format") : spec.default_format;
    if (f != "csv" && f != "json") fail(ErrorKind::invalid_argument, "--format must be csv or json");
    return f;
}

inline void require_covered(const PointField& f, const PlanePoint& p, const char* which) {
    if (!f.region().contains(p)) {
        fail(ErrorKind::region_too_small, std::string("endpoint ") + which + " lies outside the field region");
    }
}

inline json chain_points(const Chain& c) {
    json arr = json::array();
    for (const auto& p : c.interior) arr.push_back({p.a, p.b});
    return arr;
}

inline PointField field_or_window(const Args& a, double n, const ScaledPoint& u, const ScaledPoint& v) {
    if (a.has("field")) return read_field(a.str("field"));
    return sample_field(truncated_window(n, u, v, a.real("k-trunc")), a.real("rate"), a.u64("seed"));
}

// ---------------------------------------------------------------------------

inline int cmd_sample(const Args& a, std::ostream& out) {
    Region region = Region::rectangle(0, 1, 0, 1);
    if (a.has("region") == a.has("strip")) fail(ErrorKind::invalid_argument, "give exactly one of --region or --strip");
    if (a.has("region")) {
        const auto r = numbers("region", a.str("region"), 4);
        region = Region::rectangle(r[0], r[1], r[2], r[3]);
    } else {
        const auto s = numbers("strip", a.str("strip"), 3);
        region = Region::diagonal_strip(s[0], s[1], s[2]);
    }
    const auto field = sample_field(region, a.real("rate"), a.u64("seed"));
    if (a.has("out")) {
        write_field(field, a.str("out"), {{"invocation", echo("sample", a)}});
        json meta = echo("sample", a);
        meta["count"] = field.size();
        meta["out"] = a.str("out");
        meta["sidecar"] = sidecar_path(a.str("out"));
        out << meta.dump() << '\n';
    } else {
        out << "a,b\n";
        for (const auto& p : field.points()) out << format_double(p.a) << ',' << format_double(p.b) << '\n';
    }
    return exit_ok;
}

inline int cmd_energy(const Args& a, Output& o) {
    const auto field = read_field(a.str("field"));
    const PlanePoint u = a.plane("u"), v = a.plane("v");
    require_covered(field, u, "u");
    require_covered(field, v, "v");
    json doc = echo("energy", a);
    doc["energy"] = energy(field, u, v);
    if (a.has("allowed")) {
        const auto r = numbers("allowed", a.str("allowed"), 4);
        doc["constrained_energy"] = constrained_energy(field, u, v, Region::rectangle(r[0], r[1], r[2], r[3]));
    }
    o.stream() << doc.dump() << '\n';
    return exit_ok;
}

inline int cmd_geodesic(const Args& a, Output& o, const std::string& format) {
    const auto field = read_field(a.str("field"));
    const PlanePoint u = a.plane("u"), v = a.plane("v");
    require_covered(field, u, "u");
    require_covered(field, v, "v");
    const std::string side = a.str("side");
    if (side != "both" && side != "uppermost" && side != "lowermost") {
        fail(ErrorKind::invalid_argument, "--side must be uppermost, lowermost or both");
    }
    const GeodesicSolver solver(field, u, v);
    std::vector<std::pair<std::string, Chain>> chains;
    if (side != "lowermost") chains.emplace_back("uppermost", solver.uppermost());
    if (side != "uppermost") chains.emplace_back("lowermost", solver.lowermost());
    if (format == "csv") {
        o.stream() << "side,a,b\n";
        for (const auto& [name, c] : chains) {
            for (const auto& p : c.interior) o.stream() << name << ',' << format_double(p.a) << ',' << format_double(p.b) << '\n';
        }
    } else {
        json doc = echo("geodesic", a);
        doc["energy"] = solver.energy();
        for (const auto& [name, c] : chains) doc[name] = chain_points(c);
        o.stream() << doc.dump() << '\n';
    }
    return exit_ok;
}

inline int cmd_polymer(const Args& a, Output& o, const std::string& format) {
    const double n = a.real("n");
    const ScaledPoint u = a.scaled("u"), v = a.scaled("v");
    const std::string side_name = a.str("side");
    if (side_name != "leftmost" && side_name != "rightmost") fail(ErrorKind::invalid_argument, "--side must be leftmost or rightmost");
    if (!(u.t < v.t)) fail(ErrorKind::invalid_argument, "polymer needs u.t < v.t");
    if (!compatible(n, u, v)) fail(ErrorKind::incompatible_endpoints, "endpoints are not n-compatible");
    const auto field = field_or_window(a, n, u, v);
    const Side side = side_name == "leftmost" ? Side::leftmost : Side::rightmost;
    const Polymer p = polymer(field, n, u, v, side);
    if (format == "csv") {
        write_polymer_csv(p, o.stream());
        if (o.path()) {
            json meta = echo("polymer", a);
            meta["field_seed"] = field.seed();
            auto side_file = open_for_write(sidecar_path(*o.path()));
            side_file << meta.dump(2) << '\n';
        }
    } else {
        json doc = echo("polymer", a);
        doc["energy"] = p.chain().energy();
        doc["weight"] = weight_from_energy(n, p.chain().energy(), v.t - u.t);
        doc["transversal_fluctuation"] = transversal_fluctuation(p);
        json verts = json::array();
        for (const auto& q : p.vertices()) verts.push_back({q.t, q.x});
        doc["vertices"] = verts;
        o.stream() << doc.dump() << '\n';
    }
    return exit_ok;
}

inline int cmd_profile(const Args& a, Output& o, const std::string& format) {
    const double n = a.real("n");
    const auto field = field_or_window(a, n, {0, 0}, {0, 2});
    const auto prof = weight_profile(field, n);
    json header = profile_header(prof, a.real("k-trunc"));
    if (a.has("field")) header["k_trunc"] = nullptr; // unknown for a supplied field
    if (format == "csv") {
        write_profile_csv(prof, o.stream());
        if (o.path()) {
            json meta = echo("profile", a);
            meta["header"] = header;
            auto side_file = open_for_write(sidecar_path(*o.path()));
            side_file << meta.dump(2) << '\n';
        }
    } else {
        json doc = echo("profile", a);
        doc["header"] = header;
        json nodes = json::array();
        for (const auto& [d, x] : prof.nodes()) nodes.push_back({d, x});
        doc["nodes"] = nodes;
        o.stream() << doc.dump() << '\n';
    }
    return exit_ok;
}

inline int cmd_mtf(const Args& a, Output& o) {
    const double n = a.real("n"), t = a.real("t"), psi = a.real("psi");
    const long refine = static_cast<long>(a.real("refine"));
    std::optional<PointField> field;
    if (a.has("field")) {
        field.emplace(read_field(a.str("field")));
    } else {
        ExperimentConfig c;
        c.experiment = Experiment::mtf_scaling;
        c.k_trunc = a.real("k-trunc");
        require(t > 0 && t <= 1, ErrorKind::invalid_argument, "--t must lie in (0, 1]");
        field.emplace(sample_field(replica_regions(c, {n, t})[0], a.real("rate"), a.u64("seed")));
    }
    json doc = echo("mtf", a);
    doc["mtf_lower_bound"] = mtf_estimate(*field, n, t, psi, static_cast<int>(refine));
    o.stream() << doc.dump() << '\n';
    return exit_ok;
}

inline ExperimentConfig campaign_config(const Args& a) {
    ExperimentConfig c;
    c.experiment = parse_experiment(a.str("experiment"));
    c.n_values = numbers("n", a.str("n"), 0);
    c.t_values = a.has("t") ? numbers("t", a.str("t"), 0) : std::vector<double>{};
    c.s_or_k_values = a.has("s") ? numbers("s", a.str("s"), 0) : std::vector<double>{};
    c.replicas = a.u64("replicas");
    c.base_seed = a.u64("seed");
    c.k_trunc = a.real("k-trunc");
    c.psi = a.real("psi");
    c.refine = static_cast<int>(a.u64("refine"));
    c.grid = static_cast<int>(a.u64("grid"));
    c.rate = a.real("rate");
    c.max_points = a.real("max-points");
    c.tw_dim = a.u64("tw-dim");
    return c;
}

inline int cmd_campaign(const Args& a, Output& o, const std::string& format, std::ostream& err) {
    const auto config = campaign_config(a);
    std::optional<std::size_t> requested;
    if (a.has("workers")) requested = a.u64("workers");
    const std::size_t workers = resolve_workers(requested);
    err << "campaign " << to_string(config.experiment) << ": " << parameter_points(config).size()
        << " parameter point(s) x " << config.replicas << " replica(s), " << workers << " worker(s)\n";
    const auto results = run_campaign(config, workers);
    const auto summary = summarize(config, results);
    json sum = summary_to_json(summary, config);
    sum["invocation"] = echo("campaign", a);

    if (format == "csv") {
        emit_results_csv(results, o.stream());
    } else {
        json doc{{"experiment", to_string(config.experiment)},
                 {"version", version},
                 {"config", config_to_json(config)},
                 {"results", results_to_json(results)}};
        o.stream() << doc.dump() << '\n';
    }
    std::optional<std::string> summary_path;
    if (a.has("summary")) summary_path = a.str("summary");
    else if (o.path()) summary_path = *o.path() + ".summary.json";
    if (summary_path) {
        auto f = open_for_write(*summary_path);
        f << sum.dump(2) << '\n';
    } else {
        err << sum.dump(2) << '\n';
    }
    for (const auto& w : summary.warnings) err << "warning: " << w << '\n';
    return exit_ok;
}

inline int cmd_selftest(const Args& a, Output& o) {
    const std::size_t count = a.u64("instances");
    const std::uint64_t seed = a.u64("seed");
    std::vector<suites::SuiteResult> results{
        suites::oracle_equivalence(count, seed),
        suites::geodesic_extremality(count, seed + 1),
        suites::polymer_ordering(std::max<std::size_t>(count / 4, 1), seed + 2),
        suites::sandwiching(std::max<std::size_t>(count / 4, 1), seed + 3),
        suites::concatenation_additivity(count, seed + 4),
        suites::superadditivity(std::max<std::size_t>(count / 4, 1), seed + 5),
    };
    json doc = echo("selftest", a);
    json arr = json::array();
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.ok();
        arr.push_back({{"suite", r.name}, {"instances", r.instances}, {"violations", r.violations},
                       {"first_violation", r.first_violation}});
    }
    doc["suites"] = arr;
    doc["pass"] = ok;
    o.stream() << doc.dump() << '\n';
    return ok ? exit_ok : exit_selftest_failed;
}

// "--config FILE" or "--config=FILE", if present.
inline std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

} // namespace detail

// Entry point. Config-file keys are inserted ahead of the command-line
// flags, and every option keeps its last value, so flags override the file.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    CLI::App app{"Poisson last passage percolation laboratory", "lppsim"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, CLI::App*> subs;
    for (const auto& spec : commands()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        subs[spec.name] = sub;
        auto& vals = values[spec.name];
        auto add = [&](const OptionSpec& o) {
            vals[o.name] = o.fallback;
            sub->add_option(std::string("--") + o.name, vals[o.name], o.help)
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
                ->allow_extra_args(false);
        };
        for (const auto& o : spec.options) add(o);
        for (const auto& o : common_options()) add(o);
        sub->add_option("--config", "key = value file; flags given on the command line win");
    }

    try {
        if (auto path = detail::find_config_path(args)) {
            const auto kv = read_key_values(*path);
            // the first non-flag argument is the subcommand
            auto pos = std::find_if(args.begin(), args.end(), [](const std::string& s) { return !s.empty() && s[0] != '-'; });
            if (pos == args.end()) fail(ErrorKind::invalid_argument, "--config needs a subcommand");
            std::vector<std::string> injected;
            for (const auto& [k, v] : kv) {
                injected.push_back("--" + k);
                injected.push_back(v);
            }
            args.insert(pos + 1, injected.begin(), injected.end());
        }
    } catch (const Error& e) {
        err << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << '\n';
        return exit_usage;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
        return exit_usage;
    }

    const CommandSpec* spec = nullptr;
    for (const auto& s : commands()) {
        if (subs[s.name]->parsed()) spec = &s;
    }
    detail::Args a{values[spec->name]};
    try {
        const std::string name = spec->name;
        if (name == "sample") {
            if (a.has("format") && a.str("format") != "csv") fail(ErrorKind::invalid_argument, "sample writes CSV only");
            return detail::cmd_sample(a, out);
        }
        const std::string format = detail::format_of(a, *spec);
        detail::Output o(a, out);
        int code = exit_ok;
        if (name == "energy") code = detail::cmd_energy(a, o);
        else if (name == "geodesic") code = detail::cmd_geodesic(a, o, format);
        else if (name == "polymer") code = detail::cmd_polymer(a, o, format);
        else if (name == "profile") code = detail::cmd_profile(a, o, format);
        else if (name == "mtf") code = detail::cmd_mtf(a, o);
        else if (name == "campaign") code = detail::cmd_campaign(a, o, format, err);
        else if (name == "selftest") code = detail::cmd_selftest(a, o);
        o.finish();
        return code;
    } catch (const Error& e) {
        err << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return exit_usage;
    }
}

} // namespace lpp::cli
