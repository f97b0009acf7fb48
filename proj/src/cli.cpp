#include "flockpp/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "flockpp/lowerbound.hpp"
#include "flockpp/protocol_json.hpp"
#include "flockpp/protocols.hpp"
#include "flockpp/sim.hpp"
#include "json.hpp"

namespace flockpp::cli {

namespace {

// Raised for user-facing failures that map to a specific exit code.
struct Failure {
    int code;
    std::string kind;
    std::string message;
};

void diagnostic(std::ostream& err, std::string_view level, std::string_view kind,
                std::string_view message) {
    nlohmann::json j;
    j["level"] = level;
    j["kind"] = kind;
    j["message"] = message;
    err << j.dump() << '\n';
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Failure{kUsage, "IoError", "cannot write '" + path + "'"};
    f << text;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Failure{kUsage, "IoError", "cannot read '" + path + "'"};
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Protocol build_family(const std::string& family, std::uint64_t d) {
    const Family f = parse_family(family);
    return build(f, d);
}

std::string verdict_cell(const Verdict& v) { return std::string(status_name(v.status)); }

void print_reports(const Protocol& p, const std::vector<VerificationReport>& reports,
                   std::ostream& out) {
    out << "protocol " << p.name() << "  states=" << p.num_states() << '\n';
    out << std::setw(5) << "n" << std::setw(3) << "R" << std::setw(8) << "sound"
        << std::setw(10) << "complete" << std::setw(11) << "consensus" << std::setw(10)
        << "nodes" << std::setw(8) << "bottom" << std::setw(11) << "seconds" << '\n';
    for (const auto& r : reports) {
        out << std::setw(5) << r.n << std::setw(3) << r.expected_output;
        if (r.cap_exceeded) {
            out << "  node cap " << *r.cap_exceeded << " exceeded\n";
            continue;
        }
        out << std::setw(8) << verdict_cell(r.sound) << std::setw(10) << verdict_cell(r.complete)
            << std::setw(11) << verdict_cell(r.consensus) << std::setw(10) << r.nodes_explored
            << std::setw(8) << r.bottom_scc_count << std::setw(11) << std::fixed
            << std::setprecision(4) << r.elapsed_seconds << '\n';
        for (const auto& [label, v] : {std::pair{"soundness", &r.sound},
                                       std::pair{"completeness", &r.complete},
                                       std::pair{"consensus", &r.consensus}}) {
            if (!v->fails()) continue;
            out << "      " << label << " witness: " << v->witness->to_string(p) << '\n';
            for (std::size_t i = 0; i < v->trace.size(); ++i)
                out << "        " << i << ": " << v->trace[i].to_string(p) << '\n';
        }
    }
}

int summarize(const std::vector<VerificationReport>& reports) {
    const bool failed = std::any_of(reports.begin(), reports.end(),
                                    [](const auto& r) { return r.any_failure(); });
    if (failed) return kCheckFailed;
    const bool capped = std::any_of(reports.begin(), reports.end(),
                                    [](const auto& r) { return r.cap_exceeded.has_value(); });
    return capped ? kCapExceeded : kOk;
}

nlohmann::json reports_json(const Protocol& p, const std::vector<VerificationReport>& reports) {
    nlohmann::json j;
    j["protocol"] = protocol_to_json(p);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(p, r));
    j["reports"] = std::move(arr);
    return j;
}

int cmd_gen(const CommandConfig& cfg, std::ostream& out) {
    const Protocol p = build_family(cfg.family, cfg.d);
    const std::string text = serialize_protocol(p) + "\n";
    if (cfg.out_path.empty())
        out << text;
    else
        write_file(cfg.out_path, text);
    return kOk;
}

int cmd_verify(const CommandConfig& cfg, std::ostream& out) {
    const Protocol p = build_family(cfg.family, cfg.d);
    const std::size_t lo = cfg.n_lo.value_or(1);
    const std::size_t hi = cfg.n_hi.value_or(cfg.d + 3);
    if (lo < 1 || lo > hi) throw Failure{kUsage, "UsageError", "need 1 <= n-lo <= n-hi"};
    const auto reports = verify_range(p, cfg.d, lo, hi, {cfg.node_cap, cfg.trace});
    print_reports(p, reports, out);
    if (!cfg.json_path.empty()) write_file(cfg.json_path, reports_json(p, reports).dump(2) + "\n");
    return summarize(reports);
}

int cmd_table(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.d_lo < 1 || cfg.d_lo > cfg.d_hi)
        throw Failure{kUsage, "UsageError", "need 1 <= d-lo <= d-hi"};
    const auto rows = state_count_table(cfg.d_lo, cfg.d_hi);
    const std::string csv = state_count_csv(rows);
    if (cfg.csv_path.empty())
        out << csv;
    else
        write_file(cfg.csv_path, csv);
    int code = kOk;
    for (const auto& r : rows) {
        if (r.bounds_hold()) continue;
        diagnostic(err, "error", "BoundViolated",
                   "d=" + std::to_string(r.d) + ": q_best=" + std::to_string(r.q_best) +
                       " outside [" + std::to_string(r.lower_bound) + ", " +
                       std::to_string(r.theorem1_bound) + "]");
        code = kCheckFailed;
    }
    if (code == kOk && !cfg.csv_path.empty())
        out << rows.size() << " rows written to " << cfg.csv_path
            << "; lower_bound <= q_best <= theorem1_bound on every row\n";
    return code;
}

int cmd_fmap(const CommandConfig& cfg, std::ostream& out) {
    const Protocol p = build_family(cfg.family, cfg.d);
    const std::size_t n_cap = cfg.n_cap.value_or(cfg.d + 2);
    if (n_cap < 1) throw Failure{kUsage, "UsageError", "n-cap must be positive"};
    const FMap f = compute_f(p, n_cap, cfg.node_cap);
    const auto bound = f_composition_bound(p);

    out << "protocol " << p.name() << "  states=" << p.num_states() << "  n_cap=" << n_cap
        << '\n';
    for (std::size_t s = 0; s < p.num_states(); ++s) {
        const StateId q{static_cast<std::uint16_t>(s)};
        out << "  f(" << p.state_name(q) << ") = ";
        if (f.at(q))
            out << *f.at(q);
        else
            out << "unknown (> " << f.explored << ")";
        if (bound[s]) out << "   composition bound " << *bound[s];
        out << '\n';
    }
    const auto image = f.image();
    out << "  f(Q) =";
    for (std::size_t i = 0; i < image.size(); ++i) {
        out << ' ' << image[i];
        if (i > 0)
            out << " (x" << std::fixed << std::setprecision(2)
                << static_cast<double>(image[i]) / static_cast<double>(image[i - 1]) << ')';
    }
    out << '\n';
    const GapVerdict gap = check_gap_lemma(f);
    out << "  gap lemma (b <= 2a): " << (gap.holds ? "holds" : "fails");
    if (gap.witness) out << " at (" << gap.witness->first << ", " << gap.witness->second << ')';
    out << '\n';
    const bool thm2 = check_theorem2(p, cfg.d);
    out << "  state bound 2^(|Q|-1) >= d: " << (thm2 ? "holds" : "fails") << '\n';
    if (f.cap_exceeded_at) out << "  node cap exceeded at n=" << *f.cap_exceeded_at << '\n';

    if (!cfg.json_path.empty()) {
        auto j = fmap_to_json(p, f);
        j["gap_lemma"] = gap.holds ? "holds" : "fails";
        if (gap.witness) j["gap_witness"] = {gap.witness->first, gap.witness->second};
        j["theorem2"] = thm2 ? "holds" : "fails";
        write_file(cfg.json_path, j.dump(2) + "\n");
    }
    if (!gap.holds || !thm2) return kCheckFailed;
    return f.cap_exceeded_at ? kCapExceeded : kOk;
}

int cmd_sim(const CommandConfig& cfg, std::ostream& out) {
    const Protocol p = build_family(cfg.family, cfg.d);
    if (cfg.n < 1) throw Failure{kUsage, "UsageError", "n must be positive"};
    if (cfg.steps < 1) throw Failure{kUsage, "UsageError", "steps must be positive"};
    const SimReport r = run(p, cfg.n, cfg.seed, {cfg.steps, 1000});
    out << "protocol " << p.name() << "  n=" << r.n << "  seed=" << r.seed << " (" << r.rng
        << ")\n";
    out << "  steps " << r.steps_taken << " / " << r.max_steps << (r.silent ? " (silent)" : "")
        << '\n';
    out << "  converged " << (r.converged ? "yes" : "no");
    if (r.converged)
        out << " to output " << *r.output << " at step " << *r.convergence_step;
    out << '\n';
    out << "  ever emitted a 1-state: " << (r.ever_emitted_q1 ? "yes" : "no") << '\n';
    out << "  final " << r.final_configuration.to_string(p) << '\n';
    if (!cfg.json_path.empty()) write_file(cfg.json_path, sim_report_to_json(p, r).dump(2) + "\n");
    // A 1-state below the threshold contradicts 1-awareness.
    return (r.n < cfg.d && r.ever_emitted_q1) ? kCheckFailed : kOk;
}

}  // namespace

std::size_t node_cap_from_env() {
    if (const char* v = std::getenv("FLOCKPP_NODE_CAP")) {
        try {
            const auto cap = std::stoull(v);
            if (cap > 0) return static_cast<std::size_t>(cap);
        } catch (const std::exception&) {
        }
    }
    return kDefaultNodeCap;
}

int check_file(const std::string& path, std::uint64_t d, std::size_t n_lo, std::size_t n_hi,
               const VerifyOptions& opts, const std::string& json_path, std::ostream& out,
               std::ostream& err) {
    Protocol p;
    try {
        p = parse_protocol(read_file(path));
    } catch (const ProtocolError& e) {
        diagnostic(err, "error", "ProtocolError", e.what());
        return kUsage;
    } catch (const Failure& f) {
        diagnostic(err, "error", f.kind, f.message);
        return f.code;
    }
    if (d < 1 || n_lo < 1 || n_lo > n_hi) {
        diagnostic(err, "error", "UsageError", "need d >= 1 and 1 <= n-lo <= n-hi");
        return kUsage;
    }
    const auto reports = verify_range(p, d, n_lo, n_hi, opts);
    print_reports(p, reports, out);
    const bool thm2 = check_theorem2(p, d);
    out << "state bound 2^(|Q|-1) >= d: " << (thm2 ? "holds" : "fails") << '\n';
    if (!json_path.empty()) {
        auto j = reports_json(p, reports);
        j["theorem2"] = thm2 ? "holds" : "fails";
        write_file(json_path, j.dump(2) + "\n");
    }
    const int code = summarize(reports);
    if (code == kOk && !thm2) return kCheckFailed;
    return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CommandConfig cfg;
    cfg.node_cap = node_cap_from_env();

    CLI::App app{"Succinct 1-aware population protocols for n >= d: build, verify, measure"};
    app.name("flockpp");
    app.require_subcommand(1);
    app.add_option("--node-cap", cfg.node_cap, "Reachability node cap (env FLOCKPP_NODE_CAP)")
        ->check(CLI::PositiveNumber);

    const std::vector<std::string> families{"angluin", "a", "b", "pow2", "best"};
    auto add_family = [&](CLI::App* sub) {
        sub->add_option("--family", cfg.family, "Protocol family")
            ->check(CLI::IsMember(families))
            ->default_val("best");
        sub->add_option("--d", cfg.d, "Threshold d")->required()->check(CLI::PositiveNumber);
    };

    auto* gen = app.add_subcommand("gen", "Emit a constructed protocol as JSON");
    add_family(gen);
    gen->add_option("--out", cfg.out_path, "Output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Exhaustively check a constructed protocol");
    add_family(verify);
    verify->add_option("--n-lo", cfg.n_lo, "Smallest population (default 1)");
    verify->add_option("--n-hi", cfg.n_hi, "Largest population (default d + 3)");
    verify->add_flag("--trace", cfg.trace, "Print encounter traces to failure witnesses");
    verify->add_option("--json", cfg.json_path, "Write the reports as JSON");

    auto* table = app.add_subcommand("table", "State-count table with the upper and lower bounds");
    table->add_option("--d-lo", cfg.d_lo, "First threshold")->required()->check(CLI::PositiveNumber);
    table->add_option("--d-hi", cfg.d_hi, "Last threshold")->required()->check(CLI::PositiveNumber);
    table->add_option("--csv", cfg.csv_path, "Write CSV here (default stdout)");

    auto* fmap = app.add_subcommand("fmap", "Minimal population at which each state can occur");
    add_family(fmap);
    fmap->add_option("--n-cap", cfg.n_cap, "Largest population explored (default d + 2)");
    fmap->add_option("--json", cfg.json_path, "Write the f-map as JSON");

    auto* sim = app.add_subcommand("sim", "Random-scheduler run from the initial configuration");
    add_family(sim);
    sim->add_option("--n", cfg.n, "Population size")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", cfg.seed, "PRNG seed")->required();
    sim->add_option("--steps", cfg.steps, "Maximum number of encounters")
        ->check(CLI::PositiveNumber);
    sim->add_option("--json", cfg.json_path, "Write the report as JSON");

    auto* file = app.add_subcommand("check-file", "Verify a protocol JSON file against threshold d");
    file->add_option("path", cfg.input_path, "Protocol JSON file")->required();
    file->add_option("--d", cfg.d, "Threshold d")->required()->check(CLI::PositiveNumber);
    file->add_option("--n-lo", cfg.n_lo, "Smallest population (default 1)");
    file->add_option("--n-hi", cfg.n_hi, "Largest population (default d + 3)");
    file->add_flag("--trace", cfg.trace, "Print encounter traces to failure witnesses");
    file->add_option("--json", cfg.json_path, "Write the reports as JSON");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        diagnostic(err, "error", "UsageError", e.what());
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen(cfg, out);
        if (*verify) return cmd_verify(cfg, out);
        if (*table) return cmd_table(cfg, out, err);
        if (*fmap) return cmd_fmap(cfg, out);
        if (*sim) return cmd_sim(cfg, out);
        if (*file)
            return check_file(cfg.input_path, cfg.d, cfg.n_lo.value_or(1),
                              cfg.n_hi.value_or(cfg.d + 3), {cfg.node_cap, cfg.trace},
                              cfg.json_path, out, err);
    } catch (const Failure& f) {
        diagnostic(err, "error", f.kind, f.message);
        return f.code;
    } catch (const InvalidThreshold& e) {
        diagnostic(err, "error", "InvalidThreshold", e.what());
        return kUsage;
    } catch (const ProtocolError& e) {
        diagnostic(err, "error", "ProtocolError", e.what());
        return kUsage;
    } catch (const CapExceeded& e) {
        diagnostic(err, "error", "CapExceeded", e.what());
        return kCapExceeded;
    } catch (const std::invalid_argument& e) {
        diagnostic(err, "error", "UsageError", e.what());
        return kUsage;
    }
    return kUsage;
}

}  // namespace flockpp::cli
