#ifndef SQZ_CLI_HPP
#define SQZ_CLI_HPP

// Command-line harness: teleport, concentrate, entropy, bs-demo, sweep.
//
// Exit codes: 0 = run completed and its acceptance comparison passed,
//             2 = completed but the comparison failed, 64 = usage error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqz/sqz.hpp"

namespace sqz::cli {

using json = nlohmann::ordered_json;

inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 2;
inline constexpr int exit_usage = 64;

/// Success-fidelity floor used by the protocol pass/fail verdicts.
inline constexpr double success_fidelity_floor = 1.0 - 1e-8;
inline constexpr double entropy_tolerance = 1e-8;
inline constexpr double case_fidelity_floor = 1.0 - 1e-9;
inline constexpr double concentrated_entropy_tolerance = 1e-6;

class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

struct RunConfig {
    std::string command;
    double r = 0.5;
    double phi = 0.0;
    double eta = std::numbers::pi / 4.0;
    cplx c_plus{0.6, 0.0};
    cplx c_minus{0.0, 0.8};
    std::optional<int> n_max;
    double tail_tolerance = 1e-10;
    std::string output_format = "json";
    std::optional<std::string> output_path;
    /// Unused; the pipeline is deterministic.
    std::uint64_t seed = 0;
    // sweep / table commands
    std::string protocol = "teleport";
    std::vector<double> r_list;
    std::vector<double> phi_list;
    std::vector<double> eta_list;
};

/// "re,im", "mag@phase_radians", or a bare real number.
inline cplx parse_complex(const std::string& text)
{
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw usage_error("cannot parse complex number '" + text + "'");
        }
        if (used != s.size() || !std::isfinite(v)) {
            throw usage_error("cannot parse complex number '" + text + "'");
        }
        return v;
    };
    if (const auto at = text.find('@'); at != std::string::npos) {
        const double mag = number(text.substr(0, at));
        if (mag < 0.0) {
            throw usage_error("negative magnitude in '" + text + "'");
        }
        return std::polar(mag, number(text.substr(at + 1)));
    }
    if (const auto comma = text.find(','); comma != std::string::npos) {
        return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
    }
    return {number(text), 0.0};
}

/// Cutoff for amplitude r: explicit --n-max, else SQZ_N_MAX, else default_truncation.
inline TruncationSpec resolve_truncation(const RunConfig& cfg, double r)
{
    if (cfg.n_max) {
        return TruncationSpec{*cfg.n_max, cfg.tail_tolerance};
    }
    if (const char* env = std::getenv("SQZ_N_MAX"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 100000) {
            throw usage_error("SQZ_N_MAX must be a positive integer");
        }
        return TruncationSpec{static_cast<int>(v), cfg.tail_tolerance};
    }
    return default_truncation(r, cfg.tail_tolerance);
}

inline void validate(const RunConfig& cfg)
{
    static const std::vector<std::string> commands{"teleport", "concentrate", "entropy", "bs-demo", "sweep"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
        throw usage_error("unknown command '" + cfg.command + "'");
    }
    if (cfg.output_format != "json" && cfg.output_format != "csv") {
        throw usage_error("--format must be json or csv");
    }
    if (cfg.n_max && *cfg.n_max < 1) {
        throw usage_error("--n-max must be >= 1");
    }
    if (!(cfg.tail_tolerance > 0.0 && cfg.tail_tolerance < 1.0)) {
        throw usage_error("--tail-tolerance must lie in (0, 1)");
    }
    auto check_r = [](double r, bool strictly_positive) {
        if (!std::isfinite(r) || r < 0.0) {
            throw usage_error("squeezing amplitude r must be >= 0");
        }
        if (strictly_positive && r == 0.0) {
            throw usage_error("r = 0 makes the |Phi>_- channel vanish (|xi> = |-xi>); use r > 0");
        }
    };
    auto check_eta_flag = [](double eta) {
        if (!(eta > 0.0 && eta < std::numbers::pi / 2.0)) {
            throw usage_error("--eta must lie in the open interval (0, pi/2)");
        }
    };
    if (cfg.command == "teleport") {
        check_r(cfg.r, true);
        if (cfg.c_plus == cplx(0.0) && cfg.c_minus == cplx(0.0)) {
            throw usage_error("--c-plus and --c-minus cannot both be zero");
        }
    } else if (cfg.command == "concentrate") {
        check_r(cfg.r, true);
        check_eta_flag(cfg.eta);
    } else if (cfg.command == "entropy") {
        for (double r : cfg.r_list) {
            check_r(r, true);
        }
    } else if (cfg.command == "bs-demo") {
        for (double r : cfg.r_list) {
            check_r(r, false);
        }
    } else if (cfg.command == "sweep") {
        if (cfg.protocol != "teleport" && cfg.protocol != "concentrate") {
            throw usage_error("--protocol must be teleport or concentrate");
        }
        for (double r : cfg.r_list) {
            check_r(r, true);
        }
        for (double eta : cfg.eta_list) {
            check_eta_flag(eta);
        }
    }
}

namespace detail {

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback)
{
    return v.empty() ? fallback : v;
}

inline std::vector<double> default_entropy_grid()
{
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) {
        grid.push_back(0.06 * i);
    }
    return grid;
}

/// Evaluates fn over [0, n) on up to hardware_concurrency threads; results
/// are returned in index order.
template <typename Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                slots[i].emplace(fn(i));
            }
        }));
    }
    for (auto& j : jobs) {
        j.get();
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

struct ProtocolSummary {
    json params;
    ProtocolReport report;
    double analytic = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline ProtocolSummary summarize_teleport(const RunConfig& cfg, double r)
{
    const TruncationSpec trunc = resolve_truncation(cfg, r);
    const SuperpositionSpec spec{cfg.c_plus, cfg.c_minus, SqueezeParam(r, cfg.phi)};
    ProtocolSummary s;
    s.report = teleport(spec, trunc);
    s.analytic = teleport_success_probability(r);
    s.tolerance = 5.0 * s.report.truncation_tail + 1e-8;
    s.pass = std::abs(s.report.success_probability - s.analytic) <= s.tolerance &&
             s.report.min_success_fidelity >= success_fidelity_floor;
    s.params = json{{"r", r},
                    {"phi", cfg.phi},
                    {"c_plus", complex_json(cfg.c_plus)},
                    {"c_minus", complex_json(cfg.c_minus)},
                    {"n_max", trunc.n_max},
                    {"tail_tolerance", trunc.tail_tolerance}};
    return s;
}

inline ProtocolSummary summarize_concentrate(const RunConfig& cfg, double r, double eta)
{
    const TruncationSpec trunc = resolve_truncation(cfg, r);
    ProtocolSummary s;
    s.report = concentrate(eta, SqueezeParam(r, cfg.phi), trunc);
    s.analytic = concentrate_success_probability(eta, r);
    s.tolerance = 5.0 * s.report.truncation_tail + 1e-8;
    s.pass = std::abs(s.report.success_probability - s.analytic) <= s.tolerance &&
             s.report.min_success_fidelity >= success_fidelity_floor && s.report.success_entropy &&
             std::abs(*s.report.success_entropy - 1.0) <= concentrated_entropy_tolerance;
    s.params = json{{"r", r}, {"phi", cfg.phi}, {"eta", eta}, {"n_max", trunc.n_max}, {"tail_tolerance", trunc.tail_tolerance}};
    return s;
}

inline json protocol_json(const std::string& command, const ProtocolSummary& s)
{
    json branches = json::array();
    for (const auto& b : s.report.branches) {
        branches.push_back(json{{"counts", b.counts},
                                {"probability", b.probability},
                                {"fidelity", b.fidelity_to_target},
                                {"success", b.success}});
    }
    json j{{"command", command},
           {"params", s.params},
           {"branches", std::move(branches)},
           {"success_probability", s.report.success_probability},
           {"analytic_reference", s.analytic},
           {"abs_error", std::abs(s.report.success_probability - s.analytic)},
           {"tolerance", s.tolerance},
           {"mean_success_fidelity", s.report.mean_success_fidelity},
           {"min_success_fidelity", s.report.min_success_fidelity},
           {"truncation_tail", s.report.truncation_tail}};
    if (s.report.success_entropy) {
        j["entropy_after_concentration"] = *s.report.success_entropy;
    }
    j["pass"] = s.pass;
    return j;
}

inline std::string protocol_csv(const std::string& command, const ProtocolSummary& s)
{
    std::ostringstream out;
    out << "command,count_0,count_1,probability,fidelity,success\n";
    for (const auto& b : s.report.branches) {
        out << command << ',' << b.counts[0] << ',' << b.counts[1] << ',' << fmt(b.probability) << ','
            << fmt(b.fidelity_to_target) << ',' << (b.success ? "true" : "false") << '\n';
    }
    return out.str();
}

/// Rows of flat objects -> CSV with the keys of the first row as header.
inline std::string rows_csv(const json& rows)
{
    std::ostringstream out;
    if (rows.empty()) {
        return "";
    }
    bool first = true;
    for (const auto& [key, _] : rows.front().items()) {
        out << (first ? "" : ",") << key;
        first = false;
    }
    out << '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, value] : row.items()) {
            out << (first ? "" : ",");
            first = false;
            if (value.is_number_float()) {
                out << fmt(value.get<double>());
            } else if (value.is_string()) {
                out << value.get<std::string>();
            } else if (value.is_null()) {
                out << "";
            } else {
                out << value.dump();
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace detail

struct RunResult {
    int exit_code = exit_pass;
    std::string output;
};

inline RunResult run_teleport(const RunConfig& cfg)
{
    const auto s = detail::summarize_teleport(cfg, cfg.r);
    RunResult res;
    res.exit_code = s.pass ? exit_pass : exit_fail;
    res.output = cfg.output_format == "csv" ? detail::protocol_csv("teleport", s)
                                            : detail::protocol_json("teleport", s).dump(2) + "\n";
    return res;
}

inline RunResult run_concentrate(const RunConfig& cfg)
{
    const auto s = detail::summarize_concentrate(cfg, cfg.r, cfg.eta);
    RunResult res;
    res.exit_code = s.pass ? exit_pass : exit_fail;
    res.output = cfg.output_format == "csv" ? detail::protocol_csv("concentrate", s)
                                            : detail::protocol_json("concentrate", s).dump(2) + "\n";
    return res;
}

inline RunResult run_entropy(const RunConfig& cfg)
{
    const auto grid = detail::or_default(cfg.r_list, detail::default_entropy_grid());
    json rows = json::array();
    double max_delta = 0.0;
    for (EssKind kind : all_ess_kinds) {
        for (double r : grid) {
            const SqueezeParam xi(r, cfg.phi);
            const TruncationSpec trunc = resolve_truncation(cfg, r);
            const double numeric = entropy_fock(build_ess(kind, xi, trunc), 0);
            const double closed = entropy_formula(kind, xi);
            const double delta = std::abs(numeric - closed);
            max_delta = std::max(max_delta, delta);
            rows.push_back(json{{"family", std::string(to_string(kind))},
                                {"r", r},
                                {"n_max", trunc.n_max},
                                {"entropy_fock", numeric},
                                {"entropy_formula", closed},
                                {"abs_delta", delta}});
        }
    }
    const bool pass = max_delta < entropy_tolerance;
    RunResult res;
    res.exit_code = pass ? exit_pass : exit_fail;
    if (cfg.output_format == "csv") {
        res.output = detail::rows_csv(rows);
    } else {
        json j{{"command", "entropy"},
               {"params", json{{"phi", cfg.phi}, {"tail_tolerance", cfg.tail_tolerance}}},
               {"rows", rows},
               {"max_abs_delta", max_delta},
               {"tolerance", entropy_tolerance},
               {"pass", pass}};
        res.output = j.dump(2) + "\n";
    }
    return res;
}

inline RunResult run_bs_demo(const RunConfig& cfg)
{
    const auto r_grid = detail::or_default(cfg.r_list, {0.0, 0.2, 0.4, 0.6, 0.8});
    const auto phi_grid = detail::or_default(cfg.phi_list, {0.0, std::numbers::pi / 3.0});
    json rows = json::array();
    double min_fid = 1.0;
    for (double r : r_grid) {
        for (double phi : phi_grid) {
            const SqueezeParam xi(r, phi);
            const TruncationSpec trunc = resolve_truncation(cfg, r);
            const double f1 = verify_case1(xi, trunc);
            const double f2 = verify_case2(xi, trunc);
            min_fid = std::min({min_fid, f1, f2});
            rows.push_back(json{{"r", r}, {"phi", phi}, {"n_max", trunc.n_max}, {"case1_fidelity", f1}, {"case2_fidelity", f2}});
        }
    }
    const bool pass = min_fid >= case_fidelity_floor;
    RunResult res;
    res.exit_code = pass ? exit_pass : exit_fail;
    if (cfg.output_format == "csv") {
        res.output = detail::rows_csv(rows);
    } else {
        json j{{"command", "bs-demo"},
               {"params", json{{"tail_tolerance", cfg.tail_tolerance}}},
               {"rows", rows},
               {"min_fidelity", min_fid},
               {"fidelity_floor", case_fidelity_floor},
               {"pass", pass}};
        res.output = j.dump(2) + "\n";
    }
    return res;
}

inline RunResult run_sweep(const RunConfig& cfg)
{
    const auto r_grid = detail::or_default(cfg.r_list, {0.3, 0.5, 0.7, 0.9});
    const bool teleporting = cfg.protocol == "teleport";
    const auto eta_grid = teleporting ? std::vector<double>{cfg.eta}
                                      : detail::or_default(cfg.eta_list, {std::numbers::pi / 8.0, std::numbers::pi / 6.0,
                                                                          std::numbers::pi / 4.0});
    std::vector<std::pair<double, double>> points;
    for (double r : r_grid) {
        for (double eta : eta_grid) {
            points.emplace_back(r, eta);
        }
    }
    std::sort(points.begin(), points.end());
    const auto summaries = detail::parallel_map(points.size(), [&](std::size_t i) {
        const auto [r, eta] = points[i];
        return teleporting ? detail::summarize_teleport(cfg, r) : detail::summarize_concentrate(cfg, r, eta);
    });
    json rows = json::array();
    bool pass = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& s = summaries[i];
        pass = pass && s.pass;
        rows.push_back(json{{"r", points[i].first},
                            {"eta", teleporting ? json(nullptr) : json(points[i].second)},
                            {"n_max", s.params["n_max"]},
                            {"success_probability", s.report.success_probability},
                            {"analytic_reference", s.analytic},
                            {"abs_error", std::abs(s.report.success_probability - s.analytic)},
                            {"tolerance", s.tolerance},
                            {"min_success_fidelity", s.report.min_success_fidelity},
                            {"truncation_tail", s.report.truncation_tail},
                            {"pass", s.pass}});
    }
    RunResult res;
    res.exit_code = pass ? exit_pass : exit_fail;
    if (cfg.output_format == "csv") {
        res.output = detail::rows_csv(rows);
    } else {
        json params{{"protocol", cfg.protocol}, {"phi", cfg.phi}, {"tail_tolerance", cfg.tail_tolerance}};
        if (teleporting) {
            params["c_plus"] = detail::complex_json(cfg.c_plus);
            params["c_minus"] = detail::complex_json(cfg.c_minus);
        }
        json j{{"command", "sweep"}, {"params", params}, {"rows", rows}, {"pass", pass}};
        res.output = j.dump(2) + "\n";
    }
    return res;
}

/// Validates and dispatches. Library errors caused by the inputs
/// (degenerate states, too-small cutoffs) surface as usage_error.
inline RunResult run(const RunConfig& cfg)
{
    validate(cfg);
    try {
        if (cfg.command == "teleport") {
            return run_teleport(cfg);
        }
        if (cfg.command == "concentrate") {
            return run_concentrate(cfg);
        }
        if (cfg.command == "entropy") {
            return run_entropy(cfg);
        }
        if (cfg.command == "bs-demo") {
            return run_bs_demo(cfg);
        }
        return run_sweep(cfg);
    } catch (const degenerate_state& e) {
        throw usage_error(e.what());
    } catch (const truncation_error& e) {
        throw usage_error(std::string(e.what()) + " (raise --n-max or --tail-tolerance)");
    }
}

/// Parses argv into a RunConfig. Returns nullopt when help was requested
/// (help text already written to `out`).
inline std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out)
{
    CLI::App app{"Squeezed-state teleportation and entanglement-concentration simulator", "sqz"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string c_plus_text;
    std::string c_minus_text;
    std::optional<int> n_max;
    std::optional<std::string> output_path;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--phi", cfg.phi, "squeezing angle (radians)");
        sub->add_option("--n-max", n_max, "per-mode photon cutoff (default: chosen from r)");
        sub->add_option("--tail-tolerance", cfg.tail_tolerance, "max truncated squeezed-vacuum weight");
        sub->add_option("--format", cfg.output_format, "json or csv");
        sub->add_option("--output", output_path, "write to file instead of stdout");
        sub->add_option("--seed", cfg.seed, "unused; accepted for forward compatibility");
    };
    auto with_coeffs = [&](CLI::App* sub) {
        sub->add_option("--c-plus", c_plus_text, "C+ as re,im or mag@phase");
        sub->add_option("--c-minus", c_minus_text, "C- as re,im or mag@phase");
    };

    auto* tele = app.add_subcommand("teleport", "teleport C+|xi> + C-|-xi> over |Phi>_-");
    tele->add_option("--r", cfg.r, "squeezing amplitude");
    with_coeffs(tele);
    common(tele);

    auto* conc = app.add_subcommand("concentrate", "concentrate two partially entangled channels");
    conc->add_option("--r", cfg.r, "squeezing amplitude");
    conc->add_option("--eta", cfg.eta, "channel angle in (0, pi/2)");
    common(conc);

    auto* ent = app.add_subcommand("entropy", "entanglement entropy of the four entangled squeezed states");
    ent->add_option("--r-list", cfg.r_list, "squeezing amplitudes")->delimiter(',');
    common(ent);

    auto* bs = app.add_subcommand("bs-demo", "beam-splitter special cases on an (r, phi) grid");
    bs->add_option("--r-list", cfg.r_list, "squeezing amplitudes")->delimiter(',');
    bs->add_option("--phi-list", cfg.phi_list, "squeezing angles")->delimiter(',');
    common(bs);

    auto* sweep = app.add_subcommand("sweep", "success probability over a parameter grid");
    sweep->add_option("--protocol", cfg.protocol, "teleport or concentrate");
    sweep->add_option("--r-list", cfg.r_list, "squeezing amplitudes")->delimiter(',');
    sweep->add_option("--eta-list", cfg.eta_list, "channel angles (concentrate)")->delimiter(',');
    with_coeffs(sweep);
    common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw usage_error(e.what());
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (!c_plus_text.empty()) {
        cfg.c_plus = parse_complex(c_plus_text);
    }
    if (!c_minus_text.empty()) {
        cfg.c_minus = parse_complex(c_minus_text);
    }
    cfg.n_max = n_max;
    cfg.output_path = output_path;
    return cfg;
}

/// Full entry point used by the sqz binary.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try {
        const auto cfg = parse_args(argc, argv, out);
        if (!cfg) {
            return exit_pass;
        }
        const RunResult res = run(*cfg);
        if (cfg->output_path) {
            std::ofstream file(*cfg->output_path, std::ios::binary);
            if (!file) {
                err << "sqz: cannot open " << *cfg->output_path << " for writing\n";
                return exit_usage;
            }
            file << res.output;
        } else {
            out << res.output;
        }
        if (res.exit_code != exit_pass) {
            err << "sqz: acceptance comparison failed\n";
        }
        return res.exit_code;
    } catch (const std::invalid_argument& e) {
        err << "sqz: " << e.what() << "\n";
        return exit_usage;
    }
}

} // namespace sqz::cli

#endif
