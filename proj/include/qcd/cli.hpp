#pragma once

// Command-line front end: primes, count, table, residues, solve, verify.
// run() never calls exit(); it returns 0 on success, 1 on failed checks or
// runtime errors, 2 on usage errors.

#include "qcd/almostprime.hpp"
#include "qcd/density.hpp"
#include "qcd/quadsolve.hpp"
#include "qcd/report.hpp"
#include "qcd/residues.hpp"
#include "qcd/sieve.hpp"
#include "qcd/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qcd::cli {

class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr const char* spf_cache_env = "QCD_SPF_CACHE";

struct CommandSpec {
    std::string subcommand;
    std::optional<u64> limit;
    std::string x; // single value, or a comma list for `table`
    unsigned k = 1;
    std::optional<u64> modulus;
    std::string classes;
    std::optional<i64> disc;
    std::string eps;
    std::string mode = "squarefree";
    std::string format = "csv";
    std::string out;
    unsigned threads = 1;
    std::optional<double> budget_seconds;
    u64 spf_budget = default_spf_budget;
    bool residue_rows = false;
    std::string method = "direct";
    std::string suite = "all";
    i64 b = 0;
    i64 c = 0;
    std::optional<u64> n;
};

struct RunReport {
    int exit_code = 0;
    double elapsed_seconds = 0.0;
    std::string output;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    return out;
}

inline u64 parse_u64(const std::string& s, const std::string& what)
{
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw usage_error("invalid " + what + ": '" + s + "'");
    return v;
}

inline std::vector<u64> parse_list(const std::string& s, const std::string& what)
{
    std::vector<u64> out;
    for (const auto& part : split(s, ','))
        out.push_back(parse_u64(part, what));
    if (out.empty())
        throw usage_error("empty " + what);
    return out;
}

inline std::vector<int> parse_eps(const std::string& s)
{
    std::vector<int> out;
    for (char ch : s) {
        if (ch == '+')
            out.push_back(1);
        else if (ch == '-')
            out.push_back(-1);
        else if (ch != ',')
            throw usage_error("--eps expects a string of '+' and '-', got '" + s + "'");
    }
    if (out.empty())
        throw usage_error("--eps is empty");
    return out;
}

inline TupleCountMode parse_mode(const std::string& s)
{
    if (s == "squarefree")
        return TupleCountMode::squarefree;
    if (s == "multiset")
        return TupleCountMode::with_multiplicity;
    throw usage_error("--mode must be squarefree or multiset");
}

inline u64 single_x(const CommandSpec& cmd)
{
    if (cmd.x.empty())
        throw usage_error("--x is required");
    return parse_u64(cmd.x, "--x");
}

inline SpfTable load_or_build_spf(u64 limit, u64 budget, std::ostream& err)
{
    const char* path = std::getenv(spf_cache_env);
    if (path && *path && std::filesystem::exists(path)) {
        try {
            auto t = SpfTable::load(path, std::max(budget, limit));
            if (t.limit() >= limit)
                return t;
        } catch (const std::exception& e) {
            err << "warning: ignoring SPF cache: " << e.what() << '\n';
        }
    }
    SpfTable t(limit, budget);
    if (path && *path)
        t.save(path);
    return t;
}

inline void emit_json(std::ostream& os, const nlohmann::ordered_json& j)
{
    os << j.dump(2) << '\n';
}

inline std::string csv_opt(const std::optional<i64>& v)
{
    return v ? std::to_string(*v) : std::string();
}

// -- subcommands ---------------------------------------------------------

inline int cmd_primes(const CommandSpec& cmd, std::ostream& out, std::ostream& err)
{
    if (!cmd.limit)
        throw usage_error("primes: --limit is required");
    if (!cmd.eps.empty() || cmd.disc)
        throw usage_error("primes: --eps/--disc are not accepted");
    const u64 limit = *cmd.limit;
    auto table = load_or_build_spf(std::max<u64>(limit, 2), cmd.spf_budget, err);

    const u64 modulus = cmd.modulus.value_or(1);
    if (modulus == 0)
        throw usage_error("--mod must be positive");
    std::vector<u64> classes;
    if (!cmd.classes.empty()) {
        classes = parse_list(cmd.classes, "--classes");
        for (u64 a : classes)
            if (a >= modulus)
                throw usage_error("--classes entries must be reduced mod --mod");
    } else {
        for (u64 a = 0; a < modulus; ++a)
            classes.push_back(a);
    }

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    if (cmd.format == "csv")
        out << "x,mod,class,count\n";
    for (u64 a : classes) {
        u64 count = limit < 2 ? 0 : prime_count_in_class(table, limit, a, modulus);
        if (cmd.format == "csv")
            out << limit << ',' << modulus << ',' << a << ',' << count << '\n';
        else
            rows.push_back({{"x", limit}, {"mod", modulus}, {"class", a}, {"count", count}});
    }
    if (cmd.format == "json")
        emit_json(out, rows);
    return 0;
}

inline int cmd_count(const CommandSpec& cmd, std::ostream& out, std::ostream&)
{
    const u64 x = single_x(cmd);
    const unsigned k = cmd.k;
    if (k == 0)
        throw usage_error("--k must be at least 1");
    const TupleCountMode mode = parse_mode(cmd.mode);
    auto primes = PrimeIndex::up_to(std::max<u64>(std::min(x, largest_prime_needed(x, k)), 2));

    std::string constraint = "none";
    std::optional<i64> d;
    u64 count = 0;
    if (!cmd.eps.empty()) {
        if (!cmd.disc)
            throw usage_error("--eps requires --disc");
        SignConstraint c(*cmd.disc, parse_eps(cmd.eps));
        if (c.k() != k)
            throw usage_error("--eps length must equal --k");
        d = c.d;
        constraint = c.describe();
        count = count_sign_constrained(primes, x, c, mode, Parity::any, cmd.threads);
    } else if (!cmd.classes.empty()) {
        if (!cmd.modulus)
            throw usage_error("--classes requires --mod");
        ConstraintTuple c(*cmd.modulus, parse_list(cmd.classes, "--classes"));
        if (c.k() != k)
            throw usage_error("--classes length must equal --k");
        constraint = c.describe();
        count = count_almost(primes, x, k, c, mode, cmd.threads);
    } else {
        count = count_almost(primes, x, k, std::nullopt, mode, cmd.threads);
    }

    if (cmd.format == "csv") {
        out << "x,k,D,constraint,mode,count\n";
        out << x << ',' << k << ',' << csv_opt(d) << ',' << csv_field(constraint) << ',' << cmd.mode << ','
            << count << '\n';
    } else {
        nlohmann::ordered_json j;
        j["x"] = x;
        j["k"] = k;
        j["D"] = d ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
        j["constraint"] = constraint;
        j["mode"] = cmd.mode;
        j["count"] = count;
        emit_json(out, j);
    }
    return 0;
}

inline int cmd_table(const CommandSpec& cmd, std::ostream& out, std::ostream& err)
{
    if (!cmd.disc)
        throw usage_error("table: --disc is required");
    if (!cmd.classes.empty() || !cmd.eps.empty())
        throw usage_error("table: emits every sign tuple; --classes/--eps are not accepted");
    std::vector<u64> grid;
    if (!cmd.x.empty())
        grid = parse_list(cmd.x, "--x");
    const unsigned k = cmd.k;
    if (k == 0)
        throw usage_error("--k must be at least 1");
    u64 need = 2;
    for (u64 x : grid)
        need = std::max(need, std::min(x, largest_prime_needed(x, k)));
    auto primes = PrimeIndex::up_to(need);

    DensityTableOptions opt;
    opt.residue_rows = cmd.residue_rows;
    opt.threads = cmd.threads;
    opt.budget_seconds = cmd.budget_seconds;
    auto table = density_table(primes, grid, k, *cmd.disc, opt);

    if (cmd.format == "csv")
        write_csv(out, table.rows);
    else
        emit_json(out, to_json(table.rows));

    int code = 0;
    for (const auto& f : table.failures) {
        err << "reduction check failed: " << f << '\n';
        code = 1;
    }
    if (table.truncated) {
        err << "budget exhausted: table is partial\n";
        code = 1;
    }
    return code;
}

inline int cmd_residues(const CommandSpec& cmd, std::ostream& out, std::ostream&)
{
    if (!cmd.disc)
        throw usage_error("residues: --disc is required");
    auto eps = parse_eps(cmd.eps.empty() ? "+" : cmd.eps);
    if (eps.size() != 1)
        throw usage_error("residues: --eps takes a single sign");
    ResidueClassSet set;
    if (cmd.method == "direct")
        set = residue_classes_direct(*cmd.disc, eps[0]);
    else if (cmd.method == "constructive")
        set = residue_classes_constructive(*cmd.disc, eps[0]);
    else
        throw usage_error("--method must be direct or constructive");

    if (cmd.format == "csv") {
        for (u64 a : set.classes)
            out << a << '\n';
        out << "Q=" << set.q << " size=" << set.classes.size() << '\n';
    } else {
        nlohmann::ordered_json j;
        j["D"] = set.d;
        j["epsilon"] = set.epsilon;
        j["Q"] = set.q;
        j["size"] = set.classes.size();
        j["classes"] = set.classes;
        emit_json(out, j);
    }
    return 0;
}

inline int cmd_solve(const CommandSpec& cmd, std::ostream& out, std::ostream&)
{
    if (!cmd.n)
        throw usage_error("solve: --n is required");
    const u64 n = *cmd.n;
    QuadraticForm form(cmd.b, cmd.c);
    const u64 roots = count_roots_bruteforce(form, n);
    auto factored = factor_by_trial(n);
    std::optional<u64> formula;
    std::optional<bool> all_split;
    try {
        formula = count_roots_formula(form, factored);
        all_split = has_exactly_2k_roots(form, factored);
    } catch (const std::domain_error&) {
        // outside the squarefree, odd, coprime-to-D regime: brute force only
    }
    if (cmd.format == "csv") {
        out << "b,c,D,n,roots,formula,exactly_2k\n";
        out << form.b << ',' << form.c << ',' << form.discriminant << ',' << n << ',' << roots << ','
            << (formula ? std::to_string(*formula) : std::string()) << ','
            << (all_split ? (*all_split ? "true" : "false") : "") << '\n';
    } else {
        nlohmann::ordered_json j;
        j["b"] = form.b;
        j["c"] = form.c;
        j["D"] = form.discriminant;
        j["n"] = n;
        j["roots"] = roots;
        j["formula"] = formula ? nlohmann::ordered_json(*formula) : nlohmann::ordered_json(nullptr);
        j["exactly_2k"] = all_split ? nlohmann::ordered_json(*all_split) : nlohmann::ordered_json(nullptr);
        emit_json(out, j);
    }
    return 0;
}

inline std::vector<u64> grid_upto(std::vector<u64> base, u64 cap)
{
    std::vector<u64> out;
    for (u64 v : base)
        if (v <= cap)
            out.push_back(v);
    if (out.empty() || out.back() != cap)
        out.push_back(cap);
    return out;
}

inline const std::vector<i64>& quadratic_discriminants()
{
    static const std::vector<i64> d = {5, -3, 13, -20, 21, -7};
    return d;
}

inline const std::vector<i64>& residue_discriminants()
{
    static const std::vector<i64> d = {2, -2, 3, -3, 5, -5, 6, -7, 10, 13, 15, -20, 21};
    return d;
}

inline int cmd_verify(const CommandSpec& cmd, std::ostream& out, std::ostream&)
{
    static const std::vector<std::string> suites = {"orthogonality", "collapse",  "recursions", "sandwich",
                                                    "quadratic",     "residues",  "reduction",  "roots"};
    const std::string& which = cmd.suite;
    if (which != "all" && std::find(suites.begin(), suites.end(), which) == suites.end())
        throw usage_error("--suite must be one of all, orthogonality, collapse, recursions, sandwich, quadratic, "
                          "residues, reduction, roots");
    const u64 x = cmd.x.empty() ? 2000 : single_x(cmd);
    if (x < 2)
        throw usage_error("verify: --x must be at least 2");

    const u64 x_small = std::min<u64>(x, character_sum_max_x);
    const u64 x_rec = std::min<u64>(x, static_cast<u64>(recursion_max_x));
    const u64 x_roots = std::min<u64>(x, 10'000);
    auto primes = PrimeIndex::up_to(std::max<u64>({x, 100'000}));

    const std::vector<u64> char_moduli = {1, 3, 4, 5, 8, 12};
    const std::vector<unsigned> char_ks = {1, 2, 3};
    std::vector<SuiteResult> results;
    auto want = [&](const std::string& s) { return which == "all" || which == s; };

    if (want("orthogonality"))
        results.push_back(verify_orthogonality());
    if (want("collapse"))
        results.push_back(verify_collapse(primes, char_moduli, char_ks, grid_upto({100, 500, 2000}, x_small)));
    if (want("recursions")) {
        std::vector<double> xs;
        for (u64 v : grid_upto({100, 1000, 10'000}, x_rec))
            xs.push_back(static_cast<double>(v));
        results.push_back(verify_recursions(primes, {4, 5}, {1, 2}, xs));
    }
    if (want("sandwich"))
        results.push_back(verify_sandwich(primes, char_moduli, char_ks, grid_upto({100, 500, 2000}, x_small)));
    if (want("quadratic"))
        results.push_back(verify_quadratic(quadratic_discriminants()));
    if (want("residues"))
        results.push_back(verify_residues(residue_discriminants(), primes));
    if (want("reduction"))
        results.push_back(verify_reduction(primes, {5, -3}, 2, x));
    if (want("roots"))
        results.push_back(verify_roots(primes, 0, -5, 2, x_roots));

    bool all_ok = true;
    for (const auto& r : results)
        all_ok = all_ok && r.passed;

    if (cmd.format == "csv") {
        out << "suite,status,checks,worst,detail\n";
        for (const auto& r : results)
            out << r.name << ',' << (r.passed ? "pass" : "fail") << ',' << r.checks << ',' << format_real(r.worst)
                << ',' << csv_field(r.detail) << '\n';
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : results)
            arr.push_back({{"suite", r.name},
                           {"status", r.passed ? "pass" : "fail"},
                           {"checks", r.checks},
                           {"worst", r.worst},
                           {"detail", r.detail}});
        nlohmann::ordered_json j;
        j["passed"] = all_ok;
        j["suites"] = arr;
        emit_json(out, j);
    }
    return all_ok ? 0 : 1;
}

inline void add_common(CLI::App& sub, CommandSpec& cmd)
{
    sub.add_option("--format", cmd.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub.add_option("--out", cmd.out, "Write output to this file instead of stdout");
    sub.add_option("--threads", cmd.threads, "Worker threads for counting")->check(CLI::Range(1u, 256u));
}

} // namespace detail

/// Parses argv (without the program name) and runs one subcommand.
inline RunReport run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    CommandSpec cmd;

    CLI::App app{"Quadratic congruence density toolkit", "qcd"};
    app.require_subcommand(1);

    auto* primes = app.add_subcommand("primes", "Prime counts up to --limit, optionally per residue class");
    primes->add_option("--limit", cmd.limit, "Count primes up to this bound")->required();
    primes->add_option("--mod", cmd.modulus, "Modulus for residue classes");
    primes->add_option("--classes", cmd.classes, "Comma-separated residues mod --mod");
    primes->add_option("--spf-budget", cmd.spf_budget, "Largest SPF table to build");
    detail::add_common(*primes, cmd);

    auto* count = app.add_subcommand("count", "Count k-almost-primes up to --x under a constraint");
    count->add_option("--x", cmd.x, "Upper bound")->required();
    count->add_option("--k", cmd.k, "Number of prime factors");
    count->add_option("--mod", cmd.modulus, "Modulus for --classes");
    auto* cls = count->add_option("--classes", cmd.classes, "Residue multiset m1,...,mk mod --mod");
    count->add_option("--disc", cmd.disc, "Discriminant D for --eps");
    auto* eps = count->add_option("--eps", cmd.eps, "Signs of (D/p_i) for ascending primes, e.g. +-");
    cls->excludes(eps);
    eps->excludes(cls);
    count->add_option("--mode", cmd.mode, "squarefree or multiset")->check(CLI::IsMember({"squarefree", "multiset"}));
    detail::add_common(*count, cmd);

    auto* table = app.add_subcommand("table", "Density table over a grid of x for every sign tuple");
    table->add_option("--x", cmd.x, "Comma-separated ascending x grid")->required();
    table->add_option("--k", cmd.k, "Number of prime factors");
    table->add_option("--disc", cmd.disc, "Discriminant D")->required();
    table->add_flag("--residue-rows", cmd.residue_rows, "Also emit residue-class rows over B(eps) products");
    table->add_option("--budget-seconds", cmd.budget_seconds, "Stop after this many seconds with partial output");
    detail::add_common(*table, cmd);

    auto* residues = app.add_subcommand("residues", "Residue classes mod Q with (D/p) = eps");
    residues->add_option("--disc", cmd.disc, "Non-square discriminant D")->required();
    residues->add_option("--eps", cmd.eps, "+ or -");
    residues->add_option("--method", cmd.method, "direct or constructive")
        ->check(CLI::IsMember({"direct", "constructive"}));
    detail::add_common(*residues, cmd);

    auto* solve = app.add_subcommand("solve", "Count roots of x^2 + bx + c mod n");
    solve->add_option("--b", cmd.b, "Linear coefficient");
    solve->add_option("--c", cmd.c, "Constant coefficient");
    solve->add_option("--n", cmd.n, "Modulus, at most 10^6")->required();
    detail::add_common(*solve, cmd);

    auto* verify = app.add_subcommand("verify", "Run invariant suites and report pass/fail");
    verify->add_option("--suite", cmd.suite, "Suite name or all");
    verify->add_option("--x", cmd.x, "Scale for the x-dependent suites");
    detail::add_common(*verify, cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return report;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        report.exit_code = 2;
        return report;
    }

    std::ostringstream buffer;
    try {
        cmd.subcommand = app.get_subcommands().front()->get_name();
        auto* sub = app.get_subcommands().front();
        if (sub == primes)
            report.exit_code = detail::cmd_primes(cmd, buffer, err);
        else if (sub == count)
            report.exit_code = detail::cmd_count(cmd, buffer, err);
        else if (sub == table)
            report.exit_code = detail::cmd_table(cmd, buffer, err);
        else if (sub == residues)
            report.exit_code = detail::cmd_residues(cmd, buffer, err);
        else if (sub == solve)
            report.exit_code = detail::cmd_solve(cmd, buffer, err);
        else
            report.exit_code = detail::cmd_verify(cmd, buffer, err);
    } catch (const std::logic_error& e) {
        // invalid_argument, domain_error, out_of_range: bad input
        err << "error: " << e.what() << '\n';
        report.exit_code = 2;
        return report;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        report.exit_code = 1;
        return report;
    }

    report.output = buffer.str();
    if (cmd.out.empty()) {
        out << report.output;
    } else {
        std::ofstream f(cmd.out, std::ios::binary);
        f << report.output;
        if (!f) {
            err << "error: cannot write " << cmd.out << '\n';
            report.exit_code = 1;
        }
    }
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace qcd::cli
