// qpb: batch front end. JSON in, JSON out.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qpb/suite.hpp"

using namespace qpb;

namespace {

struct Common {
    std::string config;
    std::string group = "u1";
    std::string calculus;
    int window = 0;
    int n_max = 0;
    std::string q;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("config", c.config, "suite config JSON (otherwise the trivial bundle of --group)");
    cmd->add_option("--group", c.group, "structure group preset for the trivial bundle");
    cmd->add_option("--calculus", c.calculus, "hatR, universal, or a JSON object {classical: ...} / {ideal: ...}");
    cmd->add_option("--window", c.window, "𝒜 window degree")->check(CLI::PositiveNumber);
    cmd->add_option("--n-max", c.n_max, "top envelope degree")->check(CLI::PositiveNumber);
    cmd->add_option("--q", c.q, "rational value for q");
}

SuiteConfig resolve(const Common& c) {
    SuiteConfig s = c.config.empty() ? suite_config_from_json({{"bundle", {{"preset", "trivial"}, {"group", c.group}}}})
                                     : load_suite_config(c.config);
    if (!c.calculus.empty()) s.calculus = c.calculus.front() == '{' ? json::parse(c.calculus) : json(c.calculus);
    if (c.window > 0) s.window = c.window;
    if (c.n_max > 0) s.n_max = c.n_max;
    if (!c.q.empty()) s.q = parse_rational(c.q);
    return s;
}

json bundle_json(const std::string& spec) {
    if (spec == "hopf_fibration") return {{"preset", "hopf_fibration"}};
    if (spec.rfind("trivial:", 0) == 0) return {{"preset", "trivial"}, {"group", spec.substr(8)}};
    std::ifstream in(spec);
    if (!in) throw ParseError("bundle must be hopf_fibration, trivial:<group> or a JSON file, got '" + spec + "'");
    return json::parse(in);
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw ParseError("cannot write " + out);
    f << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpb: quantum principal bundle verification engine"};
    app.set_version_flag("--version", std::string(engine_version));
    app.require_subcommand(1);
    std::string out;
    int status = 0;

    auto* suite = app.add_subcommand("suite", "run the verification stages selected by a config");
    std::string config_path, q;
    int window = 0;
    unsigned long long seed = 0;
    bool no_timing = false;
    suite->add_option("config", config_path, "suite config JSON")->required();
    suite->add_option("--window", window, "override the 𝒜 window degree")->check(CLI::PositiveNumber);
    suite->add_option("--q", q, "specialize q to a rational value");
    suite->add_option("--seed", seed, "seed for sampled checks");
    suite->add_option("--out", out, "write the report here instead of stdout");
    suite->add_flag("--no-timing", no_timing, "omit timing fields");
    suite->callback([&] {
        SuiteConfig c = load_suite_config(config_path);
        if (window > 0) c.window = window;
        if (!q.empty()) c.q = parse_rational(q);
        if (suite->count("--seed")) c.seed = seed;
        const Report r = run_suite(c);
        emit(suite_report(c, r, !no_timing), out);
        std::cerr << c.name << ": " << r.checks.size() << " checks, " << r.failures() << " failed\n";
        status = r.ok() ? 0 : 1;
    });

    auto* dims = app.add_subcommand("dims", "Ψ_inv and envelope dimensions per degree");
    Common dc;
    add_common(dims, dc);
    dims->callback([&] { emit(dims_json(resolve(dc)), out); });

    auto* witness = app.add_subcommand("witness", "freeness witness Σ q_i F(b_i) = 1⊗a");
    std::string bundle = "hopf_fibration", a = "z", wq;
    int max_length = 2;
    witness->add_option("--bundle", bundle, "hopf_fibration, trivial:<group> or a bundle JSON file");
    witness->add_option("--a", a, "element of 𝒜, e.g. \"z\" or '[[\"q\",\"z z\"]]'");
    witness->add_option("--max-length", max_length, "longest word in q_i, b_i")->check(CLI::NonNegativeNumber);
    witness->add_option("--q", wq, "specialize q to a rational value");
    witness->callback([&] {
        std::optional<Rational> qv;
        if (!wq.empty()) qv = parse_rational(wq);
        const BundleSetup b = bundle_from_json(bundle_json(bundle), qv);
        const json aj = a.front() == '[' ? json::parse(a) : json(a);
        const json r = witness_json(b, element_from_json(b.bundle->algebra(), aj), max_length);
        emit(r, out);
        status = r.at("found").get<bool>() ? 0 : 1;
    });

    auto* table = app.add_subcommand("table", "σ, A_n, A_kl, ρ♮ or χ♮ tables");
    Common tc;
    std::string what, from = "D0", to;
    int n = 2, k = 1, l = 1, flip = 0;
    table->add_option("what", what, "sigma, A, Akl, rho or chi")->required();
    add_common(table, tc);
    table->add_option("--n", n, "degree for A");
    table->add_option("--k", k, "left degree for Akl");
    table->add_option("--l", l, "right degree for Akl");
    table->add_option("--from", from, "chart label (rho, chi)");
    table->add_option("--to", to, "second chart label (chi)");
    table->add_option("--flip", flip, "use the flip on a space of this dimension instead of a calculus")
        ->check(CLI::PositiveNumber);
    table->callback([&] {
        if (flip > 0) {
            if (what != "A") throw ParseError("--flip only supports the A table");
            emit(trivial_braiding_table(flip, n), out);
            return;
        }
        emit(table_json(resolve(tc), what, n, k, l, from, to.empty() ? from : to), out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "qpb: " << e.what() << "\n";
        return 2;
    }
    return status;
}
