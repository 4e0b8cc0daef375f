#pragma once

// Suite configuration, the staged verification run and the compute commands
// behind the command-line front end.

#include <optional>
#include <string>
#include <vector>

#include "qpb/io.hpp"
#include "qpb/vh.hpp"

namespace qpb {

extern const char* const engine_version;

/// A bundle with its configured preconnections and multiplet table.
struct BundleSetup {
    BundlePtr bundle;
    std::vector<Derivation> preconnections;
    MultipletTable multiplets;
    std::string kind;  ///< "trivial", "hopf_fibration" or "custom"
};

/// {preset: "trivial", group: name or Hopf JSON} | {preset: "hopf_fibration"} | a full custom
/// description; plus optional preconnections and multiplets ("auto" or a table).
BundleSetup bundle_from_json(const json& j, const std::optional<Rational>& q = std::nullopt);

struct SuiteConfig {
    std::string name = "suite";
    json bundle;
    json calculus = "hatR";
    std::vector<std::string> charts;  ///< empty: every configured preconnection
    EnvelopeVariant variant = EnvelopeVariant::wedge;
    int window = 3;      ///< degree of the 𝒜 window
    int hor_window = 1;  ///< horizontal word length in vh checks
    int n_max = 3;       ///< envelope degree
    int witness_length = 2;
    unsigned long long seed = 1;
    std::optional<Rational> q;
    std::vector<std::string> stages;
    json echo;
};

/// Stage names in execution order.
const std::vector<std::string>& suite_stages();

/// Reads a config file; a "bundle" given as a path is resolved relative to it.
SuiteConfig load_suite_config(const std::string& path);
SuiteConfig suite_config_from_json(const json& j, const std::string& base_dir = ".");

/// Runs the selected stages; exceptions inside a stage become failed checks.
Report run_suite(const SuiteConfig& c);
json suite_report(const SuiteConfig& c, const Report& r, bool timing = true);

/// The configured calculus ("hatR", "universal", {classical: [...]}, {ideal: ...}).
CalculusPtr build_calculus(const SuiteConfig& c, const BundleSetup& b, Report* checks = nullptr);

/// Independent rank and kernel paths for a calculus and its envelopes.
Report oracle_checks(const InvariantFormSpace& s, int n_max);

/// Dimensions per degree: Ψ_inv, tensor, wedge and vee envelopes, rank A_n.
json dims_json(const SuiteConfig& c);
/// Witness pairs for a, searched up to max_length.
json witness_json(const BundleSetup& b, const AlgElement& a, int max_length);
/// σ, A_n, A_kl, ρ♮ or χ♮ tables for the configured calculus.
json table_json(const SuiteConfig& c, const std::string& what, int n, int k, int l, const std::string& from,
                const std::string& to);
/// A_n for the flip on a d-dimensional space.
json trivial_braiding_table(int d, int n);

}  // namespace qpb
