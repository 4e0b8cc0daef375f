#include "qpb/suite.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>

#include "qpb/presets.hpp"

namespace qpb {

const char* const engine_version = "qpb 0.1.0";

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Derivation rebase(const Derivation& d, const PresentationPtr& H, const Rational& q) {
    std::vector<AlgElement> v;
    for (const auto& x : d.values()) v.push_back(rebase(x, H, &q));
    return Derivation(H, v, d.degree(), d.label());
}

// Same bundle with q replaced by a rational value.
BundleSetup specialize_setup(const BundleSetup& s, const Rational& q) {
    const Bundle& b = *s.bundle;
    auto G = specialize(*b.structure(), q);
    auto H = specialize(*b.hor(), q);
    const auto& A = G->algebra();
    std::vector<TensorElement> coaction;
    for (const auto& t : b.coaction_table()) coaction.push_back(rebase(t, {H, A}, &q));
    std::vector<AlgElement> base, based, emb;
    for (const auto& x : b.base_generators()) base.push_back(rebase(x, H, &q));
    for (const auto& x : b.base_differential()) based.push_back(rebase(x, H, &q));
    if (b.is_trivial())
        for (int g = 0; g < A->num_generators(); ++g)
            emb.push_back(rebase(b.embed(AlgElement::word(b.algebra(), Word(1, static_cast<char>(g)))), H, &q));
    BundleSetup out;
    out.kind = s.kind;
    out.bundle = std::make_shared<const Bundle>(b.name() + "@q=" + q.get_str(), G, H, coaction, base, based, emb);
    for (const auto& d : s.preconnections) out.preconnections.push_back(rebase(d, H, q));
    for (const auto& m : s.multiplets.classes) {
        Multiplet r{m.label, {}, {}};
        for (const auto& row : m.u) {
            r.u.emplace_back();
            for (const auto& x : row) r.u.back().push_back(rebase(x, A, &q));
        }
        for (const auto& row : m.b) {
            r.b.emplace_back();
            for (const auto& x : row) r.b.back().push_back(rebase(x, H, &q));
        }
        out.multiplets.classes.push_back(r);
    }
    return out;
}

std::vector<std::vector<AlgElement>> matrix_of_elements(const PresentationPtr& p, const json& j) {
    std::vector<std::vector<AlgElement>> out;
    for (const auto& row : j) {
        out.emplace_back();
        for (const auto& x : row) out.back().push_back(element_from_json(p, x));
    }
    return out;
}

Derivation preconnection_from_json(const Bundle& b, const json& j) {
    const auto& H = b.hor();
    const std::string label = j.value("label", std::string("D"));
    if (j.contains("values")) {
        std::vector<AlgElement> v(H->num_generators(), AlgElement(H));
        for (const auto& [name, x] : j.at("values").items()) v[H->index_of(name)] = element_from_json(H, x);
        return Derivation(H, v, j.value("degree", 1), label);
    }
    std::vector<EpsDerivation> xs;
    for (const auto& row : j.value("eps", json::array())) {
        EpsDerivation x;
        for (const auto& c : row) x.values.push_back(scalar_from_json(c));
        if (static_cast<int>(x.values.size()) != b.algebra()->num_generators())
            throw ParseError("eps derivation needs one value per generator of " + b.algebra()->name());
        xs.push_back(x);
    }
    std::vector<AlgElement> forms;
    for (const auto& f : j.value("forms", json::array())) forms.push_back(element_from_json(H, f));
    if (forms.size() != xs.size()) throw ParseError("preconnection '" + label + "' needs one form per eps derivation");
    return trivial_preconnection(b, xs, forms, label);
}

MultipletTable auto_multiplets(const BundleSetup& s) {
    const Bundle& b = *s.bundle;
    if (s.kind == "hopf_fibration") return hopf_fibration_multiplets(b);
    if (s.kind == "trivial") {
        const std::string g = b.structure()->name();
        if (g == "u1") return u1_multiplets(b, 12);
        if (g == "su_q_2")
            return trivial_bundle_multiplets(b, {su_q_2_fundamental(*b.structure())}, {"fundamental"});
    }
    return {};
}

HopfPtr group_from_json(const json& g) {
    return g.is_string() ? make_preset(g.get<std::string>()) : hopf_from_json(g);
}

Check& timed(Report& r, const std::string& name, bool ok, const std::string& witness, double secs) {
    Check& c = r.add(name, ok, witness);
    c.seconds = secs;
    return c;
}

}  // namespace

BundleSetup bundle_from_json(const json& j, const std::optional<Rational>& q) {
    BundleSetup s;
    const std::string preset = j.value("preset", std::string("custom"));
    if (preset == "trivial") {
        s.kind = "trivial";
        s.bundle = make_trivial_bundle(group_from_json(j.at("group")));
    } else if (preset == "hopf_fibration") {
        s.kind = "hopf_fibration";
        s.bundle = make_hopf_fibration();
    } else if (preset == "custom") {
        s.kind = "custom";
        HopfPtr G = group_from_json(j.at("structure_group"));
        auto H = presentation_from_json(j.at("horizontal"));
        const auto& A = G->algebra();
        std::vector<TensorElement> coaction;
        for (const auto& gen : H->generators()) coaction.push_back(tensor_from_json({H, A}, j.at("coaction").at(gen.name)));
        std::vector<AlgElement> base, based, emb;
        for (const auto& name : j.value("base_generators", json::array())) {
            base.push_back(AlgElement::gen(H, name.get<std::string>()));
            based.push_back(element_from_json(H, j.at("base_differential").at(name.get<std::string>())));
        }
        if (j.contains("embedding"))
            for (const auto& gen : A->generators()) emb.push_back(element_from_json(H, j.at("embedding").at(gen.name)));
        s.bundle = std::make_shared<const Bundle>(j.value("name", std::string("custom")), G, H, coaction, base, based, emb);
    } else {
        throw ParseError("unknown bundle preset '" + preset + "'");
    }
    const Bundle& b = *s.bundle;
    if (j.contains("preconnections")) {
        for (const auto& p : j.at("preconnections")) s.preconnections.push_back(preconnection_from_json(b, p));
    } else if (b.is_trivial()) {
        s.preconnections.push_back(trivial_preconnection(b, {}, {}, "D0"));
    } else {
        s.preconnections.push_back(
            Derivation(b.hor(), std::vector<AlgElement>(b.hor()->num_generators(), AlgElement(b.hor())), 1, "D0"));
    }
    const json m = j.value("multiplets", json("auto"));
    if (m.is_string() && m.get<std::string>() == "auto") {
        s.multiplets = auto_multiplets(s);
    } else if (m.is_array()) {
        for (const auto& x : m)
            s.multiplets.classes.push_back(Multiplet{x.value("label", std::string()),
                                                     matrix_of_elements(b.algebra(), x.at("u")),
                                                     matrix_of_elements(b.hor(), x.at("b"))});
    } else {
        throw ParseError("multiplets must be \"auto\" or a list");
    }
    if (q) return specialize_setup(s, *q);
    return s;
}

const std::vector<std::string>& suite_stages() {
    static const std::vector<std::string> s = {"hopf", "calculus", "braid", "preconnection", "vh", "exterior"};
    return s;
}

SuiteConfig suite_config_from_json(const json& j, const std::string& base_dir) {
    SuiteConfig c;
    c.echo = j;
    c.name = j.value("name", c.name);
    const json& b = j.at("bundle");
    if (b.is_string()) {
        std::filesystem::path p(b.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.bundle = read_json_file(p.string());
    } else {
        c.bundle = b;
    }
    c.calculus = j.value("calculus", c.calculus);
    c.charts = j.value("charts", c.charts);
    c.variant = parse_variant(j.value("variant", std::string("wedge")));
    c.window = j.value("window", c.window);
    c.hor_window = j.value("hor_window", c.hor_window);
    c.n_max = j.value("n_max", c.n_max);
    c.witness_length = j.value("witness_length", c.witness_length);
    c.seed = j.value("seed", c.seed);
    if (j.contains("q")) c.q = parse_rational(j.at("q").is_string() ? j.at("q").get<std::string>() : j.at("q").dump());
    c.stages = j.value("suites", suite_stages());
    for (const auto& s : c.stages)
        if (std::find(suite_stages().begin(), suite_stages().end(), s) == suite_stages().end())
            throw ParseError("unknown suite '" + s + "'");
    if (c.window < 1) throw ParseError("window must be at least 1");
    if (c.n_max < 1) throw ParseError("n_max must be at least 1");
    return c;
}

SuiteConfig load_suite_config(const std::string& path) {
    return suite_config_from_json(read_json_file(path), std::filesystem::path(path).parent_path().string());
}

CalculusPtr build_calculus(const SuiteConfig& c, const BundleSetup& b, Report* checks) {
    const HopfPtr& G = b.bundle->structure();
    const json& spec = c.calculus;
    if (spec.is_string() && spec.get<std::string>() == "hatR") {
        std::vector<Derivation> charts;
        for (const auto& d : b.preconnections)
            if (c.charts.empty() || std::count(c.charts.begin(), c.charts.end(), d.label())) charts.push_back(d);
        const IdealFamily fam = hat_R(b.bundle, charts, {}, b.multiplets, c.window, c.witness_length);
        if (checks) checks->merge(fam.checks, "hat");
        return std::make_shared<const InvariantFormSpace>(G, fam.spec(), c.window);
    }
    if (spec.is_string() && spec.get<std::string>() == "universal")
        return std::make_shared<const InvariantFormSpace>(G, IdealSpec{}, c.window);
    if (spec.is_object() && spec.contains("classical")) {
        std::vector<EpsDerivation> xs;
        for (const auto& row : spec.at("classical")) {
            EpsDerivation x;
            for (const auto& v : row) x.values.push_back(scalar_from_json(v));
            xs.push_back(x);
        }
        return std::make_shared<const InvariantFormSpace>(G, classical_ideal(*G, xs, c.window), c.window);
    }
    if (spec.is_object() && spec.contains("ideal"))
        return std::make_shared<const InvariantFormSpace>(G, ideal_from_json(G->algebra(), spec.at("ideal")),
                                                          spec.value("window", c.window));
    throw ParseError("calculus must be \"hatR\", \"universal\", {classical: ...} or {ideal: ...}");
}

Report oracle_checks(const InvariantFormSpace& s, int n_max) {
    Report rep;
    const HopfStructure& h = *s.hopf();
    const auto& A = h.algebra();
    const Window& W = s.window();
    // Ideal span from all products g·u landing in the window, u up to twice the window length.
    {
        std::vector<SparseVec> span;
        for (const auto& g : s.ideal_spec().generators)
            for (const Word& u : A->window(2 * W.degree())) {
                const AlgElement x = g * AlgElement::word(A, u);
                if (W.contains(x)) span.push_back(W.coords(x));
            }
        const int brute = span.empty() ? 0 : rank_bareiss(span, W.size());
        rep.add("ideal_span", brute == s.ideal().dim(),
                "engine " + std::to_string(s.ideal().dim()) + ", enumeration " + std::to_string(brute), 1);
    }
    // Quotient dimension from the rank of π over the window.
    {
        std::vector<SparseVec> images;
        for (int i = 1; i < W.size(); ++i) images.push_back(s.project(AlgElement::word(A, W.word(i))));
        const int r = images.empty() ? 0 : rank_bareiss(images, std::max(s.dim(), 1));
        rep.add("quotient_dim", r == s.dim() && s.ideal().quotient_dim() == s.dim(),
                "rank of π " + std::to_string(r) + " vs " + std::to_string(s.dim()), 1);
    }
    if (!s.bicovariant() || !s.circ_available() || s.dim() == 0) {
        rep.skip("antisymmetrizer_rank", "no braiding for this calculus");
        rep.skip("envelope_relations", "no braiding for this calculus");
        return rep;
    }
    const CalculusPtr sp(&s, [](const InvariantFormSpace*) {});
    auto braid = std::make_shared<const BraidOperator>(sp);
    const Antisymmetrizers anti(braid, antisymmetrizer_budget());
    CheckAccumulator ar("antisymmetrizer_rank"), er("envelope_relations");
    std::mt19937_64 rng(7);
    for (int n = 2; n <= n_max; ++n) {
        const Matrix brute = anti.total_bruteforce(n, rng);
        const int r1 = anti.exterior_dim(n), r2 = rank_bareiss(brute.col, brute.rows);
        const int k = static_cast<int>(anti.kernel(n).size());
        ar.expect(r1 == r2 && r1 + k == ipow(s.dim(), n), "degree " + std::to_string(n) + ": " + std::to_string(r1) +
                                                              " vs " + std::to_string(r2));
    }
    for (auto v : {EnvelopeVariant::wedge, EnvelopeVariant::vee}) {
        const Envelope e(sp, v, n_max);
        for (int n = 2; n <= n_max; ++n)
            er.expect(e.relation_dim(n) == e.relation_dim_bruteforce(n),
                      std::string(variant_name(v)) + " degree " + std::to_string(n));
    }
    ar.commit(rep);
    er.commit(rep);
    return rep;
}

Report run_suite(const SuiteConfig& c) {
    Report rep;
    std::optional<BundleSetup> setup;
    CalculusPtr calc;
    auto need_setup = [&]() -> const BundleSetup& {
        if (!setup) setup = bundle_from_json(c.bundle, c.q);
        return *setup;
    };
    auto charts = [&]() {
        std::vector<Derivation> out;
        for (const auto& d : need_setup().preconnections)
            if (c.charts.empty() || std::count(c.charts.begin(), c.charts.end(), d.label())) out.push_back(d);
        if (out.empty()) throw ParseError("no preconnection matches the chart selection");
        return out;
    };
    auto need_calc = [&](Report* r) {
        if (!calc) calc = build_calculus(c, need_setup(), r);
        return calc;
    };
    const std::map<std::string, std::function<void(Report&)>> stages = {
        {"hopf",
         [&](Report& r) {
             const HopfStructure& G = *need_setup().bundle->structure();
             r.merge(verify_hopf_axioms(G, c.window));
             r.merge(verify_adjoint_coaction(G, c.window), "ad");
         }},
        {"calculus",
         [&](Report& r) {
             auto s = need_calc(&r);
             r.add("stabilized", s->stabilized(),
                   "dim " + std::to_string(s->dim_at_degree()) + " then " + std::to_string(s->dim_one_above()));
             r.add("dim_positive", s->dim() > 0, "Ψ_inv is zero");
             r.merge(verify_calculus_covariance(*s));
             r.merge(oracle_checks(*s, c.n_max), "oracle");
         }},
        {"braid",
         [&](Report& r) {
             auto s = need_calc(nullptr);
             r.merge(verify_braid_identities(BraidOperator(s), c.n_max, c.seed));
             const Envelope w(s, EnvelopeVariant::wedge, c.n_max), v(s, EnvelopeVariant::vee, c.n_max);
             r.merge(w.verify(std::min(c.window, 2)), "wedge");
             r.merge(v.verify(std::min(c.window, 2)), "vee");
             r.merge(verify_wedge_to_vee(w, v));
         }},
        {"preconnection",
         [&](Report& r) {
             const BundleSetup& b = need_setup();
             r.merge(verify_bundle(*b.bundle, c.window), "bundle");
             r.merge(verify_base_invariants(*b.bundle, c.window), "bundle");
             r.merge(verify_multiplets(*b.bundle, b.multiplets), "multiplets");
             CheckAccumulator free("freeness");
             const auto& A = b.bundle->algebra();
             for (const Word& w : A->window(c.window)) {
                 const AlgElement a = AlgElement::word(A, w);
                 auto wit = freeness_witness(*b.bundle, a, c.window);
                 free.expect(wit && check_witness(*b.bundle, a, *wit), A->word_str(w));
             }
             free.commit(r);
             const auto ds = charts();
             // The natural-map checks take witnesses for window words times horizontal coaction legs.
             for (const auto& d : ds) r.merge(verify_preconnection(*b.bundle, d, c.window), d.label());
             for (const auto& d : ds)
                 r.merge(verify_preconnection_lemmas(b.bundle, ds[0], d - ds[0], b.multiplets, c.hor_window + 1,
                                                     c.window, std::max(c.witness_length, c.window + c.hor_window + 1)),
                         "lemmas." + ds[0].label() + "+(" + d.label() + "-" + ds[0].label() + ")");
         }},
        {"vh",
         [&](Report& r) {
             const BundleSetup& b = need_setup();
             auto s = need_calc(nullptr);
             auto vh = std::make_shared<const VHAlgebra>(b.bundle, std::make_shared<const Envelope>(s, c.variant, c.n_max));
             const ChartFamily f(vh, charts(), b.multiplets, c.witness_length);
             r.merge(verify_vh_algebra(*vh, c.hor_window, 1, c.seed), "algebra");
             r.merge(f.verify_descent(), "descent");
             for (int i = 0; i < f.size(); ++i)
                 r.merge(verify_differential(f, i, c.hor_window, c.seed), "differential." + f.chart(i).label());
             r.merge(verify_gauge(f, c.hor_window, c.seed), "gauge");
             r.merge(verify_gluing(f, c.hor_window, c.seed), "gluing");
             r.merge(verify_connections(f, c.hor_window), "connection");
         }},
        {"exterior",
         [&](Report& r) {
             const BundleSetup& b = need_setup();
             r.merge(exterior_variant_suite(b.bundle, need_calc(nullptr), charts(), b.multiplets, c.n_max, c.hor_window,
                                            c.witness_length));
         }},
    };
    for (const std::string& name : suite_stages()) {
        if (std::find(c.stages.begin(), c.stages.end(), name) == c.stages.end()) continue;
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            stages.at(name)(r);
        } catch (const std::exception& e) {
            r.add("error", false, e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timed(r, "stage_completed", !r.find("error"), "stage aborted", secs);
        rep.merge(r, name);
    }
    return rep;
}

json suite_report(const SuiteConfig& c, const Report& r, bool timing) {
    json j = report_to_json(r, timing);
    j["suite"] = c.name;
    j["engine_version"] = engine_version;
    j["config"] = c.echo;
    return j;
}

json dims_json(const SuiteConfig& c) {
    const BundleSetup b = bundle_from_json(c.bundle, c.q);
    auto s = build_calculus(c, b);
    json j = {{"group", b.bundle->structure()->name()},
              {"calculus", c.calculus},
              {"window", c.window},
              {"psi_inv", s->dim()},
              {"stabilized", s->stabilized()},
              {"ideal_dim", s->ideal().dim()}};
    json tensor = json::array(), wedge = json::array(), vee = json::array();
    if (s->bicovariant() && s->circ_available()) {
        const Envelope w(s, EnvelopeVariant::wedge, c.n_max), v(s, EnvelopeVariant::vee, c.n_max);
        for (int n = 0; n <= c.n_max; ++n) {
            tensor.push_back(w.tensor_dim(n));
            wedge.push_back(w.quotient_dim(n));
            vee.push_back(v.quotient_dim(n));
        }
    }
    j["tensor"] = tensor;
    j["wedge"] = wedge;
    j["exterior"] = vee;
    return j;
}

json witness_json(const BundleSetup& b, const AlgElement& a, int max_length) {
    json j = {{"a", element_to_json(a)}, {"bundle", b.bundle->name()}, {"max_length", max_length}};
    auto wit = freeness_witness(*b.bundle, a, max_length);
    j["found"] = wit.has_value();
    json pairs = json::array();
    if (wit) {
        for (const auto& [q, x] : *wit) pairs.push_back({{"q", element_to_json(q)}, {"b", element_to_json(x)}});
        j["verified"] = check_witness(*b.bundle, a, *wit);
    }
    j["pairs"] = pairs;
    return j;
}

json table_json(const SuiteConfig& c, const std::string& what, int n, int k, int l, const std::string& from,
                const std::string& to) {
    const BundleSetup b = bundle_from_json(c.bundle, c.q);
    auto s = build_calculus(c, b);
    json labels = json::array();
    for (int i = 0; i < s->dim(); ++i) labels.push_back(s->basis_label(i));
    json j = {{"table", what}, {"basis", labels}};
    auto find = [&](const std::string& label) {
        for (const auto& d : b.preconnections)
            if (d.label() == label) return d;
        throw ParseError("no preconnection labelled '" + label + "'");
    };
    auto values = [&](const std::vector<AlgElement>& v) {
        json out = json::array();
        for (int i = 0; i < s->dim(); ++i) out.push_back({{"basis", s->basis_label(i)}, {"value", element_to_json(v[i])}});
        return out;
    };
    if (what == "sigma") {
        j["matrix"] = matrix_to_json(BraidOperator(s).matrix());
    } else if (what == "A" || what == "Akl") {
        const Antisymmetrizers anti(std::make_shared<const BraidOperator>(s),
                                    antisymmetrizer_budget());
        j["matrix"] = matrix_to_json(what == "A" ? anti.total(n) : anti.shuffle(k, l));
    } else if (what == "rho") {
        j["chart"] = from;
        j["values"] = values(descend(rho_natural(b.bundle, find(from), b.multiplets, c.witness_length), *s));
    } else if (what == "chi") {
        j["difference"] = to + "-" + from;
        j["values"] = values(descend(chi_natural(b.bundle, find(to) - find(from), b.multiplets, c.witness_length), *s));
    } else {
        throw ParseError("unknown table '" + what + "' (sigma, A, Akl, rho, chi)");
    }
    return j;
}

json trivial_braiding_table(int d, int n) {
    Matrix flip(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) flip.col[i * d + j] = sv_unit(j * d + i);
    const Antisymmetrizers anti(std::make_shared<const BraidOperator>(d, flip), antisymmetrizer_budget());
    return {{"table", "A"}, {"braiding", "flip"}, {"dim", d}, {"n", n}, {"matrix", matrix_to_json(anti.total(n))}};
}

}  // namespace qpb
