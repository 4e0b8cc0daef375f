#include "qpb/presets.hpp"

#include <array>
#include <map>
#include <regex>

namespace qpb {

namespace {

struct Builder {
    std::vector<Generator> gens;
    std::map<std::string, int> idx;

    int add(const std::string& name, int grade = 0) {
        idx[name] = static_cast<int>(gens.size());
        gens.push_back({name, grade, -1, 1});
        return idx[name];
    }
    void pair(const std::string& a, const std::string& b, int sign = 1) {
        gens[idx.at(a)].star = idx.at(b);
        gens[idx.at(b)].star = idx.at(a);
        gens[idx.at(a)].star_sign = sign;
        gens[idx.at(b)].star_sign = sign;
    }
    Word w(const std::vector<std::string>& names) const {
        Word r;
        for (const auto& n : names) r.push_back(static_cast<char>(idx.at(n)));
        return r;
    }
};

Terms terms(std::initializer_list<std::pair<Scalar, Word>> list) {
    Terms t;
    for (const auto& [c, w] : list) terms_add(t, w, c);
    return t;
}

}  // namespace

HopfPtr make_u1() {
    Builder b;
    b.add("z");
    b.add("zi");
    b.pair("z", "zi");
    std::vector<Rule> rules = {
        {b.w({"z", "zi"}), terms({{Scalar(1), Word()}})},
        {b.w({"zi", "z"}), terms({{Scalar(1), Word()}})},
    };
    auto A = std::make_shared<const Presentation>("u1", b.gens, rules);
    AlgElement z = AlgElement::gen(A, "z"), zi = AlgElement::gen(A, "zi");
    return std::make_shared<const HopfStructure>(
        "u1", A, std::vector<TensorElement>{tensor(z, z), tensor(zi, zi)},
        std::vector<Scalar>{Scalar(1), Scalar(1)}, std::vector<AlgElement>{zi, z});
}

HopfPtr make_finite_group(const std::string& name, const std::vector<std::vector<int>>& table) {
    const int n = static_cast<int>(table.size());
    if (n < 2) throw AlgebraError("finite group needs at least two elements");
    for (int g = 0; g < n; ++g)
        if (table[0][g] != g || table[g][0] != g)
            throw AlgebraError("element 0 is not neutral in " + name);
    std::vector<int> inv(n, -1);
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            if (table[g][h] == 0) inv[g] = h;

    Builder b;
    auto gname = [](int g) { return "d" + std::to_string(g); };
    for (int g = 1; g < n; ++g) b.add(gname(g));
    b.add(gname(0));
    for (int g = 0; g < n; ++g) b.pair(gname(g), gname(g));
    std::vector<Rule> rules;
    for (int g = 1; g < n; ++g)
        for (int h = 1; h < n; ++h) {
            Terms rhs;
            if (g == h) terms_add(rhs, b.w({gname(g)}), Scalar(1));
            rules.push_back({b.w({gname(g), gname(h)}), rhs});
        }
    {
        Terms rhs;
        terms_add(rhs, Word(), Scalar(1));
        for (int g = 1; g < n; ++g) terms_add(rhs, b.w({gname(g)}), Scalar(-1));
        rules.push_back({b.w({gname(0)}), rhs});
    }
    auto A = std::make_shared<const Presentation>(name, b.gens, rules);

    std::vector<TensorElement> cop;
    std::vector<Scalar> eps;
    std::vector<AlgElement> kappa;
    for (const auto& gen : b.gens) {
        int g = std::stoi(gen.name.substr(1));
        TensorElement t({A, A});
        for (int h = 0; h < n; ++h) {
            int k = table[inv[h]][g];
            t.add_product({Terms{{b.w({gname(h)}), Scalar(1)}}, Terms{{b.w({gname(k)}), Scalar(1)}}},
                          Scalar(1));
        }
        cop.push_back(t);
        eps.push_back(Scalar(g == 0 ? 1 : 0));
        kappa.push_back(AlgElement::word(A, b.w({gname(inv[g])})));
    }
    return std::make_shared<const HopfStructure>(name, A, cop, eps, kappa);
}

HopfPtr make_cyclic(int n) {
    if (n < 2) throw AlgebraError("cyclic(n) needs n >= 2");
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h) table[g][h] = (g + h) % n;
    return make_finite_group("cyclic(" + std::to_string(n) + ")", table);
}

HopfPtr make_s3() {
    // Permutations of {0,1,2} as image triples.
    const std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
                                                   {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    std::vector<std::vector<int>> table(6, std::vector<int>(6));
    for (int g = 0; g < 6; ++g)
        for (int h = 0; h < 6; ++h) {
            std::array<int, 3> c{};
            for (int i = 0; i < 3; ++i) c[i] = perms[g][perms[h][i]];
            for (int k = 0; k < 6; ++k)
                if (perms[k] == c) table[g][h] = k;
        }
    return make_finite_group("s3", table);
}

HopfPtr make_su_q_2() {
    Builder b;
    b.add("gamma");
    b.add("gamma*");
    b.add("alpha");
    b.add("alpha*");
    b.pair("gamma", "gamma*");
    b.pair("alpha", "alpha*");
    const Scalar q = Scalar::q(), qi = Scalar::q_pow(-1), q2 = Scalar::q_pow(2);
    const Word g = b.w({"gamma"}), gs = b.w({"gamma*"}), a = b.w({"alpha"}), as = b.w({"alpha*"});
    std::vector<Rule> rules = {
        {a + g, terms({{q, g + a}})},
        {a + gs, terms({{q, gs + a}})},
        {gs + g, terms({{Scalar(1), g + gs}})},
        {as + g, terms({{qi, g + as}})},
        {as + gs, terms({{qi, gs + as}})},
        {as + a, terms({{Scalar(1), Word()}, {Scalar(-1), g + gs}})},
        {a + as, terms({{Scalar(1), Word()}, {-q2, g + gs}})},
    };
    auto A = std::make_shared<const Presentation>("su_q_2", b.gens, rules);
    AlgElement al = AlgElement::gen(A, "alpha"), als = AlgElement::gen(A, "alpha*"),
               ga = AlgElement::gen(A, "gamma"), gas = AlgElement::gen(A, "gamma*");
    // Order of the tables follows the generator order gamma, gamma*, alpha, alpha*.
    std::vector<TensorElement> cop = {
        tensor(ga, al) + tensor(als, ga),
        tensor(gas, als) + tensor(al, gas),
        tensor(al, al) - q * tensor(gas, ga),
        tensor(als, als) - q * tensor(ga, gas),
    };
    std::vector<Scalar> eps = {Scalar(0), Scalar(0), Scalar(1), Scalar(1)};
    std::vector<AlgElement> kappa = {-q * ga, -qi * gas, als, al};
    return std::make_shared<const HopfStructure>("su_q_2", A, cop, eps, kappa);
}

std::vector<std::vector<AlgElement>> su_q_2_fundamental(const HopfStructure& h) {
    const auto& A = h.algebra();
    return {{AlgElement::gen(A, "alpha"), -Scalar::q() * AlgElement::gen(A, "gamma*")},
            {AlgElement::gen(A, "gamma"), AlgElement::gen(A, "alpha*")}};
}

HopfPtr make_preset(const std::string& name) {
    if (name == "u1") return make_u1();
    if (name == "su_q_2") return make_su_q_2();
    if (name == "s3") return make_s3();
    std::smatch m;
    static const std::regex cyc(R"(cyclic\(?(\d+)\)?)");
    if (std::regex_match(name, m, cyc)) return make_cyclic(std::stoi(m[1]));
    throw AlgebraError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"u1", "cyclic(2)", "cyclic(3)", "su_q_2", "s3"}; }

}  // namespace qpb
