#pragma once

// Finitely presented (graded) *-algebras over Q(q) with rewrite-rule normal forms.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qpb/scalar.hpp"

namespace qpb {

/// A word stores one generator index per char; the empty word is the unit.
using Word = std::string;

struct WordLess {
    bool operator()(const Word& a, const Word& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

using Terms = std::map<Word, Scalar, WordLess>;

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Word word_of(std::initializer_list<int> gens) {
    Word w;
    for (int g : gens) w.push_back(static_cast<char>(g));
    return w;
}
inline int letter(const Word& w, size_t i) { return static_cast<unsigned char>(w[i]); }

void terms_add(Terms& acc, const Word& w, const Scalar& c);
void terms_axpy(Terms& acc, const Scalar& s, const Terms& b);

struct Generator {
    std::string name;
    int grade = 0;
    int star = -1;      ///< index of the star partner (itself when self-adjoint)
    int star_sign = 1;  ///< x* = star_sign * partner
};

struct Rule {
    Word lhs;
    Terms rhs;
};

struct CriticalPair {
    Word overlap;
    Terms left;
    Terms right;
};

struct ConfluenceReport {
    int pairs_checked = 0;
    std::vector<CriticalPair> unresolved;
    bool ok() const { return unresolved.empty(); }
};

/// Generators in a fixed order (index order), rewrite rules decreasing in the
/// degree-lexicographic order, and a star involution on generators.
class Presentation {
   public:
    Presentation(std::string name, std::vector<Generator> gens, std::vector<Rule> rules,
                 size_t step_budget = 2000000);

    const std::string& name() const { return name_; }
    const std::vector<Generator>& generators() const { return gens_; }
    const std::vector<Rule>& rules() const { return rules_; }
    int num_generators() const { return static_cast<int>(gens_.size()); }
    bool graded() const { return graded_; }
    bool has_star() const { return has_star_; }

    int index_of(const std::string& gen_name) const;
    std::optional<int> find(const std::string& gen_name) const;
    Word parse_word(const std::string& text) const;
    std::string word_str(const Word& w) const;
    int word_grade(const Word& w) const;

    bool is_normal(const Word& w) const;
    Terms normal_form(const Word& w) const;
    Terms normalize(const Terms& t) const;
    Terms multiply(const Terms& a, const Terms& b) const;
    Terms star(const Terms& t) const;

    /// All normal words of length at most d, in increasing word order.
    std::vector<Word> window(int d) const;

    ConfluenceReport check_local_confluence(int degree_bound) const;

   private:
    // Position and rule index of the leftmost redex, or -1.
    std::pair<int, int> find_redex(const Word& w, size_t from = 0) const;
    Terms normal_form_uncached(const Word& w, size_t& steps) const;

    std::string name_;
    std::vector<Generator> gens_;
    std::vector<Rule> rules_;
    std::vector<std::vector<int>> rules_by_first_;
    std::map<std::string, int> by_name_;
    size_t budget_;
    bool graded_ = false;
    bool has_star_ = true;

    mutable std::mutex cache_mu_;
    mutable std::unordered_map<Word, Terms> cache_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

/// Element of a presented algebra, always in normal form.
class AlgElement {
   public:
    AlgElement() = default;
    explicit AlgElement(PresentationPtr p) : p_(std::move(p)) {}
    AlgElement(PresentationPtr p, Terms t, bool already_normal = false);

    static AlgElement unit(PresentationPtr p, const Scalar& c = Scalar(1));
    static AlgElement word(PresentationPtr p, const Word& w, const Scalar& c = Scalar(1));
    static AlgElement gen(PresentationPtr p, const std::string& name);
    static AlgElement parse(PresentationPtr p, const std::string& text);

    const PresentationPtr& presentation() const { return p_; }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Scalar coeff(const Word& w) const;
    /// Grade when homogeneous, -1 otherwise (0 for the zero element).
    int grade() const;
    int max_length() const;

    AlgElement operator-() const;
    AlgElement& operator+=(const AlgElement& o);
    AlgElement& operator-=(const AlgElement& o);
    friend AlgElement operator+(AlgElement a, const AlgElement& b) { return a += b; }
    friend AlgElement operator-(AlgElement a, const AlgElement& b) { return a -= b; }
    friend AlgElement operator*(const AlgElement& a, const AlgElement& b);
    friend AlgElement operator*(const Scalar& s, const AlgElement& a);
    friend bool operator==(const AlgElement& a, const AlgElement& b) {
        return a.t_ == b.t_;
    }

    AlgElement star() const;
    AlgElement specialize(const Rational& q_value) const;
    std::string str() const;

   private:
    void check_same(const AlgElement& o) const;
    PresentationPtr p_;
    Terms t_;
};

using Tuple = std::vector<Word>;

struct TupleLess {
    bool operator()(const Tuple& a, const Tuple& b) const;
};

using TensorTerms = std::map<Tuple, Scalar, TupleLess>;

/// Element of a tensor product of presented algebras, legwise normal.
class TensorElement {
   public:
    TensorElement() = default;
    explicit TensorElement(std::vector<PresentationPtr> legs) : legs_(std::move(legs)) {}

    static TensorElement pure(const std::vector<AlgElement>& factors);
    static TensorElement unit(std::vector<PresentationPtr> legs);

    const std::vector<PresentationPtr>& legs() const { return legs_; }
    int degree() const { return static_cast<int>(legs_.size()); }
    const TensorTerms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Scalar coeff(const Tuple& key) const;

    /// Adds c times the tensor of legwise normal words.
    void add_term(const Tuple& key, const Scalar& c);
    /// Adds c times the product of the given (possibly non-normal) legs.
    void add_product(const std::vector<Terms>& legs, const Scalar& c);

    TensorElement operator-() const;
    TensorElement& operator+=(const TensorElement& o);
    TensorElement& operator-=(const TensorElement& o);
    friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
    friend TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
    friend TensorElement operator*(const TensorElement& a, const TensorElement& b);
    friend TensorElement operator*(const Scalar& s, const TensorElement& a);
    friend bool operator==(const TensorElement& a, const TensorElement& b) {
        return a.t_ == b.t_;
    }

    /// Legwise star with the Koszul sign of the graded legs.
    TensorElement star() const;
    TensorElement specialize(const Rational& q_value) const;
    std::string str() const;

   private:
    void check_same(const TensorElement& o) const;
    std::vector<PresentationPtr> legs_;
    TensorTerms t_;
};

/// Outer tensor product a⊗b.
TensorElement tensor(const TensorElement& a, const TensorElement& b);
TensorElement tensor(const AlgElement& a, const AlgElement& b);

/// Sign (-1)^{sum_{i<j} g_i g_j} for a list of grades.
int koszul_sign(const std::vector<int>& grades);

/// Replaces one leg by the legs of f(word). f must be an even map (no
/// Koszul signs are introduced); a zero-leg result acts as a scalar.
using LegMap = std::function<TensorElement(const Word&)>;
TensorElement map_leg(const TensorElement& t, int leg, const std::vector<PresentationPtr>& out_legs,
                      const LegMap& f);
/// Multiplies leg i with leg i+1 (same presentation).
TensorElement multiply_legs(const TensorElement& t, int leg);
/// Permutes legs: result leg k is input leg perm[k]. Signs from graded legs included.
TensorElement permute_legs(const TensorElement& t, const std::vector<int>& perm);

TensorElement from_alg(const AlgElement& a);
AlgElement to_alg(const TensorElement& t);
TensorElement from_scalar(const Scalar& s);
Scalar to_scalar(const TensorElement& t);

}  // namespace qpb
