#pragma once

// JSON wire formats: scalars, elements, presentations, Hopf tables, ideals,
// matrices and reports; and q-specialization of whole structures.

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qpb/bundle.hpp"

namespace qpb {

using nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// {num: [[coeff_num, coeff_den, power]...], den: [...], text} with big integers as strings;
/// text is informational and ignored on input.
json scalar_to_json(const Scalar& s);
/// Accepts the wire object, a JSON number, or a string such as "3/4", "q", "-2*q^3".
Scalar scalar_from_json(const json& j);

/// [{word, coeff}...] with words as space-separated generator names.
json element_to_json(const AlgElement& a);
/// Accepts the term list, a list of [coeff, word] pairs, or a bare word string.
AlgElement element_from_json(const PresentationPtr& p, const json& j);

json tensor_to_json(const TensorElement& t);
/// [{legs: [w1, w2, ...], coeff}...]
TensorElement tensor_from_json(const std::vector<PresentationPtr>& legs, const json& j);

/// {name, order, generators: [{name, grade, star_partner, star_sign}], rules: [{lhs, rhs}]}
json presentation_to_json(const Presentation& p);
PresentationPtr presentation_from_json(const json& j);

/// Presentation JSON extended with coproduct, counit and antipode tables.
json hopf_to_json(const HopfStructure& h);
HopfPtr hopf_from_json(const json& j);

json ideal_to_json(const IdealSpec& s);
IdealSpec ideal_from_json(const PresentationPtr& p, const json& j);

/// {rows, cols, entries: [[i, j, scalar]...]}
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

/// Checks sorted by name; timing fields only when requested.
json report_to_json(const Report& r, bool timing = true);

/// Copies with q replaced by a rational value throughout.
PresentationPtr specialize(const Presentation& p, const Rational& q);
HopfPtr specialize(const HopfStructure& h, const Rational& q);
/// Element re-expressed over another presentation with the same generators.
AlgElement rebase(const AlgElement& a, const PresentationPtr& p, const Rational* q = nullptr);
TensorElement rebase(const TensorElement& t, const std::vector<PresentationPtr>& legs, const Rational* q = nullptr);

Rational parse_rational(const std::string& s);

}  // namespace qpb
