#include "avgcycles/poly.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "avgcycles/error.hpp"

namespace avgcycles {

namespace {

double ipow(double x, int n)
{
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

void check_exponents(int i, int j)
{
    if (i < 0 || j < 0)
        throw Error(ErrorKind::InvalidArgument,
                    "negative exponent (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (i + j > BivarPoly::kMaxDegree)
        throw Error(ErrorKind::DegreeExceeded,
                    "term (" + std::to_string(i) + "," + std::to_string(j) + ") has total degree " +
                        std::to_string(i + j) + " > 3");
}

}  // namespace

BivarPoly::BivarPoly(std::initializer_list<Term> terms)
{
    for (const auto& t : terms) insert(t.i, t.j, t.coeff);
}

BivarPoly::BivarPoly(const std::map<Monomial, double>& terms)
{
    for (const auto& [m, c] : terms) insert(m.i, m.j, c);
}

void BivarPoly::insert(int i, int j, double coeff)
{
    check_exponents(i, j);
    if (!std::isfinite(coeff))
        throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
    if (coeff == 0.0)
        terms_.erase({i, j});
    else
        terms_[{i, j}] = coeff;
}

double BivarPoly::coeff(int i, int j) const
{
    auto it = terms_.find({i, j});
    return it == terms_.end() ? 0.0 : it->second;
}

double BivarPoly::operator()(double x, double y) const
{
    double sum = 0.0;
    for (const auto& [m, c] : terms_) sum += c * ipow(x, m.i) * ipow(y, m.j);
    return sum;
}

BivarPoly BivarPoly::with_term(int i, int j, double coeff) const
{
    BivarPoly out = *this;
    out.insert(i, j, coeff);
    return out;
}

BivarPoly BivarPoly::scaled(double factor) const
{
    BivarPoly out;
    for (const auto& [m, c] : terms_) out.insert(m.i, m.j, c * factor);
    return out;
}

BivarPoly operator+(const BivarPoly& lhs, const BivarPoly& rhs)
{
    BivarPoly out = lhs;
    for (const auto& [m, c] : rhs.terms_) out.insert(m.i, m.j, out.coeff(m.i, m.j) + c);
    return out;
}

double eval_bipoly(const BivarPoly& p, double x, double y) { return p(x, y); }

CenterParams validate_center(double a, double b, double c, double d)
{
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
        throw Error(ErrorKind::InvalidArgument, "center parameters must be finite");
    const double disc = (d - 2.0 * a) * (d - 2.0 * a) + 8.0 * b * c;
    if (!(disc < 0.0))
        throw Error(ErrorKind::CenterConditionViolated,
                    "(d-2a)^2 + 8bc = " + std::to_string(disc) + " is not negative");
    return CenterParams(a, b, c, d, disc);
}

double base_angle(SwitchingLine line) noexcept
{
    return line == SwitchingLine::VerticalX0 ? -std::numbers::pi / 2 : 0.0;
}

std::array<double, 3> split_angles(SwitchingLine line) noexcept
{
    const double alpha = base_angle(line);
    return {alpha, alpha + std::numbers::pi, alpha + 2 * std::numbers::pi};
}

Side side_at_angle(SwitchingLine line, double theta) noexcept
{
    const double s = line == SwitchingLine::VerticalX0 ? std::cos(theta) : std::sin(theta);
    return s >= 0.0 ? Side::Plus : Side::Minus;
}

Side side_at_point(SwitchingLine line, double x, double y) noexcept
{
    const double s = line == SwitchingLine::VerticalX0 ? x : y;
    return s >= 0.0 ? Side::Plus : Side::Minus;
}

std::string_view to_string(SwitchingLine line) noexcept
{
    return line == SwitchingLine::VerticalX0 ? "x=0" : "y=0";
}

std::string_view to_string(Side side) noexcept { return side == Side::Plus ? "+" : "-"; }

// ---------------------------------------------------------------------------
// Configuration document

namespace {

using nlohmann::json;

double parse_decimal(std::string_view text, std::string_view whole)
{
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw Error(ErrorKind::ParseError, "bad coefficient literal '" + std::string(whole) + "'");
    return value;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double coefficient_from_json(const json& node, const std::string& where)
{
    if (node.is_number()) return node.get<double>();
    if (node.is_string()) {
        try {
            return parse_coefficient_literal(node.get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorKind::ParseError, where + ": " + e.what());
        }
    }
    throw Error(ErrorKind::ParseError, where + ": coefficient must be a number or a string");
}

int exponent_from_json(const json& node, const std::string& where)
{
    if (!node.is_number_integer())
        throw Error(ErrorKind::ParseError, where + ": exponent must be an integer");
    const auto v = node.get<long long>();
    if (v < 0) throw Error(ErrorKind::ParseError, where + ": negative exponent");
    if (v > 64) throw Error(ErrorKind::DegreeExceeded, where + ": exponent too large");
    return static_cast<int>(v);
}

BivarPoly poly_from_json(const json& node, const std::string& name)
{
    if (node.is_null()) return {};
    if (!node.is_array()) throw Error(ErrorKind::ParseError, name + " must be a list of [i, j, coeff]");
    std::map<Monomial, double> terms;
    std::set<Monomial> seen;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const auto& t = node[k];
        const std::string where = name + "[" + std::to_string(k) + "]";
        if (!t.is_array() || t.size() != 3) throw Error(ErrorKind::ParseError, where + " is not a triple");
        const int i = exponent_from_json(t[0], where);
        const int j = exponent_from_json(t[1], where);
        if (i + j > BivarPoly::kMaxDegree)
            throw Error(ErrorKind::DegreeExceeded, where + ": total degree " + std::to_string(i + j) + " > 3");
        if (!seen.insert({i, j}).second)
            throw Error(ErrorKind::ParseError,
                        where + ": duplicate term (" + std::to_string(i) + "," + std::to_string(j) + ")");
        terms[{i, j}] = coefficient_from_json(t[2], where);
    }
    return BivarPoly(terms);
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where)
{
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw Error(ErrorKind::ParseError, "unknown key '" + key + "' in " + where);
    }
}

json poly_to_json(const BivarPoly& p)
{
    json arr = json::array();
    for (const auto& [m, c] : p.terms()) arr.push_back(json::array({m.i, m.j, c}));
    return arr;
}

}  // namespace

double parse_coefficient_literal(std::string_view text)
{
    std::string s = trim(text);
    // U+2212 MINUS SIGN, as typeset in many documents.
    for (std::size_t pos; (pos = s.find("\xE2\x88\x92")) != std::string::npos;) s.replace(pos, 3, "-");
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_decimal(s, text);
    const double num = parse_decimal(trim(std::string_view(s).substr(0, slash)), text);
    const double den = parse_decimal(trim(std::string_view(s).substr(slash + 1)), text);
    if (den == 0.0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
    return num / den;
}

Problem parse_problem(std::string_view config_text)
{
    json doc;
    try {
        doc = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::ParseError, "top level must be an object");
    reject_unknown_keys(doc, {"center", "switching_line", "perturbation"}, "document");

    if (!doc.contains("center") || !doc["center"].is_object())
        throw Error(ErrorKind::ParseError, "missing object 'center'");
    const auto& center = doc["center"];
    reject_unknown_keys(center, {"a", "b", "c", "d"}, "center");
    auto param = [&](const char* key) {
        if (!center.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing center.") + key);
        return coefficient_from_json(center[key], std::string("center.") + key);
    };
    const CenterParams params = validate_center(param("a"), param("b"), param("c"), param("d"));

    if (!doc.contains("switching_line") || !doc["switching_line"].is_string())
        throw Error(ErrorKind::ParseError, "missing string 'switching_line'");
    const auto line_text = doc["switching_line"].get<std::string>();
    SwitchingLine line;
    if (line_text == "x=0")
        line = SwitchingLine::VerticalX0;
    else if (line_text == "y=0")
        line = SwitchingLine::HorizontalY0;
    else
        throw Error(ErrorKind::ParseError, "switching_line must be \"x=0\" or \"y=0\"");

    json pert = doc.value("perturbation", json::object());
    if (!pert.is_object()) throw Error(ErrorKind::ParseError, "'perturbation' must be an object");
    reject_unknown_keys(pert, {"p_plus", "p_minus", "q_plus", "q_minus"}, "perturbation");
    auto block = [&](const char* key) {
        return pert.contains(key) ? poly_from_json(pert[key], key) : BivarPoly{};
    };
    return Problem{params, line, block("p_plus"), block("p_minus"), block("q_plus"), block("q_minus")};
}

std::string serialize_problem(const Problem& problem)
{
    const auto& c = problem.params;
    json doc;
    doc["center"] = {{"a", c.a()}, {"b", c.b()}, {"c", c.c()}, {"d", c.d()}};
    doc["switching_line"] = std::string(to_string(problem.line));
    doc["perturbation"] = {{"p_plus", poly_to_json(problem.p_plus)},
                           {"p_minus", poly_to_json(problem.p_minus)},
                           {"q_plus", poly_to_json(problem.q_plus)},
                           {"q_minus", poly_to_json(problem.q_minus)}};
    return doc.dump(2);
}

}  // namespace avgcycles
