#include "fcmvrp/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fcmvrp/errors.hpp"

namespace fcmvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v); // shortest exact form
    return std::string(buf, res.ptr);
}

void append_term(std::string& line, bool first, double coeff, const std::string& name) {
    if (coeff == 0.0) coeff = 0.0; // normalize -0
    if (first) {
        if (coeff < 0.0)
            line += "- " + num(-coeff) + " " + name;
        else
            line += num(coeff) + " " + name;
    } else {
        if (coeff < 0.0)
            line += " - " + num(-coeff) + " " + name;
        else
            line += " + " + num(coeff) + " " + name;
    }
}

} // namespace

std::string write_lp(const MilpModel& model) {
    std::ostringstream out;
    out << "\\ LP model dump: " << model.num_variables() << " variables, "
        << model.num_constraints() << " constraints\n";
    out << "Minimize\n obj: ";
    {
        std::string line;
        bool first = true;
        for (const auto& v : model.variables()) {
            if (v.objective_coeff == 0.0) continue;
            append_term(line, first, v.objective_coeff, v.name);
            first = false;
        }
        if (first) line = "0 " + model.variable(0).name;
        out << line << "\n";
    }
    out << "Subject To\n";
    for (int i = 0; i < model.num_constraints(); ++i) {
        const auto& c = model.constraint(i);
        if (!c.tag.empty()) out << "\\ tag=" << c.tag << "\n";
        std::string line = " r" + std::to_string(i) + ": ";
        if (c.terms.empty()) {
            // LP format cannot express an empty row; a zero-coefficient term
            // carries it and the parser drops zero terms again.
            line += "0 " + model.variable(0).name;
        } else {
            bool first = true;
            for (const auto& [id, coeff] : c.terms) {
                append_term(line, first, coeff, model.variable(id).name);
                first = false;
            }
        }
        switch (c.sense) {
            case Sense::Le: line += " <= "; break;
            case Sense::Ge: line += " >= "; break;
            case Sense::Eq: line += " = "; break;
        }
        line += num(c.rhs);
        out << line << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : model.variables()) {
        const bool lo_inf = std::isinf(v.lower);
        const bool up_inf = std::isinf(v.upper);
        out << " ";
        if (lo_inf && up_inf)
            out << v.name << " free";
        else if (lo_inf)
            out << "-infinity <= " << v.name << " <= " << num(v.upper);
        else if (up_inf)
            out << v.name << " >= " << num(v.lower);
        else if (v.lower == v.upper)
            out << v.name << " = " << num(v.lower);
        else
            out << num(v.lower) << " <= " << v.name << " <= " << num(v.upper);
        out << "\n";
    }
    bool any_binary = false;
    for (const auto& v : model.variables())
        if (v.kind == VarKind::Binary) any_binary = true;
    if (any_binary) {
        out << "Binary\n";
        for (const auto& v : model.variables())
            if (v.kind == VarKind::Binary) out << " " << v.name << "\n";
    }
    out << "End\n";
    return out.str();
}

void write_lp_file(const MilpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << write_lp(model);
}

namespace {

struct Token {
    enum Kind { Name, Number, Plus, Minus, Le, Ge, Eq, Colon, TagComment } kind;
    std::string text;
    double value = 0.0;
    int line = 0;
};

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '(' ||
           c == ')' || c == '[' || c == ']' || c == ',' || c == '#' || c == '!' || c == '\'';
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> toks;
    int line = 1;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '\\') {
            size_t end = text.find('\n', i);
            if (end == std::string::npos) end = n;
            std::string comment = text.substr(i, end - i);
            const std::string key = "\\ tag=";
            if (comment.rfind(key, 0) == 0)
                toks.push_back({Token::TagComment, comment.substr(key.size()), 0.0, line});
            i = end;
            continue;
        }
        if (c == '+') {
            toks.push_back({Token::Plus, "+", 0.0, line});
            ++i;
            continue;
        }
        if (c == '-') {
            toks.push_back({Token::Minus, "-", 0.0, line});
            ++i;
            continue;
        }
        if (c == ':') {
            toks.push_back({Token::Colon, ":", 0.0, line});
            ++i;
            continue;
        }
        if (c == '<' || c == '>' || c == '=') {
            if (c == '=' ) {
                toks.push_back({Token::Eq, "=", 0.0, line});
                ++i;
                continue;
            }
            Token t{c == '<' ? Token::Le : Token::Ge, std::string(1, c), 0.0, line};
            ++i;
            if (i < n && text[i] == '=') ++i;
            toks.push_back(t);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t j = i;
            while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
                             text[j] == 'e' || text[j] == 'E' ||
                             ((text[j] == '+' || text[j] == '-') &&
                              (text[j - 1] == 'e' || text[j - 1] == 'E'))))
                ++j;
            const std::string s = text.substr(i, j - i);
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ParseError("LP line " + std::to_string(line) + ": bad number '" + s + "'");
            toks.push_back({Token::Number, s, v, line});
            i = j;
            continue;
        }
        if (is_name_char(c)) {
            size_t j = i;
            while (j < n && is_name_char(text[j])) ++j;
            toks.push_back({Token::Name, text.substr(i, j - i), 0.0, line});
            i = j;
            continue;
        }
        throw ParseError("LP line " + std::to_string(line) + ": unexpected character '" +
                         std::string(1, c) + "'");
    }
    return toks;
}

bool ieq(const std::string& a, const char* b) {
    size_t i = 0;
    for (; i < a.size() && b[i]; ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(b[i])) return false;
    return i == a.size() && b[i] == '\0';
}

} // namespace

MilpModel parse_lp(const std::string& text) {
    const std::vector<Token> toks = tokenize(text);
    MilpModel model;
    std::map<std::string, int> ids;

    // Pass 1: create variables from the Bounds section in file order, then
    // Binary entries, so a write/parse round trip reproduces variable ids.
    size_t i = 0;
    auto section = [&](size_t& pos) -> std::string {
        if (pos < toks.size() && toks[pos].kind == Token::Name) {
            const std::string& s = toks[pos].text;
            if (ieq(s, "minimize") || ieq(s, "min") || ieq(s, "maximize") || ieq(s, "max") ||
                ieq(s, "bounds") || ieq(s, "binary") || ieq(s, "binaries") || ieq(s, "bin") ||
                ieq(s, "end"))
                return s;
            if (ieq(s, "subject") && pos + 1 < toks.size() && ieq(toks[pos + 1].text, "to"))
                return "subject";
            if (ieq(s, "st") || ieq(s, "s.t.")) return "subject";
        }
        return "";
    };

    struct Bound {
        double lo = 0.0, up = kInf;
    };
    std::map<std::string, Bound> bounds;
    std::vector<std::string> bound_order;
    std::vector<std::string> binary_names;

    // locate sections
    for (i = 0; i < toks.size(); ++i) {
        std::string sec = section(i);
        if (sec.empty()) continue;
        if (ieq(sec, "bounds")) {
            size_t j = i + 1;
            while (j < toks.size() && section(j).empty()) {
                // forms: name free | name >= v | name <= v | name = v |
                //        v <= name <= v | -infinity <= name <= v
                double lo = 0.0, up = kInf;
                bool have_lo = false;
                std::string name;
                auto read_signed_number = [&](size_t& p, double& out) -> bool {
                    double sign = 1.0;
                    size_t q = p;
                    if (q < toks.size() && toks[q].kind == Token::Minus) {
                        sign = -1.0;
                        ++q;
                    } else if (q < toks.size() && toks[q].kind == Token::Plus) {
                        ++q;
                    }
                    if (q >= toks.size()) return false;
                    if (toks[q].kind == Token::Number) {
                        out = sign * toks[q].value;
                        p = q + 1;
                        return true;
                    }
                    if (toks[q].kind == Token::Name &&
                        (ieq(toks[q].text, "infinity") || ieq(toks[q].text, "inf"))) {
                        out = sign * kInf;
                        p = q + 1;
                        return true;
                    }
                    return false;
                };
                double v = 0.0;
                if (read_signed_number(j, v)) {
                    if (j >= toks.size() || toks[j].kind != Token::Le)
                        throw ParseError("LP line " + std::to_string(toks[j - 1].line) +
                                         ": expected <= after bound value");
                    ++j;
                    lo = v;
                    have_lo = true;
                }
                if (j >= toks.size() || toks[j].kind != Token::Name)
                    throw ParseError("LP bounds: expected variable name");
                name = toks[j].text;
                ++j;
                if (j < toks.size() && toks[j].kind == Token::Name && ieq(toks[j].text, "free")) {
                    lo = -kInf;
                    up = kInf;
                    ++j;
                } else if (j < toks.size() && toks[j].kind == Token::Le) {
                    ++j;
                    if (!read_signed_number(j, up))
                        throw ParseError("LP bounds: expected number after <=");
                    if (!have_lo) lo = 0.0;
                } else if (j < toks.size() && toks[j].kind == Token::Ge) {
                    ++j;
                    if (!read_signed_number(j, lo))
                        throw ParseError("LP bounds: expected number after >=");
                    up = kInf;
                } else if (j < toks.size() && toks[j].kind == Token::Eq) {
                    ++j;
                    if (!read_signed_number(j, lo))
                        throw ParseError("LP bounds: expected number after =");
                    up = lo;
                } else if (have_lo) {
                    up = kInf; // "v <= name" with no upper part
                }
                bounds[name] = {lo, up};
                bound_order.push_back(name);
            }
            i = j - 1;
        } else if (ieq(sec, "binary") || ieq(sec, "binaries") || ieq(sec, "bin")) {
            size_t j = i + 1;
            while (j < toks.size() && section(j).empty()) {
                if (toks[j].kind != Token::Name)
                    throw ParseError("LP binary section: expected variable name");
                binary_names.push_back(toks[j].text);
                ++j;
            }
            i = j - 1;
        } else if (ieq(sec, "maximize") || ieq(sec, "max")) {
            throw ParseError("LP parse: only minimization models are supported");
        }
    }

    for (const auto& name : bound_order)
        if (!ids.count(name)) {
            const Bound b = bounds[name];
            ids[name] = model.add_variable(name, VarKind::Continuous, b.lo, b.up, 0.0);
        }

    auto get_var = [&](const std::string& name) -> int {
        auto it = ids.find(name);
        if (it != ids.end()) return it->second;
        Bound b;
        if (bounds.count(name)) b = bounds[name];
        const int id = model.add_variable(name, VarKind::Continuous, b.lo, b.up, 0.0);
        ids[name] = id;
        return id;
    };

    // Pass 2: objective and rows.
    enum class Where { Preamble, Objective, Rows, Done } where = Where::Preamble;
    std::string pending_tag;   // most recent tag comment, waiting for its row
    std::string current_tag;   // tag of the row being accumulated
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
    Sense sense = Sense::Le;
    bool in_row = false;
    bool row_done = false;
    std::vector<std::pair<int, double>> obj_terms;

    auto flush_row = [&]() {
        if (!in_row) return;
        LinearConstraint c;
        for (auto& [id, coeff] : terms)
            if (coeff != 0.0) c.terms.emplace_back(id, coeff);
        c.sense = sense;
        c.rhs = rhs;
        c.tag = current_tag;
        current_tag.clear();
        model.add_constraint(std::move(c));
        terms.clear();
        in_row = false;
        row_done = false;
    };
    auto start_row = [&]() {
        in_row = true;
        current_tag = pending_tag;
        pending_tag.clear();
    };

    for (i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.kind == Token::TagComment) {
            pending_tag = t.text;
            continue;
        }
        const std::string sec = (t.kind == Token::Name) ? section(i) : "";
        if (!sec.empty()) {
            if (ieq(sec, "minimize") || ieq(sec, "min")) {
                where = Where::Objective;
                continue;
            }
            if (ieq(sec, "subject")) {
                if (ieq(toks[i].text, "subject")) ++i; // skip "to"
                where = Where::Rows;
                continue;
            }
            if (ieq(sec, "bounds") || ieq(sec, "binary") || ieq(sec, "binaries") ||
                ieq(sec, "bin") || ieq(sec, "end")) {
                flush_row();
                where = Where::Done;
                // skip the already-processed sections
                size_t j = i + 1;
                while (j < toks.size() && section(j).empty()) ++j;
                i = j - 1;
                continue;
            }
        }
        if (where == Where::Objective || where == Where::Rows) {
            // optional label
            if (t.kind == Token::Name && i + 1 < toks.size() && toks[i + 1].kind == Token::Colon) {
                if (where == Where::Rows) {
                    flush_row();
                    start_row();
                }
                ++i;
                continue;
            }
            double sign = 1.0;
            size_t j = i;
            if (t.kind == Token::Plus) {
                ++j;
            } else if (t.kind == Token::Minus) {
                sign = -1.0;
                ++j;
            }
            if (j < toks.size() && (toks[j].kind == Token::Le || toks[j].kind == Token::Ge ||
                                    toks[j].kind == Token::Eq)) {
                if (where != Where::Rows || !in_row)
                    throw ParseError("LP line " + std::to_string(toks[j].line) +
                                     ": relational operator outside a row");
                sense = toks[j].kind == Token::Le   ? Sense::Le
                        : toks[j].kind == Token::Ge ? Sense::Ge
                                                    : Sense::Eq;
                ++j;
                double rsign = 1.0;
                if (j < toks.size() && toks[j].kind == Token::Minus) {
                    rsign = -1.0;
                    ++j;
                } else if (j < toks.size() && toks[j].kind == Token::Plus) {
                    ++j;
                }
                if (j >= toks.size() || toks[j].kind != Token::Number)
                    throw ParseError("LP: expected rhs number");
                rhs = rsign * toks[j].value;
                row_done = true;
                i = j;
                continue;
            }
            double coeff = sign;
            if (j < toks.size() && toks[j].kind == Token::Number) {
                coeff = sign * toks[j].value;
                ++j;
            }
            if (j >= toks.size() || toks[j].kind != Token::Name)
                throw ParseError("LP line " + std::to_string(t.line) + ": expected variable name");
            const int id = get_var(toks[j].text);
            if (where == Where::Objective) {
                obj_terms.emplace_back(id, coeff);
            } else {
                if (row_done) flush_row(); // unlabeled row ended at its rhs
                if (!in_row) start_row();
                terms.emplace_back(id, coeff);
            }
            i = j;
        }
    }
    flush_row();

    // fold objective terms and binary kinds into the variable table
    MilpModel out;
    std::vector<double> obj(model.num_variables(), 0.0);
    for (const auto& [id, coeff] : obj_terms) obj[id] += coeff;
    std::vector<bool> binary(model.num_variables(), false);
    for (const auto& name : binary_names) {
        auto it = ids.find(name);
        if (it == ids.end())
            throw ParseError("LP binary section names unknown variable '" + name + "'");
        binary[it->second] = true;
    }
    for (const auto& v : model.variables()) {
        double lo = v.lower, up = v.upper;
        if (binary[v.id] && !bounds.count(v.name)) {
            lo = 0.0;
            up = 1.0;
        }
        out.add_variable(v.name, binary[v.id] ? VarKind::Binary : VarKind::Continuous, lo, up,
                         obj[v.id]);
    }
    for (const auto& c : model.constraints()) out.add_constraint(c);
    return out;
}

} // namespace fcmvrp
