#include "da/expr.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace da {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

} // namespace

Expr::Expr(ExprKind kind, std::string name, ExprPtr left, ExprPtr right)
    : kind_(kind), name_(std::move(name)), left_(std::move(left)), right_(std::move(right)) {
    if (kind_ == ExprKind::Atom) {
        hash_ = hash_combine(0x41, std::hash<std::string>{}(name_));
    } else {
        std::size_t h = hash_combine(0x100 + static_cast<std::size_t>(kind_), left_->hash());
        hash_ = hash_combine(h, right_->hash());
    }
}

const std::string& Expr::name() const {
    if (kind_ != ExprKind::Atom) throw Error("name() called on a non-atom expression node");
    return name_;
}

const ExprPtr& Expr::left() const {
    if (kind_ == ExprKind::Atom) throw Error("left() called on an atom");
    return left_;
}

const ExprPtr& Expr::right() const {
    if (kind_ == ExprKind::Atom) throw Error("right() called on an atom");
    return right_;
}

ExprPtr Expr::atom(std::string name) {
    if (!is_valid_rel_name(name)) throw Error("invalid relation name: '" + name + "'");
    return ExprPtr(new Expr(ExprKind::Atom, std::move(name), nullptr, nullptr));
}

ExprPtr Expr::make(ExprKind op, ExprPtr left, ExprPtr right) {
    if (op == ExprKind::Atom) throw Error("make() cannot build atoms");
    if (!left || !right) throw Error("make() requires two subexpressions");
    return ExprPtr(new Expr(op, std::string(), std::move(left), std::move(right)));
}

ExprPtr Expr::power_of(const ExprPtr& e, unsigned n) {
    if (!e) throw Error("power_of() requires an expression");
    if (n == 0) throw Error("power 0 is not expressible: the algebra has no identity relation");
    ExprPtr acc = e;
    for (unsigned i = 1; i < n; ++i) acc = composition_of(e, acc);
    return acc;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (&a == &b) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
    if (a.kind() == ExprKind::Atom) return a.name() == b.name();
    return expr_equal(*a.left(), *b.left()) && expr_equal(*a.right(), *b.right());
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return expr_equal(*a, *b);
}

unsigned difference_degree(const Expr& e) {
    if (e.is_atom()) return 0;
    unsigned d = std::max(difference_degree(*e.left()), difference_degree(*e.right()));
    return e.kind() == ExprKind::Difference ? d + 1 : d;
}

namespace {

void collect_names(const Expr& e, std::set<std::string>& out) {
    if (e.is_atom()) {
        out.insert(e.name());
        return;
    }
    collect_names(*e.left(), out);
    collect_names(*e.right(), out);
}

} // namespace

std::set<std::string> relation_names(const Expr& e) {
    std::set<std::string> out;
    collect_names(e, out);
    return out;
}

bool uses_intersection(const Expr& e) {
    if (e.is_atom()) return false;
    if (e.kind() == ExprKind::Intersection) return true;
    return uses_intersection(*e.left()) || uses_intersection(*e.right());
}

bool is_valid_rel_name(std::string_view name) {
    if (name.empty()) return false;
    auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto tail = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    };
    if (!head(name[0])) return false;
    return std::all_of(name.begin() + 1, name.end(), tail);
}

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (!is_valid_rel_name(n)) throw Error("invalid relation name: '" + n + "'");
        if (!seen.insert(n).second) throw Error("duplicate name in vocabulary: '" + n + "'");
    }
}

bool Vocabulary::contains(std::string_view name) const {
    return index_of(name).has_value();
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok : std::uint8_t { Ident, Number, Bar, Minus, Amp, Dot, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(at.line, at.column, message);
    }

private:
    void advance() {
        skip_blank();
        current_.line = line_;
        current_.column = col_;
        if (pos_ >= src_.size()) {
            current_.kind = Tok::End;
            current_.text.clear();
            return;
        }
        char c = src_[pos_];
        switch (c) {
            case '|': current_ = one(Tok::Bar, "|"); return;
            case '-': current_ = one(Tok::Minus, "-"); return;
            case '&': current_ = one(Tok::Amp, "&"); return;
            case '.': current_ = one(Tok::Dot, "."); return;
            case '^': current_ = one(Tok::Caret, "^"); return;
            case '(': current_ = one(Tok::LParen, "("); return;
            case ')': current_ = one(Tok::RParen, ")"); return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) step();
            current_.kind = Tok::Number;
            current_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            auto ident_char = [](char ch) {
                return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'';
            };
            while (pos_ < src_.size() && ident_char(src_[pos_])) step();
            current_.kind = Tok::Ident;
            current_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

    Token one(Tok kind, const char* text) {
        Token t{kind, text, line_, col_};
        step();
        return t;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') step();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                step();
            } else {
                break;
            }
        }
    }

    void step() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    Token current_{Tok::End, "", 1, 1};
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    ExprPtr parse() {
        ExprPtr e = parse_union();
        if (lex_.peek().kind != Tok::End)
            lex_.fail(lex_.peek(), "unexpected token '" + lex_.peek().text + "'");
        return e;
    }

private:
    ExprPtr parse_union() {
        ExprPtr left = parse_difference();
        while (lex_.peek().kind == Tok::Bar) {
            lex_.take();
            left = Expr::union_of(std::move(left), parse_difference());
        }
        return left;
    }

    ExprPtr parse_difference() {
        ExprPtr left = parse_intersection();
        while (lex_.peek().kind == Tok::Minus) {
            lex_.take();
            left = Expr::difference_of(std::move(left), parse_intersection());
        }
        return left;
    }

    ExprPtr parse_intersection() {
        ExprPtr left = parse_composition();
        while (lex_.peek().kind == Tok::Amp) {
            lex_.take();
            left = Expr::intersection_of(std::move(left), parse_composition());
        }
        return left;
    }

    ExprPtr parse_composition() {
        ExprPtr left = parse_power();
        for (;;) {
            Tok k = lex_.peek().kind;
            if (k == Tok::Dot) {
                lex_.take();
                left = Expr::composition_of(std::move(left), parse_power());
            } else if (k == Tok::Ident || k == Tok::LParen) {
                // juxtaposition
                left = Expr::composition_of(std::move(left), parse_power());
            } else {
                break;
            }
        }
        return left;
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (lex_.peek().kind == Tok::Caret) {
            Token caret = lex_.take();
            if (lex_.peek().kind != Tok::Number)
                lex_.fail(lex_.peek(), "expected an exponent after '^'");
            Token num = lex_.take();
            unsigned long n = std::stoul(num.text);
            if (n == 0)
                lex_.fail(caret, "power 0 is not expressible: the algebra has no identity relation");
            return Expr::power_of(base, static_cast<unsigned>(n));
        }
        return base;
    }

    ExprPtr parse_atom() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident) return Expr::atom(lex_.take().text);
        if (t.kind == Tok::LParen) {
            lex_.take();
            ExprPtr e = parse_union();
            if (lex_.peek().kind != Tok::RParen) lex_.fail(lex_.peek(), "expected ')'");
            lex_.take();
            return e;
        }
        lex_.fail(t, t.kind == Tok::End ? "unexpected end of input"
                                        : "expected a relation name or '('");
    }

    Lexer lex_;
};

} // namespace

ExprPtr parse_expression(std::string_view text) {
    return Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

// Binding strength, loosest first. Atoms never need parentheses.
int level_of(ExprKind k) {
    switch (k) {
        case ExprKind::Union: return 0;
        case ExprKind::Difference: return 1;
        case ExprKind::Intersection: return 2;
        case ExprKind::Composition: return 3;
        case ExprKind::Atom: return 4;
    }
    return 4;
}

const char* op_text(ExprKind k) {
    switch (k) {
        case ExprKind::Union: return " | ";
        case ExprKind::Difference: return " - ";
        case ExprKind::Intersection: return " & ";
        case ExprKind::Composition: return " . ";
        default: return "";
    }
}

void render(const Expr& e, int parent_level, bool right_child, std::string& out) {
    if (e.is_atom()) {
        out += e.name();
        return;
    }
    int level = level_of(e.kind());
    // All four operators parse left-associatively, so a same-level right
    // child needs parentheses to keep the tree shape.
    bool parens = level < parent_level || (level == parent_level && right_child);
    if (parens) out += '(';
    render(*e.left(), level, false, out);
    out += op_text(e.kind());
    render(*e.right(), level, true, out);
    if (parens) out += ')';
}

} // namespace

std::string render_expression(const Expr& e) {
    std::string out;
    render(e, 0, false, out);
    return out;
}

std::string render_expression(const ExprPtr& e) {
    if (!e) throw Error("render_expression() requires an expression");
    return render_expression(*e);
}

std::string to_sexpr(const Expr& e) {
    if (e.is_atom()) return e.name();
    const char* op = "?";
    switch (e.kind()) {
        case ExprKind::Union: op = "|"; break;
        case ExprKind::Intersection: op = "&"; break;
        case ExprKind::Difference: op = "-"; break;
        case ExprKind::Composition: op = "."; break;
        case ExprKind::Atom: break;
    }
    return std::string("(") + op + " " + to_sexpr(*e.left()) + " " + to_sexpr(*e.right()) + ")";
}

} // namespace da
