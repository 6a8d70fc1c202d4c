#include <cctype>
#include <sstream>

#include "drsyn/ltlf.hpp"

namespace drsyn::ltlf {

ParseError::ParseError(const std::string& what, std::size_t position)
    : InvalidInput(what + " at position " + std::to_string(position)), position_(position) {}

namespace {

NodePtr node(Op op, NodePtr l = nullptr, NodePtr r = nullptr, int atom = -1) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    n->atom = atom;
    return n;
}

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Iff, Next, Until, Eventually, Globally, True, False, Ident };

struct Token {
    Tok kind = Tok::End;
    std::size_t pos = 0;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    Token next() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        Token t;
        t.pos = i_;
        if (i_ >= s_.size()) return t;
        const char c = s_[i_];
        auto take = [&](Tok k, std::size_t len) {
            t.kind = k;
            i_ += len;
            return t;
        };
        if (c == '(') return take(Tok::LParen, 1);
        if (c == ')') return take(Tok::RParen, 1);
        if (c == '!') return take(Tok::Not, 1);
        if (c == '&') return take(Tok::And, s_.substr(i_, 2) == "&&" ? 2 : 1);
        if (c == '|') return take(Tok::Or, s_.substr(i_, 2) == "||" ? 2 : 1);
        if (s_.substr(i_, 2) == "->") return take(Tok::Implies, 2);
        if (s_.substr(i_, 3) == "<->") return take(Tok::Iff, 3);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
            t.text = std::string(s_.substr(i_, j - i_));
            i_ = j;
            if (t.text == "X") t.kind = Tok::Next;
            else if (t.text == "U") t.kind = Tok::Until;
            else if (t.text == "F") t.kind = Tok::Eventually;
            else if (t.text == "G") t.kind = Tok::Globally;
            else if (t.text == "true") t.kind = Tok::True;
            else if (t.text == "false") t.kind = Tok::False;
            else t.kind = Tok::Ident;
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i_);
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
};

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& ap) : lex_(text), ap_(ap) { advance(); }

    NodePtr parse_all() {
        NodePtr f = iff();
        if (cur_.kind != Tok::End) throw ParseError("unexpected token", cur_.pos);
        return f;
    }

private:
    void advance() { cur_ = lex_.next(); }

    NodePtr iff() {
        NodePtr l = implies();
        while (cur_.kind == Tok::Iff) {
            advance();
            NodePtr r = implies();
            l = make_and(make_implies(l, r), make_implies(r, l));
        }
        return l;
    }

    NodePtr implies() {
        NodePtr l = until();
        if (cur_.kind != Tok::Implies) return l;
        advance();
        return make_implies(l, implies());
    }

    NodePtr until() {
        NodePtr l = disj();
        if (cur_.kind != Tok::Until) return l;
        advance();
        return make_until(l, until());
    }

    NodePtr disj() {
        NodePtr l = conj();
        while (cur_.kind == Tok::Or) {
            advance();
            l = make_or(l, conj());
        }
        return l;
    }

    NodePtr conj() {
        NodePtr l = unary();
        while (cur_.kind == Tok::And) {
            advance();
            l = make_and(l, unary());
        }
        return l;
    }

    NodePtr unary() {
        switch (cur_.kind) {
        case Tok::Not: advance(); return make_not(unary());
        case Tok::Next: advance(); return make_next(unary());
        case Tok::Eventually: advance(); return make_eventually(unary());
        case Tok::Globally: advance(); return make_globally(unary());
        default: return primary();
        }
    }

    NodePtr primary() {
        const Token t = cur_;
        switch (t.kind) {
        case Tok::True: advance(); return make_true();
        case Tok::False: advance(); return make_false();
        case Tok::LParen: {
            advance();
            NodePtr f = iff();
            if (cur_.kind != Tok::RParen) throw ParseError("expected ')'", cur_.pos);
            advance();
            return f;
        }
        case Tok::Ident: {
            for (std::size_t i = 0; i < ap_.size(); ++i)
                if (ap_[i] == t.text) {
                    advance();
                    return make_atom(static_cast<int>(i));
                }
            throw ParseError("undeclared atom '" + t.text + "'", t.pos);
        }
        case Tok::End: throw ParseError("unexpected end of formula", t.pos);
        default: throw ParseError("expected a formula", t.pos);
        }
    }

    Lexer lex_;
    const std::vector<std::string>& ap_;
    Token cur_;
};

void print(std::ostream& os, const NodePtr& n, const std::vector<std::string>& ap) {
    switch (n->op) {
    case Op::True: os << "true"; break;
    case Op::Atom: os << ap.at(static_cast<std::size_t>(n->atom)); break;
    case Op::Not: os << "!("; print(os, n->lhs, ap); os << ")"; break;
    case Op::Next: os << "X("; print(os, n->lhs, ap); os << ")"; break;
    case Op::And:
    case Op::Or:
    case Op::Until: {
        const char* sym = n->op == Op::And ? " & " : n->op == Op::Or ? " | " : " U ";
        os << "(";
        print(os, n->lhs, ap);
        os << sym;
        print(os, n->rhs, ap);
        os << ")";
        break;
    }
    }
}

}  // namespace

NodePtr make_true() { return node(Op::True); }
NodePtr make_false() { return node(Op::Not, make_true()); }
NodePtr make_atom(int index) { return node(Op::Atom, nullptr, nullptr, index); }
NodePtr make_not(NodePtr a) { return node(Op::Not, std::move(a)); }
NodePtr make_and(NodePtr a, NodePtr b) { return node(Op::And, std::move(a), std::move(b)); }
NodePtr make_or(NodePtr a, NodePtr b) { return node(Op::Or, std::move(a), std::move(b)); }
NodePtr make_next(NodePtr a) { return node(Op::Next, std::move(a)); }
NodePtr make_until(NodePtr a, NodePtr b) { return node(Op::Until, std::move(a), std::move(b)); }
NodePtr make_eventually(NodePtr a) { return make_until(make_true(), std::move(a)); }
NodePtr make_globally(NodePtr a) { return make_not(make_eventually(make_not(std::move(a)))); }
NodePtr make_implies(NodePtr a, NodePtr b) { return make_or(make_not(std::move(a)), std::move(b)); }

Formula parse(std::string_view text, const std::vector<std::string>& ap) {
    if (ap.size() > 20) throw InvalidInput("too many atomic propositions (at most 20)");
    Parser p(text, ap);
    return Formula{p.parse_all(), ap};
}

std::string to_string(const Formula& f) {
    std::ostringstream os;
    print(os, f.root, f.ap);
    return os.str();
}

std::size_t formula_size(const NodePtr& n) {
    if (!n) return 0;
    return 1 + formula_size(n->lhs) + formula_size(n->rhs);
}

}  // namespace drsyn::ltlf
