#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include "drsyn/ltlf.hpp"

namespace drsyn::ltlf {

namespace {

// Negation normal form with weak next (N) and release (R). Nodes are
// hash-consed so structural equality is index equality.
enum class NOp { True, False, Lit, NegLit, And, Or, Next, WeakNext, Until, Release };

struct NNode {
    NOp op;
    int a;  // child or atom
    int b;
};

// Obligation code: node * 2 + (1 if strong). A strong obligation requires
// another position to exist; a weak one is discharged at the end of the trace.
using Clause = std::vector<int>;
using Dnf = std::vector<Clause>;

void normalize(Dnf& f) {
    for (auto& c : f) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    std::sort(f.begin(), f.end(), [](const Clause& x, const Clause& y) {
        return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    f.erase(std::unique(f.begin(), f.end()), f.end());
    Dnf kept;
    for (auto& c : f) {
        bool subsumed = false;
        for (const auto& k : kept)
            if (std::includes(c.begin(), c.end(), k.begin(), k.end())) {
                subsumed = true;
                break;
            }
        if (!subsumed) kept.push_back(std::move(c));
    }
    std::sort(kept.begin(), kept.end());
    f = std::move(kept);
}

Dnf dnf_or(const Dnf& x, const Dnf& y) {
    Dnf r = x;
    r.insert(r.end(), y.begin(), y.end());
    normalize(r);
    return r;
}

Dnf dnf_and(const Dnf& x, const Dnf& y) {
    Dnf r;
    r.reserve(x.size() * y.size());
    for (const auto& cx : x)
        for (const auto& cy : y) {
            Clause c = cx;
            c.insert(c.end(), cy.begin(), cy.end());
            r.push_back(std::move(c));
        }
    normalize(r);
    return r;
}

const Dnf kTrueDnf{Clause{}};
const Dnf kFalseDnf{};

class Builder {
public:
    int nnf(const NodePtr& n, bool neg) {
        switch (n->op) {
        case Op::True: return make(neg ? NOp::False : NOp::True, -1, -1);
        case Op::Atom: return make(neg ? NOp::NegLit : NOp::Lit, n->atom, -1);
        case Op::Not: return nnf(n->lhs, !neg);
        case Op::And:
            return make(neg ? NOp::Or : NOp::And, nnf(n->lhs, neg), nnf(n->rhs, neg));
        case Op::Or:
            return make(neg ? NOp::And : NOp::Or, nnf(n->lhs, neg), nnf(n->rhs, neg));
        case Op::Next: return make(neg ? NOp::WeakNext : NOp::Next, nnf(n->lhs, neg), -1);
        case Op::Until:
            return make(neg ? NOp::Release : NOp::Until, nnf(n->lhs, neg), nnf(n->rhs, neg));
        }
        throw InvalidInput("malformed formula");
    }

    Dnf obligation(int node, bool strong) {
        const NOp op = nodes_[static_cast<std::size_t>(node)].op;
        if (op == NOp::False && strong) return kFalseDnf;
        if (op == NOp::True && !strong) return kTrueDnf;
        return {Clause{node * 2 + (strong ? 1 : 0)}};
    }

    // Formula progression: the DNF of obligations on the remaining suffix
    // after reading `sym` at the current position.
    const Dnf& prog(int node, Symbol sym) {
        const auto key = std::make_pair(node, sym);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const NNode n = nodes_[static_cast<std::size_t>(node)];
        Dnf r;
        switch (n.op) {
        case NOp::True: r = kTrueDnf; break;
        case NOp::False: r = kFalseDnf; break;
        case NOp::Lit: r = (sym >> n.a) & 1u ? kTrueDnf : kFalseDnf; break;
        case NOp::NegLit: r = (sym >> n.a) & 1u ? kFalseDnf : kTrueDnf; break;
        case NOp::And: r = dnf_and(prog(n.a, sym), prog(n.b, sym)); break;
        case NOp::Or: r = dnf_or(prog(n.a, sym), prog(n.b, sym)); break;
        case NOp::Next: r = obligation(n.a, true); break;
        case NOp::WeakNext: r = obligation(n.a, false); break;
        case NOp::Until: r = dnf_or(prog(n.b, sym), dnf_and(prog(n.a, sym), obligation(node, true))); break;
        case NOp::Release: r = dnf_and(prog(n.b, sym), dnf_or(prog(n.a, sym), obligation(node, false))); break;
        }
        return memo_.emplace(key, std::move(r)).first->second;
    }

    Dnf step(const Dnf& state, Symbol sym) {
        Dnf out;
        for (const auto& clause : state) {
            Dnf acc = kTrueDnf;
            for (int ob : clause) {
                acc = dnf_and(acc, prog(ob / 2, sym));
                if (acc.empty()) break;
            }
            out.insert(out.end(), acc.begin(), acc.end());
        }
        normalize(out);
        return out;
    }

    static bool accepting(const Dnf& state) {
        return std::any_of(state.begin(), state.end(), [](const Clause& c) {
            return std::all_of(c.begin(), c.end(), [](int ob) { return ob % 2 == 0; });
        });
    }

private:
    int make(NOp op, int a, int b) {
        const auto key = std::make_tuple(static_cast<int>(op), a, b);
        if (auto it = index_.find(key); it != index_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({op, a, b});
        index_.emplace(key, id);
        return id;
    }

    std::vector<NNode> nodes_;
    std::map<std::tuple<int, int, int>, int> index_;
    std::map<std::pair<int, Symbol>, Dnf> memo_;
};

}  // namespace

DfaState Dfa::step(DfaState z, Symbol symbol) const {
    if (z >= num_states) throw InvalidInput("dfa_step: state " + std::to_string(z) + " out of range");
    if (symbol >= num_symbols()) throw InvalidInput("dfa_step: symbol " + std::to_string(symbol) + " out of range");
    return delta[static_cast<std::size_t>(z) * num_symbols() + symbol];
}

Dfa to_dfa(const Formula& f, std::size_t max_states) {
    if (!f.root) throw InvalidInput("to_dfa: empty formula");
    Builder b;
    const int root = b.nnf(f.root, false);
    Dfa d;
    d.ap = f.ap;
    const std::size_t ns = d.num_symbols();

    std::map<Dnf, DfaState> ids;
    std::vector<Dnf> states;
    auto intern = [&](Dnf s) {
        if (auto it = ids.find(s); it != ids.end()) return it->second;
        if (states.size() >= max_states)
            throw NumericalError("to_dfa: automaton exceeds " + std::to_string(max_states) + " states");
        const auto id = static_cast<DfaState>(states.size());
        ids.emplace(s, id);
        states.push_back(std::move(s));
        return id;
    };

    Dnf init = b.obligation(root, true);
    d.initial = intern(init);
    for (std::size_t z = 0; z < states.size(); ++z) {
        d.delta.resize((z + 1) * ns);
        for (Symbol s = 0; s < ns; ++s) {
            Dnf next = b.step(states[z], s);
            d.delta[z * ns + s] = intern(std::move(next));
        }
    }
    d.num_states = states.size();
    d.accepting.resize(d.num_states);
    for (std::size_t z = 0; z < d.num_states; ++z) d.accepting[z] = Builder::accepting(states[z]);

    // Nonempty traces never test the initial state unless a transition
    // re-enters it, so its acceptance is free: keep whichever choice
    // minimizes smaller.
    Dfa best = minimize(d);
    if (std::find(d.delta.begin(), d.delta.end(), d.initial) == d.delta.end()) {
        d.accepting[d.initial] = !d.accepting[d.initial];
        Dfa flipped = minimize(d);
        if (flipped.num_states < best.num_states) best = std::move(flipped);
    }
    return best;
}

Dfa minimize(const Dfa& d) {
    const std::size_t ns = d.num_symbols();
    if (d.num_states == 0) throw InvalidInput("minimize: empty automaton");

    // Prune to reachable states.
    std::vector<std::int64_t> remap(d.num_states, -1);
    std::vector<DfaState> order{d.initial};
    remap[d.initial] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (Symbol s = 0; s < ns; ++s) {
            const DfaState t = d.delta[order[i] * ns + s];
            if (remap[t] < 0) {
                remap[t] = static_cast<std::int64_t>(order.size());
                order.push_back(t);
            }
        }
    const std::size_t n = order.size();
    std::vector<DfaState> delta(n * ns);
    std::vector<bool> acc(n);
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] = d.accepting[order[i]];
        for (Symbol s = 0; s < ns; ++s) delta[i * ns + s] = static_cast<DfaState>(remap[d.delta[order[i] * ns + s]]);
    }

    // Hopcroft refinement.
    std::vector<std::vector<std::vector<DfaState>>> inv(ns, std::vector<std::vector<DfaState>>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (Symbol s = 0; s < ns; ++s) inv[s][delta[i * ns + s]].push_back(static_cast<DfaState>(i));

    std::vector<std::vector<DfaState>> blocks;
    std::vector<std::size_t> block_of(n);
    {
        std::vector<DfaState> yes, no;
        for (std::size_t i = 0; i < n; ++i) (acc[i] ? yes : no).push_back(static_cast<DfaState>(i));
        for (auto* part : {&yes, &no})
            if (!part->empty()) {
                for (auto z : *part) block_of[z] = blocks.size();
                blocks.push_back(std::move(*part));
            }
    }
    std::vector<std::vector<char>> in_work(blocks.size(), std::vector<char>(ns, 0));
    std::deque<std::pair<std::size_t, Symbol>> work;
    auto push = [&](std::size_t blk, Symbol s) {
        if (!in_work[blk][s]) {
            in_work[blk][s] = 1;
            work.emplace_back(blk, s);
        }
    };
    if (blocks.size() == 2) {
        const std::size_t smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
        for (Symbol s = 0; s < ns; ++s) push(smaller, s);
    }

    std::vector<char> in_x(n, 0);
    std::vector<std::size_t> hits(n, 0);
    while (!work.empty()) {
        const auto [blk, sym] = work.front();
        work.pop_front();
        in_work[blk][sym] = 0;

        std::vector<DfaState> x;
        for (DfaState t : blocks[blk])
            for (DfaState p : inv[sym][t])
                if (!in_x[p]) {
                    in_x[p] = 1;
                    x.push_back(p);
                }
        std::vector<std::size_t> touched;
        for (DfaState p : x)
            if (hits[block_of[p]]++ == 0) touched.push_back(block_of[p]);

        for (std::size_t y : touched) {
            if (hits[y] < blocks[y].size()) {
                std::vector<DfaState> inside, outside;
                for (DfaState z : blocks[y]) (in_x[z] ? inside : outside).push_back(z);
                const std::size_t fresh = blocks.size();
                blocks[y] = std::move(inside);
                for (DfaState z : outside) block_of[z] = fresh;
                blocks.push_back(std::move(outside));
                in_work.emplace_back(ns, 0);
                for (Symbol s = 0; s < ns; ++s) {
                    if (in_work[y][s]) push(fresh, s);
                    else push(blocks[y].size() <= blocks[fresh].size() ? y : fresh, s);
                }
            }
            hits[y] = 0;
        }
        for (DfaState p : x) in_x[p] = 0;
    }

    // Quotient, numbered breadth-first from the initial block.
    std::vector<std::int64_t> number(blocks.size(), -1);
    std::vector<std::size_t> queue{block_of[0]};
    number[block_of[0]] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const DfaState rep = blocks[queue[i]].front();
        for (Symbol s = 0; s < ns; ++s) {
            const std::size_t tb = block_of[delta[rep * ns + s]];
            if (number[tb] < 0) {
                number[tb] = static_cast<std::int64_t>(queue.size());
                queue.push_back(tb);
            }
        }
    }
    Dfa out;
    out.ap = d.ap;
    out.num_states = queue.size();
    out.initial = 0;
    out.accepting.resize(out.num_states);
    out.delta.resize(out.num_states * ns);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const DfaState rep = blocks[queue[i]].front();
        out.accepting[i] = acc[rep];
        for (Symbol s = 0; s < ns; ++s)
            out.delta[i * ns + s] = static_cast<DfaState>(number[block_of[delta[rep * ns + s]]]);
    }
    return out;
}

DfaState dfa_step(const Dfa& d, DfaState z, Symbol symbol) { return d.step(z, symbol); }

bool accepts_trace(const Dfa& d, const std::vector<Symbol>& trace) {
    if (trace.empty()) throw InvalidInput("accepts_trace: empty trace");
    DfaState z = d.initial;
    for (Symbol s : trace) z = d.step(z, s);
    return d.accepting[z];
}

bool accepts_prefix(const Dfa& d, const std::vector<Symbol>& trace) {
    if (trace.empty()) throw InvalidInput("accepts_prefix: empty trace");
    DfaState z = d.initial;
    for (Symbol s : trace) {
        z = d.step(z, s);
        if (d.accepting[z]) return true;
    }
    return false;
}

Symbol symbol_of(const Dfa& d, const std::vector<std::string>& true_props) {
    Symbol s = 0;
    for (std::size_t i = 0; i < d.ap.size(); ++i)
        if (std::find(true_props.begin(), true_props.end(), d.ap[i]) != true_props.end()) s |= Symbol{1} << i;
    return s;
}

std::string to_dot(const Dfa& d) {
    const std::size_t ns = d.num_symbols();
    auto symbol_text = [&](Symbol s) {
        std::string t = "{";
        bool first = true;
        for (std::size_t i = 0; i < d.ap.size(); ++i)
            if ((s >> i) & 1u) {
                t += (first ? "" : ",") + d.ap[i];
                first = false;
            }
        return t + "}";
    };
    std::ostringstream os;
    os << "digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n";
    for (std::size_t z = 0; z < d.num_states; ++z)
        os << "  z" << z << " [shape=" << (d.accepting[z] ? "doublecircle" : "circle") << "];\n";
    os << "  init -> z" << d.initial << ";\n";
    for (std::size_t z = 0; z < d.num_states; ++z) {
        std::map<DfaState, std::vector<Symbol>> edges;
        for (Symbol s = 0; s < ns; ++s) edges[d.delta[z * ns + s]].push_back(s);
        for (const auto& [t, syms] : edges) {
            os << "  z" << z << " -> z" << t << " [label=\"";
            for (std::size_t i = 0; i < syms.size(); ++i) os << (i ? " " : "") << symbol_text(syms[i]);
            os << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace drsyn::ltlf
