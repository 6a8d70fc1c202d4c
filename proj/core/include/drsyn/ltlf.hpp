#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "drsyn/error.hpp"

namespace drsyn::ltlf {

/// Syntax error in a formula, with the byte offset where it was detected.
class ParseError : public InvalidInput {
public:
    ParseError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

enum class Op { True, Atom, Not, And, Or, Next, Until };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Core syntax tree: eventually / globally / implication / false are
/// expanded while parsing (F a = true U a, G a = !F !a).
struct Node {
    Op op = Op::True;
    int atom = -1;
    NodePtr lhs;
    NodePtr rhs;
};

NodePtr make_true();
NodePtr make_false();
NodePtr make_atom(int index);
NodePtr make_not(NodePtr a);
NodePtr make_and(NodePtr a, NodePtr b);
NodePtr make_or(NodePtr a, NodePtr b);
NodePtr make_next(NodePtr a);
NodePtr make_until(NodePtr a, NodePtr b);
NodePtr make_eventually(NodePtr a);
NodePtr make_globally(NodePtr a);
NodePtr make_implies(NodePtr a, NodePtr b);

/// A formula together with the ordered atomic propositions it ranges over.
struct Formula {
    NodePtr root;
    std::vector<std::string> ap;
};

/// Grammar, loosest binding first:
///   f := f '<->' f | f '->' f | f 'U' f | f '|' f | f '&' f
///      | '!' f | 'X' f | 'F' f | 'G' f | 'true' | 'false' | atom | '(' f ')'
/// '->' and 'U' associate to the right, the others to the left.
Formula parse(std::string_view text, const std::vector<std::string>& ap);

std::string to_string(const Formula& f);
std::size_t formula_size(const NodePtr& n);

/// Symbols are valuations of the propositions as bitmasks: bit i is ap[i].
using Symbol = std::uint32_t;
using DfaState = std::uint32_t;

/// Complete deterministic automaton over 2^|ap|.
struct Dfa {
    std::vector<std::string> ap;
    std::size_t num_states = 0;
    DfaState initial = 0;
    std::vector<bool> accepting;
    /// delta[z * num_symbols() + symbol]
    std::vector<DfaState> delta;

    std::size_t num_symbols() const { return std::size_t{1} << ap.size(); }
    bool is_accepting(DfaState z) const { return accepting[z]; }
    /// Throws InvalidInput for out-of-range arguments.
    DfaState step(DfaState z, Symbol symbol) const;
};

/// Upper limit on automaton size during construction.
inline constexpr std::size_t kMaxDfaStates = 1'000'000;

/// Progression-based NFA over obligation sets, determinized by subset
/// construction and minimized. Accepts exactly the nonempty finite traces
/// that satisfy the formula.
Dfa to_dfa(const Formula& f, std::size_t max_states = kMaxDfaStates);

/// Hopcroft partition refinement after pruning unreachable states. States are
/// renumbered in breadth-first order from the initial state.
Dfa minimize(const Dfa& d);

DfaState dfa_step(const Dfa& d, DfaState z, Symbol symbol);
/// Runs the whole trace and tests the final state. Throws on an empty trace.
bool accepts_trace(const Dfa& d, const std::vector<Symbol>& trace);
/// True iff some nonempty prefix of the trace is accepted.
bool accepts_prefix(const Dfa& d, const std::vector<Symbol>& trace);

/// Symbol for a set of proposition names; unknown names are ignored.
Symbol symbol_of(const Dfa& d, const std::vector<std::string>& true_props);

std::string to_dot(const Dfa& d);

}  // namespace drsyn::ltlf
