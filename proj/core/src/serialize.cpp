#include "drsyn/serialize.hpp"

#include <fstream>
#include <iomanip>

#include "drsyn/error.hpp"

namespace drsyn {

json box_to_json(const Box& b) { return json{{"lower", b.lower}, {"upper", b.upper}}; }

Box box_from_json(const json& j) { return Box(j.at("lower").get<Vec>(), j.at("upper").get<Vec>()); }

json partition_to_json(const Partition& p, const std::vector<RegionDef>& regions) {
    json rs = json::array();
    for (const auto& r : regions) rs.push_back({{"name", r.name}, {"lower", r.box.lower}, {"upper", r.box.upper}});
    return json{{"domain", box_to_json(p.domain())}, {"cuts", p.cuts()}, {"regions", rs}};
}

PartitionDoc partition_from_json(const json& j) {
    PartitionDoc d;
    d.partition = Partition::grid(box_from_json(j.at("domain")), j.at("cuts").get<std::vector<int>>());
    if (j.contains("regions"))
        for (const auto& r : j.at("regions"))
            d.regions.push_back(RegionDef{r.at("name").get<std::string>(), box_from_json(r)});
    return d;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t partition_hash(const Partition& p, const std::vector<RegionDef>& regions) {
    return fnv1a64(partition_to_json(p, regions).dump());
}

json ball_to_json(const AmbiguityBall& b) {
    json atoms = json::array();
    for (std::size_t i = 0; i < b.center.size(); ++i) {
        const auto r = b.center.atoms.row(i);
        atoms.push_back(Vec(r.begin(), r.end()));
    }
    return json{{"atoms", atoms},      {"weights", b.center.weights}, {"radius", b.radius},
                {"s", b.order},        {"l", to_string(b.norm)},      {"beta", b.beta}};
}

AmbiguityBall ball_from_json(const json& j) {
    AmbiguityBall b;
    const auto atoms = j.at("atoms").get<std::vector<Vec>>();
    if (atoms.empty()) throw InvalidInput("ambiguity ball: no atoms");
    b.center.atoms = PointSet(atoms.front().size());
    for (const auto& a : atoms) {
        if (a.size() != b.center.atoms.dim()) throw InvalidInput("ambiguity ball: ragged atoms");
        b.center.atoms.push_back(a);
    }
    b.center.weights = j.at("weights").get<std::vector<double>>();
    if (b.center.weights.size() != atoms.size()) throw InvalidInput("ambiguity ball: weights and atoms differ in count");
    b.center.validate();
    b.radius = j.at("radius").get<double>();
    b.order = j.at("s").get<int>();
    b.norm = parse_norm(j.at("l").get<std::string>());
    b.beta = j.at("beta").get<double>();
    return b;
}

json abstraction_to_json(const RmdpAbstraction& r, const AbstractionMetadata& meta) {
    json triples = json::array(), rows = json::array();
    for (StateId q = 0; q < r.num_states(); ++q)
        for (std::size_t a = 0; a < r.num_actions(); ++a) {
            for (const auto& e : r.imdp.row(q, a)) triples.push_back(json::array({q, a, e.dest, e.lower, e.upper}));
            rows.push_back({{"q", q}, {"a", a}, {"theta", r.budget(q, a)}, {"restricted", r.restricted_support(q, a)}});
        }
    const auto stats = abstraction_stats(r);
    json md{{"model", meta.model},
            {"partition_hash", meta.partition_hash},
            {"ball", {{"radius", meta.ball.radius}, {"s", meta.ball.order}, {"l", to_string(meta.ball.norm)},
                      {"beta", meta.ball.beta}, {"atoms", meta.ball.center.size()}}}};
    if (meta.timestamp) md["timestamp"] = *meta.timestamp;
    return json{{"num_states", r.num_states()},
                {"num_actions", r.num_actions()},
                {"unsafe_state", r.partition.unsafe_id()},
                {"radius", r.radius},
                {"s", r.order},
                {"l", to_string(r.norm)},
                {"transitions", triples},
                {"rows", rows},
                {"stats",
                 {{"nonzeros", stats.nonzeros},
                  {"average_support", stats.average_support},
                  {"average_restricted_support", stats.average_restricted_support}}},
                {"metadata", md}};
}

RmdpAbstraction abstraction_from_json(const json& j, const Partition& p) {
    const auto ns = j.at("num_states").get<std::size_t>();
    const auto na = j.at("num_actions").get<std::size_t>();
    if (ns != p.num_states()) throw InvalidInput("abstraction: state count does not match the partition");
    RmdpAbstraction r;
    r.partition = p;
    r.imdp = ImdpAbstraction(ns, na);
    r.radius = j.at("radius").get<double>();
    r.order = j.at("s").get<int>();
    r.norm = parse_norm(j.at("l").get<std::string>());
    r.theta.assign(ns * na, 0.0);
    r.restricted.assign(ns * na, {});
    for (const auto& t : j.at("transitions")) {
        const auto q = t.at(0).get<std::size_t>(), a = t.at(1).get<std::size_t>();
        if (q >= ns || a >= na) throw InvalidInput("abstraction: transition index out of range");
        r.imdp.row(q, a).push_back(IntervalEntry{t.at(2).get<std::size_t>(), t.at(3).get<double>(), t.at(4).get<double>()});
    }
    for (const auto& row : j.at("rows")) {
        const auto q = row.at("q").get<std::size_t>(), a = row.at("a").get<std::size_t>();
        if (q >= ns || a >= na) throw InvalidInput("abstraction: row index out of range");
        r.theta[q * na + a] = row.at("theta").get<double>();
        r.restricted[q * na + a] = row.at("restricted").get<std::vector<StateId>>();
    }
    return r;
}

json dfa_to_json(const ltlf::Dfa& d) {
    json accepting = json::array(), delta = json::array();
    const std::size_t ns = d.num_symbols();
    for (std::size_t z = 0; z < d.num_states; ++z) {
        if (d.accepting[z]) accepting.push_back(z);
        delta.push_back(std::vector<ltlf::DfaState>(d.delta.begin() + static_cast<std::ptrdiff_t>(z * ns),
                                                    d.delta.begin() + static_cast<std::ptrdiff_t>((z + 1) * ns)));
    }
    return json{{"ap", d.ap}, {"states", d.num_states}, {"initial", d.initial}, {"accepting", accepting}, {"delta", delta}};
}

ltlf::Dfa dfa_from_json(const json& j) {
    ltlf::Dfa d;
    d.ap = j.at("ap").get<std::vector<std::string>>();
    d.num_states = j.at("states").get<std::size_t>();
    d.initial = j.at("initial").get<ltlf::DfaState>();
    d.accepting.assign(d.num_states, false);
    for (const auto& z : j.at("accepting")) d.accepting.at(z.get<std::size_t>()) = true;
    const auto rows = j.at("delta").get<std::vector<std::vector<ltlf::DfaState>>>();
    if (rows.size() != d.num_states || d.initial >= d.num_states) throw InvalidInput("dfa: inconsistent state count");
    for (const auto& r : rows) {
        if (r.size() != d.num_symbols()) throw InvalidInput("dfa: transition table is not total");
        for (auto t : r)
            if (t >= d.num_states) throw InvalidInput("dfa: transition to an unknown state");
        d.delta.insert(d.delta.end(), r.begin(), r.end());
    }
    return d;
}

json bounds_to_json(const ProductRmdp& prod, const ValueBounds& bounds, const Strategy& strategy) {
    json states = json::array();
    for (std::size_t s = 0; s < prod.num_states(); ++s)
        states.push_back({{"q", prod.base_state(s)},
                          {"z", prod.dfa_state(s)},
                          {"p_lower", bounds.p_lower[s]},
                          {"p_upper", bounds.p_upper[s]},
                          {"action", strategy.action[s]}});
    return json{{"dfa_states", prod.num_dfa_states()},
                {"iterations", bounds.iterations},
                {"residual", bounds.residual},
                {"converged", bounds.converged},
                {"states", states}};
}

void bounds_from_json(const json& j, const ProductRmdp& prod, ValueBounds& bounds, Strategy& strategy) {
    const auto& states = j.at("states");
    if (states.size() != prod.num_states() || j.at("dfa_states").get<std::size_t>() != prod.num_dfa_states())
        throw InvalidInput("bounds: document does not match the product");
    bounds.p_lower.assign(prod.num_states(), 0.0);
    bounds.p_upper.assign(prod.num_states(), 0.0);
    strategy.action.assign(prod.num_states(), 0);
    for (const auto& e : states) {
        const std::size_t s = prod.index(e.at("q").get<std::size_t>(), e.at("z").get<ltlf::DfaState>());
        bounds.p_lower.at(s) = e.at("p_lower").get<double>();
        bounds.p_upper.at(s) = e.at("p_upper").get<double>();
        strategy.action.at(s) = e.at("action").get<std::size_t>();
    }
    bounds.iterations = j.at("iterations").get<std::size_t>();
    bounds.residual = j.at("residual").get<double>();
    bounds.converged = j.at("converged").get<bool>();
}

void write_bounds_csv(std::ostream& out, const ProductRmdp& prod, const ValueBounds& bounds, const Strategy& strategy) {
    out << std::setprecision(17) << "q,z,p_lower,p_upper,action\n";
    for (std::size_t s = 0; s < prod.num_states(); ++s)
        out << prod.base_state(s) << ',' << prod.dfa_state(s) << ',' << bounds.p_lower[s] << ',' << bounds.p_upper[s]
            << ',' << strategy.action[s] << '\n';
}

void write_plot_csv(std::ostream& out, const ProductRmdp& prod, const ValueBounds& bounds, const Strategy& strategy) {
    const Partition& p = prod.base().partition;
    out << std::setprecision(17) << "cell_index";
    for (std::size_t i = 0; i < p.dim(); ++i) out << ",x_center_" << i;
    out << ",p_lower,p_upper,action\n";
    for (StateId q = 0; q < p.num_cells(); ++q) {
        const std::size_t s = prod.initial_state(q);
        out << q;
        for (double c : p.cell(q).center()) out << ',' << c;
        out << ',' << bounds.p_lower[s] << ',' << bounds.p_upper[s] << ',' << strategy.action[s] << '\n';
    }
}

json report_to_json(const McReport& r) {
    return json{{"cell", r.cell},
                {"trials", r.trials},
                {"horizon", r.horizon},
                {"successes", r.successes},
                {"empirical_rate", r.empirical_rate},
                {"ci_lower", r.ci_lower},
                {"ci_upper", r.ci_upper},
                {"certified_interval", {r.p_lower, r.p_upper}},
                {"contained", r.contained},
                {"live_fraction", r.live_fraction},
                {"still_rising", r.live_fraction > 0.0}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
    if (t.states.empty()) return;
    out << std::setprecision(17) << "k";
    for (std::size_t i = 0; i < t.states.front().size(); ++i) out << ",x_" << i;
    out << ",action,region,z\n";
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        out << k;
        for (double v : t.states[k]) out << ',' << v;
        out << ',';
        if (k < t.actions.size()) out << t.actions[k];
        out << ',' << t.regions[k] << ',' << t.memory[k] << '\n';
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace drsyn
