#include "rijndael/integral.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rijndael/gf256.hpp"

namespace rijndael {

namespace {

void check_positions(std::vector<Position> const& positions, int cols, char const* what) {
    std::set<Position> seen;
    for (auto const& p : positions) {
        if (p.row < 0 || p.row > 3 || p.col < 0 || p.col >= cols)
            throw InvalidStructure(std::string(what) + " position (" + std::to_string(p.row) + "," +
                                   std::to_string(p.col) + ") outside the state");
        if (!seen.insert(p).second)
            throw InvalidStructure(std::string("duplicate ") + what + " position (" + std::to_string(p.row) + "," +
                                   std::to_string(p.col) + ")");
    }
}

}  // namespace

std::string CellSymbol::to_string() const {
    switch (kind) {
        case Kind::Constant: return "C";
        case Kind::Sum: return "S";
        case Kind::Unknown: return "?";
        case Kind::All: {
            std::string s = "A^" + std::to_string(order) + "_" + std::to_string(group);
            return multiplicity == 1 ? s : "(" + s + ")^" + std::to_string(multiplicity);
        }
        case Kind::Eq: {
            std::string s = "Eq_" + std::to_string(group);
            if (weight != 1) s += "*" + to_hex(std::span<const std::uint8_t>(&weight, 1));
            return s;
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// IntegralProperty
// ---------------------------------------------------------------------------

void IntegralProperty::validate() const {
    int const t = params.block_cols();
    if (active.empty()) throw InvalidStructure("a property needs at least one active byte");
    check_positions(active, t, "active");
    if (rounds < 1) throw InvalidStructure("a property must cover at least one round");
    if (zero_sum.empty() && eq_pairs.empty()) throw InvalidStructure("a property must expect something");
    check_positions(zero_sum, t, "zero-sum");
    for (auto const& e : eq_pairs) {
        check_positions({e.first.pos}, t, "eq");
        check_positions({e.second.pos}, t, "eq");
        if (e.first.pos == e.second.pos) throw InvalidStructure("eq pair compares a byte with itself");
        if (e.first.weight == 0 || e.second.weight == 0) throw InvalidStructure("eq weights must be nonzero");
    }
}

Pattern IntegralProperty::input_pattern() const {
    int const t = params.block_cols();
    Pattern p(4, std::vector<CellSymbol>(static_cast<std::size_t>(t), CellSymbol::constant()));
    for (auto const& a : active)
        p[static_cast<std::size_t>(a.row)][static_cast<std::size_t>(a.col)] = CellSymbol::all(order(), 0);
    return p;
}

Pattern IntegralProperty::output_pattern() const {
    int const t = params.block_cols();
    Pattern p(4, std::vector<CellSymbol>(static_cast<std::size_t>(t), CellSymbol::unknown()));
    for (auto const& z : zero_sum) p[static_cast<std::size_t>(z.row)][static_cast<std::size_t>(z.col)] = CellSymbol::sum();

    // Eq classes are connected components of the pair graph. Weights are
    // propagated from a root of weight 01 so that weight * sum agrees across
    // each class.
    std::map<Position, std::vector<std::pair<Position, std::uint8_t>>> edges;  // neighbour, ratio
    for (auto const& e : eq_pairs) {
        // w1 * s1 = w2 * s2, so a cell weighted W at `first` implies W * w2 / w1 at `second`.
        edges[e.first.pos].push_back({e.second.pos, gf_mul(e.second.weight, gf_inv(e.first.weight))});
        edges[e.second.pos].push_back({e.first.pos, gf_mul(e.first.weight, gf_inv(e.second.weight))});
    }
    std::map<Position, std::pair<int, std::uint8_t>> assigned;
    int next_group = 0;
    for (auto const& [root, unused] : edges) {
        if (assigned.contains(root)) continue;
        assigned[root] = {next_group, 1};
        std::vector<Position> todo{root};
        while (!todo.empty()) {
            Position const cur = todo.back();
            todo.pop_back();
            for (auto const& [next, ratio] : edges[cur]) {
                if (assigned.contains(next)) continue;
                assigned[next] = {next_group, gf_mul(assigned[cur].second, ratio)};
                todo.push_back(next);
            }
        }
        ++next_group;
    }
    for (auto const& [pos, gw] : assigned)
        p[static_cast<std::size_t>(pos.row)][static_cast<std::size_t>(pos.col)] = CellSymbol::eq(gw.first, gw.second);
    return p;
}

// ---------------------------------------------------------------------------
// StructuredSet
// ---------------------------------------------------------------------------

StructuredSet::StructuredSet(State base, std::vector<Position> active, int multiplicity)
    : base_(std::move(base)), active_(std::move(active)), multiplicity_(multiplicity) {
    if (active_.empty()) throw InvalidStructure("structure needs at least one active byte");
    if (active_.size() > 7) throw InvalidStructure("structure order above 7 cannot be indexed");
    if (multiplicity_ < 1) throw InvalidStructure("multiplicity must be positive");
    check_positions(active_, base_.cols(), "active");
}

State StructuredSet::at(std::uint64_t index) const {
    State s = base_;
    std::uint64_t v = index & (distinct() - 1);
    for (auto const& p : active_) {
        s.at(p) = static_cast<std::uint8_t>(v);
        v >>= 8;
    }
    return s;
}

StructuredSet StructuredSet::first_order_slice(std::uint64_t outer) const {
    if (outer >= (distinct() >> 8)) throw InvalidStructure("slice index out of range");
    State b = at(outer << 8);
    return StructuredSet(b, {active_.front()}, 1);
}

StructuredSet::Iterator::Iterator(StructuredSet const* set, std::uint64_t index) : set_(set), index_(index) {
    if (index_ < set_->size()) current_ = set_->at(index_);
}

StructuredSet::Iterator& StructuredSet::Iterator::operator++() {
    ++index_;
    if (index_ >= set_->size()) return *this;
    // Odometer update touches only the bytes that roll over.
    std::uint64_t v = index_ & (set_->distinct() - 1);
    for (auto const& p : set_->active_) {
        current_.at(p) = static_cast<std::uint8_t>(v);
        if ((v & 0xff) != 0) break;
        v >>= 8;
    }
    return *this;
}

StructuredSet generate_structure(State const& base, std::vector<Position> const& positions) {
    return StructuredSet(base, positions, 1);
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

bool Verdicts::all_pass() const {
    return std::all_of(zero_sum.begin(), zero_sum.end(), [](auto const& v) { return v.second; }) &&
           std::all_of(eq_pairs.begin(), eq_pairs.end(), [](auto const& v) { return v.second; });
}

Verdicts check_expectation(State const& sum, IntegralProperty const& prop) {
    Verdicts v;
    for (auto const& z : prop.zero_sum) v.zero_sum.emplace_back(z, sum.at(z) == 0);
    for (auto const& e : prop.eq_pairs) {
        bool const ok = gf_mul(e.first.weight, sum.at(e.first.pos)) == gf_mul(e.second.weight, sum.at(e.second.pos));
        v.eq_pairs.emplace_back(e, ok);
    }
    return v;
}

// ---------------------------------------------------------------------------
// JSON descriptor
// ---------------------------------------------------------------------------

nlohmann::json to_json(IntegralProperty const& prop) {
    using nlohmann::json;
    json active = json::array();
    for (auto const& p : prop.active) active.push_back({p.row, p.col});
    json zero = json::array();
    for (auto const& p : prop.zero_sum) zero.push_back({p.row, p.col});
    json eq = json::array();
    for (auto const& e : prop.eq_pairs)
        eq.push_back({{e.first.pos.row, e.first.pos.col, e.first.weight}, {e.second.pos.row, e.second.pos.col, e.second.weight}});
    return json{{"block_bits", prop.params.block_bits()},
                {"key_bits", prop.params.key_bits()},
                {"order", prop.order()},
                {"rounds", prop.rounds},
                {"active", active},
                {"zero_sum", zero},
                {"eq_pairs", eq},
                {"final_special", prop.final_special}};
}

IntegralProperty property_from_json(nlohmann::json const& j) {
    try {
        IntegralProperty prop;
        prop.params = CipherParams::from_bits(j.at("block_bits").get<int>(), j.value("key_bits", 128));
        prop.rounds = j.at("rounds").get<int>();
        for (auto const& p : j.at("active")) prop.active.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        for (auto const& p : j.value("zero_sum", nlohmann::json::array()))
            prop.zero_sum.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        for (auto const& e : j.value("eq_pairs", nlohmann::json::array())) {
            EqPair pair;
            pair.first = {{e.at(0).at(0).get<int>(), e.at(0).at(1).get<int>()}, e.at(0).at(2).get<std::uint8_t>()};
            pair.second = {{e.at(1).at(0).get<int>(), e.at(1).at(1).get<int>()}, e.at(1).at(2).get<std::uint8_t>()};
            prop.eq_pairs.push_back(pair);
        }
        prop.final_special = j.value("final_special", false);
        if (j.contains("order") && j.at("order").get<int>() != prop.order())
            throw InvalidStructure("descriptor order does not match number of active positions");
        prop.validate();
        return prop;
    } catch (nlohmann::json::exception const& e) {
        throw InvalidStructure(std::string("malformed property descriptor: ") + e.what());
    }
}

}  // namespace rijndael
