#pragma once

#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijndael/cipher.hpp"

namespace rijndael {

// One cell of an integral pattern: C, A^d_i (with multiplicity k), S, ?, or
// Eq_i carrying the weight applied before comparing sums.
struct CellSymbol {
    enum class Kind { Constant, All, Sum, Unknown, Eq };

    Kind kind = Kind::Unknown;
    int order = 0;         // All
    int group = 0;         // All, Eq
    int multiplicity = 1;  // All
    std::uint8_t weight = 1;  // Eq

    static CellSymbol constant() { return {Kind::Constant}; }
    static CellSymbol all(int order, int group = 0, int multiplicity = 1) {
        return {Kind::All, order, group, multiplicity, 1};
    }
    static CellSymbol sum() { return {Kind::Sum}; }
    static CellSymbol unknown() { return {Kind::Unknown}; }
    static CellSymbol eq(int group, std::uint8_t weight) { return {Kind::Eq, 0, group, 1, weight}; }

    std::string to_string() const;

    friend bool operator==(CellSymbol const&, CellSymbol const&) = default;
};

using Pattern = std::vector<std::vector<CellSymbol>>;  // [row][col]

struct WeightedPosition {
    Position pos;
    std::uint8_t weight = 1;

    friend bool operator==(WeightedPosition const&, WeightedPosition const&) = default;
    friend auto operator<=>(WeightedPosition const&, WeightedPosition const&) = default;
};

struct EqPair {
    WeightedPosition first;
    WeightedPosition second;

    friend bool operator==(EqPair const&, EqPair const&) = default;
    friend auto operator<=>(EqPair const&, EqPair const&) = default;
};

struct IntegralProperty {
    CipherParams params = CipherParams::from_bits(128, 128);
    std::vector<Position> active;
    int rounds = 1;
    std::vector<Position> zero_sum;
    std::vector<EqPair> eq_pairs;
    // Convention the sums were validated under: true when the last round
    // omits MixColumns.
    bool final_special = false;

    int order() const { return static_cast<int>(active.size()); }

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    Pattern input_pattern() const;
    Pattern output_pattern() const;
};

class InvalidStructure : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptyStream : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// 2^{8d} texts equal to `base` except at the active positions, whose
// concatenation runs through every d-byte value. The counter is little-endian
// over `active`, so active[0] changes fastest. With multiplicity k the whole
// enumeration repeats k times.
class StructuredSet {
public:
    StructuredSet(State base, std::vector<Position> active, int multiplicity = 1);

    State const& base() const { return base_; }
    std::vector<Position> const& active() const { return active_; }
    int order() const { return static_cast<int>(active_.size()); }
    int multiplicity() const { return multiplicity_; }

    // Distinct combined values, 2^{8d}.
    std::uint64_t distinct() const { return std::uint64_t{1} << (8 * order()); }
    std::uint64_t size() const { return distinct() * static_cast<std::uint64_t>(multiplicity_); }

    State at(std::uint64_t index) const;

    // The 2^{8(d-1)} first-order structures obtained by fixing every active
    // byte except active[0]; `outer` selects the fixed values.
    StructuredSet first_order_slice(std::uint64_t outer) const;

    class Iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = State;
        using difference_type = std::ptrdiff_t;
        using pointer = State const*;
        using reference = State const&;

        Iterator() = default;
        Iterator(StructuredSet const* set, std::uint64_t index);

        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        Iterator& operator++();
        Iterator operator++(int) {
            auto tmp = *this;
            ++*this;
            return tmp;
        }
        friend bool operator==(Iterator const& a, Iterator const& b) { return a.index_ == b.index_; }

    private:
        StructuredSet const* set_ = nullptr;
        std::uint64_t index_ = 0;
        State current_;
    };

    Iterator begin() const { return {this, 0}; }
    Iterator end() const { return {this, size()}; }
    Iterator iterator_at(std::uint64_t index) const { return {this, index}; }

private:
    State base_;
    std::vector<Position> active_;
    int multiplicity_;
};

StructuredSet generate_structure(State const& base, std::vector<Position> const& positions);

// Byte-wise XOR of every state in [first, last); throws EmptyStream if empty.
template <std::input_iterator It, std::sentinel_for<It> End>
State xor_accumulate(It first, End last) {
    if (first == last) throw EmptyStream("cannot accumulate an empty stream");
    State acc = *first;
    for (++first; first != last; ++first) acc ^= *first;
    return acc;
}

template <class Range>
State xor_accumulate(Range const& r) {
    return xor_accumulate(std::begin(r), std::end(r));
}

struct Verdicts {
    std::vector<std::pair<Position, bool>> zero_sum;
    std::vector<std::pair<EqPair, bool>> eq_pairs;

    bool all_pass() const;
};

Verdicts check_expectation(State const& sum, IntegralProperty const& prop);

// Descriptor format:
// {block_bits, key_bits, order, rounds, active, zero_sum, eq_pairs[, final_special]}
nlohmann::json to_json(IntegralProperty const& prop);
IntegralProperty property_from_json(nlohmann::json const& j);

}  // namespace rijndael
