#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "fewsub/error.hpp"

namespace fewsub {

using Element = int;

/// Upper bound on the size of any domain handled through ElementSet.
inline constexpr int kMaxDomain = 64;

/// A subset of {0, ..., 63} stored as a single machine word.
class ElementSet {
public:
    constexpr ElementSet() = default;
    constexpr explicit ElementSet(std::uint64_t bits) : bits_(bits) {}

    static ElementSet full(int size) {
        if (size < 0 || size > kMaxDomain)
            throw resource_limit("domain of size " + std::to_string(size) + " exceeds " +
                                 std::to_string(kMaxDomain) + " elements");
        return ElementSet(size == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << size) - 1));
    }

    static ElementSet singleton(Element e) { return ElementSet(std::uint64_t{1} << e); }

    template <typename Range>
    static ElementSet of(const Range& elements) {
        ElementSet s;
        for (auto e : elements) s.insert(static_cast<Element>(e));
        return s;
    }

    static ElementSet of(std::initializer_list<Element> elements) {
        ElementSet s;
        for (auto e : elements) s.insert(e);
        return s;
    }

    [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] int size() const { return std::popcount(bits_); }
    [[nodiscard]] constexpr bool contains(Element e) const { return (bits_ >> e) & 1U; }
    [[nodiscard]] Element min() const { return std::countr_zero(bits_); }

    void insert(Element e) { bits_ |= std::uint64_t{1} << e; }
    void erase(Element e) { bits_ &= ~(std::uint64_t{1} << e); }

    [[nodiscard]] constexpr bool subset_of(ElementSet o) const { return (bits_ & ~o.bits_) == 0; }
    [[nodiscard]] constexpr bool intersects(ElementSet o) const { return (bits_ & o.bits_) != 0; }

    constexpr ElementSet operator&(ElementSet o) const { return ElementSet(bits_ & o.bits_); }
    constexpr ElementSet operator|(ElementSet o) const { return ElementSet(bits_ | o.bits_); }
    constexpr ElementSet operator-(ElementSet o) const { return ElementSet(bits_ & ~o.bits_); }
    ElementSet& operator&=(ElementSet o) { bits_ &= o.bits_; return *this; }
    ElementSet& operator|=(ElementSet o) { bits_ |= o.bits_; return *this; }
    ElementSet& operator-=(ElementSet o) { bits_ &= ~o.bits_; return *this; }
    constexpr bool operator==(const ElementSet&) const = default;
    constexpr auto operator<=>(const ElementSet&) const = default;

    class iterator {
    public:
        using value_type = Element;
        using difference_type = std::ptrdiff_t;
        constexpr iterator() = default;
        constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
        Element operator*() const { return std::countr_zero(rest_); }
        iterator& operator++() { rest_ &= rest_ - 1; return *this; }
        iterator operator++(int) { auto t = *this; ++*this; return t; }
        constexpr bool operator==(const iterator&) const = default;

    private:
        std::uint64_t rest_ = 0;
    };

    [[nodiscard]] iterator begin() const { return iterator(bits_); }
    [[nodiscard]] iterator end() const { return iterator(0); }

    [[nodiscard]] std::vector<Element> to_vector() const { return {begin(), end()}; }

    [[nodiscard]] std::string to_string() const {
        std::string out = "{";
        bool first = true;
        for (auto e : *this) {
            if (!first) out += ",";
            out += std::to_string(e);
            first = false;
        }
        return out + "}";
    }

private:
    std::uint64_t bits_ = 0;
};

}  // namespace fewsub
