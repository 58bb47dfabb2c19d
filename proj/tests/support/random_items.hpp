#pragma once

// Random generators shared by the property tests.

#include <cbordns/cbor.hpp>

#include <cstdint>
#include <ostream>
#include <random>
#include <string>

namespace cbordns::test_support {

class item_generator {
public:
    explicit item_generator(std::uint64_t seed)
        : rng_(seed)
    {
    }

    std::mt19937_64& rng() { return rng_; }

    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi)
    {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
    }

    // Magnitudes are spread over every head width.
    std::uint64_t any_uint()
    {
        switch (uniform(0, 5)) {
        case 0: return uniform(0, 23);
        case 1: return uniform(24, 0xff);
        case 2: return uniform(0x100, 0xffff);
        case 3: return uniform(0x10000, 0xffffffffULL);
        case 4: return uniform(0x100000000ULL, ~0ULL);
        default: return uniform(0, 30);
        }
    }

    std::string any_text(std::size_t max_len = 40)
    {
        static constexpr std::string_view pool[] = {"a", "b", "z", ".", "-", "0", "é", "日", "😀", " ", "\"", "\\"};
        std::string s;
        auto n = uniform(0, max_len);
        for (std::uint64_t i = 0; i < n; ++i)
            s += pool[uniform(0, std::size(pool) - 1)];
        return s;
    }

    bytes any_bytes(std::size_t max_len = 40)
    {
        bytes b(uniform(0, max_len));
        for (auto& x : b)
            x = static_cast<std::uint8_t>(uniform(0, 255));
        return b;
    }

    double any_double()
    {
        switch (uniform(0, 4)) {
        case 0: return static_cast<double>(static_cast<std::int64_t>(uniform(0, 2000))) / 4.0 - 250.0;
        case 1: return static_cast<double>(static_cast<float>(std::uniform_real_distribution<double>(-1e6, 1e6)(rng_)));
        case 2: return std::uniform_real_distribution<double>(-1e300, 1e300)(rng_);
        case 3: return std::ldexp(1.0, static_cast<int>(uniform(0, 60)) - 40);
        default: {
            static constexpr double specials[] = {0.0, -0.0, INFINITY, -INFINITY, 5.960464477539063e-08, 65504.0};
            return specials[uniform(0, std::size(specials) - 1)];
        }
        }
    }

    /// Model-valid item: floats carry a width at which their value is exact.
    cbor::item any_item(int depth, bool allow_simple_refs = true)
    {
        auto pick = uniform(0, depth > 0 ? 12 : 8);
        switch (pick) {
        case 0: return cbor::uinteger(any_uint());
        case 1: return cbor::negative_int{any_uint()};
        case 2: return cbor::bstr(any_bytes());
        case 3: return cbor::text(any_text());
        case 4: {
            std::uint8_t v;
            do {
                v = static_cast<std::uint8_t>(uniform(allow_simple_refs ? 0 : 16, 255));
            } while (v >= 20 && v <= 31);
            return cbor::simple{v};
        }
        case 5: return cbor::boolean_value(uniform(0, 1) == 1);
        case 6: return uniform(0, 1) ? cbor::item(cbor::null{}) : cbor::item(cbor::undefined{});
        case 7:
        case 8: {
            double v = any_double();
            auto w = cbor::smallest_width(v);
            auto bump = uniform(0, 2);
            if (bump == 1 && w == cbor::float_width::half)
                w = cbor::float_width::single;
            else if (bump == 2)
                w = cbor::float_width::double_;
            return cbor::float_value(v, w);
        }
        case 9:
        case 10: {
            std::vector<cbor::item> items;
            auto n = uniform(0, 5);
            for (std::uint64_t i = 0; i < n; ++i)
                items.push_back(any_item(depth - 1, allow_simple_refs));
            return cbor::arr(std::move(items));
        }
        case 11: {
            std::vector<std::pair<cbor::item, cbor::item>> entries;
            auto n = uniform(0, 4);
            for (std::uint64_t i = 0; i < n; ++i)
                entries.emplace_back(any_item(depth - 1, allow_simple_refs), any_item(depth - 1, allow_simple_refs));
            return cbor::make_map(std::move(entries));
        }
        default: {
            std::uint64_t number;
            do {
                number = any_uint();
            } while (!allow_simple_refs && (number == 6 || number == 113 || number == 216 || number == 217));
            return cbor::tag(number, any_item(depth - 1, allow_simple_refs));
        }
        }
    }

private:
    std::mt19937_64 rng_;
};

} // namespace cbordns::test_support

namespace cbordns::cbor {

// Readable gtest failure output.
inline void PrintTo(const item& it, std::ostream* os) { *os << to_diagnostic(it); }

} // namespace cbordns::cbor
