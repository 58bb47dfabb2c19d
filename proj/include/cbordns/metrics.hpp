#pragma once

// Byte savings / gain and the object taxonomy (tier, content type,
// redundancy, structure) extended with binary and taggy content.

#include <cbordns/cbor.hpp>
#include <cbordns/error.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>
#include <unordered_map>

namespace cbordns::metrics {

struct savings_report {
    std::size_t original_size = 0;
    std::size_t encoded_size = 0;
    std::int64_t savings = 0; // original - encoded; negative means inflation
    double gain = 0.0;        // savings / original
};

inline savings_report compute_savings(std::size_t original_size, std::size_t encoded_size)
{
    if (original_size == 0)
        throw codec_error(errc::zero_original);
    auto b = static_cast<std::int64_t>(original_size) - static_cast<std::int64_t>(encoded_size);
    return {original_size, encoded_size, b, static_cast<double>(b) / static_cast<double>(original_size)};
}

enum class content_type : std::uint8_t { textual, numeric, boolean, structural, binary, taggy };
enum class redundancy : std::uint8_t { redundant, non_redundant };
enum class structure : std::uint8_t { flat, nested };

constexpr std::string_view to_string(content_type c) noexcept
{
    switch (c) {
    case content_type::textual: return "textual";
    case content_type::numeric: return "numeric";
    case content_type::boolean: return "boolean";
    case content_type::structural: return "structural";
    case content_type::binary: return "binary";
    case content_type::taggy: return "taggy";
    }
    return "?";
}
constexpr std::string_view to_string(redundancy r) noexcept
{
    return r == redundancy::redundant ? "redundant" : "non_redundant";
}
constexpr std::string_view to_string(structure s) noexcept { return s == structure::nested ? "nested" : "flat"; }

struct taxonomy_record {
    int tier = 1;
    content_type content = content_type::textual;
    metrics::redundancy redundancy = redundancy::non_redundant;
    metrics::structure structure = structure::flat;

    bool operator==(const taxonomy_record&) const = default;
};

/// 1 below 100 bytes, 2 below 1000 bytes, 3 otherwise.
constexpr int tier_for(std::size_t size) noexcept
{
    if (size < 100)
        return 1;
    if (size < 1000)
        return 2;
    return 3;
}

/// Simple values below this are packing-table references.
inline constexpr std::uint8_t simple_reference_limit = 16;

namespace detail {

struct bytes_hash {
    std::size_t operator()(const bytes& b) const noexcept
    {
        return std::hash<std::string_view>()(std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
    }
};

class classifier {
public:
    // Returns the canonical encoding of `it`: identical to the regular
    // encoding except that map entries are sorted, so equality ignores order.
    bytes visit(const cbor::item& it, int container_depth)
    {
        using namespace cbor;
        bytes canon;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, text_string>) {
                    count(content_type::textual);
                    canon = encode(it);
                } else if constexpr (std::is_same_v<T, unsigned_int> || std::is_same_v<T, negative_int>
                    || std::is_same_v<T, floating>) {
                    count(content_type::numeric);
                    canon = encode(it);
                } else if constexpr (std::is_same_v<T, cbor::simple>) {
                    count(v.value < simple_reference_limit ? content_type::taggy : content_type::numeric);
                    canon = encode(it);
                } else if constexpr (std::is_same_v<T, boolean> || std::is_same_v<T, cbor::null>
                    || std::is_same_v<T, undefined>) {
                    count(content_type::boolean);
                    canon = encode(it);
                } else if constexpr (std::is_same_v<T, byte_string>) {
                    count(content_type::binary);
                    canon = encode(it);
                } else if constexpr (std::is_same_v<T, tagged>) {
                    count(content_type::taggy);
                    write_head(canon, major::tag, v.number);
                    auto inner = visit(*v.content, container_depth);
                    canon.insert(canon.end(), inner.begin(), inner.end());
                } else if constexpr (std::is_same_v<T, cbor::array>) {
                    count(content_type::structural);
                    note_container(container_depth);
                    write_head(canon, major::array, v.items.size());
                    for (const auto& i : v.items) {
                        auto inner = visit(i, container_depth + 1);
                        canon.insert(canon.end(), inner.begin(), inner.end());
                    }
                } else if constexpr (std::is_same_v<T, cbor::map>) {
                    count(content_type::structural);
                    note_container(container_depth);
                    std::vector<bytes> entries;
                    entries.reserve(v.entries.size());
                    for (const auto& [k, val] : v.entries) {
                        auto e = visit(k, container_depth + 1);
                        auto ve = visit(val, container_depth + 1);
                        e.insert(e.end(), ve.begin(), ve.end());
                        entries.push_back(std::move(e));
                    }
                    std::sort(entries.begin(), entries.end());
                    write_head(canon, major::map, v.entries.size());
                    for (const auto& e : entries)
                        canon.insert(canon.end(), e.begin(), e.end());
                }
            },
            it.value());
        if (canon.size() >= 2 && ++seen_[canon] >= 2)
            redundant_ = true;
        return canon;
    }

    content_type dominant() const noexcept
    {
        static constexpr content_type order[] = {content_type::textual, content_type::numeric, content_type::binary,
            content_type::taggy, content_type::boolean, content_type::structural};
        content_type best = order[0];
        for (auto c : order)
            if (counts_[static_cast<std::size_t>(c)] > counts_[static_cast<std::size_t>(best)])
                best = c;
        return best;
    }

    bool redundant() const noexcept { return redundant_; }
    bool nested() const noexcept { return nested_; }

private:
    void count(content_type c) { ++counts_[static_cast<std::size_t>(c)]; }
    void note_container(int container_depth)
    {
        if (container_depth > 0)
            nested_ = true;
    }

    std::array<std::size_t, 6> counts_{};
    std::unordered_map<bytes, std::size_t, bytes_hash> seen_;
    bool redundant_ = false;
    bool nested_ = false;
};

} // namespace detail

/// Classifies `it`. The tier follows `encoded_size`, which callers choose
/// (minified JSON size for JSON documents, CBOR size for dns+cbor objects).
///
/// These rules are explicit stand-ins for the looser prose definitions of
/// the source taxonomy:
///  - content type: the most frequent leaf kind; map keys count as leaves,
///    tags and simple values below 16 count as taggy, every array or map
///    counts once as structural. Ties go textual > numeric > binary > taggy
///    > boolean > structural.
///  - redundant: some leaf or whole subtree whose encoding is at least two
///    bytes occurs twice (map entry order ignored).
///  - nested: some array or map sits inside another array or map.
inline taxonomy_record classify(const cbor::item& it, std::size_t encoded_size)
{
    detail::classifier c;
    c.visit(it, 0);
    return {tier_for(encoded_size), c.dominant(), c.redundant() ? redundancy::redundant : redundancy::non_redundant,
        c.nested() ? structure::nested : structure::flat};
}

} // namespace cbordns::metrics
