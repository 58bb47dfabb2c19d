#pragma once

// CBOR data model, encoder, decoder and diagnostic notation.
//
// Every head is written in its shortest form and every length is definite.
// The decoder additionally accepts indefinite-length strings, arrays and maps
// and folds them into the definite model.

#include <cbordns/encoding.hpp>
#include <cbordns/error.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cbordns::cbor {

enum class major : std::uint8_t {
    unsigned_int = 0,
    negative_int = 1,
    byte_string = 2,
    text_string = 3,
    array = 4,
    map = 5,
    tag = 6,
    simple_or_float = 7,
};

enum class float_width : std::uint8_t { half = 16, single = 32, double_ = 64 };

enum class float_mode : std::uint8_t { preserve, force_double, smallest };

inline constexpr std::size_t default_max_depth = 128;

struct encode_options {
    float_mode floats = float_mode::preserve;
    std::size_t max_depth = default_max_depth;
};

struct decode_options {
    bool accept_indefinite = true;
    std::size_t max_depth = default_max_depth;
};

/// Heap-allocated single value with value semantics; lets `tagged` hold an item.
template <typename T>
class box {
public:
    box(T value)
        : ptr_(std::make_unique<T>(std::move(value)))
    {
    }
    box(const box& other)
        : ptr_(std::make_unique<T>(*other.ptr_))
    {
    }
    box(box&&) noexcept = default;
    box& operator=(const box& other)
    {
        if (this != &other)
            ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    box& operator=(box&&) noexcept = default;
    ~box() = default;

    T& operator*() noexcept { return *ptr_; }
    const T& operator*() const noexcept { return *ptr_; }
    T* operator->() noexcept { return ptr_.get(); }
    const T* operator->() const noexcept { return ptr_.get(); }

    friend bool operator==(const box& a, const box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

class item;

struct unsigned_int {
    std::uint64_t value = 0;
    bool operator==(const unsigned_int&) const = default;
};

/// Encodes the value -1 - n.
struct negative_int {
    std::uint64_t n = 0;
    bool operator==(const negative_int&) const = default;
};

struct byte_string {
    bytes data;
    bool operator==(const byte_string&) const = default;
};

struct text_string {
    std::string data;
    bool operator==(const text_string&) const = default;
};

struct array {
    std::vector<item> items;
    bool operator==(const array&) const;
};

struct map {
    std::vector<std::pair<item, item>> entries;
    bool operator==(const map&) const;
};

struct tagged {
    std::uint64_t number = 0;
    box<item> content;
    bool operator==(const tagged&) const;
};

/// Simple values other than the literals false/true/null/undefined. Never 20..31.
struct simple {
    std::uint8_t value = 0;
    bool operator==(const simple&) const = default;
};

struct boolean {
    bool value = false;
    bool operator==(const boolean&) const = default;
};

struct null {
    bool operator==(const null&) const = default;
};

struct undefined {
    bool operator==(const undefined&) const = default;
};

struct floating {
    double value = 0.0;
    float_width width = float_width::double_;

    // Any two NaNs compare equal; otherwise bit-identical value and same width.
    bool operator==(const floating& o) const
    {
        if (std::isnan(value) && std::isnan(o.value))
            return true;
        return std::bit_cast<std::uint64_t>(value) == std::bit_cast<std::uint64_t>(o.value) && width == o.width;
    }
};

class item {
public:
    using variant_type = std::variant<unsigned_int, negative_int, byte_string, text_string, array, map, tagged, simple,
        boolean, null, undefined, floating>;

    item()
        : v_(null{})
    {
    }

    template <typename T>
        requires std::is_constructible_v<variant_type, T&&> && (!std::is_same_v<std::remove_cvref_t<T>, item>)
    item(T&& value)
        : v_(std::forward<T>(value))
    {
    }

    template <typename T>
    bool is() const noexcept
    {
        return std::holds_alternative<T>(v_);
    }
    template <typename T>
    const T& as() const
    {
        return std::get<T>(v_);
    }
    template <typename T>
    T& as()
    {
        return std::get<T>(v_);
    }
    template <typename T>
    const T* get_if() const noexcept
    {
        return std::get_if<T>(&v_);
    }
    template <typename T>
    T* get_if() noexcept
    {
        return std::get_if<T>(&v_);
    }

    const variant_type& value() const noexcept { return v_; }
    variant_type& value() noexcept { return v_; }

    bool operator==(const item& o) const { return v_ == o.v_; }

private:
    variant_type v_;
};

inline bool array::operator==(const array& o) const { return items == o.items; }
inline bool map::operator==(const map& o) const { return entries == o.entries; }
inline bool tagged::operator==(const tagged& o) const { return number == o.number && content == o.content; }

// Construction helpers.

inline item uinteger(std::uint64_t v) { return unsigned_int{v}; }

/// Signed convenience constructor covering the int64 range.
inline item integer(std::int64_t v)
{
    if (v >= 0)
        return unsigned_int{static_cast<std::uint64_t>(v)};
    return negative_int{static_cast<std::uint64_t>(-(v + 1))};
}

inline item text(std::string s) { return text_string{std::move(s)}; }
inline item bstr(bytes b) { return byte_string{std::move(b)}; }
inline item arr(std::vector<item> items) { return array{std::move(items)}; }
inline item tag(std::uint64_t number, item content) { return tagged{number, box<item>(std::move(content))}; }
inline item boolean_value(bool b) { return boolean{b}; }
inline item simple_value(std::uint8_t v) { return simple{v}; }
inline item float_value(double v, float_width w = float_width::double_) { return floating{v, w}; }

inline item make_map(std::vector<std::pair<item, item>> entries) { return map{std::move(entries)}; }

// ---------------------------------------------------------------------------
// Float width helpers
// ---------------------------------------------------------------------------

inline double half_to_double(std::uint16_t half) noexcept
{
    int exp = (half >> 10) & 0x1f;
    int mant = half & 0x3ff;
    double val;
    if (exp == 0)
        val = std::ldexp(mant, -24);
    else if (exp != 31)
        val = std::ldexp(mant + 1024, exp - 25);
    else
        val = mant == 0 ? INFINITY : NAN;
    return (half & 0x8000) ? -val : val;
}

/// Half-precision bits when `v` is exactly representable as a binary16 value.
inline std::optional<std::uint16_t> exact_half(double v) noexcept
{
    if (std::isnan(v))
        return std::nullopt;
    std::uint16_t sign = std::signbit(v) ? 0x8000 : 0;
    double a = std::fabs(v);
    if (a == 0.0)
        return sign;
    if (std::isinf(a))
        return static_cast<std::uint16_t>(sign | 0x7c00);
    int e = std::ilogb(a);
    if (e > 15)
        return std::nullopt;
    if (e < -14) {
        double m = std::ldexp(a, 24);
        if (m != std::trunc(m) || m < 1 || m > 1023)
            return std::nullopt;
        return static_cast<std::uint16_t>(sign | static_cast<std::uint16_t>(m));
    }
    double m = std::ldexp(a, 10 - e);
    if (m != std::trunc(m))
        return std::nullopt;
    auto mi = static_cast<std::uint16_t>(m);
    return static_cast<std::uint16_t>(sign | ((e + 15) << 10) | (mi - 1024));
}

inline bool exact_single(double v) noexcept
{
    if (std::isnan(v))
        return false;
    auto f = static_cast<float>(v);
    return static_cast<double>(f) == v || (std::isinf(v) && std::isinf(f));
}

/// Narrowest width at which `v` round-trips bit-exactly (NaN collapses to half).
inline float_width smallest_width(double v) noexcept
{
    if (std::isnan(v) || exact_half(v))
        return float_width::half;
    if (exact_single(v))
        return float_width::single;
    return float_width::double_;
}

// ---------------------------------------------------------------------------
// Heads
// ---------------------------------------------------------------------------

struct header {
    major major_code = major::unsigned_int;
    std::uint8_t indicator = 0;
    std::uint64_t argument = 0;
};

/// Bytes used by a head carrying argument `n`.
constexpr std::size_t head_size(std::uint64_t n) noexcept
{
    if (n <= 23)
        return 1;
    if (n <= 0xff)
        return 2;
    if (n <= 0xffff)
        return 3;
    if (n <= 0xffffffffULL)
        return 5;
    return 9;
}

inline void write_head(bytes& out, major m, std::uint64_t n)
{
    auto mt = static_cast<std::uint8_t>(static_cast<std::uint8_t>(m) << 5);
    auto put = [&](int count) {
        for (int i = count - 1; i >= 0; --i)
            out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    };
    if (n <= 23) {
        out.push_back(static_cast<std::uint8_t>(mt | n));
    } else if (n <= 0xff) {
        out.push_back(mt | 24);
        put(1);
    } else if (n <= 0xffff) {
        out.push_back(mt | 25);
        put(2);
    } else if (n <= 0xffffffffULL) {
        out.push_back(mt | 26);
        put(4);
    } else {
        out.push_back(mt | 27);
        put(8);
    }
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

namespace detail {

inline float_width effective_width(const floating& f, float_mode mode) noexcept
{
    if (std::isnan(f.value))
        return float_width::half;
    switch (mode) {
    case float_mode::force_double:
        return float_width::double_;
    case float_mode::smallest:
        return smallest_width(f.value);
    case float_mode::preserve:
        break;
    }
    auto min = smallest_width(f.value);
    return static_cast<std::uint8_t>(min) > static_cast<std::uint8_t>(f.width) ? min : f.width;
}

inline void check_simple(std::uint8_t v)
{
    if (v >= 20 && v <= 31)
        throw codec_error(errc::invalid_simple, "simple value " + std::to_string(v));
}

class encoder {
public:
    encoder(bytes& out, const encode_options& opts)
        : out_(out)
        , opts_(opts)
    {
    }

    void put(const item& it, std::size_t depth = 0)
    {
        std::visit([&](const auto& v) { put_value(v, depth); }, it.value());
    }

private:
    void enter(std::size_t depth)
    {
        if (depth + 1 > opts_.max_depth)
            throw codec_error(errc::depth_exceeded, "limit " + std::to_string(opts_.max_depth));
    }

    void put_value(const unsigned_int& v, std::size_t) { write_head(out_, major::unsigned_int, v.value); }
    void put_value(const negative_int& v, std::size_t) { write_head(out_, major::negative_int, v.n); }
    void put_value(const byte_string& v, std::size_t)
    {
        write_head(out_, major::byte_string, v.data.size());
        out_.insert(out_.end(), v.data.begin(), v.data.end());
    }
    void put_value(const text_string& v, std::size_t)
    {
        write_head(out_, major::text_string, v.data.size());
        out_.insert(out_.end(), v.data.begin(), v.data.end());
    }
    void put_value(const array& v, std::size_t depth)
    {
        enter(depth);
        write_head(out_, major::array, v.items.size());
        for (const auto& i : v.items)
            put(i, depth + 1);
    }
    void put_value(const map& v, std::size_t depth)
    {
        enter(depth);
        write_head(out_, major::map, v.entries.size());
        for (const auto& [k, val] : v.entries) {
            put(k, depth + 1);
            put(val, depth + 1);
        }
    }
    void put_value(const tagged& v, std::size_t depth)
    {
        enter(depth);
        write_head(out_, major::tag, v.number);
        put(*v.content, depth + 1);
    }
    void put_value(const simple& v, std::size_t)
    {
        check_simple(v.value);
        write_head(out_, major::simple_or_float, v.value);
    }
    void put_value(const boolean& v, std::size_t) { out_.push_back(v.value ? 0xf5 : 0xf4); }
    void put_value(const null&, std::size_t) { out_.push_back(0xf6); }
    void put_value(const undefined&, std::size_t) { out_.push_back(0xf7); }
    void put_value(const floating& v, std::size_t)
    {
        if (std::isnan(v.value)) {
            out_.insert(out_.end(), {0xf9, 0x7e, 0x00});
            return;
        }
        switch (effective_width(v, opts_.floats)) {
        case float_width::half: {
            auto h = *exact_half(v.value);
            out_.insert(out_.end(), {0xf9, static_cast<std::uint8_t>(h >> 8), static_cast<std::uint8_t>(h)});
            break;
        }
        case float_width::single: {
            auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v.value));
            out_.push_back(0xfa);
            for (int i = 3; i >= 0; --i)
                out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
            break;
        }
        case float_width::double_: {
            auto bits = std::bit_cast<std::uint64_t>(v.value);
            out_.push_back(0xfb);
            for (int i = 7; i >= 0; --i)
                out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
            break;
        }
        }
    }

    bytes& out_;
    const encode_options& opts_;
};

} // namespace detail

inline void encode_into(bytes& out, const item& it, const encode_options& opts = {})
{
    detail::encoder(out, opts).put(it);
}

inline bytes encode(const item& it, const encode_options& opts = {})
{
    bytes out;
    encode_into(out, it, opts);
    return out;
}

/// Encoded length of `it` without building the byte sequence.
inline std::size_t item_size(const item& it, const encode_options& opts = {}, std::size_t depth = 0)
{
    auto enter = [&] {
        if (depth + 1 > opts.max_depth)
            throw codec_error(errc::depth_exceeded, "limit " + std::to_string(opts.max_depth));
    };
    return std::visit(
        [&](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, unsigned_int>) {
                return head_size(v.value);
            } else if constexpr (std::is_same_v<T, negative_int>) {
                return head_size(v.n);
            } else if constexpr (std::is_same_v<T, byte_string> || std::is_same_v<T, text_string>) {
                return head_size(v.data.size()) + v.data.size();
            } else if constexpr (std::is_same_v<T, array>) {
                enter();
                std::size_t n = head_size(v.items.size());
                for (const auto& i : v.items)
                    n += item_size(i, opts, depth + 1);
                return n;
            } else if constexpr (std::is_same_v<T, map>) {
                enter();
                std::size_t n = head_size(v.entries.size());
                for (const auto& [k, val] : v.entries)
                    n += item_size(k, opts, depth + 1) + item_size(val, opts, depth + 1);
                return n;
            } else if constexpr (std::is_same_v<T, tagged>) {
                enter();
                return head_size(v.number) + item_size(*v.content, opts, depth + 1);
            } else if constexpr (std::is_same_v<T, simple>) {
                detail::check_simple(v.value);
                return head_size(v.value);
            } else if constexpr (std::is_same_v<T, floating>) {
                if (std::isnan(v.value))
                    return 3;
                switch (detail::effective_width(v, opts.floats)) {
                case float_width::half: return 3;
                case float_width::single: return 5;
                case float_width::double_: return 9;
                }
                return 9;
            } else {
                return 1;
            }
        },
        it.value());
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

inline bool valid_utf8(std::string_view s) noexcept
{
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<std::uint8_t>(s[i]);
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            len = 2;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            len = 3;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size())
            return false;
        for (std::size_t j = 1; j < len; ++j) {
            auto cc = static_cast<std::uint8_t>(s[i + j]);
            if ((cc & 0xc0) != 0x80)
                return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10ffff
            || (cp >= 0xd800 && cp <= 0xdfff))
            return false;
        i += len;
    }
    return true;
}

struct decode_result {
    item value;
    std::size_t consumed = 0;
};

namespace detail {

class decoder {
public:
    decoder(std::span<const std::uint8_t> in, const decode_options& opts)
        : in_(in)
        , opts_(opts)
    {
    }

    std::size_t position() const noexcept { return pos_; }

    item get(std::size_t depth = 0)
    {
        auto ib = byte();
        auto mt = static_cast<major>(ib >> 5);
        std::uint8_t ai = ib & 0x1f;
        if (ai >= 28 && ai <= 30)
            throw codec_error(errc::reserved_indicator, "indicator " + std::to_string(ai) + at());

        if (mt == major::simple_or_float)
            return get_major7(ai);

        if (ai == 31) {
            switch (mt) {
            case major::byte_string:
            case major::text_string:
                return get_indefinite_string(mt);
            case major::array:
                return get_indefinite_array(depth);
            case major::map:
                return get_indefinite_map(depth);
            default:
                throw codec_error(errc::malformed_indefinite, "indefinite length on major type " + std::to_string(ib >> 5));
            }
        }

        std::uint64_t n = argument(ai);
        switch (mt) {
        case major::unsigned_int:
            return unsigned_int{n};
        case major::negative_int:
            return negative_int{n};
        case major::byte_string: {
            auto raw = take(n);
            return byte_string{bytes(raw.begin(), raw.end())};
        }
        case major::text_string: {
            auto raw = take(n);
            std::string s(raw.begin(), raw.end());
            if (!valid_utf8(s))
                throw codec_error(errc::invalid_utf8, at());
            return text_string{std::move(s)};
        }
        case major::array: {
            enter(depth);
            if (n > remaining())
                throw codec_error(errc::truncated, "array count exceeds input" + at());
            array a;
            a.items.reserve(static_cast<std::size_t>(n));
            for (std::uint64_t i = 0; i < n; ++i)
                a.items.push_back(get(depth + 1));
            return a;
        }
        case major::map: {
            enter(depth);
            if (n > remaining() / 2)
                throw codec_error(errc::truncated, "map count exceeds input" + at());
            map m;
            m.entries.reserve(static_cast<std::size_t>(n));
            for (std::uint64_t i = 0; i < n; ++i) {
                auto k = get(depth + 1);
                auto v = get(depth + 1);
                m.entries.emplace_back(std::move(k), std::move(v));
            }
            return m;
        }
        case major::tag: {
            enter(depth);
            return tagged{n, box<item>(get(depth + 1))};
        }
        default:
            break;
        }
        throw codec_error(errc::reserved_indicator, at());
    }

private:
    std::string at() const { return " at offset " + std::to_string(pos_); }

    std::size_t remaining() const noexcept { return in_.size() - pos_; }

    std::uint8_t byte()
    {
        if (pos_ >= in_.size())
            throw codec_error(errc::truncated, at());
        return in_[pos_++];
    }

    std::uint8_t peek() const
    {
        if (pos_ >= in_.size())
            throw codec_error(errc::truncated, at());
        return in_[pos_];
    }

    std::span<const std::uint8_t> take(std::uint64_t n)
    {
        if (n > remaining())
            throw codec_error(errc::truncated, "need " + std::to_string(n) + " bytes" + at());
        auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
        pos_ += static_cast<std::size_t>(n);
        return s;
    }

    std::uint64_t be(int count)
    {
        auto raw = take(static_cast<std::uint64_t>(count));
        std::uint64_t v = 0;
        for (auto b : raw)
            v = (v << 8) | b;
        return v;
    }

    std::uint64_t argument(std::uint8_t ai)
    {
        if (ai <= 23)
            return ai;
        switch (ai) {
        case 24: return be(1);
        case 25: return be(2);
        case 26: return be(4);
        case 27: return be(8);
        default: break;
        }
        throw codec_error(errc::reserved_indicator, at());
    }

    void enter(std::size_t depth) const
    {
        if (depth + 1 > opts_.max_depth)
            throw codec_error(errc::depth_exceeded, "limit " + std::to_string(opts_.max_depth));
    }

    void require_indefinite() const
    {
        if (!opts_.accept_indefinite)
            throw codec_error(errc::malformed_indefinite, "indefinite lengths disabled" + at());
    }

    item get_major7(std::uint8_t ai)
    {
        switch (ai) {
        case 20: return boolean{false};
        case 21: return boolean{true};
        case 22: return null{};
        case 23: return undefined{};
        case 24: {
            auto v = static_cast<std::uint8_t>(be(1));
            if (v < 32)
                throw codec_error(errc::invalid_simple, "two-byte simple value " + std::to_string(v) + at());
            return simple{v};
        }
        case 25: return floating{half_to_double(static_cast<std::uint16_t>(be(2))), float_width::half};
        case 26: {
            auto bits = static_cast<std::uint32_t>(be(4));
            return floating{static_cast<double>(std::bit_cast<float>(bits)), float_width::single};
        }
        case 27: return floating{std::bit_cast<double>(be(8)), float_width::double_};
        case 31: throw codec_error(errc::malformed_indefinite, "stray break" + at());
        default: break;
        }
        return simple{ai};
    }

    bool at_break()
    {
        if (peek() == 0xff) {
            ++pos_;
            return true;
        }
        return false;
    }

    item get_indefinite_string(major mt)
    {
        require_indefinite();
        bytes buf;
        while (!at_break()) {
            auto ib = byte();
            if (static_cast<major>(ib >> 5) != mt || (ib & 0x1f) == 31)
                throw codec_error(errc::malformed_indefinite, "bad chunk" + at());
            std::uint8_t ai = ib & 0x1f;
            if (ai >= 28 && ai <= 30)
                throw codec_error(errc::reserved_indicator, at());
            auto raw = take(argument(ai));
            buf.insert(buf.end(), raw.begin(), raw.end());
        }
        if (mt == major::byte_string)
            return byte_string{std::move(buf)};
        std::string s(buf.begin(), buf.end());
        if (!valid_utf8(s))
            throw codec_error(errc::invalid_utf8, at());
        return text_string{std::move(s)};
    }

    item get_indefinite_array(std::size_t depth)
    {
        require_indefinite();
        enter(depth);
        array a;
        while (!at_break())
            a.items.push_back(get(depth + 1));
        return a;
    }

    item get_indefinite_map(std::size_t depth)
    {
        require_indefinite();
        enter(depth);
        map m;
        while (!at_break()) {
            auto k = get(depth + 1);
            if (peek() == 0xff)
                throw codec_error(errc::malformed_indefinite, "break after map key" + at());
            auto v = get(depth + 1);
            m.entries.emplace_back(std::move(k), std::move(v));
        }
        return m;
    }

    std::span<const std::uint8_t> in_;
    const decode_options& opts_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Decodes the first data item of `in`; `consumed` lets callers walk CBOR sequences.
inline decode_result decode(std::span<const std::uint8_t> in, const decode_options& opts = {})
{
    if (in.empty())
        throw codec_error(errc::truncated, "empty input");
    detail::decoder d(in, opts);
    auto v = d.get();
    return {std::move(v), d.position()};
}

/// Decodes exactly one item and rejects trailing bytes.
inline item decode_all(std::span<const std::uint8_t> in, const decode_options& opts = {})
{
    auto r = decode(in, opts);
    if (r.consumed != in.size())
        throw codec_error(errc::type_mismatch,
            std::to_string(in.size() - r.consumed) + " trailing bytes after data item");
    return std::move(r.value);
}

// ---------------------------------------------------------------------------
// Diagnostic notation
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "NaN";
    if (std::isinf(v))
        return v > 0 ? "Infinity" : "-Infinity";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, r.ptr);
    if (s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    return s;
}

inline std::string negative_to_string(std::uint64_t n)
{
    unsigned __int128 v = static_cast<unsigned __int128>(n) + 1;
    std::string digits;
    do {
        digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v != 0);
    return "-" + std::string(digits.rbegin(), digits.rend());
}

inline void quote(std::string& out, std::string_view s)
{
    out.push_back('"');
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (u < 0x20) {
                static constexpr char hex[] = "0123456789abcdef";
                out += "\\u00";
                out.push_back(hex[u >> 4]);
                out.push_back(hex[u & 0xf]);
            } else {
                out.push_back(c);
            }
        }
    }
    out.push_back('"');
}

inline void diag(std::string& out, const item& it)
{
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, unsigned_int>) {
                out += std::to_string(v.value);
            } else if constexpr (std::is_same_v<T, negative_int>) {
                out += negative_to_string(v.n);
            } else if constexpr (std::is_same_v<T, byte_string>) {
                out += "h'" + to_hex(v.data) + "'";
            } else if constexpr (std::is_same_v<T, text_string>) {
                quote(out, v.data);
            } else if constexpr (std::is_same_v<T, array>) {
                out.push_back('[');
                for (std::size_t i = 0; i < v.items.size(); ++i) {
                    if (i)
                        out += ", ";
                    diag(out, v.items[i]);
                }
                out.push_back(']');
            } else if constexpr (std::is_same_v<T, map>) {
                out.push_back('{');
                for (std::size_t i = 0; i < v.entries.size(); ++i) {
                    if (i)
                        out += ", ";
                    diag(out, v.entries[i].first);
                    out += ": ";
                    diag(out, v.entries[i].second);
                }
                out.push_back('}');
            } else if constexpr (std::is_same_v<T, tagged>) {
                out += std::to_string(v.number) + "(";
                diag(out, *v.content);
                out.push_back(')');
            } else if constexpr (std::is_same_v<T, simple>) {
                out += "simple(" + std::to_string(v.value) + ")";
            } else if constexpr (std::is_same_v<T, boolean>) {
                out += v.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, null>) {
                out += "null";
            } else if constexpr (std::is_same_v<T, undefined>) {
                out += "undefined";
            } else if constexpr (std::is_same_v<T, floating>) {
                out += format_double(v.value);
            }
        },
        it.value());
}

} // namespace detail

inline std::string to_diagnostic(const item& it)
{
    std::string out;
    detail::diag(out, it);
    return out;
}

} // namespace cbordns::cbor
