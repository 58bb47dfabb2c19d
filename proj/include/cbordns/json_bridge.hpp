#pragma once

// JSON model, strict parser, minifier and the JSON <-> CBOR bridge, plus the
// three content transforms for GitHub blob objects.
//
// Parsing goes through nlohmann::json's SAX interface so that number lexemes,
// key order and duplicate keys survive into our own value model.

#include <cbordns/cbor.hpp>
#include <cbordns/encoding.hpp>
#include <cbordns/error.hpp>

#include <json.hpp> // nlohmann/json, vendored

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cbordns::json {

class value;

/// Numbers keep their source lexeme. Integer vs fractional is decided by the
/// lexeme alone: anything containing '.', 'e' or 'E' is fractional.
struct number {
    std::string lexeme;
    bool fractional = false;

    double as_double() const
    {
        double d = 0;
        std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), d);
        return d;
    }

    // Numeric equality, so "1.50" == "1.5" and "-0" == "0".
    bool operator==(const number& o) const
    {
        if (fractional != o.fractional)
            return false;
        if (fractional)
            return as_double() == o.as_double();
        auto strip = [](std::string_view s) {
            return s == "-0" ? std::string_view("0") : s;
        };
        return strip(lexeme) == strip(o.lexeme);
    }
};

struct array_value {
    std::vector<value> items;
    bool operator==(const array_value&) const;
};

struct object_value {
    std::vector<std::pair<std::string, value>> members;
    bool operator==(const object_value&) const;
};

class value {
public:
    using variant_type = std::variant<std::nullptr_t, bool, number, std::string, array_value, object_value>;

    value()
        : v_(nullptr)
    {
    }
    template <typename T>
        requires std::is_constructible_v<variant_type, T&&> && (!std::is_same_v<std::remove_cvref_t<T>, value>)
    value(T&& v)
        : v_(std::forward<T>(v))
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

    const variant_type& data() const noexcept { return v_; }
    variant_type& data() noexcept { return v_; }

    bool operator==(const value& o) const { return v_ == o.v_; }

private:
    variant_type v_;
};

inline bool array_value::operator==(const array_value& o) const { return items == o.items; }
inline bool object_value::operator==(const object_value& o) const { return members == o.members; }

inline number integer_number(std::int64_t v) { return number{std::to_string(v), false}; }

inline constexpr std::size_t max_nesting = 512;

namespace detail {

class builder : public nlohmann::json_sax<nlohmann::json> {
public:
    bool null() override { return put(nullptr); }
    bool boolean(bool b) override { return put(b); }
    bool number_integer(number_integer_t v) override { return put(number{std::to_string(v), false}); }
    bool number_unsigned(number_unsigned_t v) override { return put(number{std::to_string(v), false}); }
    bool number_float(number_float_t, const string_t& lexeme) override
    {
        bool frac = lexeme.find_first_of(".eE") != std::string::npos;
        return put(number{lexeme, frac});
    }
    bool string(string_t& s) override { return put(std::move(s)); }
    bool binary(binary_t&) override { return false; }
    bool start_object(std::size_t) override { return open(object_value{}); }
    bool key(string_t& k) override
    {
        pending_key_ = std::move(k);
        return true;
    }
    bool end_object() override { return close(); }
    bool start_array(std::size_t) override { return open(array_value{}); }
    bool end_array() override { return close(); }
    bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) override
    {
        // nlohmann reports the 1-based position of the offending character.
        throw codec_error(errc::syntax_error,
            "byte offset " + std::to_string(position == 0 ? 0 : position - 1) + ": " + ex.what());
    }

    value take() { return std::move(root_); }

private:
    bool put(value v)
    {
        if (stack_.empty()) {
            root_ = std::move(v);
            return true;
        }
        auto& top = stack_.back();
        if (auto* a = std::get_if<array_value>(&top.data()))
            a->items.push_back(std::move(v));
        else
            top.as<object_value>().members.emplace_back(std::move(pending_key_), std::move(v));
        return true;
    }

    bool open(value container)
    {
        if (stack_.size() >= max_nesting)
            throw codec_error(errc::syntax_error, "nesting deeper than " + std::to_string(max_nesting));
        if (!stack_.empty() && stack_.back().is<object_value>())
            keys_.push_back(std::move(pending_key_));
        else
            keys_.emplace_back();
        stack_.push_back(std::move(container));
        return true;
    }

    bool close()
    {
        value done = std::move(stack_.back());
        stack_.pop_back();
        pending_key_ = std::move(keys_.back());
        keys_.pop_back();
        return put(std::move(done));
    }

    std::vector<value> stack_;
    std::vector<std::string> keys_;
    std::string pending_key_;
    value root_;
};

} // namespace detail

/// Strict RFC 8259 parse. Throws codec_error(syntax_error) with a byte offset.
inline value parse_json(std::string_view text)
{
    detail::builder b;
    nlohmann::json::sax_parse(text, &b, nlohmann::json::input_format_t::json, true);
    return b.take();
}

namespace detail {

inline std::string quote_string(const std::string& s)
{
    return nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::string shortest_double(double d)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, r.ptr);
    if (s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    return s;
}

inline void minify_into(std::string& out, const value& v)
{
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::nullptr_t>) {
                out += "null";
            } else if constexpr (std::is_same_v<T, bool>) {
                out += x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, number>) {
                out += x.lexeme.empty() ? shortest_double(x.as_double()) : x.lexeme;
            } else if constexpr (std::is_same_v<T, std::string>) {
                out += quote_string(x);
            } else if constexpr (std::is_same_v<T, array_value>) {
                out.push_back('[');
                for (std::size_t i = 0; i < x.items.size(); ++i) {
                    if (i)
                        out.push_back(',');
                    minify_into(out, x.items[i]);
                }
                out.push_back(']');
            } else {
                out.push_back('{');
                for (std::size_t i = 0; i < x.members.size(); ++i) {
                    if (i)
                        out.push_back(',');
                    out += quote_string(x.members[i].first);
                    out.push_back(':');
                    minify_into(out, x.members[i].second);
                }
                out.push_back('}');
            }
        },
        v.data());
}

} // namespace detail

/// Serializes without any whitespace outside strings; numbers reuse their lexeme.
inline std::string minify(const value& v)
{
    std::string out;
    detail::minify_into(out, v);
    return out;
}

/// Information lost (or linted) while crossing the bridge in either direction.
struct conversion_report {
    std::size_t lossy_numbers = 0;
    std::size_t duplicate_keys = 0;
    std::size_t unwrapped_tags = 0;
    std::size_t undefined_values = 0;
    std::size_t non_text_keys = 0;
    std::size_t non_finite_floats = 0;

    bool lossless() const noexcept
    {
        return lossy_numbers == 0 && unwrapped_tags == 0 && undefined_values == 0 && non_text_keys == 0
            && non_finite_floats == 0;
    }
};

namespace detail {

inline cbor::item integer_to_cbor(const std::string& lexeme, cbor::float_mode mode, conversion_report& rep)
{
    bool negative = !lexeme.empty() && lexeme[0] == '-';
    unsigned __int128 mag = 0;
    bool overflow = false;
    constexpr unsigned __int128 limit = static_cast<unsigned __int128>(1) << 64;
    for (std::size_t i = negative ? 1 : 0; i < lexeme.size(); ++i) {
        mag = mag * 10 + static_cast<unsigned>(lexeme[i] - '0');
        if (mag > limit) {
            overflow = true;
            break;
        }
    }
    if (!overflow) {
        if (!negative && mag < limit)
            return cbor::uinteger(static_cast<std::uint64_t>(mag));
        if (negative && mag == 0)
            return cbor::uinteger(0);
        if (negative)
            return cbor::negative_int{static_cast<std::uint64_t>(mag - 1)};
    }
    ++rep.lossy_numbers;
    double d = std::strtod(lexeme.c_str(), nullptr);
    auto w = mode == cbor::float_mode::smallest ? cbor::smallest_width(d) : cbor::float_width::double_;
    return cbor::float_value(d, w);
}

inline cbor::item to_cbor(const value& v, cbor::float_mode mode, conversion_report& rep)
{
    return std::visit(
        [&](const auto& x) -> cbor::item {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::nullptr_t>) {
                return cbor::null{};
            } else if constexpr (std::is_same_v<T, bool>) {
                return cbor::boolean_value(x);
            } else if constexpr (std::is_same_v<T, number>) {
                if (!x.fractional)
                    return integer_to_cbor(x.lexeme, mode, rep);
                double d = x.as_double();
                if (!std::isfinite(d))
                    ++rep.lossy_numbers;
                auto w = mode == cbor::float_mode::smallest ? cbor::smallest_width(d) : cbor::float_width::double_;
                return cbor::float_value(d, w);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return cbor::text(x);
            } else if constexpr (std::is_same_v<T, array_value>) {
                cbor::array a;
                a.items.reserve(x.items.size());
                for (const auto& i : x.items)
                    a.items.push_back(to_cbor(i, mode, rep));
                return a;
            } else {
                cbor::map m;
                m.entries.reserve(x.members.size());
                for (std::size_t i = 0; i < x.members.size(); ++i) {
                    for (std::size_t j = 0; j < i; ++j)
                        if (x.members[j].first == x.members[i].first) {
                            ++rep.duplicate_keys;
                            break;
                        }
                    m.entries.emplace_back(cbor::text(x.members[i].first), to_cbor(x.members[i].second, mode, rep));
                }
                return m;
            }
        },
        v.data());
}

inline value from_cbor(const cbor::item& it, conversion_report& rep)
{
    using namespace cbor;
    return std::visit(
        [&](const auto& x) -> value {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, unsigned_int>) {
                return number{std::to_string(x.value), false};
            } else if constexpr (std::is_same_v<T, negative_int>) {
                return number{cbor::detail::negative_to_string(x.n), false};
            } else if constexpr (std::is_same_v<T, byte_string>) {
                return base64url_encode(x.data);
            } else if constexpr (std::is_same_v<T, text_string>) {
                return x.data;
            } else if constexpr (std::is_same_v<T, cbor::array>) {
                array_value a;
                for (const auto& i : x.items)
                    a.items.push_back(from_cbor(i, rep));
                return a;
            } else if constexpr (std::is_same_v<T, cbor::map>) {
                object_value o;
                for (const auto& [k, val] : x.entries) {
                    std::string key;
                    if (const auto* t = k.template get_if<text_string>()) {
                        key = t->data;
                    } else {
                        ++rep.non_text_keys;
                        key = to_diagnostic(k);
                    }
                    o.members.emplace_back(std::move(key), from_cbor(val, rep));
                }
                return o;
            } else if constexpr (std::is_same_v<T, tagged>) {
                ++rep.unwrapped_tags;
                return from_cbor(*x.content, rep);
            } else if constexpr (std::is_same_v<T, cbor::simple>) {
                return number{std::to_string(x.value), false};
            } else if constexpr (std::is_same_v<T, boolean>) {
                return x.value;
            } else if constexpr (std::is_same_v<T, cbor::null>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, undefined>) {
                ++rep.undefined_values;
                return nullptr;
            } else {
                if (!std::isfinite(x.value)) {
                    ++rep.non_finite_floats;
                    return nullptr;
                }
                return number{shortest_double(x.value), true};
            }
        },
        it.value());
}

} // namespace detail

/// Total mapping; integers beyond the 64-bit CBOR range become floats and are
/// counted in `report`. `smallest` tags floats with their narrowest exact width.
inline cbor::item json_to_cbor(
    const value& v, cbor::float_mode mode = cbor::float_mode::preserve, conversion_report* report = nullptr)
{
    conversion_report local;
    return detail::to_cbor(v, mode, report ? *report : local);
}

inline value cbor_to_json(const cbor::item& it, conversion_report* report = nullptr)
{
    conversion_report local;
    return detail::from_cbor(it, report ? *report : local);
}

// ---------------------------------------------------------------------------
// GitHub blob transforms
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t tag_base64 = 34;
inline constexpr std::uint64_t tag_embedded_cbor = 24;

namespace detail {

inline const cbor::map& as_blob(const cbor::item& blob)
{
    const auto* m = blob.get_if<cbor::map>();
    if (!m)
        throw codec_error(errc::missing_field, "blob is not a map");
    return *m;
}

inline std::ptrdiff_t find_key(const cbor::map& m, std::string_view key)
{
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const auto* t = m.entries[i].first.get_if<cbor::text_string>();
        if (t && t->data == key)
            return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

} // namespace detail

/// Marks "content" as base64 with tag 34 and drops the "encoding" entry.
inline cbor::item blob_tag_base64(const cbor::item& blob)
{
    cbor::map m = detail::as_blob(blob);
    auto content = detail::find_key(m, "content");
    auto encoding = detail::find_key(m, "encoding");
    if (content < 0 || !m.entries[content].second.is<cbor::text_string>())
        throw codec_error(errc::missing_field, "text \"content\"");
    if (encoding < 0)
        throw codec_error(errc::missing_field, "\"encoding\"");
    const auto* enc = m.entries[encoding].second.get_if<cbor::text_string>();
    if (!enc || enc->data != "base64")
        throw codec_error(errc::missing_field, "\"encoding\" is not \"base64\"");
    auto& slot = m.entries[content].second;
    slot = cbor::tag(tag_base64, std::move(slot));
    m.entries.erase(m.entries.begin() + encoding);
    return m;
}

/// Replaces base64 "content" by its decoded bytes and drops "size", which
/// must agree with the decoded length when present.
inline cbor::item blob_to_bstr(const cbor::item& blob)
{
    cbor::map m = detail::as_blob(blob);
    auto content = detail::find_key(m, "content");
    if (content < 0)
        throw codec_error(errc::missing_field, "\"content\"");
    const cbor::item* payload = &m.entries[content].second;
    if (const auto* t = payload->get_if<cbor::tagged>(); t && t->number == tag_base64)
        payload = &*t->content;
    const auto* text = payload->get_if<cbor::text_string>();
    if (!text)
        throw codec_error(errc::missing_field, "\"content\" is not base64 text");
    auto decoded = base64_decode(text->data);

    auto size = detail::find_key(m, "size");
    if (size >= 0) {
        const auto* n = m.entries[size].second.get_if<cbor::unsigned_int>();
        if (!n || n->value != decoded.size())
            throw codec_error(errc::size_mismatch,
                "size field " + cbor::to_diagnostic(m.entries[size].second) + " vs " + std::to_string(decoded.size())
                    + " decoded bytes");
    }
    m.entries[content].second = cbor::bstr(std::move(decoded));
    if (size >= 0)
        m.entries.erase(m.entries.begin() + size);
    return m;
}

/// Replaces JSON carried in byte-string "content" by tag 24 wrapping its CBOR encoding.
inline cbor::item blob_embed_cbor(const cbor::item& blob, cbor::float_mode mode = cbor::float_mode::smallest)
{
    cbor::map m = detail::as_blob(blob);
    auto content = detail::find_key(m, "content");
    if (content < 0)
        throw codec_error(errc::missing_field, "\"content\"");
    const auto* raw = m.entries[content].second.get_if<cbor::byte_string>();
    if (!raw)
        throw codec_error(errc::missing_field, "\"content\" is not a byte string");
    value parsed;
    try {
        parsed = parse_json(std::string_view(reinterpret_cast<const char*>(raw->data.data()), raw->data.size()));
    } catch (const codec_error& e) {
        throw codec_error(errc::not_json, e.what());
    }
    auto inner = cbor::encode(json_to_cbor(parsed, mode), {.floats = mode});
    m.entries[content].second = cbor::tag(tag_embedded_cbor, cbor::bstr(std::move(inner)));
    return m;
}

} // namespace cbordns::json
