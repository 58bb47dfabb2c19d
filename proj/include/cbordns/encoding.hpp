#pragma once

// Hex and base64 helpers shared by the codecs and the CLI.

#include <cbordns/error.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbordns {

using bytes = std::vector<std::uint8_t>;

inline std::string to_hex(std::span<const std::uint8_t> data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace detail {

constexpr int hex_value(char c) noexcept
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace detail

/// Parses hex, ignoring ASCII whitespace between digit pairs.
inline bytes from_hex(std::string_view text)
{
    bytes out;
    out.reserve(text.size() / 2);
    int high = -1;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            continue;
        int v = detail::hex_value(c);
        if (v < 0)
            throw codec_error(errc::hex_error, std::string("invalid hex digit '") + c + "'");
        if (high < 0) {
            high = v;
        } else {
            out.push_back(static_cast<std::uint8_t>((high << 4) | v));
            high = -1;
        }
    }
    if (high >= 0)
        throw codec_error(errc::hex_error, "odd number of hex digits");
    return out;
}

namespace detail {

inline constexpr std::string_view b64_std = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
inline constexpr std::string_view b64_url = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

inline std::string base64_encode(std::span<const std::uint8_t> data, std::string_view alphabet, bool pad)
{
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
    }
    std::size_t rest = data.size() - i;
    if (rest == 1) {
        std::uint32_t v = data[i] << 16;
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        if (pad)
            out.append("==");
    } else if (rest == 2) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        if (pad)
            out.push_back('=');
    }
    return out;
}

} // namespace detail

inline std::string base64_encode(std::span<const std::uint8_t> data)
{
    return detail::base64_encode(data, detail::b64_std, true);
}

/// Unpadded base64url (RFC 4648 section 5).
inline std::string base64url_encode(std::span<const std::uint8_t> data)
{
    return detail::base64_encode(data, detail::b64_url, false);
}

/// Strict standard-alphabet base64 with mandatory padding. CR and LF are
/// skipped so that MIME-wrapped payloads decode as well.
inline bytes base64_decode(std::string_view text)
{
    static const auto table = [] {
        std::array<std::int8_t, 256> t{};
        t.fill(-1);
        for (std::size_t i = 0; i < detail::b64_std.size(); ++i)
            t[static_cast<std::uint8_t>(detail::b64_std[i])] = static_cast<std::int8_t>(i);
        return t;
    }();

    std::string clean;
    clean.reserve(text.size());
    for (char c : text)
        if (c != '\n' && c != '\r')
            clean.push_back(c);
    if (clean.size() % 4 != 0)
        throw codec_error(errc::base64_error, "length is not a multiple of 4");

    bytes out;
    out.reserve(clean.size() / 4 * 3);
    for (std::size_t i = 0; i < clean.size(); i += 4) {
        bool last = i + 4 == clean.size();
        int pad = 0;
        std::uint32_t v = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            char c = clean[i + j];
            if (c == '=') {
                if (!last || j < 2)
                    throw codec_error(errc::base64_error, "misplaced padding");
                ++pad;
                v <<= 6;
                continue;
            }
            if (pad > 0)
                throw codec_error(errc::base64_error, "data after padding");
            auto d = table[static_cast<std::uint8_t>(c)];
            if (d < 0)
                throw codec_error(errc::base64_error, std::string("invalid character '") + c + "'");
            v = (v << 6) | static_cast<std::uint32_t>(d);
        }
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        if (pad < 2)
            out.push_back(static_cast<std::uint8_t>(v >> 8));
        if (pad < 1)
            out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

} // namespace cbordns
