#pragma once

// Classic DNS message format (RFC 1035 section 4): names, messages and the
// wire codec with compression pointers.

#include <cbordns/encoding.hpp>
#include <cbordns/error.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cbordns::dns {

namespace rr_type {
inline constexpr std::uint16_t a = 1;
inline constexpr std::uint16_t ns = 2;
inline constexpr std::uint16_t cname = 5;
inline constexpr std::uint16_t soa = 6;
inline constexpr std::uint16_t ptr = 12;
inline constexpr std::uint16_t mx = 15;
inline constexpr std::uint16_t txt = 16;
inline constexpr std::uint16_t aaaa = 28;
inline constexpr std::uint16_t srv = 33;
inline constexpr std::uint16_t opt = 41;
inline constexpr std::uint16_t any = 255;
} // namespace rr_type

inline constexpr std::uint16_t class_in = 1;

inline constexpr std::size_t header_size = 12;
inline constexpr std::size_t max_label_length = 63;
inline constexpr std::size_t max_name_length = 255;
inline constexpr std::uint16_t flag_qr = 0x8000;

inline char ascii_lower(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

inline std::string ascii_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = ascii_lower(c);
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) noexcept
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
        return ascii_lower(x) == ascii_lower(y);
    });
}

/// Escapes one label for presentation: '.', '\\' and '"' get a backslash,
/// bytes outside printable ASCII become \DDD.
inline std::string escape_label(std::string_view label)
{
    std::string out;
    for (char c : label) {
        auto u = static_cast<unsigned char>(c);
        if (c == '.' || c == '\\' || c == '"') {
            out.push_back('\\');
            out.push_back(c);
        } else if (u <= 0x20 || u >= 0x7f) {
            out.push_back('\\');
            out.push_back(static_cast<char>('0' + u / 100));
            out.push_back(static_cast<char>('0' + (u / 10) % 10));
            out.push_back(static_cast<char>('0' + u % 10));
        } else {
            out.push_back(c);
        }
    }
    return out;
}

/// Ordered labels, leftmost first; an empty list is the root. Equality is
/// ASCII case-insensitive, stored bytes keep their case.
class name {
public:
    name() = default;

    explicit name(std::vector<std::string> labels)
        : labels_(std::move(labels))
    {
        validate();
    }

    /// Parses presentation form; a trailing dot is optional, "" and "." are the root.
    static name from_text(std::string_view text)
    {
        std::vector<std::string> labels;
        if (text.empty() || text == ".")
            return name{};
        std::string cur;
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c == '\\') {
                if (i + 1 >= text.size())
                    throw codec_error(errc::label_overflow, "dangling escape in name");
                char n = text[i + 1];
                if (n >= '0' && n <= '9') {
                    if (i + 3 >= text.size())
                        throw codec_error(errc::label_overflow, "short \\DDD escape");
                    int v = 0;
                    for (int k = 1; k <= 3; ++k) {
                        char d = text[i + static_cast<std::size_t>(k)];
                        if (d < '0' || d > '9')
                            throw codec_error(errc::label_overflow, "bad \\DDD escape");
                        v = v * 10 + (d - '0');
                    }
                    if (v > 255)
                        throw codec_error(errc::label_overflow, "\\DDD escape above 255");
                    cur.push_back(static_cast<char>(v));
                    i += 3;
                } else {
                    cur.push_back(n);
                    ++i;
                }
            } else if (c == '.') {
                if (cur.empty())
                    throw codec_error(errc::label_overflow, "empty label");
                labels.push_back(std::move(cur));
                cur.clear();
                if (i + 1 == text.size())
                    return name(std::move(labels));
            } else {
                cur.push_back(c);
            }
        }
        if (cur.empty())
            throw codec_error(errc::label_overflow, "empty label");
        labels.push_back(std::move(cur));
        return name(std::move(labels));
    }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool is_root() const noexcept { return labels_.empty(); }

    /// Presentation form without the trailing dot; the root renders as "".
    std::string to_text() const
    {
        std::string out;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (i)
                out.push_back('.');
            out += escape_label(labels_[i]);
        }
        return out;
    }

    /// Length of the uncompressed wire encoding, including the root byte.
    std::size_t wire_length() const noexcept
    {
        std::size_t n = 1;
        for (const auto& l : labels_)
            n += l.size() + 1;
        return n;
    }

    std::vector<std::string> lowered() const
    {
        std::vector<std::string> out;
        out.reserve(labels_.size());
        for (const auto& l : labels_)
            out.push_back(ascii_lower(l));
        return out;
    }

    /// Labels from position `first` to the end.
    name suffix(std::size_t first) const
    {
        name out;
        out.labels_.assign(labels_.begin() + static_cast<std::ptrdiff_t>(first), labels_.end());
        return out;
    }

    bool operator==(const name& o) const
    {
        return labels_.size() == o.labels_.size()
            && std::equal(labels_.begin(), labels_.end(), o.labels_.begin(), [](const auto& a, const auto& b) {
                   return iequals(a, b);
               });
    }

private:
    void validate() const
    {
        for (const auto& l : labels_)
            if (l.empty() || l.size() > max_label_length)
                throw codec_error(errc::label_overflow, "label of " + std::to_string(l.size()) + " bytes");
        if (wire_length() > max_name_length)
            throw codec_error(errc::name_overflow, std::to_string(wire_length()) + " bytes");
    }

    std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Structured rdata for the RFC 1035 record types that embed names
// ---------------------------------------------------------------------------

struct soa_rdata {
    name mname;
    name rname;
    std::uint32_t serial = 0;
    std::uint32_t refresh = 0;
    std::uint32_t retry = 0;
    std::uint32_t expire = 0;
    std::uint32_t minimum = 0;
    bool operator==(const soa_rdata&) const = default;
};

struct mx_rdata {
    std::uint16_t preference = 0;
    name exchange;
    bool operator==(const mx_rdata&) const = default;
};

struct srv_rdata {
    std::uint16_t priority = 0;
    std::uint16_t weight = 0;
    std::uint16_t port = 0;
    name target;
    bool operator==(const srv_rdata&) const = default;
};

/// monostate: opaque rdata. `name`: NS, CNAME, PTR.
using name_rdata = std::variant<std::monostate, name, soa_rdata, mx_rdata, srv_rdata>;

constexpr bool carries_names(std::uint16_t type) noexcept
{
    switch (type) {
    case rr_type::ns:
    case rr_type::cname:
    case rr_type::ptr:
    case rr_type::soa:
    case rr_type::mx:
    case rr_type::srv:
        return true;
    default:
        return false;
    }
}

namespace detail {

class reader {
public:
    explicit reader(std::span<const std::uint8_t> msg, std::size_t pos = 0)
        : msg_(msg)
        , pos_(pos)
    {
    }

    std::size_t pos() const noexcept { return pos_; }
    void seek(std::size_t p) noexcept { pos_ = p; }
    std::size_t remaining() const noexcept { return msg_.size() - pos_; }

    std::uint8_t u8()
    {
        need(1);
        return msg_[pos_++];
    }
    std::uint16_t u16()
    {
        need(2);
        auto v = static_cast<std::uint16_t>((msg_[pos_] << 8) | msg_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32()
    {
        std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::span<const std::uint8_t> take(std::size_t n)
    {
        need(n);
        auto s = msg_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    /// Reads a possibly compressed name. Every pointer must target an offset
    /// before the start of the label run it terminates, so decoding always
    /// moves strictly backwards and terminates.
    name read_name()
    {
        std::vector<std::string> labels;
        std::size_t wire_len = 1;
        std::size_t cursor = pos_;
        std::size_t segment_start = pos_;
        std::optional<std::size_t> resume;
        for (;;) {
            if (cursor >= msg_.size())
                throw codec_error(errc::truncated, "name runs past end of message");
            std::uint8_t len = msg_[cursor];
            if ((len & 0xc0) == 0xc0) {
                if (cursor + 1 >= msg_.size())
                    throw codec_error(errc::truncated, "compression pointer cut off");
                std::size_t target = static_cast<std::size_t>(((len & 0x3f) << 8) | msg_[cursor + 1]);
                if (!resume)
                    resume = cursor + 2;
                if (target >= segment_start)
                    throw codec_error(errc::pointer_loop,
                        "pointer at " + std::to_string(cursor) + " targets " + std::to_string(target));
                if (target < header_size)
                    throw codec_error(errc::bad_pointer_target, "pointer into header: " + std::to_string(target));
                cursor = target;
                segment_start = target;
                continue;
            }
            if (len & 0xc0)
                throw codec_error(errc::label_overflow, "unsupported label type " + std::to_string(len >> 6));
            if (len == 0) {
                ++cursor;
                break;
            }
            if (cursor + 1 + len > msg_.size())
                throw codec_error(errc::truncated, "label runs past end of message");
            wire_len += len + 1u;
            if (wire_len > max_name_length)
                throw codec_error(errc::name_overflow, "decompressed name exceeds 255 bytes");
            labels.emplace_back(reinterpret_cast<const char*>(msg_.data() + cursor + 1), len);
            cursor += 1u + len;
        }
        pos_ = resume ? *resume : cursor;
        return name(std::move(labels));
    }

private:
    void need(std::size_t n) const
    {
        if (n > remaining())
            throw codec_error(errc::truncated, "need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_));
    }

    std::span<const std::uint8_t> msg_;
    std::size_t pos_;
};

inline void put16(bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put32(bytes& out, std::uint32_t v)
{
    put16(out, static_cast<std::uint16_t>(v >> 16));
    put16(out, static_cast<std::uint16_t>(v));
}

/// Parses name-bearing rdata starting at `r.pos()`; names may be compressed
/// relative to the enclosing message. Consumes exactly `len` bytes or throws.
inline name_rdata read_name_rdata(reader& r, std::uint16_t type, std::size_t len)
{
    auto end = r.pos() + len;
    name_rdata out;
    switch (type) {
    case rr_type::ns:
    case rr_type::cname:
    case rr_type::ptr:
        out = r.read_name();
        break;
    case rr_type::soa: {
        soa_rdata s;
        s.mname = r.read_name();
        s.rname = r.read_name();
        s.serial = r.u32();
        s.refresh = r.u32();
        s.retry = r.u32();
        s.expire = r.u32();
        s.minimum = r.u32();
        out = std::move(s);
        break;
    }
    case rr_type::mx: {
        mx_rdata m;
        m.preference = r.u16();
        m.exchange = r.read_name();
        out = std::move(m);
        break;
    }
    case rr_type::srv: {
        srv_rdata s;
        s.priority = r.u16();
        s.weight = r.u16();
        s.port = r.u16();
        s.target = r.read_name();
        out = std::move(s);
        break;
    }
    default:
        r.take(len);
        return out;
    }
    if (r.pos() != end)
        throw codec_error(errc::truncated, "rdata length disagrees with its content");
    return out;
}

} // namespace detail

/// Parses uncompressed rdata of the name-bearing types; monostate for all
/// other types or when the bytes do not parse.
inline name_rdata parse_name_rdata(std::uint16_t type, std::span<const std::uint8_t> rdata)
{
    if (!carries_names(type))
        return {};
    try {
        // Pointers cannot resolve inside a standalone rdata buffer: with the
        // reader positioned at 0 any pointer fails the backwards check.
        detail::reader r(rdata);
        return detail::read_name_rdata(r, type, rdata.size());
    } catch (const codec_error&) {
        return {};
    }
}

inline void write_name_uncompressed(bytes& out, const name& n)
{
    for (const auto& l : n.labels()) {
        out.push_back(static_cast<std::uint8_t>(l.size()));
        out.insert(out.end(), l.begin(), l.end());
    }
    out.push_back(0);
}

inline bytes serialize_name_rdata(const name_rdata& rd)
{
    bytes out;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, name>) {
                write_name_uncompressed(out, v);
            } else if constexpr (std::is_same_v<T, soa_rdata>) {
                write_name_uncompressed(out, v.mname);
                write_name_uncompressed(out, v.rname);
                for (auto x : {v.serial, v.refresh, v.retry, v.expire, v.minimum})
                    detail::put32(out, x);
            } else if constexpr (std::is_same_v<T, mx_rdata>) {
                detail::put16(out, v.preference);
                write_name_uncompressed(out, v.exchange);
            } else if constexpr (std::is_same_v<T, srv_rdata>) {
                detail::put16(out, v.priority);
                detail::put16(out, v.weight);
                detail::put16(out, v.port);
                write_name_uncompressed(out, v.target);
            }
        },
        rd);
    return out;
}

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

struct question {
    dns::name name;
    std::uint16_t type = rr_type::a;
    std::uint16_t cls = class_in;
    bool operator==(const question&) const = default;
};

struct resource_record {
    dns::name name;
    std::uint16_t type = rr_type::a;
    std::uint16_t cls = class_in;
    std::uint32_t ttl = 0;
    bytes rdata; // uncompressed wire rdata

    /// Names inside rdata compare case-insensitively, like owner names.
    bool operator==(const resource_record& o) const
    {
        if (!(name == o.name && type == o.type && cls == o.cls && ttl == o.ttl))
            return false;
        if (rdata == o.rdata)
            return true;
        auto a = parse_name_rdata(type, rdata);
        return !std::holds_alternative<std::monostate>(a) && a == parse_name_rdata(type, o.rdata);
    }
};

struct message {
    std::uint16_t id = 0;
    std::uint16_t flags = 0;
    std::vector<question> questions;
    std::vector<resource_record> answers;
    std::vector<resource_record> authority;
    std::vector<resource_record> additional;

    bool is_response() const noexcept { return (flags & flag_qr) != 0; }
    bool operator==(const message&) const = default;
};

/// Decodes a wire-format message. Names (including those inside NS, CNAME,
/// SOA, PTR, MX and SRV rdata) come back fully decompressed; rdata of those
/// types is stored uncompressed.
inline message decode_wire(std::span<const std::uint8_t> wire)
{
    if (wire.size() < header_size)
        throw codec_error(errc::truncated, "message shorter than the 12-byte header");
    detail::reader r(wire);
    message m;
    m.id = r.u16();
    m.flags = r.u16();
    std::uint16_t qd = r.u16(), an = r.u16(), ns = r.u16(), ar = r.u16();

    for (std::uint16_t i = 0; i < qd; ++i) {
        question q;
        q.name = r.read_name();
        q.type = r.u16();
        q.cls = r.u16();
        m.questions.push_back(std::move(q));
    }
    auto read_rrs = [&](std::uint16_t count, std::vector<resource_record>& out) {
        out.reserve(count);
        for (std::uint16_t i = 0; i < count; ++i) {
            resource_record rr;
            rr.name = r.read_name();
            rr.type = r.u16();
            rr.cls = r.u16();
            rr.ttl = r.u32();
            std::uint16_t len = r.u16();
            if (len > r.remaining())
                throw codec_error(errc::truncated, "rdata runs past end of message");
            if (carries_names(rr.type)) {
                rr.rdata = serialize_name_rdata(detail::read_name_rdata(r, rr.type, len));
            } else {
                auto raw = r.take(len);
                rr.rdata.assign(raw.begin(), raw.end());
            }
            out.push_back(std::move(rr));
        }
    };
    read_rrs(an, m.answers);
    read_rrs(ns, m.authority);
    read_rrs(ar, m.additional);
    return m;
}

namespace detail {

class name_writer {
public:
    name_writer(bytes& out, bool compress)
        : out_(out)
        , compress_(compress)
    {
    }

    void write(const name& n)
    {
        const auto lower = n.lowered();
        std::size_t literal = lower.size();
        std::optional<std::uint16_t> pointer;
        if (compress_) {
            for (std::size_t i = 0; i < lower.size(); ++i) {
                auto it = table_.find(std::vector<std::string>(lower.begin() + static_cast<std::ptrdiff_t>(i), lower.end()));
                if (it != table_.end()) {
                    literal = i;
                    pointer = it->second;
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < literal; ++i) {
            auto offset = out_.size();
            if (compress_ && offset <= 0x3fff)
                table_.try_emplace(std::vector<std::string>(lower.begin() + static_cast<std::ptrdiff_t>(i), lower.end()),
                    static_cast<std::uint16_t>(offset));
            const auto& l = n.labels()[i];
            out_.push_back(static_cast<std::uint8_t>(l.size()));
            out_.insert(out_.end(), l.begin(), l.end());
        }
        if (pointer)
            put16(out_, static_cast<std::uint16_t>(0xc000 | *pointer));
        else
            out_.push_back(0);
    }

private:
    bytes& out_;
    bool compress_;
    std::map<std::vector<std::string>, std::uint16_t> table_;
};

} // namespace detail

/// Encodes `msg`. With `compress`, each name reuses the longest suffix already
/// written (first occurrence, offsets up to 0x3fff) via a two-byte pointer.
inline bytes encode_wire(const message& msg, bool compress = true)
{
    for (auto count : {msg.questions.size(), msg.answers.size(), msg.authority.size(), msg.additional.size()})
        if (count > 0xffff)
            throw codec_error(errc::section_overflow, std::to_string(count) + " entries");
    bytes out;
    out.reserve(512);
    detail::put16(out, msg.id);
    detail::put16(out, msg.flags);
    detail::put16(out, static_cast<std::uint16_t>(msg.questions.size()));
    detail::put16(out, static_cast<std::uint16_t>(msg.answers.size()));
    detail::put16(out, static_cast<std::uint16_t>(msg.authority.size()));
    detail::put16(out, static_cast<std::uint16_t>(msg.additional.size()));

    detail::name_writer names(out, compress);
    for (const auto& q : msg.questions) {
        names.write(q.name);
        detail::put16(out, q.type);
        detail::put16(out, q.cls);
    }
    auto write_rr = [&](const resource_record& rr) {
        names.write(rr.name);
        detail::put16(out, rr.type);
        detail::put16(out, rr.cls);
        detail::put32(out, rr.ttl);
        auto len_at = out.size();
        detail::put16(out, 0);
        auto structured = parse_name_rdata(rr.type, rr.rdata);
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                    out.insert(out.end(), rr.rdata.begin(), rr.rdata.end());
                } else if constexpr (std::is_same_v<T, name>) {
                    names.write(v);
                } else if constexpr (std::is_same_v<T, soa_rdata>) {
                    names.write(v.mname);
                    names.write(v.rname);
                    for (auto x : {v.serial, v.refresh, v.retry, v.expire, v.minimum})
                        detail::put32(out, x);
                } else if constexpr (std::is_same_v<T, mx_rdata>) {
                    detail::put16(out, v.preference);
                    names.write(v.exchange);
                } else if constexpr (std::is_same_v<T, srv_rdata>) {
                    detail::put16(out, v.priority);
                    detail::put16(out, v.weight);
                    detail::put16(out, v.port);
                    names.write(v.target);
                }
            },
            structured);
        auto len = out.size() - len_at - 2;
        if (len > 0xffff)
            throw codec_error(errc::section_overflow, "rdata of " + std::to_string(len) + " bytes");
        out[len_at] = static_cast<std::uint8_t>(len >> 8);
        out[len_at + 1] = static_cast<std::uint8_t>(len);
    };
    for (const auto* section : {&msg.answers, &msg.authority, &msg.additional})
        for (const auto& rr : *section)
            write_rr(rr);
    return out;
}

} // namespace cbordns::dns
