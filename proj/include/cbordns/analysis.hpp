#pragma once

// Per-message evaluation: size of every dns+cbor mode against the classic
// wire format, pairwise name-suffix / address-prefix statistics, and the
// hex / pcap ingestion that feeds them.

#include <cbordns/dns_cbor.hpp>
#include <cbordns/dns_packed.hpp>
#include <cbordns/dns_wire.hpp>
#include <cbordns/json_bridge.hpp>
#include <cbordns/metrics.hpp>

#include <array>
#include <atomic>
#include <cstdio>
#include <map>
#include <thread>
#include <tuple>

namespace cbordns::analysis {

// ---------------------------------------------------------------------------
// Suffix and prefix statistics
// ---------------------------------------------------------------------------

/// Matching trailing bytes of the lowercase presentation forms.
inline std::size_t common_suffix_bytes(const dns::name& a, const dns::name& b)
{
    auto x = dns::ascii_lower(a.to_text());
    auto y = dns::ascii_lower(b.to_text());
    auto r = std::mismatch(x.rbegin(), x.rend(), y.rbegin(), y.rend());
    return static_cast<std::size_t>(r.first - x.rbegin());
}

struct component_suffix {
    std::size_t labels = 0;
    std::size_t bytes = 0; // labels joined with dots, no leading dot

    bool operator==(const component_suffix&) const = default;
};

inline component_suffix common_suffix_components(const dns::name& a, const dns::name& b)
{
    const auto& x = a.labels();
    const auto& y = b.labels();
    component_suffix out;
    auto i = x.rbegin();
    auto j = y.rbegin();
    for (; i != x.rend() && j != y.rend() && dns::iequals(*i, *j); ++i, ++j) {
        out.bytes += (out.labels ? 1 : 0) + dns::escape_label(*i).size();
        ++out.labels;
    }
    return out;
}

inline std::size_t common_prefix_bytes(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    if (a.size() != b.size() || (a.size() != 4 && a.size() != 16))
        throw codec_error(errc::family_mismatch,
            "addresses of " + std::to_string(a.size()) + " and " + std::to_string(b.size()) + " bytes");
    return static_cast<std::size_t>(std::mismatch(a.begin(), a.end(), b.begin(), b.end()).first - a.begin());
}

struct name_pair {
    std::size_t a = 0; // indices into suffix_stats::names
    std::size_t b = 0;
    std::size_t bytewise = 0;
    component_suffix components;
    bool equal_names = false;
};

struct address_pair {
    std::size_t a = 0; // indices into suffix_stats::addresses
    std::size_t b = 0;
    std::size_t common_prefix = 0;
};

struct suffix_stats {
    std::vector<dns::name> names;
    std::vector<bytes> addresses;
    std::vector<name_pair> name_pairs;
    std::vector<address_pair> address_pairs;
};

/// Names from the question, owners and name-bearing rdata; A/AAAA rdata as
/// addresses. Every unordered pair of each kind is compared; pairs of equal
/// names are kept and flagged. IPv4 and IPv6 addresses are not paired.
inline suffix_stats message_pair_stats(const dns::message& msg)
{
    suffix_stats s;
    for (const auto& q : msg.questions)
        s.names.push_back(q.name);
    for (const auto* section : {&msg.answers, &msg.authority, &msg.additional}) {
        for (const auto& rr : *section) {
            s.names.push_back(rr.name);
            if ((rr.type == dns::rr_type::a && rr.rdata.size() == 4)
                || (rr.type == dns::rr_type::aaaa && rr.rdata.size() == 16))
                s.addresses.push_back(rr.rdata);
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, dns::name>) {
                        s.names.push_back(v);
                    } else if constexpr (std::is_same_v<T, dns::soa_rdata>) {
                        s.names.push_back(v.mname);
                        s.names.push_back(v.rname);
                    } else if constexpr (std::is_same_v<T, dns::mx_rdata>) {
                        s.names.push_back(v.exchange);
                    } else if constexpr (std::is_same_v<T, dns::srv_rdata>) {
                        s.names.push_back(v.target);
                    }
                },
                dns::parse_name_rdata(rr.type, rr.rdata));
        }
    }
    for (std::size_t i = 0; i < s.names.size(); ++i)
        for (std::size_t j = i + 1; j < s.names.size(); ++j)
            s.name_pairs.push_back({i, j, common_suffix_bytes(s.names[i], s.names[j]),
                common_suffix_components(s.names[i], s.names[j]), s.names[i] == s.names[j]});
    for (std::size_t i = 0; i < s.addresses.size(); ++i)
        for (std::size_t j = i + 1; j < s.addresses.size(); ++j)
            if (s.addresses[i].size() == s.addresses[j].size())
                s.address_pairs.push_back({i, j, common_prefix_bytes(s.addresses[i], s.addresses[j])});
    return s;
}

// ---------------------------------------------------------------------------
// Mode comparison
// ---------------------------------------------------------------------------

enum class mode { unpacked, compref10, compref11, packed_lite, packed_full };

inline constexpr std::array<mode, 5> all_modes = {
    mode::unpacked, mode::compref10, mode::compref11, mode::packed_lite, mode::packed_full};

constexpr std::string_view to_string(mode m) noexcept
{
    switch (m) {
    case mode::unpacked: return "unpacked";
    case mode::compref10: return "compref10";
    case mode::compref11: return "compref11";
    case mode::packed_lite: return "packedlite";
    case mode::packed_full: return "packedfull";
    }
    return "?";
}

struct mode_result {
    std::size_t size = 0;
    metrics::savings_report savings;
};

struct mode_comparison {
    dns::role role = dns::role::query;
    bool question_elided = false;
    std::size_t classic_size = 0;
    std::array<mode_result, 5> modes{};

    const mode_result& operator[](mode m) const { return modes[static_cast<std::size_t>(m)]; }
};

struct compare_options {
    bool allow_query_answers = false;
    bool verify = true; // decode every encoding and compare with the input
    packed::packed_options packing;
};

inline dns::codec_context context_for(const dns::message& msg, const dns::message* request, mode m,
    const compare_options& opts = {})
{
    dns::codec_context ctx;
    ctx.role = msg.is_response() ? dns::role::response : dns::role::query;
    ctx.allow_query_answers = opts.allow_query_answers;
    if (ctx.role == dns::role::response && request && request->questions.size() == 1)
        ctx.request_question = request->questions.front();
    if (m == mode::compref10)
        ctx.mode = dns::compression_mode::compref10();
    else if (m == mode::compref11)
        ctx.mode = dns::compression_mode::compref11();
    return ctx;
}

/// Encodes `msg` in mode `m`. Packed modes pack the mode-None item.
inline bytes encode_mode(const dns::message& msg, const dns::codec_context& ctx, mode m,
    const packed::packed_options& popts = {}, dns::encode_report* report = nullptr)
{
    auto it = dns::to_item(msg, ctx, report);
    if (m == mode::packed_lite)
        return cbor::encode(packed::pack(it, packed::pack_mode::lite, popts));
    if (m == mode::packed_full)
        return cbor::encode(packed::pack(it, packed::pack_mode::full, popts));
    return cbor::encode(it);
}

inline dns::message decode_mode(std::span<const std::uint8_t> data, const dns::codec_context& ctx, mode m,
    const packed::packed_options& popts = {})
{
    auto it = cbor::decode_all(data);
    if (m == mode::packed_lite || m == mode::packed_full)
        it = packed::unpack(it, popts);
    return dns::from_item(it, ctx);
}

inline mode_comparison compare_modes(
    const dns::message& msg, const dns::message* request = nullptr, const compare_options& opts = {})
{
    mode_comparison out;
    out.classic_size = dns::encode_wire(msg, true).size();
    auto base = context_for(msg, request, mode::unpacked, opts);
    out.role = base.role;
    out.question_elided = base.request_question && msg.questions.size() == 1
        && *base.request_question == msg.questions.front();

    for (auto m : all_modes) {
        auto ctx = context_for(msg, request, m, opts);
        dns::encode_report report;
        auto enc = encode_mode(msg, ctx, m, opts.packing, &report);
        if (opts.verify) {
            auto expect = msg;
            expect.id = 0;
            if (report.dropped_query_answers)
                expect.answers.clear();
            if (!(decode_mode(enc, ctx, m, opts.packing) == expect))
                throw codec_error(errc::type_mismatch, std::string(to_string(m)) + " encoding does not round-trip");
        }
        auto& r = out.modes[static_cast<std::size_t>(m)];
        r.size = enc.size();
        r.savings = metrics::compute_savings(out.classic_size, enc.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

struct flow {
    bytes src;
    bytes dst;
    std::uint16_t sport = 0;
    std::uint16_t dport = 0;

    bool operator==(const flow&) const = default;
    flow reversed() const { return {dst, src, dport, sport}; }
};

struct stream_message {
    dns::role role = dns::role::query;
    dns::message msg;
    std::optional<analysis::flow> flow; // pcap only
    double timestamp = 0.0;             // seconds; pcap only
    std::size_t origin = 0;             // line number (hex) or packet number (pcap), 1-based
};

struct ingest_error {
    std::size_t origin = 0;
    errc code = errc::hex_error;
    std::string detail;
};

struct hex_ingest {
    std::vector<stream_message> messages;
    std::vector<ingest_error> errors;
};

inline dns::role role_of(const dns::message& m) { return m.is_response() ? dns::role::response : dns::role::query; }

/// One hex-encoded wire message per line; '#' starts a comment.
inline hex_ingest ingest_hex(std::string_view text)
{
    hex_ingest out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        try {
            auto msg = dns::decode_wire(from_hex(line));
            out.messages.push_back({role_of(msg), std::move(msg), std::nullopt, 0.0, line_no});
        } catch (const codec_error& e) {
            out.errors.push_back({line_no, e.code(), e.what()});
        }
    }
    return out;
}

struct pcap_ingest {
    std::vector<stream_message> messages;
    std::size_t packets = 0;
    std::size_t non_dns = 0;          // not UDP, or UDP on other ports
    std::size_t undecodable = 0;      // DNS ports but the payload did not decode
    std::size_t truncated_frames = 0; // cut short by the capture length
    std::size_t fragments = 0;        // IPv4/IPv6 fragments are not reassembled
    std::size_t ipv6_extension_headers = 0;
};

namespace detail {

class pcap_reader {
public:
    explicit pcap_reader(std::span<const std::uint8_t> data)
        : data_(data)
    {
    }

    pcap_ingest run()
    {
        if (data_.size() < 24)
            throw codec_error(errc::bad_magic, "file shorter than a pcap header");
        auto magic = le32(0);
        if (magic == 0xa1b2c3d4 || magic == 0xa1b23c4d) {
            swapped_ = false;
        } else if (magic == 0xd4c3b2a1 || magic == 0x4d3cb2a1) {
            swapped_ = true;
        } else {
            throw codec_error(errc::bad_magic, "magic " + to_hex(bytes(data_.begin(), data_.begin() + 4)));
        }
        nanos_ = magic == 0xa1b23c4d || magic == 0x4d3cb2a1;
        auto link = u32(20);
        if (link != 1)
            throw codec_error(errc::unsupported_link_type, "link type " + std::to_string(link));

        pcap_ingest out;
        std::size_t pos = 24;
        while (pos + 16 <= data_.size()) {
            auto sec = u32(pos);
            auto frac = u32(pos + 4);
            auto incl = u32(pos + 8);
            auto orig = u32(pos + 12);
            pos += 16;
            if (incl > data_.size() - pos) {
                ++out.truncated_frames;
                break;
            }
            ++out.packets;
            double ts = sec + frac / (nanos_ ? 1e9 : 1e6);
            if (incl < orig)
                ++out.truncated_frames;
            frame(out, data_.subspan(pos, incl), ts, out.packets);
            pos += incl;
        }
        return out;
    }

private:
    static std::uint16_t be16(std::span<const std::uint8_t> p, std::size_t at)
    {
        return static_cast<std::uint16_t>(p[at] << 8 | p[at + 1]);
    }

    std::uint32_t le32(std::size_t at) const
    {
        return static_cast<std::uint32_t>(data_[at]) | static_cast<std::uint32_t>(data_[at + 1]) << 8
            | static_cast<std::uint32_t>(data_[at + 2]) << 16 | static_cast<std::uint32_t>(data_[at + 3]) << 24;
    }

    std::uint32_t u32(std::size_t at) const
    {
        auto v = le32(at);
        return swapped_ ? __builtin_bswap32(v) : v;
    }

    void frame(pcap_ingest& out, std::span<const std::uint8_t> f, double ts, std::size_t number)
    {
        if (f.size() < 14) {
            ++out.non_dns;
            return;
        }
        std::size_t off = 12;
        auto ethertype = be16(f, off);
        while ((ethertype == 0x8100 || ethertype == 0x88a8) && f.size() >= off + 6) {
            off += 4;
            ethertype = be16(f, off);
        }
        off += 2;
        auto ip = f.subspan(off);
        flow fl;
        std::span<const std::uint8_t> udp;
        if (ethertype == 0x0800) {
            if (ip.size() < 20 || (ip[0] >> 4) != 4) {
                ++out.non_dns;
                return;
            }
            std::size_t ihl = (ip[0] & 0x0f) * 4u;
            std::size_t total = be16(ip, 2);
            if (ihl < 20 || ip.size() < ihl) {
                ++out.non_dns;
                return;
            }
            if ((be16(ip, 6) & 0x3fff) != 0) {
                ++out.fragments;
                return;
            }
            if (ip[9] != 17) {
                ++out.non_dns;
                return;
            }
            fl.src.assign(ip.begin() + 12, ip.begin() + 16);
            fl.dst.assign(ip.begin() + 16, ip.begin() + 20);
            auto end = std::min(ip.size(), std::max(total, ihl));
            udp = ip.subspan(ihl, end - ihl);
        } else if (ethertype == 0x86dd) {
            if (ip.size() < 40 || (ip[0] >> 4) != 6) {
                ++out.non_dns;
                return;
            }
            fl.src.assign(ip.begin() + 8, ip.begin() + 24);
            fl.dst.assign(ip.begin() + 24, ip.begin() + 40);
            std::size_t payload_end = std::min(ip.size(), std::size_t{40} + be16(ip, 4));
            std::uint8_t next = ip[6];
            std::size_t p = 40;
            // hop-by-hop, routing, fragment, destination options, authentication
            while (next == 0 || next == 43 || next == 44 || next == 60 || next == 51) {
                if (p + 8 > payload_end) {
                    ++out.non_dns;
                    return;
                }
                if (next == 44 && (be16(ip, p + 2) & 0xfff9) != 0) {
                    ++out.fragments;
                    return;
                }
                ++out.ipv6_extension_headers;
                std::size_t len = next == 44 ? 8 : next == 51 ? (ip[p + 1] + 2u) * 4u : (ip[p + 1] + 1u) * 8u;
                next = ip[p];
                p += len;
            }
            if (next != 17 || p > payload_end) {
                ++out.non_dns;
                return;
            }
            udp = ip.subspan(p, payload_end - p);
        } else {
            ++out.non_dns;
            return;
        }

        if (udp.size() < 8) {
            ++out.non_dns;
            return;
        }
        fl.sport = be16(udp, 0);
        fl.dport = be16(udp, 2);
        auto is_dns = [](std::uint16_t port) { return port == 53 || port == 5353; };
        if (!is_dns(fl.sport) && !is_dns(fl.dport)) {
            ++out.non_dns;
            return;
        }
        std::size_t ulen = be16(udp, 4);
        auto payload = udp.subspan(8, std::min(udp.size(), std::max<std::size_t>(ulen, 8)) - 8);
        try {
            auto msg = dns::decode_wire(payload);
            out.messages.push_back({role_of(msg), std::move(msg), std::move(fl), ts, number});
        } catch (const codec_error&) {
            ++out.undecodable;
        }
    }

    std::span<const std::uint8_t> data_;
    bool swapped_ = false;
    bool nanos_ = false;
};

} // namespace detail

/// Legacy pcap with Ethernet framing; UDP on port 53 or 5353 only.
inline pcap_ingest ingest_pcap(std::span<const std::uint8_t> data) { return detail::pcap_reader(data).run(); }

struct message_pair {
    std::optional<std::size_t> query; // index into the stream
    std::size_t response = 0;
};

/// Pairs every response with the earliest unconsumed query that has the
/// same id and question (and the mirrored flow when both sides carry one).
/// Unmatched responses come back with no query.
inline std::vector<message_pair> pair_queries_responses(const std::vector<stream_message>& stream)
{
    using key_t = std::tuple<std::uint16_t, std::vector<std::string>, std::uint16_t, std::uint16_t>;
    auto key_of = [](const dns::message& m) -> std::optional<key_t> {
        if (m.questions.size() != 1)
            return std::nullopt;
        const auto& q = m.questions.front();
        return key_t{m.id, q.name.lowered(), q.type, q.cls};
    };
    std::map<key_t, std::vector<std::size_t>> open;
    for (std::size_t i = 0; i < stream.size(); ++i)
        if (stream[i].role == dns::role::query)
            if (auto k = key_of(stream[i].msg))
                open[*k].push_back(i);

    std::vector<bool> used(stream.size(), false);
    std::vector<message_pair> out;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (stream[i].role != dns::role::response)
            continue;
        message_pair p{std::nullopt, i};
        if (auto k = key_of(stream[i].msg); k && open.count(*k)) {
            for (auto qi : open[*k]) {
                if (used[qi])
                    continue;
                const auto& qf = stream[qi].flow;
                const auto& rf = stream[i].flow;
                if (qf && rf && !(qf->reversed() == *rf))
                    continue;
                used[qi] = true;
                p.query = qi;
                break;
            }
        }
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus runs and reports
// ---------------------------------------------------------------------------

struct corpus_row {
    std::size_t origin = 0;
    mode_comparison comparison;
};

struct corpus_report {
    std::vector<corpus_row> rows;
    std::vector<ingest_error> errors;
};

/// Runs `f(i)` for i in [0, n) on up to `parallel` threads.
template <typename F>
void parallel_for(std::size_t n, unsigned parallel, F&& f)
{
    if (parallel <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < std::min<std::size_t>(parallel, n); ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;)
                f(i);
        });
    for (auto& t : pool)
        t.join();
}

/// Queries are compared on their own; responses with their paired query's
/// question as request context. Output keeps stream order.
inline corpus_report compare_corpus(
    const std::vector<stream_message>& stream, const compare_options& opts = {}, unsigned parallel = 1)
{
    std::vector<const dns::message*> request(stream.size(), nullptr);
    for (const auto& p : pair_queries_responses(stream))
        if (p.query)
            request[p.response] = &stream[*p.query].msg;

    std::vector<std::optional<mode_comparison>> results(stream.size());
    std::vector<std::optional<ingest_error>> failures(stream.size());
    parallel_for(stream.size(), parallel, [&](std::size_t i) {
        try {
            results[i] = compare_modes(stream[i].msg, request[i], opts);
        } catch (const codec_error& e) {
            failures[i] = ingest_error{stream[i].origin, e.code(), e.what()};
        }
    });

    corpus_report out;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (results[i])
            out.rows.push_back({stream[i].origin, std::move(*results[i])});
        else
            out.errors.push_back(std::move(*failures[i]));
    }
    return out;
}

inline constexpr std::string_view compare_csv_header =
    "role,question_elided,classic_size,unpacked_size,unpacked_b,unpacked_g,compref10_size,compref10_b,compref10_g,"
    "compref11_size,compref11_b,compref11_g,packedlite_size,packedlite_b,packedlite_g,packedfull_size,packedfull_b,"
    "packedfull_g";

inline std::string format_gain(double g)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", g);
    return buf;
}

inline std::string write_csv(const std::vector<mode_comparison>& rows)
{
    std::string out(compare_csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += r.role == dns::role::query ? "query" : "response";
        out += r.question_elided ? ",1," : ",0,";
        out += std::to_string(r.classic_size);
        for (const auto& m : r.modes) {
            out += ',' + std::to_string(m.size);
            out += ',' + std::to_string(m.savings.savings);
            out += ',' + format_gain(m.savings.gain);
        }
        out += '\n';
    }
    return out;
}

inline constexpr std::string_view suffix_csv_header =
    "message,kind,a,b,bytewise_suffix,component_labels,component_bytes,common_prefix,equal_names";

namespace detail {

inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string address_text(const bytes& a)
{
    char buf[8];
    std::string out;
    if (a.size() == 4) {
        for (std::size_t i = 0; i < 4; ++i) {
            std::snprintf(buf, sizeof buf, i ? ".%u" : "%u", a[i]);
            out += buf;
        }
        return out;
    }
    for (std::size_t i = 0; i < a.size(); i += 2) {
        std::snprintf(buf, sizeof buf, i ? ":%x" : "%x", static_cast<unsigned>(a[i] << 8 | a[i + 1]));
        out += buf;
    }
    return out;
}

} // namespace detail

/// One line per compared pair. Names print in presentation form, addresses
/// in uncompressed dotted / colon form.
inline std::string write_suffix_csv(const std::vector<std::pair<std::size_t, suffix_stats>>& per_message)
{
    std::string out(suffix_csv_header);
    out += '\n';
    for (const auto& [origin, s] : per_message) {
        for (const auto& p : s.name_pairs) {
            out += std::to_string(origin) + ",name," + detail::csv_field(s.names[p.a].to_text()) + ','
                + detail::csv_field(s.names[p.b].to_text()) + ',' + std::to_string(p.bytewise) + ','
                + std::to_string(p.components.labels) + ',' + std::to_string(p.components.bytes) + ",,"
                + (p.equal_names ? "1" : "0") + '\n';
        }
        for (const auto& p : s.address_pairs) {
            out += std::to_string(origin) + ",address," + detail::address_text(s.addresses[p.a]) + ','
                + detail::address_text(s.addresses[p.b]) + ",,,," + std::to_string(p.common_prefix) + ",\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

struct json_row {
    std::string file;
    std::size_t json_size = 0; // minified
    std::size_t cbor_size = 0;
    metrics::savings_report savings;
    metrics::taxonomy_record taxonomy;
};

/// Minified JSON against CBOR (smallest floats); the tier follows the
/// minified JSON size.
inline json_row analyze_json(std::string file, std::string_view text, cbor::float_mode floats = cbor::float_mode::smallest)
{
    auto v = json::parse_json(text);
    auto minified = json::minify(v);
    auto item = json::json_to_cbor(v, floats);
    json_row row;
    row.file = std::move(file);
    row.json_size = minified.size();
    row.cbor_size = cbor::encode(item, {.floats = floats}).size();
    row.savings = metrics::compute_savings(row.json_size, row.cbor_size);
    row.taxonomy = metrics::classify(item, row.json_size);
    return row;
}

inline constexpr std::string_view json_csv_header =
    "file,json_size,cbor_size,savings_b,gain_g,tier,content_type,redundancy,structure";

inline std::string write_json_csv(const std::vector<json_row>& rows)
{
    std::string out(json_csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += detail::csv_field(r.file) + ',' + std::to_string(r.json_size) + ',' + std::to_string(r.cbor_size) + ','
            + std::to_string(r.savings.savings) + ',' + format_gain(r.savings.gain) + ','
            + std::to_string(r.taxonomy.tier) + ',' + std::string(metrics::to_string(r.taxonomy.content)) + ','
            + std::string(metrics::to_string(r.taxonomy.redundancy)) + ','
            + std::string(metrics::to_string(r.taxonomy.structure)) + '\n';
    }
    return out;
}

} // namespace cbordns::analysis
