#pragma once

// Shared DNS fixtures. Wire bytes were produced with dnspython 2.x and are
// frozen here; the component-referencing bytes were hand-encoded and
// cross-checked with the cbor2 Python package.

#include <cbordns/dns_wire.hpp>

namespace cbordns::test_support {

// www.example.cz A/IN query, id 0x1234, RD set.
inline constexpr std::string_view cz_query_hex = "12340100000100000000000003777777076578616d706c6502637a0000010001";

// Its response: one A record 192.0.2.7, TTL 300, owner name compressed to offset 12.
inline constexpr std::string_view cz_response_hex =
    "12348180000100010000000003777777076578616d706c6502637a0000010001c00c000100010000012c0004c0000207";

// www.example.org response with a CNAME answer and an A additional record,
// component referencing with tag 7 (1+0) and tag 140 (1+1).
inline constexpr std::string_view cname_compref10_hex =
    "838463777777676578616d706c65636f7267018184c700190c9205c7018184c701190c920144c6336423";
inline constexpr std::string_view cname_compref11_hex =
    "838463777777676578616d706c65636f7267018184d88c00190c9205d88c018184d88c01190c920144c6336423";

inline dns::message cname_response()
{
    dns::message m;
    m.flags = 0x8180;
    m.questions.push_back({dns::name::from_text("www.example.org"), dns::rr_type::a, dns::class_in});
    m.answers.push_back({dns::name::from_text("www.example.org"), dns::rr_type::cname, dns::class_in, 3218,
        dns::serialize_name_rdata(dns::name::from_text("example.org"))});
    m.additional.push_back(
        {dns::name::from_text("example.org"), dns::rr_type::a, dns::class_in, 3218, {0xc6, 0x33, 0x64, 0x23}});
    return m;
}

} // namespace cbordns::test_support

namespace cbordns::test_support {

// Response whose answers repeat one 13-character suffix 301 times. Classic
// compression turns each repeat into a pointer; the unpacked format cannot.
inline dns::message repeated_suffix_response()
{
    dns::message m;
    m.flags = 0x8180;
    m.questions.push_back({dns::name::from_text("pool.cdn.test"), dns::rr_type::a, dns::class_in});
    for (int i = 0; i < 301; ++i)
        m.answers.push_back({dns::name::from_text("n" + std::to_string(i) + ".edge-cdn.net"), dns::rr_type::a,
            dns::class_in, 60, {203, 0, 113, static_cast<std::uint8_t>(i)}});
    return m;
}

// Response with 50 distinct owner names under example.org.
inline dns::message shared_suffix_response()
{
    dns::message m;
    m.flags = 0x8180;
    m.questions.push_back({dns::name::from_text("example.org"), dns::rr_type::any, dns::class_in});
    for (int i = 0; i < 50; ++i)
        m.answers.push_back({dns::name::from_text("host" + std::to_string(i) + ".example.org"), dns::rr_type::a,
            dns::class_in, 3600, {198, 51, 100, static_cast<std::uint8_t>(i)}});
    return m;
}

// Response carrying `count` A records with addresses under one /24.
inline dns::message many_a_records(int count)
{
    dns::message m;
    m.flags = 0x8180;
    m.questions.push_back({dns::name::from_text("big.example.net"), dns::rr_type::a, dns::class_in});
    for (int i = 0; i < count; ++i)
        m.answers.push_back({dns::name::from_text("big.example.net"), dns::rr_type::a, dns::class_in, 300,
            {192, 0, 2, static_cast<std::uint8_t>(i % 256)}});
    return m;
}

} // namespace cbordns::test_support
