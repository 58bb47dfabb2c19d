// Acceptance runner: one line per criterion, non-zero exit if any fails.

#include <cbordns/analysis.hpp>
#include <cbordns/cbor.hpp>
#include <cbordns/dns_cbor.hpp>
#include <cbordns/dns_packed.hpp>
#include <cbordns/dns_wire.hpp>
#include <cbordns/json_bridge.hpp>
#include <cbordns/metrics.hpp>

#include "support/blob_fixture.hpp"
#include "support/fixtures.hpp"
#include "support/random_items.hpp"
#include "support/random_messages.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace cbordns;

namespace {

// Collects the first failed expectation of a criterion.
class check {
public:
    void expect(bool cond, const std::string& what)
    {
        if (!cond && failure_.empty())
            failure_ = what;
    }
    template <typename A, typename B>
    void equal(const A& a, const B& b, const std::string& what)
    {
        if (!(a == b) && failure_.empty()) {
            std::ostringstream s;
            s << what << ": got " << a << ", want " << b;
            failure_ = s.str();
        }
    }
    bool ok() const { return failure_.empty(); }
    const std::string& failure() const { return failure_; }
    std::string note;

private:
    std::string failure_;
};

struct criterion {
    int number;
    std::string title;
    double limit_s;
    std::function<void(check&)> body;
};

std::string hex_of(const cbor::item& it, cbor::float_mode m = cbor::float_mode::preserve)
{
    return to_hex(cbor::encode(it, {.floats = m}));
}

void golden_cbor(check& c)
{
    using cbor::float_mode;
    c.equal(hex_of(cbor::uinteger(12)), std::string("0c"), "Uint(12)");
    c.equal(hex_of(cbor::text("Hello!")), std::string("6648656c6c6f21"), "Text(Hello!)");
    c.equal(hex_of(cbor::float_value(5.5), float_mode::force_double), std::string("fb4016000000000000"), "5.5 double");
    c.equal(hex_of(cbor::float_value(5.5), float_mode::smallest), std::string("f94580"), "5.5 smallest");
    c.equal(hex_of(cbor::float_value(5.428494284942873e-06), float_mode::force_double),
        std::string("fb3ed6c4cd259b6807"), "5.428494284942873e-06 double");
}

int depth_of(const cbor::item& it)
{
    int d = 0;
    if (auto* a = it.get_if<cbor::array>())
        for (const auto& x : a->items)
            d = std::max(d, 1 + depth_of(x));
    else if (auto* m = it.get_if<cbor::map>())
        for (const auto& [k, v] : m->entries)
            d = std::max({d, 1 + depth_of(k), 1 + depth_of(v)});
    else if (auto* t = it.get_if<cbor::tagged>())
        d = 1 + depth_of(*t->content);
    return d;
}

void cbor_round_trip(check& c)
{
    test_support::item_generator gen(2);
    constexpr int n = 10000;
    int deepest = 0;
    for (int i = 0; i < n && c.ok(); ++i) {
        auto x = gen.any_item(i % 9);
        deepest = std::max(deepest, depth_of(x));
        auto enc = cbor::encode(x);
        auto back = cbor::decode(enc);
        c.expect(back.consumed == enc.size() && back.value == x, "decode(encode(x)) != x for " + cbor::to_diagnostic(x));
        auto once = cbor::encode(cbor::decode_all(enc), {.floats = cbor::float_mode::smallest});
        auto twice = cbor::encode(cbor::decode_all(once), {.floats = cbor::float_mode::smallest});
        c.expect(once == twice, "smallest re-encoding not a fixed point for " + cbor::to_diagnostic(x));
    }
    c.expect(deepest <= 8, "item deeper than 8");
    c.note = std::to_string(n) + " items, max depth " + std::to_string(deepest);
}

void blob_delta(check& c)
{
    auto blob = test_support::github_blob(test_support::random_payload(100 * 1000, 24));
    auto simple = cbor::item_size(blob);
    auto tagged = json::blob_tag_base64(blob);
    auto raw = json::blob_to_bstr(tagged);
    c.equal(static_cast<long>(simple) - static_cast<long>(cbor::item_size(tagged)), 14L, "tag34 delta");
    auto g = metrics::compute_savings(simple, cbor::item_size(raw)).gain;
    c.expect(g >= 0.22 && g <= 0.28, "bstr gain " + std::to_string(g) + " outside [0.22, 0.28]");
    char buf[96];
    std::snprintf(buf, sizeof buf, "simple %zu B, tag34 -14 B, bstr gain %.4f", simple, g);
    c.note = buf;
}

void wire_fidelity(check& c)
{
    for (auto hex : {test_support::cz_query_hex, test_support::cz_response_hex}) {
        auto wire = from_hex(hex);
        auto msg = dns::decode_wire(wire);
        c.equal(to_hex(dns::encode_wire(msg)), std::string(hex), "wire re-encoding");
    }
    auto resp = dns::encode_wire(dns::decode_wire(from_hex(test_support::cz_response_hex)));
    c.expect(resp.size() > 33 && resp[32] == 0xc0 && resp[33] == 0x0c, "answer owner is not pointer c00c");
}

void cname_golden(check& c)
{
    auto msg = test_support::cname_response();
    dns::codec_context ctx;
    ctx.role = dns::role::response;
    ctx.mode = dns::compression_mode::compref10();
    auto it = dns::to_item(msg, ctx);
    c.equal(cbor::to_diagnostic(it),
        std::string(R"([["www", "example", "org", 1], [[7(0), 3218, 5, 7(1)]], [[7(1), 3218, 1, h'c6336423']]])"),
        "structure");
    auto enc = dns::encode_message(msg, ctx);
    c.equal(to_hex(enc), std::string(test_support::cname_compref10_hex), "1+0 bytes");
    c.expect(dns::decode_message(enc, ctx) == msg, "1+0 decode differs");
    ctx.mode = dns::compression_mode::compref11();
    auto enc11 = dns::encode_message(msg, ctx);
    c.equal(to_hex(enc11), std::string(test_support::cname_compref11_hex), "1+1 bytes");
    c.expect(dns::decode_message(enc11, ctx) == msg, "1+1 decode differs");
}

std::size_t question_width(const dns::question& q)
{
    dns::message m;
    m.flags = 0x0100;
    m.questions.push_back(q);
    dns::codec_context ctx;
    auto it = dns::to_item(m, ctx);
    return it.as<cbor::array>().items.at(0).as<cbor::array>().items.size();
}

void elision(check& c)
{
    using dns::class_in;
    using dns::name;
    c.equal(question_width({name::from_text("example.org"), dns::rr_type::aaaa, class_in}), std::size_t{1}, "AAAA/IN");
    c.equal(question_width({name::from_text("example.org"), dns::rr_type::a, class_in}), std::size_t{2}, "A/IN");
    c.equal(question_width({name::from_text("example.org"), dns::rr_type::aaaa, 3}), std::size_t{3}, "AAAA/CH");

    test_support::message_generator gen(6);
    constexpr int n = 2000;
    for (int i = 0; i < n && c.ok(); ++i) {
        auto q = gen.any_question();
        std::size_t want = q.cls != class_in ? 3 : q.type == dns::rr_type::aaaa ? 1 : 2;
        c.equal(question_width(q), want, "question width for type " + std::to_string(q.type));

        auto m = gen.any_message(true);
        m.id = 0;
        m.questions = {q};
        dns::codec_context ctx;
        ctx.role = dns::role::response;
        ctx.mode = i % 2 ? dns::compression_mode::compref10() : dns::compression_mode::none();
        auto full = dns::to_item(m, ctx);
        ctx.request_question = q;
        auto elided = dns::to_item(m, ctx);
        c.equal(elided.as<cbor::array>().items.size() + 1, full.as<cbor::array>().items.size(), "question not elided");
        c.expect(dns::decode_message(dns::encode_message(m, ctx), ctx) == m, "elided response does not round-trip");
    }
    c.note = std::to_string(n) + " random questions";
}

void mdns(check& c)
{
    dns::message q;
    q.flags = 0;
    q.questions.push_back({dns::name::from_text("_ipp._tcp.local"), dns::rr_type::ptr, dns::class_in});
    for (auto inst : {"printer-a", "printer-b"})
        q.answers.push_back({dns::name::from_text("_ipp._tcp.local"), dns::rr_type::ptr, dns::class_in, 4500,
            dns::serialize_name_rdata(dns::name::from_text(std::string(inst) + "._ipp._tcp.local"))});

    dns::codec_context draft;
    dns::encode_report lossy;
    auto enc = dns::encode_message(q, draft, &lossy);
    c.expect(lossy.dropped_query_answers, "draft mode did not flag dropped answers");
    c.expect(dns::decode_message(enc, draft).answers.empty(), "draft mode kept answers");

    dns::codec_context ext;
    ext.allow_query_answers = true;
    dns::encode_report kept;
    auto full = dns::encode_message(q, ext, &kept);
    c.expect(!kept.dropped_query_answers, "extended mode flagged a loss");
    c.expect(dns::decode_message(full, ext) == q, "extended mode does not round-trip");
}

void orderings(check& c)
{
    using analysis::mode;
    test_support::message_generator gen(8);
    constexpr int n = 1500;
    for (int i = 0; i < n && c.ok(); ++i) {
        auto m = gen.any_message(i % 3 != 0);
        auto r = analysis::compare_modes(m);
        c.expect(r[mode::packed_full].size <= r[mode::packed_lite].size, "packed-full > packed-lite");
        c.expect(r[mode::compref10].size <= r[mode::compref11].size, "compref 1+0 > 1+1");
    }
    auto shared = analysis::compare_modes(test_support::shared_suffix_response());
    auto saved10 = static_cast<long>(shared[mode::unpacked].size) - static_cast<long>(shared[mode::compref10].size);
    auto saved11 = static_cast<long>(shared[mode::unpacked].size) - static_cast<long>(shared[mode::compref11].size);
    c.expect(saved10 >= 400, "compref 1+0 saves only " + std::to_string(saved10));
    c.expect(saved11 >= 400, "compref 1+1 saves only " + std::to_string(saved11));
    auto repeated = analysis::compare_modes(test_support::repeated_suffix_response());
    c.expect(repeated[mode::unpacked].savings.savings < 0, "mode None beats classic on the 301-name response");
    c.note = std::to_string(n) + " messages; 50 owners: -" + std::to_string(saved10) + "/-" + std::to_string(saved11)
        + " B; 301 names: b=" + std::to_string(repeated[mode::unpacked].savings.savings);
}

void packed_round_trip(check& c)
{
    using packed::pack_mode;
    test_support::item_generator gen(9);
    constexpr int n = 3000;
    for (int i = 0; i < n && c.ok(); ++i) {
        auto it = gen.any_item(i % 6, false);
        for (auto mode : {pack_mode::full, pack_mode::lite}) {
            auto env = packed::pack(it, mode);
            c.expect(packed::unpack(env) == it, "unpack(pack(x)) != x for " + cbor::to_diagnostic(it));
            c.expect(packed::unpack(cbor::decode_all(cbor::encode(env))) == it, "wire round-trip of packed x");
        }
    }
    for (int k = 0; k < 200 && c.ok(); ++k) {
        std::vector<cbor::item> items;
        for (int i = 0; i <= k; ++i) {
            items.push_back(cbor::uinteger(static_cast<std::uint64_t>(7919 * i + k)));
            items.push_back(cbor::text("k" + std::to_string(i)));
        }
        auto it = cbor::arr(items);
        for (auto mode : {pack_mode::full, pack_mode::lite})
            c.equal(cbor::encode(packed::pack(it, mode)).size(), cbor::encode(it).size() + 4,
                "overhead on distinct input");
    }
    c.note = std::to_string(n) + " random items, 200 distinct-leaf arrays";
}

void suffixes(check& c)
{
    auto a = dns::name::from_text("service.example.com");
    auto b = dns::name::from_text("we-sell-ice.example.com");
    c.equal(analysis::common_suffix_bytes(a, b), std::size_t{15}, "byte-wise suffix");
    auto comp = analysis::common_suffix_components(a, b);
    c.equal(comp.labels, std::size_t{2}, "component labels");
    c.equal(comp.bytes, std::string("example.com").size(), "component bytes");
    const auto& labels = a.labels();
    std::string joined;
    for (auto i = labels.size() - comp.labels; i < labels.size(); ++i)
        joined += (joined.empty() ? "" : ".") + std::string(labels[i].begin(), labels[i].end());
    c.equal(joined, std::string("example.com"), "component suffix");
}

void taxonomy(check& c)
{
    using namespace metrics;
    auto sized = [](std::size_t total) {
        // text head is 2 bytes up to 255 characters, 3 bytes above
        auto it = cbor::text(std::string(total - (total > 257 ? 3 : 2), 'x'));
        return std::pair{it, cbor::item_size(it)};
    };
    for (auto [size, tier] : {std::pair<std::size_t, int>{99, 1}, {100, 2}, {999, 2}, {1000, 3}}) {
        auto [it, n] = sized(size);
        c.equal(n, size, "fixture size");
        c.equal(classify(it, n).tier, tier, "tier of " + std::to_string(size) + " bytes");
    }
    auto small = cbor::make_map({{cbor::text("a"), cbor::uinteger(1)}});
    c.expect(classify(small, cbor::item_size(small))
            == taxonomy_record{1, content_type::textual, redundancy::non_redundant, structure::flat},
        "Map{a:1}");
    auto names = cbor::arr(std::vector<cbor::item>(301, cbor::text("cdn.example.n")));
    auto rec = classify(names, cbor::item_size(names));
    c.expect(rec.redundancy == redundancy::redundant && rec.tier == 3 && rec.content == content_type::textual,
        "301 equal names");
    auto trivial = cbor::arr({cbor::uinteger(0), cbor::uinteger(0), cbor::boolean_value(true), cbor::boolean_value(true)});
    c.expect(classify(trivial, 5).redundancy == redundancy::non_redundant, "one-byte duplicates counted");
    auto nested = cbor::make_map({{cbor::text("a"), cbor::arr({cbor::uinteger(1)})}});
    c.expect(classify(nested, cbor::item_size(nested)).structure == structure::nested, "map holding array");
    auto flat = cbor::arr({cbor::tag(1, cbor::uinteger(1))});
    c.expect(classify(flat, 3).structure == structure::flat, "tag without container");
    auto packed_msg = cbor::tag(113,
        cbor::arr({cbor::arr({cbor::bstr({1, 2, 3})}),
            cbor::arr({cbor::simple_value(0), cbor::simple_value(0), cbor::simple_value(3), cbor::uinteger(9)})}));
    c.expect(classify(packed_msg, cbor::item_size(packed_msg)).content == content_type::taggy, "packed references");
}

} // namespace

int main()
{
    const std::vector<criterion> criteria = {
        {1, "golden CBOR bytes", 1, golden_cbor},
        {2, "CBOR round-trip and idempotence", 30, cbor_round_trip},
        {3, "blob transform deltas", 5, blob_delta},
        {4, "classic wire fidelity", 1, wire_fidelity},
        {5, "component referencing golden message", 1, cname_golden},
        {6, "question elision and widths", 5, elision},
        {7, "multicast known answers", 1, mdns},
        {8, "compression orderings", 60, orderings},
        {9, "packed round-trip and envelope overhead", 60, packed_round_trip},
        {10, "suffix analysis", 1, suffixes},
        {11, "taxonomy boundaries", 1, taxonomy},
    };
    int failed = 0;
    for (const auto& k : criteria) {
        check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            k.body(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.ok() && s > k.limit_s)
            c.expect(false, "took " + std::to_string(s) + " s, limit " + std::to_string(k.limit_s) + " s");
        std::printf("[%s] %2d %-42s %7.3f s  %s\n", c.ok() ? "PASS" : "FAIL", k.number, k.title.c_str(), s,
            c.ok() ? c.note.c_str() : c.failure().c_str());
        failed += !c.ok();
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
