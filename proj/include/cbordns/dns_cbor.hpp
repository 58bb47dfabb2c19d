#pragma once

// Unpacked dns+cbor: DNS messages as nested CBOR arrays with elision of
// default material, and optional Component Referencing for names.

#include <cbordns/cbor.hpp>
#include <cbordns/dns_wire.hpp>
#include <cbordns/error.hpp>

#include <map>
#include <optional>

namespace cbordns::dns {

enum class role { query, response };

struct compression_mode {
    enum class kind_t : std::uint8_t { none, component_ref };

    kind_t kind = kind_t::none;
    std::uint64_t ref_tag = 0;

    static compression_mode none() { return {}; }

    /// One-byte reference tag; `tag` must be at most 23.
    static compression_mode compref10(std::uint64_t tag = 7)
    {
        if (tag > 23)
            throw std::invalid_argument("1+0 reference tag must be below 24");
        return {kind_t::component_ref, tag};
    }

    /// Two-byte reference tag; `tag` must be in 24..255.
    static compression_mode compref11(std::uint64_t tag = 140)
    {
        if (tag < 24 || tag > 255)
            throw std::invalid_argument("1+1 reference tag must be in 24..255");
        return {kind_t::component_ref, tag};
    }

    bool component_ref() const noexcept { return kind == kind_t::component_ref; }
    bool operator==(const compression_mode&) const = default;
};

struct codec_context {
    dns::role role = role::query;
    std::optional<question> request_question; // responses only
    bool allow_query_answers = false;
    bool structured_rdata = true;
    std::uint16_t default_query_flags = 0x0100;
    std::uint16_t default_response_flags = 0x8180;
    compression_mode mode;

    std::uint16_t default_flags() const noexcept
    {
        return role == role::query ? default_query_flags : default_response_flags;
    }
};

struct encode_report {
    bool dropped_query_answers = false;
};

/// Suffix table for Component Referencing. Keys are lowercased label lists.
class component_index {
public:
    struct plan {
        std::size_t literal_count = 0;
        std::optional<std::uint64_t> ref;
    };

    std::uint64_t next_index() const noexcept { return next_; }

    plan lookup_longest_suffix(const std::vector<std::string>& labels) const
    {
        auto key = lowered(labels);
        for (std::size_t k = 0; k < key.size(); ++k) {
            auto it = table_.find(std::vector<std::string>(key.begin() + static_cast<std::ptrdiff_t>(k), key.end()));
            if (it != table_.end())
                return {k, it->second};
        }
        return {key.size(), std::nullopt};
    }

    /// Records the emission of `labels` as `p.literal_count` literal
    /// components followed by an optional reference.
    void register_name(const std::vector<std::string>& labels, const plan& p)
    {
        auto key = lowered(labels);
        for (std::size_t i = 0; i < p.literal_count; ++i)
            table_.try_emplace(std::vector<std::string>(key.begin() + static_cast<std::ptrdiff_t>(i), key.end()),
                next_ + i);
        next_ += p.literal_count;
    }

    /// A literal that belongs to no name suffix (the root's empty string).
    void skip() { ++next_; }

    std::optional<std::uint64_t> find(const std::vector<std::string>& labels) const
    {
        auto it = table_.find(lowered(labels));
        if (it == table_.end())
            return std::nullopt;
        return it->second;
    }

private:
    static std::vector<std::string> lowered(const std::vector<std::string>& labels)
    {
        std::vector<std::string> out;
        out.reserve(labels.size());
        for (const auto& l : labels)
            out.push_back(ascii_lower(l));
        return out;
    }

    std::uint64_t next_ = 0;
    std::map<std::vector<std::string>, std::uint64_t> table_;
};

namespace detail {

[[noreturn]] inline void mismatch(const std::string& what) { throw codec_error(errc::type_mismatch, what); }

inline bool has_structured_form(std::uint16_t type) noexcept
{
    return carries_names(type) || type == rr_type::a || type == rr_type::aaaa;
}

class cbor_writer {
public:
    explicit cbor_writer(const codec_context& ctx)
        : ctx_(ctx)
    {
    }

    // Appends the items that make up `n` to `out`.
    void put_name(std::vector<cbor::item>& out, const name& n)
    {
        if (!ctx_.mode.component_ref()) {
            out.push_back(cbor::text(n.to_text()));
            return;
        }
        if (n.is_root()) {
            out.push_back(cbor::text(""));
            index_.skip();
            return;
        }
        auto p = index_.lookup_longest_suffix(n.labels());
        for (std::size_t i = 0; i < p.literal_count; ++i)
            out.push_back(cbor::text(escape_label(n.labels()[i])));
        if (p.ref)
            out.push_back(cbor::tag(ctx_.mode.ref_tag, cbor::uinteger(*p.ref)));
        index_.register_name(n.labels(), p);
    }

    // A name nested inside SOA/MX/SRV rdata arrays.
    cbor::item nested_name(const name& n)
    {
        std::vector<cbor::item> parts;
        put_name(parts, n);
        if (!ctx_.mode.component_ref())
            return std::move(parts.front());
        return cbor::arr(std::move(parts));
    }

    cbor::item question_item(const question& q)
    {
        std::vector<cbor::item> out;
        put_name(out, q.name);
        if (q.cls != class_in) {
            out.push_back(cbor::uinteger(q.type));
            out.push_back(cbor::uinteger(q.cls));
        } else if (q.type != rr_type::aaaa) {
            out.push_back(cbor::uinteger(q.type));
        }
        return cbor::arr(std::move(out));
    }

    void put_rdata(std::vector<cbor::item>& out, const resource_record& rr)
    {
        if (ctx_.structured_rdata && carries_names(rr.type)) {
            auto parsed = parse_name_rdata(rr.type, rr.rdata);
            if (auto* n = std::get_if<name>(&parsed)) {
                put_name(out, *n);
                return;
            }
            if (auto* soa = std::get_if<soa_rdata>(&parsed)) {
                std::vector<cbor::item> a;
                a.push_back(nested_name(soa->mname));
                a.push_back(nested_name(soa->rname));
                for (auto v : {soa->serial, soa->refresh, soa->retry, soa->expire, soa->minimum})
                    a.push_back(cbor::uinteger(v));
                out.push_back(cbor::arr(std::move(a)));
                return;
            }
            if (auto* mx = std::get_if<mx_rdata>(&parsed)) {
                std::vector<cbor::item> a;
                a.push_back(cbor::uinteger(mx->preference));
                a.push_back(nested_name(mx->exchange));
                out.push_back(cbor::arr(std::move(a)));
                return;
            }
            if (auto* srv = std::get_if<srv_rdata>(&parsed)) {
                std::vector<cbor::item> a;
                for (auto v : {srv->priority, srv->weight, srv->port})
                    a.push_back(cbor::uinteger(v));
                a.push_back(nested_name(srv->target));
                out.push_back(cbor::arr(std::move(a)));
                return;
            }
        }
        out.push_back(cbor::bstr(rr.rdata));
    }

    cbor::item record_item(const resource_record& rr, const name& question_name, bool question_emitted)
    {
        std::vector<cbor::item> out;
        // Under component referencing an emitted question makes the owner
        // a one-reference name instead of an elided one.
        bool elide = rr.name == question_name && !(ctx_.mode.component_ref() && question_emitted);
        if (!elide)
            put_name(out, rr.name);
        out.push_back(cbor::uinteger(rr.ttl));
        out.push_back(cbor::uinteger(rr.type));
        put_rdata(out, rr);
        if (rr.cls != class_in)
            out.push_back(cbor::uinteger(rr.cls));
        return cbor::arr(std::move(out));
    }

    cbor::item section_item(const std::vector<resource_record>& rrs, const name& qname, bool question_emitted)
    {
        std::vector<cbor::item> out;
        out.reserve(rrs.size());
        for (const auto& rr : rrs)
            out.push_back(record_item(rr, qname, question_emitted));
        return cbor::arr(std::move(out));
    }

private:
    const codec_context& ctx_;
    component_index index_;
};

class cbor_reader {
public:
    explicit cbor_reader(const codec_context& ctx)
        : ctx_(ctx)
    {
    }

    bool starts_name(const cbor::item& it) const
    {
        if (it.is<cbor::text_string>())
            return true;
        auto* t = it.get_if<cbor::tagged>();
        return t && ctx_.mode.component_ref() && t->number == ctx_.mode.ref_tag;
    }

    // Reads a name starting at items[pos], advancing pos past it.
    name get_name(const std::vector<cbor::item>& items, std::size_t& pos)
    {
        if (pos >= items.size() || !starts_name(items[pos]))
            mismatch("expected a name");
        if (!ctx_.mode.component_ref()) {
            const auto& s = items[pos++].as<cbor::text_string>().data;
            return name::from_text(s);
        }
        const auto limit = resolved_.size();
        std::vector<std::string> literals;
        std::vector<std::string> tail;
        bool root = false;
        while (pos < items.size()) {
            const auto& it = items[pos];
            if (auto* s = it.get_if<cbor::text_string>()) {
                ++pos;
                if (s->data.empty()) {
                    if (!literals.empty())
                        mismatch("empty label inside a name");
                    root = true;
                    break;
                }
                auto parsed = name::from_text(s->data);
                if (parsed.size() != 1)
                    mismatch("component is not a single label");
                literals.push_back(parsed.labels().front());
                continue;
            }
            auto* t = it.get_if<cbor::tagged>();
            if (t && t->number == ctx_.mode.ref_tag) {
                ++pos;
                auto* idx = t->content->get_if<cbor::unsigned_int>();
                if (!idx)
                    mismatch("reference content must be an unsigned integer");
                if (idx->value >= limit)
                    throw codec_error(errc::bad_reference, "reference " + std::to_string(idx->value) + " with "
                            + std::to_string(limit) + " components seen");
                tail = resolved_[idx->value];
            }
            break;
        }
        if (root) {
            resolved_.emplace_back();
            return name{};
        }
        std::vector<std::string> full = literals;
        full.insert(full.end(), tail.begin(), tail.end());
        name out(full); // validates lengths
        for (std::size_t i = 0; i < literals.size(); ++i)
            resolved_.emplace_back(full.begin() + static_cast<std::ptrdiff_t>(i), full.end());
        return out;
    }

    name nested_name(const cbor::item& it)
    {
        if (!ctx_.mode.component_ref()) {
            auto* s = it.get_if<cbor::text_string>();
            if (!s)
                mismatch("expected a name string");
            return name::from_text(s->data);
        }
        auto* a = it.get_if<cbor::array>();
        if (!a)
            mismatch("expected a name component array");
        std::size_t pos = 0;
        auto n = get_name(a->items, pos);
        if (pos != a->items.size())
            mismatch("trailing items after a nested name");
        return n;
    }

    static std::uint64_t get_uint(const std::vector<cbor::item>& items, std::size_t& pos, std::uint64_t max)
    {
        if (pos >= items.size())
            mismatch("missing integer field");
        auto* u = items[pos].get_if<cbor::unsigned_int>();
        if (!u || u->value > max)
            mismatch("expected an unsigned integer up to " + std::to_string(max));
        ++pos;
        return u->value;
    }

    question question_from(const cbor::item& it)
    {
        auto* a = it.get_if<cbor::array>();
        if (!a)
            mismatch("question must be an array");
        std::size_t pos = 0;
        question q;
        q.name = get_name(a->items, pos);
        auto rest = a->items.size() - pos;
        if (rest == 0) {
            q.type = rr_type::aaaa;
        } else if (rest == 1) {
            q.type = static_cast<std::uint16_t>(get_uint(a->items, pos, 0xffff));
        } else if (rest == 2) {
            q.type = static_cast<std::uint16_t>(get_uint(a->items, pos, 0xffff));
            q.cls = static_cast<std::uint16_t>(get_uint(a->items, pos, 0xffff));
        } else {
            mismatch("question array too long");
        }
        return q;
    }

    bytes rdata_from(const std::vector<cbor::item>& items, std::size_t& pos, std::uint16_t type)
    {
        if (pos >= items.size())
            mismatch("missing rdata");
        if (auto* b = items[pos].get_if<cbor::byte_string>()) {
            ++pos;
            return b->data;
        }
        switch (type) {
        case rr_type::cname:
        case rr_type::ns:
        case rr_type::ptr:
            return serialize_name_rdata(get_name(items, pos));
        case rr_type::soa: {
            auto* a = items[pos++].get_if<cbor::array>();
            if (!a || a->items.size() != 7)
                mismatch("SOA rdata must be a 7-element array");
            soa_rdata soa;
            soa.mname = nested_name(a->items[0]);
            soa.rname = nested_name(a->items[1]);
            std::size_t p = 2;
            for (auto* f : {&soa.serial, &soa.refresh, &soa.retry, &soa.expire, &soa.minimum})
                *f = static_cast<std::uint32_t>(get_uint(a->items, p, 0xffffffff));
            return serialize_name_rdata(soa);
        }
        case rr_type::mx: {
            auto* a = items[pos++].get_if<cbor::array>();
            if (!a || a->items.size() != 2)
                mismatch("MX rdata must be a 2-element array");
            std::size_t p = 0;
            mx_rdata mx;
            mx.preference = static_cast<std::uint16_t>(get_uint(a->items, p, 0xffff));
            mx.exchange = nested_name(a->items[1]);
            return serialize_name_rdata(mx);
        }
        case rr_type::srv: {
            auto* a = items[pos++].get_if<cbor::array>();
            if (!a || a->items.size() != 4)
                mismatch("SRV rdata must be a 4-element array");
            std::size_t p = 0;
            srv_rdata srv;
            for (auto* f : {&srv.priority, &srv.weight, &srv.port})
                *f = static_cast<std::uint16_t>(get_uint(a->items, p, 0xffff));
            srv.target = nested_name(a->items[3]);
            return serialize_name_rdata(srv);
        }
        default:
            mismatch("rdata of type " + std::to_string(type) + " must be a byte string");
        }
    }

    resource_record record_from(const cbor::item& it, const name& question_name)
    {
        auto* a = it.get_if<cbor::array>();
        if (!a)
            mismatch("record must be an array");
        const auto& items = a->items;
        std::size_t pos = 0;
        resource_record rr;
        if (!items.empty() && items[0].is<cbor::unsigned_int>())
            rr.name = question_name;
        else
            rr.name = get_name(items, pos);
        rr.ttl = static_cast<std::uint32_t>(get_uint(items, pos, 0xffffffff));
        rr.type = static_cast<std::uint16_t>(get_uint(items, pos, 0xffff));
        rr.rdata = rdata_from(items, pos, rr.type);
        if (rr.rdata.size() > 0xffff)
            mismatch("rdata longer than 65535 bytes");
        if (pos < items.size())
            rr.cls = static_cast<std::uint16_t>(get_uint(items, pos, 0xffff));
        if (pos != items.size())
            mismatch("record array too long");
        return rr;
    }

    std::vector<resource_record> section_from(const cbor::item& it, const name& qname)
    {
        std::vector<resource_record> out;
        for (const auto& rr : it.as<cbor::array>().items)
            out.push_back(record_from(rr, qname));
        return out;
    }

private:
    const codec_context& ctx_;
    std::vector<std::vector<std::string>> resolved_; // suffix starting at each component
};

inline bool is_section(const cbor::item& it)
{
    auto* a = it.get_if<cbor::array>();
    return a && (a->items.empty() || a->items.front().is<cbor::array>());
}

} // namespace detail

/// Builds the CBOR item for `msg`. The DNS id is not carried.
inline cbor::item to_item(const message& msg, const codec_context& ctx, encode_report* report = nullptr)
{
    if (msg.questions.size() != 1)
        throw codec_error(errc::multi_question, std::to_string(msg.questions.size()) + " questions");
    const auto& q = msg.questions.front();
    detail::cbor_writer w(ctx);
    std::vector<cbor::item> outer;
    if (msg.flags != ctx.default_flags())
        outer.push_back(cbor::uinteger(msg.flags));

    bool emit_question = ctx.role == role::query || !ctx.request_question || !(*ctx.request_question == q);
    if (emit_question)
        outer.push_back(w.question_item(q));

    const bool has_auth = !msg.authority.empty();
    const bool has_add = !msg.additional.empty();
    if (ctx.role == role::response) {
        outer.push_back(w.section_item(msg.answers, q.name, emit_question));
        if (has_auth)
            outer.push_back(w.section_item(msg.authority, q.name, emit_question));
        if (has_auth || has_add)
            outer.push_back(w.section_item(msg.additional, q.name, emit_question));
    } else {
        bool answers = !msg.answers.empty() && ctx.allow_query_answers;
        if (!msg.answers.empty() && !ctx.allow_query_answers && report)
            report->dropped_query_answers = true;
        if (answers)
            outer.push_back(w.section_item(msg.answers, q.name, emit_question));
        if (answers || has_auth)
            outer.push_back(w.section_item(msg.authority, q.name, emit_question));
        if (answers || has_auth || has_add)
            outer.push_back(w.section_item(msg.additional, q.name, emit_question));
    }
    return cbor::arr(std::move(outer));
}

inline bytes encode_message(const message& msg, const codec_context& ctx, encode_report* report = nullptr)
{
    return cbor::encode(to_item(msg, ctx, report));
}

/// Inverse of to_item under the same context. The id of the result is 0.
inline message from_item(const cbor::item& it, const codec_context& ctx)
{
    auto* outer = it.get_if<cbor::array>();
    if (!outer)
        detail::mismatch("message must be an array");
    if (outer->items.empty())
        detail::mismatch("empty message array");
    const auto& items = outer->items;
    detail::cbor_reader r(ctx);
    message m;
    std::size_t pos = 0;
    m.flags = ctx.default_flags();
    if (items[pos].is<cbor::unsigned_int>())
        m.flags = static_cast<std::uint16_t>(detail::cbor_reader::get_uint(items, pos, 0xffff));

    if (pos < items.size() && !detail::is_section(items[pos])) {
        m.questions.push_back(r.question_from(items[pos++]));
    } else if (ctx.role == role::response && ctx.request_question) {
        m.questions.push_back(*ctx.request_question);
    } else if (ctx.role == role::response) {
        throw codec_error(errc::missing_question_context, "response elides its question and none was supplied");
    } else {
        detail::mismatch("query without a question");
    }
    const auto& qname = m.questions.front().name;

    std::vector<const cbor::item*> sections;
    for (; pos < items.size(); ++pos) {
        if (!detail::is_section(items[pos]))
            detail::mismatch("expected a section array");
        sections.push_back(&items[pos]);
    }
    std::vector<std::vector<resource_record>*> targets;
    if (ctx.role == role::response) {
        switch (sections.size()) {
        case 0: break;
        case 1: targets = {&m.answers}; break;
        case 2: targets = {&m.answers, &m.additional}; break;
        case 3: targets = {&m.answers, &m.authority, &m.additional}; break;
        default: detail::mismatch("too many sections");
        }
    } else {
        switch (sections.size()) {
        case 0: break;
        case 1: targets = {&m.additional}; break;
        case 2: targets = {&m.authority, &m.additional}; break;
        case 3:
            if (!ctx.allow_query_answers)
                detail::mismatch("query carries an answer section");
            targets = {&m.answers, &m.authority, &m.additional};
            break;
        default: detail::mismatch("too many sections");
        }
    }
    for (std::size_t i = 0; i < sections.size(); ++i)
        *targets[i] = r.section_from(*sections[i], qname);
    return m;
}

inline message decode_message(std::span<const std::uint8_t> data, const codec_context& ctx)
{
    return from_item(cbor::decode_all(data), ctx);
}

} // namespace cbordns::dns
