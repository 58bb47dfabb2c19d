#pragma once

// Packed envelope: a table of shared values prepended to the item, with the
// item itself ("rump") pointing into it through value, suffix and prefix
// references. Packed Lite restricts the table to text suffixes.

#include <cbordns/cbor.hpp>
#include <cbordns/error.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace cbordns::packed {

enum class pack_mode { full, lite };

/// Tag numbers are defaults, not final registrations.
struct packed_options {
    std::uint64_t envelope_tag = 113;
    std::uint64_t value_tag = 6;    // Tag(6, k): table[16 + k]
    std::uint64_t suffix_tag = 216; // Tag(216, [head, i]): head ++ table[i]
    std::uint64_t prefix_tag = 217; // Tag(217, [i, tail]): table[i] ++ tail
};

/// Simple(i) below this is a value reference.
inline constexpr std::uint64_t simple_refs = 16;

namespace detail {

using cbor::item;

enum class ref_kind : std::uint8_t { value, suffix, prefix };

struct occurrence {
    std::size_t leaf = 0;
    ref_kind kind = ref_kind::value;
    std::size_t split = 0; // head length (suffix) or prefix length
};

struct candidate {
    item entry;
    std::size_t entry_size = 0;
    std::vector<occurrence> occs;
    std::size_t first = 0;
};

struct leaf {
    item* node = nullptr;
    std::size_t size = 0;
};

inline std::size_t value_ref_size(const packed_options& o, std::uint64_t i)
{
    return i < simple_refs ? 1 : cbor::head_size(o.value_tag) + cbor::head_size(i - simple_refs);
}

inline std::size_t str_size(std::size_t len) { return cbor::head_size(len) + len; }

class packer {
public:
    packer(item root, pack_mode mode, const packed_options& opts)
        : root_(std::move(root))
        , mode_(mode)
        , opts_(opts)
    {
        collect(root_);
        build_candidates();
    }

    item run()
    {
        admit();
        rewrite();
        return cbor::tag(opts_.envelope_tag, cbor::arr({cbor::arr(std::move(table_)), std::move(root_)}));
    }

private:
    void collect(item& it)
    {
        if (auto* s = it.get_if<cbor::simple>(); s && s->value < simple_refs)
            throw codec_error(errc::already_packed, "simple value " + std::to_string(s->value));
        if (auto* t = it.get_if<cbor::tagged>()) {
            for (auto n : {opts_.envelope_tag, opts_.value_tag, opts_.suffix_tag, opts_.prefix_tag})
                if (t->number == n)
                    throw codec_error(errc::already_packed, "tag " + std::to_string(n));
            collect(*t->content);
        } else if (auto* a = it.get_if<cbor::array>()) {
            for (auto& i : a->items)
                collect(i);
        } else if (auto* m = it.get_if<cbor::map>()) {
            for (auto& [k, v] : m->entries) {
                collect(k);
                collect(v);
            }
        } else if (it.is<cbor::text_string>() || it.is<cbor::byte_string>() || it.is<cbor::unsigned_int>()
            || it.is<cbor::negative_int>()) {
            leaves_.push_back({&it, cbor::item_size(it)});
        }
    }

    void add(const item& entry, occurrence occ)
    {
        auto key = cbor::encode(entry);
        auto [it, inserted] = cands_.try_emplace(key);
        if (inserted) {
            it->second.entry = entry;
            it->second.entry_size = key.size();
            it->second.first = occ.leaf;
        }
        it->second.occs.push_back(occ);
    }

    void build_candidates()
    {
        std::map<bytes, std::vector<std::size_t>> byte_values;
        for (std::size_t i = 0; i < leaves_.size(); ++i) {
            const auto& node = *leaves_[i].node;
            if (auto* t = node.get_if<cbor::text_string>()) {
                const auto& s = t->data;
                // whole string, then every suffix that starts after a '.'
                for (std::size_t p = 0;;) {
                    add(cbor::text(s.substr(p)), {i, p == 0 ? ref_kind::value : ref_kind::suffix, p});
                    auto dot = s.find('.', p);
                    if (dot == std::string::npos || dot + 1 >= s.size())
                        break;
                    p = dot + 1;
                }
                continue;
            }
            if (mode_ == pack_mode::lite)
                continue;
            if (leaves_[i].size >= 2)
                add(node, {i, ref_kind::value, 0});
            if (auto* b = node.get_if<cbor::byte_string>())
                byte_values[b->data].push_back(i);
        }

        if (mode_ == pack_mode::full && byte_values.size() > 1) {
            std::vector<const bytes*> sorted;
            for (const auto& [k, v] : byte_values)
                sorted.push_back(&k);
            std::set<bytes> prefixes;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                const auto& a = *sorted[i];
                const auto& b = *sorted[i + 1];
                auto lcp = static_cast<std::size_t>(
                    std::mismatch(a.begin(), a.end(), b.begin(), b.end()).first - a.begin());
                if (lcp >= 3)
                    prefixes.emplace(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(lcp));
            }
            for (const auto& p : prefixes) {
                item entry = cbor::bstr(p);
                for (auto it = byte_values.lower_bound(p);
                     it != byte_values.end() && it->first.size() >= p.size()
                     && std::equal(p.begin(), p.end(), it->first.begin());
                     ++it) {
                    if (it->first.size() == p.size())
                        continue; // exact matches already are value occurrences of this entry
                    for (auto leaf : it->second)
                        add(entry, {leaf, ref_kind::prefix, p.size()});
                }
            }
        }

        for (auto it = cands_.begin(); it != cands_.end();) {
            std::set<std::size_t> distinct;
            for (const auto& o : it->second.occs)
                distinct.insert(o.leaf);
            if (distinct.size() < 2) {
                it = cands_.erase(it);
            } else {
                it->second.first = *distinct.begin();
                ++it;
            }
        }
    }

    std::size_t ref_size(const occurrence& o, std::uint64_t index) const
    {
        const auto& node = *leaves_[o.leaf].node;
        switch (o.kind) {
        case ref_kind::value:
            return value_ref_size(opts_, index);
        case ref_kind::suffix:
            return cbor::head_size(opts_.suffix_tag) + 1 + str_size(o.split) + cbor::head_size(index);
        case ref_kind::prefix:
            return cbor::head_size(opts_.prefix_tag) + 1 + cbor::head_size(index)
                + str_size(node.as<cbor::byte_string>().data.size() - o.split);
        }
        return 0;
    }

    std::int64_t net_saving(const candidate& c, std::uint64_t index) const
    {
        std::int64_t total = 0;
        for (const auto& o : c.occs) {
            if (claimed_[o.leaf])
                continue;
            auto before = static_cast<std::int64_t>(leaves_[o.leaf].size);
            auto after = static_cast<std::int64_t>(ref_size(o, index));
            if (before > after)
                total += before - after;
        }
        return total - static_cast<std::int64_t>(c.entry_size);
    }

    void admit()
    {
        claimed_.assign(leaves_.size(), false);
        plan_.assign(leaves_.size(), std::nullopt);
        std::vector<candidate*> open;
        for (auto& [k, c] : cands_)
            open.push_back(&c);
        std::stable_sort(open.begin(), open.end(), [](auto* a, auto* b) { return a->first < b->first; });

        while (!open.empty()) {
            const std::uint64_t index = table_.size();
            std::int64_t best = 0;
            std::size_t best_pos = open.size();
            for (std::size_t i = 0; i < open.size(); ++i) {
                auto s = net_saving(*open[i], index);
                if (s > best) {
                    best = s;
                    best_pos = i;
                }
            }
            if (best_pos == open.size())
                break;
            candidate& c = *open[best_pos];
            for (const auto& o : c.occs) {
                if (claimed_[o.leaf] || leaves_[o.leaf].size <= ref_size(o, index))
                    continue;
                claimed_[o.leaf] = true;
                plan_[o.leaf] = std::pair{o, index};
            }
            table_.push_back(c.entry);
            open.erase(open.begin() + static_cast<std::ptrdiff_t>(best_pos));
        }
    }

    void rewrite()
    {
        for (std::size_t i = 0; i < leaves_.size(); ++i) {
            if (!plan_[i])
                continue;
            auto [o, index] = *plan_[i];
            item& node = *leaves_[i].node;
            switch (o.kind) {
            case ref_kind::value:
                node = index < simple_refs ? item(cbor::simple{static_cast<std::uint8_t>(index)})
                                           : cbor::tag(opts_.value_tag, cbor::uinteger(index - simple_refs));
                break;
            case ref_kind::suffix: {
                auto head = node.as<cbor::text_string>().data.substr(0, o.split);
                node = cbor::tag(opts_.suffix_tag, cbor::arr({cbor::text(std::move(head)), cbor::uinteger(index)}));
                break;
            }
            case ref_kind::prefix: {
                const auto& data = node.as<cbor::byte_string>().data;
                bytes tail(data.begin() + static_cast<std::ptrdiff_t>(o.split), data.end());
                node = cbor::tag(opts_.prefix_tag, cbor::arr({cbor::uinteger(index), cbor::bstr(std::move(tail))}));
                break;
            }
            }
        }
    }

    item root_;
    pack_mode mode_;
    packed_options opts_;
    std::vector<leaf> leaves_;
    std::map<bytes, candidate> cands_;
    std::vector<bool> claimed_;
    std::vector<std::optional<std::pair<occurrence, std::uint64_t>>> plan_;
    std::vector<item> table_;
};

class unpacker {
public:
    explicit unpacker(const packed_options& opts)
        : opts_(opts)
    {
    }

    item run(const item& env)
    {
        auto* t = env.get_if<cbor::tagged>();
        if (!t || t->number != opts_.envelope_tag)
            throw codec_error(errc::type_mismatch, "not a packed envelope");
        auto* a = t->content->get_if<cbor::array>();
        if (!a || a->items.size() != 2 || !a->items[0].is<cbor::array>())
            throw codec_error(errc::type_mismatch, "envelope must hold [table, rump]");
        const auto& entries = a->items[0].as<cbor::array>().items;
        for (const auto& e : entries) {
            limit_ = table_.size();
            table_.push_back(resolve(e, entries.size()));
        }
        limit_ = table_.size();
        return resolve(a->items[1], table_.size());
    }

private:
    const item& lookup(std::uint64_t index, std::size_t table_size) const
    {
        if (index >= table_size)
            throw codec_error(errc::index_out_of_range, "table index " + std::to_string(index));
        if (index >= limit_)
            throw codec_error(errc::forward_reference, "table entry refers to entry " + std::to_string(index));
        return table_[index];
    }

    static const std::vector<item>& pair_of(const cbor::tagged& t)
    {
        auto* a = t.content->get_if<cbor::array>();
        if (!a || a->items.size() != 2)
            throw codec_error(errc::type_mismatch, "reference content must be a 2-element array");
        return a->items;
    }

    static std::uint64_t index_of(const item& it)
    {
        auto* u = it.get_if<cbor::unsigned_int>();
        if (!u)
            throw codec_error(errc::type_mismatch, "reference index must be an unsigned integer");
        return u->value;
    }

    item resolve(const item& it, std::size_t table_size) const
    {
        if (auto* s = it.get_if<cbor::simple>(); s && s->value < simple_refs)
            return lookup(s->value, table_size);
        if (auto* t = it.get_if<cbor::tagged>()) {
            if (t->number == opts_.value_tag) {
                auto k = index_of(*t->content);
                if (k > ~std::uint64_t{0} - simple_refs)
                    throw codec_error(errc::index_out_of_range, "value reference overflow");
                return lookup(k + simple_refs, table_size);
            }
            if (t->number == opts_.suffix_tag) {
                const auto& p = pair_of(*t);
                auto* head = p[0].get_if<cbor::text_string>();
                if (!head)
                    throw codec_error(errc::type_mismatch, "suffix reference head must be text");
                auto* target = lookup(index_of(p[1]), table_size).get_if<cbor::text_string>();
                if (!target)
                    throw codec_error(errc::type_mismatch, "suffix reference to a non-text entry");
                return cbor::text(head->data + target->data);
            }
            if (t->number == opts_.prefix_tag) {
                const auto& p = pair_of(*t);
                auto* tail = p[1].get_if<cbor::byte_string>();
                if (!tail)
                    throw codec_error(errc::type_mismatch, "prefix reference tail must be bytes");
                auto* target = lookup(index_of(p[0]), table_size).get_if<cbor::byte_string>();
                if (!target)
                    throw codec_error(errc::type_mismatch, "prefix reference to a non-bytes entry");
                bytes out = target->data;
                out.insert(out.end(), tail->data.begin(), tail->data.end());
                return cbor::bstr(std::move(out));
            }
            return cbor::tag(t->number, resolve(*t->content, table_size));
        }
        if (auto* a = it.get_if<cbor::array>()) {
            std::vector<item> out;
            out.reserve(a->items.size());
            for (const auto& i : a->items)
                out.push_back(resolve(i, table_size));
            return cbor::arr(std::move(out));
        }
        if (auto* m = it.get_if<cbor::map>()) {
            std::vector<std::pair<item, item>> out;
            out.reserve(m->entries.size());
            for (const auto& [k, v] : m->entries)
                out.emplace_back(resolve(k, table_size), resolve(v, table_size));
            return cbor::make_map(std::move(out));
        }
        return it;
    }

    packed_options opts_;
    std::vector<item> table_;
    std::size_t limit_ = 0;
};

} // namespace detail

/// Packs `it` into an envelope. Full mode keeps whichever of its own table
/// and the Lite table encodes smaller, so it never loses to Lite.
inline cbor::item pack(const cbor::item& it, pack_mode mode, const packed_options& opts = {})
{
    auto lite = detail::packer(it, pack_mode::lite, opts).run();
    if (mode == pack_mode::lite)
        return lite;
    auto full = detail::packer(it, pack_mode::full, opts).run();
    return cbor::item_size(full) <= cbor::item_size(lite) ? full : lite;
}

inline cbor::item unpack(const cbor::item& env, const packed_options& opts = {})
{
    return detail::unpacker(opts).run(env);
}

} // namespace cbordns::packed
