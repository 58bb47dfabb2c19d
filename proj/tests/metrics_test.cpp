#include <cbordns/metrics.hpp>

#include <gtest/gtest.h>

#include <algorithm>

#include "support/random_items.hpp"

using namespace cbordns;
using namespace cbordns::metrics;

TEST(Savings, Examples)
{
    auto r = compute_savings(100, 80);
    EXPECT_EQ(r.savings, 20);
    EXPECT_DOUBLE_EQ(r.gain, 0.2);

    auto same = compute_savings(37, 37);
    EXPECT_EQ(same.savings, 0);
    EXPECT_DOUBLE_EQ(same.gain, 0.0);

    auto packed = compute_savings(23298, 10214);
    EXPECT_EQ(packed.savings, 13084);
    EXPECT_NEAR(packed.gain, 0.5616, 1e-4);

    auto inflated = compute_savings(50, 75);
    EXPECT_EQ(inflated.savings, -25);
    EXPECT_DOUBLE_EQ(inflated.gain, -0.5);
}

TEST(Savings, ZeroOriginalRejected)
{
    try {
        compute_savings(0, 1);
        FAIL();
    } catch (const codec_error& e) {
        EXPECT_EQ(e.code(), errc::zero_original);
    }
}

TEST(Taxonomy, TierBoundaries)
{
    EXPECT_EQ(tier_for(99), 1);
    EXPECT_EQ(tier_for(100), 2);
    EXPECT_EQ(tier_for(999), 2);
    EXPECT_EQ(tier_for(1000), 3);
    EXPECT_EQ(classify(cbor::uinteger(1), 0).tier, 1);
}

TEST(Taxonomy, SmallMapTieGoesTextual)
{
    auto m = cbor::make_map({{cbor::text("a"), cbor::uinteger(1)}});
    auto rec = classify(m, cbor::item_size(m));
    EXPECT_EQ(rec, (taxonomy_record{1, content_type::textual, redundancy::non_redundant, structure::flat}));
}

TEST(Taxonomy, RepeatedSuffixTextIsRedundant)
{
    std::vector<cbor::item> names(301, cbor::text("cdn.example.n"));
    auto a = cbor::arr(names);
    auto rec = classify(a, cbor::item_size(a));
    EXPECT_EQ(rec.redundancy, redundancy::redundant);
    EXPECT_EQ(rec.content, content_type::textual);
    EXPECT_EQ(rec.tier, 3);
}

TEST(Taxonomy, TrivialDuplicatesDoNotCount)
{
    auto a = cbor::arr({cbor::uinteger(0), cbor::uinteger(0), cbor::boolean_value(true), cbor::boolean_value(true)});
    EXPECT_EQ(classify(a, 5).redundancy, redundancy::non_redundant);
    auto b = cbor::arr({cbor::uinteger(300), cbor::uinteger(300)});
    EXPECT_EQ(classify(b, 7).redundancy, redundancy::redundant);
}

TEST(Taxonomy, PackingReferencesAreTaggy)
{
    auto packed = cbor::tag(113,
        cbor::arr({cbor::arr({cbor::bstr({1, 2, 3})}),
            cbor::arr({cbor::simple_value(0), cbor::simple_value(0), cbor::simple_value(3), cbor::uinteger(9)})}));
    auto rec = classify(packed, cbor::item_size(packed));
    EXPECT_EQ(rec.content, content_type::taggy);
    EXPECT_EQ(rec.structure, structure::nested);
}

TEST(Taxonomy, ContentTypesAndNesting)
{
    auto bin = cbor::arr({cbor::bstr({1}), cbor::bstr({2}), cbor::text("x")});
    EXPECT_EQ(classify(bin, 1).content, content_type::binary);
    auto boo = cbor::arr({cbor::boolean_value(true), cbor::null{}, cbor::undefined{}});
    EXPECT_EQ(classify(boo, 1).content, content_type::boolean);
    auto num = cbor::arr({cbor::float_value(1.5), cbor::integer(-3), cbor::simple_value(40)});
    EXPECT_EQ(classify(num, 1).content, content_type::numeric);
    auto structural = cbor::arr({cbor::arr({}), cbor::make_map({})});
    EXPECT_EQ(classify(structural, 1).content, content_type::structural);
    EXPECT_EQ(classify(structural, 1).structure, structure::nested);
    EXPECT_EQ(classify(cbor::arr({cbor::tag(1, cbor::uinteger(1))}), 1).structure, structure::flat);
    EXPECT_EQ(classify(cbor::arr({cbor::tag(1, cbor::arr({}))}), 1).structure, structure::nested);
}

TEST(TaxonomyProperty, MapOrderDoesNotMatter)
{
    test_support::item_generator gen(41);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::pair<cbor::item, cbor::item>> entries;
        auto n = gen.uniform(1, 6);
        for (std::uint64_t k = 0; k < n; ++k) {
            std::vector<std::pair<cbor::item, cbor::item>> inner;
            auto m = gen.uniform(0, 3);
            for (std::uint64_t j = 0; j < m; ++j)
                inner.emplace_back(gen.any_item(1), gen.any_item(1));
            entries.emplace_back(gen.any_item(1), cbor::make_map(inner));
        }
        auto original = cbor::make_map(entries);
        auto shuffled_entries = entries;
        std::shuffle(shuffled_entries.begin(), shuffled_entries.end(), gen.rng());
        for (auto& [k, v] : shuffled_entries)
            std::shuffle(v.as<cbor::map>().entries.begin(), v.as<cbor::map>().entries.end(), gen.rng());
        auto shuffled = cbor::make_map(shuffled_entries);
        ASSERT_EQ(classify(original, 10), classify(shuffled, 10)) << cbor::to_diagnostic(original);
        ASSERT_EQ(classify(original, 10), classify(original, 10));
    }
}

TEST(TaxonomyProperty, DistinctLeavesAreNonRedundant)
{
    test_support::item_generator gen(43);
    for (int i = 0; i < 500; ++i) {
        std::vector<cbor::item> leaves;
        auto n = gen.uniform(0, 30);
        for (std::uint64_t k = 0; k < n; ++k)
            leaves.push_back(k % 2 ? cbor::uinteger(1000 + k) : cbor::text("leaf-" + std::to_string(k)));
        auto a = cbor::arr(leaves);
        ASSERT_EQ(classify(a, 1).redundancy, redundancy::non_redundant);
    }
}
