#include <doctest.h>

#include <algorithm>
#include <map>

#include "aprifire/apriori.hpp"
#include "aprifire/oracle.hpp"
#include "helpers.hpp"

using namespace aprifire;
using testing::iset;
using testing::make_db;
using testing::worked_db;

namespace {

std::map<Itemset, std::uint64_t> as_map(
    const std::vector<FrequentItemset>& sets) {
    std::map<Itemset, std::uint64_t> out;
    for (const FrequentItemset& f : sets) out[f.itemset] = f.support_count;
    return out;
}

}  // namespace

TEST_CASE("support threshold resolution") {
    CHECK(SupportThreshold::count(2).resolve(100) == 2);
    CHECK(SupportThreshold::count(2).resolve(0) == 2);
    // ceiling semantics, exact at 6-decimal resolution
    CHECK(SupportThreshold::fraction(0.5).resolve(4) == 2);
    CHECK(SupportThreshold::fraction(0.5).resolve(5) == 3);
    CHECK(SupportThreshold::fraction(0.1).resolve(30) == 3);
    CHECK(SupportThreshold::fraction(0.7).resolve(10) == 7);
    CHECK(SupportThreshold::fraction(1.0).resolve(7) == 7);
    CHECK(SupportThreshold::fraction(0.000001).resolve(100) == 1);

    CHECK_THROWS_AS(SupportThreshold::count(0), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::fraction(0.0), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::fraction(1.5), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::fraction(-0.1), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::fraction(0.5).resolve(0),
                    EmptyDatabaseError);
}

TEST_CASE("support threshold parsing") {
    CHECK(SupportThreshold::parse("0.25").resolve(8) == 2);
    CHECK(SupportThreshold::parse("25c").resolve(8) == 25);
    CHECK_FALSE(SupportThreshold::parse("25c").is_fraction());
    CHECK(SupportThreshold::parse("0.25").is_fraction());
    CHECK_THROWS_AS(SupportThreshold::parse("1.5"), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::parse("abc"), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::parse("12x"), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::parse(""), ConfigError);
    CHECK_THROWS_AS(SupportThreshold::parse("0c"), ConfigError);
}

TEST_CASE("frequent 1-itemsets over the worked database") {
    TransactionDatabase db = worked_db();

    // oracle first: the brute-force answer for single items at eps=2
    auto oracle = brute_force_frequent_itemsets(db, 2);
    std::map<Itemset, std::uint64_t> oracle_singles;
    for (const FrequentItemset& f : oracle) {
        if (f.itemset.size() == 1) oracle_singles[f.itemset] = f.support_count;
    }

    auto l1 = find_frequent_1_itemsets(db, SupportThreshold::count(2));
    CHECK(as_map(l1) == oracle_singles);
    // frozen expected values: a:3 b:3 c:3
    CHECK(as_map(l1) == std::map<Itemset, std::uint64_t>{
                            {iset({0}), 3}, {iset({1}), 3}, {iset({2}), 3}});
}

TEST_CASE("frequent 1-itemsets edge cases") {
    TransactionDatabase one = make_db(1, {{0}});
    CHECK(find_frequent_1_itemsets(one, SupportThreshold::count(2)).empty());

    TransactionDatabase two = make_db(1, {{0}, {0}});
    auto l1 = find_frequent_1_itemsets(two, SupportThreshold::count(1));
    REQUIRE(l1.size() == 1);
    CHECK(l1[0].itemset == iset({0}));
    CHECK(l1[0].support_count == 2);
    CHECK(l1[0].support_fraction == doctest::Approx(1.0));

    TransactionDatabase empty;
    CHECK_THROWS_AS(
        find_frequent_1_itemsets(empty, SupportThreshold::fraction(0.5)),
        EmptyDatabaseError);
}

TEST_CASE("candidate generation joins and prunes") {
    // L1 = {a, b, c} -> all pairs survive at k=2
    std::vector<Itemset> l1 = {iset({0}), iset({1}), iset({2})};
    auto c2 = generate_candidates(l1);
    CHECK(c2 == std::vector<Itemset>{iset({0, 1}), iset({0, 2}), iset({1, 2})});

    // L2 = {ab, ac, bc} -> C3 = {abc}
    std::vector<Itemset> l2 = {iset({0, 1}), iset({0, 2}), iset({1, 2})};
    auto c3 = generate_candidates(l2);
    CHECK(c3 == std::vector<Itemset>{iset({0, 1, 2})});

    // L2 = {ab, ac} -> abc pruned because bc is missing
    std::vector<Itemset> partial = {iset({0, 1}), iset({0, 2})};
    CHECK(generate_candidates(partial).empty());

    std::vector<Itemset> mixed = {iset({0}), iset({1, 2})};
    CHECK_THROWS_AS(generate_candidates(mixed), MixedSizesError);
}

TEST_CASE("candidate counting is exact") {
    TransactionDatabase db = worked_db();
    CandidateStore store({iset({0, 1}), iset({0, 2}), iset({1, 2})}, 2);
    count_support(store, db);
    CHECK(store.candidate_count() == 3);
    for (std::size_t i = 0; i < store.candidate_count(); ++i) {
        CHECK(store.count_of(i) == 2);
        CHECK(store.count_of(i) == support_of(store.candidate(i), db));
    }

    TransactionDatabase empty;
    CandidateStore untouched({iset({0, 1})}, 2);
    count_support(untouched, empty);
    CHECK(untouched.count_of(0) == 0);

    // superset containment
    TransactionDatabase wide = make_db(4, {{0, 1, 2, 3}});
    CandidateStore triple({iset({0, 1, 2})}, 3);
    count_support(triple, wide);
    CHECK(triple.count_of(0) == 1);
}

TEST_CASE("mine reproduces the worked example") {
    TransactionDatabase db = worked_db();
    auto mined = mine(db, SupportThreshold::count(2));

    // frozen from the brute-force oracle over all 2^3-1 itemsets
    std::map<Itemset, std::uint64_t> expected = {
        {iset({0}), 3},    {iset({1}), 3},    {iset({2}), 3},
        {iset({0, 1}), 2}, {iset({0, 2}), 2}, {iset({1, 2}), 2},
    };
    CHECK(as_map(mined) == expected);

    auto oracle = brute_force_frequent_itemsets(db, 2);
    CHECK(mined == oracle);

    // abc has count 1 and must be absent
    for (const FrequentItemset& f : mined) {
        CHECK(f.itemset != iset({0, 1, 2}));
    }
}

TEST_CASE("mine: single transaction yields its power set at eps=1") {
    TransactionDatabase db = make_db(3, {{0, 1, 2}});
    auto mined = mine(db, SupportThreshold::count(1));
    CHECK(mined.size() == 7);
    for (const FrequentItemset& f : mined) {
        CHECK(f.support_count == 1);
        CHECK(f.support_fraction == doctest::Approx(1.0));
    }
}

TEST_CASE("mine: unattainable threshold yields nothing") {
    TransactionDatabase db = worked_db();
    CHECK(mine(db, SupportThreshold::count(5)).empty());
}

TEST_CASE("mine honors the max itemset size cap") {
    TransactionDatabase db = make_db(3, {{0, 1, 2}});
    auto capped = mine(db, SupportThreshold::count(1), {1, 2});
    for (const FrequentItemset& f : capped) {
        CHECK(f.itemset.size() <= 2);
    }
    CHECK(capped.size() == 6);
}

TEST_CASE("support_of counts containment directly") {
    TransactionDatabase db = worked_db();
    CHECK(support_of(iset({0}), db) == 3);
    CHECK(support_of(Itemset{}, db) == db.size());
    // interned but never used in a transaction
    db.catalog.intern(AttributeKind::DstIp, "10.0.0.200");
    CHECK(support_of(iset({3}), db) == 0);
}

TEST_CASE("mine output ordering is (size, lexicographic)") {
    TransactionDatabase db = worked_db();
    auto mined = mine(db, SupportThreshold::count(2));
    for (std::size_t i = 1; i < mined.size(); ++i) {
        bool ordered =
            mined[i - 1].itemset.size() < mined[i].itemset.size() ||
            (mined[i - 1].itemset.size() == mined[i].itemset.size() &&
             mined[i - 1].itemset < mined[i].itemset);
        CHECK(ordered);
    }
}

TEST_CASE("property: mine equals the brute-force oracle") {
    Xoshiro256 rng(101);
    for (int round = 0; round < 60; ++round) {
        TransactionDatabase db = testing::random_db(rng, 10, 60);
        std::uint64_t eps = 1 + rng.next_below(db.size());
        auto mined = mine(db, SupportThreshold::count(eps));
        auto oracle = brute_force_frequent_itemsets(db, eps);
        REQUIRE(mined == oracle);
    }
}

TEST_CASE("property: anti-monotonicity of reported itemsets") {
    Xoshiro256 rng(202);
    for (int round = 0; round < 30; ++round) {
        TransactionDatabase db = testing::random_db(rng, 10, 60);
        std::uint64_t eps = 1 + rng.next_below(db.size());
        auto mined = mine(db, SupportThreshold::count(eps));
        auto by_set = as_map(mined);
        for (const FrequentItemset& f : mined) {
            auto ids = f.itemset.items();
            std::size_t m = ids.size();
            for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
                std::vector<ItemId> sub;
                for (std::size_t i = 0; i < m; ++i) {
                    if (mask & (1u << i)) sub.push_back(ids[i]);
                }
                auto it = by_set.find(Itemset::from_sorted(std::move(sub)));
                REQUIRE(it != by_set.end());
                REQUIRE(it->second >= f.support_count);
            }
        }
    }
}

TEST_CASE("property: reported counts match independent recounting") {
    Xoshiro256 rng(303);
    for (int round = 0; round < 20; ++round) {
        TransactionDatabase db = testing::random_db(rng, 10, 60);
        std::uint64_t eps = 1 + rng.next_below(db.size());
        for (const FrequentItemset& f : mine(db, SupportThreshold::count(eps))) {
            REQUIRE(f.support_count == support_of(f.itemset, db));
        }
    }
}

TEST_CASE("property: counting parallelism does not change results") {
    Xoshiro256 rng(404);
    for (int round = 0; round < 10; ++round) {
        TransactionDatabase db = testing::random_db(rng, 10, 120);
        std::uint64_t eps = 1 + rng.next_below(db.size() / 2 + 1);
        auto sequential = mine(db, SupportThreshold::count(eps), {1, 0});
        auto parallel = mine(db, SupportThreshold::count(eps), {4, 0});
        REQUIRE(sequential == parallel);
    }
}

TEST_CASE("property: raising the threshold only shrinks the result") {
    Xoshiro256 rng(505);
    for (int round = 0; round < 20; ++round) {
        TransactionDatabase db = testing::random_db(rng, 10, 60);
        std::uint64_t eps1 = 1 + rng.next_below(db.size());
        std::uint64_t eps2 = eps1 + rng.next_below(db.size());
        auto low = as_map(mine(db, SupportThreshold::count(eps1)));
        auto high = mine(db, SupportThreshold::count(eps2));
        for (const FrequentItemset& f : high) {
            auto it = low.find(f.itemset);
            REQUIRE(it != low.end());
            REQUIRE(it->second == f.support_count);
        }
    }
}

TEST_CASE("frequent itemset dump format") {
    TransactionDatabase db = worked_db();
    auto mined = mine(db, SupportThreshold::count(2));
    std::string dump = render_frequent_itemsets(mined, db.catalog);
    CHECK(dump ==
          "dst_ip=10.0.0.1\t3\t0.750000\n"
          "dst_ip=10.0.0.2\t3\t0.750000\n"
          "dst_ip=10.0.0.3\t3\t0.750000\n"
          "dst_ip=10.0.0.1,dst_ip=10.0.0.2\t2\t0.500000\n"
          "dst_ip=10.0.0.1,dst_ip=10.0.0.3\t2\t0.500000\n"
          "dst_ip=10.0.0.2,dst_ip=10.0.0.3\t2\t0.500000\n");
}
