#include <algorithm>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "urnnet/error.hpp"
#include "urnnet/graph.hpp"
#include "urnnet/rng.hpp"

using namespace urnnet;

namespace {

Mat from_rows(const std::vector<std::vector<double>>& rows) {
    Mat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    return m;
}

Mat cycle_matrix(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, (i + 1) % n) = 1.0;
    return m;
}

std::vector<std::vector<std::size_t>> support_lists(const Mat& w) {
    std::vector<std::vector<std::size_t>> out(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i)
        for (std::size_t j = 0; j < w.cols; ++j)
            if (i != j && w(i, j) > 0.0) out[i].push_back(j);
    return out;
}

}  // namespace

TEST_CASE("validate_matrix classifies rows and rejects bad input") {
    const Mat good = from_rows({{0.3, 0.3}, {0.2, 0.5}});
    const InteractionMatrix m = validate_matrix(good);
    CHECK(m.n == 2);
    CHECK(m.row_stochastic(0) == false);
    CHECK(m.row_sums[0] == doctest::Approx(0.6));
    CHECK(m.row_kind[1] == RowKind::Substochastic);

    const InteractionMatrix c = validate_matrix(cycle_matrix(3));
    for (std::size_t i = 0; i < 3; ++i) CHECK(c.row_stochastic(i));

    CHECK_THROWS_AS(validate_matrix(Mat(2, 3)), Error);
    Mat neg = cycle_matrix(2);
    neg(0, 0) = -0.1;
    CHECK_THROWS_AS(validate_matrix(neg), Error);
    Mat heavy = cycle_matrix(2);
    heavy(0, 0) = 0.5;  // row sum 1.5
    CHECK_THROWS_AS(validate_matrix(heavy), Error);
    try {
        validate_matrix(heavy);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RowSumExceedsOne);
        CHECK(e.row() == 0);
    }

    // Sums within the tolerance of 1 still count as stochastic.
    Mat close = cycle_matrix(2);
    close(0, 1) = 1.0 - 1e-13;
    CHECK(validate_matrix(close).row_stochastic(0));
}

TEST_CASE("build_graph keeps off-diagonal support only") {
    const Mat a = from_rows({{0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}, {0.0, 0.0, 1.0}});
    const AgentGraph g = build_graph(validate_matrix(a));
    CHECK(g.n == 3);
    CHECK(g.out[0] == std::vector<std::size_t>{1});
    CHECK(g.out[1] == (std::vector<std::size_t>{0, 2}));
    CHECK(g.out[2].empty());  // self weight is not an edge
    CHECK(g.in[2] == std::vector<std::size_t>{1});
    CHECK(g.edge_count() == 3);
}

TEST_CASE("communication classes match the reachability oracle") {
    const Mat two_level = from_rows({{0, 1, 0}, {1, 0, 0}, {0.25, 0.25, 0.5}});
    const auto classes = communication_classes(build_graph(validate_matrix(two_level)));
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].members == (std::vector<std::size_t>{0, 1}));
    CHECK(classes[1].members == std::vector<std::size_t>{2});
    CHECK(classes[0].internal_edges ==
          (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
    CHECK(classes[1].internal_edges.empty());

    Xoshiro256pp rng(23);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 2 + rng.next() % 9;
        const Mat w = oracle::random_reducible(n, rng);
        const auto got = communication_classes(build_graph(validate_matrix(w)));
        const auto want = oracle::scc_partition(w);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(got[k].members == want[k]);
        // Internal edges are exactly the support pairs inside each class.
        for (const auto& cls : got) {
            std::set<std::size_t> inside(cls.members.begin(), cls.members.end());
            std::size_t count = 0;
            for (std::size_t u : cls.members)
                for (std::size_t v : cls.members)
                    if (u != v && w(u, v) > 0.0) ++count;
            CHECK(cls.internal_edges.size() == count);
            for (auto [u, v] : cls.internal_edges) {
                CHECK(inside.count(u) == 1);
                CHECK(inside.count(v) == 1);
                CHECK(w(u, v) > 0.0);
            }
            CHECK(std::is_sorted(cls.internal_edges.begin(), cls.internal_edges.end()));
        }
    }
}

TEST_CASE("bipartiteness and period on known graphs") {
    auto report_of = [](const Mat& m) {
        const auto classes = communication_classes(build_graph(validate_matrix(m)));
        REQUIRE(classes.size() == 1);
        return bipartiteness(classes[0]);
    };

    const auto two = report_of(cycle_matrix(2));
    CHECK(two.is_bipartite);
    CHECK(two.period == 2);
    REQUIRE(two.partition.has_value());
    CHECK(two.partition->first == std::vector<std::size_t>{0});
    CHECK(two.partition->second == std::vector<std::size_t>{1});

    const auto three = report_of(cycle_matrix(3));
    CHECK_FALSE(three.is_bipartite);
    CHECK(three.period == 3);
    CHECK_FALSE(three.partition.has_value());

    const auto four = report_of(cycle_matrix(4));
    CHECK(four.is_bipartite);
    CHECK(four.period == 4);
    REQUIRE(four.partition.has_value());
    CHECK(four.partition->first == (std::vector<std::size_t>{0, 2}));
    CHECK(four.partition->second == (std::vector<std::size_t>{1, 3}));

    Mat chord = cycle_matrix(4);
    chord(0, 2) = 0.5;
    chord(0, 1) = 0.5;
    const auto mixed = report_of(chord);
    CHECK(mixed.period == 1);  // cycle lengths 4 and 3
    CHECK_FALSE(mixed.is_bipartite);

    // Edgeless singleton: period sentinel 0, not bipartite.
    const Mat lone = from_rows({{1.0}});
    const auto classes = communication_classes(build_graph(validate_matrix(lone)));
    REQUIRE(classes.size() == 1);
    const auto solo = bipartiteness(classes[0]);
    CHECK(solo.period == 0);
    CHECK_FALSE(solo.is_bipartite);

    // The diagonal never counts: a bipartite pair with self weights keeps
    // period 2.
    const Mat lazy = from_rows({{0.5, 0.5}, {0.5, 0.5}});
    const auto lazy_rep = report_of(lazy);
    CHECK(lazy_rep.is_bipartite);
    CHECK(lazy_rep.period == 2);
}

TEST_CASE("period equals the simple-cycle gcd and pairs with bipartiteness") {
    Xoshiro256pp rng(31);
    std::size_t checked = 0;
    for (int trial = 0; trial < 260; ++trial) {
        const std::size_t n = 2 + rng.next() % 7;
        Mat w;
        if (trial % 2 == 0) {
            w = oracle::random_scc(n, rng);
        } else {
            const std::size_t ni = 1 + rng.next() % (n - 1);
            w = oracle::random_bipartite(ni, n - ni, rng);
        }
        const auto classes = communication_classes(build_graph(validate_matrix(w)));
        REQUIRE(classes.size() == 1);
        const auto rep = bipartiteness(classes[0]);
        const unsigned want = oracle::simple_cycle_gcd(support_lists(w), n);
        CHECK(rep.period == want);
        CHECK(rep.is_bipartite == (want % 2 == 0));
        CHECK(rep.partition.has_value() == rep.is_bipartite);
        if (rep.partition) {
            // Every internal edge crosses the split.
            std::set<std::size_t> left(rep.partition->first.begin(),
                                       rep.partition->first.end());
            for (auto [u, v] : classes[0].internal_edges)
                CHECK(left.count(u) != left.count(v));
            CHECK(rep.partition->first.front() == classes[0].members.front());
        }
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("hierarchy decomposition on hand-built examples") {
    const Mat flat = cycle_matrix(3);
    const auto one = hierarchy_decomposition(validate_matrix(flat));
    CHECK(one.n_classes() == 1);
    CHECK(one.n_levels() == 1);
    CHECK(one.level_of_class[0] == 0);
    CHECK(one.agent_order == (std::vector<std::size_t>{0, 1, 2}));

    const Mat two_level = from_rows({{0, 1, 0}, {1, 0, 0}, {0.25, 0.25, 0.5}});
    const auto two = hierarchy_decomposition(validate_matrix(two_level));
    REQUIRE(two.n_classes() == 2);
    CHECK(two.n_levels() == 2);
    CHECK(two.classes[0].members == (std::vector<std::size_t>{0, 1}));
    CHECK(two.level_of_class[0] == 0);
    CHECK(two.classes[1].members == std::vector<std::size_t>{2});
    CHECK(two.level_of_class[1] == 1);
    CHECK(two.class_of_agent == (std::vector<std::size_t>{0, 0, 1}));
    const Mat coupling = two.coupling_block(1, 0);
    REQUIRE(coupling.rows == 1);
    REQUIRE(coupling.cols == 2);
    CHECK(coupling(0, 0) == 0.25);
    CHECK(coupling(0, 1) == 0.25);
    const Mat diag = two.diagonal_block(1);
    REQUIRE(diag.rows == 1);
    CHECK(diag(0, 0) == 0.5);

    // A chain of three singletons stacks three levels.
    const Mat chain = from_rows({{1, 0, 0}, {0.5, 0.5, 0}, {0, 0.5, 0.5}});
    const auto deep = hierarchy_decomposition(validate_matrix(chain));
    REQUIRE(deep.n_classes() == 3);
    CHECK(deep.n_levels() == 3);
    CHECK(deep.level_of_class == (std::vector<std::size_t>{0, 1, 2}));
    CHECK(deep.classes[2].members == std::vector<std::size_t>{2});
}

TEST_CASE("hierarchy invariants hold on random reducible matrices") {
    Xoshiro256pp rng(41);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 2 + rng.next() % 10;
        const Mat w = oracle::random_reducible(n, rng);
        const InteractionMatrix m = validate_matrix(w);
        const auto d = hierarchy_decomposition(m);

        // Partition agrees with the reachability oracle up to class order.
        const auto want = oracle::scc_partition(w);
        REQUIRE(d.n_classes() == want.size());
        std::set<std::vector<std::size_t>> got_sets, want_sets;
        for (const auto& c : d.classes) got_sets.insert(c.members);
        for (const auto& c : want) want_sets.insert(c);
        CHECK(got_sets == want_sets);

        // Class ids sort by (level, smallest member).
        for (std::size_t c = 1; c < d.n_classes(); ++c) {
            const auto a = std::make_pair(d.level_of_class[c - 1],
                                          d.classes[c - 1].members.front());
            const auto b = std::make_pair(d.level_of_class[c],
                                          d.classes[c].members.front());
            CHECK(a < b);
        }

        // agent_order lists each class contiguously, ascending class id, and
        // agent_position inverts it.
        std::size_t pos = 0;
        for (std::size_t c = 0; c < d.n_classes(); ++c)
            for (std::size_t mem : d.classes[c].members) {
                CHECK(d.agent_order[pos] == mem);
                CHECK(d.agent_position[mem] == pos);
                ++pos;
            }
        REQUIRE(pos == n);

        // The permuted matrix reproduces the original entries and is block
        // lower-triangular: a class never points at a class that is not
        // strictly below it (other than itself).
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                const std::size_t u = d.agent_order[p];
                const std::size_t v = d.agent_order[q];
                CHECK(d.permuted(p, q) == w(u, v));
                if (w(u, v) > 0.0 && u != v) {
                    const std::size_t cu = d.class_of_agent[u];
                    const std::size_t cv = d.class_of_agent[v];
                    if (cu != cv)
                        CHECK(d.level_of_class[cv] < d.level_of_class[cu]);
                }
            }

        // Level definition: level 0 iff closed; higher levels touch level
        // m-1 and nothing at or above m.
        for (std::size_t c = 0; c < d.n_classes(); ++c) {
            const auto& mem = d.classes[c].members;
            std::set<std::size_t> inside(mem.begin(), mem.end());
            std::size_t best = 0;
            bool external = false;
            for (std::size_t u : mem)
                for (std::size_t v = 0; v < n; ++v)
                    if (w(u, v) > 0.0 && u != v && inside.count(v) == 0) {
                        external = true;
                        best = std::max(best, d.level_of_class[d.class_of_agent[v]]);
                    }
            if (!external)
                CHECK(d.level_of_class[c] == 0);
            else
                CHECK(d.level_of_class[c] == best + 1);
        }

        // levels[] is the inverse of level_of_class.
        for (std::size_t lvl = 0; lvl < d.n_levels(); ++lvl) {
            CHECK_FALSE(d.levels[lvl].empty());
            for (std::size_t c : d.levels[lvl]) CHECK(d.level_of_class[c] == lvl);
        }
    }
}
