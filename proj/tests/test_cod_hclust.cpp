#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "covclust/cod_hclust.hpp"
#include "support.hpp"

using namespace covclust;

namespace {

Eigen::MatrixXd example3() {
    Eigen::MatrixXd s(3, 3);
    s << 1, .5, .2, .5, 1, .2, .2, .2, 1;
    return s;
}

// Member sets of every merge, from node ids.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> merge_sets(const Dendrogram& t) {
    std::vector<std::vector<std::size_t>> nodes(t.leaves());
    for (std::size_t i = 0; i < t.leaves(); ++i) nodes[i] = {i};
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
    for (const auto& m : t.merges()) {
        auto l = nodes[static_cast<std::size_t>(m.left)];
        auto r = nodes[static_cast<std::size_t>(m.right)];
        if (l.front() > r.front()) std::swap(l, r);
        out.emplace_back(l, r);
        auto u = l;
        u.insert(u.end(), r.begin(), r.end());
        std::sort(u.begin(), u.end());
        nodes.push_back(u);
    }
    return out;
}

CodMatrix random_cod(CounterRng& rng, Eigen::Index p, bool with_ties) {
    Eigen::MatrixXd d(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < p; ++j) {
            d(i, j) = d(j, i) = with_ties ? static_cast<double>(rng.below(4)) : rng.uniform();
        }
    }
    return CodMatrix(d);
}

}  // namespace

TEST_CASE("cod matrix hand example") {
    const CodMatrix c = cod_matrix(example3());
    CHECK(c(0, 1) == 0.0);
    CHECK(c(0, 2) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(c(1, 2) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(c(2, 0) == c(0, 2));
    CHECK(c(1, 1) == 0.0);
    CHECK(mcod(c, partition_from_labels(std::vector<int>{0, 0, 1})) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(mcod(c, partition_from_labels(std::vector<int>{0, 1, 2})) == 0.0);

    const CodMatrix id = cod_matrix(Eigen::MatrixXd::Identity(5, 5));
    CHECK(id.values().cwiseAbs().maxCoeff() == 0.0);
    CHECK(mcod(id, partition_from_labels(std::vector<int>{0, 0, 1, 1, 1})) == 0.0);
}

TEST_CASE("cod matrix errors") {
    CHECK_THROWS_AS(cod_matrix(Eigen::MatrixXd::Identity(2, 2)), ArgumentError);
    Eigen::MatrixXd a = example3();
    a(0, 1) += 1e-6;
    CHECK_THROWS_AS(cod_matrix(a), ArgumentError);
    CHECK_THROWS_AS(mcod(cod_matrix(example3()), partition_from_labels(std::vector<int>{0, 0, 0})), ArgumentError);
    CHECK_THROWS_AS(mcod(cod_matrix(example3()), partition_from_labels(std::vector<int>{0, 1})), ArgumentError);
}

TEST_CASE("cod matrix equals the pointwise definition") {
    CounterRng rng(1, "test-cod");
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.below(25));
        const Eigen::MatrixXd s = testing::random_symmetric(rng, p);
        const CodMatrix c = cod_matrix(s);
        for (Eigen::Index a = 0; a < p; ++a) {
            for (Eigen::Index b = 0; b < p; ++b) {
                CHECK(c(a, b) == (a == b ? 0.0 : testing::brute_cod(s, a, b)));
            }
        }
    }
}

TEST_CASE("cod perturbation sandwich") {
    CounterRng rng(2, "test-sandwich");
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.below(30));
        const Eigen::MatrixXd s = testing::random_symmetric(rng, p);
        const Eigen::MatrixXd e = 0.1 * rng.uniform() * testing::random_symmetric(rng, p);
        const double tau = 2.0 * e.cwiseAbs().maxCoeff();
        const Eigen::MatrixXd diff = cod_matrix(s + e).values() - cod_matrix(s).values();
        CHECK(diff.cwiseAbs().maxCoeff() <= tau + 1e-15);
    }
}

TEST_CASE("agglomerate small cases") {
    Eigen::MatrixXd two(2, 2);
    two << 0, 0.7, 0.7, 0;
    const Dendrogram t = agglomerate(CodMatrix(two));
    REQUIRE(t.merges().size() == 1);
    CHECK(t.merges()[0].height == 0.7);

    // A, B close; C, D, E close; A-C below the largest within-group link.
    Eigen::MatrixXd d(5, 5);
    d << 0, 1, 3, 6, 6,
         1, 0, 6, 6, 6,
         3, 6, 0, 2, 4,
         6, 6, 2, 0, 2,
         6, 6, 4, 2, 0;
    const Dendrogram toy = agglomerate(CodMatrix(d));
    const auto sets = merge_sets(toy);
    CHECK(sets[0] == std::make_pair(std::vector<std::size_t>{0}, std::vector<std::size_t>{1}));
    CHECK(sets[1] == std::make_pair(std::vector<std::size_t>{2}, std::vector<std::size_t>{3}));
    CHECK(sets[2] == std::make_pair(std::vector<std::size_t>{2, 3}, std::vector<std::size_t>{4}));
    CHECK(toy.merges()[2].height == 4.0);
    CHECK(cut_threshold(toy, 4.0).labels() == std::vector<int>{0, 0, 1, 1, 1});
    CHECK(cut_k(toy, 2).labels() == std::vector<int>{0, 0, 1, 1, 1});
}

TEST_CASE("agglomerate equals the from-scratch oracle") {
    CounterRng rng(3, "test-agglomerate");
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.below(39));
        const CodMatrix c = random_cod(rng, p, t % 2 == 1);
        const Dendrogram tree = agglomerate(c);
        const auto brute = testing::brute_agglomerate(c.values());
        const auto sets = merge_sets(tree);
        REQUIRE(sets.size() == brute.size());
        bool same = true;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            same = same && sets[i].first == brute[i].left && sets[i].second == brute[i].right &&
                   tree.merges()[i].height == brute[i].height;
        }
        CHECK(same);
    }
}

TEST_CASE("merge heights are non-decreasing") {
    CounterRng rng(4, "test-monotone");
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.below(38));
        const Dendrogram tree = agglomerate(cod_matrix(testing::random_symmetric(rng, p)));
        const auto h = tree.heights();
        CHECK(h.size() == static_cast<std::size_t>(p - 1));
        CHECK(std::is_sorted(h.begin(), h.end()));
    }
}

TEST_CASE("threshold and k cuts") {
    CounterRng rng(5, "test-cuts");
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.below(30));
        const Dendrogram tree = agglomerate(random_cod(rng, p, false));
        const auto h = tree.heights();
        CHECK(cut_threshold(tree, 0.0).k() == p);
        CHECK(cut_threshold(tree, h.back()).k() == 1);
        CHECK(cut_k(tree, static_cast<std::size_t>(p)).k() == p);
        CHECK(cut_k(tree, 1).k() == 1);
        for (std::size_t k = 1; k <= static_cast<std::size_t>(p); ++k) {
            CHECK(cut_k(tree, k).k() == static_cast<int>(k));
        }
        // merges at exactly alpha are kept
        const std::size_t i = rng.below(h.size());
        CHECK(cut_threshold(tree, h[i]).k() <= static_cast<int>(p - 1 - i));

        std::vector<double> alphas;
        for (int j = 0; j < 12; ++j) alphas.push_back(rng.uniform());
        std::sort(alphas.begin(), alphas.end());
        for (std::size_t j = 1; j < alphas.size(); ++j) {
            CHECK(cut_threshold(tree, alphas[j - 1]).refines(cut_threshold(tree, alphas[j])));
        }
    }
    const Dendrogram tree = agglomerate(cod_matrix(example3()));
    CHECK_THROWS_AS(cut_k(tree, 0), ArgumentError);
    CHECK_THROWS_AS(cut_k(tree, 4), ArgumentError);
    CHECK_THROWS_AS(cut_threshold(tree, std::nan("")), ArgumentError);
}

TEST_CASE("population recovery at half the MCOD and at the true K") {
    CounterRng rng(6, "test-recovery");
    int tested = 0;
    while (tested < 40) {
        const std::size_t p = 6 + rng.below(40);
        const int k1 = 2 + static_cast<int>(rng.below(7));
        const Partition rows = testing::random_partition_exact_k(rng, p, k1);
        const Partition cols = testing::random_partition_exact_k(rng, 3 + rng.below(20), 1 + rng.below(5));
        const PopulationModel model = testing::random_model(rng, rows, cols, 0.5, 4.0);
        const Weight w = optimal_weight(cols);
        const double m = population_mcod(model, w, rows);
        if (!(m > 1e-6)) continue;
        ++tested;
        const Dendrogram tree = agglomerate(cod_matrix(population_weighted_covariance(model, w, Axis::kRows)));
        CHECK(cut_threshold(tree, m / 2.0) == rows);
        CHECK(cut_threshold(tree, m * 0.999) == rows);
        CHECK(cut_k(tree, static_cast<std::size_t>(k1)) == rows);
    }
}
