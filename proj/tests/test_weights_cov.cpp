#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "covclust/cod_hclust.hpp"
#include "covclust/simulate.hpp"
#include "support.hpp"

using namespace covclust;

namespace {

void check_weight_invariants(const Weight& w) {
    const Eigen::MatrixXd m = w.matrix();
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK((w.factor() * w.factor().transpose() - m).cwiseAbs().maxCoeff() < 1e-12);
}

}  // namespace

TEST_CASE("identity weight") {
    const Weight w = identity_weight(4);
    CHECK(w.matrix().isApprox(Eigen::MatrixXd::Identity(4, 4) * 0.25, 1e-15));
    CHECK(w.kind() == WeightKind::kIdentity);
    CHECK(identity_weight(1).matrix()(0, 0) == 1.0);
    CHECK_THROWS_AS(identity_weight(0), ArgumentError);
    for (std::size_t q = 1; q < 30; ++q) {
        CHECK((identity_weight(q).factor() * identity_weight(q).factor().transpose() - identity_weight(q).matrix())
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
}

TEST_CASE("optimal weight") {
    SUBCASE("two clusters of two") {
        const Weight w = optimal_weight(partition_from_labels(std::vector<int>{0, 0, 1, 1}));
        Eigen::MatrixXd e(4, 4);
        e << 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1;
        CHECK(w.matrix().isApprox(e / 8.0, 1e-15));
        CHECK(w.rank() == 2);
    }
    SUBCASE("singletons give the identity weight") {
        const Weight w = optimal_weight(partition_from_labels(std::vector<int>{0, 1, 2, 3, 4}));
        CHECK((w.matrix() - identity_weight(5).matrix()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("one cluster of three") {
        const Weight w = optimal_weight(partition_from_labels(std::vector<int>{0, 0, 0}));
        CHECK((w.matrix().array() - 1.0 / 9.0).abs().maxCoeff() < 1e-15);
    }
    SUBCASE("entries follow 1/(s |G_t|^2) on random partitions") {
        CounterRng rng(1, "test-optimal");
        for (int t = 0; t < 50; ++t) {
            const std::size_t q = 1 + rng.below(25);
            const Partition b = testing::random_partition(rng, q, 1 + static_cast<int>(rng.below(q)));
            const Weight w = optimal_weight(b);
            check_weight_invariants(w);
            const auto sizes = b.cluster_sizes();
            const double s = static_cast<double>(b.k());
            for (std::size_t i = 0; i < q; ++i) {
                for (std::size_t j = 0; j < q; ++j) {
                    const double expected =
                        b[i] == b[j] ? 1.0 / (s * static_cast<double>(sizes[b[i]] * sizes[b[i]])) : 0.0;
                    CHECK(std::abs(w.matrix()(i, j) - expected) < 1e-15);
                }
            }
            CHECK(optimal_weight(membership_matrix(b)).matrix() == w.matrix());
        }
    }
    SUBCASE("empty membership column") {
        Membership m{Eigen::MatrixXd::Zero(3, 2)};
        m.matrix.col(0).setOnes();
        CHECK_THROWS_AS(optimal_weight(m), ArgumentError);
    }
}

TEST_CASE("custom weight and scaling") {
    CounterRng rng(2, "test-custom");
    const Weight w = custom_weight(testing::random_matrix(rng, 6, 3));
    check_weight_invariants(w);
    CHECK(w.kind() == WeightKind::kCustom);
    CHECK(w.scaled(7.0).matrix().isApprox(7.0 * w.matrix(), 1e-14));
    CHECK_THROWS_AS(w.scaled(0.0), ArgumentError);
}

TEST_CASE("sample weighted covariance") {
    SUBCASE("identity sample") {
        const DataSet d(1, 2, 2, {1, 0, 0, 1});
        CHECK(sample_weighted_covariance(d, identity_weight(2), Axis::kRows)
                  .isApprox(Eigen::MatrixXd::Identity(2, 2) / 2.0, 1e-15));
    }
    SUBCASE("factor path equals the dense triple loop") {
        CounterRng rng(3, "test-wcov");
        for (int t = 0; t < 40; ++t) {
            const std::size_t n = 1 + rng.below(10);
            const std::size_t p = 1 + rng.below(20);
            const std::size_t q = 1 + rng.below(20);
            const DataSet d = testing::random_dataset(rng, n, p, q);
            const Partition bq = testing::random_partition(rng, q, 1 + static_cast<int>(rng.below(q)));
            const Partition bp = testing::random_partition(rng, p, 1 + static_cast<int>(rng.below(p)));
            for (const Weight& w : {identity_weight(q), optimal_weight(bq),
                                    custom_weight(testing::random_matrix(rng, static_cast<Eigen::Index>(q), 2))}) {
                const Eigen::MatrixXd fast = sample_weighted_covariance(d, w, Axis::kRows);
                const Eigen::MatrixXd slow = testing::brute_weighted_covariance(d, w.matrix(), Axis::kRows);
                CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
                CHECK(fast == fast.transpose());
            }
            for (const Weight& w : {identity_weight(p), optimal_weight(bp)}) {
                const Eigen::MatrixXd fast = sample_weighted_covariance(d, w, Axis::kColumns);
                const Eigen::MatrixXd slow = testing::brute_weighted_covariance(d, w.matrix(), Axis::kColumns);
                CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    }
    SUBCASE("optimal weight averages columns within clusters") {
        CounterRng rng(4, "test-wcov-avg");
        const DataSet d = testing::random_dataset(rng, 5, 6, 7);
        const Partition b = partition_from_labels(std::vector<int>{0, 0, 1, 2, 1, 2, 2});
        const Eigen::MatrixXd bm = membership_matrix(b).matrix;
        const Eigen::MatrixXd avg = bm * (bm.transpose() * bm).inverse();
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
        for (std::size_t i = 0; i < 5; ++i) {
            const Eigen::MatrixXd xs = d.sample(i) * avg;
            expected += xs * xs.transpose();
        }
        expected /= 5.0 * 3.0;
        CHECK((sample_weighted_covariance(d, optimal_weight(b), Axis::kRows) - expected).cwiseAbs().maxCoeff() <
              1e-12);
    }
    SUBCASE("subset and dimension errors") {
        CounterRng rng(5, "test-wcov-subset");
        const DataSet d = testing::random_dataset(rng, 6, 3, 4);
        const std::vector<std::size_t> idx{4, 1};
        const std::vector<std::size_t> rows_of{1, 4};
        CHECK(sample_weighted_covariance(d, identity_weight(4), Axis::kRows, idx) ==
              sample_weighted_covariance(d.subset(rows_of), identity_weight(4), Axis::kRows));
        CHECK_THROWS_AS(sample_weighted_covariance(d, identity_weight(3), Axis::kRows), ArgumentError);
        CHECK_THROWS_AS(sample_weighted_covariance(d, identity_weight(4), Axis::kColumns), ArgumentError);
        const std::vector<std::size_t> empty;
        CHECK_THROWS_AS(sample_weighted_covariance(d, identity_weight(4), Axis::kRows, empty), ArgumentError);
    }
}

TEST_CASE("population weighted covariance") {
    CounterRng rng(6, "test-pop");
    const Partition rows = partition_from_labels(std::vector<int>{0, 0, 1, 1, 1, 2, 2});
    const Partition cols = partition_from_labels(std::vector<int>{0, 1, 1, 0, 2, 2});
    const PopulationModel model = testing::random_model(rng, rows, cols, 0.5, 2.0);
    CHECK_NOTHROW(model.validate());

    SUBCASE("optimal weight off-diagonals are U tr(V) / K2") {
        const Eigen::MatrixXd s = population_weighted_covariance(model, optimal_weight(cols), Axis::kRows);
        for (Eigen::Index a = 0; a < 7; ++a) {
            for (Eigen::Index c = 0; c < 7; ++c) {
                if (a != c) {
                    CHECK(s(a, c) == doctest::Approx(model.u(rows[a], rows[c]) * model.v.trace() / 3.0)
                                         .epsilon(1e-13));
                }
            }
        }
        CHECK(s == s.transpose());
    }
    SUBCASE("dense Kronecker oracle for any weight") {
        // Sigma = E(X W X^T) from Var(vec X) = (B kron A)(V kron U)(B kron A)^T + diag(vec sigma2).
        const Eigen::MatrixXd a = membership_matrix(rows).matrix;
        const Eigen::MatrixXd b = membership_matrix(cols).matrix;
        Eigen::MatrixXd ba(6 * 7, 3 * 3);
        Eigen::MatrixXd vu(9, 9);
        for (Eigen::Index i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) ba.block(i * 7, j * 3, 7, 3) = b(i, j) * a;
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) vu.block(i * 3, j * 3, 3, 3) = model.v(i, j) * model.u;
        Eigen::MatrixXd cov = ba * vu * ba.transpose();
        for (Eigen::Index j = 0; j < 6; ++j)
            for (Eigen::Index i = 0; i < 7; ++i) cov(j * 7 + i, j * 7 + i) += model.sigma2(i, j);
        const Weight w = custom_weight(testing::random_matrix(rng, 6, 4));
        const Eigen::MatrixXd wm = w.matrix();
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(7, 7);
        for (Eigen::Index r = 0; r < 7; ++r)
            for (Eigen::Index s = 0; s < 7; ++s)
                for (Eigen::Index k = 0; k < 6; ++k)
                    for (Eigen::Index l = 0; l < 6; ++l) expected(r, s) += wm(k, l) * cov(k * 7 + r, l * 7 + s);
        const Eigen::MatrixXd got = population_weighted_covariance(model, w, Axis::kRows);
        CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);

        const Weight wc = custom_weight(testing::random_matrix(rng, 7, 3));
        const Eigen::MatrixXd wcm = wc.matrix();
        Eigen::MatrixXd expected_c = Eigen::MatrixXd::Zero(6, 6);
        for (Eigen::Index r = 0; r < 6; ++r)
            for (Eigen::Index s = 0; s < 6; ++s)
                for (Eigen::Index k = 0; k < 7; ++k)
                    for (Eigen::Index l = 0; l < 7; ++l) expected_c(r, s) += wcm(k, l) * cov(r * 7 + k, s * 7 + l);
        CHECK((population_weighted_covariance(model, wc, Axis::kColumns) - expected_c).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("noise part is diagonal, signal is block constant") {
        const Weight w = identity_weight(6);
        const Eigen::MatrixXd n = population_noise_covariance(model, w, Axis::kRows);
        CHECK((n - Eigen::MatrixXd(n.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXd signal = population_weighted_covariance(model, w, Axis::kRows) - n;
        for (Eigen::Index a = 0; a < 7; ++a)
            for (Eigen::Index c = 0; c < 7; ++c)
                for (Eigen::Index a2 = 0; a2 < 7; ++a2)
                    for (Eigen::Index c2 = 0; c2 < 7; ++c2)
                        if (rows[a] == rows[a2] && rows[c] == rows[c2]) {
                            CHECK(signal(a, c) == doctest::Approx(signal(a2, c2)).epsilon(1e-13));
                        }
    }
    SUBCASE("identity weight with equal clusters and homogeneous noise") {
        PopulationModel m = model;
        m.cols = partition_from_labels(std::vector<int>{0, 0, 1, 1, 2, 2});
        m.sigma2.setConstant(3.0);
        const Eigen::MatrixXd a = membership_matrix(m.rows).matrix;
        // E(ZZ^T) = U tr(V), E(Gamma Gamma^T) = q sigma2 I.
        const Eigen::MatrixXd expected =
            a * m.u * m.v.trace() * a.transpose() * (2.0 / 6.0) + Eigen::MatrixXd::Identity(7, 7) * 3.0;
        CHECK((population_weighted_covariance(m, identity_weight(6), Axis::kRows) - expected).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((expected - (a * m.u * m.v.trace() * a.transpose() / 3.0 +
                           Eigen::MatrixXd::Identity(7, 7) * 6.0 * 3.0 / 6.0))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
    SUBCASE("dimension errors") {
        CHECK_THROWS_AS(population_weighted_covariance(model, identity_weight(7), Axis::kRows), ArgumentError);
        CHECK_THROWS_AS(population_weighted_covariance(model, identity_weight(6), Axis::kColumns), ArgumentError);
    }
}

TEST_CASE("Monte-Carlo average of the sample covariance approaches the population matrix") {
    SimConfig c;
    c.row_sizes = {2, 3};
    c.col_sizes = {2, 2};
    c.u_decay = -0.4;
    c.v_decay = 0.3;
    c.noise.kind = NoiseKind::kProportional;
    c.noise.mean = 2.0;
    c.seed = 17;
    const Weight w = optimal_weight(blocks_partition(c.col_sizes));
    double previous = 0.0;
    for (std::size_t n : {2000u, 200000u}) {
        c.n = n;
        const MatrixSample s = sample_matrix_normal_dataset(c);
        const Eigen::MatrixXd exact = population_weighted_covariance(s.model, w, Axis::kRows);
        const double dev = (sample_weighted_covariance(s.data, w, Axis::kRows) - exact).cwiseAbs().maxCoeff();
        if (n == 2000u) {
            previous = dev;
        } else {
            CHECK(dev < 0.05);
            CHECK(dev < previous);
        }
    }
}

TEST_CASE("x norm") {
    CounterRng rng(7, "test-xnorm");
    const Partition rows = partition_from_labels(std::vector<int>{0, 1, 1, 2, 0, 2});
    const Partition cols = partition_from_labels(std::vector<int>{0, 0, 1, 1, 2, 2, 2, 1});
    const PopulationModel model = testing::random_model(rng, rows, cols, 0.2, 1.5);

    SUBCASE("dense oracle") {
        const Eigen::MatrixXd b = membership_matrix(cols).matrix;
        for (const Weight& w : {identity_weight(8), optimal_weight(cols),
                                custom_weight(testing::random_matrix(rng, 8, 5))}) {
            double best = 0.0;
            for (std::size_t a = 0; a < 6; ++a) {
                Eigen::MatrixXd var = model.u(rows[a], rows[a]) * b * model.v * b.transpose();
                for (Eigen::Index j = 0; j < 8; ++j) var(j, j) += model.sigma2(static_cast<Eigen::Index>(a), j);
                best = std::max(best, (w.factor().transpose() * var * w.factor()).norm());
            }
            CHECK(population_x_norm(model, w).value == doctest::Approx(std::sqrt(3.0) * best).epsilon(1e-12));
        }
    }
    SUBCASE("noiseless limit") {
        PopulationModel m = model;
        m.sigma2.setConstant(1e-300);
        const double expected = std::sqrt(3.0) * m.u.diagonal().maxCoeff() * m.v.norm() / 3.0;
        CHECK(population_x_norm(m, optimal_weight(cols)).value == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("scale invariance of MCOD / norm") {
        const Weight w = optimal_weight(cols);
        const double base = population_mcod(model, w, rows) / population_x_norm(model, w).value;
        for (double t : {0.1, 1.0, 7.0}) {
            const Weight wt = w.scaled(t);
            CHECK(population_x_norm(model, wt).value ==
                  doctest::Approx(t * population_x_norm(model, w).value).epsilon(1e-12));
            const double ratio = population_mcod(model, wt, rows) / population_x_norm(model, wt).value;
            CHECK(std::abs(ratio - base) < 1e-10);
        }
    }
}

TEST_CASE("population MCOD") {
    CounterRng rng(8, "test-mcod");
    SUBCASE("within-cluster COD vanishes, optimal-weight closed form") {
        for (int t = 0; t < 30; ++t) {
            const Partition rows = testing::random_partition_exact_k(rng, 4 + rng.below(20), 2 + rng.below(4));
            const Partition cols = testing::random_partition_exact_k(rng, 3 + rng.below(10), 1 + rng.below(3));
            const PopulationModel model = testing::random_model(rng, rows, cols, 0.5, 3.0);
            const Weight w = optimal_weight(cols);
            const CodMatrix cod = cod_matrix(population_weighted_covariance(model, w, Axis::kRows));
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = 0; b < rows.size(); ++b)
                    if (rows[a] == rows[b]) CHECK(cod(a, b) == 0.0);

            // closed form needs every row cluster to supply an index c distinct from a and b
            bool all_pairs = true;
            for (auto sz : rows.cluster_sizes()) all_pairs = all_pairs && sz >= 3;
            if (!all_pairs) continue;
            double sep = std::numeric_limits<double>::infinity();
            for (int j = 0; j < rows.k(); ++j)
                for (int k = 0; k < rows.k(); ++k)
                    if (j != k) sep = std::min(sep, (model.u.row(j) - model.u.row(k)).cwiseAbs().maxCoeff());
            CHECK(population_mcod(model, w, rows) ==
                  doctest::Approx(model.v.trace() / cols.k() * sep).epsilon(1e-12));
        }
    }
    SUBCASE("minimax construction has MCOD 2 eps") {
        for (double eps : {0.05, 0.2, 0.5}) {
            const PopulationModel m = testing::c_eps_model(eps, 4, {3, 2, 5}, 1.5);
            CHECK(population_mcod(m, optimal_weight(m.cols), m.rows) == doctest::Approx(2.0 * eps).epsilon(1e-12));
        }
    }
    SUBCASE("single cluster") {
        const PopulationModel m = testing::random_model(rng, partition_from_labels(std::vector<int>{0, 0, 0}),
                                                        partition_from_labels(std::vector<int>{0, 1, 1}), 1, 2);
        CHECK_THROWS_AS(population_mcod(m, identity_weight(3), m.rows), ArgumentError);
    }
}

TEST_CASE("model validation") {
    CounterRng rng(9, "test-validate");
    PopulationModel m = testing::random_model(rng, partition_from_labels(std::vector<int>{0, 1, 1}),
                                              partition_from_labels(std::vector<int>{0, 1}), 1, 2);
    CHECK_NOTHROW(m.validate());
    PopulationModel bad = m;
    bad.u(0, 1) = bad.u(1, 0) = 10.0;
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = m;
    bad.sigma2(0, 0) = 0.0;
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = m;
    bad.v = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(bad.validate(), ModelError);
    // The minimax construction's C(eps) is singular.
    CHECK_THROWS_AS(testing::c_eps_model(0.3, 3, {2, 2}, 1.0).validate(), ModelError);
}

TEST_CASE("gamma diagnostics") {
    CHECK(gamma_diagnostic(Eigen::Vector4d(1, 2, 3, 4).asDiagonal().toDenseMatrix()) == 0.0);
    Eigen::Matrix3d m;
    m << 1, .2, 0, .2, 1, 0, 0, 0, 1;
    CHECK(gamma_diagnostic(m) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_diagnostic(Eigen::Matrix2d::Identity()), ArgumentError);

    CounterRng rng(10, "test-gamma");
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.below(10));
        const Eigen::MatrixXd s = testing::random_symmetric(rng, p);
        double brute = 0.0;
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index b = 0; b < p; ++b)
                for (Eigen::Index c = 0; c < p; ++c)
                    if (c != a && c != b) brute = std::max(brute, std::abs(s(a, c) - s(b, c)));
        CHECK(gamma_diagnostic(s) == brute);
        CHECK(gamma_diagnostic(s) <= gamma_s_diagnostic(s) + 1e-15);
    }
}

TEST_CASE("stability diagnostics") {
    CounterRng rng(11, "test-stability");
    const Partition rows = partition_from_labels(std::vector<int>{0, 0, 1, 1, 2, 2});
    const Partition cols = partition_from_labels(std::vector<int>{0, 0, 0, 1, 1, 2, 2, 2, 2});
    PopulationModel model = testing::random_model(rng, rows, cols, 1.0, 1.0);
    model.sigma2.setConstant(2.0);
    const TheoryConstants k{1.0, 1.0, 0.5, 2.0, 50};

    const StabilityReport exact = stability_diagnostics(model, cols, k);
    CHECK(exact.g.isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-15));
    CHECK(exact.lambda_min_ggt == doctest::Approx(1.0));
    CHECK(exact.lambda_max_ggt == doctest::Approx(1.0));

    const Partition singles = partition_from_labels(std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8});
    const StabilityReport s = stability_diagnostics(model, singles, k);
    CHECK(s.lambda_min_ggt == doctest::Approx(2.0));
    CHECK(s.lambda_max_ggt == doctest::Approx(4.0));
    CHECK(s.c_s == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s.g.colwise().sum().isOnes(1e-15));

    CHECK_THROWS_AS(stability_diagnostics(model, rows, k), ArgumentError);
}
