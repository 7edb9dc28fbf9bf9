#include <doctest.h>

#include <random>

#include "etsmc/topology.hpp"

using namespace etsmc;

namespace {

Matrix bench_adjacency() {
    Matrix a(4, 4);
    a << 0, 0, 1, 0,
         0, 0, 0, 0,
         0, 1, 0, 0,
         0, 0, 1, 0;
    return a;
}

Vector bench_pinning() {
    Vector b(4);
    b << 1, 1, 0, 0;
    return b;
}

/// Random digraph with optional real-valued weights, seeded.
TopologyMatrices random_topology(std::mt19937_64& rng, bool real_weights) {
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    const int n = size(rng);
    Matrix a = Matrix::Zero(n, n);
    Vector b = Vector::Zero(n);
    const double edge_p = 0.2 + 0.4 * unit(rng);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && unit(rng) < edge_p) {
                a(i, j) = real_weights ? weight(rng) : 1.0;
            }
        }
        if (unit(rng) < 0.4) b(i) = 1.0;
    }
    return build_topology(a, b);
}

}  // namespace

TEST_CASE("benchmark topology reproduces the expected laplacian and grounded matrix") {
    const auto topo = build_topology(bench_adjacency(), bench_pinning());

    Matrix expected_d = Matrix::Zero(4, 4);
    expected_d.diagonal() << 1, 0, 1, 1;
    Matrix expected_l(4, 4);
    expected_l << 1, 0, -1, 0,
                  0, 0, 0, 0,
                  0, -1, 1, 0,
                  0, 0, -1, 1;
    Matrix expected_h(4, 4);
    expected_h << 2, 0, -1, 0,
                  0, 1, 0, 0,
                  0, -1, 1, 0,
                  0, 0, -1, 1;

    CHECK(topo.n_followers == 4);
    CHECK(topo.degree == expected_d);
    CHECK(topo.laplacian == expected_l);
    CHECK(topo.grounded == expected_h);
}

TEST_CASE("empty graph yields zero laplacian") {
    const auto topo = build_topology(Matrix::Zero(2, 2), Vector::Zero(2));
    CHECK(topo.laplacian == Matrix::Zero(2, 2));
    CHECK(topo.grounded == Matrix::Zero(2, 2));
}

TEST_CASE("two mutually connected nodes") {
    Matrix a(2, 2);
    a << 0, 1,
         1, 0;
    const auto topo = build_topology(a, Vector::Zero(2));
    Matrix expected(2, 2);
    expected << 1, -1,
                -1, 1;
    CHECK(topo.laplacian == expected);
}

TEST_CASE("build_topology names the offending entry on bad input") {
    Matrix a = bench_adjacency();
    a(1, 1) = 2.0;
    CHECK_THROWS_WITH_AS(build_topology(a, bench_pinning()),
                         doctest::Contains("adjacency(1,1)"), ValidationError);

    a = bench_adjacency();
    a(2, 0) = -0.5;
    CHECK_THROWS_WITH_AS(build_topology(a, bench_pinning()),
                         doctest::Contains("adjacency(2,0)"), ValidationError);

    CHECK_THROWS_AS(build_topology(Matrix::Zero(3, 4), Vector::Zero(3)), ValidationError);

    Vector b = bench_pinning();
    b(0) = 0.5;
    CHECK_THROWS_WITH_AS(build_topology(bench_adjacency(), b), doctest::Contains("pinning(0)"),
                         ValidationError);
}

TEST_CASE("leader-rooted spanning tree detection") {
    // leader pins 1 and 2; 2 feeds 3, 3 feeds 1 and 4 -> everyone reachable
    CHECK(has_leader_rooted_spanning_tree(build_topology(bench_adjacency(), bench_pinning())));

    CHECK_FALSE(
        has_leader_rooted_spanning_tree(build_topology(bench_adjacency(), Vector::Zero(4))));

    CHECK(has_leader_rooted_spanning_tree(build_topology(Matrix::Zero(1, 1), Vector::Ones(1))));
}

TEST_CASE("balancedness checks row and column sums") {
    // column 3 of the benchmark laplacian sums to -1
    CHECK_FALSE(is_balanced(build_topology(bench_adjacency(), bench_pinning())));

    Matrix mutual(2, 2);
    mutual << 0, 1,
              1, 0;
    CHECK(is_balanced(build_topology(mutual, Vector::Zero(2))));

    CHECK(is_balanced(build_topology(Matrix::Zero(2, 2), Vector::Zero(2))));
}

TEST_CASE("laplacian rows sum to zero for random topologies") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto topo = random_topology(rng, trial % 2 == 0);
        CHECK(topo.laplacian.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(topo.grounded == topo.laplacian + topo.pinning);
    }
}

TEST_CASE("spanning tree is equivalent to an invertible grounded laplacian") {
    std::mt19937_64 rng(5);
    int with_tree = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto topo = random_topology(rng, trial % 2 == 0);
        const bool tree = has_leader_rooted_spanning_tree(topo);
        bool invertible = true;
        try {
            invert(topo.grounded);
        } catch (const SingularMatrixError&) {
            invertible = false;
        }
        CHECK(tree == invertible);
        if (tree) ++with_tree;
    }
    CHECK(with_tree > 20);  // the sample exercises both outcomes
    CHECK(with_tree < 180);
}

TEST_CASE("laplacian spectrum has a zero eigenvalue and no negative real parts") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto topo = random_topology(rng, true);
        const auto eig = eigenvalues(topo.laplacian);
        double closest_to_zero = std::abs(eig.front());
        for (const auto& v : eig) {
            closest_to_zero = std::min(closest_to_zero, std::abs(v));
            CHECK(v.real() >= -1e-9);
        }
        CHECK(closest_to_zero <= 1e-9);
    }
}
