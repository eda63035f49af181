#include <doctest.h>

#include <algorithm>
#include <vector>

#include "derval/errors.hpp"
#include "derval/metrics.hpp"

using namespace derval;

TEST_CASE("spearman handles identity, reversal, and the hand-computed case") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(spearman(x, x) == doctest::Approx(1.0));

    const std::vector<double> rev{4, 3, 2, 1};
    CHECK(spearman(x, rev) == doctest::Approx(-1.0));

    const std::vector<double> y{1, 3, 2, 4};
    CHECK(spearman(x, y) == doctest::Approx(0.8).epsilon(1e-12));

    const std::vector<double> flat{5, 5, 5, 5};
    CHECK_THROWS_AS(spearman(x, flat), DataError);
}

TEST_CASE("spearman gives tied values averaged ranks") {
    const std::vector<double> x{1, 2, 2, 3};
    const auto ranks = average_ranks(x);
    CHECK(ranks[0] == doctest::Approx(1.0));
    CHECK(ranks[1] == doctest::Approx(2.5));
    CHECK(ranks[2] == doctest::Approx(2.5));
    CHECK(ranks[3] == doctest::Approx(4.0));
}

TEST_CASE("bootstrap interval collapses for constant days and is reproducible") {
    const std::vector<double> constant(40, 2.5);
    const rng::Key key = rng::master(1).child("boot");
    const BootstrapCi ci = bootstrap_ci(constant, 200, 0.05, key);
    CHECK(ci.lo == doctest::Approx(100.0));
    CHECK(ci.hi == doctest::Approx(100.0));

    std::vector<double> daily(60);
    for (std::size_t j = 0; j < daily.size(); ++j) daily[j] = 1.0 + 0.1 * static_cast<double>(j % 7);
    const BootstrapCi a = bootstrap_ci(daily, 500, 0.05, key.child(1));
    const BootstrapCi b = bootstrap_ci(daily, 500, 0.05, key.child(1));
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo < a.hi);
}

TEST_CASE("bootstrap interval brackets the point estimate for symmetric data") {
    const rng::Key key = rng::master(2).child("boot-sym");
    int contained = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> daily(50);
        double total = 0.0;
        for (std::size_t j = 0; j < daily.size(); ++j) {
            daily[j] = 2.0 + key.child(static_cast<std::uint64_t>(t)).normal(j);
            total += daily[j];
        }
        const BootstrapCi ci =
            bootstrap_ci(daily, 400, 0.05, key.child(1000 + static_cast<std::uint64_t>(t)));
        if (ci.lo <= total && total <= ci.hi) ++contained;
    }
    CHECK(contained >= trials * 95 / 100 - 4);  // generous slack for 40 trials
}

TEST_CASE("savings records satisfy the defining identities") {
    std::vector<double> bl(30), n(30);
    for (std::size_t j = 0; j < 30; ++j) {
        bl[j] = 1000.0 / 30.0;
        n[j] = 400.0 / 30.0;
    }
    const SavingsRecord rec = make_savings_record("H1", PolicyId::P1, 3.0, bl, n, 200, 0.05,
                                                  rng::master(3).child("rec"));
    CHECK(rec.b_bl == doctest::Approx(1000.0));
    CHECK(rec.b_n == doctest::Approx(400.0));
    CHECK(rec.s_a == doctest::Approx(600.0));
    CHECK(rec.s_n == doctest::Approx(200.0));
    CHECK(rec.s_n * rec.z == doctest::Approx(rec.s_a));
    // Constant daily savings -> degenerate interval at the point estimate.
    CHECK(rec.s_a_ci.lo == doctest::Approx(600.0));
    CHECK(rec.s_a_ci.hi == doctest::Approx(600.0));
}

TEST_CASE("quantile interpolates between order statistics") {
    std::vector<double> v{4, 1, 3, 2};
    CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
    CHECK(quantile(v, 1.0) == doctest::Approx(4.0));
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
}
