#include <doctest.h>

#include <cmath>

#include "driftgmm/gmm.hpp"
#include "helpers.hpp"

using namespace driftgmm;
using testutil::vec;

TEST_CASE("density of the standard normal") {
    Gaussian g(vec({0.0}), Eigen::MatrixXd::Identity(1, 1), 1.0, 1.0, 0);
    CHECK(density(g, vec({0.0})) == doctest::Approx(0.3989422804).epsilon(1e-6));

    Gaussian g2(vec({0.0, 0.0}), Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, 0);
    CHECK(density(g2, vec({0.0, 0.0})) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-9));
    CHECK(density(g2, vec({1.0, 0.0})) ==
          doctest::Approx(std::exp(-0.5) / (2.0 * M_PI)).epsilon(1e-9));
    CHECK(density(g2, vec({1.0, 0.0})) == doctest::Approx(0.096532).epsilon(1e-4));
}

TEST_CASE("density rejects dimension mismatches") {
    Gaussian g(vec({0.0, 0.0}), Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, 0);
    CHECK_THROWS_AS(density(g, vec({0.0})), dimension_error);
}

TEST_CASE("density matches the quadratic-form oracle on random SPD covariances") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const Eigen::MatrixXd cov = testutil::random_spd(d, rng);
        const Eigen::VectorXd mu = testutil::random_vec(d, rng, 2.0);
        const Eigen::VectorXd x = testutil::random_vec(d, rng, 2.0);
        Gaussian g(mu, cov, 1.0, 1.0, 0);
        const double expected = testutil::density_oracle(mu, cov, x);
        CHECK(density(g, x) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("posterior normalization and symmetry") {
    auto single = testutil::model_1d({0.0}, {1});
    Eigen::VectorXd p = posterior(single, vec({3.7}));
    REQUIRE(p.size() == 1);
    CHECK(p[0] == doctest::Approx(1.0));

    auto pair = testutil::model_1d({-1.0, 1.0}, {0, 1});
    p = posterior(pair, vec({0.0}));
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));

    auto skewed = testutil::model_1d({0.0, 2.0}, {0, 1});
    p = posterior(skewed, vec({0.0}));
    CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-9));
    CHECK(p[0] == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(p[1] == doctest::Approx(0.1192).epsilon(1e-4));
}

TEST_CASE("posterior sums to one on random models") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int k = 1 + static_cast<int>(rng() % 4);
        GmmModel m;
        m.dim = d;
        for (int i = 0; i < k; ++i) {
            m.gaussians.emplace_back(testutil::random_vec(d, rng, 3.0),
                                     testutil::random_spd(d, rng), 0.0,
                                     1.0 + (rng() % 100), i % 2);
        }
        m.renormalize_weights();
        Eigen::VectorXd p = posterior(m, testutil::random_vec(d, rng, 3.0));
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.minCoeff() >= 0.0);
    }
}

TEST_CASE("posterior underflow falls back to uniform") {
    auto m = testutil::model_1d({0.0, 1.0}, {0, 1}, 1e-6);
    Eigen::VectorXd p = posterior(m, vec({1e6}));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("predict basics and tie-breaking") {
    auto single = testutil::model_1d({0.0}, {1});
    CHECK(predict(single, vec({-50.0})) == 1);
    CHECK(predict(single, vec({12.0})) == 1);

    auto pair = testutil::model_1d({0.0, 10.0}, {0, 1});
    CHECK(predict(pair, vec({0.1})) == 0);

    // Exact tie between index 0 (label 2) and index 3 (label 0).
    GmmModel m;
    m.dim = 1;
    auto add = [&](double mu, int label) {
        m.gaussians.emplace_back(vec({mu}), Eigen::MatrixXd::Identity(1, 1),
                                 0.25, 1.0, label);
        m.classes.insert(label);
    };
    add(-1.0, 2);
    add(-100.0, 1);
    add(100.0, 1);
    add(1.0, 0);
    CHECK(predict(m, vec({0.0})) == 2);
}

TEST_CASE("predict is invariant to weight rescaling") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 2);
        GmmModel m;
        m.dim = d;
        for (int i = 0; i < 3; ++i) {
            m.gaussians.emplace_back(testutil::random_vec(d, rng, 3.0),
                                     testutil::random_spd(d, rng), 0.0,
                                     1.0 + (rng() % 10), i);
        }
        m.renormalize_weights();
        const Eigen::VectorXd x = testutil::random_vec(d, rng, 3.0);
        const int before = predict(m, x);
        for (auto& g : m.gaussians) g.sp *= 17.5;
        m.renormalize_weights();
        CHECK(predict(m, x) == before);
    }
}

TEST_CASE("log_likelihood on known mixtures") {
    auto single = testutil::model_1d({0.0}, {0});
    CHECK(log_likelihood(single, {vec({0.0})}) ==
          doctest::Approx(-0.9189385332).epsilon(1e-9));
    CHECK(log_likelihood(single, {vec({0.0}), vec({0.0})}) ==
          doctest::Approx(-1.8378770664).epsilon(1e-9));

    auto skewed = testutil::model_1d({0.0, 2.0}, {0, 1});
    CHECK(log_likelihood(skewed, {vec({0.0})}) ==
          doctest::Approx(std::log(0.5 * 0.3989422804 * (1.0 + std::exp(-2.0))))
              .epsilon(1e-9));
    CHECK(log_likelihood(skewed, {vec({0.0})}) == doctest::Approx(-1.4851576).epsilon(1e-5));
}

TEST_CASE("log_likelihood clamps underflow and counts it") {
    auto m = testutil::model_1d({0.0}, {0}, 1e-8);
    int clamped = 0;
    double ll = log_likelihood(m, {vec({1e8})}, &clamped);
    CHECK(clamped == 1);
    CHECK(std::isfinite(ll));
}

TEST_CASE("fit_em k=1 recovers batch statistics") {
    std::mt19937_64 rng(3);
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 50; ++i) data.push_back(testutil::random_vec(2, rng, 1.5));

    std::mt19937_64 em_rng(1);
    auto mix = fit_em(data, 1, 5, em_rng);
    REQUIRE(mix.size() == 1);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    for (const auto& x : data) mean += x;
    mean /= static_cast<double>(data.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& x : data) cov += (x - mean) * (x - mean).transpose();
    cov /= static_cast<double>(data.size());

    CHECK((mix[0].mean() - mean).norm() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK((mix[0].covariance() - cov).norm() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(mix[0].weight == doctest::Approx(1.0));
}

TEST_CASE("fit_em separates two tight clusters") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.1);
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 100; ++i) data.push_back(vec({n(rng)}));
    for (int i = 0; i < 100; ++i) data.push_back(vec({10.0 + n(rng)}));

    std::mt19937_64 em_rng(3);
    auto mix = fit_em(data, 2, 20, em_rng);
    REQUIRE(mix.size() == 2);
    double lo = std::min(mix[0].mean()[0], mix[1].mean()[0]);
    double hi = std::max(mix[0].mean()[0], mix[1].mean()[0]);
    CHECK(std::fabs(lo - 0.0) < 0.2);
    CHECK(std::fabs(hi - 10.0) < 0.2);
    CHECK(mix[0].weight == doctest::Approx(0.5).epsilon(0.1));
    CHECK(mix[1].weight == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("fit_em with zero iterations returns the initialization") {
    std::mt19937_64 rng(9);
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 20; ++i) data.push_back(testutil::random_vec(2, rng));

    std::mt19937_64 em_rng(4);
    auto mix = fit_em(data, 2, 0, em_rng);
    REQUIRE(mix.size() == 2);
    for (const auto& g : mix) {
        CHECK(g.weight == doctest::Approx(0.5));
        bool is_data_point = false;
        for (const auto& x : data) {
            if ((g.mean() - x).norm() < 1e-12) is_data_point = true;
        }
        CHECK(is_data_point);
    }
}

TEST_CASE("EM log-likelihood is monotone across iterations") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const int k = 1 + static_cast<int>(rng() % 3);
        std::vector<Eigen::VectorXd> data;
        const int n = 60 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) data.push_back(testutil::random_vec(d, rng, 2.0));

        const std::uint64_t seed = rng();
        double prev = -std::numeric_limits<double>::infinity();
        for (int iters = 1; iters <= 6; ++iters) {
            std::mt19937_64 em_rng(seed);
            auto mix = fit_em(data, k, iters, em_rng);
            const double ll = log_likelihood(std::span<const Gaussian>(mix), data);
            CHECK(ll >= prev - 1e-6);
            prev = ll;
        }
    }
}

TEST_CASE("AIC arithmetic and selection") {
    CHECK(aic(1, -0.918939) == doctest::Approx(7.837878).epsilon(1e-6));

    // One tight cluster: the extra component cannot pay for itself.
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 0.05);
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 80; ++i) data.push_back(vec({5.0 + n(rng), 5.0 + n(rng)}));
    std::mt19937_64 em_rng(6);
    auto mix = select_k_and_fit(data, 2, 10, em_rng);
    CHECK(mix.size() == 1);
}

TEST_CASE("select_k_and_fit with kmax=1 equals fit_em") {
    std::mt19937_64 rng(23);
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 40; ++i) data.push_back(testutil::random_vec(2, rng));

    std::mt19937_64 r1(8), r2(8);
    auto a = select_k_and_fit(data, 1, 10, r1);
    auto b = fit_em(data, 1, 10, r2);
    REQUIRE(a.size() == b.size());
    CHECK((a[0].mean() - b[0].mean()).norm() == doctest::Approx(0.0));
    CHECK((a[0].covariance() - b[0].covariance()).norm() == doctest::Approx(0.0));
}

TEST_CASE("train_initial sets cfc from the feature range") {
    std::vector<Observation> t;
    t.push_back({vec({0.0, 3.0}), 0, 0});
    t.push_back({vec({1.0, 2.0}), 0, 1});
    t.push_back({vec({10.0, 4.0}), 1, 2});
    t.push_back({vec({9.0, 5.0}), 1, 3});
    TrainOptions opts;
    opts.radius_divisor = 20.0;
    auto model = train_initial(t, opts);
    CHECK(model.cfc == doctest::Approx(0.5));
    CHECK(model.weight_sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.classes.size() == 2);
}

TEST_CASE("train_initial separates linearly separated blobs") {
    std::mt19937_64 rng(31);
    auto t = testutil::two_blobs(60, 6.0, rng);
    TrainOptions opts;
    opts.seed = 12;
    auto model = train_initial(t, opts);

    int correct = 0;
    for (const auto& obs : t) {
        if (predict(model, obs.features) == obs.label) ++correct;
    }
    CHECK(static_cast<double>(correct) / t.size() >= 0.95);

    // sp is the model's share of the training mass.
    CHECK(model.sp_sum() == doctest::Approx(static_cast<double>(t.size())).epsilon(1e-9));
}

TEST_CASE("train_initial theta equals the brute-force minimum pertinence") {
    std::mt19937_64 rng(37);
    auto t = testutil::two_blobs(40, 5.0, rng);
    TrainOptions opts;
    opts.seed = 3;
    auto model = train_initial(t, opts);

    double expected = std::numeric_limits<double>::infinity();
    for (const auto& obs : t) {
        double best = 0.0;
        for (const auto& g : model.gaussians) {
            if (g.label != obs.label) continue;
            best = std::max(best, g.density(obs.features));
        }
        expected = std::min(expected, best);
    }
    CHECK(model.theta == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("train_initial handles a singleton class") {
    std::mt19937_64 rng(41);
    auto t = testutil::two_blobs(20, 5.0, rng);
    t.push_back({vec({20.0, 20.0}), 7, 1000});
    TrainOptions opts;
    opts.seed = 5;
    auto model = train_initial(t, opts);
    CHECK(model.classes.count(7) == 1);
    CHECK(model.weight_sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(predict(model, vec({20.0, 20.0})) == 7);
}
