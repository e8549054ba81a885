#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "simboot/error.hpp"
#include "simboot/kernel.hpp"
#include "simboot/models.hpp"
#include "simboot/oracle.hpp"

using namespace simboot;

namespace {

DgpSpec flat_dgp(std::size_t n, double sd = 1.0) {
    DgpSpec dgp;
    dgp.n = n;
    dgp.mean = FlatMean{5.0};
    dgp.noise_sd = sd;
    return dgp;
}

}  // namespace

TEST_CASE("noiseless samples reproduce the mean function") {
    DgpSpec dgp;
    dgp.n = 401;
    dgp.noise_sd = 0.0;
    const auto d = sample_dataset(dgp, RngSpec{1}, 0);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.y[i] == dgp.f(d.x[i]));
    CHECK(d.y[140] == doctest::Approx(8.8).epsilon(1e-12));

    const auto lr = true_lr_matrix(flat_dgp(100, 0.0), ModelGrid::regression(Family::LocalConstant, 9, 0.2), 5,
                                   RngSpec{1});
    for (std::size_t k = 0; k < lr.models(); ++k)
        for (double v : lr.row(k)) CHECK(v == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("noise has mean zero and is reproducible") {
    DgpSpec dgp;
    dgp.n = 100000;
    const auto a = sample_dataset(dgp, RngSpec{2}, 7);
    const auto mean = dgp.mean_at_design();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a.y[i] - mean[i];
    CHECK(std::fabs(sum / dgp.n) < 0.02);
    CHECK(a.y == sample_dataset(dgp, RngSpec{2}, 7).y);
    CHECK(a.y != sample_dataset(dgp, RngSpec{2}, 8).y);
}

TEST_CASE("true statistics follow the exact Wilks identity") {
    DgpSpec dgp;
    dgp.n = 120;
    const RngSpec rng{3};
    for (auto family : {Family::LocalConstant, Family::LocalQuadratic}) {
        const auto grid = ModelGrid::regression(family, 5, 0.25);
        const auto lr = true_lr_matrix(dgp, grid, 8, rng);
        const auto targets = target_params(dgp, grid);
        for (std::size_t m = 0; m < 8; ++m) {
            const auto data = sample_dataset(dgp, rng, m);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto w = local_weights(grid.centers[k], grid.kernel, data.x);
                const auto fit = family == Family::LocalConstant ? lc_fit(data, w) : lq_fit(data, w);
                const auto& d2 = *fit.curvature;
                double q = 0.0;
                for (std::size_t i = 0; i < d2.rows(); ++i)
                    for (std::size_t j = 0; j < d2.cols(); ++j)
                        q += (fit.theta[i] - targets[k][i]) * d2(i, j) * (fit.theta[j] - targets[k][j]);
                CHECK(lr.at(k, m) == doctest::Approx(std::sqrt(q)).epsilon(1e-8));
                const double gap = loglik_gap(family, fit.theta, targets[k], data, w);
                CHECK(lr.at(k, m) == doctest::Approx(std::sqrt(2.0 * gap)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("local constant true statistic is a folded normal") {
    const auto dgp = flat_dgp(400);
    auto grid = ModelGrid::regression(Family::LocalConstant, 1, 0.3);
    const std::size_t M = 10000;
    const auto lr = true_lr_matrix(dgp, grid, M, RngSpec{4});
    const auto w = local_weights(grid.centers[0], grid.kernel, dgp.design());
    double s1 = 0.0, s2 = 0.0;
    for (double v : w) {
        s1 += v;
        s2 += v * v;
    }
    const double sd = std::sqrt(s2 / s1);
    const auto sorted = lr.sorted_row(0);
    double ks = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double cdf = std::erf(sorted[i] / (sd * std::sqrt(2.0)));
        ks = std::max({ks, std::fabs(cdf - double(i) / M), std::fabs(cdf - double(i + 1) / M)});
    }
    CHECK(ks < 0.02);
}

TEST_CASE("monte-carlo correction special cases") {
    const auto lr = true_lr_matrix(flat_dgp(200), ModelGrid::regression(Family::LocalConstant, 1, 0.3), 400,
                                   RngSpec{5});
    CHECK(mc_correction(lr, 0.1).level_count == 40);
    CHECK(mc_correction(lr, 0.25).level == doctest::Approx(0.25));
}

TEST_CASE("coverage experiment basics") {
    DgpSpec dgp;
    dgp.n = 100;
    const auto grid = ModelGrid::regression(Family::LocalConstant, 7, 0.3);
    const std::vector<double> alphas{0.1, 0.2, 0.3, 0.5};

    const auto one = coverage_experiment(dgp, grid, alphas, 1, 50, WeightScheme::Gaussian, RngSpec{6});
    for (double f : one.coverage_frequency) CHECK((f == 0.0 || f == 1.0));

    const auto a = coverage_experiment(dgp, grid, alphas, 40, 100, WeightScheme::Gaussian, RngSpec{6}, 1);
    const auto b = coverage_experiment(dgp, grid, alphas, 40, 100, WeightScheme::Gaussian, RngSpec{6}, 3);
    CHECK(a.coverage_frequency == b.coverage_frequency);
    CHECK(a.mean_corrected_level_bootstrap == b.mean_corrected_level_bootstrap);
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        CHECK(a.coverage_frequency[i] <= a.coverage_frequency[i - 1]);
        CHECK(a.mean_corrected_level_bootstrap[i] <= a.mean_corrected_level_bootstrap[i - 1]);
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) CHECK(a.mean_corrected_level_bootstrap[i] >= 1.0 - alphas[i]);

    CHECK_THROWS_AS(coverage_experiment(dgp, grid, alphas, 0, 10, WeightScheme::Gaussian, RngSpec{6}),
                    InvalidArgument);
}

TEST_CASE("single flat model covers at the nominal level") {
    const auto dgp = flat_dgp(400);
    const auto grid = ModelGrid::regression(Family::LocalConstant, 1, 0.3);
    const std::vector<double> alphas{0.1, 0.3, 0.5};
    const std::size_t M = 600;
    const auto r = coverage_experiment(dgp, grid, alphas, M, 1000, WeightScheme::Gaussian, RngSpec{7});
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double a = alphas[i];
        CHECK(r.coverage_frequency[i] >= 1.0 - a - 0.02 - 3.0 * std::sqrt(a * (1.0 - a) / M));
        CHECK(r.mean_corrected_level_bootstrap[i] == doctest::Approx(1.0 - a));
    }
}

TEST_CASE("wider bandwidth covers more often on paired seeds") {
    const DgpSpec dgp;
    const std::vector<double> alphas{0.1, 0.3, 0.5};
    const auto narrow = coverage_experiment(dgp, ModelGrid::regression(Family::LocalConstant, 71, 0.12), alphas,
                                            500, 500, WeightScheme::Gaussian, RngSpec{42});
    const auto wide = coverage_experiment(dgp, ModelGrid::regression(Family::LocalConstant, 71, 0.3), alphas,
                                          500, 500, WeightScheme::Gaussian, RngSpec{42});
    for (std::size_t i = 0; i < alphas.size(); ++i) CHECK(wide.coverage_frequency[i] >= narrow.coverage_frequency[i]);
}

TEST_CASE("correction experiment with a single model") {
    const auto dgp = flat_dgp(100);
    const auto grid = ModelGrid::regression(Family::LocalConstant, 1, 0.3);
    const std::vector<double> alphas{0.1, 0.25};
    const auto r = correction_experiment(dgp, grid, alphas, 200, 200, 3, WeightScheme::Gaussian, RngSpec{8});
    CHECK(r.mc_corrected_level[0] == doctest::Approx(0.9));
    CHECK(r.bootstrap_corrected_level[0] == doctest::Approx(0.9));
    CHECK(r.mc_corrected_level[1] == doctest::Approx(0.75));
    CHECK(r.bootstrap_corrected_level[1] == doctest::Approx(0.75));
    const auto t = correction_experiment(dgp, ModelGrid::regression(Family::LocalConstant, 5, 0.3), alphas, 100,
                                         100, 4, WeightScheme::Gaussian, RngSpec{8}, 3);
    const auto s = correction_experiment(dgp, ModelGrid::regression(Family::LocalConstant, 5, 0.3), alphas, 100,
                                         100, 4, WeightScheme::Gaussian, RngSpec{8}, 1);
    CHECK(t.mc_corrected_level == s.mc_corrected_level);
    CHECK(t.bootstrap_corrected_level == s.bootstrap_corrected_level);
    CHECK_THROWS_AS(correction_experiment(dgp, grid, std::vector<double>{0.001}, 100, 100, 1,
                                          WeightScheme::Gaussian, RngSpec{8}),
                    InvalidAlpha);
}
