#include "simboot/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "simboot/error.hpp"
#include "simboot/model_set.hpp"
#include "simboot/models.hpp"
#include "simboot/parallel.hpp"

namespace simboot {

namespace {

void sample_into(const DgpSpec& dgp, const std::vector<double>& mean, const RngSpec& rng,
                 std::uint64_t index, std::vector<double>& y) {
    auto gen = rng.substream(kDataStream).engine(index);
    std::normal_distribution<double> noise(0.0, 1.0);
    y.resize(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) y[i] = mean[i] + dgp.noise_sd * noise(gen);
}

}  // namespace

Dataset sample_dataset(const DgpSpec& dgp, const RngSpec& rng, std::uint64_t index) {
    dgp.validate();
    Dataset data;
    data.x = dgp.design();
    sample_into(dgp, dgp.mean_at_design(), rng, index, data.y);
    return data;
}

LrMatrix true_lr_matrix(const DgpSpec& dgp, const ModelGrid& grid, std::size_t datasets,
                        const RngSpec& rng, unsigned threads) {
    if (datasets == 0) throw InvalidArgument("at least one Monte-Carlo dataset is required");
    dgp.validate();
    const ModelSet models(dgp.design(), grid);
    const auto targets = models.from_targets(target_params(dgp, grid));
    const auto mean = dgp.mean_at_design();
    const std::size_t K = models.size();

    LrMatrix lr(K, datasets);
    const unsigned workers = std::max(1u, threads);
    std::vector<std::vector<double>> y(workers), column(workers, std::vector<double>(K));
    parallel_for(datasets, workers, [&](unsigned worker, std::size_t m) {
        sample_into(dgp, mean, rng, m, y[worker]);
        models.true_statistics(models.fit(y[worker]), targets, column[worker]);
        for (std::size_t k = 0; k < K; ++k) lr.at(k, m) = column[worker][k];
    });
    lr.finalize();
    return lr;
}

CorrectionResult mc_correction(const LrMatrix& true_lr, double alpha) {
    return multiplicity_correction(true_lr, alpha);
}

CoverageReport coverage_experiment(const DgpSpec& dgp, const ModelGrid& grid,
                                   std::span<const double> alphas, std::size_t datasets,
                                   std::size_t replicates, WeightScheme scheme, const RngSpec& rng,
                                   unsigned threads) {
    if (datasets == 0 || replicates == 0)
        throw InvalidArgument("coverage needs at least one dataset and one replicate");
    if (alphas.empty()) throw InvalidArgument("no confidence levels requested");
    for (double a : alphas) exceedance_budget(a, replicates);  // validates alpha
    dgp.validate();

    const ModelSet models(dgp.design(), grid);
    const auto targets = models.from_targets(target_params(dgp, grid));
    const auto mean = dgp.mean_at_design();
    const std::size_t K = models.size();
    const std::size_t A = alphas.size();

    // per-dataset outcomes, reduced after the parallel loop
    std::vector<char> covered(datasets * A, 0);
    std::vector<double> level(datasets * A, 0.0);
    std::vector<std::size_t> rejected(datasets, 0);
    std::vector<char> floors(datasets * A, 0);
    LrMatrix truth(K, datasets);

    const unsigned workers = std::max(1u, threads);
    std::vector<std::vector<double>> y(workers), stat(workers, std::vector<double>(K));
    parallel_for(datasets, workers, [&](unsigned worker, std::size_t m) {
        sample_into(dgp, mean, rng, m, y[worker]);
        const auto fits = models.fit(y[worker]);
        models.true_statistics(fits, targets, stat[worker]);
        for (std::size_t k = 0; k < K; ++k) truth.at(k, m) = stat[worker][k];

        const auto lr = build_lr_matrix(models, fits, replicates, scheme,
                                        rng.substream(kBootstrapStream).substream(m));
        rejected[m] = lr.rejected_replicates();
        for (std::size_t a = 0; a < A; ++a) {
            const auto corr = multiplicity_correction(lr, alphas[a]);
            bool inside = true;
            for (std::size_t k = 0; k < K && inside; ++k)
                inside = stat[worker][k] <= corr.critical_values[k];
            covered[m * A + a] = inside;
            level[m * A + a] = corr.level;
            floors[m * A + a] = corr.conservative_floor;
        }
    });
    truth.finalize();

    CoverageReport report;
    report.datasets = datasets;
    report.replicates = replicates;
    report.alphas.assign(alphas.begin(), alphas.end());
    for (std::size_t a = 0; a < A; ++a) {
        std::size_t hits = 0;
        double sum = 0.0;
        for (std::size_t m = 0; m < datasets; ++m) {
            hits += static_cast<std::size_t>(covered[m * A + a]);
            sum += 1.0 - level[m * A + a];
            report.conservative_floors += static_cast<std::size_t>(floors[m * A + a]);
        }
        report.coverage_frequency.push_back(static_cast<double>(hits) / static_cast<double>(datasets));
        report.mean_corrected_level_bootstrap.push_back(sum / static_cast<double>(datasets));
        report.mc_corrected_level.push_back(
            exceedance_budget(alphas[a], datasets) >= 1 ? 1.0 - mc_correction(truth, alphas[a]).level
                                                        : std::numeric_limits<double>::quiet_NaN());
    }
    for (auto r : rejected) report.rejected_replicates += r;
    return report;
}

CorrectionComparison correction_experiment(const DgpSpec& dgp, const ModelGrid& grid,
                                           std::span<const double> alphas, std::size_t datasets,
                                           std::size_t replicates, std::size_t repetitions,
                                           WeightScheme scheme, const RngSpec& rng,
                                           unsigned threads) {
    if (repetitions == 0) throw InvalidArgument("at least one repetition is required");
    if (alphas.empty()) throw InvalidArgument("no confidence levels requested");
    for (double a : alphas) {
        if (exceedance_budget(a, datasets) == 0 || exceedance_budget(a, replicates) == 0)
            throw InvalidAlpha("alpha * M and alpha * B must both be at least one");
    }
    dgp.validate();

    const ModelSet models(dgp.design(), grid);
    const std::size_t A = alphas.size();
    std::vector<double> mc(repetitions * A), boot(repetitions * A);
    std::vector<std::size_t> rejected(repetitions, 0);

    parallel_for(repetitions, std::max(1u, threads), [&](unsigned, std::size_t r) {
        const RngSpec rep = rng.substream(kRepetitionStream).substream(r);
        const auto truth = true_lr_matrix(dgp, grid, datasets, rep);
        // the bootstrap sample is drawn past the Monte-Carlo ones
        const auto data = sample_dataset(dgp, rep, datasets);
        const auto lr = build_lr_matrix(models, models.fit(data.y), replicates, scheme,
                                        rep.substream(kBootstrapStream));
        rejected[r] = lr.rejected_replicates();
        for (std::size_t a = 0; a < A; ++a) {
            mc[r * A + a] = 1.0 - mc_correction(truth, alphas[a]).level;
            boot[r * A + a] = 1.0 - multiplicity_correction(lr, alphas[a]).level;
        }
    });

    CorrectionComparison out;
    out.alphas.assign(alphas.begin(), alphas.end());
    out.repetitions = repetitions;
    for (std::size_t a = 0; a < A; ++a) {
        double smc = 0.0;
        double sb = 0.0;
        for (std::size_t r = 0; r < repetitions; ++r) {
            smc += mc[r * A + a];
            sb += boot[r * A + a];
        }
        out.mc_corrected_level.push_back(smc / static_cast<double>(repetitions));
        out.bootstrap_corrected_level.push_back(sb / static_cast<double>(repetitions));
    }
    for (auto r : rejected) out.rejected_replicates += r;
    return out;
}

}  // namespace simboot
