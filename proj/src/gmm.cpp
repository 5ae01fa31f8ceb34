#include "divw/gmm.hpp"

#include "divw/linalg.hpp"
#include "divw/metrics.hpp"
#include "divw/optimizer.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace divw {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Index sample_discrete(const Vector& cumulative, std::mt19937_64& rng) {
    const double u = uniform01(rng) * cumulative(cumulative.size() - 1);
    for (Index i = 0; i < cumulative.size(); ++i)
        if (u < cumulative(i)) return i;
    return cumulative.size() - 1;
}

// Raise eigenvalues below the floor; leaves well-conditioned matrices untouched.
Matrix apply_floor(const Matrix& C, double floor) {
    EigenResult er = eigh(C);
    if (er.eigenvalues(er.eigenvalues.size() - 1) >= floor) return C;
    Vector l = er.eigenvalues.cwiseMax(floor);
    return er.eigenvectors * l.asDiagonal() * er.eigenvectors.transpose();
}

Matrix symmetric_sqrt(const Matrix& C) {
    EigenResult er = eigh(C);
    const Vector l = er.eigenvalues.cwiseMax(0.0);
    return er.eigenvectors * l.array().sqrt().matrix().asDiagonal() * er.eigenvectors.transpose();
}

// log N(x | mu, C) for all rows at once; C must be positive definite.
Vector gaussian_log_density(const Matrix& X, const Vector& mu, const Matrix& C) {
    const Eigen::LLT<Matrix> llt(C);
    if (llt.info() != Eigen::Success)
        throw NumericalError("covariance not positive definite in GMM E-step");
    const Matrix centered = X.rowwise() - mu.transpose();
    const Matrix solved = llt.solve(centered.transpose());
    const Vector quad = (centered.transpose().cwiseProduct(solved)).colwise().sum();
    double log_det = 0.0;
    for (Index i = 0; i < C.rows(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const double d = static_cast<double>(C.rows());
    return (-0.5 * (d * std::log(2.0 * M_PI) + log_det)) - 0.5 * quad.array();
}

// Weighted k-means++ seeding: first center by weight, later centers by
// weight * squared distance to the nearest existing center.
std::vector<Index> kmeanspp_seeds(const Matrix& X, const Vector& wn, int m,
                                  std::mt19937_64& rng) {
    const Index n = X.rows();
    std::vector<Index> seeds;
    Vector cum(n);
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) cum(i) = (acc += wn(i));
    seeds.push_back(sample_discrete(cum, rng));

    Vector min_d2 = (X.rowwise() - X.row(seeds[0])).rowwise().squaredNorm();
    while (static_cast<int>(seeds.size()) < m) {
        acc = 0.0;
        for (Index i = 0; i < n; ++i) cum(i) = (acc += wn(i) * min_d2(i));
        const Index next = acc > 0.0 ? sample_discrete(cum, rng)
                                     : static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
        seeds.push_back(next);
        min_d2 = min_d2.cwiseMin((X.rowwise() - X.row(next)).rowwise().squaredNorm());
    }
    return seeds;
}

}  // namespace

GmmFit fit_weighted_gmm(const Matrix& X, const Vector& sample_weights, int m,
                        const GmmConfig& config) {
    const Index n = X.rows();
    const Index d = X.cols();
    if (n < 1 || d < 1) throw ValidationError("empty feature matrix");
    if (m < 1 || m > n) throw ValidationError("component count must satisfy 1 <= m <= n");
    if (sample_weights.size() != n) throw ValidationError("sample_weights length mismatch");
    for (Index i = 0; i < n; ++i)
        if (!(sample_weights(i) >= 0.0))
            throw ValidationError("negative sample weight at index " + std::to_string(i));
    const double total = sample_weights.sum();
    if (total <= 0.0) throw ValidationError("sample weights sum to zero");
    const Vector wn = sample_weights / total;

    const GaussianStats global = weighted_gaussian_stats(X, wn);
    double floor = config.covariance_floor;
    if (floor < 0.0)
        floor = 1e-6 * global.covariance.trace() / static_cast<double>(d);
    if (floor <= 0.0) floor = 1e-12;

    std::mt19937_64 rng(config.seed);
    GmmModel model;
    model.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
    model.means.resize(m, d);
    const Matrix init_cov = apply_floor(global.covariance, floor);
    const auto seeds = kmeanspp_seeds(X, wn, m, rng);
    for (int k = 0; k < m; ++k) model.means.row(k) = X.row(seeds[static_cast<std::size_t>(k)]);

    // A few weighted Lloyd rounds, then per-cluster statistics as the EM start.
    // Starting every component from the global covariance lets one component
    // straddle several modes when the sample weights are heavy-tailed.
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    for (int round = 0; round < 10; ++round) {
        for (Index i = 0; i < n; ++i) {
            double best = (X.row(i) - model.means.row(0)).squaredNorm();
            int arg = 0;
            for (int k = 1; k < m; ++k) {
                const double dist = (X.row(i) - model.means.row(k)).squaredNorm();
                if (dist < best) {
                    best = dist;
                    arg = k;
                }
            }
            assign[static_cast<std::size_t>(i)] = arg;
        }
        for (int k = 0; k < m; ++k) {
            Vector mu = Vector::Zero(d);
            double mass = 0.0;
            for (Index i = 0; i < n; ++i) {
                if (assign[static_cast<std::size_t>(i)] != k) continue;
                mu += wn(i) * X.row(i).transpose();
                mass += wn(i);
            }
            if (mass > 0.0) model.means.row(k) = (mu / mass).transpose();
        }
    }
    for (int k = 0; k < m; ++k) {
        Matrix cov = Matrix::Zero(d, d);
        double mass = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (assign[static_cast<std::size_t>(i)] != k) continue;
            const Vector c = X.row(i).transpose() - model.means.row(k).transpose();
            cov += wn(i) * c * c.transpose();
            mass += wn(i);
        }
        model.covariances.push_back(mass > 0.0 ? apply_floor(cov / mass, floor) : init_cov);
        model.weights(k) = mass > 0.0 ? mass : 1.0 / static_cast<double>(n);
    }
    model.weights /= model.weights.sum();

    GmmFit fit;
    std::vector<bool> reseeded(static_cast<std::size_t>(m), false);
    Matrix log_resp(n, m);

    for (int iter = 0; iter < config.max_iters; ++iter) {
        // E-step in log domain.
        for (int k = 0; k < m; ++k)
            log_resp.col(k) = gaussian_log_density(X, model.means.row(k).transpose(),
                                                   model.covariances[static_cast<std::size_t>(k)])
                                  .array() +
                              std::log(model.weights(k));
        const Vector row_max = log_resp.rowwise().maxCoeff();
        const Vector log_norm =
            ((log_resp.colwise() - row_max).array().exp().rowwise().sum().log() +
             row_max.array())
                .matrix();
        const double ll = wn.dot(log_norm);
        if (!std::isfinite(ll)) throw NumericalError("non-finite log-likelihood in GMM fit");
        fit.log_likelihood.push_back(ll);
        fit.iterations = iter + 1;
        if (iter > 0 && ll - fit.log_likelihood[static_cast<std::size_t>(iter) - 1] <
                            config.tol &&
            ll >= fit.log_likelihood[static_cast<std::size_t>(iter) - 1] - 1e-9)
            break;

        const Matrix resp = (log_resp.colwise() - log_norm).array().exp();

        // M-step with per-sample weights folded into the responsibilities.
        for (int k = 0; k < m; ++k) {
            const Vector r = resp.col(k).cwiseProduct(wn);
            const double nk = r.sum();
            if (nk < 1e-12) {
                if (reseeded[static_cast<std::size_t>(k)])
                    throw NumericalError("GMM component " + std::to_string(k) +
                                         " collapsed twice");
                reseeded[static_cast<std::size_t>(k)] = true;
                Vector cum(n);
                double acc = 0.0;
                for (Index i = 0; i < n; ++i) cum(i) = (acc += wn(i));
                model.means.row(k) = X.row(sample_discrete(cum, rng));
                model.covariances[static_cast<std::size_t>(k)] = init_cov;
                model.weights(k) = 1.0 / static_cast<double>(n);
                model.weights /= model.weights.sum();
                continue;
            }
            model.weights(k) = nk;
            const Vector mu = X.transpose() * r / nk;
            const Matrix centered = X.rowwise() - mu.transpose();
            Matrix cov = centered.transpose() * r.asDiagonal() * centered / nk;
            cov = ((cov + cov.transpose()) * 0.5).eval();
            model.means.row(k) = mu.transpose();
            model.covariances[static_cast<std::size_t>(k)] = apply_floor(cov, floor);
        }
        model.weights /= model.weights.sum();
    }

    fit.model = std::move(model);
    return fit;
}

Matrix sample_gmm(const GmmModel& model, std::int64_t count, std::uint64_t seed) {
    if (count < 1) throw ValidationError("sample count must be positive");
    const int m = model.components();
    if (m < 1) throw ValidationError("empty model");
    const Index d = model.means.cols();

    std::vector<Matrix> roots;
    roots.reserve(static_cast<std::size_t>(m));
    for (const auto& C : model.covariances) roots.push_back(symmetric_sqrt(C));

    Vector cum(m);
    double acc = 0.0;
    for (int k = 0; k < m; ++k) cum(k) = (acc += model.weights(k));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(count, d);
    Vector z(d);
    for (std::int64_t i = 0; i < count; ++i) {
        const Index k = sample_discrete(cum, rng);
        for (Index j = 0; j < d; ++j) z(j) = normal(rng);
        out.row(i) = model.means.row(k) + (roots[static_cast<std::size_t>(k)] * z).transpose();
    }
    return out;
}

DemoReport mode_balance_demo(std::int64_t n_major, std::int64_t n_minor, double gamma,
                             std::uint64_t seed) {
    if (n_minor < 10 || n_major < n_minor)
        throw ValidationError("demo requires n_major >= n_minor >= 10");

    constexpr Index d = 8;
    constexpr double kCenterScale = 4.0;
    constexpr double kNoise = 0.3;
    const Index n = static_cast<Index>(n_major + n_minor);

    // Two near-orthogonal modes on the unit sphere after row normalization.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, kNoise);
    FeatureMatrix raw;
    raw.data.resize(n, d);
    raw.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const bool minor = i >= static_cast<Index>(n_major);
        for (Index j = 0; j < d; ++j) raw.data(i, j) = normal(rng);
        raw.data(i, minor ? 1 : 0) += kCenterScale;
        raw.labels[static_cast<std::size_t>(i)] = minor ? 1 : 0;
    }
    const FeatureMatrix X = normalize_rows(raw);

    OptimizerConfig ocfg;
    ocfg.gamma = gamma;
    ocfg.iterations = 150;
    ocfg.learning_rate = 0.1;
    ocfg.seed = seed;
    const OptimizationTrace trace = optimize_weights_features(X.data, ocfg);
    const Vector& p = trace.final_probabilities.v;

    GmmConfig gcfg;
    gcfg.seed = seed;
    const GmmModel baseline = fit_weighted_gmm(X.data, Vector::Ones(n), 2, gcfg).model;
    const GmmModel weighted = fit_weighted_gmm(X.data, p, 2, gcfg).model;

    // Empirical mode centers from the generating labels.
    Vector mu_major = Vector::Zero(d), mu_minor = Vector::Zero(d);
    for (Index i = 0; i < n; ++i)
        (raw.labels[static_cast<std::size_t>(i)] == 1 ? mu_minor : mu_major) +=
            X.data.row(i).transpose();
    mu_major /= static_cast<double>(n_major);
    mu_minor /= static_cast<double>(n_minor);

    auto minority_mass = [&](const GmmModel& model) {
        double mass = 0.0;
        for (int k = 0; k < model.components(); ++k) {
            const Vector mu = model.means.row(k).transpose();
            if ((mu - mu_minor).norm() < (mu - mu_major).norm()) mass += model.weights(k);
        }
        return mass;
    };

    DemoReport r;
    r.n_major = n_major;
    r.n_minor = n_minor;
    r.gamma = gamma;
    r.seed = seed;
    for (Index i = static_cast<Index>(n_major); i < n; ++i) r.minority_probability_mass += p(i);
    r.minority_mass_baseline = minority_mass(baseline);
    r.minority_mass_weighted = minority_mass(weighted);
    r.vs_data_uniform = sample_vendi(X);

    constexpr std::int64_t kDraws = 1000;
    const Matrix baseline_draws = sample_gmm(baseline, kDraws, seed + 1);
    const Matrix weighted_draws = sample_gmm(weighted, kDraws, seed + 2);
    r.vs_baseline_samples = sample_vendi(FeatureMatrix{baseline_draws, {}});
    r.vs_weighted_samples = sample_vendi(FeatureMatrix{weighted_draws, {}});
    r.fid_baseline = fid(baseline_draws, X.data);
    r.fid_weighted = fid(weighted_draws, X.data);
    r.wfid_baseline = wfid(baseline_draws, X.data, p);
    r.wfid_weighted = wfid(weighted_draws, X.data, p);
    return r;
}

void write_demo_csv(std::ostream& out, const DemoReport& r) {
    char buf[32];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "metric_name,value\n";
    out << "n_major," << r.n_major << "\n";
    out << "n_minor," << r.n_minor << "\n";
    out << "gamma," << fmt(r.gamma) << "\n";
    out << "seed," << r.seed << "\n";
    out << "minority_probability_mass," << fmt(r.minority_probability_mass) << "\n";
    out << "minority_mass_baseline," << fmt(r.minority_mass_baseline) << "\n";
    out << "minority_mass_weighted," << fmt(r.minority_mass_weighted) << "\n";
    out << "vs_data_uniform," << fmt(r.vs_data_uniform) << "\n";
    out << "vs_baseline_samples," << fmt(r.vs_baseline_samples) << "\n";
    out << "vs_weighted_samples," << fmt(r.vs_weighted_samples) << "\n";
    out << "fid_baseline," << fmt(r.fid_baseline) << "\n";
    out << "fid_weighted," << fmt(r.fid_weighted) << "\n";
    out << "wfid_baseline," << fmt(r.wfid_baseline) << "\n";
    out << "wfid_weighted," << fmt(r.wfid_weighted) << "\n";
}

void print_demo_summary(std::ostream& out, const DemoReport& r) {
    out << "Mode-balance demo (" << r.n_major << " major / " << r.n_minor
        << " minor, gamma=" << r.gamma << ", seed=" << r.seed << ")\n"
        << "  optimized minority probability mass: " << r.minority_probability_mass << "\n"
        << "  minority mode mass   baseline: " << r.minority_mass_baseline
        << "   diversity-weighted: " << r.minority_mass_weighted << "\n"
        << "  sampled Vendi Score  baseline: " << r.vs_baseline_samples
        << "   diversity-weighted: " << r.vs_weighted_samples << " (data uniform: "
        << r.vs_data_uniform << ")\n"
        << "  FID (unweighted)     baseline: " << r.fid_baseline
        << "   diversity-weighted: " << r.fid_weighted << "\n"
        << "  wFID (weighted)      baseline: " << r.wfid_baseline
        << "   diversity-weighted: " << r.wfid_weighted << "\n";
}

}  // namespace divw
