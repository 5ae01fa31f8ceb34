// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line each. Exit status is nonzero if any criterion fails.

#include "divw/gmm.hpp"
#include "divw/linalg.hpp"
#include "divw/metrics.hpp"
#include "divw/optimizer.hpp"
#include "divw/sampler.hpp"
#include "divw/vendi.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

using namespace divw;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = body();
    } catch (const std::exception& e) {
        detail = std::string(" (") + e.what() + ")";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), secs, detail.c_str());
    if (!ok) ++failures;
}

SimilarityMatrix example_block() {
    Matrix K = Matrix::Ones(4, 4);
    K(0, 1) = K(0, 2) = K(0, 3) = 0.0;
    K(1, 0) = K(2, 0) = K(3, 0) = 0.0;
    return SimilarityMatrix::from(K);
}

SimilarityMatrix random_similarity(Index n, Index d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Matrix X(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) X(i, j) = dist(rng);
        X.row(i).normalize();
    }
    Matrix K = X * X.transpose();
    K = ((K + K.transpose()) * 0.5).eval();
    K.diagonal().setOnes();
    return SimilarityMatrix::from(K);
}

Matrix random_gaussian(Index n, Index d, unsigned seed, double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Matrix X(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) X(i, j) = dist(rng) + shift;
    return X;
}

bool vendi_oracles() {
    const double vs_a = vendi_score(example_block(), ProbabilityVector::uniform(4)).score;
    Vector pb(2);
    pb << 0.25, 0.75;
    const double vs_b =
        vendi_score(SimilarityMatrix::from(Matrix::Identity(2, 2)), ProbabilityVector::from(pb))
            .score;
    Vector pc(4);
    pc << 0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0;
    const double vs_c = vendi_score(example_block(), ProbabilityVector::from(pc)).score;
    return std::abs(vs_a - 1.7548) <= 1e-3 && std::abs(vs_b - 1.7548) <= 1e-3 &&
           std::abs(vs_a - vs_b) <= 1e-9 && std::abs(vs_c - 2.0) <= 1e-9;
}

bool optimizer_recovers_maximizer() {
    OptimizerConfig cfg;
    cfg.gamma = 1.0;
    cfg.iterations = 500;
    cfg.learning_rate = 0.1;
    const OptimizationTrace trace = optimize_weights(example_block(), cfg);
    Vector target(4);
    target << 0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0;
    return (trace.final_probabilities.v - target).cwiseAbs().maxCoeff() <= 1e-3 &&
           trace.rows.back().vendi_score >= 1.999;
}

bool gamma_monotonicity() {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const SimilarityMatrix K = random_similarity(200, 32, 1000 + seed);
        const double uniform_vs = vendi_score(K, ProbabilityVector::uniform(200)).score;
        double vs[3];
        const double gammas[3] = {0.6, 0.8, 1.0};
        for (int g = 0; g < 3; ++g) {
            OptimizerConfig cfg;
            cfg.gamma = gammas[g];
            cfg.iterations = 200;
            cfg.learning_rate = 0.1;
            vs[g] = optimize_weights(K, cfg).rows.back().vendi_score;
        }
        if (!(vs[2] >= vs[1] - 1e-6 && vs[1] >= vs[0] - 1e-6 && vs[0] >= uniform_vs - 1e-6))
            return false;
    }
    return true;
}

bool gamma_zero_limit() {
    OptimizerConfig cfg;
    cfg.gamma = 0.0;
    const OptimizationTrace t0 = optimize_weights(random_similarity(50, 8, 77), cfg);
    if ((t0.final_probabilities.v.array() - 1.0 / 50.0).abs().maxCoeff() > 1e-6) return false;
    for (double gamma : {0.0, 0.6, 1.0}) {
        OptimizerConfig c;
        c.gamma = gamma;
        const OptimizationTrace t =
            optimize_weights(SimilarityMatrix::from(Matrix::Identity(16, 16)), c);
        if ((t.final_probabilities.v.array() - 1.0 / 16.0).abs().maxCoeff() > 1e-6) return false;
    }
    return true;
}

bool gradient_correctness() {
    int trial = 0;
    for (Index n : {4, 8, 16}) {
        const int per_size = n == 16 ? 6 : 7;  // 20 matrices total
        for (int t = 0; t < per_size; ++t, ++trial) {
            const SimilarityMatrix K =
                random_similarity(n, n, static_cast<unsigned>(2000 + trial));
            std::mt19937_64 rng(static_cast<std::uint64_t>(3000 + trial));
            Vector p(n);
            for (Index i = 0; i < n; ++i)
                p(i) = 0.2 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
            p /= p.sum();
            const ProbabilityVector pv = ProbabilityVector::from(p);

            Vector analytic = vendi_entropy_gradient(K, pv);
            analytic.array() -= analytic.mean();
            Vector fd(n);
            const double h = 1e-6;
            for (Index i = 0; i < n; ++i) {
                Vector dir = Vector::Constant(n, -1.0 / static_cast<double>(n));
                dir(i) += 1.0;
                const double hp =
                    vendi_score(K, ProbabilityVector{p + h * dir}).eigen_entropy;
                const double hm =
                    vendi_score(K, ProbabilityVector{p - h * dir}).eigen_entropy;
                fd(i) = (hp - hm) / (2.0 * h);
            }
            if ((analytic - fd).norm() > 1e-4 * std::max(1.0, fd.norm())) return false;
        }
    }
    return true;
}

bool duplication_invariance() {
    std::mt19937_64 rng(4000);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 3 + static_cast<Index>(rng() % 10);
        const SimilarityMatrix K =
            random_similarity(n, n, static_cast<unsigned>(5000 + trial));
        Vector p(n);
        for (Index i = 0; i < n; ++i)
            p(i) = 0.05 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
        p /= p.sum();
        const Index dup = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));

        Matrix K2(n + 1, n + 1);
        Vector p2(n + 1);
        auto src = [&](Index i) { return i < n ? i : dup; };
        for (Index i = 0; i <= n; ++i) {
            p2(i) = i < n ? p(i) : p(dup) / 2.0;
            for (Index j = 0; j <= n; ++j) K2(i, j) = K.entries(src(i), src(j));
        }
        p2(dup) /= 2.0;
        const double a = vendi_score(K, ProbabilityVector::from(p)).score;
        const double b =
            vendi_score(SimilarityMatrix::from(K2), ProbabilityVector::from(p2)).score;
        if (std::abs(a - b) > 1e-9) return false;
    }
    return true;
}

bool wfid_reductions() {
    const Matrix model = random_gaussian(500, 16, 6000);
    const Matrix data = random_gaussian(500, 16, 6001, 0.2);
    if (std::abs(wfid(model, data, Vector::Ones(500)) - fid(model, data)) > 1e-6) return false;
    return std::abs(fid(data, data)) < 1e-6;
}

bool pr_oracle_equivalence() {
    // Brute-force double-loop oracle, recomputed from scratch.
    auto oracle = [](const Matrix& real, const Matrix& gen, int k) {
        auto radii = [&](const Matrix& X) {
            std::vector<double> r(static_cast<std::size_t>(X.rows()));
            for (Index i = 0; i < X.rows(); ++i) {
                std::vector<double> d;
                for (Index j = 0; j < X.rows(); ++j)
                    if (i != j) d.push_back((X.row(i) - X.row(j)).norm());
                std::sort(d.begin(), d.end());
                r[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(k) - 1];
            }
            return r;
        };
        auto frac = [&](const Matrix& sup, const std::vector<double>& rad, const Matrix& q) {
            int hits = 0;
            for (Index a = 0; a < q.rows(); ++a) {
                bool inside = false;
                for (Index b = 0; b < sup.rows(); ++b)
                    if ((q.row(a) - sup.row(b)).norm() <= rad[static_cast<std::size_t>(b)])
                        inside = true;
                if (inside) ++hits;
            }
            return static_cast<double>(hits) / static_cast<double>(q.rows());
        };
        const auto rr = radii(real);
        const auto gr = radii(gen);
        return std::pair<double, double>{frac(real, rr, gen), frac(gen, gr, real)};
    };

    std::mt19937_64 rng(7000);
    for (int trial = 0; trial < 50; ++trial) {
        const Index nr = 10 + static_cast<Index>(rng() % 190);
        const Index ng = 10 + static_cast<Index>(rng() % 190);
        const Matrix real = random_gaussian(nr, 5, static_cast<unsigned>(7100 + trial));
        const Matrix gen =
            random_gaussian(ng, 5, static_cast<unsigned>(7200 + trial), 0.4);
        const PrResult pr = precision_recall(real, gen, 3);
        const auto [op, orec] = oracle(real, gen, 3);
        if (pr.precision != op || pr.recall != orec) return false;
    }
    const Matrix same = random_gaussian(40, 4, 7300);
    const PrResult id = precision_recall(same, same, 3);
    if (id.precision != 1.0 || id.recall != 1.0) return false;
    const PrResult far =
        precision_recall(same, random_gaussian(40, 4, 7301, 1e6), 3);
    return far.precision == 0.0 && far.recall == 0.0;
}

bool modified_is() {
    const int k = 7;
    Matrix onehot = Matrix::Zero(21, k);
    for (Index i = 0; i < 21; ++i) onehot(i, i % k) = 1.0;
    if (std::abs(mutual_information_score(onehot) - std::log(static_cast<double>(k))) > 1e-9)
        return false;
    return std::abs(mutual_information_score(Matrix::Constant(12, 4, 0.25))) <= 1e-12;
}

bool sampler_fidelity() {
    Vector p(2);
    p << 0.25, 0.75;
    const AliasTable t = build_alias_table(ProbabilityVector::from(p));
    const auto batch = sample_batch(t, 100000, 42);
    double ones = 0;
    for (const auto idx : batch) ones += static_cast<double>(idx);
    if (std::abs(ones / 100000.0 - 0.75) > 0.01) return false;

    // Chi-square with 1 dof; 99.9% quantile is 10.828.
    int passes = 0;
    for (int seed = 0; seed < 100; ++seed) {
        double count1 = 0;
        for (const auto idx : sample_batch(t, 100000, static_cast<std::uint64_t>(seed)))
            count1 += static_cast<double>(idx);
        const double e1 = 75000.0, e0 = 25000.0;
        const double d1 = count1 - e1, d0 = (100000.0 - count1) - e0;
        if (d1 * d1 / e1 + d0 * d0 / e0 < 10.828) ++passes;
    }
    return passes >= 99;
}

bool mode_balancing_demo() {
    const DemoReport r = mode_balance_demo(2000, 200, 1.0, 1);
    const bool minority_ok = std::abs(r.minority_mass_weighted - 0.5) <= 0.1 &&
                             std::abs(r.minority_mass_baseline - 0.09) <= 0.05;
    const bool vs_ok = r.vs_weighted_samples > r.vs_baseline_samples;
    const bool wfid_ok = r.wfid_weighted <= r.fid_weighted;
    if (!(minority_ok && vs_ok && wfid_ok)) {
        std::ostringstream oss;
        print_demo_summary(oss, r);
        std::fputs(oss.str().c_str(), stderr);
    }
    return minority_ok && vs_ok && wfid_ok;
}

bool determinism() {
    const SimilarityMatrix K = random_similarity(60, 10, 8000);
    OptimizerConfig cfg;
    cfg.gamma = 0.8;
    cfg.iterations = 100;
    auto run = [&] {
        const OptimizationTrace t = optimize_weights(K, cfg);
        // Serialize the way the CLI does: full-precision text.
        std::ostringstream oss;
        char buf[96];
        for (const auto& row : t.rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.loss, row.vendi_score,
                          row.entropy);
            oss << buf;
        }
        for (Index i = 0; i < t.final_probabilities.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\n", t.final_probabilities.v(i));
            oss << buf;
        }
        return oss.str();
    };
    const std::string a = run();
    const std::string b = run();
    if (a != b) return false;

    const DemoReport r1 = mode_balance_demo(200, 50, 1.0, 3);
    const DemoReport r2 = mode_balance_demo(200, 50, 1.0, 3);
    std::ostringstream c1, c2;
    write_demo_csv(c1, r1);
    write_demo_csv(c2, r2);
    return c1.str() == c2.str();
}

}  // namespace

int main() {
    criterion(1, "Vendi oracle values (worked examples)", vendi_oracles);
    criterion(2, "optimizer recovers the known maximizer", optimizer_recovers_maximizer);
    criterion(3, "gamma monotonicity of optimized VS", gamma_monotonicity);
    criterion(4, "gamma=0 limit and balanced-orthogonal case stay uniform", gamma_zero_limit);
    criterion(5, "analytic gradient matches finite differences", gradient_correctness);
    criterion(6, "duplication invariance of VS", duplication_invariance);
    criterion(7, "wFID reductions (uniform weights, identical sets)", wfid_reductions);
    criterion(8, "precision/recall matches the brute-force oracle", pr_oracle_equivalence);
    criterion(9, "modified IS: one-hot ln k, uniform 0", modified_is);
    criterion(10, "sampler fidelity and chi-square fit", sampler_fidelity);
    criterion(11, "end-to-end mode-balancing demo", mode_balancing_demo);
    criterion(12, "determinism of repeated runs", determinism);

    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
