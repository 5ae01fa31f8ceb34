// divw: diversity-weight pipelines on the command line.
//   gram      features -> similarity matrix
//   optimize  similarity/features -> diversity weights + trace
//   sample    weights -> index batches
//   metrics   model vs data evaluation report
//   demo      synthetic end-to-end mode-balancing run

#include "divw/gmm.hpp"
#include "divw/io.hpp"
#include "divw/linalg.hpp"
#include "divw/metrics.hpp"
#include "divw/optimizer.hpp"
#include "divw/sampler.hpp"
#include "divw/vendi.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace divw;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_dwm1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    return in.read(magic, 4) && std::string(magic, 4) == "DWM1";
}

FeatureMatrix load_features_auto(const std::string& path, const std::string& format) {
    if (format == "csv") return load_features(path, FileFormat::csv);
    if (format == "binary") return load_features(path, FileFormat::binary);
    return load_features(path, is_dwm1(path) ? FileFormat::binary : FileFormat::csv);
}

// Flat key=value manifest; identical parameters and inputs hash to identical bytes.
struct Manifest {
    std::map<std::string, std::string> entries;

    void set(const std::string& key, const std::string& value) { entries[key] = value; }
    void set(const std::string& key, double value) { entries[key] = fmt(value); }
    void set(const std::string& key, long long value) { entries[key] = std::to_string(value); }
    void input(const std::string& name, const std::string& path) {
        entries["input." + name + ".path"] = path;
        char buf[24];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(hash_file(path)));
        entries["input." + name + ".hash"] = buf;
    }
    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ParseError("cannot write manifest: " + path);
        for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
    }
};

Vector load_weight_vector(const std::string& path) {
    if (is_dwm1(path)) {
        Matrix m = load_dwm1(path);
        if (m.cols() != 1)
            throw ValidationError(path + ": expected an n x 1 weight vector, got " +
                                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        return m.col(0);
    }
    // CSV: either a single column, or the optimizer's weights file with a
    // "probability" column.
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::string header;
    std::getline(in, header);
    int prob_col = -1;
    if (header.find("probability") != std::string::npos) {
        std::stringstream ss(header);
        std::string field;
        for (int i = 0; std::getline(ss, field, ','); ++i)
            if (field == "probability") prob_col = i;
    }
    FeatureMatrix f = load_features(path, FileFormat::csv);
    if (prob_col >= 0) return f.data.col(prob_col >= f.data.cols() ? 0 : prob_col);
    if (f.data.cols() != 1)
        throw ValidationError(path + ": expected one weight per line");
    return f.data.col(0);
}

ProbabilityVector to_probabilities(Vector w) {
    const double s = w.sum();
    if (s <= 0.0) throw ValidationError("weights must have positive sum");
    return ProbabilityVector::from(w / s);
}

int cmd_gram(const std::string& features_path, const std::string& format,
             const std::string& output_path, bool no_normalize) {
    FeatureMatrix X = load_features_auto(features_path, format);
    if (!no_normalize) X = normalize_rows(X);
    const SimilarityMatrix K = gram_matrix(X);
    save_dwm1(output_path, K.entries);

    Manifest m;
    m.set("command", std::string("gram"));
    m.set("format", format);
    m.set("normalize", std::string(no_normalize ? "false" : "true"));
    m.set("output", output_path);
    m.input("features", features_path);
    m.write(output_path + ".manifest");
    return 0;
}

int cmd_optimize(const std::string& similarity_path, const std::string& features_path,
                 const std::string& format, const OptimizerConfig& cfg,
                 const std::string& prefix) {
    cfg.validate();
    OptimizationTrace trace;
    std::vector<long> labels;
    Manifest m;
    if (!similarity_path.empty()) {
        const SimilarityMatrix K = SimilarityMatrix::from(load_dwm1(similarity_path));
        trace = optimize_weights(K, cfg);
        m.input("similarity", similarity_path);
    } else {
        FeatureMatrix X = normalize_rows(load_features_auto(features_path, format));
        labels = X.labels;
        trace = optimize_weights_features(X.data, cfg);
        m.input("features", features_path);
    }

    const Vector& p = trace.final_probabilities.v;
    save_dwm1(prefix + "_weights.dwm1", p);

    std::ofstream wcsv(prefix + "_weights.csv");
    wcsv << "index,label,probability,relative_weight\n";
    for (Index i = 0; i < p.size(); ++i) {
        wcsv << i << ",";
        if (!labels.empty()) wcsv << labels[static_cast<std::size_t>(i)];
        wcsv << "," << fmt(p(i)) << "," << fmt(trace.final_relative_weights(i)) << "\n";
    }

    std::ofstream tcsv(prefix + "_trace.csv");
    tcsv << "iteration,loss,vs,entropy,lr\n";
    for (const auto& row : trace.rows)
        tcsv << row.iteration << "," << fmt(row.loss) << "," << fmt(row.vendi_score) << ","
             << fmt(row.entropy) << "," << fmt(row.learning_rate) << "\n";

    m.set("command", std::string("optimize"));
    m.set("gamma", cfg.gamma);
    m.set("iterations", static_cast<long long>(cfg.iterations));
    m.set("learning_rate", cfg.learning_rate);
    m.set("adam_beta1", cfg.adam_beta1);
    m.set("adam_beta2", cfg.adam_beta2);
    m.set("adam_epsilon", cfg.adam_epsilon);
    m.set("lr_decay_factor", cfg.lr_decay_factor);
    m.set("lr_decay_every", static_cast<long long>(cfg.lr_decay_every));
    m.set("seed", static_cast<long long>(cfg.seed));
    m.set("output_prefix", prefix);
    m.write(prefix + ".manifest");
    return 0;
}

int cmd_sample(const std::string& weights_path, long long batch_size, unsigned long long seed,
               const std::string& output_path, const std::string& features_path,
               const std::string& materialize_path) {
    const ProbabilityVector p = to_probabilities(load_weight_vector(weights_path));
    const AliasTable table = build_alias_table(p);
    const auto batch = sample_batch(table, batch_size, seed);

    std::ofstream out(output_path);
    if (!out) throw ParseError("cannot open file for writing: " + output_path);
    out << "index\n";
    for (const auto idx : batch) out << idx << "\n";

    Manifest m;
    m.set("command", std::string("sample"));
    m.set("batch_size", batch_size);
    m.set("seed", static_cast<long long>(seed));
    m.set("output", output_path);
    m.input("weights", weights_path);

    if (!materialize_path.empty()) {
        if (features_path.empty())
            throw ValidationError("--materialize requires --features");
        const FeatureMatrix X = load_features_auto(features_path, "auto");
        if (X.rows() != p.size())
            throw ValidationError("features row count does not match weight length");
        Matrix rows(static_cast<Index>(batch.size()), X.cols());
        for (std::size_t i = 0; i < batch.size(); ++i)
            rows.row(static_cast<Index>(i)) = X.data.row(batch[i]);
        save_dwm1(materialize_path, rows);
        m.input("features", features_path);
        m.set("materialize", materialize_path);
    }
    m.write(output_path + ".manifest");
    return 0;
}

int cmd_metrics(const std::string& model_path, const std::string& data_path,
                const std::string& weights_path, int k, const std::string& cond_path,
                const std::string& pr_distance, const std::string& report_path) {
    const FeatureMatrix model = load_features_auto(model_path, "auto");
    const FeatureMatrix data = load_features_auto(data_path, "auto");
    const PrDistance dist =
        pr_distance == "cosine" ? PrDistance::cosine : PrDistance::euclidean;

    std::vector<std::pair<std::string, double>> report;
    report.emplace_back("vs_model", sample_vendi(model));
    report.emplace_back("vs_data", sample_vendi(data));
    report.emplace_back("fid", fid(model.data, data.data));
    const PrResult pr = precision_recall(data.data, model.data, k, dist);
    report.emplace_back("precision", pr.precision);
    report.emplace_back("recall", pr.recall);

    Manifest m;
    m.set("command", std::string("metrics"));
    m.set("k", static_cast<long long>(k));
    m.set("pr_distance", pr_distance);
    m.set("report", report_path);
    m.input("model", model_path);
    m.input("data", data_path);

    if (!weights_path.empty()) {
        const Vector w = load_weight_vector(weights_path);
        report.emplace_back("wfid", wfid(model.data, data.data, w));
        m.input("weights", weights_path);
    }
    if (!cond_path.empty()) {
        const FeatureMatrix cond = load_features_auto(cond_path, "auto");
        report.emplace_back("mutual_information", mutual_information_score(cond.data));
        m.input("cond_probs", cond_path);
    }

    std::ofstream out(report_path);
    if (!out) throw ParseError("cannot open file for writing: " + report_path);
    out << "metric_name,value\n";
    for (const auto& [name, value] : report) out << name << "," << fmt(value) << "\n";
    m.write(report_path + ".manifest");
    return 0;
}

int cmd_demo(long long n_major, long long n_minor, double gamma, unsigned long long seed,
             const std::string& report_path) {
    const DemoReport r = mode_balance_demo(n_major, n_minor, gamma, seed);
    std::ofstream out(report_path);
    if (!out) throw ParseError("cannot open file for writing: " + report_path);
    write_demo_csv(out, r);
    print_demo_summary(std::cout, r);

    Manifest m;
    m.set("command", std::string("demo"));
    m.set("n_major", n_major);
    m.set("n_minor", n_minor);
    m.set("gamma", gamma);
    m.set("seed", static_cast<long long>(seed));
    m.set("report", report_path);
    m.write(report_path + ".manifest");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diversity weights toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");

    // gram
    std::string g_features, g_format = "auto", g_output;
    bool g_no_normalize = false;
    auto* gram = app.add_subcommand("gram", "compute a Gram similarity matrix from features");
    gram->add_option("--features", g_features, "input feature file (CSV or DWM1)")->required();
    gram->add_option("--format", g_format, "input format: auto, csv, binary")
        ->check(CLI::IsMember({"auto", "csv", "binary"}));
    gram->add_option("--output", g_output, "output DWM1 similarity matrix")->required();
    gram->add_flag("--no-normalize", g_no_normalize, "skip row normalization");

    // optimize
    std::string o_similarity, o_features, o_format = "auto", o_prefix;
    divw::OptimizerConfig ocfg;
    auto* opt = app.add_subcommand("optimize", "optimize diversity weights");
    opt->add_option("--similarity", o_similarity, "DWM1 similarity matrix input");
    opt->add_option("--features", o_features, "feature file input (normalized internally)");
    opt->add_option("--format", o_format, "feature input format")
        ->check(CLI::IsMember({"auto", "csv", "binary"}));
    opt->add_option("--output-prefix", o_prefix, "prefix for weight/trace/manifest files")
        ->required();
    opt->add_option("--gamma", ocfg.gamma, "loss balance in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    opt->add_option("--iters", ocfg.iterations, "number of iterations")
        ->check(CLI::PositiveNumber);
    opt->add_option("--lr", ocfg.learning_rate, "initial learning rate")
        ->check(CLI::PositiveNumber);
    opt->add_option("--lr-decay-factor", ocfg.lr_decay_factor, "exponential decay factor");
    opt->add_option("--lr-decay-every", ocfg.lr_decay_every, "decay period in iterations")
        ->check(CLI::PositiveNumber);
    opt->add_option("--seed", ocfg.seed, "random seed");

    // sample
    std::string s_weights, s_output, s_features, s_materialize;
    long long s_batch = 0;
    unsigned long long s_seed = 0;
    auto* smp = app.add_subcommand("sample", "draw index batches from diversity weights");
    smp->add_option("--weights", s_weights, "weight vector (DWM1 n x 1 or CSV)")->required();
    smp->add_option("--batch-size", s_batch, "number of draws")
        ->required()
        ->check(CLI::PositiveNumber);
    smp->add_option("--seed", s_seed, "random seed");
    smp->add_option("--output", s_output, "output CSV index list")->required();
    smp->add_option("--features", s_features, "feature file for --materialize");
    smp->add_option("--materialize", s_materialize, "write sampled feature rows to this DWM1");

    // metrics
    std::string m_model, m_data, m_weights, m_cond, m_report, m_prdist = "euclidean";
    int m_k = 3;
    auto* met = app.add_subcommand("metrics", "evaluate model features against data features");
    met->add_option("--model", m_model, "model (generated) feature file")->required();
    met->add_option("--data", m_data, "data (real) feature file")->required();
    met->add_option("--weights", m_weights, "diversity weights for wFID");
    met->add_option("--k", m_k, "k-NN parameter for precision/recall")
        ->check(CLI::PositiveNumber);
    met->add_option("--cond-probs", m_cond, "class-probability matrix for the MI score");
    met->add_option("--pr-distance", m_prdist, "precision/recall distance")
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    met->add_option("--report", m_report, "output CSV report")->required();

    // demo
    long long d_major = 2000, d_minor = 200;
    double d_gamma = 1.0;
    unsigned long long d_seed = 0;
    std::string d_report;
    auto* demo = app.add_subcommand("demo", "synthetic mode-balancing demonstration");
    demo->add_option("--n-major", d_major, "majority mode size");
    demo->add_option("--n-minor", d_minor, "minority mode size");
    demo->add_option("--gamma", d_gamma, "loss balance")->check(CLI::Range(0.0, 1.0));
    demo->add_option("--seed", d_seed, "random seed");
    demo->add_option("--report", d_report, "output CSV report")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gram->parsed()) return cmd_gram(g_features, g_format, g_output, g_no_normalize);
        if (opt->parsed()) {
            if (o_similarity.empty() == o_features.empty())
                throw divw::ValidationError(
                    "optimize needs exactly one of --similarity or --features");
            return cmd_optimize(o_similarity, o_features, o_format, ocfg, o_prefix);
        }
        if (smp->parsed())
            return cmd_sample(s_weights, s_batch, s_seed, s_output, s_features, s_materialize);
        if (met->parsed())
            return cmd_metrics(m_model, m_data, m_weights, m_k, m_cond, m_prdist, m_report);
        if (demo->parsed()) return cmd_demo(d_major, d_minor, d_gamma, d_seed, d_report);
    } catch (const divw::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const divw::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
