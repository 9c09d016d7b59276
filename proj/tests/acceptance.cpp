// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include "classmap/core.hpp"
#include "classmap/diagnostics.hpp"
#include "classmap/dissimilarity.hpp"
#include "classmap/error.hpp"
#include "classmap/farness.hpp"
#include "classmap/io.hpp"
#include "classmap/loess.hpp"
#include "classmap/normal.hpp"
#include "classmap/serialize.hpp"
#include "cli_support.hpp"
#include "gower_oracle.hpp"
#include "support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace classmap;

namespace {

// Pinned tolerances and limits.
constexpr double kPacTol = 1e-12;
constexpr double kGowerTol = 1e-12;
constexpr double kYeoJohnsonTol = 1e-12;
constexpr double kKsLimit = 0.10;
constexpr double kAffineTol = 1e-8;
constexpr double kWeightedMeanTol = 1e-12;
constexpr double kLoessLinearTol = 1e-8;
constexpr double kCutoffValue = 2.3263;
constexpr double kCutoffTol = 1e-4;
constexpr double kQuantileRelTol = 1e-9;
constexpr double kSummaryTol = 1e-12;

constexpr double kSeconds1 = 1.0;
constexpr double kSeconds2 = 2.0;
constexpr double kSeconds5 = 5.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects failure reasons; `detail` holds the measured values on success.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_++ < 3)
            notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
    }
    void note(const std::string& what) { info_ << (info_.tellp() > 0 ? ", " : "") << what; }
    Outcome outcome() const {
        if (failures_ == 0)
            return {true, info_.str()};
        return {false, std::to_string(failures_) + " failure(s): " + notes_.str()};
    }

private:
    int failures_ = 0;
    std::ostringstream notes_;
    std::ostringstream info_;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Outcome binary_pac_identity() {
    Check c;
    std::mt19937_64 rng(1001);
    const auto catalog = test_support::numbered_catalog(2);
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (int m = 0; m < 1000; ++m) {
        const Eigen::MatrixXd p = test_support::random_posteriors(rng, 50, 2);
        const auto labels = test_support::random_labels(rng, 50, 2);
        const Eigen::VectorXd pac = compute_pac(PosteriorMatrix(p, catalog), labels);
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            worst = std::max(worst, std::abs(pac(i) - (1.0 - p(i, labels[i]))));
    }
    const double elapsed = seconds_since(start);
    c.expect(worst <= kPacTol, "max |PAC - (1 - p_own)| = " + sci(worst));
    c.expect(elapsed < kSeconds1, "took " + sci(elapsed) + " s");
    c.note("max err " + sci(worst));
    c.note(sci(elapsed) + " s");
    return c.outcome();
}

Outcome titanic_leaf() {
    Check c;
    const ClassCatalog catalog({"survived", "casualty"});
    Eigen::MatrixXd p(1, 2);
    p << 0.19, 0.81;
    Eigen::VectorXi given(1);
    given << 1;
    const LabelVector labels(given, 2);
    const auto scores = score_cases(PosteriorMatrix(p, catalog), labels);
    // Exact in binary64: 0.19 + 0.81 rounds to 1, and 1 - 2 * 0.19 rounds to 0.62.
    c.expect(scores.pac(0) == 0.19, "PAC = " + sci(scores.pac(0)));
    c.expect(scores.s(0) == 0.62, "s = " + sci(scores.s(0)));
    const std::string csv = to_csv(scores_table({"leaf"}, catalog, labels, scores));
    c.expect(csv.find("leaf,casualty,casualty,survived,0.19,0.62\n") != std::string::npos, "CSV row: " + csv);
    c.note("PAC 0.19, s 0.62");
    return c.outcome();
}

Outcome gower_oracle() {
    Check c;
    std::mt19937_64 rng(3003);
    int compared = 0;
    int undefined = 0;
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    while (compared < 200) {
        std::uniform_int_distribution<std::size_t> n_pick(2, 8), p_pick(1, 5);
        const auto t = test_support::random_mixed_table(rng, n_pick(rng), p_pick(rng));
        const FeatureSchema schema = test_support::schema_of(t.columns);
        const auto expected = test_support::oracle_matrix(t);
        if (!expected) {
            // A pair with no comparable column must be rejected.
            bool threw = false;
            try {
                (void)dissimilarity_matrix(t.table, schema);
            } catch (const ValidationError&) {
                threw = true;
            }
            c.expect(threw, "undefined pair accepted");
            ++undefined;
            continue;
        }
        const auto fit = dissimilarity_matrix(t.table, schema);
        worst = std::max(worst, (fit.dissimilarities - *expected).cwiseAbs().maxCoeff());
        ++compared;
    }
    const double elapsed = seconds_since(start);
    c.expect(worst <= kGowerTol, "max entry error " + sci(worst));
    c.expect(elapsed < kSeconds5, "took " + sci(elapsed) + " s");
    c.note("200 tables, max err " + sci(worst));
    c.note(std::to_string(undefined) + " undefined tables rejected");
    c.note(sci(elapsed) + " s");
    return c.outcome();
}

double sorted_median_of_k(std::vector<double> d, std::size_t k) {
    std::sort(d.begin(), d.end());
    d.resize(std::min(k, d.size()));
    const std::size_t m = d.size();
    return m % 2 == 1 ? d[m / 2] : (d[m / 2 - 1] + d[m / 2]) / 2.0;
}

Outcome knn_oracle() {
    Check c;
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size_pick(1, 30), k_pick(1, 9);
    int mismatches = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> d(static_cast<std::size_t>(size_pick(rng)));
        for (auto& v : d)
            v = u(rng) < 0.1 ? 0.0 : u(rng); // some ties at zero
        const int k = k_pick(rng);
        if (knn_distance(d, k) != sorted_median_of_k(d, static_cast<std::size_t>(k)))
            ++mismatches;
    }

    // The same through the matrix entry point: 1000 query cases against 60
    // labelled reference cases in three classes.
    const Eigen::Index n_ref = 60;
    Eigen::VectorXi given(n_ref);
    for (Eigen::Index j = 0; j < n_ref; ++j)
        given(j) = static_cast<int>(j % 3);
    const LabelVector ref_labels(given, 3);
    Eigen::MatrixXd dis(1000, n_ref);
    for (Eigen::Index i = 0; i < dis.rows(); ++i)
        for (Eigen::Index j = 0; j < n_ref; ++j)
            dis(i, j) = u(rng);
    const Eigen::MatrixXd knn = knn_distances(dis, ref_labels, 3, kDefaultNeighbors);
    for (Eigen::Index i = 0; i < dis.rows(); ++i)
        for (int g = 0; g < 3; ++g) {
            std::vector<double> d;
            for (Eigen::Index j = 0; j < n_ref; ++j)
                if (given(j) == g)
                    d.push_back(dis(i, j));
            if (knn(i, g) != sorted_median_of_k(d, kDefaultNeighbors))
                ++mismatches;
        }
    const double elapsed = seconds_since(start);
    c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
    c.expect(elapsed < kSeconds1, "took " + sci(elapsed) + " s");
    c.note("1000 vectors + 1000 cases x 3 classes exact");
    c.note(sci(elapsed) + " s");
    return c.outcome();
}

Outcome yeo_johnson_properties() {
    Check c;
    double continuity = 0.0;
    int non_monotone = 0;
    for (int l = -400; l <= 400; l += 5) {
        const double lambda = l / 100.0;
        // Limits from either side: f(+-eps) for eps shrinking to the smallest subnormal.
        for (const double eps : {1e-14, 1e-100, 1e-300, std::numeric_limits<double>::denorm_min()})
            continuity = std::max(continuity, std::abs(yeo_johnson(-eps, lambda) - yeo_johnson(eps, lambda)));
        continuity = std::max(continuity, std::abs(yeo_johnson(0.0, lambda)));
        double prev = yeo_johnson(-5.0, lambda);
        for (int k = -499; k <= 500; ++k) {
            const double v = yeo_johnson(k / 100.0, lambda);
            if (!(v > prev))
                ++non_monotone;
            prev = v;
        }
    }
    double identity = 0.0;
    double log_branch = 0.0;
    for (int k = -500; k <= 500; ++k) {
        const double x = k / 100.0;
        identity = std::max(identity, std::abs(yeo_johnson(x, 1.0) - x));
        if (x >= 0.0)
            log_branch = std::max(log_branch, std::abs(yeo_johnson(x, 0.0) - std::log1p(x)));
        else
            log_branch = std::max(log_branch, std::abs(yeo_johnson(x, 2.0) + std::log1p(-x)));
    }
    c.expect(continuity < kYeoJohnsonTol, "continuity gap " + sci(continuity));
    c.expect(non_monotone == 0, std::to_string(non_monotone) + " non-increasing steps");
    c.expect(identity <= kYeoJohnsonTol, "lambda = 1 error " + sci(identity));
    c.expect(log_branch <= kYeoJohnsonTol, "log branch error " + sci(log_branch));
    c.note("gap at 0 " + sci(continuity));
    c.note("identity err " + sci(identity));
    c.note("log err " + sci(log_branch));
    return c.outcome();
}

struct LabelledEmbeddings {
    EmbeddingInput input;
    ClassCatalog catalog;
    LabelVector labels;
};

LabelledEmbeddings load_labelled(const std::string& file) {
    EmbeddingInput in = load_embeddings(read_csv(test_support::data_dir() / file));
    std::vector<std::string> names;
    for (const auto& l : *in.labels)
        if (std::find(names.begin(), names.end(), l) == names.end())
            names.push_back(l);
    ClassCatalog catalog(names);
    LabelVector labels = LabelVector::from_names(*in.labels, catalog);
    return {std::move(in), std::move(catalog), std::move(labels)};
}

Outcome farness_uniformity() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    const auto data = load_labelled("embeddings.csv");
    const auto fitted = fit_mahalanobis_farness(data.input.values, data.labels, data.catalog);
    std::vector<double> pooled;
    std::vector<std::vector<double>> per_class(static_cast<std::size_t>(data.catalog.size()));
    for (Eigen::Index i = 0; i < data.labels.size(); ++i) {
        const double f = fitted.training.farness(i, data.labels[i]);
        pooled.push_back(f);
        per_class[static_cast<std::size_t>(data.labels[i])].push_back(f);
    }
    const double ks = test_support::ks_uniform(pooled);
    const double elapsed = seconds_since(start);
    c.expect(data.labels.size() == 500 && data.catalog.size() == 4, "fixture is not 4 classes x 500 cases");
    c.expect(ks < kKsLimit, "pooled KS " + sci(ks));
    c.expect(elapsed < kSeconds5, "took " + sci(elapsed) + " s");
    c.note("pooled KS " + sci(ks));
    std::string by_class;
    for (const auto& v : per_class)
        by_class += (by_class.empty() ? "" : "/") + sci(test_support::ks_uniform(v));
    c.note("per class " + by_class);
    c.note(sci(elapsed) + " s");
    return c.outcome();
}

Outcome affine_invariance() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    const auto data = load_labelled("embeddings.csv");
    const ClassStatsOptions no_ridge{false};
    const auto base_stats = fit_class_stats(data.input.values, data.labels, data.catalog, no_ridge);
    const Eigen::MatrixXd base = mahalanobis_distances(data.input.values, base_stats);

    std::mt19937_64 rng(7007);
    std::normal_distribution<double> z(0.0, 1.0);
    const Eigen::Index d = data.input.values.cols();
    double worst = 0.0;
    int maps = 0;
    while (maps < 20) {
        Eigen::MatrixXd A(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index k = 0; k < d; ++k)
                A(r, k) = z(rng);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto sv = svd.singularValues();
        if (sv(d - 1) < 1e-2 * sv(0))
            continue; // keep the map comfortably invertible
        Eigen::RowVectorXd b(d);
        for (Eigen::Index k = 0; k < d; ++k)
            b(k) = 5.0 * z(rng);
        const Eigen::MatrixXd moved = (data.input.values * A.transpose()).rowwise() + b;
        const auto stats = fit_class_stats(moved, data.labels, data.catalog, no_ridge);
        worst = std::max(worst, (mahalanobis_distances(moved, stats) - base).cwiseAbs().maxCoeff());
        ++maps;
    }
    const double elapsed = seconds_since(start);
    c.expect(worst <= kAffineTol, "max |dD| = " + sci(worst));
    c.expect(elapsed < kSeconds2, "took " + sci(elapsed) + " s");
    c.note("20 maps, max |dD| " + sci(worst));
    c.note(sci(elapsed) + " s");
    return c.outcome();
}

std::vector<std::string> csv_lines(const Table& t) {
    std::vector<std::string> lines;
    std::istringstream in(to_csv(t));
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

/// Compares the batch farness table against one-row runs; returns the number
/// of differing rows.
template <typename Score>
int batch_vs_single(const std::vector<std::string>& ids, const ClassCatalog& catalog, Eigen::Index n, Score score) {
    const auto batch = csv_lines(farness_table(ids, catalog, std::nullopt, score(0, n)));
    int differing = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<std::string> one_id{ids[static_cast<std::size_t>(i)]};
        const auto single = csv_lines(farness_table(one_id, catalog, std::nullopt, score(i, 1)));
        if (single.size() != 2 || single[1] != batch[static_cast<std::size_t>(i) + 1])
            ++differing;
    }
    return differing;
}

Outcome test_path_purity() {
    Check c;
    // kNN on mixed features.
    const Table train = read_csv(test_support::data_dir() / "mixed_features.csv");
    const Table fresh = read_csv(test_support::data_dir() / "mixed_test_features.csv");
    const auto names = *label_names(train);
    std::vector<std::string> classes;
    for (const auto& l : names)
        if (std::find(classes.begin(), classes.end(), l) == classes.end())
            classes.push_back(l);
    const ClassCatalog catalog(classes);
    const auto knn = fit_knn_farness(train, LabelVector::from_names(names, catalog),
                                     read_schema(test_support::data_dir() / "mixed_schema.json"), catalog);
    const auto knn_ids = case_ids(fresh);
    const int knn_diff = batch_vs_single(knn_ids, catalog, static_cast<Eigen::Index>(fresh.size()),
                                         [&](Eigen::Index first, Eigen::Index count) {
                                             return score_new_cases(knn.model, fresh.slice(static_cast<std::size_t>(first),
                                                                                       static_cast<std::size_t>(count)));
                                         });

    // Mahalanobis on embeddings.
    const auto emb = load_labelled("embeddings.csv");
    const auto maha = fit_mahalanobis_farness(emb.input.values, emb.labels, emb.catalog);
    const auto test = load_embeddings(read_csv(test_support::data_dir() / "embeddings_test.csv"));
    const int maha_diff = batch_vs_single(test.ids, emb.catalog, test.values.rows(),
                                          [&](Eigen::Index first, Eigen::Index count) {
                                              return score_new_cases(maha.model,
                                                                     Eigen::MatrixXd(test.values.middleRows(first, count)));
                                          });
    c.expect(fresh.size() == 50 && test.values.rows() == 50, "test fixtures are not 50 cases");
    c.expect(knn_diff == 0, std::to_string(knn_diff) + " kNN rows differ");
    c.expect(maha_diff == 0, std::to_string(maha_diff) + " Mahalanobis rows differ");
    c.note("50 kNN + 50 Mahalanobis rows identical");
    return c.outcome();
}

Outcome quasi_residual_consistency() {
    Check c;
    const auto in = load_posteriors(read_csv(test_support::data_dir() / "mixed_posteriors.csv"));
    const Table features = read_csv(test_support::data_dir() / "mixed_features.csv");
    const std::size_t x1 = features.column_index("x1").value();
    Eigen::VectorXd x(static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto v = parse_double(features.rows[i][x1]);
        x(static_cast<Eigen::Index>(i)) = v ? *v : std::nan("");
    }
    const Eigen::VectorXd pac = compute_pac(in.posteriors, in.labels);
    const auto data = build_quasi_residual(pac, x);

    double weighted = 0.0;
    Eigen::Index counted = 0;
    for (const auto& b : data.bins) {
        weighted += static_cast<double>(b.count) * b.mean;
        counted += b.count;
    }
    double overall = 0.0;
    for (const auto& p : data.points)
        overall += p.pac;
    overall /= static_cast<double>(data.points.size());
    const double mean_err = std::abs(weighted / static_cast<double>(counted) - overall);
    c.expect(counted == static_cast<Eigen::Index>(data.points.size()), "bin counts do not cover the points");
    c.expect(mean_err <= kWeightedMeanTol, "weighted mean error " + sci(mean_err));

    c.expect(data.bin_count == 10, "default bin count " + std::to_string(data.bin_count));
    const double lo = data.bins.front().lower;
    const double width = (data.bins.back().upper - lo) / 10.0;
    bool edges_ok = data.bins.size() <= 10;
    for (const auto& b : data.bins) {
        const double k = std::round((b.lower - lo) / width);
        edges_ok = edges_ok && std::abs(b.upper - b.lower - width) <= 1e-12 * std::max(1.0, std::abs(width)) &&
                   std::abs(b.lower - (lo + k * width)) <= 1e-12 * std::max(1.0, std::abs(lo) + 10 * width);
    }
    c.expect(edges_ok, "bins are not 10 equal intervals");

    double loess_err = 0.0;
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> u(-3.0, 5.0);
    Eigen::VectorXd lx(80);
    for (auto& v : lx)
        v = u(rng);
    const Eigen::VectorXd ly = (2.5 * lx.array() - 0.75).matrix();
    for (const int degree : {1, 2})
        for (const double span : {0.3, 0.75, 1.0}) {
            const auto curve = loess_curve(lx, ly, LoessOptions{span, degree, 100});
            loess_err = std::max(loess_err, (curve.y - (2.5 * curve.x.array() - 0.75).matrix()).cwiseAbs().maxCoeff());
        }
    c.expect(loess_err <= kLoessLinearTol, "loess error on a line " + sci(loess_err));
    c.note("weighted-mean err " + sci(mean_err));
    c.note("B = 10");
    c.note("loess line err " + sci(loess_err));
    return c.outcome();
}

Outcome class_map_geometry() {
    Check c;
    c.expect(probit_position(0.5) == 0.0, "x(0.5) = " + sci(probit_position(0.5)));
    c.expect(probit_position(0.2) == 0.0, "x(0.2) = " + sci(probit_position(0.2)));
    const double phi4 = normal_cdf(4.0);
    c.expect(probit_position(std::nextafter(phi4, 1.0)) == 4.0, "no clamp just above Phi(4)");
    c.expect(probit_position(0.999999) == 4.0, "x(0.999999) = " + sci(probit_position(0.999999)));
    c.expect(std::abs(probit_position(normal_cdf(1.5)) - 1.5) <= 1e-9, "interior point misplaced");

    // Cutoff through the class-map builder.
    const ClassCatalog catalog({"a", "b"});
    Eigen::MatrixXd p(2, 2);
    p << 0.7, 0.3, 0.4, 0.6;
    Eigen::VectorXi given(2);
    given << 0, 1;
    const LabelVector labels(given, 2);
    const auto scores = score_cases(PosteriorMatrix(p, catalog), labels);
    Eigen::MatrixXd farness(2, 2);
    farness << 0.5, 0.9, 0.95, 0.3;
    const auto map = build_class_map(0, scores, labels, catalog, farness, FlagVector::Zero(2), 0.99);
    c.expect(std::abs(map.cutoff_x - kCutoffValue) <= kCutoffTol, "cutoff x = " + sci(map.cutoff_x));

    const Table table = read_csv(test_support::oracle_dir() / "normal_table.csv");
    int rows = 0;
    double worst = 0.0;
    for (const auto& row : table.rows) {
        if (row[0] != "quantile")
            continue;
        const double expected = std::stod(row[2]);
        worst = std::max(worst, std::abs(normal_quantile(std::stod(row[1])) - expected) /
                                    std::max(1.0, std::abs(expected)));
        ++rows;
    }
    c.expect(rows >= 20, "oracle table has " + std::to_string(rows) + " quantile rows");
    c.expect(worst <= kQuantileRelTol, "quantile error vs oracle " + sci(worst));
    char cut[32];
    std::snprintf(cut, sizeof cut, "%.6f", map.cutoff_x);
    c.note(std::string("cutoff x ") + cut);
    c.note(std::to_string(rows) + " oracle quantiles, max rel err " + sci(worst));
    return c.outcome();
}

Outcome golden_svgs() {
    Check c;
    const auto first = test_support::scratch_dir("acceptance_golden_1");
    const auto second = test_support::scratch_dir("acceptance_golden_2");
    c.expect(test_support::run_golden_pipeline(first) == 0, "first pipeline run failed");
    c.expect(test_support::run_golden_pipeline(second) == 0, "second pipeline run failed");
    for (const auto& name : test_support::golden_names()) {
        const auto golden = test_support::golden_dir() / name;
        if (!std::filesystem::exists(golden) || !std::filesystem::exists(first / name) ||
            !std::filesystem::exists(second / name)) {
            c.expect(false, name + " missing");
            continue;
        }
        const std::string want = read_file(golden);
        c.expect(read_file(first / name) == want, name + " differs on run 1");
        c.expect(read_file(second / name) == want, name + " differs on run 2");
    }
    c.note("3 files x 2 runs byte-identical");
    return c.outcome();
}

Outcome silhouette_cross_check() {
    Check c;
    std::mt19937_64 rng(12012);
    const Eigen::Index n = 400;
    const Eigen::Index G = 5;
    const auto catalog = test_support::numbered_catalog(G);
    const Eigen::MatrixXd p = test_support::random_posteriors(rng, n, G);
    const auto labels = test_support::random_labels(rng, n, G);
    const auto scores = score_cases(PosteriorMatrix(p, catalog), labels);
    const auto summary = silhouette_summary(scores.s, labels, catalog);

    // Brute force: regroup by class name, then average.
    std::map<std::string, std::vector<double>> groups;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = -1.0;
        for (Eigen::Index g = 0; g < G; ++g)
            if (g != labels[i])
                best = std::max(best, p(i, g));
        const double s = 1.0 - 2.0 * best / (p(i, labels[i]) + best);
        groups[catalog.name(labels[i])].push_back(s);
        total += s;
    }
    double worst = std::abs(summary.overall - total / static_cast<double>(n));
    for (Eigen::Index g = 0; g < G; ++g) {
        const auto& v = groups[catalog.name(g)];
        const auto gi = static_cast<std::size_t>(g);
        c.expect(summary.class_count[gi] == static_cast<Eigen::Index>(v.size()), "count of " + catalog.name(g));
        if (v.empty()) {
            c.expect(!summary.class_mean[gi].has_value(), "mean reported for an empty class");
            continue;
        }
        double sum = 0.0;
        for (const double s : v)
            sum += s;
        worst = std::max(worst, std::abs(*summary.class_mean[gi] - sum / static_cast<double>(v.size())));
    }
    c.expect(worst <= kSummaryTol, "summary error " + sci(worst));

    // Two-cluster point set: the clustering silhouette (b - a) / max(a, b)
    // from mean distances equals 1 - 2 PAC when the two-class posteriors are
    // built from the distance ratio.
    std::normal_distribution<double> z(0.0, 1.0);
    const Eigen::Index m = 60;
    Eigen::MatrixXd pts(m, 2);
    Eigen::VectorXi cluster(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        cluster(i) = static_cast<int>(i % 2);
        pts(i, 0) = z(rng) + (cluster(i) == 0 ? 0.0 : 1.5);
        pts(i, 1) = z(rng);
    }
    Eigen::VectorXd direct(m);
    Eigen::MatrixXd post(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        double sums[2] = {0.0, 0.0};
        Eigen::Index counts[2] = {0, 0};
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == i)
                continue;
            sums[cluster(j)] += (pts.row(i) - pts.row(j)).norm();
            ++counts[cluster(j)];
        }
        const int own = cluster(i);
        const double a = sums[own] / static_cast<double>(counts[own]);
        const double b = sums[1 - own] / static_cast<double>(counts[1 - own]);
        direct(i) = (b - a) / std::max(a, b);
        const double pac = b >= a ? a / (2.0 * b) : 1.0 - b / (2.0 * a);
        post(i, own) = 1.0 - pac;
        post(i, 1 - own) = pac;
    }
    const LabelVector two_labels(cluster, 2);
    const auto two = score_cases(PosteriorMatrix(post, test_support::numbered_catalog(2)), two_labels);
    const double agree = (two.s - direct).cwiseAbs().maxCoeff();
    c.expect(agree <= kSummaryTol, "clustering vs PAC silhouette " + sci(agree));
    c.note("summary err " + sci(worst));
    c.note("clustering agreement " + sci(agree));
    return c.outcome();
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"binary PAC identity", binary_pac_identity},
        {"Titanic leaf arithmetic", titanic_leaf},
        {"Gower oracle equivalence", gower_oracle},
        {"kNN farness oracle", knn_oracle},
        {"Yeo-Johnson properties", yeo_johnson_properties},
        {"farness uniformity", farness_uniformity},
        {"Mahalanobis affine invariance", affine_invariance},
        {"test-path purity", test_path_purity},
        {"quasi residual consistency", quasi_residual_consistency},
        {"class-map geometry", class_map_geometry},
        {"golden SVGs", golden_svgs},
        {"silhouette summary cross-check", silhouette_cross_check},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        failed += out.pass ? 0 : 1;
        std::printf("%s  %2zu  %-32s %s\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    out.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
