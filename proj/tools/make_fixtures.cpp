// Regenerates the shipped fixtures under data/.
//
//   make_fixtures <out-dir>
//
// Uses mt19937_64 plus its own Box-Muller so the bytes do not depend on the
// standard library's distribution implementations.

#include "classmap/format.hpp"
#include "classmap/io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using classmap::Table;

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        double u = 0.0;
        while (u <= 0.0)
            u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(2.0 * std::numbers::pi * v);
        return r * std::cos(2.0 * std::numbers::pi * v);
    }

    int below(int n) { return static_cast<int>(uniform() * n); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

std::string fixed(double v, int decimals) { return classmap::format_fixed(v, decimals); }

// Probabilities rounded to 1e-4 that sum to exactly one in decimal.
std::vector<std::string> rounded_probabilities(const std::vector<double>& p) {
    std::vector<long> units(p.size());
    long total = 0;
    std::size_t largest = 0;
    for (std::size_t g = 0; g < p.size(); ++g) {
        units[g] = std::lround(p[g] * 10000.0);
        total += units[g];
        if (p[g] > p[largest])
            largest = g;
    }
    units[largest] += 10000 - total;
    std::vector<std::string> out;
    for (long u : units)
        out.push_back(fixed(static_cast<double>(u) / 10000.0, 4));
    return out;
}

std::vector<double> softmax(const std::vector<double>& score) {
    double m = score[0];
    for (double s : score)
        m = std::max(m, s);
    std::vector<double> p;
    double sum = 0.0;
    for (double s : score) {
        p.push_back(std::exp(s - m));
        sum += p.back();
    }
    for (double& v : p)
        v /= sum;
    return p;
}

void write(const fs::path& dir, const std::string& name, const std::string& content) {
    classmap::write_file_atomic(dir / name, content);
    std::cout << "wrote " << (dir / name).string() << '\n';
}

// Three classes, five mixed-type features, posteriors from a noisy softmax.
void mixed_fixture(const fs::path& dir, const std::string& stem, const std::string& prefix, int n,
                   std::uint64_t seed) {
    const std::array<std::string, 3> classes{"alpha", "beta", "gamma"};
    const std::array<std::string, 4> colors{"red", "green", "blue", "white"};
    const std::array<std::string, 3> sizes{"small", "medium", "large"};
    Rng rng(seed);

    Table features{{"id", "x1", "x2", "color", "size", "flag", "label"}, {}};
    Table posteriors{{"id", "alpha", "beta", "gamma", "label"}, {}};
    for (int i = 0; i < n; ++i) {
        const int g = rng.below(3);
        const double x1 = 2.0 * g + 1.3 * rng.normal();
        const double x2 = 10.0 + 3.0 * rng.normal() - 2.0 * g;
        const int color = std::min(3, std::max(0, g + (rng.uniform() < 0.3 ? rng.below(4) - 1 : 0)));
        const int size = std::min(2, std::max(0, (g + rng.below(3)) / 2));
        const bool flag = rng.uniform() < (g == 2 ? 0.6 : 0.15);

        const std::string id = prefix + std::to_string(i + 1);
        const bool x2_missing = rng.uniform() < 0.05;
        features.rows.push_back({id, fixed(x1, 3), x2_missing ? "NA" : fixed(x2, 3), colors[color], sizes[size],
                                 flag ? "1" : "0", classes[g]});

        std::vector<double> score(3);
        for (int h = 0; h < 3; ++h)
            score[h] = -0.9 * (x1 - 2.0 * h) * (x1 - 2.0 * h) / 2.0 + 0.6 * rng.normal();
        score[2] += flag ? 0.8 : 0.0;
        auto p = rounded_probabilities(softmax(score));
        posteriors.rows.push_back({id, p[0], p[1], p[2], classes[g]});
    }
    write(dir, stem + "_features.csv", classmap::to_csv(features));
    write(dir, stem + "_posteriors.csv", classmap::to_csv(posteriors));
}

// Four gaussian classes in three dimensions with distinct covariances.
void embedding_fixture(const fs::path& dir, const std::string& name, const std::string& prefix, int n,
                       std::uint64_t seed) {
    const std::array<std::string, 4> classes{"north", "east", "south", "west"};
    const std::array<std::array<double, 3>, 4> means{{{0, 0, 0}, {4, 0, 1}, {0, 5, -1}, {3, 4, 3}}};
    // Lower-triangular Cholesky factors.
    const std::array<std::array<double, 6>, 4> chol{{{1.0, 0.0, 1.0, 0.0, 0.0, 1.0},
                                                     {1.5, 0.4, 0.8, 0.0, 0.3, 0.6},
                                                     {0.7, -0.5, 1.2, 0.2, 0.1, 0.9},
                                                     {1.1, 0.6, 0.5, -0.4, 0.2, 1.3}}};
    Rng rng(seed);
    Table table{{"id", "v1", "v2", "v3", "label"}, {}};
    for (int i = 0; i < n; ++i) {
        const std::size_t g = static_cast<std::size_t>(i) % classes.size();
        const double z0 = rng.normal();
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const auto& L = chol[g];
        const double v1 = means[g][0] + L[0] * z0;
        const double v2 = means[g][1] + L[1] * z0 + L[2] * z1;
        const double v3 = means[g][2] + L[3] * z0 + L[4] * z1 + L[5] * z2;
        table.rows.push_back({prefix + std::to_string(i + 1), fixed(v1, 6), fixed(v2, 6), fixed(v3, 6), classes[g]});
    }
    write(dir, name, classmap::to_csv(table));
}

// Twelve cases, four per class, for the silhouette golden file.
void small_posteriors(const fs::path& dir, std::uint64_t seed) {
    const std::array<std::string, 3> classes{"cat", "dog", "fox"};
    Rng rng(seed);
    Table table{{"id", "cat", "dog", "fox", "label"}, {}};
    for (int i = 0; i < 12; ++i) {
        const int g = i % 3;
        std::vector<double> score(3);
        for (int h = 0; h < 3; ++h)
            score[h] = (h == g ? 1.5 : 0.0) + 1.2 * rng.normal();
        auto p = rounded_probabilities(softmax(score));
        table.rows.push_back({"s" + std::to_string(i + 1), p[0], p[1], p[2], classes[g]});
    }
    write(dir, "small_posteriors.csv", classmap::to_csv(table));
}

void schema_and_importances(const fs::path& dir) {
    write(dir, "mixed_importances.csv",
          "feature,importance\nx1,0.42\nx2,0.18\ncolor,0.21\nsize,0.11\nflag,0.08\n");
    write(dir, "mixed_schema.json",
          "{\n"
          "  \"x1\": {\"kind\": \"numeric\", \"weight\": 0.42},\n"
          "  \"x2\": {\"kind\": \"numeric\", \"weight\": 0.18},\n"
          "  \"color\": {\"kind\": \"nominal\", \"weight\": 0.21},\n"
          "  \"size\": {\"kind\": \"ordinal\", \"levels\": [\"small\", \"medium\", \"large\"], \"weight\": 0.11},\n"
          "  \"flag\": {\"kind\": \"asymmetric_binary\", \"weight\": 0.08}\n"
          "}\n");
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <out-dir>\n";
        return 2;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir);
    mixed_fixture(dir, "mixed", "c", 200, 20240611);
    mixed_fixture(dir, "mixed_test", "t", 50, 20240612);
    embedding_fixture(dir, "embeddings.csv", "e", 500, 7);
    embedding_fixture(dir, "embeddings_test.csv", "t", 50, 8);
    small_posteriors(dir, 12);
    schema_and_importances(dir);
    return 0;
}
