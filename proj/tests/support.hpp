#pragma once

#include "classmap/core.hpp"
#include "classmap/io.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace test_support {

inline std::filesystem::path data_dir() { return CLASSMAP_DATA_DIR; }
inline std::filesystem::path oracle_dir() { return CLASSMAP_ORACLE_DIR; }
inline std::filesystem::path golden_dir() { return CLASSMAP_GOLDEN_DIR; }

/// Fresh empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(CLASSMAP_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Random n x G row-stochastic matrix.
inline Eigen::MatrixXd random_posteriors(std::mt19937_64& rng, Eigen::Index n, Eigen::Index G) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd p(n, G);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index g = 0; g < G; ++g)
            p(i, g) = u(rng);
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

inline classmap::LabelVector random_labels(std::mt19937_64& rng, Eigen::Index n, Eigen::Index G) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(G) - 1);
    Eigen::VectorXi given(n);
    for (Eigen::Index i = 0; i < n; ++i)
        given(i) = pick(rng);
    return classmap::LabelVector(given, G);
}

inline classmap::ClassCatalog numbered_catalog(Eigen::Index G) {
    std::vector<std::string> names;
    for (Eigen::Index g = 0; g < G; ++g)
        names.push_back("k" + std::to_string(g + 1));
    return classmap::ClassCatalog(names);
}

/// Kolmogorov-Smirnov distance of a sample from uniform[0, 1].
inline double ks_uniform(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d = std::max(d, static_cast<double>(i + 1) / n - x[i]);
        d = std::max(d, x[i] - static_cast<double>(i) / n);
    }
    return d;
}

} // namespace test_support
