#pragma once

// Runs the classmap executable and reproduces the golden-file pipeline.

#include "classmap/io.hpp"
#include "support.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace test_support {

inline std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

/// Exit status of `classmap <args>`, with stdout and stderr sent to `log`.
inline int run_cli(const std::string& args, const std::filesystem::path& log) {
    const std::string cmd = std::string("CLASSMAP_NO_COLOR=1 ") + quoted(CLASSMAP_CLI) + " " + args + " > " +
                            quoted(log) + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline const std::array<std::string, 3>& golden_names() {
    static const std::array<std::string, 3> names{"silhouette.svg", "qresid.svg", "classmap_beta.svg"};
    return names;
}

/// Writes the three golden plots into `out`; returns the first non-zero exit
/// status, or 0.
inline int run_golden_pipeline(const std::filesystem::path& out) {
    const auto data = data_dir();
    const auto log = out / "pipeline.log";
    const std::string o = " --out-dir " + quoted(out);
    const std::string posteriors = " --posteriors " + quoted(data / "mixed_posteriors.csv");
    const std::string steps[] = {
        "plot silhouette --posteriors " + quoted(data / "small_posteriors.csv") + o,
        "plot qresid" + posteriors + " --feature-file " + quoted(data / "mixed_features.csv") + " --feature x1 --loess" + o,
        "fit-farness --variant knn --features " + quoted(data / "mixed_features.csv") + " --schema " +
            quoted(data / "mixed_schema.json") + posteriors + o,
        "plot classmap" + posteriors + " --farness " + quoted(out / "farness.csv") + " --class beta" + o,
    };
    for (const auto& step : steps)
        if (const int rc = run_cli(step, log); rc != 0)
            return rc;
    return 0;
}

} // namespace test_support
