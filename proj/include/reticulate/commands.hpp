#pragma once

// Command implementations behind the `reticulate` executable. Each returns the
// process exit code: 0 success, 2 input or solver error, 3 verdict mismatch or
// NotRealizable.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reticulate/core.hpp"

namespace reticulate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;
inline constexpr int kExitVerdict = 3;

struct AnalyzeOptions {
    double tol_rank = kDefaultTolRank;
    bool planarize = true;
};

struct MonotonicityOptions {
    double alpha = 1.0;
    int centers = 20;
    std::uint64_t seed = 0;
    int radii = 50;
    double r_max = 0.4;
    /// Profile CSV path; empty to skip.
    std::string out;
};

struct AdaptCommandOptions {
    int steps = 100;
    int samples = 16;
    double dt = 0.1;
    std::uint64_t seed = 0;
    /// "random" or "fixed:NODE".
    std::string mode = "random";
    int source = 0;
    int patch_count = 4;
    double strength = 1.0;
    int stride = 1;
    /// Trace CSV path; empty writes the CSV to `out`.
    std::string out;
};

int cmd_analyze(const std::string& path, const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_stationarity(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_homogenize(const std::string& path, const std::vector<int>& R, std::ostream& out, std::ostream& err);
int cmd_monotonicity(const std::string& path, const MonotonicityOptions& options, std::ostream& out, std::ostream& err);
int cmd_adapt(const std::string& path, const AdaptCommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_realize(const std::string& matrix, int k, std::ostream& out, std::ostream& err);
int cmd_decompose(const std::string& path, std::ostream& out, std::ostream& err);
/// Writes a named built-in network as a NetworkFile.
int cmd_fixture(const std::string& name, const std::string& mode, std::ostream& out, std::ostream& err);

/// Row-major, one row per line, 12-digit scientific entries.
std::string format_matrix(const SymMatrix& m, const std::string& indent = "  ");
std::string format_sci(double x);

}  // namespace reticulate::cli
