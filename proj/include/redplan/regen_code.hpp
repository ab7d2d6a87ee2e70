#pragma once

#include <string>

namespace redplan {

enum class CodeKind { MSR, MBR };

enum class CodeClass { Replication, MDS, General };

// The (n, k, d) tuple of a Regenerating Code instance plus the file size M.
// Invariant: 1 <= k <= d <= n-1, file_size > 0.
struct CodeConfig {
    int n = 0;
    int k = 0;
    int d = 0;
    double file_size = 0.0;  // bytes

    void validate() const;  // throws std::invalid_argument
};

// A storage/repair operating point. gamma == d * beta; for MBR alpha == gamma.
struct CodePoint {
    CodeKind kind;
    double alpha;  // bytes stored per block
    double beta;   // bytes pulled from each of d helpers during a repair
    double gamma;  // total repair traffic, d * beta
};

// Minimum-storage point: alpha = M/k, gamma = (M/k) * d/(d-k+1).
CodePoint msr_point(const CodeConfig& cfg);

// Minimum-bandwidth point: alpha = gamma = (M/k) * 2d/(2d-k+1).
CodePoint mbr_point(const CodeConfig& cfg);

CodePoint code_point(CodeKind kind, const CodeConfig& cfg);

// n * alpha / M.
double stretch_factor(const CodeConfig& cfg, const CodePoint& point);

// Replication iff k == d == 1, MDS iff k == d > 1, General otherwise.
CodeClass classify(const CodeConfig& cfg);

const char* to_string(CodeKind kind);
const char* to_string(CodeClass cls);

}  // namespace redplan
