#include "redplan/regen_code.hpp"

#include <stdexcept>

namespace redplan {

void CodeConfig::validate() const {
    if (k < 1) throw std::invalid_argument("retrieve degree k must be >= 1");
    if (d < k) throw std::invalid_argument("repair degree d must be >= k");
    if (d > n - 1) throw std::invalid_argument("repair degree d must be <= n-1");
    if (!(file_size > 0.0)) throw std::invalid_argument("file size must be positive");
}

CodePoint msr_point(const CodeConfig& cfg) {
    cfg.validate();
    const double alpha = cfg.file_size / cfg.k;
    const double gamma = alpha * double(cfg.d) / double(cfg.d - cfg.k + 1);
    return CodePoint{CodeKind::MSR, alpha, gamma / cfg.d, gamma};
}

CodePoint mbr_point(const CodeConfig& cfg) {
    cfg.validate();
    const double alpha =
        cfg.file_size / cfg.k * (2.0 * cfg.d) / double(2 * cfg.d - cfg.k + 1);
    return CodePoint{CodeKind::MBR, alpha, alpha / cfg.d, alpha};
}

CodePoint code_point(CodeKind kind, const CodeConfig& cfg) {
    return kind == CodeKind::MSR ? msr_point(cfg) : mbr_point(cfg);
}

double stretch_factor(const CodeConfig& cfg, const CodePoint& point) {
    return double(cfg.n) * point.alpha / cfg.file_size;
}

CodeClass classify(const CodeConfig& cfg) {
    cfg.validate();
    if (cfg.k == 1 && cfg.d == 1) return CodeClass::Replication;
    if (cfg.k == cfg.d) return CodeClass::MDS;
    return CodeClass::General;
}

const char* to_string(CodeKind kind) {
    return kind == CodeKind::MSR ? "msr" : "mbr";
}

const char* to_string(CodeClass cls) {
    switch (cls) {
        case CodeClass::Replication: return "replication";
        case CodeClass::MDS: return "mds";
        default: return "general";
    }
}

}  // namespace redplan
