#include "redplan/sim_io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace redplan::sim {

namespace {

[[noreturn]] void bad_config(const std::string& what) {
    throw std::invalid_argument("config error: " + what);
}

double as_number(const ordered_json& v, const std::string& key) {
    if (!v.is_number()) bad_config("field '" + key + "' must be a number");
    return v.get<double>();
}

long long as_integer(const ordered_json& v, const std::string& key) {
    if (!v.is_number_integer()) bad_config("field '" + key + "' must be an integer");
    return v.get<long long>();
}

CodeKind kind_from_string(const std::string& s) {
    if (s == "msr") return CodeKind::MSR;
    if (s == "mbr") return CodeKind::MBR;
    bad_config("code kind must be 'msr' or 'mbr', got '" + s + "'");
}

CodeSpec code_from_json(const ordered_json& doc) {
    CodeSpec code;
    for (const auto& [key, value] : doc.items()) {
        if (key == "kind") {
            if (!value.is_string()) bad_config("code.kind must be a string");
            code.kind = kind_from_string(value.get<std::string>());
        } else if (key == "n") {
            code.n = int(as_integer(value, key));
        } else if (key == "k") {
            code.k = int(as_integer(value, key));
        } else if (key == "d") {
            code.d = int(as_integer(value, key));
        } else {
            bad_config("unknown field 'code." + key + "'");
        }
    }
    return code;
}

}  // namespace

SimConfig config_from_json(const ordered_json& doc) {
    if (!doc.is_object()) bad_config("document root must be an object");
    SimConfig cfg;
    bool saw_objects = false, saw_rho = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "seed") {
            cfg.seed = std::uint64_t(as_integer(value, key));
        } else if (key == "initial_nodes") {
            cfg.initial_nodes = int(as_integer(value, key));
        } else if (key == "mean_lifetime_days") {
            cfg.mean_lifetime_days = as_number(value, key);
        } else if (key == "availability") {
            cfg.availability = as_number(value, key);
        } else if (key == "base_time_hours") {
            cfg.base_time_hours = as_number(value, key);
        } else if (key == "code") {
            if (!value.is_object()) bad_config("field 'code' must be an object");
            cfg.code = code_from_json(value);
        } else if (key == "retrieve_target") {
            cfg.retrieve_target = as_number(value, key);
        } else if (key == "object_size") {
            cfg.object_size = as_number(value, key);
        } else if (key == "object_count") {
            cfg.object_count = as_integer(value, key);
            saw_objects = true;
        } else if (key == "target_utilization") {
            cfg.target_utilization = as_number(value, key);
            saw_rho = true;
        } else if (key == "upload_rate") {
            cfg.upload_rate = as_number(value, key);
        } else if (key == "max_concurrent_uploads") {
            cfg.max_concurrent_uploads = int(as_integer(value, key));
        } else if (key == "max_concurrent_downloads") {
            cfg.max_concurrent_downloads = int(as_integer(value, key));
        } else if (key == "duration_days") {
            cfg.duration_days = as_number(value, key);
        } else if (key == "warmup_days") {
            cfg.warmup_days = as_number(value, key);
        } else if (key == "metrics_interval_hours") {
            cfg.metrics_interval_hours = as_number(value, key);
        } else {
            bad_config("unknown field '" + key + "'");
        }
    }
    if (saw_objects && saw_rho)
        bad_config("object_count and target_utilization are mutually exclusive");
    if (saw_objects) cfg.target_utilization = 0.0;
    if (saw_rho) cfg.object_count = 0;
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config error: invalid JSON in " + path + ": " +
                                    e.what());
    }
    return config_from_json(doc);
}

void apply_override(SimConfig& cfg, const std::string& key, const std::string& value) {
    const auto num = [&]() -> double {
        double out = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
            bad_config("value for '" + key + "' is not a number: '" + value + "'");
        return out;
    };
    const auto integer = [&]() -> long long {
        long long out = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
            bad_config("value for '" + key + "' is not an integer: '" + value + "'");
        return out;
    };
    if (key == "seed") cfg.seed = std::uint64_t(integer());
    else if (key == "initial_nodes") cfg.initial_nodes = int(integer());
    else if (key == "mean_lifetime_days") cfg.mean_lifetime_days = num();
    else if (key == "availability") cfg.availability = num();
    else if (key == "base_time_hours") cfg.base_time_hours = num();
    else if (key == "code.kind") cfg.code.kind = kind_from_string(value);
    else if (key == "code.n") cfg.code.n = int(integer());
    else if (key == "code.k") cfg.code.k = int(integer());
    else if (key == "code.d") cfg.code.d = int(integer());
    else if (key == "retrieve_target") cfg.retrieve_target = num();
    else if (key == "object_size") cfg.object_size = num();
    else if (key == "object_count") {
        cfg.object_count = integer();
        cfg.target_utilization = 0.0;
    } else if (key == "target_utilization") {
        cfg.target_utilization = num();
        cfg.object_count = 0;
    } else if (key == "upload_rate") cfg.upload_rate = num();
    else if (key == "max_concurrent_uploads") cfg.max_concurrent_uploads = int(integer());
    else if (key == "max_concurrent_downloads") cfg.max_concurrent_downloads = int(integer());
    else if (key == "duration_days") cfg.duration_days = num();
    else if (key == "warmup_days") cfg.warmup_days = num();
    else if (key == "metrics_interval_hours") cfg.metrics_interval_hours = num();
    else bad_config("unknown override key '" + key + "'");
}

ordered_json config_to_json(const SimConfig& cfg) {
    ordered_json code{
        {"kind", cfg.code.kind == CodeKind::MSR ? "msr" : "mbr"},
        {"n", cfg.code.n},
        {"k", cfg.code.k},
        {"d", cfg.code.d},
    };
    ordered_json doc{
        {"seed", cfg.seed},
        {"initial_nodes", cfg.initial_nodes},
        {"mean_lifetime_days", cfg.mean_lifetime_days},
        {"availability", cfg.availability},
        {"base_time_hours", cfg.base_time_hours},
        {"code", std::move(code)},
        {"retrieve_target", cfg.retrieve_target},
        {"object_size", cfg.object_size},
        {"upload_rate", cfg.upload_rate},
        {"max_concurrent_uploads", cfg.max_concurrent_uploads},
        {"max_concurrent_downloads", cfg.max_concurrent_downloads},
        {"duration_days", cfg.duration_days},
        {"warmup_days", cfg.warmup_days},
        {"metrics_interval_hours", cfg.metrics_interval_hours},
    };
    if (cfg.object_count > 0)
        doc["object_count"] = cfg.object_count;
    else
        doc["target_utilization"] = cfg.target_utilization;
    return doc;
}

ordered_json summary_to_json(const SimConfig& cfg, const SimMetrics& m) {
    return ordered_json{
        {"seed", cfg.seed},
        {"measured_utilization", m.measured_utilization},
        {"theoretical_utilization", m.theoretical_utilization},
        {"repair_time_stats",
         ordered_json{{"mean_s", m.repair_time_stats.mean_s},
                      {"median_s", m.repair_time_stats.median_s},
                      {"p95_s", m.repair_time_stats.p95_s},
                      {"count", m.repair_time_stats.count}}},
        {"useful_bytes", m.useful_bytes},
        {"wasted_bytes", m.wasted_bytes},
        {"failed_restarts", m.failed_restarts},
        {"objects_below_k", m.objects_below_k},
        {"loss_events", m.loss_events},
        {"blocks_per_object_mean", m.blocks_per_object_mean},
        {"blocks_per_object_min", m.blocks_per_object_min},
        {"blocks_per_object_max", m.blocks_per_object_max},
        {"disk_bytes_total", m.disk_bytes_total},
        {"completed_repairs", m.completed_repairs},
        {"measured_availability", m.measured_availability},
        {"measured_mean_lifetime_days", m.measured_mean_lifetime_days},
        {"mean_population", m.mean_population},
        {"resolved_objects", m.resolved_objects},
        {"resolved_n", m.resolved_n},
        {"config", config_to_json(cfg)},
    };
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string timeseries_csv(const std::vector<TimePoint>& series) {
    std::string out =
        "t_days,rho_hat,mean_repair_s,p95_repair_s,wasted_frac,nodes_online,"
        "objects_below_k\n";
    for (const TimePoint& tp : series) {
        out += format_double(tp.t_days);
        out += ',';
        out += format_double(tp.rho_hat);
        out += ',';
        out += format_double(tp.mean_repair_s);
        out += ',';
        out += format_double(tp.p95_repair_s);
        out += ',';
        out += format_double(tp.wasted_frac);
        out += ',';
        out += std::to_string(tp.nodes_online);
        out += ',';
        out += std::to_string(tp.objects_below_k);
        out += '\n';
    }
    return out;
}

SweepVariable sweep_variable_from_string(const std::string& name) {
    if (name == "k") return SweepVariable::K;
    if (name == "d") return SweepVariable::D;
    if (name == "a") return SweepVariable::A;
    if (name == "p") return SweepVariable::P;
    if (name == "rho") return SweepVariable::Rho;
    if (name == "B") return SweepVariable::B;
    if (name == "M") return SweepVariable::M;
    bad_config("unknown sweep variable '" + name + "' (expected k, d, a, p, rho, B, M)");
}

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::K: return "k";
        case SweepVariable::D: return "d";
        case SweepVariable::A: return "a";
        case SweepVariable::P: return "p";
        case SweepVariable::Rho: return "rho";
        case SweepVariable::B: return "B";
        case SweepVariable::M: return "M";
    }
    return "?";
}

void SweepSpec::validate() const {
    if (values.empty()) bad_config("sweep values must be non-empty");
    if (repetitions < 1) bad_config("sweep repetitions must be positive");
    SimConfig probe = fixed;
    for (double v : values) {
        switch (variable) {
            case SweepVariable::K: probe.code.k = int(v); break;
            case SweepVariable::D: probe.code.d = int(v); break;
            case SweepVariable::A: probe.availability = v; break;
            case SweepVariable::P: probe.retrieve_target = v; break;
            case SweepVariable::Rho:
                probe.target_utilization = v;
                probe.object_count = 0;
                break;
            case SweepVariable::B: probe.base_time_hours = v; break;
            case SweepVariable::M: probe.object_size = v; break;
        }
        probe.validate();
    }
}

SweepSpec sweep_from_json(const ordered_json& doc) {
    if (!doc.is_object()) bad_config("sweep document root must be an object");
    SweepSpec spec;
    bool saw_variable = false, saw_values = false, saw_fixed = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "variable") {
            if (!value.is_string()) bad_config("sweep variable must be a string");
            spec.variable = sweep_variable_from_string(value.get<std::string>());
            saw_variable = true;
        } else if (key == "values") {
            if (!value.is_array()) bad_config("sweep values must be an array");
            for (const auto& v : value) spec.values.push_back(as_number(v, "values[]"));
            saw_values = true;
        } else if (key == "fixed") {
            spec.fixed = config_from_json(value);
            saw_fixed = true;
        } else if (key == "repetitions") {
            spec.repetitions = int(as_integer(value, key));
        } else {
            bad_config("unknown field '" + key + "'");
        }
    }
    if (!saw_variable || !saw_values || !saw_fixed)
        bad_config("sweep document requires 'variable', 'values', and 'fixed'");
    spec.validate();
    return spec;
}

SweepSpec load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sweep file: " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config error: invalid JSON in " + path + ": " +
                                    e.what());
    }
    return sweep_from_json(doc);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
    spec.validate();
    const std::size_t points = spec.values.size() * std::size_t(spec.repetitions);
    std::vector<SweepRow> rows(points);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points) return;
            const double value = spec.values[i / std::size_t(spec.repetitions)];
            SweepRow& row = rows[i];
            row.variable = to_string(spec.variable);
            row.value = value;
            row.seed = spec.fixed.seed + i;
            SimConfig cfg = spec.fixed;
            cfg.seed = row.seed;
            switch (spec.variable) {
                case SweepVariable::K: cfg.code.k = int(value); break;
                case SweepVariable::D: cfg.code.d = int(value); break;
                case SweepVariable::A: cfg.availability = value; break;
                case SweepVariable::P: cfg.retrieve_target = value; break;
                case SweepVariable::Rho:
                    cfg.target_utilization = value;
                    cfg.object_count = 0;
                    break;
                case SweepVariable::B: cfg.base_time_hours = value; break;
                case SweepVariable::M: cfg.object_size = value; break;
            }
            try {
                const SimResult result = run(cfg);
                row.rho_target = result.metrics.theoretical_utilization;
                row.rho_hat = result.metrics.measured_utilization;
                row.mean_repair_s = result.metrics.repair_time_stats.mean_s;
                row.p95_repair_s = result.metrics.repair_time_stats.p95_s;
                row.objects = result.metrics.resolved_objects;
                row.wasted_frac = result.metrics.wasted_bytes > 0
                                      ? result.metrics.wasted_bytes /
                                            (result.metrics.useful_bytes +
                                             result.metrics.wasted_bytes)
                                      : 0.0;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    int pool = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    if (pool < 1) pool = 1;
    pool = int(std::min(std::size_t(pool), points));
    std::vector<std::thread> workers;
    workers.reserve(std::size_t(pool));
    for (int i = 0; i < pool; ++i) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "variable,value,seed,rho_target,rho_hat,mean_repair_s,p95_repair_s,objects,"
        "wasted_frac,error\n";
    for (const SweepRow& r : rows) {
        out += r.variable;
        out += ',';
        out += format_double(r.value);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += format_double(r.rho_target);
        out += ',';
        out += format_double(r.rho_hat);
        out += ',';
        out += format_double(r.mean_repair_s);
        out += ',';
        out += format_double(r.p95_repair_s);
        out += ',';
        out += std::to_string(r.objects);
        out += ',';
        out += format_double(r.wasted_frac);
        out += ',';
        out += r.error;
        out += '\n';
    }
    return out;
}

}  // namespace redplan::sim
