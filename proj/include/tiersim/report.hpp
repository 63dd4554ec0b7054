#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tiersim/simulation.hpp"

namespace tiersim {

/// Fixed-point seconds with millisecond resolution; avoids locale- or
/// platform-dependent float formatting in the CSV.
inline std::string format_seconds(VirtualNs t) {
    const uint64_t ms = t / 1000000ull;
    std::ostringstream os;
    os << ms / 1000 << '.' << std::setw(3) << std::setfill('0') << ms % 1000;
    return os.str();
}

inline const char* kSeriesHeader =
    "time_s,process,delta,slope,slope_state,toggle,accessed_count,"
    "promotions,demotions,demote_promoted,total_cost_ns";

inline void write_series_csv(std::ostream& out, const RunReport& r) {
    out << kSeriesHeader << '\n';
    for (const MetricsRow& m : r.series) {
        out << format_seconds(m.t) << ',' << r.labels[m.process] << ',' << m.delta << ','
            << m.slope << ',' << to_string(m.slope_state) << ',' << (m.toggle_on ? "on" : "off")
            << ',' << m.accessed_count << ',' << m.promotions << ',' << m.demotions << ','
            << m.demote_promoted << ',' << m.total_cost_ns << '\n';
    }
}

inline void write_events_csv(std::ostream& out, const RunReport& r) {
    out << "time_s,process,event\n";
    for (const ToggleEvent& e : r.toggle_events) {
        out << format_seconds(e.t) << ',' << r.labels[e.process] << ','
            << (e.on ? "restart" : "stop") << '\n';
    }
}

inline void write_summary(std::ostream& out, const RunReport& r) {
    out << "total_accesses=" << r.total_accesses << '\n';
    out << "total_cost_ns=" << r.total_cost_ns() << '\n';
    for (size_t i = 0; i < r.per_process.size(); ++i) {
        const CostLedger& l = r.per_process[i];
        out << r.labels[i] << ".total_cost_ns=" << l.total() << '\n'
            << r.labels[i] << ".access_ns=" << l.access_ns << '\n'
            << r.labels[i] << ".fault_handling_ns=" << l.fault_handling_ns << '\n'
            << r.labels[i] << ".migration_ns=" << l.migration_steps_total() << '\n'
            << r.labels[i] << ".demotion_ns=" << l.demotion_ns << '\n'
            << r.labels[i] << ".scan_ns=" << l.scan_ns << '\n'
            << r.labels[i] << ".promotions=" << l.promotions << '\n'
            << r.labels[i] << ".demotions=" << l.demotions << '\n'
            << r.labels[i] << ".demote_promoted=" << l.demote_promoted << '\n'
            << r.labels[i] << ".hint_faults=" << l.hint_faults << '\n'
            << r.labels[i] << ".stops=" << l.stops << '\n'
            << r.labels[i] << ".restarts=" << l.restarts << '\n'
            << r.labels[i] << ".failed_migrations=" << l.failed_migrations << '\n';
    }
}

struct CompareRow {
    std::string config;
    std::string policy;
    VirtualNs total_cost_ns;
    double ratio_to_baseline;
};

/// Cross-run comparison is only meaningful when every run replays the
/// same workloads; fingerprint the tenant side of the config to enforce
/// that before comparing cost totals.
inline std::string workload_fingerprint(const SimParams& p) {
    std::ostringstream os;
    os << p.seed << '|' << p.duration_ns;
    for (const TenantSpec& t : p.tenants) {
        const WorkloadSpec& w = t.workload;
        os << '|' << static_cast<int>(w.kind) << ':' << w.rss_pages << ':' << w.hot_fraction
           << ':' << w.hot_access_ratio << ':' << w.zipf_s << ':' << w.hot_offset_frac << ':'
           << w.ops_per_sec << ':' << w.threads << ':' << w.read_ratio << ':' << w.trace_path
           << ':' << t.start_offset_ns;
        for (const Phase& ph : w.phase_schedule)
            os << ';' << ph.duration_ns << ',' << ph.region_start << ',' << ph.region_len;
    }
    return os.str();
}

inline void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "config,policy,total_cost_ns,ratio_to_baseline\n";
    for (const CompareRow& r : rows) {
        std::ostringstream ratio;
        ratio << std::fixed << std::setprecision(6) << r.ratio_to_baseline;
        out << r.config << ',' << r.policy << ',' << r.total_cost_ns << ',' << ratio.str()
            << '\n';
    }
}

}  // namespace tiersim
