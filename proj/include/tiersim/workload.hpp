#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tiersim/event_queue.hpp"
#include "tiersim/page.hpp"
#include "tiersim/rng.hpp"

namespace tiersim {

enum class WorkloadKind : uint8_t {
    UniformRandom,
    ZipfHotset,
    Streaming,
    PhasedMicro,
    Trace,
};

struct Phase {
    VirtualNs duration_ns;
    uint64_t region_start;  // page index
    uint64_t region_len;
};

/// Synthetic access-pattern description. zipf_s shapes the draw over the
/// cold region (rank 0 = lowest cold index); 0 means uniform. The hot
/// region is drawn uniformly. hot_offset_frac places the hot region within
/// the index space (1.0 = top of the range, so the hot set starts out on
/// CXL and has to be migrated).
struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::UniformRandom;
    uint64_t rss_pages = 1;
    double hot_fraction = 0.1;
    double hot_access_ratio = 0.9;
    double zipf_s = 0.0;
    double hot_offset_frac = 1.0;
    std::vector<Phase> phase_schedule;
    uint64_t ops_per_sec = 100000;
    uint32_t threads = 1;  // pure rate multiplier
    double read_ratio = 0.8;
    std::string trace_path;

    uint64_t effective_ops_per_sec() const { return ops_per_sec * threads; }

    uint64_t hot_pages() const {
        auto n = static_cast<uint64_t>(hot_fraction * static_cast<double>(rss_pages));
        return n == 0 ? 1 : n;
    }
    uint64_t hot_start() const {
        const uint64_t slack = rss_pages - hot_pages();
        return static_cast<uint64_t>(hot_offset_frac * static_cast<double>(slack));
    }
};

struct TenantSpec {
    WorkloadSpec workload;
    VirtualNs start_offset_ns = 0;
    std::string label;
};

struct TraceRecord {
    VirtualNs t;
    ProcessId process;
    uint64_t page;
    bool write;
};

/// Three equal phases: dedicated access to the top 3/8 of the RSS, a wider
/// 6/8 superset, then the original 3/8 again. Desk-scale default mirrors an
/// 80 GB RSS over 16 GB DRAM at 4 KiB granularity.
inline WorkloadSpec phased_micro_default(uint64_t rss_pages = 80000,
                                         VirtualNs phase_duration_ns = 100ull * 1000000000ull) {
    WorkloadSpec w;
    w.kind = WorkloadKind::PhasedMicro;
    w.rss_pages = rss_pages;
    const uint64_t r38 = rss_pages * 3 / 8;
    const uint64_t r68 = rss_pages * 6 / 8;
    w.phase_schedule = {
        Phase{phase_duration_ns, rss_pages - r38, r38},
        Phase{phase_duration_ns, rss_pages - r68, r68},
        Phase{phase_duration_ns, rss_pages - r38, r38},
    };
    return w;
}

/// Draws page indices for one workload. Pure function of (spec, rng, t).
class AccessGenerator {
public:
    AccessGenerator(const WorkloadSpec& spec, RngStream rng) : spec_(spec), rng_(rng) {
        if (spec_.kind == WorkloadKind::ZipfHotset && spec_.zipf_s > 0.0) {
            const uint64_t cold = spec_.rss_pages - spec_.hot_pages();
            build_zipf_cdf(cold);
        }
    }

    /// Next (page index, is_write) pair. t is virtual time since the
    /// workload started (phase selection for phased_micro).
    std::pair<uint64_t, bool> next(VirtualNs t) {
        uint64_t idx = 0;
        switch (spec_.kind) {
            case WorkloadKind::UniformRandom:
                idx = rng_.next_below(spec_.rss_pages);
                break;
            case WorkloadKind::ZipfHotset: {
                const uint64_t hs = spec_.hot_start();
                const uint64_t hp = spec_.hot_pages();
                if (rng_.next_bool(spec_.hot_access_ratio)) {
                    idx = hs + rng_.next_below(hp);
                } else {
                    const uint64_t cold = spec_.rss_pages - hp;
                    uint64_t rank = zipf_cdf_.empty() ? rng_.next_below(cold) : draw_zipf();
                    // cold indices skip over the hot region
                    idx = rank < hs ? rank : rank + hp;
                }
                break;
            }
            case WorkloadKind::Streaming:
                idx = stream_cursor_;
                stream_cursor_ = (stream_cursor_ + 1) % spec_.rss_pages;
                break;
            case WorkloadKind::PhasedMicro: {
                const Phase& ph = phase_at(t);
                idx = ph.region_start + rng_.next_below(ph.region_len);
                break;
            }
            case WorkloadKind::Trace:
                throw std::logic_error("trace workloads are replayed, not generated");
        }
        const bool write = !rng_.next_bool(spec_.read_ratio);
        return {idx, write};
    }

    const Phase& phase_at(VirtualNs t) const {
        VirtualNs acc = 0;
        for (const Phase& ph : spec_.phase_schedule) {
            acc += ph.duration_ns;
            if (t < acc) return ph;
        }
        return spec_.phase_schedule.back();
    }

private:
    void build_zipf_cdf(uint64_t n) {
        zipf_cdf_.resize(n);
        double sum = 0.0;
        for (uint64_t i = 0; i < n; ++i) {
            sum += 1.0 / std::pow(static_cast<double>(i + 1), spec_.zipf_s);
            zipf_cdf_[i] = sum;
        }
        for (auto& v : zipf_cdf_) v /= sum;
    }

    uint64_t draw_zipf() {
        const double u = rng_.next_double();
        auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
        return static_cast<uint64_t>(it - zipf_cdf_.begin());
    }

    WorkloadSpec spec_;
    RngStream rng_;
    uint64_t stream_cursor_ = 0;
    std::vector<double> zipf_cdf_;
};

/// Parses the trace grammar: `<t_ns> <process_id> <page_index> <r|w>` per
/// line, `#` comments and blank lines skipped. Timestamps must be
/// non-decreasing. Errors carry the offending line number.
inline std::vector<TraceRecord> replay_trace(std::istream& in) {
    std::vector<TraceRecord> out;
    std::string line;
    size_t lineno = 0;
    VirtualNs prev_t = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ls(line);
        uint64_t t, proc, pageidx;
        std::string kind;
        if (!(ls >> t >> proc >> pageidx >> kind) || (kind != "r" && kind != "w")) {
            throw ScenarioError("trace parse error at line " + std::to_string(lineno));
        }
        std::string rest;
        if (ls >> rest) throw ScenarioError("trace parse error at line " + std::to_string(lineno) +
                                            ": trailing tokens");
        if (!out.empty() && t < prev_t)
            throw ScenarioError("trace timestamps decrease at line " + std::to_string(lineno));
        prev_t = t;
        out.push_back(TraceRecord{t, static_cast<ProcessId>(proc), pageidx, kind == "w"});
    }
    return out;
}

inline std::vector<TraceRecord> replay_trace_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open trace file: " + path);
    return replay_trace(f);
}

}  // namespace tiersim
