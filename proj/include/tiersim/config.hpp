#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tiersim/simulation.hpp"

namespace tiersim {

/// Line-oriented key=value scenario file. '#' starts a comment, blank
/// lines are skipped, dotted keys group settings. Unknown keys and type
/// errors are reported with the offending key name.
class ScenarioConfig {
public:
    static ScenarioConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ScenarioError("cannot open config: " + path);
        return parse_stream(in, path);
    }

    static ScenarioConfig parse_stream(std::istream& in, const std::string& name = "<stream>") {
        ScenarioConfig cfg;
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ScenarioError(name + ":" + std::to_string(lineno) +
                                    ": expected key=value, got '" + trimmed + "'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ScenarioError(name + ":" + std::to_string(lineno) + ": empty key");
            if (cfg.kv_.count(key))
                throw ScenarioError(name + ":" + std::to_string(lineno) + ": duplicate key '" +
                                    key + "'");
            cfg.kv_[key] = value;
        }
        cfg.name_ = name;
        return cfg;
    }

    /// Builds simulation parameters, consuming every key. Leftover keys
    /// are a hard error so typos can't silently fall back to defaults.
    SimParams to_params() {
        SimParams p;
        p.seed = get_u64("seed", p.seed);
        p.duration_ns = static_cast<VirtualNs>(get_f64("duration_s", 0.0) * 1e9);
        if (p.duration_ns == 0) fail("duration_s", "must be positive");
        p.policy = parse_policy(get_str("policy", "adaptive"));

        p.cost.clock_ghz = get_f64("clock_ghz", p.cost.clock_ghz);
        p.cost.fault_base_ns = get_u64("cost.fault_base_ns", p.cost.fault_base_ns);
        p.cost.mig_alloc_ns = get_u64("cost.mig_alloc_ns", p.cost.mig_alloc_ns);
        p.cost.mig_unmap_ns = get_u64("cost.mig_unmap_ns", p.cost.mig_unmap_ns);
        p.cost.mig_copy_ns = get_u64("cost.mig_copy_ns", p.cost.mig_copy_ns);
        p.cost.mig_remap_ns = get_u64("cost.mig_remap_ns", p.cost.mig_remap_ns);
        p.cost.scan_visit_ns = get_u64("cost.scan_visit_ns", p.cost.scan_visit_ns);
        p.cost.scan_clear_ns = get_u64("cost.scan_clear_ns", p.cost.scan_clear_ns);

        read_tier("dram", p.dram);
        read_tier("cxl", p.cxl);
        if (p.dram.capacity_pages == 0) fail("dram.capacity_pages", "must be positive");
        if (p.cxl.capacity_pages == 0) fail("cxl.capacity_pages", "must be positive");

        // watermarks apply to DRAM; CXL keeps the defaults (only its
        // raw capacity gates demotion)
        p.dram.high_watermark = get_f64("watermark.high", p.dram.high_watermark);
        p.dram.low_watermark = get_f64("watermark.low", p.dram.low_watermark);
        p.dram.promo_watermark = get_f64("watermark.promo", p.dram.promo_watermark);
        if (!(p.dram.low_watermark <= p.dram.high_watermark))
            fail("watermark.low", "must not exceed watermark.high");

        p.profiler.poison_batch = get_u64("profiler.poison_batch", p.profiler.poison_batch);
        p.profiler.poison_period_ns =
            get_u64("profiler.poison_period_ms", p.profiler.poison_period_ns / 1000000ull) *
            1000000ull;
        p.profiler.scan_stride_pages =
            get_u64("profiler.scan_stride_pages", p.profiler.scan_stride_pages);

        p.adaptive.eval_period_s = get_u64("adaptive.eval_period_s", p.adaptive.eval_period_s);
        p.adaptive.restart_period_s =
            get_u64("adaptive.restart_period_s", p.adaptive.restart_period_s);
        p.adaptive.stop_streak = get_u64("adaptive.stop_streak", p.adaptive.stop_streak);
        p.adaptive.varying_min = get_u64("adaptive.varying_min", p.adaptive.varying_min);
        p.adaptive.restart_threshold =
            get_u64("adaptive.restart_threshold", p.adaptive.restart_threshold);
        p.adaptive.window_capacity =
            get_u64("adaptive.window_capacity", p.adaptive.window_capacity);
        if (p.adaptive.eval_period_s == 0) fail("adaptive.eval_period_s", "must be positive");
        if (p.adaptive.restart_period_s == 0)
            fail("adaptive.restart_period_s", "must be positive");

        p.metrics_interval_ns =
            static_cast<VirtualNs>(get_f64("metrics.interval_s", 2.0) * 1e9);
        if (p.metrics_interval_ns == 0) fail("metrics.interval_s", "must be positive");

        for (uint32_t i = 0;; ++i) {
            const std::string pre = "tenant." + std::to_string(i) + ".";
            if (!has_prefix(pre)) break;
            p.tenants.push_back(read_tenant(pre, i));
        }
        if (p.tenants.empty()) fail("tenant.0.kind", "at least one tenant is required");

        std::vector<std::string> leftovers;
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) leftovers.push_back(k);
        if (!leftovers.empty()) {
            std::string msg = name_ + ": unknown key(s):";
            for (const auto& k : leftovers) msg += " " + k;
            throw ScenarioError(msg);
        }
        return p;
    }

    const std::string& name() const { return name_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ScenarioError(name_ + ": key '" + key + "' " + why);
    }

    bool has_prefix(const std::string& pre) const {
        auto it = kv_.lower_bound(pre);
        return it != kv_.end() && it->first.compare(0, pre.size(), pre) == 0;
    }

    std::string get_str(const std::string& key, const std::string& def) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        used_.insert(it->first);
        return it->second;
    }

    uint64_t get_u64(const std::string& key, uint64_t def) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        used_.insert(it->first);
        try {
            size_t pos = 0;
            const uint64_t v = std::stoull(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            fail(key, "is not an unsigned integer: '" + it->second + "'");
        }
    }

    double get_f64(const std::string& key, double def) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        used_.insert(it->first);
        try {
            size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            fail(key, "is not a number: '" + it->second + "'");
        }
    }

    Policy parse_policy(const std::string& s) const {
        if (s == "no_migration") return Policy::NoMigration;
        if (s == "tpp_baseline") return Policy::TppBaseline;
        if (s == "tpp_mod") return Policy::TppMod;
        if (s == "adaptive") return Policy::Adaptive;
        fail("policy", "must be one of no_migration|tpp_baseline|tpp_mod|adaptive, got '" + s +
                           "'");
    }

    void read_tier(const std::string& pre, TierParams& t) {
        t.capacity_pages = get_u64(pre + ".capacity_pages", t.capacity_pages);
        t.read_latency_cycles = get_u64(pre + ".read_latency_cycles", t.read_latency_cycles);
        t.write_latency_cycles = get_u64(pre + ".write_latency_cycles", t.write_latency_cycles);
        t.read_bw_gbps = get_f64(pre + ".read_bw_gbps", t.read_bw_gbps);
        t.write_bw_gbps = get_f64(pre + ".write_bw_gbps", t.write_bw_gbps);
    }

    TenantSpec read_tenant(const std::string& pre, uint32_t idx) {
        TenantSpec ts;
        WorkloadSpec& w = ts.workload;
        const std::string kind = get_str(pre + "kind", "");
        if (kind == "uniform_random") w.kind = WorkloadKind::UniformRandom;
        else if (kind == "zipf_hotset") w.kind = WorkloadKind::ZipfHotset;
        else if (kind == "streaming") w.kind = WorkloadKind::Streaming;
        else if (kind == "phased_micro") w.kind = WorkloadKind::PhasedMicro;
        else if (kind == "trace") w.kind = WorkloadKind::Trace;
        else fail(pre + "kind", "must name a workload kind, got '" + kind + "'");

        w.rss_pages = get_u64(pre + "rss_pages", w.rss_pages);
        w.hot_fraction = get_f64(pre + "hot_fraction", w.hot_fraction);
        w.hot_access_ratio = get_f64(pre + "hot_access_ratio", w.hot_access_ratio);
        w.zipf_s = get_f64(pre + "zipf_s", w.zipf_s);
        w.hot_offset_frac = get_f64(pre + "hot_offset_frac", w.hot_offset_frac);
        w.ops_per_sec = get_u64(pre + "ops_per_sec", w.ops_per_sec);
        w.threads = static_cast<uint32_t>(get_u64(pre + "threads", w.threads));
        w.read_ratio = get_f64(pre + "read_ratio", w.read_ratio);
        w.trace_path = get_str(pre + "trace_path", "");
        ts.start_offset_ns =
            static_cast<VirtualNs>(get_f64(pre + "start_offset_s", 0.0) * 1e9);
        ts.label = get_str(pre + "label", "p" + std::to_string(idx));

        if (w.kind == WorkloadKind::Trace && w.trace_path.empty())
            fail(pre + "trace_path", "is required for trace workloads");
        if (w.kind == WorkloadKind::PhasedMicro) {
            for (uint32_t j = 0;; ++j) {
                const std::string pp = pre + "phase." + std::to_string(j) + ".";
                if (!has_prefix(pp)) break;
                Phase ph;
                ph.duration_ns =
                    static_cast<VirtualNs>(get_f64(pp + "duration_s", 0.0) * 1e9);
                ph.region_start = get_u64(pp + "region_start", 0);
                ph.region_len = get_u64(pp + "region_len", 0);
                if (ph.duration_ns == 0) fail(pp + "duration_s", "must be positive");
                if (ph.region_len == 0) fail(pp + "region_len", "must be positive");
                if (ph.region_start + ph.region_len > w.rss_pages)
                    fail(pp + "region_len", "phase region exceeds rss_pages");
                w.phase_schedule.push_back(ph);
            }
            if (w.phase_schedule.empty())
                w.phase_schedule = phased_micro_default(w.rss_pages).phase_schedule;
        }
        if (w.kind != WorkloadKind::Trace && w.rss_pages == 0)
            fail(pre + "rss_pages", "must be positive");
        return ts;
    }

    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
    std::string name_;
};

}  // namespace tiersim
