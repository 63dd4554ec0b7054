#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiersim/adaptive.hpp"
#include "tiersim/cost.hpp"
#include "tiersim/event_queue.hpp"
#include "tiersim/memory.hpp"
#include "tiersim/rng.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

enum class Policy : uint8_t { NoMigration, TppBaseline, TppMod, Adaptive };

inline const char* to_string(Policy p) {
    switch (p) {
        case Policy::NoMigration: return "no_migration";
        case Policy::TppBaseline: return "tpp_baseline";
        case Policy::TppMod: return "tpp_mod";
        case Policy::Adaptive: return "adaptive";
    }
    return "?";
}

struct ProfilerParams {
    uint64_t poison_batch = 256;
    VirtualNs poison_period_ns = 100ull * 1000000ull;  // 100 ms
    uint64_t scan_stride_pages = 512;                  // 2 MB / 4 KiB
};

struct ScanResult {
    uint64_t accessed_count = 0;
    uint64_t sampled = 0;
};

struct SimParams {
    Policy policy = Policy::Adaptive;
    uint64_t seed = 1;
    VirtualNs duration_ns = 0;
    TierParams dram;
    TierParams cxl;
    CostParams cost;
    ProfilerParams profiler;
    AdaptiveParams adaptive;
    VirtualNs metrics_interval_ns = 2ull * 1000000000ull;
    std::vector<TenantSpec> tenants;
    bool check_invariants = true;
};

struct MetricsRow {
    VirtualNs t;
    ProcessId process;
    uint64_t delta;
    uint64_t slope;
    SlopeState slope_state;
    bool toggle_on;
    uint64_t accessed_count;
    uint64_t promotions;
    uint64_t demotions;
    uint64_t demote_promoted;
    VirtualNs total_cost_ns;
};

struct ToggleEvent {
    VirtualNs t;
    ProcessId process;
    bool on;  // false = stop, true = restart
};

struct RunReport {
    std::vector<CostLedger> per_process;
    std::vector<MetricsRow> series;
    std::vector<ToggleEvent> toggle_events;
    std::vector<std::string> labels;
    uint64_t total_accesses = 0;

    VirtualNs total_cost_ns() const {
        VirtualNs t = 0;
        for (const auto& l : per_process) t += l.total();
        return t;
    }
};

/// One deterministic single-threaded simulation instance.
class Simulation {
public:
    explicit Simulation(SimParams params)
        : p_(std::move(params)),
          queue_(clock_),
          mem_(p_.dram, p_.cxl, p_.cost, ledgers_) {
        if (p_.tenants.empty()) throw ScenarioError("scenario has no tenants");
        const bool migration = p_.policy != Policy::NoMigration;
        for (ProcessId i = 0; i < p_.tenants.size(); ++i) {
            const TenantSpec& ts = p_.tenants[i];
            ledgers_.emplace_back();
            mem_.register_process(i);
            Proc pr;
            pr.spec = ts.workload;
            if (ts.workload.kind == WorkloadKind::Trace) {
                pr.trace = replay_trace_file(ts.workload.trace_path);
                for (size_t k = 1; k < pr.trace.size(); ++k)
                    if (pr.trace[k].process != pr.trace[0].process)
                        throw ScenarioError("trace for tenant " + ts.label +
                                            " mixes process ids");
            } else {
                pr.gen.emplace(ts.workload, RngStream(p_.seed, i));
            }
            pr.start_ns = ts.start_offset_ns;
            pr.toggle.migration_on = migration;
            procs_.push_back(std::move(pr));
            report_.labels.push_back(ts.label.empty() ? ("p" + std::to_string(i)) : ts.label);
        }
    }

    RunReport run() {
        for (ProcessId i = 0; i < procs_.size(); ++i) {
            queue_.schedule(procs_[i].start_ns, [this, i] { start_tenant(i); });
        }
        const VirtualNs evp = p_.adaptive.eval_period_s * 1000000000ull;
        const VirtualNs rsp = p_.adaptive.restart_period_s * 1000000000ull;
        if (p_.policy != Policy::NoMigration) {
            queue_.schedule(p_.profiler.poison_period_ns, [this] { poison_all(); });
        }
        queue_.schedule(evp, [this] { kevaluated(); });
        if (p_.policy == Policy::Adaptive) queue_.schedule(rsp, [this] { krestartd(); });
        queue_.schedule(p_.metrics_interval_ns, [this] { metrics_tick(); });

        while (true) {
            const VirtualNs tev = queue_.next_time();
            // drain tenant accesses strictly before the next queued event,
            // never past the scenario end
            const VirtualNs limit = std::min<VirtualNs>(tev, p_.duration_ns + 1);
            while (true) {
                ProcessId best = kInvalidProc;
                VirtualNs bt = limit;
                for (ProcessId i = 0; i < procs_.size(); ++i) {
                    if (procs_[i].next_access < bt) {
                        bt = procs_[i].next_access;
                        best = i;
                    }
                }
                if (best == kInvalidProc) break;
                clock_.advance_to(bt);
                step_access(best);
            }
            if (queue_.empty() || tev > p_.duration_ns) break;
            queue_.dispatch_next();
        }
        finish_report();
        return std::move(report_);
    }

    // --- internal operations exposed for tests ---

    /// Allocates a tenant's RSS and arms its access stream.
    void start_tenant(ProcessId i) {
        Proc& pr = procs_[i];
        uint64_t rss = pr.spec.rss_pages;
        if (pr.spec.kind == WorkloadKind::Trace) {
            rss = 1;
            for (const auto& rec : pr.trace) rss = std::max(rss, rec.page + 1);
        }
        mem_.allocate(i, rss);
        pr.started = true;
        if (pr.spec.kind == WorkloadKind::Trace) {
            pr.next_access = pr.trace.empty() ? UINT64_MAX : pr.start_ns + pr.trace[0].t;
        } else {
            const uint64_t ops = pr.spec.effective_ops_per_sec();
            if (ops == 0) throw ScenarioError("tenant ops rate is zero");
            pr.access_gap = 1000000000ull / ops;
            if (pr.access_gap == 0) pr.access_gap = 1;
            pr.next_access = clock_.now() + pr.access_gap;
        }
    }

    /// Marks the next poison_batch resident pages of proc as poisoned,
    /// advancing a circular cursor. No-op while the toggle is off.
    uint64_t poison_tick(ProcessId proc) {
        Proc& pr = procs_[proc];
        if (!pr.toggle.migration_on || !pr.started) return 0;
        const auto& pages = mem_.process_pages(proc);
        if (pages.empty()) return 0;
        const uint64_t n = std::min<uint64_t>(p_.profiler.poison_batch, pages.size());
        for (uint64_t i = 0; i < n; ++i) {
            mem_.page(pages[pr.poison_cursor]).set(kPoisoned);
            pr.poison_cursor = (pr.poison_cursor + 1) % pages.size();
        }
        return n;
    }

    /// krestartd page-table scan: visits every stride-th resident page,
    /// counts and clears set access bits (only on visited pages).
    ScanResult stride_scan(ProcessId proc) {
        ScanResult r;
        const auto& pages = mem_.process_pages(proc);
        const uint64_t stride = std::max<uint64_t>(1, p_.profiler.scan_stride_pages);
        for (uint64_t i = 0; i < pages.size(); i += stride) {
            Page& pg = mem_.page(pages[i]);
            r.sampled += 1;
            if (pg.has(kAccessBit)) {
                r.accessed_count += 1;
                pg.clear(kAccessBit);
            }
        }
        ledgers_[proc].charge(CostCategory::Scan, r.sampled * p_.cost.scan_visit_ns +
                                                      r.accessed_count * p_.cost.scan_clear_ns);
        return r;
    }

    /// Delivers one hint fault on a resident page, as if a poisoned access
    /// just trapped.
    void deliver_hint_fault(ProcessId proc, PageId id) { on_hint_fault(proc, id); }

    TieredMemory& memory() { return mem_; }
    const ToggleState& toggle_state(ProcessId proc) const { return procs_[proc].toggle; }
    ToggleState& toggle_state_mut(ProcessId proc) { return procs_[proc].toggle; }
    const CostLedger& ledger(ProcessId proc) const { return ledgers_[proc]; }
    const RestartState& restart_state(ProcessId proc) const { return procs_[proc].restart; }
    SimClock& clock() { return clock_; }

private:
    static constexpr ProcessId kInvalidProc = UINT32_MAX;

    struct Proc {
        WorkloadSpec spec;
        std::optional<AccessGenerator> gen;
        std::vector<TraceRecord> trace;
        size_t trace_pos = 0;
        VirtualNs start_ns = 0;
        VirtualNs next_access = UINT64_MAX;
        VirtualNs access_gap = 0;
        bool started = false;
        uint64_t poison_cursor = 0;
        ToggleState toggle;
        RestartState restart;
        uint64_t last_scan_count = 0;
        uint64_t last_delta = 0;
        uint64_t last_slope = 0;
    };

    void step_access(ProcessId i) {
        Proc& pr = procs_[i];
        uint64_t page_idx;
        bool write;
        if (pr.spec.kind == WorkloadKind::Trace) {
            const TraceRecord& rec = pr.trace[pr.trace_pos++];
            page_idx = rec.page;
            write = rec.write;
            pr.next_access = pr.trace_pos < pr.trace.size()
                                 ? pr.start_ns + pr.trace[pr.trace_pos].t
                                 : UINT64_MAX;
        } else {
            auto [idx, wr] = pr.gen->next(clock_.now() - pr.start_ns);
            page_idx = idx;
            write = wr;
            pr.next_access += pr.access_gap;
        }
        report_.total_accesses += 1;
        const PageId id = mem_.process_pages(i)[page_idx];
        if (mem_.access(i, id, write)) on_hint_fault(i, id);
    }

    /// Hint-fault dispatch. Clears the poison, charges the base handling
    /// cost, then either skips (toggle off), promotes a candidate page, or
    /// marks it through the active LRU mode.
    void on_hint_fault(ProcessId proc, PageId id) {
        Page& pg = mem_.page(id);
        pg.clear(kPoisoned);
        CostLedger& led = ledgers_[proc];
        led.hint_faults += 1;
        led.charge(CostCategory::FaultHandling, p_.cost.fault_base_ns);
        if (!procs_[proc].toggle.migration_on) return;  // migration path skipped

        if (pg.tier == Tier::Dram) {
            // local fault: refresh recency so resident hot pages stay off
            // the demotion tail
            NodeLru& dram = mem_.lru(Tier::Dram);
            if (pg.slot == LruSlot::Inactive || pg.slot == LruSlot::Active) {
                dram.detach(id, pg);
                dram.push_active_head(id, pg);
            }
            return;
        }

        NodeLru& cxl = mem_.lru(Tier::Cxl);
        const bool modified = p_.policy == Policy::TppMod || p_.policy == Policy::Adaptive;
        const bool candidate = pg.slot == LruSlot::Active || pg.has(kPageHinted);
        if (modified) {
            if (pg.slot == LruSlot::Inactive) cxl.mark_accessed_modified(pg);
            const RefaultDecision dec = cxl.update_refault_distance(id);
            if (dec == RefaultDecision::Promote) led.refault_promotes += 1;
            else led.refault_holds += 1;
            if (candidate && dec == RefaultDecision::Promote) mem_.promote_sync(id);
        } else {
            if (candidate) {
                mem_.promote_sync(id);
            } else if (pg.slot == LruSlot::Inactive) {
                if (cxl.mark_accessed_baseline(id, pg, mem_.page_table())) led.pagevec_flushes += 1;
            }
            // pages waiting in the pagevec get no further treatment
        }
    }

    void poison_all() {
        for (ProcessId i = 0; i < procs_.size(); ++i) poison_tick(i);
        queue_.schedule(clock_.now() + p_.profiler.poison_period_ns, [this] { poison_all(); });
    }

    void kevaluated() {
        for (ProcessId i = 0; i < procs_.size(); ++i) {
            Proc& pr = procs_[i];
            if (!pr.started) continue;
            if (p_.policy == Policy::Adaptive && !pr.toggle.migration_on) continue;
            const uint64_t delta = compute_delta(pr.toggle, ledgers_[i].demote_promoted);
            const uint64_t slope = compute_slope(pr.toggle);
            pr.last_delta = delta;
            pr.last_slope = slope;
            if (p_.policy != Policy::Adaptive) continue;
            if (evaluate_stop(pr.toggle, slope, p_.adaptive) == StopAction::DisableMigration) {
                ledgers_[i].stops += 1;
                pr.restart.reset();
                report_.toggle_events.push_back(ToggleEvent{clock_.now(), i, false});
            }
        }
        queue_.schedule(clock_.now() + p_.adaptive.eval_period_s * 1000000000ull,
                        [this] { kevaluated(); });
    }

    void krestartd() {
        for (ProcessId i = 0; i < procs_.size(); ++i) {
            Proc& pr = procs_[i];
            if (!pr.started || pr.toggle.migration_on) continue;
            const ScanResult sr = stride_scan(i);
            pr.last_scan_count = sr.accessed_count;
            if (evaluate_restart(pr.restart, sr.accessed_count, p_.adaptive) ==
                RestartAction::RestartMigration) {
                pr.toggle.reset_for_restart();
                pr.restart.reset();
                ledgers_[i].restarts += 1;
                report_.toggle_events.push_back(ToggleEvent{clock_.now(), i, true});
            }
        }
        queue_.schedule(clock_.now() + p_.adaptive.restart_period_s * 1000000000ull,
                        [this] { krestartd(); });
    }

    void metrics_tick() {
        if (p_.check_invariants) {
            if (!mem_.conservation_holds())
                throw std::logic_error("page conservation violated");
        }
        for (ProcessId i = 0; i < procs_.size(); ++i) {
            const Proc& pr = procs_[i];
            if (!pr.started) continue;
            const CostLedger& led = ledgers_[i];
            report_.series.push_back(MetricsRow{
                clock_.now(), i, pr.last_delta, pr.last_slope, pr.toggle.slope_state,
                pr.toggle.migration_on, pr.last_scan_count, led.promotions, led.demotions,
                led.demote_promoted, led.total()});
        }
        queue_.schedule(clock_.now() + p_.metrics_interval_ns, [this] { metrics_tick(); });
    }

    void finish_report() { report_.per_process = ledgers_; }

    SimParams p_;
    SimClock clock_;
    EventQueue queue_;
    std::vector<CostLedger> ledgers_;
    TieredMemory mem_;
    std::vector<Proc> procs_;
    RunReport report_;
};

}  // namespace tiersim
