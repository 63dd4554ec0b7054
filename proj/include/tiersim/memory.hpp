#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "tiersim/cost.hpp"
#include "tiersim/event_queue.hpp"
#include "tiersim/lru.hpp"
#include "tiersim/page.hpp"

namespace tiersim {

/// One memory node. Watermarks are fractions of capacity; promo applies to
/// the DRAM node only and triggers the demotion daemon early so promotions
/// always find headroom.
struct TierParams {
    uint64_t capacity_pages = 0;
    double high_watermark = 0.95;
    double low_watermark = 0.90;
    double promo_watermark = 0.88;
    uint64_t read_latency_cycles = 269;
    uint64_t write_latency_cycles = 269;
    double read_bw_gbps = 256.0;   // informational; copy cost models bandwidth
    double write_bw_gbps = 248.3;

    uint64_t high_pages() const { return static_cast<uint64_t>(high_watermark * static_cast<double>(capacity_pages)); }
    uint64_t low_pages() const { return static_cast<uint64_t>(low_watermark * static_cast<double>(capacity_pages)); }
    uint64_t promo_pages() const { return static_cast<uint64_t>(promo_watermark * static_cast<double>(capacity_pages)); }
};

/// DRAM + CXL page store with per-node LRU lists, watermark-driven demotion
/// and the four-step migration mechanic. All costs land in the owning
/// process's ledger.
class TieredMemory {
public:
    TieredMemory(TierParams dram, TierParams cxl, CostParams cost, std::vector<CostLedger>& ledgers)
        : cost_(cost), ledgers_(ledgers) {
        tiers_[0] = dram;
        tiers_[1] = cxl;
        lrus_.emplace_back(links_);
        lrus_.emplace_back(links_);
        read_ns_[0] = cycles_to_ns(dram.read_latency_cycles, cost.clock_ghz);
        read_ns_[1] = cycles_to_ns(cxl.read_latency_cycles, cost.clock_ghz);
        write_ns_[0] = cycles_to_ns(dram.write_latency_cycles, cost.clock_ghz);
        write_ns_[1] = cycles_to_ns(cxl.write_latency_cycles, cost.clock_ghz);
    }

    const TierParams& tier(Tier t) const { return tiers_[idx(t)]; }
    uint64_t used(Tier t) const { return used_[idx(t)]; }
    NodeLru& lru(Tier t) { return lrus_[idx(t)]; }
    Page& page(PageId id) { return pages_[id]; }
    const Page& page(PageId id) const { return pages_[id]; }
    size_t page_count() const { return pages_.size(); }
    std::vector<Page>& page_table() { return pages_; }
    const std::vector<PageId>& process_pages(ProcessId proc) const { return proc_pages_[proc]; }

    void register_process(ProcessId proc) {
        if (proc_pages_.size() <= proc) proc_pages_.resize(proc + 1);
    }

    /// Allocates n pages for proc: DRAM while below the high watermark, CXL
    /// otherwise. Runs the demotion daemon afterwards if DRAM crossed the
    /// promo watermark. Returns the id of the first new page.
    PageId allocate(ProcessId proc, uint64_t n) {
        assert(n >= 1);
        register_process(proc);
        const PageId first = static_cast<PageId>(pages_.size());
        pages_.reserve(pages_.size() + n);
        links_.ensure(pages_.size() + n);
        for (uint64_t i = 0; i < n; ++i) {
            const PageId id = static_cast<PageId>(pages_.size());
            Page pg;
            pg.owner = proc;
            if (used_[0] < tiers_[0].high_pages()) {
                pg.tier = Tier::Dram;
                used_[0] += 1;
                pages_.push_back(pg);
                lrus_[0].push_inactive_head(id, pages_[id]);
            } else if (used_[1] < tiers_[1].capacity_pages) {
                pg.tier = Tier::Cxl;
                used_[1] += 1;
                pages_.push_back(pg);
                lrus_[1].on_cxl_arrival(id, pages_[id]);
            } else {
                throw ScenarioError("out of memory: both tiers full allocating for process " +
                                    std::to_string(proc));
            }
            proc_pages_[proc].push_back(id);
        }
        if (used_[0] > tiers_[0].promo_pages()) run_demotion_daemon();
        return first;
    }

    /// Charges the access latency, sets the access bit (and dirty on write).
    /// Returns true when the page was poisoned, i.e. a hint fault is raised.
    bool access(ProcessId proc, PageId id, bool write) {
        Page& pg = pages_[id];
        if (pg.owner != proc)
            throw std::logic_error("access to page not owned by process");
        const int t = idx(pg.tier);
        ledgers_[proc].charge(CostCategory::Access, write ? write_ns_[t] : read_ns_[t]);
        pg.set(kAccessBit);
        if (write) pg.set(kDirty);
        return pg.has(kPoisoned);
    }

    /// Synchronous promotion CXL -> DRAM, blocking the faulting process:
    /// the four migration steps are charged to the owner. Sets PagePromoted.
    /// Returns false (counted as failed) when DRAM is entirely full.
    bool promote_sync(PageId id) {
        Page& pg = pages_[id];
        assert(pg.tier == Tier::Cxl);
        CostLedger& led = ledgers_[pg.owner];
        if (used_[0] >= tiers_[0].capacity_pages) {
            led.failed_migrations += 1;
            return false;
        }
        led.charge(CostCategory::MigrationAlloc, cost_.mig_alloc_ns);
        led.charge(CostCategory::MigrationUnmap, cost_.mig_unmap_ns);
        led.charge(CostCategory::MigrationCopy, cost_.mig_copy_ns);
        led.charge(CostCategory::MigrationRemap, cost_.mig_remap_ns);
        led.promotions += 1;

        lrus_[1].on_promotion(id, pg);  // aging case (3), refault entry dropped
        pg.tier = Tier::Dram;
        used_[1] -= 1;
        used_[0] += 1;
        pg.set(kPagePromoted);
        pg.clear(kPoisoned);
        pg.clear(kAccessBit);
        lrus_[0].push_active_head(id, pg);

        if (used_[0] > tiers_[0].promo_pages()) run_demotion_daemon();
        return true;
    }

    /// Demotes one page DRAM -> CXL. A demotion of a PagePromoted page is a
    /// completed ping-pong cycle: demote_promoted is counted for the owner
    /// and both PagePromoted and PageHinted are cleared so the next cycle
    /// needs a fresh promotion.
    void demote(PageId id) {
        Page& pg = pages_[id];
        assert(pg.tier == Tier::Dram);
        CostLedger& led = ledgers_[pg.owner];
        led.charge(CostCategory::Demotion, cost_.migration_total_ns());
        led.demotions += 1;
        if (pg.has(kPagePromoted)) {
            led.demote_promoted += 1;
            pg.clear(kPagePromoted);
        }
        pg.clear(kPageHinted);
        pg.clear(kPoisoned);
        pg.clear(kAccessBit);
        lrus_[0].detach(id, pg);
        pg.tier = Tier::Cxl;
        used_[0] -= 1;
        used_[1] += 1;
        lrus_[1].on_cxl_arrival(id, pg);  // aging case (1)
    }

    /// kswapd analogue: demotes strict inactive-list tail pages until DRAM
    /// is back at the low watermark (or CXL fills up, which is reported as
    /// pressure). When the inactive list runs dry the active tail is aged
    /// into it, with a second chance: a tail page whose hardware access bit
    /// is set gets the bit cleared and rotates back to the head instead.
    /// The rotation budget is one full pass, so a list with every bit set
    /// still ages in order. Returns the number of pages demoted.
    uint64_t run_demotion_daemon() {
        uint64_t demoted = 0;
        const uint64_t target = tiers_[0].low_pages();
        NodeLru& dram = lrus_[0];
        uint64_t rotate_budget = dram.active.size();
        while (used_[0] > target) {
            if (used_[1] >= tiers_[1].capacity_pages) {
                cxl_pressure_events_ += 1;
                break;
            }
            if (dram.inactive.empty()) {
                if (dram.active.empty()) break;  // remaining pages sit in the pagevec
                const PageId aged = dram.active.pop_tail();
                Page& pg = pages_[aged];
                pg.slot = LruSlot::None;
                if (rotate_budget > 0 && pg.has(kAccessBit)) {
                    pg.clear(kAccessBit);
                    rotate_budget -= 1;
                    dram.push_active_head(aged, pg);
                    continue;
                }
                pg.clear(kPageHinted);  // demoted out of the active set
                dram.push_inactive_head(aged, pg);
                continue;
            }
            const PageId victim = dram.inactive.tail();
            demote(victim);
            ++demoted;
        }
        return demoted;
    }

    uint64_t cxl_pressure_events() const { return cxl_pressure_events_; }

    /// Conservation check: every allocated page is resident in exactly one
    /// tier and tier occupancy matches per-process ownership.
    bool conservation_holds() const {
        uint64_t owned = 0;
        for (const auto& v : proc_pages_) owned += v.size();
        return owned == used_[0] + used_[1] && owned == pages_.size();
    }

    VirtualNs read_latency_ns(Tier t) const { return read_ns_[idx(t)]; }
    VirtualNs write_latency_ns(Tier t) const { return write_ns_[idx(t)]; }

private:
    static int idx(Tier t) { return static_cast<int>(t); }

    TierParams tiers_[2];
    uint64_t used_[2] = {0, 0};
    CostParams cost_;
    std::vector<CostLedger>& ledgers_;
    PageLinks links_;
    std::vector<NodeLru> lrus_;
    std::vector<Page> pages_;
    std::vector<std::vector<PageId>> proc_pages_;
    VirtualNs read_ns_[2];
    VirtualNs write_ns_[2];
    uint64_t cxl_pressure_events_ = 0;
};

}  // namespace tiersim
