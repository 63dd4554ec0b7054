#pragma once

#include <cstdint>

#include "tiersim/event_queue.hpp"

namespace tiersim {

/// Converts CPU cycles to virtual nanoseconds at the configured core clock,
/// rounding to the nearest ns.
inline VirtualNs cycles_to_ns(uint64_t cycles, double ghz) {
    double ns = static_cast<double>(cycles) / ghz;
    return static_cast<VirtualNs>(ns + 0.5);
}

enum class CostCategory {
    Access,
    FaultHandling,
    MigrationAlloc,
    MigrationUnmap,
    MigrationCopy,
    MigrationRemap,
    Demotion,
    Scan,
};

/// Accumulated virtual time per cost source, plus event counters.
/// One ledger per process; the run total is the sum over processes.
struct CostLedger {
    VirtualNs access_ns = 0;
    VirtualNs fault_handling_ns = 0;
    VirtualNs migration_alloc_ns = 0;
    VirtualNs migration_unmap_ns = 0;
    VirtualNs migration_copy_ns = 0;
    VirtualNs migration_remap_ns = 0;
    VirtualNs demotion_ns = 0;
    VirtualNs scan_ns = 0;

    uint64_t promotions = 0;
    uint64_t demotions = 0;
    uint64_t demote_promoted = 0;
    uint64_t hint_faults = 0;
    uint64_t restarts = 0;
    uint64_t stops = 0;
    uint64_t failed_migrations = 0;
    uint64_t pagevec_flushes = 0;
    uint64_t refault_promotes = 0;
    uint64_t refault_holds = 0;

    void charge(CostCategory cat, VirtualNs ns) {
        switch (cat) {
            case CostCategory::Access: access_ns += ns; return;
            case CostCategory::FaultHandling: fault_handling_ns += ns; return;
            case CostCategory::MigrationAlloc: migration_alloc_ns += ns; return;
            case CostCategory::MigrationUnmap: migration_unmap_ns += ns; return;
            case CostCategory::MigrationCopy: migration_copy_ns += ns; return;
            case CostCategory::MigrationRemap: migration_remap_ns += ns; return;
            case CostCategory::Demotion: demotion_ns += ns; return;
            case CostCategory::Scan: scan_ns += ns; return;
        }
        throw std::logic_error("unknown cost category");
    }

    VirtualNs total() const {
        return access_ns + fault_handling_ns + migration_alloc_ns + migration_unmap_ns +
               migration_copy_ns + migration_remap_ns + demotion_ns + scan_ns;
    }

    VirtualNs migration_steps_total() const {
        return migration_alloc_ns + migration_unmap_ns + migration_copy_ns + migration_remap_ns;
    }

    CostLedger& operator+=(const CostLedger& o) {
        access_ns += o.access_ns;
        fault_handling_ns += o.fault_handling_ns;
        migration_alloc_ns += o.migration_alloc_ns;
        migration_unmap_ns += o.migration_unmap_ns;
        migration_copy_ns += o.migration_copy_ns;
        migration_remap_ns += o.migration_remap_ns;
        demotion_ns += o.demotion_ns;
        scan_ns += o.scan_ns;
        promotions += o.promotions;
        demotions += o.demotions;
        demote_promoted += o.demote_promoted;
        hint_faults += o.hint_faults;
        restarts += o.restarts;
        stops += o.stops;
        failed_migrations += o.failed_migrations;
        pagevec_flushes += o.pagevec_flushes;
        refault_promotes += o.refault_promotes;
        refault_holds += o.refault_holds;
        return *this;
    }
};

/// Cost model parameters. Migration step defaults are the midpoints of the
/// measured per-step ranges; fault handling likewise.
struct CostParams {
    double clock_ghz = 2.6;

    VirtualNs fault_base_ns = 4500;
    VirtualNs mig_alloc_ns = 1500;
    VirtualNs mig_unmap_ns = 3000;
    VirtualNs mig_copy_ns = 6000;
    VirtualNs mig_remap_ns = 2500;
    VirtualNs scan_visit_ns = 50;
    VirtualNs scan_clear_ns = 1000;  // TLB-shootdown proxy per cleared bit

    VirtualNs migration_total_ns() const {
        return mig_alloc_ns + mig_unmap_ns + mig_copy_ns + mig_remap_ns;
    }
};

}  // namespace tiersim
