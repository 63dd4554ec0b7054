#pragma once

#include <cassert>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tiersim/page.hpp"

namespace tiersim {

/// Shared prev/next storage for intrusive page lists. A page is on at most
/// one list at a time (list-partition invariant), so all lists of all nodes
/// can share one link table.
struct PageLinks {
    std::vector<PageId> prev;
    std::vector<PageId> next;

    void ensure(size_t n) {
        if (prev.size() < n) {
            prev.resize(n, kNoPage);
            next.resize(n, kNoPage);
        }
    }
};

/// Intrusive doubly-linked list of pages. Head = most recently added.
class PageList {
public:
    explicit PageList(PageLinks& links) : links_(links) {}

    bool empty() const { return size_ == 0; }
    size_t size() const { return size_; }
    PageId head() const { return head_; }
    PageId tail() const { return tail_; }

    void push_head(PageId p) {
        links_.prev[p] = kNoPage;
        links_.next[p] = head_;
        if (head_ != kNoPage) links_.prev[head_] = p;
        head_ = p;
        if (tail_ == kNoPage) tail_ = p;
        ++size_;
    }

    void remove(PageId p) {
        const PageId pr = links_.prev[p];
        const PageId nx = links_.next[p];
        if (pr != kNoPage) links_.next[pr] = nx; else head_ = nx;
        if (nx != kNoPage) links_.prev[nx] = pr; else tail_ = pr;
        links_.prev[p] = kNoPage;
        links_.next[p] = kNoPage;
        --size_;
    }

    PageId pop_tail() {
        const PageId p = tail_;
        assert(p != kNoPage);
        remove(p);
        return p;
    }

private:
    PageLinks& links_;
    PageId head_ = kNoPage;
    PageId tail_ = kNoPage;
    size_t size_ = 0;
};

enum class RefaultDecision : uint8_t { Promote, Hold };

struct RefaultEntry {
    static constexpr uint64_t kNone = UINT64_MAX;
    uint64_t recorded_age = 0;
    uint64_t first_distance = kNone;
    uint64_t second_distance = kNone;
};

constexpr size_t kPagevecCapacity = 15;

/// Per-node LRU state: active/inactive lists, the batching pagevec used by
/// the baseline policy, the node LRU age and the refault-distance map.
///
/// Aging cases (CXL node): (1) arrival by demotion or initial allocation,
/// (2) a hint fault setting or re-confirming PageHinted, (3) promotion out.
class NodeLru {
public:
    explicit NodeLru(PageLinks& links) : active(links), inactive(links) {
        pagevec.reserve(kPagevecCapacity);
    }

    PageList active;
    PageList inactive;
    std::vector<PageId> pagevec;
    uint64_t lru_age = 0;
    std::unordered_map<PageId, RefaultEntry> refault_map;

    /// Detaches the page from whichever container it is in.
    void detach(PageId id, Page& pg) {
        switch (pg.slot) {
            case LruSlot::Active: active.remove(id); break;
            case LruSlot::Inactive: inactive.remove(id); break;
            case LruSlot::Pagevec:
                for (size_t i = 0; i < pagevec.size(); ++i) {
                    if (pagevec[i] == id) {
                        pagevec.erase(pagevec.begin() + static_cast<long>(i));
                        break;
                    }
                }
                break;
            case LruSlot::None: break;
        }
        pg.slot = LruSlot::None;
    }

    void push_active_head(PageId id, Page& pg) {
        assert(pg.slot == LruSlot::None);
        active.push_head(id);
        pg.slot = LruSlot::Active;
    }

    void push_inactive_head(PageId id, Page& pg) {
        assert(pg.slot == LruSlot::None);
        inactive.push_head(id);
        pg.slot = LruSlot::Inactive;
    }

    /// Aging case (1): page demoted to or first allocated on this node.
    /// Ordering is age-then-record, so a fresh entry carries the new age.
    void on_cxl_arrival(PageId id, Page& pg) {
        push_inactive_head(id, pg);
        lru_age += 1;
        refault_map[id] = RefaultEntry{lru_age, RefaultEntry::kNone, RefaultEntry::kNone};
    }

    /// Baseline second-chance path: the page waits in the pagevec and only
    /// reaches the active list when a full batch of 15 is flushed.
    /// Returns true when this mark triggered a flush.
    bool mark_accessed_baseline(PageId id, Page& pg, std::vector<Page>& pages) {
        assert(pg.slot == LruSlot::Inactive);
        inactive.remove(id);
        pg.slot = LruSlot::Pagevec;
        pagevec.push_back(id);
        if (pagevec.size() < kPagevecCapacity) return false;
        for (PageId v : pagevec) {  // flush in buffer order
            pages[v].slot = LruSlot::None;
            push_active_head(v, pages[v]);
        }
        pagevec.clear();
        return true;
    }

    /// Modified second-chance path: PageHinted is set in the same event and
    /// the page stays on the inactive list. Aging case (2).
    void mark_accessed_modified(Page& pg) {
        assert(pg.slot == LruSlot::Inactive);
        pg.set(kPageHinted);
        lru_age += 1;
    }

    /// Refault-distance decision for a hint fault on a tracked page.
    /// distance = current age - recorded age; promote iff the second
    /// distance is strictly shorter than the first. On hold with both
    /// distances present the pair slides (second -> first).
    RefaultDecision update_refault_distance(PageId id) {
        auto it = refault_map.find(id);
        if (it == refault_map.end()) {
            // Missing entry: treat as a fresh arrival record, hold.
            refault_map[id] = RefaultEntry{lru_age, RefaultEntry::kNone, RefaultEntry::kNone};
            return RefaultDecision::Hold;
        }
        RefaultEntry& e = it->second;
        const uint64_t d = lru_age - e.recorded_age;
        if (e.first_distance == RefaultEntry::kNone) {
            e.first_distance = d;
            e.recorded_age = lru_age;
            return RefaultDecision::Hold;
        }
        if (d < e.first_distance) {
            e.second_distance = d;
            return RefaultDecision::Promote;
        }
        e.first_distance = d;  // slide; keep tracking a fresh pair
        e.second_distance = RefaultEntry::kNone;
        e.recorded_age = lru_age;
        return RefaultDecision::Hold;
    }

    /// Aging case (3): page promoted off this node.
    void on_promotion(PageId id, Page& pg) {
        detach(id, pg);
        lru_age += 1;
        refault_map.erase(id);
    }
};

}  // namespace tiersim
