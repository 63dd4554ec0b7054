#pragma once

#include <cstdint>

namespace tiersim {

using PageId = uint32_t;
using ProcessId = uint32_t;

constexpr PageId kNoPage = UINT32_MAX;

enum class Tier : uint8_t { Dram = 0, Cxl = 1 };
constexpr int kNumTiers = 2;

enum PageFlag : uint8_t {
    kPagePromoted = 1u << 0,
    kPageHinted = 1u << 1,
    kPoisoned = 1u << 2,
    kAccessBit = 1u << 3,
    kDirty = 1u << 4,
};

// Which LRU container the page currently sits in on its node.
enum class LruSlot : uint8_t { None = 0, Active, Inactive, Pagevec };

struct Page {
    ProcessId owner = 0;
    Tier tier = Tier::Dram;
    uint8_t flags = 0;
    LruSlot slot = LruSlot::None;
    uint32_t lru_pos = 0;  // opaque handle owned by NodeLru

    bool has(PageFlag f) const { return (flags & f) != 0; }
    void set(PageFlag f) { flags |= f; }
    void clear(PageFlag f) { flags = static_cast<uint8_t>(flags & ~f); }
};

}  // namespace tiersim
