#pragma once

#include "vitdesc/descriptor_store.hpp"

namespace vitdesc {

struct BinningConfig {
    int levels = 2;         // hierarchy levels; 0 disables binning
    int dilation_base = 2;  // level l samples neighbours at distance base^(l-1)

    void validate() const;
};

// Concatenates each cell's descriptor with its 8 neighbours at every level.
//
// Output dim is D * (1 + 8 * levels). Slot order: the cell itself, then for
// each level in ascending order the offsets
//   (-d,-d) (-d,0) (-d,+d) (0,-d) (0,+d) (+d,-d) (+d,0) (+d,+d)
// with d = dilation_base^(level-1). Neighbours outside the grid contribute
// zeros. Slots are not normalized.
DescriptorField log_bin(const DescriptorField& field, const BinningConfig& cfg, unsigned threads = 1);

}  // namespace vitdesc
