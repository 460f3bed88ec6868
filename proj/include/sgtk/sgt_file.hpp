#pragma once

#include <string>

#include "sgtk/sgt_transform.hpp"

namespace sgtk {

// "SGT1" container: magic, little-endian header (u32 blk_h, u32 blk_w,
// u8 flags bit0 = values present, u64 num_nodes/num_edges/num_windows/
// block_counter), then node_pointer (u64), edge_list (u32), values (f32,
// optional), edge_to_row (u32), edge_to_column (u32), block_partition (u32),
// window_offsets (u64), window_unique_cols (u32).

void save_sgt(const TransformedGraph& t, const std::string& path);

/// Rejects wrong magic, truncated payloads and trailing garbage.
TransformedGraph load_sgt(const std::string& path);

}  // namespace sgtk
