#pragma once

#include <cstdint>
#include <string>

#include "sgtk/csr_graph.hpp"
#include "sgtk/sgt_transform.hpp"

namespace sgtk {

/// G(n,p): every ordered pair (including self pairs) present independently
/// with probability p. Deterministic for a given seed.
CsrGraph make_random_graph(std::size_t n, double p, std::uint64_t seed);

/// Worst-case-friendly benchmark input: `windows` row windows, each with
/// exactly tiles_per_window * blk_w distinct neighbor columns shared by all
/// blk_h rows, so every tile is 100% dense and nnz equals tile capacity.
CsrGraph make_blockdense_graph(std::size_t windows,
                               std::size_t tiles_per_window,
                               std::uint64_t seed, TileGeometry geom = {});

/// Parses "random:n=N,p=P[,seed=S]" or
/// "blockdense:windows=W,tiles=T[,seed=S]".
CsrGraph make_synthetic(const std::string& spec);

/// True if the string looks like a synthetic spec rather than a file path.
bool is_synthetic_spec(const std::string& spec);

}  // namespace sgtk
