#pragma once

#include <iosfwd>
#include <string>

#include "hypar/decompose.hpp"
#include "hypar/dyadic.hpp"

namespace hypar {

// Cell-set text format:
//   {"resolution": N, "domain": "unit"|"signed", "cells": [[p,q],...]}
// The writer emits cells in sorted order; the reader rejects duplicates.
void write_cellset(const CellSet& s, std::ostream& os);
CellSet read_cellset(std::istream& is);
CellSet read_cellset_file(const std::string& path);
void write_cellset_file(const CellSet& s, const std::string& path);

// Tile-cover format:
//   {"J":..,"K":..,"entries":[{"delta_log2":i,
//                              "tiles":[[jn,jm,kn,km],...],
//                              "residual_cells":[[p,q],...]},...]}
// Residual cells are at the decomposed set's resolution.
void write_tile_cover(const TileCover& c, std::ostream& os);

// Per-cover CSV summary: delta,tile_count,residual_measure.
void write_tile_cover_csv(const TileCover& c, std::ostream& os);

}  // namespace hypar
