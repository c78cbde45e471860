#pragma once

#include <string>
#include <vector>

namespace prism::image {

struct Size {
  int width = 0;
  int height = 0;
};

Size probe(const std::string& path);

// Re-encodes src as JPEG at the given quality. If max_side > 0 the image is
// scaled down so its longer side equals max_side (aspect preserved).
void transcode_jpeg(const std::string& src, const std::string& dst, int quality, int max_side);

// Writes a solid-color PNG; test corpora and missing-quadrant fills use this.
void write_solid_png(const std::string& path, int width, int height, unsigned char r,
                     unsigned char g, unsigned char b);

// 2x2 quadrant composite: tiles[0..3] map to top-left, top-right, bottom-left,
// bottom-right. Empty strings render as solid black quadrants. Every tile is
// resized to tile_size x tile_size, so the output is exactly twice the tile
// size in each dimension.
void compose_quadrants(const std::vector<std::string>& tiles, const std::string& dst,
                       int tile_size, int quality);

}  // namespace prism::image
