#pragma once

#include <array>
#include <cstdint>

namespace ddf::detail {

// Corner i of a cell sits at offsets kMcCorner[i]; edge e joins corners
// kMcEdge[e][0] and kMcEdge[e][1].
inline constexpr int kMcCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                        {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
inline constexpr int kMcEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                       {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

extern const std::array<std::array<std::int8_t, 16>, 256> kMcTriangles;

}  // namespace ddf::detail
