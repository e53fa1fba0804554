#pragma once

#include <string>
#include <utility>
#include <vector>

#include "icl/rng.hpp"

namespace icl {

enum class Move { up, down, left, right };

std::string_view move_name(Move m);
Move move_from_name(std::string_view name);  // throws MalformedInstanceError

using Cell = std::pair<int, int>;  // (row, col)

// Character maze over {'#', ' ', 'S', 'E', '+', '?'}. Odd dimensions; the
// border is wall except at the S (top) and E (right) openings.
struct MazeGrid {
  std::vector<std::string> rows;

  int height() const { return static_cast<int>(rows.size()); }
  int width() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
  char at(int r, int c) const { return rows[r][c]; }
  bool inside(int r, int c) const { return r >= 0 && r < height() && c >= 0 && c < width(); }
  Cell find(char glyph) const;  // throws MalformedInstanceError when absent

  std::string render() const;

  // Structural invariants of the type: char set, odd dimensions, single S/E,
  // sealed border, at most one '?', and '+' forming one or two segments.
  void check() const;
};

MazeGrid parse_maze(const std::vector<std::string>& lines);

// Perfect maze via recursive backtracker. S sits on the top border over a
// random odd column; E sits on the right border at the second-to-last row.
MazeGrid generate_maze(int width, int height, Rng& rng);

// Unique open-cell path from the cell under S to the cell left of E.
std::vector<Cell> maze_solution(const MazeGrid& maze);

// Moves realising the full S-to-E traversal (first move leaves S, last enters E).
std::vector<Move> solution_moves(const MazeGrid& maze);

int oracle_maze_solve(const MazeGrid& maze, const std::vector<Move>& moves);
int oracle_maze_complete(const MazeGrid& maze, const std::vector<Move>& moves);

// The unique legal gap path for a Maze Complete grid: moves from '?' across
// open cells onto the first '+' of the segment holding E. Also used by the
// trace builder, which narrates this search.
std::vector<Move> maze_gap_path(const MazeGrid& maze);

}  // namespace icl
