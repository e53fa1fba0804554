#include "icl/maze.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "icl/errors.hpp"
#include "icl/text.hpp"

namespace icl {

namespace {

constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};
constexpr Move kMoves[4] = {Move::up, Move::down, Move::left, Move::right};

bool walkable(char c) { return c != '#'; }

}  // namespace

std::string_view move_name(Move m) {
  switch (m) {
    case Move::up: return "up";
    case Move::down: return "down";
    case Move::left: return "left";
    case Move::right: return "right";
  }
  return "up";
}

Move move_from_name(std::string_view name) {
  for (Move m : kMoves) {
    if (move_name(m) == name) return m;
  }
  throw MalformedInstanceError("unknown move '" + std::string(name) + "'");
}

Cell MazeGrid::find(char glyph) const {
  for (int r = 0; r < height(); ++r) {
    for (int c = 0; c < width(); ++c) {
      if (at(r, c) == glyph) return {r, c};
    }
  }
  throw MalformedInstanceError(std::string("maze has no '") + glyph + "' cell");
}

std::string MazeGrid::render() const { return join(rows, "\n"); }

void MazeGrid::check() const {
  if (rows.empty()) throw MalformedInstanceError("empty maze");
  const int h = height();
  const int w = width();
  if (h % 2 == 0 || w % 2 == 0) throw MalformedInstanceError("maze dimensions must be odd");
  int s_count = 0, e_count = 0, q_count = 0;
  for (int r = 0; r < h; ++r) {
    if (static_cast<int>(rows[r].size()) != w) throw MalformedInstanceError("ragged maze rows");
    for (int c = 0; c < w; ++c) {
      char g = at(r, c);
      if (g != '#' && g != ' ' && g != 'S' && g != 'E' && g != '+' && g != '?') {
        throw MalformedInstanceError(std::string("foreign maze glyph '") + g + "'");
      }
      if (g == 'S') ++s_count;
      if (g == 'E') ++e_count;
      if (g == '?') ++q_count;
      bool border = r == 0 || c == 0 || r == h - 1 || c == w - 1;
      if (border && g != '#' && g != 'S' && g != 'E') {
        throw MalformedInstanceError("maze border must be wall except at S/E");
      }
    }
  }
  if (s_count != 1 || e_count != 1) throw MalformedInstanceError("maze needs exactly one S and one E");
  if (q_count > 1) throw MalformedInstanceError("maze allows at most one '?'");
  // '+' cells must form one or two 4-connected segments.
  std::vector<std::vector<int>> comp(h, std::vector<int>(w, -1));
  int components = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (at(r, c) != '+' || comp[r][c] != -1) continue;
      std::deque<Cell> queue{{r, c}};
      comp[r][c] = components;
      while (!queue.empty()) {
        auto [cr, cc] = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
          int nr = cr + kDr[d], nc = cc + kDc[d];
          if (inside(nr, nc) && at(nr, nc) == '+' && comp[nr][nc] == -1) {
            comp[nr][nc] = components;
            queue.push_back({nr, nc});
          }
        }
      }
      ++components;
    }
  }
  if (components > 2) throw MalformedInstanceError("maze '+' cells form more than two segments");
}

MazeGrid parse_maze(const std::vector<std::string>& lines) {
  MazeGrid maze{lines};
  maze.check();
  return maze;
}

MazeGrid generate_maze(int width, int height, Rng& rng) {
  if (width < 5 || height < 5 || width % 2 == 0 || height % 2 == 0) {
    throw Error("maze dimensions must be odd and at least 5");
  }
  MazeGrid maze;
  maze.rows.assign(height, std::string(width, '#'));
  const int cell_rows = (height - 1) / 2;
  const int cell_cols = (width - 1) / 2;
  auto open = [&](int r, int c) { maze.rows[r][c] = ' '; };

  // Iterative backtracker over the logical cell lattice.
  std::vector<std::vector<bool>> visited(cell_rows, std::vector<bool>(cell_cols, false));
  std::vector<Cell> stack{{0, 0}};
  visited[0][0] = true;
  open(1, 1);
  while (!stack.empty()) {
    auto [cr, cc] = stack.back();
    std::vector<int> options;
    for (int d = 0; d < 4; ++d) {
      int nr = cr + kDr[d], nc = cc + kDc[d];
      if (nr >= 0 && nr < cell_rows && nc >= 0 && nc < cell_cols && !visited[nr][nc]) {
        options.push_back(d);
      }
    }
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    int d = options[rng.index(options.size())];
    int nr = cr + kDr[d], nc = cc + kDc[d];
    visited[nr][nc] = true;
    open(2 * cr + 1 + kDr[d], 2 * cc + 1 + kDc[d]);
    open(2 * nr + 1, 2 * nc + 1);
    stack.push_back({nr, nc});
  }

  int start_col = 1 + 2 * static_cast<int>(rng.index(static_cast<std::size_t>(cell_cols)));
  maze.rows[0][start_col] = 'S';
  maze.rows[height - 2][width - 1] = 'E';
  return maze;
}

std::vector<Cell> maze_solution(const MazeGrid& maze) {
  Cell s = maze.find('S');
  Cell e = maze.find('E');
  Cell from = {s.first + 1, s.second};   // cell under the top opening
  Cell to = {e.first, e.second - 1};     // cell left of the right opening
  const int h = maze.height(), w = maze.width();
  std::vector<std::vector<Cell>> parent(h, std::vector<Cell>(w, {-1, -1}));
  std::vector<std::vector<bool>> seen(h, std::vector<bool>(w, false));
  std::deque<Cell> queue{from};
  seen[from.first][from.second] = true;
  while (!queue.empty()) {
    auto [r, c] = queue.front();
    queue.pop_front();
    if (Cell{r, c} == to) break;
    for (int d = 0; d < 4; ++d) {
      int nr = r + kDr[d], nc = c + kDc[d];
      if (maze.inside(nr, nc) && !seen[nr][nc] && maze.at(nr, nc) == ' ') {
        seen[nr][nc] = true;
        parent[nr][nc] = {r, c};
        queue.push_back({nr, nc});
      }
    }
  }
  if (!seen[to.first][to.second]) throw Error("maze has no S-to-E path");
  std::vector<Cell> path;
  for (Cell cur = to; cur != Cell{-1, -1}; cur = parent[cur.first][cur.second]) {
    path.push_back(cur);
    if (cur == from) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

Move step_direction(Cell a, Cell b) {
  if (b.first == a.first - 1) return Move::up;
  if (b.first == a.first + 1) return Move::down;
  if (b.second == a.second - 1) return Move::left;
  return Move::right;
}

}  // namespace

std::vector<Move> solution_moves(const MazeGrid& maze) {
  Cell s = maze.find('S');
  Cell e = maze.find('E');
  std::vector<Cell> path = maze_solution(maze);
  std::vector<Move> moves;
  moves.push_back(step_direction(s, path.front()));
  for (std::size_t i = 1; i < path.size(); ++i) {
    moves.push_back(step_direction(path[i - 1], path[i]));
  }
  moves.push_back(step_direction(path.back(), e));
  return moves;
}

int oracle_maze_solve(const MazeGrid& maze, const std::vector<Move>& moves) {
  maze.check();
  Cell pos = maze.find('S');
  for (Move m : moves) {
    int d = static_cast<int>(m);
    pos = {pos.first + kDr[d], pos.second + kDc[d]};
    if (!maze.inside(pos.first, pos.second) || !walkable(maze.at(pos.first, pos.second))) {
      return 0;
    }
  }
  return maze.at(pos.first, pos.second) == 'E' ? 1 : 0;
}

std::vector<Move> maze_gap_path(const MazeGrid& maze) {
  maze.check();
  Cell q = maze.find('?');
  Cell e = maze.find('E');

  // Label '+' segments; the target is the segment holding the cell next to E.
  const int h = maze.height(), w = maze.width();
  std::vector<std::vector<int>> comp(h, std::vector<int>(w, -1));
  int components = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (maze.at(r, c) != '+' || comp[r][c] != -1) continue;
      std::deque<Cell> queue{{r, c}};
      comp[r][c] = components;
      while (!queue.empty()) {
        auto [cr, cc] = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
          int nr = cr + kDr[d], nc = cc + kDc[d];
          if (maze.inside(nr, nc) && maze.at(nr, nc) == '+' && comp[nr][nc] == -1) {
            comp[nr][nc] = components;
            queue.push_back({nr, nc});
          }
        }
      }
      ++components;
    }
  }
  int target = -1;
  for (int d = 0; d < 4; ++d) {
    int nr = e.first + kDr[d], nc = e.second + kDc[d];
    if (maze.inside(nr, nc) && maze.at(nr, nc) == '+') target = comp[nr][nc];
  }
  if (target < 0) throw MalformedInstanceError("maze has no '+' segment touching E");

  // BFS from '?' across gap cells (' '); the first touch of the target
  // segment closes the path. The maze is a tree, so this path is unique.
  std::map<Cell, Cell> parent;
  std::deque<Cell> queue{q};
  parent[q] = {-1, -1};
  while (!queue.empty()) {
    auto [r, c] = queue.front();
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      Cell next{r + kDr[d], c + kDc[d]};
      if (!maze.inside(next.first, next.second)) continue;
      char g = maze.at(next.first, next.second);
      if (g == '+' && comp[next.first][next.second] == target) {
        std::vector<Cell> cells{next};
        for (Cell cur = {r, c}; cur != Cell{-1, -1}; cur = parent[cur]) cells.push_back(cur);
        std::reverse(cells.begin(), cells.end());
        std::vector<Move> moves;
        for (std::size_t i = 1; i < cells.size(); ++i) {
          moves.push_back(step_direction(cells[i - 1], cells[i]));
        }
        return moves;
      }
      if (g == ' ' && !parent.count(next)) {
        parent[next] = {r, c};
        queue.push_back(next);
      }
    }
  }
  throw MalformedInstanceError("maze '?' cannot reach the E-side segment");
}

int oracle_maze_complete(const MazeGrid& maze, const std::vector<Move>& moves) {
  std::vector<Move> expected = maze_gap_path(maze);
  return moves == expected ? 1 : 0;
}

}  // namespace icl
