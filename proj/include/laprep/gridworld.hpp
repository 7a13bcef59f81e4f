// Deterministic gridworld environments with controllable connectivity and
// their conversion to ergodic Markov chains under a behavior policy.
//
// Walls are removed edges of the 4-adjacency transition graph; the state
// space is always all n*m cells. Moving into a removed edge or out of
// bounds keeps the agent in place. The goal row teleports uniformly.
#pragma once

#include "laprep/dense.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laprep::grid {

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

// Unordered pair of 4-adjacent cells, stored as cell indices with a < b.
struct Edge {
    int a = 0;
    int b = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct GridEnv {
    int rows = 0;
    int cols = 0;
    Cell goal;
    std::vector<Edge> removed_edges; // sorted
    std::uint64_t seed = 0;

    int cell_count() const { return rows * cols; }
    int index(int r, int c) const { return r * cols + c; }
    Cell cell(int idx) const { return {idx / cols, idx % cols}; }
    int goal_index() const { return index(goal.row, goal.col); }
    bool is_removed(Edge e) const;
};

struct ErgodicChain {
    std::size_t size = 0;
    DenseMatrix P;                  // row-stochastic
    Vector r;                       // expected per-state reward
    std::vector<Cell> state_labels; // row-major cell order
};

// Wall-free n x m grid with the goal at the bottom-right cell.
GridEnv build_grid(int n, int m);

// Every 4-adjacency edge of the full grid, sorted; n(m-1) + m(n-1) of them.
std::vector<Edge> all_edges(const GridEnv& env);

// Edges currently present (all_edges minus removed_edges), sorted.
std::vector<Edge> present_edges(const GridEnv& env);

bool is_connected(const GridEnv& env);

// Removes w additional edges while keeping the grid connected: draws a
// uniform random spanning tree (Wilson's algorithm) of the present graph,
// then removes w edges chosen uniformly among the non-tree edges. For a
// fixed seed the removals are nested in w.
GridEnv carve_walls(const GridEnv& env, std::size_t w, std::uint64_t seed);

// Chain under the uniform policy over the four cardinal actions.
ErgodicChain to_chain(const GridEnv& env);

// Chain under a stochastic action table, one row per state with action
// order (up, down, left, right).
ErgodicChain to_chain(const GridEnv& env, const DenseMatrix& policy);

std::string to_json(const GridEnv& env);
GridEnv env_from_json(const std::string& text);
void save_env(const GridEnv& env, const std::string& path);
GridEnv load_env(const std::string& path);

}  // namespace laprep::grid
