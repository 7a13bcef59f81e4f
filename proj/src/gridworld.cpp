#include "laprep/gridworld.hpp"

#include "laprep/chain.hpp"
#include "laprep/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>

namespace laprep::grid {

namespace {

Edge make_edge(int a, int b) {
    if (a > b) std::swap(a, b);
    return {a, b};
}

// Adjacency lists of the present graph.
std::vector<std::vector<int>> adjacency(const GridEnv& env) {
    std::vector<std::vector<int>> adj(env.cell_count());
    for (const Edge& e : present_edges(env)) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    return adj;
}

bool connected(const std::vector<std::vector<int>>& adj) {
    if (adj.empty()) return false;
    std::vector<char> seen(adj.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                frontier.push(v);
            }
    }
    return count == adj.size();
}

// Uniform spanning tree by Wilson's algorithm (loop-erased random walks).
std::set<Edge> wilson_tree(const std::vector<std::vector<int>>& adj, Rng& rng) {
    const int n = static_cast<int>(adj.size());
    std::vector<char> in_tree(n, 0);
    in_tree[0] = 1;
    std::set<Edge> tree;
    std::vector<int> next(n, -1);
    for (int start = 1; start < n; ++start) {
        if (in_tree[start]) continue;
        int u = start;
        while (!in_tree[u]) {
            next[u] = adj[u][rng.below(adj[u].size())];
            u = next[u];
        }
        u = start;
        while (!in_tree[u]) {
            in_tree[u] = 1;
            tree.insert(make_edge(u, next[u]));
            u = next[u];
        }
    }
    return tree;
}

}  // namespace

bool GridEnv::is_removed(Edge e) const {
    return std::binary_search(removed_edges.begin(), removed_edges.end(), e);
}

GridEnv build_grid(int n, int m) {
    if (n < 2 || m < 2) throw InvalidSize("build_grid: need at least a 2x2 grid");
    GridEnv env;
    env.rows = n;
    env.cols = m;
    env.goal = {n - 1, m - 1};
    return env;
}

std::vector<Edge> all_edges(const GridEnv& env) {
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(env.rows) * (env.cols - 1) +
                  static_cast<std::size_t>(env.cols) * (env.rows - 1));
    for (int r = 0; r < env.rows; ++r)
        for (int c = 0; c < env.cols; ++c) {
            if (c + 1 < env.cols) edges.push_back(make_edge(env.index(r, c), env.index(r, c + 1)));
            if (r + 1 < env.rows) edges.push_back(make_edge(env.index(r, c), env.index(r + 1, c)));
        }
    std::sort(edges.begin(), edges.end());
    return edges;
}

std::vector<Edge> present_edges(const GridEnv& env) {
    std::vector<Edge> edges;
    for (const Edge& e : all_edges(env))
        if (!env.is_removed(e)) edges.push_back(e);
    return edges;
}

bool is_connected(const GridEnv& env) {
    return connected(adjacency(env));
}

GridEnv carve_walls(const GridEnv& env, std::size_t w, std::uint64_t seed) {
    const std::vector<Edge> edges = present_edges(env);
    const std::size_t spare = edges.size() - (static_cast<std::size_t>(env.cell_count()) - 1);
    if (w > spare)
        throw TooManyWalls("carve_walls: " + std::to_string(w) + " walls leave no spanning tree");

    GridEnv out = env;
    out.seed = seed;
    if (w == 0) return out;

    const auto adj = adjacency(env);
    if (!connected(adj)) throw Disconnected("carve_walls: grid is not connected");

    Rng rng(seed);
    const std::set<Edge> tree = wilson_tree(adj, rng);
    std::vector<Edge> candidates;
    for (const Edge& e : edges)
        if (!tree.count(e)) candidates.push_back(e);

    // Fisher-Yates; taking the first w makes removals nested in w.
    for (std::size_t i = candidates.size(); i > 1; --i)
        std::swap(candidates[i - 1], candidates[rng.below(i)]);

    out.removed_edges.insert(out.removed_edges.end(), candidates.begin(), candidates.begin() + w);
    std::sort(out.removed_edges.begin(), out.removed_edges.end());
    if (!is_connected(out)) throw Disconnected("carve_walls: connectivity lost");
    return out;
}

namespace {

ErgodicChain chain_under_policy(const GridEnv& env, const DenseMatrix* policy) {
    if (!is_connected(env)) throw Disconnected("to_chain: grid is not connected");
    const int n_states = env.cell_count();
    const int goal = env.goal_index();

    ErgodicChain out;
    out.size = static_cast<std::size_t>(n_states);
    out.P = DenseMatrix(out.size, out.size);
    out.r = Vector(out.size, 0.0);
    out.state_labels.reserve(out.size);
    for (int s = 0; s < n_states; ++s) out.state_labels.push_back(env.cell(s));

    if (policy) {
        if (policy->rows() != out.size || policy->cols() != 4)
            throw DimensionMismatch("to_chain: policy table must be |S| x 4");
        for (std::size_t s = 0; s < out.size; ++s) {
            double sum = 0.0;
            for (std::size_t a = 0; a < 4; ++a) {
                if ((*policy)(s, a) < 0.0) throw NotStochastic("to_chain: negative action probability");
                sum += (*policy)(s, a);
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw NotStochastic("to_chain: policy row does not sum to 1");
        }
    }

    // Action order: up, down, left, right.
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int s = 0; s < n_states; ++s) {
        if (s == goal) {
            for (int t = 0; t < n_states; ++t) out.P(s, t) = 1.0 / n_states;
            out.r[s] = -1.0; // teleports are resets, never rewarded transitions
            continue;
        }
        const Cell from = env.cell(s);
        for (int a = 0; a < 4; ++a) {
            const double pa = policy ? (*policy)(s, a) : 0.25;
            const int r2 = from.row + dr[a];
            const int c2 = from.col + dc[a];
            int target = s;
            if (r2 >= 0 && r2 < env.rows && c2 >= 0 && c2 < env.cols) {
                const int t = env.index(r2, c2);
                Edge e = {std::min(s, t), std::max(s, t)};
                if (!env.is_removed(e)) target = t;
            }
            out.P(s, target) += pa;
            out.r[s] += pa * (target == goal ? 1.0 : -1.0);
        }
    }

    if (!chain::check_ergodic(out.P)) throw NotErgodic("to_chain: resulting chain is not ergodic");
    return out;
}

}  // namespace

ErgodicChain to_chain(const GridEnv& env) {
    return chain_under_policy(env, nullptr);
}

ErgodicChain to_chain(const GridEnv& env, const DenseMatrix& policy) {
    return chain_under_policy(env, &policy);
}

std::string to_json(const GridEnv& env) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["n"] = env.rows;
    j["m"] = env.cols;
    j["goal"] = {env.goal.row, env.goal.col};
    auto edges = nlohmann::json::array();
    std::vector<Edge> sorted = env.removed_edges;
    std::sort(sorted.begin(), sorted.end());
    for (const Edge& e : sorted) {
        const Cell a = env.cell(e.a);
        const Cell b = env.cell(e.b);
        edges.push_back({{a.row, a.col}, {b.row, b.col}});
    }
    j["removed_edges"] = std::move(edges);
    j["seed"] = env.seed;
    return j.dump(2) + "\n";
}

GridEnv env_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("env_from_json: ") + e.what());
    }
    try {
        GridEnv env = build_grid(j.at("n").get<int>(), j.at("m").get<int>());
        env.goal = {j.at("goal").at(0).get<int>(), j.at("goal").at(1).get<int>()};
        if (env.goal.row < 0 || env.goal.row >= env.rows || env.goal.col < 0 ||
            env.goal.col >= env.cols)
            throw SchemaError("env_from_json: goal outside the grid");
        env.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& pair : j.at("removed_edges")) {
            const Cell a{pair.at(0).at(0).get<int>(), pair.at(0).at(1).get<int>()};
            const Cell b{pair.at(1).at(0).get<int>(), pair.at(1).at(1).get<int>()};
            const int ia = env.index(a.row, a.col);
            const int ib = env.index(b.row, b.col);
            if (std::abs(a.row - b.row) + std::abs(a.col - b.col) != 1)
                throw SchemaError("env_from_json: removed edge joins non-adjacent cells");
            env.removed_edges.push_back({std::min(ia, ib), std::max(ia, ib)});
        }
        std::sort(env.removed_edges.begin(), env.removed_edges.end());
        return env;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("env_from_json: ") + e.what());
    }
}

void save_env(const GridEnv& env, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_env: cannot open " + path);
    out << to_json(env);
    if (!out) throw IoError("save_env: write failed for " + path);
}

GridEnv load_env(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_env: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return env_from_json(text);
}

}  // namespace laprep::grid
