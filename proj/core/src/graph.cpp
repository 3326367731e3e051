#include "urnnet/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <queue>

#include "urnnet/error.hpp"

namespace urnnet {

InteractionMatrix validate_matrix(const Mat& raw) {
  if (!raw.square() || raw.rows == 0)
    throw Error(ErrorCode::NonSquare, "interaction matrix must be square and nonempty");
  InteractionMatrix m;
  m.n = raw.rows;
  m.weights = raw;
  m.row_kind.resize(m.n);
  m.row_sums.resize(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) {
      double a = raw(i, j);
      if (a < 0.0)
        throw Error(ErrorCode::NegativeEntry, "negative interaction weight", i, j);
      sum += a;
    }
    if (sum > 1.0 + InteractionMatrix::kRowSumTol)
      throw Error(ErrorCode::RowSumExceedsOne, "row sum exceeds 1", i);
    m.row_sums[i] = sum;
    m.row_kind[i] = (sum >= 1.0 - InteractionMatrix::kRowSumTol) ? RowKind::Stochastic
                                                                 : RowKind::Substochastic;
  }
  return m;
}

AgentGraph build_graph(const InteractionMatrix& m) {
  AgentGraph g;
  g.n = m.n;
  g.out.resize(m.n);
  g.in.resize(m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (i != j && m.weights(i, j) > 0.0) {
        g.out[i].push_back(j);
        g.in[j].push_back(i);
      }
  return g;
}

namespace {

// Iterative Tarjan. Recursion would overflow on long path graphs.
struct TarjanState {
  const AgentGraph& g;
  std::vector<std::size_t> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  std::vector<std::vector<std::size_t>> components;

  explicit TarjanState(const AgentGraph& graph)
      : g(graph),
        index(graph.n, SIZE_MAX),
        lowlink(graph.n, 0),
        on_stack(graph.n, false) {}

  void run(std::size_t root) {
    struct Frame {
      std::size_t v;
      std::size_t next_edge;
    };
    std::vector<Frame> frames;
    frames.push_back({root, 0});
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next_edge < g.out[f.v].size()) {
        std::size_t w = g.out[f.v][f.next_edge++];
        if (index[w] == SIZE_MAX) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          std::vector<std::size_t> comp;
          for (;;) {
            std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          components.push_back(std::move(comp));
        }
        std::size_t v = f.v;
        frames.pop_back();
        if (!frames.empty())
          lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
      }
    }
  }
};

}  // namespace

std::vector<CommunicationClass> communication_classes(const AgentGraph& g) {
  TarjanState t(g);
  for (std::size_t v = 0; v < g.n; ++v)
    if (t.index[v] == SIZE_MAX) t.run(v);

  std::vector<CommunicationClass> classes;
  classes.reserve(t.components.size());
  for (auto& comp : t.components) {
    std::sort(comp.begin(), comp.end());
    CommunicationClass c;
    c.members = std::move(comp);
    classes.push_back(std::move(c));
  }
  std::sort(classes.begin(), classes.end(),
            [](const CommunicationClass& a, const CommunicationClass& b) {
              return a.members.front() < b.members.front();
            });

  std::vector<std::size_t> class_of(g.n);
  for (std::size_t k = 0; k < classes.size(); ++k)
    for (std::size_t v : classes[k].members) class_of[v] = k;
  for (std::size_t u = 0; u < g.n; ++u)
    for (std::size_t w : g.out[u])
      if (class_of[u] == class_of[w])
        classes[class_of[u]].internal_edges.emplace_back(u, w);
  for (auto& c : classes) std::sort(c.internal_edges.begin(), c.internal_edges.end());
  return classes;
}

BipartitenessReport bipartiteness(const CommunicationClass& c) {
  BipartitenessReport r;
  const auto& members = c.members;
  const std::size_t n = members.size();
  if (c.internal_edges.empty()) {
    // Isolated agent (or no support at all): period undefined, not bipartite.
    return r;
  }

  std::vector<std::size_t> local(members.back() + 1);
  for (std::size_t k = 0; k < n; ++k) local[members[k]] = k;
  std::vector<std::vector<std::size_t>> out(n), und(n);
  for (auto [u, w] : c.internal_edges) {
    std::size_t lu = local[u], lw = local[w];
    out[lu].push_back(lw);
    und[lu].push_back(lw);
    und[lw].push_back(lu);
  }

  // 2-coloring of the underlying undirected graph. The class is strongly
  // connected, so one BFS from vertex 0 reaches everything.
  std::vector<int> color(n, -1);
  color[0] = 0;
  std::queue<std::size_t> q;
  q.push(0);
  bool two_colorable = true;
  while (!q.empty() && two_colorable) {
    std::size_t v = q.front();
    q.pop();
    for (std::size_t w : und[v]) {
      if (color[w] == -1) {
        color[w] = 1 - color[v];
        q.push(w);
      } else if (color[w] == color[v]) {
        two_colorable = false;
        break;
      }
    }
  }

  // Period: gcd of dist[u] + 1 - dist[w] over directed edges, distances by
  // directed BFS from vertex 0.
  std::vector<std::size_t> dist(n, SIZE_MAX);
  dist[0] = 0;
  q = {};
  q.push(0);
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop();
    for (std::size_t w : out[v])
      if (dist[w] == SIZE_MAX) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  unsigned g = 0;
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : out[v]) {
      long long d = static_cast<long long>(dist[v]) + 1 - static_cast<long long>(dist[w]);
      g = std::gcd(g, static_cast<unsigned>(std::llabs(d)));
    }
  r.period = g;

  r.is_bipartite = two_colorable;
  if (two_colorable != (g % 2 == 0))
    throw Error(ErrorCode::InconsistentClassification,
                "2-coloring and period computation disagree");
  if (two_colorable) {
    std::vector<std::size_t> I, J;
    for (std::size_t k = 0; k < n; ++k)
      (color[k] == 0 ? I : J).push_back(members[k]);
    r.partition = std::make_pair(std::move(I), std::move(J));
  }
  return r;
}

HierarchyDecomposition hierarchy_decomposition(const InteractionMatrix& m) {
  AgentGraph g = build_graph(m);
  std::vector<CommunicationClass> raw = communication_classes(g);
  const std::size_t k = raw.size();

  std::vector<std::size_t> class_of(m.n);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t v : raw[c].members) class_of[v] = c;

  // Condensation successors (classes this class points into).
  std::vector<std::vector<std::size_t>> succ(k);
  for (std::size_t u = 0; u < m.n; ++u)
    for (std::size_t w : g.out[u])
      if (class_of[u] != class_of[w]) succ[class_of[u]].push_back(class_of[w]);
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }

  // level(c) = 0 if no successors, else 1 + max level over successors.
  // Computed by topological order over the condensation DAG.
  std::vector<std::size_t> level(k, 0);
  std::vector<std::size_t> pending(k, 0);
  std::vector<std::vector<std::size_t>> pred(k);
  for (std::size_t c = 0; c < k; ++c) {
    pending[c] = succ[c].size();
    for (std::size_t s : succ[c]) pred[s].push_back(c);
  }
  std::queue<std::size_t> ready;
  for (std::size_t c = 0; c < k; ++c)
    if (pending[c] == 0) ready.push(c);
  std::size_t processed = 0;
  while (!ready.empty()) {
    std::size_t c = ready.front();
    ready.pop();
    ++processed;
    for (std::size_t s : succ[c]) level[c] = std::max(level[c], level[s] + 1);
    for (std::size_t p : pred[c])
      if (--pending[p] == 0) ready.push(p);
  }
  if (processed != k)
    throw Error(ErrorCode::InconsistentClassification, "condensation has a cycle");

  HierarchyDecomposition h;
  h.weights = m.weights;
  std::size_t max_level = 0;
  for (std::size_t c = 0; c < k; ++c) max_level = std::max(max_level, level[c]);

  // Renumber classes in (level, smallest member) order.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (level[a] != level[b]) return level[a] < level[b];
    return raw[a].members.front() < raw[b].members.front();
  });

  h.classes.resize(k);
  h.level_of_class.resize(k);
  h.levels.assign(max_level + 1, {});
  h.class_of_agent.resize(m.n);
  for (std::size_t new_id = 0; new_id < k; ++new_id) {
    std::size_t old_id = order[new_id];
    h.classes[new_id] = std::move(raw[old_id]);
    h.level_of_class[new_id] = level[old_id];
    h.levels[level[old_id]].push_back(new_id);
    for (std::size_t v : h.classes[new_id].members) h.class_of_agent[v] = new_id;
  }

  h.agent_order.reserve(m.n);
  for (const auto& c : h.classes)
    h.agent_order.insert(h.agent_order.end(), c.members.begin(), c.members.end());
  h.agent_position.resize(m.n);
  for (std::size_t p = 0; p < m.n; ++p) h.agent_position[h.agent_order[p]] = p;

  h.permuted = Mat(m.n, m.n);
  for (std::size_t p = 0; p < m.n; ++p)
    for (std::size_t s = 0; s < m.n; ++s)
      h.permuted(p, s) = m.weights(h.agent_order[p], h.agent_order[s]);
  return h;
}

Mat HierarchyDecomposition::diagonal_block(std::size_t class_id) const {
  const auto& mem = classes[class_id].members;
  Mat b(mem.size(), mem.size());
  for (std::size_t r = 0; r < mem.size(); ++r)
    for (std::size_t c = 0; c < mem.size(); ++c) b(r, c) = weights(mem[r], mem[c]);
  return b;
}

Mat HierarchyDecomposition::coupling_block(std::size_t from, std::size_t to) const {
  const auto& rm = classes[from].members;
  const auto& cm = classes[to].members;
  Mat b(rm.size(), cm.size());
  for (std::size_t r = 0; r < rm.size(); ++r)
    for (std::size_t c = 0; c < cm.size(); ++c) b(r, c) = weights(rm[r], cm[c]);
  return b;
}

}  // namespace urnnet
