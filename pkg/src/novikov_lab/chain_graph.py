"""Directed chain graphs over a grid on S^1 or T^m.

Nodes are grid cells; each node carries one flow edge (the cell-center
trajectory of fixed duration, snapped to the landing cell) and jump edges
to adjacent cells.  Edge gains are cocycle integrals, one per supplied
cocycle, with the snap step folded into the flow gain so that gains
telescope exactly along closed walks.

A walk models a pseudo-orbit only if no two jump edges are consecutive;
all cycle searches therefore run on a doubled state graph (node,
arrived-by-jump) that forbids jump-after-jump.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .flows import (
    TWO_PI,
    FlowError,
    default_dt,
    integrate_cocycle,
    integrate_flow,
    wrap_delta,
)


@dataclass
class FlowEdge:
    src: int
    dst: int
    time: float
    gain: tuple
    trajectory_gain: tuple


@dataclass
class JumpEdge:
    src: int
    dst: int
    gain: tuple


@dataclass
class ChainGraph:
    model_name: str
    dim: int
    nodes_per_axis: int
    mesh: float
    t_edge: float
    n_cocycles: int
    flow_edges: list
    jump_edges: list
    fixed_point_nodes: list

    @property
    def n_nodes(self):
        return self.nodes_per_axis**self.dim

    def node_center(self, node):
        coords = []
        rest = node
        for _ in range(self.dim):
            coords.append((rest % self.nodes_per_axis + 0.5) * self.mesh)
            rest //= self.nodes_per_axis
        return tuple(coords)

    def out_degree(self, node):
        return sum(1 for e in self.flow_edges if e.src == node) + sum(
            1 for e in self.jump_edges if e.src == node
        )


def _node_of(point, n, mesh, dim):
    node = 0
    for i in range(dim - 1, -1, -1):
        idx = int((point[i] % TWO_PI) / mesh) % n
        node = node * n + idx
    return node


def build_chain_graph(model, cocycles, nodes_per_axis, t_edge):
    """Grid chain graph with per-cocycle gains on every edge.

    The grid mesh must stay below every cocycle's sampling step so that
    cell-to-cell jumps always fit inside one chart.
    """
    if not isinstance(cocycles, (list, tuple)):
        cocycles = [cocycles]
    if t_edge <= 0:
        raise FlowError("t_edge must be positive")
    n = int(nodes_per_axis)
    mesh = TWO_PI / n
    # jumps move one cell along an axis; snaps move at most half a cell
    # per axis, so the worst pair distance is below this reach
    reach = max(mesh, mesh * math.sqrt(model.dim) / 2.0)
    for rep in cocycles:
        if reach > rep.step_limit():
            raise FlowError(
                "grid mesh %.4f too coarse for cocycle %r (step limit %.4f)"
                % (mesh, rep.name, rep.step_limit())
            )
    dt = min(default_dt(model, rep) for rep in cocycles)
    dt = min(dt, t_edge)

    n_nodes = n**model.dim
    graph = ChainGraph(
        model_name=model.name,
        dim=model.dim,
        nodes_per_axis=n,
        mesh=mesh,
        t_edge=t_edge,
        n_cocycles=len(cocycles),
        flow_edges=[],
        jump_edges=[],
        fixed_point_nodes=[],
    )

    def snapped(point, target_center):
        return tuple(
            a + wrap_delta(b, a) for a, b in zip(point, target_center)
        )

    for node in range(n_nodes):
        center = graph.node_center(node)
        traj = integrate_flow(model, center, t_edge, dt)
        end = traj.end
        target = _node_of(end, n, mesh, model.dim)
        target_center = graph.node_center(target)
        snap_target = snapped(end, target_center)
        traj_gains = []
        gains = []
        for rep in cocycles:
            tg = integrate_cocycle(rep, traj)
            snap_gain, _ = rep.pair_gain(end, snap_target)
            traj_gains.append(tg)
            gains.append(tg + snap_gain)
        graph.flow_edges.append(
            FlowEdge(
                src=node,
                dst=target,
                time=t_edge,
                gain=tuple(gains),
                trajectory_gain=tuple(traj_gains),
            )
        )
        # jump edges to the 2*dim grid neighbours
        rest = node
        idxs = []
        for _ in range(model.dim):
            idxs.append(rest % n)
            rest //= n
        for axis in range(model.dim):
            for step in (-1, 1):
                nbr_idxs = list(idxs)
                nbr_idxs[axis] = (nbr_idxs[axis] + step) % n
                nbr = 0
                for i in range(model.dim - 1, -1, -1):
                    nbr = nbr * n + nbr_idxs[i]
                nbr_center = snapped(center, graph.node_center(nbr))
                gains = tuple(
                    rep.pair_gain(center, nbr_center)[0] for rep in cocycles
                )
                graph.jump_edges.append(JumpEdge(src=node, dst=nbr, gain=gains))

    for p, _index in model.fixed_points:
        graph.fixed_point_nodes.append(_node_of(p, n, mesh, model.dim))
    return graph


# ---------------------------------------------------------------------------
# admissible-cycle search on the doubled graph
# ---------------------------------------------------------------------------

_EPS = 1e-9


def _doubled_adjacency(graph, coordinate, sign, allowed=None):
    """States 2*node (+1 if arrived by jump); jump edges only leave flow
    states, which forbids two jumps in a row."""
    adj = [[] for _ in range(2 * graph.n_nodes)]
    for e in graph.flow_edges:
        if allowed is not None and (e.src not in allowed or e.dst not in allowed):
            continue
        w = sign * e.gain[coordinate]
        adj[2 * e.src].append((2 * e.dst, w))
        adj[2 * e.src + 1].append((2 * e.dst, w))
    for e in graph.jump_edges:
        if allowed is not None and (e.src not in allowed or e.dst not in allowed):
            continue
        w = sign * e.gain[coordinate]
        adj[2 * e.src].append((2 * e.dst + 1, w))
    return adj


def _pred_cycle(pred, n_states):
    """A cycle in the predecessor graph, if one exists (iterative walk)."""
    color = [0] * n_states
    stamp = 0
    for start in range(n_states):
        if pred[start] is None or color[start]:
            continue
        stamp += 1
        path = []
        s = start
        while s is not None and color[s] == 0:
            color[s] = stamp
            path.append(s)
            s = pred[s]
        if s is not None and color[s] == stamp:
            cycle = [s]
            cur = pred[s]
            while cur != s:
                cycle.append(cur)
                cur = pred[cur]
            cycle.reverse()
            return cycle
        for v in path:
            color[v] = -1
    return None


def _max_gain_search(adj, eps=_EPS):
    """Longest-gain relaxation from everywhere; returns (cycle, dist).

    If an inflating cycle exists the predecessor graph develops a cycle
    within a few sweeps and it is returned; otherwise dist[v] converges to
    the maximal admissible-walk gain ending at v.
    """
    n_states = len(adj)
    dist = [0.0] * n_states
    pred = [None] * n_states
    queue = deque(range(n_states))
    in_queue = [True] * n_states
    relaxations = 0
    check_every = max(1024, n_states)
    budget = 4 * n_states * max(1, sum(len(a) for a in adj))
    while queue:
        u = queue.popleft()
        in_queue[u] = False
        du = dist[u]
        for v, w in adj[u]:
            if du + w > dist[v] + eps:
                dist[v] = du + w
                pred[v] = u
                relaxations += 1
                if not in_queue[v]:
                    queue.append(v)
                    in_queue[v] = True
                if relaxations % check_every == 0:
                    cycle = _pred_cycle(pred, n_states)
                    if cycle is not None:
                        return cycle, dist
        if relaxations > budget:
            break
    cycle = _pred_cycle(pred, n_states)
    return cycle, dist


def _cycle_gain(graph, coordinate, state_cycle):
    """Exact gain of a state cycle, recomputed from the stored edges."""
    flow_by_src = {e.src: e for e in graph.flow_edges}
    jumps_by_pair = {}
    for e in graph.jump_edges:
        jumps_by_pair[(e.src, e.dst)] = e
    total = 0.0
    nodes = []
    k = len(state_cycle)
    for i in range(k):
        s = state_cycle[i]
        t = state_cycle[(i + 1) % k]
        u, v = s // 2, t // 2
        nodes.append(u)
        if t % 2 == 1:
            total += jumps_by_pair[(u, v)].gain[coordinate]
        else:
            total += flow_by_src[u].gain[coordinate]
    return total, nodes


@dataclass
class DetectionReport:
    verdict: str
    coordinate: int = 0
    cycle: list = None
    gain: float = 0.0
    bound: float = 0.0
    walk_bound: float = 0.0
    threshold: float = 0.5


def detect_gradient_like(graph, gain_threshold=0.5):
    """NOT_GRADIENT_LIKE with a witness cycle of |gain| past the threshold,
    or GRADIENT_LIKE_EVIDENCE with a bound on every cycle's |gain|.

    Runs a positive-cycle search on the gains and on their negation for
    every cocycle coordinate.  When no search inflates, a cycle of gain
    beyond len * eps would have kept relaxing, so n_states * eps bounds all
    cycle gains; walk gains stay bounded by the converged distances.
    """
    walk_bound = 0.0
    for coordinate in range(graph.n_cocycles):
        for sign in (1, -1):
            adj = _doubled_adjacency(graph, coordinate, sign)
            cycle, dist = _max_gain_search(adj)
            if cycle is not None:
                gain, nodes = _cycle_gain(graph, coordinate, cycle)
                if abs(gain) >= gain_threshold:
                    return DetectionReport(
                        verdict="NOT_GRADIENT_LIKE",
                        coordinate=coordinate,
                        cycle=nodes,
                        gain=gain,
                        threshold=gain_threshold,
                    )
            walk_bound = max(walk_bound, max(dist))
    return DetectionReport(
        verdict="GRADIENT_LIKE_EVIDENCE",
        bound=2 * graph.n_nodes * _EPS,
        walk_bound=walk_bound,
        threshold=gain_threshold,
    )


def chain_bound(graph, rep_bounds):
    """A bound on |gain| over admissible walks at this resolution, padded by
    the primitive bound for the continuous-chain comparison."""
    worst = 0.0
    for coordinate in range(graph.n_cocycles):
        for sign in (1, -1):
            adj = _doubled_adjacency(graph, coordinate, sign)
            cycle, dist = _max_gain_search(adj)
            if cycle is not None:
                raise FlowError("walk gains are unbounded: an inflating cycle exists")
            worst = max(worst, max(dist))
    pad = 2.0 * max(rep_bounds) if rep_bounds else 0.0
    return worst + pad


# ---------------------------------------------------------------------------
# chain-recurrent components
# ---------------------------------------------------------------------------


def _tarjan_scc(adj):
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    sccs = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(adj[v])):
                w = adj[v][k][0]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


@dataclass
class ComponentReport:
    nodes: list
    is_fixed_point: bool
    internal_gains: list = field(default_factory=list)
    pi_stable: bool = True


def _grid_neighbors(graph, node):
    n = graph.nodes_per_axis
    rest = node
    idxs = []
    for _ in range(graph.dim):
        idxs.append(rest % n)
        rest //= n
    out = []
    for axis in range(graph.dim):
        for step in (-1, 1):
            nbr_idxs = list(idxs)
            nbr_idxs[axis] = (nbr_idxs[axis] + step) % n
            nbr = 0
            for i in range(graph.dim - 1, -1, -1):
                nbr = nbr * n + nbr_idxs[i]
            out.append(nbr)
    return out


def chain_recurrent_components(graph):
    """Connected clusters of grid cells lying on admissible cycles, plus
    singleton components at the declared fixed points, with the
    reachability partial order (reached component < reaching component).

    Discretization shatters the recurrence near a fixed point into several
    tiny strongly connected pieces hugging it; grouping recurrent cells by
    grid adjacency recovers the component structure of the underlying
    chain-recurrent set at this resolution.
    """
    adj = _doubled_adjacency(graph, 0, 1)
    sccs = _tarjan_scc(adj)
    has_self = {}
    for u in range(len(adj)):
        for v, _w in adj[u]:
            if v == u:
                has_self[u] = True
    groups = []
    for comp in sccs:
        if len(comp) > 1 or has_self.get(comp[0]):
            groups.append({s // 2 for s in comp})
    # merge projected cycle supports that overlap or touch on the grid;
    # touching pieces approximate one component of the recurrent set
    recurrent = set().union(*groups) if groups else set()
    parent = {u: u for u in recurrent}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(u, v):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv

    for nodes in groups:
        first = next(iter(nodes))
        for u in nodes:
            union(first, u)
    for u in recurrent:
        for v in _grid_neighbors(graph, u):
            if v in recurrent:
                union(u, v)
    merged = {}
    for u in recurrent:
        merged.setdefault(find(u), set()).add(u)
    components = [
        ComponentReport(nodes=sorted(c), is_fixed_point=False)
        for c in merged.values()
    ]
    components.sort(key=lambda c: c.nodes[0])
    for node in graph.fixed_point_nodes:
        components.append(ComponentReport(nodes=[node], is_fixed_point=True))

    # reachability between components over the doubled graph
    n_states = len(adj)
    reach_sets = []
    for comp in components:
        seen = [False] * n_states
        frontier = []
        for node in comp.nodes:
            for s in (2 * node, 2 * node + 1):
                if not seen[s]:
                    seen[s] = True
                    frontier.append(s)
        while frontier:
            u = frontier.pop()
            for v, _w in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    frontier.append(v)
        reach_sets.append(seen)

    def reaches(i, j):
        return any(reach_sets[i][2 * node] for node in components[j].nodes)

    order = []
    for i in range(len(components)):
        for j in range(len(components)):
            if i != j and reaches(j, i) and not reaches(i, j):
                # j flows into i and not back: i sits below j
                order.append((i, j))
    return components, order


def pi_morse_report(graph, gain_threshold=0.5):
    """Per-component internal cycle gains for every cocycle coordinate.

    Components with every internal gain below the threshold are stable in
    the cover (pseudo-orbits inside them lift to bounded sets); a component
    with an internal gain is flagged as untying in the cover.
    """
    components, order = chain_recurrent_components(graph)
    for comp in components:
        allowed = set(comp.nodes)
        gains = []
        for coordinate in range(graph.n_cocycles):
            found = 0.0
            for sign in (1, -1):
                adj = _doubled_adjacency(graph, coordinate, sign, allowed=allowed)
                cycle, _dist = _max_gain_search(adj)
                if cycle is not None:
                    gain, _nodes = _cycle_gain(graph, coordinate, cycle)
                    found = max(found, abs(gain))
            gains.append(found)
        comp.internal_gains = gains
        comp.pi_stable = all(g < gain_threshold for g in gains)
    return components, order
