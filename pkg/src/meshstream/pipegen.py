"""Arithmetic-unit planning: equations to a clustered dataflow pipeline.

The pipeline is built in four steps: parse assignment equations into a
dataflow graph (one vertex per syntactic operation, no subexpression
sharing), equalize operand arrival times with shift-register delay
vertices, order each pipeline row horizontally (barycenter start, swap
refinement), then cut band-limited rectangular clusters whose FIFO I/O
stays within a limit.
"""
from __future__ import annotations

import ast
import json
import math
import random
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import ClusterIOError, EquationError, PreconditionError

#: Pipeline depths of the floating-point cores, in cycles.
DEFAULT_LATENCIES = {"+": 12, "-": 12, "*": 8, "/": 28, "sqrt": 28, "abs": 1}

_OP_NAMES = {"add": "+", "sub": "-", "mul": "*", "div": "/",
             "sqrt": "sqrt", "abs": "abs"}


@dataclass
class Vertex:
    id: int
    kind: str                   # input | constant | operator | delay | output
    op: str | None = None
    name: str | None = None
    value: float | None = None
    args: list = field(default_factory=list)
    level: int = 0
    x: float = 0.0
    cluster: int | None = None
    cycles: int = 0             # delay vertices only


class DataFlowGraph:
    def __init__(self):
        self.vertices = []
        self.outputs = []        # output vertex ids in declaration order

    def new_vertex(self, kind, **kw):
        v = Vertex(id=len(self.vertices), kind=kind, **kw)
        self.vertices.append(v)
        return v

    def edges(self):
        for v in self.vertices:
            for a in v.args:
                yield (a, v.id)

    def consumers(self):
        out = {v.id: [] for v in self.vertices}
        for a, b in self.edges():
            out[a].append(b)
        return out

    def topo_order(self):
        indeg = {v.id: len(v.args) for v in self.vertices}
        succ = self.consumers()
        ready = deque(v.id for v in self.vertices if indeg[v.id] == 0)
        order = []
        while ready:
            v = ready.popleft()
            order.append(v)
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        if len(order) != len(self.vertices):
            raise EquationError("dataflow graph contains a cycle")
        return order

    def operator_count(self):
        return sum(1 for v in self.vertices if v.kind == "operator")

    def evaluate(self, inputs):
        """Run the graph on a dict of input values; returns output dict."""
        values = {}
        for vid in self.topo_order():
            v = self.vertices[vid]
            if v.kind == "input":
                if v.name not in inputs:
                    raise PreconditionError(f"missing input {v.name!r}")
                values[vid] = float(inputs[v.name])
            elif v.kind == "constant":
                values[vid] = float(v.value)
            elif v.kind == "delay":
                values[vid] = values[v.args[0]]
            elif v.kind == "output":
                values[vid] = values[v.args[0]]
            else:
                values[vid] = _apply(v.op, [values[a] for a in v.args])
        return {self.vertices[o].name: values[o] for o in self.outputs}

    def input_names(self):
        return [v.name for v in self.vertices if v.kind == "input"]


def _apply(op, args):
    if op == "+":
        return args[0] + args[1]
    if op == "-":
        return args[0] - args[1]
    if op == "*":
        return args[0] * args[1]
    if op == "/":
        return args[0] / args[1]
    if op == "sqrt":
        return math.sqrt(args[0])
    if op == "abs":
        return abs(args[0])
    raise PreconditionError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# parsing

_OUTPUT_LINE = re.compile(r"^\s*output\s*:?\s*(?P<names>[\w\s,]+?)\s*$")


def parse_equations(text):
    """Dataflow graph from assignment equations.

    Grammar: one ``name = expr`` per line with infix + - * /, sqrt/abs
    calls, parentheses and numeric literals; ``#`` starts a comment and
    ``output name [name...]`` marks extra outputs.  Later equations may
    use earlier results; every syntactic operation becomes its own
    vertex (no common-subexpression elimination).
    """
    marked = []
    lines = []
    for line in text.splitlines():
        m = _OUTPUT_LINE.match(line.split("#", 1)[0])
        if m:
            marked.extend(n for n in re.split(r"[\s,]+", m.group("names")) if n)
            lines.append("")
        else:
            lines.append(line)
    try:
        tree = ast.parse("\n".join(lines))
    except SyntaxError as exc:
        raise EquationError(f"syntax error: {exc.msg}", exc.lineno,
                            exc.offset) from exc

    g = DataFlowGraph()
    defined = {}                  # name -> producer vertex id
    def_line = {}
    later = {}                    # name -> first line where it is assigned
    for stmt in tree.body:
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 \
                and isinstance(stmt.targets[0], ast.Name):
            name = stmt.targets[0].id
            later.setdefault(name, stmt.lineno)

    inputs = {}

    def build(node):
        if isinstance(node, ast.BinOp):
            ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/"}
            op = ops.get(type(node.op))
            if op is None:
                raise EquationError("unsupported operator", node.lineno,
                                    node.col_offset)
            a = build(node.left)
            b = build(node.right)
            return g.new_vertex("operator", op=op, args=[a, b]).id
        if isinstance(node, ast.UnaryOp):
            if isinstance(node.op, ast.USub):
                if isinstance(node.operand, ast.Constant):
                    return g.new_vertex("constant",
                                        value=-float(node.operand.value)).id
                zero = g.new_vertex("constant", value=0.0).id
                a = build(node.operand)
                return g.new_vertex("operator", op="-", args=[zero, a]).id
            raise EquationError("unsupported unary operator", node.lineno,
                                node.col_offset)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) \
                    or node.func.id not in ("sqrt", "abs") \
                    or len(node.args) != 1 or node.keywords:
                raise EquationError("only sqrt(x) and abs(x) calls are "
                                    "supported", node.lineno, node.col_offset)
            a = build(node.args[0])
            return g.new_vertex("operator", op=node.func.id, args=[a]).id
        if isinstance(node, ast.Name):
            if node.id in defined:
                return defined[node.id]
            if node.id in later:
                raise EquationError(f"{node.id!r} used before its definition",
                                    node.lineno, node.col_offset)
            if node.id not in inputs:
                inputs[node.id] = g.new_vertex("input", name=node.id).id
            return inputs[node.id]
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise EquationError("only numeric literals are allowed",
                                    node.lineno, node.col_offset)
            return g.new_vertex("constant", value=float(node.value)).id
        raise EquationError(f"unsupported syntax {type(node).__name__}",
                            getattr(node, "lineno", None),
                            getattr(node, "col_offset", None))

    consumed = set()
    for stmt in tree.body:
        if not isinstance(stmt, ast.Assign) or len(stmt.targets) != 1 \
                or not isinstance(stmt.targets[0], ast.Name):
            raise EquationError("every statement must be 'name = expr'",
                                stmt.lineno, getattr(stmt, "col_offset", 0))
        name = stmt.targets[0].id
        if name in defined:
            raise EquationError(f"{name!r} assigned twice", stmt.lineno)
        for sub in ast.walk(stmt.value):
            if isinstance(sub, ast.Name) and sub.id in defined:
                consumed.add(sub.id)
        defined[name] = build(stmt.value)
        def_line[name] = stmt.lineno
        # keep name usable from here on
        later.pop(name, None)

    for name in marked:
        if name not in defined:
            raise EquationError(f"marked output {name!r} is never assigned")
    out_names = [n for n in defined
                 if n not in consumed or n in marked]
    for n in out_names:
        o = g.new_vertex("output", name=n, args=[defined[n]])
        g.outputs.append(o.id)
    g.topo_order()
    return g


# ---------------------------------------------------------------------------
# leveling with delay insertion

def level_and_insert_delays(g, latencies=None):
    """Equalize operand arrival times with delay vertices.

    Vertex levels are completion times in cycles; after insertion every
    operand of a vertex is available exactly when the vertex starts, so
    the graph is properly layered in time.  Returns a new graph.
    """
    latencies = dict(DEFAULT_LATENCIES, **(latencies or {}))
    out = DataFlowGraph()
    mapping = {}
    for vid in g.topo_order():
        v = g.vertices[vid]
        nv = out.new_vertex(v.kind, op=v.op, name=v.name, value=v.value,
                            cycles=v.cycles)
        mapping[vid] = nv.id
        if v.kind in ("input", "constant"):
            nv.level = 0
            continue
        args = [mapping[a] for a in v.args]
        if v.kind == "output":
            nv.args = args
            nv.level = out.vertices[args[0]].level
            continue
        lat = latencies[v.op] if v.kind == "operator" else 0
        if lat <= 0 and v.kind == "operator":
            raise PreconditionError("operator latencies must be positive")
        arrive = max(out.vertices[a].level for a in args)
        fixed = []
        for a in args:
            gap = arrive - out.vertices[a].level
            if gap > 0:
                d = out.new_vertex("delay", args=[a], cycles=gap)
                d.level = arrive
                fixed.append(d.id)
            else:
                fixed.append(a)
        nv.args = fixed
        nv.level = arrive + lat
    out.outputs = [mapping[o] for o in g.outputs]
    return out


def check_leveled(g, latencies=None):
    """Verify the arrival-equalization invariant; raises on violation."""
    latencies = dict(DEFAULT_LATENCIES, **(latencies or {}))
    for v in g.vertices:
        if v.kind == "operator":
            start = v.level - latencies[v.op]
            for a in v.args:
                if g.vertices[a].level != start:
                    raise PreconditionError(
                        f"operand {a} of vertex {v.id} arrives at "
                        f"{g.vertices[a].level}, needs {start}")
        elif v.kind == "delay":
            if g.vertices[v.args[0]].level != v.level - v.cycles:
                raise PreconditionError(f"delay {v.id} spans a wrong gap")
        elif v.kind == "output":
            if g.vertices[v.args[0]].level != v.level:
                raise PreconditionError(f"output {v.id} level mismatch")
    return True


def pipeline_depth(g):
    return max((v.level for v in g.vertices), default=0)


# ---------------------------------------------------------------------------
# horizontal ordering

def rows_by_level(g):
    levels = sorted({v.level for v in g.vertices})
    index = {lv: i for i, lv in enumerate(levels)}
    rows = [[] for _ in levels]
    for v in g.vertices:
        rows[index[v.level]].append(v.id)
    for row in rows:
        row.sort()
    return rows


def _assign_x(g, rows):
    for row in rows:
        w = len(row)
        for slot, vid in enumerate(row):
            g.vertices[vid].x = slot - (w - 1) / 2.0


def distance_objective(g):
    """Sum of squared horizontal distances over all edges."""
    total = 0.0
    for a, b in g.edges():
        d = g.vertices[a].x - g.vertices[b].x
        total += d * d
    return total


def _barycenter_pass(g, rows, neighbors):
    for sweep in (rows, rows[::-1]):
        for row in sweep:
            keys = {}
            for vid in row:
                nb = neighbors[vid]
                keys[vid] = (sum(g.vertices[w].x for w in nb) / len(nb)
                             if nb else g.vertices[vid].x)
            row.sort(key=lambda vid: (keys[vid], vid))
            _assign_x(g, [row])


def order_horizontally(g, seed=42, restarts=8, barycenter_passes=4):
    """Position vertices within their rows to shorten connections.

    The best of ``restarts`` randomly initialized barycenter runs seeds
    a pairwise-swap hill climb; the refined objective never exceeds the
    barycenter seed's.  Returns (barycenter objective, final objective).
    """
    rng = random.Random(seed)
    rows = rows_by_level(g)
    neighbors = {v.id: [] for v in g.vertices}
    for a, b in g.edges():
        neighbors[a].append(b)
        neighbors[b].append(a)

    best_rows, best_obj = None, None
    for _ in range(max(1, restarts)):
        for row in rows:
            rng.shuffle(row)
        _assign_x(g, rows)
        for _ in range(barycenter_passes):
            _barycenter_pass(g, rows, neighbors)
        obj = distance_objective(g)
        if best_obj is None or obj < best_obj:
            best_obj = obj
            best_rows = [list(r) for r in rows]

    rows = best_rows
    _assign_x(g, rows)
    seed_obj = best_obj

    improved = True
    passes = 0
    while improved and passes < 100:
        improved = False
        passes += 1
        for row in rows:
            for i in range(len(row)):
                for j in range(i + 1, len(row)):
                    u, w = row[i], row[j]
                    before = _local_cost(g, neighbors, u, w)
                    g.vertices[u].x, g.vertices[w].x = \
                        g.vertices[w].x, g.vertices[u].x
                    after = _local_cost(g, neighbors, u, w)
                    if after < before - 1e-12:
                        row[i], row[j] = row[j], row[i]
                        improved = True
                    else:
                        g.vertices[u].x, g.vertices[w].x = \
                            g.vertices[w].x, g.vertices[u].x
    return seed_obj, distance_objective(g)


def _local_cost(g, neighbors, u, w):
    cost = 0.0
    for v in (u, w):
        xv = g.vertices[v].x
        for nb in neighbors[v]:
            d = xv - g.vertices[nb].x
            cost += d * d
    return cost


# ---------------------------------------------------------------------------
# rectangular clustering

@dataclass
class Cluster:
    id: int
    band: int
    members: list
    in_nets: list
    out_nets: list
    level_range: tuple
    x_range: tuple


@dataclass
class ClusterPlan:
    clusters: list
    io_limit: int
    band_rows: int

    def cluster_of(self):
        out = {}
        for c in self.clusters:
            for m in c.members:
                out[m] = c.id
        return out

    def validate(self, g):
        seen = set()
        for c in self.clusters:
            if set(c.members) & seen:
                raise ClusterIOError("clusters overlap")
            seen.update(c.members)
            if len(c.in_nets) + len(c.out_nets) > self.io_limit:
                raise ClusterIOError(
                    f"cluster {c.id} exceeds the I/O limit")
        expected = {v.id for v in g.vertices if v.kind != "input"}
        if seen != expected:
            raise ClusterIOError("clusters do not partition the graph")
        recomputed = _plan_nets(g, self)
        for c, (ins, outs) in zip(self.clusters, recomputed):
            if sorted(c.in_nets) != ins or sorted(c.out_nets) != outs:
                raise ClusterIOError(f"cluster {c.id} net lists are stale")
        return True


def _cluster_io(g, consumers, members):
    mset = set(members)
    in_nets = set()
    out_nets = set()
    for vid in members:
        for a in g.vertices[vid].args:
            if a not in mset:
                in_nets.add(a)
        for w in consumers[vid]:
            if w not in mset:
                out_nets.add(vid)
    return in_nets, out_nets


def _plan_nets(g, plan):
    consumers = g.consumers()
    out = []
    for c in plan.clusters:
        ins, outs = _cluster_io(g, consumers, c.members)
        out.append((sorted(ins), sorted(outs)))
    return out


def cluster_rectangles(g, io_limit=10, band_rows=2):
    """Greedy rectangular clustering of the positioned graph.

    Scans bands of ``band_rows`` pipeline rows top-down; within a band,
    whole x-columns are appended left to right while the cluster's
    distinct cut nets stay within ``io_limit``.
    """
    if band_rows < 1:
        raise PreconditionError("band_rows must be at least 1")
    consumers = g.consumers()
    rows = rows_by_level(g)
    clusters = []

    for band_idx in range(0, len(rows), band_rows):
        band_rows_slice = rows[band_idx:band_idx + band_rows]
        members = [vid for row in band_rows_slice for vid in row
                   if g.vertices[vid].kind != "input"]
        if not members:
            continue
        columns = {}
        for vid in members:
            columns.setdefault(round(2 * g.vertices[vid].x), []).append(vid)
        col_keys = sorted(columns)

        band = band_idx // band_rows

        def io_of(members):
            ins, outs = _cluster_io(g, consumers, members)
            return len(ins) + len(outs)

        current = []
        for key in col_keys:
            col = columns[key]
            if io_of(current + col) <= io_limit:
                current = current + col
                continue
            if current:
                clusters.append((band, current))
                current = []
            if io_of(col) <= io_limit:
                current = list(col)
                continue
            # a lone column over the limit degrades to unit clusters
            for vid in col:
                if io_of([vid]) > io_limit:
                    raise ClusterIOError(
                        f"vertex {vid} alone exceeds the I/O limit")
                clusters.append((band, [vid]))
        if current:
            clusters.append((band, current))

    plan_clusters = []
    for cid, (band, members) in enumerate(clusters):
        ins, outs = _cluster_io(g, consumers, members)
        levels = [g.vertices[m].level for m in members]
        xs = [g.vertices[m].x for m in members]
        for m in members:
            g.vertices[m].cluster = cid
        plan_clusters.append(Cluster(cid, band, sorted(members),
                                     sorted(ins), sorted(outs),
                                     (min(levels), max(levels)),
                                     (min(xs), max(xs))))
    plan = ClusterPlan(plan_clusters, io_limit, band_rows)
    plan.validate(g)
    return plan


def evaluate_clustered(g, plan, inputs):
    """Evaluate through the clustered schedule with FIFO-buffered cuts."""
    cluster_of = plan.cluster_of()
    consumers = g.consumers()
    fifos = {}
    values = {}
    out = {}
    for vid in g.topo_order():
        v = g.vertices[vid]
        own = cluster_of.get(vid)
        argvals = []
        for a in v.args:
            if cluster_of.get(a) == own:
                argvals.append(values[a])
            else:
                argvals.append(fifos[(a, own)].popleft())
        if v.kind == "input":
            values[vid] = float(inputs[v.name])
        elif v.kind == "constant":
            values[vid] = float(v.value)
        elif v.kind in ("delay", "output"):
            values[vid] = argvals[0]
        else:
            values[vid] = _apply(v.op, argvals)
        if v.kind == "output":
            out[v.name] = values[vid]
        for w in consumers[vid]:
            if cluster_of.get(w) != own:
                fifos.setdefault((vid, cluster_of.get(w)),
                                 deque()).append(values[vid])
    for q in fifos.values():
        if q:
            raise PreconditionError("unconsumed FIFO tokens after evaluation")
    return out


# ---------------------------------------------------------------------------
# plan serialization

def emit_plan(g, plan):
    """JSON-serializable description of the leveled, clustered pipeline."""
    return {
        "version": 1,
        "io_limit": plan.io_limit,
        "band_rows": plan.band_rows,
        "vertices": [
            {"id": v.id, "kind": v.kind, "op": v.op, "name": v.name,
             "value": v.value, "args": list(v.args), "level": v.level,
             "x": v.x, "cluster": v.cluster, "cycles": v.cycles}
            for v in g.vertices
        ],
        "outputs": list(g.outputs),
        "clusters": [
            {"id": c.id, "band": c.band, "members": list(c.members),
             "in_nets": list(c.in_nets), "out_nets": list(c.out_nets),
             "level_range": list(c.level_range),
             "x_range": list(c.x_range)}
            for c in plan.clusters
        ],
    }


def write_plan(g, plan, path):
    with open(path, "w") as fh:
        json.dump(emit_plan(g, plan), fh, indent=2, sort_keys=True)


def load_plan(source):
    """Rebuild (graph, plan) from :func:`emit_plan` output and validate."""
    doc = json.loads(source) if isinstance(source, str) else source
    g = DataFlowGraph()
    for rec in sorted(doc["vertices"], key=lambda r: r["id"]):
        v = g.new_vertex(rec["kind"], op=rec["op"], name=rec["name"],
                         value=rec["value"], cycles=rec["cycles"])
        if v.id != rec["id"]:
            raise PreconditionError("vertex ids must be dense and sorted")
        v.args = list(rec["args"])
        v.level = rec["level"]
        v.x = rec["x"]
        v.cluster = rec["cluster"]
    g.outputs = list(doc["outputs"])
    clusters = [Cluster(c["id"], c["band"], list(c["members"]),
                        list(c["in_nets"]), list(c["out_nets"]),
                        tuple(c["level_range"]), tuple(c["x_range"]))
                for c in doc["clusters"]]
    plan = ClusterPlan(clusters, doc["io_limit"], doc["band_rows"])
    g.topo_order()
    plan.validate(g)
    return g, plan


def read_plan(path):
    with open(path) as fh:
        return load_plan(fh.read())


def load_latency_file(path):
    """Operator latencies from 'name cycles' lines (add, mul, div, ...)."""
    table = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, cyc = line.split()
            if name not in _OP_NAMES:
                raise PreconditionError(f"unknown operator name {name!r}")
            table[_OP_NAMES[name]] = int(cyc)
    return table
