"""JSON and DOT serialization for graphs, decompositions, and friends.

All serialized identifiers are strings. Output is deterministic: vertex
order is preserved where it is meaningful, everything else is sorted.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Tuple

from .constructions import GadgetInstance, GadgetSchedule
from .decomposition import TreeDecomposition
from .graphs import Graph, Matching, edge


def _check_ids(ids: Iterable) -> None:
    for v in ids:
        if not isinstance(v, str):
            raise ValueError(f"serialized vertex ids must be strings, got {v!r}")


def _sorted_pairs(pairs) -> List[List[str]]:
    return [list(e) for e in sorted(pairs)]


def _pair_key(u: str, v: str) -> str:
    if "," in u or "," in v:
        raise ValueError(f"vertex ids with commas cannot key edge maps: {u!r}, {v!r}")
    a, b = edge(u, v)
    return f"{a},{b}"


def _unpair_key(key: str) -> Tuple[str, str]:
    parts = key.split(",")
    if len(parts) != 2:
        raise ValueError(f"malformed edge key {key!r}")
    return parts[0], parts[1]


# ---------------------------------------------------------------- graphs

def graph_to_obj(g: Graph) -> dict:
    _check_ids(g.vertices)
    obj = {"vertices": list(g.vertices), "edges": _sorted_pairs(g.edges)}
    if g.labels:
        obj["labels"] = {v: g.labels[v] for v in sorted(g.labels)}
    return obj


def graph_from_obj(obj: dict) -> Graph:
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise ValueError("graph object needs a 'vertices' field")
    return Graph(obj["vertices"], [tuple(e) for e in obj.get("edges", [])],
                 obj.get("labels"))


# ------------------------------------------------------- decompositions

def td_to_obj(td: TreeDecomposition) -> dict:
    _check_ids(td.host.vertices)
    return {
        "host_vertices": list(td.host.vertices),
        "host_edges": _sorted_pairs(td.host.edges),
        "bags": {x: sorted(td.bag(x)) for x in sorted(td.host.vertices)},
    }


def td_from_obj(obj: dict) -> TreeDecomposition:
    for field in ("host_vertices", "host_edges", "bags"):
        if field not in obj:
            raise ValueError(f"decomposition object needs a {field!r} field")
    host = Graph(obj["host_vertices"], [tuple(e) for e in obj["host_edges"]])
    return TreeDecomposition(host, {x: set(b) for x, b in obj["bags"].items()})


# ------------------------------------------------------------ schedules

def schedule_to_obj(s: GadgetSchedule) -> dict:
    return {"k": s.k, "n": s.n, "heights": list(s.heights),
            "widths": list(s.widths), "tree_sizes": list(s.tree_sizes),
            "genuine": s.genuine}


def schedule_from_obj(obj: dict) -> GadgetSchedule:
    return GadgetSchedule(obj["k"], obj["n"], tuple(obj["heights"]),
                          tuple(obj["widths"]), tuple(obj["tree_sizes"]),
                          bool(obj["genuine"]))


def instance_to_obj(inst: GadgetInstance) -> dict:
    _check_ids(inst.graph.vertices)
    return {
        "base": graph_to_obj(inst.base),
        "ordering": list(inst.ordering),
        "schedule": schedule_to_obj(inst.schedule),
        "graph": graph_to_obj(inst.graph),
        "gadgets": {a: sorted(inst.gadgets[a]) for a in sorted(inst.gadgets)},
    }


def instance_from_obj(obj: dict) -> GadgetInstance:
    base = graph_from_obj(obj["base"])
    graph = graph_from_obj(obj["graph"])
    gadgets = {a: frozenset(vs) for a, vs in obj["gadgets"].items()}
    inst = GadgetInstance(base, tuple(obj["ordering"]),
                          schedule_from_obj(obj["schedule"]), graph, gadgets)
    if set(inst.ordering) != base.vertex_set:
        raise ValueError("instance ordering does not match its base graph")
    covered = set(base.vertices)
    for a, vs in gadgets.items():
        covered |= vs
    if covered != graph.vertex_set:
        raise ValueError("gadget sets plus base do not cover the instance graph")
    return inst


# --------------------------------------------------------- minor models

def model_to_obj(m) -> dict:
    """Model files carry branch sets, pattern edges, and the edge map; the
    host graph travels separately."""
    _check_ids(m.graph.vertices)
    _check_ids(m.pattern.vertices)
    return {
        "branch_sets": {x: sorted(m.branch_sets[x]) for x in sorted(m.branch_sets)},
        "pattern_edges": _sorted_pairs(m.pattern.edges),
        "edge_map": {_pair_key(*xy): list(m.edge_map[xy])
                     for xy in sorted(m.edge_map)},
    }


def model_from_obj(obj: dict, graph: Graph):
    from .transforms import MinorModel
    branch_sets = {x: frozenset(vs) for x, vs in obj["branch_sets"].items()}
    pattern = Graph(sorted(branch_sets),
                    [tuple(e) for e in obj.get("pattern_edges", [])])
    edge_map = {edge(*_unpair_key(key)): edge(*pair)
                for key, pair in obj.get("edge_map", {}).items()}
    return MinorModel(graph, pattern, branch_sets, edge_map)


# --------------------------------------------------------- certificates

def certificate_to_obj(cert) -> dict:
    _check_ids(cert.host.vertices)
    return {
        "level": cert.level,
        "host": graph_to_obj(cert.host),
        "matching": _sorted_pairs(cert.matching.edges),
        "hub": cert.hub,
        "witness_edge": list(cert.witness_edge),
        "cycles": {_pair_key(*e): sorted(vs) for e, vs in sorted(cert.cycles.items())},
    }


def certificate_from_obj(obj: dict):
    from .certificates import WidthCertificate
    return WidthCertificate(
        level=obj["level"],
        host=graph_from_obj(obj["host"]),
        matching=Matching(frozenset(tuple(e) for e in obj["matching"])),
        hub=obj["hub"],
        witness_edge=edge(*obj["witness_edge"]),
        cycles={edge(*_unpair_key(k)): frozenset(vs)
                for k, vs in obj["cycles"].items()},
    )


# ---------------------------------------------------------------- files

def dump_json(obj: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ----------------------------------------------------------------- DOT

def _quote(s: str) -> str:
    return '"' + str(s).replace('"', '\\"') + '"'


def graph_to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in g.vertices:
        if v in g.labels:
            lines.append(f"  {_quote(v)} [label={_quote(g.labels[v])}];")
        else:
            lines.append(f"  {_quote(v)};")
    for u, v in sorted(g.edges):
        lines.append(f"  {_quote(u)} -- {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def td_to_dot(td: TreeDecomposition, name: str = "decomposition") -> str:
    lines = [f"graph {name} {{", "  node [shape=box];"]
    for x in td.host.vertices:
        bag = ",".join(sorted(td.bag(x)))
        lines.append(f"  {_quote(x)} [label={_quote(f'{x}: {{{bag}}}')}];")
    for u, v in sorted(td.host.edges):
        lines.append(f"  {_quote(u)} -- {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def instance_to_dot(inst: GadgetInstance, name: str = "gadget") -> str:
    lines = [f"graph {name} {{"]
    for v in inst.base.vertices:
        lines.append(f"  {_quote(v)};")
    for i, a in enumerate(inst.ordering):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_quote(f'gadget at {a}')};")
        for v in sorted(inst.gadgets[a]):
            lines.append(f"    {_quote(v)};")
        lines.append("  }")
    for u, v in sorted(inst.graph.edges):
        lines.append(f"  {_quote(u)} -- {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
