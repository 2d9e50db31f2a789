"""Graph files, experiment configs, presets and trajectory export.

Graph file, matrix form::

    3
    0, 1, 1
    0, 0, 1
    1, 0, 0

Edge-list form (0-based ``i j a_ij``; ``n`` after the header is optional)::

    edges 3
    0 1 1.0
    0 2 1.0

Blank lines and ``#`` comments are ignored in both.
"""

import csv
import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import SimulationConfig
from .errors import ParseError
from .graph import WeightedDigraph

PRESET_PACKAGE = "nlconsensus.presets"


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, raw, line


def _number(token, raw, lineno, path, start=0):
    try:
        return float(token)
    except ValueError:
        col = raw.find(token.strip(), start) + 1
        raise ParseError(f"not a number: {token.strip()!r}", lineno, col or None, path) from None


def parse_graph(text, fmt="auto", path=None):
    """Parse graph file contents into a ``WeightedDigraph``."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty graph file", None, None, path)
    first = lines[0][2].split()
    if fmt == "auto":
        fmt = "edges" if first[0].lower() == "edges" else "matrix"
    if fmt == "edges":
        return _parse_edges(lines, path)
    if fmt == "matrix":
        return _parse_matrix(lines, path)
    raise ValueError(f"unknown graph format {fmt!r}")


def _parse_matrix(lines, path):
    lineno, raw, line = lines[0]
    try:
        n = int(line.strip())
    except ValueError:
        raise ParseError("first line must be the node count n", lineno, 1, path) from None
    if n < 1:
        raise ParseError("node count must be positive", lineno, 1, path)
    rows = lines[1:]
    if len(rows) != n:
        where = rows[-1][0] if rows else lineno
        raise ParseError(f"expected {n} matrix rows, found {len(rows)}", where, None, path)
    W = np.zeros((n, n))
    for i, (lineno, raw, line) in enumerate(rows):
        cells = line.split(",")
        if len(cells) != n:
            raise ParseError(f"expected {n} comma-separated values, found {len(cells)}",
                             lineno, 1, path)
        pos = 0
        for j, cell in enumerate(cells):
            W[i, j] = _number(cell, raw, lineno, path, pos)
            pos = raw.find(",", pos) + 1
    return _checked_graph(W, path, rows[0][0])


def _parse_edges(lines, path):
    lineno, raw, line = lines[0]
    head = line.split()
    n = None
    if len(head) == 2:
        try:
            n = int(head[1])
        except ValueError:
            raise ParseError("node count after 'edges' must be an integer",
                             lineno, raw.find(head[1]) + 1, path) from None
    elif len(head) != 1:
        raise ParseError("header must be 'edges' or 'edges <n>'", lineno, 1, path)
    edges = []
    for lineno, raw, line in lines[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected 'i j weight'", lineno, 1, path)
        idx = []
        for tok in parts[:2]:
            col = raw.find(tok) + 1
            if not tok.isdigit():
                raise ParseError(f"node index must be a nonnegative integer, got {tok!r}",
                                 lineno, col, path)
            idx.append(int(tok))
            if n is not None and idx[-1] >= n:
                raise ParseError(f"node index {tok} out of range for n={n}", lineno, col, path)
        w = _number(parts[2], raw, lineno, path, raw.find(parts[2]))
        edges.append((idx[0], idx[1], w, lineno))
    if n is None:
        n = 1 + max((max(i, j) for i, j, _, _ in edges), default=-1)
        if n < 1:
            raise ParseError("edge list without edges needs an explicit node count", None, None, path)
    W = np.zeros((n, n))
    for i, j, w, lineno in edges:
        if i == j:
            raise ParseError(f"self-loop at node {i}", lineno, 1, path)
        if w < 0:
            raise ParseError(f"negative weight {w}", lineno, None, path)
        W[i, j] = w
    return _checked_graph(W, path, lines[0][0])


def _checked_graph(W, path, lineno):
    try:
        return WeightedDigraph(W)
    except ValueError as exc:
        raise ParseError(str(exc), None, None, path) from None


def read_graph(path, fmt="auto"):
    path = Path(path)
    if fmt == "auto" and path.suffix == ".edges":
        fmt = "edges"
    return parse_graph(path.read_text(), fmt, path)


def format_graph(g, fmt="matrix"):
    """Serialize ``g``; ``repr`` floats make the round trip exact."""
    if fmt == "matrix":
        rows = [", ".join(repr(float(v)) for v in row) for row in g.weights]
        return "\n".join([str(g.n), *rows]) + "\n"
    if fmt == "edges":
        body = [f"{i} {j} {a!r}" for i, j, a in g.edges()]
        return "\n".join([f"edges {g.n}", *body]) + "\n"
    raise ValueError(f"unknown graph format {fmt!r}")


def write_graph(g, path, fmt="matrix"):
    Path(path).write_text(format_graph(g, fmt))


@dataclass
class ExperimentConfig:
    graph_source: Path | None = None
    protocol_spec: str | None = None
    x0: tuple | None = None
    sim: SimulationConfig = field(default_factory=SimulationConfig)
    outputs: Path | None = None
    mode: str = "certified"
    plot: bool = False
    label: str | None = None
    base_dir: Path = field(default_factory=Path.cwd)

    def validate(self, n=None):
        missing = [k for k in ("graph_source", "protocol_spec", "x0") if getattr(self, k) is None]
        if missing:
            raise ValueError(f"config is missing: {', '.join(missing)}")
        if self.mode not in ("certified", "unchecked"):
            raise ValueError(f"mode must be certified or unchecked, got {self.mode!r}")
        if n is not None and len(self.x0) != n:
            raise ValueError(f"x0 has {len(self.x0)} entries but the graph has {n} nodes")


_SIM_KEYS = {f.name: f.type for f in fields(SimulationConfig)}
_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def parse_vector(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def parse_config(text, base_dir=None, path=None):
    """Parse a flat ``key = value`` experiment file.

    Relative ``graph``, ``out`` and table paths resolve against ``base_dir``.
    """
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    cfg = ExperimentConfig(base_dir=base_dir)
    sim = {}
    for lineno, raw, line in _content_lines(text):
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise ParseError("expected 'key = value'", lineno, 1, path)
        col = raw.find(value) + 1 if value else len(raw) + 1
        try:
            if key == "graph":
                cfg.graph_source = base_dir / value
            elif key == "protocol":
                cfg.protocol_spec = value
            elif key == "x0":
                cfg.x0 = parse_vector(value)
            elif key in ("out", "outputs"):
                cfg.outputs = base_dir / value
            elif key == "mode":
                cfg.mode = value.lower()
            elif key == "label":
                cfg.label = value
            elif key == "plot":
                cfg.plot = _BOOL[value.lower()]
            elif key in _SIM_KEYS:
                sim[key] = value if key == "integrator" else (
                    int(value) if key == "record_every" else float(value))
            else:
                raise ParseError(f"unknown key {key!r}", lineno, 1, path)
        except (ValueError, KeyError):
            raise ParseError(f"bad value for {key!r}: {value!r}", lineno, col, path) from None
    try:
        cfg.sim = SimulationConfig(**sim)
    except ValueError as exc:
        raise ParseError(str(exc), None, None, path) from None
    return cfg


def read_config(path):
    path = Path(path)
    return parse_config(path.read_text(), path.parent, path)


def preset_dir():
    return Path(str(resources.files(PRESET_PACKAGE)))


def list_presets():
    return sorted(p.stem for p in preset_dir().glob("*.cfg"))


def load_preset(name):
    path = preset_dir() / f"{name}.cfg"
    if not path.is_file():
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return read_config(path)


def _num(v):
    return repr(float(v))


def write_trajectory_csv(traj, path):
    """Header ``t,x_1,...,x_n,V,x_xi,disagreement``; one row per sample."""
    header = ["t", *(f"x_{i + 1}" for i in range(traj.n)), "V", "x_xi", "disagreement"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in range(len(traj)):
            w.writerow([_num(traj.t[k]), *map(_num, traj.x[k]), _num(traj.V[k]),
                        _num(traj.x_xi[k]), _num(traj.disagreement[k])])


def read_trajectory_csv(path):
    """Read back a trajectory CSV as ``(header, rows)`` with float rows."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = np.array([[float(v) for v in row] for row in r])
    return header, rows


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (np.ndarray, list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, Path):
        return str(v)
    return v


def write_summary(record, path):
    """Flat JSON record with sorted keys, so reruns are byte-identical."""
    flat = {k: _jsonable(v) for k, v in record.items()}
    Path(path).write_text(json.dumps(flat, indent=2, sort_keys=True) + "\n")


def write_record(record, path):
    """Flat ``key = value`` text record."""
    lines = [f"{k} = {v}" for k, v in record.items()]
    Path(path).write_text("\n".join(lines) + "\n")
