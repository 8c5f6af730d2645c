"""File formats: LON JSON/DOT/GraphML and the experiment CSV tables.

Cities in exported tours are 1-based, matching the ``.ttp`` instance files.
"""

from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .graph import MetricsRecord
from .lon import Lon, LonNode
from .model import Solution
from .stats import Report

LON_SCHEMA = "ttplon-lon/1"
CSV_SCHEMA = "ttplon-csv/1"

SUMMARY_COLUMNS = (
    "model", "corr", "cap", "drop", "count",
    "nv_mean", "nv_std", "ne_mean", "ne_std", "c_mean", "c_std",
    "cr_mean", "cr_std", "l_mean", "l_std", "b_mean", "b_std", "rho_fisher",
)
INSTANCE_COLUMNS = (
    "model", "corr", "cap", "drop", "index", "attempt", "space_size",
    "nv", "ne", "c", "cr", "l", "b", "l_defined", "components", "rho", "rho_degenerate",
)
CORRELATION_COLUMNS = ("model", "rho_fisher", "n_used", "n_degenerate")
SCATTER_COLUMNS = ("model", "corr", "cap", "drop", "index", "node", "fitness", "basin_size")
_METRIC_COLUMNS = (("n_v", "nv"), ("n_e", "ne"), ("C", "c"), ("C_r", "cr"), ("l", "l"), ("B_mean", "b"))


def fmt(value) -> str:
    """17 significant digits for reals, plain text for everything else."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else format(float(value), ".17g")
    return str(value)


# --- LON -------------------------------------------------------------------


def lon_to_dict(lon: Lon, record: MetricsRecord | None = None) -> dict:
    data = {
        "schema": LON_SCHEMA,
        "space_size": lon.space_size,
        "nodes": [
            {
                "id": i,
                "index": nd.index,
                "fitness": nd.fitness,
                "basin_size": nd.basin_size,
                "tour": [c + 1 for c in nd.solution.tour],
                "plan": list(nd.solution.plan),
            }
            for i, nd in enumerate(lon.nodes)
        ],
        "edges": [
            [int(u), int(v), int(c)]
            for u, v, c in zip(lon.edge_lo, lon.edge_hi, lon.edge_count)
        ],
        "basin_sizes": [nd.basin_size for nd in lon.nodes],
        "basin_of": lon.basin_of.tolist(),
    }
    if record is not None:
        data["metrics"] = asdict(record)
    return data


def lon_from_dict(data: dict) -> Lon:
    if data.get("schema") != LON_SCHEMA:
        raise ValueError(f"unsupported LON schema {data.get('schema')!r}")
    nodes = tuple(
        LonNode(
            int(nd["index"]),
            Solution.of([c - 1 for c in nd["tour"]], nd["plan"]),
            float(nd["fitness"]),
            int(nd["basin_size"]),
        )
        for nd in data["nodes"]
    )
    edges = np.array(data["edges"], dtype=np.int64).reshape(-1, 3)
    return Lon(
        nodes,
        edges[:, 0].copy(),
        edges[:, 1].copy(),
        edges[:, 2].copy(),
        np.array(data["basin_of"], dtype=np.int64),
        int(data["space_size"]),
    )


def write_lon_json(lon: Lon, path: str | Path, record: MetricsRecord | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lon_to_dict(lon, record), fh, separators=(",", ":"))
        fh.write("\n")


def read_lon_json(path: str | Path) -> Lon:
    with open(path, encoding="utf-8") as fh:
        return lon_from_dict(json.load(fh))


def write_dot(lon: Lon, path: str | Path) -> None:
    lines = ["graph lon {"]
    for i, nd in enumerate(lon.nodes):
        lines.append(f"  {i} [fitness={fmt(nd.fitness)}, basin_size={nd.basin_size}];")
    for u, v, c in zip(lon.edge_lo, lon.edge_hi, lon.edge_count):
        lines.append(f"  {u} -- {v} [transition_count={c}];")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_graphml(lon: Lon, path: str | Path) -> None:
    ns = "http://graphml.graphdrawing.org/xmlns"
    root = ET.Element("graphml", xmlns=ns)
    for key_id, target, name, kind in (
        ("d0", "node", "fitness", "double"),
        ("d1", "node", "basin_size", "long"),
        ("d2", "edge", "transition_count", "long"),
    ):
        ET.SubElement(root, "key", {"id": key_id, "for": target, "attr.name": name, "attr.type": kind})
    graph = ET.SubElement(root, "graph", id="lon", edgedefault="undirected")
    for i, nd in enumerate(lon.nodes):
        node = ET.SubElement(graph, "node", id=f"n{i}")
        ET.SubElement(node, "data", key="d0").text = fmt(nd.fitness)
        ET.SubElement(node, "data", key="d1").text = str(nd.basin_size)
    for u, v, c in zip(lon.edge_lo, lon.edge_hi, lon.edge_count):
        edge = ET.SubElement(graph, "edge", source=f"n{u}", target=f"n{v}")
        ET.SubElement(edge, "data", key="d2").text = str(int(c))
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)


# --- experiment tables -----------------------------------------------------


def _writer(fh: TextIO, kind: str, columns: Iterable[str]):
    fh.write(f"# schema: {CSV_SCHEMA} {kind}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    return w


def _class_cells(key) -> list[str]:
    return [key.model.value, key.correlation, fmt(key.capacity_class), fmt(key.drop_rate)]


def write_report(report: Report, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    path = out / "summary.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh, "summary", SUMMARY_COLUMNS)
        for s in report.summaries:
            row = _class_cells(s.key) + [fmt(s.count)]
            for name, _ in _METRIC_COLUMNS:
                row += [fmt(s.mean[name]), fmt(s.std[name])]
            w.writerow(row + [fmt(s.rho_fisher)])
    paths.append(path)

    path = out / "instances.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh, "instances", INSTANCE_COLUMNS)
        for r in report.instances:
            rec = r.record
            w.writerow(
                _class_cells(r.key)
                + [fmt(r.index), fmt(r.attempt), fmt(r.space_size)]
                + [fmt(getattr(rec, name)) for name, _ in _METRIC_COLUMNS]
                + [fmt(rec.l_defined), fmt(rec.n_components)]
                + [fmt(r.correlation.rho), fmt(r.correlation.degenerate)]
            )
    paths.append(path)

    path = out / "correlations.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh, "correlations", CORRELATION_COLUMNS)
        for model, (rho, used, degenerate) in report.model_rho.items():
            w.writerow([model.value, fmt(rho), fmt(used), fmt(degenerate)])
    paths.append(path)

    path = out / "fitness_basin.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh, "fitness_basin", SCATTER_COLUMNS)
        for r in report.instances:
            for node, (f, b) in enumerate(zip(r.node_fitness, r.node_basin)):
                w.writerow(_class_cells(r.key) + [fmt(r.index), fmt(node), fmt(f), fmt(b)])
    paths.append(path)
    return paths


def read_csv(path: str | Path) -> list[dict[str, str]]:
    """Rows of a table written by :func:`write_report` (schema line skipped)."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith("# schema:"):
            raise ValueError(f"{path}: missing schema line")
        return list(csv.DictReader(fh))
