"""
Text file formats: match CSVs with an image header, JSON camera files,
rotation graphs, focal-estimate pools, reports and benchmark tables.

Floats are written with Python's shortest round-trip representation and
read back with round-trip parsing, so values survive unchanged.
"""

import io
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Type, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from ..errors import InputOutputError, ParseError
from ..models.correspondences import CorrespondenceSet, ImageInfo
from ..models.geometry import CameraMatrix, CameraRole
from ..models.schemas import (
    CameraEntry,
    CameraFileModel,
    FocalEstimateModel,
    FocalPoolModel,
    RotationEdgeModel,
    RotationGraphModel,
)
from .averaging import FocalEstimatePool, RotationGraph
from .geometry import calibration_matrix

logger = logging.getLogger(__name__)

MATCH_COLUMNS = ["x1", "y1", "x2", "y2"]
M = TypeVar("M", bound=BaseModel)


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputOutputError(f"Cannot read {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputOutputError(f"Cannot write {path}: {exc}") from exc


def _parse_header(line: str) -> Tuple[str, ImageInfo]:
    tokens = line.lstrip("#").split()
    if not tokens or tokens[0] not in ("image1", "image2"):
        raise ParseError(f"Unrecognized header line: {line.strip()!r}")
    fields = {}
    for token in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise ParseError(f"Header field {token!r} is not key=value")
        fields[key] = value
    try:
        width = float(fields["width"]) if "width" in fields else None
        height = float(fields["height"]) if "height" in fields else None
    except ValueError as exc:
        raise ParseError(f"Bad image size in header: {line.strip()!r}") from exc
    return tokens[0], ImageInfo(fields.get("id", ""), width, height)


def read_match_file(path) -> CorrespondenceSet:
    text = _read_text(path)
    images = {"image1": ImageInfo(), "image2": ImageInfo()}
    for line in text.splitlines():
        if line.startswith("#"):
            key, info = _parse_header(line)
            images[key] = info

    try:
        df = pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(f"Malformed match file {path}: {exc}") from exc

    columns = list(df.columns)
    if columns not in (MATCH_COLUMNS, MATCH_COLUMNS + ["label"]):
        raise ParseError(f"Expected columns x1,y1,x2,y2[,label], got {','.join(map(str, columns))}")
    try:
        values = df[MATCH_COLUMNS].to_numpy(dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"Non-numeric coordinate in {path}") from exc
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(values), axis=1))[0])
        raise ParseError(f"Row {bad + 1} of {path} has a missing or non-finite coordinate")

    labels = None
    if "label" in df:
        try:
            raw = df["label"].to_numpy(dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"Non-numeric label in {path}") from exc
        if not np.all(np.isin(raw, (0.0, 1.0))):
            raise ParseError("Labels must be 0 or 1")
        labels = raw.astype(bool)

    logger.debug("Read %d matches from %s", len(values), path)
    return CorrespondenceSet(
        values[:, :2], values[:, 2:], labels, images["image1"], images["image2"]
    )


def _header_line(key: str, info: ImageInfo) -> str:
    parts = [f"# {key}", f"id={info.id or key}"]
    if info.width is not None:
        parts.append(f"width={info.width!r}")
    if info.height is not None:
        parts.append(f"height={info.height!r}")
    return " ".join(parts)


def write_match_file(path, corrs: CorrespondenceSet) -> None:
    df = pd.DataFrame(np.hstack([corrs.x1, corrs.x2]), columns=MATCH_COLUMNS)
    if corrs.labels is not None:
        df["label"] = corrs.labels.astype(int)
    try:
        with open(path, "w", newline="") as handle:
            handle.write(_header_line("image1", corrs.image1) + "\n")
            handle.write(_header_line("image2", corrs.image2) + "\n")
            df.to_csv(handle, index=False, lineterminator="\n")
    except OSError as exc:
        raise InputOutputError(f"Cannot write {path}: {exc}") from exc


def read_model(path, model: Type[M]) -> M:
    text = _read_text(path)
    try:
        return model.model_validate(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    except ValidationError as exc:
        raise ParseError(f"{path} does not match the {model.__name__} schema: {exc}") from exc


def write_model(path, model: BaseModel) -> None:
    _write_text(path, json.dumps(model.model_dump(), indent=2) + "\n")


def camera_from_entry(entry: CameraEntry) -> CameraMatrix:
    if entry.P is not None:
        P = np.array(entry.P, dtype=float)
    else:
        R = np.array(entry.R, dtype=float).reshape(3, 3)
        C = np.array(entry.C, dtype=float)
        P = calibration_matrix(entry.f) @ np.column_stack([R, -R @ C])
    if not np.all(np.isfinite(P)) or np.linalg.matrix_rank(P) != 3:
        raise ParseError(f"Camera {entry.id!r} is not a finite rank-3 matrix")
    return CameraMatrix(P, CameraRole.METRIC if entry.P is None else CameraRole.PROJECTIVE)


def read_camera_file(path) -> Tuple[CameraFileModel, Dict[str, CameraMatrix]]:
    model = read_model(path, CameraFileModel)
    return model, {entry.id: camera_from_entry(entry) for entry in model.cameras}


def write_camera_file(path, entries: List[CameraEntry]) -> None:
    write_model(path, CameraFileModel(cameras=entries))


def read_rotation_graph(path) -> Tuple[RotationGraph, Optional[Dict[int, np.ndarray]]]:
    model = read_model(path, RotationGraphModel)
    graph = RotationGraph(nodes=list(model.nodes))
    try:
        for edge in model.edges:
            graph.add_edge(edge.i, edge.j, np.reshape(edge.R, (3, 3)))
    except ValueError as exc:
        raise ParseError(f"Bad edge rotation in {path}: {exc}") from exc
    truth = None
    if model.truth is not None:
        truth = {node: np.reshape(R, (3, 3)) for node, R in model.truth.items()}
    return graph, truth


def write_rotation_graph(
    path, graph: RotationGraph, truth: Optional[Dict[int, np.ndarray]] = None
) -> None:
    model = RotationGraphModel(
        nodes=list(graph.nodes),
        edges=[
            RotationEdgeModel(i=e.i, j=e.j, R=e.rotation.reshape(-1).tolist())
            for e in graph.edges
        ],
        truth=None if truth is None else {k: R.reshape(-1).tolist() for k, R in truth.items()},
    )
    write_model(path, model)


def read_focal_pool(path) -> FocalEstimatePool:
    model = read_model(path, FocalPoolModel)
    pool = FocalEstimatePool(truth=dict(model.truth or {}))
    try:
        for est in model.estimates:
            pool.add_pair_estimate(est.pair_id, est.image_i, est.image_j, est.f_i, est.f_j)
    except ValueError as exc:
        raise ParseError(f"Bad focal estimate in {path}: {exc}") from exc
    return pool


def write_focal_pool(path, pool: FocalEstimatePool) -> None:
    estimates = [
        FocalEstimateModel(
            pair_id=entry.pair_id, image_i=image, image_j=entry.partner,
            f_i=entry.f, f_j=entry.partner_f,
        )
        for image in pool.images
        for entry in pool.entries[image]
        if image < entry.partner
    ]
    write_model(path, FocalPoolModel(estimates=estimates, truth=pool.truth or None))


def write_benchmark_csv(path, table: pd.DataFrame) -> None:
    try:
        with open(path, "w", newline="") as handle:
            table.to_csv(handle, index=False, lineterminator="\n")
    except OSError as exc:
        raise InputOutputError(f"Cannot write {path}: {exc}") from exc
