import dataclasses
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from bubforge.engine.assembler.density import density_map
from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.assembler.labels import LabelSet
from bubforge.engine.assembler.scene import Scene, synthesize
from bubforge.engine.assembler.sources import AbstractBubbleSource
from bubforge.engine.config import build_settings, read_json, settings_to_dict
from bubforge.engine.errors import FormatError
from bubforge.engine.imgproc.arrays import Raster
from bubforge.engine.imgproc.codecs import write_pgm
from bubforge.engine.models.label_mapping import LabelMapping

logger = logging.getLogger(__name__)

IMAGE_FILE = "image.pgm"
LABELS_FILE = "labels.csv"
DENSITY_FILE = "density.pgm"
META_FILE = "meta.json"
FLOAT_FORMAT = "%.9g"

PathLike = Union[str, Path]


def _write(path: Path, write: Any) -> None:
    try:
        write(path)
    except OSError as e:
        raise OSError(e.errno, f"cannot write {path}: {e.strerror or e}") from e


def export(
    image: Raster,
    labels: LabelSet,
    density: Raster,
    out_dir: PathLike,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Writes ``image.pgm``, ``labels.csv``, ``density.pgm`` and ``meta.json`` into ``out_dir``.

    The density raster is divided by its maximum before quantization; that maximum is
    recorded as ``density_scale`` (``density ~= byte / 255 * density_scale``).

    Returns:
        dict: The metadata written to ``meta.json``.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(e.errno, f"cannot create {out}: {e.strerror or e}") from e

    peak = float(density.max()) if density.size else 0.0
    scale = peak if peak > 0 else 1.0
    meta: Dict[str, Any] = {
        "spec": settings_to_dict(labels.spec),
        "seed": labels.seed,
        "count": labels.count,
        "density_scale": scale,
        "bboxes": [list(label.bbox) for label in labels.labels],
        "records": [label.record for label in labels.labels],
        **labels.extra,
        **(extra or {}),
    }
    frame = labels.to_frame()
    _write(out / IMAGE_FILE, lambda p: write_pgm(p, image))
    _write(out / LABELS_FILE, lambda p: frame.to_csv(p, index=False, float_format=FLOAT_FORMAT))
    _write(out / DENSITY_FILE, lambda p: write_pgm(p, density / scale))
    _write(out / META_FILE, lambda p: p.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"))
    return meta


def export_scene(scene: Scene, out_dir: PathLike) -> Dict[str, Any]:
    """Exports a synthesized scene with its density map and void statistics."""
    extra = {"void_fraction": scene.void_fraction, "void_profile": scene.void_profile}
    return export(scene.image, scene.labels, density_map(scene.labels, scene.labels.spec), out_dir, extra)


def read_labels(out_dir: PathLike, mapping: Optional[LabelMapping] = None) -> LabelSet:
    """
    Reads a LabelSet back from an exported scene directory.

    Raises:
        FormatError: If ``labels.csv`` or ``meta.json`` is malformed or inconsistent.
    """
    out = Path(out_dir)
    meta = read_json(out / META_FILE)
    try:
        spec = build_settings(FlowSpec, meta["spec"])
        seed = int(meta["seed"])
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{out / META_FILE}: missing or invalid spec echo ({e})") from e
    try:
        frame = pd.read_csv(out / LABELS_FILE)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FormatError(f"{out / LABELS_FILE}: {e}") from e
    bboxes = meta.get("bboxes")
    if bboxes is not None and len(bboxes) != len(frame):
        raise FormatError(f"{out}: {len(frame)} labels but {len(bboxes)} bounding boxes in meta")
    records = meta.get("records")
    if records is not None and len(records) != len(frame):
        records = None
    labels = LabelSet.from_frame(frame, spec, seed, bboxes=bboxes, records=records, mapping=mapping)
    labels.extra = {k: meta[k] for k in ("renderer",) if k in meta}
    return labels


def scene_dir(out_dir: PathLike, i: int) -> Path:
    return Path(out_dir) / f"scene_{i:04d}"


def synthesize_scenes(
    spec: FlowSpec,
    source: AbstractBubbleSource,
    count: int,
    out_dir: PathLike,
    threads: int = 1,
) -> List[Dict[str, Any]]:
    """
    Synthesizes and exports ``count`` scenes; scene ``i`` uses seed ``spec.seed + i``.

    Scenes are independent, so ``threads`` > 1 renders them concurrently without changing
    any output byte.
    """

    def one(i: int) -> Dict[str, Any]:
        scene = synthesize(dataclasses.replace(spec, seed=spec.seed + i), source)
        return export_scene(scene, scene_dir(out_dir, i))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        metas = list(pool.map(one, range(count)))
    logger.info("wrote %d scenes to %s", count, out_dir)
    return metas


def density_from_file(pixels: np.ndarray, meta: Dict[str, Any]) -> np.ndarray:
    """Density values of a re-read ``density.pgm`` (intensities in [0, 1])."""
    return np.asarray(pixels, dtype=np.float64) * float(meta["density_scale"])
