"""
BGANv1 model files.

Layout (little-endian): 8-byte magic ``BGANv1\\0\\0``; u32 version; u32 tensor count followed
by the parameter and buffer tensors, plus the conditioning pool when the model has one; u32
count followed by the optimizer tensors; u32 length followed by a UTF-8 JSON echo of the
config, architecture and training history. Each tensor is u8 tag, u8 rank, u32 dims[rank]
and f32 data.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Tuple, Union

import numpy as np
import torch

from bubforge.engine.binio import BinaryReader, pack
from bubforge.engine.config import build_settings, settings_to_dict
from bubforge.engine.errors import FormatError, ValidationError
from bubforge.engine.gan.config import GanConfig
from bubforge.engine.gan.model import EpochStats, GanModel

MAGIC = b"BGANv1\x00\x00"
VERSION = 1

TAG_G_PARAM = 1
TAG_D_PARAM = 2
TAG_G_BUFFER = 3
TAG_D_BUFFER = 4
TAG_EXP_AVG = 5
TAG_EXP_AVG_SQ = 6
TAG_STEP = 7
TAG_POOL = 8

Tensor = Tuple[int, np.ndarray]


def _encode(tag: int, data: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(data, dtype="<f4")
    return pack("BB", tag, arr.ndim) + pack(f"{arr.ndim}I", *arr.shape) + arr.tobytes()


def _decode(reader: BinaryReader) -> Tensor:
    tag, rank = reader.u8(), reader.u8()
    dims = reader.unpack(f"{rank}I") if rank else ()
    data = reader.array("<f4", int(np.prod(dims)) if dims else 1)
    return tag, data.reshape(dims)


def _section(tensors: List[Tensor]) -> bytes:
    return pack("I", len(tensors)) + b"".join(_encode(tag, data) for tag, data in tensors)


def _read_section(reader: BinaryReader) -> List[Tensor]:
    return [_decode(reader) for _ in range(reader.u32())]


def _numpy(t: torch.Tensor) -> np.ndarray:
    return t.detach().to(torch.float32).cpu().numpy()


def _weights(model: GanModel) -> List[Tensor]:
    out: List[Tensor] = []
    out += [(TAG_G_PARAM, _numpy(p)) for p in model.generator.parameters()]
    out += [(TAG_D_PARAM, _numpy(p)) for p in model.discriminator.parameters()]
    out += [(TAG_G_BUFFER, _numpy(b)) for b in model.generator.buffers()]
    out += [(TAG_D_BUFFER, _numpy(b)) for b in model.discriminator.buffers()]
    if model.pool.shape[0]:
        out.append((TAG_POOL, model.pool.astype(np.float32)))
    return out


def _optimizer(model: GanModel) -> List[Tensor]:
    out: List[Tensor] = []
    for optimizer, module in ((model.opt_g, model.generator), (model.opt_d, model.discriminator)):
        for p in module.parameters():
            state: Dict[str, Any] = optimizer.state.get(p, {})
            step = float(state["step"]) if "step" in state else 0.0
            zeros = np.zeros(tuple(p.shape), dtype=np.float32)
            out.append((TAG_EXP_AVG, _numpy(state["exp_avg"]) if state else zeros))
            out.append((TAG_EXP_AVG_SQ, _numpy(state["exp_avg_sq"]) if state else zeros))
            out.append((TAG_STEP, np.array([step], dtype=np.float32)))
    return out


def to_bytes(model: GanModel) -> bytes:
    echo = {
        "config": settings_to_dict(model.config),
        "architecture": [[name, list(shape)] for name, shape in model.architecture()],
        "history": [h.to_dict() for h in model.history],
    }
    payload = json.dumps(echo, sort_keys=True).encode("utf-8")
    return (
        MAGIC
        + pack("I", VERSION)
        + _section(_weights(model))
        + _section(_optimizer(model))
        + pack("I", len(payload))
        + payload
    )


def save_model(model: GanModel, path: Union[str, Path]) -> None:
    Path(path).write_bytes(to_bytes(model))


def _assign(targets: Iterable[torch.Tensor], tensors: List[Tensor], tag: int, source: str) -> None:
    targets = list(targets)
    found = [data for t, data in tensors if t == tag]
    if len(found) != len(targets):
        raise FormatError(f"{source}: expected {len(targets)} tensors with tag {tag}, found {len(found)}")
    with torch.no_grad():
        for target, data in zip(targets, found):
            if tuple(target.shape) != data.shape:
                raise FormatError(f"{source}: tensor shape {data.shape} does not match {tuple(target.shape)}")
            target.copy_(torch.as_tensor(data, dtype=target.dtype))


def from_bytes(data: bytes, source: str = "<bytes>") -> GanModel:
    """
    Parses a BGANv1 model.

    Raises:
        FormatError: On bad magic, unknown version, truncation, architecture mismatch or a
            corrupt config echo.
    """
    reader = BinaryReader(data, source)
    if reader.take(len(MAGIC)) != MAGIC:
        raise FormatError(f"{source}: not a BGANv1 model file (bad magic)")
    version = reader.u32()
    if version != VERSION:
        raise FormatError(f"{source}: unsupported BGANv1 version {version}")
    weights = _read_section(reader)
    optimizer = _read_section(reader)
    length = reader.u32()
    try:
        echo = json.loads(reader.take(length).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"{source}: corrupt config echo ({e})") from e
    reader.expect_end()
    if not isinstance(echo, dict):
        raise FormatError(f"{source}: corrupt config echo (expected a JSON object)")
    try:
        config = build_settings(GanConfig, echo["config"])
        history = [EpochStats(**h) for h in echo.get("history", [])]
    except (AttributeError, KeyError, TypeError, ValidationError) as e:
        raise FormatError(f"{source}: corrupt config echo ({e})") from e

    model = GanModel.initialize(config)
    _assign(model.generator.parameters(), weights, TAG_G_PARAM, source)
    _assign(model.discriminator.parameters(), weights, TAG_D_PARAM, source)
    _assign(model.generator.buffers(), weights, TAG_G_BUFFER, source)
    _assign(model.discriminator.buffers(), weights, TAG_D_BUFFER, source)

    params = [*model.generator.parameters(), *model.discriminator.parameters()]
    if len(optimizer) != 3 * len(params):
        raise FormatError(f"{source}: optimizer section holds {len(optimizer)} tensors, expected {3 * len(params)}")
    n_g = len(list(model.generator.parameters()))
    for index, p in enumerate(params):
        (_, exp_avg), (_, exp_avg_sq), (_, step) = optimizer[3 * index : 3 * index + 3]
        if float(step.reshape(-1)[0]) == 0.0:
            continue
        opt = model.opt_g if index < n_g else model.opt_d
        opt.state[p] = {
            "step": torch.tensor(float(step.reshape(-1)[0])),
            "exp_avg": torch.as_tensor(exp_avg, dtype=p.dtype).clone(),
            "exp_avg_sq": torch.as_tensor(exp_avg_sq, dtype=p.dtype).clone(),
        }
    pool = [data for tag, data in weights if tag == TAG_POOL]
    if len(pool) > 1 or (pool and (pool[0].ndim != 2 or pool[0].shape[1] != 4)):
        raise FormatError(f"{source}: expected at most one (n, 4) conditioning pool tensor")
    if pool:
        model.pool = pool[0].astype(np.float64)
    model.history = history
    model.eval()
    return model


def load_model(path: Union[str, Path]) -> GanModel:
    path = Path(path)
    return from_bytes(path.read_bytes(), str(path))
