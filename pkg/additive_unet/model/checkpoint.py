"""
Checkpoint files.

Layout: 8-byte magic, 8-byte little-endian header length, UTF-8 JSON header
(model config, tensor manifest of name/shape/offset, optional optimizer
hyperparameters, free-form extras), then raw little-endian float64 payloads
in manifest order. Offsets are relative to the start of the payload.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from additive_unet.errors import CheckpointError, ConfigError
from additive_unet.model.config import ModelConfig
from additive_unet.model.params import ModelParams, build_params
from additive_unet.optim import AdamState

MAGIC = b"ADDUNET1"
FORMAT_VERSION = 1
_LENGTH = struct.Struct("<Q")


@dataclass
class Checkpoint:
    """Everything restored from a checkpoint file."""

    params: ModelParams
    optimizer: AdamState | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def config(self) -> ModelConfig:
        return self.params.config


def _encode(
    params: ModelParams, optimizer: AdamState | None, extra: dict[str, Any] | None
) -> bytes:
    named = params.named_tensors()
    arrays: list[tuple[str, np.ndarray]] = [(n, t.data) for n, t in named.items()]
    if optimizer is not None:
        arrays += [(f"adam.m.{n}", optimizer.m[n]) for n in named]
        arrays += [(f"adam.v.{n}", optimizer.v[n]) for n in named]

    manifest, offset = [], 0
    for name, array in arrays:
        manifest.append({"name": name, "shape": list(array.shape), "offset": offset})
        offset += array.size * 8

    header = {
        "format_version": FORMAT_VERSION,
        "model": params.config.to_dict(),
        "tensors": manifest,
        "optimizer": optimizer.hyperparameters() if optimizer is not None else None,
        "extra": extra or {},
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for _, a in arrays)
    return MAGIC + _LENGTH.pack(len(header_bytes)) + header_bytes + payload


def save_checkpoint(
    path: str,
    params: ModelParams,
    optimizer: AdamState | None = None,
    extra: dict[str, Any] | None = None,
) -> str:
    """Write `params` (and optionally optimizer state) to `path`."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    data = _encode(params, optimizer, extra)
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "wb") as f:
        f.write(data)
    os.replace(tmp_path, path)
    return path


def load_checkpoint(path: str) -> Checkpoint:
    """
    Read a checkpoint written by `save_checkpoint`.

    Raises:
        CheckpointError: If the file is missing, truncated or malformed.
    """
    if not os.path.isfile(path):
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "rb") as f:
        blob = f.read()

    if blob[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    if len(blob) < 16:
        raise CheckpointError(f"{path}: truncated header")
    (header_len,) = _LENGTH.unpack_from(blob, 8)
    start = 16 + header_len
    if len(blob) < start:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(blob[16:start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: unreadable header ({e})")
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: unsupported format version {header.get('format_version')!r}"
        )

    arrays: dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        begin = start + entry["offset"]
        end = begin + count * 8
        if end > len(blob):
            raise CheckpointError(f"{path}: payload truncated at tensor {entry['name']!r}")
        arrays[entry["name"]] = (
            np.frombuffer(blob, dtype="<f8", count=count, offset=begin)
            .astype(np.float64)
            .reshape(shape)
        )

    try:
        config = ModelConfig.from_dict(header["model"])
    except ConfigError as e:
        raise CheckpointError(f"{path}: invalid model header ({e})")
    params = build_params(config)
    named = params.named_tensors()
    for name, tensor in named.items():
        if name not in arrays:
            raise CheckpointError(f"{path}: missing tensor {name!r}")
        if arrays[name].shape != tensor.shape:
            raise CheckpointError(
                f"{path}: tensor {name!r} has shape {list(arrays[name].shape)}, "
                f"expected {list(tensor.shape)}"
            )
        tensor.data[...] = arrays[name]

    optimizer = None
    if header.get("optimizer") is not None:
        hyper = header["optimizer"]
        optimizer = AdamState(
            lr=hyper["lr"],
            beta1=hyper["beta1"],
            beta2=hyper["beta2"],
            eps_hat=hyper["eps_hat"],
            step_count=hyper["step_count"],
        )
        for name in named:
            try:
                optimizer.m[name] = arrays[f"adam.m.{name}"].copy()
                optimizer.v[name] = arrays[f"adam.v.{name}"].copy()
            except KeyError as e:
                raise CheckpointError(f"{path}: missing optimizer tensor {e}")

    return Checkpoint(params=params, optimizer=optimizer, extra=header.get("extra", {}))
