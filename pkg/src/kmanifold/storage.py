"""On-disk formats: snapshot matrices, dataset and manifold directories.

Snapshot matrix file (``.snap``): an 8-byte magic string, a little-endian
uint32 format version, little-endian uint64 row and column counts, then the
payload as little-endian float64 in column-major order. The format is
deliberately trivial so other tools can read it with a few lines of code.

Datasets and trained manifolds are directories holding ``.snap`` files plus
a ``manifest.json`` with enough configuration to regenerate the binary
content bit-for-bit (timestamps and timings excluded).
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .data import SnapshotSet
from .exceptions import InvalidConfig
from .kernels import (
    FeatureMapKernel,
    KernelSpec,
    Normalizer,
    PolynomialKernel,
    RbfKernel,
)
from .manifolds import METHODS, FeatureMapManifold, KernelManifold, POD
from .pod import PodBasis

MAGIC = b"KMSNAP01"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIQQ")


def write_matrix(path, array) -> None:
    """Write a matrix (or vector, stored as a single column) to a .snap file."""
    a = np.asarray(array, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"can only store 1-D or 2-D arrays, got ndim={a.ndim}")
    path = Path(path)
    with path.open("wb") as stream:
        stream.write(_HEADER.pack(MAGIC, FORMAT_VERSION, a.shape[0], a.shape[1]))
        stream.write(np.asarray(a, dtype="<f8").tobytes(order="F"))


def read_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`write_matrix`."""
    path = Path(path)
    with path.open("rb") as stream:
        header = stream.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise InvalidConfig(f"{path}: truncated header")
        magic, version, rows, cols = _HEADER.unpack(header)
        if magic != MAGIC:
            raise InvalidConfig(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise InvalidConfig(f"{path}: unsupported format version {version}")
        payload = stream.read(rows * cols * 8)
    if len(payload) != rows * cols * 8:
        raise InvalidConfig(f"{path}: truncated payload")
    flat = np.frombuffer(payload, dtype="<f8")
    return flat.reshape((rows, cols), order="F").copy()


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as stream:
        for chunk in iter(lambda: stream.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(directory, payload) -> None:
    (Path(directory) / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_manifest(directory) -> dict:
    path = Path(directory) / "manifest.json"
    if not path.is_file():
        raise InvalidConfig(f"no manifest.json in {directory}")
    return json.loads(path.read_text(encoding="utf-8"))


# --- kernel (de)serialization --------------------------------------------------


def kernel_to_json(kernel) -> dict:
    """Serialize a kernel description to ``{"base": ..., "normalizer": ...}``."""
    spec = kernel if isinstance(kernel, KernelSpec) else KernelSpec(base=kernel)
    base = spec.base
    if isinstance(base, RbfKernel):
        base_json = {"kind": base.kind, "epsilon": base.epsilon}
    elif isinstance(base, PolynomialKernel):
        base_json = {"c": base.c, "rho": base.rho, "ell": base.ell}
    elif isinstance(base, FeatureMapKernel):
        weight = base.weight
        if not isinstance(weight, str):
            weight = {"custom": np.asarray(weight).tolist()}
        base_json = {"feature_map": base.feature_map, "weight": weight}
    else:
        raise TypeError(f"cannot serialize kernel {base!r}")
    normalizer = None
    if spec.normalizer is not None:
        normalizer = {
            "m": spec.normalizer.scale.tolist(),
            "x_bar": spec.normalizer.shift.tolist(),
        }
    return {"base": base_json, "normalizer": normalizer}


def kernel_from_json(payload) -> KernelSpec:
    """Inverse of :func:`kernel_to_json`."""
    base_json = payload["base"]
    if "kind" in base_json:
        base = RbfKernel(kind=base_json["kind"], epsilon=base_json["epsilon"])
    elif "ell" in base_json:
        base = PolynomialKernel(c=base_json["c"], rho=base_json["rho"], ell=base_json["ell"])
    elif "feature_map" in base_json:
        weight = base_json["weight"]
        if isinstance(weight, dict):
            weight = np.asarray(weight["custom"], dtype=np.float64)
        base = FeatureMapKernel(feature_map=base_json["feature_map"], weight=weight)
    else:
        raise InvalidConfig(f"unrecognized kernel description: {base_json}")
    normalizer = None
    if payload.get("normalizer") is not None:
        normalizer = Normalizer(
            scale=np.asarray(payload["normalizer"]["m"], dtype=np.float64),
            shift=np.asarray(payload["normalizer"]["x_bar"], dtype=np.float64),
        )
    return KernelSpec(base=base, normalizer=normalizer)


# --- run manifests -------------------------------------------------------------


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record for one CLI run."""

    command: str
    config: dict
    dataset_hash: str | None = None
    r: int | None = None
    m: int | None = None
    kernel: dict | None = None
    regularization: float | None = None
    metrics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    tool_version: str = __version__
    timestamp: str = field(default_factory=_utc_now)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, payload) -> "RunManifest":
        return cls(**payload)


# --- dataset directories --------------------------------------------------------


def save_dataset(directory, train, test, problem, config) -> dict:
    """Write train/test snapshot sets plus a regeneration manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, part in (("train", train), ("test", test)):
        path = directory / f"{name}.snap"
        write_matrix(path, part.states)
        files[name] = {
            "path": path.name,
            "rows": part.states.shape[0],
            "cols": part.states.shape[1],
            "sha256": file_sha256(path),
            "labels": [list(label) for label in (part.labels or [])],
            "scaling": part.scaling,
        }
    manifest = {
        "kind": "dataset",
        "problem": problem,
        "config": config,
        "files": files,
        "content_hash": _combined_hash(files),
        "tool_version": __version__,
        "created": _utc_now(),
    }
    write_manifest(directory, manifest)
    return manifest


def load_dataset(directory) -> tuple[SnapshotSet, SnapshotSet, dict]:
    """Read a dataset directory back into (train, test, manifest)."""
    directory = Path(directory)
    manifest = read_manifest(directory)
    if manifest.get("kind") != "dataset":
        raise InvalidConfig(f"{directory} is not a dataset directory")
    parts = []
    for name in ("train", "test"):
        entry = manifest["files"][name]
        states = read_matrix(directory / entry["path"])
        labels = [tuple(label) for label in entry["labels"]] or None
        parts.append(SnapshotSet(states, labels=labels, scaling=entry["scaling"]))
    return parts[0], parts[1], manifest


def _combined_hash(files) -> str:
    digest = hashlib.sha256()
    for name in sorted(files):
        digest.update(name.encode())
        digest.update(files[name]["sha256"].encode())
    return digest.hexdigest()


# --- manifold directories --------------------------------------------------------


def save_manifold(directory, manifold, dataset_hash=None, train_time_s=None) -> dict:
    """Persist a fitted estimator as .snap matrices plus a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    basis = manifold.basis_

    arrays = {
        "offset": basis.offset,
        "v": basis.v,
        "v_bar": basis.v_bar,
        "singular_values": basis.singular_values,
    }
    extra: dict = {}
    if isinstance(manifold, KernelManifold):
        arrays["omega"] = manifold.coefficients_
        arrays["train_inputs"] = manifold.train_inputs_
        extra["kernel"] = kernel_to_json(manifold.kernel_)
        extra["normalize_inputs"] = bool(manifold.normalize_inputs)
    elif isinstance(manifold, FeatureMapManifold):
        arrays["xi"] = manifold.coefficients_
        extra["feature_map"] = manifold.feature_map
    elif not isinstance(manifold, POD):
        raise TypeError(f"cannot persist {type(manifold).__name__}")

    files = {}
    for name, array in arrays.items():
        path = directory / f"{name}.snap"
        write_matrix(path, array)
        files[name] = {"path": path.name, "sha256": file_sha256(path)}

    manifest = {
        "kind": "manifold",
        "method": manifold.method_name,
        "r": int(basis.r),
        "m": int(basis.m),
        "lambda": float(manifold.regularization),
        "offset": manifold.offset if isinstance(manifold.offset, str) else "custom",
        "dims": {"n": int(basis.n)},
        "dataset_hash": dataset_hash,
        "train_time_s": train_time_s,
        "files": files,
        "tool_version": __version__,
        "created": _utc_now(),
        **extra,
    }
    write_manifest(directory, manifest)
    return manifest


def load_manifold(directory):
    """Rebuild a fitted estimator from a manifold directory."""
    directory = Path(directory)
    manifest = read_manifest(directory)
    if manifest.get("kind") != "manifold":
        raise InvalidConfig(f"{directory} is not a manifold directory")

    def load(name):
        return read_matrix(directory / manifest["files"][name]["path"])

    offset = load("offset")[:, 0]
    v = load("v")
    singular_values = load("singular_values")[:, 0]
    if "v_bar" in manifest["files"]:
        v_bar = load("v_bar")
    else:
        v_bar = np.zeros((v.shape[0], 0))
    basis = PodBasis(offset=offset, v=v, v_bar=v_bar, singular_values=singular_values)

    method = manifest["method"]
    if method == "pod":
        est = POD(r=manifest["r"], offset=manifest["offset"])
    elif method == "kernel":
        spec = kernel_from_json(manifest["kernel"])
        est = KernelManifold(
            r=manifest["r"],
            m=manifest["m"],
            kernel=spec,
            regularization=manifest["lambda"],
            normalize_inputs=manifest["normalize_inputs"],
            offset=manifest["offset"],
        )
        est.kernel_ = spec
        est.coefficients_ = load("omega")
        est.train_inputs_ = load("train_inputs")
    elif method == "fm-qm":
        est = FeatureMapManifold(
            r=manifest["r"],
            m=manifest["m"],
            feature_map=manifest["feature_map"],
            regularization=manifest["lambda"],
            offset=manifest["offset"],
        )
        est.coefficients_ = load("xi")
    else:
        raise InvalidConfig(f"unknown manifold method {method!r}")
    est.basis_ = basis
    est.n_features_in_ = basis.n
    return est, manifest
