"""Seeded generators for labelled benchmark datasets.

Four families are supported:

``D``   cluster-specific constant level plus white noise.
``C``   common level; members load on a cluster-shared latent signal.
``M``   level, trend, seasonality and seasonal peaks per cluster.
``MC``  as ``M`` but with overlapping levels and shared seasonal shapes,
        so that neither distance nor correlation alone separates clusters.

Every draw comes from a PCG64 stream derived from the dataset seed: stream 0
holds cluster-level randomness, stream ``i + 1`` belongs to series ``i``.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

__all__ = [
    "FAMILIES",
    "PRESET_NAMES",
    "DatasetSpec",
    "LabeledDataset",
    "even_sizes",
    "generate",
    "preset",
    "preset_file_version",
]

FAMILIES = ("D", "C", "M", "MC")


def _load_presets():
    with resources.files("rdpc").joinpath("data/presets.json").open() as fh:
        return json.load(fh)


_PRESETS = _load_presets()
PRESET_NAMES = tuple(_PRESETS["presets"])


def preset_file_version() -> str:
    return _PRESETS["version"]


def even_sizes(n: int, k: int) -> list[int]:
    """Near-equal partition of ``n``; the remainder goes to the first clusters."""
    if k < 1 or n < k:
        raise ValueError(f"cannot split {n} series into {k} non-empty clusters")
    q, r = divmod(n, k)
    return [q + 1 if j < r else q for j in range(k)]


@dataclass
class DatasetSpec:
    family: str
    n: int
    k: int
    t: int
    cluster_sizes: list = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.cluster_sizes is None:
            self.cluster_sizes = even_sizes(self.n, self.k)
        self.cluster_sizes = [int(s) for s in self.cluster_sizes]
        if len(self.cluster_sizes) != self.k:
            raise ValueError(f"{len(self.cluster_sizes)} cluster sizes given for k={self.k}")
        if any(s < 1 for s in self.cluster_sizes) or sum(self.cluster_sizes) != self.n:
            raise ValueError(f"cluster sizes {self.cluster_sizes} are not a partition of n={self.n}")
        if self.t < 1:
            raise ValueError("series length must be positive")
        for key, value in _walk_sd(self.params):
            if value < 0:
                raise ValueError(f"standard deviation {key} is negative: {value}")

    def to_json(self, **kw) -> str:
        return json.dumps(asdict(self), **kw)

    @classmethod
    def from_json(cls, text: str) -> "DatasetSpec":
        return cls(**json.loads(text))


def _walk_sd(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            path = f"{prefix}.{k}" if prefix else k
            if k.endswith("_sd") and isinstance(v, (int, float)):
                yield path, v
            else:
                yield from _walk_sd(v, path)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _walk_sd(v, f"{prefix}[{i}]")


@dataclass
class LabeledDataset:
    series: np.ndarray
    labels: np.ndarray
    spec: DatasetSpec

    @property
    def ids(self):
        return [f"s{i:04d}" for i in range(self.series.shape[0])]

    def to_csv(self, with_labels: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["id"] + (["label"] if with_labels else []) + [f"t{j + 1}" for j in range(self.spec.t)]
        w.writerow(head)
        for sid, lab, row in zip(self.ids, self.labels, self.series):
            w.writerow([sid] + ([int(lab)] if with_labels else []) + [repr(float(v)) for v in row])
        return buf.getvalue()


def preset(name: str, seed: int = 0) -> DatasetSpec:
    """Spec for one of :data:`PRESET_NAMES` with the given seed."""
    try:
        entry = _PRESETS["presets"][name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}") from None
    entry = copy.deepcopy(entry)
    return DatasetSpec(
        family=entry["family"],
        n=entry["n"],
        k=entry["k"],
        t=entry["t"],
        params=entry["params"],
        seed=int(seed),
        name=name,
    )


def _streams(spec):
    ss = np.random.SeedSequence(spec.seed)
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(spec.n + 1)]


def _labels(spec):
    return np.repeat(np.arange(1, spec.k + 1), spec.cluster_sizes)


def _gen_d(spec, rngs, labels):
    prm = spec.params
    means = np.asarray(prm["means"], dtype=float)
    if means.size != spec.k:
        raise ValueError(f"family D needs {spec.k} means, got {means.size}")
    sd = float(prm["noise_sd"])
    X = np.empty((spec.n, spec.t))
    for i, lab in enumerate(labels):
        X[i] = means[lab - 1] + sd * rngs[i + 1].standard_normal(spec.t)
    return X


def _ar1(rng, t, phi):
    # unit-variance stationary AR(1)
    e = rng.standard_normal(t)
    s = np.empty(t)
    s[0] = e[0]
    scale = np.sqrt(1.0 - phi * phi)
    for j in range(1, t):
        s[j] = phi * s[j - 1] + scale * e[j]
    return s


def _gen_c(spec, rngs, labels):
    prm = spec.params
    level = float(prm.get("level", 0.0))
    phi = float(prm.get("signal_ar", 0.0))
    shared = float(prm.get("shared_fraction", 0.0))
    lo, hi = prm["loading"]
    sd = float(prm["noise_sd"])
    g = rngs[0]
    common = _ar1(g, spec.t, phi)
    signals = [
        np.sqrt(shared) * common + np.sqrt(1.0 - shared) * _ar1(g, spec.t, phi) for _ in range(spec.k)
    ]
    X = np.empty((spec.n, spec.t))
    for i, lab in enumerate(labels):
        r = rngs[i + 1]
        a = r.uniform(lo, hi)
        X[i] = level + a * signals[lab - 1] + sd * r.standard_normal(spec.t)
    return X


def _profile(cluster, t, period):
    tt = np.arange(t, dtype=float)
    shape = float(cluster.get("amplitude", 0.0)) * np.sin(
        2.0 * np.pi * (tt + float(cluster.get("phase", 0.0))) / period
    )
    month = np.mod(np.arange(t), period)
    for m, height in cluster.get("peaks", []):
        shape = shape + height * (month == (int(m) - 1) % period)
        shape = shape + 0.5 * height * (month == int(m) % period)
        shape = shape + 0.5 * height * (month == (int(m) - 2) % period)
    trend = float(cluster.get("slope", 0.0)) * tt
    return float(cluster.get("level", 0.0)) + trend, shape


def _gen_m(spec, rngs, labels):
    prm = spec.params
    clusters = prm["clusters"]
    if len(clusters) != spec.k:
        raise ValueError(f"family {spec.family} needs {spec.k} cluster blocks, got {len(clusters)}")
    period = int(prm.get("period", 12))
    sd = float(prm["noise_sd"])
    level_sd = float(prm.get("level_sd", 0.0))
    jitter = float(prm.get("amp_jitter", 0.0))
    parts = [_profile(c, spec.t, period) for c in clusters]
    X = np.empty((spec.n, spec.t))
    for i, lab in enumerate(labels):
        r = rngs[i + 1]
        base, shape = parts[lab - 1]
        u = level_sd * r.standard_normal()
        a = r.uniform(1.0 - jitter, 1.0 + jitter)
        X[i] = base + u + a * shape + sd * r.standard_normal(spec.t)
    return X


_GENERATORS = {"D": _gen_d, "C": _gen_c, "M": _gen_m, "MC": _gen_m}


def generate(spec: DatasetSpec) -> LabeledDataset:
    """Draw a labelled dataset; identical ``spec`` gives identical output."""
    rngs = _streams(spec)
    labels = _labels(spec)
    X = _GENERATORS[spec.family](spec, rngs, labels)
    return LabeledDataset(X, labels, spec)
