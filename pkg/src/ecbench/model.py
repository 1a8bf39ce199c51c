"""Synthetic performance models: a deterministic structure plus seeded noise.

The noise stream is counter-based (splitmix64 mixing + Box-Muller), so each
replicate's perturbation is a pure function of (noise seed, ec index, object
id, replicate ordinal). That makes measurements bit-reproducible across runs
and platforms, and lets the Monte Carlo oracle evaluate whole plans as single
vectorized numpy expressions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SpaceError
from .space import ConfigSpace, Configuration, ObjectConfig

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

MIN_DURATION = 1e-9
NOISE_CLIP_SIGMA = 6.0


def _mix64(x: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """splitmix64 finalizer; full avalanche on 64-bit inputs."""
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def _object_key(object_id: str) -> np.uint64:
    digest = hashlib.sha256(object_id.encode("utf-8")).digest()
    return np.uint64(int.from_bytes(digest[:8], "little"))


def counter_normal(seed: int, ec_index: np.ndarray, object_id: str,
                   replicate: np.ndarray) -> np.ndarray:
    """Standard-normal draws addressed by (seed, ec index, object, replicate),
    truncated at +/- NOISE_CLIP_SIGMA."""
    ec = np.asarray(ec_index, dtype=np.uint64)
    rep = np.asarray(replicate, dtype=np.uint64)
    h = _mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    h = _mix64(h ^ ec)
    h = _mix64(h ^ _object_key(object_id))
    h = _mix64(h ^ rep)
    u1 = ((_mix64(h) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    u2 = ((_mix64(h ^ _GOLDEN) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    return np.clip(z, -NOISE_CLIP_SIGMA, NOISE_CLIP_SIGMA)


@dataclass(frozen=True)
class Interaction:
    factor_a: str
    factor_b: str
    table: tuple[tuple[str, str, float], ...]  # (level label a, level label b, seconds)


@dataclass(frozen=True)
class SyntheticModel:
    """Additive performance surface: per-stratum base + per-factor effects
    + optional pairwise interactions + per-object offset + Gaussian noise.

    `object_effects` adds object-specific per-factor terms on top of the
    shared tables; without them the difference between two objects would be
    constant over the whole space and sampling designs could never disagree.
    """

    stratum_factor: str
    base: tuple[tuple[str, float], ...]  # (stratum level label, seconds)
    effects: tuple[tuple[str, tuple[tuple[str, float], ...]], ...] = ()
    interactions: tuple[Interaction, ...] = ()
    object_offsets: tuple[tuple[str, float], ...] = ()
    object_effects: tuple[
        tuple[str, tuple[tuple[str, tuple[tuple[str, float], ...]], ...]], ...
    ] = ()
    sigma: float = 0.0
    noise_seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise SpaceError("noise sigma must be non-negative")

    def offset_of(self, object_id: str) -> float:
        for oid, off in self.object_offsets:
            if oid == object_id:
                return off
        return 0.0

    def effects_of(self, object_id: str):
        for oid, eff in self.object_effects:
            if oid == object_id:
                return eff
        return ()

    def compile(self, space: ConfigSpace) -> "CompiledModel":
        return CompiledModel(self, space)

    def to_dict(self) -> dict:
        return {
            "stratum_factor": self.stratum_factor,
            "base": {k: v for k, v in self.base},
            "effects": {f: {k: v for k, v in tab} for f, tab in self.effects},
            "interactions": [
                {
                    "factors": [it.factor_a, it.factor_b],
                    "table": [[a, b, v] for a, b, v in it.table],
                }
                for it in self.interactions
            ],
            "object_offsets": {k: v for k, v in self.object_offsets},
            "object_effects": {
                oid: {f: {k: v for k, v in tab} for f, tab in eff}
                for oid, eff in self.object_effects
            },
            "sigma": self.sigma,
            "noise_seed": self.noise_seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SyntheticModel":
        return cls(
            stratum_factor=doc["stratum_factor"],
            base=tuple(doc["base"].items()),
            effects=tuple(
                (f, tuple(tab.items())) for f, tab in doc.get("effects", {}).items()
            ),
            interactions=tuple(
                Interaction(
                    factor_a=it["factors"][0],
                    factor_b=it["factors"][1],
                    table=tuple((a, b, v) for a, b, v in it["table"]),
                )
                for it in doc.get("interactions", [])
            ),
            object_offsets=tuple(doc.get("object_offsets", {}).items()),
            object_effects=tuple(
                (oid, tuple((f, tuple(tab.items())) for f, tab in eff.items()))
                for oid, eff in doc.get("object_effects", {}).items()
            ),
            sigma=doc.get("sigma", 0.0),
            noise_seed=doc.get("noise_seed", 0),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SyntheticModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


class CompiledModel:
    """Model bound to a space: effect tables turned into per-level-index
    numpy vectors for vectorized evaluation over arrays of ec indices."""

    def __init__(self, model: SyntheticModel, space: ConfigSpace):
        self.model = model
        self.space = space
        self._radices = np.array(
            [len(f.levels) for f in space.factors], dtype=np.int64
        )
        strat = space.factor(model.stratum_factor)
        base_map = dict(model.base)
        try:
            self._base = np.array(
                [base_map[lab] for lab in strat.levels], dtype=np.float64
            )
        except KeyError as e:
            raise SpaceError(f"model base missing stratum level {e}") from None
        self._strat_pos = space.factor_position(model.stratum_factor)

        self._effect_vectors: list[tuple[int, np.ndarray]] = []
        for fname, table in model.effects:
            f = space.factor(fname)
            tmap = dict(table)
            for lab in tmap:
                if lab not in f.levels:
                    raise SpaceError(
                        f"model effect references unknown level {lab!r} "
                        f"of factor {fname!r}"
                    )
            try:
                vec = np.array([tmap[lab] for lab in f.levels], dtype=np.float64)
            except KeyError as e:
                raise SpaceError(
                    f"model effect table for factor {fname!r} misses level {e}"
                ) from None
            self._effect_vectors.append((space.factor_position(fname), vec))

        # object-specific deltas are sparse: unlisted levels contribute 0
        self._object_effect_vectors: dict[str, list[tuple[int, np.ndarray]]] = {}
        for oid, eff in model.object_effects:
            vecs = []
            for fname, table in eff:
                f = space.factor(fname)
                tmap = dict(table)
                for lab in tmap:
                    if lab not in f.levels:
                        raise SpaceError(
                            f"object effect references unknown level {lab!r} "
                            f"of factor {fname!r}"
                        )
                vec = np.array(
                    [tmap.get(lab, 0.0) for lab in f.levels], dtype=np.float64
                )
                vecs.append((space.factor_position(fname), vec))
            self._object_effect_vectors[oid] = vecs

        self._interaction_mats: list[tuple[int, int, np.ndarray]] = []
        for it in model.interactions:
            fa, fb = space.factor(it.factor_a), space.factor(it.factor_b)
            mat = np.zeros((len(fa.levels), len(fb.levels)))
            for la, lb, val in it.table:
                if la not in fa.levels or lb not in fb.levels:
                    raise SpaceError(
                        f"interaction references unknown level pair ({la!r}, {lb!r})"
                    )
                mat[fa.levels.index(la), fb.levels.index(lb)] = val
            self._interaction_mats.append(
                (space.factor_position(it.factor_a),
                 space.factor_position(it.factor_b), mat)
            )

    def decode_levels(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized mixed-radix decode; shape (n_factors, len(indices))."""
        idx = np.asarray(indices, dtype=np.int64)
        out = np.empty((len(self._radices), idx.size), dtype=np.int64)
        rem = idx.copy()
        for pos in range(len(self._radices) - 1, -1, -1):
            m = self._radices[pos]
            out[pos] = rem % m
            rem //= m
        return out

    def deterministic_values(self, indices: np.ndarray, object_id: str) -> np.ndarray:
        """Noise-free model value at each index (the per-point true value)."""
        levels = self.decode_levels(indices)
        vals = self._base[levels[self._strat_pos]].copy()
        for pos, vec in self._effect_vectors:
            vals += vec[levels[pos]]
        for pa, pb, mat in self._interaction_mats:
            vals += mat[levels[pa], levels[pb]]
        for pos, vec in self._object_effect_vectors.get(object_id, ()):
            vals += vec[levels[pos]]
        vals += self.model.offset_of(object_id)
        return vals

    def noisy_values(self, indices: np.ndarray, object_id: str,
                     replicate: np.ndarray, noise_seed: int | None = None) -> np.ndarray:
        det = self.deterministic_values(indices, object_id)
        if self.model.sigma == 0.0:
            return np.maximum(det, MIN_DURATION)
        seed = self.model.noise_seed if noise_seed is None else noise_seed
        z = counter_normal(seed, np.asarray(indices), object_id,
                           np.asarray(replicate))
        return np.maximum(det + self.model.sigma * z, MIN_DURATION)

    def validate_positive(self, object_ids: list[str], sample: int = 10000,
                          seed: int = 0) -> None:
        """Check predicted time > 0 over the space, by enumeration when small
        enough, otherwise by uniform sampling."""
        card = self.space.cardinality
        if card <= 10**6:
            indices = np.arange(card, dtype=np.int64)
        else:
            rng = np.random.Generator(np.random.PCG64(seed))
            indices = rng.integers(0, min(card, 2**62), size=sample)
        worst_noise = NOISE_CLIP_SIGMA * self.model.sigma
        for oid in object_ids:
            det = self.deterministic_values(indices, oid)
            if np.any(det - worst_noise <= 0):
                raise SpaceError(
                    f"model predicts non-positive duration for object {oid!r}"
                )


def synth_time(model: SyntheticModel, space: ConfigSpace, obj: ObjectConfig,
               ec: Configuration, replicate_ordinal: int) -> float:
    """Scalar entry point; same numeric path as the vectorized evaluator."""
    compiled = model.compile(space)
    val = compiled.noisy_values(
        np.array([ec.index], dtype=np.int64), obj.object_id,
        np.array([replicate_ordinal], dtype=np.int64),
    )
    return float(val[0])
