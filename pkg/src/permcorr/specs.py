"""JSON specs for measures and families, as consumed by the CLI."""

from __future__ import annotations

import json
from pathlib import Path

from . import families as fam
from .measures import (
    Measure, boltzmann_measure, fixed_point_measure, ig_measure, mallows_measure,
    middle_gap_measure, to_number, uniform_measure,
)
from .perm import parse_perm
from .permset import PermSet


class SpecError(ValueError):
    """A malformed measure or family description."""


def load_json_arg(text: str):
    """Inline JSON (starting with ``{`` or ``[``) or a path to a JSON file."""
    s = text.strip()
    try:
        if s.startswith(("{", "[")):
            return json.loads(s)
        return json.loads(Path(s).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read JSON from {text!r}: {exc}") from exc


def _require(obj: dict, *keys):
    missing = [k for k in keys if k not in obj]
    if missing:
        raise SpecError(f"spec {obj} is missing {missing}")
    return [obj[k] for k in keys]


def parse_measure(obj: dict, n: int, exact: bool | None = None) -> Measure:
    kind = obj.get("measure")
    try:
        if kind == "uniform":
            return uniform_measure(n, exact=exact is not False)
        if kind == "mallows":
            (q,) = _require(obj, "q")
            return mallows_measure(n, q, exact=exact)
        if kind == "ig":
            (dists,) = _require(obj, "dists")
            if len(dists) != n:
                raise SpecError(f"ig spec has {len(dists)} coordinates, expected {n}")
            return ig_measure([[to_number(p) for p in d] for d in dists], exact=exact)
        if kind == "boltzmann":
            x, v, q = _require(obj, "x", "V", "q")
            if len(x) != n:
                raise SpecError(f"boltzmann spec has {len(x)} points, expected {n}")
            return boltzmann_measure(x, v, q, exact=exact)
        if kind == "fixed_points":
            (q,) = _require(obj, "q")
            return fixed_point_measure(n, q, exact=exact)
        if kind == "middle_gap":
            (q,) = _require(obj, "q")
            return middle_gap_measure(n, q, exact=exact)
    except SpecError:
        raise
    except (ValueError, TypeError) as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown measure {kind!r}")


def parse_family(obj: dict, n: int) -> PermSet:
    kind = obj.get("family")
    try:
        if kind == "u_ij":
            i, j = _require(obj, "i", "j")
            return fam.u_ij(n, int(i), int(j))
        if kind == "layers_le":
            (k,) = _require(obj, "k")
            return fam.layers_le(n, int(k))
        if kind == "layer":
            (k,) = _require(obj, "k")
            return fam.layer(n, int(k))
        if kind == "t_band":
            (t,) = _require(obj, "t")
            return fam.t_band(n, int(t))
        if kind == "band_like":
            if "preset" in obj:
                preset, t = _require(obj, "preset", "t")
                return fam.band_like_preset(n, preset, to_number(t))
            (vectors,) = _require(obj, "vectors")
            if obj.get("validate", True) and not fam.validate_band_like(n, vectors):
                raise SpecError("displacement set is not closed as band-like requires")
            return fam.band_like(n, vectors)
        if kind == "seq_dom":
            w, t = _require(obj, "w", "t")
            return fam.seq_dominating(n, w, t)
        if kind == "seq_dom_prime":
            w, t = _require(obj, "w", "t")
            return fam.seq_dominating_prime(n, w, t)
        if kind == "prefix_count":
            u, v, w = _require(obj, "u", "v", "w")
            return fam.prefix_count_family(n, int(u), int(v), int(w))
        if kind == "thm2":
            alpha, beta = _require(obj, "alpha", "beta")
            side = str(obj.get("side", "A")).upper()
            a, b = fam.thm2_pair(n, alpha, beta)
            if side not in ("A", "B"):
                raise SpecError(f"thm2 side must be A or B, got {side!r}")
            return a if side == "A" else b
        if kind == "explicit":
            if "hex" in obj:
                return PermSet.from_hex(n, obj["hex"])
            (perms,) = _require(obj, "perms")
            return PermSet.from_perms(n, [parse_perm(p) if isinstance(p, str) else p for p in perms])
    except SpecError:
        raise
    except (ValueError, TypeError) as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown family {kind!r}")
