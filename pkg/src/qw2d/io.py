"""Run configuration and the CSV/JSON file formats."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coin import CoinError, CoinParameters, coin_from_dict
from .evolution import (
    DEFAULT_MEMORY_CAP,
    AmplitudeField,
    InitialState,
    NotNormalizedState,
    ProbabilityGrid,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "load_config",
    "fmt",
    "write_csv",
    "write_json",
    "write_dat",
    "write_snapshot",
    "read_snapshot",
    "write_distribution",
    "read_distribution",
    "write_entropy_csv",
    "read_entropy_csv",
    "ENTROPY_COLUMNS",
]

ENTROPY_COLUMNS = [
    "n", "s_c", "s_shannon", "s_L", "s_R", "s_D", "s_U",
    "eig1", "eig2", "eig3", "eig4", "normL", "normR", "normD", "normU",
]
SNAPSHOT_COLUMNS = ["x", "y", "reL", "imL", "reR", "imR", "reD", "imD", "reU", "imU"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    coin: CoinParameters
    phi: InitialState
    n_max: int
    quadrature_n: int = 128
    window: float = 0.5
    out: Path | None = None
    memory_cap: int = DEFAULT_MEMORY_CAP
    snapshots: tuple[int, ...] = ()
    raw: dict = field(default_factory=dict, compare=False)


def parse_config(doc: dict) -> RunConfig:
    """Validate a config mapping; errors name the offending field."""
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a JSON object")
    try:
        coin = coin_from_dict(doc["coin"])
    except KeyError:
        raise ConfigError("coin: missing") from None
    except (CoinError, TypeError, ValueError) as exc:
        raise ConfigError(f"coin: {exc}") from None

    phi_raw = doc.get("phi")
    if not isinstance(phi_raw, list) or len(phi_raw) != 4:
        raise ConfigError("phi: expected 4 [re, im] pairs in order L, R, D, U")
    try:
        comps = [complex(float(p[0]), float(p[1])) for p in phi_raw]
        phi = InitialState.from_vector(comps)
    except NotNormalizedState as exc:
        raise ConfigError(f"phi: normalization invariant violated: {exc}") from None
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"phi: {exc}") from None

    def integer(key, default=None, minimum=None):
        v = doc.get(key, default)
        if v is None:
            raise ConfigError(f"{key}: missing")
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{key}: expected an integer, got {v!r}")
        if minimum is not None and v < minimum:
            raise ConfigError(f"{key}: must be >= {minimum}, got {v}")
        return v

    n_max = integer("n_max", minimum=1)
    quad_n = integer("quadrature_n", 128, minimum=8)
    cap = integer("memory_cap", DEFAULT_MEMORY_CAP, minimum=1)
    window = doc.get("window", 0.5)
    if not isinstance(window, (int, float)) or not 0.0 < float(window) <= 1.0:
        raise ConfigError(f"window: expected a fraction in (0, 1], got {window!r}")
    snaps = doc.get("snapshots", [n_max])
    if not isinstance(snaps, list) or not all(isinstance(s, int) and 0 <= s for s in snaps):
        raise ConfigError("snapshots: expected a list of non-negative integers")
    out = doc.get("out")
    return RunConfig(
        coin=coin,
        phi=phi,
        n_max=n_max,
        quadrature_n=quad_n,
        window=float(window),
        out=Path(out) if out else None,
        memory_cap=cap,
        snapshots=tuple(sorted(set(snaps))),
        raw=doc,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(doc)


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return "%.17g" % v


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_dat(path: Path, header: list[str], rows) -> None:
    """Whitespace-separated columns with a ``#`` header, as np.loadtxt expects."""
    lines = ["# " + " ".join(header)]
    lines += [" ".join(fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if not math.isfinite(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(_clean(obj), indent=2) + "\n")


def _parity_sites(n: int):
    for x in range(-n, n + 1):
        for y in range(-n, n + 1):
            if (x + y + n) % 2 == 0:
                yield x, y


def write_snapshot(path: Path, fld: AmplitudeField, coin: CoinParameters, phi: InitialState) -> Path:
    """Amplitude CSV over the even-parity sites plus a ``.json`` sidecar."""
    path = Path(path)
    a = fld.amplitudes
    n = fld.n
    rows = []
    for x, y in _parity_sites(n):
        v = a[:, x + n, y + n]
        rows.append([x, y] + [t for z in v for t in (z.real, z.imag)])
    write_csv(path, SNAPSHOT_COLUMNS, rows)
    sidecar = path.with_suffix(".json")
    write_json(sidecar, {"n": n, "coin": coin.to_dict(), "phi": phi.to_list(), "norm": fld.norm()})
    return sidecar


def read_snapshot(path: Path) -> AmplitudeField:
    """Reload an amplitude snapshot and re-check norm and parity."""
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    n = int(meta["n"])
    amps = np.zeros((4, 2 * n + 1, 2 * n + 1), dtype=np.complex128)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SNAPSHOT_COLUMNS:
            raise ValueError(f"unexpected snapshot columns {reader.fieldnames}")
        for row in reader:
            x, y = int(row["x"]), int(row["y"])
            if (x + y + n) % 2:
                raise ValueError(f"site ({x}, {y}) has the wrong parity for n={n}")
            for c, ch in enumerate("LRDU"):
                amps[c, x + n, y + n] = complex(float(row["re" + ch]), float(row["im" + ch]))
    fld = AmplitudeField(n, amps)
    if abs(fld.norm() - 1.0) > 1e-10:
        raise ValueError(f"snapshot norm {fld.norm()!r} differs from 1")
    return fld


def write_distribution(path: Path, grid: ProbabilityGrid) -> None:
    n = grid.n
    rows = [[x, y, grid.p[x + n, y + n]] for x, y in _parity_sites(n)]
    write_csv(Path(path), ["x", "y", "p"], rows)


def read_distribution(path: Path, n: int) -> ProbabilityGrid:
    p = np.zeros((2 * n + 1, 2 * n + 1))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            x, y, v = int(row["x"]), int(row["y"]), float(row["p"])
            if v < 0:
                raise ValueError(f"negative probability at ({x}, {y})")
            p[x + n, y + n] = v
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"distribution sums to {p.sum()!r}")
    return ProbabilityGrid(n, p)


def write_entropy_csv(path: Path, series) -> None:
    norms = series.norms
    rows = (
        [series.n[k], series.s_c[k], series.s_shannon[k], *series.s_w[k], *series.eigs[k], *norms[k]]
        for k in range(len(series.n))
    )
    write_csv(Path(path), ENTROPY_COLUMNS, rows)


def read_entropy_csv(path: Path) -> list[dict]:
    """Reload entropy rows and check their bounds."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ENTROPY_COLUMNS:
            raise ValueError(f"unexpected entropy columns {reader.fieldnames}")
        for row in reader:
            rec = {k: (int(v) if k == "n" else float(v)) for k, v in row.items()}
            if not -1e-12 <= rec["s_c"] <= 2.0 + 1e-12:
                raise ValueError(f"s_c out of [0, 2] at n={rec['n']}")
            if rec["s_shannon"] < -1e-12:
                raise ValueError(f"negative Shannon entropy at n={rec['n']}")
            if abs(sum(rec[f"norm{c}"] for c in "LRDU") - 1.0) > 1e-10:
                raise ValueError(f"norms do not sum to 1 at n={rec['n']}")
            out.append(rec)
    return out
