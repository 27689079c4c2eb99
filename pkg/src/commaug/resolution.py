"""Adaptive search over the Louvain resolution parameter.

Starting from resolutions 0.5 and 1.0, the loop alternates two proposal
rules: if some consecutive pair of tested resolutions differs in modularity
by more than ``delta_max``, their midpoint is inserted (interpolation);
otherwise a new resolution is extrapolated past the current maximum, sized
so the locally estimated slope predicts a modularity drop drawn uniformly
from ``gap_range``. The loop stops when the modularity at the largest
tested resolution reaches ``q_min``, when no new resolution can be
produced, or after ``max_iterations`` proposals. Retained are exactly the
tested resolutions with Q >= q_min.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .community import CommunityResult, load_community, louvain, save_community
from .errors import ConfigError, DataFormatError, SearchStalledWarning
from .graph import Graph

_SLOPE_FLOOR = 1e-12
_DUP_TOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    q_min: float = 0.1
    delta_max: float = 0.2
    gap_range: tuple[float, float] = (0.03, 0.08)
    max_iterations: int = 50
    seed: int = 0
    restarts: int = 1
    resolutions: tuple[float, ...] | None = None  # explicit list bypassing the search

    def __post_init__(self):
        a, b = self.gap_range
        if not (0.0 <= self.q_min <= 1.0):
            raise ConfigError(f"q_min must be in [0, 1], got {self.q_min}")
        if self.delta_max <= 0:
            raise ConfigError(f"delta_max must be > 0, got {self.delta_max}")
        if not (0 < a <= b):
            raise ConfigError(f"gap_range must satisfy 0 < a <= b, got {self.gap_range}")
        if self.max_iterations <= 0:
            raise ConfigError("max_iterations must be > 0")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.resolutions is not None:
            if len(self.resolutions) == 0 or any(r <= 0 for r in self.resolutions):
                raise ConfigError("explicit resolutions must be a non-empty list of positives")


@dataclass
class SearchDiagnostics:
    tested: list[CommunityResult]
    stalled: bool = False
    duplicate_proposals: int = 0
    iterations: int = 0


@dataclass(frozen=True)
class ResolutionProfile:
    """Retained (gamma, Q, partition) triples, gamma strictly ascending."""

    entries: tuple[CommunityResult, ...]
    config: SearchConfig
    diagnostics: SearchDiagnostics | None = None

    def __post_init__(self):
        gammas = [e.gamma for e in self.entries]
        if any(g2 <= g1 for g1, g2 in zip(gammas, gammas[1:])):
            raise ConfigError("profile resolutions must be strictly increasing")

    def __len__(self):
        return len(self.entries)

    @property
    def gammas(self) -> list[float]:
        return [e.gamma for e in self.entries]

    def gaps(self) -> list[float]:
        """|Q(g2) - Q(g1)| over consecutive retained pairs."""
        qs = [e.Q for e in self.entries]
        return [abs(b - a) for a, b in zip(qs, qs[1:])]

    def mean_gap(self) -> float:
        gs = self.gaps()
        return float(np.mean(gs)) if gs else 0.0


def estimate_slope(history) -> float:
    """Finite-difference slope of Q against gamma over the two largest gammas."""
    if len(history) < 2:
        raise ValueError("slope needs at least two (gamma, Q) points")
    pts = sorted(history)
    (g1, q1), (g2, q2) = pts[-2], pts[-1]
    if g2 == g1:
        raise ValueError("slope needs distinct gamma values")
    return (q2 - q1) / (g2 - g1)


def _gamma_seed(master: int, gamma: float) -> int:
    bits = int(np.float64(gamma).view(np.uint64))
    return int(np.random.SeedSequence([master, bits]).generate_state(1)[0])


def adaptive_search(g: Graph, cfg: SearchConfig) -> ResolutionProfile:
    """Run the adaptive resolution search (or the explicit list, if given).

    Each resolution gets its own Louvain seed derived from (cfg.seed, gamma),
    so reruns with the same config reproduce the identical profile.
    """
    if g.n < 2 or g.m < 1:
        raise DataFormatError("search needs a graph with at least 2 nodes and 1 edge")

    if cfg.resolutions is not None:
        tested = {
            float(r): louvain(g, float(r), _gamma_seed(cfg.seed, float(r)), cfg.restarts)
            for r in cfg.resolutions
        }
        entries = tuple(tested[r] for r in sorted(tested))
        diag = SearchDiagnostics(tested=list(entries), iterations=0)
        return ResolutionProfile(entries=entries, config=cfg, diagnostics=diag)

    a, b = cfg.gap_range
    rng = np.random.default_rng([cfg.seed, 0x647261775F64656C])  # extrapolation draws
    tested: dict[float, CommunityResult] = {}
    for r in (0.5, 1.0):
        tested[r] = louvain(g, r, _gamma_seed(cfg.seed, r), cfg.restarts)

    diag = SearchDiagnostics(tested=[])
    while diag.iterations < cfg.max_iterations:
        gammas = sorted(tested)
        tau = tested[gammas[-1]].Q
        if tau <= cfg.q_min:
            break

        new_r = None
        for g1, g2 in zip(gammas, gammas[1:]):
            if abs(tested[g2].Q - tested[g1].Q) > cfg.delta_max:
                new_r = (g1 + g2) / 2.0  # interpolate: first pair over the bound
                break
        if new_r is None:  # extrapolate past the frontier
            slope = estimate_slope([(r, res.Q) for r, res in tested.items()])
            if abs(slope) < _SLOPE_FLOOR:
                diag.stalled = True
                warnings.warn(
                    "resolution search stalled: flat modularity profile",
                    SearchStalledWarning,
                    stacklevel=2,
                )
                break
            target = tau - rng.uniform(a, b)
            new_r = gammas[-1] + (target - tau) / slope

        if not np.isfinite(new_r) or new_r <= 0:
            diag.stalled = True
            warnings.warn(
                f"resolution search stalled: proposed gamma {new_r}",
                SearchStalledWarning,
                stacklevel=2,
            )
            break
        if any(abs(new_r - r) <= _DUP_TOL for r in tested):
            diag.duplicate_proposals += 1
            break  # no new resolution produced

        diag.iterations += 1
        tested[new_r] = louvain(g, new_r, _gamma_seed(cfg.seed, new_r), cfg.restarts)

    diag.tested = [tested[r] for r in sorted(tested)]
    entries = tuple(res for res in diag.tested if res.Q >= cfg.q_min)
    return ResolutionProfile(entries=entries, config=cfg, diagnostics=diag)


def select_by_qmin(profile: ResolutionProfile, q_min: float) -> ResolutionProfile:
    """Filter retained entries to Q >= q_min without re-running Louvain."""
    entries = tuple(e for e in profile.entries if e.Q >= q_min)
    cfg = dataclasses.replace(profile.config, q_min=q_min)
    return ResolutionProfile(entries=entries, config=cfg, diagnostics=profile.diagnostics)


# ---------------------------------------------------------------------------
# serialization: profile.tsv + one partition file per retained resolution


def save_profile(profile: ResolutionProfile, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    cfg = profile.config
    lines = [
        f"# q_min={cfg.q_min!r} delta_max={cfg.delta_max!r} "
        f"gap_range={cfg.gap_range[0]!r},{cfg.gap_range[1]!r} "
        f"max_iterations={cfg.max_iterations} seed={cfg.seed} restarts={cfg.restarts}",
        "# gamma\tQ\tK\tpartition_file",
    ]
    for i, entry in enumerate(profile.entries):
        fname = f"partition_{i:03d}.txt"
        save_community(d / fname, entry)
        lines.append(f"{entry.gamma!r}\t{entry.Q!r}\t{entry.K}\t{fname}")
    path = d / "profile.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_profile(directory) -> ResolutionProfile:
    d = Path(directory)
    path = d / "profile.tsv"
    if not path.exists():
        raise DataFormatError("no profile.tsv in directory", d)
    cfg_kwargs = {}
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if line.startswith("# q_min="):
            for tok in line.lstrip("# ").split():
                key, val = tok.split("=", 1)
                if key == "gap_range":
                    lo, hi = val.split(",")
                    cfg_kwargs[key] = (float(lo), float(hi))
                elif key in ("max_iterations", "seed", "restarts"):
                    cfg_kwargs[key] = int(val)
                else:
                    cfg_kwargs[key] = float(val)
        elif line.startswith("#") or not line.strip():
            continue
        else:
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataFormatError("expected gamma\tQ\tK\tpartition_file", path, lineno)
            entry = load_community(d / parts[3])
            entries.append(entry)
    return ResolutionProfile(entries=tuple(entries), config=SearchConfig(**cfg_kwargs))
