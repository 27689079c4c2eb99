"""Command-line pipeline: detection, search, diagnostics, training, sweeps,
and timing benchmarks.

All tabular outputs are tab-separated with a ``#``-prefixed header line.
Wall-clock numbers go to separate files from deterministic results, so
outputs of a rerun with the same config and seed compare byte-identical.
Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import community as comm
from . import infotheory as it
from .errors import CommaugError, ConfigError, DataFormatError
from .graph import Graph, load_dataset, save_dataset
from .model import MlpConfig, TrainReport, save_checkpoint, train
from .resolution import (
    ResolutionProfile,
    SearchConfig,
    adaptive_search,
    save_profile,
    select_by_qmin,
)
from .synth import SbmSpec, generate


@dataclass
class RunConfig:
    data: Path | None = None
    synth: SbmSpec | None = None
    search: SearchConfig = dataclasses.field(default_factory=SearchConfig)
    mlp: MlpConfig = dataclasses.field(default_factory=MlpConfig)
    d_c: int = 16
    nf: bool = False
    no_communities: bool = False
    seeds: tuple[int, ...] = (0,)
    out: Path = Path("out")
    reps: int = 5
    qmins: tuple[float, ...] = ()
    save_params: bool = False
    assert_monotone: bool = False

    def load_graph(self) -> Graph:
        if (self.data is None) == (self.synth is None):
            raise ConfigError("exactly one of --data and --synth is required")
        if self.synth is not None:
            return generate(self.synth)[0]
        return load_dataset(self.data)


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def parse_synth_spec(s: str) -> SbmSpec:
    """Parse ``n=2000,blocks=8,p_in=0.05,...`` into an SbmSpec."""
    kwargs = {}
    casts = {
        "n": int, "blocks": int, "seed": int,
        "p_in": float, "p_out": float, "alignment": float, "feature_noise": float,
        "label_signal": _parse_bool,
    }
    for tok in s.split(","):
        if not tok.strip():
            continue
        if "=" not in tok:
            raise ConfigError(f"bad synth token {tok!r}, expected key=value")
        key, val = tok.split("=", 1)
        key = key.strip()
        if key not in casts:
            raise ConfigError(f"unknown synth key {key!r}")
        kwargs[key] = casts[key](val.strip())
    return SbmSpec(**kwargs)


_CONFIG_KEYS = {
    "data": str, "synth": str, "out": str,
    "q_min": float, "delta_max": float, "gap_range": str, "max_iterations": int,
    "restarts": int, "resolutions": str, "seed": int, "seeds": str,
    "epochs": int, "batch": int, "hidden": int, "layers": int,
    "dropout": float, "lr": float, "task": str, "metric": str,
    "d_c": int, "nf": _parse_bool, "no_communities": _parse_bool, "reps": int,
}


def read_config_file(path) -> dict:
    """Flat key=value text; # comments and blank lines ignored."""
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = body.split("=", 1)
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](val.strip())
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}") from None
    return values


def _csv_floats(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in s.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {s!r}") from None


def _csv_ints(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in s.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {s!r}") from None


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config-file values, and CLI flags (flags win)."""
    values = read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(flag, key, default=None):
        v = getattr(args, flag, None)
        if v is not None:
            return v
        return values.get(key, default)

    gap_range = pick("gap_range", "gap_range")
    if isinstance(gap_range, str):
        parts = _csv_floats(gap_range)
        if len(parts) != 2:
            raise ConfigError("gap_range needs exactly two numbers a,b")
        gap_range = parts
    resolutions = pick("resolutions", "resolutions")
    if isinstance(resolutions, str):
        resolutions = _csv_floats(resolutions)
    seeds = pick("seeds", "seeds")
    if isinstance(seeds, str):
        seeds = _csv_ints(seeds)
    seed = int(pick("seed", "seed", 0))
    if seeds is None:
        seeds = (seed,)

    search = SearchConfig(
        q_min=float(pick("qmin", "q_min", 0.1)),
        delta_max=float(pick("delta_max", "delta_max", 0.2)),
        gap_range=tuple(gap_range) if gap_range else (0.03, 0.08),
        max_iterations=int(pick("max_iterations", "max_iterations", 50)),
        seed=seed,
        restarts=int(pick("restarts", "restarts", 1)),
        resolutions=tuple(resolutions) if resolutions else None,
    )
    mlp = MlpConfig(
        layers=int(pick("layers", "layers", 3)),
        hidden=int(pick("hidden", "hidden", 256)),
        dropout=float(pick("dropout", "dropout", 0.5)),
        lr=float(pick("lr", "lr", 1e-4)),
        epochs=int(pick("epochs", "epochs", 200)),
        batch=int(pick("batch", "batch", 128)),
        seed=seed,
        task=str(pick("task", "task", "single")),
        metric=pick("metric", "metric"),
    )

    synth = pick("synth", "synth")
    if isinstance(synth, str):
        synth = parse_synth_spec(synth)
    data = pick("data", "data")

    return RunConfig(
        data=Path(data) if data else None,
        synth=synth,
        search=search,
        mlp=mlp,
        d_c=int(pick("dc", "d_c", 16)),
        nf=bool(pick("nf", "nf", False)),
        no_communities=bool(pick("no_communities", "no_communities", False)),
        seeds=tuple(seeds),
        out=Path(pick("out", "out", "out")),
        reps=int(pick("reps", "reps", 5)),
        qmins=_csv_floats(args.qmins) if getattr(args, "qmins", None) else (),
        save_params=bool(getattr(args, "save_params", False)),
        assert_monotone=bool(getattr(args, "assert_monotone", False)),
    )


def _write_table(path: Path, header: str, rows, comments=()) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(f"# {header}")
    lines.extend("\t".join(str(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _profile_for(cfg: RunConfig, g: Graph) -> ResolutionProfile:
    if cfg.no_communities:
        return ResolutionProfile(entries=(), config=cfg.search)
    return adaptive_search(g, cfg.search)


# ---------------------------------------------------------------------------
# subcommands


def cmd_communities(cfg: RunConfig) -> int:
    if not cfg.search.resolutions:
        raise ConfigError("communities requires --resolutions g1,g2,...")
    g = cfg.load_graph()
    cfg.out.mkdir(parents=True, exist_ok=True)
    profile = adaptive_search(g, cfg.search)  # explicit list bypasses the search
    rows = []
    for i, entry in enumerate(profile.entries):
        fname = f"partition_{i:03d}.txt"
        comm.save_community(cfg.out / fname, entry)
        rows.append((repr(entry.gamma), repr(entry.Q), entry.K, fname))
    _write_table(cfg.out / "summary.tsv", "gamma\tQ\tK\tpartition_file", rows)
    for row in rows:
        print("\t".join(str(x) for x in row))
    return 0


def cmd_search(cfg: RunConfig) -> int:
    g = cfg.load_graph()
    profile = adaptive_search(g, cfg.search)
    save_profile(profile, cfg.out)
    diag = profile.diagnostics
    gaps = profile.gaps()
    rows = [
        (repr(a.gamma), repr(b.gamma), repr(abs(b.Q - a.Q)))
        for a, b in zip(profile.entries, profile.entries[1:])
    ]
    comments = [
        f"retained={len(profile)} mean_gap={profile.mean_gap()!r}",
        f"stalled={diag.stalled} duplicates={diag.duplicate_proposals} "
        f"tested={len(diag.tested)}",
    ]
    _write_table(cfg.out / "gaps.tsv", "gamma_lo\tgamma_hi\tgap", rows, comments)
    print(f"retained {len(profile)} resolutions, mean gap {profile.mean_gap():.6g}")
    if diag.stalled:
        print("warning: search stalled before reaching q_min", file=sys.stderr)
    for entry in profile.entries:
        print(f"{entry.gamma!r}\t{entry.Q!r}\t{entry.K}")
    return 0


def cmd_nmi_curve(cfg: RunConfig) -> int:
    g = cfg.load_graph()
    if g.y is None:
        raise DataFormatError("nmi-curve requires labels")
    labels = comm.from_labels(g.y)
    profile = _profile_for(cfg, g)
    h_l = it.entropy(labels)
    rows = []
    prev_i, prev_h = -np.inf, -np.inf
    monotone = True
    for entry in profile.entries:
        part = entry.partition
        i_val = it.mutual_information(labels, part)
        h_c = it.entropy(part)
        rows.append((
            repr(entry.gamma), repr(entry.Q), entry.K,
            repr(it.nmi(labels, part)), repr(i_val), repr(h_c), repr(h_l),
            repr(h_c + h_l),
        ))
        if i_val < prev_i - 1e-6 or h_c < prev_h - 1e-6:
            monotone = False
        prev_i, prev_h = i_val, h_c
    cfg.out.mkdir(parents=True, exist_ok=True)
    _write_table(
        cfg.out / "nmi_curve.tsv",
        "gamma\tQ\tK\tNMI\tI\tH_C\tH_L\tH_sum",
        rows,
        [f"monotone_IH={monotone}"],
    )
    for row in rows:
        print("\t".join(str(x) for x in row))
    if not monotone:
        msg = "I or H decreased along the resolution axis (approximate refinement)"
        if cfg.assert_monotone:
            raise CommaugError(msg)
        print(f"note: {msg}", file=sys.stderr)
    return 0


def _train_seeds(cfg: RunConfig, g: Graph, profile: ResolutionProfile):
    """One training run per seed on a shared profile."""
    reports: list[TrainReport] = []
    params_last = None
    for seed in cfg.seeds:
        mlp = dataclasses.replace(cfg.mlp, seed=seed)
        params, report = train(g, profile, mlp, nf=cfg.nf, d_c=cfg.d_c)
        reports.append(report)
        params_last = params
    return params_last, reports


def cmd_train(cfg: RunConfig) -> int:
    g = cfg.load_graph()
    t0 = time.perf_counter()
    profile = _profile_for(cfg, g)
    search_s = time.perf_counter() - t0
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_profile(profile, cfg.out / "profile")

    params, reports = _train_seeds(cfg, g, profile)
    for seed, report in zip(cfg.seeds, reports):
        _write_table(
            cfg.out / f"log_seed{seed}.tsv",
            "epoch\ttrain_loss\tval_metric",
            [(e, repr(l), repr(v)) for e, (l, v) in
             enumerate(zip(report.train_loss, report.val_metric))],
        )
    metrics = np.array([r.test_metric for r in reports])
    std = float(metrics.std(ddof=1)) if metrics.size > 1 else 0.0
    summary = [
        f"metric={reports[0].metric_name}",
        f"seeds={','.join(str(s) for s in cfg.seeds)}",
        f"resolutions={','.join(repr(e.gamma) for e in profile.entries)}",
        f"T={len(profile)}",
        f"nf={cfg.nf}",
        f"mean={float(metrics.mean())!r}",
        f"std={std!r}",
        *[f"seed{seed}={r.test_metric!r}" for seed, r in zip(cfg.seeds, reports)],
        *[f"best_epoch_seed{seed}={r.best_epoch}" for seed, r in zip(cfg.seeds, reports)],
    ]
    (cfg.out / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    _write_table(
        cfg.out / "timings.tsv",
        "seed\tpreprocessing_s\tper_epoch_s\tinference_s",
        [
            (seed, f"{search_s:.6f}", f"{r.timings['per_epoch_s']:.6f}",
             f"{r.timings['inference_s']:.6f}")
            for seed, r in zip(cfg.seeds, reports)
        ],
    )
    if cfg.save_params and params is not None:
        save_checkpoint(params, cfg.out / "checkpoint")
    print(f"test {reports[0].metric_name}: {metrics.mean()*100:.2f} "
          f"± {std*100:.2f} over {metrics.size} seed(s)")
    return 0


def cmd_sweep_qmin(cfg: RunConfig) -> int:
    if not cfg.qmins:
        raise ConfigError("sweep-qmin requires --qmins q1,q2,...")
    g = cfg.load_graph()
    base_search = dataclasses.replace(cfg.search, q_min=0.0)
    full = adaptive_search(g, base_search)  # Louvain runs once per gamma here
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_profile(full, cfg.out / "profile_full")
    rows = []
    for q_min in cfg.qmins:
        profile = select_by_qmin(full, q_min)
        _, reports = _train_seeds(cfg, g, profile)
        metrics = np.array([r.test_metric for r in reports])
        std = float(metrics.std(ddof=1)) if metrics.size > 1 else 0.0
        rows.append((repr(q_min), len(profile), repr(float(metrics.mean())), repr(std)))
        print(f"q_min={q_min:g}\tT={len(profile)}\t"
              f"{reports[0].metric_name}={metrics.mean()*100:.2f}±{std*100:.2f}")
    _write_table(cfg.out / "sweep_qmin.tsv", "q_min\tT\tmetric_mean\tmetric_std", rows)
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    g = cfg.load_graph()
    pre, per_epoch, infer = [], [], []
    for rep in range(cfg.reps):
        t0 = time.perf_counter()
        profile = _profile_for(cfg, g)
        pre.append(time.perf_counter() - t0)
        mlp = dataclasses.replace(cfg.mlp, seed=cfg.seeds[0] + rep)
        _, report = train(g, profile, mlp, nf=cfg.nf, d_c=cfg.d_c)
        per_epoch.append(report.timings["per_epoch_s"])
        infer.append(report.timings["inference_s"])

    def fmt(xs):
        xs = np.array(xs)
        std = xs.std(ddof=1) if xs.size > 1 else 0.0
        return f"{xs.mean():.6f}±{std:.6f}"

    cfg.out.mkdir(parents=True, exist_ok=True)
    _write_table(
        cfg.out / "bench.tsv",
        "preprocessing_s\tper_epoch_s\tinference_s",
        [(fmt(pre), fmt(per_epoch), fmt(infer))],
        [f"reps={cfg.reps}"],
    )
    print(f"preprocessing_s\t{fmt(pre)}")
    print(f"per_epoch_s\t{fmt(per_epoch)}")
    print(f"inference_s\t{fmt(infer)}")
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    if cfg.synth is None:
        raise ConfigError("synth requires --synth SPEC")
    g, blocks = generate(cfg.synth)
    save_dataset(g, cfg.out)
    comm.save_community(
        cfg.out / "planted.txt",
        comm.CommunityResult(gamma=float("nan"), partition=blocks, Q=float("nan")),
    )
    print(f"wrote n={g.n} m={g.m} dataset to {cfg.out}")
    return 0


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--data", help="dataset directory")
    p.add_argument("--synth", help="SBM spec, e.g. n=2000,blocks=8,p_in=0.05,p_out=0.005")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--seeds", help="comma-separated training seeds")
    p.add_argument("--qmin", type=float, help="minimum modularity threshold")
    p.add_argument("--delta-max", dest="delta_max", type=float, help="max modularity gap")
    p.add_argument("--gap-range", dest="gap_range", help="extrapolation drop range a,b")
    p.add_argument("--max-iterations", dest="max_iterations", type=int)
    p.add_argument("--restarts", type=int, help="Louvain restarts per resolution")
    p.add_argument("--resolutions", help="explicit resolution list, bypasses search")
    p.add_argument("--dc", type=int, help="community embedding width")
    p.add_argument("--nf", action="store_const", const=True, help="append neighbor means to X")
    p.add_argument("--no-communities", dest="no_communities", action="store_const",
                   const=True, help="feature-only model")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--task", choices=["single", "multi"])
    p.add_argument("--metric", choices=["accuracy", "roc_auc", "f1_micro"])
    p.add_argument("--reps", type=int, help="benchmark repetitions")


_COMMANDS = {
    "communities": cmd_communities,
    "search": cmd_search,
    "nmi-curve": cmd_nmi_curve,
    "train": cmd_train,
    "sweep-qmin": cmd_sweep_qmin,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commaug",
        description="multi-resolution community features + MLP node classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
        if name == "sweep-qmin":
            p.add_argument("--qmins", help="comma-separated thresholds")
        if name == "train":
            p.add_argument("--save-params", dest="save_params", action="store_true")
        if name == "nmi-curve":
            p.add_argument("--assert-monotone", dest="assert_monotone", action="store_true")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_run_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataFormatError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except CommaugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
