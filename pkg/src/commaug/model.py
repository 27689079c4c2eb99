"""MLP classifier over the augmented design, trained jointly with the
community projections.

Hidden layers apply affine -> LayerNorm -> exact-erf GELU -> inverted
dropout; the final layer is affine to the class logits. The task link
(softmax or elementwise sigmoid) lives in the loss and metric code, not in
the forward pass. Optimization is Adam on mini-batches of seed-shuffled
training nodes; the projection rows receive scatter-added gradients from
their column block, so community embeddings train with the classifier.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .errors import ConfigError, TrainingDivergedError
from .features import AugmentedDesign, ProjectionParams, init_projection
from .graph import Graph, neighbor_mean_features
from .metrics import accuracy, f1_micro, roc_auc
from .resolution import ResolutionProfile

_LN_EPS = 1e-5
_ADAM_B1, _ADAM_B2, _ADAM_EPS = 0.9, 0.999, 1e-8
_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class MlpConfig:
    layers: int = 3
    hidden: int = 256
    dropout: float = 0.5
    lr: float = 1e-4
    epochs: int = 200
    batch: int = 128
    seed: int = 0
    task: str = "single"  # single-label softmax or multi-label sigmoid
    metric: str | None = None  # accuracy | roc_auc | f1_micro; None = by task

    def __post_init__(self):
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if not (0.0 <= self.dropout < 1.0):
            raise ConfigError("dropout must be in [0, 1)")
        if self.lr <= 0:
            raise ConfigError("lr must be > 0")
        if self.epochs < 1 or self.batch < 1:
            raise ConfigError("epochs and batch must be >= 1")
        if self.task not in ("single", "multi"):
            raise ConfigError(f"unknown task {self.task!r}")
        if self.metric not in (None, "accuracy", "roc_auc", "f1_micro"):
            raise ConfigError(f"unknown metric {self.metric!r}")

    @property
    def metric_name(self) -> str:
        if self.metric is not None:
            return self.metric
        return "f1_micro" if self.task == "multi" else "accuracy"


@dataclass
class MlpParams:
    linear_w: list[np.ndarray]
    linear_b: list[np.ndarray]
    ln_scale: list[np.ndarray]
    ln_shift: list[np.ndarray]
    dropout: float
    projections: ProjectionParams | None = None

    def copy(self) -> "MlpParams":
        return MlpParams(
            linear_w=[w.copy() for w in self.linear_w],
            linear_b=[b.copy() for b in self.linear_b],
            ln_scale=[s.copy() for s in self.ln_scale],
            ln_shift=[s.copy() for s in self.ln_shift],
            dropout=self.dropout,
            projections=self.projections.copy() if self.projections else None,
        )

    def flat(self) -> list[np.ndarray]:
        """All trainable arrays in a fixed order (projections last)."""
        out = self.linear_w + self.linear_b + self.ln_scale + self.ln_shift
        if self.projections is not None:
            out = out + self.projections.weights
        return out


def init_mlp(
    in_width: int,
    n_classes: int,
    cfg: MlpConfig,
    projections: ProjectionParams | None = None,
) -> MlpParams:
    """Uniform +-1/sqrt(fan_in) affine init; LayerNorm starts at identity."""
    rng = np.random.default_rng([cfg.seed, 0x696E6974])
    dims = [in_width] + [cfg.hidden] * (cfg.layers - 1) + [n_classes]
    lw, lb, lns, lnb = [], [], [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        lw.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        lb.append(rng.uniform(-bound, bound, size=fan_out))
    for _ in range(cfg.layers - 1):
        lns.append(np.ones(cfg.hidden))
        lnb.append(np.zeros(cfg.hidden))
    return MlpParams(
        linear_w=lw, linear_b=lb, ln_scale=lns, ln_shift=lnb,
        dropout=cfg.dropout, projections=projections,
    )


def _gelu(x):
    return 0.5 * x * (1.0 + erf(x * _INV_SQRT2))


def _gelu_grad(x):
    return 0.5 * (1.0 + erf(x * _INV_SQRT2)) + x * _INV_SQRT2PI * np.exp(-0.5 * x * x)


def _forward_cached(params: MlpParams, Z, train_mode, rng):
    """Forward pass keeping per-layer intermediates for backprop."""
    L = len(params.linear_w)
    a = Z
    caches = []
    for layer in range(L - 1):
        h = a @ params.linear_w[layer] + params.linear_b[layer]
        mu = h.mean(axis=1, keepdims=True)
        var = h.var(axis=1, keepdims=True)
        inv_std = 1.0 / np.sqrt(var + _LN_EPS)
        xhat = (h - mu) * inv_std
        u = xhat * params.ln_scale[layer] + params.ln_shift[layer]
        gact = _gelu(u)
        if train_mode and params.dropout > 0.0:
            mask = (rng.random(gact.shape) >= params.dropout).astype(np.float64)
            out = gact * mask / (1.0 - params.dropout)
        else:
            mask = None
            out = gact
        caches.append((a, xhat, inv_std, u, mask))
        a = out
    logits = a @ params.linear_w[-1] + params.linear_b[-1]
    caches.append((a,))
    return logits, caches


def forward(params: MlpParams, Z_batch, train_mode: bool = False, seed: int = 0):
    """Logits for a batch; dropout is active only in train mode."""
    if Z_batch.shape[1] != params.linear_w[0].shape[0]:
        raise ValueError(
            f"input width {Z_batch.shape[1]} != model width {params.linear_w[0].shape[0]}"
        )
    rng = np.random.default_rng(seed) if train_mode else None
    logits, _ = _forward_cached(params, Z_batch, train_mode, rng)
    return logits


def _backward(params: MlpParams, caches, dlogits):
    """Gradients for every parameter array plus the input block."""
    L = len(params.linear_w)
    g_w = [None] * L
    g_b = [None] * L
    g_ls = [None] * (L - 1)
    g_lb = [None] * (L - 1)

    a_last = caches[-1][0]
    g_w[-1] = a_last.T @ dlogits
    g_b[-1] = dlogits.sum(axis=0)
    da = dlogits @ params.linear_w[-1].T

    for layer in range(L - 2, -1, -1):
        a_in, xhat, inv_std, u, mask = caches[layer]
        if mask is not None:
            da = da * mask / (1.0 - params.dropout)
        du = da * _gelu_grad(u)
        g_ls[layer] = (du * xhat).sum(axis=0)
        g_lb[layer] = du.sum(axis=0)
        dxhat = du * params.ln_scale[layer]
        dh = (
            dxhat
            - dxhat.mean(axis=1, keepdims=True)
            - xhat * (dxhat * xhat).mean(axis=1, keepdims=True)
        ) * inv_std
        g_w[layer] = a_in.T @ dh
        g_b[layer] = dh.sum(axis=0)
        da = dh @ params.linear_w[layer].T

    return g_w, g_b, g_ls, g_lb, da


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _loss_and_grad(logits, y, task):
    """Mean loss over the batch and its gradient w.r.t. the logits."""
    b = logits.shape[0]
    if task == "single":
        shifted = logits - logits.max(axis=1, keepdims=True)
        logsumexp = np.log(np.exp(shifted).sum(axis=1)) + logits.max(axis=1)
        loss = float(np.mean(logsumexp - logits[np.arange(b), y]))
        grad = _softmax(logits)
        grad[np.arange(b), y] -= 1.0
        return loss, grad / b
    probs = _sigmoid(logits)
    eps = 1e-12
    loss = float(
        -np.mean(np.sum(y * np.log(probs + eps) + (1 - y) * np.log(1 - probs + eps), axis=1))
    )
    return loss, (probs - y) / b


class _Adam:
    def __init__(self, arrays, lr):
        self.lr = lr
        self.m = [np.zeros_like(a) for a in arrays]
        self.v = [np.zeros_like(a) for a in arrays]
        self.t = 0

    def step(self, arrays, grads):
        self.t += 1
        bc1 = 1.0 - _ADAM_B1**self.t
        bc2 = 1.0 - _ADAM_B2**self.t
        for a, g, m, v in zip(arrays, grads, self.m, self.v):
            if g is None:
                continue
            m *= _ADAM_B1
            m += (1.0 - _ADAM_B1) * g
            v *= _ADAM_B2
            v += (1.0 - _ADAM_B2) * (g * g)
            a -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + _ADAM_EPS)


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    val_metric: list[float] = field(default_factory=list)
    test_metric: float = float("nan")
    metric_name: str = "accuracy"
    best_epoch: int = -1
    seed: int = 0
    epochs_run: int = 0
    epoch_times: list[float] = field(default_factory=list)
    timings: dict = field(default_factory=lambda: {
        "preprocessing_s": 0.0, "per_epoch_s": 0.0, "inference_s": 0.0,
    })


def _assemble_rows(base, assigns, weights, rows):
    """Batch input: static feature rows plus current projection lookups."""
    blocks = [base[rows]]
    for assign, w in zip(assigns, weights):
        blocks.append(w[assign[rows]])
    return np.concatenate(blocks, axis=1) if len(blocks) > 1 else blocks[0].copy()


def _metric_value(name, logits, y):
    if name == "accuracy":
        return accuracy(logits, y)
    if name == "roc_auc":
        if logits.shape[1] != 2:
            raise ConfigError("roc_auc needs exactly 2 classes")
        return roc_auc(_softmax(logits)[:, 1], y)
    return f1_micro(_sigmoid(logits), y)


def evaluate(params: MlpParams, design, y, mask, metric: str = "accuracy") -> float:
    """Metric over the masked rows of a frozen design (adjacency-free)."""
    Z = design.Z if isinstance(design, AugmentedDesign) else design
    if mask.sum() == 0:
        raise ValueError("evaluation mask is empty")
    logits = forward(params, Z[mask], train_mode=False)
    return _metric_value(metric, logits, y[mask])


def train(
    g: Graph,
    profile: ResolutionProfile,
    cfg: MlpConfig,
    nf: bool = False,
    d_c: int = 16,
) -> tuple[MlpParams, TrainReport]:
    """Full training run; returns best-validation-epoch parameters.

    Mini-batches are seed-shuffled training nodes; the projection matrices
    update jointly with the MLP. Identical (graph, profile, cfg, seed) give
    an identical loss trajectory and final parameters.
    """
    if g.y is None or g.train_mask is None:
        raise ConfigError("training requires labels and masks")
    if g.train_mask.sum() == 0:
        raise ConfigError("empty train mask")

    t0 = time.perf_counter()
    base = np.asarray(g.X, dtype=np.float64)
    if nf:
        base = np.concatenate([base, neighbor_mean_features(g)], axis=1)
    assigns = [e.partition.assign for e in profile.entries]
    projections = init_projection(profile, d_c, cfg.seed) if len(profile) else None
    weights = projections.weights if projections else []

    if cfg.task == "multi":
        if g.y.ndim != 2:
            raise ConfigError("multi-label task needs a 2-d label matrix")
        n_classes = g.y.shape[1]
        y = g.y.astype(np.float64)
    else:
        n_classes = g.num_classes
        y = g.y

    in_width = base.shape[1] + len(weights) * (projections.d_c if projections else 0)
    params = init_mlp(in_width, n_classes, cfg, projections)
    opt = _Adam(params.flat(), cfg.lr)

    train_idx = np.flatnonzero(g.train_mask)
    val_idx = np.flatnonzero(g.val_mask) if g.val_mask is not None else np.array([], int)
    test_idx = np.flatnonzero(g.test_mask) if g.test_mask is not None else np.array([], int)

    shuffle_rng = np.random.default_rng([cfg.seed, 0x73687566])
    dropout_rng = np.random.default_rng([cfg.seed, 0x64726F70])

    report = TrainReport(metric_name=cfg.metric_name, seed=cfg.seed)
    report.timings["preprocessing_s"] = time.perf_counter() - t0

    best_val = -np.inf
    best_params = params.copy()
    epoch_time_total = 0.0

    for epoch in range(cfg.epochs):
        te = time.perf_counter()
        perm = shuffle_rng.permutation(train_idx)
        loss_sum = 0.0
        for start in range(0, perm.size, cfg.batch):
            rows = perm[start : start + cfg.batch]
            Zb = _assemble_rows(base, assigns, weights, rows)
            logits, caches = _forward_cached(params, Zb, True, dropout_rng)
            loss, dlogits = _loss_and_grad(logits, y[rows], cfg.task)
            loss_sum += loss * rows.size
            if not np.isfinite(loss):
                raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
            g_w, g_b, g_ls, g_lb, d_in = _backward(params, caches, dlogits)
            g_proj = []
            col = base.shape[1]
            for assign, w in zip(assigns, weights):
                gw = np.zeros_like(w)
                np.add.at(gw, assign[rows], d_in[:, col : col + w.shape[1]])
                g_proj.append(gw)
                col += w.shape[1]
            opt.step(params.flat(), g_w + g_b + g_ls + g_lb + g_proj)
        epoch_elapsed = time.perf_counter() - te
        epoch_time_total += epoch_elapsed
        report.epoch_times.append(epoch_elapsed)
        report.train_loss.append(loss_sum / perm.size)

        if val_idx.size:
            Zv = _assemble_rows(base, assigns, weights, val_idx)
            logits = forward(params, Zv, train_mode=False)
            val = _metric_value(cfg.metric_name, logits, y[val_idx])
        else:
            val = -report.train_loss[-1]
        report.val_metric.append(val)
        if val > best_val:
            best_val = val
            report.best_epoch = epoch
            best_params = params.copy()

    report.epochs_run = cfg.epochs
    report.timings["per_epoch_s"] = epoch_time_total / max(1, cfg.epochs)

    if test_idx.size:
        bw = best_params.projections.weights if best_params.projections else []
        ti = time.perf_counter()
        Zt = _assemble_rows(base, assigns, bw, test_idx)
        logits = forward(best_params, Zt, train_mode=False)
        report.timings["inference_s"] = time.perf_counter() - ti
        report.test_metric = _metric_value(cfg.metric_name, logits, y[test_idx])
    return best_params, report


def save_checkpoint(params: MlpParams, directory) -> None:
    """Write each parameter array as an ATLF1 matrix plus an index file."""
    from pathlib import Path

    from .graph import write_atlf

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    entries = []
    named = (
        [(f"linear_w{i}", a) for i, a in enumerate(params.linear_w)]
        + [(f"linear_b{i}", a) for i, a in enumerate(params.linear_b)]
        + [(f"ln_scale{i}", a) for i, a in enumerate(params.ln_scale)]
        + [(f"ln_shift{i}", a) for i, a in enumerate(params.ln_shift)]
    )
    if params.projections is not None:
        named += [(f"proj{i}", a) for i, a in enumerate(params.projections.weights)]
    for name, arr in named:
        mat = arr if arr.ndim == 2 else arr[None, :]
        write_atlf(d / f"{name}.atlf", mat)
        entries.append(f"{name}\t{name}.atlf\t{arr.ndim}")
    meta = [f"dropout={params.dropout!r}"]
    if params.projections is not None:
        meta.append(f"d_c={params.projections.d_c}")
        meta.append("gammas=" + ",".join(repr(g) for g in params.projections.gammas))
    (d / "index.txt").write_text("\n".join(meta + entries) + "\n", encoding="utf-8")


def load_checkpoint(directory) -> MlpParams:
    from pathlib import Path

    from .graph import read_atlf

    d = Path(directory)
    meta = {}
    arrays = {}
    dims = {}
    for line in (d / "index.txt").read_text(encoding="utf-8").splitlines():
        if "=" in line and "\t" not in line:
            key, val = line.split("=", 1)
            meta[key] = val
        elif line.strip():
            name, fname, ndim = line.split("\t")
            mat = read_atlf(d / fname).astype(np.float64)
            arrays[name] = mat
            dims[name] = int(ndim)

    def group(prefix):
        names = sorted((n for n in arrays if n.startswith(prefix)),
                       key=lambda n: int(n[len(prefix):]))
        return [arrays[n] if dims[n] == 2 else arrays[n][0] for n in names]

    projections = None
    if "gammas" in meta:
        projections = ProjectionParams(
            weights=group("proj"),
            d_c=int(meta["d_c"]),
            gammas=tuple(float(x) for x in meta["gammas"].split(",")),
        )
    return MlpParams(
        linear_w=group("linear_w"),
        linear_b=group("linear_b"),
        ln_scale=group("ln_scale"),
        ln_shift=group("ln_shift"),
        dropout=float(meta["dropout"]),
        projections=projections,
    )


def grad_check(
    cfg: MlpConfig,
    small_design: np.ndarray,
    labels: np.ndarray,
    partitions=(),
    d_c: int = 2,
    seed: int = 0,
    loss: str = "auto",
) -> float:
    """Max relative error of analytic vs central-difference gradients.

    Includes the projection rows when partitions are given. Dropout must be
    disabled; the model must stay at or under 200 parameters so the finite
    differencing stays cheap and well conditioned.
    """
    if cfg.dropout != 0.0:
        raise ConfigError("grad_check requires dropout = 0")
    X = np.asarray(small_design, dtype=np.float64)
    labels = np.asarray(labels)
    rng = np.random.default_rng([seed, 0x6763686B])

    projections = None
    if partitions:
        weights = [
            rng.uniform(-1.0 / np.sqrt(p.K), 1.0 / np.sqrt(p.K), size=(p.K, d_c))
            for p in partitions
        ]
        projections = ProjectionParams(
            weights=weights, d_c=d_c, gammas=tuple(float(i + 1) for i in range(len(partitions)))
        )
    assigns = [p.assign for p in partitions]
    weights = projections.weights if projections else []
    in_width = X.shape[1] + len(weights) * d_c

    if cfg.task == "multi" or loss == "mse":
        n_classes = labels.shape[1]
    else:
        n_classes = int(labels.max()) + 1
    params = init_mlp(in_width, n_classes, cfg, projections)
    n_params = sum(a.size for a in params.flat())
    if n_params > 200:
        raise ConfigError(f"grad_check limited to 200 parameters, got {n_params}")

    rows = np.arange(X.shape[0])

    def loss_of(ps: MlpParams) -> float:
        w = ps.projections.weights if ps.projections else []
        Z = _assemble_rows(X, assigns, w, rows)
        logits, _ = _forward_cached(ps, Z, False, None)
        if loss == "mse":
            return float(np.mean((logits - labels) ** 2))
        return _loss_and_grad(logits, labels, cfg.task)[0]

    # analytic
    Z = _assemble_rows(X, assigns, weights, rows)
    logits, caches = _forward_cached(params, Z, False, None)
    if loss == "mse":
        dlogits = 2.0 * (logits - labels) / logits.size
    else:
        _, dlogits = _loss_and_grad(logits, labels, cfg.task)
    g_w, g_b, g_ls, g_lb, d_in = _backward(params, caches, dlogits)
    g_proj = []
    col = X.shape[1]
    for assign, w in zip(assigns, weights):
        gw = np.zeros_like(w)
        np.add.at(gw, assign[rows], d_in[:, col : col + w.shape[1]])
        g_proj.append(gw)
        col += w.shape[1]
    analytic = g_w + g_b + g_ls + g_lb + g_proj

    h = 1e-4
    worst = 0.0
    arrays = params.flat()
    for arr, grad in zip(arrays, analytic):
        flat = arr.ravel()
        gflat = grad.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_of(params)
            flat[i] = orig - h
            dn = loss_of(params)
            flat[i] = orig
            numeric = (up - dn) / (2.0 * h)
            err = abs(numeric - gflat[i]) / max(1.0, abs(numeric), abs(gflat[i]))
            worst = max(worst, err)
    return worst
