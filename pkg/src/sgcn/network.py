"""Hybrid model combining smoothing (GCN-style) channels with band-pass
scattering channels, a residual-convolution output layer, softmax
classification, hand-derived reverse-mode gradients, and an Adam trainer.

All learned math lives here; diffusion itself is delegated to `operators`.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .operators import (
    LAZY_WALK,
    DiffusionPlan,
    apply_power,
    apply_wavelet,
    check_signal,
    lazy_walk,
    renorm_propagation,
    residual_plan,
)
from .scattering import normalize_path, path_label

CHECKPOINT_SCHEMA = "sgcn/1"


class TrainingDiverged(RuntimeError):
    """Raised when a non-finite loss or activation shows up; carries context."""

    def __init__(self, message: str, epoch: int | None = None, report=None):
        super().__init__(message)
        self.epoch = epoch
        self.report = report


# ---------------------------------------------------------------------------
# Model specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GcnChannel:
    """Smoothing channel using the k-th power of the renormalized propagation."""
    power: int
    width: int

    def __post_init__(self):
        if self.power < 1:
            raise ValueError(f"gcn channel power must be >= 1, got {self.power}")
        if self.width < 1:
            raise ValueError(f"channel width must be >= 1, got {self.width}")

    @property
    def label(self) -> str:
        return f"A{self.power}"


@dataclass(frozen=True)
class ScatteringChannel:
    """Band-pass channel applying a scattering cascade along `path`."""
    path: tuple[int, ...]
    width: int

    def __post_init__(self):
        object.__setattr__(self, "path", normalize_path(self.path))
        if self.width < 1:
            raise ValueError(f"channel width must be >= 1, got {self.width}")

    @property
    def label(self) -> str:
        return path_label(self.path)


Channel = GcnChannel | ScatteringChannel


@dataclass(frozen=True)
class ModelSpec:
    """Channel layout of the hybrid layers plus the residual output layer."""

    layers: tuple[tuple[Channel, ...], ...]
    q: tuple[int, ...]           # nonlinearity exponent per hybrid layer
    alpha: float                 # residual-convolution strength
    input_dim: int
    n_classes: int

    def __post_init__(self):
        layers = tuple(tuple(chs) for chs in self.layers)
        object.__setattr__(self, "layers", layers)
        if any(int(v) != v for v in self.q):
            raise ValueError(f"nonlinearity exponents must be integers, got {self.q}")
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        if len(layers) < 1:
            raise ValueError("need at least one hybrid layer")
        if any(len(chs) < 1 for chs in layers):
            raise ValueError("every hybrid layer needs at least one channel")
        if len(self.q) != len(layers):
            raise ValueError("need one nonlinearity exponent per hybrid layer")
        if any(v < 1 for v in self.q):
            raise ValueError(f"nonlinearity exponents must be >= 1, got {self.q}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.input_dim < 1 or self.n_classes < 2:
            raise ValueError("need input_dim >= 1 and n_classes >= 2")

    def layer_width(self, layer: int) -> int:
        return sum(ch.width for ch in self.layers[layer])

    @property
    def concat_width(self) -> int:
        return self.layer_width(len(self.layers) - 1)

    def layer_input_dim(self, layer: int) -> int:
        return self.input_dim if layer == 0 else self.layer_width(layer - 1)


def ablate_channel(spec: ModelSpec, channel_index: int) -> ModelSpec:
    """Spec copy with one channel (by per-layer index) removed everywhere.

    The residual layer input shrinks accordingly. At least two channels must
    remain in every hybrid layer.
    """
    for chs in spec.layers:
        if not 0 <= channel_index < len(chs):
            raise ValueError(
                f"channel index {channel_index} out of range for layer with {len(chs)} channels"
            )
        if len(chs) == 1:
            raise ValueError("cannot remove the last channel")
        if len(chs) - 1 < 2:
            raise ValueError("at least two channels must remain after removal")
    layers = tuple(
        tuple(ch for i, ch in enumerate(chs) if i != channel_index)
        for chs in spec.layers
    )
    return ModelSpec(layers=layers, q=spec.q, alpha=spec.alpha,
                     input_dim=spec.input_dim, n_classes=spec.n_classes)


def channel_labels(spec: ModelSpec, layer: int = 0) -> list[str]:
    return [ch.label for ch in spec.layers[layer]]


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass
class Affine:
    theta: np.ndarray  # (in_dim, width)
    bias: np.ndarray   # (width,)


@dataclass
class ModelParams:
    layers: list[list[Affine]]
    residual: Affine

    def copy(self) -> "ModelParams":
        return copy.deepcopy(self)


def iter_affines(params: ModelParams):
    for chs in params.layers:
        yield from chs
    yield params.residual


def init_params(spec: ModelSpec, rng: np.random.Generator) -> ModelParams:
    """Uniform fan-scaled init for the weights, zero biases."""
    def glorot(fan_in, fan_out):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, size=(fan_in, fan_out))

    layers = []
    for li, chs in enumerate(spec.layers):
        in_dim = spec.layer_input_dim(li)
        layers.append(
            [Affine(glorot(in_dim, ch.width), np.zeros(ch.width)) for ch in chs]
        )
    residual = Affine(glorot(spec.concat_width, spec.n_classes), np.zeros(spec.n_classes))
    return ModelParams(layers=layers, residual=residual)


def check_param_shapes(spec: ModelSpec, params: ModelParams) -> None:
    if len(params.layers) != len(spec.layers):
        raise ValueError("parameter layer count does not match spec")
    for li, (chs, pchs) in enumerate(zip(spec.layers, params.layers)):
        if len(chs) != len(pchs):
            raise ValueError(f"layer {li}: channel count mismatch")
        in_dim = spec.layer_input_dim(li)
        for ch, p in zip(chs, pchs):
            if p.theta.shape != (in_dim, ch.width) or p.bias.shape != (ch.width,):
                raise ValueError(
                    f"layer {li} channel {ch.label}: parameter shape "
                    f"{p.theta.shape}/{p.bias.shape} does not match spec"
                )
    res = params.residual
    if res.theta.shape != (spec.concat_width, spec.n_classes) or \
            res.bias.shape != (spec.n_classes,):
        raise ValueError("residual layer parameter shapes do not match spec")
    for aff in iter_affines(params):
        if not (np.all(np.isfinite(aff.theta)) and np.all(np.isfinite(aff.bias))):
            raise ValueError("parameters contain non-finite entries")


# ---------------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------------

def _sigma(z: np.ndarray, q: int) -> np.ndarray:
    return np.abs(z) if q == 1 else np.abs(z) ** q


def _sigma_prime(z: np.ndarray, q: int) -> np.ndarray:
    # derivative of |z|^q; defined as 0 at the q=1 kink (subgradient choice)
    if q == 1:
        return np.sign(z)
    if q == 2:
        return 2.0 * z
    return q * np.abs(z) ** (q - 1) * np.sign(z)


@dataclass
class _ChannelTape:
    pre_activation: np.ndarray          # Z, before sigma
    cascade_out: np.ndarray | None = None   # U_p(H) for multi-step paths
    cascade_pre_abs: list = field(default_factory=list)  # interior signals before |.|


@dataclass
class ForwardTape:
    params: ModelParams
    ops: "GraphOps"
    layer_inputs: list[np.ndarray]
    channels: list[list[_ChannelTape]]
    concat: np.ndarray
    smoothed: np.ndarray                # residual conv applied to concat
    logits: np.ndarray


class GraphOps:
    """Per-graph diffusion plans reused across epochs (incl. transposes)."""

    def __init__(self, g: Graph, alpha: float):
        self.graph = g
        self.prop = renorm_propagation(g)
        self.walk = lazy_walk(g)
        self.residual = residual_plan(g, alpha)
        # explicit transpose plans: the walk is not symmetric in general
        self.prop_T = DiffusionPlan(g, self.prop.kind, self.prop.matrix.T.tocsr())
        self.walk_T = DiffusionPlan(g, LAZY_WALK, self.walk.matrix.T.tocsr())
        self.residual_T = DiffusionPlan(
            g, self.residual.kind, self.residual.matrix.T.tocsr(), alpha=alpha
        )


def _cascade_with_tape(plan: DiffusionPlan, path, x: np.ndarray):
    """Scattering cascade that also returns the interior pre-abs signals."""
    pre_abs = []
    out = apply_wavelet(plan, path[0], x)
    for k in path[1:]:
        pre_abs.append(out)
        out = apply_wavelet(plan, k, np.abs(out))
    return out, pre_abs


def forward(spec: ModelSpec, params: ModelParams, g: Graph, x: np.ndarray,
            ops: GraphOps | None = None) -> tuple[np.ndarray, ForwardTape]:
    """Full forward pass; returns logits and the tape backward() consumes."""
    check_param_shapes(spec, params)
    x = check_signal(g, x)
    if x.ndim != 2 or x.shape[1] != spec.input_dim:
        raise ValueError(f"feature matrix shape {x.shape} does not match input_dim {spec.input_dim}")
    if ops is None:
        ops = GraphOps(g, spec.alpha)

    h = x
    layer_inputs, channel_tapes = [], []
    for li, chs in enumerate(spec.layers):
        layer_inputs.append(h)
        q = spec.q[li]
        outs, tapes = [], []
        for ch, aff in zip(chs, params.layers[li]):
            if isinstance(ch, GcnChannel):
                z = apply_power(ops.prop, ch.power, h @ aff.theta) + aff.bias
                tapes.append(_ChannelTape(pre_activation=z))
            elif len(ch.path) == 1:
                z = apply_wavelet(ops.walk, ch.path[0], h @ aff.theta) + aff.bias
                tapes.append(_ChannelTape(pre_activation=z))
            else:
                s, pre_abs = _cascade_with_tape(ops.walk, ch.path, h)
                z = s @ aff.theta + aff.bias
                tapes.append(_ChannelTape(pre_activation=z, cascade_out=s,
                                          cascade_pre_abs=pre_abs))
            outs.append(_sigma(z, q))
        h = np.concatenate(outs, axis=1)
        if not np.all(np.isfinite(h)):
            raise TrainingDiverged(f"non-finite activation in hybrid layer {li}")
        channel_tapes.append(tapes)

    smoothed = ops.residual.apply(h)
    logits = smoothed @ params.residual.theta + params.residual.bias
    if not np.all(np.isfinite(logits)):
        raise TrainingDiverged("non-finite logits in residual layer")
    tape = ForwardTape(params=params, ops=ops, layer_inputs=layer_inputs,
                       channels=channel_tapes, concat=h, smoothed=smoothed,
                       logits=logits)
    return logits, tape


def loss_masked_ce(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    """Mean softmax cross-entropy over the masked nodes."""
    loss, _ = loss_and_grad(logits, labels, mask)
    return loss


def loss_and_grad(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray):
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise ValueError("mask selects no labeled nodes")
    sub = logits[mask]
    lab = np.asarray(labels)[mask]
    if np.any(lab < 0) or np.any(lab >= logits.shape[1]):
        raise ValueError("masked nodes must carry labels in [0, n_classes)")
    shifted = sub - sub.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    probs = expz / expz.sum(axis=1, keepdims=True)
    rows = np.arange(mask.size)
    log_probs = shifted - np.log(expz.sum(axis=1, keepdims=True))
    loss = float(-log_probs[rows, lab].mean())

    dsub = probs
    dsub[rows, lab] -= 1.0
    dsub /= mask.size
    dlogits = np.zeros_like(logits)
    dlogits[mask] = dsub
    return loss, dlogits


@dataclass
class Gradients:
    layers: list[list[Affine]]
    residual: Affine


def backward(spec: ModelSpec, params: ModelParams, tape: ForwardTape,
             labels: np.ndarray, mask: np.ndarray) -> tuple[float, Gradients]:
    """Exact reverse pass through residual layer, channels and cascades.

    Every linear operator is transposed factor by factor; the walk transpose
    is applied through an explicitly stored transpose plan.
    """
    if tape.params is not params:
        raise ValueError("stale tape: it was produced by different parameters")
    ops = tape.ops
    loss, dlogits = loss_and_grad(tape.logits, labels, mask)

    g_res_theta = tape.smoothed.T @ dlogits
    g_res_bias = dlogits.sum(axis=0)
    dh = ops.residual_T.apply(dlogits @ params.residual.theta.T)

    grad_layers: list[list[Affine]] = [None] * len(spec.layers)
    for li in range(len(spec.layers) - 1, -1, -1):
        chs = spec.layers[li]
        q = spec.q[li]
        h = tape.layer_inputs[li]
        dh_prev = np.zeros_like(h)
        grads = []
        col = 0
        for ch, aff, ctape in zip(chs, params.layers[li], tape.channels[li]):
            dz = dh[:, col:col + ch.width] * _sigma_prime(ctape.pre_activation, q)
            col += ch.width
            dbias = dz.sum(axis=0)
            if isinstance(ch, GcnChannel):
                gz = apply_power(ops.prop_T, ch.power, dz)
                dtheta = h.T @ gz
                dh_prev += gz @ aff.theta.T
            elif len(ch.path) == 1:
                gz = apply_wavelet(ops.walk_T, ch.path[0], dz)
                dtheta = h.T @ gz
                dh_prev += gz @ aff.theta.T
            else:
                dtheta = ctape.cascade_out.T @ dz
                gz = dz @ aff.theta.T
                for i in range(len(ch.path) - 1, -1, -1):
                    gz = apply_wavelet(ops.walk_T, ch.path[i], gz)
                    if i > 0:
                        gz = gz * np.sign(ctape.cascade_pre_abs[i - 1])
                dh_prev += gz
            grads.append(Affine(dtheta, dbias))
        grad_layers[li] = grads
        dh = dh_prev

    return loss, Gradients(layers=grad_layers, residual=Affine(g_res_theta, g_res_bias))


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class TrainConfig:
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 5e-4   # applied to weight matrices only
    epochs: int = 400
    patience: int = 30
    seed: int = 0


class EarlyStopper:
    """Patience over joint validation records (accuracy up or loss down).

    Tracking the loss record alongside accuracy carries training through the
    flat-accuracy warmup that large nonlinearity exponents produce: the
    accuracy can sit at chance for dozens of epochs while the loss steadily
    improves. update() returns True when the caller should snapshot the
    parameters (accuracy gain, or equal accuracy at a new loss record).
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best_acc = -1.0
        self.best_loss = float("inf")
        self.stale = 0

    def update(self, acc: float, loss: float) -> bool:
        snapshot = acc > self.best_acc or (acc == self.best_acc and loss < self.best_loss)
        # ties count: patience only drains while accuracy sits strictly below
        # its best AND the loss is strictly off its record
        at_record = acc >= self.best_acc or loss <= self.best_loss
        self.best_acc = max(self.best_acc, acc)
        self.best_loss = min(self.best_loss, loss)
        self.stale = 0 if at_record else self.stale + 1
        return snapshot

    @property
    def should_stop(self) -> bool:
        return self.stale > self.patience


@dataclass
class MetricsReport:
    train_loss: list[float]
    val_acc: list[float]
    best_epoch: int
    best_val_acc: float
    test_acc: float

    def to_dict(self) -> dict:
        return {
            "epochs": [
                {"epoch": i, "train_loss": l, "val_acc": a}
                for i, (l, a) in enumerate(zip(self.train_loss, self.val_acc))
            ],
            "best_epoch": self.best_epoch,
            "best_val_acc": self.best_val_acc,
            "test_acc": self.test_acc,
        }


def predict(logits: np.ndarray) -> np.ndarray:
    """Row argmax; ties go to the lowest class index."""
    return np.argmax(logits, axis=1)


def accuracy(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise ValueError("empty evaluation mask")
    return float(np.mean(predict(logits[mask]) == np.asarray(labels)[mask]))


def evaluate(spec: ModelSpec, params: ModelParams, dataset, split: str,
             ops: GraphOps | None = None) -> float:
    if split not in dataset.masks:
        raise ValueError(f"unknown split {split!r}; have {sorted(dataset.masks)}")
    logits, _ = forward(spec, params, dataset.graph, dataset.features, ops=ops)
    return accuracy(logits, dataset.labels, dataset.masks[split])


def train(spec: ModelSpec, dataset, config: TrainConfig | None = None
          ) -> tuple[ModelParams, MetricsReport]:
    """Full-batch Adam with early stopping on validation accuracy.

    Deterministic for a fixed seed: init, update order and metric curves are
    reproducible bitwise at a fixed worker count.
    """
    config = config or TrainConfig()
    g = dataset.graph
    x = dataset.features
    labels = dataset.labels
    train_mask = dataset.masks["train"]
    val_mask = dataset.masks["val"]
    for a, b in (("train", "val"), ("train", "test"), ("val", "test")):
        if np.intersect1d(dataset.masks[a], dataset.masks[b]).size:
            raise ValueError(f"splits {a!r} and {b!r} overlap")

    rng = np.random.Generator(np.random.Philox(config.seed))
    params = init_params(spec, rng)
    ops = GraphOps(g, spec.alpha)

    adam_m = [np.zeros_like(p) for aff in iter_affines(params) for p in (aff.theta, aff.bias)]
    adam_v = [np.zeros_like(m) for m in adam_m]

    train_losses: list[float] = []
    val_accs: list[float] = []
    stopper = EarlyStopper(config.patience)
    best_epoch = -1
    best_params = params.copy()

    for epoch in range(config.epochs):
        try:
            logits, tape = forward(spec, params, g, x, ops=ops)
            loss, grads = backward(spec, params, tape, labels, train_mask)
        except TrainingDiverged as exc:
            exc.epoch = epoch
            exc.report = MetricsReport(train_losses, val_accs, best_epoch,
                                       stopper.best_acc, float("nan"))
            raise
        except FloatingPointError as exc:
            raise TrainingDiverged(str(exc), epoch=epoch,
                                   report=MetricsReport(train_losses, val_accs,
                                                        best_epoch, stopper.best_acc,
                                                        float("nan"))) from exc
        if not np.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss {loss!r}", epoch=epoch,
                                   report=MetricsReport(train_losses, val_accs,
                                                        best_epoch, stopper.best_acc,
                                                        float("nan")))

        t = epoch + 1
        slot = 0
        for aff, gaff in zip(iter_affines(params), iter_affines(grads)):
            for arr, grad, decay in ((aff.theta, gaff.theta, config.weight_decay),
                                     (aff.bias, gaff.bias, 0.0)):
                if decay:
                    grad = grad + decay * arr
                m = adam_m[slot]
                v = adam_v[slot]
                m *= config.beta1
                m += (1 - config.beta1) * grad
                v *= config.beta2
                v += (1 - config.beta2) * grad * grad
                m_hat = m / (1 - config.beta1 ** t)
                v_hat = v / (1 - config.beta2 ** t)
                arr -= config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
                slot += 1

        try:
            val_logits, _ = forward(spec, params, g, x, ops=ops)
        except TrainingDiverged as exc:
            exc.epoch = epoch
            exc.report = MetricsReport(train_losses, val_accs, best_epoch,
                                       stopper.best_acc, float("nan"))
            raise
        val_acc = accuracy(val_logits, labels, val_mask)
        val_loss = loss_masked_ce(val_logits, labels, val_mask)
        train_losses.append(loss)
        val_accs.append(val_acc)

        if stopper.update(val_acc, val_loss):
            best_epoch = epoch
            best_params = params.copy()
        if stopper.should_stop:
            break

    test_acc = evaluate(spec, best_params, dataset, "test", ops=ops)
    report = MetricsReport(train_loss=train_losses, val_acc=val_accs,
                           best_epoch=best_epoch, best_val_acc=stopper.best_acc,
                           test_acc=test_acc)
    return best_params, report


# ---------------------------------------------------------------------------
# Checkpoint serialization (versioned JSON, row-major arrays)
# ---------------------------------------------------------------------------

def channel_to_dict(ch: Channel) -> dict:
    if isinstance(ch, GcnChannel):
        return {"kind": "gcn", "power": ch.power, "width": ch.width}
    return {"kind": "scattering", "path": list(ch.path), "width": ch.width}


def channel_from_dict(d: dict) -> Channel:
    kind = d.get("kind")
    if kind == "gcn":
        return GcnChannel(power=int(d["power"]), width=int(d["width"]))
    if kind == "scattering":
        return ScatteringChannel(path=tuple(d["path"]), width=int(d["width"]))
    raise ValueError(f"unknown channel kind {kind!r}")


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "layers": [[channel_to_dict(ch) for ch in chs] for chs in spec.layers],
        "q": list(spec.q),
        "alpha": spec.alpha,
        "input_dim": spec.input_dim,
        "n_classes": spec.n_classes,
    }


def spec_from_dict(d: dict) -> ModelSpec:
    return ModelSpec(
        layers=tuple(tuple(channel_from_dict(c) for c in chs) for chs in d["layers"]),
        q=tuple(d["q"]),
        alpha=float(d["alpha"]),
        input_dim=int(d["input_dim"]),
        n_classes=int(d["n_classes"]),
    )


def _affine_to_dict(aff: Affine) -> dict:
    return {
        "shape": list(aff.theta.shape),
        "theta": np.ascontiguousarray(aff.theta).ravel().tolist(),
        "bias": aff.bias.tolist(),
    }


def _affine_from_dict(d: dict) -> Affine:
    shape = tuple(d["shape"])
    theta = np.asarray(d["theta"], dtype=np.float64).reshape(shape)
    bias = np.asarray(d["bias"], dtype=np.float64)
    return Affine(theta, bias)


def save_checkpoint(path, spec: ModelSpec, params: ModelParams) -> None:
    check_param_shapes(spec, params)
    doc = {
        "schema": CHECKPOINT_SCHEMA,
        "kind": "model-checkpoint",
        "spec": spec_to_dict(spec),
        "params": {
            "layers": [[_affine_to_dict(a) for a in chs] for chs in params.layers],
            "residual": _affine_to_dict(params.residual),
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path) -> tuple[ModelSpec, ModelParams]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != CHECKPOINT_SCHEMA or doc.get("kind") != "model-checkpoint":
        raise ValueError(f"not a model checkpoint: {path}")
    spec = spec_from_dict(doc["spec"])
    params = ModelParams(
        layers=[[_affine_from_dict(a) for a in chs] for chs in doc["params"]["layers"]],
        residual=_affine_from_dict(doc["params"]["residual"]),
    )
    check_param_shapes(spec, params)
    return spec, params
