"""Small bidirectional language model trained from scratch in numpy.

Pipeline per sentence: token embeddings -> strided 1D convolution with a
tanh nonlinearity (shortening the sequence from n to m positions) -> one
forward and one backward LSTM over the reduced sequence -> a shared
projection to vocabulary logits.

Reduced position k is anchored to the input token at the centre of its
receptive field (index ``k*stride + kernel_width//2``); the forward
direction predicts that token from the hidden state of positions before k,
the backward direction from positions after k, so neither direction sees
its own target. Training maximises the mean per-position sum of the two
directional log-likelihoods by plain full-batch gradient descent with
hand-derived gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections.abc import Iterator, Sequence

import numpy as np

Sentence = Sequence[int]


@dataclass(frozen=True)
class LmConfig:
    vocab_size: int
    embed_dim: int
    hidden_dim: int
    kernel_width: int = 3
    stride: int = 2
    learning_rate: float = 0.5
    seed: int = 0
    epochs: int = 1

    def __post_init__(self):
        if self.vocab_size < 1 or self.embed_dim < 1 or self.hidden_dim < 1:
            raise ValueError("vocab_size, embed_dim and hidden_dim must be positive")
        if self.kernel_width < 1:
            raise ValueError("kernel_width must be positive")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")


@dataclass
class LmParameters:
    """All trainable tensors; shapes follow the owning LmConfig."""

    embedding: np.ndarray     # (V, d)
    conv_kernel: np.ndarray   # (kernel_width, d, d)
    conv_bias: np.ndarray     # (d,)
    fwd_w_x: np.ndarray       # (4h, d)
    fwd_w_h: np.ndarray       # (4h, h)
    fwd_b: np.ndarray         # (4h,)
    bwd_w_x: np.ndarray
    bwd_w_h: np.ndarray
    bwd_b: np.ndarray
    out_proj: np.ndarray      # (V, h)
    out_bias: np.ndarray      # (V,)

    TENSOR_NAMES = (
        "embedding", "conv_kernel", "conv_bias",
        "fwd_w_x", "fwd_w_h", "fwd_b",
        "bwd_w_x", "bwd_w_h", "bwd_b",
        "out_proj", "out_bias",
    )

    def tensors(self) -> Iterator[tuple[str, np.ndarray]]:
        for name in self.TENSOR_NAMES:
            yield name, getattr(self, name)

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def kernel_width(self) -> int:
        return self.conv_kernel.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.out_proj.shape[1]


def init_parameters(config: LmConfig) -> LmParameters:
    """Seeded init: weights uniform in +-0.1/sqrt(fan_in), biases zero."""
    rng = np.random.default_rng(config.seed)
    v, d, h = config.vocab_size, config.embed_dim, config.hidden_dim
    kw = config.kernel_width

    def uniform(shape, fan_in):
        bound = 0.1 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    return LmParameters(
        embedding=uniform((v, d), d),
        conv_kernel=uniform((kw, d, d), kw * d),
        conv_bias=np.zeros(d),
        fwd_w_x=uniform((4 * h, d), d),
        fwd_w_h=uniform((4 * h, h), h),
        fwd_b=np.zeros(4 * h),
        bwd_w_x=uniform((4 * h, d), d),
        bwd_w_h=uniform((4 * h, h), h),
        bwd_b=np.zeros(4 * h),
        out_proj=uniform((v, h), h),
        out_bias=np.zeros(v),
    )


def zero_gradients(params: LmParameters) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.tensors()}


# ------------------------------------------------------------------ 1D CNN

def reduced_length(n: int, kernel_width: int, stride: int) -> int:
    if n < kernel_width:
        raise ValueError(f"sequence of length {n} is shorter than the kernel ({kernel_width})")
    return (n - kernel_width) // stride + 1


def conv1d_reduce(
    embedded: np.ndarray, kernel: np.ndarray, bias: np.ndarray, stride: int
) -> np.ndarray:
    """tanh(kernel * window + bias) over strided windows; (n,d) -> (m,d)."""
    out, _ = _conv_forward(embedded, kernel, bias, stride)
    return out


def _conv_forward(x, kernel, bias, stride):
    n = x.shape[0]
    kw = kernel.shape[0]
    m = reduced_length(n, kw, stride)
    pre = np.empty((m, kernel.shape[1]))
    for k in range(m):
        acc = bias.copy()
        for t in range(kw):
            acc += kernel[t] @ x[k * stride + t]
        pre[k] = acc
    out = np.tanh(pre)
    return out, (x, out)


def _conv_backward(d_out, cache, kernel, stride):
    x, out = cache
    kw = kernel.shape[0]
    d_pre = d_out * (1.0 - out ** 2)
    d_x = np.zeros_like(x)
    d_kernel = np.zeros_like(kernel)
    for k in range(d_pre.shape[0]):
        for t in range(kw):
            d_kernel[t] += np.outer(d_pre[k], x[k * stride + t])
            d_x[k * stride + t] += kernel[t].T @ d_pre[k]
    return d_x, d_kernel, d_pre.sum(axis=0)


# -------------------------------------------------------------------- LSTM

def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _lstm_forward(inputs, w_x, w_h, b):
    """Standard LSTM left to right from zero initial states.

    Returns the (T, h) hidden sequence and the cache for backprop.
    """
    steps = inputs.shape[0]
    h = w_h.shape[1]
    gi = np.empty((steps, h))
    gf = np.empty((steps, h))
    gg = np.empty((steps, h))
    go = np.empty((steps, h))
    cell = np.empty((steps, h))
    tanh_cell = np.empty((steps, h))
    hidden = np.empty((steps, h))
    h_prev = np.zeros(h)
    c_prev = np.zeros(h)
    for t in range(steps):
        z = w_x @ inputs[t] + w_h @ h_prev + b
        gi[t] = _sigmoid(z[:h])
        gf[t] = _sigmoid(z[h:2 * h])
        gg[t] = np.tanh(z[2 * h:3 * h])
        go[t] = _sigmoid(z[3 * h:])
        cell[t] = gf[t] * c_prev + gi[t] * gg[t]
        tanh_cell[t] = np.tanh(cell[t])
        hidden[t] = go[t] * tanh_cell[t]
        h_prev = hidden[t]
        c_prev = cell[t]
    cache = (inputs, gi, gf, gg, go, cell, tanh_cell, hidden)
    return hidden, cache


def _lstm_backward(d_hidden, cache, w_x, w_h):
    """Backprop through time; ``d_hidden`` is the upstream (T, h) gradient."""
    inputs, gi, gf, gg, go, cell, tanh_cell, hidden = cache
    steps, h = hidden.shape
    d_inputs = np.zeros_like(inputs)
    d_w_x = np.zeros_like(w_x)
    d_w_h = np.zeros_like(w_h)
    d_b = np.zeros(4 * h)
    dh_next = np.zeros(h)
    dc_next = np.zeros(h)
    for t in reversed(range(steps)):
        dh = d_hidden[t] + dh_next
        c_prev = cell[t - 1] if t > 0 else np.zeros(h)
        h_prev = hidden[t - 1] if t > 0 else np.zeros(h)
        do = dh * tanh_cell[t]
        dc = dc_next + dh * go[t] * (1.0 - tanh_cell[t] ** 2)
        di = dc * gg[t]
        dg = dc * gi[t]
        df = dc * c_prev
        dz = np.concatenate([
            di * gi[t] * (1.0 - gi[t]),
            df * gf[t] * (1.0 - gf[t]),
            dg * (1.0 - gg[t] ** 2),
            do * go[t] * (1.0 - go[t]),
        ])
        d_w_x += np.outer(dz, inputs[t])
        d_w_h += np.outer(dz, h_prev)
        d_b += dz
        d_inputs[t] = w_x.T @ dz
        dh_next = w_h.T @ dz
        dc_next = dc * gf[t]
    return d_inputs, d_w_x, d_w_h, d_b


def bilstm_encode(reduced: np.ndarray, params: LmParameters) -> np.ndarray:
    """Element-wise sum of forward and backward hidden states, (m, h)."""
    h_fwd, _ = _lstm_forward(reduced, params.fwd_w_x, params.fwd_w_h, params.fwd_b)
    h_bwd_rev, _ = _lstm_forward(reduced[::-1], params.bwd_w_x, params.bwd_w_h, params.bwd_b)
    return h_fwd + h_bwd_rev[::-1]


# ---------------------------------------------------------------- objective

def _log_softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def lm_objective(
    fwd_hidden: np.ndarray,
    bwd_hidden: np.ndarray,
    fwd_targets: Sequence[int],
    bwd_targets: Sequence[int],
    params: LmParameters,
) -> float:
    """Mean over positions of forward + backward target log-likelihood.

    ``fwd_hidden[k]`` / ``bwd_hidden[k]`` are the states the two directions
    condition on at position k (already shifted so neither contains its own
    target).
    """
    fwd_targets = np.asarray(fwd_targets, dtype=int)
    bwd_targets = np.asarray(bwd_targets, dtype=int)
    v = params.vocab_size
    if fwd_targets.size and (fwd_targets.max() >= v or fwd_targets.min() < 0):
        raise ValueError("forward target id outside the vocabulary")
    if bwd_targets.size and (bwd_targets.max() >= v or bwd_targets.min() < 0):
        raise ValueError("backward target id outside the vocabulary")
    logp_f = _log_softmax(fwd_hidden @ params.out_proj.T + params.out_bias)
    logp_b = _log_softmax(bwd_hidden @ params.out_proj.T + params.out_bias)
    k = np.arange(len(fwd_targets))
    return float(np.mean(logp_f[k, fwd_targets] + logp_b[k, bwd_targets]))


def prediction_targets(ids: Sequence[int], kernel_width: int, stride: int) -> np.ndarray:
    """Input token at the receptive-field centre of each reduced position."""
    ids = np.asarray(ids, dtype=int)
    m = reduced_length(len(ids), kernel_width, stride)
    centres = np.arange(m) * stride + kernel_width // 2
    return ids[centres]


def _shift_for_prediction(h_fwd, h_bwd):
    h = h_fwd.shape[1]
    fwd_ctx = np.vstack([np.zeros((1, h)), h_fwd[:-1]])
    bwd_ctx = np.vstack([h_bwd[1:], np.zeros((1, h))])
    return fwd_ctx, bwd_ctx


def _sentence_forward(ids, params, stride):
    ids = np.asarray(ids, dtype=int)
    if ids.size and (ids.max() >= params.vocab_size or ids.min() < 0):
        raise ValueError("token id outside the vocabulary")
    x = params.embedding[ids]
    reduced, conv_cache = _conv_forward(x, params.conv_kernel, params.conv_bias, stride)
    h_fwd, fwd_cache = _lstm_forward(reduced, params.fwd_w_x, params.fwd_w_h, params.fwd_b)
    h_bwd_rev, bwd_cache = _lstm_forward(
        reduced[::-1], params.bwd_w_x, params.bwd_w_h, params.bwd_b
    )
    h_bwd = h_bwd_rev[::-1]
    targets = prediction_targets(ids, params.kernel_width, stride)
    fwd_ctx, bwd_ctx = _shift_for_prediction(h_fwd, h_bwd)
    logits_f = fwd_ctx @ params.out_proj.T + params.out_bias
    logits_b = bwd_ctx @ params.out_proj.T + params.out_bias
    logp_f = _log_softmax(logits_f)
    logp_b = _log_softmax(logits_b)
    m = len(targets)
    pos = np.arange(m)
    objective = float(np.mean(logp_f[pos, targets] + logp_b[pos, targets]))
    cache = {
        "ids": ids, "targets": targets, "m": m,
        "conv_cache": conv_cache, "fwd_cache": fwd_cache, "bwd_cache": bwd_cache,
        "fwd_ctx": fwd_ctx, "bwd_ctx": bwd_ctx,
        "probs_f": np.exp(logp_f), "probs_b": np.exp(logp_b),
    }
    return objective, cache


def _sentence_backward(cache, params, stride, grads):
    """Accumulate gradients of the negated objective into ``grads``."""
    m = cache["m"]
    targets = cache["targets"]
    pos = np.arange(m)
    d_logits_f = cache["probs_f"].copy()
    d_logits_f[pos, targets] -= 1.0
    d_logits_f /= m
    d_logits_b = cache["probs_b"].copy()
    d_logits_b[pos, targets] -= 1.0
    d_logits_b /= m

    grads["out_proj"] += d_logits_f.T @ cache["fwd_ctx"] + d_logits_b.T @ cache["bwd_ctx"]
    grads["out_bias"] += d_logits_f.sum(axis=0) + d_logits_b.sum(axis=0)

    d_fwd_ctx = d_logits_f @ params.out_proj
    d_bwd_ctx = d_logits_b @ params.out_proj
    h = d_fwd_ctx.shape[1]
    # fwd_ctx[k] = h_fwd[k-1], bwd_ctx[k] = h_bwd[k+1]
    d_h_fwd = np.vstack([d_fwd_ctx[1:], np.zeros((1, h))])
    d_h_bwd = np.vstack([np.zeros((1, h)), d_bwd_ctx[:-1]])

    d_reduced_f, d_w_x, d_w_h, d_b = _lstm_backward(
        d_h_fwd, cache["fwd_cache"], params.fwd_w_x, params.fwd_w_h
    )
    grads["fwd_w_x"] += d_w_x
    grads["fwd_w_h"] += d_w_h
    grads["fwd_b"] += d_b

    d_reduced_b_rev, d_w_x, d_w_h, d_b = _lstm_backward(
        d_h_bwd[::-1], cache["bwd_cache"], params.bwd_w_x, params.bwd_w_h
    )
    grads["bwd_w_x"] += d_w_x
    grads["bwd_w_h"] += d_w_h
    grads["bwd_b"] += d_b

    d_reduced = d_reduced_f + d_reduced_b_rev[::-1]
    d_x, d_kernel, d_conv_bias = _conv_backward(
        d_reduced, cache["conv_cache"], params.conv_kernel, stride
    )
    grads["conv_kernel"] += d_kernel
    grads["conv_bias"] += d_conv_bias
    np.add.at(grads["embedding"], cache["ids"], d_x)


def batch_objective(batch: Sequence[Sentence], params: LmParameters, stride: int) -> float:
    """Mean per-sentence objective over the batch."""
    if not batch:
        raise ValueError("empty batch")
    return float(np.mean([_sentence_forward(ids, params, stride)[0] for ids in batch]))


def gradients(
    batch: Sequence[Sentence], params: LmParameters, stride: int
) -> tuple[float, dict[str, np.ndarray]]:
    """Objective and analytic gradients of its negation, averaged over the batch."""
    if not batch:
        raise ValueError("empty batch")
    grads = zero_gradients(params)
    total = 0.0
    for ids in batch:
        objective, cache = _sentence_forward(ids, params, stride)
        total += objective
        _sentence_backward(cache, params, stride, grads)
    scale = 1.0 / len(batch)
    for arr in grads.values():
        arr *= scale
    return total * scale, grads


# ----------------------------------------------------------------- training

@dataclass
class TrainTrace:
    """Objective after each epoch (row 0 = before any update)."""

    objectives: list[float] = field(default_factory=list)
    final_perplexity: float = float("nan")
    skipped_sentences: int = 0


def train(corpus: Sequence[Sentence], config: LmConfig) -> tuple[LmParameters, TrainTrace]:
    """Full-batch gradient descent; deterministic for a fixed seed."""
    if not corpus:
        raise ValueError("empty corpus")
    kept = [list(ids) for ids in corpus if len(ids) >= config.kernel_width]
    skipped = len(corpus) - len(kept)
    if not kept:
        raise ValueError(
            f"all {len(corpus)} sentences are shorter than the kernel width "
            f"({config.kernel_width})"
        )
    params = init_parameters(config)
    trace = TrainTrace(skipped_sentences=skipped)
    for _ in range(config.epochs):
        objective, grads = gradients(kept, params, config.stride)
        trace.objectives.append(objective)
        for name, arr in params.tensors():
            arr -= config.learning_rate * grads[name]
    trace.objectives.append(batch_objective(kept, params, config.stride))
    trace.final_perplexity = perplexity(kept, params, config.stride)
    return params, trace


def perplexity(corpus: Sequence[Sentence], params: LmParameters, stride: int) -> float:
    """exp of the negated mean forward log-probability per predicted position."""
    if not corpus:
        raise ValueError("empty corpus")
    kw = params.kernel_width
    total = 0.0
    count = 0
    for ids in corpus:
        if len(ids) < kw:
            continue
        ids = np.asarray(ids, dtype=int)
        x = params.embedding[ids]
        reduced, _ = _conv_forward(x, params.conv_kernel, params.conv_bias, stride)
        h_fwd, _ = _lstm_forward(reduced, params.fwd_w_x, params.fwd_w_h, params.fwd_b)
        fwd_ctx = np.vstack([np.zeros((1, h_fwd.shape[1])), h_fwd[:-1]])
        logp_f = _log_softmax(fwd_ctx @ params.out_proj.T + params.out_bias)
        targets = prediction_targets(ids, kw, stride)
        total += float(logp_f[np.arange(len(targets)), targets].sum())
        count += len(targets)
    if count == 0:
        raise ValueError("no sentence is long enough to score")
    return float(np.exp(-total / count))


# --------------------------------------------------------------- vocabulary

def build_vocab(sentences: Sequence[Sequence[str]]) -> dict[str, int]:
    """Token -> id map in first-occurrence order."""
    vocab: dict[str, int] = {}
    for sentence in sentences:
        for token in sentence:
            if token not in vocab:
                vocab[token] = len(vocab)
    return vocab


def encode_corpus(
    sentences: Sequence[Sequence[str]], vocab: dict[str, int]
) -> list[list[int]]:
    return [[vocab[t] for t in sentence] for sentence in sentences]


def save_vocab(vocab: dict[str, int], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token, idx in sorted(vocab.items(), key=lambda kv: kv[1]):
            fh.write(f"{token}\t{idx}\n")


def save_trace(trace: TrainTrace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch\tobjective\n")
        for epoch, objective in enumerate(trace.objectives):
            fh.write(f"{epoch}\t{objective!r}\n")


# ------------------------------------------------------------ serialisation

def save_parameters(params: LmParameters, path: str) -> None:
    """Flat text dump: per tensor a ``name rows cols`` header then row-major values."""
    with open(path, "w", encoding="utf-8") as fh:
        for name, arr in params.tensors():
            mat = arr.reshape(-1, arr.shape[-1]) if arr.ndim > 1 else arr.reshape(1, -1)
            fh.write(f"{name} {mat.shape[0]} {mat.shape[1]}\n")
            for row in mat:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_parameters(path: str) -> LmParameters:
    tensors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        name, rows, cols = lines[i].split(" ")
        rows, cols = int(rows), int(cols)
        mat = np.array(
            [[float(v) for v in lines[i + 1 + r].split(" ")] for r in range(rows)]
        )
        if mat.shape != (rows, cols):
            raise ValueError(f"{path}: tensor {name}: shape mismatch")
        tensors[name] = mat
        i += 1 + rows
    missing = [n for n in LmParameters.TENSOR_NAMES if n not in tensors]
    if missing:
        raise ValueError(f"{path}: missing tensors: {', '.join(missing)}")
    d = tensors["conv_bias"].shape[1]
    kw = tensors["conv_kernel"].shape[0] // d
    return LmParameters(
        embedding=tensors["embedding"],
        conv_kernel=tensors["conv_kernel"].reshape(kw, d, d),
        conv_bias=tensors["conv_bias"].ravel(),
        fwd_w_x=tensors["fwd_w_x"],
        fwd_w_h=tensors["fwd_w_h"],
        fwd_b=tensors["fwd_b"].ravel(),
        bwd_w_x=tensors["bwd_w_x"],
        bwd_w_h=tensors["bwd_w_h"],
        bwd_b=tensors["bwd_b"].ravel(),
        out_proj=tensors["out_proj"],
        out_bias=tensors["out_bias"].ravel(),
    )
