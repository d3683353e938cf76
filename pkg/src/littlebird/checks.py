"""Oracle suites behind `littlebird check`.

Each suite compares an efficient code path against an independent reference
and returns a CheckResult; none of them raises on a failed comparison.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from littlebird.attention import (
    AttentionSpec,
    AttentionWeights,
    ScoreAudit,
    complexity_audit,
    dense_score_count,
    usw_attention_blocked,
    usw_attention_dense,
)
from littlebird.config import ModelConfig
from littlebird.exceptions import ConfigurationError
from littlebird.logging import get_logger
from littlebird.model import DenseEncoder, EncoderModel
from littlebird.numkit import ParamStore, Tensor, grad_check, ops
from littlebird.posbias import BiasSlopes, PositionIds, apply_gaps
from littlebird.train.padding import pi_equivalence_check
from littlebird.train.spans import SpanCluster, find_recurring_spans

logger = get_logger(__name__)

EQUIVALENCE_TOLERANCE = 1e-8
GRADIENT_TOLERANCE = 1e-4


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one oracle suite."""

    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name} value={self.value:.3e} threshold={self.threshold:.3e}"
        return f"{text} {self.detail}" if self.detail else text


def check_blocked_equivalence(rng: np.random.Generator, configs: int = 20) -> CheckResult:
    """Blocked USW attention against the dense reference over random geometries."""
    worst = 0.0
    for _ in range(configs):
        b = int(rng.choice([16, 32, 64]))
        s = int(rng.choice([0, 16, 64]))
        heads = int(rng.choice([1, 4]))
        num_blocks = int(rng.integers(1, min(8, 512 // b) + 1))
        length = num_blocks * b
        spec = AttentionSpec(heads=heads, head_dim=4, block_size=b, pack_size=s)
        weights = AttentionWeights(ParamStore(), "attn", spec.model_dim, rng, init_std=0.3)
        slopes = BiasSlopes.fixed(
            heads,
            alpha=rng.normal(size=heads),
            beta=rng.uniform(0.0, 0.5, size=heads),
            gamma=rng.uniform(0.0, 0.5, size=heads),
        )
        boundaries = rng.choice(length, size=min(4, length), replace=False)
        gaps = {int(k): int(rng.integers(0, 9)) for k in boundaries}
        real = rng.random(length) > 0.1
        real[0] = True
        pos = apply_gaps(PositionIds(np.arange(length), real), gaps)
        x = Tensor(rng.normal(size=(length, spec.model_dim)))
        packed = Tensor(rng.normal(size=(s, spec.model_dim))) if s else None

        dense = usw_attention_dense(x, packed, pos, slopes, spec, weights).output.data
        blocked = usw_attention_blocked(x, packed, pos, slopes, spec, weights).output.data
        worst = max(worst, float(np.max(np.abs(dense - blocked))))
    return CheckResult(
        "blocked_equivalence", worst < EQUIVALENCE_TOLERANCE, worst, EQUIVALENCE_TOLERANCE,
        f"configs={configs}",
    )


def check_gradients(rng: np.random.Generator, entries: int = 4) -> CheckResult:
    """Analytic gradients of a 2-layer LittleBird model against central differences."""
    config = ModelConfig(
        vocab_size=16, d_model=8, heads=2, layers=2, block_size=4, pack_size=2, init_std=0.3
    )
    model = EncoderModel(config, seed=int(rng.integers(2**31)))
    for name, param in model.store.items():
        if name.endswith((".alpha", ".beta", ".gamma")):
            param.data[...] = rng.uniform(0.05, 0.5, size=param.shape)
    tokens = rng.integers(1, config.vocab_size, size=10)
    weights = Tensor(rng.normal(size=(tokens.size, config.d_model)))

    def loss() -> Tensor:
        return ops.sum(model.encode(tokens, impl="blocked").hidden * weights)

    worst = grad_check(loss, model.store, eps=1e-4, max_entries=entries, rng=rng)
    return CheckResult(
        "gradients", worst < GRADIENT_TOLERANCE, worst, GRADIENT_TOLERANCE,
        f"parameters={len(model.store)}",
    )


def check_pi_equivalence(rng: np.random.Generator, trials: int = 5) -> CheckResult:
    """Physical [PAD] insertion against position-id remapping, dense and blocked paths."""
    worst = 0.0
    dense_config = ModelConfig(
        vocab_size=32, d_model=16, heads=2, layers=2, block_size=16, pack_size=4
    )
    dense = DenseEncoder(dense_config, seed=1)
    for _ in range(trials):
        tokens = rng.integers(1, dense_config.vocab_size, size=64)
        boundaries = rng.choice(np.arange(1, 64), size=6, replace=False)
        gaps = {int(k): int(rng.integers(0, 6)) for k in boundaries}
        worst = max(worst, pi_equivalence_check(dense, tokens, gaps))

    # at most two blocks of 32: every real token keeps all real window keys
    sparse_config = dense_config.model_copy(update={"block_size": 32})
    sparse = EncoderModel(sparse_config, seed=2)
    for _ in range(trials):
        tokens = rng.integers(1, sparse_config.vocab_size, size=16)
        boundaries = rng.choice(np.arange(1, 16), size=3, replace=False)
        gaps = {int(k): int(rng.integers(0, 17)) for k in boundaries}
        for impl in ("dense", "blocked"):
            worst = max(worst, pi_equivalence_check(sparse, tokens, gaps, impl=impl))
    return CheckResult(
        "pi_equivalence", worst < EQUIVALENCE_TOLERANCE, worst, EQUIVALENCE_TOLERANCE,
        f"trials={trials}",
    )


def _audited(model: EncoderModel | DenseEncoder, length: int, rng: np.random.Generator) -> int:
    audit = ScoreAudit()
    tokens = rng.integers(1, model.config.vocab_size, size=length)
    if isinstance(model, EncoderModel):
        model.encode(tokens, impl="blocked", audit=audit)
    else:
        model.encode(tokens, audit=audit)
    return audit.count


def check_complexity(
    rng: np.random.Generator, lengths: Sequence[int] = (1024, 2048)
) -> CheckResult:
    """Score counts stay under the linear bound and double with the length."""
    config = ModelConfig(vocab_size=16, d_model=8, heads=2, layers=1, block_size=64, pack_size=64)
    spec = AttentionSpec.from_model_config(config)
    sparse = EncoderModel(config, seed=3)
    dense = DenseEncoder(config, seed=3)
    short, long = lengths[0], lengths[-1]

    sparse_counts = [_audited(sparse, n, rng) for n in (short, long)]
    within = all(
        c <= complexity_audit(spec, n) for c, n in zip(sparse_counts, (short, long), strict=True)
    )
    sparse_ratio = sparse_counts[1] / sparse_counts[0]
    half = short // 2
    dense_counts = [_audited(dense, n, rng) for n in (half, short)]
    exact = dense_counts == [dense_score_count(half), dense_score_count(short)]
    dense_ratio = dense_counts[1] / dense_counts[0]

    factor = long / short
    passed = (
        within
        and exact
        and 0.95 * factor <= sparse_ratio <= 1.05 * factor
        and 3.9 <= dense_ratio <= 4.1
    )
    return CheckResult(
        "complexity", passed, sparse_ratio, factor,
        f"dense_ratio={dense_ratio:.3f} within_bound={within}",
    )


def brute_force_recurring_spans(
    tokens: Sequence[int],
    min_len: int = 2,
    budget: int | None = None,
    exclude: Iterable[int] = (),
) -> list[SpanCluster]:
    """
    All-pairs reference for `find_recurring_spans`.

    Compares every free window against every later window directly instead
    of indexing n-grams.
    """
    seq = list(tokens)
    excluded = set(exclude)
    free = [t not in excluded for t in seq]
    limit = len(seq) if budget is None else budget
    clusters: list[SpanCluster] = []
    if limit <= 0:
        return clusters
    n = len(seq)
    for length in range(n // 2, min_len - 1, -1):
        for i in range(n - length + 1):
            if not all(free[i : i + length]):
                continue
            found = [(i, i + length - 1)]
            for j in range(i + length, n - length + 1):
                if j <= found[-1][1]:
                    continue
                if seq[j : j + length] == seq[i : i + length] and all(free[j : j + length]):
                    found.append((j, j + length - 1))
            if len(found) < 2:
                continue
            for start, end in found:
                free[start : end + 1] = [False] * length
            clusters.append(SpanCluster(tuple(seq[i : i + length]), tuple(found)))
            if len(clusters) >= limit:
                return clusters
    return clusters


def check_span_finder(rng: np.random.Generator, documents: int = 100) -> CheckResult:
    """find_recurring_spans against the all-pairs reference on short random documents."""
    mismatches = 0
    for _ in range(documents):
        doc = [int(t) for t in rng.integers(0, 5, size=int(rng.integers(2, 65)))]
        budget = int(rng.integers(1, 8))
        exclude = (0,)
        if find_recurring_spans(doc, 2, budget, exclude) != brute_force_recurring_spans(
            doc, 2, budget, exclude
        ):
            mismatches += 1
    return CheckResult(
        "span_finder", mismatches == 0, float(mismatches), 0.0, f"documents={documents}"
    )


SUITES: dict[str, Callable[[np.random.Generator], CheckResult]] = {
    "blocked_equivalence": check_blocked_equivalence,
    "gradients": check_gradients,
    "pi_equivalence": check_pi_equivalence,
    "complexity": check_complexity,
    "span_finder": check_span_finder,
}


def run_checks(seed: int = 0, suites: Sequence[str] | None = None) -> list[CheckResult]:
    """
    Run the named suites (all by default), each with its own seeded generator.

    Raises:
        ConfigurationError: On an unknown suite name.
    """
    names = list(suites) if suites else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigurationError(f"Unknown check suites: {', '.join(unknown)}", known=list(SUITES))
    results = []
    for index, name in enumerate(names):
        result = SUITES[name](np.random.default_rng([seed, index]))
        logger.info("check_finished", suite=name, passed=result.passed, value=result.value)
        results.append(result)
    return results
