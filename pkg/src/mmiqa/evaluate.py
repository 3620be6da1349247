"""Statistical evaluation against human opinion scores.

Provides Spearman rank correlation (average ranks, so ties are handled),
Pearson correlation after a five-parameter logistic remapping, bootstrap
confidence intervals, the paired clean/distorted cue-direction
diagnostic, and the usual classification metrics on its confusion table.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit
from scipy.stats import rankdata

from .cues import CueVector, extract_cues
from .distort import Family
from .errors import DegenerateInput
from .score import FusionConfig, blur_percent, lowres_percent

OTHER_LABEL = "other"

SIMPLEX_MAX_ITER = 2000  # total simplex iteration budget per fit
_SIMPLEX_CHUNK = 500     # budget slice per descent; fresh simplex each slice


@dataclass(frozen=True)
class PredictionRecord:
    """One (image id, model score, human score) triple."""

    id: str
    predicted: float
    mos: float

    def __post_init__(self):
        if not (np.isfinite(self.predicted) and np.isfinite(self.mos)):
            raise ValueError(f"scores must be finite: {self}")


def _arrays(records) -> tuple[np.ndarray, np.ndarray]:
    records = list(records)
    if len(records) < 2:
        raise DegenerateInput(f"need at least 2 records, got {len(records)}")
    pred = np.array([r.predicted for r in records], dtype=np.float64)
    mos = np.array([r.mos for r in records], dtype=np.float64)
    return pred, mos


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom == 0.0:
        raise DegenerateInput("constant variable; correlation undefined")
    return float((a * b).sum() / denom)


def srcc(records) -> float:
    """Spearman rank correlation between predictions and opinion scores.

    Computed as the Pearson correlation of average-ranked values; with no
    ties this equals 1 - 6 * sum(d^2) / (n * (n^2 - 1)) exactly.
    """
    pred, mos = _arrays(records)
    if np.ptp(pred) == 0 or np.ptp(mos) == 0:
        raise DegenerateInput("constant predictions or scores; SRCC undefined")
    return _pearson(rankdata(pred), rankdata(mos))


@dataclass(frozen=True)
class LogisticParams:
    """Five-parameter logistic mapping from model scores to the MOS scale.

    g(x) = beta1 * (1/2 - 1/(1 + exp(beta2 * (x - beta3)))) + beta4 * x + beta5

    used_fallback marks parameters from the least-squares-line fallback
    (beta1 = 0) taken when the simplex descent failed to reduce the error.
    """

    beta1: float
    beta2: float
    beta3: float
    beta4: float
    beta5: float
    used_fallback: bool = False

    def __post_init__(self):
        betas = (self.beta1, self.beta2, self.beta3, self.beta4, self.beta5)
        if not all(np.isfinite(b) for b in betas):
            raise ValueError(f"parameters must be finite, got {betas}")
        if self.beta2 == 0:
            raise ValueError("beta2 must be nonzero")

    def __call__(self, x):
        u = self.beta2 * (np.asarray(x, dtype=np.float64) - self.beta3)
        return self.beta1 * (expit(u) - 0.5) + self.beta4 * x + self.beta5


def _fit_mask(ids: list[str], fraction: float) -> np.ndarray:
    """Deterministic id-hash selection of the fitting subset."""
    u = np.array(
        [
            int.from_bytes(hashlib.sha256(i.encode("utf-8")).digest()[:8], "big") / 2**64
            for i in ids
        ]
    )
    return u < fraction


def fit_logistic5(records, holdout_fraction: float = 0.2) -> LogisticParams:
    """Fit the 5-parameter logistic on a deterministic held-out subset.

    The subset is chosen by hashing record ids (default 20%); if it is too
    small or degenerate, all records are used.  Minimization is
    derivative-free simplex descent under a total budget of 2000
    iterations (spent in slices, each restarting the simplex from the best
    point so far) from the initialization
    beta = (range(mos), 1/std(pred), mean(pred), 0, mean(mos)).  If the
    descent fails to reduce the initial error, the least-squares line is
    returned with used_fallback set.
    """
    records = sorted(records, key=lambda r: r.id)
    if len(records) < 10:
        raise DegenerateInput(f"need at least 10 records, got {len(records)}")
    pred, mos = _arrays(records)
    if np.ptp(pred) == 0 or np.ptp(mos) == 0:
        raise DegenerateInput("constant predictions or scores; fit undefined")

    mask = _fit_mask([r.id for r in records], holdout_fraction)
    x, y = pred[mask], mos[mask]
    if len(x) < 5 or np.ptp(x) == 0 or np.ptp(y) == 0:
        x, y = pred, mos

    init = np.array(
        [np.ptp(y), 1.0 / np.std(pred), np.mean(pred), 0.0, np.mean(y)]
    )
    # Per-parameter steps for the first simplex; scipy's default (5% of the
    # start value) is far too small for the slope and rate parameters.
    steps = np.array([
        0.5 * abs(init[0]) + 1.0,
        init[1],
        0.25 * float(np.std(pred)) + 1.0,
        np.ptp(y) / (np.ptp(pred) + 1e-12),
        0.5 * abs(init[4]) + 1.0,
    ])

    def sse(beta):
        u = beta[1] * (x - beta[2])
        g = beta[0] * (expit(u) - 0.5) + beta[3] * x + beta[4]
        r = g - y
        return float(r @ r)

    init_err = sse(init)
    best, best_err = init, init_err
    # scipy's simplex tolerances are absolute; scale them to the problem
    xatol = 1e-6 * max(1.0, float(np.max(np.abs(init))))
    fatol = 1e-10 * max(1.0, init_err)
    budget = SIMPLEX_MAX_ITER
    first_simplex = np.vstack([init] + [init + np.eye(5)[i] * steps[i] for i in range(5)])
    while budget > 0:
        options = {
            "maxiter": min(budget, _SIMPLEX_CHUNK),
            "maxfev": 2 * min(budget, _SIMPLEX_CHUNK),
            "xatol": xatol,
            "fatol": fatol,
        }
        if first_simplex is not None:
            options["initial_simplex"] = first_simplex
            first_simplex = None
        res = minimize(sse, best, method="Nelder-Mead", options=options)
        budget -= max(int(res.nit), 1)
        improvement = best_err - res.fun
        if np.all(np.isfinite(res.x)) and res.fun < best_err:
            best, best_err = res.x, float(res.fun)
        if res.success or improvement <= fatol:
            # converged, or another descent no longer buys anything (the
            # error surface can be flat along a steep-sigmoid/line ridge)
            break

    if best_err >= init_err or best[1] == 0.0:
        slope, intercept = np.polyfit(x, y, 1)
        return LogisticParams(0.0, 1.0, 0.0, float(slope), float(intercept),
                              used_fallback=True)
    return LogisticParams(*(float(b) for b in best))


def plcc(records, params: LogisticParams) -> float:
    """Pearson correlation between logistic-mapped predictions and MOS."""
    pred, mos = _arrays(records)
    return _pearson(params(pred), mos)


@dataclass(frozen=True)
class CorrelationReport:
    """Bootstrap point estimates (means) with empirical 95% intervals."""

    srcc: float
    plcc: float
    srcc_ci95: tuple[float, float]
    plcc_ci95: tuple[float, float]
    n: int
    n_bootstrap: int
    seed: int
    n_degenerate: int = 0


def _bootstrap_iteration(records, seed: int, it: int, holdout_fraction: float):
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), it]))
    )
    sample = [records[i] for i in rng.integers(0, len(records), size=len(records))]
    try:
        s = srcc(sample)
        params = fit_logistic5(sample, holdout_fraction)
        p = plcc(sample, params)
    except DegenerateInput:
        return None
    return s, p


_POOL_RECORDS: list = []


def _pool_init(records) -> None:
    global _POOL_RECORDS
    _POOL_RECORDS = records


def _pool_iteration(args):
    seed, it, holdout_fraction = args
    return _bootstrap_iteration(_POOL_RECORDS, seed, it, holdout_fraction)


def bootstrap_ci(
    records,
    n_iter: int = 100,
    seed: int = 0,
    holdout_fraction: float = 0.2,
    workers: int = 1,
) -> CorrelationReport:
    """Resample with replacement, recompute SRCC/PLCC, report means + CIs.

    The logistic is refit on every resample.  Iteration i draws from a
    Philox stream keyed by (seed, i), so results are independent of
    execution order (and of ``workers``) and reproducible.  Degenerate
    resamples are skipped and counted; more than 50% degenerate is an
    error.
    """
    records = list(records)
    n = len(records)
    if n < 10:
        raise DegenerateInput(f"need at least 10 records, got {n}")
    tasks = [(int(seed), it, holdout_fraction) for it in range(n_iter)]
    if workers > 1 and n_iter > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(
            max_workers=workers, initializer=_pool_init, initargs=(records,)
        ) as pool:
            results = list(pool.map(_pool_iteration, tasks))
    else:
        results = [
            _bootstrap_iteration(records, seed, it, holdout_fraction)
            for _, it, _ in tasks
        ]
    srcc_vals = [r[0] for r in results if r is not None]
    plcc_vals = [r[1] for r in results if r is not None]
    degenerate = n_iter - len(srcc_vals)
    if degenerate > n_iter // 2:
        raise DegenerateInput(
            f"{degenerate}/{n_iter} bootstrap resamples were degenerate"
        )
    srcc_arr = np.array(srcc_vals)
    plcc_arr = np.array(plcc_vals)
    s_lo, s_hi = np.percentile(srcc_arr, [2.5, 97.5])
    p_lo, p_hi = np.percentile(plcc_arr, [2.5, 97.5])
    return CorrelationReport(
        srcc=float(srcc_arr.mean()),
        plcc=float(plcc_arr.mean()),
        srcc_ci95=(float(s_lo), float(s_hi)),
        plcc_ci95=(float(p_lo), float(p_hi)),
        n=n,
        n_bootstrap=n_iter,
        seed=int(seed),
        n_degenerate=degenerate,
    )


# --- paired clean/distorted diagnostic -----------------------------------

def family_cues(img: np.ndarray, cfg: FusionConfig | None = None) -> dict[Family, float]:
    """The cue tracked per family: blur -> Blur%, lowres -> LowRes%,
    noise -> N, haze -> H, under -> U%, over -> O%."""
    cfg = cfg or FusionConfig()
    c: CueVector = extract_cues(img, cfg.canny, cfg.exposure, cfg.haze_side)
    return {
        Family.BLUR: blur_percent(c, cfg),
        Family.LOWRES: lowres_percent(c, cfg),
        Family.NOISE: c.noise,
        Family.HAZE: c.haze,
        Family.UNDER: c.under_pct,
        Family.OVER: c.over_pct,
    }


@dataclass
class ConfusionTable:
    """Per-class TP/FP/FN tallies over the six families plus 'other'."""

    classes: tuple[str, ...] = tuple(f.value for f in Family) + (OTHER_LABEL,)
    tp: dict = field(default_factory=dict)
    fp: dict = field(default_factory=dict)
    fn: dict = field(default_factory=dict)
    n_true: dict = field(default_factory=dict)
    n_total: int = 0

    def __post_init__(self):
        for c in self.classes:
            self.tp.setdefault(c, 0)
            self.fp.setdefault(c, 0)
            self.fn.setdefault(c, 0)
            self.n_true.setdefault(c, 0)

    def add(self, true_label: str, predicted_label: str) -> None:
        self.n_total += 1
        self.n_true[true_label] += 1
        if predicted_label == true_label:
            self.tp[true_label] += 1
        else:
            self.fn[true_label] += 1
            self.fp[predicted_label] += 1


def delta_diagnostic(
    pairs, cfg: FusionConfig | None = None, mode: str = "literal"
) -> ConfusionTable:
    """Check that each distortion moved its own cue in the right direction.

    ``pairs`` yields (clean RGB, distorted RGB, family) triples.  In the
    literal protocol only the labelled family's cue is consulted: the pair
    is predicted as its label when delta = cue(distorted) - cue(clean) > 0,
    else as 'other'.  Under this protocol no cross-family false positives
    can occur.  mode='argmax' instead predicts the family with the largest
    positive delta over all six cues; the cues have different units, so
    treat that mode as an exploratory extrapolation only.
    """
    if mode not in ("literal", "argmax"):
        raise ValueError(f"mode must be 'literal' or 'argmax', got {mode!r}")
    cfg = cfg or FusionConfig()
    table = ConfusionTable()
    for clean, distorted, family in pairs:
        family = Family(family)
        m0 = family_cues(clean, cfg)
        md = family_cues(distorted, cfg)
        if mode == "literal":
            delta = md[family] - m0[family]
            predicted = family.value if delta > 0 else OTHER_LABEL
        else:
            deltas = {f: md[f] - m0[f] for f in Family}
            best = max(deltas, key=lambda f: deltas[f])
            predicted = best.value if deltas[best] > 0 else OTHER_LABEL
        table.add(family.value, predicted)
    return table


@dataclass(frozen=True)
class ClassReport:
    name: str
    n: int
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassificationMetrics:
    """Accuracy plus per-class and averaged precision/recall/F1.

    Per-class values whose denominator is zero are reported as 0 and
    counted in the undefined_* fields.  Macro and weighted averages run
    over classes that actually occur (n_true > 0).
    """

    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_f1: float
    undefined_precision: int
    undefined_recall: int
    undefined_f1: int
    n: int
    per_class: tuple[ClassReport, ...]


def classification_metrics(table: ConfusionTable) -> ClassificationMetrics:
    """Accuracy, precision, recall, F1 (per class, macro, and weighted)."""
    if table.n_total < 1:
        raise DegenerateInput("empty confusion table")
    reports = []
    undef_p = undef_r = undef_f = 0
    for c in table.classes:
        tp, fp, fn = table.tp[c], table.fp[c], table.fn[c]
        n_c = table.n_true[c]
        if n_c == 0 and tp + fp == 0:
            continue  # class never occurred and was never predicted
        if tp + fp > 0:
            precision = tp / (tp + fp)
        else:
            precision = 0.0
            undef_p += 1
        if tp + fn > 0:
            recall = tp / (tp + fn)
        else:
            recall = 0.0
            undef_r += 1
        if precision + recall > 0:
            f1 = 2.0 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
            undef_f += 1
        reports.append(ClassReport(c, n_c, tp, fp, fn, precision, recall, f1))

    occurring = [r for r in reports if r.n > 0]
    k = len(occurring)
    if k == 0:
        raise DegenerateInput("no class with true samples")
    accuracy = sum(r.tp for r in reports) / table.n_total
    return ClassificationMetrics(
        accuracy=accuracy,
        macro_precision=sum(r.precision for r in occurring) / k,
        macro_recall=sum(r.recall for r in occurring) / k,
        macro_f1=sum(r.f1 for r in occurring) / k,
        weighted_f1=sum(r.n * r.f1 for r in occurring) / table.n_total,
        undefined_precision=undef_p,
        undefined_recall=undef_r,
        undefined_f1=undef_f,
        n=table.n_total,
        per_class=tuple(reports),
    )
