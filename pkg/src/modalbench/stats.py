"""Regression and inference machinery for the analyses.

Linear models use treatment coding with per-model intercepts and
per-model perplexity slopes alongside shared factor effects; marginal
means average model predictions over a balanced factor grid with the
covariate held at its sample mean, which is what makes factor levels
comparable even when models differ wildly in baseline accuracy.
Directional hypotheses get one-sided z tests, so testing "A < B" and
"B < A" yields p-values summing to one.

The keypress-study analysis is a logistic regression fit by iteratively
reweighted least squares with step-halving, with one intercept per
participant; participants whose responses are all correct or all wrong
would have divergent intercepts, so their dummy is dropped (their rows
are kept against a zero baseline) and the fit records a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

__all__ = [
    "ContrastResult",
    "CorrelationResult",
    "EmmRow",
    "HumanLogisticResult",
    "HumanTrial",
    "LinearFit",
    "LogisticFit",
    "LrtResult",
    "StatsError",
    "correlate",
    "emmeans",
    "fit_linear",
    "fit_logistic_human",
    "pairwise_contrasts",
]

MODALITY_LEVELS = ("propositional", "must", "may")
ARGFORM_LEVELS = ("disjunctive", "modus_ponens", "modus_tollens")

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


class StatsError(ValueError):
    """Raised for degenerate designs or malformed analysis input."""


@dataclass
class LinearFit:
    """An OLS fit plus the design metadata needed for marginal means."""

    coef_names: list[str]
    coef: np.ndarray
    cov: np.ndarray
    sigma2: float
    df_resid: int
    n: int
    r2: float
    models: tuple[str, ...]
    factors: dict[str, tuple[str, ...]]  # factor -> levels, reference first
    covariate_mean: float | None  # sample-mean perplexity, None if unused

    def coef_by_name(self) -> dict[str, float]:
        return dict(zip(self.coef_names, self.coef.tolist()))


def _design_row(
    model: str,
    levels: dict[str, str],
    ppl: float | None,
    models: tuple[str, ...],
    factors: dict[str, tuple[str, ...]],
    use_ppl: bool,
) -> list[float]:
    row = [1.0 if model == m else 0.0 for m in models]
    for factor, factor_levels in factors.items():
        level = levels[factor]
        row.extend(1.0 if level == lvl else 0.0 for lvl in factor_levels[1:])
    if use_ppl:
        row.extend((ppl if model == m else 0.0) for m in models)
    return row


def fit_linear(
    rows: list[dict],
    modality_levels: tuple[str, ...] = MODALITY_LEVELS,
    argform_levels: tuple[str, ...] = ARGFORM_LEVELS,
    use_perplexity: bool = True,
) -> LinearFit:
    """Fit response ~ model + modality + arg_form (+ model:perplexity).

    Each row is a mapping with keys ``model``, ``response``, ``modality``,
    ``arg_form`` and, when ``use_perplexity``, ``perplexity``.
    """
    if not rows:
        raise StatsError("no rows to fit")
    factors = {"modality": tuple(modality_levels), "arg_form": tuple(argform_levels)}
    models = tuple(sorted({str(r["model"]) for r in rows}))
    for r in rows:
        for factor, factor_levels in factors.items():
            if r[factor] not in factor_levels:
                raise StatsError(f"unknown {factor} level {r[factor]!r}")
        if use_perplexity and r.get("perplexity") is None:
            raise StatsError("row is missing a perplexity value")

    levels_list = [{f: str(r[f]) for f in factors} for r in rows]
    ppls = [float(r["perplexity"]) if use_perplexity else None for r in rows]
    X = np.array(
        [
            _design_row(str(r["model"]), lv, ppl, models, factors, use_perplexity)
            for r, lv, ppl in zip(rows, levels_list, ppls)
        ]
    )
    y = np.array([float(r["response"]) for r in rows])

    p = X.shape[1]
    if np.linalg.matrix_rank(X) < p:
        raise StatsError(
            "design matrix is rank deficient; a factor level or model has no data"
        )
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = float(resid @ resid)
    df_resid = len(rows) - p
    sigma2 = rss / df_resid if df_resid > 0 else 0.0
    xtx_inv = np.linalg.inv(X.T @ X)
    tss = float(np.sum((y - y.mean()) ** 2))
    names = [f"model[{m}]" for m in models]
    for factor, factor_levels in factors.items():
        names.extend(f"{factor}[{lvl}]" for lvl in factor_levels[1:])
    if use_perplexity:
        names.extend(f"perplexity:model[{m}]" for m in models)
    return LinearFit(
        coef_names=names,
        coef=coef,
        cov=sigma2 * xtx_inv,
        sigma2=sigma2,
        df_resid=df_resid,
        n=len(rows),
        r2=1.0 - rss / tss if tss > 0 else 1.0,
        models=models,
        factors=factors,
        covariate_mean=float(np.mean([p_ for p_ in ppls if p_ is not None]))
        if use_perplexity
        else None,
    )


def _emm_vector(fit: LinearFit, factor: str, level: str) -> np.ndarray:
    """Linear combination giving the marginal mean of one factor level.

    Averages predictions over every model and every level of the other
    factors on a balanced grid, with perplexity at its sample mean.
    """
    if factor not in fit.factors:
        raise StatsError(f"unknown factor {factor!r}")
    if level not in fit.factors[factor]:
        raise StatsError(f"unknown level {level!r} for factor {factor}")
    vec = np.zeros(len(fit.coef_names))
    pos = 0
    n_models = len(fit.models)
    for _ in fit.models:
        vec[pos] = 1.0 / n_models
        pos += 1
    for name, levels in fit.factors.items():
        for lvl in levels[1:]:
            if name == factor:
                vec[pos] = 1.0 if lvl == level else 0.0
            else:
                vec[pos] = 1.0 / len(levels)  # balanced over the other factor
            pos += 1
    if fit.covariate_mean is not None:
        for _ in fit.models:
            vec[pos] = fit.covariate_mean / n_models
            pos += 1
    return vec


@dataclass(frozen=True)
class EmmRow:
    factor: str
    level: str
    estimate: float
    se: float
    ci_low: float
    ci_high: float


def emmeans(fit: LinearFit, factor: str) -> list[EmmRow]:
    """Marginal mean, SE, and 95% CI for every level of ``factor``."""
    out = []
    for level in fit.factors[factor]:
        vec = _emm_vector(fit, factor, level)
        est = float(vec @ fit.coef)
        se = float(math.sqrt(max(vec @ fit.cov @ vec, 0.0)))
        out.append(
            EmmRow(
                factor=factor,
                level=level,
                estimate=est,
                se=se,
                ci_low=est - _Z95 * se,
                ci_high=est + _Z95 * se,
            )
        )
    return out


@dataclass(frozen=True)
class ContrastResult:
    factor: str
    smaller: str  # the hypothesis says this level's mean is lower
    larger: str
    estimate: float  # EMM(smaller) - EMM(larger)
    se: float
    z: float
    p_value: float  # one-sided, for the stated direction


def pairwise_contrasts(
    fit: LinearFit, factor: str, hypotheses: list[tuple[str, str]]
) -> list[ContrastResult]:
    """One-sided tests; each (a, b) hypothesis reads "mean(a) < mean(b)"."""
    out = []
    for smaller, larger in hypotheses:
        vec = _emm_vector(fit, factor, smaller) - _emm_vector(fit, factor, larger)
        est = float(vec @ fit.coef)
        se = float(math.sqrt(max(vec @ fit.cov @ vec, 0.0)))
        if se == 0.0:
            z = math.inf if est > 0 else -math.inf if est < 0 else 0.0
            p = 0.5 if est == 0.0 else (1.0 if est > 0 else 0.0)
        else:
            z = est / se
            p = float(sps.norm.cdf(z))
        out.append(
            ContrastResult(
                factor=factor,
                smaller=smaller,
                larger=larger,
                estimate=est,
                se=se,
                z=z,
                p_value=p,
            )
        )
    return out


@dataclass(frozen=True)
class CorrelationResult:
    n: int
    pearson_r: float
    pearson_p: float
    spearman_rho: float
    spearman_p: float


def correlate(xs: list[float], ys: list[float]) -> CorrelationResult:
    if len(xs) != len(ys):
        raise StatsError("correlate needs sequences of equal length")
    if len(xs) < 3:
        raise StatsError("correlation needs at least 3 points")
    for seq in (xs, ys):
        arr = np.asarray(seq, dtype=float)
        if np.ptp(arr) <= 1e-12 * max(1.0, float(np.max(np.abs(arr)))):
            raise StatsError("correlation is undefined for a constant sequence")
    pr = sps.pearsonr(xs, ys)
    sr = sps.spearmanr(xs, ys)
    return CorrelationResult(
        n=len(xs),
        pearson_r=float(pr.statistic),
        pearson_p=float(pr.pvalue),
        spearman_rho=float(sr.statistic),
        spearman_p=float(sr.pvalue),
    )


# --- keypress-study logistic regression -------------------------------------


@dataclass(frozen=True)
class HumanTrial:
    participant: str
    modality: str
    arg_form: str
    correct: bool


@dataclass
class LogisticFit:
    coef_names: list[str]
    coef: np.ndarray
    cov: np.ndarray
    log_likelihood: float
    n: int
    converged: bool

    def coef_by_name(self) -> dict[str, float]:
        return dict(zip(self.coef_names, self.coef.tolist()))


@dataclass(frozen=True)
class LrtResult:
    statistic: float
    df: int
    p_value: float


@dataclass
class HumanLogisticResult:
    fit: LogisticFit
    argform_lrt: LrtResult
    dropped_participants: tuple[str, ...]


def _log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    eta = np.clip(X @ beta, -30.0, 30.0)
    mu = 1.0 / (1.0 + np.exp(-eta))
    mu = np.clip(mu, 1e-12, 1.0 - 1e-12)
    return float(y @ np.log(mu) + (1.0 - y) @ np.log(1.0 - mu))


def _fit_logistic(
    X: np.ndarray, y: np.ndarray, names: list[str], max_iter: int = 100, tol: float = 1e-10
) -> LogisticFit:
    n, p = X.shape
    if np.linalg.matrix_rank(X) < p:
        raise StatsError("logistic design matrix is rank deficient")
    beta = np.zeros(p)
    ll = _log_likelihood(X, y, beta)
    converged = False
    for _ in range(max_iter):
        eta = np.clip(X @ beta, -30.0, 30.0)
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = np.clip(mu * (1.0 - mu), 1e-10, None)
        z = eta + (y - mu) / w
        xtw = X.T * w
        try:
            proposal = np.linalg.solve(xtw @ X, xtw @ z)
        except np.linalg.LinAlgError as exc:
            raise StatsError(f"IRLS normal equations are singular: {exc}") from exc
        # step-halving: never accept a step that lowers the likelihood
        step = proposal - beta
        ll_new = _log_likelihood(X, y, beta + step)
        halvings = 0
        while ll_new < ll - 1e-12 and halvings < 30:
            step *= 0.5
            ll_new = _log_likelihood(X, y, beta + step)
            halvings += 1
        beta = beta + step
        if abs(ll_new - ll) < tol:
            ll = ll_new
            converged = True
            break
        ll = ll_new
    eta = np.clip(X @ beta, -30.0, 30.0)
    mu = 1.0 / (1.0 + np.exp(-eta))
    w = np.clip(mu * (1.0 - mu), 1e-10, None)
    cov = np.linalg.inv((X.T * w) @ X)
    return LogisticFit(
        coef_names=names, coef=beta, cov=cov, log_likelihood=ll, n=n, converged=converged
    )


def fit_logistic_human(
    trials: list[HumanTrial],
    modality_levels: tuple[str, ...] = MODALITY_LEVELS,
    argform_levels: tuple[str, ...] = ARGFORM_LEVELS,
) -> HumanLogisticResult:
    """Fit correct ~ participant + modality + arg_form and test arg_form.

    Returns the full fit together with a likelihood-ratio test comparing
    it to the model without the argument-form terms.
    """
    if not trials:
        raise StatsError("no trials to fit")
    factors = {"modality": tuple(modality_levels), "arg_form": tuple(argform_levels)}
    for t in trials:
        if t.modality not in factors["modality"]:
            raise StatsError(f"unknown modality level {t.modality!r}")
        if t.arg_form not in factors["arg_form"]:
            raise StatsError(f"unknown arg_form level {t.arg_form!r}")

    participants = sorted({t.participant for t in trials})
    outcomes: dict[str, set[bool]] = {p_: set() for p_ in participants}
    for t in trials:
        outcomes[t.participant].add(t.correct)
    dropped = tuple(p_ for p_ in participants if len(outcomes[p_]) == 1)
    kept = [p_ for p_ in participants if p_ not in dropped]
    if dropped:
        warnings.warn(
            "participant intercepts dropped for all-correct/all-wrong responders: "
            + ", ".join(dropped),
            stacklevel=2,
        )

    def build(include_argform: bool) -> tuple[np.ndarray, list[str]]:
        names = [f"participant[{p_}]" for p_ in kept]
        names += [f"modality[{lvl}]" for lvl in factors["modality"][1:]]
        if include_argform:
            names += [f"arg_form[{lvl}]" for lvl in factors["arg_form"][1:]]
        rows = []
        for t in trials:
            row = [1.0 if t.participant == p_ else 0.0 for p_ in kept]
            row += [1.0 if t.modality == lvl else 0.0 for lvl in factors["modality"][1:]]
            if include_argform:
                row += [1.0 if t.arg_form == lvl else 0.0 for lvl in factors["arg_form"][1:]]
            rows.append(row)
        return np.array(rows), names

    y = np.array([1.0 if t.correct else 0.0 for t in trials])
    X_full, names_full = build(include_argform=True)
    X_red, names_red = build(include_argform=False)
    full = _fit_logistic(X_full, y, names_full)
    reduced = _fit_logistic(X_red, y, names_red)
    df = len(names_full) - len(names_red)
    stat = max(0.0, 2.0 * (full.log_likelihood - reduced.log_likelihood))
    lrt = LrtResult(statistic=stat, df=df, p_value=float(sps.chi2.sf(stat, df)))
    return HumanLogisticResult(fit=full, argform_lrt=lrt, dropped_participants=dropped)
