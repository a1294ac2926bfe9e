"""Joining scored responses with their items and writing analysis outputs.

Every CSV written here starts with ``#`` comment lines recording where
the numbers came from (dataset seed and families, models, design
choices), so a table can be traced back to its run without a separate
log.  Output is deterministic: models sorted, fixed column orders, fixed
float formatting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .dataset import meta_path_for, read_items
from .metrics import mean, normalized_yes_probability
from .realize import QuestionItem
from .runner import Response, read_results
from .stats import (
    ARGFORM_LEVELS,
    MODALITY_LEVELS,
    ContrastResult,
    CorrelationResult,
    EmmRow,
    HumanLogisticResult,
    HumanTrial,
    LinearFit,
    StatsError,
    correlate,
    emmeans,
    fit_linear,
    fit_logistic_human,
    pairwise_contrasts,
)

__all__ = [
    "ObservationRow",
    "ReportError",
    "analyze",
    "assemble_observations",
    "group_table",
    "load_human_trials",
    "run_linear_analysis",
    "write_group_table_csv",
]


class ReportError(ValueError):
    """Raised when responses and items cannot be joined coherently."""


@dataclass(frozen=True)
class ObservationRow:
    """One scored item with everything the analyses condition on."""

    model: str
    item_id: str
    form_id: str
    family: str
    modality: str
    arg_form: str
    ground_truth: str
    lexicon_kind: str
    valid_form: bool
    soft_accuracy: float
    greedy_correct: bool
    yes_probability: float
    perplexity: float | None


def assemble_observations(
    items: list[QuestionItem], responses: list[Response]
) -> list[ObservationRow]:
    by_id = {item.item_id: item for item in items}
    out = []
    for resp in responses:
        item = by_id.get(resp.item_id)
        if item is None:
            raise ReportError(f"response for unknown item {resp.item_id}")
        out.append(
            ObservationRow(
                model=resp.model,
                item_id=item.item_id,
                form_id=item.form_id,
                family=item.family,
                modality=item.modality,
                arg_form=item.arg_form,
                ground_truth=item.ground_truth,
                lexicon_kind=item.lexicon_kind,
                valid_form=item.ground_truth == "Yes",
                soft_accuracy=resp.soft_accuracy,
                greedy_correct=resp.greedy_correct,
                yes_probability=normalized_yes_probability(resp.logp_yes, resp.logp_no),
                perplexity=resp.prompt_perplexity,
            )
        )
    return out


# --- per-model accuracy table ------------------------------------------------

_MODALITY_COLUMNS = list(MODALITY_LEVELS)
_ARGFORM_COLUMNS = [
    f"{arg}_{tag}" for arg in ARGFORM_LEVELS for tag in ("entail", "fallacy")
]
GROUP_COLUMNS = ["overall"] + _MODALITY_COLUMNS + _ARGFORM_COLUMNS


@dataclass(frozen=True)
class GroupTable:
    models: tuple[str, ...]
    columns: tuple[str, ...]
    values: dict[tuple[str, str], float]  # (model, column) -> mean soft accuracy
    flags: frozenset[tuple[str, str]]  # row-wise maxima within a factor family


def group_table(observations: list[ObservationRow]) -> GroupTable:
    """Mean soft accuracy per model: overall, by modality, by form x validity.

    Built over the main question family (three modalities crossed with the
    three argument forms, entailments and fallacies); the per-family maxima
    of each row are flagged.
    """
    obs = [o for o in observations if o.family == "main24"]
    if not obs:
        raise ReportError("no main-family observations to tabulate")
    models = tuple(sorted({o.model for o in obs}))
    values: dict[tuple[str, str], float] = {}
    flags: set[tuple[str, str]] = set()
    for model in models:
        mine = [o for o in obs if o.model == model]
        cells: dict[str, list[float]] = {col: [] for col in GROUP_COLUMNS}
        for o in mine:
            cells["overall"].append(o.soft_accuracy)
            cells[o.modality].append(o.soft_accuracy)
            tag = "entail" if o.valid_form else "fallacy"
            cells[f"{o.arg_form}_{tag}"].append(o.soft_accuracy)
        for col, xs in cells.items():
            if not xs:
                raise ReportError(f"model {model} has no observations for {col}")
            values[(model, col)] = mean(xs)
        for family in (_MODALITY_COLUMNS, _ARGFORM_COLUMNS):
            best = max(family, key=lambda col: values[(model, col)])
            flags.add((model, best))
    return GroupTable(
        models=models,
        columns=tuple(GROUP_COLUMNS),
        values=values,
        flags=frozenset(flags),
    )


def _write_csv(path: Path, comments: list[str], header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_group_table_csv(table: GroupTable, path: str | Path, comments: list[str]) -> None:
    rows = []
    for model in table.models:
        row = [model]
        for col in table.columns:
            cell = f"{table.values[(model, col)]:.4f}"
            if (model, col) in table.flags:
                cell += "*"
            row.append(cell)
        rows.append(row)
    _write_csv(Path(path), comments, ["model", *table.columns], rows)


# --- regressions -------------------------------------------------------------

DEFAULT_HYPOTHESES: dict[str, list[tuple[str, str]]] = {
    # each (a, b) reads "marginal mean of a is below b"
    "modality": [
        ("propositional", "may"),
        ("must", "propositional"),
        ("must", "may"),
    ],
    "arg_form": [
        ("disjunctive", "modus_ponens"),
        ("modus_tollens", "modus_ponens"),
        ("modus_tollens", "disjunctive"),
    ],
}


@dataclass
class LinearAnalysis:
    response_kind: str  # "accuracy" | "yes_rate"
    fit: LinearFit
    emms: dict[str, list[EmmRow]]
    contrasts: dict[str, list[ContrastResult]]
    n_rows: int
    used_perplexity: bool


def run_linear_analysis(
    observations: list[ObservationRow], response_kind: str
) -> LinearAnalysis:
    """Fit the factor regression over the main family.

    ``accuracy`` regresses the renormalized probability of the verified
    answer over entailment items only; ``yes_rate`` regresses the
    renormalized probability of answering Yes over all items, which keeps
    the fallacies and exposes response bias.
    """
    main = [o for o in observations if o.family == "main24"]
    if response_kind == "accuracy":
        pool = [o for o in main if o.valid_form]
    elif response_kind == "yes_rate":
        pool = main
    else:
        raise ReportError(f"unknown response kind {response_kind!r}")
    if not pool:
        raise ReportError(f"no observations for the {response_kind} regression")
    use_ppl = all(o.perplexity is not None for o in pool)
    if use_ppl:
        # a constant covariate within any model would be collinear with that
        # model's intercept, so it carries no usable information
        for model in {o.model for o in pool}:
            ppls = [o.perplexity for o in pool if o.model == model]
            if max(ppls) - min(ppls) < 1e-12:
                use_ppl = False
                break
    rows = [
        {
            "model": o.model,
            "modality": o.modality,
            "arg_form": o.arg_form,
            "perplexity": o.perplexity,
            "response": o.soft_accuracy if response_kind == "accuracy" else o.yes_probability,
        }
        for o in pool
    ]
    fit = fit_linear(rows, use_perplexity=use_ppl)
    emms = {factor: emmeans(fit, factor) for factor in fit.factors}
    contrasts = {
        factor: pairwise_contrasts(fit, factor, DEFAULT_HYPOTHESES[factor])
        for factor in fit.factors
    }
    return LinearAnalysis(
        response_kind=response_kind,
        fit=fit,
        emms=emms,
        contrasts=contrasts,
        n_rows=len(rows),
        used_perplexity=use_ppl,
    )


def write_linear_analysis_csv(
    analysis: LinearAnalysis, path: str | Path, comments: list[str]
) -> None:
    design = [
        f"response: {analysis.response_kind}; n_rows: {analysis.n_rows}",
        "reference levels: modality=propositional, arg_form=disjunctive",
        "per-model intercepts"
        + ("; per-model perplexity slopes, covariate at sample mean" if analysis.used_perplexity else "; no perplexity covariate"),
        f"r_squared: {analysis.fit.r2:.6f}",
    ]
    header = ["section", "term", "estimate", "se", "z", "p_value", "ci_low", "ci_high"]
    rows: list[list[str]] = []
    cov = analysis.fit.cov
    for i, (name, est) in enumerate(zip(analysis.fit.coef_names, analysis.fit.coef)):
        se = float(max(cov[i, i], 0.0)) ** 0.5
        rows.append(["coefficient", name, f"{est:.6g}", f"{se:.6g}", "", "", "", ""])
    for factor, emm_rows in analysis.emms.items():
        for r in emm_rows:
            rows.append(
                [
                    "marginal_mean",
                    f"{factor}={r.level}",
                    f"{r.estimate:.6g}",
                    f"{r.se:.6g}",
                    "",
                    "",
                    f"{r.ci_low:.6g}",
                    f"{r.ci_high:.6g}",
                ]
            )
    for factor, contrast_rows in analysis.contrasts.items():
        for c in contrast_rows:
            rows.append(
                [
                    "contrast",
                    f"{c.smaller} < {c.larger}",
                    f"{c.estimate:.6g}",
                    f"{c.se:.6g}",
                    f"{c.z:.6g}",
                    f"{c.p_value:.6g}",
                    "",
                    "",
                ]
            )
    _write_csv(Path(path), comments + design, header, rows)


# --- perplexity/accuracy correlations ---------------------------------------


@dataclass(frozen=True)
class CorrelationRow:
    model: str
    scope: str  # "items" | "form_means"
    result: CorrelationResult


def correlation_analysis(observations: list[ObservationRow]) -> list[CorrelationRow]:
    """Perplexity vs accuracy, per model, item-level and over form means."""
    out: list[CorrelationRow] = []
    models = sorted({o.model for o in observations})
    for model in models:
        mine = [o for o in observations if o.model == model and o.perplexity is not None]
        if len(mine) < 3:
            continue
        xs = [o.perplexity for o in mine]
        ys = [o.soft_accuracy for o in mine]
        try:
            out.append(CorrelationRow(model, "items", correlate(xs, ys)))
        except StatsError:
            pass
        forms = sorted({o.form_id for o in mine})
        if len(forms) >= 3:
            fx = []
            fy = []
            for form in forms:
                of = [o for o in mine if o.form_id == form]
                fx.append(mean([o.perplexity for o in of]))
                fy.append(mean([o.soft_accuracy for o in of]))
            try:
                out.append(CorrelationRow(model, "form_means", correlate(fx, fy)))
            except StatsError:
                pass
    return out


def write_correlations_csv(
    rows: list[CorrelationRow], path: str | Path, comments: list[str]
) -> None:
    header = ["model", "scope", "n", "pearson_r", "pearson_p", "spearman_rho", "spearman_p"]
    body = [
        [
            r.model,
            r.scope,
            str(r.result.n),
            f"{r.result.pearson_r:.6g}",
            f"{r.result.pearson_p:.6g}",
            f"{r.result.spearman_rho:.6g}",
            f"{r.result.spearman_p:.6g}",
        ]
        for r in rows
    ]
    _write_csv(Path(path), comments, header, body)


# --- keypress-study export ---------------------------------------------------


def load_human_trials(path: str | Path) -> list[HumanTrial]:
    """Read a study export; sessions act as participants.

    Only trials over the main family's factor levels enter the fit.
    """
    trials: list[HumanTrial] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                if raw["modality"] not in MODALITY_LEVELS:
                    continue
                if raw["arg_form"] not in ARGFORM_LEVELS:
                    continue
                trials.append(
                    HumanTrial(
                        participant=raw["session_id"],
                        modality=raw["modality"],
                        arg_form=raw["arg_form"],
                        correct=bool(raw["correct"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ReportError(f"{path}:{lineno}: bad export line ({exc})") from exc
    return trials


def write_human_logistic_csv(
    result: HumanLogisticResult, path: str | Path, comments: list[str]
) -> None:
    from scipy import stats as sps  # local import keeps module load light

    extra = [
        f"n_trials: {result.fit.n}; converged: {result.fit.converged}",
        "participant intercepts; reference levels: modality=propositional, arg_form=disjunctive",
    ]
    if result.dropped_participants:
        extra.append(
            "intercepts dropped (all-correct or all-wrong): "
            + ", ".join(result.dropped_participants)
        )
    header = ["section", "term", "estimate", "se", "z", "p_value"]
    rows: list[list[str]] = []
    for i, (name, est) in enumerate(zip(result.fit.coef_names, result.fit.coef)):
        se = float(max(result.fit.cov[i, i], 0.0)) ** 0.5
        z = est / se if se > 0 else 0.0
        p = 2.0 * float(sps.norm.sf(abs(z)))
        rows.append(["coefficient", name, f"{est:.6g}", f"{se:.6g}", f"{z:.6g}", f"{p:.6g}"])
    lrt = result.argform_lrt
    rows.append(
        [
            "lrt",
            "arg_form",
            f"{lrt.statistic:.6g}",
            "",
            f"df={lrt.df}",
            f"{lrt.p_value:.6g}",
        ]
    )
    _write_csv(Path(path), comments + extra, header, rows)


# --- orchestration -----------------------------------------------------------


def _dataset_comments(items_path: Path) -> list[str]:
    comments = [f"items: {items_path.name}"]
    meta_file = meta_path_for(items_path)
    if meta_file.exists():
        meta = json.loads(meta_file.read_text(encoding="utf-8"))
        comments.append(
            "generated with seed {seed}, families {fams}, {n} interpretations, {kind} lexicon".format(
                seed=meta.get("seed"),
                fams=",".join(meta.get("families", [])),
                n=meta.get("n_interpretations"),
                kind=meta.get("lexicon_kind"),
            )
        )
    return comments


def analyze(
    items_path: str | Path,
    results_paths: list[str | Path],
    out_dir: str | Path,
    human_export_path: str | Path | None = None,
) -> list[Path]:
    """Run every applicable analysis and write the CSVs; returns the paths."""
    items_path = Path(items_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    items = read_items(items_path)
    responses: list[Response] = []
    for rp in results_paths:
        file_responses, _ = read_results(rp)
        responses.extend(file_responses)
    if not responses:
        raise ReportError("no responses found in the results files")
    observations = assemble_observations(items, responses)
    comments = _dataset_comments(items_path)
    comments.append("models: " + ", ".join(sorted({o.model for o in observations})))

    written: list[Path] = []

    table_path = out_dir / "group_means.csv"
    write_group_table_csv(group_table(observations), table_path, comments)
    written.append(table_path)

    for kind, filename in (("accuracy", "regression_accuracy.csv"), ("yes_rate", "regression_yes_rate.csv")):
        analysis = run_linear_analysis(observations, kind)
        path = out_dir / filename
        write_linear_analysis_csv(analysis, path, comments)
        written.append(path)

    corr_rows = correlation_analysis(observations)
    if corr_rows:
        corr_path = out_dir / "correlations.csv"
        write_correlations_csv(corr_rows, corr_path, comments)
        written.append(corr_path)

    if human_export_path is not None:
        trials = load_human_trials(human_export_path)
        if trials:
            result = fit_logistic_human(trials)
            human_path = out_dir / "human_logistic.csv"
            write_human_logistic_csv(
                result, human_path, [f"export: {Path(human_export_path).name}"]
            )
            written.append(human_path)
    return written
