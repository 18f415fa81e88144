"""Tabular reports behind the CLI subcommands.

Each builder returns a :class:`Table`: ordered column names, one dict per
row and an optional summary mapping.  Rendering to CSV/JSON lives in
:func:`write_csv` and :func:`write_json`; figures in :mod:`replisure.plotting`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

from .assessment import assess_normalized, sceptical_p_controlled
from .calibration import verify_t1e
from .combined import fixed_effect_meta, sceptical_ci_upper
from .errors import ReplisureError
from .numerics import norm_quantile, norm_sf
from .power import replication_power, sceptical_conditional_power, ttr_conditional_power
from .studies import Dataset, StudyPair, normalize_pair

P_DISPLAY_FLOOR = 1e-4
P_DISPLAY_TEXT = "< 0.0001"


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[dict[str, Any]]
    summary: dict[str, Any] = field(default_factory=dict)
    # columns holding p-values, shown as "< 0.0001" in CSV below the floor
    p_columns: frozenset[str] = frozenset()

    def column(self, name: str) -> list[Any]:
        return [r[name] for r in self.rows]


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    if not (0 < lo < hi and n >= 2):
        raise ValueError(f"invalid grid {lo}:{hi}:{n}")
    return [float(v) for v in np.geomspace(lo, hi, n)]


# --- builders ---------------------------------------------------------------

def assessment_table(data: Dataset, alpha: float = 0.025, method: str = "controlled") -> Table:
    cols = ["label", "p_o", "p_r", "c", "p_ttr"]
    if method in ("nominal", "both"):
        cols.append("p_s_nominal")
    if method in ("controlled", "both"):
        cols.append("p_s_controlled")
    cols += ["success_ttr"]
    if method in ("nominal", "both"):
        cols.append("success_nominal")
    if method in ("controlled", "both"):
        cols.append("success_sceptical")
    cols.append("medicare_available")

    rows = []
    for pair in data:
        n = normalize_pair(pair)
        a = assess_normalized(n.z_o, n.z_r, n.c, alpha, pair.label)
        row = {
            "label": a.label, "p_o": a.p_o, "p_r": a.p_r, "c": a.c, "p_ttr": a.p_ttr,
            "p_s_nominal": a.p_s_nominal, "p_s_controlled": a.p_s_controlled,
            "success_ttr": a.success_ttr, "success_nominal": a.success_nominal,
            "success_sceptical": a.success_sceptical,
            "medicare_available": pair.medicare_available,
        }
        rows.append({k: row[k] for k in cols})

    def count(key, subset=None):
        sel = [r for r in rows if subset is None or r["medicare_available"] is subset]
        return f"{sum(r[key] for r in sel)}/{len(sel)}"

    summary = {"alpha": alpha, "n_pairs": len(rows)}
    for key in ("success_ttr", "success_nominal", "success_sceptical"):
        if key in cols:
            summary[key] = count(key)
            summary[f"{key}_medicare"] = count(key, True)
            summary[f"{key}_no_medicare"] = count(key, False)
    p_cols = frozenset({"p_o", "p_r", "p_ttr", "p_s_nominal", "p_s_controlled"})
    return Table("assess", cols, rows, summary, p_cols)


def power_table(data: Dataset, alpha: float = 0.025) -> Table:
    cols = ["label", "p_o", "cp_ttr", "cp_sceptical", "pp_ttr", "pp_sceptical"]
    rows = []
    for pair in data:
        n = normalize_pair(pair)
        pw = replication_power(n, alpha)
        rows.append({
            "label": pair.label, "p_o": n.p_o,
            "cp_ttr": 100 * pw.cp_ttr, "cp_sceptical": 100 * pw.cp_sceptical,
            "pp_ttr": 100 * pw.pp_ttr, "pp_sceptical": 100 * pw.pp_sceptical,
        })
    avg = {"label": "Average", "p_o": None}
    for k in cols[2:]:
        avg[k] = float(np.mean([r[k] for r in rows]))
    rows.append(avg)
    return Table("power", cols, rows, {"alpha": alpha, "unit": "percent"}, frozenset({"p_o"}))


def ci_table(data: Dataset, overall_alpha: float = 0.025) -> Table:
    cols = ["label", "margin_hr", "rct_hr", "rct_lo", "rct_hi", "rwe_hr", "rwe_lo", "rwe_hi",
            "meta_hr", "meta_lo", "meta_hi", "sceptical_upper_hr", "error"]
    rows = []
    for pair in data:
        row = {
            "label": pair.label, "margin_hr": pair.margin_hr,
            "rct_hr": pair.original.hr, "rct_lo": pair.original.ci_lo, "rct_hi": pair.original.ci_hi,
            "rwe_hr": pair.replication.hr, "rwe_lo": pair.replication.ci_lo, "rwe_hi": pair.replication.ci_hi,
            "meta_hr": None, "meta_lo": None, "meta_hi": None, "sceptical_upper_hr": None, "error": None,
        }
        meta = fixed_effect_meta(
            [(pair.original.log_hr, pair.original.se), (pair.replication.log_hr, pair.replication.se)]
        )
        row["meta_hr"], row["meta_lo"], row["meta_hi"] = meta.hr
        try:
            row["sceptical_upper_hr"] = sceptical_ci_upper(pair, overall_alpha)
        except ReplisureError as exc:
            row["error"] = str(exc)
        rows.append(row)
    summary = {"overall_alpha": overall_alpha, "sceptical_level": 1 - overall_alpha,
               "meta_level": 0.95, "errors": sum(r["error"] is not None for r in rows)}
    return Table("ci", cols, rows, summary)


def curves_table(p_original: float, rel_effect: float = 1.0, c_values: Sequence[float] | None = None) -> Table:
    """Sceptical vs two-trials p-value over the relative sample size ``c``.

    The replication z-value follows from the relative effect size:
    ``z_r = rel_effect * sqrt(c) * z_o``.  ``p_sceptical`` is the controlled
    p-value, i.e. the square root of the overall Type-I error at the observed
    sceptical z, and so lives on the same scale as ``p_ttr``; ``t1e`` is its
    square.
    """
    if not 0.0 < p_original < 0.5:
        raise ValueError(f"p_original must lie in (0, 0.5), got {p_original}")
    if not rel_effect > 0:
        raise ValueError(f"rel_effect must be positive, got {rel_effect}")
    if c_values is None:
        c_values = log_grid(0.05, 50.0, 61)
    z_o = norm_quantile(1.0 - p_original)
    rows = []
    for c in c_values:
        z_r = rel_effect * math.sqrt(c) * z_o
        p_r = norm_sf(z_r)
        p_s = sceptical_p_controlled(z_o, z_r, c)
        rows.append({
            "c": c, "p_original": p_original, "p_replication": p_r,
            "p_sceptical": p_s, "t1e": p_s * p_s, "p_ttr": max(p_original, p_r),
        })
    cols = ["c", "p_original", "p_replication", "p_sceptical", "t1e", "p_ttr"]
    return Table("curves", cols, rows, {"p_original": p_original, "rel_effect": rel_effect})


def power_profile(pair: StudyPair, c: float | None = None, alpha: float = 0.025, n_grid: int = 121) -> Table:
    """Conditional power as a function of a hypothetical original estimate.

    ``c`` defaults to the pair's own variance ratio.  Besides the grid the
    table carries the observed point, the predictive power and the
    conditional power at both limits of the original 95% CI.
    """
    n = normalize_pair(pair)
    c = n.c if c is None else float(c)
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    z95 = norm_quantile(0.975)

    def point(kind, theta):
        z_o = (n.delta - theta) / n.se_o
        return {
            "kind": kind, "theta_o": theta, "hr_o": math.exp(theta), "z_o": z_o,
            "cp_ttr": 100 * ttr_conditional_power(z_o, c, alpha),
            "cp_sceptical": 100 * sceptical_conditional_power(z_o, c, alpha),
        }

    rows = [point("grid", th) for th in np.linspace(n.theta_o - 4 * n.se_o, n.theta_o + 4 * n.se_o, n_grid)]
    observed = point("observed", n.theta_o)
    rows.append(observed)
    pw = replication_power(replace(n, c=c), alpha)
    rows.append({**observed, "kind": "predictive", "cp_ttr": 100 * pw.pp_ttr, "cp_sceptical": 100 * pw.pp_sceptical})
    ci_rows = sorted(
        (point("ci_limit", n.theta_o - z95 * n.se_o), point("ci_limit", n.theta_o + z95 * n.se_o)),
        key=lambda r: r["cp_ttr"],
    )
    rows += ci_rows
    summary = {
        "label": pair.label, "c": c, "alpha": alpha,
        "conditional_power_ttr": observed["cp_ttr"], "predictive_power_ttr": 100 * pw.pp_ttr,
        "ci_range_ttr": f"{ci_rows[0]['cp_ttr']:.1f}-{ci_rows[1]['cp_ttr']:.1f}",
    }
    cols = ["kind", "theta_o", "hr_o", "z_o", "cp_ttr", "cp_sceptical"]
    return Table("power-profile", cols, rows, summary)


def success_curve(data: Dataset, alphas: Iterable[float] | None = None) -> Table:
    if alphas is None:
        alphas = log_grid(0.001, 0.1, 41)
    normalized = [normalize_pair(p) for p in data]
    rows = []
    for alpha in alphas:
        ok_ttr = ok_s = 0
        pp_ttr = pp_s = 0.0
        for n in normalized:
            a = assess_normalized(n.z_o, n.z_r, n.c, alpha)
            ok_ttr += a.success_ttr
            ok_s += a.success_sceptical
            pw = replication_power(n, alpha)
            pp_ttr += pw.pp_ttr
            pp_s += pw.pp_sceptical
        k = len(normalized)
        rows.append({
            "alpha": alpha, "prop_success_ttr": ok_ttr / k, "prop_success_sceptical": ok_s / k,
            "avg_pp_ttr": pp_ttr / k, "avg_pp_sceptical": pp_s / k,
        })
    cols = ["alpha", "prop_success_ttr", "prop_success_sceptical", "avg_pp_ttr", "avg_pp_sceptical"]
    return Table("success-curve", cols, rows, {"n_pairs": len(normalized)})


def shrinkage_table(data: Dataset) -> Table:
    """Margin-shifted original vs replication log-HRs with 95% CIs.

    A point is below the diagonal when the original estimate lies further
    below the margin than the replication estimate.
    """
    z95 = norm_quantile(0.975)
    rows = []
    for pair in data:
        n = normalize_pair(pair)
        x = n.theta_o - n.delta
        y = n.theta_r - n.delta
        rows.append({
            "label": pair.label,
            "rct_shifted": x, "rct_lo": x - z95 * n.se_o, "rct_hi": x + z95 * n.se_o,
            "rwe_shifted": y, "rwe_lo": y - z95 * n.se_r, "rwe_hi": y + z95 * n.se_r,
            "below_diagonal": x < y,
        })
    cols = ["label", "rct_shifted", "rct_lo", "rct_hi", "rwe_shifted", "rwe_lo", "rwe_hi", "below_diagonal"]
    below = sum(r["below_diagonal"] for r in rows)
    summary = {"n_pairs": len(rows), "below_diagonal": below, "above_diagonal": len(rows) - below}
    return Table("shrinkage", cols, rows, summary)


def calibration_table(cs: Sequence[float], alpha: float, draws: int, seed: int) -> Table:
    rows = []
    for r in verify_t1e(cs, alpha, draws, seed):
        rows.append({
            "c": r.c, "threshold": r.threshold, "analytic": r.analytic, "monte_carlo": r.monte_carlo,
            "mc_se": r.mc_se, "z_score": r.z_score, "within_3se": r.within_3se,
        })
    cols = ["c", "threshold", "analytic", "monte_carlo", "mc_se", "z_score", "within_3se"]
    summary = {"alpha": alpha, "draws": draws, "seed": seed,
               "all_within_3se": all(r["within_3se"] for r in rows)}
    return Table("verify-t1e", cols, rows, summary)


# --- emitters ---------------------------------------------------------------

def _csv_cell(value: Any, is_p: bool) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if is_p and value < P_DISPLAY_FLOOR:
            return P_DISPLAY_TEXT
        return repr(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_csv(table: Table, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(row[c], c in table.p_columns) for c in table.columns])
    for key, value in table.summary.items():
        out.write(f"# {key}: {_csv_cell(value, False)}\n")


def write_json(table: Table, out: TextIO) -> None:
    doc = {
        "command": table.name,
        "columns": table.columns,
        "rows": [{c: _json_value(r[c]) for c in table.columns} for r in table.rows],
        "summary": {k: _json_value(v) for k, v in table.summary.items()},
    }
    json.dump(doc, out, indent=2)
    out.write("\n")
