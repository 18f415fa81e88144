"""Matplotlib figures for the report tables.

Every public function takes the :class:`~replisure.reports.Table` produced by
the matching builder and writes one figure to ``path``.  SVG output is made
byte-stable by fixing the hash salt and dropping the creation date.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .reports import Table  # noqa: E402

STYLE = {
    "svg.hashsalt": "replisure",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
}
TTR_COLOR = "#1b6ca8"
SCEPTICAL_COLOR = "#c0392b"


def _save(fig, path) -> Path:
    path = Path(path)
    fmt = path.suffix.lstrip(".") or "svg"
    metadata = {"Date": None} if fmt in ("svg", "pdf") else None
    fig.savefig(path, format=fmt, metadata=metadata, bbox_inches="tight")
    plt.close(fig)
    return path


def _p_axis(ax, label="p-value"):
    ax.set_yscale("log")
    ax.set_ylabel(label)


def plot_assess(table: Table, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        key = "p_s_controlled" if "p_s_controlled" in table.columns else "p_s_nominal"
        pts = [(r["p_ttr"], r[key], r["label"]) for r in table.rows if r[key] is not None]
        floor = 1e-6
        xs = [max(x, floor) for x, _, _ in pts]
        ys = [max(y, floor) for _, y, _ in pts]
        ax.scatter(xs, ys, s=14, color=SCEPTICAL_COLOR)
        for x, y, (_, _, lab) in zip(xs, ys, pts):
            if x > 1e-3 or y > 1e-3:
                ax.annotate(lab, (x, y), fontsize=6, xytext=(3, 2), textcoords="offset points")
        ax.plot([floor, 1], [floor, 1], color="grey", lw=0.8, ls="--")
        alpha = table.summary.get("alpha")
        if alpha:
            ax.axvline(alpha, color="grey", lw=0.6, ls=":")
            ax.axhline(alpha, color="grey", lw=0.6, ls=":")
        ax.set_xscale("log")
        _p_axis(ax, "sceptical p-value")
        ax.set_xlabel("two-trials rule p-value")
        return _save(fig, path)


def plot_power(table: Table, path):
    rows = [r for r in table.rows if r["label"] != "Average"]
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(8, 5), sharey=True)
        ys = range(len(rows))
        for ax, (a, b, title) in zip(axes, (("cp_ttr", "cp_sceptical", "Conditional power"),
                                            ("pp_ttr", "pp_sceptical", "Predictive power"))):
            ax.scatter([r[a] for r in rows], ys, s=12, color=TTR_COLOR, label="two-trials rule")
            ax.scatter([r[b] for r in rows], ys, s=12, marker="x", color=SCEPTICAL_COLOR, label="sceptical p")
            ax.set_title(title)
            ax.set_xlabel("power (%)")
            ax.set_xlim(-2, 102)
        axes[0].set_yticks(list(ys), [r["label"] for r in rows], fontsize=6)
        axes[0].invert_yaxis()
        axes[1].legend(loc="lower left", fontsize=7)
        return _save(fig, path)


def plot_ci(table: Table, path):
    rows = table.rows
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 7))
        for i, r in enumerate(rows):
            ax.plot([r["rct_lo"], r["rct_hi"]], [i - 0.2] * 2, color="black", lw=1)
            ax.plot(r["rct_hr"], i - 0.2, "s", color="black", ms=3)
            ax.plot([r["rwe_lo"], r["rwe_hi"]], [i] * 2, color=TTR_COLOR, lw=1)
            ax.plot(r["rwe_hr"], i, "o", color=TTR_COLOR, ms=3)
            if r["meta_hr"] is not None:
                ax.plot([r["meta_lo"], r["meta_hi"]], [i + 0.2] * 2, color="grey", lw=1)
                ax.plot(r["meta_hr"], i + 0.2, "D", color="grey", ms=3)
            if r["sceptical_upper_hr"] is not None:
                ax.plot(r["sceptical_upper_hr"], i + 0.2, "|", color=SCEPTICAL_COLOR, ms=8, mew=1.5)
            if r["margin_hr"] != 1.0:
                ax.plot(r["margin_hr"], i, "v", color="darkorange", ms=4)
        ax.axvline(1.0, color="grey", lw=0.6, ls="--")
        ax.set_xscale("log")
        ax.set_yticks(range(len(rows)), [r["label"] for r in rows], fontsize=6)
        ax.invert_yaxis()
        ax.set_xlabel("hazard ratio")
        ax.set_title("RCT (black), RWE (blue), meta (grey), sceptical upper (red)", fontsize=7)
        return _save(fig, path)


def plot_curves(table: Table, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        cs = table.column("c")
        ax.plot(cs, table.column("p_sceptical"), color=SCEPTICAL_COLOR, label="sceptical p (controlled)")
        ax.plot(cs, table.column("p_ttr"), color=TTR_COLOR, label="two-trials rule")
        ax.axhline(table.summary["p_original"], color="grey", ls="--", lw=0.8)
        ax.set_xscale("log")
        _p_axis(ax)
        ax.set_xlabel("relative sample size c")
        ax.set_title(f"relative effect size {table.summary['rel_effect']:g}")
        ax.legend(fontsize=7)
        return _save(fig, path)


def plot_power_profile(table: Table, path):
    grid = [r for r in table.rows if r["kind"] == "grid"]
    obs = next(r for r in table.rows if r["kind"] == "observed")
    pred = next(r for r in table.rows if r["kind"] == "predictive")
    ci = [r for r in table.rows if r["kind"] == "ci_limit"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot([r["theta_o"] for r in grid], [r["cp_ttr"] for r in grid], color="black", label="two-trials rule")
        ax.plot([r["theta_o"] for r in grid], [r["cp_sceptical"] for r in grid], color="grey", ls="--",
                label="sceptical p")
        ax.plot(obs["theta_o"], obs["cp_ttr"], "o", color=SCEPTICAL_COLOR,
                label=f"observed: {obs['cp_ttr']:.1f}%")
        ax.axhline(pred["cp_ttr"], color=TTR_COLOR, lw=0.8, label=f"predictive: {pred['cp_ttr']:.1f}%")
        los, his = sorted(r["theta_o"] for r in ci)
        ax.axvspan(los, his, color="green", alpha=0.08, label="original 95% CI")
        ax.set_xlabel("original log hazard ratio")
        ax.set_ylabel("conditional power (%)")
        ax.set_title(table.summary["label"])
        ax.legend(fontsize=7, loc="lower left")
        return _save(fig, path)


def plot_success_curve(table: Table, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        a = table.column("alpha")
        ax.plot(a, table.column("prop_success_ttr"), color=TTR_COLOR, label="success, two-trials rule")
        ax.plot(a, table.column("prop_success_sceptical"), color=SCEPTICAL_COLOR, label="success, sceptical p")
        ax.plot(a, table.column("avg_pp_ttr"), color=TTR_COLOR, ls="--", label="avg. predictive power, TTR")
        ax.plot(a, table.column("avg_pp_sceptical"), color=SCEPTICAL_COLOR, ls="--",
                label="avg. predictive power, sceptical")
        ax.set_xscale("log")
        ax.set_xlabel("one-sided level alpha")
        ax.set_ylabel("proportion")
        ax.set_ylim(0, 1)
        ax.legend(fontsize=7)
        return _save(fig, path)


def plot_shrinkage(table: Table, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        for r in table.rows:
            ax.plot([r["rwe_lo"], r["rwe_hi"]], [r["rct_shifted"]] * 2, color="lightgrey", lw=0.8, zorder=1)
            ax.plot([r["rwe_shifted"]] * 2, [r["rct_lo"], r["rct_hi"]], color="lightgrey", lw=0.8, zorder=1)
        ax.scatter(table.column("rwe_shifted"), table.column("rct_shifted"), s=12, color="black", zorder=2)
        lo = min(min(table.column("rct_lo")), min(table.column("rwe_lo")))
        hi = max(max(table.column("rct_hi")), max(table.column("rwe_hi")))
        ax.plot([lo, hi], [lo, hi], color="grey", ls="--", lw=0.8)
        ax.axhline(0, color="grey", lw=0.5)
        ax.axvline(0, color="grey", lw=0.5)
        ax.set_xlabel("RWE log-HR - log(margin)")
        ax.set_ylabel("RCT log-HR - log(margin)")
        return _save(fig, path)


def plot_verify_t1e(table: Table, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        cs = table.column("c")
        mc = table.column("monte_carlo")
        se = table.column("mc_se")
        ax.errorbar(cs, mc, yerr=[3 * s for s in se], fmt="o", color="black", ms=3, capsize=2,
                    label="Monte Carlo (3 SE)")
        ax.axhline(table.rows[0]["analytic"], color=SCEPTICAL_COLOR, label="alpha squared")
        ax.set_xscale("log")
        ax.set_xlabel("variance ratio c")
        ax.set_ylabel("overall Type-I error")
        ax.legend(fontsize=7)
        return _save(fig, path)


PLOTTERS = {
    "assess": plot_assess,
    "power": plot_power,
    "ci": plot_ci,
    "curves": plot_curves,
    "power-profile": plot_power_profile,
    "success-curve": plot_success_curve,
    "shrinkage": plot_shrinkage,
    "verify-t1e": plot_verify_t1e,
}


def render(table: Table, path) -> Path:
    return PLOTTERS[table.name](table, path)
