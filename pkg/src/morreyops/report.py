"""Report writers: canonical JSON, a summary CSV, and figure rendering.

The verify path emits three artefacts side by side: `report.json` with the
full per-case records, `summary.csv` with one row per case, and static PNG
figures under `figures/` (per-case ratio charts plus an overview).  JSON is
written with sorted keys so repeated runs with the same seed are
byte-identical apart from the runtime fields.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import VerificationReport

GOLDEN = (math.sqrt(5) - 1) / 2


def report_payload(reports: list[VerificationReport], meta: dict | None = None) -> dict:
    return {
        "meta": dict(meta or {}),
        "cases": [r.to_dict() for r in reports],
        "summary": {
            "n_cases": len(reports),
            "n_pass": sum(1 for r in reports if r.passed),
            "all_pass": all(r.passed for r in reports),
        },
    }


def canonical_json(payload: dict, strip_runtime: bool = False) -> str:
    if strip_runtime:
        payload = json.loads(json.dumps(payload))
        payload.get("meta", {}).pop("runtime_s", None)
        for case in payload.get("cases", []):
            case.pop("runtime_s", None)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_summary_csv(reports: list[VerificationReport], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theorem", "case_id", "max_ratio", "regression_bound", "passed"])
        for r in reports:
            bound = r.regression_bound
            if isinstance(bound, dict):
                bound = ";".join(f"{k}={v:g}" for k, v in sorted(bound.items()))
            w.writerow([
                r.case["theorem"], r.case["case_id"],
                f"{r.max_ratio:.9g}",
                "" if bound is None else bound,
                int(r.passed),
            ])


def _case_figure(r: VerificationReport, path: Path) -> None:
    entries = [e for e in r.entries if "ratio" in e]
    if not entries:
        return
    labels = [
        e.get("function") or e.get("f") or (f"R={e['R']:g}" if "R" in e else str(i))
        for i, e in enumerate(entries)
    ]
    labels = [
        f"{lab} ({e['convention']})" if "convention" in e else lab
        for lab, e in zip(labels, entries)
    ]
    ratios = [e["ratio"] for e in entries]
    w = 7.0
    fig, ax = plt.subplots(figsize=(w, max(2.0, w * GOLDEN * len(entries) / 6)))
    ypos = range(len(entries))
    ax.barh(list(ypos), ratios, color="#4878a8")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("LHS / RHS")
    bound = r.regression_bound
    if isinstance(bound, (int, float)):
        ax.axvline(bound, color="#a84848", linestyle="--", label=f"pinned bound {bound:g}")
        ax.legend(fontsize=8)
    ax.set_title(f"{r.case['case_id']}: max ratio {r.max_ratio:.4g}"
                 + ("" if r.passed else "  [FAIL]"), fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _overview_figure(reports: list[VerificationReport], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 8 * GOLDEN))
    names = [r.case["case_id"] for r in reports]
    vals = [r.max_ratio if math.isfinite(r.max_ratio) else 0.0 for r in reports]
    colors = ["#4878a8" if r.passed else "#a84848" for r in reports]
    ax.bar(range(len(names)), vals, color=colors)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("empirical constant (max LHS/RHS)")
    ax.set_yscale("log")
    ax.set_title("verification suite: empirical constants per statement", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report_dir(
    reports: list[VerificationReport], out_dir: Path, meta: dict | None = None,
    figures: bool = True,
) -> dict:
    """Write report.json, summary.csv and figures into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = report_payload(reports, meta)
    (out_dir / "report.json").write_text(canonical_json(payload))
    write_summary_csv(reports, out_dir / "summary.csv")
    if figures:
        figdir = out_dir / "figures"
        figdir.mkdir(exist_ok=True)
        for r in reports:
            _case_figure(r, figdir / f"{r.case['case_id']}.png")
        _overview_figure(reports, figdir / "overview.png")
    return payload
