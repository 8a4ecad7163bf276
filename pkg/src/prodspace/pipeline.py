"""End-to-end orchestration: ingest through every table and figure dataset.

All artifacts are computed first and written in one pass at the end, so a
failing stage leaves no partial output directory behind. Numeric CSV cells
carry 6 significant digits; counts stay exact integers. A manifest echoes
the configuration, the headline counts and rates, and a sha256 checksum per
artifact.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import pandas as pd

from .complexity import complexity_scores, ecoi, outlook_regressions
from .decomposition import (
    DENSITY_ONLY,
    THREE_VARIABLE,
    decompose_density,
    fit_transition_models,
    lor_decompose,
    per_country_models,
    success_bonus,
    topk_confusion,
)
from .errors import InputError
from .ingest import ExportPanel, IngestConfig, PanelReport, load_panel, truncate_product_level
from .product_space import conditional_probabilities, density
from .rca import (
    compute_rca,
    per_country_transition_stats,
    transition_complexity_summary,
    transition_rates,
    transitions,
    ubiquity_gap,
)
from .regression import summary_frame
from .smoothing import SmoothSpec, lpoly
from .synthetic import generate_synthetic

STAGES = (
    "ingest",
    "rca",
    "transitions",
    "density",
    "complexity",
    "table1",
    "table2",
    "table3",
    "figures",
    "tableA1",
)

FIGURE_COLUMNS = ["panel", "series", "kind", "x", "y", "lower", "upper"]


@dataclass
class RunConfig:
    """Everything one run needs; defaults reproduce the reference settings."""

    input: str | Path | None = None
    years: tuple[int, int] = (2012, 2018)
    digits: int = 4
    threshold: float = 1.0
    include_diagonal: bool = True
    standardize_gamma: bool = True
    degree: int = 1
    bandwidth: float = 50.0
    se_bandwidth: float = 75.0
    kernel: str = "epanechnikov"
    delimiter: str = ","
    output_dir: str | Path = "prodspace_out"
    stage: str = STAGES[-1]
    # synthetic mode (used when no input path is given)
    seed: int = 7
    synthetic_m: int = 20
    synthetic_n: int = 12
    synthetic_model: str = "capability"

    def smooth_spec(self) -> SmoothSpec:
        return SmoothSpec(
            degree=self.degree,
            bandwidth=self.bandwidth,
            se_bandwidth=self.se_bandwidth,
            kernel=self.kernel,
        )


@dataclass
class RunReport:
    output_dir: Path
    stage: str
    manifest: dict
    artifact_paths: dict[str, Path] = field(default_factory=dict)


def _restrict_to_active(panel: ExportPanel) -> tuple[ExportPanel, dict]:
    """Drop products/countries lacking positive exports in both years.

    Codes appearing in only one year cannot transition and would leave
    zero-diversity columns or zero-ubiquity rows in the base-year matrices,
    which the proximity and complexity stages reject. The dropped codes are
    reported, not silently discarded.
    """
    pos = panel.values > 0
    keep_p = pos.any(axis=2).all(axis=0)
    keep_c = pos.any(axis=1).all(axis=0)
    dropped = {
        "products": [p for p, k in zip(panel.products, keep_p) if not k],
        "countries": [c for c, k in zip(panel.countries, keep_c) if not k],
    }
    if keep_p.all() and keep_c.all():
        return panel, dropped
    if keep_p.sum() < 2 or keep_c.sum() < 2:
        raise InputError(
            "fewer than 2 products or countries remain after dropping "
            "one-year-only codes"
        )
    values = panel.values[:, keep_p][:, :, keep_c]
    report = PanelReport(
        n_records=panel.report.n_records,
        n_zero_dropped=panel.report.n_zero_dropped,
        n_duplicates_merged=panel.report.n_duplicates_merged,
    )
    reduced = ExportPanel(
        products=[p for p, k in zip(panel.products, keep_p) if k],
        countries=[c for c, k in zip(panel.countries, keep_c) if k],
        years=panel.years,
        values=values,
        report=report,
    )
    return reduced, dropped


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return None
        return float(f"{v:.6g}")
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _figure_rows(
    rows: list,
    panel: str,
    series: str,
    x: np.ndarray,
    y: np.ndarray,
    spec: SmoothSpec,
    warnings: list,
) -> None:
    """Append observation rows and, where possible, a smoothed trend."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    for xv, yv in zip(x, y):
        rows.append(
            {
                "panel": panel,
                "series": series,
                "kind": "obs",
                "x": xv,
                "y": yv,
                "lower": np.nan,
                "upper": np.nan,
            }
        )
    ok = np.isfinite(x) & np.isfinite(y)
    if ok.sum() < spec.degree + 1 or np.unique(x[ok]).size < 2:
        warnings.append(f"{panel}/{series}: trend skipped (insufficient support)")
        return
    sm = lpoly(x[ok], y[ok], spec)
    for i in range(sm.x.size):
        rows.append(
            {
                "panel": panel,
                "series": series,
                "kind": "smooth",
                "x": sm.x[i],
                "y": sm.fitted[i],
                "lower": sm.lower[i],
                "upper": sm.upper[i],
            }
        )


def run_pipeline(config: RunConfig) -> RunReport:
    """Run the configured prefix of the pipeline and write its artifacts."""
    if config.stage not in STAGES:
        raise InputError(f"stage must be one of {STAGES}, got {config.stage!r}")
    last = STAGES.index(config.stage)

    def runs(name: str) -> bool:
        return STAGES.index(name) <= last

    artifacts: dict[str, pd.DataFrame] = {}
    warnings: list[str] = []
    manifest: dict = {
        "config": _jsonable(
            {f.name: getattr(config, f.name) for f in fields(config)}
        ),
        "counts": {},
        "rates": {},
        "warnings": warnings,
    }

    # ingest
    if config.input is None:
        panel = generate_synthetic(
            config.seed,
            config.synthetic_m,
            config.synthetic_n,
            config.synthetic_model,
            config.years,
        )
        manifest["input_mode"] = "synthetic"
    else:
        panel = load_panel(
            config.input, IngestConfig(years=config.years, delimiter=config.delimiter)
        )
        manifest["input_mode"] = "file"
    panel = truncate_product_level(panel, config.digits)
    panel, dropped = _restrict_to_active(panel)
    counts = manifest["counts"]
    counts["n_products"] = len(panel.products)
    counts["n_countries"] = len(panel.countries)
    counts["n_records"] = panel.report.n_records
    counts["n_zero_dropped"] = panel.report.n_zero_dropped
    counts["n_duplicates_merged"] = panel.report.n_duplicates_merged
    counts["n_products_dropped_one_year"] = len(dropped["products"])
    counts["n_countries_dropped_one_year"] = len(dropped["countries"])
    manifest["dropped_one_year_codes"] = dropped

    if runs("rca"):
        rca0 = compute_rca(panel, config.years[0], config.threshold)
        rca1 = compute_rca(panel, config.years[1], config.threshold)
        counts["n_specializations_t0"] = int(rca0.x.sum())
        counts["n_specializations_t1"] = int(rca1.x.sum())

    if runs("transitions"):
        t = transitions(rca0, rca1)
        gain_rate, loss_rate = transition_rates(t)
        counts["n_gains"] = t.n_gains
        counts["n_losses"] = t.n_losses
        counts["n_at_risk_gain"] = t.n_at_risk_gain
        counts["n_at_risk_loss"] = t.n_at_risk_loss
        manifest["rates"] = {"gain_rate": gain_rate, "loss_rate": loss_rate}

    if runs("density"):
        prox = conditional_probabilities(rca0)
        dens = density(rca0, prox, include_diagonal=config.include_diagonal)

    if runs("complexity"):
        scores = complexity_scores(rca0)
        gamma = scores.pci if config.standardize_gamma else scores.pci_raw
        outlook = ecoi(rca0, dens, gamma)
        artifacts["pci.csv"] = pd.DataFrame(
            {"product": scores.products, "pci": scores.pci}
        )
        artifacts["complexity.csv"] = pd.DataFrame(
            {
                "country": scores.countries,
                "diversity": rca0.diversity,
                "eci": scores.eci,
                "ecoi": outlook.ecoi,
                "ecoi_bar": outlook.ecoi_bar,
                "ecoi_net": outlook.ecoi_net,
                "mean_ubiquity_rca0": outlook.mean_ubiquity_rca0,
                "mean_ubiquity_rca1": outlook.mean_ubiquity_rca1,
            }
        )

    if runs("table1"):
        dec = decompose_density(dens, rca0)
        artifacts["table1.csv"] = summary_frame(
            {
                "1": dec.source_fit,
                "2": dec.diversity_fit,
                "3": dec.ubiquity_fit,
            }
        )

    if runs("table2"):
        models = {
            event: fit_transition_models(t, dens, dec, rca0, event)
            for event in ("gain", "loss")
        }
        table2 = summary_frame(
            {
                "gains_1": models["gain"].fit_density,
                "gains_2": models["gain"].fit_three,
                "losses_1": models["loss"].fit_density,
                "losses_2": models["loss"].fit_three,
            }
        )
        lr_rows = []
        for label in ("LR vs model 1", "LR p-value"):
            lr_rows.append({"variable": label})
        for event, col in (("gain", "gains_2"), ("loss", "losses_2")):
            lr_rows[0][col] = f"{models[event].lr_statistic:.6g}"
            lr_rows[1][col] = f"{models[event].lr_p_value:.6g}"
        table2 = pd.concat([table2, pd.DataFrame(lr_rows)], ignore_index=True)
        artifacts["table2.csv"] = table2.fillna("")

        lors = {
            (event, tag): lor_decompose(
                models[event].fit_density if tag == DENSITY_ONLY else models[event].fit_three,
                dec,
                tag,
                models[event].sample,
            )
            for event in ("gain", "loss")
            for tag in (DENSITY_ONLY, THREE_VARIABLE)
        }

    if runs("table3"):
        confusion_rows = [
            topk_confusion(lors[(event, tag)], t, event) | {"model": tag}
            for event in ("gain", "loss")
            for tag in (DENSITY_ONLY, THREE_VARIABLE)
        ]
        artifacts["table3.csv"] = pd.DataFrame(confusion_rows)[
            [
                "event",
                "model",
                "n_at_risk",
                "n_realized",
                "pct_correct_positives",
                "pct_correct_negatives",
            ]
        ]

    if runs("figures"):
        spec = config.smooth_spec()
        artifacts["fig1.csv"] = transition_complexity_summary(
            t, scores.pci, scores.eci, rca0
        )

        stats = per_country_transition_stats(t, rca0)
        rows: list = []
        for col in ("p_gain", "n_gains", "p_loss", "n_losses"):
            _figure_rows(
                rows, col, col, stats["diversity"], stats[col], spec, warnings
            )
        artifacts["fig2.csv"] = pd.DataFrame(rows, columns=FIGURE_COLUMNS)

        gaps = ubiquity_gap(t, rca0)
        rows = []
        for col in ("gain_ubiquity_gap", "loss_ubiquity_gap"):
            _figure_rows(
                rows, col, col, gaps["diversity"], gaps[col], spec, warnings
            )
        artifacts["fig3.csv"] = pd.DataFrame(rows, columns=FIGURE_COLUMNS)

        div_of = dict(zip(rca0.countries, rca0.diversity.astype(float)))
        rows = []
        for event in ("gain", "loss"):
            for tag in (DENSITY_ONLY, THREE_VARIABLE):
                bonuses = success_bonus(lors[(event, tag)], t, event)
                x = np.array([div_of[sb.country] for sb in bonuses])
                panel_name = f"{event}_{tag}"
                for series, values in (
                    ("bonus", np.array([sb.b for sb in bonuses])),
                    ("ubiquity_part", np.array([sb.ubiquity_part for sb in bonuses])),
                ):
                    _figure_rows(rows, panel_name, series, x, values, spec, warnings)
        artifacts["fig4.csv"] = pd.DataFrame(rows, columns=FIGURE_COLUMNS)

        rows = []
        per_country_tables = {}
        for event in ("gain", "loss"):
            table = per_country_models(t, dec, rca0, event)
            per_country_tables[event] = table
            ok = table[table["status"] == "ok"]
            _figure_rows(
                rows, "pseudo_r2", event, ok["diversity"], ok["pseudo_r2"], spec, warnings
            )
        for event in ("gain", "loss"):
            ok = per_country_tables[event]
            ok = ok[ok["status"] == "ok"]
            for series in ("ubiquity", "residual"):
                _figure_rows(
                    rows,
                    f"elasticity_{event}",
                    series,
                    ok["diversity"],
                    ok[f"elasticity_{series}"],
                    spec,
                    warnings,
                )
        artifacts["fig5.csv"] = pd.DataFrame(rows, columns=FIGURE_COLUMNS)

    if runs("tableA1"):
        outlook_fits = outlook_regressions(outlook, rca0.diversity.astype(float))
        artifacts["tableA1.csv"] = summary_frame(outlook_fits)

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    checksums: dict[str, str] = {}
    for name in sorted(artifacts):
        path = out_dir / name
        artifacts[name].to_csv(
            path, index=False, float_format="%.6g", lineterminator="\n"
        )
        checksums[name] = hashlib.sha256(path.read_bytes()).hexdigest()
        paths[name] = path
    manifest["stage"] = config.stage
    manifest["artifacts"] = checksums
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    paths["manifest.json"] = manifest_path

    return RunReport(
        output_dir=out_dir, stage=config.stage, manifest=manifest, artifact_paths=paths
    )
