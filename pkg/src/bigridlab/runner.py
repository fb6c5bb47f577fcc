"""Scenario pipeline: build the datum, filter, evolve, measure, compare.

Everything is computed in memory first and written afterwards, so an
invalid scenario or a failing step leaves no partial outputs behind.
Outputs are deterministic: no timestamps, sorted JSON keys, fixed float
formatting.
"""
import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import band_decompose, local_smoothing, remainder_trace, strichartz_norm, track
from .bigrid import BigridLevel, bigrid_filter, project
from .dispersion import continuous, semidiscrete
from .evolution import snapshots
from .grid import PhysicalField, SpectralField, isdft, make_grid, sdft, write_field_csv
from .predictor import classify, predict_packets, predict_trajectory, prediction_report
from .scenario import ScenarioError
from .wavepacket import PacketSpec, make_packet, make_special_data, scale_regime_check

__all__ = [
    "RunReport", "SweepReport", "build_datum", "filtered_datum", "run", "compare",
    "norms", "sweep", "level_results",
]

log = logging.getLogger(__name__)


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python ones."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(path, obj):
    path.write_text(json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n")


def _write_table(path, meta, header, rows):
    with open(path, "w", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def _symbol(sc):
    return continuous(sc.h) if sc.symbol == "continuous" else semidiscrete(sc.h)


def _grid(sc):
    return make_grid(sc.h, sc.M, centered=True)


def build_datum(sc, grid=None):
    """Spectrum of the unfiltered initial datum of ``sc``."""
    grid = _grid(sc) if grid is None else grid
    if sc.is_pi_split:
        return make_special_data("pi", sc.gamma_value, grid)
    return make_packet(PacketSpec(sc.eta0_value, sc.band[0], sc.band[1], sc.gamma_value), grid)


def filtered_datum(sc, F0, k):
    """``(filtered spectrum, coarse projection)``; ``k = 0`` returns ``(F0, None)``."""
    if k == 0:
        return F0, None
    level = BigridLevel(k, F0.grid)
    u0 = isdft(F0)
    coarse = project(level, u0, sc.projection)
    return sdft(bigrid_filter(level, u0, sc.projection)), coarse


def _components(sc, F, preds, k):
    """Spectral piece of ``F`` belonging to each predicted packet."""
    if len(preds) == 1:
        return [F]
    if sc.is_pi_split and k == 0:
        # the two half picks at +-pi: separate by the sign of the wavenumber
        eta = F.grid.eta
        return [SpectralField(F.grid, np.where((eta >= 0) == (p.pick_eta > 0), F.coeffs, 0.0))
                for p in preds]
    half = np.pi / 2 ** k
    return [sdft(u) for _, u in band_decompose(F, [p.pick_eta for p in preds], half)]


def _times(sc):
    return np.linspace(0.0, sc.T, sc.n_samples + 1)


def _rel(meas, pred, scale):
    return abs(meas - pred) / max(abs(pred), scale)


@dataclass
class LevelResult:
    k: int
    case: str
    spectrum: object
    coarse: object
    predictions: list
    prediction_json: dict
    times: np.ndarray
    final: object
    conservation_error: float
    packets: list = field(default_factory=list)   # per packet: dict of series
    comparison: list = field(default_factory=list)


def level_results(sc, measure=True):
    """Filter, evolve and (optionally) measure every level of ``sc``."""
    sc.validate()
    grid = _grid(sc)
    F0 = build_datum(sc, grid)
    s = _symbol(sc)
    times = _times(sc)
    out = []
    for k in sc.k_levels:
        proj = sc.projection if k else "none"
        F, coarse = filtered_datum(sc, F0, k)
        label = classify(sc.eta0_value, k, proj)
        preds = predict_packets(sc.eta0_value, k, proj, sc.gamma_value, sc.h, sc.symbol, sc.band)
        rows = snapshots(F, s, times, sc.sign)
        norms_t = np.sqrt(sc.h * np.sum(np.abs(rows) ** 2, axis=1))
        n0 = norms_t[0]
        cons = float(np.max(np.abs(norms_t - n0)) / n0) if n0 > 0 else 0.0
        res = LevelResult(k, str(label), F, coarse, preds, prediction_report(preds, label), times,
                          PhysicalField(grid, rows[-1]), cons)
        if measure:
            _measure(sc, res, s)
        out.append(res)
    return out


def _measure(sc, res, s):
    grid = res.spectrum.grid
    times = res.times
    for idx, (pred, comp) in enumerate(zip(res.predictions, _components(sc, res.spectrum, res.predictions, res.k))):
        rows = snapshots(comp, s, times, sc.sign)
        amps = np.abs(rows).max(axis=1)
        l2 = np.sqrt(sc.h * np.sum(np.abs(rows) ** 2, axis=1))
        series = {"pick_eta": pred.pick_eta, "index": idx, "t": times, "peak_amp": amps, "l2norm": l2,
                  "survives": pred.survives}
        if pred.survives and l2[0] > 0:
            metrics = track(rows, grid)
            cen = np.array([m.centroid for m in metrics])
            wid = np.array([m.width for m in metrics])
            series["centroid"], series["width"] = cen, wid
            v_meas = float(np.polyfit(times, cen, 1)[0])
        else:
            series["centroid"] = series["width"] = np.full(len(times), np.nan)
            v_meas = float("nan")
        series["velocity"] = v_meas
        res.packets.append(series)
        v_err = _rel(v_meas, pred.velocity, 1.0 / sc.h) if pred.survives else float("nan")
        for i, t in enumerate(times):
            c_p, w_p, a_p = predict_trajectory(pred, t)
            a_m = float(amps[i])
            w_m = float(series["width"][i]) * np.sqrt(2.0)
            res.comparison.append({
                "k": res.k, "packet": idx, "pick_eta": pred.pick_eta, "t": float(t),
                "velocity_pred": pred.velocity, "velocity_meas": v_meas, "velocity_err": v_err,
                "amplitude_pred": a_p, "amplitude_meas": a_m,
                # cancelled packets are judged against the unfiltered amplitude scale
                "amplitude_err": _rel(a_m, a_p, 1.0 if not pred.survives else 0.0),
                "width_pred": w_p, "width_meas": w_m,
                "width_err": _rel(w_m, w_p, 0.0) if pred.survives else float("nan"),
                "survives": int(pred.survives),
            })


@dataclass
class RunReport:
    scenario_id: str
    outdir: str
    files: list
    summary: dict


_CMP_HEADER = ("k", "packet", "pick_eta", "t", "velocity_pred", "velocity_meas", "velocity_err",
               "amplitude_pred", "amplitude_meas", "amplitude_err", "width_pred", "width_meas",
               "width_err", "survives")


def _breaches(sc, results):
    found = []
    for res in results:
        for row in res.comparison:
            for key, tol in (("velocity_err", sc.velocity_tol), ("amplitude_err", sc.amplitude_tol),
                             ("width_err", sc.width_tol)):
                err = row[key]
                if math.isfinite(err) and err > tol:
                    found.append({"k": row["k"], "packet": row["packet"], "t": row["t"],
                                  "quantity": key, "error": err, "tolerance": tol})
    return found


def _level_summary(res):
    s = {"k": res.k, "case": res.case, "conservation_error": res.conservation_error,
         "packets": []}
    for pred, series in zip(res.predictions, res.packets):
        s["packets"].append({
            "pick_eta": pred.pick_eta, "amplitude_factor": pred.amplitude_factor,
            "velocity_pred": pred.velocity, "velocity_meas": series["velocity"],
            "amplitude_meas_t0": float(series["peak_amp"][0]),
            "survives": pred.survives,
        })
    return s


def _regime(sc):
    return scale_regime_check(sc.h, sc.gamma_value)


def run(sc, outdir, outputs=None, measure=True):
    """Execute ``sc`` and write the requested ``outputs`` into ``outdir``.

    Returns a :class:`RunReport`; ``summary["breaches"]`` lists comparison
    rows whose relative errors exceed the scenario tolerances.
    """
    sc.validate()
    outputs = tuple(sc.outputs if outputs is None else outputs)
    need_measure = measure and any(o in outputs for o in ("timeseries", "comparison"))
    results = level_results(sc, measure=need_measure)
    norm_reports = _norm_reports(sc, results) if "norms" in outputs else None

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for res in results:
        meta = sc.meta(res.k)
        if "snapshots" in outputs:
            write_field_csv(isdft(res.spectrum), out / f"datum_k{res.k}_phys.csv", meta | {"t": 0.0})
            write_field_csv(res.spectrum, out / f"datum_k{res.k}_spec.csv", meta | {"t": 0.0})
            files += [f"datum_k{res.k}_phys.csv", f"datum_k{res.k}_spec.csv"]
            if res.coarse is not None:
                write_field_csv(res.coarse, out / f"coarse_k{res.k}_phys.csv", meta)
                write_field_csv(sdft(res.coarse), out / f"coarse_k{res.k}_spec.csv", meta)
                files += [f"coarse_k{res.k}_phys.csv", f"coarse_k{res.k}_spec.csv"]
            if "timeseries" in outputs or "comparison" in outputs:
                write_field_csv(res.final, out / f"final_k{res.k}_phys.csv",
                                meta | {"t": sc.T})
                files.append(f"final_k{res.k}_phys.csv")
        if "timeseries" in outputs:
            for series in res.packets:
                name = f"timeseries_k{res.k}_p{series['index']}.csv"
                rows = zip(*(np.asarray(series[c], dtype=float).tolist()
                             for c in ("t", "centroid", "width", "peak_amp", "l2norm")))
                _write_table(out / name, meta | {"pick_eta": repr(series["pick_eta"])},
                             ("t", "centroid", "width", "peak_amp", "l2norm"), rows)
                files.append(name)
    if "prediction" in outputs:
        _dump_json(out / "prediction.json", {
            "meta": sc.meta(), "regime": _regime(sc),
            "levels": [{"k": r.k, **sc.meta(r.k), **r.prediction_json} for r in results]})
        files.append("prediction.json")
    if norm_reports is not None:
        _dump_json(out / "norms.json", {"meta": sc.meta(), "regime": _regime(sc),
                                        "levels": norm_reports})
        files.append("norms.json")
    breaches = _breaches(sc, results) if need_measure else []
    if "comparison" in outputs:
        rows = ([row[c] for c in _CMP_HEADER] for res in results for row in res.comparison)
        _write_table(out / "comparison.csv", sc.meta() | {"k": ",".join(map(str, sc.k_levels))},
                     _CMP_HEADER, rows)
        files.append("comparison.csv")
    summary = {"meta": sc.meta(), "regime": _regime(sc),
               "levels": [_level_summary(r) for r in results] if need_measure else
                         [{"k": r.k, "case": r.case, "conservation_error": r.conservation_error}
                          for r in results],
               "breaches": breaches, "files": sorted(files)}
    _dump_json(out / "report.json", summary)
    files.append("report.json")
    return RunReport(sc.scenario_id, str(out), sorted(files), summary)


def _norm_reports(sc, results):
    s = _symbol(sc)
    out = []
    for res in results:
        meta = {"gamma": sc.gamma_value, "scenario_id": sc.scenario_id}
        st = strichartz_norm(res.spectrum, s, sc.p, sc.T, sc.n_samples, sc.sign, **meta)
        ls = local_smoothing(res.spectrum, s, sc.radii, sc.T, sc.n_samples, sc.sign, **meta)
        out.append({"k": res.k, "projection": sc.projection if res.k else "none",
                    "strichartz": st.to_dict(), "local_smoothing": ls.to_dict()})
    return out


def norms(sc):
    """Strichartz and local-smoothing reports per level, without writing files."""
    sc.validate()
    return _norm_reports(sc, level_results(sc, measure=False))


def compare(sc):
    """Measured-vs-predicted rows and tolerance breaches, without writing files."""
    results = level_results(sc, measure=True)
    return [row for r in results for row in r.comparison], _breaches(sc, results)


@dataclass
class SweepReport:
    scenario_id: str
    rows: list
    growth: list

    def to_dict(self):
        return asdict(self)


def _sweep_one(sc):
    grid = _grid(sc)
    s = _symbol(sc)
    F0 = build_datum(sc, grid)
    rows = []
    rem = {"remainder_sq": float("nan"), "remainder_rel": float("nan")}
    if not sc.is_pi_split and sc.symbol == "semidiscrete":
        (_, sq), = remainder_trace(F0, sc.eta0_value, [sc.T], sc.sign, squared=True)
        (_, rel), = remainder_trace(F0, sc.eta0_value, [sc.T], sc.sign, squared=False)
        rem = {"remainder_sq": sq, "remainder_rel": rel}
    meta = {"gamma": sc.gamma_value, "scenario_id": sc.scenario_id}
    for k in sc.k_levels:
        F, _ = filtered_datum(sc, F0, k)
        st = strichartz_norm(F, s, sc.p, sc.T, sc.n_samples, sc.sign, **meta)
        ls = local_smoothing(F, s, sc.radii, sc.T, sc.n_samples, sc.sign, **meta)
        rows.append({"h": sc.h, "M": sc.M, "k": k, "gamma": sc.gamma_value,
                     "strichartz_ratio": st.ratio, "smoothing_ratio": ls.smoothing_ratio,
                     "strichartz": st.to_dict(), "local_smoothing": ls.to_dict(), **rem})
    return rows


def sweep(base, h_list, outdir=None, workers=None):
    """Norm reports over a descending list of mesh sizes at fixed window length.

    Returns a :class:`SweepReport` with one row per ``(h, k)`` and the growth
    ratios between consecutive ``h`` (finer over coarser).
    """
    h_list = [float(h) for h in h_list]
    problems = []
    if len(h_list) < 2:
        problems.append("sweep needs at least two mesh sizes")
    if h_list != sorted(h_list, reverse=True) or len(set(h_list)) != len(h_list):
        problems.append(f"mesh sizes must be strictly decreasing, got {h_list}")
    scenarios = []
    for h in h_list:
        sc = base.with_h(h)
        if abs(sc.M * h - base.L) > 1e-9 * base.L:
            problems.append(f"h={h!r} does not divide the window length L={base.L!r}")
            continue
        try:
            scenarios.append(sc.validate())
        except ScenarioError as exc:
            problems.extend(f"h={h!r}: {p}" for p in exc.problems)
    if problems:
        raise ScenarioError(problems)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_h = list(pool.map(_sweep_one, scenarios))
    rows = [r for block in per_h for r in block]
    growth = []
    keys = ("strichartz_ratio", "smoothing_ratio", "remainder_sq", "remainder_rel")
    for a, b in zip(per_h, per_h[1:]):
        for ra, rb in zip(a, b):
            growth.append({"k": ra["k"], "h_from": ra["h"], "h_to": rb["h"],
                           **{key: rb[key] / ra[key] for key in keys}})
    report = SweepReport(base.scenario_id, rows, growth)
    if outdir is not None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        meta = base.meta() | {"k": ",".join(map(str, base.k_levels))}
        _dump_json(out / "sweep.json", {"meta": meta, "regime": [_regime(s) for s in scenarios],
                                        **report.to_dict()})
        cols = ("h", "M", "k", "gamma", "strichartz_ratio", "smoothing_ratio",
                "remainder_sq", "remainder_rel")
        _write_table(out / "sweep.csv", meta, cols, ([r[c] for c in cols] for r in rows))
    return report
