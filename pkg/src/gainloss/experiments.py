"""Experiment orchestration.

Every ``run_*`` function takes plain parameters, writes its artifacts through
a :class:`~gainloss.io.RunDirectory` when ``out`` is given and returns a
summary dict with the headline numbers.  Seeds for simulated paths are derived
from the master seed, the experiment name and the grid/replicate indices, so
results do not depend on execution order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import GainLossError
from .fitters import (
    AsymmetryMeasure,
    ExpDecayFit,
    asymmetry,
    fit_expdecay,
    gengamma_cdf,
    gengamma_pdf,
    linear_fit,
)
from .fpt import FptSamples, binned_density, empirical_distribution, fpt_samples_fast
from .io import RunDirectory, read_price_csv, series_csv_text
from .leverage import LeverageCurve, leverage_curve
from .models import (
    EgarchParams,
    RetardedParams,
    SimulationSpec,
    egarch_unconditional_variance,
    simulate_egarch,
    simulate_iid_gaussian,
    simulate_retarded,
)
from .plotting import PlotSeries, PlotStyle, render_svg
from .series import (
    LogPriceSeries,
    PriceSeries,
    ReturnSeries,
    derive_seed,
    permute_returns,
    rebuild,
    returns,
    series_hash,
    stats,
    to_log,
)
from .wavelet import WaveletSpec, high_pass_filtration, high_pass_returns

log = logging.getLogger(__name__)

DEFAULT_LENGTH = 1_000_000
DEFAULT_MAX_WAIT = 250.0
EGARCH_BASE = dict(mu=0.0, a0=-0.70, a1b=0.20, b1=0.92)
RETARDED_SCAN_BASE = dict(sigma=0.013, alpha=0.90)
EGARCH_SCAN_GRID = (-0.30, -0.225, -0.15, -0.075, 0.0, 0.075, 0.15, 0.225, 0.30)
RETARDED_SCAN_GRID = (1.0, 1.5, 2.0, 2.5, 3.0)


@dataclass(frozen=True)
class RhoSpec:
    """Barrier level: ``absolute`` if given, else ``multiple`` daily std devs."""

    multiple: float = 5.0
    absolute: float | None = None

    def resolve(self, sigma: float) -> float:
        if self.absolute is not None:
            return float(self.absolute)
        return self.multiple * sigma


@dataclass(frozen=True)
class Analysis:
    rho: RhoSpec = RhoSpec()
    max_wait: float | None = DEFAULT_MAX_WAIT
    dm_method: str = "fitted"
    max_lag: int = 250
    fit_lags: range = range(1, 51)


@dataclass
class FptPair:
    rho: float
    sigma: float
    gain: FptSamples
    loss: FptSamples
    asym: AsymmetryMeasure | None = None
    error: str | None = None

    @property
    def d_m(self) -> float | None:
        return None if self.asym is None else self.asym.d_m

    def summary(self) -> dict:
        out = {
            "rho": self.rho,
            "sigma": self.sigma,
            "gain": {"starts_scanned": self.gain.starts_scanned, "starts_hit": self.gain.starts_hit},
            "loss": {"starts_scanned": self.loss.starts_scanned, "starts_hit": self.loss.starts_hit},
            "d_m": self.d_m,
            "error": self.error,
        }
        if self.asym is not None:
            out["mode_gain"] = self.asym.mode_gain
            out["mode_loss"] = self.asym.mode_loss
            out["dm_method"] = self.asym.method
        return out


@dataclass
class LeverageResult:
    curve: LeverageCurve
    fit: ExpDecayFit | None
    error: str | None = None

    def summary(self) -> dict:
        return {
            "a": None if self.fit is None else self.fit.a,
            "t_scale": None if self.fit is None else self.fit.t_scale,
            "residual": None if self.fit is None else self.fit.residual,
            "error": self.error,
        }


@dataclass
class ScanPoint:
    value: float
    a: float
    t_scale: float
    d_m: float | None
    seeds: tuple = field(default_factory=tuple)
    n_replicates: int = 1


# --------------------------------------------------------------------------
# building blocks


def sample_sigma(path: LogPriceSeries) -> float:
    return stats(returns(path)).std


def analyze_fpt(path: LogPriceSeries, sigma: float, opts: Analysis) -> FptPair:
    """Waiting times at ``+rho`` and ``-rho`` and their mode gap."""
    rho = abs(opts.rho.resolve(sigma))
    gain = fpt_samples_fast(path, rho)
    loss = fpt_samples_fast(path, -rho)
    pair = FptPair(rho, sigma, gain, loss)
    try:
        pair.asym = asymmetry(gain, loss, opts.dm_method, opts.max_wait)
    except GainLossError as exc:
        pair.error = f"{type(exc).__name__}: {exc}"
        log.warning("asymmetry fit failed at rho=%g: %s", rho, exc)
    return pair


def analyze_leverage(ret: ReturnSeries, opts: Analysis, kind: str = "correlation") -> LeverageResult:
    lags = range(0, min(opts.max_lag, len(ret) - 30) + 1)
    curve = leverage_curve(ret, lags, kind)
    try:
        fit = fit_expdecay(curve, opts.fit_lags)
        return LeverageResult(curve, fit)
    except GainLossError as exc:
        return LeverageResult(curve, None, f"{type(exc).__name__}: {exc}")


def simulate_path(model: str, params, length: int, seed: int, burn_in=None) -> LogPriceSeries:
    spec = SimulationSpec(length=length, burn_in=burn_in, seed=seed)
    if model == "egarch":
        return rebuild(simulate_egarch(params, spec))
    if model == "retarded":
        return to_log(simulate_retarded(params, spec))
    if model == "iid":
        mu, sigma = params
        return rebuild(simulate_iid_gaussian(mu, sigma, spec))
    raise ValueError(f"unknown model {model!r}")


def model_params(model: str, **kw):
    if model == "egarch":
        keys = ("mu", "a0", "a1a", "a1b", "b1")
        return EgarchParams(**{k: kw[k] for k in keys if k in kw})
    if model == "retarded":
        keys = ("sigma", "alpha", "c", "s0")
        return RetardedParams(**{k: kw[k] for k in keys if k in kw})
    if model == "iid":
        return (kw.get("mu", 0.0), kw.get("sigma", 0.013))
    raise ValueError(f"unknown model {model!r}")


def model_sigma(model: str, params) -> float | None:
    """Model-implied daily std where a closed form exists (EGARCH only)."""
    if model == "egarch":
        return float(np.sqrt(egarch_unconditional_variance(params)))
    if model == "iid":
        return float(params[1])
    return None


# --------------------------------------------------------------------------
# artifact emission


def _fit_records(pair: FptPair) -> list[dict]:
    records = []
    if pair.asym is not None and pair.asym.fit_gain is not None:
        for leg, fit in (("gain", pair.asym.fit_gain), ("loss", pair.asym.fit_loss)):
            records.append({
                "kind": "gengamma",
                "leg": leg,
                "params": fit.as_dict(),
                "loglik": fit.loglik,
                "n_samples": fit.n_samples,
                "max_wait": fit.max_wait,
            })
    return records


def fpt_plot_series(pair: FptPair) -> list[PlotSeries]:
    series = []
    for leg, samples, marker in (("gain", pair.gain, "stars"), ("loss", pair.loss, "rings")):
        if samples.starts_hit == 0:
            continue
        centers, density = binned_density(empirical_distribution(samples, binned=True))
        sign = "+" if leg == "gain" else "-"
        series.append(PlotSeries(f"rho = {sign}{pair.rho:.4g}", centers, density, marker,
                                 "#1f4e9c" if leg == "gain" else "#b2182b"))
    if pair.asym is not None and pair.asym.fit_gain is not None:
        for leg, samples, fit in (("gain", pair.gain, pair.asym.fit_gain), ("loss", pair.loss, pair.asym.fit_loss)):
            top = fit.max_wait if fit.max_wait is not None else float(samples.samples.max())
            grid = np.geomspace(1.0, max(top, 2.0), 120)
            scale = 1.0
            if fit.max_wait is not None:
                inside = float(np.mean(samples.samples <= fit.max_wait))
                scale = inside / float(gengamma_cdf(fit, fit.max_wait))
            series.append(PlotSeries(f"fit {leg}", grid, scale * gengamma_pdf(fit, grid), "line",
                                     "#1f4e9c" if leg == "gain" else "#b2182b"))
    return series


def emit_fpt_pair(run: RunDirectory, prefix: str, pair: FptPair, source_hash: str, title: str = "") -> None:
    meta = {"source_hash": source_hash, "rho": pair.rho, "sigma": pair.sigma, "legs": {}}
    for leg, samples in (("gain", pair.gain), ("loss", pair.loss)):
        meta["legs"][leg] = {
            "rho": samples.rho,
            "starts_scanned": samples.starts_scanned,
            "starts_hit": samples.starts_hit,
        }
        if samples.starts_hit:
            support, counts = samples.counts()
            dist = empirical_distribution(samples)
            run.write_csv(f"{prefix}_{leg}_samples.csv", ["s", "count"], zip(support, counts))
            run.write_csv(f"{prefix}_{leg}_distribution.csv", ["s", "probability"],
                          zip(dist.support, dist.probabilities))
    meta["d_m"] = pair.d_m
    meta["asymmetry_error"] = pair.error
    if pair.asym is not None:
        meta["mode_gain"] = pair.asym.mode_gain
        meta["mode_loss"] = pair.asym.mode_loss
        meta["dm_method"] = pair.asym.method
    run.write_json(f"{prefix}_fpt_meta.json", meta)
    run.write_json(f"{prefix}_fpt_fits.json", _fit_records(pair))
    series = fpt_plot_series(pair)
    if series:
        style = PlotStyle(title=title or prefix, xlabel="waiting time (days)",
                          ylabel="probability density", logx=True)
        run.write_text(f"{prefix}_fpt.svg", render_svg(series, style))


def emit_leverage(run: RunDirectory, prefix: str, lev: LeverageResult, source_hash: str, title: str = "") -> None:
    c = lev.curve
    run.write_csv(f"{prefix}_leverage.csv", ["tau", "value", "kind"],
                  ((t, v, c.kind) for t, v in zip(c.lags, c.values)))
    run.write_json(f"{prefix}_leverage_meta.json", {
        "kind": c.kind,
        "lag_min": int(c.lags[0]),
        "lag_max": int(c.lags[-1]),
        "n_pairs": c.n_pairs,
        "source_hash": source_hash,
    })
    record = {"kind": "expdecay", "params": None, "residual": None, "n_samples": int(c.lags.size),
              "error": lev.error}
    if lev.fit is not None:
        record.update(params={"a": lev.fit.a, "t_scale": lev.fit.t_scale}, residual=lev.fit.residual)
    run.write_json(f"{prefix}_leverage_fit.json", record)
    keep = c.lags >= 0
    series = [PlotSeries("L(tau)", c.lags[keep], c.values[keep], "dots", "#1f4e9c")]
    if lev.fit is not None:
        grid = np.linspace(max(1, int(c.lags[keep][0])), int(c.lags[-1]), 200)
        series.append(PlotSeries(f"-A exp(-tau/T), A={lev.fit.a:.3f}, T={lev.fit.t_scale:.1f}",
                                 grid, lev.fit.predict(grid), "line", "#b2182b"))
    run.write_text(f"{prefix}_leverage.svg", render_svg(
        series, PlotStyle(title=title or prefix, xlabel="lag tau (days)", ylabel="L(tau)")))


def _open_run(out, experiment, config):
    return None if out is None else RunDirectory(out, experiment, config)


# --------------------------------------------------------------------------
# experiments


def run_stock_asymmetry(csv_paths, opts: Analysis = Analysis(), rho_abs: float | None = None,
                        out=None, config: dict | None = None, seed: int = 0) -> dict:
    """Gain/loss asymmetry of user-supplied daily price files.

    For each file: sigma_S, both waiting-time distributions at
    ``+-rho_multiple * sigma_S``, generalized gamma fits and ``d_m``; with
    ``rho_abs`` also the same analysis at a fixed absolute level.
    """
    run = _open_run(out, "report", config or {"csv": list(map(str, csv_paths)), "seed": seed})
    results = {}
    for path in csv_paths:
        prices = read_price_csv(path)
        x = to_log(prices)
        st = stats(returns(x))
        name = _stem(path)
        h = series_hash(x.values)
        entry = {"n_prices": len(prices), "sigma": st.std, "mean": st.mean, "skewness": st.skewness,
                 "source_hash": h}
        pair = analyze_fpt(x, st.std, opts)
        entry["scaled"] = pair.summary()
        if run is not None:
            emit_fpt_pair(run, f"{name}_scaled", pair, h,
                          f"{name}: rho = +-{opts.rho.multiple:g} sigma_S (sigma_S = {100 * st.std:.2f}%)")
        if rho_abs is not None:
            fixed = analyze_fpt(x, st.std, Analysis(RhoSpec(absolute=rho_abs), opts.max_wait,
                                                    opts.dm_method, opts.max_lag, opts.fit_lags))
            entry["absolute"] = fixed.summary()
            if run is not None:
                emit_fpt_pair(run, f"{name}_absolute", fixed, h, f"{name}: rho = +-{rho_abs:g}")
        results[name] = entry
    if run is not None:
        run.write_json("summary.json", results)
        run.finish()
    return results


def _stem(path) -> str:
    from pathlib import Path

    return Path(path).stem


def run_egarch_panel(a1a_values=(0.0, -0.15, -0.30), base: dict | None = None, length: int = DEFAULT_LENGTH,
                     seed: int = 0, opts: Analysis = Analysis(), out=None, config: dict | None = None,
                     burn_in=None) -> dict:
    """Leverage curve, exponential fit and waiting-time pair per ``a1a``,
    with barriers at ``+-5`` unconditional standard deviations."""
    base = {**EGARCH_BASE, **(base or {})}
    run = _open_run(out, "panel", config or {"a1a_values": list(a1a_values), "seed": seed, "length": length})
    results = []
    for i, a1a in enumerate(a1a_values):
        params = EgarchParams(a1a=a1a, **base)
        point_seed = derive_seed(seed, "panel", i)
        sigma_bar = model_sigma("egarch", params)
        path = simulate_path("egarch", params, length, point_seed, burn_in)
        ret = returns(path)
        lev = analyze_leverage(ret, opts)
        pair = analyze_fpt(path, sigma_bar, opts)
        entry = {"a1a": a1a, "seed": point_seed, "sigma_bar": sigma_bar,
                 "sample_sigma": stats(ret).std, **lev.summary(), "fpt": pair.summary()}
        results.append(entry)
        if run is not None:
            prefix = f"panel_{i:02d}"
            h = series_hash(path.values)
            emit_leverage(run, prefix, lev, h, f"EGARCH a1a = {a1a:g}")
            emit_fpt_pair(run, prefix, pair, h, f"EGARCH a1a = {a1a:g}: rho = +-5 sigma_bar")
    summary = {"base": base, "length": length, "points": results}
    if run is not None:
        run.write_json("summary.json", summary)
        run.finish()
    return summary


def _scan_replicate(model, params, length, seed, opts, burn_in):
    path = simulate_path(model, params, length, seed, burn_in)
    ret = returns(path)
    sigma = stats(ret).std
    lev = analyze_leverage(ret, opts)
    if lev.fit is None:
        raise GainLossError(lev.error or "leverage fit failed")
    pair = analyze_fpt(path, sigma, opts)
    return lev.fit, pair


def run_scan(model: str = "egarch", grid=None, replicates: int = 3, length: int = DEFAULT_LENGTH,
             seed: int = 0, base: dict | None = None, opts: Analysis = Analysis(), out=None,
             config: dict | None = None, burn_in=None) -> dict:
    """Leverage amplitude ``A`` and ``d_m`` across a parameter grid.

    The scanned parameter is ``a1a`` for EGARCH and ``c`` for the retarded
    model.  Replicates use distinct derived seeds and are averaged per grid
    point; failed replicates are recorded and skipped.  Straight lines of
    ``A`` and ``d_m`` against the parameter are fitted over the surviving
    points.
    """
    if model == "egarch":
        grid = EGARCH_SCAN_GRID if grid is None else tuple(grid)
        base = {**EGARCH_BASE, **(base or {})}
        make = lambda v: EgarchParams(a1a=v, **base)  # noqa: E731
    elif model == "retarded":
        grid = RETARDED_SCAN_GRID if grid is None else tuple(grid)
        base = {**RETARDED_SCAN_BASE, **(base or {})}
        make = lambda v: RetardedParams(c=v, **base)  # noqa: E731
    else:
        raise ValueError(f"scan supports 'egarch' and 'retarded', not {model!r}")
    if len(grid) < 5:
        raise GainLossError(f"scan grid needs >= 5 points, got {len(grid)}")
    run = _open_run(out, "scan", config or {"model": model, "grid": list(grid), "replicates": replicates,
                                            "seed": seed, "length": length})
    rows, points = [], []
    for i, value in enumerate(grid):
        params = make(value)
        fits, dms, seeds = [], [], []
        for rep in range(replicates):
            point_seed = derive_seed(seed, "scan", model, i, rep)
            try:
                if run is not None:
                    with run.timed(f"point_{i:02d}_{rep:02d}"):
                        fit, pair = _scan_replicate(model, params, length, point_seed, opts, burn_in)
                else:
                    fit, pair = _scan_replicate(model, params, length, point_seed, opts, burn_in)
            except GainLossError as exc:
                log.warning("scan point %s replicate %d failed: %s", value, rep, exc)
                if run is not None:
                    run.record_failure(f"grid[{i}]={value} replicate {rep} seed {point_seed}", exc)
                continue
            fits.append(fit)
            seeds.append(point_seed)
            dms.append(pair.d_m)
            if pair.error and run is not None:
                run.record_failure(f"grid[{i}]={value} replicate {rep} d_m", GainLossError(pair.error))
            rows.append((value, rep, point_seed, fit.a, fit.t_scale,
                         float("nan") if pair.d_m is None else pair.d_m, pair.rho))
        if not fits:
            continue
        good_dm = [d for d in dms if d is not None]
        points.append(ScanPoint(
            value=value,
            a=float(np.mean([f.a for f in fits])),
            t_scale=float(np.mean([f.t_scale for f in fits])),
            d_m=float(np.mean(good_dm)) if len(good_dm) == len(dms) else None,
            seeds=tuple(seeds),
            n_replicates=len(fits),
        ))
    summary = {"model": model, "base": base, "length": length, "replicates": replicates,
               "points": [p.__dict__ | {"seeds": list(p.seeds)} for p in points]}
    fits = {}
    a_pts = [(p.value, p.a) for p in points]
    d_pts = [(p.value, p.d_m) for p in points if p.d_m is not None]
    for label, pts in (("a", a_pts), ("d_m", d_pts)):
        if len(pts) >= 3:
            lf = linear_fit(*zip(*pts))
            fits[label] = {"slope": lf.slope, "intercept": lf.intercept, "r_squared": lf.r_squared,
                           "slope_stderr": lf.slope_stderr}
        else:
            fits[label] = None
    summary["linear_fits"] = fits
    if run is not None:
        pname = "a1a" if model == "egarch" else "c"
        run.write_csv("scan_replicates.csv", [pname, "replicate", "seed", "a", "t_scale", "d_m", "rho"], rows)
        run.write_csv("scan_points.csv", [pname, "a", "t_scale", "d_m", "n_replicates"],
                      ((p.value, p.a, p.t_scale, float("nan") if p.d_m is None else p.d_m, p.n_replicates)
                       for p in points))
        run.write_json("scan_fits.json", fits)
        run.write_json("summary.json", summary)
        for label, pts, ylabel in (("a", a_pts, "A"), ("d_m", d_pts, "d_m (days)")):
            if not pts:
                continue
            xs, ys = (np.array(v) for v in zip(*pts))
            series = [PlotSeries(ylabel, xs, ys, "dots")]
            if fits[label] is not None:
                grid_x = np.linspace(xs.min(), xs.max(), 50)
                series.append(PlotSeries(f"linear fit, r2={fits[label]['r_squared']:.3f}", grid_x,
                                         fits[label]["intercept"] + fits[label]["slope"] * grid_x, "line"))
            run.write_text(f"scan_{label}.svg", render_svg(series, PlotStyle(
                title=f"{model}: {ylabel} against {pname}", xlabel=pname, ylabel=ylabel)))
        run.finish()
    return summary


def _source_path(model, params, csv_path, length, seed, tag, burn_in):
    if csv_path is not None:
        x = to_log(read_price_csv(csv_path))
        return x, None
    path = simulate_path(model, params, length, derive_seed(seed, tag, "source"), burn_in)
    return path, model_sigma(model, params)


def run_permutation_test(model: str = "egarch", params=None, csv_path=None, length: int = DEFAULT_LENGTH,
                         seed: int = 0, opts: Analysis = Analysis(), out=None, config: dict | None = None,
                         burn_in=None) -> dict:
    """Leverage and gain/loss asymmetry before and after shuffling the returns.

    Barriers use the model's unconditional std when one exists, otherwise
    the sample std (which the shuffle leaves unchanged).
    """
    if params is None and csv_path is None:
        params = EgarchParams(a1a=-0.15, **EGARCH_BASE)
    path, sigma_ref = _source_path(model, params, csv_path, length, seed, "permute", burn_in)
    ret = returns(path)
    shuffled = permute_returns(ret, derive_seed(seed, "permute", "shuffle"))
    run = _open_run(out, "permute", config or {"model": model, "seed": seed, "length": length})
    sides = {}
    for side, r in (("original", ret), ("permuted", shuffled)):
        p = rebuild(r)
        st = stats(r)
        sigma = sigma_ref if sigma_ref is not None else st.std
        lev = analyze_leverage(r, opts)
        pair = analyze_fpt(p, sigma, opts)
        sides[side] = {"stats": st.__dict__, **lev.summary(), "fpt": pair.summary()}
        if run is not None:
            h = series_hash(p.values)
            emit_leverage(run, side, lev, h, f"{side} returns")
            emit_fpt_pair(run, side, pair, h, f"{side} returns")
    summary = {"model": None if csv_path else model, "csv": None if csv_path is None else str(csv_path),
               "sigma_reference": sigma_ref, **sides}
    if run is not None:
        run.write_json("summary.json", summary)
        run.finish()
    return summary


def run_filtration_test(model: str = "egarch", params=None, csv_path=None, ks=(6, 8, 10),
                        wavelet: WaveletSpec = WaveletSpec(), domain: str = "returns",
                        length: int = DEFAULT_LENGTH, seed: int = 0, opts: Analysis = Analysis(),
                        out=None, config: dict | None = None, burn_in=None) -> dict:
    """Waiting-time pairs for the high-pass filtrations ``R_k`` and the
    unfiltered path, each at ``+-rho_multiple`` times its own sample std.

    ``domain="returns"`` filters the increments and cumulates them;
    ``domain="price"`` transforms the log-price path directly.
    """
    if params is None and csv_path is None:
        params = EgarchParams(a1a=-0.15, **EGARCH_BASE)
    path, sigma_ref = _source_path(model, params, csv_path, length, seed, "filter", burn_in)
    run = _open_run(out, "filter", config or {"model": model, "ks": list(ks), "seed": seed, "length": length})
    levels = []
    entries = [("unfiltered", None, path, {"k": None, "truncated_prefix_length": 0})]
    for k in sorted(set(ks), reverse=True):
        if domain == "returns":
            filt = high_pass_returns(returns(path), k, wavelet)
        else:
            filt = high_pass_filtration(path, k, wavelet)
        entries.append((f"R{k}", k, filt.series, filt.metadata()))
    for label, k, series, meta in entries:
        sigma = sample_sigma(series)
        pair = analyze_fpt(series, sigma, opts)
        levels.append({"label": label, "k": k, "sample_sigma": sigma, "fpt": pair.summary(),
                       "d_m": pair.d_m, **{f"wavelet_{m}": v for m, v in meta.items() if m != "k"}})
        if run is not None:
            h = series_hash(series.values)
            if k is not None:
                run.write_text(f"{label}_series.csv", series_csv_text(PriceSeries(np.exp(series.values))))
                run.write_json(f"{label}_filtration.json", meta | {"domain": domain})
            emit_fpt_pair(run, label, pair, h, f"{label}: rho = +-{opts.rho.multiple:g} sample std")
    summary = {"model": None if csv_path else model, "csv": None if csv_path is None else str(csv_path),
               "sigma_reference": sigma_ref, "family": wavelet.family, "levels": wavelet.levels,
               "domain": domain, "filtrations": levels}
    if run is not None:
        run.write_json("summary.json", summary)
        run.finish()
    return summary
