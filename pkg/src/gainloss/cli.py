"""Command-line entry point: ``gainloss <subcommand> [options]``.

Every subcommand reads an optional flat config file (``--config``), applies
``--set key=value`` overrides and the global ``--seed``/``--out`` flags, runs,
and leaves its outputs plus ``manifest.json`` in the output directory.

Exit status: 0 on success, 1 on domain/ingestion/fit errors, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .config import ConfigError, build_config, parse_text, read_config
from .errors import GainLossError
from .experiments import (
    Analysis,
    RhoSpec,
    analyze_fpt,
    analyze_leverage,
    emit_fpt_pair,
    emit_leverage,
    model_params,
    model_sigma,
    run_egarch_panel,
    run_filtration_test,
    run_permutation_test,
    run_scan,
    run_stock_asymmetry,
    simulate_path,
    _stem,
)
from .io import RunDirectory, read_price_csv, series_csv_text
from .series import PriceSeries, returns, series_hash, stats, to_log
from .wavelet import WaveletSpec

log = logging.getLogger("gainloss")

DESCRIPTIONS = {
    "ingest": "validate daily price CSV files and report their return statistics",
    "simulate": "simulate a price path (egarch, retarded or iid) as a date,close CSV",
    "fpt": "first passage time samples and distributions at +rho and -rho",
    "leverage": "leverage curve of the returns with an exponential decay fit",
    "fit": "generalized gamma fits of both waiting-time legs and d_m",
    "permute": "leverage and asymmetry before and after shuffling the returns",
    "filter": "asymmetry of wavelet high-pass filtrations R_k",
    "panel": "EGARCH panel over several a1a values",
    "scan": "leverage amplitude and d_m across a parameter grid with line fits",
    "report": "full per-stock asymmetry report for user CSV files",
}
TAKES_CSV = {"ingest", "fpt", "leverage", "fit", "permute", "filter", "report"}
NEEDS_CSV = {"ingest", "fpt", "leverage", "fit", "report"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="key = value config file")
    common.add_argument("--seed", metavar="N", type=int, default=argparse.SUPPRESS, help="master seed")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="gainloss", parents=[common],
                                     description="Gain/loss asymmetry and leverage effect toolkit.")
    parser.add_argument("--version", action="version", version=f"gainloss {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, text in DESCRIPTIONS.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name in TAKES_CSV:
            p.add_argument("csv", nargs="*", help="date,close input file(s)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
    return parser


def load_config(args):
    file_values = read_config(args.config) if getattr(args, "config", None) else {}
    overrides = parse_text("\n".join(args.overrides), "--set") if args.overrides else {}
    overrides["seed"] = getattr(args, "seed", None)
    overrides["out"] = getattr(args, "out", None)
    if getattr(args, "csv", None):
        overrides["csv"] = tuple(args.csv)
    cfg = build_config(args.command, file_values, overrides)
    if args.command in NEEDS_CSV and not cfg.csv:
        raise ConfigError(f"{args.command} needs at least one CSV file")
    return cfg


def analysis_of(cfg) -> Analysis:
    return Analysis(
        rho=RhoSpec(cfg.rho_multiple, cfg.rho_abs),
        max_wait=cfg.max_wait,
        dm_method=cfg.dm_method,
        max_lag=cfg.max_lag,
        fit_lags=cfg.fit_lags,
    )


def _model(cfg):
    keys = ("mu", "a0", "a1a", "a1b", "b1") if cfg.model == "egarch" else ("sigma", "alpha", "c", "s0", "mu")
    return model_params(cfg.model, **{k: getattr(cfg, k) for k in keys})


# --------------------------------------------------------------------------
# subcommands


def cmd_ingest(cfg):
    run = RunDirectory(cfg.out, "ingest", cfg.echo())
    report = {}
    for path in cfg.csv:
        prices = read_price_csv(path)
        st = stats(returns(to_log(prices)))
        name = _stem(path)
        report[name] = {"path": str(path), "n_prices": len(prices), "first": prices.labels[0],
                        "last": prices.labels[-1], "mean": st.mean, "sigma": st.std,
                        "skewness": st.skewness, "source_hash": series_hash(to_log(prices).values)}
        run.write_text(f"{name}.csv", series_csv_text(prices))
        print(f"{name}: {len(prices)} prices, sigma_S = {st.std:.5f}")
    run.write_json("ingest.json", report)
    run.finish()


def cmd_simulate(cfg):
    params = _model(cfg)
    path = simulate_path(cfg.model, params, cfg.length, cfg.seed, cfg.burn_in)
    prices = PriceSeries(np.exp(path.values))
    run = RunDirectory(cfg.out, "simulate", cfg.echo())
    run.write_text("series.csv", series_csv_text(prices))
    st = stats(returns(path))
    run.write_json("series_meta.json", {"model": cfg.model, "length": cfg.length, "seed": cfg.seed,
                                        "sample_sigma": st.std, "sample_mean": st.mean,
                                        "model_sigma": model_sigma(cfg.model, params),
                                        "source_hash": series_hash(path.values)})
    run.finish()
    print(f"simulated {cfg.length} returns, sample sigma = {st.std:.5f}")


def _inputs(cfg):
    for path in cfg.csv:
        x = to_log(read_price_csv(path))
        yield _stem(path), x


def cmd_fpt(cfg):
    run = RunDirectory(cfg.out, "fpt", cfg.echo())
    opts = Analysis(rho=RhoSpec(cfg.rho_multiple, cfg.rho_abs), dm_method="histogram")
    for name, x in _inputs(cfg):
        sigma = stats(returns(x)).std
        pair = analyze_fpt(x, sigma, opts)
        emit_fpt_pair(run, name, pair, series_hash(x.values), f"{name}: rho = +-{pair.rho:.4g}")
        print(f"{name}: rho = {pair.rho:.5f}, hits +{pair.gain.starts_hit} / -{pair.loss.starts_hit}")
    run.finish()


def cmd_leverage(cfg):
    run = RunDirectory(cfg.out, "leverage", cfg.echo())
    opts = analysis_of(cfg)
    for name, x in _inputs(cfg):
        ret = returns(x)
        lev = analyze_leverage(ret, opts, cfg.kind)
        emit_leverage(run, name, lev, series_hash(x.values), name)
        if lev.fit is not None:
            print(f"{name}: A = {lev.fit.a:.4f}, T = {lev.fit.t_scale:.2f}")
        else:
            print(f"{name}: exponential fit failed: {lev.error}")
    run.finish()


def cmd_fit(cfg):
    run = RunDirectory(cfg.out, "fit", cfg.echo())
    opts = analysis_of(cfg)
    for name, x in _inputs(cfg):
        ret = returns(x)
        pair = analyze_fpt(x, stats(ret).std, opts)
        lev = analyze_leverage(ret, opts)
        emit_fpt_pair(run, name, pair, series_hash(x.values), name)
        emit_leverage(run, name, lev, series_hash(x.values), name)
        print(f"{name}: d_m = {pair.d_m}, A = {None if lev.fit is None else round(lev.fit.a, 4)}")
    run.finish()


def cmd_permute(cfg):
    csv_path = cfg.csv[0] if cfg.csv else None
    res = run_permutation_test(cfg.model, None if csv_path else _model(cfg), csv_path, cfg.length, cfg.seed,
                               analysis_of(cfg), cfg.out, cfg.echo(), cfg.burn_in)
    for side in ("original", "permuted"):
        print(f"{side}: A = {res[side]['a']}, d_m = {res[side]['fpt']['d_m']}")


def cmd_filter(cfg):
    csv_path = cfg.csv[0] if cfg.csv else None
    res = run_filtration_test(cfg.model, None if csv_path else _model(cfg), csv_path, cfg.ks,
                              WaveletSpec(cfg.family, cfg.levels), cfg.domain, cfg.length, cfg.seed,
                              analysis_of(cfg), cfg.out, cfg.echo(), cfg.burn_in)
    for row in res["filtrations"]:
        print(f"{row['label']}: sample sigma = {row['sample_sigma']:.5f}, d_m = {row['d_m']}")


def cmd_panel(cfg):
    base = {k: getattr(cfg, k) for k in ("mu", "a0", "a1b", "b1")}
    res = run_egarch_panel(cfg.a1a_values, base, cfg.length, cfg.seed, analysis_of(cfg), cfg.out, cfg.echo(),
                           cfg.burn_in)
    for p in res["points"]:
        print(f"a1a = {p['a1a']:g}: A = {p['a']}, T = {p['t_scale']}, d_m = {p['fpt']['d_m']}")


def cmd_scan(cfg):
    if cfg.model == "egarch":
        base = {k: getattr(cfg, k) for k in ("mu", "a0", "a1b", "b1")}
    elif cfg.model == "retarded":
        base = {k: getattr(cfg, k) for k in ("sigma", "alpha", "s0")}
    else:
        raise ConfigError("scan supports model = egarch or retarded")
    res = run_scan(cfg.model, cfg.grid, cfg.replicates, cfg.length, cfg.seed, base, analysis_of(cfg), cfg.out,
                   cfg.echo(), cfg.burn_in)
    for label, lf in res["linear_fits"].items():
        if lf is not None:
            print(f"{label}: slope = {lf['slope']:.4g}, r2 = {lf['r_squared']:.4f}")


def cmd_report(cfg):
    opts = analysis_of(cfg)
    opts = Analysis(RhoSpec(cfg.rho_multiple), opts.max_wait, opts.dm_method, opts.max_lag, opts.fit_lags)
    res = run_stock_asymmetry(cfg.csv, opts, cfg.rho_abs, cfg.out, cfg.echo(), cfg.seed)
    for name, entry in res.items():
        print(f"{name}: sigma_S = {entry['sigma']:.5f}, d_m = {entry['scaled']['d_m']}")


COMMANDS = {
    "ingest": cmd_ingest, "simulate": cmd_simulate, "fpt": cmd_fpt, "leverage": cmd_leverage,
    "fit": cmd_fit, "permute": cmd_permute, "filter": cmd_filter, "panel": cmd_panel,
    "scan": cmd_scan, "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"gainloss: usage error: {exc}", file=sys.stderr)
        return 2
    except (GainLossError, ValueError) as exc:
        print(f"gainloss: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
