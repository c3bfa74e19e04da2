"""Command-line front end.

    fockop <subcommand> [--config run.ini] [--output DIR] [--threads N] ...

Subcommands: weight-info, lattice, kernel-check, toeplitz, equiv-bounded,
equiv-compact, equiv-schatten. Exit status 0 on success, 2 for an invalid
configuration, 3 when a numerical check fails.
"""

import argparse
import csv
import os
import re
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import equivalence as eq
from . import plotting
from .config import RunConfig, load_config
from .errors import (ConfigError, NotHermitianError, NumericalCheckError, ParameterError,
                     WeightError)
from .geometry import Box
from .kernel import kernel_heatmap, verify_kernel_estimates
from .lattice import build_lattice, diagnostics, write_lattice_csv
from .toeplitz import assemble_toeplitz, carleson_norm, spectral_report, write_matrix_text, \
    write_spectral_csv
from .weights import RadiusField, check_admissibility, from_id

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
SUBCOMMANDS = ("weight-info", "lattice", "kernel-check", "toeplitz",
               "equiv-bounded", "equiv-compact", "equiv-schatten")


def slug(name):
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_")


def _f(v):
    return f"{float(v):.12e}"


def _write_pairs(path, rows, header=("quantity", "value")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, v in rows:
            w.writerow([k, v if isinstance(v, (int, np.integer)) else _f(v)])


def _out(cfg, name):
    return os.path.join(cfg.output, name)


# --- subcommands -----------------------------------------------------------

def cmd_weight_info(cfg):
    weight = from_id(cfg.weight_id)
    rep = check_admissibility(weight, cfg.box)
    _write_pairs(_out(cfg, "weight_info.csv"), rep.rows())
    field = RadiusField(weight)
    grid = cfg.box.grid(cfg.grid_resolution)
    rho = field.rho(grid)
    with open(_out(cfg, "rho.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "rho"])
        for z, r in zip(grid, rho):
            w.writerow([_f(z.real), _f(z.imag), _f(r)])
    plotting.heatmap(rho, cfg.box, _out(cfg, "rho.svg"), f"rho for {weight.name}", "rho")
    print(f"{weight.name}: admissible={rep.admissible} rho in [{rho.min():.6g}, {rho.max():.6g}]")


def cmd_lattice(cfg):
    field = RadiusField(from_id(cfg.weight_id))
    lat = build_lattice(field, cfg.box, cfg.delta, cfg.probe_resolution)
    cov, pack = lat.covering_violations(), lat.packing_violations()
    if cov or pack:
        raise NumericalCheckError("lattice", f"{cov} covering and {pack} packing violations")
    write_lattice_csv(lat, _out(cfg, "lattice.csv"))
    diag = diagnostics(lat, seed=cfg.seed)
    _write_pairs(_out(cfg, "lattice_diagnostics.csv"),
                 diag.rows() + [("covering_violations", cov), ("packing_violations", pack)])
    print(f"{len(lat)} lattice points, overlap N = {diag.overlap_N}")


def cmd_kernel_check(cfg):
    setup = eq.Setup(**cfg.setup_kwargs())
    model = setup.model
    grid = setup.grid()
    grid = grid[np.abs(grid) <= model.guard_radius()]
    rep = verify_kernel_estimates(model, setup.radius_field, grid)
    _write_pairs(_out(cfg, "kernel_estimates.csv"), rep.rows() + [("basis_size", model.basis_size)])
    g, vals = kernel_heatmap(model, 0j, cfg.box)
    plotting.heatmap(vals, cfg.box, _out(cfg, "kernel_heatmap.svg"), "|K(0, z)| e^{-phi(z)}")
    print(f"K = {model.basis_size}, guard radius {model.guard_radius():.4g}, epsilon {rep.epsilon:.4g}")


def cmd_toeplitz(cfg):
    setup = eq.Setup(**cfg.setup_kwargs())
    model = setup.model
    symbols = cfg.symbols()

    def one(G):
        T = assemble_toeplitz(model, G)
        return G, T, spectral_report(T, cfg.p_set, carleson_norm(model, G))

    sigmas = []
    for G, T, rep in eq._map(one, symbols, cfg.threads):
        s = slug(G.name)
        write_matrix_text(T, _out(cfg, f"toeplitz_{s}.txt"))
        with open(_out(cfg, f"toeplitz_{s}_diagonal.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "m", "real", "imag"])
            for k in range(T.basis_size):
                for m in range(T.d):
                    v = T.entry(k, m, k, m)
                    w.writerow([k, m, _f(v.real), _f(v.imag)])
        write_spectral_csv(rep, _out(cfg, f"spectrum_{s}.csv"), G.name)
        sigmas.append((G.name, rep.singular_values))
        print(f"{G.name}: ||T|| = {rep.operator_norm:.6g}, tail index {rep.tail_index}")
    plotting.spectra(sigmas, _out(cfg, "spectra.svg"))


def cmd_equiv_bounded(cfg, refine=False):
    setup = eq.Setup(**cfg.setup_kwargs())
    symbols = cfg.symbols()
    rep = eq.boundedness_report(setup, symbols, cfg.threads)
    eq.write_bounded_csv(rep, _out(cfg, "bounded.csv"))
    print(eq.summary_table(rep))
    print(f"empirical constant: {rep.constant:.6g}")
    if refine:
        with open(_out(cfg, "bounded_refinement.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["axis", "symbol", "max_ratio_base", "max_ratio_refined", "relative_change"])
            for axis in eq.REFINEMENT_AXES:
                ref = eq.boundedness_report(setup.refined(axis), symbols, cfg.threads)
                for a, b in zip(rep.rows, ref.rows):
                    w.writerow([axis, a.symbol, _f(a.max_ratio), _f(b.max_ratio),
                                _f(eq.relative_change(a.max_ratio, b.max_ratio))])
    if rep.inconsistent:
        raise NumericalCheckError("boundedness", f"non-finite quantities for {rep.inconsistent}")


def cmd_equiv_compact(cfg):
    setup = eq.Setup(**cfg.setup_kwargs())
    rep = eq.compactness_report(setup, cfg.symbols(), threads=cfg.threads)
    eq.write_compact_csv(rep, _out(cfg, "compact.csv"))
    eq.write_ring_csv(rep, _out(cfg, "rings.csv"))
    plotting.ring_profiles(rep, _out(cfg, "rings.svg"))
    for r in rep.rows:
        print(f"{r.symbol:28s} {r.verdict}")


def cmd_equiv_schatten(cfg):
    setup = eq.Setup(**cfg.setup_kwargs())
    rep = eq.schatten_report(setup, cfg.symbols(), cfg.p_set, cfg.threads)
    eq.write_schatten_csv(rep, _out(cfg, "schatten.csv"))
    for r in rep.rows:
        print(f"{r.symbol:28s} p={r.p:<4g} {r.verdict}")


# --- entry point -----------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="fockop", description=__doc__.split("\n\n")[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="INI run configuration")
    ap.add_argument("--output", help="output directory (overrides [run] output)")
    ap.add_argument("--threads", type=int, help="worker threads (overrides [run] threads)")
    ap.add_argument("--weight", help="weight id, e.g. gaussian:1 or radial-poly:0,1")
    ap.add_argument("--box", help="xmin,xmax,ymin,ymax (write --box=-3,3,-3,3)")
    ap.add_argument("--delta", type=float)
    ap.add_argument("--basis-size", type=int)
    ap.add_argument("--symbol", action="append",
                    help="symbol id (repeatable); 'gallery' for the standard eight")
    ap.add_argument("--d", type=int, help="symbol dimension")
    ap.add_argument("--refine", action="store_true",
                    help="equiv-bounded: also run the three refinement axes")
    return ap


def resolve_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    try:
        if args.output:
            cfg.output = args.output
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            cfg.threads = args.threads
        if args.weight:
            cfg.weight_id = args.weight
        if args.box:
            cfg.box = Box.parse(args.box)
        if args.delta is not None:
            if not 0 < args.delta < 1:
                raise ConfigError("--delta must lie in (0, 1)")
            cfg.delta = args.delta
        if args.basis_size is not None:
            cfg.basis_size = args.basis_size
        if args.symbol:
            cfg.symbol_ids = tuple(args.symbol)
        if args.d is not None:
            cfg.d = args.d
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def run(subcommand, cfg, refine=False):
    os.makedirs(cfg.output, exist_ok=True)
    # single-threaded BLAS keeps every floating-point reduction order fixed
    with threadpool_limits(limits=1):
        if subcommand == "weight-info":
            cmd_weight_info(cfg)
        elif subcommand == "lattice":
            cmd_lattice(cfg)
        elif subcommand == "kernel-check":
            cmd_kernel_check(cfg)
        elif subcommand == "toeplitz":
            cmd_toeplitz(cfg)
        elif subcommand == "equiv-bounded":
            cmd_equiv_bounded(cfg, refine)
        elif subcommand == "equiv-compact":
            cmd_equiv_compact(cfg)
        elif subcommand == "equiv-schatten":
            cmd_equiv_schatten(cfg)
        else:
            raise ConfigError(f"unknown subcommand {subcommand!r}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        from_id(cfg.weight_id)  # fail on a bad weight id before any output is written
        return run(args.subcommand, cfg, args.refine)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotHermitianError, NumericalCheckError) as exc:
        check = getattr(exc, "check", "hermitian")
        print(f"numerical check failed [{check}]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WeightError as exc:
        print(f"numerical check failed [weight]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
