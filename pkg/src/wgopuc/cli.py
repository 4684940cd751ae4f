"""Command-line front end.

Usage:
    wgopuc moments --p 0.5 --chi golden --n-min -5 --n-max 5 --bruteforce
    wgopuc verblunsky --p 0.5 --chi golden --n-max 50
    wgopuc poly --p 0.5 --chi golden --n 8 --all-paths
    wgopuc verify --p 0.5 --chi golden --suite all --out report.json
    wgopuc spectrum --p 0.5 --chi 1/5 --S 10 --format csv

Every number is written as a decimal string whose digit count follows from
``--precision-bits``; identical options give byte-identical output.

Exit status: 0 success, 1 verification failure, 2 configuration error,
3 numerical guard tripped.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import click

from . import identities as ids
from .errors import NumericalGuardError
from .measure import WrappedGeometricMeasure, atoms, moment_bruteforce, moment_closed, truncation_for
from .opuc import (
    PastroParams,
    max_coefficient_disagreement,
    pastro_polynomial,
    phi_via_hypergeometric,
    phi_via_recurrence,
    phi_via_toeplitz,
    rotate,
    verblunsky_sequence,
)
from .qseries import PrecisionContext, UnitPhase, decimal_string

__all__ = ["RunConfig", "main", "cli"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

TOEPLITZ_MAX_DEGREE = 32


@dataclass(frozen=True)
class RunConfig:
    p: str = "0.5"
    chi: str = "golden"
    k: int = 1
    rotation_phi: str = "0"
    precision_bits: int = 256
    tol_rel: float = 2.0**-100
    tol_div: float = 2.0**-40
    max_degree: int = 64
    truncation_tol: str = "1e-30"
    output_format: str = "csv"
    seed: int = 0

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.precision_bits, self.tol_rel, self.tol_div)

    def phase(self) -> UnitPhase:
        return UnitPhase.parse(self.chi)

    def measure(self) -> WrappedGeometricMeasure:
        return WrappedGeometricMeasure(self.p, self.phase(), self.rotation_phi, self.k)

    def validate(self) -> "RunConfig":
        self.context()
        self.measure()
        Fraction(self.p)
        if float(self.truncation_tol) <= 0:
            raise ValueError("--truncation-tol must be positive")
        if self.max_degree < 0:
            raise ValueError("--max-degree must be >= 0")
        if self.output_format not in ("csv", "json"):
            raise ValueError("--format must be csv or json")
        return self

    def params(self) -> dict:
        return {"p": self.p, "chi": self.phase().label(), "k": self.k, "phi": self.rotation_phi}


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


def _common_options(fn):
    options = [
        click.option("--p", "p", default="0.5", show_default=True, help="Geometric ratio in (0, 1)."),
        click.option("--chi", default="golden", show_default=True, help='Decimal, "M/N", or "golden".'),
        click.option("--k", "k", default=1, type=int, show_default=True, help="Weight order."),
        click.option("--phi", "rotation_phi", default="0", show_default=True, help="Rotation angle in [0, 2pi)."),
        click.option("--precision-bits", default=256, type=int, show_default=True),
        click.option("--tol-rel", default=2.0**-100, type=float, show_default=True),
        click.option("--tol-div", default=2.0**-40, type=float, show_default=True),
        click.option("--max-degree", default=64, type=int, show_default=True),
        click.option("--truncation-tol", default="1e-30", show_default=True),
        click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv",
                     show_default=True),
        click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="Output file."),
        click.option("--seed", default=0, type=int, show_default=True),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _config(kwargs) -> RunConfig:
    fields = {k: kwargs.pop(k) for k in list(kwargs) if k in RunConfig.__dataclass_fields__}
    try:
        return RunConfig(**fields).validate()
    except (ValueError, ArithmeticError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text: str, out):
    if out is None:
        click.echo(text, nl=False)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def render_table(header, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(x, ctx):
    return decimal_string(x, ctx)


def _guarded(fn):
    """Map numerical guard failures onto exit status 3."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NumericalGuardError as exc:
            click.echo(f"numerical guard: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- table builders (also used directly by tests) --------------------------------------


def moments_table(cfg: RunConfig, n_min: int, n_max: int, bruteforce: bool = False):
    ctx, m = cfg.context(), cfg.measure()
    header = ["n", "re", "im", "abs"]
    S = None
    if bruteforce:
        header += ["bf_re", "bf_im", "S"]
        S = truncation_for(m, cfg.truncation_tol, ctx)
    rows = []
    for n in range(n_min, n_max + 1):
        sigma = moment_closed(m, n, ctx)
        row = [n, _num(sigma.real, ctx), _num(sigma.imag, ctx), _num(abs(sigma), ctx)]
        if bruteforce:
            bf = moment_bruteforce(m, n, S, ctx)
            row += [_num(bf.real, ctx), _num(bf.imag, ctx), S]
        rows.append(row)
    return header, rows


def verblunsky_table(cfg: RunConfig, n_max: int):
    if cfg.k != 1:
        raise ConfigError("Verblunsky parameters exist only for k = 1 (k > 1 is not an OPUC measure)")
    ctx, m = cfg.context(), cfg.measure()
    mp = ctx.mp
    phase = m.phase
    p = m.p_value(ctx)
    phi = m.phi_value(ctx)
    beta = 4 * p / (1 - p) ** 2
    band_lo = (1 - p) / (1 + p)
    seq = verblunsky_sequence(n_max, cfg.p, phase, ctx)
    header = ["n", "re", "im", "abs", "abs_sq", "band_lo", "formula_abs_sq", "defect"]
    rows = [[-1, _num(-1, ctx), _num(0, ctx), _num(1, ctx), _num(1, ctx), _num(band_lo, ctx), "", ""]]
    for n in range(n_max):
        a = seq[n]
        if phi != 0:
            a = a * mp.expj(-(n + 1) * phi)
        with mp.workprec(ctx.precision_bits + 32):
            chi = phase.chi(ctx, 32)
            formula = 1 / (1 + beta * mp.sin(mp.pi * mp.frac(chi * (n + 1))) ** 2)
        formula = +formula
        abs_sq = abs(a) ** 2
        rows.append([
            n, _num(a.real, ctx), _num(a.imag, ctx), _num(abs(a), ctx), _num(abs_sq, ctx),
            _num(band_lo, ctx), _num(formula, ctx), _num(abs(abs_sq - formula) / formula, ctx),
        ])
    return header, rows


def _polynomial_paths(cfg: RunConfig, n: int, path: str, all_paths: bool, pastro: bool):
    ctx, m = cfg.context(), cfg.measure()
    phase = m.phase
    phi = m.phi_value(ctx)
    if n > cfg.max_degree:
        raise ConfigError(f"n = {n} exceeds --max-degree {cfg.max_degree}")
    if cfg.k > 1 and not pastro:
        raise ConfigError("k > 1 gives Laurent biorthogonal polynomials; pass --pastro")
    if cfg.k > 1 and path == "recurrence" and not all_paths:
        raise ConfigError("the Szego recurrence path needs an OPUC measure (k = 1)")
    wanted = ["recurrence", "hyper", "toeplitz"] if all_paths else [path]
    if cfg.k > 1:
        wanted = [w for w in wanted if w != "recurrence"]
    if "toeplitz" in wanted and n > TOEPLITZ_MAX_DEGREE:
        raise ConfigError(f"the Toeplitz path is limited to n <= {TOEPLITZ_MAX_DEGREE}")
    out = {}
    for w in wanted:
        if w == "toeplitz":
            poly, _ = phi_via_toeplitz(n, lambda j: moment_closed(m, j, ctx), ctx)
            out[w] = poly
            continue
        if w == "recurrence":
            poly = phi_via_recurrence(n, verblunsky_sequence(n, cfg.p, phase, ctx), ctx)
        elif cfg.k > 1 or pastro:
            poly = pastro_polynomial(n, PastroParams.k_weighted(m.p_value(ctx), cfg.k), phase, ctx)
        else:
            poly = phi_via_hypergeometric(n, cfg.p, phase, ctx)
        out[w] = rotate(poly, phi, ctx) if phi != 0 else poly
    return ctx, out


def poly_document(cfg: RunConfig, n: int, path: str = "hyper", all_paths: bool = False, pastro: bool = False):
    phase = cfg.phase()
    if phase.is_rational and n >= phase.N:
        raise ConfigError(f"degree {n} exceeds N-1 = {phase.N - 1} for chi = {phase.label()}")
    ctx, polys = _polynomial_paths(cfg, n, path, all_paths, pastro)
    kind = "opuc" if cfg.k == 1 else "biorthogonal"
    params = cfg.params()
    if not all_paths:
        (name, poly), = polys.items()
        doc = poly.to_dict(ctx, params)
        doc["path"] = name
        doc["kind"] = kind
        return doc
    return {
        "degree": n,
        "kind": kind,
        "params": params,
        "precision_bits": ctx.precision_bits,
        "paths": {name: poly.to_dict(ctx, params) for name, poly in polys.items()},
        "max_disagreement": decimal_string(max_coefficient_disagreement(list(polys.values()), ctx), ctx),
    }


def spectrum_table(cfg: RunConfig, S: int):
    ctx, m = cfg.context(), cfg.measure()
    header = ["s", "theta", "z_re", "z_im", "mass_re", "mass_im", "tail_mass"]
    tail = _num(m.p_value(ctx) ** S, ctx) if m.k == 1 else ""
    rows = []
    for atom in atoms(m, S, ctx):
        mass = ctx.mp.mpc(atom.mass)
        rows.append([atom.s, _num(atom.theta, ctx), _num(atom.z.real, ctx), _num(atom.z.imag, ctx),
                     _num(mass.real, ctx), _num(mass.imag, ctx), tail])
    return header, rows


def verify_reports(cfg: RunConfig, suites, n_max: int, mass_s, budget: int, path: str, gap_tol: float,
                   saalschutz_count: int = 100):
    if cfg.k != 1:
        raise ConfigError("the identity suite applies to the k = 1 OPUC")
    if Fraction(str(cfg.rotation_phi)) != 0:
        raise ConfigError("the identity suite applies to the unrotated measure")
    ctx = cfg.context()
    try:
        return ctx, ids.run_suite(
            cfg.p, cfg.phase(), ctx, suites=suites, n_max=min(n_max, cfg.max_degree),
            truncation_tol=cfg.truncation_tol, path=path, mass_s=mass_s, mass_budget=budget,
            gap_tol=gap_tol, saalschutz_count=saalschutz_count, seed=cfg.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def render_reports(reports, ctx, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.to_dict(ctx) for r in reports], indent=2) + "\n"
    rows = [
        [r.identity.value, ";".join(str(i) for i in r.indices), decimal_string(r.residual, ctx),
         decimal_string(r.tolerance, ctx), r.status]
        for r in reports
    ]
    return render_table(["identity", "indices", "residual", "tolerance", "pass"], rows, "csv")


# --- click commands ---------------------------------------------------------------------


@click.group()
def cli():
    """Wrapped geometric OPUC: moments, Verblunsky parameters, polynomials, identity checks."""


@cli.command()
@_common_options
@click.option("--n-min", default=-10, type=int, show_default=True)
@click.option("--n-max", default=10, type=int, show_default=True)
@click.option("--bruteforce", is_flag=True, help="Add the truncated atom sum as a cross-check.")
@_guarded
def moments(n_min, n_max, bruteforce, out, **kwargs):
    """Trigonometric moments sigma_n."""
    cfg = _config(kwargs)
    header, rows = moments_table(cfg, n_min, n_max, bruteforce)
    _emit(render_table(header, rows, cfg.output_format), out)


@cli.command()
@_common_options
@click.option("--n-max", default=32, type=int, show_default=True, help="Rows a_0 .. a_{n_max-1}.")
@_guarded
def verblunsky(n_max, out, **kwargs):
    """Verblunsky parameters with the |a_n|^2 formula check."""
    cfg = _config(kwargs)
    header, rows = verblunsky_table(cfg, n_max)
    _emit(render_table(header, rows, cfg.output_format), out)


@cli.command()
@_common_options
@click.option("--n", "n", required=True, type=int)
@click.option("--path", type=click.Choice(["recurrence", "hyper", "toeplitz"]), default="hyper",
              show_default=True)
@click.option("--all-paths", is_flag=True, help="Emit every path and their largest disagreement.")
@click.option("--pastro", is_flag=True, help="Use the generalized Pastro family (required for k > 1).")
@_guarded
def poly(n, path, all_paths, pastro, out, **kwargs):
    """Monic polynomial Phi_n as JSON."""
    cfg = _config(kwargs)
    doc = poly_document(cfg, n, path, all_paths, pastro)
    _emit(json.dumps(doc, indent=2) + "\n", out)


@cli.command()
@_common_options
@click.option("--suite", "suites", multiple=True, default=("all",), show_default=True,
              type=click.Choice(["all"] + list(ids.SUITES)))
@click.option("--n-max", default=10, type=int, show_default=True)
@click.option("--s", "mass_s", multiple=True, type=int, default=(0, 1, 2), show_default=True)
@click.option("--budget", default=500, type=int, show_default=True, help="Mass-sum term budget.")
@click.option("--gap-tol", default=0.01, type=float, show_default=True)
@click.option("--path", type=click.Choice(["hyper", "recurrence"]), default="hyper", show_default=True)
@click.option("--strict", is_flag=True, help="Treat inconclusive mass-sum runs as failures.")
@_guarded
def verify(suites, n_max, mass_s, budget, gap_tol, path, strict, out, **kwargs):
    """Run the identity suite; exit 0 iff every check passes."""
    cfg = _config(kwargs)
    ctx, reports = verify_reports(cfg, suites, n_max, mass_s, budget, path, gap_tol)
    _emit(render_reports(reports, ctx, cfg.output_format), out)
    failed = [r for r in reports if not r.passed and (strict or not r.inconclusive)]
    inconclusive = sum(r.inconclusive and not r.passed for r in reports)
    click.echo(f"{len(reports)} checks, {len(failed)} failed, {inconclusive} inconclusive", err=True)
    sys.exit(EXIT_VERIFY_FAILED if failed else EXIT_OK)


@cli.command()
@_common_options
@click.option("--S", "S", default=20, type=int, show_default=True, help="Number of atoms.")
@_guarded
def spectrum(S, out, **kwargs):
    """Atoms of the measure (angles, points, masses)."""
    cfg = _config(kwargs)
    if S < 1:
        raise ConfigError("--S must be >= 1")
    header, rows = spectrum_table(cfg, S)
    _emit(render_table(header, rows, cfg.output_format), out)


def main(argv=None):
    return cli.main(args=argv, prog_name="wgopuc")


if __name__ == "__main__":
    main()
