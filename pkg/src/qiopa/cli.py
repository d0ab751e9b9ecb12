"""Command-line front end: writes the data behind each figure as CSV or JSON.

Every command is deterministic; the same options produce a byte-identical
file.  Sweeps use the inclusive ``start:stop:step`` syntax.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import io
import json
import math
import os
import sys
import tempfile

import click
import numpy as np

from . import __version__
from .channel import LossChannel
from .decoherence import css_lossy_density, equatorial_lossy_matrix, hv_lossy_matrix
from .errors import ConfigError, NumericalError
from .fock import CssParams, GainParams
from . import metrology, wigner

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# --------------------------------------------------------------------------
# parsing helpers
# --------------------------------------------------------------------------


def parse_sweep(text: str, name: str = "value") -> np.ndarray:
    """``"a"`` → ``[a]``; ``"a:b:s"`` → ``a, a+s, …`` while below ``b + s/2``."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {text!r}") from None
    if len(nums) == 1:
        return np.array(nums)
    if len(nums) != 3:
        raise ConfigError(f"{name}: expected start:stop:step, got {text!r}")
    start, stop, step = nums
    if not step > 0 or stop < start:
        raise ConfigError(f"{name}: need step > 0 and stop >= start")
    # grid points strictly below stop + step/2; q is rounded so that a stop
    # lying exactly half a step past the grid does not add a point
    q = round((stop - start) / step, 9)
    count = int(math.ceil(q + 0.5))
    if count < 2:
        raise ConfigError(f"{name}: a sweep needs at least two points")
    return start + step * np.arange(count)


def parse_seed(text: str) -> tuple[int, int]:
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"seed must be 'N' or 'N,M', got {text!r}") from None
    if len(vals) == 1:
        vals.append(0)
    if len(vals) != 2 or min(vals) < 0:
        raise ConfigError(f"seed must be 'N' or 'N,M' with N, M >= 0, got {text!r}")
    return vals[0], vals[1]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v) + 0.0, ".17g")  # + 0.0 folds -0 into 0


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


class Table:
    """Columns of output plus the metadata written alongside them."""

    def __init__(self, command: str, params: dict, header: list[str], columns: list,
                 grid: dict, values, deficit: float = 0.0):
        self.command = command
        self.params = params
        self.header = header
        self.columns = [np.asarray(c).ravel() for c in columns]
        self.grid = grid
        self.values = values
        self.deficit = float(deficit)

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = json.dumps({"command": self.command, **self.params, "version": __version__},
                          sort_keys=True)
        buf.write(f"# params: {meta}\n")
        buf.write(",".join(self.header) + "\n")
        for row in zip(*self.columns):
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(a):
            a = np.asarray(a)
            return a.tolist()

        doc = {
            "command": self.command,
            "params": self.params,
            "grid": {k: clean(v) for k, v in self.grid.items()},
            "values": clean(self.values),
            "version": __version__,
            "truncation_deficit": self.deficit,
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _emit(table: Table, output: str | None, fmt: str):
    text = table.to_json() if fmt == "json" else table.to_csv()
    if output is None or output == "-":
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp = tempfile.mkstemp(prefix=".qiopa-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_output_options = [
    click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                 help="Output file (default: stdout)."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                 show_default=True),
]


def output_options(f):
    for opt in reversed(_output_options):
        f = opt(f)
    return f


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


@click.group()
@click.version_option(__version__, prog_name="qiopa")
def cli():
    """Phase-space and decoherence data for amplified macrostates and cat states."""


@cli.command("wigner")
@click.option("--family", type=click.Choice(["single", "collinear", "noncollinear", "css"]), required=True)
@click.option("--seed", default="1", show_default=True, help="Injected photons 'N' or 'N,M'.")
@click.option("--g", "g", type=float, default=0.0, show_default=True)
@click.option("--R", "R", type=float, default=0.0, show_default=True)
@click.option("--alpha", type=float, default=None)
@click.option("--phi", type=float, default=0.0, show_default=True)
@click.option("--sign", type=click.Choice(["+", "-"]), default="+", show_default=True)
@click.option("--grid", required=True, help="X sweep start:stop:step.")
@click.option("--ygrid", default=None, help="Y sweep (defaults to --grid).")
@output_options
def wigner_cmd(family, seed, g, R, alpha, phi, sign, grid, ygrid, output, fmt):
    """Wigner function on a grid (two-mode families on a 2-D slice)."""
    xs = parse_sweep(grid, "grid")
    ys = parse_sweep(ygrid, "ygrid") if ygrid else xs
    ch = LossChannel(R)
    N, M = parse_seed(seed)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    params = {"family": family, "R": R, "grid": grid, "ygrid": ygrid or grid}
    if family == "css":
        if alpha is None:
            raise ConfigError("--alpha is required for the css family")
        W = wigner.w_css(CssParams(alpha, phi, sign), ch, X, Y)
        params.update(alpha=alpha, phi=phi, sign=sign)
        header, cols = ["X", "Y", "W"], [X, Y, W]
    elif family == "single":
        W = wigner.w_single_mode(N, GainParams(g), ch, X, Y)
        params.update(g=g, seed=N)
        header, cols = ["X", "Y", "W"], [X, Y, W]
    elif family == "collinear":
        a, b = wigner.collinear_slice_point(X, Y, phi)
        W = wigner.w_collinear(N, M, GainParams(g), ch, a, b)
        params.update(g=g, seed=[N, M], phi=phi)
        header, cols = ["X1", "Y1", "X2", "Y2", "W"], [np.real(a), np.imag(a), np.real(b), np.imag(b), W]
    else:
        a1 = X + 1j * Y
        zero = np.zeros_like(a1)
        W = wigner.w_noncollinear(N, M, GainParams(g), ch, (a1, np.conj(a1), zero, zero), phi)
        params.update(g=g, seed=[N, M], phi=phi)
        header, cols = ["X1", "Y1", "X2", "Y2", "W"], [X, Y, X, -Y, W]
    _emit(Table("wigner", params, header, cols, {"X": xs, "Y": ys}, W), output, fmt)


@cli.command("negativity")
@click.option("--family", type=click.Choice(["single", "collinear", "noncollinear", "css"]), required=True)
@click.option("--g", "g", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--R", "R", required=True, help="Reflectivity sweep start:stop:step.")
@output_options
def negativity_cmd(family, g, alpha, R, output, fmt):
    """Negativity witness versus loss; changes sign at R = 1/2."""
    Rs = parse_sweep(R, "R")
    fam = {"single": "single_mode"}.get(family, family)
    if family == "css":
        if alpha is None:
            raise ConfigError("--alpha is required for the css family")
        vals = [wigner.negativity_at_origin(fam, LossChannel(r), alpha=alpha) for r in Rs]
        params = {"family": family, "alpha": alpha, "R": R}
    else:
        if g is None:
            raise ConfigError("--g is required for the amplifier families")
        vals = [wigner.negativity_at_origin(fam, LossChannel(r), gain=GainParams(g)) for r in Rs]
        params = {"family": family, "g": g, "R": R}
    vals = np.array(vals)
    _emit(Table("negativity", params, ["R", "value"], [Rs, vals], {"R": Rs}, vals), output, fmt)


@cli.command("bures")
@click.option("--family", type=click.Choice(["css", "equatorial", "hv"]), required=True)
@click.option("--g", "g", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--phi", type=float, default=math.pi / 2, show_default=True)
@click.option("--x", "x", required=True, help="Mean lost photons x = R<n>, start:stop:step.")
@click.option("--k", type=int, default=None, help="O-Filter threshold (amplifier families).")
@click.option("--cutoff", type=int, default=30, show_default=True)
@output_options
def bures_cmd(family, g, alpha, phi, x, k, cutoff, output, fmt):
    """Bures distance between orthogonal superpositions versus x."""
    xs = parse_sweep(x, "x")
    if family == "css":
        if alpha is None:
            raise ConfigError("--alpha is required for the css family")
        curve = metrology.css_curve(alpha, phi, xs)
        params = {"family": family, "alpha": alpha, "phi": phi, "x": x}
    else:
        if g is None:
            raise ConfigError("--g is required for the amplifier families")
        basis = "equatorial" if family == "equatorial" else "HV"
        curve = metrology.macroqubit_curve(GainParams(g), xs, basis, k, cutoff)
        params = {"family": family, "g": g, "k": k, "cutoff": cutoff, "x": x}
    _emit(Table("bures", params, ["x", "D"], [curve.x, curve.D], {"x": curve.x}, curve.D), output, fmt)


@cli.command("distribution")
@click.option("--family", type=click.Choice(["equatorial", "hv", "css"]), required=True)
@click.option("--g", "g", type=float, default=None)
@click.option("--R", "R", type=float, default=0.0, show_default=True)
@click.option("--alpha", type=float, default=None)
@click.option("--phi", type=float, default=0.0, show_default=True)
@click.option("--sign", type=click.Choice(["+", "-"]), default="+", show_default=True)
@click.option("--cutoff", type=int, default=20, show_default=True)
@output_options
def distribution_cmd(family, g, R, alpha, phi, sign, cutoff, output, fmt):
    """Photon-number distribution after loss."""
    ch = LossChannel(R)
    if cutoff < 1:
        raise ConfigError("--cutoff must be positive")
    if family == "css":
        if alpha is None:
            raise ConfigError("--alpha is required for the css family")
        rho = css_lossy_density(CssParams(alpha, phi, sign), ch, cutoff)
        p = np.real(rho.diagonal())
        n = np.arange(p.size)
        params = {"family": family, "alpha": alpha, "phi": phi, "sign": sign, "R": R, "cutoff": cutoff}
        table = Table("distribution", params, ["n", "p"], [n, p], {"n": n}, p, rho.trace_deficit)
    else:
        if g is None:
            raise ConfigError("--g is required for the amplifier families")
        if family == "equatorial":
            rho = equatorial_lossy_matrix(GainParams(g), phi, ch, cutoff)
        else:
            rho = hv_lossy_matrix(GainParams(g), ch, cutoff)
        p = np.real(rho.diagonal()).reshape(rho.dims)
        n, m = np.meshgrid(np.arange(rho.dims[0]), np.arange(rho.dims[1]), indexing="ij")
        params = {"family": family, "g": g, "phi": phi, "R": R, "cutoff": cutoff}
        table = Table("distribution", params, ["n", "m", "p"], [n, m, p],
                      {"n": n[:, 0], "m": m[0]}, p, rho.trace_deficit)
    _emit(table, output, fmt)


@cli.command("uncertainty")
@click.option("--seed", type=click.IntRange(0, 1), default=0, show_default=True)
@click.option("--g", "g", type=float, required=True)
@click.option("--R", "R", required=True, help="Reflectivity sweep start:stop:step.")
@output_options
def uncertainty_cmd(seed, g, R, output, fmt):
    """Quadrature spreads of the lossy squeezed Fock state."""
    Rs = parse_sweep(R, "R")
    d = np.array([wigner.quadrature_uncertainty(seed, GainParams(g), LossChannel(r)) for r in Rs])
    prod = d[:, 0] * d[:, 1]
    _emit(Table("uncertainty", {"seed": seed, "g": g, "R": R}, ["R", "dX", "dY", "product"],
                [Rs, d[:, 0], d[:, 1], prod], {"R": Rs}, prod), output, fmt)


@cli.command("ofilter")
@click.option("--g", "g", type=float, required=True)
@click.option("--T", "T", type=float, required=True, help="Transmittivity.")
@click.option("--k", "k", required=True, help="Threshold sweep start:stop:step (integers).")
@click.option("--cutoff", type=int, default=60, show_default=True)
@output_options
def ofilter_cmd(g, T, k, cutoff, output, fmt):
    """O-Filter success probability of the equatorial macro-qubit versus k."""
    ks = parse_sweep(k, "k")
    if np.any(ks != np.round(ks)) or np.any(ks < 0):
        raise ConfigError("k must be non-negative integers")
    ks = ks.astype(int)
    ch = LossChannel(1.0 - T)
    P = metrology.equatorial_success_probability(GainParams(g), ch, ks, cutoff)
    u = ks / (T * metrology.qiopa_mean_photons(g)) if T > 0 else np.full(ks.shape, np.inf)
    _emit(Table("ofilter", {"g": g, "T": T, "k": k, "cutoff": cutoff}, ["k", "u", "P"],
                [ks, u, P], {"k": ks}, P), output, fmt)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def main(argv=None) -> int:
    """Run the CLI and map failures onto exit codes."""
    try:
        cli.main(args=argv, prog_name="qiopa", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        click.echo(f"numerical error: {exc}", err=True)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
