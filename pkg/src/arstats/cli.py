"""Command-line front end.

Every command writes one report (JSON by default, CSV with ``--format csv``)
and exits 0 if all of its checks pass, 1 if any fails and 2 on a
configuration error.  Reports go to ``--output``, else to
``$ARSTATS_REPORT_DIR/<command>.<format>`` when that variable is set, else to
standard output.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .algebra import verify_heisenberg, verify_lie_triple_axioms, verify_triple_relations
from .bargmann import RealizationKind, verify_realization_equivalence
from .coherent import (
    Family,
    coherent_amplitudes,
    normalization_constant,
    overlap,
    overlap_kernel,
    verify_annihilation_eigenstate,
)
from .errors import ArStatsError
from .fock import (
    FockBasis,
    SectorParams,
    bose_limit_constant,
    bose_limit_deviation,
    enumerate_basis,
    hamiltonian_matrix,
    ladder_set,
)
from .measures import MomentCase, QuadratureSpec, moment_residual, verify_simplex_identity
from .report import VerificationReport
from .serialize import SCHEMA, to_csv, to_json

REPORT_DIR_ENV = "ARSTATS_REPORT_DIR"
SECTORS = {"bosonic": 1, "fermionic": -1}


class ConfigError(click.ClickException):
    exit_code = 2


def _floats(text: str | None) -> list[float] | None:
    if text is None or text == "":
        return None
    return [float(v) for v in str(text).split(",")]


def _ints(text: str | None) -> list[int] | None:
    if text is None or text == "":
        return None
    return [int(v) for v in str(text).split(",")]


def _complexes(text: str | None) -> list[complex] | None:
    if text is None or text == "":
        return None
    return [complex(v.strip().replace(" ", "")) for v in str(text).split(",")]


def _load_config(path: str) -> dict:
    text = Path(path).read_text()
    if path.endswith((".yaml", ".yml")):
        import yaml

        data = yaml.safe_load(text) or {}
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a key-value mapping")
    out = {}
    for key, value in data.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        out[str(key).replace("-", "_")] = value
    return out


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON or YAML key-value file supplying option defaults; flags win.")
@click.pass_context
def main(ctx, config_path):
    """Fock representations, Bargmann realizations, coherent states and measures
    of generalized A_r statistics, with numerical certification of their identities."""
    if config_path:
        cfg = _load_config(config_path)
        ctx.default_map = {}
        for name, cmd in main.commands.items():
            known = {p.name for p in cmd.params}
            ctx.default_map[name] = {k: v for k, v in cfg.items() if k in known}


def sector_options(f):
    opts = [
        click.option("--sector", type=click.Choice(sorted(SECTORS)), default="fermionic", show_default=True),
        click.option("-r", "--modes", type=int, default=1, show_default=True, help="Number of modes r."),
        click.option("-k", "k", type=int, default=2, show_default=True, help="Integer statistics parameter k."),
        click.option("--cutoff", type=int, default=None,
                     help="Max total occupation (bosonic only; fermionic is fixed at k-1)."),
        click.option("--energies", default=None, help="Comma-separated mode energies (default all 1)."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def output_options(f):
    opts = [
        click.option("--tol", type=float, default=None, help="Pass tolerance (command-specific default)."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
        click.option("--output", type=click.Path(dir_okay=False), default=None),
        click.option("--threads", type=int, default=1, show_default=True,
                     help="Worker threads; reports do not depend on this."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _params(cfg: dict) -> SectorParams:
    return SectorParams(r=cfg["modes"], s=SECTORS[cfg["sector"]], k=cfg["k"], energies=cfg.get("energies"))


def _basis(cfg: dict, default_cutoff: int = 8) -> FockBasis:
    params = _params(cfg)
    if params.s == 1 and cfg["cutoff"] is None:
        cfg["cutoff"] = default_cutoff
    basis = enumerate_basis(params, cfg["cutoff"])
    cfg["cutoff"] = basis.cutoff
    return basis


def _emit(command: str, cfg: dict, checks: list[VerificationReport], data: dict | None = None,
          table: tuple[list[str], list[list]] | None = None) -> None:
    passed = all(c.passed for c in checks)
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": cfg,
        "passed": passed,
        "checks": [c.as_dict() for c in checks],
        "data": data or {},
    }
    if table is not None:
        report["table"] = {"columns": table[0], "rows": table[1]}
    if cfg["fmt"] == "csv":
        if table is None:
            table = (
                ["identity", "passed", "residual", "mean_residual", "tolerance", "mask"],
                [[c.identity, c.passed, c.residual, c.mean_residual, c.tolerance, c.mask] for c in checks],
            )
        text = to_csv(*table)
    else:
        text = to_json(report)
    target = cfg["output"]
    if target is None and os.environ.get(REPORT_DIR_ENV):
        target = str(Path(os.environ[REPORT_DIR_ENV]) / f"{command}.{cfg['fmt']}")
    if target is None:
        click.echo(text, nl=False)
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        click.echo(f"{status} {c.identity}: residual {c.residual:.3e} (tol {c.tolerance:.1e})", err=True)
    sys.exit(0 if passed else 1)


def command(name: str, default_tol: float):
    """Register a subcommand; library errors become exit status 2."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(**given):
            # declaration order, so the echoed config does not depend on flag order
            cfg = {p.name: given[p.name] for p in click.get_current_context().command.params}
            if cfg.get("energies") is not None:
                try:
                    cfg["energies"] = _floats(cfg["energies"])
                except ValueError as exc:
                    raise ConfigError(f"invalid energies: {exc}") from exc
            if cfg.get("tol") is None:
                cfg["tol"] = default_tol
            try:
                fn(name, cfg)
            except ArStatsError as exc:
                raise ConfigError(str(exc)) from exc
            except ValueError as exc:
                raise ConfigError(f"invalid value: {exc}") from exc

        return main.command(name)(run)

    return wrap


def _state_rows(basis: FockBasis) -> tuple[list[str], list[list]]:
    cols = ["index"] + [f"n{i + 1}" for i in range(basis.params.r)] + ["total"]
    return cols, [[j, *n, sum(n)] for j, n in enumerate(basis.states)]


@command("basis", 0.0)
@sector_options
@output_options
def basis_cmd(name, cfg):
    """Dump the graded-lexicographic Fock basis."""
    basis = _basis(cfg)
    data = {"size": basis.size, "cutoff": basis.cutoff, "tag": basis.tag}
    _emit(name, cfg, [], data, _state_rows(basis))


@command("verify-algebra", 1e-10)
@sector_options
@output_options
@click.option("--samples", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--no-mask", is_flag=True, help="Check truncated bosonic bases on every shell.")
def verify_algebra_cmd(name, cfg):
    """Triple relations, mutual commutation and Lie-triple-system axioms."""
    basis = _basis(cfg)
    triple = verify_triple_relations(basis, cfg["tol"], masked=not cfg["no_mask"], workers=cfg["threads"])
    raise_, lower = ladder_set(basis)
    axioms = verify_lie_triple_axioms(raise_ + lower, cfg["samples"], cfg["seed"], cfg["tol"])
    _emit(name, cfg, [triple, axioms], {"basis_size": basis.size})


@command("verify-heisenberg", 1e-10)
@sector_options
@output_options
@click.option("--no-mask", is_flag=True, help="Check truncated bosonic bases on every shell.")
def verify_heisenberg_cmd(name, cfg):
    """[H, a_i^{+-}] = +-e_i a_i^{+-} with H built from ladder commutators."""
    basis = _basis(cfg)
    _emit(name, cfg, [verify_heisenberg(basis, cfg["tol"], masked=not cfg["no_mask"])])


@command("spectrum", 1e-12)
@sector_options
@output_options
def spectrum_cmd(name, cfg):
    """Hamiltonian diagonal in both the direct and the constructed form."""
    basis = _basis(cfg)
    diag = hamiltonian_matrix(basis, "diagonal").matrix.diagonal()
    built_op = hamiltonian_matrix(basis, "constructed")
    built = built_op.matrix.diagonal()
    off = (built_op - hamiltonian_matrix(basis, "diagonal")).matrix
    mask = basis.interior(1)
    rows = np.flatnonzero(mask)
    diff = off[rows][:, rows]
    res = [float(abs(diff).max()) if diff.nnz else 0.0]
    desc = "none (finite exact representation)" if basis.params.finite else f"total <= {basis.cutoff - 1}"
    check = VerificationReport.from_residuals(
        "spectrum_agreement", res, cfg["tol"], desc, basis.params.as_dict(), {"basis_size": basis.size}
    )
    cols, state_rows = _state_rows(basis)
    table = (cols + ["diagonal", "constructed"], [row + [d, b] for row, d, b in zip(state_rows, diag, built)])
    levels = sorted({round(float(v), 12) for v in diag})
    _emit(name, cfg, [check], {"levels": levels}, table)


@command("verify-bargmann", 1e-12)
@sector_options
@output_options
@click.option("--kind", type=click.Choice(["I", "II", "fermionic"]), default="fermionic", show_default=True)
def verify_bargmann_cmd(name, cfg):
    """Differential realizations against the Fock ladder matrices."""
    basis = _basis(cfg)
    _emit(name, cfg, [verify_realization_equivalence(RealizationKind.parse(cfg["kind"]), basis, cfg["tol"])])


def _amplitude_table(state) -> tuple[list[str], list[list]]:
    cols, rows = _state_rows(state.basis)
    return cols + ["re", "im"], [row + [a.real, a.imag] for row, a in zip(rows, state.amplitudes)]


@command("coherent", 1e-12)
@sector_options
@output_options
@click.option("--family", type=click.Choice(["gk", "kp", "cpr"]), required=True)
@click.option("--point", required=True, help="Comma-separated complex coordinates, e.g. '0.5,0.1+0.2j'.")
@click.option("--overlap-with", default=None, help="Second point for an overlap and its kernel.")
def coherent_cmd(name, cfg):
    """Coherent-state amplitudes, normalization and overlap."""
    family = Family.parse(cfg["family"])
    params = _params(cfg)
    point = _complexes(cfg["point"])
    state = coherent_amplitudes(family, params, point, cfg["cutoff"] if family is not Family.CPR else None)
    norm2 = state.norm2
    checks = [
        VerificationReport.from_residuals(
            "normalization", [abs(norm2 - 1.0)], cfg["tol"], "all shells of the state's basis",
            params.as_dict(), {"tail": state.tail},
        )
    ]
    data = {
        "family": family.value,
        "point": point,
        "normalization_constant": normalization_constant(family, params, point),
        "cutoff": state.basis.cutoff,
        "tail": state.tail,
        "norm_check": norm2,
    }
    other = _complexes(cfg["overlap_with"])
    if other is not None:
        partner = coherent_amplitudes(family, params, other, state.basis.cutoff)
        value = overlap(state, partner)
        kernel = overlap_kernel(family, params, point, other)
        data.update({"overlap_with": other, "overlap": value, "overlap_kernel": kernel})
        checks.append(
            VerificationReport.from_residuals(
                "overlap_kernel", [abs(value - kernel)], max(cfg["tol"], 1e-8), "closed-form kernel",
                params.as_dict(), {"cutoff": state.basis.cutoff},
            )
        )
    _emit(name, cfg, checks, data, _amplitude_table(state))


@command("verify-eigenstate", 1e-10)
@sector_options
@output_options
@click.option("--point", required=True, help="Comma-separated complex GK labels omega.")
def verify_eigenstate_cmd(name, cfg):
    """a_i^- |k; omega> = omega_i |k; omega> for the GK family."""
    params = _params(cfg)
    report = verify_annihilation_eigenstate(params, _complexes(cfg["point"]), cfg["cutoff"], cfg["tol"])
    _emit(name, cfg, [report])


@command("verify-measure", 1e-6)
@sector_options
@output_options
@click.option("--family", type=click.Choice(["bessel", "ball", "simplex", "projective"]), required=True)
@click.option("--n", "n", required=True, help="Comma-separated moment multi-index.")
@click.option("--nodes", type=int, default=None, help="Gauss-Legendre nodes per axis (doubled once to check).")
def verify_measure_cmd(name, cfg):
    """Moment equations of the measures and the simplex identity."""
    params = _params(cfg)
    n = _ints(cfg["n"])
    if cfg["family"] == "simplex":
        quad = QuadratureSpec(nodes=cfg["nodes"] or 32)
        result = verify_simplex_identity(params, n, quad)
    else:
        quad = QuadratureSpec(nodes=cfg["nodes"] or 96)
        result = moment_residual(MomentCase(cfg["family"], params, n), quad)
    check = VerificationReport.from_residuals(
        f"moment[{cfg['family']}]", [result.residual], cfg["tol"], "relative to max(1, |rhs|)",
        params.as_dict(), {"n": n, "nodes": quad.nodes},
    )
    table = (["family", "n", "lhs", "rhs", "residual"], [[cfg["family"], n, result.lhs, result.rhs, result.residual]])
    _emit(name, cfg, [check], {"lhs": result.lhs, "rhs": result.rhs, "residual": result.residual}, table)


@command("bose-limit", 1e-3)
@sector_options
@output_options
@click.option("--k-list", default="10,100,1000,10000", show_default=True)
@click.option("--probe-total", type=int, default=4, show_default=True)
def bose_limit_cmd(name, cfg):
    """Deviation of a^{+-}/sqrt(k) from Bose ladder entries along a k sweep."""
    ks = _ints(cfg["k_list"])
    devs = bose_limit_deviation(cfg["modes"], SECTORS[cfg["sector"]], ks, cfg["probe_total"], cfg["cutoff"])
    values = [d.deviation for d in devs]
    violations = sum(1 for a, b in zip(values, values[1:]) if not b < a)
    checks = [
        VerificationReport.from_residuals(
            "bose_limit_final", [values[-1]], cfg["tol"], f"states with total <= {cfg['probe_total']}",
            {"r": cfg["modes"], "s": SECTORS[cfg["sector"]]}, {"k": devs[-1].k},
        ),
        # residual counts consecutive k pairs where the deviation fails to drop
        VerificationReport.from_residuals(
            "bose_limit_strictly_decreasing", [float(violations)], 0.0, "consecutive k in the sweep",
            {"r": cfg["modes"], "s": SECTORS[cfg["sector"]]}, {"k_list": ks},
        ),
    ]
    data = {"fitted_constant": bose_limit_constant(devs, cfg["probe_total"])}
    _emit(name, cfg, checks, data, (["k", "deviation"], [[d.k, d.deviation] for d in devs]))


if __name__ == "__main__":  # pragma: no cover
    main()
