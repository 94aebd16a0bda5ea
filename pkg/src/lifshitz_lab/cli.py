"""Command-line front end: point computations, sweeps, Nernst diagnostics, optical-data ingestion.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import asympt
from .geometry import GeometryThermalState
from .lifshitz import (
    ConvergenceError,
    EntropyStepError,
    QuadratureConfig,
    entropy,
    free_energy,
    pressure,
    zero_temperature_energy,
    zero_temperature_pressure,
)
from .models import (
    ConstantDielectric,
    DcAugmentedDielectric,
    IdealMetal,
    ModelError,
    OpticalDataError,
    OscillatorDielectric,
    PlasmaMetal,
    SampledPermittivity,
    kramers_kronig,
    parse_optical_csv,
    static_permittivity,
)
from .specfun import DomainError
from .units import K_B, UnitError, parse_frequency, parse_length, parse_temperature

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

MODEL_HEADER = "# lifshitz-lab model v1"
JOBS_ENV = "LIFSHITZ_LAB_JOBS"

# column -> (unit, description); the header carries the unit after a bracket
COLUMNS = {
    "metal": ("", "metal model spec"),
    "diel": ("", "dielectric model spec"),
    "a": ("m", "plate separation"),
    "T": ("K", "temperature"),
    "tau": ("", "dimensionless temperature 4 pi k_B a T / (hbar c)"),
    "eps0": ("", "static permittivity of the dielectric"),
    "F": ("J/m^2", "free energy per unit area (energy at T = 0)"),
    "P": ("Pa", "pressure, negative for attraction"),
    "S": ("J/(K m^2)", "entropy per unit area"),
    "F_analytic": ("J/m^2", "closed-form free energy or energy"),
    "P_analytic": ("Pa", "closed-form pressure"),
    "S_analytic": ("J/(K m^2)", "closed-form entropy"),
    "dev_F": ("", "(analytic - numeric) / numeric"),
    "dev_P": ("", "(analytic - numeric) / numeric"),
    "dev_S": ("", "(analytic - numeric) / numeric"),
    "E0": ("J/m^2", "numeric energy at T = 0 for the thermal corrections"),
    "P0": ("Pa", "numeric pressure at T = 0 for the thermal corrections"),
    "rel_thermal_F": ("", "numeric (F - E0) / E0"),
    "rel_thermal_F_analytic": ("", "closed-form (F - E) / E"),
    "rel_thermal_P": ("", "numeric (P - P0) / P0"),
    "rel_thermal_P_analytic": ("", "closed-form (P - P0) / P0"),
    "analytic_branch": ("", "zero_t, low_t, high_t or empty"),
    "psi_dm": ("", "ideal-metal energy correction factor"),
    "C1": ("", "metal penetration coefficient, first order"),
    "C2": ("", "metal penetration coefficient, second order"),
    "B": ("", "dielectric dispersion coefficient"),
    "K4": ("", "tau^4 coefficient"),
    "matsubara_terms": ("", "Matsubara terms summed"),
    "tail": ("J/m^2", "truncation tail estimate of F"),
    "quad_err": ("J/m^2", "quadrature error estimate of F"),
    "error": ("", "failure message for this row, empty on success"),
}

NERNST_COLUMNS = {
    "metal": ("", "metal model spec"),
    "diel": ("", "dielectric model spec"),
    "a": ("m", "plate separation"),
    "temperatures": ("K", "temperatures used, semicolon separated"),
    "entropies": ("J/(K m^2)", "entropy at each temperature, semicolon separated"),
    "S_limit": ("J/(K m^2)", "entropy extrapolated to T = 0"),
    "S_predicted": ("J/(K m^2)", "closed-form limit: 0, or the dc residual entropy"),
    "verdict": ("", "PASS, VIOLATION or INCONCLUSIVE"),
    "diagnostics": ("", "extrapolation details"),
}

INGEST_COLUMNS = {
    "xi": ("rad/s", "imaginary frequency"),
    "eps": ("", "eps(i xi) from the Kramers-Kronig integral"),
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


# --- model mini-language -----------------------------------------------------


def _parse_kv(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep or not key.strip():
            raise ModelError(f"expected key=value, got {part!r}")
        out[key.strip()] = value.strip()
    return out


def _parse_dc(base, text: str) -> DcAugmentedDielectric:
    kv = _parse_kv(text)
    g = float(kv.pop("g", "0"))
    if "s0" in kv and "beta300" in kv:
        raise ModelError("give either s0 or beta300 for the dc term, not both")
    if "s0" in kv:
        model = DcAugmentedDielectric(base, g, float(kv.pop("s0")))
    elif "beta300" in kv:
        model = DcAugmentedDielectric.calibrated(base, g, float(kv.pop("beta300")))
    else:
        raise ModelError("dc term needs s0=<1/s> or beta300=<value>")
    if kv:
        raise ModelError(f"unknown dc parameters {sorted(kv)}")
    return model


def parse_model(text: str):
    """Build a model from the inline spec language.

    ``ideal``, ``vacuum``, ``plasma:9.0eV``, ``const:11.66``,
    ``osc:10.66@4.2eV[,C@omega...]``, ``table:<file>``; any finite-eps0 model
    can take ``+dc:g=<K>,beta300=<value>`` or ``+dc:g=<K>,s0=<1/s>``.
    """
    text = text.strip()
    head, sep, dc = text.partition("+dc:")
    kind, _, arg = head.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "ideal" and not arg:
            model = IdealMetal()
        elif kind == "vacuum" and not arg:
            model = ConstantDielectric(1.0)
        elif kind == "plasma":
            model = PlasmaMetal(parse_frequency(arg))
        elif kind == "const":
            model = ConstantDielectric(float(arg))
        elif kind == "osc":
            terms = []
            for item in arg.split(","):
                c, at, w = item.partition("@")
                if not at:
                    raise ModelError(f"oscillator term must be C@omega, got {item!r}")
                terms.append((float(c), parse_frequency(w)))
            model = OscillatorDielectric(tuple(terms))
        elif kind == "table":
            model = load_model_file(arg)
        else:
            raise ModelError(f"unknown model spec {text!r}")
    except (ValueError, UnitError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"bad model spec {text!r}: {exc}") from exc
    if sep:
        model = _parse_dc(model, dc)
    return model


def write_model_file(path: str | Path, model: SampledPermittivity, source: str = "") -> None:
    lines = [MODEL_HEADER, "kind: sampled", f"source: {source}", f"static_permittivity: {model.static_permittivity!r}",
             "xi_rads,eps"]
    lines += [f"{x!r},{e!r}" for x, e in zip(model.xi.tolist(), model.eps.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def load_model_file(path: str | Path):
    """Read a model file; a plain optical CSV is accepted and Kramers-Kronig transformed on demand."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ModelError(f"cannot read model file {str(p)!r}: {exc.strerror}") from exc
    if not text.startswith(MODEL_HEADER):
        return parse_optical_csv(text, source=str(p))
    meta: dict[str, str] = {}
    rows: list[tuple[float, float]] = []
    in_table = False
    for lineno, line in enumerate(text.splitlines()[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not in_table:
            if line.replace(" ", "") == "xi_rads,eps":
                in_table = True
                continue
            key, sep, value = line.partition(":")
            if not sep:
                raise OpticalDataError(f"{p}: expected 'key: value'", lineno)
            meta[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except (ValueError, IndexError) as exc:
            raise OpticalDataError(f"{p}: bad row {line!r}", lineno) from exc
    kind = meta.get("kind")
    if kind == "spec":
        if "model" not in meta:
            raise ModelError(f"{p}: spec model file needs a 'model:' line")
        return parse_model(meta["model"])
    if kind == "sampled":
        if not rows:
            raise ModelError(f"{p}: sampled model file has no rows")
        xi, eps = np.array(rows).T
        return SampledPermittivity(xi, eps, source=meta.get("source") or str(p))
    raise ModelError(f"{p}: unknown model kind {kind!r}")


# --- point evaluation --------------------------------------------------------


@dataclass(frozen=True)
class Job:
    metal: str
    diel: str
    a: float
    T: float
    quantities: tuple[str, ...]
    rel_tol: float
    analytic: bool = True
    eps0_sweep: bool = False


def _analytic_params(metal, diel):
    """``(eps0, omega_p, omega_1)`` when closed forms apply to this model pair, else None."""
    if isinstance(metal, IdealMetal):
        omega_p = math.inf
    elif isinstance(metal, PlasmaMetal):
        omega_p = metal.omega_p
    else:
        return None
    if isinstance(diel, ConstantDielectric):
        return diel.eps0, omega_p, math.inf
    if isinstance(diel, OscillatorDielectric) and len(diel.terms) == 1:
        return diel.static_permittivity, omega_p, diel.terms[0][1]
    return None


@lru_cache(maxsize=64)
def _zero_t_numeric(metal_spec: str, diel_spec: str, a: float, rel_tol: float):
    metal, diel = parse_model(metal_spec), parse_model(diel_spec)
    cfg = QuadratureConfig(rel_tol=rel_tol)
    return (zero_temperature_energy(a, metal, diel, cfg).energy_per_area,
            zero_temperature_pressure(a, metal, diel, cfg).pressure)


def _dev(analytic, numeric):
    if analytic is None or numeric is None:
        return None
    return asympt.report("", analytic, numeric).deviation


def evaluate(job: Job) -> dict:
    """One output record; numerical failures land in the ``error`` field."""
    rec: dict = {"metal": job.metal, "diel": job.diel, "a": job.a, "T": job.T}
    try:
        metal, diel = parse_model(job.metal), parse_model(job.diel)
        state = GeometryThermalState(job.a, job.T)
        rec["tau"] = state.tau
        try:
            rec["eps0"] = static_permittivity(diel)
        except ModelError:
            rec["eps0"] = None
        if job.eps0_sweep:
            eps0 = rec["eps0"]
            rec["psi_dm"] = asympt.psi_dm(eps0)
            rec["K4"] = asympt.k4(eps0)
            if eps0 > 1.0:
                rec.update(asympt.real_coefficients(eps0)._asdict())
        cfg = QuadratureConfig(rel_tol=job.rel_tol)
        q = job.quantities
        if job.T == 0.0:
            if "F" in q:
                r = zero_temperature_energy(job.a, metal, diel, cfg)
                rec["F"], rec["quad_err"] = r.energy_per_area, r.quadrature_error_estimate
            if "P" in q:
                rec["P"] = zero_temperature_pressure(job.a, metal, diel, cfg).pressure
            if "S" in q:
                rec["S"] = 0.0
        else:
            if "F" in q:
                r = free_energy(state, metal, diel, cfg)
                rec["F"] = r.free_energy_per_area
                rec["matsubara_terms"] = r.matsubara_terms_used
                rec["tail"] = r.tail_estimate
                rec["quad_err"] = r.quadrature_error_estimate
            if "P" in q:
                rec["P"] = pressure(state, metal, diel, cfg).pressure
            if "S" in q:
                rec["S"] = entropy(state, metal, diel, cfg).entropy_per_area
        if job.analytic:
            _add_analytic(rec, job, metal, diel, state)
    except (ConvergenceError, EntropyStepError) as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
    except (ModelError, DomainError, ValueError) as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _add_analytic(rec: dict, job: Job, metal, diel, state: GeometryThermalState) -> None:
    params = _analytic_params(metal, diel)
    if params is None:
        return
    eps0, omega_p, omega_1 = params
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asympt.AsymptoticWarning)
        if eps0 == 1.0:
            branch, values = "trivial", (0.0, 0.0, 0.0)
        elif state.T == 0.0:
            zt = asympt.real_zero_t(eps0, omega_p, omega_1, state.a)
            branch, values = "zero_t", (zt.energy, zt.pressure, 0.0)
        elif state.tau >= 5.0:
            branch, values = "high_t", tuple(asympt.high_t(eps0, state))
        elif state.tau <= 0.5:
            branch, values = "low_t", tuple(asympt.real_low_t(eps0, omega_p, omega_1, state))
        else:
            return
        rec["analytic_branch"] = branch
        for name, value in zip(("F", "P", "S"), values):
            if name in job.quantities:
                rec[f"{name}_analytic"] = value
                rec[f"dev_{name}"] = _dev(value, rec.get(name))
        if branch == "low_t":
            zt = asympt.real_zero_t(eps0, omega_p, omega_1, state.a)
            E0, P0 = _zero_t_numeric(job.metal, job.diel, state.a, job.rel_tol)
            rec["E0"], rec["P0"] = E0, P0
            if "F" in job.quantities:
                rec["rel_thermal_F"] = (rec["F"] - E0) / E0
                rec["rel_thermal_F_analytic"] = (values[0] - zt.energy) / zt.energy
            if "P" in job.quantities:
                rec["rel_thermal_P"] = (rec["P"] - P0) / P0
                rec["rel_thermal_P_analytic"] = (values[1] - zt.pressure) / zt.pressure


# --- output ------------------------------------------------------------------


def _header(name: str, columns: dict) -> str:
    unit = columns[name][0]
    return f"{name} [{unit}]" if unit else name


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(records: list[dict], fmt: str, columns: dict) -> str:
    present = [c for c in columns if any(c in r for r in records)]
    if "error" not in present and columns is COLUMNS:
        present.append("error")
    if fmt == "json":
        units = {c: columns[c][0] for c in present}
        rows = [{c: r.get(c) for c in present} for r in records]
        return json.dumps({"units": units, "records": rows}, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([_header(c, columns) for c in present])
    for r in records:
        writer.writerow([_fmt(r.get(c)) for c in present])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands ----------------------------------------------------------------


def _quantities(text: str) -> tuple[str, ...]:
    if text.strip().lower() == "none":
        return ()
    q = tuple(s.strip().upper() for s in text.split(",") if s.strip())
    bad = [s for s in q if s not in ("F", "P", "S")]
    if bad:
        raise CliError(f"unknown quantities {bad}; choose from F,P,S")
    return q


def cmd_compute(args) -> int:
    job = Job(args.metal, args.diel, parse_length(args.a), parse_temperature(args.T),
              _quantities(args.quantities), args.rel_tol, not args.no_analytic)
    # validate specs before any numerics so usage errors exit with 2
    parse_model(job.metal), parse_model(job.diel)
    rec = evaluate(job)
    failed = "error" in rec
    if failed and not args.partial:
        raise CliError(rec["error"], EXIT_NUMERIC)
    _emit(render([rec], args.format, COLUMNS), args.out)
    return EXIT_NUMERIC if failed else EXIT_OK


def _grid(start: float, stop: float, points: int, scale: str) -> np.ndarray:
    if points < 2:
        raise CliError("a sweep needs at least 2 points")
    if not start < stop:
        raise CliError("sweep start must be below stop")
    if scale == "log":
        if not start > 0.0:
            raise CliError("log sweeps need start > 0")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def _jobs_default() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"{JOBS_ENV} must be an integer, got {raw!r}")


def cmd_sweep(args) -> int:
    if args.variable == "eps0":
        if args.diel is not None:
            raise CliError("eps0 sweeps build const:<eps0> dielectrics; drop --diel")
        args.diel = "const:1"
    elif args.diel is None:
        raise CliError("--diel is required unless sweeping eps0")
    parse_model(args.metal), parse_model(args.diel)
    q = _quantities(args.quantities)
    a = parse_length(args.a) if args.a else None
    T = parse_temperature(args.T) if args.T else 0.0
    conv = {"separation": parse_length, "temperature": parse_temperature, "eps0": float}[args.variable]
    grid = _grid(conv(args.start), conv(args.stop), args.points, args.scale)
    jobs = []
    for x in grid.tolist():
        if args.variable == "separation":
            jobs.append(Job(args.metal, args.diel, x, T, q, args.rel_tol, not args.no_analytic))
        elif args.variable == "temperature":
            if a is None:
                raise CliError("temperature sweeps need --a")
            jobs.append(Job(args.metal, args.diel, a, x, q, args.rel_tol, not args.no_analytic))
        else:
            if a is None:
                raise CliError("eps0 sweeps need --a")
            if x < 1.0:
                raise CliError("eps0 sweeps need start >= 1")
            jobs.append(Job(args.metal, f"const:{x!r}", a, T, q, args.rel_tol, not args.no_analytic, True))
    n_jobs = args.jobs if args.jobs is not None else _jobs_default()
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(evaluate, jobs))
    else:
        records = [evaluate(j) for j in jobs]
    _emit(render(records, args.format, COLUMNS), args.out)
    return EXIT_OK


def _extrapolate(temps: np.ndarray, S: np.ndarray) -> tuple[float, float]:
    """``S(0)`` from ``S0 + c2 T^2 + c3 T^3`` and, for a stability check, from ``S0 + c2 T^2``."""
    order = np.argsort(temps)
    t, s = temps[order], S[order]
    if t.size >= 3:
        A = np.vstack([np.ones_like(t), t**2, t**3]).T
        full = np.linalg.lstsq(A, s, rcond=None)[0][0]
    else:
        full = math.nan
    A2 = np.vstack([np.ones(2), t[:2] ** 2]).T
    lowest = np.linalg.solve(A2, s[:2])[0]
    return float(full), float(lowest)


def cmd_nernst(args) -> int:
    metal = parse_model(args.metal)
    diel_spec = args.diel
    diel = parse_model(diel_spec)
    if args.with_dc:
        if isinstance(diel, DcAugmentedDielectric):
            raise CliError("--with-dc given but the dielectric already has a dc term")
        diel_spec = f"{diel_spec}+dc:g={args.dc_g!r},beta300={args.dc_beta300!r}"
        diel = parse_model(diel_spec)
    a = parse_length(args.a)
    temps = np.array(sorted({parse_temperature(t) for t in args.temps.split(",")}, reverse=True))
    if temps.size < 2 or np.any(temps <= 0.0):
        raise CliError("--temps needs at least two positive temperatures")
    cfg = QuadratureConfig(rel_tol=args.rel_tol)
    S = []
    for T in temps:
        try:
            S.append(entropy(GeometryThermalState(a, float(T)), metal, diel, cfg).entropy_per_area)
        except (ConvergenceError, EntropyStepError) as exc:
            raise CliError(f"entropy failed at T={T:g} K: {exc}", EXIT_NUMERIC) from exc
    S = np.array(S)
    full, lowest = _extrapolate(temps, S)
    limit = full if math.isfinite(full) else lowest
    dc = diel.zero_frequency_class().kind == "dc_divergent"
    eps0 = static_permittivity(diel)
    predicted = asympt.dc_residual_entropy(eps0, a) if dc else 0.0
    scale = K_B / (16.0 * math.pi * a * a)  # entropy scale of the residual term
    spread = abs(full - lowest) if math.isfinite(full) else math.nan
    tol = args.tolerance * scale
    if not (spread <= max(tol, 1e-2 * abs(limit))):
        verdict = "INCONCLUSIVE"
    elif abs(limit) <= tol:
        verdict = "PASS"
    else:
        verdict = "VIOLATION"
    rec = {
        "metal": args.metal,
        "diel": diel_spec,
        "a": a,
        "temperatures": ";".join(repr(float(t)) for t in temps),
        "entropies": ";".join(repr(float(s)) for s in S),
        "S_limit": limit,
        "S_predicted": predicted,
        "verdict": verdict,
        "diagnostics": f"cubic_fit={full!r};two_lowest={lowest!r};scale={scale!r}",
    }
    _emit(render([rec], args.format, NERNST_COLUMNS), args.out)
    return EXIT_OK


def cmd_ingest(args) -> int:
    path = Path(args.path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {str(path)!r}: {exc.strerror}")
    table = parse_optical_csv(text, source=str(path))
    lo = parse_frequency(args.xi_min) if args.xi_min else table.omega[0] / 100.0
    hi = parse_frequency(args.xi_max) if args.xi_max else table.omega[-1] * 100.0
    grid = _grid(lo, hi, args.points, "log")
    eps = np.array([kramers_kronig(table, x) for x in grid])
    model = SampledPermittivity(grid, eps, source=str(path))
    if args.model_out:
        write_model_file(args.model_out, model, source=str(path))
    print(f"static limit eps(i xi_min) = {float(eps[0])!r} at xi_min = {float(grid[0])!r} rad/s", file=sys.stderr)
    records = [{"xi": x, "eps": e} for x, e in zip(grid.tolist(), eps.tolist())]
    _emit(render(records, args.format, INGEST_COLUMNS), args.out)
    return EXIT_OK


def cmd_schema(args) -> int:
    tables = {"compute/sweep": COLUMNS, "nernst": NERNST_COLUMNS, "ingest": INGEST_COLUMNS}
    if args.format == "json":
        doc = {k: {c: {"unit": u, "description": d} for c, (u, d) in v.items()} for k, v in tables.items()}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    for name, cols in tables.items():
        print(f"[{name}]")
        for c, (u, d) in cols.items():
            print(f"  {_header(c, cols):<28} {d}")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------


def _common(p: argparse.ArgumentParser, models: bool = True, diel_required: bool = True) -> None:
    if models:
        p.add_argument("--metal", default="ideal", help="metal model spec (default: ideal)")
        p.add_argument("--diel", required=diel_required, help="dielectric model spec, e.g. const:11.66")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--rel-tol", type=float, default=1e-8, help="Matsubara sum relative tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lifshitz-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="free energy, pressure, entropy at one (a, T)")
    _common(p)
    p.add_argument("--a", required=True, help="separation, e.g. 300nm")
    p.add_argument("--T", default="0K", help="temperature, e.g. 300K (0 selects the T = 0 path)")
    p.add_argument("--quantities", default="F,P", help="comma list from F,P,S or 'none'")
    p.add_argument("--no-analytic", action="store_true", help="skip closed-form columns")
    p.add_argument("--partial", action="store_true", help="emit the record even on numerical failure")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="one-parameter sweep, one row per grid point")
    _common(p, diel_required=False)
    p.add_argument("--variable", choices=("separation", "temperature", "eps0"), required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--stop", required=True)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    p.add_argument("--a", help="fixed separation for temperature and eps0 sweeps")
    p.add_argument("--T", help="fixed temperature (default 0K)")
    p.add_argument("--quantities", default="F,P")
    p.add_argument("--no-analytic", action="store_true")
    p.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("nernst", help="entropy as T -> 0 and the Nernst verdict")
    _common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--temps", default="5K,2K,1K", help="temperatures for the extrapolation")
    p.add_argument("--with-dc", action="store_true", help="add dc conductivity to the dielectric")
    p.add_argument("--dc-g", type=float, default=6500.0, help="activation temperature g in K")
    p.add_argument("--dc-beta300", type=float, default=1e-12, help="beta at 300 K")
    p.add_argument("--tolerance", type=float, default=1e-3,
                   help="limit counted as zero below this fraction of k_B / (16 pi a^2)")
    p.set_defaults(func=cmd_nernst)

    p = sub.add_parser("ingest", help="Kramers-Kronig transform of an optical-data CSV")
    _common(p, models=False)
    p.add_argument("path", help="CSV with omega_ev|omega_rads and im_eps columns")
    p.add_argument("--model-out", help="write a reusable model file here")
    p.add_argument("--xi-min")
    p.add_argument("--xi-max")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("schema", help="describe output columns and units")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"lifshitz-lab: error: {exc}", file=sys.stderr)
        return exc.code
    except OpticalDataError as exc:
        print(f"lifshitz-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, UnitError, DomainError) as exc:
        print(f"lifshitz-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"lifshitz-lab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
