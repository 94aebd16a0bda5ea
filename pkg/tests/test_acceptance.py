"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with pytest (the summary is printed at the end of the session) or
directly as ``python tests/test_acceptance.py``. Criteria that are known not
to hold at their stated tolerance are marked ``xfail(strict=True)``; they are
still evaluated at full tolerance and reported as FAIL.
"""

import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lifshitz_lab import asympt, cli
from lifshitz_lab.geometry import GeometryThermalState
from lifshitz_lab.lifshitz import (
    QuadratureConfig,
    entropy,
    free_energy,
    pressure,
    zero_temperature_energy,
    zero_temperature_pressure,
)
from lifshitz_lab.models import ConstantDielectric, DcAugmentedDielectric, IdealMetal, OscillatorDielectric, PlasmaMetal
from lifshitz_lab.specfun import polylog, zeta3
from lifshitz_lab.units import C_LIGHT, EV_TO_RADS, HBAR, K_B, temperature_for_tau

from oracles import psi_double

RESULTS: dict[int, tuple[bool, str]] = {}

EPS_SI = 11.66
WP = 9.0 * EV_TO_RADS
W1 = 4.2 * EV_TO_RADS
TIGHT = QuadratureConfig(rel_tol=1e-14)
TIGHTEST = QuadratureConfig(rel_tol=1e-15)


def natural(a):
    return HBAR * C_LIGHT / (32 * math.pi**2 * a**3)


def state(a, tau):
    return GeometryThermalState(a, temperature_for_tau(a, tau))


def record(n, ok, detail):
    RESULTS[n] = (bool(ok), detail)
    return bool(ok), detail


def timed(budget):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            if dt > budget:
                ok, detail = False, f"{detail}; runtime {dt:.1f} s exceeds {budget} s"
            else:
                detail = f"{detail}; {dt:.1f} s"
            return record(int(fn.__name__.split("_")[1]), ok, detail)

        run.__name__ = fn.__name__
        return run

    return wrap


@timed(10)
def criterion_1():
    worst = max(abs(asympt.psi_dm(e) - psi_double(e)) for e in (2.0, 5.0, 11.66, 100.0))
    at_one = asympt.psi_dm(1.0)
    big = asympt.psi_dm(1e6)
    ok = worst <= 1e-8 and at_one == 0.0 and 0.999 <= big <= 1.0
    return ok, f"max |single - double| = {worst:.1e}, psi(1) = {at_one!r}, psi(1e6) = {big:.6f} (need [0.999, 1])"


@timed(60)
def criterion_2():
    m, d = IdealMetal(), ConstantDielectric(EPS_SI)
    worst_p = worst_s = 0.0
    for a in (100e-9, 300e-9, 1e-6):
        for T in (10.0, 77.0, 300.0):
            s = GeometryThermalState(a, T)
            F = lambda aa, TT: free_energy(GeometryThermalState(aa, TT), m, d, TIGHT).free_energy_per_area
            # Richardson-extrapolated central differences, independent of the library's entropy steps
            da = lambda h: -(F(a + h, T) - F(a - h, T)) / (2 * h)
            dT = lambda h: -(F(a, T + h) - F(a, T - h)) / (2 * h)
            ha, hT = a * 1e-3, T * 1e-2
            P_fd = (4 * da(ha / 2) - da(ha)) / 3
            S_fd = (4 * dT(hT / 2) - dT(hT)) / 3
            P = pressure(s, m, d, TIGHT).pressure
            S = entropy(s, m, d, TIGHT).entropy_per_area
            worst_p = max(worst_p, abs(P_fd / P - 1))
            worst_s = max(worst_s, abs(S_fd / S - 1))
    ok = worst_p <= 1e-3 and worst_s <= 1e-3
    return ok, f"max rel |P + dF/da| = {worst_p:.1e}, max rel |S + dF/dT| = {worst_s:.1e}"


@timed(30)
def criterion_3():
    m, d = IdealMetal(), ConstantDielectric(EPS_SI)
    s = state(1e-6, 30.0)
    ref = asympt.high_t(EPS_SI, s)
    num = (
        free_energy(s, m, d, TIGHT).free_energy_per_area,
        pressure(s, m, d, TIGHT).pressure,
        entropy(s, m, d, TIGHT).entropy_per_area,
    )
    devs = [abs(n / r - 1) for n, r in zip(num, ref)]
    return max(devs) <= 1e-6, "rel dev F, P, S = " + ", ".join(f"{x:.1e}" for x in devs)


def _low_t_series(eps0, taus, a=1e-6):
    m, d = IdealMetal(), ConstantDielectric(eps0)
    u = natural(a)
    E = zero_temperature_energy(a, m, d, TIGHTEST).energy_per_area
    P0 = zero_temperature_pressure(a, m, d, TIGHTEST).pressure
    dF, dP = [], []
    for t in taus:
        s = state(a, t)
        dF.append((free_energy(s, m, d, TIGHTEST).free_energy_per_area - E) / u)
        dP.append((pressure(s, m, d, TIGHTEST).pressure - P0) / (u / a))
    return np.array(dF), np.array(dP)


def _weighted_fit(taus, values, lowest, terms):
    """Leading coefficient of ``sum_k c_k tau^(lowest + k)``, fitted on ``values / tau^lowest``."""
    X = np.vstack([taus**k for k in range(terms)]).T
    return np.linalg.lstsq(X, values / taus**lowest, rcond=None)[0][0]


@timed(300)
def criterion_4():
    taus = np.geomspace(0.02, 0.1, 12)
    dF, dP = _low_t_series(EPS_SI, taus)
    A, K = asympt.tau3_coefficient(EPS_SI), asympt.k4(EPS_SI)
    resF = np.abs(dF - (-A * taus**3 + K * taus**4))
    resP = np.abs(dP - (-K * taus**4))
    lt = np.log(taus)
    slope_F = np.polyfit(lt, np.log(resF), 1)[0]
    slope_P = np.polyfit(lt, np.log(resP), 1)[0]
    # free fit tau^3 .. tau^7; fewer terms leave a visible bias at eps0 = 11.66
    dev_A = abs(-_weighted_fit(taus, dF, 3, 5) / A - 1)
    ok = abs(slope_F - 5) <= 0.3 and abs(slope_P - 5) <= 0.3 and dev_A <= 0.02
    return ok, f"slope F = {slope_F:.2f}, slope P = {slope_P:.2f} (need 5 +- 0.3), tau^3 coefficient dev = {dev_A:.1e}"


@timed(300)
def criterion_5():
    # the tau^5 term is about 25 K4 at eps0 = 11.66, so the window stays well below tau = 0.04
    taus = np.geomspace(0.002, 0.03, 14)
    parts = []
    ok = True
    for eps0 in (4.0, EPS_SI):
        _, dP = _low_t_series(eps0, taus)
        dev = abs(-_weighted_fit(taus, dP, 4, 4) / asympt.k4(eps0) - 1)
        ok = ok and dev <= 0.03
        parts.append(f"eps0={eps0:g}: K4 fit dev = {dev:.1e}")
    return ok, ", ".join(parts)


@timed(60)
def criterion_6():
    m, d = PlasmaMetal(WP), OscillatorDielectric.single(EPS_SI - 1, W1)
    parts, ok = [], True
    for a, tol in ((300e-9, 0.01), (200e-9, 0.02)):
        E = zero_temperature_energy(a, m, d, TIGHT).energy_per_area
        P = zero_temperature_pressure(a, m, d, TIGHT).pressure
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", asympt.AsymptoticWarning)
            z = asympt.real_zero_t(EPS_SI, WP, W1, a)
        dE, dP = z.energy / E - 1, z.pressure / P - 1
        ok = ok and abs(dE) <= tol and abs(dP) <= tol
        parts.append(f"a={a * 1e9:.0f} nm: E dev {dE:+.2%}, P dev {dP:+.2%} (tol {tol:.0%})")
    return ok, "; ".join(parts)


@timed(300)
def criterion_7():
    a = 300e-9
    m, d = PlasmaMetal(WP), OscillatorDielectric.single(EPS_SI - 1, W1)
    E = zero_temperature_energy(a, m, d, TIGHT).energy_per_area
    P0 = zero_temperature_pressure(a, m, d, TIGHT).pressure
    z = asympt.real_zero_t(EPS_SI, WP, W1, a)
    worst_F = worst_P = 0.0
    for T in (2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0):
        s = GeometryThermalState(a, T)
        an = asympt.real_low_t(EPS_SI, WP, W1, s)
        dP = (an.pressure - z.pressure) / (pressure(s, m, d, TIGHT).pressure - P0) - 1
        worst_P = max(worst_P, abs(dP))
        if T <= 20.0:
            dF = (an.free_energy - z.energy) / (free_energy(s, m, d, TIGHT).free_energy_per_area - E) - 1
            worst_F = max(worst_F, abs(dF))
    ok = worst_F <= 0.05 and worst_P <= 0.05
    return ok, f"max thermal-correction dev F (T <= 20 K) = {worst_F:.1%}, P (T <= 40 K) = {worst_P:.1%} (tol 5%)"


@timed(300)
def criterion_8():
    a = 300e-9
    # (a) finite eps0
    m, d = IdealMetal(), ConstantDielectric(EPS_SI)
    S300 = entropy(GeometryThermalState(a, 300.0), m, d, TIGHT).entropy_per_area
    taus = np.array([0.005, 0.01, 0.015, 0.02])
    S = np.array([entropy(state(a, t), m, d, TIGHT).entropy_per_area for t in taus])
    S0 = np.polyfit(taus, S, 3)[-1]
    lead = 3 * K_B * zeta3() * (EPS_SI - 1) ** 2 / (128 * math.pi**3 * a * a * (EPS_SI + 1))
    # leading tau^2 behaviour: intercept of S / tau^2 over tau <= 0.02
    lead_fit = np.polyfit(taus, S / taus**2, 2)[-1]
    dev_lead = abs(lead_fit / lead - 1)
    # (b) dc-augmented dielectric
    dd = DcAugmentedDielectric.calibrated(OscillatorDielectric.single(EPS_SI - 1, W1), 6500.0, 1e-12)
    Ts = np.array([1.0, 2.0, 5.0])
    Sdc = [entropy(GeometryThermalState(a, T), PlasmaMetal(WP), dd, TIGHT).entropy_per_area for T in Ts]
    Sdc0 = np.linalg.solve(np.vstack([np.ones(3), Ts**2, Ts**3]).T, np.array(Sdc))[0]
    ref = K_B / (16 * math.pi * a * a) * (zeta3() - polylog(3, (EPS_SI - 1) / (EPS_SI + 1)))
    dev_dc = abs(Sdc0 / ref - 1)
    ok = abs(S0) < 1e-3 * abs(S300) and dev_lead <= 0.05 and dev_dc <= 0.01
    return ok, (f"(a) |S(0)/S(300 K)| = {abs(S0 / S300):.1e}, tau^2 coefficient dev = {dev_lead:.1e}; "
                f"(b) residual entropy dev = {dev_dc:.1e}")


@timed(10)
def criterion_9():
    a, beta = 300e-9, 1e-12
    t = 1e-3
    q = lambda tt: asympt.q1_correction(EPS_SI, beta, state(a, tt))
    lead = lambda tt: asympt.q1_leading(EPS_SI, beta, state(a, tt))
    ratio, lead_ratio = q(t) / q(t / 2), lead(t) / lead(t / 2)
    dev = abs(ratio / lead_ratio - 1)
    zero = asympt.q1_correction(EPS_SI, 0.0, state(a, t))
    return dev <= 0.05 and zero == 0.0, f"ratio dev = {dev:.1e}, q1(beta=0) = {zero!r}"


@timed(30)
def criterion_10():
    import csv
    import io
    import tempfile
    from contextlib import redirect_stderr, redirect_stdout

    C, w0 = EPS_SI - 1, 4.2
    w = np.geomspace(1e-3, 1e3, 4000)
    im = C * w0**2 * (0.01 * w0) * w / ((w0**2 - w**2) ** 2 + (0.01 * w0 * w) ** 2)
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "lorentz.csv"
        src.write_text("omega_ev,im_eps\n" + "".join(f"{x!r},{y!r}\n" for x, y in zip(w.tolist(), im.tolist())))
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.main(["ingest", str(src), "--xi-min", "0.042eV", "--xi-max", "42eV", "--points", "31"])
    if code != 0:
        return False, f"ingest exited {code}: {err.getvalue().strip()}"
    reader = csv.reader(io.StringIO(out.getvalue()))
    next(reader)
    worst = 0.0
    for xi, eps in ((float(x), float(e)) for x, e in reader):
        ref = 1 + C / (1 + (xi / (w0 * EV_TO_RADS)) ** 2)
        worst = max(worst, abs(eps / ref - 1))
    return worst <= 0.01, f"max rel dev over xi in [0.042, 42] eV = {worst:.1e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]

KNOWN_FAILURES = {
    1: "psi(1e6) = 0.9923: the approach to 1 is logarithmically slow, see decisions ledger",
    4: "large tau^6 term at eps0 = 11.66 biases the fitted slope on [0.02, 0.1], see decisions ledger",
    7: "closed-form thermal corrections deviate beyond 5% above a few kelvin, see decisions ledger",
}


def _case(fn):
    n = int(fn.__name__.split("_")[1])
    marks = [pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[n])] if n in KNOWN_FAILURES else []
    return pytest.param(fn, id=f"criterion_{n}", marks=marks)


@pytest.mark.parametrize("criterion", [_case(fn) for fn in CRITERIA])
def test_acceptance(criterion):
    ok, detail = criterion()
    assert ok, detail


def _line(n):
    ok, detail = RESULTS[n]
    return f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"


def summary_lines():
    return [_line(n) for n in sorted(RESULTS)]


if __name__ == "__main__":
    for fn in CRITERIA:
        fn()
        print(_line(int(fn.__name__.split("_")[1])), flush=True)
