"""Self-check suite: every circuit against its closed-form prediction.

``run_suite`` returns a VerificationReport.  With ``inject="sign-flip"`` the
evolution kernel is corrupted for the duration of the run, which must make
the phase-estimation checks fail.
"""

from __future__ import annotations

import contextlib
import math

import numpy as np

from . import dirac, heaviside
from .amplify import (
    FixedPointConfig,
    Initializer,
    MarkingOracle,
    fixed_point_amplify,
    fixed_point_success,
    reflect_initial,
    reflect_marked,
)
from .circuit import Circuit, x_gate
from .hamiltonian import inject_fault, random_hamiltonian
from .qpe import kappa_analytic, nearest_binary, qpe_circuit
from .reference import VerificationReport, brute_force_eigs, predict_dirac, predict_heaviside
from .state import RegisterLayout, StateVector, pattern_probability, product_state


def _random_states(layout: RegisterLayout, count: int, rng) -> list[StateVector]:
    out = []
    for _ in range(count):
        v = rng.standard_normal(2**layout.total) + 1j * rng.standard_normal(2**layout.total)
        out.append(StateVector(v / np.linalg.norm(v)))
    return out


def _eigen_input(layout: RegisterLayout, ref, j: int) -> StateVector:
    return product_state(layout, {"physical": ref.eigenvectors[:, j]})


def _unitarity(report, name, circuit: Circuit, rng, count=20):
    dev = 0.0
    for psi in _random_states(circuit.layout, count, rng):
        dev = max(dev, abs(circuit.apply(psi).norm() - 1.0))
    report.add(f"unitarity: {name}", dev, 1e-10)


def check_qpe(report: VerificationReport, rng, sizes=((1, 3), (2, 4), (3, 5))):
    worst = 0.0
    for n, R in sizes:
        h = random_hamiltonian(n, rng, scale=2.5).shifted(3.0)
        ref = brute_force_eigs(h)
        layout = RegisterLayout.standard(physical=n, representation=R)
        c = qpe_circuit(layout, h)
        for j in range(2**n):
            out = c.apply(_eigen_input(layout, ref, j)).amplitudes.reshape(2**n, 2**R)
            # amplitude of |E_j>|x> is <E_j| (column x of the output)
            amps = ref.eigenvectors[:, j].conj() @ out
            pred = np.array([kappa_analytic(ref.eigenvalues[j], x, R) for x in range(2**R)])
            worst = max(worst, float(np.abs(amps - pred).max()))
        _unitarity(report, f"qpe N={n} R={R}", c, rng, 5)
        back = c + c.inverse()
        psi = _random_states(layout, 1, rng)[0]
        report.add(f"qpe forward then inverse N={n} R={R}", float(np.abs(back.apply(psi).amplitudes - psi.amplitudes).max()), 1e-10)
    report.add("qpe amplitudes match kappa", worst, 1e-10)
    Es = rng.uniform(0, 2 * math.pi - 2 * math.pi / 2**6, 1000)
    shortfall = max(2 / math.pi - abs(kappa_analytic(E, nearest_binary(E / (2 * math.pi), 6), 6)) for E in Es)
    report.add("kappa peak >= 2/pi", max(shortfall, 0.0), 0.0)


def check_coins(report: VerificationReport, rng, Ms=range(1, 6)):
    dev_multi = dev_frozen = 0.0
    reach = 0
    for n in (1, 2):
        h = random_hamiltonian(n, rng, scale=1.4)
        ref = brute_force_eigs(h)
        for M in Ms:
            gamma = predict_dirac(ref, M).gamma
            lp = dirac.primary_layout(n, M)
            K = dirac.min_counting_qubits(M)
            lf = dirac.frozen_layout(n, K)
            cm = dirac.multi_coin_circuit(lp, h)
            cf = dirac.dirac_frozen_circuit(lf, h, M)
            for j in range(2**n):
                v = ref.eigenvectors[:, j]
                out = cm.apply(_eigen_input(lp, ref, j)).amplitudes.reshape(2**n, 2**M, 2)
                dev_multi = max(dev_multi, abs(v.conj() @ out[:, 0, 0] - gamma[j]))
                out = cf.apply(_eigen_input(lf, ref, j)).amplitudes.reshape(2**n, 2**K, 2)
                dev_frozen = max(dev_frozen, abs(v.conj() @ out[:, -1, 0] - gamma[j]))
                counters = np.flatnonzero(np.abs(out).sum(axis=(0, 2)) > 1e-14)
                reach = max(reach, len(counters) - (M + 1))
        _unitarity(report, f"dirac frozen N={n}", cf, rng, 5)
    report.add("multi-coin amplitude = cos(E)**M", dev_multi, 1e-12)
    report.add("frozen coin amplitude = cos(E)**M", dev_frozen, 1e-12)
    report.add("frozen counter values <= M+1", max(reach, 0), 0)


def check_heaviside(report: VerificationReport, rng):
    n = 1
    h = random_hamiltonian(n, rng, scale=2.8).shifted(math.pi)
    ref = brute_force_eigs(h)
    for Q in (1, 2, 3):
        cfg = heaviside.FilterConfig(R=3, Q=Q)
        for strategy, lay in (("primary", heaviside.primary_layout(n, cfg)), ("frozen", heaviside.frozen_layout(n, cfg))):
            c = heaviside.filter_circuit(lay, h, cfg, strategy)
            pred = predict_heaviside(ref, cfg, strategy).alpha ** 2
            sim = [pattern_probability(c.apply(_eigen_input(lay, ref, j)), lay, "mark", "0") for j in range(2**n)]
            report.add(f"heaviside {strategy} Q={Q} mark-0 probability", float(np.abs(np.array(sim) - pred).max()), 1e-9)
            if Q == 2:
                _unitarity(report, f"heaviside {strategy} Q={Q}", c, rng, 5)


def check_amplification(report: VerificationReport, rng):
    n = 3
    lay = RegisterLayout.standard(physical=n, mark=1)
    oracle = MarkingOracle(Circuit(lay, [x_gate(lay.qubit("mark")), x_gate(lay.qubit("mark"), lay.pattern_controls("physical", "101"))]))
    init = Initializer.random(lay, 11)
    p = oracle.marked_probability(init.state())
    dev = 0.0
    for psi in _random_states(lay, 5, rng):
        dev = max(dev, float(np.abs(reflect_initial(reflect_initial(psi, init), init).amplitudes - psi.amplitudes).max()))
        dev = max(dev, float(np.abs(reflect_marked(reflect_marked(psi, oracle), oracle).amplitudes - psi.amplitudes).max()))
    report.add("reflections are involutions", dev, 1e-10)
    cfg = FixedPointConfig(0.1, p)
    run = fixed_point_amplify(init, oracle, cfg)
    report.add("fixed-point success matches closed form", abs(run.probability - fixed_point_success(p, cfg.L, cfg.delta)), 1e-9)


def run_suite(seed: int = 0, inject: str | None = None) -> VerificationReport:
    rng = np.random.default_rng(seed)
    report = VerificationReport()
    ctx = inject_fault(inject) if inject else contextlib.nullcontext()
    with ctx:
        check_qpe(report, rng)
        check_coins(report, rng)
        check_heaviside(report, rng)
        check_amplification(report, rng)
    return report
