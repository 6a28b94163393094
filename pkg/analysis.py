"""
Attenuation, effort and error metrics over a simulation trace, and CSV output

Integrals are trapezoidal over the full trace.
"""
import csv
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np
from scipy.integrate import trapezoid

from controllers import AttenuationSpec
from simulator import ScenarioConfig, SimTrace

SIGMA_BOUND_SLACK = 1e-9
# disturbance energy at or below this is round-off, the ratio is undefined
ENERGY_FLOOR = 1e-20

SUMMARY_FIELDS = [
    'scenario', 'controller', 'steps', 'final_error', 'max_error', 'max_error_primary',
    'max_error_dual', 'effort', 'min_sigma', 'gamma_T_sim', 'gamma_O_sim', 'gamma_T',
    'gamma_O', 'gamma_T_ok', 'gamma_O_ok', 'sigma_bound_ok', 'converged', 'passed', 'csv',
]


@dataclass
class AttenuationReport:
    gamma_T_sim: Optional[float]
    gamma_O_sim: Optional[float]
    effort_integral: float
    max_error_norm: float
    max_error_primary: float
    max_error_dual: float
    min_sigma: float
    gamma_T: Optional[float] = None
    gamma_O: Optional[float] = None
    gamma_T_ok: Optional[bool] = None
    gamma_O_ok: Optional[bool] = None
    sigma_bound_ok: Optional[bool] = None
    converged: Optional[bool] = None

    @property
    def flags(self) -> Dict[str, bool]:
        """Flags that were evaluated; skipped ones are left out"""
        names = ('gamma_T_ok', 'gamma_O_ok', 'sigma_bound_ok', 'converged')
        return {n: getattr(self, n) for n in names if getattr(self, n) is not None}

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


@dataclass
class EffortSummary:
    effort_integral: float
    u_norm: np.ndarray
    error_norm: np.ndarray
    min_sigma: float


def effort_and_error(trace: SimTrace) -> EffortSummary:
    if len(trace) == 0:
        raise ValueError("empty trace")
    u_norm = trace.u_norm
    return EffortSummary(
        effort_integral=float(trapezoid(u_norm, trace.t)),
        u_norm=u_norm,
        error_norm=trace.err_norm,
        min_sigma=float(np.min(trace.sigma_min)),
    )


def _ratio(num: float, den: float, sqrt_ratio: bool) -> Optional[float]:
    if den <= ENERGY_FLOOR:
        return None
    r = num / den
    return math.sqrt(r) if sqrt_ratio else r


def attenuation(trace: SimTrace, spec: Optional[AttenuationSpec], sqrt_ratio: bool = False) -> AttenuationReport:
    """
    Simulated error-to-disturbance ratios

    gamma_T_sim = int |T|^2 / int (|v_w'|^2 + |v_c'|^2) over the dual
    (translational) parts, gamma_O_sim likewise with O and the primary parts.
    Disturbances are the effective ones: sampled signals plus unrealized
    command and unknown target motion. With sqrt_ratio the square root of
    each ratio is reported instead.
    """
    t = trace.t
    T_energy = float(trapezoid(np.sum(trace.T ** 2, axis=1), t))
    O_energy = float(trapezoid(np.sum(trace.O ** 2, axis=1), t))
    vw = trace.vw_effective
    vc = trace.vc_effective
    dual_energy = float(trapezoid(np.sum(vw[:, 3:] ** 2, axis=1) + np.sum(vc[:, 3:] ** 2, axis=1), t))
    rot_energy = float(trapezoid(np.sum(vw[:, :3] ** 2, axis=1) + np.sum(vc[:, :3] ** 2, axis=1), t))

    summary = effort_and_error(trace)
    report = AttenuationReport(
        gamma_T_sim=_ratio(T_energy, dual_energy, sqrt_ratio),
        gamma_O_sim=_ratio(O_energy, rot_energy, sqrt_ratio),
        effort_integral=summary.effort_integral,
        max_error_norm=float(np.max(summary.error_norm)),
        max_error_primary=float(np.max(np.linalg.norm(trace.z[:, :4], axis=1))),
        max_error_dual=float(np.max(np.linalg.norm(trace.z[:, 4:], axis=1))),
        min_sigma=summary.min_sigma,
    )
    if spec is not None:
        report.gamma_T = spec.gamma_T
        report.gamma_O = spec.gamma_O
        if report.gamma_T_sim is not None:
            report.gamma_T_ok = report.gamma_T_sim <= spec.gamma_T
        if report.gamma_O_sim is not None:
            report.gamma_O_ok = report.gamma_O_sim <= spec.gamma_O
    return report


def acceptance_report(trace: SimTrace, config: ScenarioConfig, sqrt_ratio: bool = False) -> AttenuationReport:
    """attenuation() plus the singular-value bound and convergence flags the config asks for"""
    report = attenuation(trace, config.controller.attenuation, sqrt_ratio=sqrt_ratio)
    region = config.controller.singular_region
    if config.controller.kind == 'hinf_sr' and region is not None and config.sigma_bound:
        report.sigma_bound_ok = report.min_sigma >= region.sigma_lower_bound - SIGMA_BOUND_SLACK
    if config.converge_tol is not None:
        report.converged = float(trace.err_norm[-1]) < config.converge_tol
    return report


def summary_row(trace: SimTrace, report: AttenuationReport, csv_path: str = '') -> Dict:
    row = asdict(report)
    return {
        'scenario': trace.scenario,
        'controller': trace.controller,
        'steps': len(trace),
        'final_error': float(trace.err_norm[-1]),
        'max_error': row['max_error_norm'],
        'max_error_primary': row['max_error_primary'],
        'max_error_dual': row['max_error_dual'],
        'effort': row['effort_integral'],
        'min_sigma': row['min_sigma'],
        'gamma_T_sim': row['gamma_T_sim'],
        'gamma_O_sim': row['gamma_O_sim'],
        'gamma_T': row['gamma_T'],
        'gamma_O': row['gamma_O'],
        'gamma_T_ok': row['gamma_T_ok'],
        'gamma_O_ok': row['gamma_O_ok'],
        'sigma_bound_ok': row['sigma_bound_ok'],
        'converged': row['converged'],
        'passed': report.passed,
        'csv': csv_path,
    }


# CSV trace

@dataclass
class CsvTrace:
    """Trace as read back from CSV; vw and vc are the effective disturbances"""
    t: np.ndarray
    q: np.ndarray
    u: np.ndarray
    x: np.ndarray
    xd: np.ndarray
    err_norm: np.ndarray
    u_norm: np.ndarray
    sigma_min: np.ndarray
    kappa_s: np.ndarray
    vw: np.ndarray
    vc: np.ndarray


def trace_header(n: int) -> List[str]:
    return (
        ['t']
        + [f'q{i}' for i in range(n)]
        + [f'u{i}' for i in range(n)]
        + [f'x{i}' for i in range(8)]
        + [f'xd{i}' for i in range(8)]
        + ['err_norm', 'u_norm', 'sigma_min', 'kappa_s']
        + [f'vw{i}' for i in range(6)]
        + [f'vc{i}' for i in range(6)]
    )


def trace_table(trace: SimTrace) -> np.ndarray:
    return np.column_stack((
        trace.t, trace.q, trace.u, trace.x, trace.xd,
        trace.err_norm, trace.u_norm, trace.sigma_min, trace.kappa_s,
        trace.vw_effective, trace.vc_effective,
    ))


def write_trace_csv(trace: SimTrace, path: str):
    """
    One row per record, 17 significant digits

    The vw and vc columns hold the effective disturbances the attenuation
    ratios are computed from: vw includes the unrealized command J qdot - Gamma,
    vc includes the hidden target twist.
    """
    n = trace.q.shape[1]
    np.savetxt(path, trace_table(trace), delimiter=',', fmt='%.17g',
               header=','.join(trace_header(n)), comments='')


def read_trace_csv(path: str) -> CsvTrace:
    with open(path, 'r', encoding='utf-8') as f:
        header = f.readline().strip().split(',')
    data = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    n = sum(1 for h in header if h.startswith('q'))
    if header != trace_header(n):
        raise ValueError(f"{path}: unexpected trace header")
    t, q, u, x, xd, err, un, sig, ks, vw, vc = np.split(data, np.cumsum([1, n, n, 8, 8, 1, 1, 1, 1, 6]), axis=1)
    return CsvTrace(t=t[:, 0], q=q, u=u, x=x, xd=xd, err_norm=err[:, 0], u_norm=un[:, 0],
                    sigma_min=sig[:, 0], kappa_s=ks[:, 0], vw=vw, vc=vc)


def write_summary(rows: List[Dict], path: str):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ('' if row.get(k) is None else row.get(k)) for k in SUMMARY_FIELDS})
