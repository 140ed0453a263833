"""Executors shared by the command line and the HTTP surface; each maps a RunConfig to a CommandResult."""
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from kacward.cli.config import RunConfig
from kacward.cli.reports import run_verify
from kacward.core import hightemp, onsager, paths, transfer
from kacward.core.lattice import build_lattice
from kacward.utils.constants import CSV_FLOAT_FORMAT, CSV_HEADER
from kacward.utils.exceptions import DivergenceError
from kacward.utils.quadrature import quad_spec


@dataclass
class CommandResult:
    """
    Parameters:
        command (str): The route that ran.
        payload: JSON-serialisable result.
        passed (bool): False when a comparison failed; drives exit code 1.
        text (str): Human-readable rendering.
        rows (list): ThermoPoint rows for CSV output.
    """
    command: str
    payload: object
    passed: bool = True
    text: str = ''
    rows: List[tuple] = field(default_factory=list)

    def render(self, fmt: str) -> str:
        if fmt == 'json':
            return json.dumps(self.payload, indent=2)
        if fmt == 'csv':
            return thermo_csv(self.rows)
        return self.text or json.dumps(self.payload, indent=2)


def thermo_csv(rows: List[tuple]) -> str:
    """Rows in the documented CSV layout, every value printed with CSV_FLOAT_FORMAT."""
    buffer = io.StringIO()
    data = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))
    np.savetxt(buffer, data, fmt=CSV_FLOAT_FORMAT, delimiter=',', header=','.join(CSV_HEADER), comments='')
    return buffer.getvalue()


def _brute(cfg: RunConfig) -> CommandResult:
    lattice = build_lattice(cfg.N)
    dos = hightemp.density_of_states(lattice)
    payload = {'N': cfg.N, 'density_of_states': {str(s): g for s, g in sorted(dos.items())}}
    lines = [f"N={cfg.N}: {lattice.num_sites} sites, {lattice.num_bonds} bonds"]
    for K in cfg.couplings():
        Z = hightemp.partition_brute_force(lattice, K)
        payload.setdefault('Z', {})[str(K)] = Z
        lines.append(f"K={K:g}: Z = {Z:.15e}, ln Z / N^2 = {math.log(Z) / lattice.num_sites:.15f}")
    return CommandResult('brute', payload, text='\n'.join(lines))


def _graphs(cfg: RunConfig) -> CommandResult:
    lattice = build_lattice(cfg.N)
    poly = hightemp.graph_generating_polynomial(lattice)
    payload = {'N': cfg.N, 'polynomial': poly.to_dict(), 'even_subgraphs': poly.coefficient_sum() - 1}
    lines = [f"N={cfg.N}: 1 + sum_G u^L = {poly}"]
    for K in cfg.couplings():
        Z = hightemp.partition_from_graphs(lattice, K)
        payload.setdefault('Z', {})[str(K)] = Z
        lines.append(f"K={K:g}: Z = {Z:.15e}")
    return CommandResult('graphs', payload, text='\n'.join(lines))


def _identity(cfg: RunConfig) -> CommandResult:
    lattice = build_lattice(cfg.N)
    report = paths.feynman_identity_check(lattice, cfg.max_order)
    payload = report.to_dict()
    lines = [f"N={cfg.N}, through u^{cfg.max_order}, {report.num_classes} path classes",
             f"graphs: {report.graph_side}", f"paths:  {report.path_side}"]
    for K in cfg.couplings():
        Z = paths.partition_product_truncated(lattice, K, cfg.max_order)
        payload.setdefault('Z_truncated', {})[str(K)] = Z
        lines.append(f"K={K:g}: truncated product Z = {Z:.15e}")
    lines.append(f"verdict: {'PASS' if report.verdict else 'FAIL'}")
    return CommandResult('identity', payload, passed=report.verdict, text='\n'.join(lines))


def _amplitude(cfg: RunConfig) -> CommandResult:
    direction = transfer.DirectionIndex[cfg.direction] if cfg.direction else None
    value = transfer.arrival_amplitude(cfg.n, cfg.x, cfg.y, direction, u=cfg.u)
    which = cfg.direction or 'any direction'
    payload = {'n': cfg.n, 'x': cfg.x, 'y': cfg.y, 'direction': cfg.direction, 'u': cfg.u,
               'real': value.real, 'imag': value.imag}
    return CommandResult('amplitude', payload,
                         text=f"F_{cfg.n}({cfg.x},{cfg.y}) [{which}] at u={cfg.u:g}: {value.real:.15g} "
                         f"{'+' if value.imag >= 0 else '-'} {abs(value.imag):.15g}i")


def _trace(cfg: RunConfig) -> CommandResult:
    trace = transfer.trace_power_integral(cfg.n, cfg.u, cfg.quad_res)
    oracle = paths.base_point_amplitude(cfg.n, cfg.u)
    recursion = transfer.trace_from_recursion(cfg.n, cfg.u)
    closed = -0.5 * trace
    passed = abs(closed - oracle) <= 1e-10 and abs(recursion - trace) <= 1e-10
    payload = {'n': cfg.n, 'u': cfg.u, 'mean_trace': trace, 'closed_amplitude_sum': closed,
               'walk_enumeration': oracle, 'recursion_trace': recursion, 'match': passed}
    text = (f"mean Tr (uM)^{cfg.n} = {trace:.15g}\nclosed amplitude sum = {closed:.15g}\n"
            f"walk enumeration = {oracle:.15g}\nrecursion = {recursion:.15g}")
    return CommandResult('trace', payload, passed=passed, text=text)


def _free_energy(cfg: RunConfig) -> CommandResult:
    quad = quad_spec(cfg.quad_res)
    couplings = cfg.couplings() or [onsager.critical_coupling()]
    rows, lines = [], []
    for K in couplings:
        row = {'K': K, 'minus_beta_f': onsager.free_energy_density(K, quad, cfg.method or 'grid')}
        try:
            row['series'] = onsager.series_partial(K)
        except DivergenceError:
            row['series'] = None
        if cfg.N is not None:
            row['finite_size_log_z'] = onsager.finite_size_log_z(cfg.N, K, quad)
        rows.append(row)
        series = 'diverges' if row['series'] is None else f"{row['series']:.15f}"
        lines.append(f"K={K:.10g}: -beta f = {row['minus_beta_f']:.15f} (k-series {series})")
    return CommandResult('free-energy', rows, text='\n'.join(lines))


def _critical(cfg: RunConfig) -> CommandResult:
    report = onsager.critical_report()
    lines = [f"K_c = {report['K_c']:.16f} (ln(1+sqrt 2)/2 = {report['closed_form']:.16f})",
             f"T_c = {report['T_c_over_J']:.16f} J/k_B",
             f"sinh 2K_c - 1 = {report['sinh_2Kc'] - 1:.3e}",
             f"tanh^2 2K_c - 1/2 = {report['tanh2_2Kc'] - 0.5:.3e}",
             f"k1 - 1 = {report['k1'] - 1:.3e}",
             f"2 sinh 2K_c - cosh^2 2K_c = {report['residual_2sinh_minus_cosh2']:.3e}",
             f"U(K_c)/J = {report['U_over_J']:.15f}"]
    return CommandResult('critical', report, text='\n'.join(lines))


def _thermo(cfg: RunConfig) -> CommandResult:
    quad = quad_spec(cfg.quad_res)
    method = cfg.method or 'line'
    if cfg.K is not None:
        points = [onsager.thermo_point(cfg.K, method, quad)]
    else:
        points = onsager.thermo_sweep(cfg.kmin, cfg.kmax, cfg.steps or 1, method, quad)
    payload = [p.to_dict() for p in points]
    text = thermo_csv([p.row() for p in points])
    return CommandResult('thermo', payload, text=text, rows=[p.row() for p in points])


def _verify(cfg: RunConfig) -> CommandResult:
    report = run_verify(cfg.N if cfg.N is not None else 3, cfg.max_order, cfg.quad_res)
    return CommandResult('verify', report.model_dump(), passed=report.passed, text=report.to_text())


EXECUTORS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'brute': _brute,
    'graphs': _graphs,
    'identity': _identity,
    'amplitude': _amplitude,
    'trace': _trace,
    'free-energy': _free_energy,
    'critical': _critical,
    'thermo': _thermo,
    'verify': _verify,
}


def execute(cfg: RunConfig) -> CommandResult:
    """Run the route named by cfg.command."""
    return EXECUTORS[cfg.command](cfg)


def execute_all(configs: List[RunConfig], names: Optional[List[str]] = None) -> List[CommandResult]:
    """Run configs in order, optionally only those whose name is listed."""
    return [execute(cfg) for cfg in configs if names is None or cfg.name in names]
