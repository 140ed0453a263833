"""kacward: the exact partition function of the two-dimensional Ising model.

This package computes the partition function of the square-lattice Ising model three independent ways
(configuration sums, even-subgraph polynomials and signed closed-path products), checks the Kac-Ward
determinant that links them, and evaluates Onsager's free energy, internal energy and specific heat.
"""

__version__ = '0.1.0'
__author__ = 'kacward'
__license__ = 'AGPL-3.0'

from kacward.cli.reports import run_verify
from kacward.core.hightemp import graph_generating_polynomial, partition_brute_force, partition_from_graphs
from kacward.core.lattice import build_lattice
from kacward.core.onsager import critical_coupling, free_energy_density, thermo_point, thermo_sweep
from kacward.core.paths import feynman_identity_check, partition_product_truncated
from kacward.core.transfer import arrival_amplitude, trace_power_integral
from kacward.serve.app import create_app

__all__ = [
    'build_lattice', 'partition_brute_force', 'partition_from_graphs', 'graph_generating_polynomial',
    'feynman_identity_check', 'partition_product_truncated', 'arrival_amplitude', 'trace_power_integral',
    'free_energy_density', 'critical_coupling', 'thermo_point', 'thermo_sweep', 'run_verify', 'create_app'
]
