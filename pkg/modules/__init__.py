# Este archivo permite que Python reconozca el directorio 'modules' como un paquete
# y facilita la importación de los módulos contenidos en él.

# Importar explícitamente las funciones principales para facilitar su uso
from .geometry import Polytope, active_split, contains, enumerate_vertices, perturb_rhs
from .lp_oracle import PrimalDualPair, solve_lmo, verify_certificate
from .objective import QuadraticObjective, SmoothObjective
from .fw_solver import FWConfig, FWResult, fw_gap, run_fw
from .sensitivity import SensitivityReport, analyze, certified_delta, sweep
from .reference_oracle import exact_qp_solve, sandwich_audit
