"""Quantum-steering distillation toolbox.

Assemblage algebra, one-sided local filtering, assemblage-fidelity
metrics, LHS-robustness solvers and a Monte-Carlo tomography pipeline.
"""

from .assemblage import (Assemblage, MeasurementSet, alpha_assemblage,
                         from_state, pauli_zx_projectors, singlet_assemblage,
                         tensor, validate)
from .filtering import (KrausFilter, ProtocolResult, RateReport, apply_filter,
                        averaged_output, paper_filter, rate_report,
                        run_protocol_exact, run_protocol_sampled)
from .lhs import (LhsModel, RobustnessResult, lhs_membership, lhs_robustness,
                  robustness_oracle)
from .metrics import (ClosedFormReport, assemblage_fidelity,
                      assemblage_fidelity_dist, closed_forms,
                      singlet_fraction)
from .tomosim import (TomographyRun, figure3_sweep, reconstruct,
                      simulate_counts)

__version__ = "0.1.0"
