"""Services package for the thermoelastic contact-discontinuity toolkit.

Organized into subfolders, one per concern:
- hyperbolic/: Coefficient matrices, congruences and eigenstructure
- interface/: Jump conditions, boundary operators, backgrounds and rigidity
- straightening/: Lift, Phi-differentials, the operator L and involutions
- linearized/: Basic state, good unknowns, effective operators and identities
- stability/: Stability condition constants and sweeps
- solver/: Time integration, discrete norms and the energy ledger
- verification/: Identity suites reported by the CLI
- exporters/: CSV, snapshot and PDF output
"""
