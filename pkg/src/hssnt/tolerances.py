from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    structural: float = 1e-12     # Jacobi, bracket tables, signed permutations
    orthogonality: float = 1e-10  # isometries, projections, Gram tables
    root_cluster: float = 1e-7    # relative gap for grouping ad-eigenvalues
    spectral_merge: float = 1e-8  # relative gap for merging spectral values
    certificate: float = 1e-8     # tripotent / orthogonality certificate
    reconstruction: float = 1e-9  # sum of lambda_i c_i against the input
    eig_floor: float = 1e-12      # fractional operator powers
    coefficient: float = 1e-10    # {0, +-1} membership of canonical coefficients
    lts: float = 1e-9             # triple-bracket closure
    identity: float = 1e-9        # analytic identities (G = 1, round trips)
    numeric: float = 1e-5         # finite-difference certification
    principal: float = 1e-3       # min |alpha(v)| / |v| for sampled points

    def with_overrides(self, **kw):
        return replace(self, **kw)


DEFAULT = ToleranceConfig()
