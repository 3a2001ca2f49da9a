"""Exception hierarchy. Every library failure derives from HssntError."""


class HssntError(Exception):
    pass


class InvalidSpec(HssntError, ValueError):
    pass


class ModelMismatch(HssntError, ValueError):
    pass


class DegenerateAbelian(HssntError):
    pass


class ClusteringAmbiguity(HssntError):
    pass


class NotHermitianType(HssntError):
    pass


class NotSignedPermutation(HssntError):
    pass


class CenterDimensionError(HssntError):
    pass


class DecompositionFailure(HssntError):
    pass


class BracketRelationFailure(HssntError):
    pass


class UnknownName(HssntError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NoSeriesAvailable(HssntError):
    pass


class CertificateFailure(HssntError):
    pass


class DomainExceeded(HssntError, ValueError):
    pass


class OutsideCutLocus(DomainExceeded):
    pass


class NotPositiveDefinite(HssntError):
    pass


class RankMismatch(HssntError, ValueError):
    pass


class SingularJacobi(HssntError):
    pass


class NonPrincipalPoint(HssntError, ValueError):
    pass


class DependentInput(HssntError, ValueError):
    pass
