"""Exception hierarchy shared by all evohull modules."""


class EvoHullError(Exception):
    """Base class for all errors raised by evohull."""


# --- encoding ---

class InvalidGenotypeError(EvoHullError):
    """Genotype length or symbol indices do not match the codec."""


class UnsupportedOperationError(EvoHullError):
    """Operation requires a capability the object does not have (e.g. an inverse)."""


class OutOfRangeError(EvoHullError):
    """Phenotype lies outside the codec's range."""


class InvalidDistributionError(EvoHullError):
    """Probability vector has negative entries or does not sum to one."""


class InvalidRelationError(EvoHullError):
    """Supplied predicate is not an equivalence relation on the sampled universe."""


# --- ea_core ---

class InvalidParamsError(EvoHullError):
    """Operator parameters outside their legal domain."""


class InvalidInputError(EvoHullError):
    """Mismatched or malformed operation inputs."""


class InvalidConfigError(EvoHullError):
    """Run configuration is incomplete or inconsistent."""


# --- simplicial ---

class DegenerateInputError(EvoHullError):
    """Point set is affinely dependent where full dimension is required."""


class NotInGeneralPositionError(EvoHullError):
    """Combined vertex set is affinely dependent."""


class InvalidApexError(EvoHullError):
    """Subdivision apex is not in the relative interior of the target simplex."""


class UnboundedFeasibleSetError(EvoHullError):
    """Half-space intersection is not compact."""


# --- mesh ---

class NonManifoldError(EvoHullError):
    """Triangle soup is not a closed, consistently oriented 2-manifold."""


class DegenerateTriangleError(EvoHullError):
    """A triangle has (numerically) zero area."""


class IllegalSwapError(EvoHullError):
    """Requested edge swap would break a mesh invariant."""


# --- problems ---

class InvalidProblemError(EvoHullError):
    """Problem instance violates its own preconditions (e.g. empty feasible set)."""


class InstanceRejectedError(EvoHullError):
    """Instance fails the structural requirements of an experiment command."""
