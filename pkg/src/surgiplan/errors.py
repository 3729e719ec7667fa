"""Engine error types.

Every failure mode crossing a module boundary gets a named exception class.
The class name is the stable, greppable error identifier used by the CLI
diagnostics and the HTTP error bodies.
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


# --- volume I/O ---

class BadMagic(EngineError):
    pass


class UnsupportedDimension(EngineError):
    pass


class UnsupportedType(EngineError):
    pass


class SizeMismatch(EngineError):
    pass


class MissingField(EngineError):
    pass


class NonFiniteVoxel(EngineError):
    pass


class OutOfBounds(EngineError):
    pass


class BadRange(EngineError):
    pass


# --- rendering ---

class IndexOutOfRange(EngineError):
    pass


class DegenerateNormal(EngineError):
    pass


class BadStep(EngineError):
    pass


# --- meshes ---

class BadFaceIndex(EngineError):
    pass


class MalformedRecord(EngineError):
    pass


class EmptyMesh(EngineError):
    pass


# --- kinematics ---

class LengthMismatch(EngineError):
    pass


class NotConverged(EngineError):
    """Iterative solver hit its iteration cap. Carries the best solution found."""

    def __init__(self, message, best_q=None, pos_residual=None, rot_residual=None):
        super().__init__(message)
        self.best_q = best_q
        self.pos_residual = pos_residual
        self.rot_residual = rot_residual


class LimitViolation(EngineError):
    """A joint target falls outside its limits. Names the joint and the overshoot."""

    def __init__(self, message, joint=None, amount=None):
        super().__init__(message)
        self.joint = joint
        self.amount = amount


class DegenerateTarget(EngineError):
    pass


class BadLeverArm(EngineError):
    pass


class BadParameter(EngineError):
    pass


# --- planning / scene ---

class UnknownId(EngineError):
    pass


class InfeasiblePlan(EngineError):
    pass


class NoOpenStroke(EngineError):
    pass


class BadAngle(EngineError):
    pass


class UnsupportedVersion(EngineError):
    pass


class MalformedDocument(EngineError):
    pass


class UnresolvableReference(EngineError):
    pass
