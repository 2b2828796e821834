"""Exception hierarchy.

Every domain error carries a machine-readable ``code`` so the command line
front end can report it as ``{"error": {"code": ..., "detail": ...}}``.
"""


class NormLabError(Exception):
    code = "NORMLAB_ERROR"

    def __init__(self, detail="", **context):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self):
        payload = {"code": self.code, "detail": self.detail}
        if self.context:
            payload["context"] = self.context
        return payload


class LabelNotFound(NormLabError):
    code = "LABEL_NOT_FOUND"


class DimMismatch(NormLabError):
    code = "DIM_MISMATCH"


class FieldMismatch(NormLabError):
    code = "FIELD_MISMATCH"


class InvalidNorm(NormLabError):
    code = "INVALID_NORM"


class ZeroVector(NormLabError):
    code = "ZERO_VECTOR"


class Unsupported(NormLabError):
    code = "UNSUPPORTED"


class NumericalFailure(NormLabError):
    code = "NUMERICAL_FAILURE"


class InvalidSample(NormLabError):
    code = "INVALID_SAMPLE"


class NotNewDirection(NormLabError):
    code = "NOT_NEW_DIRECTION"


class InvalidBound(NormLabError):
    code = "INVALID_BOUND"


class AtomOffSphere(NormLabError):
    code = "ATOM_OFF_SPHERE"


class UndefinedAtPoint(NormLabError):
    code = "UNDEFINED_AT_POINT"


class SpecMismatch(NormLabError):
    code = "SPEC_MISMATCH"


class TooLarge(NormLabError):
    code = "TOO_LARGE"


class GeneratorExhausted(NormLabError):
    code = "GENERATOR_EXHAUSTED"


class MalformedInput(NormLabError):
    code = "MALFORMED_INPUT"
