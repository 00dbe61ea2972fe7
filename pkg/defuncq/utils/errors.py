class DefuncqError(Exception):
    """Base class of every error raised by the compiler and the engines."""


class ParseError(DefuncqError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class ValidationError(DefuncqError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class RewriteError(DefuncqError):
    pass


class NotApplicable(DefuncqError):
    pass


class EvaluationError(DefuncqError):
    tag = "EvaluationError"

    def __init__(self, message=""):
        super().__init__(f"{self.tag}: {message}" if message else self.tag)


class UnknownLabel(EvaluationError):
    tag = "UnknownLabel"


class ArityMismatch(EvaluationError):
    tag = "ArityMismatch"


class UnboundVariable(EvaluationError):
    tag = "UnboundVariable"


class EngineTypeError(EvaluationError):
    tag = "TypeError"


class NotFirstOrder(EvaluationError):
    tag = "NotFirstOrder"


class UnknownFunction(EvaluationError):
    tag = "UnknownFunction"


class DivisionByZero(EvaluationError):
    tag = "DivisionByZero"


class IntegerOverflow(EvaluationError):
    tag = "IntegerOverflow"


class RecursionDepthExceeded(EvaluationError):
    tag = "RecursionDepth"
