class LadcfError(Exception):
    pass


class InvalidInputError(LadcfError, ValueError):
    pass


class ShapeError(LadcfError, ValueError):
    pass


class ConjugateSymmetryError(LadcfError, ArithmeticError):
    pass


class NumericalFailure(LadcfError, ArithmeticError):
    """Raised when an ADMM iterate stops being finite."""

    def __init__(self, message, iteration=None, frame=None):
        super().__init__(message)
        self.iteration = iteration
        self.frame = frame

    def __str__(self):
        msg = super().__str__()
        if self.iteration is not None:
            msg += f" (iteration {self.iteration})"
        if self.frame is not None:
            msg += f" (frame {self.frame})"
        return msg


class LoadError(LadcfError, IOError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
