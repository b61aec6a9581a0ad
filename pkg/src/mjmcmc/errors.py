"""Exception types raised across the package."""


class MJError(Exception):
    """Base class for all package errors."""


class ScheduleExhaustedError(MJError, IndexError):
    pass


class ModelEvaluationError(MJError, ArithmeticError):
    """A posterior model returned a non-finite log ratio."""

    def __init__(self, index, value=None, iteration=None):
        self.index = index
        self.value = value
        self.iteration = iteration
        msg = f"non-finite log ratio {value!r} for element {index}"
        if iteration is not None:
            msg += f" at iteration {iteration}"
        super().__init__(msg)


class CapacityError(MJError, ValueError):
    pass


class NumericalError(MJError, ArithmeticError):
    pass


class IllConditionedMarginalError(MJError, ValueError):
    pass


class FitError(MJError, ArithmeticError):
    """Logistic regression failed to converge (usually separation)."""

    def __init__(self, node, message="logistic fit did not converge"):
        self.node = node
        super().__init__(f"{message} (node {node})")


class UndefinedRSquaredError(MJError, ZeroDivisionError):
    pass


class ConfigError(MJError, ValueError):
    pass


class DataFormatError(MJError, ValueError):
    def __init__(self, message, row=None, column=None, path=None):
        self.row = row
        self.column = column
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class GenerationError(MJError, RuntimeError):
    pass
