class FigureError(Exception):
    """Base class for every error this package raises on purpose."""


class InputError(FigureError):
    """Wrong number or type of input files for a figure kind."""


class MissingColumnError(FigureError):
    """An input file lacks a required column or key."""

    def __init__(self, path: str, names: list[str]) -> None:
        self.path = path
        self.names = names
        super().__init__(f"{path}: missing {', '.join(names)}")


class EmptyDataError(FigureError):
    """An input file parsed cleanly but holds no data rows."""

    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"{path}: no data rows")
