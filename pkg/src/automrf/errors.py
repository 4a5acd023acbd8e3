"""Exception types shared across the package."""


class AutomrfError(Exception):
    """Base class for all package-specific errors."""


class LatticeTooLargeError(AutomrfError):
    """Exact enumeration was requested for a configuration space over the guard size."""


class DivergenceDetected(AutomrfError):
    """Pseudolikelihood optimization walked off to infinity (monotone likelihood)."""


class EmptyCellsError(AutomrfError):
    """Grid aggregation found cells containing no observation points."""

    def __init__(self, empty_cells):
        self.empty_cells = list(empty_cells)
        preview = ", ".join(f"({r},{c})" for r, c in self.empty_cells[:10])
        more = "" if len(self.empty_cells) <= 10 else f" and {len(self.empty_cells) - 10} more"
        super().__init__(f"{len(self.empty_cells)} empty grid cell(s): {preview}{more}")


class UnmappedClassError(AutomrfError):
    """A raw class label had no entry in the recoding map."""

    def __init__(self, label, row):
        self.label = label
        self.row = row
        super().__init__(f"unmapped class label {label!r} (first occurrence at row {row})")


class ConfigError(AutomrfError):
    """A run configuration failed validation."""
