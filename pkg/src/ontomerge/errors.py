"""Exception types shared across the package."""


class MergeToolError(Exception):
    """Base class for all errors raised by this package."""


class OntoParseError(MergeToolError):
    """Syntax or reference error in an .onto or .map input file."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class UnknownEntityError(MergeToolError):
    """An entity id was referenced that is not part of the signature."""


class DuplicateDeclarationError(MergeToolError):
    """The same name or entity was declared more than once."""


class KindMismatchError(MergeToolError):
    """Entities of incompatible kinds were combined (e.g. class vs. property)."""


class SetNotIntegratedError(MergeToolError):
    """A correspondence set was used before its members were integrated."""


class RefinementDidNotConverge(MergeToolError):
    """The refinement fixpoint loop exceeded its pass budget."""

    def __init__(self, rules: tuple[str, ...], passes: int):
        self.rules = rules
        self.passes = passes
        super().__init__(
            f"refinement did not converge after {passes} passes; "
            f"still-active rules: {', '.join(rules) or 'none'}"
        )
