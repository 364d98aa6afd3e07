class PDDLError(Exception):
    """Base class for PDDL reading errors."""


class PDDLSyntaxError(PDDLError):
    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class UnsupportedFeature(PDDLError):
    def __init__(self, feature: str, line: int):
        self.feature = feature
        self.line = line
        super().__init__(f"line {line}: unsupported feature {feature!r}")


class UnknownPredicate(PDDLError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        self.line = line
        super().__init__(f"unknown predicate {name!r}")


class UnknownType(PDDLError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        self.line = line
        super().__init__(f"unknown type {name!r}")


class UnknownAction(PDDLError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        self.line = line
        super().__init__(f"unknown action {name!r}")


class UnknownObject(PDDLError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        self.line = line
        super().__init__(f"undeclared object {name!r}")


class ArityMismatch(PDDLError):
    def __init__(self, name: str, got: int, want: int, line: int | None = None):
        self.name = name
        self.got = got
        self.want = want
        self.line = line
        super().__init__(f"{name!r} takes {want} argument(s), got {got}")


class DomainMismatch(PDDLError):
    def __init__(self, got: str, want: str):
        self.got = got
        self.want = want
        super().__init__(f"problem is for domain {got!r}, loaded domain is {want!r}")
