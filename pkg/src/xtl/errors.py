"""Exception hierarchy shared by every layer of the kernel."""


class XtlError(Exception):
    """Base class for all errors raised by this package."""


class XmlParseError(XtlError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnsupportedConstructError(XmlParseError):
    """Well-formed input that falls outside the supported XML subset."""


class SerializationError(XtlError):
    pass


class IllegalCombinationError(XtlError):
    """A Reg term that has no canonical form (misplaced AttrR and friends)."""


class UnknownMacroError(XtlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown macro {name!r}")


class XtlSyntaxError(XtlError):
    """Malformed use of the reserved ``xtl:`` vocabulary."""


class NotSerializableError(XtlError):
    pass


class QueryError(XtlError):
    pass


class RecursionLimitError(XtlError):
    pass


class UnsatisfiedQueryError(XtlError):
    def __init__(self, query, template_path):
        self.query = query
        self.template_path = template_path
        super().__init__(f"query {query!r} is unsatisfied at {template_path}")


class BoundError(XtlError, ValueError):
    pass
