class InputError(ValueError):
    """Invalid input data or parameters.

    Carries optional file/line context so that command-line runs can point at
    the offending record.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
