"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameter or run-configuration value.

    Carries an optional dotted field path (e.g. ``kernel.d1``) so the CLI
    can point at the offending entry.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class BlowUpError(RuntimeError):
    """Solution amplitude exceeded the blow-up guard; run aborted."""

    def __init__(self, message, t=None, step=None, max_value=None):
        super().__init__(message)
        self.t = t
        self.step = step
        self.max_value = max_value
