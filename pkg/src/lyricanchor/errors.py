"""Exception types shared across the package.

Errors fall in two families that the CLI maps to distinct exit codes:
``InputError`` subclasses (bad files, bad flags, violated preconditions)
and ``NoPath`` (the decoder could not reach a final state).
"""


class LyricAnchorError(Exception):
    pass


class InputError(LyricAnchorError):
    """Invalid input data or arguments."""


class MalformedWav(InputError):
    pass


class UnsupportedFormat(InputError):
    pass


class EmptyAudio(InputError):
    pass


class UnsortedInput(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyLyrics(InputError):
    pass


class UnknownWord(InputError):
    pass


class MissingPronunciation(InputError):
    pass


class InvalidPosteriorgram(InputError):
    pass


class NoAnchors(LyricAnchorError):
    pass


class IndexMismatch(InputError):
    pass


class EmptyReference(InputError):
    pass


class ConfigError(InputError):
    pass


class NoPath(LyricAnchorError):
    """Even the retry beam left no token in a final state."""

    def __init__(self, message, context=None):
        self.context = context
        if context:
            message = f"{message} ({context})"
        super().__init__(message)
