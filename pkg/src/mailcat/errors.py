"""Exception hierarchy shared by all mailcat modules."""


class MailcatError(Exception):
    """Base class for every error raised by mailcat."""


class IoError(MailcatError):
    """A corpus source could not be read or an output path written."""


class MalformedMboxError(MailcatError):
    """Byte stream does not look like an mbox file."""


class MalformedMimeError(MailcatError):
    """A multipart message is missing its boundary parameter."""


class SchemaError(MailcatError):
    """A CSV source is missing the required text/label columns."""


class EmptyCorpusError(MailcatError):
    """Loading or filtering left zero documents."""


class EmptyVocabularyError(MailcatError):
    """No distinct tokens survived tokenization."""


class UnknownLabelError(MailcatError):
    """A document label is absent from the class name list."""


class ShapeError(MailcatError):
    """Two arrays that must agree in shape do not."""


class DomainError(MailcatError):
    """A numeric input is outside its legal domain (negative, non-finite, out of range)."""


class DivergenceError(MailcatError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class ModelFormatError(MailcatError):
    """A model file is corrupt, incomplete, or has an unknown format version."""


class DegenerateSplitError(MailcatError):
    """A train/test split would leave one side empty."""


class StratifyError(MailcatError):
    """Stratified splitting is impossible (a class has fewer than 2 members)."""


class DegenerateInputError(MailcatError):
    """An aggregate (e.g. accuracy) is undefined on empty input."""


class SyntheticSpecError(MailcatError):
    """A synthetic corpus specification violates its invariants."""


class ParseWarning(UserWarning):
    """Recoverable parsing degradation (truncated message, odd charset, ...)."""
