"""Exception vocabulary shared across the pipeline.

Every stage raises subclasses of SecrevError so the CLI can map error
classes onto distinct exit codes.
"""


class SecrevError(Exception):
    """Base class for all pipeline errors."""


# --- mining / host API ---

class AuthError(SecrevError):
    """Credentials missing or rejected by the hosting API."""


class RateLimited(SecrevError):
    """Request was rate limited; retry_after (seconds) when the host said so."""

    def __init__(self, message: str = "rate limited", retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class HostUnavailable(SecrevError):
    """Hosting API unreachable or persistently failing."""


class RepoGone(SecrevError):
    """Repository deleted or renamed upstream."""


class CommitNotFound(SecrevError):
    """Requested commit sha does not exist in the repository."""


class DiffTooLarge(SecrevError):
    """Commit diff exceeds the configured byte cap; caller should skip."""

    def __init__(self, message: str, size: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.size = size
        self.cap = cap


# --- diffkit ---

class MalformedDiff(SecrevError):
    """Unified diff is syntactically invalid; offset is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


# --- keywords ---

class DomainError(SecrevError):
    """Numeric argument outside its documented domain."""


class NoLabels(SecrevError):
    """Precision update attempted with zero adjudicated labels."""


class RoundOrderViolation(SecrevError):
    """Refinement rounds must run in order: round 2 only after round 1."""


# --- prompts ---

class MissingPlaceholderValue(SecrevError):
    """A template turn references a placeholder with no value supplied."""


class UnknownPlaceholder(SecrevError):
    """A template contains a placeholder outside the supported set."""


# --- llm gateway ---

class DuplicateProvider(SecrevError):
    """provider_id already registered."""


class ProviderError(SecrevError):
    """Provider returned a non-retryable failure; payload preserved."""

    def __init__(self, message: str, payload: object = None):
        super().__init__(message)
        self.payload = payload


class ProviderTimeout(SecrevError):
    """Provider did not answer within the configured timeout."""


Timeout = ProviderTimeout


class PromptTooLarge(SecrevError):
    """Rendered prompt exceeds the provider's configured size cap; callers
    must skip or shrink, never silently truncate."""


# --- metrics ---

class EmptyCandidate(SecrevError):
    """BLEU candidate token list is empty."""


class EmptyReference(SecrevError):
    """BLEU reference token list is empty."""


class LengthMismatch(SecrevError):
    """Paired rater label vectors differ in length."""


class SingleItemDegenerate(SecrevError):
    """Kappa undefined: expected agreement is 1 with observed < 1."""


class MissingLabels(SecrevError):
    """Evaluation report requested without the required manual labels."""


# --- orchestrator ---

class IncompleteLabels(SecrevError):
    """Winner selection requires an adjudicated label for every grid cell."""


# --- datasets ---

class SchemaError(SecrevError):
    """JSONL line failed schema validation; line is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class DuplicateSampleId(SecrevError):
    """Two dataset samples hashed to the same id on write."""


# --- annotation service ---

class EmptyItems(SecrevError):
    """Session creation requires at least one item."""


class DuplicateAnnotators(SecrevError):
    """The two primary annotators must be distinct."""


class NotYourSession(SecrevError):
    """Token does not grant access to this session or role."""


class AlreadyLabeled(SecrevError):
    """Annotator already submitted a label for this item."""


class UnknownItem(SecrevError):
    """item_id not part of the session."""


class NotDisagreed(SecrevError):
    """Adjudication is only valid for items whose two labels disagree."""


class ConflictOfInterest(SecrevError):
    """Adjudicator must be distinct from both primary annotators."""


class IncompleteSession(SecrevError):
    """Export of an unfinished session requires force=true."""


class InvalidLabel(SecrevError):
    """Label payload does not match the session kind's rubric."""


# --- pipeline / cli ---

class ConfigError(SecrevError):
    """Pipeline configuration failed validation."""


class MissingStageInput(SecrevError):
    """A stage's declared input artifact does not exist."""


class StageIntegrityError(SecrevError):
    """An input artifact's hash does not match its producing manifest."""


class OutputDirLocked(SecrevError):
    """Another pipeline command holds the output directory lock."""
