"""Double-annotation sessions with adjudication, stats, and export."""

from secrev.annotation.models import (
    SESSION_KINDS,
    SUITABILITY_CRITERIA,
    AnnotationItem,
    AnnotationSession,
    Label,
    validate_label,
)
from secrev.annotation.server import create_app, serve
from secrev.annotation.service import AnnotationService

__all__ = [
    "SESSION_KINDS",
    "SUITABILITY_CRITERIA",
    "AnnotationItem",
    "AnnotationSession",
    "Label",
    "validate_label",
    "create_app",
    "serve",
    "AnnotationService",
]
