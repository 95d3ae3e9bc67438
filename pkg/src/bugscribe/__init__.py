"""Guided bug reporting over app execution models."""

from bugscribe.errors import (
    BugscribeError,
    BusyError,
    EmptyInputError,
    FixtureSpecError,
    InvalidOptionError,
    ModelIntegrityError,
    NotFoundError,
    ProtocolError,
    StalePredictionError,
    TraceParseError,
    TraceValidationError,
)
from bugscribe.model import (
    ActionType,
    AppExecutionModel,
    ComponentKind,
    GuiComponent,
    Interaction,
    ModelBuilder,
    Screen,
    SwipeDirection,
    fingerprint_screen,
)
from bugscribe.model_io import load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "ActionType",
    "AppExecutionModel",
    "BugscribeError",
    "BusyError",
    "ComponentKind",
    "EmptyInputError",
    "FixtureSpecError",
    "GuiComponent",
    "Interaction",
    "InvalidOptionError",
    "ModelBuilder",
    "ModelIntegrityError",
    "NotFoundError",
    "ProtocolError",
    "Screen",
    "StalePredictionError",
    "SwipeDirection",
    "TraceParseError",
    "TraceValidationError",
    "fingerprint_screen",
    "load_model",
    "save_model",
    "__version__",
]
