"""The dialogue manager: a deterministic state machine over report phases.

Sessions walk APP_SELECTION -> OB -> EB -> S2R -> REPORT_READY. Every user
event (text, confirmation, selection, quick action, step edit) maps to
exactly one outcome per phase. Unmatched descriptions get three attempts,
after which the last text is recorded unverified and the dialogue moves on.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Protocol, Sequence

from bugscribe.errors import InvalidOptionError, NotFoundError, ProtocolError
from bugscribe.matching import (
    DEFAULT_THRESHOLD,
    EdgeCandidate,
    EdgeMatchResult,
    MatchVerdict,
    ScreenMatchResult,
    match_eb_against_ob,
    match_screen,
    match_step,
)
from bugscribe.model import AppExecutionModel, Interaction, START_NODE, Screen
from bugscribe.nlp.lexicons import Lexicons, load_lexicons
from bugscribe.nlp.parsing import ParsedPhrase, parse_message
from bugscribe.predictor import (
    PathPrediction,
    StepSuggestion,
    caption_edge,
    predict_path,
)

MAX_ATTEMPTS = 3
PAGE_SIZE = 5


class Phase(str, Enum):
    APP_SELECTION = "APP_SELECTION"
    OB_DESCRIBE = "OB_DESCRIBE"
    OB_CONFIRM = "OB_CONFIRM"
    OB_SELECT = "OB_SELECT"
    EB_DESCRIBE = "EB_DESCRIBE"
    EB_CONFIRM = "EB_CONFIRM"
    S2R_DESCRIBE = "S2R_DESCRIBE"
    S2R_CONFIRM = "S2R_CONFIRM"
    S2R_SELECT = "S2R_SELECT"
    S2R_PREDICT_OFFER = "S2R_PREDICT_OFFER"
    LAST_STEP_CONFIRM = "LAST_STEP_CONFIRM"
    REPORT_READY = "REPORT_READY"


_DESCRIBE_FOR = {
    Phase.OB_CONFIRM: Phase.OB_DESCRIBE,
    Phase.OB_SELECT: Phase.OB_DESCRIBE,
    Phase.EB_CONFIRM: Phase.EB_DESCRIBE,
    Phase.S2R_CONFIRM: Phase.S2R_DESCRIBE,
    Phase.S2R_SELECT: Phase.S2R_DESCRIBE,
    Phase.S2R_PREDICT_OFFER: Phase.S2R_DESCRIBE,
    Phase.LAST_STEP_CONFIRM: Phase.S2R_DESCRIBE,
}


@lru_cache(maxsize=1)
def load_tips() -> dict[str, tuple[str, ...]]:
    tips: dict[str, list[str]] = {}
    raw = resources.files("bugscribe").joinpath("data/tips.txt").read_text("utf-8")
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        phase, _, text = line.partition("|")
        tips.setdefault(phase.strip(), []).append(text.strip())
    return {phase: tuple(items) for phase, items in tips.items()}


def tips_for(phase: Phase) -> tuple[str, ...]:
    return load_tips().get(phase.value, ())


@dataclass
class StepRecord:
    index: int
    text: str
    edge: Interaction | None = None
    screenshot: str | None = None
    inferred: bool = False
    source: str = "typed"  # typed | suggested | edited
    stale: bool = False

    @property
    def matched(self) -> bool:
        return self.edge is not None

    def view(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "text": self.text,
            "matched": self.matched,
            "inferred": self.inferred,
            "source": self.source,
            "stale": self.stale,
            "screenshot": self.screenshot,
        }


@dataclass
class Element:
    """One collected bug element (OB or EB)."""

    text: str = ""
    phrase: ParsedPhrase | None = None
    fingerprint: str | None = None
    matched: bool = False
    recorded: bool = False


@dataclass(frozen=True)
class Card:
    id: str
    caption: str
    image_url: str | None = None
    highlight_bounds: tuple[int, int, int, int] | None = None

    def view(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "caption": self.caption,
            "image_url": self.image_url,
            "highlight_bounds": list(self.highlight_bounds) if self.highlight_bounds else None,
        }


@dataclass(frozen=True)
class DialogueResponse:
    session_id: str
    phase: Phase
    messages: tuple[str, ...]
    suggestion_cards: tuple[Card, ...]
    reported_steps: tuple[dict[str, Any], ...]
    capture_panel: tuple[str, ...]
    tips: tuple[str, ...]
    can_finish: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "phase": self.phase.value,
            "messages": list(self.messages),
            "suggestion_cards": [c.view() for c in self.suggestion_cards],
            "reported_steps": list(self.reported_steps),
            "capture_panel": list(self.capture_panel),
            "tips": list(self.tips),
            "can_finish": self.can_finish,
        }


@dataclass
class DialogueSession:
    session_id: str
    app_id: str | None = None
    model: AppExecutionModel | None = None
    phase: Phase = Phase.APP_SELECTION
    attempts: int = 0
    ob: Element = field(default_factory=Element)
    eb: Element = field(default_factory=Element)
    steps: list[StepRecord] = field(default_factory=list)
    current_state: str | None = None
    transcript: list[tuple[str, str]] = field(default_factory=list)
    last_text: str = ""
    last_phrase: ParsedPhrase | None = None
    pending_screens: ScreenMatchResult | None = None
    pending_edges: EdgeMatchResult | None = None
    pending_edge: EdgeCandidate | None = None
    prediction: PathPrediction | None = None
    page_offset: int = 0
    options: dict[str, Any] = field(default_factory=dict)
    _option_counter: int = 0

    def clear_pending(self) -> None:
        self.pending_screens = None
        self.pending_edges = None
        self.pending_edge = None
        self.prediction = None
        self.page_offset = 0
        self.options = {}

    def new_option_id(self) -> str:
        self._option_counter += 1
        return f"opt-{self._option_counter}"


class AppListing(Protocol):
    app_id: str
    name: str
    version: str


class ModelStore(Protocol):
    def get_model(self, app_id: str) -> AppExecutionModel: ...

    def list_apps(self) -> Sequence[AppListing]: ...


class DialogueEngine:
    """All dialogue transitions; pure in-memory, one call at a time per session."""

    def __init__(
        self,
        store: ModelStore,
        threshold_screen: Fraction = DEFAULT_THRESHOLD,
        threshold_edge: Fraction = DEFAULT_THRESHOLD,
        lexicons: Lexicons | None = None,
    ) -> None:
        self.store = store
        self.threshold_screen = threshold_screen
        self.threshold_edge = threshold_edge
        self.lexicons = lexicons or load_lexicons()

    # -- session lifecycle -------------------------------------------------

    def start_session(
        self, app_id: str | None = None, session_id: str | None = None
    ) -> tuple[DialogueSession, DialogueResponse]:
        session = DialogueSession(session_id=session_id or uuid.uuid4().hex)
        if app_id is None:
            response = self._respond(
                session,
                ["Hi! Which app would you like to report a bug in?"],
                cards=self._app_cards(session),
            )
            return session, response
        messages = self._bind_app(session, app_id)
        return session, self._respond(session, messages)

    def _bind_app(self, session: DialogueSession, app_id: str) -> list[str]:
        model = self.store.get_model(app_id)
        session.app_id = app_id
        session.model = model
        self._reset_reporting_state(session)
        return [
            f"Let's report a bug in {model.app_name} {model.app_version}.",
            "First, describe the problem you observed.",
        ]

    def _reset_reporting_state(self, session: DialogueSession) -> None:
        model = session.model
        assert model is not None
        session.phase = Phase.OB_DESCRIBE
        session.attempts = 0
        session.ob = Element()
        session.eb = Element()
        session.last_text = ""
        session.last_phrase = None
        session.clear_pending()
        launch_edges = model.outgoing_edges(START_NODE)
        targets = {e.target for e in launch_edges}
        if len(targets) == 1:
            edge = launch_edges[0]
            session.current_state = edge.target
            session.steps = [
                StepRecord(
                    index=1,
                    text="Open the app",
                    edge=edge,
                    screenshot=self._step_screenshot(model, edge),
                    source="suggested",
                )
            ]
        else:
            session.current_state = None
            session.steps = [StepRecord(index=1, text="Open the app", source="suggested")]

    # -- event handlers ----------------------------------------------------

    def handle_text(self, session: DialogueSession, text: str) -> DialogueResponse:
        session.transcript.append(("user", text))
        if session.phase is Phase.REPORT_READY:
            return self._respond(
                session, ["This report is complete. Use restart to file another bug."]
            )
        if session.phase is Phase.APP_SELECTION:
            return self._respond(
                session,
                ["Please pick one of the listed apps."],
                cards=self._app_cards(session),
            )
        if not text.strip():
            return self._respond(session, [self._describe_prompt(session)])
        if session.phase in _DESCRIBE_FOR:
            # free text over pending cards means "let me rephrase"
            session.clear_pending()
            session.phase = _DESCRIBE_FOR[session.phase]

        phrases = parse_message(text, self.lexicons)
        phrase = phrases[0] if phrases else None
        if phrase is None:
            return self._respond(session, [self._describe_prompt(session)])
        session.last_text = text.strip()
        session.last_phrase = phrase

        if session.phase is Phase.OB_DESCRIBE:
            return self._handle_ob_text(session, phrase)
        if session.phase is Phase.EB_DESCRIBE:
            return self._handle_eb_text(session, phrase)
        return self._handle_s2r_text(session, phrase)

    def _handle_ob_text(self, session: DialogueSession, phrase: ParsedPhrase) -> DialogueResponse:
        model = session.model
        assert model is not None
        result = match_screen(model, phrase, self.threshold_screen, self.lexicons)
        if result.verdict is MatchVerdict.SINGLE:
            session.pending_screens = result
            session.phase = Phase.OB_CONFIRM
            card = self._screen_card(session, result.candidates[0].fingerprint)
            session.options = {card.id: result.candidates[0].fingerprint}
            return self._respond(
                session,
                ["I found a matching screen. Is this where the problem appears?"],
                cards=[card],
            )
        if result.verdict is MatchVerdict.MULTIPLE:
            session.pending_screens = result
            session.page_offset = 0
            session.phase = Phase.OB_SELECT
            return self._show_screen_page(
                session, ["I found several possible screens. Select the one showing the problem, or none of them."]
            )
        return self._strike_ob(session)

    def _strike_ob(self, session: DialogueSession) -> DialogueResponse:
        session.clear_pending()
        session.attempts += 1
        if session.attempts < MAX_ATTEMPTS:
            session.phase = Phase.OB_DESCRIBE
            return self._respond(
                session,
                ["I couldn't match that to any app screen. Could you rephrase with more detail?"],
            )
        self._record_ob(session, fingerprint=None)
        return self._respond(
            session,
            [
                "I'll record your description as written.",
                "What should the app have done instead?",
            ],
        )

    def _record_ob(self, session: DialogueSession, fingerprint: str | None) -> None:
        session.ob = Element(
            text=session.last_text,
            phrase=session.last_phrase,
            fingerprint=fingerprint,
            matched=fingerprint is not None,
            recorded=True,
        )
        session.attempts = 0
        session.clear_pending()
        session.phase = Phase.EB_DESCRIBE

    def _handle_eb_text(self, session: DialogueSession, phrase: ParsedPhrase) -> DialogueResponse:
        model = session.model
        assert model is not None
        if session.ob.fingerprint is not None:
            if match_eb_against_ob(
                model, phrase, session.ob.fingerprint, self.threshold_screen, self.lexicons
            ):
                self._record_eb(session, matched=True)
                return self._respond(session, self._s2r_intro_messages())
            session.phase = Phase.EB_CONFIRM
            return self._respond(
                session,
                [
                    "That doesn't mention anything from the problem screen. Keep it as your expected behavior anyway?"
                ],
            )
        # no verified OB screen: record as-is, unverified
        self._record_eb(session, matched=False)
        return self._respond(session, self._s2r_intro_messages())

    def _record_eb(self, session: DialogueSession, matched: bool) -> None:
        session.eb = Element(
            text=session.last_text,
            phrase=session.last_phrase,
            matched=matched,
            recorded=True,
        )
        session.attempts = 0
        session.clear_pending()
        session.phase = Phase.S2R_DESCRIBE

    def _s2r_intro_messages(self) -> list[str]:
        return [
            "Got it. Now let's walk through the steps to reproduce.",
            "Step 1 is opening the app. What did you do next?",
        ]

    def _handle_s2r_text(self, session: DialogueSession, phrase: ParsedPhrase) -> DialogueResponse:
        model = session.model
        assert model is not None
        result = match_step(
            model, phrase, session.current_state, self.threshold_edge, self.lexicons
        )
        if result.verdict is MatchVerdict.SINGLE:
            candidate = result.candidates[0]
            session.pending_edge = candidate
            session.phase = Phase.S2R_CONFIRM
            card = self._edge_card(session, candidate)
            session.options = {card.id: candidate}
            return self._respond(
                session, ["Is this the step you performed?"], cards=[card]
            )
        if result.verdict is MatchVerdict.MULTIPLE:
            session.pending_edges = result
            session.page_offset = 0
            session.phase = Phase.S2R_SELECT
            return self._show_edge_page(
                session, ["I found a few possible steps. Select the one you performed, or none of them."]
            )
        return self._strike_step(session)

    def _strike_step(self, session: DialogueSession) -> DialogueResponse:
        session.clear_pending()
        session.attempts += 1
        session.phase = Phase.S2R_DESCRIBE
        if session.attempts < MAX_ATTEMPTS:
            return self._respond(
                session,
                ["I couldn't match that step. Could you describe it differently, naming the control you used?"],
            )
        self._append_step(session, text=session.last_text, edge=None, source="typed")
        session.attempts = 0
        return self._respond(
            session,
            ["Recorded the step as written.", "What did you do next?"],
        )

    def handle_confirmation(self, session: DialogueSession, value: bool) -> DialogueResponse:
        session.transcript.append(("user", "yes" if value else "no"))
        phase = session.phase
        if phase is Phase.OB_CONFIRM:
            return self._confirm_ob(session, value)
        if phase is Phase.EB_CONFIRM:
            return self._confirm_eb(session, value)
        if phase is Phase.S2R_CONFIRM:
            return self._confirm_step(session, value)
        if phase is Phase.LAST_STEP_CONFIRM:
            return self._confirm_last_step(session, value)
        if phase is Phase.S2R_PREDICT_OFFER:
            return self._confirm_more_suggestions(session, value)
        raise ProtocolError(f"confirmation is not expected in phase {phase.value}")

    def _confirm_ob(self, session: DialogueSession, value: bool) -> DialogueResponse:
        assert session.pending_screens is not None
        if value:
            fingerprint = session.pending_screens.candidates[0].fingerprint
            self._record_ob(session, fingerprint)
            return self._respond(
                session,
                ["Thanks, noted.", "What should the app have done instead?"],
            )
        return self._reject_ob(session)

    def _reject_ob(self, session: DialogueSession) -> DialogueResponse:
        session.clear_pending()
        session.attempts += 1
        if session.attempts < MAX_ATTEMPTS:
            session.phase = Phase.OB_DESCRIBE
            return self._respond(
                session, ["Sorry about that. Could you describe the problem differently?"]
            )
        self._record_ob(session, fingerprint=None)
        return self._respond(
            session,
            [
                "I'll record your description as written.",
                "What should the app have done instead?",
            ],
        )

    def _confirm_eb(self, session: DialogueSession, value: bool) -> DialogueResponse:
        if value:
            self._record_eb(session, matched=False)
            return self._respond(session, self._s2r_intro_messages())
        session.clear_pending()
        session.attempts += 1
        if session.attempts < MAX_ATTEMPTS:
            session.phase = Phase.EB_DESCRIBE
            return self._respond(
                session, ["Okay. What should the app have done instead?"]
            )
        self._record_eb(session, matched=False)
        return self._respond(
            session,
            ["I'll keep your last description."] + self._s2r_intro_messages(),
        )

    def _confirm_step(self, session: DialogueSession, value: bool) -> DialogueResponse:
        candidate = session.pending_edge
        assert candidate is not None
        if not value:
            return self._reject_step(session)
        session.clear_pending()
        self._apply_candidate(session, candidate, text=session.last_text, source="typed")
        session.attempts = 0
        return self._after_state_advance(session)

    def _reject_step(self, session: DialogueSession) -> DialogueResponse:
        session.clear_pending()
        session.attempts += 1
        session.phase = Phase.S2R_DESCRIBE
        if session.attempts < MAX_ATTEMPTS:
            return self._respond(
                session, ["Okay. Could you describe that step differently?"]
            )
        self._append_step(session, text=session.last_text, edge=None, source="typed")
        session.attempts = 0
        return self._respond(
            session, ["Recorded the step as written.", "What did you do next?"]
        )

    def _confirm_last_step(self, session: DialogueSession, value: bool) -> DialogueResponse:
        session.clear_pending()
        if value:
            session.phase = Phase.REPORT_READY
            return self._respond(session, self._report_ready_messages(session))
        session.phase = Phase.S2R_DESCRIBE
        return self._respond(session, ["Okay. What did you do next?"])

    def _confirm_more_suggestions(self, session: DialogueSession, value: bool) -> DialogueResponse:
        prediction = session.prediction
        assert prediction is not None
        if value:
            session.page_offset += PAGE_SIZE
            batch = prediction.batch(session.page_offset)
            if batch:
                return self._show_prediction_batch(
                    session, ["Here are more suggested steps. Select any you performed."]
                )
        session.clear_pending()
        session.phase = Phase.S2R_DESCRIBE
        return self._respond(session, ["Okay. What did you do next?"])

    def handle_selection(self, session: DialogueSession, option_ids: list[str]) -> DialogueResponse:
        session.transcript.append(
            ("user", "selected: " + (", ".join(option_ids) if option_ids else "none"))
        )
        unknown = [oid for oid in option_ids if oid not in session.options]
        if unknown:
            raise InvalidOptionError(f"unknown option ids: {', '.join(unknown)}")
        if len(set(option_ids)) != len(option_ids):
            raise InvalidOptionError("duplicate option ids in selection")
        phase = session.phase
        if phase is Phase.APP_SELECTION:
            return self._select_app(session, option_ids)
        if phase is Phase.OB_SELECT:
            return self._select_ob(session, option_ids)
        if phase is Phase.S2R_SELECT:
            return self._select_step(session, option_ids)
        if phase is Phase.S2R_PREDICT_OFFER:
            return self._select_suggestions(session, option_ids)
        raise ProtocolError(f"selection is not expected in phase {phase.value}")

    def _select_app(self, session: DialogueSession, option_ids: list[str]) -> DialogueResponse:
        if len(option_ids) != 1:
            raise ProtocolError("select exactly one app")
        app_id = session.options[option_ids[0]]
        messages = self._bind_app(session, app_id)
        return self._respond(session, messages)

    def _select_ob(self, session: DialogueSession, option_ids: list[str]) -> DialogueResponse:
        if len(option_ids) > 1:
            raise ProtocolError("select at most one screen")
        if option_ids:
            fingerprint = session.options[option_ids[0]]
            self._record_ob(session, fingerprint)
            return self._respond(
                session,
                ["Thanks, noted.", "What should the app have done instead?"],
            )
        assert session.pending_screens is not None
        session.page_offset += PAGE_SIZE
        if session.page_offset < len(session.pending_screens.candidates):
            return self._show_screen_page(
                session, ["Here are more possible screens. Select one, or none of them."]
            )
        return self._strike_ob(session)

    def _select_step(self, session: DialogueSession, option_ids: list[str]) -> DialogueResponse:
        if len(option_ids) > 1:
            raise ProtocolError("select at most one step")
        if option_ids:
            candidate = session.options[option_ids[0]]
            session.clear_pending()
            self._apply_candidate(session, candidate, text=session.last_text, source="typed")
            session.attempts = 0
            return self._after_state_advance(session)
        assert session.pending_edges is not None
        session.page_offset += PAGE_SIZE
        if session.page_offset < len(session.pending_edges.candidates):
            return self._show_edge_page(
                session, ["Here are more possible steps. Select one, or none of them."]
            )
        return self._strike_step(session)

    def _select_suggestions(self, session: DialogueSession, option_ids: list[str]) -> DialogueResponse:
        prediction = session.prediction
        assert prediction is not None
        if not option_ids:
            if prediction.has_more(session.page_offset + PAGE_SIZE):
                return self._respond(
                    session, ["Do you want additional suggestions? (yes/no)"]
                )
            session.clear_pending()
            session.phase = Phase.S2R_DESCRIBE
            return self._respond(session, ["Okay. What did you do next?"])

        selected: list[StepSuggestion] = sorted(
            (session.options[oid] for oid in option_ids), key=lambda s: s.rank
        )
        # suggestions sit on one linear path; unselected gaps become inferred steps
        position = session.page_offset
        for suggestion in selected:
            target_index = session.page_offset + suggestion.rank - 1
            for j in range(position, target_index):
                gap = prediction.path[j]
                self._append_step(
                    session,
                    text=self._caption(gap),
                    edge=gap,
                    source="suggested",
                    inferred=True,
                )
            self._append_step(
                session, text=suggestion.caption, edge=suggestion.edge, source="suggested"
            )
            position = target_index + 1
        session.clear_pending()
        return self._after_state_advance(session)

    def handle_quick_action(self, session: DialogueSession, action: str) -> DialogueResponse:
        session.transcript.append(("user", f"[{action}]"))
        if action == "restart":
            if session.model is None:
                return self._respond(
                    session,
                    ["Pick one of the listed apps to begin."],
                    cards=self._app_cards(session),
                )
            self._reset_reporting_state(session)
            return self._respond(
                session,
                [
                    "Session restarted.",
                    f"Let's report a bug in {session.model.app_name} {session.model.app_version}.",
                    "First, describe the problem you observed.",
                ],
            )
        if session.phase is Phase.APP_SELECTION:
            raise ProtocolError(f"{action} requires an app to be selected first")
        if action == "finish":
            session.clear_pending()
            session.phase = Phase.REPORT_READY
            return self._respond(session, self._report_ready_messages(session))
        if action == "preview":
            from bugscribe.report import generate_report, render

            draft = render(generate_report(session), "markdown").decode("utf-8")
            return self._respond(session, [draft])
        raise ProtocolError(f"unknown quick action {action!r}")

    def edit_step(self, session: DialogueSession, index: int, new_text: str) -> DialogueResponse:
        session.transcript.append(("user", f"[edit step {index}] {new_text}"))
        model = session.model
        if model is None:
            raise ProtocolError("no app selected")
        record = next((s for s in session.steps if s.index == index), None)
        if record is None:
            raise NotFoundError(f"no step {index}")
        if index == 1:
            raise ProtocolError("the seeded launch step cannot be edited")
        if not new_text.strip():
            return self._respond(session, ["The step text cannot be empty."])

        previous = session.steps[index - 2]
        prior_state = previous.edge.target if previous.edge is not None else None
        phrases = parse_message(new_text, self.lexicons)
        result = (
            match_step(model, phrases[0], prior_state, self.threshold_edge, self.lexicons)
            if phrases
            else None
        )
        position = session.steps.index(record)
        if result is not None and result.verdict is MatchVerdict.SINGLE:
            candidate = result.candidates[0]
            session.steps[position] = StepRecord(
                index=index,
                text=new_text.strip(),
                edge=candidate.edge,
                screenshot=self._step_screenshot(model, candidate.edge),
                source="edited",
            )
            message = f"Step {index} updated."
        else:
            session.steps[position] = StepRecord(
                index=index, text=new_text.strip(), source="edited"
            )
            message = f"Step {index} recorded as written (no matching action found)."
        self._recompute_stale(session)
        final = session.steps[-1]
        if final.index == index and final.edge is not None:
            session.current_state = final.edge.target
            session.clear_pending()
        return self._respond(session, [message])

    # -- shared transition helpers ------------------------------------------

    def _apply_candidate(
        self, session: DialogueSession, candidate: EdgeCandidate, text: str, source: str
    ) -> None:
        if candidate.inferred_prefix is not None:
            prefix = candidate.inferred_prefix
            self._append_step(
                session,
                text=self._caption(prefix),
                edge=prefix,
                source="suggested",
                inferred=True,
            )
        self._append_step(session, text=text, edge=candidate.edge, source=source)

    def _append_step(
        self,
        session: DialogueSession,
        text: str,
        edge: Interaction | None,
        source: str,
        inferred: bool = False,
    ) -> None:
        model = session.model
        assert model is not None
        session.steps.append(
            StepRecord(
                index=len(session.steps) + 1,
                text=text,
                edge=edge,
                screenshot=self._step_screenshot(model, edge) if edge else None,
                inferred=inferred,
                source=source,
            )
        )
        if edge is not None:
            session.current_state = edge.target

    def _after_state_advance(self, session: DialogueSession) -> DialogueResponse:
        model = session.model
        assert model is not None
        ob = session.ob.fingerprint
        if ob is not None and session.current_state == ob:
            session.phase = Phase.LAST_STEP_CONFIRM
            return self._respond(
                session,
                ["You've reached the problem screen. Was that the last step before the problem appeared?"],
            )
        if ob is not None and session.current_state is not None:
            prediction = predict_path(model, session.current_state, ob)
            if prediction is not None and prediction.path:
                session.prediction = prediction
                session.page_offset = 0
                session.phase = Phase.S2R_PREDICT_OFFER
                return self._show_prediction_batch(
                    session,
                    ["Did you perform any of these next? Select all that apply, or none."],
                )
        session.phase = Phase.S2R_DESCRIBE
        return self._respond(session, ["Noted. What did you do next?"])

    def _recompute_stale(self, session: DialogueSession) -> None:
        running: str | None = None
        for step in session.steps:
            if step.edge is None:
                step.stale = False
                running = None
                continue
            stale = running is not None and step.edge.source != running
            step.stale = stale
            running = step.edge.target

    # -- card/page rendering -------------------------------------------------

    def _caption(self, edge: Interaction) -> str:
        return caption_edge(edge)

    def _capture_url(self, session: DialogueSession, fingerprint: str) -> str | None:
        model = session.model
        assert model is not None
        if fingerprint == START_NODE:
            return None
        screen = model.nodes.get(fingerprint)
        if screen is None or screen.screenshot is None:
            return None
        return f"/apps/{session.app_id}/screens/{fingerprint}/capture"

    def _step_screenshot(self, model: AppExecutionModel, edge: Interaction) -> str | None:
        if edge.screenshot is not None:
            return edge.screenshot
        target = model.nodes.get(edge.target)
        return target.screenshot if target else None

    def _screen_caption(self, screen: Screen) -> str:
        texts = [c.text for c in screen.components if c.text][:2]
        suffix = ": " + ", ".join(texts) if texts else ""
        return f"{screen.activity}{suffix}"

    def _screen_card(self, session: DialogueSession, fingerprint: str) -> Card:
        model = session.model
        assert model is not None
        screen = model.nodes[fingerprint]
        return Card(
            id=session.new_option_id(),
            caption=self._screen_caption(screen),
            image_url=self._capture_url(session, fingerprint),
        )

    def _edge_card(self, session: DialogueSession, candidate: EdgeCandidate) -> Card:
        edge = candidate.edge
        caption = self._caption(edge)
        if candidate.inferred_prefix is not None:
            caption = f"{self._caption(candidate.inferred_prefix)}, then {caption}"
        return Card(
            id=session.new_option_id(),
            caption=caption,
            image_url=self._capture_url(session, edge.source),
            highlight_bounds=edge.highlight_bounds,
        )

    def _suggestion_card(self, session: DialogueSession, suggestion: StepSuggestion) -> Card:
        return Card(
            id=session.new_option_id(),
            caption=suggestion.caption,
            image_url=self._capture_url(session, suggestion.edge.source),
            highlight_bounds=suggestion.highlight_bounds,
        )

    def _app_cards(self, session: DialogueSession) -> list[Card]:
        cards = []
        session.options = {}
        for app in self.store.list_apps():
            card = Card(id=session.new_option_id(), caption=f"{app.name} {app.version}")
            session.options[card.id] = app.app_id
            cards.append(card)
        return cards

    def _show_screen_page(self, session: DialogueSession, messages: list[str]) -> DialogueResponse:
        assert session.pending_screens is not None
        page = session.pending_screens.candidates[
            session.page_offset : session.page_offset + PAGE_SIZE
        ]
        session.options = {}
        cards = []
        for candidate in page:
            card = self._screen_card(session, candidate.fingerprint)
            session.options[card.id] = candidate.fingerprint
            cards.append(card)
        remaining = len(session.pending_screens.candidates) - session.page_offset - len(page)
        if remaining > 0:
            messages = messages + [f"({remaining} more available if none of these fit.)"]
        return self._respond(session, messages, cards=cards)

    def _show_edge_page(self, session: DialogueSession, messages: list[str]) -> DialogueResponse:
        assert session.pending_edges is not None
        page = session.pending_edges.candidates[
            session.page_offset : session.page_offset + PAGE_SIZE
        ]
        session.options = {}
        cards = []
        for candidate in page:
            card = self._edge_card(session, candidate)
            session.options[card.id] = candidate
            cards.append(card)
        remaining = len(session.pending_edges.candidates) - session.page_offset - len(page)
        if remaining > 0:
            messages = messages + [f"({remaining} more available if none of these fit.)"]
        return self._respond(session, messages, cards=cards)

    def _show_prediction_batch(self, session: DialogueSession, messages: list[str]) -> DialogueResponse:
        assert session.prediction is not None
        batch = session.prediction.batch(session.page_offset)
        session.options = {}
        cards = []
        for suggestion in batch:
            card = self._suggestion_card(session, suggestion)
            session.options[card.id] = suggestion
            cards.append(card)
        return self._respond(session, messages, cards=cards)

    # -- response assembly ----------------------------------------------------

    def _describe_prompt(self, session: DialogueSession) -> str:
        effective = _DESCRIBE_FOR.get(session.phase, session.phase)
        if effective is Phase.EB_DESCRIBE:
            return "Please describe what the app should have done."
        if effective is Phase.S2R_DESCRIBE:
            return "Please describe the step you performed."
        return "Please describe the problem you observed."

    def _report_ready_messages(self, session: DialogueSession) -> list[str]:
        return [
            "Your bug report is ready.",
            f"View it at /sessions/{session.session_id}/report (or /report.md).",
        ]

    def _respond(
        self,
        session: DialogueSession,
        messages: list[str],
        cards: list[Card] | tuple[Card, ...] = (),
    ) -> DialogueResponse:
        for message in messages:
            session.transcript.append(("bot", message))
        screenshots = [s.screenshot for s in session.steps if s.screenshot]
        return DialogueResponse(
            session_id=session.session_id,
            phase=session.phase,
            messages=tuple(messages),
            suggestion_cards=tuple(cards),
            reported_steps=tuple(s.view() for s in session.steps),
            capture_panel=tuple(screenshots[-3:]),
            tips=tips_for(session.phase),
            can_finish=session.phase is not Phase.APP_SELECTION,
        )
