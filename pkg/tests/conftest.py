"""Shared fixtures and generators for the test suite.

random_spec builds app specs by simulating usage walks from START, so every
generated spec is realizable as LAUNCH-anchored traces by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import pytest

from bugscribe.errors import NotFoundError
from bugscribe.fixtures import (
    FixtureEdge,
    FixtureScreen,
    FixtureSpec,
    demo_spec,
    generate_fixture,
)
from bugscribe.model import (
    ActionType,
    AppExecutionModel,
    ComponentKind,
    GuiComponent,
    START_NODE,
    SwipeDirection,
)
from bugscribe.traces import build_model

WORDS = [
    "fuel", "economy", "history", "price", "amount", "total", "trip",
    "station", "mileage", "budget", "summary", "settings", "account",
    "profile", "export", "chart", "reminder", "vehicle", "service", "log",
]

COMPONENT_KINDS = [
    ComponentKind.BUTTON,
    ComponentKind.TEXT_FIELD,
    ComponentKind.TEXT_VIEW,
    ComponentKind.LIST_ITEM,
    ComponentKind.MENU_ITEM,
    ComponentKind.CHECKBOX,
    ComponentKind.IMAGE,
]

STEP_ACTIONS = [
    (ActionType.TAP, 10),
    (ActionType.TYPE, 3),
    (ActionType.LONG_TAP, 1),
    (ActionType.SWIPE, 2),
    (ActionType.BACK, 3),
    (ActionType.ROTATE, 1),
]


def build_demo_model() -> AppExecutionModel:
    return build_model(generate_fixture(demo_spec()), "demopad-1.0")


@pytest.fixture(scope="session")
def demo_model() -> AppExecutionModel:
    return build_demo_model()


def diamond_spec() -> FixtureSpec:
    """START -> a, then two routes to d: via b (weight 3) or via c (weight 1)."""
    screens = (
        FixtureScreen(
            key="a",
            activity="EntryActivity",
            components=(
                GuiComponent("b_left", ComponentKind.BUTTON, text="Left door"),
                GuiComponent("b_right", ComponentKind.BUTTON, text="Right door"),
            ),
        ),
        FixtureScreen(
            key="b",
            activity="LeftActivity",
            components=(GuiComponent("b_on", ComponentKind.BUTTON, text="Onward"),),
        ),
        FixtureScreen(
            key="c",
            activity="RightActivity",
            components=(GuiComponent("b_on2", ComponentKind.BUTTON, text="Onward"),),
        ),
        FixtureScreen(
            key="d",
            activity="GoalActivity",
            components=(GuiComponent("t_done", ComponentKind.TEXT_VIEW, text="Done"),),
        ),
    )
    edges = (
        FixtureEdge(START_NODE, "a", ActionType.LAUNCH, automated=1, manual=1),
        FixtureEdge("a", "b", ActionType.TAP, target_uid="b_left", manual=1),
        FixtureEdge("a", "c", ActionType.TAP, target_uid="b_right", automated=1),
        FixtureEdge("b", "d", ActionType.TAP, target_uid="b_on", manual=1),
        FixtureEdge("c", "d", ActionType.TAP, target_uid="b_on2", automated=1),
    )
    return FixtureSpec("Diamond", "1.0", screens, edges, app_package="dev.diamond")


@pytest.fixture(scope="session")
def diamond_model() -> AppExecutionModel:
    return build_model(generate_fixture(diamond_spec()), "diamond-1.0")


FAN_WORDS = ("alpha", "bravo", "carbon", "delta", "ember", "fathom", "garnet")


def fuel_fan_spec() -> FixtureSpec:
    """A lobby fanning out to seven screens that all mention fuel grades."""
    doors = tuple(
        GuiComponent(f"d{i}", ComponentKind.BUTTON, text=f"Door {word}")
        for i, word in enumerate(FAN_WORDS)
    )
    screens = [FixtureScreen(key="hub", activity="LobbyActivity", components=doors)]
    edges = [FixtureEdge(START_NODE, "hub", ActionType.LAUNCH, automated=len(FAN_WORDS))]
    for i, word in enumerate(FAN_WORDS):
        screens.append(
            FixtureScreen(
                key=f"f{i}",
                activity=f"Fuel{word.capitalize()}Activity",
                components=(GuiComponent("t0", ComponentKind.TEXT_VIEW, text="Fuel grade"),),
            )
        )
        edges.append(
            FixtureEdge("hub", f"f{i}", ActionType.TAP, target_uid=f"d{i}", automated=1)
        )
    return FixtureSpec("FuelFan", "1.0", tuple(screens), tuple(edges))


def pump_hub_spec() -> FixtureSpec:
    """One room with seven fuel-pump buttons, all leading to the same gauge."""
    pumps = tuple(
        GuiComponent(f"p{i}", ComponentKind.BUTTON, text=f"Fuel pump {word}")
        for i, word in enumerate(FAN_WORDS)
    )
    screens = (
        FixtureScreen(key="room", activity="PumpRoomActivity", components=pumps),
        FixtureScreen(
            key="gauge",
            activity="GaugeActivity",
            components=(GuiComponent("t0", ComponentKind.TEXT_VIEW, text="Pressure reading"),),
        ),
    )
    edges = (
        FixtureEdge(START_NODE, "room", ActionType.LAUNCH, automated=len(FAN_WORDS)),
        *(
            FixtureEdge("room", "gauge", ActionType.TAP, target_uid=f"p{i}", automated=1)
            for i in range(len(FAN_WORDS))
        ),
    )
    return FixtureSpec("PumpHub", "1.0", screens, edges)


def _weighted_choice(rng: random.Random, pairs: list[tuple[ActionType, int]]) -> ActionType:
    total = sum(w for _, w in pairs)
    pick = rng.randrange(total)
    for value, weight in pairs:
        pick -= weight
        if pick < 0:
            return value
    return pairs[-1][0]


def _random_screen(rng: random.Random, index: int, name_pool: list[tuple[str, str]]) -> FixtureScreen:
    first, second = name_pool[index]
    components = []
    for i in range(rng.randint(1, 4)):
        kind = rng.choice(COMPONENT_KINDS)
        text = " ".join(
            rng.sample(WORDS, rng.randint(1, 2))
        ).capitalize() if rng.random() < 0.85 else ""
        content_description = rng.choice(WORDS) if rng.random() < 0.3 else ""
        components.append(
            GuiComponent(uid=f"c{i}", kind=kind, text=text, content_description=content_description)
        )
    window = rng.choice(WORDS) if rng.random() < 0.2 else None
    return FixtureScreen(
        key=f"s{index}",
        activity=f"{first.capitalize()}{second.capitalize()}Activity",
        components=tuple(components),
        window=window,
        screenshot=f"screenshots/s{index}.png" if rng.random() < 0.7 else None,
    )


def random_spec(rng: random.Random, max_screens: int = 8, max_walk: int = 10) -> FixtureSpec:
    """A feasible random app spec, built from simulated usage walks."""
    count = rng.randint(2, max_screens)
    name_pool = rng.sample(
        [(a, b) for a in WORDS for b in WORDS if a != b], count
    )
    screens = {s.key: s for s in (_random_screen(rng, i, name_pool) for i in range(count))}

    counts: dict[tuple, list[int]] = {}

    def identity(key: tuple) -> tuple:
        source, target, action, uid, _direction = key
        signature = None
        if uid is not None:
            signature = next(c.signature for c in screens[source].components if c.uid == uid)
        return (source, action, signature, target)

    def bump(key: tuple, kind: str) -> None:
        entry = counts.setdefault(key, [0, 0])
        entry[0 if kind == "automated" else 1] += 1

    visited: set[str] = set()
    kinds = ["manual"] + (["automated"] if rng.random() < 0.7 else [])
    for kind in kinds:
        for _ in range(rng.randint(1, 2)):
            current = rng.choice(sorted(screens))
            bump((START_NODE, current, ActionType.LAUNCH, None, None), kind)
            visited.add(current)
            for _ in range(rng.randint(0, max_walk)):
                reuse = [k for k in counts if k[0] == current]
                if reuse and rng.random() < 0.4:
                    key = rng.choice(sorted(reuse, key=str))
                else:
                    action = _weighted_choice(rng, STEP_ACTIONS)
                    target = rng.choice(sorted(screens))
                    uid = None
                    direction = None
                    if action in (ActionType.TAP, ActionType.TYPE, ActionType.LONG_TAP):
                        uid = rng.choice(screens[current].components).uid
                    if action is ActionType.SWIPE:
                        direction = rng.choice(list(SwipeDirection))
                    key = (current, target, action, uid, direction)
                    # a fresh edge that merges with an existing one on
                    # ingestion is really a traversal of that edge
                    twin = next((k for k in counts if identity(k) == identity(key)), None)
                    if twin is not None:
                        key = twin
                bump(key, kind)
                current = key[1]
                visited.add(current)

    edges = tuple(
        FixtureEdge(
            source=source,
            target=target,
            action=action,
            target_uid=uid,
            swipe_direction=direction,
            automated=auto,
            manual=manual,
        )
        for (source, target, action, uid, direction), (auto, manual) in sorted(
            counts.items(), key=lambda item: str(item[0])
        )
    )
    kept = tuple(screens[key] for key in sorted(visited))
    name = "".join(w.capitalize() for w in rng.sample(WORDS, 2))
    return FixtureSpec(name, f"{rng.randint(1, 3)}.{rng.randint(0, 9)}", kept, edges)


UTTERANCE_TEMPLATES = [
    "The {0} {1} shows a {2} {3}",
    "The {0} {1} is wrong on the {2} page",
    "Tap the {0} button",
    "Tap on {0}",
    "Click the {0} {1} option",
    "Type {0} into the {1} field",
    "Long press the {0} item",
    "Press the back button",
    "Go back",
    "It should {0} the {1}",
    "The {0} does not {1}",
    "When I tap the {0}, the app crashes",
    "qum zyx blarf",
    "The app crashed on the {0} {1} screen",
]


def random_utterance(rng: random.Random, vocab: list[str]) -> str:
    pool = vocab or ["thing"]
    template = rng.choice(UTTERANCE_TEMPLATES)
    words = [rng.choice(pool) for _ in range(4)]
    text = template.format(*words)
    if "Swipe" not in text and rng.random() < 0.1:
        text = "Swipe " + rng.choice(["up", "down", "left", "right"])
    return text


@dataclass(frozen=True)
class Listing:
    app_id: str
    name: str
    version: str


class MemoryStore:
    """Minimal in-memory ModelStore for dialogue tests."""

    def __init__(self, models: dict[str, AppExecutionModel]):
        self._models = dict(models)

    def get_model(self, app_id: str) -> AppExecutionModel:
        try:
            return self._models[app_id]
        except KeyError:
            raise NotFoundError(f"unknown app {app_id!r}") from None

    def list_apps(self) -> list[Listing]:
        return [
            Listing(app_id, model.app_name, model.app_version)
            for app_id, model in sorted(self._models.items())
        ]


@pytest.fixture()
def demo_store(demo_model) -> MemoryStore:
    return MemoryStore({"demopad-1.0": demo_model})


def drive_golden_conversation(engine, session):
    """Scripted demo conversation behind the golden report files.

    Observed behavior on the stats screen, a matching expectation, then
    six steps: two typed, three accepted suggestions, one launch seed.
    Returns the final response (REPORT_READY when run against the demo).
    """
    response = engine.handle_text(session, "The fuel economy shows a NaN value on the page")
    response = engine.handle_selection(session, [response.suggestion_cards[0].id])
    engine.handle_text(session, "It should show the correct fuel economy")
    engine.handle_text(session, "Tap the Add fillup button")
    response = engine.handle_confirmation(session, True)
    engine.handle_selection(session, [c.id for c in response.suggestion_cards])
    engine.handle_confirmation(session, False)
    engine.handle_text(session, "Tap the fuel history button")
    response = engine.handle_confirmation(session, True)
    engine.handle_selection(session, [response.suggestion_cards[0].id])
    return engine.handle_confirmation(session, True)
