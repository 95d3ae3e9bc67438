"""Filesystem-backed app store.

Layout: <root>/<app_id>/model.json plus screenshots/ and icon.png. Publishes
go through a staging directory and land with directory renames, so readers
either see the old model or the new one, never a half-written mix.
"""

from __future__ import annotations

import shutil
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from bugscribe.errors import BusyError, NotFoundError
from bugscribe.model import AppExecutionModel
from bugscribe.model_io import load_model
from bugscribe.traces import ValidationReport, ingest_app_package


@dataclass(frozen=True)
class AppSummary:
    app_id: str
    name: str
    version: str
    icon_url: str | None
    node_count: int
    edge_count: int

    def to_dict(self) -> dict:
        return {
            "app_id": self.app_id,
            "name": self.name,
            "version": self.version,
            "icon_url": self.icon_url,
            "node_count": self.node_count,
            "edge_count": self.edge_count,
        }


class AppStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._upload_lock = threading.Lock()
        self._cache: dict[str, tuple[float, AppExecutionModel]] = {}
        self._cache_guard = threading.Lock()

    # -- reading -----------------------------------------------------------

    def app_dir(self, app_id: str) -> Path:
        return self.root / app_id

    def _model_path(self, app_id: str) -> Path:
        return self.app_dir(app_id) / "model.json"

    def get_model(self, app_id: str) -> AppExecutionModel:
        path = self._model_path(app_id)
        try:
            mtime = path.stat().st_mtime
        except FileNotFoundError:
            raise NotFoundError(f"unknown app {app_id!r}") from None
        with self._cache_guard:
            cached = self._cache.get(app_id)
            if cached is not None and cached[0] == mtime:
                return cached[1]
        model = load_model(path)
        with self._cache_guard:
            self._cache[app_id] = (mtime, model)
        return model

    def list_apps(self) -> list[AppSummary]:
        summaries = []
        for entry in sorted(self.root.iterdir()) if self.root.is_dir() else []:
            if entry.name.startswith(".") or not (entry / "model.json").is_file():
                continue
            model = self.get_model(entry.name)
            icon_url = (
                f"/apps/{entry.name}/icon" if (entry / "icon.png").is_file() else None
            )
            summaries.append(
                AppSummary(
                    app_id=entry.name,
                    name=model.app_name,
                    version=model.app_version,
                    icon_url=icon_url,
                    node_count=len(model.nodes),
                    edge_count=len(model.edges),
                )
            )
        summaries.sort(key=lambda s: (s.name, s.version))
        return summaries

    def capture_path(self, app_id: str, fingerprint: str) -> Path:
        """Resolve a screen capture, raising a reason-tagged error when absent."""
        model = self.get_model(app_id)
        screen = model.nodes.get(fingerprint)
        if screen is None:
            raise NotFoundError(f"unknown screen {fingerprint!r}", reason="unknown-screen")
        if screen.screenshot is None:
            raise NotFoundError(
                f"screen {fingerprint!r} has no capture", reason="no-capture"
            )
        path = self.app_dir(app_id) / screen.screenshot
        if not path.is_file():
            raise NotFoundError(
                f"capture file {screen.screenshot!r} is missing", reason="missing-file"
            )
        return path

    def icon_path(self, app_id: str) -> Path:
        if not self._model_path(app_id).is_file():
            raise NotFoundError(f"unknown app {app_id!r}")
        path = self.app_dir(app_id) / "icon.png"
        if not path.is_file():
            raise NotFoundError(f"app {app_id!r} has no icon", reason="no-icon")
        return path

    # -- publishing ----------------------------------------------------------

    def publish(
        self, zip_bytes: bytes, icon_bytes: bytes | None = None
    ) -> tuple[ValidationReport, AppExecutionModel | None]:
        """Ingest a package; swap it into place only when fully valid."""
        if not self._upload_lock.acquire(blocking=False):
            raise BusyError("another upload is in progress")
        staging = self.root / f".staging-{uuid.uuid4().hex}"
        try:
            report, model = ingest_app_package(zip_bytes, staging, icon_bytes)
            if model is None:
                return report, None
            final = self.app_dir(model.app_id)
            trash = self.root / f".trash-{uuid.uuid4().hex}"
            if final.exists():
                final.rename(trash)
            (staging / model.app_id).rename(final)
            shutil.rmtree(trash, ignore_errors=True)
            with self._cache_guard:
                self._cache.pop(model.app_id, None)
            return report, model
        finally:
            shutil.rmtree(staging, ignore_errors=True)
            self._upload_lock.release()
