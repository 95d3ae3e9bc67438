"""Service configuration: JSON file plus a couple of environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

ENV_ADDRESS = "BUGSCRIBE_ADDRESS"
ENV_ASSET_DIR = "BUGSCRIBE_ASSET_DIR"

DEFAULT_UPLOAD_LIMIT = 50 * 1024 * 1024


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    asset_dir: Path = Path("bugscribe-data")
    threshold_screen: Fraction = Fraction(1, 2)
    threshold_edge: Fraction = Fraction(1, 2)
    upload_limit_bytes: int = DEFAULT_UPLOAD_LIMIT


def _parse_address(address: str) -> tuple[str, int]:
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"address must be host:port, got {address!r}")
    return host, int(port)


def _parse_threshold(value: object) -> Fraction:
    # accepts "1/2", "0.5", 0.5, 1
    return Fraction(str(value))


def load_config(path: str | Path | None = None) -> ServiceConfig:
    """Read the config file (if any), then apply environment overrides."""
    raw: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text("utf-8"))

    host, port = ServiceConfig.host, ServiceConfig.port
    if "address" in raw:
        host, port = _parse_address(raw["address"])
    asset_dir = Path(raw.get("asset_dir", ServiceConfig.asset_dir))
    threshold_screen = (
        _parse_threshold(raw["threshold_screen"])
        if "threshold_screen" in raw
        else ServiceConfig.threshold_screen
    )
    threshold_edge = (
        _parse_threshold(raw["threshold_edge"])
        if "threshold_edge" in raw
        else ServiceConfig.threshold_edge
    )
    upload_limit = int(raw.get("upload_limit_bytes", DEFAULT_UPLOAD_LIMIT))

    if os.environ.get(ENV_ADDRESS):
        host, port = _parse_address(os.environ[ENV_ADDRESS])
    if os.environ.get(ENV_ASSET_DIR):
        asset_dir = Path(os.environ[ENV_ASSET_DIR])

    return ServiceConfig(
        host=host,
        port=port,
        asset_dir=asset_dir,
        threshold_screen=threshold_screen,
        threshold_edge=threshold_edge,
        upload_limit_bytes=upload_limit,
    )
