"""JSON instance and plan files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .network import Network, NetworkError, build_network, network_to_spec
from .structure import PivotPlan


class InstanceError(NetworkError):
    """A file could not be parsed or validated; the message names the location."""


def _read_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_instance(path: str | Path) -> Network:
    data = _read_json(path)
    try:
        return build_network(data)
    except NetworkError as exc:
        raise InstanceError(f"{path}: {exc}") from None


def dumps_instance(net: Network) -> str:
    return json.dumps(network_to_spec(net), indent=2, ensure_ascii=False)


def save_instance(net: Network, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(net) + "\n", encoding="utf-8")


def load_plan(path: str | Path) -> PivotPlan:
    try:
        return PivotPlan.from_dict(_read_json(path))
    except NetworkError as exc:
        raise InstanceError(f"{path}: {exc}") from None


def save_plan(plan: PivotPlan, path: str | Path) -> None:
    Path(path).write_text(json.dumps(plan.to_dict(), indent=2, ensure_ascii=False) + "\n",
                          encoding="utf-8")


def travel_agency_path() -> Path:
    return Path(str(resources.files("pivotcsp") / "data" / "travel_agency.json"))


def travel_agency() -> Network:
    """The five-variable guides / cities / countries / currencies / languages instance."""
    return load_instance(travel_agency_path())
