"""Flat key=value parameter files.

One ``key = value`` pair per line, ``#`` starts a comment, blank lines
ignored. Keys map one-to-one onto the two-kind model surface; unknown
keys are rejected so typos cannot silently fall back to defaults. Lines
flagged ``# unverified-parameter:`` mark bundled scenario values that
are best-effort choices rather than stated ones.
"""

from __future__ import annotations

from importlib import resources
from typing import Union

from .errors import InvalidParamsError
from .params import CommunicationPolicy, ModelParams, StudyProfile, two_kind_params

_FLOAT_KEYS = (
    "base_rate",
    "replication_rate",
    "activity_rate",
    "power",
    "false_positive_rate",
    "replication_power",
    "replication_false_positive_rate",
    "c_new_negative",
    "c_rep_negative",
    "c_rep_positive",
    "target_fraction",
)
_INT_KEYS = ("tally_bound",)
_STR_KEYS = ("boundary_mode",)
_LIST_KEYS = ("target_tallies",)

CONFIG_KEYS = _FLOAT_KEYS + _INT_KEYS + _STR_KEYS + _LIST_KEYS


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    """Parse config text into a typed dict, rejecting unknown keys."""
    out: dict = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParamsError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise InvalidParamsError(
                f"{origin}:{lineno}: unknown key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}"
            )
        if key in out:
            raise InvalidParamsError(f"{origin}:{lineno}: duplicate key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _INT_KEYS:
                out[key] = int(value)
            elif key in _LIST_KEYS:
                out[key] = tuple(int(v) for v in value.split(",") if v.strip()) if value else ()
            else:
                out[key] = value
        except ValueError:
            raise InvalidParamsError(
                f"{origin}:{lineno}: cannot parse value {value!r} for key {key!r}"
            ) from None
    return out


def parse_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), origin=path)


def params_from_config(cfg: dict) -> ModelParams:
    """Build validated two-kind parameters from a parsed config dict."""
    if "base_rate" not in cfg:
        raise InvalidParamsError("config must set base_rate")
    initial = StudyProfile(
        power=cfg.get("power", 0.8),
        false_positive_rate=cfg.get("false_positive_rate", 0.05),
    )
    if "replication_power" in cfg or "replication_false_positive_rate" in cfg:
        replication = StudyProfile(
            power=cfg.get("replication_power", initial.power),
            false_positive_rate=cfg.get(
                "replication_false_positive_rate", initial.false_positive_rate
            ),
        )
    else:
        replication = None
    comm = CommunicationPolicy(
        new_negative=cfg.get("c_new_negative", 1.0),
        rep_negative=cfg.get("c_rep_negative", 1.0),
        rep_positive=cfg.get("c_rep_positive", 1.0),
    )
    return two_kind_params(
        base_rate=cfg["base_rate"],
        replication_rate=cfg.get("replication_rate", 0.0),
        initial=initial,
        replication=replication,
        comm=comm,
        activity_rate=cfg.get("activity_rate", 1.0),
        target_fraction=cfg.get("target_fraction", 0.0),
        target_tallies=cfg.get("target_tallies", ()),
        tally_bound=cfg.get("tally_bound", 30),
        boundary_mode=cfg.get("boundary_mode", "reflecting"),
    )


def load_params(path: str) -> ModelParams:
    return params_from_config(parse_config_file(path))


def bundled_config_names() -> list[str]:
    """Names of the scenario configs shipped inside the package."""
    root = resources.files("repliscope").joinpath("configs")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cfg"))


def load_bundled(name: str) -> ModelParams:
    """Load a bundled scenario config by file name (e.g. ``fig3c.cfg``)."""
    if not name.endswith(".cfg"):
        name = f"{name}.cfg"
    ref = resources.files("repliscope").joinpath("configs").joinpath(name)
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InvalidParamsError(
            f"no bundled config {name!r}; have {bundled_config_names()}"
        ) from None
    return params_from_config(parse_config_text(text, origin=name))
