"""Build configuration and explanatory profiles.

A build is parameterized by a JSON config file; every knob has a default
so the file may be omitted entirely. Profiles decide what a bundle
exposes: which archetype sections stay on the cards, whether open
question answering is available, and whether the tool is a static dump.
The archetype sweep itself always runs over the full archetype list so a
restricted profile is exactly a pruned view of the full one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ValidationError
from .kg import NOMINAL_POS, STOP_DETERMINERS, STOP_WORDS, SYNTAGM_DEPRELS
from .overview import DEFAULT_ARCHETYPES, Archetype, archetypes_from_config
from .pertinence import DEFAULT_DIM

PROFILES = {
    "yai4hu": {
        "archetypes": [a.id for a in DEFAULT_ARCHETYPES],
        "open_qa_enabled": True,
        "static": False,
    },
    "hwn": {
        "archetypes": ["how", "why"],
        "open_qa_enabled": False,
        "static": False,
    },
    "ose": {
        "archetypes": [],
        "open_qa_enabled": False,
        "static": True,
    },
}


@dataclass
class BuildConfig:
    entry_document: str = ""
    theta: float = 0.15
    theta_per_archetype: dict = field(default_factory=dict)
    top_f: int = 1000
    summary_k: int = 3
    summary_budget: int = 280
    open_qa_n: int = 10
    hash_dim: int = DEFAULT_DIM
    provider: str = "lexical"  # or "remote"
    provider_endpoint: str = ""
    provider_timeout: float = 10.0
    nominal_pos: tuple = NOMINAL_POS
    syntagm_deprels: tuple = SYNTAGM_DEPRELS
    stop_determiners: tuple = STOP_DETERMINERS
    stop_words: tuple = STOP_WORDS
    archetypes: tuple = DEFAULT_ARCHETYPES

    def archetype_list(self) -> tuple[Archetype, ...]:
        return tuple(sorted(self.archetypes, key=lambda a: a.priority))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["archetypes"] = [
            {"id": a.id, "priority": a.priority, "templates": list(a.surface_templates)}
            for a in self.archetype_list()
        ]
        for key in ("nominal_pos", "syntagm_deprels", "stop_determiners", "stop_words"):
            data[key] = list(data[key])
        return data

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path=None, overrides: dict | None = None) -> BuildConfig:
    """Read a config file and apply CLI-style overrides on top."""
    data: dict = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    config = BuildConfig()
    known = set(config.to_dict())
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    if "archetypes" in data:
        config.archetypes = archetypes_from_config(data.pop("archetypes"))
    for key, value in data.items():
        if key in ("nominal_pos", "syntagm_deprels", "stop_determiners", "stop_words"):
            value = tuple(value)
        setattr(config, key, value)
    return config


def profile_settings(profile: str) -> dict:
    if profile not in PROFILES:
        raise ValidationError(
            f"unknown profile {profile!r}; expected one of {sorted(PROFILES)}"
        )
    return PROFILES[profile]
