"""Label classes, precedence hierarchy, and display conventions."""

from __future__ import annotations

from enum import IntEnum

from .errors import ValidationFailure


class DefectClass(IntEnum):
    """Pixel label ids. Background must stay 0: metric denominators exclude index 0."""

    BACKGROUND = 0
    CROSSCUT = 1
    ROT = 2
    ROT_MAYBE = 3
    PRESSURE_WOOD = 4
    DISCOLORATION = 5
    INGROWTH_CRACK = 6


NUM_CLASSES = 7

CANONICAL_NAMES: dict[DefectClass, str] = {
    DefectClass.BACKGROUND: "Background",
    DefectClass.CROSSCUT: "Crosscut",
    DefectClass.ROT: "Rot",
    DefectClass.ROT_MAYBE: "Rot(maybe)",
    DefectClass.PRESSURE_WOOD: "PressureWood",
    DefectClass.DISCOLORATION: "Discoloration",
    DefectClass.INGROWTH_CRACK: "Ingrowth/Crack",
}

# Column codes used in all report tables.
SHORT_CODES: dict[DefectClass, str] = {
    DefectClass.BACKGROUND: "BG",
    DefectClass.CROSSCUT: "CC",
    DefectClass.ROT: "R",
    DefectClass.ROT_MAYBE: "R(m)",
    DefectClass.PRESSURE_WOOD: "PW",
    DefectClass.DISCOLORATION: "DC",
    DefectClass.INGROWTH_CRACK: "IC",
}

# Accepted spellings in annotation exports and manifests (lower-cased lookup).
_NAME_ALIASES: dict[str, DefectClass] = {
    "background": DefectClass.BACKGROUND,
    "bg": DefectClass.BACKGROUND,
    "crosscut": DefectClass.CROSSCUT,
    "cc": DefectClass.CROSSCUT,
    "rot": DefectClass.ROT,
    "r": DefectClass.ROT,
    "rot(maybe)": DefectClass.ROT_MAYBE,
    "rot maybe": DefectClass.ROT_MAYBE,
    "rot (maybe)": DefectClass.ROT_MAYBE,
    "rotmaybe": DefectClass.ROT_MAYBE,
    "r(m)": DefectClass.ROT_MAYBE,
    "pressurewood": DefectClass.PRESSURE_WOOD,
    "pressure wood": DefectClass.PRESSURE_WOOD,
    "pw": DefectClass.PRESSURE_WOOD,
    "discoloration": DefectClass.DISCOLORATION,
    "dc": DefectClass.DISCOLORATION,
    "ingrowth/crack": DefectClass.INGROWTH_CRACK,
    "ingrowth crack": DefectClass.INGROWTH_CRACK,
    "ingrowthcrack": DefectClass.INGROWTH_CRACK,
    "ic": DefectClass.INGROWTH_CRACK,
}

# Default precedence for resolving overlapping annotations, highest priority first.
DEFAULT_HIERARCHY: tuple[DefectClass, ...] = (
    DefectClass.ROT,
    DefectClass.DISCOLORATION,
    DefectClass.ROT_MAYBE,
    DefectClass.INGROWTH_CRACK,
    DefectClass.PRESSURE_WOOD,
    DefectClass.CROSSCUT,
)

DEFECT_CLASSES: tuple[DefectClass, ...] = (
    DefectClass.ROT,
    DefectClass.ROT_MAYBE,
    DefectClass.PRESSURE_WOOD,
    DefectClass.DISCOLORATION,
    DefectClass.INGROWTH_CRACK,
)

# Overlay colors, one distinct RGB per class; Background is never painted.
PALETTE: dict[DefectClass, tuple[int, int, int]] = {
    DefectClass.BACKGROUND: (0, 0, 0),
    DefectClass.CROSSCUT: (255, 215, 0),
    DefectClass.ROT: (220, 20, 60),
    DefectClass.ROT_MAYBE: (255, 140, 0),
    DefectClass.PRESSURE_WOOD: (65, 105, 225),
    DefectClass.DISCOLORATION: (148, 0, 211),
    DefectClass.INGROWTH_CRACK: (0, 206, 209),
}


def parse_class_name(name: str) -> DefectClass:
    """Map a class name (canonical or common alias) to its id."""
    key = name.strip().lower()
    if key not in _NAME_ALIASES:
        raise ValidationFailure(f"unknown class name: {name!r}")
    return _NAME_ALIASES[key]


def validate_hierarchy(hierarchy: tuple[DefectClass, ...] | list[DefectClass]) -> tuple[DefectClass, ...]:
    """Check a precedence list: each non-background class exactly once, no Background."""
    hierarchy = tuple(DefectClass(c) for c in hierarchy)
    if DefectClass.BACKGROUND in hierarchy:
        raise ValidationFailure("Background must not appear in the class hierarchy")
    expected = set(DefectClass) - {DefectClass.BACKGROUND}
    if set(hierarchy) != expected or len(hierarchy) != len(expected):
        raise ValidationFailure(
            "hierarchy must list each non-background class exactly once, got "
            + ", ".join(CANONICAL_NAMES[c] for c in hierarchy)
        )
    return hierarchy


def precedence_scores(hierarchy: tuple[DefectClass, ...]) -> dict[int, int]:
    """Numeric priority per class id: first hierarchy entry highest, Background lowest (0)."""
    scores = {int(DefectClass.BACKGROUND): 0}
    n = len(hierarchy)
    for i, cls in enumerate(hierarchy):
        scores[int(cls)] = n - i
    return scores
