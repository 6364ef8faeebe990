"""Curation session state: blinded A/B items, decision log, variant application.

Persistence is an append-only line-delimited decision log plus a snapshot of
the static session definitions (sessions.json). Replaying snapshot + log
reproduces the in-memory state exactly. Option masks are never stored per
item; they are recomputed deterministically from their descriptors.
"""

from __future__ import annotations

import json
import logging
import random
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .classes import DefectClass
from .errors import ConflictError, InputError, ValidationFailure
from .manifest import DatasetManifest, SampleRecord, save_manifest
from .mask_ops import cast_rot_maybe
from .maskio import read_mask_png, write_mask_png

log = logging.getLogger(__name__)

MODE_ROT_MAYBE = "rot-maybe-cast"
MODE_BLIND = "blind-gt-vs-pred"
MODES = (MODE_ROT_MAYBE, MODE_BLIND)

DECISIONS = ("none", "a", "b", "skip")


@dataclass(frozen=True)
class OptionRef:
    """Deterministic recipe for one side's mask.

    kind "cast": cast the base variant's Rot(maybe) pixels to `target`.
    kind "variant": the named manifest variant as-is.
    kind "file": an imported mask PNG (path relative to the manifest root).
    """

    kind: str
    variant: str = ""
    target: str = ""
    path: str = ""

    def provenance(self) -> str:
        if self.kind == "cast":
            return f"cast-{self.target}"
        if self.kind == "variant":
            return "ground-truth"
        return "prediction"


@dataclass
class AdjudicationItem:
    item_id: str
    session_id: str
    sample_id: str
    index: int
    option_a: OptionRef
    option_b: OptionRef
    decision: str = "none"
    reviewer: str = ""
    decided_at: str = ""

    @property
    def pending(self) -> bool:
        return self.decision == "none"


@dataclass
class AdjudicationSession:
    session_id: str
    mode: str
    seed: int
    created_at: str
    base_variant: str
    status: str = "open"
    applied_variant: str = ""
    item_ids: list[str] = field(default_factory=list)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _side_swap(seed: int, index: int) -> bool:
    return random.Random(seed * 1_000_003 + index).random() < 0.5


class CurationStore:
    """All session state plus its on-disk mirror. Thread-safe single writer."""

    def __init__(self, manifest: DatasetManifest, state_dir: str | Path,
                 image_root: str | Path | None = None):
        self.manifest = manifest
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self.image_root = Path(image_root) if image_root else manifest.root()
        self.sessions: dict[str, AdjudicationSession] = {}
        self.items: dict[str, AdjudicationItem] = {}
        self.lock = threading.Lock()
        self._replay()

    # ---------------------------------------------------------------- disk
    @property
    def sessions_path(self) -> Path:
        return self.state_dir / "sessions.json"

    @property
    def log_path(self) -> Path:
        return self.state_dir / "decisions.jsonl"

    def _write_snapshot(self) -> None:
        payload = {
            "sessions": [
                {**asdict(s), "items": [
                    {
                        "item_id": it.item_id,
                        "sample_id": it.sample_id,
                        "index": it.index,
                        "option_a": asdict(it.option_a),
                        "option_b": asdict(it.option_b),
                    }
                    for it in (self.items[i] for i in s.item_ids)
                ]}
                for s in self.sessions.values()
            ],
        }
        self.sessions_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    def _append_log(self, record: dict) -> None:
        with self.log_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record) + "\n")

    def _replay(self) -> None:
        if self.sessions_path.is_file():
            try:
                payload = json.loads(self.sessions_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise InputError(f"corrupt session snapshot {self.sessions_path}: {exc}") from exc
            for sd in payload.get("sessions", []):
                items = sd.pop("items", [])
                session = AdjudicationSession(**{k: v for k, v in sd.items()
                                                 if k in AdjudicationSession.__dataclass_fields__})
                self.sessions[session.session_id] = session
                for it in items:
                    item = AdjudicationItem(
                        item_id=it["item_id"], session_id=session.session_id,
                        sample_id=it["sample_id"], index=it["index"],
                        option_a=OptionRef(**it["option_a"]),
                        option_b=OptionRef(**it["option_b"]),
                    )
                    self.items[item.item_id] = item
        if self.log_path.is_file():
            for line in self.log_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                item = self.items.get(rec["item_id"])
                if item is None:
                    raise InputError(f"decision log references unknown item {rec['item_id']!r}")
                item.decision = rec["choice"]
                item.reviewer = rec.get("reviewer", "")
                item.decided_at = rec.get("ts", "")

    # ------------------------------------------------------------- sessions
    def create_session(self, mode: str, seed: int, base_variant: str = "original",
                       subset: str | None = None, sample_ids: list[str] | None = None,
                       pred_dir: str | None = None) -> AdjudicationSession:
        if mode not in MODES:
            raise ValidationFailure(f"unknown session mode {mode!r}")
        with self.lock:
            candidates = self.manifest.subset_samples(subset)
            if sample_ids:
                wanted = set(sample_ids)
                candidates = [s for s in candidates if s.sample_id in wanted]
            qualifying: list[tuple[SampleRecord, OptionRef, OptionRef]] = []
            if mode == MODE_ROT_MAYBE:
                for sample in candidates:
                    if base_variant not in sample.masks:
                        continue
                    mask = self.manifest.load_mask(sample, base_variant)
                    if not (mask == int(DefectClass.ROT_MAYBE)).any():
                        continue
                    qualifying.append((
                        sample,
                        OptionRef(kind="cast", variant=base_variant, target="rot"),
                        OptionRef(kind="cast", variant=base_variant, target="crosscut"),
                    ))
            else:
                if not pred_dir:
                    raise ValidationFailure("blind-gt-vs-pred sessions need pred_dir")
                pred_root = self.manifest.root() / pred_dir
                for sample in candidates:
                    if base_variant not in sample.masks:
                        continue
                    pred_path = pred_root / f"{sample.sample_id}.png"
                    if not pred_path.is_file():
                        continue
                    qualifying.append((
                        sample,
                        OptionRef(kind="variant", variant=base_variant),
                        OptionRef(kind="file", path=str(Path(pred_dir) / f"{sample.sample_id}.png"),
                                  variant=base_variant),
                    ))
            if not qualifying:
                raise ValidationFailure(
                    f"no qualifying samples for a {mode} session "
                    f"({len(candidates)} candidate(s) inspected)"
                )
            session_id = f"s{len(self.sessions) + 1:04d}"
            session = AdjudicationSession(
                session_id=session_id, mode=mode, seed=seed,
                created_at=_now(), base_variant=base_variant,
            )
            for index, (sample, opt_a, opt_b) in enumerate(qualifying):
                if _side_swap(seed, index):
                    opt_a, opt_b = opt_b, opt_a
                item = AdjudicationItem(
                    item_id=f"{session_id}-{index:04d}", session_id=session_id,
                    sample_id=sample.sample_id, index=index,
                    option_a=opt_a, option_b=opt_b,
                )
                self.items[item.item_id] = item
                session.item_ids.append(item.item_id)
            self.sessions[session_id] = session
            self._write_snapshot()
            return session

    def session(self, session_id: str) -> AdjudicationSession:
        if session_id not in self.sessions:
            raise KeyError(session_id)
        return self.sessions[session_id]

    def progress(self, session: AdjudicationSession) -> tuple[int, int]:
        decided = sum(1 for i in session.item_ids if not self.items[i].pending)
        return decided, len(session.item_ids)

    def next_item(self, session_id: str) -> AdjudicationItem | None:
        session = self.session(session_id)
        for item_id in session.item_ids:
            if self.items[item_id].pending:
                return self.items[item_id]
        return None

    # ------------------------------------------------------------- decisions
    def submit_decision(self, item_id: str, choice: str, reviewer: str,
                        override: bool = False) -> AdjudicationItem:
        if choice not in ("a", "b", "skip"):
            raise ValidationFailure(f"choice must be a, b or skip, got {choice!r}")
        with self.lock:
            if item_id not in self.items:
                raise KeyError(item_id)
            item = self.items[item_id]
            session = self.sessions[item.session_id]
            if session.status != "open":
                raise ConflictError(f"session {session.session_id} is closed")
            if not item.pending:
                if item.decision == choice:
                    return item  # idempotent re-submission
                if not override:
                    raise ConflictError(
                        f"item {item_id} already decided as {item.decision!r}; "
                        "set override to replace"
                    )
            item.decision = choice
            item.reviewer = reviewer
            item.decided_at = _now()
            self._append_log({
                "item_id": item_id, "choice": choice, "reviewer": reviewer,
                "ts": item.decided_at, "override": bool(override),
            })
            return item

    # ----------------------------------------------------------------- apply
    def resolve_option(self, item: AdjudicationItem, ref: OptionRef) -> np.ndarray:
        sample = self.manifest.sample(item.sample_id)
        if ref.kind == "cast":
            base = self.manifest.load_mask(sample, ref.variant)
            target = DefectClass.ROT if ref.target == "rot" else DefectClass.CROSSCUT
            return cast_rot_maybe(base, target)
        if ref.kind == "variant":
            return self.manifest.load_mask(sample, ref.variant)
        mask = read_mask_png(self.manifest.root() / ref.path)
        if mask.shape != (sample.height, sample.width):
            raise ValidationFailure(
                f"imported mask {ref.path} shape {mask.shape} does not match sample "
                f"{sample.sample_id}"
            )
        return mask

    def apply_decisions(self, session_id: str, variant_name: str,
                        allow_partial: bool = False) -> dict:
        """Materialize the chosen options as a new dataset variant.

        Every sample holding the session's base variant gets a mask under the
        new variant: the chosen option for decided samples, a copy of the
        base mask otherwise. The base variant's files are never touched.
        """
        with self.lock:
            session = self.session(session_id)
            if not variant_name or variant_name == session.base_variant:
                raise ValidationFailure(f"invalid variant name {variant_name!r}")
            for sample in self.manifest.samples:
                if variant_name in sample.masks:
                    raise ValidationFailure(
                        f"variant {variant_name!r} already exists on sample {sample.sample_id}"
                    )
            decided, total = self.progress(session)
            if decided < total and not allow_partial:
                raise ConflictError(
                    f"session {session_id} has {total - decided} undecided item(s); "
                    "set allow_partial to apply anyway"
                )
            chosen: dict[str, np.ndarray] = {}
            for item_id in session.item_ids:
                item = self.items[item_id]
                if item.decision == "a":
                    chosen[item.sample_id] = self.resolve_option(item, item.option_a)
                elif item.decision == "b":
                    chosen[item.sample_id] = self.resolve_option(item, item.option_b)
            root = self.manifest.root()
            written = 0
            for sample in self.manifest.samples:
                if session.base_variant not in sample.masks:
                    continue
                mask = chosen.get(sample.sample_id)
                if mask is None:
                    mask = self.manifest.load_mask(sample, session.base_variant)
                rel = f"masks/{variant_name}/{sample.sample_id}.png"
                write_mask_png(mask, root / rel)
                sample.masks[variant_name] = rel
                written += 1
            session.status = "closed"
            session.applied_variant = variant_name
            if self.manifest.path is not None:
                save_manifest(self.manifest, self.manifest.path)
            self._write_snapshot()
            return {
                "session_id": session_id,
                "variant": variant_name,
                "samples_written": written,
                "decided": decided,
                "total": total,
            }
