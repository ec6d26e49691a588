"""Tag tokens and well-formedness."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence, Union

OPEN = "open"
CLOSE = "close"
BACHELOR = "bachelor"

_TOKEN = re.compile(r"<(/?)([A-Za-z0-9_.\-]+)(?: q=([A-Za-z0-9_.\-]+))?(/?)>")


class WellFormednessError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at token {position}")
        self.position = position


@dataclass(frozen=True)
class Event:
    kind: str
    tag: str
    annotation: Optional[Hashable] = None

    def __post_init__(self) -> None:
        if self.annotation is not None and self.kind == BACHELOR:
            raise ValueError("bachelor tags are never annotated")

    def __str__(self) -> str:
        note = "" if self.annotation is None else f" q={self.annotation}"
        if self.kind == OPEN:
            return f"<{self.tag}{note}>"
        if self.kind == CLOSE:
            return f"</{self.tag}{note}>"
        return f"<{self.tag}/>"

    def bare(self) -> "Event":
        return self if self.annotation is None else Event(self.kind, self.tag)


def parse_token(token: str, position: int = 0) -> Event:
    m = _TOKEN.fullmatch(token)
    if m is None or (m.group(1) and m.group(4)):
        raise WellFormednessError(f"bad tag token {token!r}", position)
    slash, tag, note, bachelor = m.groups()
    if bachelor and note:
        raise WellFormednessError(f"annotated bachelor tag {token!r}", position)
    kind = CLOSE if slash else BACHELOR if bachelor else OPEN
    return Event(kind, tag, note)


def tokenize(doc: Union[str, Iterable[str]], check: bool = True) -> list[Event]:
    """Events of a document given as text or as a list of tag tokens."""
    if isinstance(doc, str):
        text = doc.strip()
        events = []
        pos = 0
        for i, m in enumerate(_TOKEN.finditer(text), start=1):
            if m.start() != pos:
                raise WellFormednessError(f"unexpected text {text[pos:m.start()]!r}", i)
            events.append(parse_token(m.group(0), i))
            pos = m.end()
        if pos != len(text):
            raise WellFormednessError(f"unexpected text {text[pos:]!r}", len(events) + 1)
    else:
        events = [t if isinstance(t, Event) else parse_token(t, i) for i, t in enumerate(doc, 1)]
    if check:
        check_well_formed(events)
    return events


def check_well_formed(events: Sequence[Event]) -> None:
    """Balanced, properly nested, exactly one root."""
    if not events:
        raise WellFormednessError("empty document", 1)
    stack: list[str] = []
    closed_root = False
    for i, ev in enumerate(events, start=1):
        if closed_root:
            raise WellFormednessError("content after the root element", i)
        if ev.kind == OPEN:
            stack.append(ev.tag)
        elif ev.kind == CLOSE:
            if not stack:
                raise WellFormednessError(f"unmatched </{ev.tag}>", i)
            if stack[-1] != ev.tag:
                raise WellFormednessError(f"</{ev.tag}> closes <{stack[-1]}>", i)
            stack.pop()
        if not stack:
            closed_root = True
    if stack:
        raise WellFormednessError(f"<{stack[-1]}> never closed", len(events) + 1)


def expand_bachelors(events: Iterable[Event]) -> list[Event]:
    out = []
    for ev in events:
        if ev.kind == BACHELOR:
            out += [Event(OPEN, ev.tag), Event(CLOSE, ev.tag)]
        else:
            out.append(ev)
    return out


def render(events: Iterable[Event]) -> str:
    return "".join(str(e) for e in events)


def tag_alphabet(tags: Iterable[str]) -> list[Event]:
    """Sigma_tau: opening, closing and bachelor symbol for every tag."""
    out = []
    for t in tags:
        out += [Event(OPEN, t), Event(CLOSE, t), Event(BACHELOR, t)]
    return out
