"""
Privilege, stack and security-state transitions.

The model is event-level: exception stacking and the EXC_RETURN /
FNC_RETURN encodings are not represented.
"""

from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, List, Optional, Set, Tuple, Union

from .errors import IllegalTransition, InvalidConfig
from .mpu import Privilege


class Mode(str, Enum):
    THREAD = "thread"
    HANDLER = "handler"


class SecurityState(str, Enum):
    SECURE = "secure"
    NON_SECURE = "nonsecure"


class StackPointer(str, Enum):
    MSP = "msp"
    PSP = "psp"


@dataclass(frozen=True)
class SecurityContext:
    mode: Mode = Mode.THREAD
    priv: Privilege = Privilege.PRIVILEGED
    state: SecurityState = SecurityState.SECURE
    spsel: StackPointer = StackPointer.MSP
    npriv: bool = False  # CONTROL.nPRIV, the thread privilege level

    def __post_init__(self):
        if self.mode is Mode.HANDLER:
            if self.priv is not Privilege.PRIVILEGED:
                raise InvalidConfig("handler mode is always privileged")
            if self.spsel is not StackPointer.MSP:
                raise InvalidConfig("handler mode always uses MSP")
        elif (self.priv is Privilege.UNPRIVILEGED) != self.npriv:
            raise InvalidConfig("thread privilege must follow CONTROL.nPRIV")

    @classmethod
    def thread(cls, privileged: bool = True, state: SecurityState = SecurityState.SECURE,
               spsel: StackPointer = StackPointer.MSP) -> "SecurityContext":
        return cls(Mode.THREAD, Privilege.PRIVILEGED if privileged else Privilege.UNPRIVILEGED,
                   state, spsel, npriv=not privileged)

    @property
    def privileged(self) -> bool:
        return self.priv is Privilege.PRIVILEGED

    def __str__(self) -> str:
        return f"({self.mode.value}, {self.priv.value}, {self.state.value}, {self.spsel.value})"


@dataclass(frozen=True)
class Svc:
    pass


@dataclass(frozen=True)
class ExceptionEntry:
    state: Optional[SecurityState] = None


@dataclass(frozen=True)
class ExceptionReturn:
    mode: Mode = Mode.THREAD
    spsel: StackPointer = StackPointer.MSP
    state: Optional[SecurityState] = None


@dataclass(frozen=True)
class WriteControlNPriv:
    value: bool


@dataclass(frozen=True)
class WriteControlSpsel:
    value: bool


@dataclass(frozen=True)
class SgEntry:
    pass


@dataclass(frozen=True)
class BxnsExit:
    pass


@dataclass(frozen=True)
class BlxnsCall:
    pass


Event = Union[Svc, ExceptionEntry, ExceptionReturn, WriteControlNPriv, WriteControlSpsel, SgEntry, BxnsExit, BlxnsCall]
ESCALATING_EVENTS = (Svc, ExceptionEntry)


def _enter_handler(ctx: SecurityContext, state: Optional[SecurityState]) -> SecurityContext:
    return replace(ctx, mode=Mode.HANDLER, priv=Privilege.PRIVILEGED, spsel=StackPointer.MSP,
                   state=state or ctx.state)


def step_security_context(ctx: SecurityContext, event: Event) -> SecurityContext:
    if isinstance(event, Svc):
        return _enter_handler(ctx, None)
    if isinstance(event, ExceptionEntry):
        return _enter_handler(ctx, event.state)

    if isinstance(event, ExceptionReturn):
        if ctx.mode is not Mode.HANDLER:
            raise IllegalTransition(ctx, event)
        state = event.state or ctx.state
        if event.mode is Mode.HANDLER:
            if event.spsel is not StackPointer.MSP:
                raise IllegalTransition(ctx, event)
            return replace(ctx, state=state)
        priv = Privilege.UNPRIVILEGED if ctx.npriv else Privilege.PRIVILEGED
        return replace(ctx, mode=Mode.THREAD, priv=priv, spsel=event.spsel, state=state)

    if isinstance(event, WriteControlNPriv):
        # MSR CONTROL is ignored when executed unprivileged
        if not ctx.privileged:
            return ctx
        if ctx.mode is Mode.HANDLER:
            return replace(ctx, npriv=event.value)
        priv = Privilege.UNPRIVILEGED if event.value else Privilege.PRIVILEGED
        return replace(ctx, npriv=event.value, priv=priv)

    if isinstance(event, WriteControlSpsel):
        if not ctx.privileged or ctx.mode is Mode.HANDLER:
            return ctx
        return replace(ctx, spsel=StackPointer.PSP if event.value else StackPointer.MSP)

    if isinstance(event, SgEntry):
        if ctx.state is SecurityState.SECURE:
            return ctx
        return replace(ctx, state=SecurityState.SECURE)

    if isinstance(event, (BxnsExit, BlxnsCall)):
        if ctx.state is SecurityState.NON_SECURE:
            raise IllegalTransition(ctx, event)
        return replace(ctx, state=SecurityState.NON_SECURE)

    raise IllegalTransition(ctx, event)


def all_events() -> List[Event]:
    """Every event instance, with each parameter enumerated."""
    events: List[Event] = [Svc(), SgEntry(), BxnsExit(), BlxnsCall()]
    events += [ExceptionEntry(s) for s in (None,) + tuple(SecurityState)]
    events += [ExceptionReturn(m, sp, s)
               for m in Mode for sp in StackPointer for s in (None,) + tuple(SecurityState)]
    events += [WriteControlNPriv(v) for v in (False, True)]
    events += [WriteControlSpsel(v) for v in (False, True)]
    return events


def explore(start: SecurityContext, depth: int, events: Optional[Iterable[Event]] = None
            ) -> Set[Tuple[SecurityContext, bool]]:
    """
    Breadth-first over every event string of length <= ``depth``.

    Returns (context, escalated) pairs, where ``escalated`` records that
    an Svc or ExceptionEntry occurred on the path. Illegal steps are
    pruned.
    """
    alphabet = list(events) if events is not None else all_events()
    seen = {(start, False)}
    frontier = deque([(start, False, 0)])
    while frontier:
        ctx, escalated, level = frontier.popleft()
        if level == depth:
            continue
        for event in alphabet:
            try:
                nxt = step_security_context(ctx, event)
            except IllegalTransition:
                continue
            key = (nxt, escalated or isinstance(event, ESCALATING_EVENTS))
            if key not in seen:
                seen.add(key)
                frontier.append(key + (level + 1,))
    return seen
