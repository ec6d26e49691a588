"""Metered external-memory runtime: tape, arena, step machines, budgets, protocols."""
from .arena import ADDRESS_REGISTER, Arena, ArenaError
from .budget import Budget, BudgetCheck, BudgetSyntaxError, Expr, check_budget
from .machine import (
    ACCEPT,
    DONE,
    HALTING,
    REJECT,
    SEEK,
    Action,
    ControlProgram,
    Machine,
    NonTerminationError,
    ProgramError,
    RunReport,
    SeekError,
    default_step_limit,
    ra_equivalent_reversals,
    run,
    seek,
)
from .protocol import (
    ExtractionError,
    IntegrityError,
    Message,
    ProtocolTranscript,
    extract_protocol,
    replay_protocol,
)
from .random_access import SeekFreeRewrite
from .tape import (
    LEFT,
    LEFT_END,
    RIGHT,
    RIGHT_END,
    STAY,
    Alphabet,
    ExternalTape,
    HeadOutOfRangeError,
    MeterError,
    ReadOnlyTapeError,
    TapeFormatError,
    load_tape,
)

__all__ = [name for name in dir() if not name.startswith("_")]
