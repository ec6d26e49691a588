"""Tag streams, unranked trees, tree automata and their streaming passes."""
from .automata import (
    ANY,
    BOT,
    FIRST,
    NEXT,
    AutomatonError,
    BottomUpBDTA,
    SelectionPair,
    TopDownAutomaton,
    constant_pair,
    dump_automaton,
    dump_selection_pair,
    load_automaton,
    load_selection_pair,
    random_bdta,
    run_bottom_up_reference,
    run_selection_reference,
)
from .events import (
    BACHELOR,
    CLOSE,
    OPEN,
    Event,
    WellFormednessError,
    check_well_formed,
    expand_bachelors,
    parse_token,
    render,
    tag_alphabet,
    tokenize,
)
from .streaming import (
    SelectAscending,
    SelectDescending,
    StreamFilter,
    document_tape,
    run_filter,
    run_selection,
    select_ascending,
    select_descending,
    stream_filter_backward,
    stream_filter_forward,
)
from .trees import FCNS, LCNS, BinNode, Node, UnrankedTree, bin_encode, path_tree, random_tree

__all__ = [name for name in dir() if not name.startswith("_")]
