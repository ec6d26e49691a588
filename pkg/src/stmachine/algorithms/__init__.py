"""Upper-bound algorithms as metered control programs."""
from .chase import (
    CHASE_ALPHABET,
    Certificate,
    ChaseIndices,
    VerifyChaseCertificate,
    chase_indices,
    verify_chase_certificate,
)
from .disj import DISJ_ALPHABET, DisjChunked, DisjTrivial, disj_chunked, disj_trivial
from .fixtures import SeekFixture, seek_fixture
from .join import JoinViaSort, VirtualExpandedTape, join_scan_bound, join_via_sort
from .keysort import (
    FLAT_ALPHABET,
    KeySort,
    RecordFormatError,
    SorterSpec,
    encode_flat,
    encode_flat_join,
    keysort_oracle,
    keysort_scan,
    parse_flat,
    parse_flat_join,
    random_records,
)
from .loadsolve import (
    RELPAIR_ALPHABET,
    LoadAndSolve,
    disj_decider,
    join_emptiness,
    join_emptiness_program,
    load_and_solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
