"""Dataset construction: triples, variants, encodings, splits and storage."""

from othellonet.dataset.encoding import (
    CELL_TO_INDEX,
    INDEX_TO_CELL,
    NUM_OUTPUTS,
    OUTPUT_CELLS,
    EncodingScheme,
    encode,
    encode_batch,
    index_cell,
    target_index,
    target_indices,
)
from othellonet.dataset.errors import (
    BadMagic,
    CenterCell,
    ChecksumMismatch,
    DatasetError,
    EmptyDataset,
    IllegalTarget,
    VersionMismatch,
)
from othellonet.dataset.split import SplitOrder, SplitSpec, orbit_keys, split
from othellonet.dataset.storage import DatasetHeader, load, load_with_header, save
from othellonet.dataset.triples import (
    DatasetVariant,
    Triple,
    TripleSet,
    augment,
    bootstrap_sample,
    build_variant,
    consistency_upper_bound,
    dedup,
    extract,
    majority_baseline,
    stats,
)
