"""mtskit: bit-exact multiple-transform-selection inverse transform model.

Integer DCT-II/DST-VII/DCT-VIII kernels for every supported size, a
cycle-level simulator of the shared 32-multiplier datapath, a structural
cost model for the multiplierless and multiplier architectures, and the
pseudo-random verification harness tying them together.
"""

from .blocks import Block, BlockFile, TransformSpec, read_block, write_block_binary, write_block_text
from .coeff import (
    CoeffMatrix,
    PermSignPair,
    RomImage,
    TransformKind,
    basis_value,
    dct8_from_dst7,
    integer_matrix,
    pack_rom,
)
from .cost import AdderGraph, CostReport, architecture_cost, fps_estimate, mcm_adder_graph
from .harness import Campaign, export_golden, run_selfcheck, verify_golden
from .pipeline import CycleReport, MtsDatapath, block_cycles, fixed_latency
from .transform import (
    forward_2d,
    inverse_1d_matrix,
    inverse_2d,
    inverse_dct2_butterfly,
    inverse_mts_shared,
    retained_count,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockFile",
    "TransformSpec",
    "read_block",
    "write_block_binary",
    "write_block_text",
    "CoeffMatrix",
    "PermSignPair",
    "RomImage",
    "TransformKind",
    "basis_value",
    "dct8_from_dst7",
    "integer_matrix",
    "pack_rom",
    "AdderGraph",
    "CostReport",
    "architecture_cost",
    "fps_estimate",
    "mcm_adder_graph",
    "Campaign",
    "export_golden",
    "run_selfcheck",
    "verify_golden",
    "CycleReport",
    "MtsDatapath",
    "block_cycles",
    "fixed_latency",
    "forward_2d",
    "inverse_1d_matrix",
    "inverse_2d",
    "inverse_dct2_butterfly",
    "inverse_mts_shared",
    "retained_count",
    "__version__",
]
