"""Flash rewriting codes, buffer codes, their bounds and a write-count verifier."""

from .core import ERASE, CellVector, ContractError, CorruptStateError, UnsupportedError, is_erase
from .verifier import SCHEMES, SchemeHandle, make_handle

__version__ = "0.1.0"
