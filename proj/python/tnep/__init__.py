"""Transmission network expansion planning with a two-stage DC/AC artificial bee colony."""
from ._tnep import (Case, CaseError, FormatError, checksum, dc_flow, evaluate, load_case, parse_case,
                    plan)

__all__ = ["Case", "CaseError", "FormatError", "checksum", "dc_flow", "evaluate", "load_case", "parse_case",
           "plan"]
